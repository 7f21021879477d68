//! Semiclassical moment dynamics on Lie-algebra phase spaces.
//!
//! This crate works with quantum systems whose basic observables close under
//! commutation into a finite-dimensional Lie algebra, `[x̂_i, x̂_j] = iħ ε_ij^k x̂_k`.
//! A state is described not by a wave function but by the expectation values
//! `x_i = ⟨x̂_i⟩` together with the Weyl-ordered central moments
//! `Δ(x^{i⃗}) = ⟨(Δx̂)^{i⃗}⟩_Weyl`, truncated at some order `N`.
//!
//! The pieces fit together like this:
//!
//! * [`algebra`] — structure constants, Killing metric, and validation of
//!   user-supplied algebras; `su(2)` and a cosmological `sl(2,R)` basis ship
//!   built in.
//! * [`index`] — multi-index bookkeeping and moment counting.
//! * [`coeff`] — exact polynomial coefficients in the expectations `x_k` and
//!   in `ħ` over Gaussian rationals.
//! * [`weyl`] — the ordering engine: products, commutators, and expectation
//!   values of Weyl-ordered operator polynomials, computed exactly.
//! * [`moments`] — the truncated state itself.
//! * [`constraints`] — Casimir constraint towers `⟨ê_{i⃗}(Ĉ − c)⟩ = 0`,
//!   semiclassical grading, truncation, and projection of states onto the
//!   constraint surface.
//! * [`uncertainty`] — generalized (Schwarz) uncertainty relations between
//!   moments, and the rank bookkeeping that ties them to the constraints.
//! * [`cosmology`] — the `sl(2,R)` model: exact solutions, moment evolution,
//!   saturating (coherent) states, and the volume-asymmetry bound.
//! * [`oracle`] — independent matrix representations used to cross-check the
//!   symbolic engine numerically.
//! * [`config`] / [`cli`] — TOML run configuration and the command-line
//!   driver behind the `lie-moments` binary.
//!
//! Exactness is a design rule, not an aspiration: everything upstream of a
//! final expectation value (structure constants, ordering coefficients,
//! constraint coefficients) is kept in exact rational arithmetic, and floating
//! point enters only when a polynomial is evaluated on a concrete state.

pub mod algebra;
pub mod cli;
pub mod coeff;
pub mod config;
pub mod constraints;
pub mod cosmology;
pub mod index;
pub mod moments;
pub mod oracle;
pub mod rational;
pub mod uncertainty;
pub mod weyl;

pub use algebra::LieAlgebra;
pub use coeff::CoeffPoly;
pub use index::MultiIndex;
pub use moments::MomentState;
pub use weyl::{OperatorPolynomial, WeylEngine};

