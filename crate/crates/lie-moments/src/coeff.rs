//! Polynomial coefficients in the expectations `x_1, …, x_M` and in `ħ`,
//! over exact Gaussian rationals.
//!
//! Every number the ordering engine produces lives here until the moment it
//! is evaluated on a concrete state; only [`CoeffPoly::eval`] touches floating
//! point. The text format emitted by [`CoeffPoly::to_string`] is parsed back
//! by [`CoeffPoly::parse`], which is what the on-disk operator format uses.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;
use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::index::MultiIndex;
use crate::rational::{GaussianRational, Rational};

/// One monomial `x^{a⃗} ħ^p` (without its scalar coefficient).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CoeffMono {
    pub x_powers: MultiIndex,
    pub hbar_power: u32,
}

impl CoeffMono {
    pub fn unit(dim: usize) -> Self {
        CoeffMono {
            x_powers: MultiIndex::zero(dim),
            hbar_power: 0,
        }
    }

    fn mul(&self, other: &CoeffMono) -> CoeffMono {
        CoeffMono {
            x_powers: self.x_powers.plus(&other.x_powers),
            hbar_power: self.hbar_power + other.hbar_power,
        }
    }
}

/// Polynomial in `x_1, …, x_M` and `ħ` with [`GaussianRational`] coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoeffPoly {
    dim: usize,
    terms: BTreeMap<CoeffMono, GaussianRational>,
}

impl CoeffPoly {
    pub fn zero(dim: usize) -> Self {
        CoeffPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        let mut p = CoeffPoly::zero(dim);
        p.add_term(CoeffMono::unit(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussianRational::one())
    }

    pub fn from_rational(dim: usize, r: Rational) -> Self {
        Self::constant(dim, GaussianRational::from_rational(r))
    }

    /// The variable `x_{k+1}` (zero-based `k`).
    pub fn x(dim: usize, k: usize) -> Self {
        let mut p = CoeffPoly::zero(dim);
        p.add_term(
            CoeffMono {
                x_powers: MultiIndex::unit(dim, k),
                hbar_power: 0,
            },
            GaussianRational::one(),
        );
        p
    }

    /// `ħ^p`.
    pub fn hbar_pow(dim: usize, p: u32) -> Self {
        let mut poly = CoeffPoly::zero(dim);
        poly.add_term(
            CoeffMono {
                x_powers: MultiIndex::zero(dim),
                hbar_power: p,
            },
            GaussianRational::one(),
        );
        poly
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CoeffMono, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c · mono`, dropping the slot if it cancels to zero.
    pub fn add_term(&mut self, mono: CoeffMono, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(mono.x_powers.dim(), self.dim);
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = &*slot.get() + &c;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    slot.insert(sum);
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &CoeffPoly) {
        debug_assert_eq!(self.dim, other.dim);
        for (mono, c) in &other.terms {
            self.add_term(mono.clone(), c.clone());
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> CoeffPoly {
        if s.is_zero() {
            return CoeffPoly::zero(self.dim);
        }
        CoeffPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * s))
                .collect(),
        }
    }

    pub fn scale_rational(&self, s: &Rational) -> CoeffPoly {
        self.scale(&GaussianRational::from_rational(s.clone()))
    }

    /// Multiplication by the imaginary unit.
    pub fn times_i(&self) -> CoeffPoly {
        CoeffPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.times_i()))
                .collect(),
        }
    }

    /// Coefficient-wise complex conjugate (`x` and `ħ` are real symbols).
    pub fn conj(&self) -> CoeffPoly {
        CoeffPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> CoeffPoly {
        let mut acc = CoeffPoly::one(self.dim);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// True if every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    /// True if `ħ` only appears with even powers.
    pub fn has_only_even_hbar(&self) -> bool {
        self.terms.keys().all(|m| m.hbar_power % 2 == 0)
    }

    pub fn max_x_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.x_powers.degree())
            .max()
            .unwrap_or(0)
    }

    /// Splits by power of `ħ`: the piece at key `p` has all `ħ` factors
    /// stripped, so `Σ_p ħ^p · piece_p` reassembles the original.
    pub fn hbar_split(&self) -> BTreeMap<u32, CoeffPoly> {
        let mut out: BTreeMap<u32, CoeffPoly> = BTreeMap::new();
        for (mono, c) in &self.terms {
            let slot = out
                .entry(mono.hbar_power)
                .or_insert_with(|| CoeffPoly::zero(self.dim));
            slot.add_term(
                CoeffMono {
                    x_powers: mono.x_powers.clone(),
                    hbar_power: 0,
                },
                c.clone(),
            );
        }
        out
    }

    /// The `ħ^p` slice (with the `ħ` factors stripped).
    pub fn hbar_slice(&self, p: u32) -> CoeffPoly {
        let mut out = CoeffPoly::zero(self.dim);
        for (mono, c) in &self.terms {
            if mono.hbar_power == p {
                out.add_term(
                    CoeffMono {
                        x_powers: mono.x_powers.clone(),
                        hbar_power: 0,
                    },
                    c.clone(),
                );
            }
        }
        out
    }

    /// `∂/∂x_{k+1}`.
    pub fn partial_x(&self, k: usize) -> CoeffPoly {
        let mut out = CoeffPoly::zero(self.dim);
        for (mono, c) in &self.terms {
            let e = mono.x_powers.get(k);
            if e == 0 {
                continue;
            }
            let lowered = mono.x_powers.minus_unit(k).expect("exponent checked");
            out.add_term(
                CoeffMono {
                    x_powers: lowered,
                    hbar_power: mono.hbar_power,
                },
                c.scale(&Rational::from_integer(BigInt::from(e))),
            );
        }
        out
    }

    /// Evaluates at concrete expectations and `ħ`.
    pub fn eval(&self, x: &[f64], hbar: f64) -> Complex64 {
        assert_eq!(x.len(), self.dim, "evaluation point has wrong dimension");
        let mut acc = Complex64::new(0.0, 0.0);
        for (mono, c) in &self.terms {
            let mut v = c.to_complex_f64();
            for (k, &xv) in x.iter().enumerate() {
                let e = mono.x_powers.get(k);
                if e > 0 {
                    v *= xv.powi(e as i32);
                }
            }
            if mono.hbar_power > 0 {
                v *= hbar.powi(mono.hbar_power as i32);
            }
            acc += v;
        }
        acc
    }

    /// Parses the textual form produced by `Display`; see the module docs.
    /// `dim` fixes the number of `x` variables (mentioning `x5` in a
    /// 3-dimensional context is an error).
    pub fn parse(s: &str, dim: usize) -> Result<CoeffPoly, CoeffParseError> {
        let tokens = lex(s)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            dim,
        };
        let poly = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(CoeffParseError::TrailingInput {
                at: p.describe_current(),
            });
        }
        Ok(poly)
    }
}

impl Add for &CoeffPoly {
    type Output = CoeffPoly;
    fn add(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &CoeffPoly {
    type Output = CoeffPoly;
    fn sub(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = self.clone();
        out.add_assign(&-rhs);
        out
    }
}

impl Neg for &CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        CoeffPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &CoeffPoly {
    type Output = CoeffPoly;
    fn mul(self, rhs: &CoeffPoly) -> CoeffPoly {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = CoeffPoly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Add for CoeffPoly {
    type Output = CoeffPoly;
    fn add(self, rhs: CoeffPoly) -> CoeffPoly {
        &self + &rhs
    }
}

impl Sub for CoeffPoly {
    type Output = CoeffPoly;
    fn sub(self, rhs: CoeffPoly) -> CoeffPoly {
        &self - &rhs
    }
}

impl Mul for CoeffPoly {
    type Output = CoeffPoly;
    fn mul(self, rhs: CoeffPoly) -> CoeffPoly {
        &self * &rhs
    }
}

impl Neg for CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        -&self
    }
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

fn mono_string(mono: &CoeffMono) -> String {
    let mut parts = Vec::new();
    for k in 0..mono.x_powers.dim() {
        let e = mono.x_powers.get(k);
        if e == 1 {
            parts.push(format!("x{}", k + 1));
        } else if e > 1 {
            parts.push(format!("x{}^{}", k + 1, e));
        }
    }
    if mono.hbar_power == 1 {
        parts.push("hbar".to_string());
    } else if mono.hbar_power > 1 {
        parts.push(format!("hbar^{}", mono.hbar_power));
    }
    parts.join("*")
}

/// Renders one term as (leading_minus, body-without-sign).
fn term_string(mono: &CoeffMono, c: &GaussianRational) -> (bool, String) {
    let m = mono_string(mono);
    // Pull the sign out only for real or pure-imaginary coefficients; a
    // genuinely complex coefficient is parenthesized as-is.
    if c.is_real() {
        let neg = c.re < Rational::zero();
        let mag = if neg { -c.re.clone() } else { c.re.clone() };
        let body = if m.is_empty() {
            format!("{mag}")
        } else if mag.is_one() {
            m
        } else {
            format!("{mag}*{m}")
        };
        (neg, body)
    } else if c.re.is_zero() {
        let neg = c.im < Rational::zero();
        let mag = if neg { -c.im.clone() } else { c.im.clone() };
        let coeff = if mag.is_one() {
            "i".to_string()
        } else {
            format!("{mag}*i")
        };
        let body = if m.is_empty() {
            coeff
        } else {
            format!("{coeff}*{m}")
        };
        (neg, body)
    } else {
        let body = if m.is_empty() {
            format!("({c})")
        } else {
            format!("({c})*{m}")
        };
        (false, body)
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Degree-major in x, then by hbar power: low orders first.
        let mut keys: Vec<&CoeffMono> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            a.x_powers
                .cmp_graded(&b.x_powers)
                .then(a.hbar_power.cmp(&b.hbar_power))
        });
        for (pos, mono) in keys.iter().enumerate() {
            let (neg, body) = term_string(mono, &self.terms[*mono]);
            if pos == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{body}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Errors from [`CoeffPoly::parse`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoeffParseError {
    #[error("unexpected character {found:?} at byte {at}")]
    UnexpectedChar { found: char, at: usize },
    #[error("unexpected {found} (expected {expected})")]
    UnexpectedToken { found: String, expected: String },
    #[error("input ended while expecting {expected}")]
    UnexpectedEnd { expected: String },
    #[error("trailing input starting at {at}")]
    TrailingInput { at: String },
    #[error("variable x{var} out of range for dimension {dim}")]
    VariableOutOfRange { var: usize, dim: usize },
    #[error("invalid integer literal {text:?}")]
    InvalidNumber { text: String },
    #[error("division by zero in rational literal")]
    ZeroDenominator,
    #[error("exponent {text:?} too large")]
    ExponentTooLarge { text: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Number(String),
    Hbar,
    ImaginaryUnit,
    Variable(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn lex(s: &str) -> Result<Vec<Token>, CoeffParseError> {
    let mut tokens = Vec::new();
    let bytes = s.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => pos += 1,
            '+' => {
                tokens.push(Token::Plus);
                pos += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                pos += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                pos += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                pos += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                pos += 1;
            }
            '(' => {
                tokens.push(Token::Open);
                pos += 1;
            }
            ')' => {
                tokens.push(Token::Close);
                pos += 1;
            }
            '0'..='9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                tokens.push(Token::Number(s[start..pos].to_string()));
            }
            'i' => {
                tokens.push(Token::ImaginaryUnit);
                pos += 1;
            }
            'h' => {
                if s[pos..].starts_with("hbar") {
                    tokens.push(Token::Hbar);
                    pos += 4;
                } else {
                    return Err(CoeffParseError::UnexpectedChar { found: c, at: pos });
                }
            }
            'x' => {
                let start = pos + 1;
                let mut end = start;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                if end == start {
                    return Err(CoeffParseError::UnexpectedChar { found: c, at: pos });
                }
                let var: usize =
                    s[start..end]
                        .parse()
                        .map_err(|_| CoeffParseError::InvalidNumber {
                            text: s[start..end].to_string(),
                        })?;
                tokens.push(Token::Variable(var));
                pos = end;
            }
            other => return Err(CoeffParseError::UnexpectedChar { found: other, at: pos }),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn describe_current(&self) -> String {
        match self.peek() {
            Some(t) => format!("{t:?}"),
            None => "end of input".to_string(),
        }
    }

    /// expr := ['-'] term (('+' | '-') term)*
    fn expr(&mut self) -> Result<CoeffPoly, CoeffParseError> {
        let mut negate_first = false;
        if self.peek() == Some(&Token::Minus) {
            self.bump();
            negate_first = true;
        }
        let mut acc = self.term()?;
        if negate_first {
            acc = -acc;
        }
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc.add_assign(&t);
                }
                Token::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc.add_assign(&-&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    /// term := factor ('*' factor)*
    fn term(&mut self) -> Result<CoeffPoly, CoeffParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.bump();
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    /// factor := atom ('^' number)?   with rational literals handled in atom
    fn factor(&mut self) -> Result<CoeffPoly, CoeffParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            let text = match self.bump() {
                Some(Token::Number(text)) => text,
                Some(other) => {
                    return Err(CoeffParseError::UnexpectedToken {
                        found: format!("{other:?}"),
                        expected: "exponent".to_string(),
                    })
                }
                None => {
                    return Err(CoeffParseError::UnexpectedEnd {
                        expected: "exponent".to_string(),
                    })
                }
            };
            let e: u32 = text
                .parse()
                .map_err(|_| CoeffParseError::ExponentTooLarge { text })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    /// atom := '(' expr ')' | 'i' | 'hbar' | variable | number ('/' number)?
    fn atom(&mut self) -> Result<CoeffPoly, CoeffParseError> {
        match self.bump() {
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::Close) => Ok(inner),
                    Some(other) => Err(CoeffParseError::UnexpectedToken {
                        found: format!("{other:?}"),
                        expected: "')'".to_string(),
                    }),
                    None => Err(CoeffParseError::UnexpectedEnd {
                        expected: "')'".to_string(),
                    }),
                }
            }
            Some(Token::ImaginaryUnit) => Ok(CoeffPoly::constant(self.dim, GaussianRational::i())),
            Some(Token::Hbar) => Ok(CoeffPoly::hbar_pow(self.dim, 1)),
            Some(Token::Variable(var)) => {
                if var == 0 || var > self.dim {
                    return Err(CoeffParseError::VariableOutOfRange { var, dim: self.dim });
                }
                Ok(CoeffPoly::x(self.dim, var - 1))
            }
            Some(Token::Number(text)) => {
                let numerator: BigInt =
                    text.parse()
                        .map_err(|_| CoeffParseError::InvalidNumber { text: text.clone() })?;
                if self.peek() == Some(&Token::Slash) {
                    self.bump();
                    let dtext = match self.bump() {
                        Some(Token::Number(dtext)) => dtext,
                        Some(other) => {
                            return Err(CoeffParseError::UnexpectedToken {
                                found: format!("{other:?}"),
                                expected: "denominator".to_string(),
                            })
                        }
                        None => {
                            return Err(CoeffParseError::UnexpectedEnd {
                                expected: "denominator".to_string(),
                            })
                        }
                    };
                    let denominator: BigInt = dtext
                        .parse()
                        .map_err(|_| CoeffParseError::InvalidNumber { text: dtext.clone() })?;
                    if denominator.is_zero() {
                        return Err(CoeffParseError::ZeroDenominator);
                    }
                    Ok(CoeffPoly::from_rational(
                        self.dim,
                        Rational::new(numerator, denominator),
                    ))
                } else {
                    Ok(CoeffPoly::from_rational(
                        self.dim,
                        Rational::from_integer(numerator),
                    ))
                }
            }
            Some(other) => Err(CoeffParseError::UnexpectedToken {
                found: format!("{other:?}"),
                expected: "a factor".to_string(),
            }),
            None => Err(CoeffParseError::UnexpectedEnd {
                expected: "a factor".to_string(),
            }),
        }
    }
}
