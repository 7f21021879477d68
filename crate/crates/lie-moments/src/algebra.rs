//! Lie algebra data: structure constants, Killing metric, validation.
//!
//! The commutation relations are `[x̂_i, x̂_j] = iħ ε_ij^k x̂_k` with exact
//! rational structure constants `ε_ij^k`. An algebra optionally carries an
//! inverse metric `k^{ij}` (symmetric, invertible) used to contract the
//! quadratic Casimir `C = k^{ij} x_i x_j`; the normalization of `k` relative
//! to the Killing form `B_ij = ε_ik^l ε_jl^k` is a modelling choice, so `k`
//! is stored as given rather than recomputed.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{rat_to_f64, Rational};
use num::{BigInt, Zero};

/// A finite-dimensional real Lie algebra with exact structure constants.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    generator_names: Vec<String>,
    /// Dense table, `eps[(i*dim + j)*dim + k] = ε_ij^k`.
    eps: Vec<Rational>,
    eps_f64: Vec<f64>,
    /// Inverse metric `k^{ij}`, row-major, if one was provided.
    killing_inverse: Option<Vec<Rational>>,
    killing_inverse_f64: Option<Vec<f64>>,
}

/// Errors constructing or loading an algebra.
#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("algebra dimension must be at least 1")]
    DimensionZero,
    #[error("structure-constant index ({i},{j},{k}) out of range for dimension {dim} (indices are 1-based)")]
    IndexOutOfRange { i: usize, j: usize, k: usize, dim: usize },
    #[error("conflicting values for epsilon_({i},{j})^{k} (antisymmetry partner already set)")]
    ConflictingEntry { i: usize, j: usize, k: usize },
    #[error("cannot parse {text:?} as an exact rational")]
    BadRational { text: String },
    #[error("killing matrix must be {dim}x{dim}, got row of length {got}")]
    KillingShape { dim: usize, got: usize },
    #[error("generator list has {got} names, expected {dim}")]
    GeneratorCount { dim: usize, got: usize },
    #[error("unknown built-in algebra {name:?} (available: su2, sl2r-cosmo)")]
    UnknownBuiltin { name: String },
    #[error("no inverse metric available for algebra {name:?}; supply a killing table")]
    MissingKilling { name: String },
    #[error("reading algebra file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing algebra file: {0}")]
    Toml(#[from] toml::de::Error),
}

impl LieAlgebra {
    /// Builds an algebra from sparse 0-based entries `(i, j, k, ε_ij^k)`.
    ///
    /// The antisymmetric partner `ε_ji^k = −ε_ij^k` is filled in
    /// automatically; listing both is allowed as long as the values agree.
    pub fn from_structure_constants(
        name: &str,
        dim: usize,
        entries: &[(usize, usize, usize, Rational)],
        generator_names: Option<Vec<String>>,
        killing_inverse: Option<Vec<Vec<Rational>>>,
    ) -> Result<Self, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::DimensionZero);
        }
        let mut eps = vec![Rational::zero(); dim * dim * dim];
        let mut set = vec![false; dim * dim * dim];
        let at = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for (i, j, k, value) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(AlgebraError::IndexOutOfRange {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    dim,
                });
            }
            for (a, b, v) in [(i, j, value.clone()), (j, i, -value.clone())] {
                let slot = at(a, b, k);
                if set[slot] {
                    if eps[slot] != v {
                        return Err(AlgebraError::ConflictingEntry {
                            i: a + 1,
                            j: b + 1,
                            k: k + 1,
                        });
                    }
                } else {
                    eps[slot] = v;
                    set[slot] = true;
                }
            }
        }
        let generator_names = match generator_names {
            Some(names) => {
                if names.len() != dim {
                    return Err(AlgebraError::GeneratorCount {
                        dim,
                        got: names.len(),
                    });
                }
                names
            }
            None => (1..=dim).map(|k| format!("x{k}")).collect(),
        };
        let killing_inverse = match killing_inverse {
            Some(rows) => {
                let mut flat = Vec::with_capacity(dim * dim);
                if rows.len() != dim {
                    return Err(AlgebraError::KillingShape {
                        dim,
                        got: rows.len(),
                    });
                }
                for row in rows {
                    if row.len() != dim {
                        return Err(AlgebraError::KillingShape { dim, got: row.len() });
                    }
                    flat.extend(row);
                }
                Some(flat)
            }
            None => None,
        };
        let eps_f64 = eps.iter().map(rat_to_f64).collect();
        let killing_inverse_f64 = killing_inverse
            .as_ref()
            .map(|m| m.iter().map(rat_to_f64).collect());
        Ok(LieAlgebra {
            name: name.to_string(),
            dim,
            generator_names,
            eps,
            eps_f64,
            killing_inverse,
            killing_inverse_f64,
        })
    }

    /// `su(2)`: `ε` is the Levi-Civita symbol, inverse metric `k^{ij} = δ^{ij}`,
    /// Casimir `C = x_1^2 + x_2^2 + x_3^2`.
    pub fn su2() -> Self {
        let one = Rational::from_integer(BigInt::from(1));
        let entries = vec![
            (0, 1, 2, one.clone()),
            (1, 2, 0, one.clone()),
            (2, 0, 1, one.clone()),
        ];
        let k = |v: i64| Rational::from_integer(BigInt::from(v));
        LieAlgebra::from_structure_constants(
            "su2",
            3,
            &entries,
            Some(vec!["J1".into(), "J2".into(), "J3".into()]),
            Some(vec![
                vec![k(1), k(0), k(0)],
                vec![k(0), k(1), k(0)],
                vec![k(0), k(0), k(1)],
            ]),
        )
        .expect("built-in algebra is well-formed")
    }

    /// The cosmological `sl(2,R)` basis `(V̄, J_+, J_−)` with
    /// `[V̄, J_+] = iħ J_−`, `[V̄, J_−] = −iħ J_+`, `[J_+, J_−] = −iħ V̄`
    /// and inverse metric `k = diag(−1, 1, 1)`, so the Casimir is
    /// `C = J_+^2 + J_−^2 − V̄^2`.
    pub fn sl2r_cosmo() -> Self {
        let one = Rational::from_integer(BigInt::from(1));
        let entries = vec![
            (0, 1, 2, one.clone()),
            (0, 2, 1, -one.clone()),
            (1, 2, 0, -one.clone()),
        ];
        let k = |v: i64| Rational::from_integer(BigInt::from(v));
        LieAlgebra::from_structure_constants(
            "sl2r-cosmo",
            3,
            &entries,
            Some(vec!["Vbar".into(), "Jplus".into(), "Jminus".into()]),
            Some(vec![
                vec![k(-1), k(0), k(0)],
                vec![k(0), k(1), k(0)],
                vec![k(0), k(0), k(1)],
            ]),
        )
        .expect("built-in algebra is well-formed")
    }

    /// Looks up a built-in algebra by name.
    pub fn builtin(name: &str) -> Result<Self, AlgebraError> {
        match name {
            "su2" => Ok(Self::su2()),
            "sl2r-cosmo" => Ok(Self::sl2r_cosmo()),
            other => Err(AlgebraError::UnknownBuiltin {
                name: other.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_name(&self, k: usize) -> &str {
        &self.generator_names[k]
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    /// `ε_ij^k`, zero-based indices.
    pub fn eps(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.eps[(i * self.dim + j) * self.dim + k]
    }

    pub fn eps_f64(&self, i: usize, j: usize, k: usize) -> f64 {
        self.eps_f64[(i * self.dim + j) * self.dim + k]
    }

    /// The inverse metric `k^{ij}` if one was provided.
    pub fn killing_inverse(&self, i: usize, j: usize) -> Option<&Rational> {
        self.killing_inverse.as_ref().map(|m| &m[i * self.dim + j])
    }

    pub fn killing_inverse_f64(&self, i: usize, j: usize) -> Option<f64> {
        self.killing_inverse_f64
            .as_ref()
            .map(|m| m[i * self.dim + j])
    }

    pub fn has_killing_inverse(&self) -> bool {
        self.killing_inverse.is_some()
    }

    /// Fails with a clear error when no inverse metric is available.
    pub fn require_killing_inverse(&self) -> Result<&[Rational], AlgebraError> {
        self.killing_inverse
            .as_deref()
            .ok_or_else(|| AlgebraError::MissingKilling {
                name: self.name.clone(),
            })
    }

    /// The Killing form `B_ij = Σ_kl ε_ik^l ε_jl^k`, computed exactly from the
    /// structure constants (row-major).
    pub fn killing_form(&self) -> Vec<Rational> {
        let d = self.dim;
        let mut b = vec![Rational::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = Rational::zero();
                for k in 0..d {
                    for l in 0..d {
                        acc += self.eps(i, k, l) * self.eps(j, l, k);
                    }
                }
                b[i * d + j] = acc;
            }
        }
        b
    }

    /// Runs all structural checks and reports each one.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        checks.push(self.check_antisymmetry());
        checks.push(self.check_jacobi());
        if self.killing_inverse.is_some() {
            checks.push(self.check_killing_symmetric());
            checks.push(self.check_killing_invertible());
        }
        ValidationReport {
            algebra_name: self.name.clone(),
            checks,
        }
    }

    fn check_antisymmetry(&self) -> ValidationCheck {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let sum = self.eps(i, j, k) + self.eps(j, i, k);
                    if !sum.is_zero() {
                        return ValidationCheck {
                            name: "antisymmetry",
                            passed: false,
                            detail: format!(
                                "epsilon_({},{})^{} + epsilon_({},{})^{} = {} != 0",
                                i + 1,
                                j + 1,
                                k + 1,
                                j + 1,
                                i + 1,
                                k + 1,
                                sum
                            ),
                        };
                    }
                }
            }
        }
        ValidationCheck {
            name: "antisymmetry",
            passed: true,
            detail: "epsilon_ij^k = -epsilon_ji^k holds for all index triples".into(),
        }
    }

    fn check_jacobi(&self) -> ValidationCheck {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut acc = Rational::zero();
                        for m in 0..d {
                            acc += self.eps(i, j, m) * self.eps(m, k, l);
                            acc += self.eps(j, k, m) * self.eps(m, i, l);
                            acc += self.eps(k, i, m) * self.eps(m, j, l);
                        }
                        if !acc.is_zero() {
                            return ValidationCheck {
                                name: "jacobi",
                                passed: false,
                                detail: format!(
                                    "cyclic sum fails at (i,j,k,l) = ({},{},{},{}): {}",
                                    i + 1,
                                    j + 1,
                                    k + 1,
                                    l + 1,
                                    acc
                                ),
                            };
                        }
                    }
                }
            }
        }
        ValidationCheck {
            name: "jacobi",
            passed: true,
            detail: "cyclic identity holds for all index quadruples".into(),
        }
    }

    fn check_killing_symmetric(&self) -> ValidationCheck {
        let m = self.killing_inverse.as_ref().unwrap();
        let d = self.dim;
        for i in 0..d {
            for j in (i + 1)..d {
                if m[i * d + j] != m[j * d + i] {
                    return ValidationCheck {
                        name: "metric symmetric",
                        passed: false,
                        detail: format!(
                            "k^({},{}) = {} but k^({},{}) = {}",
                            i + 1,
                            j + 1,
                            m[i * d + j],
                            j + 1,
                            i + 1,
                            m[j * d + i]
                        ),
                    };
                }
            }
        }
        ValidationCheck {
            name: "metric symmetric",
            passed: true,
            detail: "k^ij = k^ji".into(),
        }
    }

    fn check_killing_invertible(&self) -> ValidationCheck {
        let m = self.killing_inverse.as_ref().unwrap();
        let det = rational_det(m, self.dim);
        if det.is_zero() {
            ValidationCheck {
                name: "metric invertible",
                passed: false,
                detail: "det k = 0".into(),
            }
        } else {
            ValidationCheck {
                name: "metric invertible",
                passed: true,
                detail: format!("det k = {det}"),
            }
        }
    }

    // -- file format --------------------------------------------------------

    /// Parses the TOML algebra format; see [`LieAlgebra::to_toml_string`] for
    /// the layout. Epsilon values may be integers, floats (converted exactly),
    /// or strings like `"2/3"`; indices in the file are 1-based.
    pub fn from_toml_str(text: &str) -> Result<Self, AlgebraError> {
        let file: AlgebraFile = toml::from_str(text)?;
        let mut entries = Vec::with_capacity(file.epsilon.len());
        for e in &file.epsilon {
            if e.i == 0 || e.j == 0 || e.k == 0 {
                return Err(AlgebraError::IndexOutOfRange {
                    i: e.i,
                    j: e.j,
                    k: e.k,
                    dim: file.dim,
                });
            }
            entries.push((e.i - 1, e.j - 1, e.k - 1, value_to_rational(&e.value)?));
        }
        let killing = match &file.killing {
            Some(rows) => {
                let mut out = Vec::with_capacity(rows.len());
                for row in rows {
                    out.push(
                        row.iter()
                            .map(value_to_rational)
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                Some(out)
            }
            None => None,
        };
        LieAlgebra::from_structure_constants(
            file.name.as_deref().unwrap_or("custom"),
            file.dim,
            &entries,
            file.generators,
            killing,
        )
    }

    /// Serializes to the TOML algebra format with exact `"p/q"` values,
    /// listing each independent entry once (`i < j`).
    pub fn to_toml_string(&self) -> String {
        let d = self.dim;
        let mut epsilon = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                for k in 0..d {
                    let v = self.eps(i, j, k);
                    if !v.is_zero() {
                        epsilon.push(EpsilonEntry {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            value: toml::Value::String(v.to_string()),
                        });
                    }
                }
            }
        }
        let killing = self.killing_inverse.as_ref().map(|m| {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| toml::Value::String(m[i * d + j].to_string()))
                        .collect()
                })
                .collect()
        });
        let file = AlgebraFile {
            name: Some(self.name.clone()),
            dim: d,
            generators: Some(self.generator_names.clone()),
            epsilon,
            killing,
        };
        toml::to_string(&file).expect("algebra serializes")
    }

    pub fn load(path: &Path) -> Result<Self, AlgebraError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

/// One named structural check.
#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`LieAlgebra::validate`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub algebra_name: String,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra {:?}:", self.algebra_name)?;
        for c in &self.checks {
            let status = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "  [{status}] {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    name: Option<String>,
    dim: usize,
    generators: Option<Vec<String>>,
    #[serde(default)]
    epsilon: Vec<EpsilonEntry>,
    killing: Option<Vec<Vec<toml::Value>>>,
}

#[derive(Serialize, Deserialize)]
struct EpsilonEntry {
    i: usize,
    j: usize,
    k: usize,
    value: toml::Value,
}

fn value_to_rational(v: &toml::Value) -> Result<Rational, AlgebraError> {
    match v {
        toml::Value::Integer(n) => Ok(Rational::from_integer(BigInt::from(*n))),
        toml::Value::Float(f) => {
            Rational::from_float(*f).ok_or(AlgebraError::BadRational {
                text: f.to_string(),
            })
        }
        toml::Value::String(s) => parse_rational(s),
        other => Err(AlgebraError::BadRational {
            text: other.to_string(),
        }),
    }
}

fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let bad = || AlgebraError::BadRational { text: s.to_string() };
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.trim().parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Determinant by exact Gaussian elimination with partial (nonzero) pivoting.
fn rational_det(m: &[Rational], d: usize) -> Rational {
    let mut a: Vec<Rational> = m.to_vec();
    let mut det = Rational::from_integer(BigInt::from(1));
    for col in 0..d {
        let pivot_row = match (col..d).find(|&r| !a[r * d + col].is_zero()) {
            Some(r) => r,
            None => return Rational::zero(),
        };
        if pivot_row != col {
            for c in 0..d {
                a.swap(col * d + c, pivot_row * d + c);
            }
            det = -det;
        }
        let pivot = a[col * d + col].clone();
        det *= pivot.clone();
        for r in (col + 1)..d {
            let factor = &a[r * d + col] / &pivot;
            for c in col..d {
                let sub = &factor * &a[col * d + c];
                a[r * d + c] -= sub;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    #[test]
    fn builtins_validate_clean() {
        for name in ["su2", "sl2r-cosmo"] {
            let alg = LieAlgebra::builtin(name).unwrap();
            let report = alg.validate();
            assert!(report.passed(), "{report}");
            assert_eq!(report.checks.len(), 4);
        }
        assert!(matches!(
            LieAlgebra::builtin("so3"),
            Err(AlgebraError::UnknownBuiltin { .. })
        ));
    }

    #[test]
    fn killing_forms_of_builtins() {
        let su2 = LieAlgebra::su2();
        let b = su2.killing_form();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { rat_int(-2) } else { rat_int(0) };
                assert_eq!(b[i * 3 + j], expect, "B_({i},{j})");
            }
        }
        let cosmo = LieAlgebra::sl2r_cosmo();
        let b = cosmo.killing_form();
        let diag = [rat_int(-2), rat_int(2), rat_int(2)];
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { diag[i].clone() } else { rat_int(0) };
                assert_eq!(b[i * 3 + j], expect, "B_({i},{j})");
            }
        }
    }

    #[test]
    fn jacobi_violation_is_caught() {
        // [x1,x2] = x3, [x2,x3] = x1, [x3,x1] = x1: the cyclic sum for
        // (x1,x2,x3) leaves a bare [x1,x2] = x3 behind.
        let one = rat_int(1);
        let entries = vec![
            (0, 1, 2, one.clone()),
            (1, 2, 0, one.clone()),
            (2, 0, 0, one.clone()),
        ];
        let alg =
            LieAlgebra::from_structure_constants("broken", 3, &entries, None, None).unwrap();
        let report = alg.validate();
        assert!(!report.passed());
        let jacobi = report.checks.iter().find(|c| c.name == "jacobi").unwrap();
        assert!(!jacobi.passed);
        assert!(jacobi.detail.contains("(i,j,k,l)"), "{}", jacobi.detail);
    }

    #[test]
    fn conflicting_entries_rejected() {
        let entries = vec![(0, 1, 2, rat_int(1)), (1, 0, 2, rat_int(1))];
        let err = LieAlgebra::from_structure_constants("bad", 3, &entries, None, None)
            .err()
            .unwrap();
        assert!(matches!(err, AlgebraError::ConflictingEntry { .. }));
    }

    #[test]
    fn toml_roundtrip() {
        let alg = LieAlgebra::sl2r_cosmo();
        let text = alg.to_toml_string();
        let back = LieAlgebra::from_toml_str(&text).unwrap();
        assert_eq!(back.dim(), 3);
        assert_eq!(back.name(), "sl2r-cosmo");
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(alg.eps(i, j, k), back.eps(i, j, k));
                }
                assert_eq!(
                    alg.killing_inverse(i, j).unwrap(),
                    back.killing_inverse(i, j).unwrap()
                );
            }
        }
    }

    #[test]
    fn toml_value_flavors() {
        let text = r#"
            dim = 2
            epsilon = [
                { i = 1, j = 2, k = 1, value = 1 },
                { i = 1, j = 2, k = 2, value = 0.5 },
            ]
            killing = [["1", "0"], ["0", "-2/3"]]
        "#;
        let alg = LieAlgebra::from_toml_str(text).unwrap();
        assert_eq!(*alg.eps(0, 1, 0), rat_int(1));
        assert_eq!(*alg.eps(0, 1, 1), crate::rational::rat(1, 2));
        assert_eq!(*alg.eps(1, 0, 0), rat_int(-1));
        assert_eq!(
            *alg.killing_inverse(1, 1).unwrap(),
            crate::rational::rat(-2, 3)
        );
    }

    #[test]
    fn missing_metric_is_an_error_when_required() {
        let entries = vec![(0, 1, 2, rat_int(1))];
        let alg = LieAlgebra::from_structure_constants("nometric", 3, &entries, None, None)
            .unwrap();
        assert!(alg.require_killing_inverse().is_err());
        // validation simply skips the metric checks
        assert_eq!(alg.validate().checks.len(), 2);
    }
}
