//! Exact scalar arithmetic: arbitrary-precision rationals and Gaussian
//! rationals `a + b·i` with `a, b ∈ ℚ`.
//!
//! Ordering coefficients are Gaussian rationals in disguise (every `iħ` from a
//! commutator contributes a factor of `i`), so keeping the complex unit exact
//! costs nothing and removes a whole class of sign bugs.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num::complex::Complex64;
use num::traits::ToPrimitive;
use num::{BigInt, BigRational, One, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Builds `p/q` exactly. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    assert!(q != 0, "rational with zero denominator");
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Builds the integer rational `p`.
pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Rounds a rational to the nearest `f64`.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussianRational {
            re: Rational::one(),
            im: Rational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_i64(p: i64) -> Self {
        Self::from_rational(rat_int(p))
    }

    /// `p/q` as a real Gaussian rational.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(rat(p, q))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Multiplication by `i` in place of a full product.
    pub fn times_i(&self) -> Self {
        GaussianRational {
            re: -self.im.clone(),
            im: self.re.clone(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        GaussianRational {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn to_complex_f64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl From<Rational> for GaussianRational {
    fn from(re: Rational) -> Self {
        GaussianRational::from_rational(re)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        &self + &rhs
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        &self - &rhs
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        &self * &rhs
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical forms: `0`, `3/2`, `-2`, `i`, `-i`, `1/2*i`, `1-1/2*i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let write_im = |f: &mut fmt::Formatter<'_>, im: &Rational, leading: bool| -> fmt::Result {
            // `leading` means no real part was printed before us.
            let (sign, mag) = if im < &Rational::zero() {
                ("-", -im.clone())
            } else {
                (if leading { "" } else { "+" }, im.clone())
            };
            if mag.is_one() {
                write!(f, "{sign}i")
            } else {
                write!(f, "{sign}{mag}*i")
            }
        };
        if self.re.is_zero() {
            write_im(f, &self.im, true)
        } else {
            write!(f, "{}", self.re)?;
            write_im(f, &self.im, false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_product() {
        // (1 + i/2)(2 - i) = 2 - i + i + 1/2 = 5/2
        let a = GaussianRational::new(rat_int(1), rat(1, 2));
        let b = GaussianRational::new(rat_int(2), rat_int(-1));
        assert_eq!(&a * &b, GaussianRational::ratio(5, 2));
        assert_eq!(a.times_i(), GaussianRational::new(rat(-1, 2), rat_int(1)));
        assert_eq!(&a * &a.conj(), GaussianRational::ratio(5, 4));
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussianRational::zero().to_string(), "0");
        assert_eq!(GaussianRational::ratio(-3, 2).to_string(), "-3/2");
        assert_eq!(GaussianRational::i().to_string(), "i");
        assert_eq!((-GaussianRational::i()).to_string(), "-i");
        assert_eq!(
            GaussianRational::new(rat_int(1), rat(-1, 2)).to_string(),
            "1-1/2*i"
        );
        assert_eq!(
            GaussianRational::new(rat_int(0), rat(5, 3)).to_string(),
            "5/3*i"
        );
    }

    #[test]
    fn f64_roundtrip_on_dyadics() {
        let x = rat(-7, 8);
        assert_eq!(rat_to_f64(&x), -0.875);
    }
}
