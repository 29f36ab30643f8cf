//! Gaussian rationals: complex numbers with exact rational real and
//! imaginary parts. The coefficient field for every computation in this crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// re + im*i with both parts kept in reduced canonical form by `BigRational`.
/// The derived `Ord` (lexicographic on re, then im) is used only for
/// deterministic sorting, not for anything analytic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussianRational::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// num/den as a real rational. Panics if den == 0.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// a/b + (c/d)i, convenient for tests and fixtures.
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussianRational::new(
            BigRational::new(BigInt::from(a), BigInt::from(b)),
            BigRational::new(BigInt::from(c), BigInt::from(d)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 = z * conj(z), a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational::new(&self.re / &n, -&self.im / &n))
    }

    /// Exact square root within the Gaussian rationals, if one exists.
    /// Solves (a+bi)^2 = self; used when factoring quadratics into branches.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(GaussianRational::zero());
        }
        // (a+bi)^2 = a^2-b^2 + 2ab i. With r = |self| (must be rational),
        // a^2 = (re + r)/2 and b^2 = (r - re)/2; both must be rational squares.
        let r = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(BigInt::from(2));
        let a2 = (&self.re + &r) / &two;
        let b2 = (&r - &self.re) / &two;
        let a = rational_sqrt(&a2)?;
        let b = rational_sqrt(&b2)?;
        // Fix the sign of b so that 2ab matches the imaginary part.
        let cand = |a: BigRational, b: BigRational| {
            let z = GaussianRational::new(a, b);
            if &z.clone() * &z == *self {
                Some(z)
            } else {
                None
            }
        };
        cand(a.clone(), b.clone())
            .or_else(|| cand(a.clone(), -b.clone()))
            .or_else(|| cand(b.clone(), a.clone()))
            .or_else(|| cand(b, -a))
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    #[allow(clippy::suspicious_arithmetic_impl)] // a/b computed as a * b⁻¹
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.inv().expect("division by zero GaussianRational")
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical text form: `3`, `-1/2`, `i`, `-2i`, `1/2+i`, `1-2i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let im_mag = self.im.abs();
        let im_str = if im_mag.is_one() {
            "i".to_string()
        } else {
            format!("{}i", fmt_rational(&im_mag))
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_str}")
            } else {
                write!(f, "{im_str}")
            }
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "{}{}{}", fmt_rational(&self.re), sign, im_str)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> GaussianRational {
        GaussianRational::new(
            BigRational::from_integer(BigInt::from(a)),
            BigRational::from_integer(BigInt::from(b)),
        )
    }

    #[test]
    fn field_ops() {
        let z = g(1, 2);
        let w = g(3, -1);
        assert_eq!(&z * &w, g(5, 5));
        assert_eq!(&z + &w, g(4, 1));
        assert_eq!(&(&z * &w) / &w, z);
        assert_eq!(&z * &z.inv().unwrap(), GaussianRational::one());
    }

    #[test]
    fn i_squares_to_minus_one() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, g(-1, 0));
    }

    #[test]
    fn sqrt_cases() {
        assert_eq!(g(-1, 0).sqrt_exact(), Some(GaussianRational::i()));
        assert_eq!(g(0, 2).sqrt_exact(), Some(g(1, 1)));
        assert_eq!(g(4, 0).sqrt_exact(), Some(g(2, 0)));
        assert_eq!(
            GaussianRational::from_ratio(1, 4).sqrt_exact(),
            Some(GaussianRational::from_ratio(1, 2))
        );
        assert_eq!(g(2, 0).sqrt_exact(), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(g(3, 0).to_string(), "3");
        assert_eq!(GaussianRational::from_ratio(-1, 2).to_string(), "-1/2");
        assert_eq!(g(0, 1).to_string(), "i");
        assert_eq!(g(0, -1).to_string(), "-i");
        assert_eq!(g(1, -2).to_string(), "1-2i");
        assert_eq!(GaussianRational::from_parts(1, 2, 1, 1).to_string(), "1/2+i");
    }
}
