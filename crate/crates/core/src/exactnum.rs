//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! Moduli are never square-rooted. Every comparison of sizes in this crate
//! goes through [`GaussianRational::sq_modulus`], which stays in `Q`.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// `n/d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text `p/q`, always with an explicit denominator (`0/1`, `3/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Exact square root when `r` is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// A complex number `re + im·i` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

pub type GR = GaussianRational;

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    /// `(a/b) + (c/d)i` from machine integers.
    pub fn from_ratios(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(rat(a, b), rat(c, d))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `re² + im²`.
    pub fn sq_modulus(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let m = self.sq_modulus();
        if m.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &m, -&self.im / &m))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self::new(-&self.im, self.re.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        fn m(a: &Rational, b: &Rational) -> Rational {
            if a.is_zero() || b.is_zero() {
                Rational::zero()
            } else if a.is_one() {
                b.clone()
            } else if b.is_one() {
                a.clone()
            } else {
                a * b
            }
        }
        if self.im.is_zero() {
            return GaussianRational::new(m(&self.re, &o.re), m(&self.re, &o.im));
        }
        if o.im.is_zero() {
            return GaussianRational::new(m(&self.re, &o.re), m(&self.im, &o.re));
        }
        GaussianRational::new(m(&self.re, &o.re) - m(&self.im, &o.im), m(&self.re, &o.im) + m(&self.im, &o.re))
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero, like the integer types.
    fn div(self, o: &GaussianRational) -> GaussianRational {
        self.checked_div(o).expect("division by zero Gaussian rational")
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: &GaussianRational) -> GaussianRational {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, o: &GaussianRational) {
        *self = &*self * o;
    }
}

impl Sum for GaussianRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Product for GaussianRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| acc * x)
    }
}

fn fmt_rat_short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat_short(&self.re));
        }
        let im = if self.im.abs().is_one() {
            String::new()
        } else {
            fmt_rat_short(&self.im.abs())
        };
        let sign = if self.im.is_negative() { "-" } else { "+" };
        if self.re.is_zero() {
            let lead = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{lead}{im}i")
        } else {
            write!(f, "{}{sign}{im}i", fmt_rat_short(&self.re))
        }
    }
}

impl GaussianRational {
    /// Interchange text `p/q+r/s i`, both parts always with denominators.
    pub fn to_canonical_string(&self) -> String {
        let sign = if self.im.is_negative() { "-" } else { "+" };
        format!("{}{sign}{} i", format_rational(&self.re), format_rational(&self.im.abs()))
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `3`, `-1/2`, `i`, `-2i`, `1/2+3/4i`, `1/2 - 3/4 i`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self::from_rational(parse_rational(&t)?));
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(k, c)| (c == '+' || c == '-') && !body[..k].ends_with('/'))
            .map(|(k, _)| k)
            .last();
        let (re_txt, im_txt) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_txt.is_empty() { Rational::zero() } else { parse_rational(re_txt)? };
        let im = match im_txt {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(Self::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64, c: i64, d: i64) -> GR {
        GR::from_ratios(a, b, c, d)
    }

    #[test]
    fn sq_modulus_examples() {
        assert_eq!(GR::zero().sq_modulus(), int(0));
        assert_eq!(g(3, 1, 4, 1).sq_modulus(), int(25));
        assert_eq!(g(1, 2, -1, 2).sq_modulus(), rat(1, 2));
    }

    #[test]
    fn conj_examples() {
        assert_eq!(GR::i().conj(), -GR::i());
        assert_eq!(GR::from_int(2).conj(), GR::from_int(2));
        let c = g(3, 7, 5, 1);
        assert_eq!(c.conj().conj(), c);
    }

    #[test]
    fn rationals_are_reduced() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&int(0)), "0/1");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3".parse::<GR>().unwrap(), GR::from_int(3));
        assert_eq!("-i".parse::<GR>().unwrap(), -GR::i());
        assert_eq!("2i".parse::<GR>().unwrap(), GR::from_int(2).mul_i());
        assert_eq!("1/2+3/4i".parse::<GR>().unwrap(), g(1, 2, 3, 4));
        assert_eq!("1/2 - 3/4 i".parse::<GR>().unwrap(), g(1, 2, -3, 4));
        assert_eq!("-1/2-i".parse::<GR>().unwrap(), g(-1, 2, -1, 1));
        assert!("1/0".parse::<GR>().is_err());
        assert!("abc".parse::<GR>().is_err());
        let c = g(-7, 3, 2, 9);
        assert_eq!(c.to_canonical_string().parse::<GR>().unwrap(), c);
        assert_eq!(c.to_string().parse::<GR>().unwrap(), c);
    }

    #[test]
    fn division_and_inverse() {
        let a = g(1, 2, 2, 3);
        let b = g(-3, 1, 1, 5);
        assert_eq!(&(&a / &b) * &b, a);
        assert!(GR::zero().inv().is_none());
    }

    #[test]
    fn sqrt_of_squares() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn small_gr() -> impl Strategy<Value = GR> {
            (-20i64..20, 1i64..9, -20i64..20, 1i64..9)
                .prop_map(|(a, b, c, d)| GR::from_ratios(a, b, c, d))
        }

        proptest! {
            #[test]
            fn field_axioms(a in small_gr(), b in small_gr(), c in small_gr()) {
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                if !a.is_zero() {
                    prop_assert_eq!(&a * &a.inv().unwrap(), GR::one());
                }
            }

            #[test]
            fn modulus_is_multiplicative(a in small_gr(), b in small_gr()) {
                prop_assert_eq!((&a * &b).sq_modulus(), a.sq_modulus() * b.sq_modulus());
                prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            }

            #[test]
            fn construction_normalizes(p in -500i64..500, q in 1i64..500, k in 1i64..20) {
                let r = rat(p * k, q * k);
                prop_assert_eq!(r, rat(p, q));
            }
        }
    }
}
