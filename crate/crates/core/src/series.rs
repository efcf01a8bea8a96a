//! Exact rationals and power series in `b` truncated modulo `b^N`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Integer numerators over a common denominator.
fn integer_parts(c: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let nums = c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (nums, den)
}

/// Sum over a common denominator with a single reduction.
pub(crate) fn sum_exact(c: &[Rational]) -> Rational {
    let (nums, den) = integer_parts(c);
    Rational::new(nums.into_iter().sum(), den)
}

/// Default truncation order used when none is given.
pub const DEFAULT_ORDER: usize = 16;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Invalid(format!("not a rational number: {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(t)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Floor of a rational as an `i64`.
pub fn floor_i64(x: &Rational) -> i64 {
    x.floor()
        .to_integer()
        .to_i64()
        .expect("integer part out of range")
}

/// Representative of `x` modulo the integers in `(0, 1]`.
pub fn class_of(x: &Rational) -> Rational {
    let f = x - x.floor();
    if f.is_zero() {
        Rational::one()
    } else {
        f
    }
}

/// `Some(n)` when `x` is an integer fitting in `i64`.
pub fn as_integer(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// A power series `Σ c_j b^j` known modulo `b^order`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "series order must be positive");
        TruncSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![Rational::zero(); order])
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        Self::monomial(c, 0, order)
    }

    /// `c·b^k`, which is zero when `k ≥ order`.
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k < order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from a prefix, zero-padding or truncating to `order`.
    pub fn from_prefix(prefix: &[Rational], order: usize) -> Self {
        let mut coeffs: Vec<Rational> = prefix.iter().take(order).cloned().collect();
        coeffs.resize(order, Rational::zero());
        Self::new(coeffs)
    }

    pub fn from_ints(prefix: &[i64], order: usize) -> Self {
        let v: Vec<Rational> = prefix.iter().map(|&c| int(c)).collect();
        Self::from_prefix(&v, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff_ref(&self, j: usize) -> &Rational {
        &self.coeffs[j]
    }

    pub fn set_coeff(&mut self, j: usize, c: Rational) {
        self.coeffs[j] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// Least `j` with a nonzero coefficient, or `order` for zero.
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.order())
    }

    /// Reduces to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order() && order > 0);
        Self::new(self.coeffs[..order].to_vec())
    }

    /// Pads with zeros up to `order`, or truncates when shorter.
    pub fn resize(&self, order: usize) -> Self {
        Self::from_prefix(&self.coeffs, order)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplication by `b^k` at the same order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for j in k..n {
            out.coeffs[j] = self.coeffs[j - k].clone();
        }
        out
    }

    /// Division by `b^k`; requires valuation ≥ k and lowers the order by `k`.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k >= self.order() {
            return Err(Error::PrecisionExhausted(format!(
                "cannot divide a series of order {} by b^{k}",
                self.order()
            )));
        }
        if self.valuation() < k {
            return Err(Error::Invalid(format!("series is not divisible by b^{k}")));
        }
        Ok(Self::new(self.coeffs[k..].to_vec()))
    }

    /// Division by `b^k` keeping the order: the top `k` coefficients become zero.
    pub fn shift_down_padded(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for j in k..n {
            out.coeffs[j - k] = self.coeffs[j].clone();
        }
        out
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(self.mul_trunc(other))
    }

    fn mul_trunc(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let (xs, dx) = integer_parts(&self.coeffs[..n]);
        let (ys, dy) = integer_parts(&other.coeffs[..n]);
        let mut acc = vec![BigInt::zero(); n];
        for (i, x) in xs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in ys.iter().take(n - i).enumerate() {
                if !y.is_zero() {
                    acc[i + j] += x * y;
                }
            }
        }
        let den = dx * dy;
        Self::new(
            acc.into_iter()
                .map(|c| Rational::new(c, den.clone()))
                .collect(),
        )
    }

    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let n = self.order();
        // Scaled coefficients C_q = t_q · a_0^(q+1) / d stay integral.
        let (a, d) = integer_parts(&self.coeffs);
        let pows: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |p| Some(p * &a[0]))
            .take(n + 1)
            .collect();
        let mut c: Vec<BigInt> = Vec::with_capacity(n);
        c.push(BigInt::one());
        for q in 1..n {
            let mut acc = BigInt::zero();
            for j in 1..=q {
                if !a[j].is_zero() {
                    acc += &a[j] * &c[q - j] * &pows[j - 1];
                }
            }
            c.push(-acc);
        }
        Ok(Self::new(
            c.into_iter()
                .enumerate()
                .map(|(q, x)| Rational::new(x * &d, pows[q + 1].clone()))
                .collect(),
        ))
    }

    /// `S'`, one order shorter.
    pub fn derive(&self) -> Result<Self> {
        if self.order() < 2 {
            return Err(Error::PrecisionExhausted(
                "derivative of an order-1 series".into(),
            ));
        }
        Ok(Self::new(
            (1..self.order())
                .map(|j| &self.coeffs[j] * int(j as i64))
                .collect(),
        ))
    }

    /// `b²S'` at the same order, exact modulo `b^order`.
    pub fn b2_derive(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for j in 1..n {
            out.coeffs[j] = &self.coeffs[j - 1] * int(j as i64 - 1);
        }
        out
    }

    /// `bS'` at the same order.
    pub fn b_derive(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * int(j as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(self.order()), |acc, _| acc.mul_trunc(self))
    }
}

pub fn series_mul(s: &TruncSeries, t: &TruncSeries) -> Result<TruncSeries> {
    s.try_mul(t)
}

pub fn series_invert(s: &TruncSeries) -> Result<TruncSeries> {
    s.invert()
}

pub fn series_derive(s: &TruncSeries) -> Result<TruncSeries> {
    s.derive()
}

fn check_orders(a: &TruncSeries, b: &TruncSeries) {
    assert_eq!(a.order(), b.order(), "series orders differ");
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        check_orders(self, rhs);
        TruncSeries::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        )
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        check_orders(self, rhs);
        TruncSeries::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(x, y)| x - y)
                .collect(),
        )
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        check_orders(self, rhs);
        self.mul_trunc(rhs)
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries::new(self.coeffs.iter().map(|x| -x).collect())
    }
}

impl Add for TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: TruncSeries) -> TruncSeries {
        &self + &rhs
    }
}

impl Sub for TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: TruncSeries) -> TruncSeries {
        &self - &rhs
    }
}

impl Mul for TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: TruncSeries) -> TruncSeries {
        &self * &rhs
    }
}

impl Neg for TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        -&self
    }
}

impl AddAssign<&TruncSeries> for TruncSeries {
    fn add_assign(&mut self, rhs: &TruncSeries) {
        check_orders(self, rhs);
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x += y;
        }
    }
}

impl SubAssign<&TruncSeries> for TruncSeries {
    fn sub_assign(&mut self, rhs: &TruncSeries) {
        check_orders(self, rhs);
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x -= y;
        }
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(b^{})", self.order())
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, abs) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}")?;
                    }
                    if j == 1 {
                        write!(f, "b")?;
                    } else {
                        write!(f, "b^{j}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_ints(c, n)
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(
            series_mul(&s(&[1, 1], 4), &s(&[1, -1], 4)).unwrap(),
            s(&[1, 0, -1], 4)
        );
        assert_eq!(&s(&[0, 1], 5) * &s(&[0, 1], 5), s(&[0, 0, 1], 5));
    }

    #[test]
    fn factorial_series_times_one() {
        let f: Vec<Rational> = (0..8)
            .map(|j| Rational::from_integer(factorial(j)))
            .collect();
        let f = TruncSeries::new(f);
        assert_eq!(series_mul(&f, &TruncSeries::one(8)).unwrap(), f);
    }

    #[test]
    fn mismatched_orders() {
        assert_eq!(
            series_mul(&s(&[1], 3), &s(&[1], 4)),
            Err(Error::OrderMismatch(3, 4))
        );
    }

    #[test]
    fn geometric_inverses() {
        assert_eq!(series_invert(&s(&[1, -1], 4)).unwrap(), s(&[1, 1, 1, 1], 4));
        assert_eq!(
            series_invert(&s(&[1, 1], 4)).unwrap(),
            s(&[1, -1, 1, -1], 4)
        );
        assert_eq!(
            series_invert(&s(&[2], 3)).unwrap(),
            TruncSeries::constant(rat(1, 2), 3)
        );
        assert_eq!(series_invert(&s(&[0, 1], 3)), Err(Error::NonUnit));
    }

    #[test]
    fn derivatives() {
        assert_eq!(series_derive(&s(&[0, 0, 1], 4)).unwrap(), s(&[0, 2], 3));
        assert_eq!(series_derive(&s(&[5], 4)).unwrap(), s(&[], 3));
        assert_eq!(
            series_derive(&s(&[1, 1, 1, 1], 4)).unwrap(),
            s(&[1, 2, 3], 3)
        );
        assert!(matches!(
            series_derive(&s(&[1], 1)),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn valuation_and_shifts() {
        let x = s(&[0, 0, 3, 1], 5);
        assert_eq!(x.valuation(), 2);
        assert_eq!(TruncSeries::zero(5).valuation(), 5);
        assert_eq!(x.shift_down(2).unwrap(), s(&[3, 1], 3));
        assert_eq!(x.shift_up(1), s(&[0, 0, 0, 3, 1], 5));
        assert_eq!(s(&[1, 2, 3], 4).b2_derive(), s(&[0, 0, 2, 6], 4));
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(rat(-1, 2).to_string(), "-1/2");
        assert_eq!(class_of(&rat(-1, 3)), rat(2, 3));
        assert_eq!(class_of(&int(2)), int(1));
    }

    #[test]
    fn display() {
        assert_eq!(s(&[1, 0, -2, 1], 4).to_string(), "1 - 2b^2 + b^3");
        assert_eq!(TruncSeries::zero(2).to_string(), "0");
    }
}
