//! The algebra of operators in `a` and `b` subject to `ab − ba = b²`.
//!
//! Elements are kept in left normal form `Σ x_{p,q} a^p b^q` with `q` below the
//! truncation order `N`; the `a`-degree is exact and unbounded.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{factorial, int, Rational, TruncSeries};

type Terms = BTreeMap<(usize, usize), Rational>;

fn insert(terms: &mut Terms, key: (usize, usize), c: Rational) {
    if c.is_zero() {
        return;
    }
    let entry = terms.entry(key).or_insert_with(Rational::zero);
    *entry += c;
    if entry.is_zero() {
        terms.remove(&key);
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// The reordering coefficient `Γ_{p,q}^j = C(q+j−1, j)·p!/(p−j)!`.
pub fn gamma_coeff(p: usize, q: usize, j: usize) -> Rational {
    if j > p {
        return Rational::zero();
    }
    if q == 0 {
        return if j == 0 {
            Rational::one()
        } else {
            Rational::zero()
        };
    }
    let falling = factorial(p) / factorial(p - j);
    Rational::from_integer(binomial(q + j - 1, j) * falling)
}

/// Operator in left normal form `Σ x_{p,q} a^p b^q` modulo `b^N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AbOperator {
    b_order: usize,
    terms: Terms,
}

type IntegerTerms = Vec<((usize, usize), BigInt)>;

fn integer_terms(t: &Terms) -> (IntegerTerms, BigInt) {
    let den = t.values().fold(BigInt::one(), |d, x| d.lcm(x.denom()));
    (
        t.iter()
            .map(|(&k, x)| (k, x.numer() * (&den / x.denom())))
            .collect(),
        den,
    )
}

/// Operator in right normal form `Σ δ_{p,q} b^q a^p` modulo `b^N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RightNormalForm {
    b_order: usize,
    terms: Terms,
}

/// Operator truncated by total degree: terms `a^p b^q` with `p + q < M`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedOperator {
    total_order: usize,
    terms: Terms,
}

/// A factor `(a − λb)·T` of a factored fresco presentation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearFactor {
    pub lambda: Rational,
    pub unit: TruncSeries,
}

impl LinearFactor {
    pub fn new(lambda: Rational, unit: TruncSeries) -> Self {
        LinearFactor { lambda, unit }
    }

    /// `(a − λb)·T` as an operator.
    pub fn operator(&self) -> AbOperator {
        let n = self.unit.order();
        &AbOperator::a_minus_lambda_b(&self.lambda, n) * &AbOperator::from_series(&self.unit)
    }
}

impl AbOperator {
    pub fn zero(b_order: usize) -> Self {
        assert!(b_order > 0, "b_order must be positive");
        AbOperator {
            b_order,
            terms: Terms::new(),
        }
    }

    pub fn from_terms(
        b_order: usize,
        terms: impl IntoIterator<Item = ((usize, usize), Rational)>,
    ) -> Self {
        let mut op = Self::zero(b_order);
        for ((p, q), c) in terms {
            if q < b_order {
                insert(&mut op.terms, (p, q), c);
            }
        }
        op
    }

    pub fn monomial(c: Rational, p: usize, q: usize, b_order: usize) -> Self {
        Self::from_terms(b_order, [((p, q), c)])
    }

    pub fn scalar(c: Rational, b_order: usize) -> Self {
        Self::monomial(c, 0, 0, b_order)
    }

    pub fn one(b_order: usize) -> Self {
        Self::scalar(Rational::one(), b_order)
    }

    pub fn a(b_order: usize) -> Self {
        Self::monomial(Rational::one(), 1, 0, b_order)
    }

    pub fn b(b_order: usize) -> Self {
        Self::monomial(Rational::one(), 0, 1, b_order)
    }

    /// `a − λb`.
    pub fn a_minus_lambda_b(lambda: &Rational, b_order: usize) -> Self {
        Self::from_terms(
            b_order,
            [((1, 0), Rational::one()), ((0, 1), -lambda.clone())],
        )
    }

    /// The `a`-free operator `S(b)`.
    pub fn from_series(s: &TruncSeries) -> Self {
        Self::from_terms(
            s.order(),
            s.coeffs()
                .iter()
                .enumerate()
                .map(|(q, c)| ((0, q), c.clone())),
        )
    }

    pub fn b_order(&self) -> usize {
        self.b_order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: usize, q: usize) -> Rational {
        self.terms
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest power of `a`, `None` for zero.
    pub fn a_degree(&self) -> Option<usize> {
        self.terms.keys().map(|&(p, _)| p).max()
    }

    /// The `a`-free part as a series, when the operator has no `a`.
    pub fn as_series(&self) -> Option<TruncSeries> {
        if self.terms.keys().any(|&(p, _)| p > 0) {
            return None;
        }
        let mut s = TruncSeries::zero(self.b_order);
        for (&(_, q), c) in &self.terms {
            s.set_coeff(q, c.clone());
        }
        Some(s)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.b_order, self.terms.iter().map(|(&k, v)| (k, v * c)))
    }

    pub fn truncate(&self, b_order: usize) -> Self {
        Self::from_terms(b_order, self.terms.iter().map(|(&k, v)| (k, v.clone())))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.b_order != other.b_order {
            return Err(Error::OrderMismatch(self.b_order, other.b_order));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.b_order.min(other.b_order);
        let (lx, dx) = integer_terms(&self.terms);
        let (ly, dy) = integer_terms(&other.terms);
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        let mut add = |key: (usize, usize), v: BigInt| *acc.entry(key).or_default() += v;
        for &((p, q), ref x) in &lx {
            if q >= n {
                continue;
            }
            for &((p2, q2), ref y) in &ly {
                if q + q2 >= n {
                    continue;
                }
                let xy = x * y;
                if q != 0 {
                    let mut g = BigInt::one();
                    for j in 1..=p2.min(n - 1 - q - q2) {
                        g = g * BigInt::from((q + j - 1) * (p2 - j + 1)) / BigInt::from(j);
                        let c = &xy * &g;
                        add((p + p2 - j, q + q2 + j), if j % 2 == 0 { c } else { -c });
                    }
                }
                add((p + p2, q + q2), xy);
            }
        }
        let den = dx * dy;
        let terms = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| (k, Rational::new(v, den.clone())))
            .collect();
        AbOperator { b_order: n, terms }
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(self.b_order), |acc, _| &acc * self)
    }

    /// The coefficients `X_p(b)` of the right normal form `Σ X_p(b) a^p`.
    pub fn right_coefficients(&self) -> Vec<TruncSeries> {
        let r = to_right(self);
        let deg = r.terms.keys().map(|&(p, _)| p).max().map_or(0, |d| d + 1);
        let mut out = vec![TruncSeries::zero(self.b_order); deg];
        for (&(p, q), c) in &r.terms {
            out[p].set_coeff(q, c.clone());
        }
        out
    }
}

impl RightNormalForm {
    pub fn from_terms(
        b_order: usize,
        terms: impl IntoIterator<Item = ((usize, usize), Rational)>,
    ) -> Self {
        let mut t = Terms::new();
        for ((p, q), c) in terms {
            if q < b_order {
                insert(&mut t, (p, q), c);
            }
        }
        RightNormalForm { b_order, terms: t }
    }

    pub fn b_order(&self) -> usize {
        self.b_order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: usize, q: usize) -> Rational {
        self.terms
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// Rewrites `Σ x_{p,q} a^p b^q` as `Σ δ_{p,q} b^q a^p`.
pub fn to_right(x: &AbOperator) -> RightNormalForm {
    let n = x.b_order;
    let mut out = Terms::new();
    for (&(p, q), c) in &x.terms {
        for j in 0..=p {
            if q + j >= n {
                break;
            }
            insert(&mut out, (p - j, q + j), c * gamma_coeff(p, q, j));
        }
    }
    RightNormalForm {
        b_order: n,
        terms: out,
    }
}

/// Rewrites `Σ δ_{p,q} b^q a^p` as `Σ x_{p,q} a^p b^q`.
pub fn to_left(x: &RightNormalForm) -> AbOperator {
    let n = x.b_order;
    let mut out = Terms::new();
    for (&(p, q), c) in &x.terms {
        for j in 0..=p {
            if q + j >= n {
                break;
            }
            let g = c * gamma_coeff(p, q, j);
            insert(&mut out, (p - j, q + j), if j % 2 == 0 { g } else { -g });
        }
    }
    AbOperator {
        b_order: n,
        terms: out,
    }
}

pub fn ab_mul(x: &AbOperator, y: &AbOperator) -> Result<AbOperator> {
    x.try_mul(y)
}

/// `(a + xb)^p` in left normal form.
pub fn binomial_shift(x: &Rational, p: usize, b_order: usize) -> AbOperator {
    let mut gamma = Rational::one();
    let mut terms = vec![((p, 0), Rational::one())];
    for j in 1..=p {
        gamma *= x + int(j as i64 - 1);
        terms.push(((p - j, j), &gamma * Rational::from_integer(binomial(p, j))));
    }
    to_left(&RightNormalForm::from_terms(b_order, terms))
}

/// Action on power series in `z`: `a` multiplies by `z`, `b` integrates from 0.
pub fn act_on_disc(x: &AbOperator, f: &TruncSeries) -> TruncSeries {
    let m = f.order();
    let mut out = TruncSeries::zero(m);
    for (&(p, q), c) in &x.terms {
        for (r, t) in f.coeffs().iter().enumerate() {
            let deg = p + q + r;
            if deg >= m {
                break;
            }
            if t.is_zero() {
                continue;
            }
            let w = Rational::new(factorial(r), factorial(q + r));
            let v = out.coeff(deg) + c * t * w;
            out.set_coeff(deg, v);
        }
    }
    out
}

/// Division `X = Q(a − λb) + R` with `R` a series.
pub fn divide_linear(x: &AbOperator, lambda: &Rational) -> (AbOperator, TruncSeries) {
    let n = x.b_order;
    let xs = x.right_coefficients();
    let mut q_acc = AbOperator::zero(n);
    let mut r_acc = TruncSeries::zero(n);
    let mut q_prev = AbOperator::zero(n);
    let mut r_cur = TruncSeries::one(n);
    let a = AbOperator::a(n);
    for (p, xp) in xs.iter().enumerate() {
        if p > 0 {
            let next_r = r_cur.shift_up(1).scale(&(lambda + int(p as i64 - 1)));
            if p == 1 {
                q_prev = AbOperator::one(n);
                r_cur = next_r;
            } else {
                q_prev = &(&a * &q_prev) + &AbOperator::from_series(&r_cur);
                r_cur = next_r;
            }
            q_acc = &q_acc + &(&AbOperator::from_series(xp) * &q_prev);
        }
        r_acc += &(xp * &r_cur);
    }
    (q_acc, r_acc)
}

/// Division `X = Q·P + R` with `deg_a R < k` for `P = Π (a − λ_j b)T_j`.
pub fn divide_factored(
    x: &AbOperator,
    factors: &[LinearFactor],
) -> Result<(AbOperator, AbOperator)> {
    let Some((last, init)) = factors.split_last() else {
        return Ok((x.clone(), AbOperator::zero(x.b_order)));
    };
    let n = x.b_order;
    if last.unit.order() != n {
        return Err(Error::OrderMismatch(n, last.unit.order()));
    }
    let t = AbOperator::from_series(&last.unit);
    let tinv = AbOperator::from_series(&last.unit.invert()?);
    let (q1, r1) = divide_linear(&(x * &tinv), &last.lambda);
    let (q2, r2) = divide_factored(&q1, init)?;
    let lin = AbOperator::a_minus_lambda_b(&last.lambda, n);
    let r = &(&(&r2 * &lin) * &t) + &(&AbOperator::from_series(&r1) * &t);
    Ok((q2, r))
}

/// The product `(a − λ_1 b)T_1 ⋯ (a − λ_k b)T_k`.
pub fn factored_product(factors: &[LinearFactor], b_order: usize) -> AbOperator {
    factors
        .iter()
        .fold(AbOperator::one(b_order), |acc, f| &acc * &f.operator())
}

impl GradedOperator {
    pub fn zero(total_order: usize) -> Self {
        GradedOperator {
            total_order,
            terms: Terms::new(),
        }
    }

    pub fn from_terms(
        total_order: usize,
        terms: impl IntoIterator<Item = ((usize, usize), Rational)>,
    ) -> Self {
        let mut t = Terms::new();
        for ((p, q), c) in terms {
            if p + q < total_order {
                insert(&mut t, (p, q), c);
            }
        }
        GradedOperator {
            total_order,
            terms: t,
        }
    }

    pub fn one(total_order: usize) -> Self {
        Self::from_terms(total_order, [((0, 0), Rational::one())])
    }

    pub fn total_order(&self) -> usize {
        self.total_order
    }

    pub fn coeff(&self, p: usize, q: usize) -> Rational {
        self.terms
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.terms.iter()
    }

    pub fn from_operator(x: &AbOperator, total_order: usize) -> Self {
        Self::from_terms(total_order, x.terms.iter().map(|(&k, v)| (k, v.clone())))
    }

    /// Product truncated at the smaller total order.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.total_order.min(other.total_order);
        let mut out = Terms::new();
        for (&(p, q), x) in &self.terms {
            for (&(p2, q2), y) in &other.terms {
                if p + q + p2 + q2 >= m {
                    continue;
                }
                for j in 0..=p2 {
                    let g = gamma_coeff(p2, q, j);
                    let c = x * y * g;
                    insert(
                        &mut out,
                        (p + p2 - j, q + q2 + j),
                        if j % 2 == 0 { c } else { -c },
                    );
                }
            }
        }
        GradedOperator {
            total_order: m,
            terms: out,
        }
    }

    fn degree_part(&self, d: usize) -> Terms {
        self.terms
            .iter()
            .filter(|(&(p, q), _)| p + q == d)
            .map(|(&k, v)| (k, v.clone()))
            .collect()
    }
}

/// Inverse of a graded operator with nonzero constant term, degree by degree.
pub fn invert_graded(x: &GradedOperator) -> Result<GradedOperator> {
    let x00 = x.coeff(0, 0);
    if x00.is_zero() {
        return Err(Error::NonUnit);
    }
    let m = x.total_order;
    let inv00 = x00.recip();
    let higher = GradedOperator {
        total_order: m,
        terms: x
            .terms
            .iter()
            .filter(|(&k, _)| k != (0, 0))
            .map(|(&k, v)| (k, v.clone()))
            .collect(),
    };
    let mut y = GradedOperator::from_terms(m, [((0, 0), inv00.clone())]);
    for d in 1..m {
        let part = higher.mul(&y).degree_part(d);
        for (k, v) in part {
            insert(&mut y.terms, k, -(&inv00 * v));
        }
    }
    Ok(y)
}

impl Add for &AbOperator {
    type Output = AbOperator;
    fn add(self, rhs: &AbOperator) -> AbOperator {
        let n = self.b_order.min(rhs.b_order);
        let mut out = self.truncate(n);
        for (&k, v) in &rhs.terms {
            if k.1 < n {
                insert(&mut out.terms, k, v.clone());
            }
        }
        out
    }
}

impl Sub for &AbOperator {
    type Output = AbOperator;
    fn sub(self, rhs: &AbOperator) -> AbOperator {
        self + &(-rhs)
    }
}

impl Neg for &AbOperator {
    type Output = AbOperator;
    fn neg(self) -> AbOperator {
        AbOperator {
            b_order: self.b_order,
            terms: self.terms.iter().map(|(&k, v)| (k, -v)).collect(),
        }
    }
}

impl Mul for &AbOperator {
    type Output = AbOperator;
    fn mul(self, rhs: &AbOperator) -> AbOperator {
        self.mul_unchecked(rhs)
    }
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    terms: &Terms,
    mut body: impl FnMut(usize, usize) -> String,
) -> fmt::Result {
    let mut keys: Vec<&(usize, usize)> = terms.keys().collect();
    keys.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    if keys.is_empty() {
        return write!(f, "0");
    }
    for (i, &&(p, q)) in keys.iter().enumerate() {
        let c = &terms[&(p, q)];
        let abs = c.abs();
        match (i, c.is_negative()) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        let monomial = body(p, q);
        if monomial.is_empty() {
            write!(f, "{abs}")?;
        } else if abs.is_one() {
            write!(f, "{monomial}")?;
        } else {
            write!(f, "{abs}{monomial}")?;
        }
    }
    Ok(())
}

fn power(sym: &str, e: usize) -> String {
    match e {
        0 => String::new(),
        1 => sym.to_string(),
        _ => format!("{sym}^{e}"),
    }
}

impl fmt::Display for AbOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |p, q| power("a", p) + &power("b", q))
    }
}

impl fmt::Debug for AbOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(b^{})", self.b_order)
    }
}

impl fmt::Display for RightNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |p, q| power("b", q) + &power("a", p))
    }
}

impl fmt::Debug for RightNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(b^{})", self.b_order)
    }
}

impl fmt::Display for GradedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |p, q| power("a", p) + &power("b", q))
    }
}

impl fmt::Debug for GradedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(deg {})", self.total_order)
    }
}
