//! Frescos: one-generator geometric modules presented by factored operators.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::abalg::{
    divide_linear, factored_product, to_left, AbOperator, LinearFactor, RightNormalForm,
};
use crate::abmod::lattice::{Lattice, Smith};
use crate::abmod::{
    apply_a, bernstein_char, BernsteinPolynomial, ModulePresentation, ModuleVector, SeriesMatrix,
};
use crate::error::{Error, Result};
use crate::linalg::QPoly;
use crate::monodromy::semisimple_filtration;
use crate::series::{as_integer, class_of, int, sum_exact, Rational, TruncSeries};

/// `P = (a − λ_1 b)T_1 ⋯ (a − λ_k b)T_k` with generator the class of 1 in `Ã/ÃP`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FactoredFresco {
    b_order: usize,
    factors: Vec<LinearFactor>,
}

impl FactoredFresco {
    pub fn new(factors: Vec<LinearFactor>, b_order: usize) -> Result<Self> {
        let k = factors.len();
        for (j, f) in factors.iter().enumerate() {
            if f.unit.order() != b_order {
                return Err(Error::OrderMismatch(b_order, f.unit.order()));
            }
            if !f.unit.is_unit() {
                return Err(Error::NonUnit);
            }
            if &f.lambda + int(j as i64 + 1) <= int(k as i64) {
                return Err(Error::NotAdmissible(format!(
                    "λ_{} = {} but λ_j + j must exceed {k}",
                    j + 1,
                    f.lambda
                )));
            }
        }
        Ok(FactoredFresco { b_order, factors })
    }

    /// All units equal to 1.
    pub fn from_lambdas(lambdas: &[Rational], b_order: usize) -> Result<Self> {
        let factors = lambdas
            .iter()
            .map(|l| LinearFactor::new(l.clone(), TruncSeries::one(b_order)))
            .collect();
        Self::new(factors, b_order)
    }

    pub fn b_order(&self) -> usize {
        self.b_order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[LinearFactor] {
        &self.factors
    }

    pub fn lambdas(&self) -> Vec<Rational> {
        self.factors.iter().map(|f| f.lambda.clone()).collect()
    }

    /// The full operator `P`.
    pub fn operator(&self) -> AbOperator {
        factored_product(&self.factors, self.b_order)
    }

    /// `(F_r, F/F_r)`: the sub-fresco on the first `r` factors and the quotient on the rest.
    pub fn split_at(&self, r: usize) -> Result<(FactoredFresco, FactoredFresco)> {
        let (left, right) = self.factors.split_at(r);
        Ok((
            Self::new(left.to_vec(), self.b_order)?,
            Self::new(right.to_vec(), self.b_order)?,
        ))
    }

    pub fn truncate(&self, b_order: usize) -> Result<Self> {
        let factors = self
            .factors
            .iter()
            .map(|f| LinearFactor::new(f.lambda.clone(), f.unit.truncate(b_order)))
            .collect();
        Self::new(factors, b_order)
    }
}

impl fmt::Debug for FactoredFresco {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("(a - {}b)[{}]", x.lambda, x.unit))
            .collect();
        write!(f, "{} mod b^{}", parts.join(""), self.b_order)
    }
}

/// A characteristic sequence of a Jordan–Hölder sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharSequence {
    pub values: Vec<Rational>,
    pub principal: bool,
}

/// The module `Ã/ÃP` in the basis `u_1, …, u_k`, where `u_k` is the generator and
/// `u_{j−1} = (a − λ_j b)T_j u_j`.
pub fn fresco_to_module(f: &FactoredFresco) -> (ModulePresentation, ModuleVector) {
    let n = f.b_order;
    let k = f.rank();
    let mut amat = SeriesMatrix::zeros(k, k, n);
    for (i, fac) in f.factors.iter().enumerate() {
        let tinv = fac
            .unit
            .invert()
            .expect("units are checked at construction");
        let log = &fac.unit.b2_derive() * &tinv;
        let diag = &TruncSeries::monomial(fac.lambda.clone(), 1, n) - &log;
        amat.set_entry(i, i, &diag);
        if i > 0 {
            amat.set_entry(i, i - 1, &tinv);
        }
    }
    let e = ModulePresentation::new(amat).expect("square");
    let generator = ModuleVector::basis(k, k.saturating_sub(1), n);
    (e, generator)
}

/// The initial form `(a − λ_1 b)⋯(a − λ_k b)`.
pub fn bernstein_element(f: &FactoredFresco) -> AbOperator {
    f.factors.iter().fold(AbOperator::one(f.b_order), |acc, x| {
        &acc * &AbOperator::a_minus_lambda_b(&x.lambda, f.b_order)
    })
}

/// Roots `−(λ_j + j − k)`.
pub fn bernstein_fresco(f: &FactoredFresco) -> BernsteinPolynomial {
    let k = f.rank() as i64;
    BernsteinPolynomial::from_roots(
        f.factors
            .iter()
            .enumerate()
            .map(|(j, x)| -(&x.lambda + int(j as i64 + 1 - k)))
            .collect(),
    )
}

/// The generator of the annihilator of `x`, factored into linear terms.
///
/// The result is exact modulo a lower order than `E`, reported as its `b_order`.
pub fn annihilator_of(e: &ModulePresentation, x: &ModuleVector) -> Result<FactoredFresco> {
    let n = e.b_order().min(x.order());
    let dim = e.rank();
    let mut powers = vec![x.resize(n)];
    let k = loop {
        let r = powers.len();
        let smith = Smith::compute(
            &powers.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
            dim,
            n,
        );
        if smith.rank() < r {
            break r - 1;
        }
        if r > dim {
            return Err(Error::PrecisionExhausted(
                "powers of a stay independent".into(),
            ));
        }
        powers.push(apply_a(e, powers.last().expect("nonempty")));
    };
    if k == 0 {
        return Err(Error::Invalid("the zero vector has no fresco".into()));
    }
    let rows: Vec<Vec<TruncSeries>> = powers[..k].iter().map(|v| v.0.clone()).collect();
    let smith = Smith::compute(&rows, dim, n);
    let loss = smith.diag.iter().copied().max().unwrap_or(0);
    if loss + k + 1 >= n {
        return Err(Error::PrecisionExhausted(format!(
            "annihilator of a rank-{k} fresco at order {n}"
        )));
    }
    let w = SeriesMatrix::from_rows(&smith.w, dim, n);
    let winv = w.inverse().expect("Smith transform is invertible");
    let y = winv.left_apply(&powers[k].0);
    let prec = n - loss;
    let z: Vec<TruncSeries> = (0..k)
        .map(|i| y[i].shift_down_padded(smith.diag[i]).truncate(prec))
        .collect();
    let mut coeffs = vec![TruncSeries::zero(prec); k];
    for (zi, urow) in z.iter().zip(&smith.u) {
        for (c, u) in coeffs.iter_mut().zip(urow) {
            *c += &(zi * &u.truncate(prec));
        }
    }
    let mut terms = vec![((k, 0), Rational::one())];
    for (p, c) in coeffs.iter().enumerate() {
        for (q, v) in c.coeffs().iter().enumerate() {
            terms.push(((p, q), -v.clone()));
        }
    }
    let op = to_left(&RightNormalForm::from_terms(prec, terms));
    factor_operator(&op, k, |roots| roots[0].clone())
}

/// Minimal `p + q` over the terms and the polynomial `π(z)` with `P(b^m ε) = π(λ+m) b^{m+w} ε + …` in `E_λ`.
fn initial_polynomial(op: &AbOperator) -> (usize, QPoly) {
    let w = op.terms().map(|(&(p, q), _)| p + q).min().unwrap_or(0);
    let mut poly = QPoly::zero();
    for (&(p, q), c) in op.terms() {
        if p + q == w {
            let roots: Vec<Rational> = (0..p).map(|i| -int((q + i) as i64)).collect();
            poly = &poly + &(&QPoly::from_roots(&roots) * &QPoly::new(vec![c.clone()]));
        }
    }
    (w, poly)
}

/// `s` with `s_0 = 1` and `P(sε) = 0` in `E_λ`, determined modulo `b^{len}`.
fn rank_one_solution(
    op: &AbOperator,
    lambda: &Rational,
    w: usize,
    pi: &QPoly,
    len: usize,
) -> Result<TruncSeries> {
    let mut s = vec![Rational::zero(); len];
    if len > 0 {
        s[0] = Rational::one();
    }
    for t in 1..len {
        let mut terms = Vec::new();
        for (&(p, q), c) in op.terms() {
            if p + q > w + t {
                continue;
            }
            let m = w + t - p - q;
            if m >= t || s[m].is_zero() {
                continue;
            }
            let (u, v) = (lambda.numer(), lambda.denom());
            let rising: BigInt = (0..p).map(|i| u + v * BigInt::from(q + m + i)).product();
            terms.push(c * Rational::new(rising, v.pow(p as u32)) * &s[m]);
        }
        let rhs = sum_exact(&terms);
        let lead = pi.eval(&(lambda + int(t as i64)));
        if lead.is_zero() {
            if !rhs.is_zero() {
                return Err(Error::Resonance(t));
            }
        } else {
            s[t] = -rhs / lead;
        }
    }
    Ok(TruncSeries::new(s))
}

/// Factors an operator of `a`-degree `k` whose terms all have weight `p + q ≥ k`.
///
/// `pick` chooses the next rightmost `λ` among the rational roots of the initial
/// polynomial, listed largest first; it must return a root that is largest in its class.
fn factor_operator(
    op: &AbOperator,
    k: usize,
    pick: impl Fn(&[Rational]) -> Rational,
) -> Result<FactoredFresco> {
    let n = op.b_order();
    if n <= k + 1 {
        return Err(Error::PrecisionExhausted(format!(
            "factoring degree {k} at order {n}"
        )));
    }
    let len = n - k;
    let mut cur = op.clone();
    let mut factors = Vec::with_capacity(k);
    for deg in (1..=k).rev() {
        let (w, pi) = initial_polynomial(&cur);
        if w != deg || pi.degree() != Some(deg) {
            return Err(Error::NonGeometric(format!(
                "operator of degree {deg} has initial weight {w}"
            )));
        }
        let (roots, rest) = pi.rational_roots();
        if rest > 0 {
            return Err(Error::NonGeometric(format!(
                "{rest} roots of the initial form are not rational"
            )));
        }
        let listed: Vec<Rational> = roots.into_iter().map(|(r, _)| r).collect();
        let lambda = pick(&listed);
        let s = rank_one_solution(&cur, &lambda, w, &pi, len)?;
        let t = s.invert()?;
        let moved = &cur * &AbOperator::from_series(&s.resize(n));
        let (q, _) = divide_linear(&moved, &lambda);
        factors.push(LinearFactor::new(lambda, t));
        cur = q;
    }
    let lead = cur
        .as_series()
        .ok_or_else(|| Error::Invalid("quotient is not a unit".into()))?;
    if lead.coeff(0).is_zero() {
        return Err(Error::NonGeometric(
            "leading coefficient is not a unit".into(),
        ));
    }
    factors.reverse();
    FactoredFresco::new(factors, len).map_err(|e| match e {
        Error::NotAdmissible(m) => Error::NonGeometric(m),
        other => other,
    })
}

fn largest_in_class(roots: &[Rational], keep: impl Fn(&Rational) -> bool) -> Option<Rational> {
    roots.iter().find(|r| keep(&class_of(r))).cloned()
}

/// Per class `α`: the sub-fresco `F_[α]` and the primitive quotient `F^[α]`.
pub fn primitive_parts(
    f: &FactoredFresco,
) -> Result<BTreeMap<Rational, (FactoredFresco, FactoredFresco)>> {
    let classes: Vec<Rational> = {
        let mut c: Vec<Rational> = f.factors.iter().map(|x| class_of(&x.lambda)).collect();
        c.sort();
        c.dedup();
        c
    };
    let mut out = BTreeMap::new();
    if classes.len() <= 1 {
        for alpha in classes {
            out.insert(alpha, (f.clone(), f.clone()));
        }
        return Ok(out);
    }
    let op = f.operator();
    let k = f.rank();
    let mut memo: BTreeMap<Vec<Rational>, FactoredFresco> = BTreeMap::new();
    let mut preferring = |keep: Vec<Rational>| -> Result<FactoredFresco> {
        if let Some(g) = memo.get(&keep) {
            return Ok(g.clone());
        }
        let g = factor_operator(&op, k, |roots| {
            largest_in_class(roots, |c| keep.contains(c)).unwrap_or_else(|| roots[0].clone())
        })?;
        memo.insert(keep, g.clone());
        Ok(g)
    };
    for alpha in &classes {
        let r = f
            .factors
            .iter()
            .filter(|x| class_of(&x.lambda) == *alpha)
            .count();
        let last = preferring(vec![alpha.clone()])?;
        let first = preferring(classes.iter().filter(|c| *c != alpha).cloned().collect())?;
        let quotient = last.split_at(k - r)?.1;
        let sub = first.split_at(r)?.0;
        if quotient
            .factors
            .iter()
            .chain(&sub.factors)
            .any(|x| class_of(&x.lambda) != *alpha)
        {
            return Err(Error::NonGeometric("primitive parts mix classes".into()));
        }
        out.insert(alpha.clone(), (sub, quotient));
    }
    let product = out
        .values()
        .fold(BernsteinPolynomial::one(), |acc, (_, q)| {
            acc.mul(&bernstein_fresco(q))
        });
    if product != bernstein_fresco(f) {
        return Err(Error::Invalid(
            "Bernstein polynomial does not split over classes".into(),
        ));
    }
    Ok(out)
}

/// Sorts the values `λ_j + j` into the unique principal sequence.
pub fn principal_jh(f: &FactoredFresco) -> CharSequence {
    let mut v: Vec<Rational> = f
        .factors
        .iter()
        .enumerate()
        .map(|(j, x)| &x.lambda + int(j as i64 + 1))
        .collect();
    v.sort();
    CharSequence {
        values: v
            .into_iter()
            .enumerate()
            .map(|(j, x)| x - int(j as i64 + 1))
            .collect(),
        principal: true,
    }
}

/// Whether `d(F) = 1`.
pub fn is_semisimple_fresco(f: &FactoredFresco) -> Result<bool> {
    let mut seen: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
    for (j, x) in f.factors.iter().enumerate() {
        let v = &x.lambda + int(j as i64 + 1);
        let bucket = seen.entry(class_of(&x.lambda)).or_default();
        if bucket.contains(&v) {
            return Ok(false);
        }
        bucket.push(v);
    }
    let (e, _) = fresco_to_module(f);
    Ok(semisimple_filtration(&e)?.nilpotent_order == 1)
}

/// A basis of `E` adapted to a flag of normal lattices, with the size of each layer.
fn adapted_basis(steps: &[Lattice], k: usize) -> Result<(SeriesMatrix, Vec<usize>)> {
    let prec = steps.iter().map(Lattice::prec).min().unwrap_or(1);
    let mut basis = SeriesMatrix::identity(k, prec);
    let mut done = 0;
    let mut sizes = Vec::with_capacity(steps.len());
    for step in steps {
        let inv = basis
            .inverse()
            .ok_or_else(|| Error::PrecisionExhausted("adapted basis".into()))?;
        let rest: Vec<usize> = (done..k).collect();
        let coords: Vec<Vec<TruncSeries>> = step
            .generators()
            .iter()
            .map(|g| {
                let y = inv.left_apply(&g.truncate(prec).0);
                rest.iter().map(|&i| y[i].clone()).collect()
            })
            .collect();
        let smith = Smith::compute(&coords, k - done, prec);
        let grow = smith.rank();
        let w = SeriesMatrix::from_rows(&smith.w, k - done, prec);
        let tail = &w * &basis.submatrix(&rest, &(0..k).collect::<Vec<_>>());
        basis.set_block(done, 0, &tail);
        done += grow;
        sizes.push(grow);
    }
    if done != k {
        return Err(Error::PrecisionExhausted(
            "flag does not exhaust the module".into(),
        ));
    }
    Ok((basis, sizes))
}

/// `B_j(F^[α])` for a single-class fresco.
fn higher_primitive(f: &FactoredFresco) -> Result<Vec<BernsteinPolynomial>> {
    let (e, _) = fresco_to_module(f);
    let filt = semisimple_filtration(&e)?;
    let k = e.rank();
    let (g, sizes) = adapted_basis(&filt.steps, k)?;
    let m = e.truncate(g.order()).change_basis(&g)?;
    let mut out = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &size in &sizes {
        let idx: Vec<usize> = (start..start + size).collect();
        start += size;
        let delta = k - start;
        let layer = bernstein_char(&m.restrict(&idx))?;
        out.push(layer.substitute_shift(&-int(delta as i64)));
    }
    Ok(out)
}

/// `B_j(F)` per class, in class order.
pub fn higher_bernstein_by_class(
    f: &FactoredFresco,
) -> Result<BTreeMap<Rational, Vec<BernsteinPolynomial>>> {
    primitive_parts(f)?
        .into_iter()
        .map(|(alpha, (_, q))| Ok((alpha, higher_primitive(&q)?)))
        .collect()
}

/// `B_1(F), …, B_d(F)`; their product is checked against `B_F`.
pub fn higher_bernstein(f: &FactoredFresco) -> Result<Vec<BernsteinPolynomial>> {
    let by_class = higher_bernstein_by_class(f)?;
    let d = by_class.values().map(Vec::len).max().unwrap_or(0);
    let out: Vec<BernsteinPolynomial> = (0..d)
        .map(|j| {
            by_class
                .values()
                .filter_map(|v| v.get(j))
                .fold(BernsteinPolynomial::one(), |acc, b| acc.mul(b))
        })
        .collect();
    let product = out
        .iter()
        .fold(BernsteinPolynomial::one(), |acc, b| acc.mul(b));
    if product != bernstein_fresco(f) {
        return Err(Error::Invalid(format!(
            "product of higher Bernstein polynomials {product} differs from {}",
            bernstein_fresco(f)
        )));
    }
    Ok(out)
}

/// Pole predictions for one class, valid under the isolated-singularity hypothesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub alpha: Rational,
    pub nilpotent_order: usize,
    pub higher: Vec<BernsteinPolynomial>,
    /// Biggest root of `B_d`: predicted pole of exact order `d`.
    pub top_pole: Rational,
    /// Biggest root of `B_{F^[α]}`: predicted first pole.
    pub first_pole: Rational,
    /// For each `j`, points where a pole of order at least `j` is predicted.
    pub predicted: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleReport {
    pub classes: Vec<ClassReport>,
}

pub fn pole_report(f: &FactoredFresco) -> Result<PoleReport> {
    let mut classes = Vec::new();
    for (alpha, higher) in higher_bernstein_by_class(f)? {
        let d = higher.len();
        let top_pole = higher[d - 1]
            .max_root()
            .cloned()
            .ok_or_else(|| Error::Invalid("empty layer".into()))?;
        let first_pole = higher
            .iter()
            .filter_map(|b| b.max_root())
            .max()
            .cloned()
            .expect("nonempty");
        let predicted = higher
            .iter()
            .map(|b| b.multiplicities().into_iter().map(|(r, _)| r).collect())
            .collect();
        classes.push(ClassReport {
            alpha,
            nilpotent_order: d,
            higher,
            top_pole,
            first_pole,
            predicted,
        });
    }
    Ok(PoleReport { classes })
}

/// Whether `−α − m` with `m ∈ ℕ`.
pub fn is_pole_point(alpha: &Rational, x: &Rational) -> bool {
    as_integer(&(-x - alpha)).is_some_and(|m| !m.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abmod::{apply_op, bernstein_min};
    use crate::series::rat;

    fn theme(alpha: &Rational, n: usize) -> FactoredFresco {
        FactoredFresco::from_lambdas(&[alpha + int(1), alpha.clone()], n).unwrap()
    }

    #[test]
    fn module_of_theme() {
        let n = 8;
        let alpha = rat(1, 2);
        let f = theme(&alpha, n);
        let (e, g) = fresco_to_module(&f);
        assert!(apply_op(&e, &f.operator(), &g).is_zero());
        assert_eq!(e.entry(0, 0), TruncSeries::monomial(&alpha + int(1), 1, n));
        assert_eq!(e.entry(1, 0), TruncSeries::one(n));
        assert_eq!(bernstein_fresco(&f).to_string(), "(x + 1/2)^2");
        assert_eq!(bernstein_char(&e).unwrap(), bernstein_fresco(&f));
    }

    #[test]
    fn admissibility() {
        assert!(matches!(
            FactoredFresco::from_lambdas(&[rat(1, 2), rat(1, 2)], 6),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn annihilator_in_xi() {
        let n = 12;
        let alpha = rat(1, 3);
        let xi = ModulePresentation::xi(&alpha, 1, n);
        let f = annihilator_of(&xi, &ModuleVector::basis(2, 1, n)).unwrap();
        assert_eq!(f.lambdas(), vec![&alpha + int(1), alpha.clone()]);
        let g = annihilator_of(
            &ModulePresentation::e_lambda(&alpha, n),
            &ModuleVector::basis(1, 0, n),
        )
        .unwrap();
        assert_eq!(g.lambdas(), vec![alpha]);
    }

    #[test]
    fn mixed_classes() {
        let n = 12;
        let (a, b) = (rat(1, 2), rat(1, 3));
        let e =
            ModulePresentation::e_lambda(&a, n).direct_sum(&ModulePresentation::e_lambda(&b, n));
        let x = ModuleVector(vec![TruncSeries::one(n), TruncSeries::one(n)]);
        let f = annihilator_of(&e, &x).unwrap();
        assert_eq!(f.rank(), 2);
        let (closure, _) = fresco_to_module(&f);
        assert_eq!(bernstein_fresco(&f), bernstein_min(&closure).unwrap());
        let parts = primitive_parts(&f).unwrap();
        assert_eq!(parts.len(), 2);
        for (alpha, (sub, quo)) in &parts {
            assert_eq!(sub.rank(), 1);
            assert_eq!(class_of(&quo.lambdas()[0]), *alpha);
        }
    }

    #[test]
    fn theme_higher_bernstein() {
        let f = theme(&rat(1, 2), 12);
        let h = higher_bernstein(&f).unwrap();
        let lin = crate::abmod::bernstein::linear(&rat(1, 2));
        assert_eq!(h, vec![lin.clone(), lin]);
        assert!(!is_semisimple_fresco(&f).unwrap());
        let report = pole_report(&f).unwrap();
        assert_eq!(report.classes[0].top_pole, rat(-1, 2));
        assert_eq!(report.classes[0].nilpotent_order, 2);
    }

    #[test]
    fn principal_sequences() {
        let f = theme(&rat(1, 2), 6);
        assert_eq!(principal_jh(&f).values, f.lambdas());
        let g = FactoredFresco::from_lambdas(&[rat(5, 2), rat(5, 2)], 6).unwrap();
        assert_eq!(principal_jh(&g).values, g.lambdas());
        assert!(is_semisimple_fresco(
            &FactoredFresco::from_lambdas(&[rat(7, 2), rat(1, 2)], 8).unwrap()
        )
        .unwrap());
    }
}
