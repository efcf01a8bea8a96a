//! Twisted equations, splittings, primitive decomposition, Jordan chains and submodules.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::abmod::lattice::Lattice;
use crate::abmod::matrix::{ModuleVector, SeriesMatrix};
use crate::abmod::normal_form::{class_form, sorted_spectrum};
use crate::abmod::{apply_a, ModulePresentation};
use crate::error::{Error, Result};
use crate::linalg::{span_rank, QMatrix};
use crate::series::{as_integer, class_of, int, Rational, TruncSeries};

/// Coefficient rows `Y_j` of a vector, one per power of `b`.
fn coefficient_rows(y: &ModuleVector, count: usize) -> Vec<Vec<Rational>> {
    (0..count)
        .map(|j| y.0.iter().map(|s| s.coeff(j)).collect())
        .collect()
}

fn from_coefficient_rows(rows: &[Vec<Rational>], rank: usize, order: usize) -> ModuleVector {
    ModuleVector(
        (0..rank)
            .map(|i| {
                TruncSeries::from_prefix(
                    &rows.iter().map(|r| r[i].clone()).collect::<Vec<_>>(),
                    order,
                )
            })
            .collect(),
    )
}

/// The unique `x` (modulo `b^{N−1}`) with `(a − λb)x = by` in a simple-pole module.
pub fn solve_shifted(
    e: &ModulePresentation,
    lambda: &Rational,
    y: &ModuleVector,
) -> Result<ModuleVector> {
    let f = e.pole_matrix()?;
    let k = e.rank();
    let n = e.b_order();
    let m = f.order();
    let ys = coefficient_rows(&y.resize(n), m);
    let mut zs: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for j in 0..m {
        let mut rhs = ys[j].clone();
        for p in 1..=j {
            let t = f.coeff(p).left_apply(&zs[j - p]);
            for (r, v) in rhs.iter_mut().zip(t) {
                *r -= v;
            }
        }
        let mat = f.coeff(0) + &QMatrix::scalar(k, int(j as i64) - lambda);
        if mat.det().is_zero() {
            return Err(Error::Resonance(j));
        }
        zs.push(mat.solve_left(&rhs).expect("nonsingular system"));
    }
    Ok(from_coefficient_rows(&zs, k, n))
}

/// Result of splitting `0 → ⟨e⟩ → E → ⟨ε⟩ → 0`.
#[derive(Clone, Debug)]
pub struct Split {
    /// `ε' = ε + Z e`.
    pub z: SeriesMatrix,
    /// The presentation in the basis `(e, ε')`, block diagonal.
    pub module: ModulePresentation,
}

/// Splits a simple-pole presentation whose first `r` basis vectors span a submodule.
pub fn split_extension(e: &ModulePresentation, r: usize) -> Result<Split> {
    let f = e.pole_matrix()?;
    let k = e.rank();
    let n = e.b_order();
    let m = f.order();
    let sub: Vec<usize> = (0..r).collect();
    let quo: Vec<usize> = (r..k).collect();
    if !f.submatrix(&sub, &quo).is_zero() {
        return Err(Error::Invalid(
            "the first basis vectors do not span a submodule".into(),
        ));
    }
    let ff = f.submatrix(&sub, &sub);
    let gg = f.submatrix(&quo, &quo);
    let kk = f.submatrix(&quo, &sub);
    let spec_f = sorted_spectrum(ff.coeff(0))?;
    let spec_g = sorted_spectrum(gg.coeff(0))?;
    for (lambda, _) in &spec_f {
        for (mu, _) in &spec_g {
            if as_integer(&(mu - lambda)).is_some_and(|d| d > 0) {
                return Err(Error::ObstructedSplit {
                    lambda: lambda.to_string(),
                    mu: mu.to_string(),
                });
            }
        }
    }
    let s = k - r;
    let mut zs: Vec<QMatrix> = Vec::with_capacity(m);
    for j in 0..m {
        let mut rhs = -kk.coeff(j);
        for p in 1..=j {
            rhs = &rhs + &(&(gg.coeff(p) * &zs[j - p]) - &(&zs[j - p] * ff.coeff(p)));
        }
        if rhs.is_zero() {
            zs.push(QMatrix::zeros(s, r));
            continue;
        }
        let b_side = ff.coeff(0) + &QMatrix::scalar(r, int(j as i64));
        let z = crate::linalg::sylvester(&-gg.coeff(0), &b_side, &rhs).ok_or_else(|| {
            let (lambda, mu) = spec_f
                .iter()
                .flat_map(|(l, _)| spec_g.iter().map(move |(m, _)| (l, m)))
                .find(|(l, m)| as_integer(&(*m - *l)) == Some(j as i64))
                .map(|(l, m)| (l.to_string(), m.to_string()))
                .unwrap_or_default();
            Error::ObstructedSplit { lambda, mu }
        })?;
        zs.push(z);
    }
    let mut zfull = zs;
    zfull.push(QMatrix::zeros(s, r));
    let z = SeriesMatrix::from_coeffs(zfull);
    let mut gauge = SeriesMatrix::identity(k, n);
    gauge.set_block(r, 0, &z);
    let module = e.change_basis(&gauge)?;
    debug_assert!(module.amat().submatrix(&quo, &sub).is_zero());
    Ok(Split { z, module })
}

/// One `[α]`-primitive summand together with its basis in the coordinates of `E`.
#[derive(Clone, Debug)]
pub struct PrimitivePart {
    pub module: ModulePresentation,
    pub basis: SeriesMatrix,
}

/// `E ≅ ⊕_α E_[α]`, keyed by the class `α ∈ (0,1]`.
pub fn decompose_primitive(e: &ModulePresentation) -> Result<BTreeMap<Rational, PrimitivePart>> {
    let f = e.pole_matrix()?;
    let nf = class_form(&f)?;
    let mut groups: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for b in &nf.blocks {
        groups
            .entry(class_of(&b.lambda))
            .or_default()
            .extend(b.range());
    }
    let all: Vec<usize> = (0..e.rank()).collect();
    let n = e.b_order();
    Ok(groups
        .into_iter()
        .map(|(alpha, idx)| {
            let module = ModulePresentation::from_simple_pole(&nf.f.submatrix(&idx, &idx));
            let basis = nf.gauge.submatrix(&idx, &all).resize(n);
            (alpha, PrimitivePart { module, basis })
        })
        .collect())
}

/// `ε_1, …, ε_k` with `aε_j = λbε_j + bε_{j+1}` and `ε_{k+1} = 0`.
pub fn jordan_chain(
    e: &ModulePresentation,
    lambda: &Rational,
    k: usize,
) -> Result<Vec<ModuleVector>> {
    let f = e.pole_matrix()?;
    let rank = e.rank();
    let n = e.b_order();
    let no_block = || Error::NoSuchBlock {
        eigenvalue: lambda.to_string(),
        size: k,
    };
    if k == 0 || k > rank {
        return Err(no_block());
    }
    let shifted = f.coeff(0) - &QMatrix::scalar(rank, lambda.clone());
    let top = shifted.pow(k).left_kernel();
    let below = shifted.pow(k - 1).left_kernel();
    if top.len() == below.len() {
        return Err(no_block());
    }
    let base = span_rank(&below, rank);
    let start = top
        .into_iter()
        .find(|v| {
            let mut span = below.clone();
            span.push(v.clone());
            span_rank(&span, rank) > base
        })
        .ok_or_else(no_block)?;
    let mut consts = vec![start];
    for _ in 1..k {
        let next = shifted.left_apply(consts.last().expect("nonempty"));
        consts.push(next);
    }
    let tail = (f.order() > 1).then(|| SeriesMatrix::from_coeffs(f.coeffs()[1..].to_vec()));
    let mut chain = vec![ModuleVector::zero(rank, n); k];
    let mut x_next = ModuleVector::zero(rank, n);
    for j in (0..k).rev() {
        let c = ModuleVector::from_constants(&consts[j], n);
        let y = match &tail {
            Some(t) => {
                ModuleVector(t.left_apply(&ModuleVector::from_constants(&consts[j], t.order()).0))
                    .resize(n)
            }
            None => ModuleVector::zero(rank, n),
        };
        let rhs = &x_next - &y;
        let x = solve_shifted(e, &(lambda - int(1)), &rhs)?;
        chain[j] = &c + &x.shift_up(1);
        x_next = x;
    }
    Ok(chain)
}

/// Smallest normal submodule containing an `a`-stable lattice.
pub fn normalize_submodule(e: &ModulePresentation, l: &Lattice) -> Result<Lattice> {
    for g in l.generators() {
        if !l.contains(&apply_a(e, g)) {
            return Err(Error::Invalid("lattice is not stable under a".into()));
        }
    }
    Ok(l.normal_closure())
}

/// The `B[a]`-submodule generated by some vectors.
pub fn generate_submodule(e: &ModulePresentation, vectors: &[ModuleVector]) -> Lattice {
    let mut l = Lattice::new(vectors.to_vec(), e.rank(), e.b_order()).reduce();
    loop {
        let images: Vec<ModuleVector> = l.generators().iter().map(|g| apply_a(e, g)).collect();
        let next = l.with(images);
        if next.length() == l.length() {
            return l;
        }
        l = next.reduce();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abalg::AbOperator;
    use crate::abmod::apply_op;
    use crate::series::rat;

    #[test]
    fn solve_on_rank_one() {
        let alpha = rat(3, 2);
        let e = ModulePresentation::e_lambda(&alpha, 8);
        let y = ModuleVector::basis(1, 0, 8);
        let x = solve_shifted(&e, &(&alpha - int(1)), &y).unwrap();
        assert_eq!(x, y);
        assert_eq!(solve_shifted(&e, &alpha, &y), Err(Error::Resonance(0)));
    }

    #[test]
    fn solve_on_xi() {
        let n = 8;
        let alpha = rat(1, 2);
        let e = ModulePresentation::xi(&alpha, 1, n);
        let y = ModuleVector::basis(2, 1, n);
        let lambda = &alpha - int(1);
        let x = solve_shifted(&e, &lambda, &y).unwrap();
        let op = AbOperator::a_minus_lambda_b(&lambda, n);
        assert_eq!(apply_op(&e, &op, &x), y.shift_up(1));
    }

    #[test]
    fn chain_in_xi_is_canonical() {
        let n = 8;
        let alpha = rat(1, 3);
        let e = ModulePresentation::xi(&alpha, 2, n);
        let chain = jordan_chain(&e, &alpha, 3).unwrap();
        let expected: Vec<ModuleVector> =
            (0..3).rev().map(|j| ModuleVector::basis(3, j, n)).collect();
        assert_eq!(chain, expected);
        let rank_one = ModulePresentation::e_lambda(&alpha, n);
        assert_eq!(
            jordan_chain(&rank_one, &alpha, 1).unwrap(),
            vec![ModuleVector::basis(1, 0, n)]
        );
        assert!(matches!(
            jordan_chain(&rank_one, &alpha, 2),
            Err(Error::NoSuchBlock { .. })
        ));
    }

    #[test]
    fn obstructed_split() {
        let n = 6;
        let alpha = rat(1, 2);
        let mut f =
            SeriesMatrix::constant(&QMatrix::diagonal(&[alpha.clone(), &alpha + int(1)]), n - 1);
        f.coeff_mut(1)[(1, 0)] = int(1);
        let e = ModulePresentation::from_simple_pole(&f);
        assert!(matches!(
            split_extension(&e, 1),
            Err(Error::ObstructedSplit { .. })
        ));
    }

    #[test]
    fn normalization_of_b_e0() {
        let n = 6;
        let e = ModulePresentation::xi(&rat(1, 2), 1, n);
        let l = Lattice::new(vec![ModuleVector::basis(2, 0, n).shift_up(1)], 2, n);
        let norm = normalize_submodule(&e, &l).unwrap();
        assert!(norm.contains(&ModuleVector::basis(2, 0, n)));
        assert!(!norm.contains(&ModuleVector::basis(2, 1, n)));
    }
}
