//! Gauge reduction of a simple-pole connection matrix `F(b)` with `u = b⁻¹a`.
//!
//! In the basis `f = G e` the matrix becomes `(G F + b G') G⁻¹`. A constant change
//! first splits `F_0` into generalized eigenspaces; then, order by order, the gauge
//! `I + g b^m` removes every block the caller asks to kill.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::abmod::matrix::SeriesMatrix;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, sylvester, QMatrix};
use crate::series::{as_integer, class_of, int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub lambda: Rational,
    pub start: usize,
    pub size: usize,
}

impl Block {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.size
    }

    pub fn indices(&self) -> Vec<usize> {
        self.range().collect()
    }
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    /// `f = gauge·e`.
    pub gauge: SeriesMatrix,
    /// The reduced matrix in the basis `f`.
    pub f: SeriesMatrix,
    pub blocks: Vec<Block>,
}

/// The transformed matrix `(G F + b G') G⁻¹`.
pub fn gauge_transform(f: &SeriesMatrix, g: &SeriesMatrix) -> Option<SeriesMatrix> {
    let ginv = g.inverse()?;
    Some(&(&(g * f) + &g.b_derive()) * &ginv)
}

/// Eigenvalues of `F_0` sorted by class in `(0,1]`, then by value.
pub fn sorted_spectrum(f0: &QMatrix) -> Result<Vec<(Rational, usize)>> {
    let mut spec = eigenvalues(f0).map_err(|d| {
        Error::NonGeometric(format!(
            "{d} eigenvalues of the residue matrix are not rational"
        ))
    })?;
    spec.sort_by(|(x, _), (y, _)| class_of(x).cmp(&class_of(y)).then(x.cmp(y)));
    Ok(spec)
}

/// Reduces `f`, removing at order `m` the block `(a, c)` whenever `kill(λ_a, λ_c, m)`.
///
/// A killed block must satisfy `λ_a − m ≠ λ_c`; otherwise `Resonance(m)` is raised.
pub fn reduce(
    f: &SeriesMatrix,
    kill: impl Fn(&Rational, &Rational, usize) -> bool,
) -> Result<NormalForm> {
    let k = f.rows();
    let order = f.order();
    let spec = sorted_spectrum(f.coeff(0))?;
    let mut rows = Vec::with_capacity(k);
    let mut blocks = Vec::new();
    for (lambda, mult) in &spec {
        let shifted = f.coeff(0) - &QMatrix::scalar(k, lambda.clone());
        let basis = shifted.pow(*mult).left_kernel();
        debug_assert_eq!(basis.len(), *mult);
        blocks.push(Block {
            lambda: lambda.clone(),
            start: rows.len(),
            size: basis.len(),
        });
        rows.extend(basis);
    }
    let p = QMatrix::from_rows(&rows);
    let pinv = p.inverse().expect("generalized eigenvectors form a basis");
    let mut gauge = SeriesMatrix::constant(&p, order);
    let mut cur = &(&SeriesMatrix::constant(&p, order) * f) * &SeriesMatrix::constant(&pinv, order);
    let jblocks: Vec<QMatrix> = blocks
        .iter()
        .map(|b| cur.coeff(0).submatrix(&b.indices(), &b.indices()))
        .collect();
    for m in 1..order {
        let fm = cur.coeff(m).clone();
        let mut g = QMatrix::zeros(k, k);
        let mut any = false;
        for (ai, ba) in blocks.iter().enumerate() {
            for (ci, bc) in blocks.iter().enumerate() {
                if !kill(&ba.lambda, &bc.lambda, m) {
                    continue;
                }
                let rhs = fm.submatrix(&ba.indices(), &bc.indices());
                if rhs.is_zero() {
                    continue;
                }
                let a_side = -&(&jblocks[ai] - &QMatrix::scalar(ba.size, int(m as i64)));
                let x = sylvester(&a_side, &jblocks[ci], &-&rhs).ok_or(Error::Resonance(m))?;
                g.set_block(ba.start, bc.start, &x);
                any = true;
            }
        }
        if !any {
            continue;
        }
        let mut gm = SeriesMatrix::identity(k, order);
        *gm.coeff_mut(m) = g;
        cur = gauge_transform(&cur, &gm).expect("unipotent gauge is invertible");
        gauge = &gm * &gauge;
    }
    Ok(NormalForm {
        gauge,
        f: cur,
        blocks,
    })
}

/// Jordan–Chevalley reduction: only resonant blocks `λ_a = λ_c + m` survive.
pub fn resonant_form(f: &SeriesMatrix) -> Result<NormalForm> {
    reduce(f, |la, lc, m| la - lc != int(m as i64))
}

/// Class splitting: blocks between different classes modulo the integers are removed.
pub fn class_form(f: &SeriesMatrix) -> Result<NormalForm> {
    reduce(f, |la, lc, _| class_of(la) != class_of(lc))
}

impl NormalForm {
    /// The eigenvalue attached to each basis index.
    pub fn lambdas(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.f.rows()];
        for b in &self.blocks {
            for i in b.range() {
                out[i] = b.lambda.clone();
            }
        }
        out
    }
}

/// The constant form of `u` after the shear `g_a = b^{−n_a} f_a` of a resonant normal form.
///
/// Within a class, `n_a = λ_a − min λ`, so `u g = Θ' g` with `Θ'` constant and
/// `Θ' − base` nilpotent.
#[derive(Clone, Debug)]
pub struct Shear {
    pub shifts: Vec<usize>,
    /// The smallest eigenvalue of the class of each index.
    pub base: Vec<Rational>,
    pub theta: QMatrix,
    pub classes: BTreeMap<Rational, Vec<usize>>,
}

impl Shear {
    pub fn of(nf: &NormalForm) -> Result<Shear> {
        let k = nf.f.rows();
        let order = nf.f.order();
        let lambdas = nf.lambdas();
        let mut classes: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
        for (i, l) in lambdas.iter().enumerate() {
            classes.entry(class_of(l)).or_default().push(i);
        }
        let mut shifts = vec![0usize; k];
        let mut base = vec![Rational::zero(); k];
        for idx in classes.values() {
            let low = idx
                .iter()
                .map(|&i| &lambdas[i])
                .min()
                .expect("nonempty class")
                .clone();
            for &i in idx {
                let d = as_integer(&(&lambdas[i] - &low)).expect("same class") as usize;
                if d >= order {
                    return Err(Error::PrecisionExhausted(format!(
                        "eigenvalue gap {d} exceeds order {order}"
                    )));
                }
                shifts[i] = d;
                base[i] = low.clone();
            }
        }
        let theta = QMatrix::from_fn(k, k, |i, j| {
            let mut x = if class_of(&lambdas[i]) == class_of(&lambdas[j]) && shifts[i] >= shifts[j]
            {
                nf.f.coeff(shifts[i] - shifts[j])[(i, j)].clone()
            } else {
                Rational::zero()
            };
            if i == j {
                x -= int(shifts[i] as i64);
            }
            x
        });
        Ok(Shear {
            shifts,
            base,
            theta,
            classes,
        })
    }

    /// `Θ' − base`.
    pub fn nilpotent(&self) -> QMatrix {
        &self.theta - &QMatrix::diagonal(&self.base)
    }

    /// `D M D⁻¹` with `D = diag(b^{n_a})`, for `M` vanishing where `n_a < n_c`.
    pub fn unshear(&self, m: &QMatrix, order: usize) -> SeriesMatrix {
        let k = m.rows();
        let mut out = SeriesMatrix::zeros(k, k, order);
        for i in 0..k {
            for j in 0..k {
                if m[(i, j)].is_zero() {
                    continue;
                }
                let d = self.shifts[i]
                    .checked_sub(self.shifts[j])
                    .expect("entry respects the shear");
                if d < order {
                    out.coeff_mut(d)[(i, j)] = m[(i, j)].clone();
                }
            }
        }
        out
    }

    /// `diag(b^{n_a})`.
    pub fn diagonal(&self, order: usize) -> SeriesMatrix {
        let k = self.shifts.len();
        let mut out = SeriesMatrix::zeros(k, k, order);
        for (i, &s) in self.shifts.iter().enumerate() {
            if s < order {
                out.coeff_mut(s)[(i, i)] = int(1);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn resonant_terms_survive() {
        let n = 6;
        let mut f = SeriesMatrix::constant(&QMatrix::diagonal(&[rat(3, 2), rat(1, 2)]), n);
        f.coeff_mut(1)[(0, 1)] = int(1);
        f.coeff_mut(1)[(1, 0)] = int(1);
        f.coeff_mut(2)[(0, 0)] = int(5);
        let nf = resonant_form(&f).unwrap();
        for m in 1..n {
            let c = nf.f.coeff(m);
            let idx_hi = nf
                .blocks
                .iter()
                .find(|b| b.lambda == rat(3, 2))
                .unwrap()
                .start;
            let idx_lo = nf
                .blocks
                .iter()
                .find(|b| b.lambda == rat(1, 2))
                .unwrap()
                .start;
            for i in 0..2 {
                for j in 0..2 {
                    let allowed = m == 1 && i == idx_hi && j == idx_lo;
                    if !allowed {
                        assert!(c[(i, j)].is_zero(), "order {m} entry ({i},{j})");
                    }
                }
            }
        }
        let again = gauge_transform(&f, &nf.gauge).unwrap();
        assert_eq!(again, nf.f);
    }
}
