//! The nilpotent part of the monodromy and the semi-simple filtration `S_j(E)`.

use crate::abmod::lattice::{Lattice, Smith};
use crate::abmod::normal_form::{resonant_form, sorted_spectrum, Shear};
use crate::abmod::{saturate, ModulePresentation};
use crate::error::{Error, Result};
use crate::linalg::{jordan_chevalley, QMatrix};
use crate::series::int;

/// A linear operator on `E/b^N E` in the basis `b^m e_i`, index `m·k + i`, acting on rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedUOperator {
    rank: usize,
    levels: usize,
    matrix: QMatrix,
}

impl TruncatedUOperator {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn index(&self, level: usize, i: usize) -> usize {
        level * self.rank + i
    }

    /// Multiplication by `b` on the same truncation.
    pub fn b_matrix(&self) -> QMatrix {
        let k = self.rank;
        let dim = k * self.levels;
        QMatrix::from_fn(dim, dim, |r, c| if c == r + k { int(1) } else { int(0) })
    }
}

/// `u = b⁻¹a` on `E/b^N E`: `u(b^m e_i) = b^m(u + m)e_i`.
pub fn u_matrix(e: &ModulePresentation, levels: usize) -> Result<TruncatedUOperator> {
    let f = e.pole_matrix()?;
    if levels > f.order() {
        return Err(Error::PrecisionExhausted(format!(
            "{levels} levels requested, {} known",
            f.order()
        )));
    }
    let k = e.rank();
    let mut matrix = QMatrix::zeros(k * levels, k * levels);
    for m in 0..levels {
        for p in 0..levels - m {
            let mut block = f.coeff(p).clone();
            if p == 0 {
                block = &block + &QMatrix::scalar(k, int(m as i64));
            }
            matrix.set_block(m * k, (m + p) * k, &block);
        }
    }
    Ok(TruncatedUOperator {
        rank: k,
        levels,
        matrix,
    })
}

/// The nilpotent Jordan–Chevalley component of `u` on `E/b^N E`.
pub fn nilpotent_part(e: &ModulePresentation, levels: usize) -> Result<TruncatedUOperator> {
    let u = u_matrix(e, levels)?;
    sorted_spectrum(e.pole_matrix()?.coeff(0))?;
    let (_, n) = jordan_chevalley(&u.matrix);
    Ok(TruncatedUOperator { matrix: n, ..u })
}

/// `S_1 ⊂ … ⊂ S_d = E` together with the ranks of the successive quotients.
#[derive(Clone, Debug)]
pub struct FiltrationResult {
    pub steps: Vec<Lattice>,
    pub quotient_ranks: Vec<usize>,
    pub nilpotent_order: usize,
}

/// `S_j(E) = E ∩ ker 𝒩^j` on the saturation, re-verified one order higher.
pub fn semisimple_filtration(e: &ModulePresentation) -> Result<FiltrationResult> {
    let res = filtration_at(e)?;
    let check = filtration_at(&e.resize(e.b_order() + 1))?;
    let ranks = |r: &FiltrationResult| r.steps.iter().map(Lattice::rank).collect::<Vec<_>>();
    if check.quotient_ranks != res.quotient_ranks || ranks(&check) != ranks(&res) {
        return Err(Error::PrecisionExhausted(format!(
            "filtration changes between orders {} and {}",
            e.b_order(),
            e.b_order() + 1
        )));
    }
    Ok(res)
}

/// `d(E)`.
pub fn nilpotent_order(e: &ModulePresentation) -> Result<usize> {
    Ok(semisimple_filtration(e)?.nilpotent_order)
}

fn filtration_at(e: &ModulePresentation) -> Result<FiltrationResult> {
    let k = e.rank();
    let sat = saturate(e)?;
    let f = sat.module.pole_matrix()?;
    let m = f.order();
    let nf = resonant_form(&f)?;
    let shear = Shear::of(&nf)?;
    let nilp = shear.nilpotent();
    let mut exact = vec![0usize];
    let mut power = QMatrix::identity(k);
    while *exact.last().expect("nonempty") < k {
        power = &power * &nilp;
        exact.push(k - power.rank());
        if exact.len() > k + 1 {
            return Err(Error::Invalid("sheared residue is not nilpotent".into()));
        }
    }
    let d = exact.len() - 1;
    let ginv = nf.gauge.inverse().expect("gauge is invertible");
    let nsharp = &(&ginv * &shear.unshear(&nilp, m)) * &nf.gauge;
    let c = sat.inclusion.truncate(m);
    let mut steps = Vec::with_capacity(d);
    let mut acc = c.clone();
    for (j, &want) in exact.iter().enumerate().skip(1) {
        acc = &acc * &nsharp;
        if j == d {
            steps.push(Lattice::full(k, e.b_order()));
            break;
        }
        let smith = Smith::compute(&acc.to_rows(), k, m);
        let (ker, prec) = smith.kernel();
        if prec == 0 {
            return Err(Error::PrecisionExhausted(format!(
                "kernel of 𝒩^{j} lost all precision"
            )));
        }
        let gens = ker
            .into_iter()
            .map(|r| crate::abmod::ModuleVector(r).truncate(prec))
            .collect();
        let step = Lattice::new(gens, k, prec).normal_closure();
        if step.rank() != want {
            return Err(Error::PrecisionExhausted(format!(
                "S_{j} has rank {} at order {}, expected {want}",
                step.rank(),
                e.b_order()
            )));
        }
        steps.push(step);
    }
    let quotient_ranks = exact.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(FiltrationResult {
        steps,
        quotient_ranks,
        nilpotent_order: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abmod::ModuleVector;
    use crate::series::{rat, TruncSeries};

    #[test]
    fn u_matrix_examples() {
        let alpha = rat(1, 3);
        let u = u_matrix(&ModulePresentation::e_lambda(&alpha, 4), 2).unwrap();
        assert_eq!(
            u.matrix(),
            &QMatrix::diagonal(&[alpha.clone(), &alpha + int(1)])
        );
        let xi = ModulePresentation::xi(&alpha, 1, 4);
        let u = u_matrix(&xi, 1).unwrap();
        assert_eq!(
            u.matrix().to_rows(),
            vec![vec![alpha.clone(), int(0)], vec![int(1), alpha.clone()]]
        );
    }

    #[test]
    fn nilpotent_part_of_xi() {
        let xi = ModulePresentation::xi(&rat(1, 2), 2, 5);
        let n = nilpotent_part(&xi, 3).unwrap();
        let u = u_matrix(&xi, 3).unwrap();
        assert!(n.matrix().pow(3).is_zero());
        assert_eq!(n.matrix() * u.matrix(), u.matrix() * n.matrix());
        assert_eq!(n.matrix() * &n.b_matrix(), &n.b_matrix() * n.matrix());
        assert_eq!(n.matrix()[(n.index(1, 2), n.index(1, 1))], int(1));
    }

    #[test]
    fn filtration_of_xi() {
        let xi = ModulePresentation::xi(&rat(1, 2), 2, 8);
        let r = semisimple_filtration(&xi).unwrap();
        assert_eq!(r.quotient_ranks, vec![1, 1, 1]);
        assert_eq!(r.nilpotent_order, 3);
        assert!(r.steps[0].contains(&ModuleVector::basis(3, 0, 8)));
        assert!(!r.steps[0].contains(&ModuleVector::basis(3, 1, 8)));
    }

    #[test]
    fn non_semisimple_rank_two() {
        let n = 10;
        let alpha = rat(3, 2);
        for p in 1..=2usize {
            let mut top = TruncSeries::one(n);
            top.set_coeff(p, int(1));
            let e = ModulePresentation::from_entries(
                &[
                    vec![TruncSeries::monomial(&alpha + int(p as i64 - 1), 1, n), top],
                    vec![
                        TruncSeries::zero(n),
                        TruncSeries::monomial(alpha.clone(), 1, n),
                    ],
                ],
                n,
            )
            .unwrap();
            let r = semisimple_filtration(&e).unwrap();
            assert_eq!(r.nilpotent_order, 2, "p = {p}");
            assert_eq!(r.steps[0].rank(), 1);
        }
    }
}
