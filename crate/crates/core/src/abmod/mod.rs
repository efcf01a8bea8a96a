//! Finite-rank (a,b)-modules presented by matrices over truncated series.

pub mod bernstein;
pub mod embed;
pub mod lattice;
pub mod matrix;
pub(crate) mod normal_form;
pub mod ops;
pub mod saturate;

use std::fmt;

use num_traits::Zero;

use crate::abalg::AbOperator;
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::series::{int, Rational, TruncSeries};

pub use bernstein::{bernstein_char, bernstein_min, BernsteinPolynomial};
pub use embed::{embed_in_xi, Embedding};
pub use lattice::{Lattice, Smith};
pub use matrix::{ModuleVector, SeriesMatrix};
pub use ops::{
    decompose_primitive, generate_submodule, jordan_chain, normalize_submodule, solve_shifted,
    split_extension, PrimitivePart, Split,
};
pub use saturate::{saturate, Saturation, ShiftedLattice};

/// A free module of rank `k` over `B/b^N` with `a·e_i = Σ_j amat[i][j]·e_j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModulePresentation {
    amat: SeriesMatrix,
}

impl ModulePresentation {
    pub fn new(amat: SeriesMatrix) -> Result<Self> {
        if amat.rows() != amat.cols() {
            return Err(Error::Dimension(format!(
                "presentation matrix is {}×{}",
                amat.rows(),
                amat.cols()
            )));
        }
        Ok(ModulePresentation { amat })
    }

    pub fn from_entries(rows: &[Vec<TruncSeries>], order: usize) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension("presentation matrix is not square".into()));
        }
        Self::new(SeriesMatrix::from_rows(rows, k, order))
    }

    /// The simple-pole module with `a = b·F`.
    pub fn from_simple_pole(f: &SeriesMatrix) -> Self {
        let amat = f.resize(f.order() + 1).shift_up(1);
        ModulePresentation { amat }
    }

    /// `E_λ`: rank one with `a e = λ b e`.
    pub fn e_lambda(lambda: &Rational, order: usize) -> Self {
        make_e_theta(&QMatrix::scalar(1, lambda.clone()), order)
    }

    /// `Ξ_α^{(N)}` in the basis `e_j = s^{α−1} L^j / j!`, `j = 0..=log_depth`,
    /// where `a e_j = αb e_j + b e_{j−1}`.
    pub fn xi(alpha: &Rational, log_depth: usize, order: usize) -> Self {
        make_e_theta(&xi_theta(alpha, log_depth), order)
    }

    pub fn rank(&self) -> usize {
        self.amat.rows()
    }

    pub fn b_order(&self) -> usize {
        self.amat.order()
    }

    pub fn amat(&self) -> &SeriesMatrix {
        &self.amat
    }

    pub fn entry(&self, i: usize, j: usize) -> TruncSeries {
        self.amat.entry(i, j)
    }

    pub fn is_simple_pole(&self) -> bool {
        self.amat.coeff(0).is_zero()
    }

    /// `F = b⁻¹·amat`, one order shorter.
    pub fn pole_matrix(&self) -> Result<SeriesMatrix> {
        if !self.is_simple_pole() {
            return Err(Error::NotSimplePole);
        }
        self.amat.shift_down(1)
    }

    pub fn truncate(&self, order: usize) -> Self {
        ModulePresentation {
            amat: self.amat.truncate(order),
        }
    }

    /// Zero-pads or truncates the presentation to `order`.
    pub fn resize(&self, order: usize) -> Self {
        ModulePresentation {
            amat: self.amat.resize(order),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.b_order().min(other.b_order());
        let (k, l) = (self.rank(), other.rank());
        let mut amat = SeriesMatrix::zeros(k + l, k + l, n);
        amat.set_block(0, 0, &self.amat.truncate(n));
        amat.set_block(k, k, &other.amat.truncate(n));
        ModulePresentation { amat }
    }

    /// `b^m E`, presented in the basis `b^m e_i`.
    pub fn b_twist(&self, m: usize) -> Self {
        let k = self.rank();
        let shift = SeriesMatrix::identity(k, self.b_order())
            .shift_up(1)
            .scale(&int(m as i64));
        ModulePresentation {
            amat: &self.amat + &shift,
        }
    }

    /// Presentation in the basis `f = G e`: `(G A + b² G') G⁻¹`.
    pub fn change_basis(&self, g: &SeriesMatrix) -> Result<Self> {
        let ginv = g
            .inverse()
            .ok_or_else(|| Error::Invalid("base change is not invertible".into()))?;
        let amat = &(&(g * &self.amat) + &g.b2_derive()) * &ginv;
        Ok(ModulePresentation { amat })
    }

    /// The sub-presentation on a set of basis indices spanning a direct summand.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        ModulePresentation {
            amat: self.amat.submatrix(idx, idx),
        }
    }
}

impl fmt::Debug for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModulePresentation {:?}", self.amat)
    }
}

/// The Jordan matrix of `b⁻¹a` on `Ξ_α^{(N)}`: `e_j ↦ α e_j + e_{j−1}`.
pub fn xi_theta(alpha: &Rational, log_depth: usize) -> QMatrix {
    let n = log_depth + 1;
    QMatrix::from_fn(n, n, |i, j| {
        if i == j {
            alpha.clone()
        } else if j + 1 == i {
            int(1)
        } else {
            Rational::zero()
        }
    })
}

/// `a x` for `x` in `E`: `x·A + b² x'`.
pub fn apply_a(e: &ModulePresentation, x: &ModuleVector) -> ModuleVector {
    let n = x.order().min(e.b_order());
    let x = x.resize(n);
    let amat = e.amat.resize(n);
    let xa = amat.left_apply(&x.0);
    ModuleVector(
        xa.iter()
            .zip(&x.0)
            .map(|(p, c)| p + &c.b2_derive())
            .collect(),
    )
}

/// Evaluates an operator on a vector by Horner's scheme in `a`.
pub fn apply_op(e: &ModulePresentation, op: &AbOperator, x: &ModuleVector) -> ModuleVector {
    let n = x.order().min(op.b_order());
    let x = x.resize(n);
    let Some(deg) = op.a_degree() else {
        return ModuleVector::zero(x.rank(), n);
    };
    let mut parts = vec![TruncSeries::zero(n); deg + 1];
    for (&(p, q), c) in op.terms() {
        if q < n {
            parts[p].set_coeff(q, c.clone());
        }
    }
    let mut acc = x.mul_series(&parts[deg]);
    for p in (0..deg).rev() {
        acc = &apply_a(e, &acc) + &x.mul_series(&parts[p]);
    }
    acc
}

pub fn is_simple_pole(e: &ModulePresentation) -> bool {
    e.is_simple_pole()
}

/// `E(Θ)`: the module with `a e = Θ b e`.
pub fn make_e_theta(theta: &QMatrix, order: usize) -> ModulePresentation {
    assert!(theta.is_square());
    assert!(order >= 2, "order must be at least 2");
    let amat = SeriesMatrix::constant(theta, order).shift_up(1);
    ModulePresentation { amat }
}

/// `E ⊗ F` with `a(x⊗y) = ax⊗y + x⊗ay`, basis index `i·rank(F) + j`.
pub fn tensor(e: &ModulePresentation, f: &ModulePresentation) -> Result<ModulePresentation> {
    if e.b_order() != f.b_order() {
        return Err(Error::OrderMismatch(e.b_order(), f.b_order()));
    }
    let amat = &e.amat.kron_const(&QMatrix::identity(f.rank()))
        + &SeriesMatrix::const_kron(&QMatrix::identity(e.rank()), &f.amat);
    Ok(ModulePresentation { amat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn a_action_on_rank_one() {
        let e = ModulePresentation::e_lambda(&rat(1, 2), 6);
        let x = ModuleVector::basis(1, 0, 6);
        assert_eq!(
            apply_a(&e, &x).0[0],
            TruncSeries::from_prefix(&[int(0), rat(1, 2)], 6)
        );
        let bx = x.shift_up(1);
        assert_eq!(
            apply_a(&e, &bx).0[0],
            TruncSeries::from_prefix(&[int(0), int(0), rat(3, 2)], 6)
        );
    }

    #[test]
    fn relation_holds_on_vectors() {
        let n = 7;
        let e = ModulePresentation::xi(&rat(1, 3), 2, n);
        let a = AbOperator::a(n);
        let b = AbOperator::b(n);
        let rel = &(&(&a * &b) - &(&b * &a)) - &b.pow(2);
        let x = ModuleVector(vec![
            TruncSeries::from_ints(&[1, 2, 3], n),
            TruncSeries::from_ints(&[0, -1], n),
            TruncSeries::from_ints(&[4, 0, 0, 1], n),
        ]);
        assert!(apply_op(&e, &rel, &x).is_zero());
        assert_eq!(apply_op(&e, &AbOperator::one(n), &x), x);
    }

    #[test]
    fn simple_pole_examples() {
        assert!(ModulePresentation::e_lambda(&rat(2, 3), 4).is_simple_pole());
        assert!(ModulePresentation::xi(&rat(1, 2), 3, 5).is_simple_pole());
        let one = TruncSeries::from_ints(&[1, 1], 4);
        let alpha_b = TruncSeries::from_prefix(&[int(0), rat(1, 2)], 4);
        let e = ModulePresentation::from_entries(
            &[
                vec![alpha_b.clone(), one],
                vec![TruncSeries::zero(4), alpha_b],
            ],
            4,
        )
        .unwrap();
        assert!(!e.is_simple_pole());
    }

    #[test]
    fn tensor_of_rank_one_modules() {
        let e = ModulePresentation::e_lambda(&rat(1, 2), 5);
        let f = ModulePresentation::e_lambda(&rat(1, 3), 5);
        assert_eq!(
            tensor(&e, &f).unwrap(),
            ModulePresentation::e_lambda(&rat(5, 6), 5)
        );
    }
}
