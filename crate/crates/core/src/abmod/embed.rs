//! Embedding a geometric simple-pole module into copies of `Ξ_α^{(d−1)}`.

use num_traits::{Signed, Zero};

use crate::abmod::matrix::{ModuleVector, SeriesMatrix};
use crate::abmod::normal_form::{resonant_form, Shear};
use crate::abmod::{apply_a, ModulePresentation};
use crate::error::{Error, Result};
use crate::linalg::{nilpotent_chains, QMatrix};
use crate::series::{as_integer, Rational, TruncSeries};

/// An `a`-linear injection `E → ⊕_t Ξ_{α_t}^{(d−1)}`.
#[derive(Clone, Debug)]
pub struct Embedding {
    /// The direct sum of the `Ξ` copies.
    pub target: ModulePresentation,
    /// Row `i` is the image of `e_i`, exact modulo `b^{order}`.
    pub map: SeriesMatrix,
    /// `α_t ∈ (0,1]` of each copy.
    pub alphas: Vec<Rational>,
    pub log_depth: usize,
}

impl Embedding {
    pub fn order(&self) -> usize {
        self.map.order()
    }

    pub fn image(&self, x: &ModuleVector) -> ModuleVector {
        let n = self.order().min(x.order());
        ModuleVector(self.map.resize(n).left_apply(&x.resize(n).0))
    }
}

/// `E ↪ ⊕ Ξ_α^{(d−1)}` for a simple-pole module whose eigenvalues are positive rationals.
pub fn embed_in_xi(e: &ModulePresentation) -> Result<Embedding> {
    let f = e.pole_matrix()?;
    let k = e.rank();
    let m = f.order();
    let nf = resonant_form(&f)?;
    let shear = Shear::of(&nf)?;
    let nilp = shear.nilpotent();
    let mut chains: Vec<(Rational, usize, Vec<Vec<Rational>>)> = Vec::new();
    for (alpha, idx) in &shear.classes {
        let base = &shear.base[idx[0]];
        if !base.is_positive() {
            return Err(Error::NonGeometric(format!(
                "eigenvalue {base} is not positive"
            )));
        }
        let lift = as_integer(&(base - alpha)).expect("same class") as usize;
        for chain in nilpotent_chains(&nilp.submatrix(idx, idx)) {
            let full: Vec<Vec<Rational>> = chain
                .iter()
                .map(|h| {
                    let mut v = vec![Rational::zero(); k];
                    for (r, &i) in idx.iter().enumerate() {
                        v[i] = h[r].clone();
                    }
                    v
                })
                .collect();
            chains.push((alpha.clone(), lift, full));
        }
    }
    let depth = chains.iter().map(|c| c.2.len()).max().unwrap_or(1);
    let log_depth = depth - 1;
    let mut target: Option<ModulePresentation> = None;
    let mut q_rows = Vec::with_capacity(k);
    let mut psi_rows: Vec<Vec<TruncSeries>> = Vec::with_capacity(k);
    let dim = chains.len() * depth;
    for (t, (alpha, lift, chain)) in chains.iter().enumerate() {
        let xi = ModulePresentation::xi(alpha, log_depth, e.b_order());
        for (j, h) in chain.iter().enumerate() {
            q_rows.push(h.clone());
            let mut v = ModuleVector::basis(depth, j, m);
            for _ in 0..*lift {
                v = apply_a(&xi, &v);
            }
            let mut row = vec![TruncSeries::zero(m); dim];
            for (s, c) in v.0.into_iter().enumerate() {
                row[t * depth + s] = c;
            }
            psi_rows.push(row);
        }
        target = Some(match target {
            None => xi,
            Some(acc) => acc.direct_sum(&xi),
        });
    }
    let target = target.ok_or_else(|| Error::Dimension("module of rank zero".into()))?;
    let q_inv = QMatrix::from_rows(&q_rows)
        .inverse()
        .expect("Jordan chains form a basis");
    let diag = shear.diagonal(m);
    let g_inv = nf.gauge.inverse().expect("gauge is invertible");
    let psi = SeriesMatrix::from_rows(&psi_rows, dim, m);
    let map = &(&(&g_inv * &diag) * &SeriesMatrix::constant(&q_inv, m)) * &psi;
    Ok(Embedding {
        target,
        map,
        alphas: chains.into_iter().map(|c| c.0).collect(),
        log_depth,
    })
}
