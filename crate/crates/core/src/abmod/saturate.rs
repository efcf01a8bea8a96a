//! The saturation `E♯ = Σ_p (b⁻¹a)^p E`, the smallest simple-pole module containing `E`.

use crate::abmod::lattice::Lattice;
use crate::abmod::matrix::{ModuleVector, SeriesMatrix};
use crate::abmod::{apply_a, ModulePresentation};
use crate::error::{Error, Result};
use crate::series::{int, TruncSeries};

/// `b^{−shift}·lattice` inside `E ⊗ B[b⁻¹]`.
#[derive(Clone, Debug)]
pub struct ShiftedLattice {
    pub shift: usize,
    pub lattice: Lattice,
}

#[derive(Clone, Debug)]
pub struct Saturation {
    /// `E♯` in the basis `f = b^{−q} H e`, with `H` the echelon basis of the lattice.
    pub module: ModulePresentation,
    /// `C` with `e = C f`.
    pub inclusion: SeriesMatrix,
    /// `dim_C(E♯ / E)`.
    pub codim: usize,
    pub lattice: ShiftedLattice,
}

/// Iterates `L ← bL + (a − q b)L` until the shifted lattice is stationary.
pub fn saturate(e: &ModulePresentation) -> Result<Saturation> {
    let k = e.rank();
    let n = e.b_order();
    let full = Lattice::full(k, n);
    let mut q = 0usize;
    let mut lat = full.clone();
    loop {
        let bl = lat.shift_up(1);
        let images: Vec<ModuleVector> = lat
            .generators()
            .iter()
            .map(|x| &apply_a(e, x) - &x.shift_up(1).scale(&int(q as i64)))
            .collect();
        let next = bl.with(images);
        if bl.contains_lattice(&next) {
            break;
        }
        q += 1;
        if q > k * n {
            return Err(Error::NotRegular(k * n));
        }
        if q + 1 >= n {
            return Err(Error::PrecisionExhausted(format!(
                "saturation needs more than {q} divisions by b at order {n}"
            )));
        }
        lat = next.reduce();
        if lat.same_as(&full) {
            return Err(Error::NotRegular(q));
        }
    }
    let lat = lat.reduce();
    let rows: Vec<Vec<TruncSeries>> = lat.generators().iter().map(|g| g.0.clone()).collect();
    debug_assert_eq!(rows.len(), k);
    let h = SeriesMatrix::from_rows(&rows, k, n);
    let pivots: Vec<usize> = (0..k).map(|i| rows[i][i].valuation()).collect();
    let total: usize = pivots.iter().sum();
    let c = scaled_inverse(&h, &pivots, q, n);
    let x = &(&(&h * e.amat()) + &h.b2_derive()) - &h.shift_up(1).scale(&int(q as i64));
    let amat = (&x * &c).shift_down(q)?;
    let module = ModulePresentation::new(amat)?;
    if !module.is_simple_pole() {
        return Err(Error::NotSimplePole);
    }
    let inclusion = c.truncate(n - q);
    Ok(Saturation {
        module,
        inclusion,
        codim: q * k - total,
        lattice: ShiftedLattice {
            shift: q,
            lattice: lat,
        },
    })
}

/// `b^q H⁻¹` for an upper-triangular `H` with diagonal `b^{v_i}`, exact modulo `b^n`.
fn scaled_inverse(h: &SeriesMatrix, pivots: &[usize], q: usize, n: usize) -> SeriesMatrix {
    let k = h.rows();
    let ext = n + pivots.iter().sum::<usize>();
    let hx = h.resize(ext);
    let hent: Vec<Vec<TruncSeries>> = hx.to_rows();
    let mut out = SeriesMatrix::zeros(k, k, n);
    for r in 0..k {
        let mut row: Vec<TruncSeries> = Vec::with_capacity(k);
        for l in 0..k {
            let mut rhs = if r == l {
                TruncSeries::monomial(int(1), q, ext)
            } else {
                TruncSeries::zero(ext)
            };
            for (j, c) in row.iter().enumerate() {
                rhs -= &(c * &hent[j][l]);
            }
            let v = pivots[l];
            row.push(rhs.shift_down_padded(v));
        }
        for (l, c) in row.iter().enumerate() {
            out.set_entry(r, l, &c.truncate(n));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn simple_pole_is_saturated() {
        let e = ModulePresentation::xi(&rat(1, 2), 2, 8);
        let s = saturate(&e).unwrap();
        assert_eq!(s.codim, 0);
        assert_eq!(s.module, e);
    }

    #[test]
    fn theme_saturates_to_xi() {
        let n = 8;
        let alpha = rat(1, 3);
        let z = TruncSeries::zero(n);
        let theme = ModulePresentation::from_entries(
            &[
                vec![
                    TruncSeries::monomial(alpha.clone(), 1, n),
                    TruncSeries::one(n),
                ],
                vec![z, TruncSeries::monomial(&alpha + int(1), 1, n)],
            ],
            n,
        )
        .unwrap();
        let s = saturate(&theme).unwrap();
        assert_eq!(s.codim, 1);
        assert_eq!(s.lattice.shift, 1);
        assert!(s.module.is_simple_pole());
        assert_eq!(s.module.b_order(), n - 1);
    }

    #[test]
    fn irregular_module_is_refused() {
        let e = ModulePresentation::from_entries(&[vec![TruncSeries::one(6)]], 6).unwrap();
        assert!(matches!(saturate(&e), Err(Error::NotRegular(_))));
    }
}
