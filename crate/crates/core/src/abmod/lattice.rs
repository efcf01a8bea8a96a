//! Submodules of `(B/b^N)^n`: echelon and Smith forms over the truncated series ring.

use std::fmt;

use crate::abmod::matrix::ModuleVector;
use crate::series::{int, TruncSeries};

type Rows = Vec<Vec<TruncSeries>>;

fn row_sub_mul(target: &mut [TruncSeries], f: &TruncSeries, src: &[TruncSeries]) {
    if f.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        *t -= &(f * s);
    }
}

fn row_scale(row: &mut [TruncSeries], f: &TruncSeries) {
    for x in row.iter_mut() {
        *x = &*x * f;
    }
}

/// Smith form `U·M = D·W` with `U`, `W` invertible and `D = diag(b^{d_i})`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Rows,
    pub w: Rows,
    /// Valuations of the diagonal; the precision stands for a zero entry.
    pub diag: Vec<usize>,
    pub prec: usize,
}

impl Smith {
    pub fn compute(m: &[Vec<TruncSeries>], cols: usize, prec: usize) -> Smith {
        let r = m.len();
        let mut a: Rows = m
            .iter()
            .map(|row| row.iter().map(|s| s.resize(prec)).collect())
            .collect();
        let mut u: Rows = (0..r).map(|i| unit_row(r, i, prec)).collect();
        let mut w: Rows = (0..cols).map(|i| unit_row(cols, i, prec)).collect();
        let mut diag = Vec::new();
        for t in 0..r.min(cols) {
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    let v = x.valuation();
                    if v < prec && best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
            let Some((v, i, j)) = best else {
                break;
            };
            a.swap(t, i);
            u.swap(t, i);
            if j != t {
                for row in a.iter_mut() {
                    row.swap(t, j);
                }
                w.swap(t, j);
            }
            let unit = a[t][t]
                .shift_down_padded(v)
                .invert()
                .expect("pivot has minimal valuation");
            row_scale(&mut a[t], &unit);
            row_scale(&mut u[t], &unit);
            a[t][t] = TruncSeries::monomial(int(1), v, prec);
            let pivot_row = a[t].clone();
            let pivot_u = u[t].clone();
            for i in t + 1..r {
                let f = a[i][t].shift_down_padded(v);
                row_sub_mul(&mut a[i], &f, &pivot_row);
                row_sub_mul(&mut u[i], &f, &pivot_u);
            }
            for j in t + 1..cols {
                let g = a[t][j].shift_down_padded(v);
                if g.is_zero() {
                    continue;
                }
                a[t][j] = TruncSeries::zero(prec);
                let wj = w[j].clone();
                for (x, y) in w[t].iter_mut().zip(&wj) {
                    *x += &(&g * y);
                }
            }
            diag.push(v);
        }
        diag.resize(r.min(cols), prec);
        Smith { u, w, diag, prec }
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|&&d| d < self.prec).count()
    }

    /// Length of the row span as a module over `B/b^N`.
    pub fn length(&self) -> usize {
        self.diag.iter().map(|&d| self.prec - d).sum()
    }

    /// Rows spanning the left kernel of `x ↦ xM` over `B`, with the precision they are known to.
    pub fn kernel(&self) -> (Rows, usize) {
        let max_finite = self
            .diag
            .iter()
            .filter(|&&d| d < self.prec)
            .max()
            .copied()
            .unwrap_or(0);
        let rows: Rows = self
            .u
            .iter()
            .enumerate()
            .filter(|(i, _)| self.diag.get(*i).is_none_or(|&d| d >= self.prec))
            .map(|(_, row)| row.clone())
            .collect();
        (rows, self.prec - max_finite)
    }

    /// Rows spanning the smallest normal submodule containing the row span.
    pub fn normal_closure(&self) -> Rows {
        self.diag
            .iter()
            .enumerate()
            .filter(|(_, &d)| d < self.prec)
            .map(|(i, _)| self.w[i].clone())
            .collect()
    }
}

fn unit_row(n: usize, i: usize, prec: usize) -> Vec<TruncSeries> {
    (0..n)
        .map(|j| {
            if i == j {
                TruncSeries::one(prec)
            } else {
                TruncSeries::zero(prec)
            }
        })
        .collect()
}

/// Valuation-echelon form: pivots `b^v` at strictly increasing columns, entries above
/// each pivot reduced modulo `b^v`, zero rows dropped.
pub fn echelon(m: &[Vec<TruncSeries>], cols: usize, prec: usize) -> Rows {
    let mut a: Rows = m
        .iter()
        .map(|row| row.iter().map(|s| s.resize(prec)).collect())
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut top = 0;
    for c in 0..cols {
        if top == a.len() {
            break;
        }
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(top) {
            let v = row[c].valuation();
            if v < prec && best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, i));
            }
        }
        let Some((v, i)) = best else {
            continue;
        };
        a.swap(top, i);
        let unit = a[top][c]
            .shift_down_padded(v)
            .invert()
            .expect("pivot has minimal valuation");
        row_scale(&mut a[top], &unit);
        a[top][c] = TruncSeries::monomial(int(1), v, prec);
        let pivot_row = a[top].clone();
        for row in a.iter_mut().skip(top + 1) {
            let f = row[c].shift_down_padded(v);
            row_sub_mul(row, &f, &pivot_row);
        }
        pivots.push((c, v));
        top += 1;
    }
    a.truncate(top);
    for (r, &(c, v)) in pivots.iter().enumerate() {
        let pivot_row = a[r].clone();
        for row in a.iter_mut().take(r) {
            let f = row[c].shift_down_padded(v);
            row_sub_mul(row, &f, &pivot_row);
        }
    }
    a
}

/// A submodule of `(B/b^prec)^dim` given by generators.
#[derive(Clone)]
pub struct Lattice {
    dim: usize,
    prec: usize,
    generators: Vec<ModuleVector>,
    reduced: bool,
}

impl Lattice {
    pub fn new(generators: Vec<ModuleVector>, dim: usize, prec: usize) -> Self {
        let generators = generators.into_iter().map(|g| g.resize(prec)).collect();
        Lattice {
            dim,
            prec,
            generators,
            reduced: false,
        }
    }

    /// The whole module `(B/b^prec)^dim`.
    pub fn full(dim: usize, prec: usize) -> Self {
        let gens = (0..dim)
            .map(|i| ModuleVector::basis(dim, i, prec))
            .collect();
        Lattice {
            dim,
            prec,
            generators: gens,
            reduced: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn generators(&self) -> &[ModuleVector] {
        &self.generators
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    fn rows(&self) -> Rows {
        self.generators.iter().map(|g| g.0.clone()).collect()
    }

    pub fn reduce(&self) -> Lattice {
        let rows = echelon(&self.rows(), self.dim, self.prec);
        Lattice {
            dim: self.dim,
            prec: self.prec,
            generators: rows.into_iter().map(ModuleVector).collect(),
            reduced: true,
        }
    }

    pub fn smith(&self) -> Smith {
        Smith::compute(&self.rows(), self.dim, self.prec)
    }

    /// Rank over the fraction field.
    pub fn rank(&self) -> usize {
        self.smith().rank()
    }

    pub fn length(&self) -> usize {
        self.smith().length()
    }

    /// Multiplication of every generator by `b^k`.
    pub fn shift_up(&self, k: usize) -> Lattice {
        Lattice::new(
            self.generators.iter().map(|g| g.shift_up(k)).collect(),
            self.dim,
            self.prec,
        )
    }

    pub fn with(&self, extra: impl IntoIterator<Item = ModuleVector>) -> Lattice {
        let mut gens = self.generators.clone();
        gens.extend(extra.into_iter().map(|g| g.resize(self.prec)));
        Lattice::new(gens, self.dim, self.prec)
    }

    pub fn contains(&self, x: &ModuleVector) -> bool {
        self.with([x.clone()]).length() == self.length()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        self.with(other.generators.iter().cloned()).length() == self.length()
    }

    pub fn same_as(&self, other: &Lattice) -> bool {
        let joined = self.with(other.generators.iter().cloned()).length();
        joined == self.length() && joined == other.length()
    }

    /// Smallest normal submodule containing this one.
    pub fn normal_closure(&self) -> Lattice {
        let rows = self.smith().normal_closure();
        Lattice::new(
            rows.into_iter().map(ModuleVector).collect(),
            self.dim,
            self.prec,
        )
        .reduce()
    }

    /// `dim_C(self / other)` for `other ⊆ self`.
    pub fn codim_of(&self, other: &Lattice) -> usize {
        self.length() - other.length()
    }

    pub fn truncate(&self, prec: usize) -> Lattice {
        Lattice::new(
            self.generators.iter().map(|g| g.truncate(prec)).collect(),
            self.dim,
            prec,
        )
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.generators).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64]) -> TruncSeries {
        TruncSeries::from_ints(c, 5)
    }

    #[test]
    fn echelon_reduces_above_pivots() {
        let rows = vec![
            vec![s(&[0, 1]), s(&[3, 2])],
            vec![s(&[0, 0, 2]), s(&[0, 1])],
        ];
        let h = echelon(&rows, 2, 5);
        assert_eq!(h.len(), 2);
        assert_eq!(h[0][0], s(&[0, 1]));
        assert!(h[1][0].is_zero());
        assert!(h[0][1]
            .coeffs()
            .iter()
            .skip(h[1][1].valuation())
            .all(|c| *c == int(0)));
    }

    #[test]
    fn smith_and_kernel() {
        let rows = vec![vec![s(&[1]), s(&[0, 1])], vec![s(&[2]), s(&[0, 2])]];
        let sm = Smith::compute(&rows, 2, 5);
        assert_eq!(sm.rank(), 1);
        let (ker, prec) = sm.kernel();
        assert_eq!(ker.len(), 1);
        assert_eq!(prec, 5);
        let x = &ker[0];
        for (r0, r1) in rows[0].iter().zip(&rows[1]) {
            let v = &(&x[0] * r0) + &(&x[1] * r1);
            assert!(v.is_zero());
        }
    }

    #[test]
    fn membership_and_closure() {
        let l = Lattice::new(vec![ModuleVector(vec![s(&[0, 1]), s(&[])])], 2, 5);
        assert!(l.contains(&ModuleVector(vec![s(&[0, 0, 7]), s(&[])])));
        assert!(!l.contains(&ModuleVector(vec![s(&[1]), s(&[])])));
        let n = l.normal_closure();
        assert!(n.contains(&ModuleVector(vec![s(&[1]), s(&[])])));
        assert_eq!(n.rank(), 1);
        assert_eq!(n.codim_of(&l), 1);
    }
}
