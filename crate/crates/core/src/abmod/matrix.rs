//! Matrices and row vectors over truncated power series.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::series::{int, Rational, TruncSeries};

/// A matrix of series stored as the series of its coefficient matrices, `Σ M_m b^m`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    coeffs: Vec<QMatrix>,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize, order: usize) -> Self {
        assert!(order > 0, "order must be positive");
        SeriesMatrix {
            rows,
            cols,
            coeffs: vec![QMatrix::zeros(rows, cols); order],
        }
    }

    pub fn identity(n: usize, order: usize) -> Self {
        Self::constant(&QMatrix::identity(n), order)
    }

    pub fn constant(m: &QMatrix, order: usize) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols(), order);
        out.coeffs[0] = m.clone();
        out
    }

    pub fn from_coeffs(coeffs: Vec<QMatrix>) -> Self {
        assert!(!coeffs.is_empty(), "order must be positive");
        let (rows, cols) = (coeffs[0].rows(), coeffs[0].cols());
        assert!(coeffs.iter().all(|m| m.rows() == rows && m.cols() == cols));
        SeriesMatrix { rows, cols, coeffs }
    }

    /// Builds from rows of series sharing one order.
    pub fn from_rows(rows: &[Vec<TruncSeries>], cols: usize, order: usize) -> Self {
        let mut out = Self::zeros(rows.len(), cols, order);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, s) in row.iter().enumerate() {
                out.set_entry(i, j, s);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, m: usize) -> &QMatrix {
        &self.coeffs[m]
    }

    pub fn coeff_mut(&mut self, m: usize) -> &mut QMatrix {
        &mut self.coeffs[m]
    }

    pub fn coeffs(&self) -> &[QMatrix] {
        &self.coeffs
    }

    pub fn entry(&self, i: usize, j: usize) -> TruncSeries {
        TruncSeries::new(self.coeffs.iter().map(|m| m[(i, j)].clone()).collect())
    }

    /// Writes an entry, truncating or zero-padding the series to this order.
    pub fn set_entry(&mut self, i: usize, j: usize, s: &TruncSeries) {
        for (m, c) in self.coeffs.iter_mut().enumerate() {
            c[(i, j)] = s.coeff(m);
        }
    }

    pub fn row(&self, i: usize) -> Vec<TruncSeries> {
        (0..self.cols).map(|j| self.entry(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<TruncSeries>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(QMatrix::is_zero)
    }

    /// Least `m` with `M_m ≠ 0`, or the order for zero.
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|m| !m.is_zero())
            .unwrap_or(self.order())
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order > 0 && order <= self.order());
        Self::from_coeffs(self.coeffs[..order].to_vec())
    }

    /// Zero-pads or truncates to `order`.
    pub fn resize(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order, QMatrix::zeros(self.rows, self.cols));
        Self::from_coeffs(coeffs)
    }

    pub fn transpose(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(QMatrix::transpose).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|m| m.scale(c)).collect())
    }

    /// Multiplication by `b^k` at the same order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zeros(self.rows, self.cols, n);
        for m in k..n {
            out.coeffs[m] = self.coeffs[m - k].clone();
        }
        out
    }

    /// Division by `b^k`, lowering the order by `k`.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k >= self.order() {
            return Err(Error::PrecisionExhausted(format!(
                "cannot divide a matrix of order {} by b^{k}",
                self.order()
            )));
        }
        if self.valuation() < k {
            return Err(Error::Invalid(format!("matrix is not divisible by b^{k}")));
        }
        Ok(Self::from_coeffs(self.coeffs[k..].to_vec()))
    }

    /// `b²M'` at the same order.
    pub fn b2_derive(&self) -> Self {
        let n = self.order();
        let mut out = Self::zeros(self.rows, self.cols, n);
        for m in 2..n {
            out.coeffs[m] = self.coeffs[m - 1].scale(&int(m as i64 - 1));
        }
        out
    }

    /// `bM'` at the same order.
    pub fn b_derive(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c.scale(&int(m as i64)))
                .collect(),
        )
    }

    /// Inverse when the constant term is invertible.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let inv0 = self.coeffs[0].inverse()?;
        let n = self.order();
        let mut out: Vec<QMatrix> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for q in 1..n {
            let mut acc = QMatrix::zeros(self.rows, self.rows);
            for j in 1..=q {
                if !self.coeffs[j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &out[q - j]);
                }
            }
            out.push(-&(&inv0 * &acc));
        }
        Some(Self::from_coeffs(out))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .map(|m| m.submatrix(rows, cols))
                .collect(),
        )
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &SeriesMatrix) {
        for (m, c) in self.coeffs.iter_mut().enumerate() {
            if m < block.order() {
                c.set_block(r0, c0, &block.coeffs[m]);
            }
        }
    }

    /// Coefficientwise Kronecker product.
    pub fn kron_const(&self, other: &QMatrix) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|m| m.kron(other)).collect())
    }

    pub fn const_kron(m: &QMatrix, other: &SeriesMatrix) -> Self {
        Self::from_coeffs(other.coeffs.iter().map(|c| m.kron(c)).collect())
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, x: &[TruncSeries]) -> Vec<TruncSeries> {
        assert_eq!(x.len(), self.rows);
        let n = self
            .order()
            .min(x.first().map_or(self.order(), TruncSeries::order));
        let mut out = vec![vec![Rational::zero(); n]; self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (p, c) in xi.coeffs().iter().enumerate().take(n) {
                if c.is_zero() {
                    continue;
                }
                for m in 0..n - p {
                    let row = self.coeffs[m].row(i);
                    for (j, v) in row.iter().enumerate() {
                        if !v.is_zero() {
                            out[j][p + m] += c * v;
                        }
                    }
                }
            }
        }
        out.into_iter().map(TruncSeries::new).collect()
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::identity(self.rows, self.order()), |acc, _| {
            &acc * self
        })
    }
}

impl Mul for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn mul(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shapes differ");
        let n = self.order().min(rhs.order());
        let (r, m, c) = (self.rows, self.cols, rhs.cols);
        // Row denominators on the left, column denominators on the right.
        let lcm = |d: BigInt, x: &Rational| d.lcm(x.denom());
        let dl: Vec<BigInt> = (0..r)
            .map(|i| {
                self.coeffs[..n]
                    .iter()
                    .flat_map(|q| q.row(i))
                    .fold(BigInt::one(), lcm)
            })
            .collect();
        let dr: Vec<BigInt> = (0..c)
            .map(|j| {
                rhs.coeffs[..n]
                    .iter()
                    .flat_map(|q| (0..m).map(move |k| &q[(k, j)]))
                    .fold(BigInt::one(), lcm)
            })
            .collect();
        let scaled = |x: &Rational, d: &BigInt| -> Option<BigInt> {
            (!x.is_zero()).then(|| x.numer() * (d / x.denom()))
        };
        let left: Vec<Vec<Option<BigInt>>> = self.coeffs[..n]
            .iter()
            .map(|q| {
                (0..r * m)
                    .map(|t| scaled(&q[(t / m, t % m)], &dl[t / m]))
                    .collect()
            })
            .collect();
        let right: Vec<Vec<Option<BigInt>>> = rhs.coeffs[..n]
            .iter()
            .map(|q| {
                (0..m * c)
                    .map(|t| scaled(&q[(t / c, t % c)], &dr[t % c]))
                    .collect()
            })
            .collect();
        let mut acc = vec![vec![BigInt::zero(); r * c]; n];
        for p in 0..n {
            if left[p].iter().all(Option::is_none) {
                continue;
            }
            for q in 0..n - p {
                for i in 0..r {
                    for k in 0..m {
                        let Some(x) = &left[p][i * m + k] else {
                            continue;
                        };
                        for j in 0..c {
                            if let Some(y) = &right[q][k * c + j] {
                                acc[p + q][i * c + j] += x * y;
                            }
                        }
                    }
                }
            }
        }
        let coeffs = acc
            .into_iter()
            .map(|v| {
                QMatrix::from_fn(r, c, |i, j| {
                    let x = &v[i * c + j];
                    if x.is_zero() {
                        int(0)
                    } else {
                        Rational::new(x.clone(), &dl[i] * &dr[j])
                    }
                })
            })
            .collect();
        SeriesMatrix::from_coeffs(coeffs)
    }
}

impl Add for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn add(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        let n = self.order().min(rhs.order());
        SeriesMatrix::from_coeffs((0..n).map(|m| &self.coeffs[m] + &rhs.coeffs[m]).collect())
    }
}

impl Sub for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn sub(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        let n = self.order().min(rhs.order());
        SeriesMatrix::from_coeffs((0..n).map(|m| &self.coeffs[m] - &rhs.coeffs[m]).collect())
    }
}

impl Neg for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn neg(self) -> SeriesMatrix {
        SeriesMatrix::from_coeffs(self.coeffs.iter().map(|m| -m).collect())
    }
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "] + O(b^{})", self.order())
    }
}

/// Coordinates of an element of a module in its basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModuleVector(pub Vec<TruncSeries>);

impl ModuleVector {
    pub fn zero(rank: usize, order: usize) -> Self {
        ModuleVector(vec![TruncSeries::zero(order); rank])
    }

    /// The `i`-th basis vector.
    pub fn basis(rank: usize, i: usize, order: usize) -> Self {
        let mut v = Self::zero(rank, order);
        v.0[i] = TruncSeries::one(order);
        v
    }

    pub fn from_constants(c: &[Rational], order: usize) -> Self {
        ModuleVector(
            c.iter()
                .map(|x| TruncSeries::constant(x.clone(), order))
                .collect(),
        )
    }

    pub fn coords(&self) -> &[TruncSeries] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.first().map_or(0, TruncSeries::order)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(TruncSeries::is_zero)
    }

    pub fn valuation(&self) -> usize {
        self.0.iter().map(TruncSeries::valuation).min().unwrap_or(0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        ModuleVector(self.0.iter().map(|s| s.truncate(order)).collect())
    }

    pub fn resize(&self, order: usize) -> Self {
        ModuleVector(self.0.iter().map(|s| s.resize(order)).collect())
    }

    /// Multiplication by a scalar series.
    pub fn mul_series(&self, s: &TruncSeries) -> Self {
        ModuleVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ModuleVector(self.0.iter().map(|s| s.scale(c)).collect())
    }

    pub fn shift_up(&self, k: usize) -> Self {
        ModuleVector(self.0.iter().map(|s| s.shift_up(k)).collect())
    }

    /// Constant term of each coordinate.
    pub fn leading(&self) -> Vec<Rational> {
        self.0.iter().map(|s| s.coeff(0)).collect()
    }
}

impl Add for &ModuleVector {
    type Output = ModuleVector;
    fn add(self, rhs: &ModuleVector) -> ModuleVector {
        ModuleVector(self.0.iter().zip(&rhs.0).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &ModuleVector {
    type Output = ModuleVector;
    fn sub(self, rhs: &ModuleVector) -> ModuleVector {
        ModuleVector(self.0.iter().zip(&rhs.0).map(|(x, y)| x - y).collect())
    }
}

impl fmt::Debug for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}
