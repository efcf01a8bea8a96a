//! Dense exact linear algebra over the rationals and univariate polynomials.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::series::{int, Rational};

/// Dense rational matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Rational::one())
    }

    pub fn scalar(n: usize, c: Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, c) in d.iter().enumerate() {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let v: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        Self::from_rows(&v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::identity(self.rows), |acc, _| &acc * self)
    }

    /// Kronecker product with index `i·other.rows + k`.
    pub fn kron(&self, other: &QMatrix) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            &self[(i / other.rows, j / other.cols)] * &other[(i % other.rows, j % other.cols)]
        })
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Rational::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, y) in out.iter_mut().zip(self.row(i)) {
                if !y.is_zero() {
                    *o += x * y;
                }
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        if !m[(r, j)].is_zero() {
                            let v = &m[(i, j)] - &f * &m[(r, j)];
                            m[(i, j)] = v;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &piv;
                    for j in c..n {
                        let v = &m[(i, j)] - &f * &m[(c, j)];
                        m[(i, j)] = v;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &QMatrix::identity(n));
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.submatrix(&idx, &cols))
    }

    /// Basis of `{x : A x = 0}` as column vectors.
    pub fn right_kernel(&self) -> Vec<Vec<Rational>> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in piv.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Basis of `{x : x A = 0}` as row vectors.
    pub fn left_kernel(&self) -> Vec<Vec<Rational>> {
        self.transpose().right_kernel()
    }

    /// Some `x` with `A x = rhs`, when one exists.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (i, v) in rhs.iter().enumerate() {
            aug[(i, self.cols)] = v.clone();
        }
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in piv.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Some `x` with `x A = rhs`, when one exists.
    pub fn solve_left(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        self.transpose().solve(rhs)
    }

    /// Characteristic polynomial `det(x − A)` by the Faddeev–LeVerrier recursion.
    pub fn charpoly(&self) -> QPoly {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = QMatrix::zeros(n, n);
        for k in 1..=n {
            let mut am = self * &m;
            for i in 0..n {
                let v = &am[(i, i)] + &coeffs[n - k + 1];
                am[(i, i)] = v;
            }
            m = am;
            let tr = (0..n).fold(Rational::zero(), |acc, i| acc + (self * &m)[(i, i)].clone());
            coeffs[n - k] = -tr / int(k as i64);
        }
        QPoly::new(coeffs)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shapes differ");
        let (r, m, c) = (self.rows, self.cols, rhs.cols);
        let dl: Vec<BigInt> = (0..r)
            .map(|i| {
                self.row(i)
                    .iter()
                    .fold(BigInt::one(), |d, x| d.lcm(x.denom()))
            })
            .collect();
        let dr: Vec<BigInt> = (0..c)
            .map(|j| (0..m).fold(BigInt::one(), |d, k| d.lcm(rhs[(k, j)].denom())))
            .collect();
        let mut acc = vec![BigInt::zero(); r * c];
        for i in 0..r {
            for k in 0..m {
                let x = &self[(i, k)];
                if x.is_zero() {
                    continue;
                }
                let x = x.numer() * (&dl[i] / x.denom());
                for j in 0..c {
                    let y = &rhs[(k, j)];
                    if !y.is_zero() {
                        acc[i * c + j] += &x * (y.numer() * (&dr[j] / y.denom()));
                    }
                }
            }
        }
        QMatrix::from_fn(r, c, |i, j| {
            let x = &acc[i * c + j];
            if x.is_zero() {
                int(0)
            } else {
                Rational::new(x.clone(), &dl[i] * &dr[j])
            }
        })
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Solves `A X + X B = C` for `X`; `None` when the operator is singular.
pub fn sylvester(a: &QMatrix, b: &QMatrix, c: &QMatrix) -> Option<QMatrix> {
    let (p, q) = (a.rows(), b.rows());
    assert_eq!((c.rows(), c.cols()), (p, q));
    let mut m = QMatrix::zeros(p * q, p * q);
    for i in 0..p {
        for j in 0..q {
            let r = i * q + j;
            for k in 0..p {
                let v = &m[(r, k * q + j)] + &a[(i, k)];
                m[(r, k * q + j)] = v;
            }
            for k in 0..q {
                let v = &m[(r, i * q + k)] + &b[(k, j)];
                m[(r, i * q + k)] = v;
            }
        }
    }
    let rhs: Vec<Rational> = (0..p * q).map(|r| c[(r / q, r % q)].clone()).collect();
    if m.rank() < p * q {
        return None;
    }
    let x = m.solve(&rhs)?;
    Some(QMatrix::from_fn(p, q, |i, j| x[i * q + j].clone()))
}

/// Rank of the row span of a family of vectors.
pub fn span_rank(vectors: &[Vec<Rational>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = QMatrix::from_rows(vectors);
    debug_assert_eq!(m.cols(), dim);
    m.rank()
}

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly {
            coeffs: vec![Rational::one()],
        }
    }

    /// `x − r`.
    pub fn linear(r: &Rational) -> Self {
        QPoly::new(vec![-r.clone(), Rational::one()])
    }

    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a Rational>) -> Self {
        roots
            .into_iter()
            .fold(QPoly::one(), |acc, r| &acc * &QPoly::linear(r))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * int(j as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        QPoly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    /// `p(x + s)`.
    pub fn shift(&self, s: &Rational) -> Self {
        let xs = QPoly::new(vec![s.clone(), Rational::one()]);
        self.coeffs.iter().rev().fold(QPoly::zero(), |acc, c| {
            &(&acc * &xs) + &QPoly::new(vec![c.clone()])
        })
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let lead = d.leading();
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Primitive integer multiple with positive leading coefficient.
    fn primitive_integer(&self) -> Vec<BigInt> {
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(Signed::is_negative) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        ints.iter().map(|c| c / &g * &sign).collect()
    }

    /// Rational roots with multiplicities, sorted descending, plus the degree left unfactored.
    pub fn rational_roots(&self) -> (Vec<(Rational, usize)>, usize) {
        let Some(deg) = self.degree() else {
            return (Vec::new(), 0);
        };
        if deg == 0 {
            return (Vec::new(), 0);
        }
        let sqf = self.div_rem(&self.gcd(&self.derivative())).0.monic();
        let mut found: Vec<Rational> = Vec::new();
        let mut rest = sqf.clone();
        for r in numeric_candidates(&sqf) {
            if !found.contains(&r) && rest.eval(&r).is_zero() {
                rest = rest.div_rem(&QPoly::linear(&r)).0;
                found.push(r);
            }
        }
        if rest.degree().unwrap_or(0) > 0 {
            for r in divisor_candidates(&rest) {
                if !found.contains(&r) && rest.eval(&r).is_zero() {
                    rest = rest.div_rem(&QPoly::linear(&r)).0;
                    found.push(r);
                }
            }
        }
        let mut out: Vec<(Rational, usize)> = found
            .into_iter()
            .map(|r| {
                let lin = QPoly::linear(&r);
                let mut p = self.clone();
                let mut m = 0;
                loop {
                    let (q, rem) = p.div_rem(&lin);
                    if !rem.is_zero() {
                        break;
                    }
                    p = q;
                    m += 1;
                }
                (r, m)
            })
            .collect();
        out.sort_by(|a, b| b.0.cmp(&a.0));
        let covered: usize = out.iter().map(|(_, m)| m).sum();
        (out, deg - covered)
    }
}

fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Candidate rational roots read off a numerical root approximation.
fn numeric_candidates(p: &QPoly) -> Vec<Rational> {
    let ints = p.primitive_integer();
    let lead = ints.last().cloned().unwrap_or_else(BigInt::one);
    let dens: Vec<BigInt> = match lead.to_u64() {
        Some(l) if l <= 1_000_000 => divisors(l).into_iter().map(BigInt::from).collect(),
        _ => vec![BigInt::one()],
    };
    let mut out = Vec::new();
    for z in durand_kerner(p) {
        if !z.re.is_finite() || z.im.abs() > 1e-3 * (1.0 + z.re.abs()) {
            continue;
        }
        for q in &dens {
            let scaled = z.re * q.to_f64().unwrap_or(1.0);
            if scaled.abs() > 1e15 {
                continue;
            }
            let num = BigInt::from(scaled.round() as i64);
            out.push(Rational::new(num, q.clone()));
        }
    }
    out
}

fn durand_kerner(p: &QPoly) -> Vec<Complex64> {
    let monic = p.monic();
    let c: Vec<f64> = monic.coeffs.iter().map(to_f64).collect();
    let n = c.len() - 1;
    if n == 0 || c.iter().any(|x| !x.is_finite()) {
        return Vec::new();
    }
    let eval = |z: Complex64| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k)
    };
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32) * radius.min(1e6))
        .collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    z
}

fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return vec![1];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Exhaustive rational-root-theorem candidates when the coefficients are small enough.
fn divisor_candidates(p: &QPoly) -> Vec<Rational> {
    let ints = p.primitive_integer();
    let mut out = vec![Rational::zero()];
    let first = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let (Some(c0), Some(cn)) = (
        ints[first].abs().to_u64(),
        ints.last().and_then(|c| c.abs().to_u64()),
    ) else {
        return out;
    };
    if c0 > 1_000_000_000_000 || cn > 1_000_000_000_000 {
        return out;
    }
    for num in divisors(c0) {
        for den in divisors(cn) {
            let r = Rational::new(BigInt::from(num), BigInt::from(den));
            out.push(r.clone());
            out.push(-r);
        }
    }
    out
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
                        + rhs.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in rhs.coeffs.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        QPoly::new(out)
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("({c})x^{j}"))
            .collect();
        write!(
            f,
            "{}",
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        )
    }
}

/// Distinct eigenvalues with algebraic multiplicities; `Err(d)` when `d` eigenvalues are irrational.
pub fn eigenvalues(a: &QMatrix) -> Result<Vec<(Rational, usize)>, usize> {
    let (roots, rest) = a.charpoly().rational_roots();
    if rest > 0 {
        Err(rest)
    } else {
        Ok(roots)
    }
}

/// Size of the largest Jordan block of `a` at `lambda`.
pub fn largest_block(a: &QMatrix, lambda: &Rational) -> usize {
    let n = a.rows();
    let shifted = a - &QMatrix::scalar(n, lambda.clone());
    let mut p = QMatrix::identity(n);
    let mut prev = n;
    for s in 0..=n {
        if s > 0 {
            p = &p * &shifted;
        }
        let r = p.rank();
        if s > 0 && r == prev {
            return s - 1;
        }
        prev = r;
    }
    n
}

/// Jordan chains of a nilpotent matrix acting on row vectors.
///
/// Each chain `[h_0, …, h_{l−1}]` satisfies `h_{j−1} = h_j N` and `h_0 N = 0`;
/// chains are listed longest first and together form a basis.
pub fn nilpotent_chains(n: &QMatrix) -> Vec<Vec<Vec<Rational>>> {
    let dim = n.rows();
    let mut kernels: Vec<Vec<Vec<Rational>>> = vec![Vec::new()];
    let mut p = QMatrix::identity(dim);
    loop {
        p = &p * n;
        let k = p.left_kernel();
        let full = k.len() == dim;
        kernels.push(k);
        if full {
            break;
        }
        assert!(kernels.len() <= dim + 1, "matrix is not nilpotent");
    }
    let top = kernels.len() - 1;
    let mut tops: Vec<(usize, Vec<Rational>)> = Vec::new();
    for s in (1..=top).rev() {
        let mut span: Vec<Vec<Rational>> = kernels[s - 1].clone();
        for (level, x) in &tops {
            let mut v = x.clone();
            for _ in 0..level - s {
                v = n.left_apply(&v);
            }
            span.push(v);
        }
        let mut r = span_rank(&span, dim);
        for cand in &kernels[s] {
            span.push(cand.clone());
            let r2 = span_rank(&span, dim);
            if r2 > r {
                r = r2;
                tops.push((s, cand.clone()));
            } else {
                span.pop();
            }
        }
    }
    tops.into_iter()
        .map(|(level, x)| {
            let mut chain = vec![x];
            for _ in 1..level {
                let next = n.left_apply(chain.last().expect("nonempty chain"));
                chain.push(next);
            }
            chain.reverse();
            chain
        })
        .collect()
}

/// `p(M)` by Horner's scheme.
pub fn eval_at_matrix(p: &QPoly, m: &QMatrix) -> QMatrix {
    let n = m.rows();
    let mut acc = QMatrix::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * m) + &QMatrix::scalar(n, c.clone());
    }
    acc
}

/// `M = S + N` with `S` semisimple, `N` nilpotent and `SN = NS`.
///
/// Newton iteration `S ← S − p(S)p'(S)⁻¹` on the squarefree part `p` of the
/// characteristic polynomial; no eigenvalues are needed.
pub fn jordan_chevalley(m: &QMatrix) -> (QMatrix, QMatrix) {
    let cp = m.charpoly();
    let p = cp.div_rem(&cp.gcd(&cp.derivative())).0;
    let dp = p.derivative();
    let mut s = m.clone();
    loop {
        let ps = eval_at_matrix(&p, &s);
        if ps.is_zero() {
            break;
        }
        let inv = eval_at_matrix(&dp, &s)
            .inverse()
            .expect("p' is invertible at a Newton iterate");
        s = &s - &(&ps * &inv);
    }
    let n = m - &s;
    (s, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn jordan_chevalley_of_a_jordan_block() {
        let m = QMatrix::from_rows(&[
            vec![rat(1, 2), int(1), int(0)],
            vec![int(0), rat(1, 2), int(0)],
            vec![int(0), int(0), int(3)],
        ]);
        let (s, n) = jordan_chevalley(&m);
        assert_eq!(s, QMatrix::diagonal(&[rat(1, 2), rat(1, 2), int(3)]));
        assert_eq!(&n * &n, QMatrix::zeros(3, 3));
    }

    #[test]
    fn charpoly_and_roots() {
        let a = QMatrix::from_rows(&[
            vec![rat(1, 2), int(1), int(0)],
            vec![int(0), rat(1, 2), int(0)],
            vec![int(0), int(0), rat(-7, 3)],
        ]);
        let cp = a.charpoly();
        assert_eq!(cp, QPoly::from_roots(&[rat(1, 2), rat(1, 2), rat(-7, 3)]));
        let (roots, rest) = cp.rational_roots();
        assert_eq!(rest, 0);
        assert_eq!(roots, vec![(rat(1, 2), 2), (rat(-7, 3), 1)]);
        assert_eq!(largest_block(&a, &rat(1, 2)), 2);
        assert_eq!(largest_block(&a, &rat(-7, 3)), 1);
    }

    #[test]
    fn irrational_roots_are_reported() {
        let p = QPoly::new(vec![int(-2), int(0), int(1)]);
        assert_eq!(p.rational_roots(), (Vec::new(), 2));
        let q = &p * &QPoly::linear(&rat(3, 5));
        assert_eq!(q.rational_roots(), (vec![(rat(3, 5), 1)], 2));
    }

    #[test]
    fn inverse_and_kernels() {
        let a = QMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, QMatrix::identity(2));
        let s = QMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(s.inverse().is_none());
        assert_eq!(s.det(), int(0));
        let k = s.left_kernel();
        assert_eq!(k.len(), 1);
        assert!(s.left_apply(&k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn sylvester_solution() {
        let a = QMatrix::from_ints(&[&[1, 1], &[0, 1]]);
        let b = QMatrix::from_ints(&[&[3]]);
        let c = QMatrix::from_ints(&[&[1], &[2]]);
        let x = sylvester(&a, &b, &c).unwrap();
        assert_eq!(&(&a * &x) + &(&x * &b), c);
        assert!(sylvester(&a, &QMatrix::from_ints(&[&[-1]]), &c).is_none());
    }

    #[test]
    fn chains_of_nilpotent() {
        let n = QMatrix::from_ints(&[&[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 0]]);
        let chains = nilpotent_chains(&n);
        let lens: Vec<usize> = chains.iter().map(Vec::len).collect();
        assert_eq!(lens, vec![3, 1]);
        for ch in &chains {
            assert!(n.left_apply(&ch[0]).iter().all(Zero::is_zero));
            for j in 1..ch.len() {
                assert_eq!(n.left_apply(&ch[j]), ch[j - 1]);
            }
        }
    }

    #[test]
    fn polynomial_shift() {
        let p = QPoly::from_roots(&[int(1), int(2)]);
        assert_eq!(p.shift(&int(3)), QPoly::from_roots(&[int(-2), int(-1)]));
    }
}
