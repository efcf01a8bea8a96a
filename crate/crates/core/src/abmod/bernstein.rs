//! Bernstein polynomials: polynomials of `−b⁻¹a` acting on `E♯ / bE♯`.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::abmod::saturate::saturate;
use crate::abmod::ModulePresentation;
use crate::error::{Error, Result};
use crate::linalg::{largest_block, QMatrix, QPoly};
use crate::series::Rational;

/// A monic polynomial `Π (x − r)` stored by its roots, largest first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BernsteinPolynomial {
    roots: Vec<Rational>,
}

impl BernsteinPolynomial {
    pub fn from_roots(mut roots: Vec<Rational>) -> Self {
        roots.sort_by(|a, b| b.cmp(a));
        BernsteinPolynomial { roots }
    }

    pub fn one() -> Self {
        BernsteinPolynomial { roots: Vec::new() }
    }

    pub fn roots(&self) -> &[Rational] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn poly(&self) -> QPoly {
        QPoly::from_roots(&self.roots)
    }

    /// Distinct roots with multiplicities, largest first.
    pub fn multiplicities(&self) -> Vec<(Rational, usize)> {
        let mut out: Vec<(Rational, usize)> = Vec::new();
        for r in &self.roots {
            match out.last_mut() {
                Some((x, m)) if x == r => *m += 1,
                _ => out.push((r.clone(), 1)),
            }
        }
        out
    }

    pub fn multiplicity(&self, r: &Rational) -> usize {
        self.roots.iter().filter(|x| *x == r).count()
    }

    /// `B(x + s)`, whose roots are those of `B` minus `s`.
    pub fn substitute_shift(&self, s: &Rational) -> Self {
        Self::from_roots(self.roots.iter().map(|r| r - s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_roots(self.roots.iter().chain(&other.roots).cloned().collect())
    }

    /// Least common multiple.
    pub fn lcm(&self, other: &Self) -> Self {
        let mut roots = Vec::new();
        let mut all: Vec<Rational> = self.roots.iter().chain(&other.roots).cloned().collect();
        all.sort();
        all.dedup();
        for r in all {
            let m = self.multiplicity(&r).max(other.multiplicity(&r));
            roots.extend(std::iter::repeat_n(r, m));
        }
        Self::from_roots(roots)
    }

    pub fn max_root(&self) -> Option<&Rational> {
        self.roots.first()
    }

    pub fn has_simple_roots(&self) -> bool {
        self.multiplicities().iter().all(|(_, m)| *m == 1)
    }
}

impl fmt::Display for BernsteinPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.roots.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .multiplicities()
            .iter()
            .map(|(r, m)| {
                let lin = if r.is_zero() {
                    "x".to_string()
                } else if r.is_negative() {
                    format!("(x + {})", -r)
                } else {
                    format!("(x - {r})")
                };
                if *m == 1 {
                    lin
                } else {
                    format!("{lin}^{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(""))
    }
}

impl fmt::Debug for BernsteinPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The residue `F♯_0` of the saturation.
pub fn saturated_residue(e: &ModulePresentation) -> Result<QMatrix> {
    let sat = saturate(e)?;
    Ok(sat.module.amat().coeff(1).clone())
}

fn spectrum_of_negative(m: &QMatrix) -> Result<Vec<(Rational, usize)>> {
    let neg = -m;
    crate::linalg::eigenvalues(&neg)
        .map_err(|d| Error::NonGeometric(format!("{d} Bernstein roots are not rational")))
}

/// Minimal polynomial of `−b⁻¹a` on `E♯/bE♯`.
pub fn bernstein_min(e: &ModulePresentation) -> Result<BernsteinPolynomial> {
    let f0 = saturated_residue(e)?;
    let neg = -&f0;
    let mut roots = Vec::new();
    for (r, _) in spectrum_of_negative(&f0)? {
        let m = largest_block(&neg, &r);
        roots.extend(std::iter::repeat_n(r, m));
    }
    Ok(BernsteinPolynomial::from_roots(roots))
}

/// Characteristic polynomial of `−b⁻¹a` on `E♯/bE♯`.
pub fn bernstein_char(e: &ModulePresentation) -> Result<BernsteinPolynomial> {
    let f0 = saturated_residue(e)?;
    let mut roots = Vec::new();
    for (r, m) in spectrum_of_negative(&f0)? {
        roots.extend(std::iter::repeat_n(r, m));
    }
    Ok(BernsteinPolynomial::from_roots(roots))
}

/// `x + λ`.
pub fn linear(lambda: &Rational) -> BernsteinPolynomial {
    BernsteinPolynomial::from_roots(vec![-lambda.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat};

    #[test]
    fn rank_one_and_xi() {
        let e = ModulePresentation::e_lambda(&rat(2, 3), 8);
        assert_eq!(bernstein_min(&e).unwrap(), linear(&rat(2, 3)));
        let xi = ModulePresentation::xi(&rat(1, 2), 2, 8);
        assert_eq!(
            bernstein_min(&xi).unwrap().roots(),
            &[rat(-1, 2), rat(-1, 2), rat(-1, 2)]
        );
        let d = ModulePresentation::e_lambda(&rat(1, 2), 8)
            .direct_sum(&ModulePresentation::e_lambda(&rat(1, 2), 8));
        assert_eq!(bernstein_min(&d).unwrap(), linear(&rat(1, 2)));
        assert_eq!(bernstein_char(&d).unwrap().degree(), 2);
    }

    #[test]
    fn display() {
        let b = BernsteinPolynomial::from_roots(vec![rat(-1, 2), rat(-1, 2), int(0), int(2)]);
        assert_eq!(b.to_string(), "(x - 2)x(x + 1/2)^2");
    }
}
