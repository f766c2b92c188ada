use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Univariate complex polynomial, coefficients in ascending degree.
///
/// The stored length fixes the *nominal* degree of the family the polynomial
/// belongs to. A vanishing leading coefficient is kept so that root finders
/// can report the lost roots as roots at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            return Self { coeffs: vec![C64::new(0.0, 0.0)] };
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `x - root`.
    pub fn linear_factor(root: C64) -> Self {
        Self { coeffs: vec![-root, C64::new(1.0, 0.0)] }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(C64::new(1.0, 0.0)), |acc, &r| &acc * &Self::linear_factor(r))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    /// Degree after discarding leading coefficients below `rel * max|coeff|`.
    /// Returns `None` for the zero polynomial.
    pub fn effective_degree(&self, rel: f64) -> Option<usize> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > rel * scale)
    }

    /// Copy with negligible leading coefficients removed.
    pub fn trimmed(&self, rel: f64) -> Self {
        match self.effective_degree(rel) {
            Some(d) => Self { coeffs: self.coeffs[..=d].to_vec() },
            None => Self::constant(C64::new(0.0, 0.0)),
        }
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().expect("non-empty")
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Value and first derivative by Horner.
    pub fn eval_with_derivative(&self, x: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(C64::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Taylor shift: `q(x) = p(x + s)`.
    pub fn shifted(&self, s: C64) -> Self {
        let mut out = self.coeffs.clone();
        let n = out.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = out[j + 1];
                out[j] += s * next;
            }
        }
        Self::new(out)
    }

    /// Coefficient reversal at nominal degree: `x^n p(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Relative coefficient distance after normalising both to unit max-norm.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let sa = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        let sb = other.max_abs_coeff().max(f64::MIN_POSITIVE);
        (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or_default() / sa;
                let b = other.coeffs.get(k).copied().unwrap_or_default() / sb;
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(1.0);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    pub(crate) fn require_nonzero(&self) -> Result<()> {
        if self.max_abs_coeff() == 0.0 {
            Err(Error::IdenticallyZero)
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            match k {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_default()
                        + rhs.coeffs.get(k).copied().unwrap_or_default()
                })
                .collect(),
        )
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        self + &(-rhs)
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn horner_and_derivative() {
        let p = CPoly::from_real(&[1.0, -3.0, 0.0, 2.0]);
        let (v, d) = p.eval_with_derivative(c(2.0, 0.0));
        assert_eq!(v, c(11.0, 0.0));
        assert_eq!(d, c(21.0, 0.0));
        assert_eq!(p.derivative().eval(c(2.0, 0.0)), d);
    }

    #[test]
    fn shift_matches_substitution() {
        let p = CPoly::new(vec![c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 1.0), c(3.0, 0.0)]);
        let s = c(0.3, -0.7);
        let q = p.shifted(s);
        for x in [c(0.0, 0.0), c(1.0, 1.0), c(-2.0, 0.5)] {
            assert!((q.eval(x) - p.eval(x + s)).norm() < 1e-12);
        }
    }

    #[test]
    fn effective_degree_trims_tiny_leading() {
        let p = CPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-15, 0.0)]);
        assert_eq!(p.nominal_degree(), 2);
        assert_eq!(p.effective_degree(1e-12), Some(1));
        assert_eq!(CPoly::from_real(&[0.0, 0.0]).effective_degree(1e-12), None);
    }

    #[test]
    fn from_roots_expands() {
        let p = CPoly::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(p.coeffs(), &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }
}
