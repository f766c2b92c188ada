//! Sylvester resultants, discriminants and variable elimination.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::mpoly::MPoly;
use super::poly::{CPoly, C64};
use crate::error::{Error, Result};

/// Sylvester matrix of `p` (degree `m`) and `q` (degree `n`) at the given
/// nominal degrees, rows holding descending coefficients.
fn sylvester(p: &[C64], q: &[C64]) -> DMatrix<C64> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut s = DMatrix::<C64>::zeros(size, size);
    for row in 0..n {
        for (k, c) in p.iter().rev().enumerate() {
            s[(row, row + k)] = *c;
        }
    }
    for row in 0..m {
        for (k, c) in q.iter().rev().enumerate() {
            s[(n + row, row + k)] = *c;
        }
    }
    s
}

/// Determinant together with the Hadamard bound of the matrix, used to decide
/// whether a computed zero is a true zero.
fn det_with_bound(s: DMatrix<C64>) -> (C64, f64) {
    if s.nrows() == 0 {
        return (C64::new(1.0, 0.0), 1.0);
    }
    let bound: f64 = s.row_iter().map(|r| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()).product();
    (s.determinant(), bound)
}

/// Resultant at the stated nominal degrees (leading coefficients may vanish).
pub(crate) fn resultant_nominal(p: &[C64], q: &[C64]) -> (C64, f64) {
    det_with_bound(sylvester(p, q))
}

/// Resultant of two polynomials at their effective degrees.
pub fn resultant(p: &CPoly, q: &CPoly) -> Result<C64> {
    let rel = 1e-14;
    let dp = p.effective_degree(rel).ok_or(Error::IdenticallyZero)?;
    let dq = q.effective_degree(rel).ok_or(Error::IdenticallyZero)?;
    if dp == 0 && dq == 0 {
        return Err(Error::BothConstant);
    }
    let (r, _) = resultant_nominal(&p.coeffs()[..=dp], &q.coeffs()[..=dq]);
    Ok(r)
}

/// Discriminant of the binary form of nominal degree `n`:
/// `(-1)^(n(n-1)/2) Res(p, p') / a_n`.
///
/// A vanishing leading coefficient is handled projectively: the form is moved
/// by a shift and a reversal (both preserve the discriminant) until the new
/// leading coefficient is well away from zero, so a degree drop alone never
/// produces a spurious zero.
pub fn discriminant(p: &CPoly) -> Result<C64> {
    let n = p.nominal_degree();
    if n < 2 {
        return Err(Error::DegreeTooLow { needed: 2, got: n });
    }
    let scale = p.max_abs_coeff();
    if scale == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let form = if p.leading().norm() >= 0.1 * scale {
        p.clone()
    } else {
        let candidates = [
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
            C64::new(0.5, 0.5),
            C64::new(-0.7, 0.3),
            C64::new(2.0, -1.0),
        ];
        let best = candidates
            .iter()
            .copied()
            .max_by(|a, b| {
                let wa = p.eval(*a).norm() / (1.0 + a.norm()).powi(n as i32);
                let wb = p.eval(*b).norm() / (1.0 + b.norm()).powi(n as i32);
                wa.partial_cmp(&wb).unwrap()
            })
            .unwrap();
        let moved = p.shifted(best).reversed();
        if moved.leading().norm() <= p.leading().norm() {
            p.clone()
        } else {
            moved
        }
    };
    let lead = form.leading();
    if lead.norm() == 0.0 {
        // Leading and all candidate values vanish: a multiple root at infinity.
        return Ok(C64::new(0.0, 0.0));
    }
    let d = form.derivative();
    let (res, _) = resultant_nominal(form.coeffs(), d.coeffs());
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(res * sign / lead)
}

/// Degree bound of `Res_var(p, q)` in each remaining variable.
fn resultant_degree_bounds(p: &MPoly, q: &MPoly, var: usize) -> Vec<usize> {
    let dp = p.degree_in(var) as usize;
    let dq = q.degree_in(var) as usize;
    (0..p.nvars())
        .map(|j| {
            if j == var {
                0
            } else {
                dp * q.degree_in(j) as usize + dq * p.degree_in(j) as usize
            }
        })
        .collect()
}

/// Result of an elimination step, with the certificate that it is not
/// numerically identically zero.
pub struct Eliminated {
    pub poly: MPoly,
    /// False when every sampled Sylvester determinant was negligible relative
    /// to its Hadamard bound.
    pub nontrivial: bool,
}

/// `Res_var(p, q)` as a polynomial in the remaining variables (the eliminated
/// variable is kept in the variable list with degree zero).
///
/// Computed by evaluation at roots of unity on a tensor grid followed by an
/// inverse discrete Fourier transform along each remaining variable.
pub fn eliminate(p: &MPoly, q: &MPoly, var: usize) -> Result<Eliminated> {
    assert_eq!(p.vars(), q.vars());
    if p.is_zero() || q.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    if p.degree_in(var) == 0 && q.degree_in(var) == 0 {
        return Err(Error::BothConstant);
    }
    let nv = p.nvars();
    let bounds = resultant_degree_bounds(p, q, var);
    let sizes: Vec<usize> = bounds.iter().map(|b| b + 1).collect();
    let total: usize = sizes.iter().product();
    if total > 200_000 {
        return Err(Error::DegreeCap(format!("elimination grid of {total} samples")));
    }

    let mut values = vec![C64::new(0.0, 0.0); total];
    let mut nontrivial = false;
    let mut idx = vec![0usize; nv];
    for slot in values.iter_mut() {
        let point: Vec<C64> = (0..nv)
            .map(|j| {
                if j == var {
                    C64::new(0.0, 0.0)
                } else {
                    C64::from_polar(1.0, TAU * idx[j] as f64 / sizes[j] as f64)
                }
            })
            .collect();
        let up = p.to_univariate(var, &point);
        let uq = q.to_univariate(var, &point);
        let (det, bound) = resultant_nominal(up.coeffs(), uq.coeffs());
        if det.norm() > 1e-10 * bound {
            nontrivial = true;
        }
        *slot = det;
        // Advance the multi-index (last variable fastest).
        for j in (0..nv).rev() {
            idx[j] += 1;
            if idx[j] < sizes[j] {
                break;
            }
            idx[j] = 0;
        }
    }

    // Inverse DFT along each axis in turn.
    let mut strides = vec![1usize; nv];
    for j in (0..nv.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * sizes[j + 1];
    }
    for axis in 0..nv {
        let n = sizes[axis];
        if n == 1 {
            continue;
        }
        let stride = strides[axis];
        let mut line = vec![C64::new(0.0, 0.0); n];
        for base in 0..total {
            if (base / stride) % n != 0 {
                continue;
            }
            for (k, l) in line.iter_mut().enumerate() {
                *l = values[base + k * stride];
            }
            for e in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, l) in line.iter().enumerate() {
                    acc += l * C64::from_polar(1.0, -TAU * (e * k) as f64 / n as f64);
                }
                values[base + e * stride] = acc / n as f64;
            }
        }
    }

    let names: Vec<&str> = p.vars().iter().map(String::as_str).collect();
    let mut out = MPoly::zero(&names);
    let mut idx = vec![0usize; nv];
    for v in &values {
        out.add_term(idx.iter().map(|&k| k as u32).collect(), *v);
        for j in (0..nv).rev() {
            idx[j] += 1;
            if idx[j] < sizes[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    Ok(Eliminated { poly: out.pruned(1e-12), nontrivial })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn resultant_examples() {
        let r = resultant(&CPoly::from_real(&[-1.0, 1.0]), &CPoly::from_real(&[1.0, 1.0])).unwrap();
        assert!((r - c(2.0, 0.0)).norm() < 1e-14);
        let r = resultant(&CPoly::from_real(&[-1.0, 0.0, 1.0]), &CPoly::from_real(&[-1.0, 1.0])).unwrap();
        assert!(r.norm() < 1e-14);
        assert_eq!(
            resultant(&CPoly::from_real(&[2.0]), &CPoly::from_real(&[3.0])),
            Err(Error::BothConstant)
        );
    }

    #[test]
    fn resultant_matches_root_product() {
        // Res(p, q) = a_m^n prod q(alpha_i)
        let alphas = [c(0.3, 1.0), c(-1.2, 0.4), c(2.0, -0.5)];
        let p = CPoly::from_roots(&alphas).scale(c(2.0, 1.0));
        let q = CPoly::new(vec![c(1.0, 0.0), c(0.5, -0.5), c(-0.25, 1.0)]);
        let expect = c(2.0, 1.0).powu(2) * alphas.iter().map(|&a| q.eval(a)).product::<C64>();
        let got = resultant(&p, &q).unwrap();
        assert!((got - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn discriminant_quadratic() {
        let d = discriminant(&CPoly::from_real(&[-1.0, 0.0, 1.0])).unwrap();
        assert!((d - c(4.0, 0.0)).norm() < 1e-14);
        let sq = CPoly::from_roots(&[c(0.7, -0.2), c(0.7, -0.2)]);
        assert!(discriminant(&sq).unwrap().norm() < 1e-14);
        assert!(matches!(discriminant(&CPoly::from_real(&[1.0, 1.0])), Err(Error::DegreeTooLow { .. })));
    }

    #[test]
    fn discriminant_survives_degree_drop() {
        // 0*G^2 + 2G + 0 has b^2 - 4ac = 4.
        let d = discriminant(&CPoly::from_real(&[0.0, 2.0, 0.0])).unwrap();
        assert!((d - c(4.0, 0.0)).norm() < 1e-13, "{d}");
        // Double root at infinity.
        let d = discriminant(&CPoly::from_real(&[1.0, 0.0, 0.0])).unwrap();
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn discriminant_matches_root_formula_cubic() {
        let roots = [c(1.0, 0.0), c(-0.5, 0.3), c(0.2, -1.1)];
        let p = CPoly::from_roots(&roots);
        let mut expect = c(1.0, 0.0);
        for i in 0..3 {
            for j in i + 1..3 {
                expect *= (roots[i] - roots[j]).powu(2);
            }
        }
        let got = discriminant(&p).unwrap();
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn eliminate_circle_and_line() {
        let vars = ["x", "y"];
        let p = MPoly::parse("x^2 + y^2 - 1", &vars).unwrap();
        let q = MPoly::parse("y - x", &vars).unwrap();
        let e = eliminate(&p, &q, 1).unwrap();
        assert!(e.nontrivial);
        // Hand elimination: substitute y = x -> 2x^2 - 1.
        let u = e.poly.to_univariate(0, &[c(0.0, 0.0), c(0.0, 0.0)]);
        let expect = CPoly::from_real(&[-1.0, 0.0, 2.0]);
        let k = u.coeffs()[2] / expect.coeffs()[2];
        let diff = &u - &expect.scale(k);
        assert!(diff.max_abs_coeff() < 1e-12, "{u}");
    }

    #[test]
    fn eliminate_flags_common_factor() {
        let vars = ["x", "y"];
        let p = MPoly::parse("(x - y)*(x + 1)", &vars).unwrap();
        let q = MPoly::parse("(x - y)*(y - 2)", &vars).unwrap();
        let e = eliminate(&p, &q, 1).unwrap();
        assert!(!e.nontrivial);
    }
}
