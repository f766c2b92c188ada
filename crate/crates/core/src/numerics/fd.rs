//! Central finite differences over spacetime points `[t, x, y, z]`.

use super::poly::C64;
use crate::error::{Error, Result};

pub type Point4 = [f64; 4];

fn shifted(x: &Point4, axis: usize, by: f64) -> Point4 {
    let mut p = *x;
    p[axis] += by;
    p
}

fn sample<F>(f: &F, p: Point4) -> Result<Vec<C64>>
where
    F: Fn(Point4) -> Result<Vec<C64>>,
{
    match f(p) {
        Ok(v) if v.iter().all(|c| c.is_finite()) => Ok(v),
        Ok(_) => Err(Error::Sampler { point: p, reason: "non-finite value".into() }),
        Err(e @ Error::Sampler { .. }) => Err(e),
        Err(e) => Err(Error::Sampler { point: p, reason: e.to_string() }),
    }
}

fn combine(a: &[C64], b: &[C64], ka: f64, kb: f64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x * ka + y * kb).collect()
}

fn central_first<F>(f: &F, x: &Point4, axis: usize, h: f64) -> Result<Vec<C64>>
where
    F: Fn(Point4) -> Result<Vec<C64>>,
{
    let plus = sample(f, shifted(x, axis, h))?;
    let minus = sample(f, shifted(x, axis, -h))?;
    Ok(combine(&plus, &minus, 0.5 / h, -0.5 / h))
}

/// Partial derivatives of a vector-valued sampler along each axis.
///
/// Plain central differences are exact for quadratics in each variable;
/// with `richardson` the `h` and `h/2` estimates are combined to cancel the
/// leading `O(h^2)` error term.
pub fn fd_jacobian<F>(f: F, x: &Point4, h: f64, richardson: bool) -> Result<[Vec<C64>; 4]>
where
    F: Fn(Point4) -> Result<Vec<C64>>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")));
    }
    let mut out: [Vec<C64>; 4] = Default::default();
    for (axis, slot) in out.iter_mut().enumerate() {
        let coarse = central_first(&f, x, axis, h)?;
        *slot = if richardson {
            let fine = central_first(&f, x, axis, 0.5 * h)?;
            combine(&fine, &coarse, 4.0 / 3.0, -1.0 / 3.0)
        } else {
            coarse
        };
    }
    Ok(out)
}

/// Gradient `(∂t, ∂x, ∂y, ∂z)` of a complex scalar field.
pub fn fd_gradient<F>(f: F, x: &Point4, h: f64, richardson: bool) -> Result<[C64; 4]>
where
    F: Fn(Point4) -> Result<C64>,
{
    let jac = fd_jacobian(|p| f(p).map(|v| vec![v]), x, h, richardson)?;
    Ok([jac[0][0], jac[1][0], jac[2][0], jac[3][0]])
}

fn central_second<F>(f: &F, x: &Point4, axis: usize, h: f64) -> Result<C64>
where
    F: Fn(Point4) -> Result<C64>,
{
    let wrap = |p: Point4| f(p).map(|v| vec![v]);
    let plus = sample(&wrap, shifted(x, axis, h))?[0];
    let mid = sample(&wrap, *x)?[0];
    let minus = sample(&wrap, shifted(x, axis, -h))?[0];
    Ok((plus - mid * 2.0 + minus) / (h * h))
}

/// Unmixed second derivatives along each axis.
pub fn fd_second<F>(f: F, x: &Point4, h: f64, richardson: bool) -> Result<[C64; 4]>
where
    F: Fn(Point4) -> Result<C64>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")));
    }
    let mut out = [C64::new(0.0, 0.0); 4];
    for (axis, slot) in out.iter_mut().enumerate() {
        let coarse = central_second(&f, x, axis, h)?;
        *slot = if richardson {
            let fine = central_second(&f, x, axis, 0.5 * h)?;
            (fine * 4.0 - coarse) / 3.0
        } else {
            coarse
        };
    }
    Ok(out)
}
