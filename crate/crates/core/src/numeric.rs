//! Root bracketing, quadrature and grids shared by the engines.

use thiserror::Error;

/// Bisection stops once the bracket is narrower than this, relative to `1 + |x|`.
pub const BISECTION_REL_TOL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 60;

/// Absolute tolerance per quadrature panel.
pub const SIMPSON_TOL: f64 = 1e-10;
pub const SIMPSON_MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError<E> {
    #[error("target {target} outside the bracketed range [{lo}, {hi}]")]
    OutOfRange { target: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Eval(E),
}

/// `n` evenly spaced points from `lo` to `hi` inclusive; the last point is
/// exactly `hi`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Solve `f(x) = target` for monotone `f` on `[lo, hi]` by bisection.
///
/// The bracket is validated from the endpoint values, so `f` may be
/// increasing or decreasing. Endpoint hits are returned exactly.
pub fn solve_monotone<E, F>(mut f: F, lo: f64, hi: f64, target: f64) -> Result<f64, RootError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let f_lo = f(lo).map_err(RootError::Eval)? - target;
    let f_hi = f(hi).map_err(RootError::Eval)? - target;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::OutOfRange {
            target,
            lo: (f_lo + target).min(f_hi + target),
            hi: (f_lo + target).max(f_hi + target),
        });
    }
    let increasing = f_hi > f_lo;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= BISECTION_REL_TOL * (1.0 + mid.abs()) || mid == a || mid == b {
            return Ok(mid);
        }
        let v = f(mid).map_err(RootError::Eval)? - target;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Adaptive Simpson quadrature of a fallible integrand.
pub fn adaptive_simpson<E, F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<E, F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Parse `lo:hi`.
pub fn parse_interval(s: &str) -> Option<(f64, f64)> {
    let mut it = s.split(':');
    let lo = it.next()?.trim().parse().ok()?;
    let hi = it.next()?.trim().parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((lo, hi))
}

/// Parse `lo:hi:n`.
pub fn parse_grid(s: &str) -> Option<(f64, f64, usize)> {
    let mut it = s.split(':');
    let lo = it.next()?.trim().parse().ok()?;
    let hi = it.next()?.trim().parse().ok()?;
    let n = it.next()?.trim().parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((lo, hi, n))
}
