//! Supporting-slope fans, Young's inequality and its relatives, and the
//! order reversal of the transform.

use serde::Serialize;

use crate::curve::{convexity_classify, sample, Convexity, PiecewiseLinearFunction, SampledFunction};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::legendre::{sup_at, CatalogPair};
use crate::numeric::{adaptive_simpson, linspace, solve_monotone, RootError, SIMPSON_TOL};

/// Closed interval of supporting slopes; unbounded ends are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFan {
    pub lo: f64,
    pub hi: f64,
}

impl SlopeFan {
    pub fn is_single(&self) -> bool {
        self.lo == self.hi
    }
}

/// Slopes of all supporting lines of a convex piecewise-linear `f` at
/// `x0`: one slope inside a piece, the interval between the neighbouring
/// piece slopes at a breakpoint. A clipped end opens the fan to infinity.
pub fn support_fan(f: &PiecewiseLinearFunction, x0: f64) -> Result<SlopeFan> {
    if !f.is_convex() {
        return Err(Error::NonConvex("support fan needs a convex function".into()));
    }
    let (lo, hi) = f.domain();
    if !(x0 >= lo && x0 <= hi) {
        return Err(Error::OutsideDomain { x: x0 });
    }
    let bp = f.breakpoints();
    let seg = f.segment_slopes();
    let n = bp.len();
    // slope of the piece left of breakpoint i, and right of it
    let left_of = |i: usize| if i == 0 { f.left_slope().unwrap_or(f64::NEG_INFINITY) } else { seg[i - 1] };
    let right_of = |i: usize| if i + 1 == n { f.right_slope().unwrap_or(f64::INFINITY) } else { seg[i] };
    if let Some(i) = bp.iter().position(|p| p.0 == x0) {
        return Ok(SlopeFan {
            lo: left_of(i),
            hi: right_of(i),
        });
    }
    let s = if x0 < bp[0].0 {
        left_of(0)
    } else if x0 > bp[n - 1].0 {
        right_of(n - 1)
    } else {
        seg[bp.partition_point(|p| p.0 < x0) - 1]
    };
    Ok(SlopeFan { lo: s, hi: s })
}

/// `y(x) + d(m) - m x`, nonnegative for a convex pair and zero exactly
/// when `m = y'(x)`. For a concave pair the sign flips.
pub fn fenchel_young_gap(pair: &CatalogPair, x: f64, m: f64) -> Result<f64> {
    if !pair.x_domain().contains(x) {
        return Err(Error::OutsideDomain { x });
    }
    if !pair.m_domain().contains(m) {
        return Err(Error::OutsideDomain { x: m });
    }
    let y = pair.y().eval(x).map_err(|e| Error::domain(x, e))?;
    let d = pair.d().eval(m).map_err(|e| Error::domain(m, e))?;
    Ok(y + d - m * x)
}

/// Increasing `f` on `[0, c]` with `f(0) = 0`, and its inverse on
/// `[0, f(c)]`.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    f: Expression,
    c: f64,
    fc: f64,
}

const MONOTONE_SAMPLES: usize = 64;

impl YoungFunction {
    pub fn new(f: Expression, c: f64) -> Result<YoungFunction> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::ConstraintViolation(format!("need c > 0, got {c}")));
        }
        let f0 = f.eval(0.0).map_err(|e| Error::domain(0.0, e))?;
        if f0.abs() > 1e-12 {
            return Err(Error::ConstraintViolation(format!("need f(0) = 0, got {f0}")));
        }
        let mut prev = f0;
        for x in linspace(0.0, c, MONOTONE_SAMPLES).into_iter().skip(1) {
            let v = f.eval(x).map_err(|e| Error::domain(x, e))?;
            if !(v > prev) {
                return Err(Error::ConstraintViolation(format!(
                    "f is not strictly increasing near x = {x}"
                )));
            }
            prev = v;
        }
        Ok(YoungFunction { f, c, fc: prev })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn f_of_c(&self) -> f64 {
        self.fc
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.f.eval(x).map_err(|e| Error::domain(x, e))
    }

    pub fn inverse(&self, v: f64) -> Result<f64> {
        solve_monotone(|x| self.f.eval(x), 0.0, self.c, v).map_err(|e| match e {
            RootError::OutOfRange { .. } => Error::OutsideDomain { x: v },
            RootError::Eval(d) => Error::Domain { at: v, source: d },
        })
    }

    /// `int_0^a f`.
    pub fn area(&self, a: f64) -> Result<f64> {
        adaptive_simpson(|x| self.eval(x), 0.0, a, SIMPSON_TOL)
    }

    /// `int_0^m f^-1`.
    pub fn inverse_area(&self, m: f64) -> Result<f64> {
        adaptive_simpson(|v| self.inverse(v), 0.0, m, SIMPSON_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YoungGap {
    /// `int_0^a f + int_0^m f^-1`
    pub lhs: f64,
    /// `a m`
    pub rhs: f64,
    pub gap: f64,
}

/// Young's inequality `int_0^a f + int_0^m f^-1 >= a m` for
/// `0 < a < c`, `0 < m < f(c)`.
pub fn young_gap(f: &Expression, c: f64, a: f64, m: f64) -> Result<YoungGap> {
    let yf = YoungFunction::new(f.clone(), c)?;
    if !(a > 0.0 && a < c) {
        return Err(Error::ConstraintViolation(format!("need 0 < a < c, got a = {a}")));
    }
    if !(m > 0.0 && m < yf.fc) {
        return Err(Error::ConstraintViolation(format!(
            "need 0 < m < f(c) = {}, got m = {m}",
            yf.fc
        )));
    }
    let lhs = yf.area(a)? + yf.inverse_area(m)?;
    let rhs = a * m;
    Ok(YoungGap { lhs, rhs, gap: lhs - rhs })
}

/// The pair `y(x) = int_0^x f` on `n_x` points of `[0, c]` and
/// `d(m) = int_0^m f^-1` on `m_grid`, which must lie in `[0, f(c)]`.
pub fn young_pair(f: &Expression, c: f64, n_x: usize, m_grid: &[f64]) -> Result<(SampledFunction, SampledFunction)> {
    let yf = YoungFunction::new(f.clone(), c)?;
    if let Some(&m) = m_grid.iter().find(|&&m| !(m >= 0.0 && m <= yf.fc)) {
        return Err(Error::OutsideDomain { x: m });
    }
    let xs = linspace(0.0, c, n_x);
    let ys = cumulative(&xs, |a, b| adaptive_simpson(|x| yf.eval(x), a, b, SIMPSON_TOL))?;
    let ds = cumulative(m_grid, |a, b| adaptive_simpson(|v| yf.inverse(v), a, b, SIMPSON_TOL))?;
    Ok((SampledFunction::new(xs, ys)?, SampledFunction::new(m_grid.to_vec(), ds)?))
}

/// Running integral from 0 along an increasing grid starting at or after 0.
fn cumulative<F>(grid: &[f64], mut panel: F) -> Result<Vec<f64>>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    for &g in grid {
        acc += panel(prev, g)?;
        prev = g;
        out.push(acc);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmGm {
    /// `r^alpha s^beta`
    pub geometric: f64,
    /// `alpha r + beta s`
    pub arithmetic: f64,
    pub holds: bool,
    /// `r = s`, where the two sides agree
    pub equality: bool,
}

/// `r^alpha s^beta <= alpha r + beta s` for `r, s >= 0`, `alpha + beta = 1`.
pub fn amgm_check(r: f64, s: f64, alpha: f64, beta: f64) -> Result<AmGm> {
    if !(r >= 0.0 && s >= 0.0) {
        return Err(Error::ConstraintViolation("need r, s >= 0".into()));
    }
    if !(alpha > 0.0 && beta > 0.0 && (alpha + beta - 1.0).abs() <= 1e-12) {
        return Err(Error::ConstraintViolation(format!(
            "need positive alpha + beta = 1, got {alpha} + {beta}"
        )));
    }
    let geometric = r.powf(alpha) * s.powf(beta);
    let arithmetic = alpha * r + beta * s;
    Ok(AmGm {
        geometric,
        arithmetic,
        holds: geometric <= arithmetic * (1.0 + 1e-12),
        equality: r == s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ordering {
    /// `f <= g` on the grid
    FBelowG,
    /// `g <= f` on the grid
    GBelowF,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversalReport {
    pub ordering: Ordering,
    pub m_range: (f64, f64),
    /// Largest `d_upper(m) - d_lower(m)`, clamped at 0.
    pub max_violation: f64,
    pub tol: f64,
    pub pass: bool,
}

const ORDER_SLACK: f64 = 1e-12;
pub const REVERSAL_TOL: f64 = 1e-6;

/// If `f <= g` then `d_f >= d_g`: sample both convex functions on `n`
/// points, transform them by supremum on a shared slope grid and check the
/// reversed order.
pub fn order_reversal_check(
    f: &Expression,
    g: &Expression,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<ReversalReport> {
    let sf = sample(f, lo, hi, n)?;
    let sg = sample(g, lo, hi, n)?;
    if sf.xs() != sg.xs() {
        return Err(Error::InvalidInput("f and g must be defined on the same points".into()));
    }
    for (name, s) in [("f", &sf), ("g", &sg)] {
        if !matches!(convexity_classify(s), Convexity::Convex | Convexity::Affine) {
            return Err(Error::NonConvex(format!("{name} is not convex on [{lo}, {hi}]")));
        }
    }
    let slack = |a: f64, b: f64| ORDER_SLACK * (1.0 + a.abs().max(b.abs()));
    let pairs = || sf.ys().iter().zip(sg.ys());
    let (lower, upper, ordering) = if pairs().all(|(&a, &b)| a <= b + slack(a, b)) {
        (&sf, &sg, Ordering::FBelowG)
    } else if pairs().all(|(&a, &b)| b <= a + slack(a, b)) {
        (&sg, &sf, Ordering::GBelowF)
    } else {
        return Err(Error::NotOrdered);
    };
    let (lf, hf) = sf.end_slopes();
    let (lg, hg) = sg.end_slopes();
    let m_range = (lf.max(lg), hf.min(hg));
    if !(m_range.0 < m_range.1) {
        return Err(Error::InvalidInput("slope ranges of f and g do not overlap".into()));
    }
    let mut max_violation = 0.0f64;
    for m in linspace(m_range.0, m_range.1, n) {
        let dl = sup_at(lower.xs(), lower.ys(), m).0;
        let du = sup_at(upper.xs(), upper.ys(), m).0;
        max_violation = max_violation.max(du - dl);
    }
    Ok(ReversalReport {
        ordering,
        m_range,
        max_violation,
        tol: REVERSAL_TOL,
        pass: max_violation <= REVERSAL_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::catalog_lookup;

    fn x(s: &str) -> Expression {
        Expression::parse(s, "x").unwrap()
    }

    #[test]
    fn fans() {
        let abs = PiecewiseLinearFunction::new(vec![(0.0, 0.0)], Some(-1.0), Some(1.0)).unwrap();
        assert_eq!(support_fan(&abs, 0.0).unwrap(), SlopeFan { lo: -1.0, hi: 1.0 });
        assert_eq!(support_fan(&abs, 2.0).unwrap(), SlopeFan { lo: 1.0, hi: 1.0 });
        assert_eq!(support_fan(&abs, -2.0).unwrap(), SlopeFan { lo: -1.0, hi: -1.0 });

        let clipped = PiecewiseLinearFunction::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)], None, None).unwrap();
        assert_eq!(support_fan(&clipped, 0.0).unwrap().lo, f64::NEG_INFINITY);
        assert_eq!(support_fan(&clipped, 1.0).unwrap(), SlopeFan { lo: 1.0, hi: 2.0 });
        assert_eq!(support_fan(&clipped, 1.5).unwrap(), SlopeFan { lo: 2.0, hi: 2.0 });
        assert_eq!(support_fan(&clipped, 2.0).unwrap().hi, f64::INFINITY);
        assert!(matches!(support_fan(&clipped, 3.0), Err(Error::OutsideDomain { .. })));

        let bent = PiecewiseLinearFunction::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)], None, None).unwrap();
        assert!(matches!(support_fan(&bent, 1.0), Err(Error::NonConvex(_))));
    }

    #[test]
    fn fenchel_young() {
        let e = std::f64::consts::E;
        let xl = catalog_lookup("xlogx", None).unwrap();
        assert!(fenchel_young_gap(&xl, e, 2.0).unwrap().abs() < 1e-14);
        assert!(fenchel_young_gap(&xl, 1.0, 2.0).unwrap() > 0.0);
        assert!(matches!(fenchel_young_gap(&xl, -1.0, 2.0), Err(Error::OutsideDomain { .. })));
        let pw = catalog_lookup("power", Some(2.0)).unwrap();
        assert!((fenchel_young_gap(&pw, 1.0, 3.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn young_examples() {
        let g = young_gap(&x("x"), 3.0, 1.0, 2.0).unwrap();
        assert!((g.lhs - 2.5).abs() < 1e-9 && g.rhs == 2.0);
        let g = young_gap(&x("x"), 3.0, 2.0, 2.0).unwrap();
        assert!(g.gap.abs() < 1e-9);
        let g = young_gap(&x("x^2"), 2.0, 1.0, 1.0).unwrap();
        assert!(g.gap.abs() < 1e-8, "{g:?}");
        assert!(young_gap(&x("x^2"), 2.0, 1.0, 2.0).unwrap().gap > 0.0);
        assert!(matches!(young_gap(&x("x+1"), 2.0, 1.0, 1.0), Err(Error::ConstraintViolation(_))));
        assert!(matches!(young_gap(&x("-x"), 2.0, 1.0, 1.0), Err(Error::ConstraintViolation(_))));
        assert!(matches!(young_gap(&x("x"), 2.0, 3.0, 1.0), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn young_pair_of_identity() {
        let (y, d) = young_pair(&x("x"), 2.0, 21, &linspace(0.0, 2.0, 11)).unwrap();
        for (a, v) in y.points() {
            assert!((v - a * a / 2.0).abs() < 1e-12);
        }
        for (m, v) in d.points() {
            assert!((v - m * m / 2.0).abs() < 1e-9);
        }
        assert!(young_pair(&x("x"), 2.0, 21, &[3.0]).is_err());
    }

    #[test]
    fn amgm() {
        let r = amgm_check(4.0, 1.0, 0.5, 0.5).unwrap();
        assert_eq!((r.geometric, r.arithmetic), (2.0, 2.5));
        assert!(r.holds && !r.equality);
        let r = amgm_check(3.0, 3.0, 0.25, 0.75).unwrap();
        assert!(r.holds && r.equality && (r.geometric - r.arithmetic).abs() < 1e-15);
        assert!(amgm_check(1.0, 2.0, 0.5, 0.6).is_err());
    }

    #[test]
    fn reversal() {
        let r = order_reversal_check(&x("x^2/2"), &x("x^2"), -2.0, 2.0, 401).unwrap();
        assert_eq!(r.ordering, Ordering::FBelowG);
        assert!(r.pass, "{r:?}");
        let r = order_reversal_check(&x("x^2"), &x("x^2/2"), -2.0, 2.0, 401).unwrap();
        assert_eq!(r.ordering, Ordering::GBelowF);
        assert!(r.pass && r.max_violation == 0.0, "{r:?}");
        assert!(matches!(
            order_reversal_check(&x("x^2"), &x("x^2/2 + x"), -2.0, 2.0, 101),
            Err(Error::NotOrdered)
        ));
        assert!(matches!(
            order_reversal_check(&x("x^3"), &x("x^2"), -1.0, 1.0, 101),
            Err(Error::NonConvex(_))
        ));
    }
}
