use crate::curve::{classify_values, Convexity, ParametricCurve, SampledFunction};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::numeric::{adaptive_simpson, linspace, solve_monotone, RootError, SIMPSON_TOL};

use super::{Diagnostics, Method, TransformReport};

/// Number of `y''` samples used to check that `y'` is monotone.
const MONOTONE_SAMPLES: usize = 257;

/// Relative threshold below which `dx/dt` counts as a vertical tangent.
const VERTICAL_EPS: f64 = 1e-12;

/// Inverse of `y'` on an interval where `y'` is strictly monotone.
#[derive(Debug, Clone)]
pub struct SlopeInverse {
    y: Expression,
    dy: Expression,
    lo: f64,
    hi: f64,
    m_lo: f64,
    m_hi: f64,
}

impl SlopeInverse {
    pub fn new(y: &Expression, lo: f64, hi: f64) -> Result<SlopeInverse> {
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!("interval [{lo}, {hi}] is empty")));
        }
        let dy = y.derivative();
        let d2y = dy.derivative();
        let (mut pos, mut neg) = (false, false);
        for x in linspace(lo, hi, MONOTONE_SAMPLES) {
            match d2y.eval(x) {
                Ok(v) if v > 0.0 => pos = true,
                Ok(v) if v < 0.0 => neg = true,
                _ => {}
            }
        }
        let at = |x: f64| dy.eval(x).map_err(|e| Error::domain(x, e));
        let (s_lo, s_hi) = (at(lo)?, at(hi)?);
        if pos == neg || s_lo == s_hi {
            return Err(Error::NonMonotoneDerivative { lo, hi });
        }
        Ok(SlopeInverse {
            y: y.clone(),
            dy,
            lo,
            hi,
            m_lo: s_lo.min(s_hi),
            m_hi: s_lo.max(s_hi),
        })
    }

    pub fn slope_range(&self) -> (f64, f64) {
        (self.m_lo, self.m_hi)
    }

    /// The abscissa where `y'(x) = m`.
    pub fn x_of(&self, m: f64) -> Result<f64> {
        solve_monotone(|x| self.dy.eval(x), self.lo, self.hi, m).map_err(|e| match e {
            RootError::OutOfRange { .. } => Error::SlopeOutOfRange {
                m,
                lo: self.m_lo,
                hi: self.m_hi,
            },
            RootError::Eval(src) => Error::domain(m, src),
        })
    }

    /// `d(m) = m x* - y(x*)`.
    pub fn transform(&self, m: f64) -> Result<f64> {
        let x = self.x_of(m)?;
        let y = self.y.eval(x).map_err(|e| Error::domain(x, e))?;
        Ok(m * x - y)
    }
}

pub fn transform_analytic(y: &Expression, x_lo: f64, x_hi: f64, m: f64) -> Result<f64> {
    SlopeInverse::new(y, x_lo, x_hi)?.transform(m)
}

fn check_grid(m_grid: &[f64]) -> Result<()> {
    if m_grid.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: m_grid.len(),
        });
    }
    if m_grid.iter().any(|m| !m.is_finite()) || m_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("m-grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn finish(ms: Vec<f64>, ds: Vec<f64>, method: Method, skipped_m: Vec<f64>) -> Result<TransformReport> {
    if ms.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: ms.len(),
        });
    }
    Ok(TransformReport {
        dual: SampledFunction::new(ms, ds)?,
        method,
        diagnostics: Diagnostics {
            skipped_m,
            ..Diagnostics::default()
        },
    })
}

/// Analytic transform on a grid; slopes outside `y'`'s range are skipped.
pub fn transform_analytic_grid(
    y: &Expression,
    x_lo: f64,
    x_hi: f64,
    m_grid: &[f64],
) -> Result<TransformReport> {
    check_grid(m_grid)?;
    let inv = SlopeInverse::new(y, x_lo, x_hi)?;
    let (mut ms, mut ds, mut skipped) = (Vec::new(), Vec::new(), Vec::new());
    for &m in m_grid {
        match inv.transform(m) {
            Ok(d) => {
                ms.push(m);
                ds.push(d);
            }
            Err(Error::SlopeOutOfRange { .. }) => skipped.push(m),
            Err(e) => return Err(e),
        }
    }
    finish(ms, ds, Method::Analytic, skipped)
}

/// `d(m0) + integral of x(t) dt from m0 to m`, anchored at the midpoint
/// of the interval.
pub fn transform_integral(
    y: &Expression,
    x_lo: f64,
    x_hi: f64,
    m_grid: &[f64],
) -> Result<TransformReport> {
    check_grid(m_grid)?;
    let inv = SlopeInverse::new(y, x_lo, x_hi)?;
    let x0 = 0.5 * (x_lo + x_hi);
    let m0 = inv.dy.eval(x0).map_err(|e| Error::domain(x0, e))?;
    let d0 = m0 * x0 - inv.y.eval(x0).map_err(|e| Error::domain(x0, e))?;
    let (m_lo, m_hi) = inv.slope_range();

    let mut skipped = Vec::new();
    let inside: Vec<f64> = m_grid
        .iter()
        .copied()
        .filter(|&m| {
            let ok = (m_lo..=m_hi).contains(&m);
            if !ok {
                skipped.push(m);
            }
            ok
        })
        .collect();
    let panel = |a: f64, b: f64| adaptive_simpson(|t| inv.x_of(t), a, b, SIMPSON_TOL);

    let split = inside.partition_point(|&m| m < m0);
    let mut ds = vec![0.0; inside.len()];
    let (mut acc, mut prev) = (d0, m0);
    for i in split..inside.len() {
        acc += panel(prev, inside[i])?;
        prev = inside[i];
        ds[i] = acc;
    }
    let (mut acc, mut prev) = (d0, m0);
    for i in (0..split).rev() {
        acc -= panel(inside[i], prev)?;
        prev = inside[i];
        ds[i] = acc;
    }
    finish(inside, ds, Method::Integral, skipped)
}

/// `max_i (m x_i - y_i)` and its first maximizing index.
pub fn sup_at(xs: &[f64], ys: &[f64], m: f64) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let v = m * x - y;
        if v > best {
            best = v;
            arg = i;
        }
    }
    (best, arg)
}

fn extremum_transform(
    f: &SampledFunction,
    m_grid: &[f64],
    end_rays: bool,
    concave: bool,
) -> Result<TransformReport> {
    check_grid(m_grid)?;
    let sign = if concave { -1.0 } else { 1.0 };
    let ys: Vec<f64> = f.ys().iter().map(|y| sign * y).collect();
    let xs = f.xs();
    let mut ds = Vec::with_capacity(m_grid.len());
    let mut arg = Vec::with_capacity(m_grid.len());
    for &m in m_grid {
        // inf{m x - y} = -sup{(-m) x - (-y)}
        let (d, i) = sup_at(xs, &ys, sign * m);
        ds.push(sign * d);
        arg.push(xs[i]);
    }
    let shape = classify_values(xs, &ys);
    let n = xs.len();
    Ok(TransformReport {
        dual: SampledFunction::new(m_grid.to_vec(), ds)?,
        method: if concave { Method::Inf } else { Method::Sup },
        diagnostics: Diagnostics {
            nonconvex_input: !matches!(shape, Convexity::Convex | Convexity::Affine),
            skipped_m: Vec::new(),
            argmax_xs: arg,
            end_rays: end_rays.then(|| (xs[0], xs[n - 1])),
        },
    })
}

/// `d(m) = max over samples of (m x - y)`; ties go to the smaller `x`.
/// Non-convex input yields the transform of its convex minorant, flagged.
pub fn transform_sup(f: &SampledFunction, m_grid: &[f64], end_rays: bool) -> Result<TransformReport> {
    extremum_transform(f, m_grid, end_rays, false)
}

/// `d(m) = min over samples of (m x - y)`, the transform of concave data.
pub fn transform_inf(f: &SampledFunction, m_grid: &[f64], end_rays: bool) -> Result<TransformReport> {
    extremum_transform(f, m_grid, end_rays, true)
}

#[derive(Debug, Clone)]
pub struct ParametricDual {
    /// Points `(m, d)` indexed by the surviving parameters.
    pub curve: ParametricCurve,
    /// Parameters skipped at vertical tangents.
    pub skipped: Vec<f64>,
}

fn weighted_diff(t: &[f64], v: &[f64], i: usize) -> f64 {
    let n = t.len();
    if i == 0 {
        return (v[1] - v[0]) / (t[1] - t[0]);
    }
    if i == n - 1 {
        return (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
    }
    let h1 = t[i] - t[i - 1];
    let h2 = t[i + 1] - t[i];
    let left = (v[i] - v[i - 1]) / h1;
    let right = (v[i + 1] - v[i]) / h2;
    (h1 * right + h2 * left) / (h1 + h2)
}

/// Tangent-line coordinates `(m, d)` along a parametric curve from finite
/// differences in the parameter.
pub fn dual_of_parametric(c: &ParametricCurve) -> Result<ParametricDual> {
    let n = c.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let ts = c.ts();
    let xs: Vec<f64> = c.points().iter().map(|p| p.0).collect();
    let ys: Vec<f64> = c.points().iter().map(|p| p.1).collect();
    let (mut out_t, mut out_p, mut skipped) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        let dx = weighted_diff(ts, &xs, i);
        let dy = weighted_diff(ts, &ys, i);
        if dx.abs() <= VERTICAL_EPS * (1.0 + dy.abs()) {
            skipped.push(ts[i]);
            continue;
        }
        let m = dy / dx;
        out_t.push(ts[i]);
        out_p.push((m, m * xs[i] - ys[i]));
    }
    if out_t.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: out_t.len(),
        });
    }
    Ok(ParametricDual {
        curve: ParametricCurve::new(out_t, out_p)?,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::sample;

    fn p(s: &str) -> Expression {
        Expression::parse(s, "x").unwrap()
    }

    #[test]
    fn analytic_examples() {
        let d = transform_analytic(&p("2*x^(1/2)"), 0.1, 10.0, 1.0).unwrap();
        assert!((d + 1.0).abs() < 1e-12);
        let d = transform_analytic(&p("exp(x)"), -2.0, 2.0, std::f64::consts::E).unwrap();
        assert!(d.abs() < 1e-12);
        assert!(matches!(
            transform_analytic(&p("x^3 - x"), -2.0, 2.0, 2.0),
            Err(Error::NonMonotoneDerivative { .. })
        ));
        assert!(matches!(
            transform_analytic(&p("exp(x)"), -2.0, 2.0, 100.0),
            Err(Error::SlopeOutOfRange { .. })
        ));
    }

    #[test]
    fn sup_examples() {
        let f = sample(&p("x^2/2"), -4.0, 4.0, 4097).unwrap();
        let r = transform_sup(&f, &[2.0, 3.0], false).unwrap();
        assert!((r.dual.ys()[1] - 4.5).abs() < 1e-3);
        assert!(!r.diagnostics.nonconvex_input);

        let f = sample(&p("x^3/3"), 0.0, 2.0, 4097).unwrap();
        let r = transform_sup(&f, &[1.0, 1.5], true).unwrap();
        assert!((r.dual.ys()[0] - 2.0 / 3.0).abs() < 1e-3);
        assert_eq!(r.diagnostics.end_rays, Some((0.0, 2.0)));
    }

    #[test]
    fn sup_of_nonconvex_is_flagged_and_matches_finer_grid() {
        let coarse = sample(&p("x^3 - x"), -2.0, 2.0, 513).unwrap();
        let fine = sample(&p("x^3 - x"), -2.0, 2.0, 4097).unwrap();
        let grid = linspace(-1.0, 11.0, 25);
        let a = transform_sup(&coarse, &grid, false).unwrap();
        let b = transform_sup(&fine, &grid, false).unwrap();
        assert!(a.diagnostics.nonconvex_input);
        for (u, v) in a.dual.ys().iter().zip(b.dual.ys()) {
            assert!((u - v).abs() < 1e-3);
        }
    }

    #[test]
    fn sup_ties_prefer_smaller_x() {
        let f = SampledFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]).unwrap();
        let r = transform_sup(&f, &[1.0, 2.0], false).unwrap();
        assert_eq!(r.diagnostics.argmax_xs, vec![0.0, 2.0]);
    }

    #[test]
    fn inf_of_concave_root() {
        let f = sample(&p("2*x^(1/2)"), 0.25, 4.0, 4097).unwrap();
        let r = transform_inf(&f, &[0.75, 1.0, 1.5], false).unwrap();
        assert!(!r.diagnostics.nonconvex_input);
        for (m, d) in r.dual.points() {
            assert!((d + 1.0 / m).abs() < 1e-5, "{m} {d}");
        }
    }

    #[test]
    fn integral_examples() {
        let r = transform_integral(&p("x^2/2"), -4.0, 4.0, &[-1.0, 0.0, 2.0]).unwrap();
        for (got, want) in r.dual.ys().iter().zip([0.5, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-8);
        }
        let r = transform_integral(&p("exp(x)"), -3.0, 3.0, &[0.5, 1.0]).unwrap();
        assert!((r.dual.ys()[1] + 1.0).abs() < 1e-8);
        let r = transform_integral(&p("2*x^(1/2)"), 0.1, 100.0, &[1.0, 2.0]).unwrap();
        assert!((r.dual.ys()[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn parametric_examples() {
        let f = sample(&p("x^3 - x"), -2.0, 2.0, 401).unwrap();
        let dual = dual_of_parametric(&ParametricCurve::from_graph(&f)).unwrap();
        let i = f.xs().iter().position(|&x| (x - 1.0).abs() < 1e-12).unwrap();
        let (m, d) = dual.curve.points()[i];
        assert!((m - 2.0).abs() < 1e-2 && (d - 2.0).abs() < 1e-2);

        let f = sample(&p("2*x^(1/2)"), 0.5, 1.5, 257).unwrap();
        let dual = dual_of_parametric(&ParametricCurve::from_graph(&f)).unwrap();
        let i = f.xs().iter().position(|&x| (x - 1.0).abs() < 1e-12).unwrap();
        let (m, d) = dual.curve.points()[i];
        assert!((m - 1.0).abs() < 1e-3 && (d + 1.0).abs() < 1e-3);
    }

    #[test]
    fn semicircle_top_maps_to_minus_one() {
        let ts = linspace(0.0, std::f64::consts::PI, 401);
        // counterclockwise from (1, 0) over the top
        let pts = ts.iter().map(|t| (t.cos(), t.sin())).collect();
        let c = ParametricCurve::new(ts, pts).unwrap();
        let dual = dual_of_parametric(&c).unwrap();
        let (m, d) = dual.curve.points()[200];
        assert!(m.abs() < 1e-2 && (d + 1.0).abs() < 1e-2);
    }
}
