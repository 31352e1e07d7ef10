//! Shared curve and line types plus elementary constructions on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::numeric::linspace;

/// Coefficients this close to zero relative to their partner are snapped to
/// zero during normalization.
const SNAP: f64 = 4.0 * f64::EPSILON;

/// A line `a x + b y + c = 0`, normalized so the first nonzero of `(a, b)`
/// is `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    a: f64,
    b: f64,
    c: f64,
}

impl Line {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Line> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidInput("line coefficients must be finite".into()));
        }
        let (mut a, mut b) = (a, b);
        if a.abs() <= SNAP * b.abs() {
            a = 0.0;
        }
        if b.abs() <= SNAP * a.abs() {
            b = 0.0;
        }
        let lead = if a != 0.0 {
            a
        } else if b != 0.0 {
            b
        } else {
            return Err(Error::InvalidInput("line with a = b = 0".into()));
        };
        let fix = |v: f64| {
            let r = v / lead;
            if r == 0.0 {
                0.0
            } else {
                r
            }
        };
        Ok(Line {
            a: fix(a),
            b: fix(b),
            c: fix(c),
        })
    }

    /// `y = m x + b`
    pub fn from_slope_intercept(m: f64, b: f64) -> Result<Line> {
        Line::new(m, -1.0, b)
    }

    /// `y = m x - d`
    pub fn from_slope_neg_intercept(m: f64, d: f64) -> Result<Line> {
        Line::new(m, -1.0, -d)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn coefficients(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn is_vertical(&self) -> bool {
        self.b == 0.0
    }

    /// Slope and y-intercept, absent for vertical lines.
    pub fn slope_intercept(&self) -> Option<(f64, f64)> {
        if self.is_vertical() {
            None
        } else {
            Some((-self.a / self.b, -self.c / self.b))
        }
    }

    /// Signed residual `a x + b y + c`.
    pub fn residual(&self, x: f64, y: f64) -> f64 {
        self.a * x + self.b * y + self.c
    }

    /// Distance from the origin.
    pub fn origin_distance(&self) -> f64 {
        self.c.abs() / self.a.hypot(self.b)
    }

    pub fn approx_eq(&self, other: &Line, tol: f64) -> bool {
        self.coefficients()
            .iter()
            .zip(other.coefficients())
            .all(|(p, q)| (p - q).abs() <= tol * (1.0 + p.abs().max(q.abs())))
    }
}

/// A tangent line reported by slope and negated intercept, `y = m x - d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentLine {
    pub m: f64,
    pub d: f64,
}

impl TangentLine {
    pub fn to_line(self) -> Result<Line> {
        Line::from_slope_neg_intercept(self.m, self.d)
    }
}

/// Samples `y_i = y(x_i)` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledFunction {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<SampledFunction> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidInput(format!(
                "xs has {} entries but ys has {}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: xs.len(),
            });
        }
        check_increasing(&xs, "xs")?;
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidInput("ys must be finite".into()));
        }
        Ok(SampledFunction { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    /// Slopes of the first and last chords.
    pub fn end_slopes(&self) -> (f64, f64) {
        let n = self.len();
        let s0 = (self.ys[1] - self.ys[0]) / (self.xs[1] - self.xs[0]);
        let s1 = (self.ys[n - 1] - self.ys[n - 2]) / (self.xs[n - 1] - self.xs[n - 2]);
        (s0, s1)
    }

    pub fn negated(&self) -> SampledFunction {
        SampledFunction {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|y| -y).collect(),
        }
    }

    /// Linear interpolation; `None` outside `[x_first, x_last]`.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let n = self.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return None;
        }
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x - x0) / (x1 - x0);
        Some(self.ys[i - 1] + t * (self.ys[i] - self.ys[i - 1]))
    }
}

/// Points `(x(t), y(t))` on a strictly increasing parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParametricCurve {
    ts: Vec<f64>,
    points: Vec<(f64, f64)>,
}

impl ParametricCurve {
    pub fn new(ts: Vec<f64>, points: Vec<(f64, f64)>) -> Result<ParametricCurve> {
        if ts.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "ts has {} entries but points has {}",
                ts.len(),
                points.len()
            )));
        }
        if ts.is_empty() {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        check_increasing(&ts, "ts")?;
        Ok(ParametricCurve { ts, points })
    }

    /// The graph of a sampled function, parameterized by `x`.
    pub fn from_graph(f: &SampledFunction) -> ParametricCurve {
        ParametricCurve {
            ts: f.xs.clone(),
            points: f.points().collect(),
        }
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }
}

/// Continuous piecewise-linear function through `breakpoints`, optionally
/// extended by rays. An absent ray means the domain stops at that end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearFunction {
    breakpoints: Vec<(f64, f64)>,
    left_slope: Option<f64>,
    right_slope: Option<f64>,
}

impl PiecewiseLinearFunction {
    pub fn new(
        breakpoints: Vec<(f64, f64)>,
        left_slope: Option<f64>,
        right_slope: Option<f64>,
    ) -> Result<PiecewiseLinearFunction> {
        if breakpoints.is_empty() {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        let xs: Vec<f64> = breakpoints.iter().map(|p| p.0).collect();
        check_increasing(&xs, "breakpoint x")?;
        if breakpoints.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::InvalidInput("breakpoint y must be finite".into()));
        }
        for s in [left_slope, right_slope].into_iter().flatten() {
            if !s.is_finite() {
                return Err(Error::InvalidInput("ray slopes must be finite".into()));
            }
        }
        let f = PiecewiseLinearFunction {
            breakpoints,
            left_slope,
            right_slope,
        };
        if f.segment_slopes().iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput("segment slopes must be finite".into()));
        }
        Ok(f)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn left_slope(&self) -> Option<f64> {
        self.left_slope
    }

    pub fn right_slope(&self) -> Option<f64> {
        self.right_slope
    }

    pub fn segment_slopes(&self) -> Vec<f64> {
        self.breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// Every piece's slope from left to right, rays included.
    pub fn piece_slopes(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.breakpoints.len() + 1);
        out.extend(self.left_slope);
        out.extend(self.segment_slopes());
        out.extend(self.right_slope);
        out
    }

    /// Number of linear pieces, rays included.
    pub fn piece_count(&self) -> usize {
        self.piece_slopes().len()
    }

    pub fn is_convex(&self) -> bool {
        self.piece_slopes()
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12 * (1.0 + w[0].abs().max(w[1].abs())))
    }

    pub fn domain(&self) -> (f64, f64) {
        let lo = if self.left_slope.is_some() {
            f64::NEG_INFINITY
        } else {
            self.breakpoints[0].0
        };
        let hi = if self.right_slope.is_some() {
            f64::INFINITY
        } else {
            self.breakpoints[self.breakpoints.len() - 1].0
        };
        (lo, hi)
    }

    /// Value at `x`, `None` outside the domain.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let bp = &self.breakpoints;
        let (first, last) = (bp[0], bp[bp.len() - 1]);
        if x < first.0 {
            return self.left_slope.map(|s| first.1 + s * (x - first.0));
        }
        if x > last.0 {
            return self.right_slope.map(|s| last.1 + s * (x - last.0));
        }
        let i = bp.partition_point(|p| p.0 <= x);
        if i == 0 {
            return Some(first.1);
        }
        if i >= bp.len() {
            return Some(last.1);
        }
        let (p, q) = (bp[i - 1], bp[i]);
        Some(p.1 + (q.1 - p.1) * (x - p.0) / (q.0 - p.0))
    }
}

/// Strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<(f64, f64)>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<ConvexPolygon> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::TooFewPoints { needed: 3, got: n });
        }
        let mut turning = 0.0;
        for i in 0..n {
            let p = vertices[i];
            let q = vertices[(i + 1) % n];
            let r = vertices[(i + 2) % n];
            let e1 = (q.0 - p.0, q.1 - p.1);
            let e2 = (r.0 - q.0, r.1 - q.1);
            let cross = e1.0 * e2.1 - e1.1 * e2.0;
            if !(cross > 0.0) {
                return Err(Error::NonConvex(format!(
                    "turn at vertex {} is not strictly counterclockwise",
                    (i + 1) % n
                )));
            }
            turning += cross.atan2(e1.0 * e2.0 + e1.1 * e2.1);
        }
        // a star polygon turns more than once
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::NonConvex("boundary winds more than once".into()));
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }
}

fn check_increasing(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} must be finite")));
    }
    if let Some(i) = v.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "{what} not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// Sample `e` on `n` uniform points of `[lo, hi]`, dropping points where it
/// is undefined. Returns the samples and the dropped abscissae.
pub fn sample_reporting(
    e: &Expression,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<(SampledFunction, Vec<f64>)> {
    if !(lo < hi) || n < 2 {
        return Err(Error::InvalidInput(format!(
            "sampling needs lo < hi and n >= 2 (got [{lo}, {hi}], n = {n})"
        )));
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut dropped = Vec::new();
    for x in linspace(lo, hi, n) {
        match e.eval(x) {
            Ok(y) => {
                xs.push(x);
                ys.push(y);
            }
            Err(_) => dropped.push(x),
        }
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: xs.len(),
        });
    }
    Ok((SampledFunction::new(xs, ys)?, dropped))
}

pub fn sample(e: &Expression, lo: f64, hi: f64, n: usize) -> Result<SampledFunction> {
    sample_reporting(e, lo, hi, n).map(|(f, _)| f)
}

/// Tangent line to `y = e(x)` at `x = h`.
pub fn tangent_line(e: &Expression, h: f64) -> Result<TangentLine> {
    tangent_line_with(e, &e.derivative(), h)
}

/// As [`tangent_line`] with a precomputed derivative.
pub fn tangent_line_with(e: &Expression, de: &Expression, h: f64) -> Result<TangentLine> {
    let y = e.eval(h).map_err(|s| Error::domain(h, s))?;
    let m = de.eval(h).map_err(|s| Error::domain(h, s))?;
    Ok(TangentLine { m, d: m * h - y })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convexity {
    Convex,
    Concave,
    Mixed,
    Affine,
}

/// Classify samples by the sign pattern of consecutive chord-slope
/// differences, with tolerance `1e-9 (1 + max|y|)`.
pub fn convexity_classify(f: &SampledFunction) -> Convexity {
    classify_values(f.xs(), f.ys())
}

pub(crate) fn classify_values(xs: &[f64], ys: &[f64]) -> Convexity {
    if xs.len() < 3 {
        return Convexity::Affine;
    }
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let tau = 1e-9 * (1.0 + scale);
    let (mut pos, mut neg) = (false, false);
    for i in 1..xs.len() - 1 {
        let left = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
        let right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        let dd = right - left;
        if dd > tau {
            pos = true;
        } else if dd < -tau {
            neg = true;
        }
    }
    match (pos, neg) {
        (true, false) => Convexity::Convex,
        (false, true) => Convexity::Concave,
        (true, true) => Convexity::Mixed,
        (false, false) => Convexity::Affine,
    }
}
