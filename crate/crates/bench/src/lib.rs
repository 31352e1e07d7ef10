//! Shared inputs for the criterion benches.

use dualcurve::numeric::linspace;
use dualcurve::{sample, Expression, PiecewiseLinearFunction, SampledFunction};

pub fn expr(src: &str) -> Expression {
    Expression::parse(src, "x").expect("bench expression parses")
}

/// `exp(x)` sampled on `[-2, 2]` with `n` points.
pub fn exp_samples(n: usize) -> SampledFunction {
    sample(&expr("exp(x)"), -2.0, 2.0, n).expect("exp samples")
}

/// `n` slopes across the chord-slope range of `exp` on `[-2, 2]`.
pub fn exp_slopes(n: usize) -> Vec<f64> {
    linspace((-2.0f64).exp(), 2.0f64.exp(), n)
}

/// Convex piecewise-linear function with `n` breakpoints on a parabola.
pub fn parabola_pl(n: usize) -> PiecewiseLinearFunction {
    let pts = linspace(-3.0, 3.0, n).into_iter().map(|x| (x, x * x / 2.0)).collect();
    PiecewiseLinearFunction::new(pts, Some(-4.0), Some(4.0)).expect("convex breakpoints")
}

pub const NESTED: &str = "x*exp(sin(x)^2) - ln(1 + x^2)/(2 + cos(3*x))";
