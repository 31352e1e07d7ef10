use serde::Serialize;

use crate::curve::{sample, Convexity};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::numeric::linspace;

use super::transform::{sup_at, SlopeInverse};

/// Second derivatives smaller than this count as an inflection.
const INFLECTION_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvolutionReport {
    pub branch: Convexity,
    pub max_error: f64,
    pub points: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Transform `y` twice on `n` samples and compare with `y` at interior
/// grid points. Concave input goes through the infimum form.
pub fn verify_involution(y: &Expression, x_lo: f64, x_hi: f64, n: usize, tol: f64) -> Result<InvolutionReport> {
    let f = sample(y, x_lo, x_hi, n)?;
    let branch = crate::curve::convexity_classify(&f);
    let sign = match branch {
        Convexity::Convex | Convexity::Affine => 1.0,
        Convexity::Concave => -1.0,
        Convexity::Mixed => return Err(Error::MixedConvexity),
    };
    // work with the convex function sign * y; inf{m x - y} = -sup{(-m) x + y}
    let xs = f.xs();
    let ys: Vec<f64> = f.ys().iter().map(|v| sign * v).collect();
    let k = xs.len();
    let s0 = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    let s1 = (ys[k - 1] - ys[k - 2]) / (xs[k - 1] - xs[k - 2]);
    let ms = linspace(s0, s1, k);
    let ds: Vec<f64> = ms.iter().map(|&m| sup_at(xs, &ys, m).0).collect();
    let mut max_error = 0.0f64;
    for i in 1..k - 1 {
        let back = sup_at(&ms, &ds, xs[i]).0;
        max_error = max_error.max((back - ys[i]).abs());
    }
    Ok(InvolutionReport {
        branch,
        max_error,
        points: k.saturating_sub(2),
        tol,
        pass: max_error <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub x0: f64,
    pub m0: f64,
    pub y2: f64,
    pub d2: f64,
    pub error: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare `d''(m0)`, estimated from analytic transforms at `m0` and
/// `m0 +- h`, with `1 / y''(x0)`.
pub fn verify_curvature_reciprocity(y: &Expression, x0: f64, tol: f64) -> Result<CurvatureReport> {
    let dy = y.derivative();
    let d2y = dy.derivative();
    let y2 = d2y.eval(x0).map_err(|e| Error::domain(x0, e))?;
    if y2.abs() < INFLECTION_EPS {
        return Err(Error::Inflection { x: x0 });
    }
    let m0 = dy.eval(x0).map_err(|e| Error::domain(x0, e))?;
    let h = 1e-4 * (1.0 + m0.abs());

    // widen a bracket around x0 until y' covers [m0 - h, m0 + h]
    let mut w = 1e-3 * (1.0 + x0.abs());
    let inv = loop {
        let (lo, hi) = (x0 - w, x0 + w);
        let ends = (dy.eval(lo), dy.eval(hi));
        let (a, b) = match ends {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Err(Error::InvalidInput(format!("no bracket for the slope inverse around x = {x0}"))),
        };
        if a.min(b) < m0 - h && a.max(b) > m0 + h {
            break SlopeInverse::new(y, lo, hi)?;
        }
        w *= 2.0;
        if w > 1e6 * (1.0 + x0.abs()) {
            return Err(Error::InvalidInput(format!("no bracket for the slope inverse around x = {x0}")));
        }
    };
    let d = |m: f64| inv.transform(m);
    let d2 = (d(m0 + h)? - 2.0 * d(m0)? + d(m0 - h)?) / (h * h);
    let error = (d2 * y2 - 1.0).abs();
    Ok(CurvatureReport {
        x0,
        m0,
        y2,
        d2,
        error,
        tol,
        pass: error <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientInverseReport {
    pub x0: f64,
    pub m0: f64,
    /// `|d'(y'(x0)) - x0|`
    pub forward_error: f64,
    /// `|y'(d'(m0)) - m0|`
    pub backward_error: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `d'` and `y'` are mutually inverse: check both compositions at `x0`.
pub fn verify_gradient_inverse(y: &Expression, d: &Expression, x0: f64, tol: f64) -> Result<GradientInverseReport> {
    let dy = y.derivative();
    let dd = d.derivative();
    let m0 = dy.eval(x0).map_err(|e| Error::domain(x0, e))?;
    let xb = dd.eval(m0).map_err(|e| Error::domain(m0, e))?;
    let mb = dy.eval(xb).map_err(|e| Error::domain(xb, e))?;
    let forward_error = (xb - x0).abs();
    let backward_error = (mb - m0).abs();
    Ok(GradientInverseReport {
        x0,
        m0,
        forward_error,
        backward_error,
        tol,
        pass: forward_error <= tol && backward_error <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expression {
        Expression::parse(s, "x").unwrap()
    }

    #[test]
    fn involution_examples() {
        let r = verify_involution(&p("x^2/2"), -4.0, 4.0, 4097, 1e-2).unwrap();
        assert!(r.pass && r.branch == Convexity::Convex, "{r:?}");
        let r = verify_involution(&p("exp(x)"), -2.0, 2.0, 4097, 1e-2).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_involution(&p("2*x^(1/2)"), 0.25, 4.0, 4097, 1e-2).unwrap();
        assert!(r.pass && r.branch == Convexity::Concave, "{r:?}");
        assert!(matches!(
            verify_involution(&p("x^3 - x"), -2.0, 2.0, 401, 1e-2),
            Err(Error::MixedConvexity)
        ));
    }

    #[test]
    fn curvature_examples() {
        let r = verify_curvature_reciprocity(&p("2*x^(1/2)"), 1.0, 1e-4).unwrap();
        assert!((r.y2 + 0.5).abs() < 1e-15 && (r.d2 + 2.0).abs() < 1e-4, "{r:?}");
        let r = verify_curvature_reciprocity(&p("x^2/2"), 3.0, 1e-4).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_curvature_reciprocity(&p("exp(x)"), 0.0, 1e-4).unwrap();
        assert!(r.pass && (r.d2 - 1.0).abs() < 1e-4, "{r:?}");
        assert!(matches!(
            verify_curvature_reciprocity(&p("x^3"), 0.0, 1e-4),
            Err(Error::Inflection { .. })
        ));
    }

    #[test]
    fn gradient_inverse_examples() {
        let m = |s: &str| Expression::parse(s, "m").unwrap();
        let r = verify_gradient_inverse(&p("2*x^(1/2)"), &m("-1/m"), 4.0, 1e-12).unwrap();
        assert!(r.pass && r.m0 == 0.5, "{r:?}");
        let r = verify_gradient_inverse(&p("x^2/2"), &m("m^2/2"), 7.0, 0.0).unwrap();
        assert!(r.pass);
        let r = verify_gradient_inverse(&p("exp(x)"), &m("m*ln(m) - m"), 1.0, 1e-15).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
