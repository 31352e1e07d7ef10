//! Clairaut's equation `y = x y' + f(y')`.
//!
//! The general solution is the line family `y = C x + f(C)`; the singular
//! solution is its envelope `x = -f'(t)`, `y = f(t) - t f'(t)`, whose
//! transform is `d(m) = -f(m)`.

use serde::Serialize;

use crate::curve::{Line, ParametricCurve, SampledFunction};
use crate::envelope::three_point_slope;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::legendre::SlopeInverse;
use crate::numeric::linspace;

/// `|f''(t)|` at or below this flags a point of the singular solution.
pub const FLAT_EPS: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ClairautProblem {
    f: Expression,
    df: Expression,
    d2f: Expression,
    t_lo: f64,
    t_hi: f64,
}

impl ClairautProblem {
    pub fn new(f: Expression, t_lo: f64, t_hi: f64) -> Result<ClairautProblem> {
        if !(t_lo < t_hi) {
            return Err(Error::InvalidInput(format!(
                "parameter interval needs t_lo < t_hi, got [{t_lo}, {t_hi}]"
            )));
        }
        let df = f.derivative();
        let d2f = df.derivative();
        Ok(ClairautProblem {
            f,
            df,
            d2f,
            t_lo,
            t_hi,
        })
    }

    pub fn f(&self) -> &Expression {
        &self.f
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    fn f_at(&self, s: f64) -> Result<f64> {
        self.f.eval(s).map_err(|e| Error::domain(s, e))
    }
}

/// The line `y = C x + f(C)`.
pub fn general_solution(p: &ClairautProblem, c: f64) -> Result<Line> {
    Line::from_slope_intercept(c, p.f_at(c)?)
}

/// `(C, slope, intercept)` for each `C` where `f` is defined.
pub fn general_family(p: &ClairautProblem, cs: &[f64]) -> Vec<(f64, f64, f64)> {
    cs.iter()
        .filter_map(|&c| p.f_at(c).ok().map(|v| (c, c, v)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct SingularSolution {
    pub curve: ParametricCurve,
    /// Parameters where `f''` vanishes.
    pub flat: Vec<f64>,
    /// Parameters skipped because `f` or `f'` is undefined.
    pub skipped: Vec<f64>,
}

pub fn singular_solution(p: &ClairautProblem, n: usize) -> Result<SingularSolution> {
    if n < 2 {
        return Err(Error::InvalidInput("singular solution needs n >= 2".into()));
    }
    let (mut ts, mut pts, mut flat, mut skipped) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut curved = false;
    for t in linspace(p.t_lo, p.t_hi, n) {
        let (Ok(f), Ok(df)) = (p.f.eval(t), p.df.eval(t)) else {
            skipped.push(t);
            continue;
        };
        match p.d2f.eval(t) {
            Ok(v) if v.abs() > FLAT_EPS => curved = true,
            _ => flat.push(t),
        }
        ts.push(t);
        pts.push((-df, f - t * df));
    }
    if !curved {
        return Err(Error::LinearClairautFunction);
    }
    Ok(SingularSolution {
        curve: ParametricCurve::new(ts, pts)?,
        flat,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub max_abs: f64,
    pub at_x: f64,
}

/// Largest `|y - (x y' + f(y'))|` over interior curve points, with `y'`
/// from neighbouring points.
pub fn residual(p: &ClairautProblem, curve: &ParametricCurve) -> Result<Residual> {
    let pts = curve.points();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: pts.len(),
        });
    }
    let mut worst = Residual {
        max_abs: 0.0,
        at_x: pts[1].0,
    };
    for i in 1..pts.len() - 1 {
        let Some(s) = three_point_slope(pts, i) else {
            continue;
        };
        let (x, y) = pts[i];
        let r = (y - (x * s + p.f_at(s)?)).abs();
        if r > worst.max_abs {
            worst = Residual { max_abs: r, at_x: x };
        }
    }
    Ok(worst)
}

/// `d(m) = m x(m) - y(x(m))` with `x(m)` inverting `y'`: the `f = -d` of
/// the Clairaut equation whose singular solution is `y`.
pub fn clairaut_from_function(y: &Expression, x_lo: f64, x_hi: f64, m_grid: &[f64]) -> Result<SampledFunction> {
    let inv = SlopeInverse::new(y, x_lo, x_hi)?;
    let ds = m_grid
        .iter()
        .map(|&m| {
            let x = inv.x_of(m)?;
            let yx = y.eval(x).map_err(|e| Error::domain(x, e))?;
            Ok(x * m - yx)
        })
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(m_grid.to_vec(), ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(f: &str, lo: f64, hi: f64) -> ClairautProblem {
        ClairautProblem::new(Expression::parse(f, "s").unwrap(), lo, hi).unwrap()
    }

    #[test]
    fn general_examples() {
        let p = problem("-exp(s)", -1.0, 1.0);
        let l = general_solution(&p, 1.0).unwrap();
        assert!(l.approx_eq(&Line::from_slope_intercept(1.0, -std::f64::consts::E).unwrap(), 1e-15));
        let p = problem("-s^2/2", -2.0, 2.0);
        assert_eq!(general_solution(&p, 0.0).unwrap().slope_intercept(), Some((0.0, 0.0)));
        let p = problem("1/s", 0.5, 2.0);
        assert_eq!(general_solution(&p, 1.0).unwrap().slope_intercept(), Some((1.0, 1.0)));
    }

    #[test]
    fn singular_examples() {
        let p = problem("-exp(s)", -1.0, 1.0);
        let sol = singular_solution(&p, 3).unwrap();
        assert_eq!(sol.curve.points()[1], (1.0, -1.0));
        let p = problem("-s^2/2", -2.0, 2.0);
        let sol = singular_solution(&p, 41).unwrap();
        for (&t, &(x, y)) in sol.curve.ts().iter().zip(sol.curve.points()) {
            assert_eq!(x, t);
            assert!((y - x * x / 2.0).abs() < 1e-15);
        }
        let p = problem("s", -1.0, 1.0);
        assert!(matches!(singular_solution(&p, 11), Err(Error::LinearClairautFunction)));
    }

    #[test]
    fn residual_examples() {
        let p = problem("-exp(s)", -1.0, 1.0);
        let sol = singular_solution(&p, 401).unwrap();
        assert!(residual(&p, &sol.curve).unwrap().max_abs <= 1e-4);

        let e = std::f64::consts::E;
        let ts = vec![0.0, 1.0, 2.0];
        let line = ParametricCurve::new(ts.clone(), ts.iter().map(|&x| (x, x - e)).collect()).unwrap();
        assert!(residual(&p, &line).unwrap().max_abs <= 1e-12);

        let xs = linspace(0.5, 2.0, 51);
        let wrong = ParametricCurve::new(xs.clone(), xs.iter().map(|&x| (x, x * x)).collect()).unwrap();
        assert!(residual(&p, &wrong).unwrap().max_abs > 0.1);
    }

    #[test]
    fn from_function_examples() {
        let x = |s: &str| Expression::parse(s, "x").unwrap();
        let d = clairaut_from_function(&x("exp(x)"), -3.0, 3.0, &[1.0, 2.0]).unwrap();
        assert!((d.ys()[0] + 1.0).abs() < 1e-12);
        let d = clairaut_from_function(&x("x^2/2"), -4.0, 4.0, &[1.0, 2.0]).unwrap();
        assert!((d.ys()[1] - 2.0).abs() < 1e-12);
        let d = clairaut_from_function(&x("x*ln(x) - x"), 0.5, 4.0, &[2f64.ln(), 1.0]).unwrap();
        assert!((d.ys()[0] - 2.0).abs() < 1e-12);
    }
}
