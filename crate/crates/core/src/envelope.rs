//! Envelopes of one-parameter line families `y = m(k) x + b(k)`.
//!
//! Each envelope point is `x = -b'(k)/m'(k)`, `y = m(k) x + b(k)` with
//! symbolic derivatives, so every emitted point lies on its generating
//! line up to the rounding of one multiply-add.

use serde::Serialize;

use crate::curve::ParametricCurve;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::numeric::linspace;

/// Relative threshold below which `m'(k)` counts as zero.
pub const SLOPE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyForm {
    /// second expression is `b(k)`
    SlopeIntercept,
    /// second expression is `d(k)` and `b(k) = -d(k)`
    SlopeNegIntercept,
}

#[derive(Debug, Clone)]
pub struct LineFamily {
    m: Expression,
    second: Expression,
    dm: Expression,
    dsecond: Expression,
    k_lo: f64,
    k_hi: f64,
    form: FamilyForm,
}

impl LineFamily {
    pub fn new(
        m: Expression,
        second: Expression,
        k_lo: f64,
        k_hi: f64,
        form: FamilyForm,
    ) -> Result<LineFamily> {
        if !(k_lo < k_hi) {
            return Err(Error::InvalidInput(format!(
                "parameter interval needs k_lo < k_hi, got [{k_lo}, {k_hi}]"
            )));
        }
        let dm = m.derivative();
        let dsecond = second.derivative();
        Ok(LineFamily {
            m,
            second,
            dm,
            dsecond,
            k_lo,
            k_hi,
            form,
        })
    }

    /// The family of tangent lines of `y` with the contact abscissa as
    /// parameter: `m(h) = y'(h)`, `b(h) = y(h) - h y'(h)`.
    pub fn tangents_of(y: &Expression, h_lo: f64, h_hi: f64) -> Result<LineFamily> {
        let var = y.var().to_string();
        let slope = y.derivative();
        let b = Expression::parse(&format!("({y}) - {var}*({slope})"), &var)?;
        LineFamily::new(slope, b, h_lo, h_hi, FamilyForm::SlopeIntercept)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.k_lo, self.k_hi)
    }

    pub fn form(&self) -> FamilyForm {
        self.form
    }

    fn sign(&self) -> f64 {
        match self.form {
            FamilyForm::SlopeIntercept => 1.0,
            FamilyForm::SlopeNegIntercept => -1.0,
        }
    }

    pub fn m_at(&self, k: f64) -> Result<f64> {
        self.m.eval(k).map_err(|e| Error::domain(k, e))
    }

    pub fn b_at(&self, k: f64) -> Result<f64> {
        Ok(self.sign() * self.second.eval(k).map_err(|e| Error::domain(k, e))?)
    }

    fn derivs_at(&self, k: f64) -> Result<(f64, f64)> {
        let dm = self.dm.eval(k).map_err(|e| Error::domain(k, e))?;
        let db = self.sign() * self.dsecond.eval(k).map_err(|e| Error::domain(k, e))?;
        Ok((dm, db))
    }

    /// Envelope point at `k`, or `None` when `m'(k)` is degenerate.
    pub fn envelope_at(&self, k: f64) -> Result<Option<(f64, f64)>> {
        let m = self.m_at(k)?;
        let b = self.b_at(k)?;
        let (dm, db) = self.derivs_at(k)?;
        if dm.abs() < SLOPE_EPS * (1.0 + m.abs()) {
            return Ok(None);
        }
        let x = -db / dm;
        Ok(Some((x, m.mul_add(x, b))))
    }
}

#[derive(Debug, Clone)]
pub struct Envelope {
    pub curve: ParametricCurve,
    /// Grid parameters skipped for a degenerate slope derivative or a
    /// domain error.
    pub skipped: Vec<f64>,
}

pub fn envelope_of_family(fam: &LineFamily, n: usize) -> Result<Envelope> {
    if n < 2 {
        return Err(Error::InvalidInput("envelope grid needs n >= 2".into()));
    }
    let mut ts = Vec::with_capacity(n);
    let mut pts = Vec::with_capacity(n);
    let mut skipped = Vec::new();
    for k in linspace(fam.k_lo, fam.k_hi, n) {
        match fam.envelope_at(k) {
            Ok(Some(p)) if p.0.is_finite() && p.1.is_finite() => {
                ts.push(k);
                pts.push(p);
            }
            _ => skipped.push(k),
        }
    }
    if ts.is_empty() {
        return Err(Error::AllPointsDegenerate);
    }
    Ok(Envelope {
        curve: ParametricCurve::new(ts, pts)?,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangencyReport {
    pub max_point_residual: f64,
    pub max_slope_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Slope of the curve at interior index `i` from its two neighbours,
/// exact for quadratics in `x` on nonuniform spacing.
pub(crate) fn three_point_slope(p: &[(f64, f64)], i: usize) -> Option<f64> {
    let (x0, y0) = p[i - 1];
    let (x1, y1) = p[i];
    let (x2, y2) = p[i + 1];
    let h1 = x1 - x0;
    let h2 = x2 - x1;
    if h1 == 0.0 || h2 == 0.0 || h1 + h2 == 0.0 {
        return None;
    }
    let left = (y1 - y0) / h1;
    let right = (y2 - y1) / h2;
    Some((h1 * right + h2 * left) / (h1 + h2))
}

/// Point residuals at every curve point; slope residuals at interior
/// points, where the curve's parameters are read as family parameters.
pub fn verify_tangency(curve: &ParametricCurve, fam: &LineFamily, tol: f64) -> Result<TangencyReport> {
    let pts = curve.points();
    let ts = curve.ts();
    let mut point_res = 0.0f64;
    let mut slope_res = 0.0f64;
    for (i, (&k, &(x, y))) in ts.iter().zip(pts).enumerate() {
        let m = fam.m_at(k)?;
        let b = fam.b_at(k)?;
        point_res = point_res.max((y - m.mul_add(x, b)).abs());
        if i > 0 && i + 1 < pts.len() {
            if let Some(s) = three_point_slope(pts, i) {
                slope_res = slope_res.max((s - m).abs());
            }
        }
    }
    Ok(TangencyReport {
        max_point_residual: point_res,
        max_slope_residual: slope_res,
        tol,
        pass: point_res <= tol && slope_res <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> Expression {
        Expression::parse(s, "k").unwrap()
    }

    fn example_family() -> LineFamily {
        LineFamily::new(k("(k-1)^3"), k("(k-1)^(-3)"), 1.5, 3.0, FamilyForm::SlopeIntercept).unwrap()
    }

    #[test]
    fn example_family_point_at_two() {
        let (x, y) = example_family().envelope_at(2.0).unwrap().unwrap();
        assert!((x - 1.0).abs() < 1e-15 && (y - 2.0).abs() < 1e-15);
    }

    #[test]
    fn parabola_family() {
        let fam = LineFamily::new(k("k"), k("-k^2/2"), -1.0, 1.0, FamilyForm::SlopeIntercept).unwrap();
        assert_eq!(fam.envelope_at(1.0).unwrap(), Some((1.0, 0.5)));
        let env = envelope_of_family(&fam, 201).unwrap();
        assert!(env.skipped.is_empty());
        for &(x, y) in env.curve.points() {
            assert!((y - x * x / 2.0).abs() < 1e-15);
        }
        let rep = verify_tangency(&env.curve, &fam, 1e-3).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn negated_intercept_form() {
        // y = k x - k^2/2 written with d(k) = k^2/2
        let fam = LineFamily::new(k("k"), k("k^2/2"), -1.0, 1.0, FamilyForm::SlopeNegIntercept).unwrap();
        assert_eq!(fam.envelope_at(1.0).unwrap(), Some((1.0, 0.5)));
    }

    #[test]
    fn parallel_lines_have_no_envelope() {
        let fam = LineFamily::new(k("3"), k("k"), 0.0, 1.0, FamilyForm::SlopeIntercept).unwrap();
        assert!(matches!(envelope_of_family(&fam, 11), Err(Error::AllPointsDegenerate)));
    }

    #[test]
    fn example_family_tangency() {
        let fam = example_family();
        let env = envelope_of_family(&fam, 10001).unwrap();
        let rep = verify_tangency(&env.curve, &fam, 1e-6).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_point_residual <= 1e-12);
    }

    #[test]
    fn tangents_parameterized_by_contact_point() {
        let y = Expression::parse("2*x^(1/2)", "x").unwrap();
        let fam = LineFamily::tangents_of(&y, 0.25, 4.0).unwrap();
        let env = envelope_of_family(&fam, 4001).unwrap();
        for (&h, &(x, yy)) in env.curve.ts().iter().zip(env.curve.points()) {
            assert!((x - h).abs() <= 1e-12 * h);
            assert!((yy - 2.0 * h.sqrt()).abs() <= 1e-12);
        }
        let rep = verify_tangency(&env.curve, &fam, 1e-4).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
}
