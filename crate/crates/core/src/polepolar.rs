//! Poles and polars with respect to a non-degenerate conic
//! `A x^2 + 2B xy + C y^2 + 2D x + 2E y + F = 0`, stored as the symmetric
//! matrix `[[A, B, D], [B, C, E], [D, E, F]]`.
//!
//! The polar of `(a, b)` is the line with coefficients `Q (a, b, 1)`; the
//! pole of a line is `Q^-1` applied to its coefficients. Two geometric
//! constructions, chords of `y = x^2/2` and inversion in the unit circle,
//! are kept independent of the matrix route so each can check the other.

use serde::Serialize;

use crate::curve::Line;
use crate::error::{Error, Result};
use crate::lineforms::{from_general, Form};
use crate::numeric::linspace;

/// Homogeneous tolerance after scaling by the largest entry.
const HOMOGENEOUS_EPS: f64 = 1e-12;
/// `|discriminant|` at or below this (normalized) counts as tangency.
const TANGENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConicMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl ConicMatrix {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<ConicMatrix> {
        let q = ConicMatrix { a, b, c, d, e, f };
        let entries = [a, b, c, d, e, f];
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("conic entries must be finite".into()));
        }
        let scale = max_abs(&entries);
        if scale == 0.0 || (q.det() / (scale * scale * scale)).abs() <= HOMOGENEOUS_EPS {
            return Err(Error::SingularConic);
        }
        Ok(q)
    }

    /// `y = x^2/2`, the conic of slope/negated-intercept duality.
    pub fn parabola() -> ConicMatrix {
        ConicMatrix::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0).expect("parabola is non-degenerate")
    }

    /// `x^2 + y^2 = 1`, the conic of dot-product duality.
    pub fn unit_circle() -> ConicMatrix {
        ConicMatrix::new(1.0, 0.0, 1.0, 0.0, 0.0, -1.0).expect("circle is non-degenerate")
    }

    /// `parabola`, `circle`, or six comma-separated entries `A,B,C,D,E,F`.
    pub fn parse(s: &str) -> Result<ConicMatrix> {
        match s.trim() {
            "parabola" => Ok(ConicMatrix::parabola()),
            "circle" => Ok(ConicMatrix::unit_circle()),
            other => {
                let v: Vec<f64> = other
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidInput(format!("malformed conic `{s}`")))?;
                match v[..] {
                    [a, b, c, d, e, f] => ConicMatrix::new(a, b, c, d, e, f),
                    _ => Err(Error::InvalidInput(format!("conic needs six entries, got `{s}`"))),
                }
            }
        }
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        [[self.a, self.b, self.d], [self.b, self.c, self.e], [self.d, self.e, self.f]]
    }

    pub fn det(&self) -> f64 {
        let [[a, b, d], [_, c, e], [_, _, f]] = self.rows();
        a * (c * f - e * e) - b * (b * f - e * d) + d * (b * e - c * d)
    }

    /// Adjugate; symmetric because the matrix is.
    fn adjugate(&self) -> [[f64; 3]; 3] {
        let [[a, b, d], [_, c, e], [_, _, f]] = self.rows();
        let (aa, bb, cc) = (c * f - e * e, a * f - d * d, a * c - b * b);
        let (ab, ad, be) = (d * e - b * f, b * e - c * d, b * d - a * e);
        [[aa, ab, ad], [ab, bb, be], [ad, be, cc]]
    }

    fn apply(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
        let row = |r: [f64; 3]| r[0] * v[0] + r[1] * v[1] + r[2] * v[2];
        [row(m[0]), row(m[1]), row(m[2])]
    }

    /// The quadratic form at the affine point `(x, y)`.
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        let v = [x, y, 1.0];
        let qv = ConicMatrix::apply(&self.rows(), v);
        v[0] * qv[0] + v[1] * qv[1] + v[2] * qv[2]
    }
}

pub fn polar_of_pole(q: &ConicMatrix, p: (f64, f64)) -> Result<Line> {
    let [al, be, de] = ConicMatrix::apply(&q.rows(), [p.0, p.1, 1.0]);
    let scale = max_abs(&[al, be, de]);
    if max_abs(&[al, be]) <= HOMOGENEOUS_EPS * scale {
        return Err(Error::DegeneratePolar);
    }
    Line::new(al, be, de)
}

pub fn pole_of_polar(q: &ConicMatrix, l: &Line) -> Result<(f64, f64)> {
    let adj = q.adjugate();
    let det = q.det();
    let v = ConicMatrix::apply(&adj, l.coefficients()).map(|x| x / det);
    let scale = max_abs(&v);
    if v[2].abs() <= HOMOGENEOUS_EPS * scale {
        return Err(Error::PoleAtInfinity);
    }
    Ok((v[0] / v[2], v[1] / v[2]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Inside,
    On,
    Outside,
}

/// Position of `p` by the number of real intersections of its polar with
/// the conic: none inside, one on, two outside. A polar meeting the conic
/// once without tangency (parallel to an asymptote or axis) counts as
/// outside.
pub fn classify_position(q: &ConicMatrix, p: (f64, f64)) -> Result<Position> {
    let l = polar_of_pole(q, p)?;
    let [al, be, de] = l.coefficients();
    let n2 = al * al + be * be;
    let p0 = [-de * al / n2, -de * be / n2, 1.0];
    let dir = [-be, al, 0.0];
    let rows = q.rows();
    let qd = ConicMatrix::apply(&rows, dir);
    let qp = ConicMatrix::apply(&rows, p0);
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let (a2, a1, a0) = (dot(dir, qd), 2.0 * dot(dir, qp), dot(p0, qp));
    let qscale = max_abs(&[q.a, q.b, q.c, q.d, q.e, q.f]);
    if a2.abs() <= HOMOGENEOUS_EPS * qscale * n2 {
        return Ok(Position::Outside);
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let norm = a1 * a1 + (4.0 * a2 * a0).abs();
    if norm == 0.0 || disc.abs() <= TANGENT_EPS * norm {
        Ok(Position::On)
    } else if disc < 0.0 {
        Ok(Position::Inside)
    } else {
        Ok(Position::Outside)
    }
}

/// Line through the two points of `y = x^2/2` cut by a line of slope `a`
/// through the pole `(m, d)`'s polar: slope `(a^2 - 2d)/(2(a - m))`,
/// intercept `-a (m a - 2d)/(2(a - m))`.
pub fn chord_line(m: f64, d: f64, a: f64) -> Result<(f64, f64)> {
    if a == m {
        return Err(Error::ChordParameterEqualsSlope);
    }
    let den = 2.0 * (a - m);
    Ok(((a * a - 2.0 * d) / den, -a * (m * a - 2.0 * d) / den))
}

/// Pole of `y = m x - d` with respect to `y = x^2/2`, as the intersection
/// of two chord lines.
pub fn pole_via_chords(m: f64, d: f64, a1: f64, a2: f64) -> Result<(f64, f64)> {
    let (s1, c1) = chord_line(m, d, a1)?;
    let (s2, c2) = chord_line(m, d, a2)?;
    let ds = s1 - s2;
    if ds.abs() <= HOMOGENEOUS_EPS * s1.abs().max(s2.abs()).max(1.0) {
        return Err(Error::ParallelChords);
    }
    let x = (c2 - c1) / ds;
    Ok((x, s1 * x + c1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionPole {
    /// Foot of the perpendicular from the origin to the line.
    pub foot: (f64, f64),
    /// Inverse of the foot in the unit circle.
    pub pole: (f64, f64),
    /// `|OQ| |OT|`, 1 for an inversion.
    pub distance_product: f64,
}

/// Pole of a line with respect to the unit circle, by inverting the foot
/// of the perpendicular from the origin.
pub fn pole_via_inversion(l: &Line) -> Result<InversionPole> {
    let [u, v] = from_general(l, Form::DotProduct)?.coeffs();
    let r2 = u * u + v * v;
    let foot = (u / r2, v / r2);
    let f2 = foot.0 * foot.0 + foot.1 * foot.1;
    let pole = (foot.0 / f2, foot.1 / f2);
    Ok(InversionPole {
        foot,
        pole,
        distance_product: f2.sqrt() * (pole.0 * pole.0 + pole.1 * pole.1).sqrt(),
    })
}

/// Points on the conic used by the tangency self-test, with the tangent
/// line at each.
fn tangency_samples(form: Form) -> Vec<((f64, f64), Line)> {
    match form {
        Form::SlopeNegIntercept => linspace(-4.0, 4.0, 17)
            .into_iter()
            .map(|x| {
                let t = Line::from_slope_neg_intercept(x, x * x / 2.0).expect("finite tangent");
                ((x, x * x / 2.0), t)
            })
            .collect(),
        _ => (0..17)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / 17.0;
                let (s, c) = th.sin_cos();
                ((c, s), Line::new(c, s, -1.0).expect("unit normal"))
            })
            .collect(),
    }
}

/// The conic whose pole/polar map is the duality of `form`: the parabola
/// for slope/negated-intercept, the unit circle for dot-product. Checked
/// on return: the polar of each of 17 points on the conic is the tangent
/// there.
pub fn duality_conic(form: Form) -> Result<ConicMatrix> {
    let q = match form {
        Form::SlopeNegIntercept => ConicMatrix::parabola(),
        Form::DotProduct => ConicMatrix::unit_circle(),
        other => {
            return Err(Error::InvalidInput(format!(
                "no duality conic for the {other} form; use snd or dp"
            )))
        }
    };
    for (p, tangent) in tangency_samples(form) {
        if !polar_of_pole(&q, p)?.approx_eq(&tangent, 1e-12) {
            return Err(Error::ConstraintViolation(format!(
                "polar of ({}, {}) is not the tangent there",
                p.0, p.1
            )));
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_examples() {
        let l = polar_of_pole(&ConicMatrix::parabola(), (3.0, 2.0)).unwrap();
        assert_eq!(l.slope_intercept(), Some((3.0, -2.0)));
        let l = polar_of_pole(&ConicMatrix::unit_circle(), (1.0, 1.0)).unwrap();
        assert!(l.approx_eq(&Line::new(1.0, 1.0, -1.0).unwrap(), 1e-15));
        assert_eq!(
            polar_of_pole(&ConicMatrix::unit_circle(), (0.0, 0.0)),
            Err(Error::DegeneratePolar)
        );
    }

    #[test]
    fn pole_examples() {
        let q = ConicMatrix::parabola();
        let l = Line::from_slope_neg_intercept(2.0, 1.0).unwrap();
        assert_eq!(pole_of_polar(&q, &l).unwrap(), (2.0, 1.0));
        let c = ConicMatrix::unit_circle();
        assert_eq!(pole_of_polar(&c, &Line::new(1.0, 1.0, -1.0).unwrap()).unwrap(), (1.0, 1.0));
        // x = 1 maps to (1, 1, 0): at infinity
        let vertical = Line::new(1.0, 0.0, -1.0).unwrap();
        assert_eq!(pole_of_polar(&q, &vertical), Err(Error::PoleAtInfinity));
        // the x-axis maps to (0, 0, 1)
        let axis = Line::new(0.0, -1.0, 0.0).unwrap();
        assert_eq!(pole_of_polar(&q, &axis).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn positions() {
        let q = ConicMatrix::parabola();
        assert_eq!(classify_position(&q, (0.0, 1.0)).unwrap(), Position::Inside);
        assert_eq!(classify_position(&q, (1.0, 0.5)).unwrap(), Position::On);
        assert_eq!(classify_position(&q, (0.0, -1.0)).unwrap(), Position::Outside);
        let c = ConicMatrix::unit_circle();
        assert_eq!(classify_position(&c, (0.2, 0.3)).unwrap(), Position::Inside);
        assert_eq!(classify_position(&c, (0.6, 0.8)).unwrap(), Position::On);
        assert_eq!(classify_position(&c, (2.0, 0.0)).unwrap(), Position::Outside);
        assert!(classify_position(&c, (0.0, 0.0)).is_err());
    }

    #[test]
    fn chords() {
        assert_eq!(pole_via_chords(2.0, 1.0, 0.0, 3.0).unwrap(), (2.0, 1.0));
        let (x, y) = pole_via_chords(0.0, 2.0, 1.0, -1.0).unwrap();
        assert!(x.abs() < 1e-15 && (y - 2.0).abs() < 1e-15);
        assert_eq!(pole_via_chords(2.0, 1.0, 2.0, 3.0), Err(Error::ChordParameterEqualsSlope));
    }

    #[test]
    fn inversion() {
        let r = pole_via_inversion(&Line::new(1.0, 1.0, -1.0).unwrap()).unwrap();
        assert_eq!(r.foot, (0.5, 0.5));
        assert!((r.pole.0 - 1.0).abs() < 1e-15 && (r.pole.1 - 1.0).abs() < 1e-15);
        assert!((r.distance_product - 1.0).abs() < 1e-15);
        let r = pole_via_inversion(&Line::new(0.0, 1.0, -1.0).unwrap()).unwrap();
        assert_eq!((r.foot, r.pole), ((0.0, 1.0), (0.0, 1.0)));
        let r = pole_via_inversion(&Line::new(3.0, 4.0, -1.0).unwrap()).unwrap();
        assert!((r.foot.0 - 0.12).abs() < 1e-16 && (r.foot.1 - 0.16).abs() < 1e-16);
        assert!((r.pole.0 - 3.0).abs() < 1e-14 && (r.pole.1 - 4.0).abs() < 1e-14);
        assert!(pole_via_inversion(&Line::new(1.0, 1.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn duality_conics() {
        assert_eq!(duality_conic(Form::SlopeNegIntercept).unwrap(), ConicMatrix::parabola());
        assert_eq!(duality_conic(Form::DotProduct).unwrap(), ConicMatrix::unit_circle());
        assert!(duality_conic(Form::Polar).is_err());
        let l = polar_of_pole(&ConicMatrix::parabola(), (2.0, 2.0)).unwrap();
        assert_eq!(l.slope_intercept(), Some((2.0, -2.0)));
    }

    #[test]
    fn singular_conic_rejected() {
        assert_eq!(ConicMatrix::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0), Err(Error::SingularConic));
        assert_eq!(ConicMatrix::parse("1,0,1,0,0,-1").unwrap(), ConicMatrix::unit_circle());
        assert!(ConicMatrix::parse("1,0,1").is_err());
    }
}
