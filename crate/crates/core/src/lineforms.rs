//! The five standard forms of a line and conversions among them.
//!
//! | form | equation | fails for |
//! |------|----------|-----------|
//! | `si`    | `y = m x + b`            | vertical lines |
//! | `snd`   | `y = m x - d`            | vertical lines |
//! | `dp`    | `u x + v y = 1`          | lines through the origin |
//! | `fp`    | `y = m x + (1 - m) t`    | lines parallel to `y = x` |
//! | `polar` | `cos(phi) x + sin(phi) y = D` | nothing |
//!
//! Conversions go through slope-intercept coefficients. Vertical lines
//! have none, so they reach `dp` and `polar` through the general form.
//! Lines through the origin are stored in polar form as `(0, phi)` with
//! `0 <= phi < pi`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::curve::Line;
use crate::error::{Error, Result};

/// Relative tolerance for the breakdown tests on normalized lines.
const BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Form {
    #[serde(rename = "si")]
    SlopeIntercept,
    #[serde(rename = "snd")]
    SlopeNegIntercept,
    #[serde(rename = "dp")]
    DotProduct,
    #[serde(rename = "fp")]
    FixedPoint,
    #[serde(rename = "polar")]
    Polar,
}

impl Form {
    pub const ALL: [Form; 5] = [
        Form::SlopeIntercept,
        Form::SlopeNegIntercept,
        Form::DotProduct,
        Form::FixedPoint,
        Form::Polar,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Form::SlopeIntercept => "si",
            Form::SlopeNegIntercept => "snd",
            Form::DotProduct => "dp",
            Form::FixedPoint => "fp",
            Form::Polar => "polar",
        }
    }

    /// Coefficient names in storage order.
    pub fn keys(self) -> [&'static str; 2] {
        match self {
            Form::SlopeIntercept => ["m", "b"],
            Form::SlopeNegIntercept => ["m", "d"],
            Form::DotProduct => ["u", "v"],
            Form::FixedPoint => ["m", "t"],
            Form::Polar => ["D", "phi"],
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Form> {
        Form::ALL
            .into_iter()
            .find(|f| f.short_name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown line form `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BreakdownReason {
    Vertical,
    ThroughOrigin,
    ParallelToIdentity,
}

impl fmt::Display for BreakdownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BreakdownReason::Vertical => "vertical",
            BreakdownReason::ThroughOrigin => "through origin",
            BreakdownReason::ParallelToIdentity => "parallel to y = x",
        })
    }
}

/// A line given by the two coefficients of one standard form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormCoefficients {
    form: Form,
    coeffs: [f64; 2],
}

impl FormCoefficients {
    pub fn new(form: Form, first: f64, second: f64) -> Result<FormCoefficients> {
        if !(first.is_finite() && second.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        match form {
            Form::DotProduct if first == 0.0 && second == 0.0 => {
                return Err(Error::InvalidInput("dot-product form needs (u, v) != (0, 0)".into()))
            }
            Form::Polar => {
                let (dist, phi) = (first, second);
                if dist < 0.0 {
                    return Err(Error::InvalidInput("polar distance D must be >= 0".into()));
                }
                let limit = if dist == 0.0 { PI } else { TAU };
                if !(0.0..limit).contains(&phi) {
                    return Err(Error::InvalidInput(format!(
                        "polar angle must lie in [0, {limit}) for D = {dist}"
                    )));
                }
            }
            _ => {}
        }
        Ok(FormCoefficients {
            form,
            coeffs: [first, second],
        })
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn coeffs(&self) -> [f64; 2] {
        self.coeffs
    }

    /// Parse `form:key=val,key=val`, e.g. `si:m=2,b=1`.
    pub fn parse(text: &str) -> Result<FormCoefficients> {
        let bad = || Error::InvalidInput(format!("malformed line `{text}`"));
        let (form, rest) = text.split_once(':').ok_or_else(bad)?;
        let form: Form = form.trim().parse()?;
        let keys = form.keys();
        let mut vals = [None, None];
        for part in rest.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            let slot = keys.iter().position(|key| *key == k.trim()).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "form {form} takes keys {} and {}, not `{}`",
                    keys[0],
                    keys[1],
                    k.trim()
                ))
            })?;
            vals[slot] = Some(v);
        }
        match vals {
            [Some(a), Some(b)] => FormCoefficients::new(form, a, b),
            _ => Err(bad()),
        }
    }
}

fn breakdown(form: Form, reason: BreakdownReason) -> Error {
    Error::Breakdown { form, reason }
}

/// General-form line for a set of form coefficients.
pub fn to_general(fc: &FormCoefficients) -> Line {
    let [p, q] = fc.coeffs;
    let line = match fc.form {
        Form::SlopeIntercept => Line::new(p, -1.0, q),
        Form::SlopeNegIntercept => Line::new(p, -1.0, -q),
        Form::DotProduct => Line::new(p, q, -1.0),
        Form::FixedPoint => Line::new(p, -1.0, (1.0 - p) * q),
        Form::Polar => Line::new(q.cos(), q.sin(), -p),
    };
    line.expect("validated form coefficients always give a proper line")
}

/// Whether `l` can be written in `target` form.
pub fn breakdown_check(l: &Line, target: Form) -> Result<()> {
    let [a, b, c] = l.coefficients();
    let vertical = l.is_vertical();
    let through_origin = c.abs() <= BREAKDOWN_TOL * (a.abs() + b.abs());
    match target {
        Form::SlopeIntercept | Form::SlopeNegIntercept if vertical => {
            Err(breakdown(target, BreakdownReason::Vertical))
        }
        Form::FixedPoint if vertical => Err(breakdown(target, BreakdownReason::Vertical)),
        // slope -a/b == 1 with a normalized to 1 means b == -1
        Form::FixedPoint if (a + b).abs() <= BREAKDOWN_TOL * (a.abs() + b.abs()) => {
            Err(breakdown(target, BreakdownReason::ParallelToIdentity))
        }
        Form::DotProduct if through_origin => {
            Err(breakdown(target, BreakdownReason::ThroughOrigin))
        }
        _ => Ok(()),
    }
}

/// Slope-intercept hub coordinates of `fc`.
fn to_hub(fc: &FormCoefficients) -> Result<(f64, f64)> {
    let [p, q] = fc.coeffs;
    match fc.form {
        Form::SlopeIntercept => Ok((p, q)),
        Form::SlopeNegIntercept => Ok((p, -q)),
        Form::DotProduct => {
            if q == 0.0 {
                return Err(breakdown(Form::SlopeIntercept, BreakdownReason::Vertical));
            }
            Ok((-p / q, 1.0 / q))
        }
        Form::FixedPoint => Ok((p, (1.0 - p) * q)),
        Form::Polar => {
            let (s, c) = q.sin_cos();
            if s.abs() <= f64::EPSILON {
                return Err(breakdown(Form::SlopeIntercept, BreakdownReason::Vertical));
            }
            Ok((-c / s, p / s))
        }
    }
}

/// Polar angle for a line through the origin with normal `(a, b)`,
/// reduced to `[0, pi)`.
fn origin_angle(a: f64, b: f64) -> f64 {
    let mut phi = b.atan2(a);
    if phi < 0.0 {
        phi += PI;
    }
    if phi >= PI {
        phi -= PI;
    }
    phi
}

fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn from_hub(m: f64, b: f64, target: Form) -> Result<FormCoefficients> {
    let (p, q) = match target {
        Form::SlopeIntercept => (m, b),
        Form::SlopeNegIntercept => (m, -b),
        Form::DotProduct => {
            if b == 0.0 {
                return Err(breakdown(target, BreakdownReason::ThroughOrigin));
            }
            (-m / b, 1.0 / b)
        }
        Form::FixedPoint => {
            if m == 1.0 {
                return Err(breakdown(target, BreakdownReason::ParallelToIdentity));
            }
            (m, b / (1.0 - m))
        }
        Form::Polar => {
            let dist = b.abs() / m.hypot(1.0);
            if b == 0.0 {
                (0.0, origin_angle(-m, 1.0))
            } else {
                // (D cos phi, D sin phi) is the foot of the perpendicular from the origin
                (dist, wrap_angle(b.atan2(-b * m)))
            }
        }
    };
    FormCoefficients::new(target, p, q)
}

/// Direct conversion from the general form, used when the hub is unavailable.
pub fn from_general(l: &Line, target: Form) -> Result<FormCoefficients> {
    breakdown_check(l, target)?;
    let [a, b, c] = l.coefficients();
    match target {
        Form::DotProduct => FormCoefficients::new(target, -a / c, -b / c),
        Form::Polar => {
            let norm = a.hypot(b);
            let dist = c.abs() / norm;
            if dist <= BREAKDOWN_TOL {
                return FormCoefficients::new(target, 0.0, origin_angle(a, b));
            }
            // the foot of the perpendicular is -c (a, b) / |n|^2
            let phi = wrap_angle((-c * b).atan2(-c * a));
            FormCoefficients::new(target, dist, phi)
        }
        _ => {
            let (m, icpt) = l
                .slope_intercept()
                .ok_or_else(|| breakdown(target, BreakdownReason::Vertical))?;
            from_hub(m, icpt, target)
        }
    }
}

/// Convert `fc` to `target` form through the slope-intercept hub.
pub fn convert(fc: &FormCoefficients, target: Form) -> Result<FormCoefficients> {
    if fc.form == target {
        return Ok(*fc);
    }
    match to_hub(fc) {
        Ok((m, b)) => {
            let line = Line::from_slope_intercept(m, b)?;
            breakdown_check(&line, target)?;
            from_hub(m, b, target)
        }
        Err(err) => match target {
            Form::DotProduct | Form::Polar => from_general(&to_general(fc), target),
            _ => Err(match err {
                Error::Breakdown { reason, .. } => breakdown(target, reason),
                other => other,
            }),
        },
    }
}

/// Read `pt` as a line's coefficients in `from` form and return the same
/// line's coefficients in `to` form.
pub fn dual_point_map(pt: (f64, f64), from: Form, to: Form) -> Result<(f64, f64)> {
    let fc = FormCoefficients::new(from, pt.0, pt.1)?;
    let out = convert(&fc, to).map_err(|e| match e {
        Error::Breakdown { form, reason } => Error::InvalidInput(format!(
            "point ({}, {}) in {from} space has no {form} image: {reason}",
            pt.0, pt.1
        )),
        other => other,
    })?;
    let [p, q] = out.coeffs;
    Ok((p, q))
}
