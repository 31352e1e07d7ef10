//! Closed-form transform pairs and the rules that derive new pairs from
//! old ones. Every pair checks `y(x) + d(y'(x)) = x y'(x)` on 64 points of
//! its sample window when it is built.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::Serialize;

use crate::curve::Convexity;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::numeric::linspace;

const SELF_TEST_POINTS: usize = 64;
const SELF_TEST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Interval {
        Interval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn open(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi, true, true)
    }

    pub fn real_line() -> Interval {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Image under `x -> k x + shift`, `k != 0`.
    fn affine(self, k: f64, shift: f64) -> Interval {
        let a = k * self.lo + shift;
        let b = k * self.hi + shift;
        if k > 0.0 {
            Interval::new(a, b, self.lo_closed, self.hi_closed)
        } else {
            Interval::new(b, a, self.hi_closed, self.lo_closed)
        }
    }

    /// Image under `x -> 1/x` for an interval on one side of zero.
    fn reciprocal(self) -> Option<Interval> {
        let inv = |v: f64, positive_side: bool| {
            if v == 0.0 {
                if positive_side {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                1.0 / v
            }
        };
        if self.lo >= 0.0 {
            if self.contains(0.0) {
                return None;
            }
            Some(Interval::new(inv(self.hi, true), inv(self.lo, true), self.hi_closed, self.lo_closed))
        } else if self.hi <= 0.0 {
            if self.contains(0.0) {
                return None;
            }
            Some(Interval::new(inv(self.hi, false), inv(self.lo, false), self.hi_closed, self.lo_closed))
        } else {
            None
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Parameters of the transform rules; unused ones are ignored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RuleParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub s: f64,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct CatalogPair {
    name: String,
    params: Vec<(&'static str, f64)>,
    y: Expression,
    d: Expression,
    y_inverse: Option<Expression>,
    x_domain: Interval,
    m_domain: Interval,
    y_range: Option<Interval>,
    window: (f64, f64),
    curvature: Convexity,
}

struct EntryDef<'a> {
    name: String,
    params: Vec<(&'static str, f64)>,
    y: &'a str,
    d: &'a str,
    inverse: Option<&'a str>,
    x_domain: Interval,
    m_domain: Interval,
    y_range: Option<Interval>,
    window: (f64, f64),
}

fn num(v: f64) -> String {
    format!("({v:?})")
}

fn px(s: &str) -> Result<Expression> {
    Ok(Expression::parse(s, "x")?)
}

fn pm(s: &str) -> Result<Expression> {
    Ok(Expression::parse(s, "m")?)
}

fn constraint(msg: impl Into<String>) -> Error {
    Error::ConstraintViolation(msg.into())
}

impl CatalogPair {
    fn from_def(s: EntryDef<'_>) -> Result<CatalogPair> {
        CatalogPair::assemble(
            s.name,
            s.params,
            px(s.y)?,
            pm(s.d)?,
            s.inverse.map(px).transpose()?,
            s.x_domain,
            s.m_domain,
            s.y_range,
            s.window,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        name: String,
        params: Vec<(&'static str, f64)>,
        y: Expression,
        d: Expression,
        y_inverse: Option<Expression>,
        x_domain: Interval,
        m_domain: Interval,
        y_range: Option<Interval>,
        window: (f64, f64),
    ) -> Result<CatalogPair> {
        let d2 = y.derivative().derivative();
        let mut signs = (false, false);
        for x in linspace(window.0, window.1, SELF_TEST_POINTS + 1) {
            let v = d2.eval(x).map_err(|e| Error::domain(x, e))?;
            if v > 0.0 {
                signs.0 = true;
            } else if v < 0.0 {
                signs.1 = true;
            }
        }
        let curvature = match signs {
            (true, false) => Convexity::Convex,
            (false, true) => Convexity::Concave,
            (false, false) => Convexity::Affine,
            (true, true) => Convexity::Mixed,
        };
        let pair = CatalogPair {
            name,
            params,
            y,
            d,
            y_inverse,
            x_domain,
            m_domain,
            y_range,
            window,
            curvature,
        };
        pair.self_test()?;
        Ok(pair)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    pub fn y(&self) -> &Expression {
        &self.y
    }

    pub fn d(&self) -> &Expression {
        &self.d
    }

    pub fn y_inverse(&self) -> Option<&Expression> {
        self.y_inverse.as_ref()
    }

    pub fn x_domain(&self) -> Interval {
        self.x_domain
    }

    pub fn m_domain(&self) -> Interval {
        self.m_domain
    }

    /// A finite closed interval inside the x-domain where `y''` keeps one
    /// sign; the numeric engines sample here.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// Image of the window under `y'`.
    pub fn m_window(&self) -> Result<(f64, f64)> {
        let (a, b) = self.window;
        let (sa, sb) = (self.slope(a)?, self.slope(b)?);
        Ok((sa.min(sb), sa.max(sb)))
    }

    pub fn curvature(&self) -> Convexity {
        self.curvature
    }

    pub fn slope(&self, x: f64) -> Result<f64> {
        self.y.derivative().eval(x).map_err(|e| Error::domain(x, e))
    }

    /// `y(x) + d(y'(x)) - x y'(x)` and the scale it is compared against.
    pub fn fenchel_residual(&self, x: f64) -> Result<(f64, f64)> {
        let y = self.y.eval(x).map_err(|e| Error::domain(x, e))?;
        let m = self.slope(x)?;
        let d = self.d.eval(m).map_err(|e| Error::domain(m, e))?;
        Ok((y + d - x * m, 1.0 + y.abs() + d.abs() + (x * m).abs()))
    }

    /// The load-time Fenchel equality check over the window.
    pub fn self_test(&self) -> Result<()> {
        let (a, b) = self.window;
        for x in linspace(a, b, SELF_TEST_POINTS) {
            let (r, scale) = self.fenchel_residual(x)?;
            if !(r.abs() <= SELF_TEST_TOL * scale) {
                return Err(constraint(format!(
                    "pair `{}` fails y + d(y') = x y' at x = {x} (residual {r:e})",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// `(name, y, d)` for every catalog entry.
pub fn catalog_names() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("power", "x^p/p", "m^q/q"),
        ("circle", "sqrt(1-x^2)", "-sqrt(1+m^2)"),
        ("p-circle", "(1-x^p)^(1/p)", "-(1+(-m)^q)^(1/q)"),
        ("hyperbola", "sqrt(x^2-1)", "sqrt(m^2-1)"),
        ("exp", "exp(x)", "m*ln(m) - m"),
        ("log", "ln(x)", "1 + ln(m)"),
        ("xlogx", "x*ln(x)", "exp(m-1)"),
        ("cos", "cos(x)", "-m*asin(m) - sqrt(1-m^2)"),
    ]
}

fn conjugate_exponent(name: &str, p: Option<f64>) -> Result<(f64, f64)> {
    let p = p.ok_or_else(|| constraint(format!("`{name}` needs the parameter p")))?;
    if !(p.is_finite() && p > 1.0) {
        return Err(constraint(format!("`{name}` needs p > 1, got {p}")));
    }
    Ok((p, p / (p - 1.0)))
}

/// Look up a pair by name; `p` is required by `power` and `p-circle`.
pub fn catalog_lookup(name: &str, p: Option<f64>) -> Result<CatalogPair> {
    let takes_p = matches!(name, "power" | "p-circle");
    if !takes_p && p.is_some() && catalog_names().iter().any(|e| e.0 == name) {
        return Err(constraint(format!("`{name}` takes no parameter")));
    }
    let pos = Interval::open(0.0, f64::INFINITY);
    let def = match name {
        "power" => {
            let (p, q) = conjugate_exponent(name, p)?;
            let (y, d, inv) = (
                format!("x^{}/{}", num(p), num(p)),
                format!("m^{}/{}", num(q), num(q)),
                format!("({}*x)^(1/{})", num(p), num(p)),
            );
            return CatalogPair::from_def(EntryDef {
                name: name.into(),
                params: vec![("p", p), ("q", q)],
                y: &y,
                d: &d,
                inverse: Some(&inv),
                x_domain: pos,
                m_domain: pos,
                y_range: Some(pos),
                window: (0.5, 2.0),
            });
        }
        "p-circle" => {
            let (p, q) = conjugate_exponent(name, p)?;
            let y = format!("(1 - x^{})^(1/{})", num(p), num(p));
            let d = format!("-(1 + (-m)^{})^(1/{})", num(q), num(q));
            return CatalogPair::from_def(EntryDef {
                name: name.into(),
                params: vec![("p", p), ("q", q)],
                y: &y,
                d: &d,
                inverse: Some(&y),
                // the closed end x = 0 has an unbounded slope
                x_domain: Interval::open(0.0, 1.0),
                m_domain: Interval::open(f64::NEG_INFINITY, 0.0),
                y_range: Some(Interval::open(0.0, 1.0)),
                window: (0.1, 0.9),
            });
        }
        "circle" => EntryDef {
            name: name.into(),
            params: Vec::new(),
            y: "sqrt(1 - x^2)",
            d: "-sqrt(1 + m^2)",
            inverse: None,
            x_domain: Interval::open(-1.0, 1.0),
            m_domain: Interval::real_line(),
            y_range: None,
            window: (-0.8, 0.8),
        },
        "hyperbola" => EntryDef {
            name: name.into(),
            params: Vec::new(),
            y: "sqrt(x^2 - 1)",
            d: "sqrt(m^2 - 1)",
            inverse: Some("sqrt(x^2 + 1)"),
            x_domain: Interval::new(1.0, f64::INFINITY, true, false),
            m_domain: Interval::new(1.0, f64::INFINITY, true, false),
            y_range: Some(Interval::new(0.0, f64::INFINITY, true, false)),
            window: (1.25, 4.0),
        },
        "exp" => EntryDef {
            name: name.into(),
            params: Vec::new(),
            y: "exp(x)",
            d: "m*ln(m) - m",
            inverse: Some("ln(x)"),
            x_domain: Interval::real_line(),
            m_domain: pos,
            y_range: Some(pos),
            window: (-2.0, 2.0),
        },
        "log" => EntryDef {
            name: name.into(),
            params: Vec::new(),
            y: "ln(x)",
            d: "1 + ln(m)",
            inverse: Some("exp(x)"),
            x_domain: pos,
            m_domain: pos,
            y_range: Some(Interval::real_line()),
            window: (0.25, 4.0),
        },
        "xlogx" => EntryDef {
            name: name.into(),
            params: Vec::new(),
            y: "x*ln(x)",
            d: "exp(m - 1)",
            inverse: None,
            x_domain: pos,
            m_domain: Interval::real_line(),
            y_range: None,
            window: (0.25, 4.0),
        },
        "cos" => EntryDef {
            name: name.into(),
            params: Vec::new(),
            y: "cos(x)",
            d: "-m*asin(m) - sqrt(1 - m^2)",
            inverse: Some("acos(x)"),
            x_domain: Interval::closed(0.0, FRAC_PI_2),
            m_domain: Interval::closed(-1.0, 0.0),
            y_range: Some(Interval::closed(0.0, 1.0)),
            window: (0.1, 1.4),
        },
        _ => return Err(Error::UnknownCatalogEntry(name.into())),
    };
    CatalogPair::from_def(def)
}

fn nonzero(v: f64, what: &str) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        return Err(constraint(format!("{what} must be finite and nonzero")));
    }
    Ok(())
}

fn compose_x(e: &Expression, inner: &str) -> Result<Expression> {
    Ok(e.compose(&px(inner)?))
}

fn compose_m(e: &Expression, inner: &str) -> Result<Expression> {
    Ok(e.compose(&pm(inner)?))
}

/// Derive a new pair by one of the six transform rules:
///
/// 1. `a y(x)` gives `a d(m/a)`
/// 2. `y(a x)` gives `d(m/a)`
/// 3. `y(x) + a` gives `d(m) - a`
/// 4. `y(x + a)` gives `d(m) - a m`
/// 5. `y^-1(x)` gives `-m d(1/m)`
/// 6. `c y(s x + t) + b x + a` gives `c d((m - b)/(c s)) - t (m - b)/s - a`
pub fn apply_rule(rule: u8, pair: &CatalogPair, k: RuleParams) -> Result<CatalogPair> {
    for (v, n) in [(k.a, "a"), (k.b, "b"), (k.c, "c"), (k.s, "s"), (k.t, "t")] {
        if !v.is_finite() {
            return Err(constraint(format!("parameter {n} must be finite")));
        }
    }
    let (a, b, c, s, t) = (num(k.a), num(k.b), num(k.c), num(k.s), num(k.t));
    let (y, d) = (&pair.y, &pair.d);
    let inv = pair.y_inverse.as_ref();
    let name = format!("rule{rule}({})", pair.name);
    let (w0, w1) = pair.window;
    let sorted = |p: f64, q: f64| (p.min(q), p.max(q));

    let (ny, nd, ninv, xd, md, range, window) = match rule {
        1 => {
            nonzero(k.a, "a")?;
            (
                px(&format!("{a}*({y})"))?,
                pm(&format!("{a}*({})", compose_m(d, &format!("m/{a}"))?))?,
                inv.map(|i| compose_x(i, &format!("x/{a}"))).transpose()?,
                pair.x_domain,
                pair.m_domain.affine(k.a, 0.0),
                pair.y_range.map(|r| r.affine(k.a, 0.0)),
                pair.window,
            )
        }
        2 => {
            nonzero(k.a, "a")?;
            (
                compose_x(y, &format!("{a}*x"))?,
                compose_m(d, &format!("m/{a}"))?,
                inv.map(|i| px(&format!("({i})/{a}"))).transpose()?,
                pair.x_domain.affine(1.0 / k.a, 0.0),
                pair.m_domain.affine(k.a, 0.0),
                pair.y_range,
                sorted(w0 / k.a, w1 / k.a),
            )
        }
        3 => (
            px(&format!("({y}) + {a}"))?,
            pm(&format!("({d}) - {a}"))?,
            inv.map(|i| compose_x(i, &format!("x - {a}"))).transpose()?,
            pair.x_domain,
            pair.m_domain,
            pair.y_range.map(|r| r.affine(1.0, k.a)),
            pair.window,
        ),
        4 => (
            compose_x(y, &format!("x + {a}"))?,
            pm(&format!("({d}) - {a}*m"))?,
            inv.map(|i| px(&format!("({i}) - {a}"))).transpose()?,
            pair.x_domain.affine(1.0, -k.a),
            pair.m_domain,
            pair.y_range,
            (w0 - k.a, w1 - k.a),
        ),
        5 => {
            let inv = inv.ok_or_else(|| constraint(format!("`{}` has no closed-form inverse", pair.name)))?;
            let range = pair
                .y_range
                .ok_or_else(|| constraint(format!("`{}` has no known range", pair.name)))?;
            let md = pair
                .m_domain
                .reciprocal()
                .ok_or_else(|| constraint("rule 5 needs an m-domain excluding 0"))?;
            let e0 = y.eval(w0).map_err(|e| Error::domain(w0, e))?;
            let e1 = y.eval(w1).map_err(|e| Error::domain(w1, e))?;
            (
                inv.clone(),
                pm(&format!("-m*({})", compose_m(d, "1/m")?))?,
                Some(y.clone()),
                range,
                md,
                Some(pair.x_domain),
                sorted(e0, e1),
            )
        }
        6 => {
            nonzero(k.c, "c")?;
            nonzero(k.s, "s")?;
            let ninv = if k.b == 0.0 {
                inv.map(|i| {
                    px(&format!("(({}) - {t})/{s}", compose_x(i, &format!("(x - {a})/{c}"))?))
                })
                .transpose()?
            } else {
                None
            };
            (
                px(&format!(
                    "{c}*({}) + {b}*x + {a}",
                    compose_x(y, &format!("{s}*x + {t}"))?
                ))?,
                pm(&format!(
                    "{c}*({}) - {t}*(m - {b})/{s} - {a}",
                    compose_m(d, &format!("(m - {b})/({c}*{s})"))?
                ))?,
                ninv,
                pair.x_domain.affine(1.0 / k.s, -k.t / k.s),
                pair.m_domain.affine(k.c * k.s, k.b),
                if k.b == 0.0 {
                    pair.y_range.map(|r| r.affine(k.c, k.a))
                } else {
                    None
                },
                sorted((w0 - k.t) / k.s, (w1 - k.t) / k.s),
            )
        }
        _ => return Err(constraint(format!("rule must be 1..=6, got {rule}"))),
    };
    let mut params = pair.params.clone();
    match rule {
        1..=4 => params.push(("a", k.a)),
        6 => params.extend([("a", k.a), ("b", k.b), ("c", k.c), ("s", k.s), ("t", k.t)]),
        _ => {}
    }
    CatalogPair::assemble(name, params, ny, nd, ninv, xd, md, range, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_entry() {
        let e = catalog_lookup("exp", None).unwrap();
        assert!(e.m_domain().contains(0.5) && !e.m_domain().contains(0.0));
        assert!((e.d().eval(1.0).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(e.curvature(), Convexity::Convex);
    }

    #[test]
    fn power_entry() {
        let e = catalog_lookup("power", Some(2.0)).unwrap();
        assert_eq!(e.y().eval(3.0).unwrap(), 4.5);
        assert_eq!(e.d().eval(3.0).unwrap(), 4.5);
        assert!(matches!(
            catalog_lookup("power", Some(1.0)),
            Err(Error::ConstraintViolation(_))
        ));
        assert!(matches!(catalog_lookup("sinh", None), Err(Error::UnknownCatalogEntry(_))));
    }

    #[test]
    fn every_entry_passes_self_test() {
        for (name, ..) in catalog_names() {
            let p = matches!(name, "power" | "p-circle").then_some(2.0);
            let pair = catalog_lookup(name, p).unwrap();
            assert_ne!(pair.curvature(), Convexity::Mixed, "{name}");
        }
        for p in [1.5, 3.0, 4.0] {
            catalog_lookup("power", Some(p)).unwrap();
            catalog_lookup("p-circle", Some(p)).unwrap();
        }
    }

    #[test]
    fn concave_entries() {
        for name in ["circle", "hyperbola", "log", "cos"] {
            assert_eq!(catalog_lookup(name, None).unwrap().curvature(), Convexity::Concave);
        }
        let pc = catalog_lookup("p-circle", Some(2.0)).unwrap();
        assert_eq!(pc.curvature(), Convexity::Concave);
    }

    #[test]
    fn shift_rule_on_exp() {
        let e = catalog_lookup("exp", None).unwrap();
        let g = apply_rule(4, &e, RuleParams { a: -1.0, ..Default::default() }).unwrap();
        for x in [-1.0, 0.0, 2.5] {
            assert!((g.y().eval(x).unwrap() - (x - 1.0f64).exp()).abs() < 1e-14);
        }
        for m in [0.5, 1.0, 3.0] {
            assert!((g.d().eval(m).unwrap() - m * m.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_rule_on_exp() {
        let e = catalog_lookup("exp", None).unwrap();
        let g = apply_rule(5, &e, RuleParams::default()).unwrap();
        for m in [0.5, 1.0, 3.0] {
            assert!((g.d().eval(m).unwrap() - (1.0 + m.ln())).abs() < 1e-14);
        }
        assert!((g.y().eval(2.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(g.x_domain(), Interval::open(0.0, f64::INFINITY));
        assert_eq!(g.m_domain(), Interval::open(0.0, f64::INFINITY));
        let back = apply_rule(5, &g, RuleParams::default()).unwrap();
        assert!((back.d().eval(2.0).unwrap() - (2.0 * 2f64.ln() - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn general_rule_builds_cubic_pair() {
        let e = catalog_lookup("power", Some(3.0)).unwrap();
        let k = RuleParams {
            a: 0.0,
            b: -1.0,
            c: 3.0,
            s: 1.0,
            t: 0.0,
        };
        let g = apply_rule(6, &e, k).unwrap();
        for x in [0.5, 1.0, 1.7] {
            assert!((g.y().eval(x).unwrap() - (x * x * x - x)).abs() < 1e-14);
        }
        for m in [0.0, 2.0, 5.0] {
            let want = 2.0 * ((m + 1.0) / 3.0f64).powf(1.5);
            assert!((g.d().eval(m).unwrap() - want).abs() < 1e-13);
        }
        assert_eq!(g.m_domain(), Interval::open(-1.0, f64::INFINITY));
    }

    #[test]
    fn rule_constraints() {
        let e = catalog_lookup("exp", None).unwrap();
        assert!(apply_rule(1, &e, RuleParams::default()).is_err());
        assert!(apply_rule(6, &e, RuleParams { c: 1.0, ..Default::default() }).is_err());
        assert!(apply_rule(7, &e, RuleParams::default()).is_err());
        let circle = catalog_lookup("circle", None).unwrap();
        assert!(apply_rule(5, &circle, RuleParams::default()).is_err());
    }

    #[test]
    fn intervals() {
        let i = Interval::open(0.0, f64::INFINITY);
        assert_eq!(i.reciprocal(), Some(i));
        let j = Interval::closed(-1.0, 0.0).reciprocal();
        assert_eq!(j, None);
        let k = Interval::new(1.0, 2.0, true, false).affine(-2.0, 1.0);
        assert_eq!(k, Interval::new(-3.0, -1.0, false, true));
        assert_eq!(format!("{}", Interval::new(1.0, f64::INFINITY, true, false)), "[1, inf)");
    }
}
