//! Named self-check suites behind `dualcurve verify`. Random cases come
//! from fixed-seed generators, so a suite's report is reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clairaut::{singular_solution, ClairautProblem};
use crate::convexity::{amgm_check, fenchel_young_gap, order_reversal_check, young_gap, young_pair};
use crate::curve::{sample, Convexity, Line, ParametricCurve, PiecewiseLinearFunction};
use crate::envelope::{FamilyForm, LineFamily};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::legendre::{
    catalog_lookup, dual_of_parametric, pl_dual, transform_analytic_grid, transform_inf,
    transform_integral, transform_sup, verify_curvature_reciprocity, verify_involution, CatalogPair,
};
use crate::lineforms::{breakdown_check, convert, from_general, BreakdownReason, Form};
use crate::numeric::linspace;
use crate::polepolar::{
    duality_conic, pole_of_polar, pole_via_chords, pole_via_inversion, polar_of_pole, ConicMatrix,
};

pub const SUITES: [&str; 7] = ["table51", "fixtures", "involution", "polepolar", "lines", "young", "reversal"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    /// Count an engine error as a failed case.
    fn attempt<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.cases += 1;
                self.failures.push(format!("{}: {e}", what()));
                None
            }
        }
    }

    fn report(self, suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            cases: self.cases,
            failures: self.failures,
        }
    }
}

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let mut t = Tally::new();
    match name {
        "table51" => catalog_suite(&mut t),
        "fixtures" => fixtures_suite(&mut t),
        "involution" => involution_suite(&mut t),
        "polepolar" => polepolar_suite(&mut t),
        "lines" => lines_suite(&mut t),
        "young" => young_suite(&mut t),
        "reversal" => reversal_suite(&mut t),
        "all" => {
            for s in SUITES {
                let r = run_suite(s)?;
                t.cases += r.cases;
                t.failures.extend(r.failures.into_iter().map(|f| format!("{s}: {f}")));
            }
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown suite `{other}`; expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    }
    Ok(t.report(name))
}

/// The catalog pairs checked by the cross-validation suite.
pub fn catalog_cases() -> Result<Vec<CatalogPair>> {
    let mut out = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        out.push(catalog_lookup("power", Some(p))?);
    }
    out.push(catalog_lookup("circle", None)?);
    out.push(catalog_lookup("p-circle", Some(2.0))?);
    for name in ["hyperbola", "exp", "log", "xlogx", "cos"] {
        out.push(catalog_lookup(name, None)?);
    }
    Ok(out)
}

fn label(pair: &CatalogPair) -> String {
    match pair.params().first() {
        Some((k, v)) => format!("{} ({k} = {v})", pair.name()),
        None => pair.name().to_string(),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn catalog_suite(t: &mut Tally) {
    let Some(pairs) = t.attempt(catalog_cases(), || "catalog".into()) else {
        return;
    };
    for pair in &pairs {
        let name = label(pair);
        let (lo, hi) = pair.window();
        let Some((m_lo, m_hi)) = t.attempt(pair.m_window(), || name.clone()) else {
            continue;
        };
        let grid = linspace(m_lo, m_hi, 35);
        let interior = &grid[1..34];
        let exact = |m: f64| pair.d().eval(m).unwrap_or(f64::NAN);

        let engines = [
            ("analytic", transform_analytic_grid(pair.y(), lo, hi, interior)),
            ("integral", transform_integral(pair.y(), lo, hi, interior)),
        ];
        for (method, r) in engines {
            let Some(r) = t.attempt(r, || format!("{name} {method}")) else {
                continue;
            };
            t.check(r.dual.len() == interior.len(), || format!("{name} {method}: skipped slopes"));
            for (m, d) in r.dual.points() {
                t.check(close(d, exact(m), 1e-6), || format!("{name} {method} at m = {m}: {d} vs {}", exact(m)));
            }
        }

        let Some(f) = t.attempt(sample(pair.y(), lo, hi, 8193), || format!("{name} sample")) else {
            continue;
        };
        let r = match pair.curvature() {
            Convexity::Concave => transform_inf(&f, interior, false),
            _ => transform_sup(&f, interior, false),
        };
        if let Some(r) = t.attempt(r, || format!("{name} sup")) {
            for (m, d) in r.dual.points() {
                t.check(close(d, exact(m), 1e-3), || format!("{name} sup at m = {m}: {d} vs {}", exact(m)));
            }
        }
    }
}

fn px(s: &str) -> Expression {
    Expression::parse(s, "x").expect("suite expression parses")
}

fn fixtures_suite(t: &mut Tally) {
    // y = (k-1)^3 x + (k-1)^-3 touches its envelope at (1, 2) when k = 2
    let k = |s: &str| Expression::parse(s, "k").expect("suite expression parses");
    let fam = LineFamily::new(k("(k-1)^3"), k("(k-1)^(-3)"), 1.5, 3.0, FamilyForm::SlopeIntercept);
    if let Some(p) = t.attempt(fam.and_then(|f| f.envelope_at(2.0)), || "envelope".into()) {
        t.check(
            matches!(p, Some((x, y)) if close(x, 1.0, 1e-9) && close(y, 2.0, 1e-9)),
            || format!("envelope at k = 2: {p:?}"),
        );
    }

    // parametric dual of x^3 - x at m = 2 on its convex branch
    let dual = sample(&px("x^3 - x"), 0.25, 2.0, 2001)
        .map(|f| ParametricCurve::from_graph(&f))
        .and_then(|c| dual_of_parametric(&c));
    if let Some(dual) = t.attempt(dual, || "parametric dual".into()) {
        let d = interpolate_crossing(dual.curve.points(), 2.0);
        t.check(matches!(d, Some(v) if close(v, 2.0, 1e-2)), || format!("parametric dual at m = 2: {d:?}"));
    }

    // two unit semicircles cross in the dual at (0, -1); branches d = c m - sqrt(1 + m^2)
    for centre in [-1.0f64, 1.0] {
        let ts = linspace(0.0, std::f64::consts::PI, 801);
        let pts = ts.iter().map(|t| (centre - t.cos(), t.sin())).collect();
        let arc = ParametricCurve::new(ts, pts).and_then(|c| dual_of_parametric(&c));
        if let Some(dual) = t.attempt(arc, || format!("semicircle at {centre}")) {
            let err = dual
                .curve
                .points()
                .iter()
                .map(|&(m, d)| (d - (centre * m - m.hypot(1.0))).abs() / (1.0 + d.abs()))
                .fold(0.0, f64::max);
            t.check(err <= 1e-2, || format!("semicircle at {centre}: error {err:e}"));
            let d0 = interpolate_crossing(dual.curve.points(), 0.0);
            t.check(matches!(d0, Some(v) if close(v, -1.0, 1e-2)), || format!("semicircle at {centre}: d(0) = {d0:?}"));
        }
    }

    // f = -exp gives the singular solution y = x ln x - x
    let sol = ClairautProblem::new(Expression::parse("-exp(s)", "s").expect("parses"), -1.0, 1.0)
        .and_then(|p| singular_solution(&p, 401));
    if let Some(sol) = t.attempt(sol, || "clairaut singular".into()) {
        let e = std::f64::consts::E;
        let gap = sol
            .curve
            .points()
            .iter()
            .filter(|p| p.0 >= 0.5 && p.0 <= e)
            .map(|&(x, y)| (y - (x * x.ln() - x)).abs())
            .fold(0.0, f64::max);
        t.check(gap <= 1e-6, || format!("clairaut singular gap {gap:e}"));
    }

    let f = PiecewiseLinearFunction::new(vec![(-3.0, 4.0), (0.0, 1.0), (1.0, 2.0)], Some(-2.0), Some(3.0));
    if let Some(d) = t.attempt(f.and_then(|f| pl_dual(&f)), || "pl dual".into()) {
        let want = [(-2.0, 2.0), (-1.0, -1.0), (1.0, -1.0), (3.0, 1.0)];
        t.check(
            d.breakpoints() == want && d.left_slope().is_none() && d.right_slope().is_none(),
            || format!("pl dual breakpoints {:?}", d.breakpoints()),
        );
        t.check(d.eval(2.5) == Some(0.5), || format!("pl dual at 5/2: {:?}", d.eval(2.5)));
    }

    let r = sample(&px("x^3/3"), 0.0, 2.0, 8193).and_then(|f| transform_sup(&f, &[0.0, 1.0, 4.0], true));
    if let Some(r) = t.attempt(r, || "sup of x^3/3".into()) {
        let d1 = r.dual.ys()[1];
        t.check(close(d1, 2.0 / 3.0, 1e-3), || format!("sup of x^3/3 at m = 1: {d1}"));
        t.check(r.diagnostics.end_rays == Some((0.0, 2.0)), || {
            format!("end rays {:?}", r.diagnostics.end_rays)
        });
    }
}

/// `d` where the polyline of `(m, d)` points crosses slope `m`.
pub fn interpolate_crossing(pts: &[(f64, f64)], m: f64) -> Option<f64> {
    pts.windows(2).find_map(|w| {
        let ((m0, d0), (m1, d1)) = (w[0], w[1]);
        ((m0 - m) * (m1 - m) <= 0.0 && m0 != m1).then(|| d0 + (d1 - d0) * (m - m0) / (m1 - m0))
    })
}

fn involution_suite(t: &mut Tally) {
    let cases = [
        ("x^2/2", -2.0, 2.0),
        ("exp(x)", -2.0, 2.0),
        ("x*ln(x)", 0.25, 4.0),
        ("2*x^(1/2)", 0.25, 4.0),
    ];
    for (y, lo, hi) in cases {
        if let Some(r) = t.attempt(verify_involution(&px(y), lo, hi, 4097, 1e-2), || y.into()) {
            t.check(r.pass, || format!("involution of {y}: max error {:e}", r.max_error));
        }
    }

    let probes: Vec<Result<CatalogPair>> = vec![
        catalog_lookup("power", Some(2.0)),
        catalog_lookup("power", Some(3.0)),
        catalog_lookup("exp", None),
        catalog_lookup("log", None),
    ];
    for pair in probes {
        let Some(pair) = t.attempt(pair, || "curvature pair".into()) else {
            continue;
        };
        let (lo, hi) = pair.window();
        for x0 in &linspace(lo, hi, 7)[1..6] {
            let name = label(&pair);
            if let Some(r) = t.attempt(verify_curvature_reciprocity(pair.y(), *x0, 1e-4), || name.clone()) {
                t.check(r.pass, || format!("curvature of {name} at x = {x0}: error {:e}", r.error));
            }
        }
    }
}

fn rel_close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
    let scale = 1.0 + b.0.abs().max(b.1.abs());
    (a.0 - b.0).abs() <= tol * scale && (a.1 - b.1).abs() <= tol * scale
}

/// A random conic with entries in [-1, 1], kept well away from singular.
pub fn random_conic(rng: &mut ChaCha8Rng) -> ConicMatrix {
    loop {
        let mut e = [0.0; 6];
        for v in &mut e {
            *v = rng.gen_range(-1.0..1.0);
        }
        if let Ok(q) = ConicMatrix::new(e[0], e[1], e[2], e[3], e[4], e[5]) {
            if q.det().abs() >= 0.05 {
                return q;
            }
        }
    }
}

fn polepolar_suite(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9013);
    let mut done = 0;
    while done < 500 {
        let q = random_conic(&mut rng);
        let p = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let Ok(l) = polar_of_pole(&q, p) else { continue };
        done += 1;
        match pole_of_polar(&q, &l) {
            Ok(back) => t.check(rel_close(back, p, 1e-10), || format!("round trip of {p:?}: {back:?}")),
            Err(e) => t.check(false, || format!("round trip of {p:?}: {e}")),
        }
    }

    let parabola = ConicMatrix::parabola();
    for _ in 0..100 {
        let (m, d) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let a1 = m - rng.gen_range(0.5..2.0);
        let a2 = m + rng.gen_range(0.5..2.0);
        let Some(l) = t.attempt(Line::from_slope_neg_intercept(m, d), || "line".into()) else {
            continue;
        };
        let via_matrix = pole_of_polar(&parabola, &l);
        let via_chords = pole_via_chords(m, d, a1, a2);
        match (via_matrix, via_chords) {
            (Ok(a), Ok(b)) => t.check(rel_close(b, a, 1e-10), || format!("chords for ({m}, {d}): {b:?} vs {a:?}")),
            (a, b) => t.check(false, || format!("chords for ({m}, {d}): {a:?} / {b:?}")),
        }
    }

    let circle = ConicMatrix::unit_circle();
    for _ in 0..100 {
        let r = rng.gen_range(0.2..5.0);
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let Some(l) = t.attempt(Line::new(r * th.cos(), r * th.sin(), -1.0), || "line".into()) else {
            continue;
        };
        match (pole_of_polar(&circle, &l), pole_via_inversion(&l)) {
            (Ok(a), Ok(b)) => {
                t.check(rel_close(b.pole, a, 1e-10), || format!("inversion: {:?} vs {a:?}", b.pole));
                t.check(close(b.distance_product, 1.0, 1e-10), || {
                    format!("inversion distance product {}", b.distance_product)
                });
            }
            (a, b) => t.check(false, || format!("inversion: {a:?} / {b:?}")),
        }
    }

    t.check(duality_conic(Form::SlopeNegIntercept) == Ok(parabola), || "parabola duality conic".into());
    t.check(duality_conic(Form::DotProduct) == Ok(circle), || "circle duality conic".into());
}

/// A random line at least `margin` away from every form's breakdown.
pub fn random_admissible_line(rng: &mut ChaCha8Rng, margin: f64) -> Line {
    loop {
        let m: f64 = rng.gen_range(-5.0..5.0);
        let b: f64 = rng.gen_range(-5.0..5.0);
        if b.abs() < margin || (m - 1.0).abs() < margin {
            continue;
        }
        if let Ok(l) = Line::from_slope_intercept(m, b) {
            return l;
        }
    }
}

/// `|p - q|` per coefficient relative to `max(1, |p|)`; polar angles are
/// compared on the circle.
pub fn coefficient_error(form: Form, p: [f64; 2], q: [f64; 2]) -> f64 {
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
    let second = if form == Form::Polar {
        let diff = (p[1] - q[1]).rem_euclid(std::f64::consts::TAU);
        diff.min(std::f64::consts::TAU - diff)
    } else {
        rel(p[1], q[1])
    };
    rel(p[0], q[0]).max(second)
}

fn lines_suite(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x71);
    for _ in 0..1000 {
        let l = random_admissible_line(&mut rng, 0.05);
        for from in Form::ALL {
            let Some(fc) = t.attempt(from_general(&l, from), || format!("{l:?} to {from}")) else {
                continue;
            };
            for to in Form::ALL {
                let back = convert(&fc, to).and_then(|g| convert(&g, from));
                match back {
                    Ok(b) => {
                        let err = coefficient_error(from, fc.coeffs(), b.coeffs());
                        t.check(err <= 1e-12, || format!("{from} -> {to} -> {from}: error {err:e}"));
                    }
                    Err(e) => t.check(false, || format!("{from} -> {to}: {e}")),
                }
            }
        }
    }

    let breakdowns = [
        (Line::new(1.0, 0.0, -3.0), Form::SlopeIntercept, BreakdownReason::Vertical),
        (Line::from_slope_intercept(1.0, 0.0), Form::DotProduct, BreakdownReason::ThroughOrigin),
        (Line::from_slope_intercept(1.0, 1.0), Form::FixedPoint, BreakdownReason::ParallelToIdentity),
    ];
    for (l, form, reason) in breakdowns {
        let Some(l) = t.attempt(l, || "breakdown line".into()) else {
            continue;
        };
        let got = breakdown_check(&l, form);
        t.check(got == Err(Error::Breakdown { form, reason }), || format!("{form} breakdown: {got:?}"));
    }
}

/// Monotone test functions with `f(0) = 0`.
pub const YOUNG_FUNCTIONS: [&str; 4] = ["x", "x^2", "x^3", "exp(x) - 1"];
pub const YOUNG_C: f64 = 2.0;

fn young_suite(t: &mut Tally) {
    let fs: Vec<Expression> = YOUNG_FUNCTIONS.iter().map(|s| px(s)).collect();
    let fc: Vec<f64> = fs.iter().map(|f| f.eval(YOUNG_C).expect("finite at c")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4009);
    for _ in 0..1000 {
        let i = rng.gen_range(0..fs.len());
        let a = rng.gen_range(0.01..0.99) * YOUNG_C;
        let m = rng.gen_range(0.01..0.99) * fc[i];
        if let Some(g) = t.attempt(young_gap(&fs[i], YOUNG_C, a, m), || format!("young {}", YOUNG_FUNCTIONS[i])) {
            t.check(g.gap >= -1e-8, || format!("young gap {:e} for {} at a = {a}, m = {m}", g.gap, YOUNG_FUNCTIONS[i]));
        }
    }
    for _ in 0..40 {
        let i = rng.gen_range(0..fs.len());
        let a = rng.gen_range(0.1..0.9) * YOUNG_C;
        let Ok(fa) = fs[i].eval(a) else { continue };
        let name = YOUNG_FUNCTIONS[i];
        if let Some(g) = t.attempt(young_gap(&fs[i], YOUNG_C, a, fa), || name.into()) {
            t.check(g.gap.abs() <= 1e-8, || format!("young equality for {name} at a = {a}: gap {:e}", g.gap));
        }
        for m in [fa - 1e-3, fa + 1e-3] {
            if let Some(g) = t.attempt(young_gap(&fs[i], YOUNG_C, a, m), || name.into()) {
                t.check(g.gap > 0.0, || format!("young strict for {name} at a = {a}, m = {m}: {:e}", g.gap));
            }
        }
    }

    // f = x^2 integrates to the power pair with p = 3
    let power = catalog_lookup("power", Some(3.0));
    let m_grid = linspace(0.0, 4.0, 65);
    let pair = young_pair(&px("x^2"), YOUNG_C, 1025, &m_grid);
    if let (Some(power), Some((y, d))) = (t.attempt(power, || "power".into()), t.attempt(pair, || "young pair".into())) {
        for (x, v) in y.points() {
            let want = power.y().eval(x).unwrap_or(f64::NAN);
            t.check(close(v, want, 1e-7), || format!("young pair y({x}) = {v} vs {want}"));
        }
        for (m, v) in d.points() {
            let want = power.d().eval(m).unwrap_or(f64::NAN);
            t.check(close(v, want, 1e-7), || format!("young pair d({m}) = {v} vs {want}"));
        }
        if let Some(s) = t.attempt(transform_sup(&y, &m_grid, false), || "young pair sup".into()) {
            for ((m, a), b) in s.dual.points().zip(d.ys()) {
                t.check(close(a, *b, 2e-3), || format!("young pair vs sup at m = {m}: {b} vs {a}"));
            }
        }
    }

    let Some(pairs) = t.attempt(catalog_cases(), || "catalog".into()) else {
        return;
    };
    for pair in &pairs {
        let sign = if pair.curvature() == Convexity::Concave { -1.0 } else { 1.0 };
        let (lo, hi) = pair.window();
        let Ok((m_lo, m_hi)) = pair.m_window() else { continue };
        for _ in 0..25 {
            let x = rng.gen_range(lo..hi);
            let m = rng.gen_range(m_lo..m_hi);
            if let Some(g) = t.attempt(fenchel_young_gap(pair, x, m), || label(pair)) {
                t.check(sign * g >= -1e-9, || format!("fenchel-young {} at ({x}, {m}): {g:e}", label(pair)));
            }
        }
    }

    let amgm = [(1.0, 1.0, 0.3, 0.7, true), (4.0, 1.0, 0.5, 0.5, false), (1.0, 1.0, 0.5, 0.5, true)];
    for (r, s, al, be, eq) in amgm {
        match amgm_check(r, s, al, be) {
            Ok(c) => t.check(
                c.holds && c.equality == eq && (!eq || close(c.geometric, c.arithmetic, 1e-15)),
                || format!("am-gm at ({r}, {s}): {c:?}"),
            ),
            Err(e) => t.check(false, || format!("am-gm: {e}")),
        }
    }
}

fn reversal_suite(t: &mut Tally) {
    for (f, g) in [("x^2/2", "x^2/2 + 1"), ("x^2/2", "x^2"), ("x^2/2", "x^2/2")] {
        if let Some(r) = t.attempt(order_reversal_check(&px(f), &px(g), -2.0, 2.0, 1025), || format!("{f} vs {g}")) {
            t.check(r.pass, || format!("reversal {f} vs {g}: violation {:e}", r.max_violation));
        }
    }
}
