use dualcurve::convexity::{fenchel_young_gap, support_fan, young_gap};
use dualcurve::envelope::{FamilyForm, LineFamily};
use dualcurve::legendre::{apply_rule, catalog_lookup, catalog_names, pl_dual, transform_sup, RuleParams};
use dualcurve::lineforms::{convert, from_general};
use dualcurve::numeric::linspace;
use dualcurve::{Convexity, Expression, Form, Line, PiecewiseLinearFunction, SampledFunction};
use proptest::prelude::*;

/// Smooth expressions in `x` built from `+ - *`, sin, cos, exp and small constants.
fn smooth_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        (-3i32..=3).prop_map(|c| format!("{c}")),
        (1u32..=9).prop_map(|c| format!("0.{c}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(0.3*{a})")),
            inner.prop_map(|a| format!("{a}^2")),
        ]
    })
}

/// Convex piecewise-linear function: increasing abscissae, increasing
/// piece slopes, optional rays steeper than the end pieces.
fn convex_pl() -> impl Strategy<Value = PiecewiseLinearFunction> {
    (
        -3.0f64..3.0,
        -3.0f64..3.0,
        prop::collection::vec((0.1f64..2.0, 0.1f64..2.0), 1..7),
        -5.0f64..5.0,
        prop::option::of(0.1f64..2.0),
        prop::option::of(0.1f64..2.0),
    )
        .prop_map(|(x0, y0, steps, s0, lray, rray)| {
            let mut pts = vec![(x0, y0)];
            let mut s = s0;
            for (dx, ds) in &steps {
                let (x, y) = *pts.last().unwrap();
                pts.push((x + dx, y + s * dx));
                s += ds;
            }
            let first = (pts[1].1 - pts[0].1) / (pts[1].0 - pts[0].0);
            let last = s - steps.last().unwrap().1;
            PiecewiseLinearFunction::new(pts, lray.map(|d| first - d), rray.map(|d| last + d)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn derivative_matches_central_difference(src in smooth_expr(), x in -1.5f64..1.5) {
        let e = Expression::parse(&src, "x").unwrap();
        let h = 1e-5;
        let fd = (e.eval(x + h).unwrap() - e.eval(x - h).unwrap()) / (2.0 * h);
        let d = e.derivative().eval(x).unwrap();
        let scale = 1.0 + e.eval(x).unwrap().abs() + d.abs();
        prop_assert!((fd - d).abs() <= 1e-5 * scale, "{src}: {d} vs {fd}");
    }

    #[test]
    fn printed_expression_parses_back(src in smooth_expr(), x in -1.5f64..1.5) {
        let e = Expression::parse(&src, "x").unwrap();
        let printed = e.to_string();
        let back = Expression::parse(&printed, "x").unwrap();
        prop_assert_eq!(back.to_string(), printed.clone());
        prop_assert_eq!(back.eval(x).unwrap().to_bits(), e.eval(x).unwrap().to_bits(), "{} / {}", src, printed);
    }

    #[test]
    fn pl_dual_is_an_involution(f in convex_pl()) {
        let back = pl_dual(&pl_dual(&f).unwrap()).unwrap();
        prop_assert_eq!(back.breakpoints().len(), f.breakpoints().len());
        for (a, b) in back.breakpoints().iter().zip(f.breakpoints()) {
            prop_assert!((a.0 - b.0).abs() <= 1e-9 * (1.0 + b.0.abs()));
            prop_assert!((a.1 - b.1).abs() <= 1e-9 * (1.0 + b.1.abs()));
        }
        for (a, b) in [(back.left_slope(), f.left_slope()), (back.right_slope(), f.right_slope())] {
            prop_assert_eq!(a.is_some(), b.is_some());
            if let (Some(a), Some(b)) = (a, b) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn support_fan_at_a_corner_is_a_dual_segment(f in convex_pl(), pick in any::<prop::sample::Index>()) {
        let i = pick.index(f.breakpoints().len());
        let (x, _) = f.breakpoints()[i];
        let fan = support_fan(&f, x).unwrap();
        prop_assume!(fan.lo.is_finite() && fan.hi.is_finite());
        let dual = pl_dual(&f).unwrap();
        let at = |m: f64| dual.breakpoints().iter().find(|p| (p.0 - m).abs() <= 1e-12 * (1.0 + m.abs())).copied();
        let (lo, hi) = (at(fan.lo), at(fan.hi));
        prop_assert!(lo.is_some() && hi.is_some(), "fan {:?} not among {:?}", fan, dual.breakpoints());
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        let slope = (hi.1 - lo.1) / (hi.0 - lo.0);
        prop_assert!((slope - x).abs() <= 1e-9 * (1.0 + x.abs()));
    }

    #[test]
    fn sup_transform_is_convex(ys in prop::collection::vec(-5.0f64..5.0, 3..40)) {
        // arbitrary, possibly nonconvex, samples
        let xs = linspace(-2.0, 2.0, ys.len());
        let f = SampledFunction::new(xs, ys).unwrap();
        let ms = linspace(-4.0, 4.0, 81);
        let r = transform_sup(&f, &ms, false).unwrap();
        let d = r.dual.ys();
        let scale = 1.0 + d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for w in d.windows(3) {
            prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12 * scale);
        }
    }

    #[test]
    fn fenchel_young_on_catalog(entry in 0usize..8, p in 1.2f64..4.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let name = catalog_names()[entry].0;
        let pair = catalog_lookup(name, matches!(name, "power" | "p-circle").then_some(p)).unwrap();
        let (x0, x1) = pair.window();
        let (m0, m1) = pair.m_window().unwrap();
        let (x, m) = (x0 + u * (x1 - x0), m0 + v * (m1 - m0));
        let gap = fenchel_young_gap(&pair, x, m).unwrap();
        let signed = if pair.curvature() == Convexity::Concave { -gap } else { gap };
        prop_assert!(signed >= -1e-9, "{name} x = {x} m = {m}: gap {gap:e}");
        let at_slope = fenchel_young_gap(&pair, x, pair.slope(x).unwrap()).unwrap();
        prop_assert!(at_slope.abs() <= 1e-9 * (1.0 + x.abs() * pair.slope(x).unwrap().abs()));
    }

    #[test]
    fn transform_rules_keep_pairs_exact(
        rule in 1u8..=6,
        entry in prop::sample::select(vec!["power", "exp", "xlogx", "log", "circle"]),
        p in 1.5f64..3.0,
        a in 0.5f64..2.0,
        b in -1.0f64..1.0,
        c in 0.5f64..2.0,
        s in 0.5f64..2.0,
        t in -1.0f64..1.0,
    ) {
        let pair = catalog_lookup(entry, (entry == "power").then_some(p)).unwrap();
        let k = RuleParams { a, b, c, s, t };
        match apply_rule(rule, &pair, k) {
            Ok(derived) => prop_assert!(derived.self_test().is_ok(), "rule {rule} on {entry}"),
            // rule 5 needs a closed-form inverse
            Err(e) => prop_assert!(rule == 5, "rule {rule} on {entry}: {e}"),
        }
    }

    #[test]
    fn line_forms_round_trip(m in -5.0f64..5.0, b in -5.0f64..5.0) {
        prop_assume!(b.abs() > 0.05 && (m - 1.0).abs() > 0.05);
        let l = Line::new(m, -1.0, b).unwrap();
        for f in Form::ALL {
            let fc = from_general(&l, f).unwrap();
            prop_assert!(dualcurve::lineforms::to_general(&fc).approx_eq(&l, 1e-12));
            for g in Form::ALL {
                let back = convert(&convert(&fc, g).unwrap(), f).unwrap();
                prop_assert!(dualcurve::lineforms::to_general(&back).approx_eq(&l, 1e-12), "{f} -> {g}");
            }
        }
    }

    #[test]
    fn envelope_ignores_reparameterization(alpha in -2.0f64..2.0, beta in 0.2f64..2.0, k in 0.3f64..1.5) {
        let e = |s: &str| Expression::parse(s, "k").unwrap();
        let b = format!("{alpha}*k^2 - {beta}*k^3");
        let plain = LineFamily::new(e("k"), e(&b), -10.0, 10.0, FamilyForm::SlopeIntercept).unwrap();
        let inner = e("k^3 + 1");
        let re = LineFamily::new(inner.clone(), e(&b).compose(&inner), -2.0, 2.0, FamilyForm::SlopeIntercept).unwrap();
        let want = plain.envelope_at(k * k * k + 1.0).unwrap().unwrap();
        let got = re.envelope_at(k).unwrap().unwrap();
        let tol = 1e-9 * (1.0 + want.0.abs() + want.1.abs());
        prop_assert!((got.0 - want.0).abs() <= tol && (got.1 - want.1).abs() <= tol, "{got:?} vs {want:?}");
    }

    #[test]
    fn young_gap_is_nonnegative(which in 0usize..4, u in 0.01f64..0.99, v in 0.01f64..0.99) {
        const FS: [(&str, fn(f64) -> f64); 4] =
            [("x", |t| t), ("x^2", |t| t * t), ("x^3", |t| t * t * t), ("exp(x) - 1", |t| t.exp() - 1.0)];
        let (src, f) = FS[which];
        let g = young_gap(&Expression::parse(src, "x").unwrap(), 2.0, 2.0 * u, f(2.0) * v).unwrap();
        prop_assert!(g.gap >= -1e-8, "{src}: {g:?}");
    }
}
