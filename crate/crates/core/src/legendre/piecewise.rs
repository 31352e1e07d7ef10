//! Exact duals of convex piecewise-linear functions and convex polygons.
//!
//! A piece of slope `s` through `(x, y)` becomes the dual corner
//! `(s, s x - y)`; a corner becomes a dual segment of slope `x`. A clipped
//! end of the domain turns into a dual ray and a ray into a clipped end.

use serde::Serialize;

use crate::curve::{ConvexPolygon, PiecewiseLinearFunction};
use crate::error::{Error, Result};

/// The exact dual of a convex piecewise-linear function.
pub fn pl_dual(f: &PiecewiseLinearFunction) -> Result<PiecewiseLinearFunction> {
    if !f.is_convex() {
        return Err(Error::NonConvex(
            "piece slopes must be nondecreasing, rays included".into(),
        ));
    }
    let bp = f.breakpoints();
    let n = bp.len();
    let (first, last) = (bp[0], bp[n - 1]);

    // (slope, a point on the piece) from left to right
    let mut pieces: Vec<(f64, (f64, f64))> = Vec::with_capacity(n + 1);
    if let Some(s) = f.left_slope() {
        pieces.push((s, first));
    }
    for (w, s) in bp.windows(2).zip(f.segment_slopes()) {
        pieces.push((s, w[0]));
    }
    if let Some(s) = f.right_slope() {
        pieces.push((s, last));
    }

    if pieces.is_empty() {
        // a single point: every line through it supports it
        return PiecewiseLinearFunction::new(vec![(0.0, -first.1)], Some(first.0), Some(first.0));
    }

    let mut dual: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (s, (x, y)) in pieces {
        match dual.last() {
            // collinear neighbours share one dual corner
            Some(&(prev, _)) if s <= prev => {}
            _ => dual.push((s, s * x - y)),
        }
    }
    let left = f.left_slope().is_none().then_some(first.0);
    let right = f.right_slope().is_none().then_some(last.0);
    PiecewiseLinearFunction::new(dual, left, right)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerticalSupport {
    /// Abscissa of the vertical supporting line.
    pub x: f64,
    /// Whether the polygon touches it along an edge rather than a vertex.
    pub edge: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonDual {
    /// `d(m) = max (m x - y)`: supporting lines from below.
    pub lower: PiecewiseLinearFunction,
    /// `d(m) = min (m x - y)`: supporting lines from above.
    pub upper: PiecewiseLinearFunction,
    /// Vertical supporting lines, whose duals lie at infinity.
    pub excluded: Vec<VerticalSupport>,
}

fn chain(v: &[(f64, f64)], start: usize, forward: impl Fn(f64, f64) -> bool) -> Vec<(f64, f64)> {
    let n = v.len();
    let mut out = vec![v[start]];
    let mut i = start;
    loop {
        let j = (i + 1) % n;
        if j == start || !forward(v[i].0, v[j].0) {
            break;
        }
        out.push(v[j]);
        i = j;
    }
    out
}

fn argbest(v: &[(f64, f64)], better: impl Fn((f64, f64), (f64, f64)) -> bool) -> usize {
    (1..v.len()).fold(0, |b, i| if better(v[i], v[b]) { i } else { b })
}

/// Dual of a convex polygon as its lower and upper supporting-line
/// families.
pub fn polygon_dual(p: &ConvexPolygon) -> Result<PolygonDual> {
    let v = p.vertices();
    // counterclockwise: bottom-left to bottom-right along the lower chain
    let bl = argbest(v, |a, b| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1));
    let tr = argbest(v, |a, b| a.0 > b.0 || (a.0 == b.0 && a.1 > b.1));
    let lower = chain(v, bl, |a, b| b > a);
    let mut upper = chain(v, tr, |a, b| b < a);
    upper.reverse();

    let lower_fn = PiecewiseLinearFunction::new(lower.clone(), None, None)?;
    let lower_dual = pl_dual(&lower_fn)?;

    let neg: Vec<(f64, f64)> = upper.iter().map(|&(x, y)| (x, -y)).collect();
    let g = pl_dual(&PiecewiseLinearFunction::new(neg, None, None)?)?;
    // inf{m x - y} = -g*(-m)
    let upper_bp: Vec<(f64, f64)> = g.breakpoints().iter().rev().map(|&(s, d)| (0.0 - s, 0.0 - d)).collect();
    let upper_dual = PiecewiseLinearFunction::new(upper_bp, g.right_slope(), g.left_slope())?;

    let left_edge = lower[0].0 == upper[0].0 && lower[0].1 != upper[0].1;
    let (ln, un) = (lower.len(), upper.len());
    let right_edge = lower[ln - 1].0 == upper[un - 1].0 && lower[ln - 1].1 != upper[un - 1].1;
    Ok(PolygonDual {
        lower: lower_dual,
        upper: upper_dual,
        excluded: vec![
            VerticalSupport {
                x: lower[0].0,
                edge: left_edge,
            },
            VerticalSupport {
                x: lower[ln - 1].0,
                edge: right_edge,
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_piece_example() -> PiecewiseLinearFunction {
        PiecewiseLinearFunction::new(vec![(-3.0, 4.0), (0.0, 1.0), (1.0, 2.0)], Some(-2.0), Some(3.0))
            .unwrap()
    }

    #[test]
    fn worked_example_dual() {
        let d = pl_dual(&four_piece_example()).unwrap();
        assert_eq!(d.breakpoints(), &[(-2.0, 2.0), (-1.0, -1.0), (1.0, -1.0), (3.0, 1.0)]);
        assert_eq!((d.left_slope(), d.right_slope()), (None, None));
        assert_eq!(d.eval(2.5), Some(0.5));
        assert_eq!(pl_dual(&d).unwrap(), four_piece_example());
    }

    #[test]
    fn absolute_value() {
        let f = PiecewiseLinearFunction::new(vec![(0.0, 0.0)], Some(-1.0), Some(1.0)).unwrap();
        let d = pl_dual(&f).unwrap();
        assert_eq!(d.breakpoints(), &[(-1.0, 0.0), (1.0, 0.0)]);
        assert_eq!((d.left_slope(), d.right_slope()), (None, None));
    }

    #[test]
    fn clipped_domain_gains_rays() {
        let f = PiecewiseLinearFunction::new(
            vec![(0.0, 0.0), (1.0, 1.0 / 3.0), (2.0, 8.0 / 3.0)],
            None,
            None,
        )
        .unwrap();
        let d = pl_dual(&f).unwrap();
        assert_eq!((d.left_slope(), d.right_slope()), (Some(0.0), Some(2.0)));
        assert_eq!(d.breakpoints().len(), 2);
    }

    #[test]
    fn single_point() {
        let f = PiecewiseLinearFunction::new(vec![(2.0, 1.0)], None, None).unwrap();
        let d = pl_dual(&f).unwrap();
        assert_eq!(d.breakpoints(), &[(0.0, -1.0)]);
        assert_eq!(d.eval(3.0), Some(5.0));
        assert_eq!(pl_dual(&d).unwrap().eval(2.0), Some(1.0));
    }

    #[test]
    fn rejects_nonconvex() {
        let f = PiecewiseLinearFunction::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)], None, None)
            .unwrap();
        assert!(matches!(pl_dual(&f), Err(Error::NonConvex(_))));
    }

    #[test]
    fn diamond() {
        let p = ConvexPolygon::new(vec![(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]).unwrap();
        let d = polygon_dual(&p).unwrap();
        // side y = x + 1 lies on the upper chain: dual corner (1, -1)
        assert!(d.upper.breakpoints().contains(&(1.0, -1.0)));
        // vertex (0, 1): d = -1 on [-1, 1]
        assert_eq!(d.upper.eval(0.0), Some(-1.0));
        assert_eq!(d.upper.eval(0.5), Some(-1.0));
        // side vertices: rays d = m for |m| > 1
        assert_eq!(d.upper.eval(-3.0), Some(-3.0));
        assert_eq!(d.lower.eval(3.0), Some(3.0));
        assert_eq!(d.lower.eval(0.25), Some(1.0));
        assert_eq!(d.excluded.len(), 2);
        assert!(d.excluded.iter().all(|e| !e.edge));
    }

    #[test]
    fn square_with_vertical_edges() {
        let p = ConvexPolygon::new(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        let d = polygon_dual(&p).unwrap();
        assert_eq!(d.lower.breakpoints(), &[(0.0, 0.0)]);
        assert_eq!(d.upper.breakpoints(), &[(0.0, -1.0)]);
        assert_eq!(
            d.excluded,
            vec![VerticalSupport { x: 0.0, edge: true }, VerticalSupport { x: 1.0, edge: true }]
        );
    }
}
