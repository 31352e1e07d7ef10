//! The Legendre transform `d(m) = m x - y` at `m = y'(x)`, by root
//! finding, by supremum over samples and by integrating the inverse
//! derivative; exact duals of piecewise-linear data; the transform-pair
//! catalog and its rules.

mod catalog;
mod piecewise;
mod transform;
mod verify;

use serde::Serialize;

use crate::curve::SampledFunction;

pub use catalog::{apply_rule, catalog_lookup, catalog_names, CatalogPair, Interval, RuleParams};
pub use piecewise::{pl_dual, polygon_dual, PolygonDual, VerticalSupport};
pub use transform::{
    dual_of_parametric, sup_at, transform_analytic, transform_analytic_grid, transform_inf,
    transform_integral, transform_sup, ParametricDual, SlopeInverse,
};
pub use verify::{
    verify_curvature_reciprocity, verify_gradient_inverse, verify_involution, CurvatureReport,
    GradientInverseReport, InvolutionReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Sup,
    /// `inf{m x - y}`, the concave counterpart of `Sup`
    Inf,
    Integral,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Sup => "sup",
            Method::Inf => "inf",
            Method::Integral => "integral",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// For `Sup` the input was not convex; for `Inf` not concave.
    pub nonconvex_input: bool,
    pub skipped_m: Vec<f64>,
    /// Contact abscissa per dual point (`Sup`/`Inf` only).
    pub argmax_xs: Vec<f64>,
    /// Slopes of the dual's end rays, `(x_first, x_last)`.
    pub end_rays: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformReport {
    pub dual: SampledFunction,
    pub method: Method,
    pub diagnostics: Diagnostics,
}
