//! Curves, lines and the Legendre transform: an expression language,
//! envelope and Clairaut engines, line forms, pole/polar duality and
//! convexity checks.

pub mod clairaut;
pub mod convexity;
pub mod curve;
pub mod envelope;
pub mod error;
pub mod expr;
pub mod io;
pub mod legendre;
pub mod lineforms;
pub mod numeric;
pub mod polepolar;
pub mod suites;

pub use curve::{
    convexity_classify, sample, sample_reporting, tangent_line, tangent_line_with, ConvexPolygon,
    Convexity, Line, ParametricCurve, PiecewiseLinearFunction, SampledFunction, TangentLine,
};
pub use error::{Error, Result};
pub use expr::{DomainError, Expression, ParseError};
pub use lineforms::{BreakdownReason, Form, FormCoefficients};
pub use polepolar::{ConicMatrix, Position};
pub use suites::{run_suite, SuiteReport};
