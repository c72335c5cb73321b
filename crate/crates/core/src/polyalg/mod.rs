//! Exact polynomial arithmetic and the numeric univariate root engine.

pub mod gaussian;
pub mod matrix;
pub mod multipoly;
pub mod roots;
pub mod univariate;

use thiserror::Error;

pub use gaussian::{format_rational, parse_rational, rational_to_f64, GaussianRational, Rational};
pub use matrix::{bareiss_determinant, ExactMatrix};
pub use multipoly::{MultiPoly, MultiPolyJson, NumericPoly};
pub use roots::{roots_univariate, RootOptions};
pub use univariate::{discriminant_in_var, linear_coordinate_change, make_monic, resultant, squarefree_part, UniPolyView};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("polynomial is not monic in its main variable")]
    NotMonic,
    #[error("resultant of two constants is undefined")]
    BothConstant,
    #[error("singular coordinate change")]
    SingularMatrix,
    #[error("root finder did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
}

/// Evaluates `p` at a complex point with compensated summation.
pub fn poly_eval(p: &MultiPoly, point: &[num_complex::Complex64]) -> Result<num_complex::Complex64, PolyError> {
    p.eval(point)
}
