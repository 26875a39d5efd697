//! Quadrature, root finding and finite differences shared by the
//! distribution and verification layers.

mod diff;
mod quadrature;
mod roots;

pub use diff::finite_diff_derivatives;
pub use quadrature::{
    gauss_legendre5, integrate_adaptive, integrate_adaptive_split, integrate_real_line, truncation_half_width,
    QuadratureResult, MAX_DEPTH, MAX_EVALUATIONS,
};
pub use roots::{find_root_bracketed, MAX_ITERATIONS};
