//! Spectral support functions of smooth, strictly convex bodies in the
//! plane and in space, the L_p functionals built on them, and executable
//! checks of the stability inequalities for the L_p-curvature.

pub mod body;
pub mod body_file;
pub mod constants;
pub mod error;
pub mod generators;
pub mod lp;
pub mod optimize;
pub mod sphere;
pub mod stability;

pub use error::{GeometryError, Result};
