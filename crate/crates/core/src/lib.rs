//! Moment numerics for the parabolic Anderson model driven by Gaussian noise
//! that is white-or-coloured in time and homogeneous in space, started from
//! rough (measure-valued) initial data.
//!
//! The crate evaluates heat-kernel identities, Dalang's spectral functional,
//! the `k`/`h_n`/`H` moment-series machinery, Mittag-Leffler bounds for Riesz
//! kernels, Lyapunov and Hölder exponents, and provides quadrature and
//! Monte-Carlo oracles that cross-check them.

pub mod chaos_engine;
pub mod error;
pub mod heat_kernel;
pub mod initial_data;
pub mod mc_verify;
pub mod model;
pub mod moment_bounds;
pub mod noise_model;
pub mod quadrature;
pub mod sampling;
pub mod special_functions;

pub use error::{PamError, Result};
