//! Wasserstein distances between pushforward measures `f_*ρ` and `g_*ρ`,
//! where `g` is a surrogate of a response function `f`.
//!
//! The crate provides exact one-dimensional optimal transport on atomic
//! measures ([`measure`]), discretized input measures and pushforwards
//! ([`pushforward`]), spline and polynomial-chaos surrogates ([`surrogates`]),
//! the upper and lower bounds relating `W_p(f_*ρ, g_*ρ)` to `‖f − g‖`
//! ([`bounds`]), density and histogram estimation ([`density`]) and the
//! convergence experiments driven by the `pushwass` CLI ([`experiments`]).
//!
//! Loops over quadrature nodes, sweep points and random suites go through
//! [`exec`], which uses rayon when the default `parallel` feature is on.

// `!(x > 0.0)` style guards are used so that NaN is rejected along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod density;
pub mod error;
pub mod experiments;
pub mod exec;
pub mod measure;
pub mod pushforward;
pub mod surrogates;

pub use error::{Error, Result};
pub use exec::Execution;
pub use measure::{hminus1_distance, w1_via_cdf, wasserstein_p, Measure1D};
pub use pushforward::{build_quadrature, pushforward, DensityWeight, Evaluable, ParameterBox, ParameterQuadrature, QuadratureScheme};
pub use surrogates::SurrogateModel;
