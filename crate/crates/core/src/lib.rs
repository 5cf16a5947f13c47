//! Intrinsic volumes of zonotopes, the V_j family of multivariate medians,
//! and Steiner symmetrization of probability measures.
//!
//! * [`zonotope`]: exact and Monte Carlo intrinsic volumes, the Wills
//!   functional, planar realisations.
//! * [`median`]: V_1 (spatial/L1), intermediate V_j, V_d (Oja), Wills and
//!   polar-volume medians of a point cloud.
//! * [`gauss`]: closed-form symmetrization of Gaussian laws and iteration to
//!   spherical symmetry.
//! * [`empirical`]: sample-based symmetrization, exact polygon symmetrals and
//!   diagnostics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod cloud;
pub mod direction;
pub mod empirical;
pub mod error;
pub mod gauss;
pub mod linalg;
pub mod median;
pub mod polygon;
pub mod rng;
pub mod zonotope;

pub use cloud::PointCloud;
pub use direction::Direction;
pub use empirical::{EmpiricalSample, RegressorConfig};
pub use error::{Error, Result};
pub use gauss::{GaussianState, SphereOptions, SphereRule, SymmetrizationTrace};
pub use median::{MedianProblem, MedianResult, Objective, SolverOptions};
pub use polygon::{ConvexPolygon2D, Point2};
pub use zonotope::{McEstimate, Zonotope};
