//! Soliton surfaces of the Betchov-Da Rios equation `Psi_t = Psi_s x Psi_ss x Psi_sss`
//! in four-dimensional Euclidean space, analysed with the parallel transport
//! (Bishop) frame of the `s`-curves.
//!
//! The pipeline is: [`surface`] (closed-form definition and exact derivative
//! jets) -> [`ptframe`] (frame field and curvature functions) ->
//! [`invariants`] (fundamental forms, normal frame, K, H, K_N, k, h) ->
//! [`classify`] (curvature-ellipse point classes and surface predicates).
//! [`analysis`] runs the whole chain over the grid.
//!
//! Everything numeric is generic over [`Scalar`]; the `*64` aliases below fix
//! it to `f64`, which is what the tolerances are calibrated for.

// `!(x >= tol)` is deliberate throughout: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod classify;
pub mod error;
pub mod expr;
pub mod grid;
pub mod invariants;
pub mod linalg4;
pub mod ptframe;
pub mod scalar;
pub mod surface;

pub use error::{Degeneracy, Error, Result};
pub use linalg4::{Mat2, Mat2x3, Vec4};
pub use scalar::Scalar;

pub type Vec4f = Vec4<f64>;
pub type Mat2f = Mat2<f64>;
pub type Mat2x3f = Mat2x3<f64>;
pub type SurfaceDef64 = surface::SurfaceDef<f64>;
pub type Jet64 = surface::Jet<f64>;
pub type Frame64 = ptframe::Frame<f64>;
pub type FrameField64 = ptframe::FrameField<f64>;
pub type CurvatureField64 = ptframe::CurvatureField<f64>;
pub type InvariantReport64 = invariants::InvariantReport<f64>;
pub type PointClass64 = classify::PointClass<f64>;
pub type Analysis64 = analysis::Analysis<f64>;
