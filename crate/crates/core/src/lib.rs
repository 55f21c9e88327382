//! Fitzpatrick and Penot functions of monotone operators on `ℝⁿ × ℝⁿ`,
//! with grid-scale deciders for localized maximality properties and the
//! calculus of sums `A + N_C` and `A + B`.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64` or `f32`.

pub mod classify;
pub mod cli;
pub mod convex;
pub mod duality;
pub mod error;
pub mod fitzpatrick;
pub mod operators;
pub mod regions;
pub mod scalar;
pub mod sumcalc;

pub use classify::{Property, RegionFamily, Verdict};
pub use convex::{AffinePiece, ConjugateValue, ConvexFn};
pub use duality::{coupling, monotone_gap, natural_pairing, ExtReal, PrimalDualPoint, Tolerance};
pub use error::{Error, Result};
pub use operators::{OperatorHandle, OperatorKind};
pub use regions::{Bound, GridSpec, Interval, Region};
pub use scalar::Scalar;
pub use sumcalc::SumPartner;

pub type PointF64 = PrimalDualPoint<f64>;
pub type ExtRealF64 = ExtReal<f64>;
pub type ToleranceF64 = Tolerance<f64>;
pub type RegionF64 = Region<f64>;
pub type GridSpecF64 = GridSpec<f64>;
pub type ConvexFnF64 = ConvexFn<f64>;
pub type OperatorF64 = OperatorHandle<f64>;
pub type VerdictF64 = Verdict<f64>;

pub type PointF32 = PrimalDualPoint<f32>;
pub type RegionF32 = Region<f32>;
pub type GridSpecF32 = GridSpec<f32>;
pub type OperatorF32 = OperatorHandle<f32>;
