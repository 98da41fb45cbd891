//! Flat fronts in hyperbolic 3-space, their Lie sphere lift as Ω-surfaces,
//! and the Calapso deformation of the lift.

// `!(x <= bound)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geom;
pub mod grid;
pub mod ode;
pub mod potential;
pub mod front;
pub mod lift;
pub mod deform;
pub mod convergence;
pub mod validation;

pub use deform::{calapso_transport, deform_front, BaseSurface, Branch, DeformationState, DeformedFront};
pub use error::{Error, Result};
pub use front::{integrate_frame, integrate_frame_with, FrameGrid, FrameOptions, FrontGrid};
pub use geom::{AmbientSplit, ContactElement, SigVec};
pub use grid::{Grid, GridDomain, Stencil};
pub use lift::{curvature_spheres, reconstruct_front, ConnectionFormGrid, SphereCongruenceGrid};
pub use potential::{HarmonicPotential, Term};
pub use validation::{run_validation, DiagnosticsReport, Suite, ValidationConfig};
