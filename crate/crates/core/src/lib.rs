//! Simulator for a three-level EIT quantum battery coupled to a ring of cavities.
//!
//! The atom's dark state stores a single excitation injected through the array. The crate
//! covers the atom spectrum, atom-photon bound states, single-excitation dynamics, a
//! Lindblad cross-check, and ergotropy and charging-power calculations.

// `!(x > y)` comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod figures;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod presets;
pub mod runner;
mod quad;
pub mod spectral;
pub mod thermo;

pub use error::{Error, Region, Result};
pub use model::{Representation, SystemParams, C64};
