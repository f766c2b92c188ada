//! Algebrodynamics workbench: twistor generating functions, shear-free
//! congruences, their fields and singular loci, and worldline root dynamics.

pub mod biquat;
pub mod caustics;
pub mod config;
pub mod congruence;
pub mod error;
pub mod fields;
pub mod numerics;
pub mod uwl;

pub use biquat::{Biquaternion, ComplexPoint, SpacetimePoint, Spinor, SpinorCoords, Twistor};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use numerics::{CPoly, Grid4, MPoly, RootSet, C64};
