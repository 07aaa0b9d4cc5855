//! Plane-wave optics for planar multilayer surface plasmon resonance sensors.
//!
//! The crate is `no_std` (with `alloc`). It covers the numerical side of a
//! Kretschmann prism-coupled sensor:
//!
//! - [`materials`]: tabulated complex refractive indices and interpolation.
//! - [`tmm`]: characteristic-matrix reflectance, angular sweeps and field profiles.
//! - [`parratt`]: an independent recursive reflectivity used to cross-check [`tmm`].
//! - [`stack`]: a material-level description of prism, films and analyte.
//! - [`metrics`]: resonance angle, FWHM, sensitivity and figure of merit.
//! - [`optimizer`]: grid sweeps and golden-section refinement of one parameter.
//! - [`bundled`] and [`table1`]: built-in optical constants and benchmark stacks.
//!
//! Angles are in degrees and lengths in nanometres at every public boundary.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bundled;
pub mod materials;
pub mod metrics;
pub mod optimizer;
pub mod parratt;
pub mod stack;
pub mod table1;
pub mod tmm;

pub use num_complex::Complex64;

pub use materials::{DispersionRow, DispersionTable, Material, MaterialError};
pub use metrics::{MetricsConfig, MetricsError, ResonanceMetrics, SweepWindow};
pub use optimizer::{Objective, OptimizerError, ParameterSpec, SweepResult, Target};
pub use stack::{Layer, Stack, StackError};
pub use tmm::{FieldProfile, Film, Multilayer, Polarization, ReflectanceCurve, SweepError};
