//! Foliation-preserving integrators.
//!
//! A vector field is *foliate* when its flow maps the leaves of a foliation to
//! leaves. This crate builds one-step integrators with the same property for
//! foliations whose leaves are orbits of a matrix group action. Example
//! systems and diagnostics for measuring leaf drift come with it.
//!
//! * [`matgroup`]: dense matrices, `exp`, commutators, `dexp⁻¹`.
//! * [`foliation`]: group actions, split foliate fields, decomposition and
//!   numerical foliateness checks.
//! * [`integrators`]: Runge–Kutta, implicit midpoint, Lie–Euler, RKMK on
//!   `G × M`, projection, discrete gradient and splitting steppers.
//! * [`systems`]: the built-in catalogue of example systems.
//! * [`diagnostics`]: trajectories, drift reports, order estimation and the
//!   figure datasets.
//! * [`cli`]: the `foliate` experiment runner.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod foliation;
pub mod integrators;
pub mod matgroup;
pub mod systems;

pub use error::{Error, Result};
pub use matgroup::Matrix;

/// Deterministic RNG used for every sampled quantity.
pub type SeededRng = rand_chacha::ChaCha8Rng;
