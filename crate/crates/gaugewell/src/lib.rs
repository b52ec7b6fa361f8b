//! Numerical laboratory for a charged particle driven by a homogeneous
//! time-dependent field, on the line and in an infinite square well, in two
//! gauge-equivalent descriptions.
//!
//! The crate is organized around the questions the system raises:
//!
//! - [`driving`] — the drive f(t), its primitive F(t) and the induced
//!   displacement ξ(t), anchored so both vanish at the reference time.
//! - [`classical`] — closed-form interior flights, event-driven wall
//!   reflections, the gauge-dependent canonical momenta, and a Benettin
//!   Lyapunov estimator for the driven box.
//! - [`qbasis`] — the sine eigenbasis of the well and dense truncations of
//!   the kinetic-energy, momentum, position and gauge-phase operators,
//!   including the boundary values that obstruct self-adjointness of the
//!   momentum and the formally nonzero momentum/kinetic-energy commutator.
//! - [`qprop`] — time-ordered propagation in both gauges, the unitary gauge
//!   map between them, and the commuting-assumption propagator kept as a
//!   falsifiable (incorrect) baseline.
//! - [`qline`] — grid wavepackets on the line: the closed-form propagator in
//!   the momentum gauge, the gauge phase, a split-step reference integrator,
//!   and mean-position comparisons against the classical path.
//! - [`opanalysis`] — the generalized dilation operator, its symmetry
//!   boundary terms, explicit relative-bound constants in the style of
//!   Kato-Rellich, and defect-index classification of the dilation family.
//! - [`cli`] — run configurations and artifact emission for the `gaugewell`
//!   binary.
//!
//! Runnable demonstrations of each capability live in `examples/`.

pub mod artifact;
pub mod classical;
pub mod cli;
pub mod constants;
pub mod driving;
pub mod error;
pub mod linalg;
pub mod opanalysis;
pub mod qbasis;
pub mod qline;
pub mod qprop;
pub mod quadrature;

pub use constants::PhysicalConstants;
pub use driving::{DrivingField, FieldKind};
pub use error::{Error, Result};
