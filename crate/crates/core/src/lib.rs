//! Weak-probe propagation through a Λ-type EIT medium whose control field
//! carries a periodic phase modulation.
//!
//! The control field `Ω₂ exp(iφ(t))` with `φ(t+2π/Δ) = φ(t)` couples every
//! probe frequency `ω` to the ladder `ω + sΔ`. For each reduced frequency in
//! the base band `[-Δ/2, Δ/2)` the ladder is a finite linear problem; the
//! [`floquet`] engine assembles it, diagonalises the propagation matrix and
//! carries the incoming spectrum to any depth `z`. The [`adiabatic`] module
//! holds the closed-form lossless solutions used both as a fast predictor and
//! as an independent check of the engine.
//!
//! Everything is in atomic units.

pub mod adiabatic;
pub mod analysis;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod model;
pub mod specfun;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
pub use model::{
    chirp_coefficients, derive_kappa2, mixing_angle, ChirpCoefficients, ControlFieldSpec, MediumParams, MixingAngle,
    PhaseModulation, ProbePulseSpec,
};
pub use spectrum::{incoming_spectrum, FloquetGrid, FloquetSpectrum};
pub use units::{AtomicUnits, ATOMIC_UNITS};

pub use num_complex::Complex64;
