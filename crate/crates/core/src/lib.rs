//! Simulation and analysis toolkit for a two-level atom coupled to a
//! single-mode quantized bosonic field inside an ideal cavity, in the
//! strong-coupling, far-off-resonance regime `ω ≪ ω₀ ≪ gχ`.
//!
//! The total Hamiltonian is
//!
//! ```text
//! H = (ω₀/2) σ_z + ω a†a + g χ σ_x x̂ ,    χ = √(2mω),  χ x̂ = a + a† ,
//! ```
//!
//! in atomic units (ħ = 1). The crate provides:
//!
//! - [`model`]: parameter validation, Gaussian environment packets, density
//!   matrices, Bloch vectors, and position ↔ Fock conversions;
//! - [`propagator`]: the closed-form interaction-picture evolution operator
//!   valid in the strong-coupling regime, composite-state evolution, and the
//!   time-dependent pointer states of the system and the environment;
//! - [`oracle`]: exact, approximation-free propagation of the full
//!   Hamiltonian in a truncated Fock basis, used as ground truth;
//! - [`pointer`]: the general pointer-state search machinery — given any
//!   propagator ansatz, locate the qubit initial states whose environment
//!   branches stay parallel;
//! - [`decoherence`]: closed-form decoherence observables (reduced density
//!   matrices, Bloch trajectories, decoherence time, pointer-basis
//!   coherences and their revival);
//! - [`compare`]: side-by-side runs of the closed forms against the exact
//!   oracle with convergence control.

pub mod compare;
pub mod decoherence;
pub mod error;
pub mod model;
pub mod oracle;
pub mod pointer;
pub mod propagator;
pub mod wavefunction;

pub use error::{Error, Result};
pub use model::{BlochVector, DensityMatrix2, ModelParams, QubitAmplitudes};
pub use wavefunction::{CompositeState, EnvWavefunction, Picture, PositionGrid};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;
