//! Mean-field dynamics of a Bose–Einstein condensate in a double-well
//! potential, coupled to a Markovian environment.
//!
//! The condensate is a two-mode state (|R⟩, |L⟩) described by a 2×2 density
//! matrix evolving under the nonlinear master equation
//!
//! ```text
//! dρ/dt = −i[H(ρ), ρ] + (Γ/2)(2AρA† − ρA†A − A†Aρ)
//! H(ρ)  = (γ/2 + (c/2)(ρ_RR − ρ_LL)) σz + (V/2) σx
//! ```
//!
//! with A a linear combination of Pauli operators (σ₊ decay, σx tunneling
//! noise, σz dephasing, or custom).
//!
//! * [`model`] state types, operators and the right-hand side
//! * [`integrator`] RK4 / Dormand–Prince time stepping with physics guards
//! * [`analysis`] window summaries, self-trapping and jump detection
//! * [`experiment`] parameter sweeps, figure presets, CSV/JSON export
//! * [`cli`] the `duetdyn` command line
//!
//! See the `examples/` directory for one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod integrator;
pub mod model;
pub mod validate;

pub use error::{Error, Result};
pub use integrator::{
    evolve, evolve_gpe, steady_state, IntegratorConfig, Method, Sample, SteadyState, TimeGrid,
    Trajectory,
};
pub use model::{
    bloch_from_density, bloch_rhs, build_hamiltonian, build_lindblad_operator, closed_energy,
    density_from_bloch, density_from_initial, dissipator, rhs, BlochVector, DensityMatrix,
    InitialState, LindbladPreset, LindbladSpec, MasterEquation, ModelParams, Op2, C64,
};
