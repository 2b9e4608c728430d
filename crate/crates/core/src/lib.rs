//! One-particle quantum lattice gas automaton on a periodic one-dimensional
//! lattice.
//!
//! The automaton carries a two-component complex amplitude (left/right mover)
//! on each of `N` sites and evolves by one application of a three-site
//! unitary stencil per time step.  The local rule is parametrized by two
//! angles `(theta, rho)`; a per-site phase multiplier turns the homogeneous
//! automaton into one with an inhomogeneous scalar potential.
//!
//! Modules:
//! - [`lattice`]: domain types and the exact unitary time step.
//! - [`spectral`]: closed-form plane-wave theory, dispersion relation, and
//!   the transform to the conserved `(k, branch)` basis.
//! - [`packets`]: binomial wave packets and trajectory diagnostics.
//! - [`linalg`]: dense complex matrices, global evolution-operator assembly,
//!   and a unitary eigendecomposition with verified residuals.

pub mod lattice;
pub mod linalg;
pub mod packets;
pub mod spectral;

pub use lattice::{
    evolve, step, LatticeError, LatticeSpec, LocalRule, Mat2, PotentialProfile, RuleParams,
    Spinor, StateVector, Velocity,
};
pub use linalg::{
    assemble_global_u, eigendecompose_unitary, flatten_state, state_from_flat, ComplexMatrix,
    LinalgError, SpectralResult,
};
pub use packets::{
    packet_momentum_amplitudes, track_packet, wave_packet, MomentumRoute, PacketDiagnostics,
    PacketError, Region, WavePacketSpec,
};
pub use spectral::{
    branch_spinor, continuum_mass_term, dispersion_omega, fourier_amplitudes, group_velocity,
    homogeneous_spectrum, plane_wave, transfer_matrix, Branch, DispersionPoint, FourierSpectrum,
    MassExpansion, PlaneWaveIndex, SpectralError,
};
