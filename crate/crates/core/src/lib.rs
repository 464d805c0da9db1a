//! Motional decoherence of a single trapped atom or ion whose qubit lives in
//! its electronic states.
//!
//! A resonant running-wave drive couples each trap level `|g,n⟩` to the
//! recoil wave packet `|e_p,n⟩`; the wave packets are in turn coupled to
//! their neighbours by the trap. This crate builds that ladder, evolves
//! product and thermal initial states through single-bit rotations, traces
//! out the motion, and scores the electronic state against the ideal
//! rotation.
//!
//! Units: ħ = 1 and the trap frequency sets the rate scale.

pub mod curve;
pub mod error;
pub mod evolve;
pub mod fock;
pub mod hamiltonian;
pub mod qubit;
pub mod thermal;

pub use nalgebra;
pub use num_complex;

pub use curve::{pure_fidelity_curve, theta_grid, thermal_fidelity_curve, CurvePoint};
pub use error::{Error, Result};
pub use evolve::{
    analytic_h0_evolution, evolve_rotation, free_evolution_rephase, manifold_overlaps, propagate,
    LadderSpectrum, PulseSpec, RotationEngine, RotationOutcome,
};
pub use fock::{fc_factor, fc_matrix, laguerre_assoc, unitarity_defect, FranckCondonMatrix, MotionalAmplitudes};
pub use hamiltonian::{build_h0, build_h1, g_to_p, p_to_g, TotalState, TrapConfig};
pub use qubit::{
    analytic_reduced_density, eta_parameter, fast_pulse_coherence, fidelity, reduce, target_density,
    QubitAmps, ReducedDensity,
};
pub use thermal::{
    mean_eta_closed_form, mean_eta_numeric, sample_random_phase_state, thermal_fidelity, thermal_weights,
    ThermalEnsemble,
};

/// `(2|0⟩ + √2|1⟩ + |2⟩)/√7`, the broader of the two pure motional states
/// compared in the figure experiments.
pub fn spread_state() -> MotionalAmplitudes {
    let s = 7f64.sqrt();
    MotionalAmplitudes::from_real(&[2.0 / s, 2f64.sqrt() / s, 1.0 / s])
}
