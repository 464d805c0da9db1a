//! Thermal motional ensembles and their mixture-averaged rotation fidelity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{thermal_fidelity_curve, CurvePoint};
use crate::error::{Error, Result};
use crate::evolve::RotationEngine;
use crate::fock::{FranckCondonMatrix, MotionalAmplitudes};
use crate::hamiltonian::TrapConfig;
use crate::qubit::QubitAmps;

/// Tail mass the CLI accepts when it picks a truncation for an ensemble.
pub const PRODUCTION_TAIL: f64 = 1e-10;

/// Boltzmann occupations of the trap number states, truncated and
/// renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalEnsemble {
    t_ratio: f64,
    weights: Vec<f64>,
    renorm_defect: f64,
}

impl ThermalEnsemble {
    /// All weight on `|0⟩`: the zero-temperature limit.
    pub fn ground(n_max: usize) -> Self {
        let mut weights = vec![0.0; n_max + 1];
        weights[0] = 1.0;
        Self {
            t_ratio: 0.0,
            weights,
            renorm_defect: 0.0,
        }
    }

    /// Smallest truncation whose discarded tail is below `tail`.
    pub fn with_tail_below(t_ratio: f64, tail: f64) -> Result<Self> {
        if !(tail > 0.0 && tail < 1.0) {
            return Err(Error::param("tail", tail, "must lie in (0, 1)"));
        }
        check_t_ratio(t_ratio)?;
        let n_max = (t_ratio * (1.0 / tail).ln()).floor() as usize;
        let mut ens = thermal_weights(t_ratio, n_max)?;
        while ens.renorm_defect >= tail {
            ens = thermal_weights(t_ratio, ens.n_max() + 1)?;
        }
        Ok(ens)
    }

    pub fn t_ratio(&self) -> f64 {
        self.t_ratio
    }

    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Probability mass discarded by the truncation before renormalizing.
    pub fn renorm_defect(&self) -> f64 {
        self.renorm_defect
    }

    /// The pure state `c_n = √ρ_n` with all phases zero.
    pub fn zero_phase_state(&self) -> MotionalAmplitudes {
        MotionalAmplitudes::new(self.weights.iter().map(|w| Complex64::new(w.sqrt(), 0.0)).collect())
    }
}

fn check_t_ratio(t_ratio: f64) -> Result<()> {
    if !(t_ratio.is_finite() && t_ratio > 0.0) {
        return Err(Error::param(
            "t_ratio",
            t_ratio,
            "must be positive; use ThermalEnsemble::ground for T = 0",
        ));
    }
    Ok(())
}

/// `ρ_n ∝ e^{-n/t}` for `n <= n_max`, with `t = k_B T / ħω`.
pub fn thermal_weights(t_ratio: f64, n_max: usize) -> Result<ThermalEnsemble> {
    check_t_ratio(t_ratio)?;
    let ratio = (-1.0 / t_ratio).exp();
    let raw: Vec<f64> = (0..=n_max).map(|n| (-(n as f64) / t_ratio).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(ThermalEnsemble {
        t_ratio,
        weights: raw.iter().map(|w| w / total).collect(),
        // Σ_{n > n_max} (1 - r) rⁿ
        renorm_defect: ratio.powi(n_max as i32 + 1),
    })
}

/// `exp[-½ η² coth(1/(2t))]`.
pub fn mean_eta_closed_form(t_ratio: f64, eta_ld: f64) -> Result<f64> {
    check_t_ratio(t_ratio)?;
    let coth = 1.0 / (0.5 / t_ratio).tanh();
    Ok((-0.5 * eta_ld * eta_ld * coth).exp())
}

/// `Σ_n ρ_n η_nn`.
pub fn mean_eta_numeric(ens: &ThermalEnsemble, fc: &FranckCondonMatrix) -> Result<f64> {
    if fc.n_max() < ens.n_max() {
        return Err(Error::DimensionMismatch {
            expected: ens.n_max() + 1,
            found: fc.dim(),
        });
    }
    Ok(ens
        .weights
        .iter()
        .enumerate()
        .map(|(n, w)| w * fc.get(n, n).re)
        .sum())
}

/// Uniform phase in `[0, 2π)` for level `n`, from a ChaCha8 stream keyed by
/// `(seed, n)`: independent of evaluation order.
pub fn random_phase(seed: u64, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    std::f64::consts::TAU * rng.random::<f64>()
}

/// `c_n = √ρ_n e^{-iφ_n}` with reproducible random phases.
pub fn sample_random_phase_state(ens: &ThermalEnsemble, seed: u64) -> MotionalAmplitudes {
    MotionalAmplitudes::new(
        ens.weights
            .iter()
            .enumerate()
            .map(|(n, w)| Complex64::from_polar(w.sqrt(), -random_phase(seed, n)))
            .collect(),
    )
}

/// Mixture fidelity `Σ_n ρ_n F_n` of a rotation of area `theta`, each `F_n`
/// starting from the number state `|n⟩_g` and evolving under the full
/// ladder Hamiltonian.
pub fn thermal_fidelity(cfg: &TrapConfig, ens: &ThermalEnsemble, q: QubitAmps, theta: f64) -> Result<f64> {
    let engine = RotationEngine::new(cfg, true)?;
    let points: Vec<CurvePoint> = thermal_fidelity_curve(&engine, ens, q, &[theta])?;
    Ok(points[0].fidelity)
}
