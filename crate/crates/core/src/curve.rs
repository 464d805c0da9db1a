//! Fidelity-versus-pulse-area curves for pure and thermal motional states,
//! built on a shared [`RotationEngine`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::{PreparedBatch, RotationEngine};
use crate::fock::MotionalAmplitudes;
use crate::hamiltonian::TotalState;
use crate::qubit::{fidelity, target_density, QubitAmps};
use crate::thermal::ThermalEnsemble;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub theta: f64,
    pub fidelity: f64,
    /// Population in the top truncation window after the pulse.
    pub edge_population: f64,
}

/// `n` evenly spaced pulse areas covering `[lo, hi]` inclusive.
pub fn theta_grid(points: usize, lo: f64, hi: f64) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn evaluate(
    engine: &RotationEngine,
    batch: &PreparedBatch,
    weights: &[f64],
    q: QubitAmps,
    thetas: &[f64],
) -> Result<Vec<CurvePoint>> {
    thetas
        .par_iter()
        .map(|&theta| {
            let target = target_density(q, theta);
            let outcomes = engine.rotate(batch, theta)?;
            // fixed summation order keeps results bit-stable
            let mut f = 0.0;
            let mut edge = 0.0;
            for (w, o) in weights.iter().zip(&outcomes) {
                f += w * fidelity(&target, &o.density)?;
                edge += w * o.edge_population;
            }
            Ok(CurvePoint {
                theta,
                fidelity: f,
                edge_population: edge,
            })
        })
        .collect()
}

/// Fidelity curve for `(α|g⟩ + β|e⟩) ⊗ Σ c_n |n⟩_g`.
pub fn pure_fidelity_curve(
    engine: &RotationEngine,
    q: QubitAmps,
    motion: &MotionalAmplitudes,
    thetas: &[f64],
) -> Result<Vec<CurvePoint>> {
    let motion = motion.resized(engine.config().n_max)?;
    let state = TotalState::product(q, &motion, engine.fc())?;
    let batch = engine.prepare(&[state])?;
    evaluate(engine, &batch, &[1.0], q, thetas)
}

/// Mixture fidelity curve `Σ_n ρ_n F_n(θ)` over number-state initial
/// conditions.
pub fn thermal_fidelity_curve(
    engine: &RotationEngine,
    ens: &ThermalEnsemble,
    q: QubitAmps,
    thetas: &[f64],
) -> Result<Vec<CurvePoint>> {
    let n_max = engine.config().n_max;
    if ens.n_max() > n_max {
        return Err(Error::DimensionMismatch {
            expected: n_max + 1,
            found: ens.n_max() + 1,
        });
    }
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for (n, &w) in ens.weights().iter().enumerate() {
        if w > 0.0 {
            let motion = MotionalAmplitudes::number_state(n, n_max);
            states.push(TotalState::product(q, &motion, engine.fc())?);
            weights.push(w);
        }
    }
    let batch = engine.prepare(&states)?;
    evaluate(engine, &batch, &weights, q, thetas)
}
