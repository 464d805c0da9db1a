//! Shared inputs for the criterion benchmarks.

use trapfid_core::thermal::PRODUCTION_TAIL;
use trapfid_core::{RotationEngine, ThermalEnsemble, TrapConfig};

/// Engine for the figure parameters: `Ω = 100 ω`.
pub fn engine(eta_ld: f64, n_max: usize) -> RotationEngine {
    RotationEngine::new(&TrapConfig::new(eta_ld, 100.0, n_max).expect("valid trap"), true).expect("engine")
}

/// Thermal ensemble with the production tail and its recommended basis size.
pub fn ensemble(t_ratio: f64) -> (ThermalEnsemble, usize) {
    let ens = ThermalEnsemble::with_tail_below(t_ratio, PRODUCTION_TAIL).expect("valid temperature");
    let n_max = ens.n_max() + 16;
    (ens, n_max)
}
