//! Curve planning, truncation policy, fidelity sweeps and the convergence
//! study.

use rayon::prelude::*;
use trapfid_core::thermal::PRODUCTION_TAIL;
use trapfid_core::{
    pure_fidelity_curve, sample_random_phase_state, spread_state, theta_grid, thermal_fidelity_curve,
    CurvePoint, MotionalAmplitudes, RotationEngine, ThermalEnsemble, TrapConfig,
};

use crate::config::{InitialState, Mode, PurePhases, RunConfig, Truncation, N_MAX_CAP};
use crate::error::{CliError, CliResult};

/// A row counts as converged when less population than this reaches the top
/// window of the truncated ladder.
pub const EDGE_TOLERANCE: f64 = 1e-9;

/// Largest max-over-θ fidelity change accepted between successive
/// truncation levels.
pub const CONVERGE_TOLERANCE: f64 = 1e-8;

/// One fidelity curve of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSpec {
    pub eta_ld: f64,
    pub t_ratio: Option<f64>,
    pub state: InitialState,
}

/// Curves of a run in output order.
pub fn plan(cfg: &RunConfig) -> Vec<CurveSpec> {
    let mut out = Vec::new();
    for &eta_ld in &cfg.eta_ld {
        match cfg.mode {
            Mode::Fig2 => {
                for state in [InitialState::Ground, InitialState::Spread] {
                    out.push(CurveSpec {
                        eta_ld,
                        t_ratio: None,
                        state,
                    });
                }
            }
            Mode::Fig3 => {
                for &t in &cfg.t_ratio {
                    for state in [InitialState::Thermal, InitialState::ThermalPure] {
                        out.push(CurveSpec {
                            eta_ld,
                            t_ratio: Some(t),
                            state,
                        });
                    }
                }
            }
            Mode::Sweep | Mode::Converge | Mode::Dump => {
                if cfg.initial_state.is_thermal() {
                    for &t in &cfg.t_ratio {
                        out.push(CurveSpec {
                            eta_ld,
                            t_ratio: Some(t),
                            state: cfg.initial_state,
                        });
                    }
                } else {
                    out.push(CurveSpec {
                        eta_ld,
                        t_ratio: None,
                        state: cfg.initial_state,
                    });
                }
            }
        }
    }
    out
}

/// Initial motion of a curve: a pure state or a thermal ensemble.
#[derive(Debug, Clone)]
pub enum Motion {
    Pure(MotionalAmplitudes),
    Thermal(ThermalEnsemble),
}

impl Motion {
    pub fn build(spec: &CurveSpec, cfg: &RunConfig) -> CliResult<Self> {
        let ensemble = || -> CliResult<ThermalEnsemble> {
            let t = spec.t_ratio.expect("thermal curves carry a temperature");
            Ok(ThermalEnsemble::with_tail_below(t, PRODUCTION_TAIL)?)
        };
        Ok(match spec.state {
            InitialState::Ground => Motion::Pure(MotionalAmplitudes::number_state(0, 0)),
            InitialState::Spread => Motion::Pure(spread_state()),
            InitialState::Custom => Motion::Pure(MotionalAmplitudes::new(cfg.amplitudes.clone())),
            InitialState::Thermal => Motion::Thermal(ensemble()?),
            InitialState::ThermalPure => {
                let ens = ensemble()?;
                Motion::Pure(match cfg.pure_phases {
                    PurePhases::Zero => ens.zero_phase_state(),
                    PurePhases::Random => sample_random_phase_state(&ens, cfg.seed),
                })
            }
        })
    }

    /// Highest trap level the initial state occupies.
    pub fn support_top(&self) -> usize {
        match self {
            Motion::Pure(c) => c.support_top().unwrap_or(0),
            Motion::Thermal(ens) => ens.n_max(),
        }
    }

    /// First level tried by the convergence study.
    pub fn converge_floor(&self) -> usize {
        match self {
            Motion::Pure(_) => (2 * (self.support_top() + 1)).max(8),
            Motion::Thermal(ens) => ens.n_max() + 8,
        }
    }

    pub fn curve(&self, engine: &RotationEngine, cfg: &RunConfig, thetas: &[f64]) -> CliResult<Vec<CurvePoint>> {
        Ok(match self {
            Motion::Pure(c) => pure_fidelity_curve(engine, cfg.qubit, c, thetas)?,
            Motion::Thermal(ens) => thermal_fidelity_curve(engine, ens, cfg.qubit, thetas)?,
        })
    }
}

/// Truncation picked before any physics runs: room for the initial support
/// plus a recoil margin that grows with `η √n`.
pub fn auto_n_max(eta_ld: f64, support_top: usize) -> usize {
    let s = support_top as f64;
    let margin = 16.0 + (12.0 * eta_ld * ((s + 1.0).sqrt() + eta_ld)).ceil();
    (support_top + margin as usize).max(32)
}

/// Truncation for every curve. Curves sharing a Lamb-Dicke parameter share
/// one truncation so they can share an engine.
pub fn resolve_truncation(cfg: &RunConfig, specs: &[CurveSpec], motions: &[Motion]) -> CliResult<Vec<usize>> {
    let mut levels = Vec::with_capacity(specs.len());
    for (spec, motion) in specs.iter().zip(motions) {
        let top = motion.support_top();
        let n = match cfg.truncation {
            Truncation::Fixed(n) if n < top => {
                return Err(CliError::Config(format!(
                    "n-max = {n} cannot hold the {} state at eta-ld = {}{}: it occupies levels up to {top}",
                    spec.state,
                    spec.eta_ld,
                    spec.t_ratio.map(|t| format!(", t-ratio = {t}")).unwrap_or_default(),
                )))
            }
            Truncation::Fixed(n) => n,
            Truncation::Auto => auto_n_max(spec.eta_ld, top),
        };
        if n > N_MAX_CAP {
            return Err(CliError::Config(format!(
                "eta-ld = {} needs n-max = {n}, above the cap {N_MAX_CAP}",
                spec.eta_ld
            )));
        }
        levels.push(n);
    }
    for i in 0..specs.len() {
        let shared = (0..specs.len())
            .filter(|&j| specs[j].eta_ld == specs[i].eta_ld)
            .map(|j| levels[j])
            .max()
            .unwrap_or(levels[i]);
        levels[i] = shared;
    }
    Ok(levels)
}

/// One output line of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub mode: Mode,
    pub theta: f64,
    pub fidelity: f64,
    pub eta_ld: f64,
    pub rabi: f64,
    pub t_ratio: Option<f64>,
    pub initial_state: InitialState,
    pub n_max: usize,
    pub converged: bool,
}

fn trap(cfg: &RunConfig, eta_ld: f64, n_max: usize) -> CliResult<TrapConfig> {
    Ok(TrapConfig::new(eta_ld, cfg.rabi, n_max)?.with_detuning(cfg.detuning)?)
}

/// Fidelity of every planned curve on the configured θ grid, ordered by
/// curve and then by θ.
pub fn run_sweep(cfg: &RunConfig) -> CliResult<Vec<Row>> {
    let specs = plan(cfg);
    let motions = specs.iter().map(|s| Motion::build(s, cfg)).collect::<CliResult<Vec<_>>>()?;
    let levels = resolve_truncation(cfg, &specs, &motions)?;
    let thetas = theta_grid(cfg.theta_points, cfg.theta_min, cfg.theta_max);

    // one engine per distinct (eta, n_max), built in parallel
    let mut keys: Vec<(f64, usize)> = Vec::new();
    for (s, &n) in specs.iter().zip(&levels) {
        if !keys.contains(&(s.eta_ld, n)) {
            keys.push((s.eta_ld, n));
        }
    }
    let engines = keys
        .par_iter()
        .map(|&(eta, n)| Ok(RotationEngine::new(&trap(cfg, eta, n)?, true)?))
        .collect::<CliResult<Vec<_>>>()?;

    let curves = specs
        .par_iter()
        .zip(&motions)
        .zip(&levels)
        .map(|((spec, motion), &n)| {
            let k = keys.iter().position(|&key| key == (spec.eta_ld, n)).expect("engine built");
            motion.curve(&engines[k], cfg, &thetas)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(specs.len() * thetas.len());
    for ((spec, &n), points) in specs.iter().zip(&levels).zip(curves) {
        for p in points {
            rows.push(Row {
                mode: cfg.mode,
                theta: p.theta,
                fidelity: p.fidelity,
                eta_ld: spec.eta_ld,
                rabi: cfg.rabi,
                t_ratio: spec.t_ratio,
                initial_state: spec.state,
                n_max: n,
                converged: p.edge_population < EDGE_TOLERANCE,
            });
        }
    }
    Ok(rows)
}

/// Outcome of the truncation study for one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeReport {
    pub spec: CurveSpec,
    /// Smallest level whose curve agrees with the doubled level.
    pub n_max: usize,
    /// Max-over-θ fidelity change between `n_max` and `2 n_max`.
    pub delta: f64,
    pub levels: Vec<usize>,
}

fn max_delta(a: &[CurvePoint], b: &[CurvePoint]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.fidelity - y.fidelity).abs()).fold(0.0, f64::max)
}

/// Double the truncation from a floor until the fidelity curve stops
/// changing.
pub fn converge_curve(cfg: &RunConfig, spec: &CurveSpec) -> CliResult<ConvergeReport> {
    let motion = Motion::build(spec, cfg)?;
    let thetas = theta_grid(cfg.theta_points, cfg.theta_min, cfg.theta_max);
    let at = |n: usize| -> CliResult<Vec<CurvePoint>> {
        let engine = RotationEngine::new(&trap(cfg, spec.eta_ld, n)?, true)?;
        motion.curve(&engine, cfg, &thetas)
    };
    let mut n = motion.converge_floor();
    if n > N_MAX_CAP {
        return Err(CliError::Convergence(format!(
            "floor n-max = {n} for {} at eta-ld = {} is already above the cap {N_MAX_CAP}",
            spec.state, spec.eta_ld
        )));
    }
    let mut levels = vec![n];
    let mut current = at(n)?;
    let mut delta = f64::INFINITY;
    while 2 * n <= N_MAX_CAP {
        let next = at(2 * n)?;
        levels.push(2 * n);
        delta = max_delta(&current, &next);
        if delta < CONVERGE_TOLERANCE {
            return Ok(ConvergeReport {
                spec: *spec,
                n_max: n,
                delta,
                levels,
            });
        }
        n *= 2;
        current = next;
    }
    Err(CliError::Convergence(format!(
        "{} at eta-ld = {}{} did not converge by n-max = {}: last delta {delta:e}",
        spec.state,
        spec.eta_ld,
        spec.t_ratio.map(|t| format!(", t-ratio = {t}")).unwrap_or_default(),
        levels.last().copied().unwrap_or(n),
    )))
}

/// Convergence study for every planned curve.
pub fn converge(cfg: &RunConfig) -> CliResult<Vec<ConvergeReport>> {
    plan(cfg).iter().map(|spec| converge_curve(cfg, spec)).collect()
}
