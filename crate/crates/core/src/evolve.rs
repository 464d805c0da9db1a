//! Time propagation of the joint state by exact spectral decomposition.
//!
//! The interaction-picture Hamiltonian is time independent, so
//! `exp(-iHτ)` is applied through its eigenbasis. For the ladder
//! Hamiltonian the diagonal gauge `|x,n⟩ → iⁿ |x,n⟩` makes every matrix
//! element real, which lets [`LadderSpectrum`] use a real symmetric
//! eigensolver and real matrix products.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::fock::{fc_matrix, FranckCondonMatrix};
use crate::hamiltonian::{e_index, g_index, TotalState, TrapConfig};
use crate::qubit::ReducedDensity;

const HERMITIAN_TOL: f64 = 1e-10;

/// Pulse area `θ` of a constant resonant drive and the implied duration
/// `τ = 2θ/Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub theta: f64,
    pub tau: f64,
}

impl PulseSpec {
    pub fn new(theta: f64, rabi: f64) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::param("theta", theta, "must be finite and non-negative"));
        }
        if theta == 0.0 {
            return Ok(Self { theta, tau: 0.0 });
        }
        if !(rabi.is_finite() && rabi > 0.0) {
            return Err(Error::param("rabi", rabi, "a nonzero pulse area needs a drive"));
        }
        Ok(Self {
            theta,
            tau: 2.0 * theta / rabi,
        })
    }
}

fn hermitian_defect(h: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `exp(-iHτ)·state` for an arbitrary Hermitian `H` in the interleaved basis.
pub fn propagate(h: &DMatrix<Complex64>, state: &TotalState, tau: f64) -> Result<TotalState> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    check_dim(h.nrows(), 2 * state.g_amps.len())?;
    let defect = hermitian_defect(h);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let eig = SymmetricEigen::new(h.clone());
    let psi = state.to_interleaved();
    let mut a = eig.eigenvectors.ad_mul(&psi);
    for (ak, &e) in a.iter_mut().zip(eig.eigenvalues.iter()) {
        *ak *= Complex64::from_polar(1.0, -e * tau);
    }
    TotalState::from_interleaved(&(&eig.eigenvectors * a))
}

/// Paired evolution of level `n` under the drive block alone:
/// returns `(C^g(τ), C^e(τ))` for resonant driving.
pub fn analytic_h0_evolution(
    cg0: Complex64,
    ce0: Complex64,
    n: usize,
    theta: f64,
    omega_tau: f64,
) -> (Complex64, Complex64) {
    let phase = Complex64::from_polar(1.0, -(n as f64) * omega_tau);
    let (s, c) = theta.sin_cos();
    let mi = Complex64::new(0.0, -1.0);
    (
        phase * (cg0 * c + mi * ce0 * s),
        phase * (ce0 * c + mi * cg0 * s),
    )
}

/// `iⁿ` for interleaved index `i` (level `n = i / 2`).
fn gauge(i: usize) -> Complex64 {
    match (i / 2) % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Real symmetric form of the ladder Hamiltonian, `P† H P` with
/// `P = diag(iⁿ)`.
pub(crate) fn real_gauge_hamiltonian(cfg: &TrapConfig, include_h1: bool) -> DMatrix<f64> {
    let dim = cfg.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..=cfg.n_max {
        let (g, e) = (g_index(n), e_index(n));
        let level = n as f64 * cfg.omega;
        h[(g, g)] = level;
        h[(e, e)] = level - cfg.detuning;
        h[(g, e)] = 0.5 * cfg.rabi;
        h[(e, g)] = 0.5 * cfg.rabi;
        if include_h1 && n < cfg.n_max {
            let v = cfg.eta_ld * cfg.omega * ((n + 1) as f64).sqrt();
            h[(e_index(n + 1), e)] = v;
            h[(e, e_index(n + 1))] = v;
        }
    }
    h
}

/// Cached eigendecomposition of the ladder Hamiltonian for one
/// [`TrapConfig`]; read-only after construction and shareable across
/// threads.
#[derive(Debug, Clone)]
pub struct LadderSpectrum {
    cfg: TrapConfig,
    energies: DVector<f64>,
    // eigenvectors of the real-gauge Hamiltonian, one per column
    vectors: DMatrix<f64>,
}

impl LadderSpectrum {
    pub fn new(cfg: &TrapConfig, include_h1: bool) -> Result<Self> {
        cfg.validate()?;
        let eig = SymmetricEigen::new(real_gauge_hamiltonian(cfg, include_h1));
        Ok(Self {
            cfg: *cfg,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn config(&self) -> &TrapConfig {
        &self.cfg
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// Columns of `state` (interleaved, physical gauge) expressed in the
    /// eigenbasis, split into real and imaginary parts.
    fn to_eigenbasis(&self, columns: &DMatrix<Complex64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let dim = self.cfg.dim();
        let mut re = DMatrix::zeros(dim, columns.ncols());
        let mut im = DMatrix::zeros(dim, columns.ncols());
        for j in 0..columns.ncols() {
            for i in 0..dim {
                let z = gauge(i).conj() * columns[(i, j)];
                re[(i, j)] = z.re;
                im[(i, j)] = z.im;
            }
        }
        (self.vectors.tr_mul(&re), self.vectors.tr_mul(&im))
    }

    fn phase_rotate(&self, re: &DMatrix<f64>, im: &DMatrix<f64>, tau: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut out_re = re.clone();
        let mut out_im = im.clone();
        for (k, &e) in self.energies.iter().enumerate() {
            let (s, c) = (-e * tau).sin_cos();
            for j in 0..re.ncols() {
                let (a, b) = (re[(k, j)], im[(k, j)]);
                out_re[(k, j)] = a * c - b * s;
                out_im[(k, j)] = a * s + b * c;
            }
        }
        (out_re, out_im)
    }

    /// `exp(-iHτ)·state`.
    pub fn evolve(&self, state: &TotalState, tau: f64) -> Result<TotalState> {
        check_dim(self.cfg.n_max, state.n_max())?;
        let psi = DMatrix::from_column_slice(self.cfg.dim(), 1, state.to_interleaved().as_slice());
        let (re, im) = self.to_eigenbasis(&psi);
        let (re, im) = self.phase_rotate(&re, &im, tau);
        let (re, im) = (&self.vectors * re, &self.vectors * im);
        let out = DVector::from_fn(self.cfg.dim(), |i, _| gauge(i) * Complex64::new(re[i], im[i]));
        TotalState::from_interleaved(&out)
    }
}

/// Propagates `state` through a rotation of area `pulse.theta`, under the
/// drive block alone or with the wave-packet coupling switched on.
pub fn evolve_rotation(
    cfg: &TrapConfig,
    state: &TotalState,
    pulse: PulseSpec,
    include_h1: bool,
) -> Result<TotalState> {
    if pulse.theta == 0.0 {
        return Ok(state.clone());
    }
    let expected = PulseSpec::new(pulse.theta, cfg.rabi)?;
    if (expected.tau - pulse.tau).abs() > 1e-12 * expected.tau.max(1.0) {
        return Err(Error::param("tau", pulse.tau, "inconsistent with 2θ/Ω"));
    }
    LadderSpectrum::new(cfg, include_h1)?.evolve(state, pulse.tau)
}

/// Waits one trap period `2π/ω` with the drive off.
pub fn free_evolution_rephase(cfg: &TrapConfig, state: &TotalState) -> Result<TotalState> {
    let idle = TrapConfig { rabi: 0.0, ..*cfg };
    LadderSpectrum::new(&idle, true)?.evolve(state, 2.0 * std::f64::consts::PI / cfg.omega)
}

/// `|⟨a|b⟩| / (‖a‖‖b‖)` on the ground and excited manifolds separately;
/// `None` for a manifold that is empty in either state.
pub fn manifold_overlaps(a: &TotalState, b: &TotalState) -> (Option<f64>, Option<f64>) {
    let one = |x: &crate::fock::MotionalAmplitudes, y: &crate::fock::MotionalAmplitudes| {
        let nn = (x.norm_sqr() * y.norm_sqr()).sqrt();
        (nn > 0.0).then(|| x.inner(y).norm() / nn)
    };
    (one(&a.g_amps, &b.g_amps), one(&a.e_amps, &b.e_amps))
}

/// Rotations of many initial states at many pulse areas, reduced straight to
/// the electronic density matrix.
///
/// Precomputes the eigenbasis once, together with the real matrices that map
/// eigen-coefficients onto ground amplitudes and onto excited amplitudes
/// converted to the trap number basis. Per pulse area only phase rotations
/// and real matrix products remain.
#[derive(Debug, Clone)]
pub struct RotationEngine {
    spectrum: LadderSpectrum,
    fc: FranckCondonMatrix,
    to_ground: DMatrix<f64>,
    to_excited_g: DMatrix<f64>,
    edge: DMatrix<f64>,
}

/// Eigen-coefficients of a batch of initial states.
#[derive(Debug, Clone)]
pub struct PreparedBatch {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl PreparedBatch {
    pub fn len(&self) -> usize {
        self.re.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.re.ncols() == 0
    }
}

/// Outcome of one rotation: the reduced state and the population left in
/// the top truncation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationOutcome {
    pub density: ReducedDensity,
    pub edge_population: f64,
}

impl RotationEngine {
    pub fn new(cfg: &TrapConfig, include_h1: bool) -> Result<Self> {
        let spectrum = LadderSpectrum::new(cfg, include_h1)?;
        let fc = fc_matrix(cfg.n_max, cfg.eta_ld)?;
        let levels = cfg.n_max + 1;
        let dim = cfg.dim();

        // F† acting on the excited block, moved into the real gauge:
        // conj(i^{n'}) (F†)_{n'n} i^n is real for this phase pattern.
        let mut gauge_adj = DMatrix::zeros(levels, levels);
        for np in 0..levels {
            for n in 0..levels {
                let z = gauge(2 * np).conj() * fc.get(n, np).conj() * gauge(2 * n);
                debug_assert!(z.im.abs() <= 1e-12 * (1.0 + z.re.abs()));
                gauge_adj[(np, n)] = z.re;
            }
        }
        let vectors = &spectrum.vectors;
        let ground = DMatrix::from_fn(levels, dim, |n, k| vectors[(g_index(n), k)]);
        let excited = DMatrix::from_fn(levels, dim, |n, k| vectors[(e_index(n), k)]);
        let window = edge_window(cfg.n_max);
        let edge = DMatrix::from_fn(2 * window, dim, |r, k| vectors[(dim - 2 * window + r, k)]);
        Ok(Self {
            to_excited_g: gauge_adj * excited,
            to_ground: ground,
            edge,
            spectrum,
            fc,
        })
    }

    pub fn config(&self) -> &TrapConfig {
        self.spectrum.config()
    }

    pub fn fc(&self) -> &FranckCondonMatrix {
        &self.fc
    }

    pub fn spectrum(&self) -> &LadderSpectrum {
        &self.spectrum
    }

    pub fn prepare(&self, states: &[TotalState]) -> Result<PreparedBatch> {
        let dim = self.config().dim();
        let mut cols = DMatrix::zeros(dim, states.len());
        for (j, s) in states.iter().enumerate() {
            check_dim(self.config().n_max, s.n_max())?;
            cols.set_column(j, &s.to_interleaved());
        }
        let (re, im) = self.spectrum.to_eigenbasis(&cols);
        Ok(PreparedBatch { re, im })
    }

    /// Reduced density and edge population of every prepared state after a
    /// rotation of area `theta`.
    pub fn rotate(&self, batch: &PreparedBatch, theta: f64) -> Result<Vec<RotationOutcome>> {
        let pulse = PulseSpec::new(theta, self.config().rabi)?;
        let (re, im) = self.spectrum.phase_rotate(&batch.re, &batch.im, pulse.tau);
        let (g_re, g_im) = (&self.to_ground * &re, &self.to_ground * &im);
        let (d_re, d_im) = (&self.to_excited_g * &re, &self.to_excited_g * &im);
        let (t_re, t_im) = (&self.edge * &re, &self.edge * &im);
        let out = (0..batch.len())
            .map(|j| {
                let mut gg = 0.0;
                let mut ge = Complex64::new(0.0, 0.0);
                for k in 0..g_re.nrows() {
                    let g = Complex64::new(g_re[(k, j)], g_im[(k, j)]);
                    let d = Complex64::new(d_re[(k, j)], d_im[(k, j)]);
                    gg += g.norm_sqr();
                    ge += g * d.conj();
                }
                let edge_population = t_re.column(j).norm_squared() + t_im.column(j).norm_squared();
                RotationOutcome {
                    density: ReducedDensity::new(gg, ge),
                    edge_population,
                }
            })
            .collect();
        Ok(out)
    }
}

/// Number of top levels watched for truncation leakage.
pub fn edge_window(n_max: usize) -> usize {
    ((n_max + 1) / 8).max(1)
}
