//! Electronic qubit bookkeeping: target rotation, partial trace over
//! motion, fidelity, and the closed-form reduced density matrices of the
//! drive-only model.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::fock::{fc_matrix, FranckCondonMatrix, MotionalAmplitudes};
use crate::hamiltonian::{g_to_p, p_to_g, TotalState};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Qubit amplitudes `α|g⟩ + β|e⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitAmps {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitAmps {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(Self { alpha, beta })
    }

    /// `(|g⟩ + |e⟩)/√2`
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alpha: Complex64::new(h, 0.0),
            beta: Complex64::new(h, 0.0),
        }
    }

    pub fn ground() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn with_global_phase(self, phi: f64) -> Self {
        let p = Complex64::from_polar(1.0, phi);
        Self {
            alpha: self.alpha * p,
            beta: self.beta * p,
        }
    }
}

/// 2×2 electronic density matrix `[[ρ_gg, ρ_ge], [ρ_ge*, 1 - ρ_gg]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensity {
    pub rho_gg: f64,
    pub rho_ge: Complex64,
}

impl ReducedDensity {
    pub fn new(rho_gg: f64, rho_ge: Complex64) -> Self {
        Self { rho_gg, rho_ge }
    }

    pub fn pure(q: QubitAmps) -> Self {
        Self {
            rho_gg: q.alpha.norm_sqr(),
            rho_ge: q.alpha * q.beta.conj(),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho_gg: 0.5,
            rho_ge: Complex64::new(0.0, 0.0),
        }
    }

    pub fn rho_ee(&self) -> f64 {
        1.0 - self.rho_gg
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let z = self.rho_gg - 0.5;
        let r = (z * z + self.rho_ge.norm_sqr()).sqrt();
        (0.5 - r, 0.5 + r)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        let (lo, hi) = self.eigenvalues();
        lo >= -tol && hi <= 1.0 + tol
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(self.rho_gg, 0.0),
                self.rho_ge,
                self.rho_ge.conj(),
                Complex64::new(self.rho_ee(), 0.0),
            ],
        )
    }
}

/// Density matrix of the ideally rotated qubit
/// `(α cosθ - iβ sinθ)|g⟩ + (β cosθ - iα sinθ)|e⟩`.
pub fn target_density(q: QubitAmps, theta: f64) -> ReducedDensity {
    let (s, c) = theta.sin_cos();
    let (a, b) = (q.alpha, q.beta);
    let ab = a * b.conj();
    let rho_gg = a.norm_sqr() * c * c + b.norm_sqr() * s * s + (I * (ab - ab.conj())).re * s * c;
    let rho_ge = ab * c * c + b * a.conj() * s * s + I * (a.norm_sqr() - b.norm_sqr()) * s * c;
    ReducedDensity::new(rho_gg, rho_ge)
}

/// Traces out motion. The excited amplitudes are first moved to the trap
/// number basis so both manifolds share one motional basis.
pub fn reduce(state: &TotalState, fc: &FranckCondonMatrix) -> Result<ReducedDensity> {
    check_dim(state.g_amps.len(), state.e_amps.len())?;
    let d = p_to_g(&state.e_amps, fc)?;
    let rho_gg = state.g_amps.norm_sqr();
    // Σ C_n^g conj(d_n)
    let rho_ge = d.inner(&state.g_amps);
    Ok(ReducedDensity::new(rho_gg, rho_ge))
}

/// Same trace, with the ground amplitudes moved to the wave-packet basis
/// instead.
pub fn reduce_in_packet_basis(state: &TotalState, fc: &FranckCondonMatrix) -> Result<ReducedDensity> {
    let g = g_to_p(&state.g_amps, fc)?;
    Ok(ReducedDensity::new(state.g_amps.norm_sqr(), state.e_amps.inner(&g)))
}

const FIDELITY_TOL: f64 = 1e-8;

/// `Tr[ρ_T ρ]`, clamped into `[0, 1]` only for violations below 1e-8.
pub fn fidelity(rho_t: &ReducedDensity, rho: &ReducedDensity) -> Result<f64> {
    let cross = rho_t.rho_ge * rho.rho_ge.conj() + rho_t.rho_ge.conj() * rho.rho_ge;
    if cross.im.abs() > FIDELITY_TOL {
        return Err(Error::ComplexFidelity { imag: cross.im });
    }
    // Bloch form: ½(1 + r_T·r); exact ½ against the maximally mixed state
    let z = (2.0 * rho_t.rho_gg - 1.0) * (2.0 * rho.rho_gg - 1.0);
    let f = 0.5 + 0.5 * z + cross.re;
    if !f.is_finite() || !(-FIDELITY_TOL..=1.0 + FIDELITY_TOL).contains(&f) {
        return Err(Error::FidelityOutOfRange { value: f });
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Quadratic form `c† η c` of the Franck-Condon matrix.
pub fn eta_parameter(c: &MotionalAmplitudes, fc: &FranckCondonMatrix) -> Result<Complex64> {
    fc.check_matches(c.len())?;
    Ok(c.as_vector().dotc(&(fc.entries() * c.as_vector())))
}

/// Closed-form reduced density after evolution under the drive block alone
/// (resonant), for the product initial state `(α|g⟩ + β|e⟩) ⊗ Σ c_n |n⟩_g`.
///
/// `I_ge` is assembled from the four phase-weighted contractions
/// `Y† Φ* η Φ X` over `X, Y ∈ {c, ηc}` with `Φ = diag(e^{-inωτ})`.
pub fn analytic_reduced_density(
    q: QubitAmps,
    theta: f64,
    omega_tau: f64,
    c: &MotionalAmplitudes,
    fc: &FranckCondonMatrix,
) -> Result<ReducedDensity> {
    fc.check_matches(c.len())?;
    let (s, co) = theta.sin_cos();
    let (a, b) = (q.alpha, q.beta);
    let eta = eta_parameter(c, fc)?;
    let ab = a * b.conj();
    let i_g = a.norm_sqr() * co * co
        + b.norm_sqr() * s * s
        + (I * (ab * eta.conj() - (ab * eta.conj()).conj())).re * co * s;

    let e = g_to_p(c, fc)?;
    let dim = fc.dim();
    let phases: Vec<Complex64> = (0..dim)
        .map(|n| Complex64::from_polar(1.0, -(n as f64) * omega_tau))
        .collect();
    // Σ_{n,q} conj(Y_n Φ_n) η_nq Φ_q X_q
    let contract = |y: &MotionalAmplitudes, x: &MotionalAmplitudes| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..dim {
            let yn = (y[n] * phases[n]).conj();
            if yn == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for qi in 0..dim {
                row += fc.get(n, qi) * phases[qi] * x[qi];
            }
            acc += yn * row;
        }
        acc
    };
    let i_ge = I * s * co * (a.norm_sqr() * contract(c, c) - b.norm_sqr() * contract(&e, &e))
        + ab * co * co * contract(&e, c)
        + a.conj() * b * s * s * contract(c, &e);
    Ok(ReducedDensity::new(i_g, i_ge))
}

/// Coherence in the short-pulse limit (or after a full trap period):
/// `i(|α|²-|β|²) sinθ cosθ η(k) + αβ* cos²θ + α*β sin²θ η(2k)`.
pub fn fast_pulse_coherence(q: QubitAmps, theta: f64, c: &MotionalAmplitudes, eta_ld: f64) -> Result<Complex64> {
    let n_max = c.n_max();
    let eta1 = eta_parameter(c, &fc_matrix(n_max, eta_ld)?)?;
    let eta2 = eta_parameter(c, &fc_matrix(n_max, 2.0 * eta_ld)?)?;
    let (s, co) = theta.sin_cos();
    let (a, b) = (q.alpha, q.beta);
    Ok(I * (a.norm_sqr() - b.norm_sqr()) * s * co * eta1
        + a * b.conj() * co * co
        + a.conj() * b * s * s * eta2)
}
