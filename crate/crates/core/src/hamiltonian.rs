//! Paired-ladder Hamiltonian in the mixed `{|g,n⟩_g, |e_p,n⟩_p}` basis.
//!
//! Basis vectors are interleaved `(g,0), (e,0), (g,1), (e,1), …` so the
//! block-diagonal drive term is literally a stack of 2×2 Rabi blocks. Units
//! are ħ = 1 and every rate is a multiple of the trap frequency.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::fock::{FranckCondonMatrix, MotionalAmplitudes};
use crate::qubit::QubitAmps;

/// Physical and truncation parameters of one trapped qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// Trap angular frequency; the rate unit.
    pub omega: f64,
    /// Lamb-Dicke parameter `k_L a_x`.
    pub eta_ld: f64,
    /// Rabi frequency of the drive.
    pub rabi: f64,
    /// Laser detuning with the recoil shift already subtracted.
    pub detuning: f64,
    /// Highest retained number state.
    pub n_max: usize,
}

impl TrapConfig {
    pub fn new(eta_ld: f64, rabi: f64, n_max: usize) -> Result<Self> {
        let cfg = Self {
            omega: 1.0,
            eta_ld,
            rabi,
            detuning: 0.0,
            n_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_detuning(mut self, detuning: f64) -> Result<Self> {
        self.detuning = detuning;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::param("omega", self.omega, "must be positive"));
        }
        if !(self.eta_ld.is_finite() && self.eta_ld >= 0.0) {
            return Err(Error::param("eta_ld", self.eta_ld, "must be non-negative"));
        }
        if !(self.rabi.is_finite() && self.rabi >= 0.0) {
            return Err(Error::param("rabi", self.rabi, "must be non-negative"));
        }
        if !self.detuning.is_finite() {
            return Err(Error::param("detuning", self.detuning, "must be finite"));
        }
        Ok(())
    }

    /// Dimension of the joint electronic ⊗ motional space.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }
}

/// Index of `|g,n⟩` in the interleaved basis.
#[inline]
pub fn g_index(n: usize) -> usize {
    2 * n
}

/// Index of `|e_p,n⟩` in the interleaved basis.
#[inline]
pub fn e_index(n: usize) -> usize {
    2 * n + 1
}

/// Joint state: ground-manifold amplitudes in the trap number basis and
/// excited-manifold amplitudes in the recoil wave-packet basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalState {
    pub g_amps: MotionalAmplitudes,
    pub e_amps: MotionalAmplitudes,
}

impl TotalState {
    pub fn new(g_amps: MotionalAmplitudes, e_amps: MotionalAmplitudes) -> Result<Self> {
        check_dim(g_amps.len(), e_amps.len())?;
        Ok(Self { g_amps, e_amps })
    }

    /// `(α|g⟩ + β|e⟩) ⊗ Σ c_n |n⟩_g`, with the excited part re-expressed in
    /// the wave-packet basis.
    pub fn product(q: QubitAmps, motion: &MotionalAmplitudes, fc: &FranckCondonMatrix) -> Result<Self> {
        let e = g_to_p(motion, fc)?;
        Ok(Self {
            g_amps: motion.scaled(q.alpha),
            e_amps: e.scaled(q.beta),
        })
    }

    pub fn n_max(&self) -> usize {
        self.g_amps.n_max()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.g_amps.norm_sqr() + self.e_amps.norm_sqr()
    }

    pub fn to_interleaved(&self) -> DVector<Complex64> {
        let dim = 2 * self.g_amps.len();
        DVector::from_fn(dim, |i, _| {
            if i % 2 == 0 {
                self.g_amps[i / 2]
            } else {
                self.e_amps[i / 2]
            }
        })
    }

    pub fn from_interleaved(v: &DVector<Complex64>) -> Result<Self> {
        if v.len() < 2 || !v.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: v.len() + v.len() % 2,
                found: v.len(),
            });
        }
        let half = v.len() / 2;
        let g = DVector::from_fn(half, |n, _| v[g_index(n)]);
        let e = DVector::from_fn(half, |n, _| v[e_index(n)]);
        Ok(Self {
            g_amps: MotionalAmplitudes::from_vector(g),
            e_amps: MotionalAmplitudes::from_vector(e),
        })
    }
}

/// Drive plus diagonal part: 2×2 blocks `[[nω, Ω/2], [Ω/2, nω - Δ]]`.
pub fn build_h0(cfg: &TrapConfig) -> DMatrix<Complex64> {
    let dim = cfg.dim();
    let half_rabi = Complex64::new(0.5 * cfg.rabi, 0.0);
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..=cfg.n_max {
        let (g, e) = (g_index(n), e_index(n));
        let level = n as f64 * cfg.omega;
        h[(g, g)] = Complex64::new(level, 0.0);
        h[(e, e)] = Complex64::new(level - cfg.detuning, 0.0);
        h[(g, e)] = half_rabi;
        h[(e, g)] = half_rabi;
    }
    h
}

/// Nearest-neighbour coupling of the excited wave-packet ladder,
/// `⟨e_p,n+1| H1 |e_p,n⟩ = i η_LD ω √(n+1)`. The topmost coupling is kept.
pub fn build_h1(cfg: &TrapConfig) -> DMatrix<Complex64> {
    let dim = cfg.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..cfg.n_max {
        let z = Complex64::new(0.0, cfg.eta_ld * cfg.omega * ((n + 1) as f64).sqrt());
        h[(e_index(n + 1), e_index(n))] = z;
        h[(e_index(n), e_index(n + 1))] = z.conj();
    }
    h
}

/// Wave-packet coefficients to trap number-basis coefficients:
/// `d_{n'} = Σ_n c_n conj(η_{n n'})`.
pub fn p_to_g(e_amps: &MotionalAmplitudes, fc: &FranckCondonMatrix) -> Result<MotionalAmplitudes> {
    fc.check_matches(e_amps.len())?;
    Ok(MotionalAmplitudes::from_vector(
        fc.entries().ad_mul(e_amps.as_vector()),
    ))
}

/// Trap number-basis coefficients to wave-packet coefficients:
/// `c_n = Σ_{n'} η_{n n'} d_{n'}`.
pub fn g_to_p(g_amps: &MotionalAmplitudes, fc: &FranckCondonMatrix) -> Result<MotionalAmplitudes> {
    fc.check_matches(g_amps.len())?;
    Ok(MotionalAmplitudes::from_vector(fc.entries() * g_amps.as_vector()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fc_matrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_block() {
        let cfg = TrapConfig::new(0.2, 3.0, 0)
            .unwrap()
            .with_detuning(0.7)
            .unwrap();
        let h = build_h0(&cfg);
        assert_eq!(h.shape(), (2, 2));
        assert_eq!(h[(0, 0)], c(0.0, 0.0));
        assert_eq!(h[(0, 1)], c(1.5, 0.0));
        assert_eq!(h[(1, 0)], c(1.5, 0.0));
        assert_eq!(h[(1, 1)], c(-0.7, 0.0));
    }

    #[test]
    fn undriven_h0_is_ladder_diagonal() {
        let cfg = TrapConfig::new(0.0, 0.0, 4).unwrap();
        let h = build_h0(&cfg);
        let want = DMatrix::from_diagonal(&DVector::from_fn(10, |i, _| c((i / 2) as f64, 0.0)));
        assert_eq!(h, want);
    }

    #[test]
    fn block_three_at_strong_drive() {
        let cfg = TrapConfig::new(0.1, 100.0, 5).unwrap();
        let h = build_h0(&cfg);
        let (g, e) = (g_index(3), e_index(3));
        assert_eq!(h[(g, g)], c(3.0, 0.0));
        assert_eq!(h[(e, e)], c(3.0, 0.0));
        assert_eq!(h[(g, e)], c(50.0, 0.0));
        assert_eq!(h[(e, g)], c(50.0, 0.0));
    }

    #[test]
    fn h1_elements() {
        let zero = build_h1(&TrapConfig::new(0.0, 1.0, 6).unwrap());
        assert!(zero.iter().all(|z| *z == c(0.0, 0.0)));

        let h = build_h1(&TrapConfig::new(0.1, 1.0, 3).unwrap());
        assert_eq!(h[(e_index(1), e_index(0))], c(0.0, 0.1));
        assert_eq!(h[(e_index(0), e_index(1))], c(0.0, -0.1));

        let h = build_h1(&TrapConfig::new(0.3, 1.0, 9).unwrap());
        let top = h[(e_index(9), e_index(8))];
        assert!((top - c(0.0, 0.9)).norm() < 1e-15);
        // nothing on the ground manifold or the cross blocks
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                if i % 2 == 0 || j % 2 == 0 {
                    assert_eq!(h[(i, j)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn hermitian_by_construction() {
        let cfg = TrapConfig::new(0.7, 13.0, 11)
            .unwrap()
            .with_detuning(-0.4)
            .unwrap();
        for h in [build_h0(&cfg), build_h1(&cfg)] {
            assert_eq!(h, h.adjoint());
        }
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(TrapConfig::new(-0.1, 1.0, 3).is_err());
        assert!(TrapConfig::new(0.1, -1.0, 3).is_err());
        assert!(TrapConfig::new(0.1, f64::NAN, 3).is_err());
        let mut cfg = TrapConfig::new(0.1, 1.0, 3).unwrap();
        cfg.omega = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn basis_change_at_zero_eta_is_identity() {
        let fc = fc_matrix(4, 0.0).unwrap();
        let v = MotionalAmplitudes::new(vec![c(0.1, 0.2), c(0.3, -0.1), c(0.0, 0.5), c(0.2, 0.0), c(-0.4, 0.1)]);
        assert_eq!(p_to_g(&v, &fc).unwrap(), v);
        assert_eq!(g_to_p(&v, &fc).unwrap(), v);
    }

    #[test]
    fn wave_packet_ground_in_trap_basis() {
        let fc = fc_matrix(8, 0.3).unwrap();
        let d = p_to_g(&MotionalAmplitudes::number_state(0, 8), &fc).unwrap();
        let e00 = (-0.045f64).exp();
        assert!((d[0] - c(e00, 0.0)).norm() < 1e-15);
        assert!((d[1] - c(0.0, 0.3 * e00)).norm() < 1e-15);
        assert!((d[1].im - 0.286_799).abs() < 1e-6);
    }

    #[test]
    fn basis_change_dimension_checked() {
        let fc = fc_matrix(4, 0.3).unwrap();
        let v = MotionalAmplitudes::number_state(0, 3);
        assert!(matches!(p_to_g(&v, &fc), Err(Error::DimensionMismatch { .. })));
        assert!(g_to_p(&v, &fc).is_err());
    }

    #[test]
    fn interleaving_round_trips() {
        let s = TotalState::new(
            MotionalAmplitudes::new(vec![c(1.0, 0.0), c(2.0, 0.0)]),
            MotionalAmplitudes::new(vec![c(0.0, 3.0), c(0.0, 4.0)]),
        )
        .unwrap();
        let v = s.to_interleaved();
        assert_eq!(v.as_slice(), &[c(1.0, 0.0), c(0.0, 3.0), c(2.0, 0.0), c(0.0, 4.0)]);
        assert_eq!(TotalState::from_interleaved(&v).unwrap(), s);
    }
}
