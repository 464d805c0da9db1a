//! Truncated harmonic-oscillator number basis: associated Laguerre
//! polynomials, Franck-Condon (displacement) matrix elements, and the
//! Gram-product diagnostics used to certify a truncation.
//!
//! The Franck-Condon factor of a photon recoil along the trap axis is
//!
//! ```text
//! η_nm = ⟨n| exp(-i η_LD (b + b†)) |m⟩ = ⟨n| D(α) |m⟩,   α = -i η_LD
//! ```
//!
//! Every element has the form `(-i)^|n-m| · r_nm` with `r` real and
//! symmetric, so the matrix is complex symmetric and its phase pattern is
//! fixed by `|n - m|` alone.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};

/// Complex coefficients over the number states `|0⟩ .. |n_max⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionalAmplitudes(DVector<Complex64>);

impl MotionalAmplitudes {
    pub fn new(amps: Vec<Complex64>) -> Self {
        assert!(!amps.is_empty(), "motional amplitudes need at least one level");
        Self(DVector::from_vec(amps))
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn zeros(n_max: usize) -> Self {
        Self(DVector::zeros(n_max + 1))
    }

    /// The number state `|n⟩` in a basis truncated at `n_max`.
    pub fn number_state(n: usize, n_max: usize) -> Self {
        assert!(n <= n_max, "number state {n} above truncation {n_max}");
        let mut v = DVector::zeros(n_max + 1);
        v[n] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    /// Copies the amplitudes into a basis truncated at `n_max`. Fails if a
    /// nonzero amplitude would be discarded.
    pub fn resized(&self, n_max: usize) -> Result<Self> {
        if let Some(top) = self.support_top() {
            if top > n_max {
                return Err(Error::DimensionMismatch {
                    expected: n_max + 1,
                    found: top + 1,
                });
            }
        }
        let mut v = DVector::zeros(n_max + 1);
        let k = self.len().min(n_max + 1);
        v.rows_mut(0, k).copy_from(&self.0.rows(0, k));
        Ok(Self(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.0.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self(self.0.unscale(n))
    }

    /// Highest index carrying a nonzero amplitude.
    pub fn support_top(&self) -> Option<usize> {
        self.0.iter().rposition(|z| z.norm_sqr() > 0.0)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<Complex64> {
        self.0
    }

    pub fn from_vector(v: DVector<Complex64>) -> Self {
        assert!(!v.is_empty(), "motional amplitudes need at least one level");
        Self(v)
    }
}

impl std::ops::Index<usize> for MotionalAmplitudes {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)` by upward three-term
/// recurrence.
pub fn laguerre_assoc(n: usize, k: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::param("x", x, "must be finite"));
    }
    let k = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `ln(n!)` by direct summation; exact enough for the factorial ratios used
/// here and free of overflow.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

const RESCALE: f64 = 1e150;

/// Real magnitudes `r_j = |⟨j+k| D(α) |j⟩|`-with-sign for `j = 0..len`, where
/// `x = |α|²`.
///
/// Runs the Laguerre recurrence on `ℓ_j = √(j!/(j+k)!) L_j^{(k)}(x)`, which
/// stays O(1) for the physically relevant range, and carries the prefactor
/// `x^{k/2} e^{-x/2} / √k!` in log space. Intermediate values are rescaled so
/// neither overflow nor underflow loses the band.
fn displaced_band(k: usize, x: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    if x == 0.0 {
        out.push(if k == 0 { 1.0 } else { 0.0 });
        out.resize(len, out[0]);
        return out;
    }
    let kf = k as f64;
    let mut log_scale = 0.5 * kf * x.ln() - 0.5 * x - 0.5 * ln_factorial(k);
    let emit = |l: f64, log_scale: f64| -> f64 {
        if l == 0.0 {
            0.0
        } else {
            l.signum() * (log_scale + l.abs().ln()).exp()
        }
    };
    let mut prev = 1.0_f64;
    out.push(emit(prev, log_scale));
    if len == 1 {
        return out;
    }
    let mut cur = (1.0 + kf - x) / (kf + 1.0).sqrt();
    out.push(emit(cur, log_scale));
    for j in 1..len - 1 {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf * (jf + kf)).sqrt() * prev)
            / ((jf + 1.0) * (jf + kf + 1.0)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(emit(cur, log_scale));
    }
    out
}

/// `(-i)^k`
fn minus_i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn check_eta(eta_ld: f64) -> Result<()> {
    if !eta_ld.is_finite() || eta_ld < 0.0 {
        return Err(Error::param("eta_ld", eta_ld, "must be finite and non-negative"));
    }
    Ok(())
}

/// Single Franck-Condon factor `η_nm = ⟨n| exp(-i η_LD (b + b†)) |m⟩`.
pub fn fc_factor(n: usize, m: usize, eta_ld: f64) -> Result<Complex64> {
    check_eta(eta_ld)?;
    let (lo, k) = if n >= m { (m, n - m) } else { (n, m - n) };
    let r = displaced_band(k, eta_ld * eta_ld, lo + 1)[lo];
    Ok(minus_i_pow(k) * r)
}

/// Displacement matrix elements over a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FranckCondonMatrix {
    eta_ld: f64,
    entries: DMatrix<Complex64>,
}

impl FranckCondonMatrix {
    pub fn eta_ld(&self) -> f64 {
        self.eta_ld
    }

    pub fn n_max(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n, m)]
    }

    /// Wraps an arbitrary square matrix, e.g. for diagnostics on a
    /// hand-built matrix.
    pub fn from_entries(eta_ld: f64, entries: DMatrix<Complex64>) -> Self {
        assert!(entries.is_square() && entries.nrows() > 0);
        Self { eta_ld, entries }
    }

    pub(crate) fn check_matches(&self, len: usize) -> Result<()> {
        check_dim(self.dim(), len)
    }
}

/// Assembles `η_nm` for `0 <= n, m <= n_max`, one recurrence pass per band.
pub fn fc_matrix(n_max: usize, eta_ld: f64) -> Result<FranckCondonMatrix> {
    check_eta(eta_ld)?;
    let dim = n_max + 1;
    let x = eta_ld * eta_ld;
    let mut entries = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let phase = minus_i_pow(k);
        for (j, r) in displaced_band(k, x, dim - k).into_iter().enumerate() {
            let z = phase * r;
            entries[(j + k, j)] = z;
            entries[(j, j + k)] = z;
        }
    }
    Ok(FranckCondonMatrix { eta_ld, entries })
}

/// Max-norm deviation from the identity of the leading `sub × sub` blocks of
/// both Gram products `F†F` and `FF†`, with sums over the whole retained
/// basis.
pub fn unitarity_defect(fc: &FranckCondonMatrix, sub: usize) -> Result<f64> {
    let dim = fc.dim();
    if sub == 0 || sub > dim {
        return Err(Error::SubOutOfRange { sub, max: dim });
    }
    let f = &fc.entries;
    let mut worst = 0.0_f64;
    for a in 0..sub {
        for b in 0..sub {
            let delta = if a == b { 1.0 } else { 0.0 };
            let cols: Complex64 = (0..dim).map(|n| f[(n, a)].conj() * f[(n, b)]).sum();
            let rows: Complex64 = (0..dim).map(|m| f[(a, m)] * f[(b, m)].conj()).sum();
            worst = worst
                .max((cols - delta).norm())
                .max((rows - delta).norm());
        }
    }
    Ok(worst)
}
