//! Time evolution by eigendecomposition, the photon autocorrelation
//! function, and Lorentzian-broadened absorption spectra.
//!
//! A state is evolved exactly as v(t) = Σ_n e^{−iE_n t/ħ} ⟨n|v₀⟩ |n⟩ from a
//! cached eigendecomposition, so long trajectories cost one projection plus
//! one back-transform per sample and norms are conserved to solver accuracy.
//! Times are in femtoseconds, energies in eV; phases use the CODATA value of
//! ħ in eV·fs.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::basis::SymmetricBasis;
use crate::constants::HBAR_EV_FS;
use crate::error::DynamicsError;
use crate::hamiltonian::EigenSystem;

/// Uniform time grid: `n_steps` samples from t = 0 to `t_max_fs` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max_fs: f64,
    n_steps: usize,
}

impl TimeGrid {
    /// A grid needs at least two samples and positive duration.
    pub fn new(t_max_fs: f64, n_steps: usize) -> Result<Self, DynamicsError> {
        if !(t_max_fs > 0.0) || n_steps < 2 {
            return Err(DynamicsError::EmptyTimeGrid);
        }
        Ok(TimeGrid { t_max_fs, n_steps })
    }

    pub fn t_max_fs(&self) -> f64 {
        self.t_max_fs
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Sample spacing in fs.
    pub fn dt_fs(&self) -> f64 {
        self.t_max_fs / (self.n_steps - 1) as f64
    }

    /// All sample times in fs, ascending from zero.
    pub fn times_fs(&self) -> Vec<f64> {
        let dt = self.dt_fs();
        (0..self.n_steps).map(|i| i as f64 * dt).collect()
    }
}

/// Complex amplitudes over a basis, unit-normalized.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amplitudes: Array1<Complex64>,
    /// Fingerprint of the basis the amplitudes refer to.
    pub basis_fingerprint: u64,
}

impl StateVector {
    /// Wrap and normalize amplitudes. A numerically zero vector is rejected.
    pub fn new(
        amplitudes: Array1<Complex64>,
        basis_fingerprint: u64,
    ) -> Result<Self, DynamicsError> {
        let norm = l2_norm(&amplitudes);
        if norm < 1e-14 {
            return Err(DynamicsError::ZeroNorm);
        }
        let amplitudes = amplitudes.mapv(|a| a / norm);
        Ok(StateVector { amplitudes, basis_fingerprint })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }
}

fn l2_norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// The bare-photon state |1⟩ with every molecule in its vibrational ground
/// level — the state prepared by weak cavity pumping and the start of every
/// linear-response run. First in canonical basis order.
pub fn initial_photonic_state(basis: &SymmetricBasis) -> StateVector {
    let occ = crate::basis::OccupationRecord::empty(basis.species.len());
    let idx = basis
        .index(&crate::basis::SymmetricState::Photonic { occ })
        .expect("every enumerated basis contains the zero-phonon photonic state");
    let mut amplitudes = Array1::zeros(basis.dim());
    amplitudes[idx] = Complex64::new(1.0, 0.0);
    StateVector { amplitudes, basis_fingerprint: basis.fingerprint() }
}

/// States sampled along a time grid, kept in basis-frame amplitudes.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times_fs: Vec<f64>,
    pub states: Vec<Array1<Complex64>>,
    /// The state the trajectory started from.
    pub initial: Array1<Complex64>,
    pub basis_fingerprint: u64,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times_fs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times_fs.is_empty()
    }

    pub fn state(&self, i: usize) -> StateVector {
        StateVector {
            amplitudes: self.states[i].clone(),
            basis_fingerprint: self.basis_fingerprint,
        }
    }

    /// c(t) = ⟨v₀|v(t)⟩ at each sample.
    pub fn autocorrelation(&self) -> Vec<Complex64> {
        self.states
            .iter()
            .map(|v| self.initial.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum())
            .collect()
    }
}

/// Eigenbasis coefficients of `v0`: c_n = ⟨n|v₀⟩ (real eigenvectors).
fn eigen_coefficients(eigen: &EigenSystem, v0: &Array1<Complex64>) -> Array1<Complex64> {
    let re = v0.mapv(|a| a.re);
    let im = v0.mapv(|a| a.im);
    let cr = eigen.eig.vectors.t().dot(&re);
    let ci = eigen.eig.vectors.t().dot(&im);
    Array1::from_iter(cr.iter().zip(ci.iter()).map(|(&r, &i)| Complex64::new(r, i)))
}

/// v(t) for a single, possibly negative, time.
pub fn evolve_to(
    eigen: &EigenSystem,
    v0: &StateVector,
    t_fs: f64,
) -> Result<StateVector, DynamicsError> {
    if v0.basis_fingerprint != eigen.basis_fingerprint || v0.dim() != eigen.dim() {
        return Err(DynamicsError::BasisMismatch);
    }
    let c = eigen_coefficients(eigen, &v0.amplitudes);
    let phase = -t_fs / HBAR_EV_FS;
    let d: Array1<Complex64> = Array1::from_iter(
        c.iter()
            .zip(eigen.eig.values.iter())
            .map(|(cn, &e)| cn * Complex64::from_polar(1.0, phase * e)),
    );
    let dr = d.mapv(|a| a.re);
    let di = d.mapv(|a| a.im);
    let vr = eigen.eig.vectors.dot(&dr);
    let vi = eigen.eig.vectors.dot(&di);
    let amplitudes =
        Array1::from_iter(vr.iter().zip(vi.iter()).map(|(&r, &i)| Complex64::new(r, i)));
    Ok(StateVector { amplitudes, basis_fingerprint: v0.basis_fingerprint })
}

/// Propagate `v0` across the grid: v(t) = Σ_n e^{−iE_n t/ħ}⟨n|v₀⟩|n⟩.
///
/// Back-transforms are batched into blocks of times so the work runs as
/// matrix–matrix products while memory stays at O(dim · block).
pub fn propagate(
    eigen: &EigenSystem,
    v0: &StateVector,
    times: &TimeGrid,
) -> Result<TrajectoryRecord, DynamicsError> {
    if v0.basis_fingerprint != eigen.basis_fingerprint || v0.dim() != eigen.dim() {
        return Err(DynamicsError::BasisMismatch);
    }
    const BLOCK: usize = 256;
    let dim = eigen.dim();
    let c = eigen_coefficients(eigen, &v0.amplitudes);
    let ts = times.times_fs();
    let mut states: Vec<Array1<Complex64>> = Vec::with_capacity(ts.len());

    for chunk in ts.chunks(BLOCK) {
        let cols = chunk.len();
        let mut dr = Array2::<f64>::zeros((dim, cols));
        let mut di = Array2::<f64>::zeros((dim, cols));
        for (j, &t) in chunk.iter().enumerate() {
            let phase = -t / HBAR_EV_FS;
            for n in 0..dim {
                let p = Complex64::from_polar(1.0, phase * eigen.eig.values[n]);
                let d = c[n] * p;
                dr[[n, j]] = d.re;
                di[[n, j]] = d.im;
            }
        }
        let sr = eigen.eig.vectors.dot(&dr);
        let si = eigen.eig.vectors.dot(&di);
        for j in 0..cols {
            states.push(Array1::from_iter(
                (0..dim).map(|i| Complex64::new(sr[[i, j]], si[[i, j]])),
            ));
        }
    }

    Ok(TrajectoryRecord {
        times_fs: ts,
        states,
        initial: v0.amplitudes.clone(),
        basis_fingerprint: v0.basis_fingerprint,
    })
}

/// Spectral weights of `v0`: w_n = |⟨n|v₀⟩|². These determine the
/// autocorrelation c(t) = Σ_n w_n e^{−iE_n t/ħ} without storing any states.
pub fn spectral_weights(
    eigen: &EigenSystem,
    v0: &StateVector,
) -> Result<Vec<f64>, DynamicsError> {
    if v0.basis_fingerprint != eigen.basis_fingerprint || v0.dim() != eigen.dim() {
        return Err(DynamicsError::BasisMismatch);
    }
    Ok(eigen_coefficients(eigen, &v0.amplitudes).iter().map(|c| c.norm_sqr()).collect())
}

/// c(t) on the grid, straight from eigenvalues and spectral weights. Equal to
/// [`TrajectoryRecord::autocorrelation`] without materializing the states.
pub fn autocorrelation_series(
    eigen: &EigenSystem,
    v0: &StateVector,
    times: &TimeGrid,
) -> Result<Vec<Complex64>, DynamicsError> {
    let w = spectral_weights(eigen, v0)?;
    Ok(times
        .times_fs()
        .iter()
        .map(|&t| {
            let phase = -t / HBAR_EV_FS;
            w.iter()
                .zip(eigen.eig.values.iter())
                .map(|(&wn, &e)| Complex64::from_polar(wn, phase * e))
                .sum()
        })
        .collect())
}

/// Frequency window for a spectrum: `n_points` samples across
/// [`omega_min`, `omega_max`] eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyWindow {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
}

/// A broadened linear spectrum on an ascending frequency grid.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Frequencies in eV, ascending.
    pub frequencies: Vec<f64>,
    pub intensities: Vec<f64>,
    /// Applied Lorentzian half-width γ (eV).
    pub gamma: f64,
}

/// Absorption spectrum from the autocorrelation series:
/// σ(ω) = (1/π) Re ∫₀^T dt e^{iωt/ħ} c(t) e^{−γt/ħ}, by the trapezoid rule.
///
/// With this normalization an isolated line of weight w approaches a
/// Lorentzian of peak height w/(πγ) once γ·T ≫ ħ.
pub fn spectrum(
    c: &[Complex64],
    times: &TimeGrid,
    gamma: f64,
    window: &FrequencyWindow,
) -> Result<SpectrumResult, DynamicsError> {
    if c.len() != times.n_steps() {
        return Err(DynamicsError::LengthMismatch);
    }
    if !(gamma >= 0.0) {
        return Err(DynamicsError::BadBroadening(gamma));
    }
    if window.n_points < 2 || !(window.omega_max > window.omega_min) {
        return Err(DynamicsError::BadWindow);
    }
    // One oscillation period at |ω| must span at least two samples.
    let nyquist = std::f64::consts::PI * HBAR_EV_FS / times.dt_fs();
    if window.omega_min.abs() > nyquist || window.omega_max.abs() > nyquist {
        return Err(DynamicsError::WindowOutsideNyquist {
            lo: window.omega_min,
            hi: window.omega_max,
            nyquist,
        });
    }

    let ts = times.times_fs();
    let dt = times.dt_fs();
    let n = ts.len();
    // Damped series with trapezoid end weights folded in.
    let damped: Vec<Complex64> = c
        .iter()
        .zip(ts.iter())
        .enumerate()
        .map(|(j, (cj, &t))| {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            cj * (w * dt * (-gamma * t / HBAR_EV_FS).exp())
        })
        .collect();

    let d_omega = (window.omega_max - window.omega_min) / (window.n_points - 1) as f64;
    let mut frequencies = Vec::with_capacity(window.n_points);
    let mut intensities = Vec::with_capacity(window.n_points);
    for k in 0..window.n_points {
        let omega = window.omega_min + k as f64 * d_omega;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, dj) in damped.iter().enumerate() {
            let phase = omega * ts[j] / HBAR_EV_FS;
            acc += dj * Complex64::from_polar(1.0, phase);
        }
        frequencies.push(omega);
        intensities.push(acc.re / (std::f64::consts::PI * HBAR_EV_FS));
    }
    Ok(SpectrumResult { frequencies, intensities, gamma })
}

/// The `(frequency, intensity)` of every resolved peak: a strict local
/// maximum of the sampled spectrum at or above `threshold_fraction` of the
/// global maximum. Window endpoints never count; a flat-topped line counts
/// once, at the left edge of its plateau.
pub fn peak_positions(s: &SpectrumResult, threshold_fraction: f64) -> Vec<(f64, f64)> {
    let v = &s.intensities;
    let n = v.len();
    if n < 3 {
        return Vec::new();
    }
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = threshold_fraction * max;
    let mut out = Vec::new();
    for i in 1..n - 1 {
        if v[i] < floor || v[i] <= v[i - 1] {
            continue;
        }
        // Walk any plateau to the right; require a descent after it.
        let mut j = i;
        while j + 1 < n && v[j + 1] == v[i] {
            j += 1;
        }
        if j + 1 < n && v[j + 1] < v[i] {
            out.push((s.frequencies[i], v[i]));
        }
    }
    out
}
