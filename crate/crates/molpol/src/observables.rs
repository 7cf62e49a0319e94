//! Observables over symmetric-basis states and trajectories: excited-state
//! nuclear expectations, photon / Franck-Condon / dark-manifold populations,
//! per-species excited populations, polariton projections, statistical
//! yields, and reconstruction of the underlying many-body amplitudes.
//!
//! The Franck-Condon wavepacket of a species — its vibrational ground
//! function placed on the excited surface — is represented inside the
//! retained excited levels and normalized there, so population identities
//! (photon + FC + dark = 1 at order zero) hold exactly in the simulated
//! space rather than only up to basis-completeness leakage.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::basis::{MoleculeCount, SymmetricBasis, SymmetricState};
use crate::dynamics::{StateVector, TrajectoryRecord};
use crate::error::ObservableError;
use crate::hamiltonian::{CavitySpec, EigenSystem};
use crate::linalg::eigh_checked;

fn check_state(
    basis: &SymmetricBasis,
    v: &StateVector,
) -> Result<(), ObservableError> {
    if v.basis_fingerprint != basis.fingerprint() || v.dim() != basis.dim() {
        return Err(ObservableError::BasisMismatch);
    }
    Ok(())
}

fn species_of(basis: &SymmetricBasis, label: &str) -> Result<usize, ObservableError> {
    basis
        .species_index(label)
        .ok_or_else(|| ObservableError::UnknownSpecies(label.to_string()))
}

/// Amplitudes of the normalized FC wavepacket of species `j` over the
/// zero-carrier excitonic states: F[l][0]/√w with w = Σ_l F[l][0]².
fn fc_column(basis: &SymmetricBasis, j: usize) -> Vec<(usize, f64)> {
    let vib = &basis.species[j].vib;
    let w = vib.vertical_weight().sqrt();
    let occ = crate::basis::OccupationRecord::empty(basis.species.len());
    (0..vib.m_e())
        .filter_map(|l| {
            basis
                .index(&SymmetricState::Excitonic { species: j, level: l, occ: occ.clone() })
                .map(|i| (i, vib.fc[[l, 0]] / w))
        })
        .collect()
}

/// ⟨FC_j|Ψ̃⟩ over the zero-carrier block.
fn fc_overlap(basis: &SymmetricBasis, v: &StateVector, j: usize) -> Complex64 {
    fc_column(basis, j)
        .iter()
        .map(|&(i, f)| v.amplitudes[i] * f)
        .sum()
}

/// Total photonic population Σ|⟨1,occ|Ψ⟩|².
pub fn photon_population(
    basis: &SymmetricBasis,
    v: &StateVector,
) -> Result<f64, ObservableError> {
    check_state(basis, v)?;
    Ok(basis
        .states
        .iter()
        .zip(v.amplitudes.iter())
        .filter(|(s, _)| s.is_photonic())
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// |⟨Ψ̃_FC,j|Ψ̃⟩|²: population of the FC wavepacket of species `label`.
pub fn fc_population(
    basis: &SymmetricBasis,
    v: &StateVector,
    label: &str,
) -> Result<f64, ObservableError> {
    check_state(basis, v)?;
    let j = species_of(basis, label)?;
    Ok(fc_overlap(basis, v, j).norm_sqr())
}

/// The normalized FC wavepacket of species `label` as a state vector — the
/// state reached by instantaneous photoexcitation of one molecule.
pub fn fc_wavepacket_state(
    basis: &SymmetricBasis,
    label: &str,
) -> Result<StateVector, ObservableError> {
    let j = species_of(basis, label)?;
    let mut amplitudes = Array1::from_elem(basis.dim(), Complex64::new(0.0, 0.0));
    for (i, f) in fc_column(basis, j) {
        amplitudes[i] = Complex64::new(f, 0.0);
    }
    StateVector::new(amplitudes, basis.fingerprint())
        .map_err(|_| ObservableError::UnknownSpecies(label.to_string()))
}

/// Σ over excitonic states of one species of |amplitude|².
pub fn species_excited_population(
    basis: &SymmetricBasis,
    v: &StateVector,
    label: &str,
) -> Result<f64, ObservableError> {
    check_state(basis, v)?;
    let j = species_of(basis, label)?;
    Ok(basis
        .states
        .iter()
        .zip(v.amplitudes.iter())
        .filter(|(s, _)| matches!(s, SymmetricState::Excitonic { species, .. } if *species == j))
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Population outside the photon and every FC wavepacket: the dark-manifold
/// population, Σ_exc |A|² − Σ_j |⟨FC_j|Ψ̃⟩|². Defined at truncation order
/// zero, where it equals 1 − ρ̃₁₁ − Σ_j |⟨FC_j|Ψ̃⟩|² identically.
pub fn dark_manifold_population(
    basis: &SymmetricBasis,
    v: &StateVector,
) -> Result<f64, ObservableError> {
    check_state(basis, v)?;
    if basis.kappa > 0 {
        return Err(ObservableError::OrderMismatch { max_order: 0, got: basis.kappa });
    }
    let excited: f64 = basis
        .states
        .iter()
        .zip(v.amplitudes.iter())
        .filter(|(s, _)| !s.is_photonic())
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let fc: f64 = (0..basis.species.len())
        .map(|j| fc_overlap(basis, v, j).norm_sqr())
        .sum();
    Ok(excited - fc)
}

/// ⟨Ψ̃|q̂|e_j⟩⟨e_j|Ψ̃⟩: position expectation weighted by the excited-state
/// population of species `label` (not normalized by it). Per-molecule values
/// in the N-molecule picture carry an additional 1/N dilution factor, applied
/// by the caller.
pub fn excited_position_expectation(
    basis: &SymmetricBasis,
    v: &StateVector,
    label: &str,
) -> Result<f64, ObservableError> {
    check_state(basis, v)?;
    let j = species_of(basis, label)?;
    let vib = &basis.species[j].vib;
    let q = &vib
        .solved
        .as_ref()
        .ok_or_else(|| ObservableError::MissingPositionMatrix(label.to_string()))?
        .position_excited;

    // Group excitonic states of species j by carrier record; q̂ acts on the
    // excited molecule only, so it is block-diagonal over carrier records.
    let mut total = 0.0;
    let mut blocks: std::collections::HashMap<&crate::basis::OccupationRecord, Vec<(usize, usize)>> =
        std::collections::HashMap::new();
    for (i, s) in basis.states.iter().enumerate() {
        if let SymmetricState::Excitonic { species, level, occ } = s {
            if *species == j {
                blocks.entry(occ).or_default().push((*level, i));
            }
        }
    }
    for members in blocks.values() {
        for &(l, i) in members {
            for &(lp, ip) in members {
                total += (v.amplitudes[i].conj() * v.amplitudes[ip]).re * q[[l, lp]];
            }
        }
    }
    Ok(total)
}

/// A polariton state |P⟩ = c₀|1⟩ + c₁|B⟩, with |B⟩ the bright exciton
/// combination (the coupling-weighted FC wavepacket superposition).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonProjector {
    pub c0: Complex64,
    pub c1: Complex64,
}

impl PolaritonProjector {
    /// Normalized so |c₀|² + |c₁|² = 1.
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self, ObservableError> {
        let n = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        if n < 1e-14 {
            return Err(ObservableError::ZeroProjector);
        }
        Ok(PolaritonProjector { c0: c0 / n, c1: c1 / n })
    }

    /// The symmetric (upper, at resonance) combination (|1⟩ + |B⟩)/√2.
    pub fn upper() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PolaritonProjector { c0: h, c1: h }
    }

    /// The antisymmetric (lower, at resonance) combination (|1⟩ − |B⟩)/√2.
    pub fn lower() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PolaritonProjector { c0: h, c1: -h }
    }
}

/// Amplitudes of the bright state |B⟩: the normalized coupling-weighted sum
/// of the species' FC wavepackets — the exciton combination the photon
/// couples to.
fn bright_column(basis: &SymmetricBasis) -> Vec<(usize, f64)> {
    let mut col: Vec<(usize, f64)> = Vec::new();
    for (j, sp) in basis.species.iter().enumerate() {
        let gw = sp.collective_g() * sp.vib.vertical_weight().sqrt();
        for (i, f) in fc_column(basis, j) {
            col.push((i, gw * f));
        }
    }
    let norm = col.iter().map(|(_, a)| a * a).sum::<f64>().sqrt();
    for (_, a) in &mut col {
        *a /= norm;
    }
    col
}

/// Population of the polariton state |P⟩ in `v`: |⟨P|Ψ̃⟩|², expanded as
/// |c₀|²ρ̃₁₁ + 2Re[c₀*c₁ ρ̃₁B] + |c₁|²|⟨B|Ψ̃⟩|². Defined at truncation order
/// zero.
pub fn polariton_population(
    basis: &SymmetricBasis,
    v: &StateVector,
    p: &PolaritonProjector,
) -> Result<f64, ObservableError> {
    check_state(basis, v)?;
    if basis.kappa > 0 {
        return Err(ObservableError::OrderMismatch { max_order: 0, got: basis.kappa });
    }
    let occ = crate::basis::OccupationRecord::empty(basis.species.len());
    let photon_idx = basis
        .index(&SymmetricState::Photonic { occ })
        .expect("order-zero basis contains the photonic state");
    let a1 = v.amplitudes[photon_idx];
    let b: Complex64 = bright_column(basis)
        .iter()
        .map(|&(i, f)| v.amplitudes[i] * f)
        .sum();
    Ok((p.c0.conj() * a1 + p.c1.conj() * b).norm_sqr())
}

/// Time series of every population observable along a trajectory.
#[derive(Debug, Clone)]
pub struct PopulationRecord {
    pub times_fs: Vec<f64>,
    pub photon: Vec<f64>,
    /// Per species: |⟨FC_j|Ψ̃⟩|².
    pub fc: Vec<(String, Vec<f64>)>,
    /// Population outside photon and FC wavepackets.
    pub dark: Vec<f64>,
    /// Per species: total excited population.
    pub species_excited: Vec<(String, Vec<f64>)>,
    /// Named polariton projections (order zero only).
    pub polariton: Vec<(String, Vec<f64>)>,
}

/// Evaluate photon, FC, dark, per-species, and optional polariton
/// populations at every recorded time. Polariton projectors require an
/// order-zero basis.
pub fn population_record(
    basis: &SymmetricBasis,
    traj: &TrajectoryRecord,
    projectors: &[(String, PolaritonProjector)],
) -> Result<PopulationRecord, ObservableError> {
    if traj.basis_fingerprint != basis.fingerprint() {
        return Err(ObservableError::BasisMismatch);
    }
    if !projectors.is_empty() && basis.kappa > 0 {
        return Err(ObservableError::OrderMismatch { max_order: 0, got: basis.kappa });
    }

    let n_species = basis.species.len();
    let photonic: Vec<usize> = (0..basis.dim())
        .filter(|&i| basis.states[i].is_photonic())
        .collect();
    let excitonic: Vec<Vec<usize>> = (0..n_species)
        .map(|j| {
            (0..basis.dim())
                .filter(|&i| {
                    matches!(&basis.states[i],
                        SymmetricState::Excitonic { species, .. } if *species == j)
                })
                .collect()
        })
        .collect();
    let fc_cols: Vec<Vec<(usize, f64)>> =
        (0..n_species).map(|j| fc_column(basis, j)).collect();
    let bright = if projectors.is_empty() { Vec::new() } else { bright_column(basis) };
    let photon_idx = basis.index(&SymmetricState::Photonic {
        occ: crate::basis::OccupationRecord::empty(n_species),
    });

    let nt = traj.len();
    let mut photon = Vec::with_capacity(nt);
    let mut dark = Vec::with_capacity(nt);
    let mut fc: Vec<(String, Vec<f64>)> = basis
        .species
        .iter()
        .map(|s| (s.label.clone(), Vec::with_capacity(nt)))
        .collect();
    let mut species_excited: Vec<(String, Vec<f64>)> = basis
        .species
        .iter()
        .map(|s| (s.label.clone(), Vec::with_capacity(nt)))
        .collect();
    let mut polariton: Vec<(String, Vec<f64>)> = projectors
        .iter()
        .map(|(name, _)| (name.clone(), Vec::with_capacity(nt)))
        .collect();

    for v in &traj.states {
        let rho11: f64 = photonic.iter().map(|&i| v[i].norm_sqr()).sum();
        photon.push(rho11);
        let mut fc_total = 0.0;
        let mut excited_total = 0.0;
        for j in 0..n_species {
            let b: Complex64 = fc_cols[j].iter().map(|&(i, f)| v[i] * f).sum();
            fc[j].1.push(b.norm_sqr());
            fc_total += b.norm_sqr();
            let pj: f64 = excitonic[j].iter().map(|&i| v[i].norm_sqr()).sum();
            species_excited[j].1.push(pj);
            excited_total += pj;
        }
        dark.push(excited_total - fc_total);
        if !projectors.is_empty() {
            let a1 = v[photon_idx.expect("order-zero basis has the photonic state")];
            let bamp: Complex64 = bright.iter().map(|&(i, f)| v[i] * f).sum();
            for (k, (_, p)) in projectors.iter().enumerate() {
                polariton[k].1.push((p.c0.conj() * a1 + p.c1.conj() * bamp).norm_sqr());
            }
        }
    }

    Ok(PopulationRecord {
        times_fs: traj.times_fs.clone(),
        photon,
        fc,
        dark,
        species_excited,
        polariton,
    })
}

/// Long-time statistical yield of species `label` from the eigendecomposition:
/// p_s = Σ_n W_exc(n)·W_phot(n), the eigenbasis-dephased probability of
/// finding the excitation on that species after photonic preparation.
pub fn statistical_yield(
    basis: &SymmetricBasis,
    eigen: &EigenSystem,
    label: &str,
) -> Result<f64, ObservableError> {
    if eigen.basis_fingerprint != basis.fingerprint() {
        return Err(ObservableError::BasisMismatch);
    }
    let j = species_of(basis, label)?;
    let dim = basis.dim();
    let mut p = 0.0;
    for n in 0..dim {
        let mut w_exc = 0.0;
        let mut w_phot = 0.0;
        for i in 0..dim {
            let v2 = eigen.eig.vectors[[i, n]] * eigen.eig.vectors[[i, n]];
            match &basis.states[i] {
                SymmetricState::Photonic { .. } => w_phot += v2,
                SymmetricState::Excitonic { species, .. } if *species == j => w_exc += v2,
                _ => {}
            }
        }
        p += w_exc * w_phot;
    }
    Ok(p)
}

/// Franck-Condon-point estimate of all species yields: collapse each species
/// to its FC wavepacket (energy = vertical centroid, coupling G√w) and apply
/// the yield formula to the resulting few-level polariton matrix.
pub fn statistical_yield_fc(
    basis: &SymmetricBasis,
    cavity: &CavitySpec,
) -> Result<Vec<(String, f64)>, ObservableError> {
    let s = basis.species.len();
    let mut h = Array2::<f64>::zeros((s + 1, s + 1));
    h[[0, 0]] = cavity.omega_c;
    for (j, sp) in basis.species.iter().enumerate() {
        h[[j + 1, j + 1]] = sp.vib.vertical_centroid();
        let g = sp.collective_g() * sp.vib.vertical_weight().sqrt();
        h[[0, j + 1]] = g;
        h[[j + 1, 0]] = g;
    }
    let eig = eigh_checked(&h, 1e-10)
        .map_err(|e| ObservableError::FcPointDiagonalization(e.to_string()))?;
    Ok(basis
        .species
        .iter()
        .enumerate()
        .map(|(j, sp)| {
            let p = (0..s + 1)
                .map(|n| {
                    eig.vectors[[0, n]].powi(2) * eig.vectors[[j + 1, n]].powi(2)
                })
                .sum();
            (sp.label.clone(), p)
        })
        .collect())
}

/// One class of product configurations in the many-body expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyTerm {
    /// `None` for the photonic sector; `Some((species, level))` when one
    /// molecule of that species is excited in vibrational level `level`.
    pub excited: Option<(usize, usize)>,
    /// Phonons on ground-electronic molecules: ascending
    /// (species, level ≥ 1, molecules).
    pub phonons: Vec<(usize, usize, usize)>,
    /// Amplitude of each individual product configuration in the class.
    pub amplitude: Complex64,
    /// Number of distinct product configurations in the class.
    pub multiplicity: f64,
}

/// The symmetric amplitudes of `v` unfolded onto the underlying product
/// basis: each symmetric state of multiplicity M becomes a class of M product
/// configurations with amplitude Ã/√M. Defined through truncation order one
/// (the orders the closed-form unfolding covers) and finite molecule counts.
pub fn reconstruct_manybody(
    basis: &SymmetricBasis,
    v: &StateVector,
) -> Result<Vec<ManyBodyTerm>, ObservableError> {
    check_state(basis, v)?;
    if basis.kappa > 1 {
        return Err(ObservableError::OrderMismatch { max_order: 1, got: basis.kappa });
    }
    for sp in &basis.species {
        if matches!(sp.count, MoleculeCount::Infinite) {
            return Err(ObservableError::InfiniteCount(sp.label.clone()));
        }
    }
    let mut terms = Vec::with_capacity(basis.dim());
    for (i, s) in basis.states.iter().enumerate() {
        let root = basis
            .renorm_factor(s)
            .expect("finite counts were checked above");
        let occ = s.occ();
        let phonons: Vec<(usize, usize, usize)> = occ
            .levels
            .iter()
            .enumerate()
            .flat_map(|(j, lv)| lv.iter().map(move |&(k, c)| (j, k, c)))
            .collect();
        let excited = match s {
            SymmetricState::Photonic { .. } => None,
            SymmetricState::Excitonic { species, level, .. } => Some((*species, *level)),
        };
        terms.push(ManyBodyTerm {
            excited,
            phonons,
            amplitude: v.amplitudes[i] / root,
            // Exact class sizes are integers; undo the √ roundoff.
            multiplicity: (root * root).round(),
        });
    }
    Ok(terms)
}
