//! Brute-force reference engine: the exact first-excitation-manifold
//! Hamiltonian of N explicit molecules over the full tensor-product basis,
//! plus the maps between product amplitudes and symmetric-basis amplitudes.
//!
//! The product basis is sector-major: first the photon sector (every molecule
//! electronically ground, vibrational configuration lexicographic over ground
//! levels), then one sector per excited molecule i (molecule i uses excited
//! levels, the rest ground levels). Dimension m_g^N + N·m_e·m_g^{N−1} — with
//! equal level counts, (N+1)·m^N. Deliberately capped small: this engine
//! exists to prove the symmetric engine right, not to scale.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::basis::{
    enumerate, Coupling, MoleculeCount, OccupationRecord, SpeciesSpec, SymmetricBasis,
    SymmetricState,
};
use crate::dynamics::{propagate, StateVector, TimeGrid};
use crate::error::OracleError;
use crate::hamiltonian::{build, CavitySpec, HamiltonianMatrix};
use crate::linalg::{CsrMatrix, MatrixStorage, SPARSE_THRESHOLD};
use crate::vib::VibrationalBasis;

/// Most molecules the product-basis engine will represent.
pub const ORACLE_MOLECULE_CAP: usize = 6;
/// Largest product-basis dimension the engine will allocate.
pub const ORACLE_DIMENSION_CAP: usize = 100_000;

/// Index layout of the product basis for one molecular species.
#[derive(Debug, Clone)]
pub struct OracleBasis {
    pub n: usize,
    pub m_g: usize,
    pub m_e: usize,
    fingerprint: u64,
}

impl OracleBasis {
    pub fn new(n: usize, vib: &VibrationalBasis) -> Result<Self, OracleError> {
        if n == 0 || n > ORACLE_MOLECULE_CAP {
            return Err(OracleError::MoleculeCountCap {
                n: n as u64,
                cap: ORACLE_MOLECULE_CAP as u64,
            });
        }
        let (m_g, m_e) = (vib.m_g(), vib.m_e());
        let dim = m_g
            .checked_pow(n as u32)
            .and_then(|p| {
                m_g.checked_pow((n - 1) as u32)
                    .and_then(|q| q.checked_mul(n * m_e))
                    .and_then(|e| e.checked_add(p))
            })
            .unwrap_or(usize::MAX);
        if dim > ORACLE_DIMENSION_CAP {
            return Err(OracleError::DimensionCap { dim, cap: ORACLE_DIMENSION_CAP });
        }

        let mut hasher = DefaultHasher::new();
        n.hash(&mut hasher);
        m_g.hash(&mut hasher);
        m_e.hash(&mut hasher);
        for e in vib.ground_energies.iter().chain(vib.excited_energies.iter()) {
            e.to_bits().hash(&mut hasher);
        }
        for f in vib.fc.iter() {
            f.to_bits().hash(&mut hasher);
        }
        Ok(OracleBasis { n, m_g, m_e, fingerprint: hasher.finish() })
    }

    pub fn dim(&self) -> usize {
        self.photon_block() + self.n * self.exciton_block()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    fn photon_block(&self) -> usize {
        self.m_g.pow(self.n as u32)
    }

    fn exciton_block(&self) -> usize {
        self.m_e * self.m_g.pow((self.n - 1) as u32)
    }

    /// Index of the photon-sector state with ground configuration `config`.
    pub fn photon_index(&self, config: &[usize]) -> usize {
        debug_assert_eq!(config.len(), self.n);
        config.iter().fold(0, |acc, &j| acc * self.m_g + j)
    }

    /// Index of the exciton-sector state: molecule `i` excited in level
    /// `config[i]`, the rest ground in their `config` levels.
    pub fn exciton_index(&self, i: usize, config: &[usize]) -> usize {
        debug_assert!(i < self.n && config.len() == self.n);
        let mut rank = 0usize;
        for (k, &j) in config.iter().enumerate() {
            rank = rank * (if k == i { self.m_e } else { self.m_g }) + j;
        }
        self.photon_block() + i * self.exciton_block() + rank
    }

    /// Decode an index into (excited molecule or None, configuration).
    pub fn decode(&self, index: usize) -> (Option<usize>, Vec<usize>) {
        let pb = self.photon_block();
        let (sector, mut rank) = if index < pb {
            (None, index)
        } else {
            let rest = index - pb;
            (Some(rest / self.exciton_block()), rest % self.exciton_block())
        };
        let mut config = vec![0usize; self.n];
        for k in (0..self.n).rev() {
            let radix = if Some(k) == sector { self.m_e } else { self.m_g };
            config[k] = rank % radix;
            rank /= radix;
        }
        (sector, config)
    }

    /// The index permutation implementing the transposition of molecules
    /// `a` and `b`.
    pub fn transposition(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.dim())
            .map(|idx| {
                let (sector, mut config) = self.decode(idx);
                config.swap(a, b);
                let sector = sector.map(|i| {
                    if i == a {
                        b
                    } else if i == b {
                        a
                    } else {
                        i
                    }
                });
                match sector {
                    None => self.photon_index(&config),
                    Some(i) => self.exciton_index(i, &config),
                }
            })
            .collect()
    }

    /// The symmetric-basis state this product state belongs to.
    pub fn symmetric_state(&self, index: usize) -> SymmetricState {
        let (sector, config) = self.decode(index);
        let mut occ = OccupationRecord::empty(1);
        for (k, &j) in config.iter().enumerate() {
            if Some(k) != sector && j > 0 {
                occ = occ.with_added(0, j);
            }
        }
        match sector {
            None => SymmetricState::Photonic { occ },
            Some(i) => SymmetricState::Excitonic { species: 0, level: config[i], occ },
        }
    }
}

/// The assembled product-basis system.
#[derive(Debug, Clone)]
pub struct OracleSystem {
    pub basis: OracleBasis,
    pub h: HamiltonianMatrix,
}

/// Build the exact N-molecule Hamiltonian: diagonal vibrational/electronic
/// energies (zero at "photon absent… all ground" → here "photon present, all
/// ground" minus ω_c, matching the symmetric builder's zero), photon ↔
/// exciton-i couplings g·F[l][k] that conserve every other molecule's level,
/// and no exciton ↔ exciton elements.
pub fn build_oracle(
    n: usize,
    vib: &VibrationalBasis,
    g: f64,
    omega_c: f64,
) -> Result<OracleSystem, OracleError> {
    let basis = OracleBasis::new(n, vib)?;
    let dim = basis.dim();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();

    for idx in 0..dim {
        let (sector, config) = basis.decode(idx);
        let mut e = match sector {
            None => omega_c,
            Some(i) => vib.excitation_energy(config[i]),
        };
        for (k, &j) in config.iter().enumerate() {
            if Some(k) != sector {
                e += vib.ground_gap(j);
            }
        }
        triplets.push((idx, idx, e));

        // Couplings out of the photon sector only (the transpose covers the
        // rest).
        if sector.is_none() {
            for i in 0..n {
                for l in 0..basis.m_e {
                    let amp = g * vib.fc[[l, config[i]]];
                    if amp == 0.0 {
                        continue;
                    }
                    let mut partner = config.clone();
                    partner[i] = l;
                    let j = basis.exciton_index(i, &partner);
                    triplets.push((idx, j, amp));
                    triplets.push((j, idx, amp));
                }
            }
        }
    }

    let storage = if dim <= SPARSE_THRESHOLD {
        let mut a = Array2::zeros((dim, dim));
        for (r, c, v) in triplets {
            a[[r, c]] += v;
        }
        MatrixStorage::Dense(a)
    } else {
        MatrixStorage::Sparse(CsrMatrix::from_triplets(dim, &mut triplets))
    };
    let h = HamiltonianMatrix { storage, basis_fingerprint: basis.fingerprint() };
    Ok(OracleSystem { basis, h })
}

/// The photon-sector, all-ground product state.
pub fn oracle_photonic_state(basis: &OracleBasis) -> StateVector {
    let mut amplitudes = Array1::from_elem(basis.dim(), Complex64::new(0.0, 0.0));
    amplitudes[basis.photon_index(&vec![0; basis.n])] = Complex64::new(1.0, 0.0);
    StateVector { amplitudes, basis_fingerprint: basis.fingerprint() }
}

/// Largest ‖Pv − v‖₂ over all molecule transpositions.
pub fn transposition_spread(basis: &OracleBasis, v: &Array1<Complex64>) -> f64 {
    let mut spread = 0.0f64;
    for a in 0..basis.n {
        for b in (a + 1)..basis.n {
            let perm = basis.transposition(a, b);
            let d2: f64 = (0..basis.dim())
                .map(|i| (v[perm[i]] - v[i]).norm_sqr())
                .sum();
            spread = spread.max(d2.sqrt());
        }
    }
    spread
}

/// Fold a permutation-symmetric product vector onto a symmetric basis:
/// group product amplitudes by their occupation class and rescale by the
/// class multiplicity, Ã = (Σ_class A)/√M. Norm-preserving. The target basis
/// must resolve every class, i.e. have truncation order ≥ N over the same
/// species.
pub fn symmetrize(
    basis: &OracleBasis,
    v: &StateVector,
    target: &SymmetricBasis,
) -> Result<StateVector, OracleError> {
    if v.basis_fingerprint != basis.fingerprint() || v.dim() != basis.dim() {
        return Err(OracleError::BasisMismatch);
    }
    let spread = transposition_spread(basis, &v.amplitudes);
    if spread > 1e-8 {
        return Err(OracleError::NotSymmetric { spread });
    }

    let mut sums = vec![Complex64::new(0.0, 0.0); target.dim()];
    let mut class_sizes = vec![0u64; target.dim()];
    for idx in 0..basis.dim() {
        let s = basis.symmetric_state(idx);
        let t = target.index(&s).ok_or(OracleError::BasisMismatch)?;
        sums[t] += v.amplitudes[idx];
        class_sizes[t] += 1;
    }
    let mut amplitudes = Array1::from_elem(target.dim(), Complex64::new(0.0, 0.0));
    for t in 0..target.dim() {
        if class_sizes[t] > 0 {
            amplitudes[t] = sums[t] / (class_sizes[t] as f64).sqrt();
        }
    }
    Ok(StateVector { amplitudes, basis_fingerprint: target.fingerprint() })
}

/// Unfold a symmetric-basis vector onto the product basis: every member of a
/// class of multiplicity M receives Ã/√M. Inverse of [`symmetrize`].
pub fn desymmetrize(
    basis: &OracleBasis,
    v: &StateVector,
    source: &SymmetricBasis,
) -> Result<StateVector, OracleError> {
    if v.basis_fingerprint != source.fingerprint() || v.dim() != source.dim() {
        return Err(OracleError::BasisMismatch);
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); source.dim()];
    for idx in 0..basis.dim() {
        let s = basis.symmetric_state(idx);
        let t = source.index(&s).ok_or(OracleError::BasisMismatch)?;
        members[t].push(idx);
    }
    let mut amplitudes = Array1::from_elem(basis.dim(), Complex64::new(0.0, 0.0));
    for t in 0..source.dim() {
        if members[t].is_empty() {
            continue;
        }
        let share = v.amplitudes[t] / (members[t].len() as f64).sqrt();
        for &idx in &members[t] {
            amplitudes[idx] = share;
        }
    }
    Ok(StateVector { amplitudes, basis_fingerprint: basis.fingerprint() })
}

/// Population on symmetric states with more than `kappa` phonon carriers.
pub fn carrier_leakage(basis: &SymmetricBasis, v: &StateVector, kappa: usize) -> f64 {
    basis
        .states
        .iter()
        .zip(v.amplitudes.iter())
        .filter(|(s, _)| s.carriers() > kappa)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Outcome of an oracle-vs-symmetric-engine trajectory comparison.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub times_fs: Vec<f64>,
    /// ‖symmetrized oracle state − truncated-engine state‖₂ per time
    /// (states absent from the truncated basis count in full).
    pub distance: Vec<f64>,
    pub max_distance: f64,
    /// Oracle population beyond κ carriers, per time.
    pub leakage: Vec<f64>,
    pub max_leakage: f64,
}

/// Propagate the same photonic initial condition through the product engine
/// and the order-κ symmetric engine, and report amplitude distances and
/// carrier leakage over time.
pub fn compare_dynamics(
    n: usize,
    vib: &VibrationalBasis,
    g: f64,
    omega_c: f64,
    kappa: usize,
    times: &TimeGrid,
) -> Result<ComparisonReport, OracleError> {
    let species = |label: &str| {
        SpeciesSpec::new(
            label,
            MoleculeCount::Finite(n),
            Coupling::SingleMolecule(g),
            vib.clone(),
        )
    };

    // Product engine.
    let oracle = build_oracle(n, vib, g, omega_c)?;
    let o_eigen = oracle.h.diagonalize()?;
    let o_traj = propagate(&o_eigen, &oracle_photonic_state(&oracle.basis), times)?;

    // Symmetric engines: the full-order basis to express the oracle states,
    // and the truncated run under test.
    let full = enumerate(&[species("mol")?], n)?;
    let truncated = enumerate(&[species("mol")?], kappa.min(n))?;
    let t_h = build(&truncated, &CavitySpec { omega_c })?;
    let t_eigen = t_h.diagonalize()?;
    let t_traj = propagate(
        &t_eigen,
        &crate::dynamics::initial_photonic_state(&truncated),
        times,
    )?;

    // Where each truncated-basis state sits in the full basis.
    let embed: Vec<usize> = truncated
        .states
        .iter()
        .map(|s| full.index(s).expect("truncated states embed in the full basis"))
        .collect();

    let mut distance = Vec::with_capacity(times.n_steps());
    let mut leakage = Vec::with_capacity(times.n_steps());
    for i in 0..times.n_steps() {
        let folded = symmetrize(&oracle.basis, &o_traj.state(i), &full)?;
        let mut diff: Array1<Complex64> = folded.amplitudes.clone();
        for (t_idx, &f_idx) in embed.iter().enumerate() {
            diff[f_idx] -= t_traj.states[i][t_idx];
        }
        distance.push(diff.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt());
        leakage.push(carrier_leakage(&full, &folded, kappa));
    }
    let max_distance = distance.iter().cloned().fold(0.0, f64::max);
    let max_leakage = leakage.iter().cloned().fold(0.0, f64::max);
    Ok(ComparisonReport { times_fs: times.times_fs(), distance, max_distance, leakage, max_leakage })
}
