//! Benchmark model for golden-rule relaxation rates: resonant two-level
//! molecules whose excited state couples linearly to a bath of harmonic
//! modes.
//!
//! The unperturbed part `H0` is the cavity–ensemble Hamiltonian with
//! *identity* vibrational overlaps — electronic transitions preserve the
//! phonon configuration — so its eigenstates are polaritons and
//! phonon-dressed dark states with closed-form energies. The perturbation
//! `H1` is the vibronic coupling Σ_k ω_k √s_k (b†_k + b_k) acting on the
//! phonon modes of whichever molecule is electronically excited. Golden-rule
//! rates between the `H0` families are known in closed form, which makes this
//! model the calibration target for the rate-extraction machinery.
//!
//! Phonon configurations hold at most one phonon per mode and at most
//! `occupancy_cap` phonons per molecule. States are tracked at truncation
//! order one: a single ground-electronic molecule (the carrier) may hold
//! phonons.

use std::collections::{HashMap, HashSet, VecDeque};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::basis::DEFAULT_DIMENSION_CAP;
use crate::error::HamiltonianError;
use crate::linalg::{CsrMatrix, MatrixStorage, SPARSE_THRESHOLD};

/// Harmonic bath with linear vibronic coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VibronicBathSpec {
    /// Mode energies ω_ν,k (eV), strictly ascending.
    pub frequencies: Vec<f64>,
    /// Huang-Rhys factors s_k ≥ 0, one per mode.
    pub huang_rhys: Vec<f64>,
    /// Maximum phonons one molecule may hold (per mode the cap is one).
    pub occupancy_cap: usize,
}

impl VibronicBathSpec {
    pub fn validate(&self) -> Result<(), HamiltonianError> {
        if self.frequencies.len() != self.huang_rhys.len() {
            return Err(HamiltonianError::BathSpecInvalid(format!(
                "{} frequencies but {} Huang-Rhys factors",
                self.frequencies.len(),
                self.huang_rhys.len()
            )));
        }
        if self.occupancy_cap == 0 {
            return Err(HamiltonianError::BathSpecInvalid(
                "occupancy cap must be at least 1".into(),
            ));
        }
        for (k, &w) in self.frequencies.iter().enumerate() {
            if !(w > 0.0) {
                return Err(HamiltonianError::BathSpecInvalid(format!(
                    "mode {k} has non-positive energy {w}"
                )));
            }
            if k > 0 && self.frequencies[k - 1] >= w {
                return Err(HamiltonianError::BathSpecInvalid(format!(
                    "mode energies must be strictly ascending at index {k}"
                )));
            }
        }
        if let Some(k) = self.huang_rhys.iter().position(|&s| !(s >= 0.0)) {
            return Err(HamiltonianError::BathSpecInvalid(format!(
                "mode {k} has negative Huang-Rhys factor"
            )));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    /// Vibronic coupling strength of mode k: ω_k √s_k.
    pub fn coupling(&self, k: usize) -> f64 {
        self.frequencies[k] * self.huang_rhys[k].sqrt()
    }
}

/// How many ground-electronic carriers the model tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FgrOrder {
    /// No carriers: phonons only ever sit on the excited molecule.
    Zeroth,
    /// One carrier molecule may hold phonons.
    First,
}

/// Initial condition defining the dynamically reachable shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgrStart {
    /// Polariton block: photon and phonon-free exciton.
    UpperPolariton,
    /// Dark state carrying one phonon in `mode`.
    Dark { mode: usize },
}

/// A phonon configuration: sorted distinct mode indices (≤ 1 phonon per
/// mode).
pub type PhononConfig = Vec<usize>;

/// Basis state of the benchmark model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VibronicState {
    /// Photon present; `carrier` is the phonon configuration of the single
    /// ground-electronic molecule allowed to hold phonons (empty: none).
    Photon { carrier: PhononConfig },
    /// One molecule excited with phonons `excited`; `carrier` as above.
    Exciton { excited: PhononConfig, carrier: PhononConfig },
}

impl VibronicState {
    /// The phonon configuration on the ground-electronic carrier molecule.
    pub fn carrier(&self) -> &PhononConfig {
        match self {
            VibronicState::Photon { carrier } => carrier,
            VibronicState::Exciton { carrier, .. } => carrier,
        }
    }
}

/// The assembled benchmark model: basis, unperturbed `h0`, perturbation
/// `h1`, and the defining parameters.
#[derive(Debug, Clone)]
pub struct VibronicModel {
    pub states: Vec<VibronicState>,
    pub index_of: HashMap<VibronicState, usize>,
    pub h0: MatrixStorage,
    pub h1: MatrixStorage,
    pub n_molecules: usize,
    pub g: f64,
    pub omega: f64,
    pub bath: VibronicBathSpec,
}

impl VibronicModel {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index(&self, state: &VibronicState) -> Option<usize> {
        self.index_of.get(state).copied()
    }

    /// H0 + H1 as a dense matrix.
    pub fn total_dense(&self) -> Array2<f64> {
        let mut a = self.h0.to_dense();
        a += &self.h1.to_dense();
        a
    }

    /// Amplitudes of the phonon-free upper (`+1`) or lower (`−1`) polariton.
    pub fn polariton_vector(&self, sign: f64) -> Vec<(usize, f64)> {
        let p = self.index(&VibronicState::Photon { carrier: vec![] });
        let x = self.index(&VibronicState::Exciton { excited: vec![], carrier: vec![] });
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        [(p, inv), (x, sign.signum() * inv)]
            .into_iter()
            .filter_map(|(i, a)| i.map(|i| (i, a)))
            .collect()
    }

    /// Amplitudes of the dark eigenstate holding one phonon in `mode`:
    /// orthogonal to the photon channel, √((N−1)/N) on the
    /// excited-molecule-holds-the-phonon configuration and −1/√N on the
    /// carrier-holds-it configuration.
    pub fn dark_vector(&self, mode: usize) -> Vec<(usize, f64)> {
        let nf = self.n_molecules as f64;
        let on_excited =
            self.index(&VibronicState::Exciton { excited: vec![mode], carrier: vec![] });
        let on_carrier =
            self.index(&VibronicState::Exciton { excited: vec![], carrier: vec![mode] });
        let mut out = Vec::new();
        if let Some(i) = on_excited {
            out.push((i, ((nf - 1.0) / nf).sqrt()));
        }
        if let Some(i) = on_carrier {
            out.push((i, -(1.0 / nf).sqrt()));
        }
        out
    }
}

/// Energy of a phonon configuration.
fn config_energy(bath: &VibronicBathSpec, config: &PhononConfig) -> f64 {
    config.iter().map(|&k| bath.frequencies[k]).sum()
}

/// All sorted distinct-mode configurations with at most `cap` phonons.
fn all_configs(n_modes: usize, cap: usize) -> Vec<PhononConfig> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<PhononConfig> = vec![vec![]];
    for _ in 0..cap.min(n_modes) {
        let mut next = Vec::new();
        for c in &frontier {
            let lo = c.last().map(|&k| k + 1).unwrap_or(0);
            for k in lo..n_modes {
                let mut d = c.clone();
                d.push(k);
                next.push(d);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// H0 partners of one state under the identity-overlap light-matter
/// coupling, with amplitudes (excluding the diagonal).
fn h0_partners(
    state: &VibronicState,
    n: usize,
    g: f64,
) -> Vec<(VibronicState, f64)> {
    let nf = n as f64;
    match state {
        VibronicState::Photon { carrier } => {
            let mut out = Vec::new();
            // Excite a fresh molecule out of the phonon-free pool.
            let pool = if carrier.is_empty() { nf } else { nf - 1.0 };
            if pool > 0.0 {
                out.push((
                    VibronicState::Exciton { excited: vec![], carrier: carrier.clone() },
                    g * pool.sqrt(),
                ));
            }
            // Re-excite the carrier, taking its phonons along.
            if !carrier.is_empty() {
                out.push((
                    VibronicState::Exciton { excited: carrier.clone(), carrier: vec![] },
                    g,
                ));
            }
            out
        }
        VibronicState::Exciton { excited, carrier } => {
            let mut out = Vec::new();
            if excited.is_empty() {
                // De-excite into the phonon-free pool.
                let pool = if carrier.is_empty() { nf } else { nf - 1.0 };
                if pool > 0.0 {
                    out.push((
                        VibronicState::Photon { carrier: carrier.clone() },
                        g * pool.sqrt(),
                    ));
                }
            } else if carrier.is_empty() {
                // De-excite keeping the phonons: the molecule becomes the
                // carrier.
                out.push((VibronicState::Photon { carrier: excited.clone() }, g));
            }
            out
        }
    }
}

/// H1 partners (vibronic raises and lowers on the excited molecule) with
/// amplitudes.
fn h1_partners(
    state: &VibronicState,
    bath: &VibronicBathSpec,
) -> Vec<(VibronicState, f64)> {
    let VibronicState::Exciton { excited, carrier } = state else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for k in 0..bath.n_modes() {
        match excited.binary_search(&k) {
            Ok(pos) => {
                let mut e = excited.clone();
                e.remove(pos);
                out.push((
                    VibronicState::Exciton { excited: e, carrier: carrier.clone() },
                    bath.coupling(k),
                ));
            }
            Err(pos) => {
                if excited.len() < bath.occupancy_cap {
                    let mut e = excited.clone();
                    e.insert(pos, k);
                    out.push((
                        VibronicState::Exciton { excited: e, carrier: carrier.clone() },
                        bath.coupling(k),
                    ));
                }
            }
        }
    }
    out
}

/// Assemble H0 and H1 over an explicit state list.
fn assemble(
    states: Vec<VibronicState>,
    n: usize,
    g: f64,
    omega: f64,
    bath: &VibronicBathSpec,
) -> VibronicModel {
    let mut states = states;
    states.sort();
    states.dedup();
    let index_of: HashMap<VibronicState, usize> =
        states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let dim = states.len();

    let mut t0: Vec<(usize, usize, f64)> = Vec::new();
    let mut t1: Vec<(usize, usize, f64)> = Vec::new();
    for (i, s) in states.iter().enumerate() {
        let e = match s {
            VibronicState::Photon { carrier } => omega + config_energy(bath, carrier),
            VibronicState::Exciton { excited, carrier } => {
                omega + config_energy(bath, excited) + config_energy(bath, carrier)
            }
        };
        t0.push((i, i, e));
        for (p, amp) in h0_partners(s, n, g) {
            if let Some(&j) = index_of.get(&p) {
                if j > i && amp != 0.0 {
                    t0.push((i, j, amp));
                    t0.push((j, i, amp));
                }
            }
        }
        for (p, amp) in h1_partners(s, bath) {
            if let Some(&j) = index_of.get(&p) {
                if j > i && amp != 0.0 {
                    t1.push((i, j, amp));
                    t1.push((j, i, amp));
                }
            }
        }
    }

    let pack = |mut triplets: Vec<(usize, usize, f64)>| {
        if dim <= SPARSE_THRESHOLD {
            let mut a = Array2::zeros((dim, dim));
            for (r, c, v) in triplets {
                a[[r, c]] += v;
            }
            MatrixStorage::Dense(a)
        } else {
            MatrixStorage::Sparse(CsrMatrix::from_triplets(dim, &mut triplets))
        }
    };

    VibronicModel {
        h0: pack(t0),
        h1: pack(t1),
        states,
        index_of,
        n_molecules: n,
        g,
        omega,
        bath: bath.clone(),
    }
}

/// Count Σ_{c ≤ cap} C(n_modes, c) with saturation.
fn config_count(n_modes: usize, cap: usize) -> usize {
    let mut total = 0usize;
    let mut term = 1usize;
    for c in 0..=cap.min(n_modes) {
        if c > 0 {
            term = term.saturating_mul(n_modes - c + 1) / c;
        }
        total = total.saturating_add(term);
    }
    total
}

/// Build the benchmark model over the full capped state space.
///
/// `n` molecules at resonance (ω_c = ω_eg = `omega`), per-molecule coupling
/// `g`. At zeroth order only the excited molecule may hold phonons; at first
/// order one ground carrier may as well.
pub fn build_vibronic_fgr_model(
    order: FgrOrder,
    n: usize,
    g: f64,
    omega: f64,
    bath: &VibronicBathSpec,
) -> Result<VibronicModel, HamiltonianError> {
    bath.validate()?;
    let min = match order {
        FgrOrder::Zeroth => 1,
        FgrOrder::First => 2,
    };
    if n < min {
        return Err(HamiltonianError::BadMoleculeCount { min: min as u64, got: n as u64 });
    }
    let c = config_count(bath.n_modes(), bath.occupancy_cap);
    let projected = match order {
        FgrOrder::Zeroth => 1usize.saturating_add(c),
        FgrOrder::First => c.saturating_add(c.saturating_mul(c)),
    };
    if projected > DEFAULT_DIMENSION_CAP {
        return Err(HamiltonianError::BathTooLarge {
            modes: bath.n_modes(),
            cap: bath.occupancy_cap,
            dim: projected,
            max: DEFAULT_DIMENSION_CAP,
        });
    }

    let configs = all_configs(bath.n_modes(), bath.occupancy_cap);
    let mut states = Vec::with_capacity(projected);
    match order {
        FgrOrder::Zeroth => {
            states.push(VibronicState::Photon { carrier: vec![] });
            for e in &configs {
                states.push(VibronicState::Exciton { excited: e.clone(), carrier: vec![] });
            }
        }
        FgrOrder::First => {
            for c in &configs {
                states.push(VibronicState::Photon { carrier: c.clone() });
            }
            for e in &configs {
                for c in &configs {
                    states.push(VibronicState::Exciton {
                        excited: e.clone(),
                        carrier: c.clone(),
                    });
                }
            }
        }
    }
    Ok(assemble(states, n, g, omega, bath))
}

/// Build the first-order model restricted to the shell that golden-rule
/// decay from `start` explores: the start states, everything one vibronic
/// action away, and the closure of that set under the collective coupling.
/// Exact for the decay dynamics through second order in the perturbation,
/// with dimension O(modes) instead of O(modes²).
pub fn build_vibronic_fgr_shell(
    n: usize,
    g: f64,
    omega: f64,
    bath: &VibronicBathSpec,
    start: FgrStart,
) -> Result<VibronicModel, HamiltonianError> {
    bath.validate()?;
    if n < 2 {
        return Err(HamiltonianError::BadMoleculeCount { min: 2, got: n as u64 });
    }
    if let FgrStart::Dark { mode } = start {
        if mode >= bath.n_modes() {
            return Err(HamiltonianError::BathSpecInvalid(format!(
                "dark start mode {mode} out of range ({} modes)",
                bath.n_modes()
            )));
        }
    }

    let seed: Vec<VibronicState> = match start {
        FgrStart::UpperPolariton => vec![
            VibronicState::Photon { carrier: vec![] },
            VibronicState::Exciton { excited: vec![], carrier: vec![] },
        ],
        FgrStart::Dark { mode } => vec![
            VibronicState::Exciton { excited: vec![mode], carrier: vec![] },
            VibronicState::Exciton { excited: vec![], carrier: vec![mode] },
        ],
    };

    let close_h0 = |set: &mut HashSet<VibronicState>| {
        let mut queue: VecDeque<VibronicState> = set.iter().cloned().collect();
        while let Some(s) = queue.pop_front() {
            for (p, _) in h0_partners(&s, n, g) {
                if set.insert(p.clone()) {
                    queue.push_back(p);
                }
            }
        }
    };

    let mut shell: HashSet<VibronicState> = seed.into_iter().collect();
    close_h0(&mut shell);
    let mut grown: Vec<VibronicState> = Vec::new();
    for s in &shell {
        for (p, _) in h1_partners(s, bath) {
            grown.push(p);
        }
    }
    shell.extend(grown);
    close_h0(&mut shell);

    Ok(assemble(shell.into_iter().collect(), n, g, omega, bath))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate, Coupling, MoleculeCount, SpeciesSpec, SymmetricState};
    use crate::hamiltonian::{build, CavitySpec};
    use crate::linalg::eigh_checked;
    use crate::vib::VibrationalBasis;
    use ndarray::Array1;

    fn flat_bath(freqs: &[f64], s: f64, cap: usize) -> VibronicBathSpec {
        VibronicBathSpec {
            frequencies: freqs.to_vec(),
            huang_rhys: vec![s; freqs.len()],
            occupancy_cap: cap,
        }
    }

    #[test]
    fn empty_bath_is_the_rabi_doublet() {
        let bath = flat_bath(&[], 0.0, 1);
        let model = build_vibronic_fgr_model(FgrOrder::Zeroth, 16, 0.025, 2.0, &bath).unwrap();
        assert_eq!(model.dim(), 2);
        let h0 = model.h0.to_dense();
        let split = 0.025 * 4.0;
        let eig = eigh_checked(&h0, 1e-10).unwrap();
        assert!((eig.values[0] - (2.0 - split)).abs() < 1e-12);
        assert!((eig.values[1] - (2.0 + split)).abs() < 1e-12);
        assert_eq!(model.h1.to_dense().iter().filter(|&&v| v != 0.0).count(), 0);
    }

    #[test]
    fn zeroth_order_spectrum_is_polaritons_plus_dark_ladder() {
        let (n, g, omega) = (25usize, 0.02, 2.0);
        let bath = flat_bath(&[0.08, 0.1, 0.13], 0.01, 1);
        let model = build_vibronic_fgr_model(FgrOrder::Zeroth, n, g, omega, &bath).unwrap();
        assert_eq!(model.dim(), 2 + 3);
        let eig = eigh_checked(&model.h0.to_dense(), 1e-10).unwrap();
        let split = g * (n as f64).sqrt();
        let mut expect = vec![omega - split, omega + split];
        for &w in &bath.frequencies {
            expect.push(omega + w);
        }
        expect.sort_by(f64::total_cmp);
        for (got, want) in eig.values.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn vibronic_elements_sit_on_the_excited_molecule_only() {
        let bath = flat_bath(&[0.1, 0.2], 0.04, 1);
        let model = build_vibronic_fgr_model(FgrOrder::First, 4, 0.02, 2.0, &bath).unwrap();
        let h1 = model.h1.to_dense();
        // Photon rows carry no vibronic coupling.
        for (i, s) in model.states.iter().enumerate() {
            if matches!(s, VibronicState::Photon { .. }) {
                for j in 0..model.dim() {
                    assert_eq!(h1[[i, j]], 0.0);
                }
            }
        }
        // The vacuum → one-phonon element is ω_k √s_k.
        let a = model
            .index(&VibronicState::Exciton { excited: vec![], carrier: vec![] })
            .unwrap();
        for k in 0..2 {
            let b = model
                .index(&VibronicState::Exciton { excited: vec![k], carrier: vec![] })
                .unwrap();
            let expect = bath.frequencies[k] * 0.04f64.sqrt();
            assert!((h1[[a, b]] - expect).abs() < 1e-15);
            assert!((h1[[b, a]] - expect).abs() < 1e-15);
        }
        // Carrier phonons are untouched by H1: no element between states
        // differing in carrier.
        for i in 0..model.dim() {
            for j in 0..model.dim() {
                if h1[[i, j]] != 0.0 {
                    assert_eq!(
                        model.states[i].carrier(),
                        model.states[j].carrier(),
                        "H1 must not move carrier phonons"
                    );
                }
            }
        }
    }

    /// The first-order model over one mode is the same matrix the general
    /// ensemble assembly produces for a species whose two vibrational levels
    /// are the bath configurations (identity overlaps).
    #[test]
    fn first_order_matches_general_assembly() {
        let (n, g, omega, w) = (3usize, 0.04, 2.0, 0.11);
        let bath = flat_bath(&[w], 0.02, 1);
        let model = build_vibronic_fgr_model(FgrOrder::First, n, g, omega, &bath).unwrap();

        let vib = VibrationalBasis::from_parts(
            Array1::from_vec(vec![0.0, w]),
            Array1::from_vec(vec![omega, omega + w]),
            ndarray::Array2::eye(2),
        );
        let sp = SpeciesSpec::new(
            "m",
            MoleculeCount::Finite(n),
            Coupling::SingleMolecule(g),
            vib,
        )
        .unwrap();
        let basis = enumerate(&[sp], 1).unwrap();
        let h_general = build(&basis, &CavitySpec { omega_c: omega }).unwrap();
        let hg = h_general.storage.to_dense();
        let h0 = model.h0.to_dense();

        assert_eq!(model.dim(), basis.dim());
        let map_state = |s: &VibronicState| -> SymmetricState {
            let occ_of = |carrier: &PhononConfig| {
                let empty = crate::basis::OccupationRecord::empty(1);
                if carrier.is_empty() {
                    empty
                } else {
                    empty.with_added(0, 1)
                }
            };
            match s {
                VibronicState::Photon { carrier } => {
                    SymmetricState::Photonic { occ: occ_of(carrier) }
                }
                VibronicState::Exciton { excited, carrier } => SymmetricState::Excitonic {
                    species: 0,
                    level: if excited.is_empty() { 0 } else { 1 },
                    occ: occ_of(carrier),
                },
            }
        };
        for (i, si) in model.states.iter().enumerate() {
            let gi = basis.index(&map_state(si)).unwrap();
            for (j, sj) in model.states.iter().enumerate() {
                let gj = basis.index(&map_state(sj)).unwrap();
                assert!(
                    (h0[[i, j]] - hg[[gi, gj]]).abs() < 1e-14,
                    "H0[{i}][{j}] = {} vs general {}",
                    h0[[i, j]],
                    hg[[gi, gj]]
                );
            }
        }
    }

    /// The dark combination over the two one-phonon configurations is an H0
    /// eigenstate at ω + ω_m, orthogonal to the photon channel; the dressed
    /// polaritons sit at ω + ω_m ± g√N.
    #[test]
    fn dark_state_components_and_energies() {
        let (n, g, omega, w) = (2usize, 0.03, 2.0, 0.12);
        let bath = flat_bath(&[w], 0.02, 1);
        let model = build_vibronic_fgr_model(FgrOrder::First, n, g, omega, &bath).unwrap();
        let h0 = model.h0.to_dense();
        let eig = eigh_checked(&h0, 1e-10).unwrap();

        // Energy families: ω ± g√N, ω + w, ω + w ± g√N, ω + w (photon+carrier
        // block mixes to the dressed polaritons and the dark one).
        let split = g * (n as f64).sqrt();
        for want in [omega - split, omega + split, omega + w, omega + w - split, omega + w + split]
        {
            assert!(
                eig.values.iter().any(|&v| (v - want).abs() < 1e-10),
                "missing eigenvalue {want}"
            );
        }

        // The analytic dark vector: H0·v = (ω+w)·v.
        let dark = model.dark_vector(0);
        assert_eq!(dark.len(), 2);
        let mut v = vec![0.0; model.dim()];
        for &(i, a) in &dark {
            v[i] = a;
        }
        let mut hv = vec![0.0; model.dim()];
        for i in 0..model.dim() {
            for j in 0..model.dim() {
                hv[i] += h0[[i, j]] * v[j];
            }
        }
        for i in 0..model.dim() {
            assert!(
                (hv[i] - (omega + w) * v[i]).abs() < 1e-12,
                "dark vector is not an H0 eigenstate at component {i}"
            );
        }
        // Component magnitudes 1/√N and √((N−1)/N).
        let nf = n as f64;
        let mags: Vec<f64> = dark.iter().map(|&(_, a)| a.abs()).collect();
        assert!(mags.iter().any(|&m| (m - (1.0 / nf).sqrt()).abs() < 1e-12));
        assert!(mags.iter().any(|&m| (m - ((nf - 1.0) / nf).sqrt()).abs() < 1e-12));
    }

    /// The polariton shell keeps exactly the states golden-rule decay from
    /// |+,0,0⟩ reaches, and its matrices agree with the full model entry for
    /// entry.
    #[test]
    fn upper_polariton_shell_is_a_faithful_restriction() {
        let (n, g, omega) = (5usize, 0.02, 2.0);
        let bath = flat_bath(&[0.07, 0.1, 0.12, 0.15], 0.01, 1);
        let k = bath.n_modes();
        let full = build_vibronic_fgr_model(FgrOrder::First, n, g, omega, &bath).unwrap();
        let shell =
            build_vibronic_fgr_shell(n, g, omega, &bath, FgrStart::UpperPolariton).unwrap();

        assert_eq!(shell.dim(), 3 * k + 2);
        let hf0 = full.h0.to_dense();
        let hf1 = full.h1.to_dense();
        let hs0 = shell.h0.to_dense();
        let hs1 = shell.h1.to_dense();
        for (i, si) in shell.states.iter().enumerate() {
            let fi = full.index(si).expect("shell state missing from full model");
            for (j, sj) in shell.states.iter().enumerate() {
                let fj = full.index(sj).unwrap();
                assert_eq!(hs0[[i, j]], hf0[[fi, fj]]);
                assert_eq!(hs1[[i, j]], hf1[[fi, fj]]);
            }
        }
    }

    /// The dark-start shell at occupancy cap two: the initial triplet, the
    /// two-phonon polariton sectors, the spectator-dressed dark states, and
    /// the phonon-free polariton block.
    #[test]
    fn dark_shell_membership_and_size() {
        let (n, g, omega) = (4usize, 0.02, 2.0);
        let bath = flat_bath(&[0.08, 0.1, 0.13], 0.01, 2);
        let k = bath.n_modes();
        let m0 = 1usize;
        let shell =
            build_vibronic_fgr_shell(n, g, omega, &bath, FgrStart::Dark { mode: m0 }).unwrap();
        // Families: seed closure (3), two-phonon raises on the excited
        // molecule (K−1), the lowered vacuum exciton (1), carrier-dressed
        // raises (K), two-phonon photon + carrier pairs (2(K−1)), and the
        // bare photon (1): 4K + 2.
        assert_eq!(shell.dim(), 4 * k + 2);

        // Spot-check the families.
        for s in [
            VibronicState::Exciton { excited: vec![m0], carrier: vec![] },
            VibronicState::Exciton { excited: vec![], carrier: vec![m0] },
            VibronicState::Photon { carrier: vec![m0] },
            VibronicState::Photon { carrier: vec![] },
            VibronicState::Exciton { excited: vec![], carrier: vec![] },
            VibronicState::Exciton { excited: vec![0, m0], carrier: vec![] },
            VibronicState::Photon { carrier: vec![0, m0] },
            VibronicState::Exciton { excited: vec![], carrier: vec![0, m0] },
            VibronicState::Exciton { excited: vec![2], carrier: vec![m0] },
        ] {
            assert!(shell.index(&s).is_some(), "missing {s:?}");
        }

        // And it is a faithful restriction of the full cap-2 model.
        let full = build_vibronic_fgr_model(FgrOrder::First, n, g, omega, &bath).unwrap();
        let hf0 = full.h0.to_dense();
        let hs0 = shell.h0.to_dense();
        for (i, si) in shell.states.iter().enumerate() {
            let fi = full.index(si).unwrap();
            for (j, sj) in shell.states.iter().enumerate() {
                let fj = full.index(sj).unwrap();
                assert_eq!(hs0[[i, j]], hf0[[fi, fj]]);
            }
        }
    }

    #[test]
    fn bad_bath_specs_are_rejected() {
        let err = VibronicBathSpec {
            frequencies: vec![0.1, 0.1],
            huang_rhys: vec![0.01, 0.01],
            occupancy_cap: 1,
        }
        .validate()
        .unwrap_err();
        assert!(matches!(err, HamiltonianError::BathSpecInvalid(_)));

        let err = VibronicBathSpec {
            frequencies: vec![0.1],
            huang_rhys: vec![0.01, 0.02],
            occupancy_cap: 1,
        }
        .validate()
        .unwrap_err();
        assert!(matches!(err, HamiltonianError::BathSpecInvalid(_)));

        let big = VibronicBathSpec {
            frequencies: (1..=3000).map(|k| 1e-4 * k as f64).collect(),
            huang_rhys: vec![0.01; 3000],
            occupancy_cap: 1,
        };
        assert!(matches!(
            build_vibronic_fgr_model(FgrOrder::First, 4, 0.02, 2.0, &big),
            Err(HamiltonianError::BathTooLarge { .. })
        ));
    }
}
