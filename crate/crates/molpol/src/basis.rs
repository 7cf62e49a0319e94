//! Permutation-symmetric basis for the first excitation manifold.
//!
//! Identical molecules are grouped into species; a basis state records only
//! how many molecules of each species occupy each ground-surface vibrational
//! level, not which ones. States come in two families: *photonic* (cavity
//! mode occupied, every molecule electronically ground) and *excitonic* (one
//! molecule of some species electronically excited in vibrational level `l`).
//! A molecule in a ground-surface level above the vibrational ground state is
//! called a phonon carrier; the truncation order κ caps how many carriers a
//! state may hold. κ = N reproduces the full symmetric sector exactly, while
//! small κ keeps the dimension polynomial at an error that shrinks with
//! ensemble size.
//!
//! Each retained state stands for √(multiplicity) copies of a product
//! configuration; the [`SymmetricBasis::renorm_factor`] method exposes that
//! weight so populations over physical molecules can be reconstructed.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::BasisError;
use crate::vib::VibrationalBasis;

/// Default cap on the enumerated dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 2_000_000;

/// Ensemble size of one species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoleculeCount {
    Finite(usize),
    /// Thermodynamic limit: only the collective coupling is meaningful, the
    /// per-molecule coupling vanishes, and depletion ratios √((N−c)/N) → 1.
    Infinite,
}

/// Light-matter coupling strength of one species, as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// Per-molecule coupling g (eV); collective strength is g√N.
    SingleMolecule(f64),
    /// Collective coupling G = g√N (eV); per-molecule strength is G/√N.
    Collective(f64),
}

/// One molecular species: how many molecules, how strongly each couples to
/// the cavity, and its vibrational structure.
#[derive(Debug, Clone)]
pub struct SpeciesSpec {
    pub label: String,
    pub count: MoleculeCount,
    pub coupling: Coupling,
    pub vib: VibrationalBasis,
}

impl SpeciesSpec {
    pub fn new(
        label: impl Into<String>,
        count: MoleculeCount,
        coupling: Coupling,
        vib: VibrationalBasis,
    ) -> Result<Self, BasisError> {
        let label = label.into();
        if let (MoleculeCount::Infinite, Coupling::SingleMolecule(_)) = (count, coupling) {
            return Err(BasisError::CouplingUndefined { label });
        }
        if let MoleculeCount::Finite(0) = count {
            return Err(BasisError::NoMolecules { label });
        }
        Ok(SpeciesSpec { label, count, coupling, vib })
    }

    /// Number of molecules if finite.
    pub fn n_finite(&self) -> Option<usize> {
        match self.count {
            MoleculeCount::Finite(n) => Some(n),
            MoleculeCount::Infinite => None,
        }
    }

    /// Collective coupling g√N (or the given G).
    pub fn collective_g(&self) -> f64 {
        match (self.count, self.coupling) {
            (_, Coupling::Collective(g_c)) => g_c,
            (MoleculeCount::Finite(n), Coupling::SingleMolecule(g)) => g * (n as f64).sqrt(),
            // Forbidden by `new`; dead in validated specs.
            (MoleculeCount::Infinite, Coupling::SingleMolecule(_)) => f64::NAN,
        }
    }

    /// Per-molecule coupling g (zero in the thermodynamic limit).
    pub fn single_g(&self) -> f64 {
        match (self.count, self.coupling) {
            (MoleculeCount::Finite(_), Coupling::SingleMolecule(g)) => g,
            (MoleculeCount::Finite(n), Coupling::Collective(g_c)) => g_c / (n as f64).sqrt(),
            (MoleculeCount::Infinite, _) => 0.0,
        }
    }

    /// √((N − c)/N): depletion of the collective coupling when c molecules of
    /// this species are carriers or excited. Unity in the thermodynamic
    /// limit.
    pub fn depletion(&self, c: usize) -> f64 {
        match self.count {
            MoleculeCount::Finite(n) => {
                if c >= n {
                    0.0
                } else {
                    ((n - c) as f64 / n as f64).sqrt()
                }
            }
            MoleculeCount::Infinite => 1.0,
        }
    }
}

/// Sparse per-species occupation of ground-surface vibrational levels above
/// the vibrational ground state. `levels[j]` lists ascending
/// `(level k ≥ 1, molecules ≥ 1)` pairs for species `j`; molecules in level 0
/// are the implicit remainder of the species' pool.
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct OccupationRecord {
    pub levels: Vec<Vec<(usize, usize)>>,
}

impl OccupationRecord {
    /// No carriers anywhere.
    pub fn empty(n_species: usize) -> Self {
        OccupationRecord { levels: vec![Vec::new(); n_species] }
    }

    pub fn n_species(&self) -> usize {
        self.levels.len()
    }

    /// Carriers of species `j`.
    pub fn carriers_of(&self, j: usize) -> usize {
        self.levels[j].iter().map(|&(_, c)| c).sum()
    }

    /// Carriers across all species.
    pub fn total_carriers(&self) -> usize {
        (0..self.levels.len()).map(|j| self.carriers_of(j)).sum()
    }

    /// Molecules of species `j` in ground level `k ≥ 1`.
    pub fn count_at(&self, j: usize, k: usize) -> usize {
        self.levels[j]
            .iter()
            .find(|&&(level, _)| level == k)
            .map(|&(_, c)| c)
            .unwrap_or(0)
    }

    /// A copy with one more molecule of species `j` in level `k ≥ 1`.
    pub fn with_added(&self, j: usize, k: usize) -> Self {
        let mut out = self.clone();
        match out.levels[j].binary_search_by_key(&k, |&(level, _)| level) {
            Ok(pos) => out.levels[j][pos].1 += 1,
            Err(pos) => out.levels[j].insert(pos, (k, 1)),
        }
        out
    }

    /// A copy with one molecule of species `j` removed from level `k ≥ 1`,
    /// or `None` if that level is empty.
    pub fn with_removed(&self, j: usize, k: usize) -> Option<Self> {
        let mut out = self.clone();
        match out.levels[j].binary_search_by_key(&k, |&(level, _)| level) {
            Ok(pos) => {
                if out.levels[j][pos].1 == 1 {
                    out.levels[j].remove(pos);
                } else {
                    out.levels[j][pos].1 -= 1;
                }
                Some(out)
            }
            Err(_) => None,
        }
    }
}

/// One permutation-symmetric basis state of the first excitation manifold.
///
/// The derived ordering is the canonical basis order: all photonic states
/// (by occupation) precede all excitonic states (by species, then excited
/// level, then occupation).
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum SymmetricState {
    /// Cavity photon present, all molecules electronically ground.
    Photonic { occ: OccupationRecord },
    /// One molecule of `species` electronically excited in vibrational level
    /// `level`; the cavity is empty.
    Excitonic { species: usize, level: usize, occ: OccupationRecord },
}

impl SymmetricState {
    pub fn occ(&self) -> &OccupationRecord {
        match self {
            SymmetricState::Photonic { occ } => occ,
            SymmetricState::Excitonic { occ, .. } => occ,
        }
    }

    pub fn is_photonic(&self) -> bool {
        matches!(self, SymmetricState::Photonic { .. })
    }

    /// Total phonon carriers (ground-electronic molecules above their
    /// vibrational ground state).
    pub fn carriers(&self) -> usize {
        self.occ().total_carriers()
    }
}

/// The enumerated basis at truncation order κ, canonically ordered, with the
/// inverse index map and the species table.
#[derive(Debug, Clone)]
pub struct SymmetricBasis {
    pub states: Vec<SymmetricState>,
    pub index_of: HashMap<SymmetricState, usize>,
    pub kappa: usize,
    pub species: Vec<SpeciesSpec>,
}

impl SymmetricBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Stable in-process identity of this basis (states, order, species
    /// labels and sizes); matrices and state vectors carry it so that
    /// cross-basis mixups fail loudly instead of silently.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.kappa.hash(&mut h);
        for s in &self.species {
            s.label.hash(&mut h);
            s.count.hash(&mut h);
            s.vib.m_g().hash(&mut h);
            s.vib.m_e().hash(&mut h);
        }
        self.states.hash(&mut h);
        h.finish()
    }

    pub fn index(&self, state: &SymmetricState) -> Option<usize> {
        self.index_of.get(state).copied()
    }

    /// Species index by label.
    pub fn species_index(&self, label: &str) -> Option<usize> {
        self.species.iter().position(|s| s.label == label)
    }

    /// √(multiplicity) of a state: how many product configurations the
    /// symmetric state stands for. Defined only for finite species counts.
    pub fn renorm_factor(&self, state: &SymmetricState) -> Result<f64, BasisError> {
        let occ = state.occ();
        let mut product = 1.0f64;
        for (j, spec) in self.species.iter().enumerate() {
            let n = match spec.count {
                MoleculeCount::Finite(n) => n,
                MoleculeCount::Infinite => {
                    return Err(BasisError::InfiniteCount { label: spec.label.clone() })
                }
            };
            let c = occ.carriers_of(j);
            let excited_here = matches!(
                state,
                SymmetricState::Excitonic { species, .. } if *species == j
            );
            // Distinct assignments of this species' pool:
            // photonic   N!/(N−c)!          / Π_k N_k!
            // excitonic  N·(N−1)!/(N−1−c)!  / Π_k N_k!
            let mut m = 1.0f64;
            if excited_here {
                m *= n as f64;
                for i in 0..c {
                    m *= (n - 1 - i) as f64;
                }
            } else {
                for i in 0..c {
                    m *= (n - i) as f64;
                }
            }
            for &(_, count) in &occ.levels[j] {
                for f in 2..=count {
                    m /= f as f64;
                }
            }
            product *= m;
        }
        Ok(product.sqrt())
    }
}

/// All sparse occupations of one species: ascending-(level, count) multisets
/// over levels 1..m_g−1 with at most `max_total` molecules.
fn species_occupations(m_g: usize, max_total: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        level: usize,
        m_g: usize,
        budget: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if level >= m_g {
            out.push(cur.clone());
            return;
        }
        rec(level + 1, m_g, budget, cur, out);
        for c in 1..=budget {
            cur.push((level, c));
            rec(level + 1, m_g, budget - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, m_g, max_total, &mut Vec::new(), &mut out);
    out
}

/// Cartesian product of per-species occupations under a shared carrier
/// budget.
fn combined_occupations(
    per_species: &[Vec<Vec<(usize, usize)>>],
    budget: usize,
) -> Vec<OccupationRecord> {
    fn rec(
        j: usize,
        per_species: &[Vec<Vec<(usize, usize)>>],
        budget: usize,
        cur: &mut Vec<Vec<(usize, usize)>>,
        out: &mut Vec<OccupationRecord>,
    ) {
        if j == per_species.len() {
            out.push(OccupationRecord { levels: cur.clone() });
            return;
        }
        for occ in &per_species[j] {
            let used: usize = occ.iter().map(|&(_, c)| c).sum();
            if used <= budget {
                cur.push(occ.clone());
                rec(j + 1, per_species, budget - used, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, per_species, budget, &mut Vec::new(), &mut out);
    out
}

/// Enumerate the symmetric basis at truncation order `kappa` with the default
/// dimension cap.
pub fn enumerate(
    species: &[SpeciesSpec],
    kappa: usize,
) -> Result<SymmetricBasis, BasisError> {
    enumerate_with_cap(species, kappa, DEFAULT_DIMENSION_CAP)
}

/// Enumerate the symmetric basis at truncation order `kappa`.
///
/// Contains exactly the photonic and excitonic states with at most `kappa`
/// phonon carriers (and never more carriers than a species' pool allows), in
/// canonical order.
pub fn enumerate_with_cap(
    species: &[SpeciesSpec],
    kappa: usize,
    cap: usize,
) -> Result<SymmetricBasis, BasisError> {
    if species.is_empty() {
        return Err(BasisError::NoSpecies);
    }
    for (i, s) in species.iter().enumerate() {
        if s.vib.m_g() == 0 || s.vib.m_e() == 0 {
            return Err(BasisError::EmptyVibrationalBasis { label: s.label.clone() });
        }
        if let (MoleculeCount::Infinite, Coupling::SingleMolecule(_)) = (s.count, s.coupling) {
            return Err(BasisError::CouplingUndefined { label: s.label.clone() });
        }
        if let MoleculeCount::Finite(0) = s.count {
            return Err(BasisError::NoMolecules { label: s.label.clone() });
        }
        if species[..i].iter().any(|t| t.label == s.label) {
            return Err(BasisError::DuplicateLabel { label: s.label.clone() });
        }
    }

    // Per-species occupation lists at that species' own budget.
    let per_species: Vec<Vec<Vec<(usize, usize)>>> = species
        .iter()
        .map(|s| {
            let pool = s.n_finite().unwrap_or(usize::MAX);
            species_occupations(s.vib.m_g(), kappa.min(pool))
        })
        .collect();

    let occs = combined_occupations(&per_species, kappa);

    let mut states: Vec<SymmetricState> = Vec::new();
    for occ in &occs {
        states.push(SymmetricState::Photonic { occ: occ.clone() });
    }
    for (j, s) in species.iter().enumerate() {
        for l in 0..s.vib.m_e() {
            for occ in &occs {
                // The excited molecule leaves N_j − 1 in the ground pool.
                if let Some(n) = s.n_finite() {
                    if occ.carriers_of(j) > n - 1 {
                        continue;
                    }
                }
                states.push(SymmetricState::Excitonic {
                    species: j,
                    level: l,
                    occ: occ.clone(),
                });
            }
        }
    }

    if states.len() > cap {
        return Err(BasisError::BasisTooLarge { dim: states.len(), cap });
    }

    states.sort();
    let index_of: HashMap<SymmetricState, usize> =
        states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

    Ok(SymmetricBasis { states, index_of, kappa, species: species.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{Array1, Array2};

    /// A synthetic species: harmonic-like level ladders and a bare overlap
    /// matrix (values are irrelevant to enumeration).
    fn test_species(label: &str, n: MoleculeCount, m_g: usize, m_e: usize) -> SpeciesSpec {
        let vib = VibrationalBasis::from_parts(
            Array1::from_iter((0..m_g).map(|k| 0.1 + 0.2 * k as f64)),
            Array1::from_iter((0..m_e).map(|l| 2.0 + 0.2 * l as f64)),
            Array2::from_elem((m_e, m_g), 0.1),
        );
        SpeciesSpec::new(label, n, Coupling::SingleMolecule(0.01), vib).unwrap()
    }

    fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        let mut acc = 1usize;
        for i in 0..k.min(n - k) {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn zero_order_single_species_is_one_plus_m() {
        // One photonic state plus one excitonic state per excited level.
        for m_e in [1usize, 3, 7] {
            let sp = test_species("a", MoleculeCount::Finite(12), 4, m_e);
            let basis = enumerate(&[sp], 0).unwrap();
            assert_eq!(basis.dim(), 1 + m_e);
            assert!(basis.states[0].is_photonic());
            for l in 0..m_e {
                assert_eq!(
                    basis.states[1 + l],
                    SymmetricState::Excitonic {
                        species: 0,
                        level: l,
                        occ: OccupationRecord::empty(1)
                    }
                );
            }
        }
    }

    #[test]
    fn first_order_two_level_species_has_four_states() {
        // m_g = 2, m_e = 1, κ = 1: photon × {no carrier, one carrier} plus
        // exciton × {no carrier, one carrier}.
        let sp = test_species("a", MoleculeCount::Finite(5), 2, 1);
        let basis = enumerate(&[sp], 1).unwrap();
        let empty = OccupationRecord::empty(1);
        let one = empty.with_added(0, 1);
        assert_eq!(
            basis.states,
            vec![
                SymmetricState::Photonic { occ: empty.clone() },
                SymmetricState::Photonic { occ: one.clone() },
                SymmetricState::Excitonic { species: 0, level: 0, occ: empty },
                SymmetricState::Excitonic { species: 0, level: 0, occ: one },
            ]
        );
    }

    #[test]
    fn dimension_matches_independent_count() {
        // Multisets of ≤ κ carriers over m_g − 1 levels, counted by the
        // closed form Σ_c C(c + m_g − 2, c), photonic and per excited level.
        for (m_g, m_e, kappa) in [(3usize, 3usize, 2usize), (4, 2, 3), (2, 5, 4)] {
            let sp = test_species("a", MoleculeCount::Finite(40), m_g, m_e);
            let basis = enumerate(&[sp], kappa).unwrap();
            let occs: usize = (0..=kappa).map(|c| binomial(c + m_g - 2, c)).sum();
            assert_eq!(basis.dim(), occs * (1 + m_e), "m_g={m_g} m_e={m_e} κ={kappa}");
        }
    }

    #[test]
    fn full_order_dimension_matches_closed_form() {
        // κ = N: C(N+m−1, N) photonic multisets plus m·C(N+m−2, N−1)
        // excitonic ones.
        for n in 1..=4usize {
            for m in 1..=4usize {
                let sp = test_species("a", MoleculeCount::Finite(n), m, m);
                let basis = enumerate(&[sp], n).unwrap();
                let expect = binomial(n + m - 1, n) + m * binomial(n + m - 2, n - 1);
                assert_eq!(basis.dim(), expect, "N={n} m={m}");
            }
        }
    }

    #[test]
    fn multiplicities_partition_the_product_space() {
        // Photonic multiplicities at κ = N must add up to mᴺ — every product
        // assignment of N molecules to m levels is counted exactly once.
        for n in 1..=4usize {
            for m in 1..=3usize {
                let sp = test_species("a", MoleculeCount::Finite(n), m, 1);
                let basis = enumerate(&[sp], n).unwrap();
                let total: f64 = basis
                    .states
                    .iter()
                    .filter(|s| s.is_photonic())
                    .map(|s| basis.renorm_factor(s).unwrap().powi(2))
                    .sum();
                let expect = (m as f64).powi(n as i32);
                assert!((total - expect).abs() < 1e-9, "N={n} m={m}: {total} vs {expect}");
            }
        }
    }

    #[test]
    fn renorm_factor_examples() {
        let n = 7usize;
        let sp = test_species("a", MoleculeCount::Finite(n), 4, 1);
        let basis = enumerate(&[sp], 2).unwrap();
        let empty = OccupationRecord::empty(1);
        let nf = n as f64;

        // No carriers → a single product configuration.
        let s0 = SymmetricState::Photonic { occ: empty.clone() };
        assert!((basis.renorm_factor(&s0).unwrap() - 1.0).abs() < 1e-12);

        // Distinct levels k ≠ k′ → √(N(N−1)).
        let s1 = SymmetricState::Photonic { occ: empty.with_added(0, 1).with_added(0, 2) };
        assert!(
            (basis.renorm_factor(&s1).unwrap() - (nf * (nf - 1.0)).sqrt()).abs() < 1e-12
        );

        // Same level twice → √(N(N−1)/2).
        let s2 = SymmetricState::Photonic { occ: empty.with_added(0, 1).with_added(0, 1) };
        assert!(
            (basis.renorm_factor(&s2).unwrap() - (nf * (nf - 1.0) / 2.0).sqrt()).abs() < 1e-12
        );

        // Excitonic, no carriers → √N distinct choices of the excited one.
        let s3 = SymmetricState::Excitonic { species: 0, level: 0, occ: empty.clone() };
        assert!((basis.renorm_factor(&s3).unwrap() - nf.sqrt()).abs() < 1e-12);

        // Excitonic with one carrier → √(N(N−1)).
        let s4 =
            SymmetricState::Excitonic { species: 0, level: 0, occ: empty.with_added(0, 1) };
        assert!(
            (basis.renorm_factor(&s4).unwrap() - (nf * (nf - 1.0)).sqrt()).abs() < 1e-12
        );
    }

    #[test]
    fn lower_order_basis_is_an_ordered_subset() {
        let sp_a = test_species("a", MoleculeCount::Finite(9), 3, 2);
        let sp_b = test_species("b", MoleculeCount::Finite(6), 2, 1);
        let full = enumerate(&[sp_a.clone(), sp_b.clone()], 3).unwrap();
        for kappa in 0..=2usize {
            let small = enumerate(&[sp_a.clone(), sp_b.clone()], kappa).unwrap();
            let filtered: Vec<_> = full
                .states
                .iter()
                .filter(|s| s.carriers() <= kappa)
                .cloned()
                .collect();
            assert_eq!(small.states, filtered, "κ = {kappa}");
        }
    }

    #[test]
    fn enumeration_is_deterministic_and_indexed() {
        let sp_a = test_species("a", MoleculeCount::Finite(9), 3, 2);
        let sp_b = test_species("b", MoleculeCount::Finite(6), 2, 2);
        let one = enumerate(&[sp_a.clone(), sp_b.clone()], 2).unwrap();
        let two = enumerate(&[sp_a, sp_b], 2).unwrap();
        assert_eq!(one.states, two.states);
        let mut sorted = one.states.clone();
        sorted.sort();
        assert_eq!(one.states, sorted, "canonical order is sorted order");
        for (i, s) in one.states.iter().enumerate() {
            assert_eq!(one.index(s), Some(i));
        }
    }

    #[test]
    fn small_pool_restricts_carriers() {
        // A single molecule: the photonic state can carry it as a phonon
        // carrier, but the excitonic state has an empty ground pool.
        let sp = test_species("a", MoleculeCount::Finite(1), 2, 1);
        let basis = enumerate(&[sp], 3).unwrap();
        let empty = OccupationRecord::empty(1);
        assert_eq!(
            basis.states,
            vec![
                SymmetricState::Photonic { occ: empty.clone() },
                SymmetricState::Photonic { occ: empty.with_added(0, 1) },
                SymmetricState::Excitonic { species: 0, level: 0, occ: empty },
            ]
        );
    }

    #[test]
    fn infinite_mode_ignores_pool_bounds_but_keeps_budget() {
        let vib = VibrationalBasis::from_parts(
            Array1::from_vec(vec![0.1, 0.3, 0.5]),
            Array1::from_vec(vec![2.0]),
            Array2::from_elem((1, 3), 0.1),
        );
        let sp = SpeciesSpec::new("a", MoleculeCount::Infinite, Coupling::Collective(0.1), vib)
            .unwrap();
        let basis = enumerate(&[sp], 2).unwrap();
        // Occupations over 2 levels with ≤ 2 carriers: {}, {1}, {2}, {11},
        // {12}, {22} → 6, photonic + 1 excitonic level.
        assert_eq!(basis.dim(), 12);
        let s = &basis.states[0];
        assert!(matches!(
            basis.renorm_factor(s),
            Err(BasisError::InfiniteCount { .. })
        ));
    }

    #[test]
    fn coupling_conversions() {
        let sp = test_species("a", MoleculeCount::Finite(16), 2, 1);
        assert!((sp.collective_g() - 0.01 * 4.0).abs() < 1e-15);
        assert!((sp.single_g() - 0.01).abs() < 1e-15);
        let vib = sp.vib.clone();
        let spc =
            SpeciesSpec::new("b", MoleculeCount::Finite(16), Coupling::Collective(0.2), vib)
                .unwrap();
        assert!((spc.single_g() - 0.05).abs() < 1e-15);
        assert!((spc.collective_g() - 0.2).abs() < 1e-15);
        assert!((spc.depletion(0) - 1.0).abs() < 1e-15);
        assert!((spc.depletion(7) - (9.0f64 / 16.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let vib = VibrationalBasis::from_parts(
            Array1::from_vec(vec![0.1]),
            Array1::from_vec(vec![2.0]),
            Array2::from_elem((1, 1), 1.0),
        );
        assert!(matches!(
            SpeciesSpec::new(
                "a",
                MoleculeCount::Infinite,
                Coupling::SingleMolecule(0.1),
                vib.clone()
            ),
            Err(BasisError::CouplingUndefined { .. })
        ));
        assert!(matches!(
            SpeciesSpec::new(
                "a",
                MoleculeCount::Finite(0),
                Coupling::SingleMolecule(0.1),
                vib.clone()
            ),
            Err(BasisError::NoMolecules { .. })
        ));
        let a = SpeciesSpec::new(
            "same",
            MoleculeCount::Finite(2),
            Coupling::SingleMolecule(0.1),
            vib.clone(),
        )
        .unwrap();
        let b = SpeciesSpec::new(
            "same",
            MoleculeCount::Finite(3),
            Coupling::SingleMolecule(0.1),
            vib,
        )
        .unwrap();
        assert!(matches!(
            enumerate(&[a, b], 0),
            Err(BasisError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let sp = test_species("a", MoleculeCount::Finite(5), 2, 1);
        assert!(matches!(
            enumerate_with_cap(&[sp], 1, 3),
            Err(BasisError::BasisTooLarge { dim: 4, cap: 3 })
        ));
    }

    #[test]
    fn occupation_algebra_roundtrips() {
        let empty = OccupationRecord::empty(2);
        let occ = empty.with_added(0, 2).with_added(1, 1).with_added(0, 2);
        assert_eq!(occ.count_at(0, 2), 2);
        assert_eq!(occ.count_at(1, 1), 1);
        assert_eq!(occ.count_at(0, 1), 0);
        assert_eq!(occ.total_carriers(), 3);
        assert_eq!(occ.carriers_of(0), 2);
        let back = occ
            .with_removed(0, 2)
            .and_then(|o| o.with_removed(0, 2))
            .and_then(|o| o.with_removed(1, 1))
            .unwrap();
        assert_eq!(back, empty);
        assert!(occ.with_removed(1, 3).is_none());
    }
}
