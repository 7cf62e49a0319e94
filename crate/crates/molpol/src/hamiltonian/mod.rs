//! Assembly and diagonalization of the coupled cavity–ensemble Hamiltonian.
//!
//! The matrix is built over a [`SymmetricBasis`] from a single rule. Diagonal
//! entries are state energies with the zero fixed at "every molecule in its
//! vibrational ground state, cavity empty" (the extensive constant N·E_g0 is
//! dropped). Off-diagonal entries connect an excitonic state to the photonic
//! states reached by de-exciting its excited molecule into some ground level
//! k, with amplitude g_j·√(N_k)·F_j[l][k], where N_k counts the molecules of
//! that species in level k *in the photonic state*. For k = 0 that count is
//! the macroscopic pool and the amplitude is collective (g√(N−c) for c
//! carriers); for k ≥ 1 it is at most the truncation order. No other couplings
//! exist in the first excitation manifold.
//!
//! All entries are real, so Hermitian means symmetric here.

pub mod vibronic;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::basis::{MoleculeCount, SymmetricBasis, SymmetricState};
use crate::error::HamiltonianError;
use crate::linalg::{eigh_checked, CsrMatrix, MatrixStorage, SymEigen, SPARSE_THRESHOLD};

/// Largest dimension routed to the dense eigensolver.
pub const DENSE_EIG_CAP: usize = 4000;

/// The cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    /// Mode energy ω_c (eV).
    pub omega_c: f64,
}

/// A Hermitian Hamiltonian over a symmetric basis.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub storage: MatrixStorage,
    /// Fingerprint of the basis the matrix was assembled over.
    pub basis_fingerprint: u64,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.storage.dim()
    }

    /// Guard that `basis` is the one this matrix was built over.
    pub fn check_basis(&self, basis: &SymmetricBasis) -> Result<(), HamiltonianError> {
        if basis.fingerprint() != self.basis_fingerprint {
            return Err(HamiltonianError::BasisMismatch);
        }
        Ok(())
    }

    /// Full eigendecomposition (dense path; sparse matrices are densified up
    /// to [`DENSE_EIG_CAP`]).
    pub fn diagonalize(&self) -> Result<EigenSystem, HamiltonianError> {
        let eig = match &self.storage {
            MatrixStorage::Dense(a) => eigh_checked(a, 1e-10)?,
            MatrixStorage::Sparse(csr) => {
                if csr.dim > DENSE_EIG_CAP {
                    return Err(HamiltonianError::NonConverged(format!(
                        "dimension {} exceeds the dense eigensolver cap {}; \
                         use the iterative spectral path",
                        csr.dim, DENSE_EIG_CAP
                    )));
                }
                eigh_checked(&csr.to_dense(), 1e-10)?
            }
        };
        Ok(EigenSystem { eig, basis_fingerprint: self.basis_fingerprint })
    }
}

/// Ascending eigenvalues and orthonormal eigenvectors of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eig: SymEigen,
    pub basis_fingerprint: u64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eig.values.len()
    }
}

/// Energy of one basis state above the all-ground zero.
pub fn state_energy(
    basis: &SymmetricBasis,
    state: &SymmetricState,
    cavity: &CavitySpec,
) -> f64 {
    let occ = state.occ();
    let mut e = match state {
        SymmetricState::Photonic { .. } => cavity.omega_c,
        SymmetricState::Excitonic { species, level, .. } => {
            basis.species[*species].vib.excitation_energy(*level)
        }
    };
    for (j, spec) in basis.species.iter().enumerate() {
        for &(k, count) in &occ.levels[j] {
            e += count as f64 * spec.vib.ground_gap(k);
        }
    }
    e
}

/// Assemble the Hamiltonian over `basis`. Storage is dense up to
/// [`SPARSE_THRESHOLD`] and compressed-sparse beyond it.
pub fn build(
    basis: &SymmetricBasis,
    cavity: &CavitySpec,
) -> Result<HamiltonianMatrix, HamiltonianError> {
    if !(cavity.omega_c > 0.0) {
        return Err(HamiltonianError::InvalidCavity { omega_c: cavity.omega_c });
    }
    for s in &basis.species {
        let (rows, cols) = s.vib.fc.dim();
        if rows != s.vib.m_e() || cols != s.vib.m_g() {
            return Err(HamiltonianError::MissingOverlap {
                species: s.label.clone(),
                rows,
                cols,
                m_e: s.vib.m_e(),
                m_g: s.vib.m_g(),
            });
        }
    }

    let dim = basis.dim();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (i, state) in basis.states.iter().enumerate() {
        triplets.push((i, i, state_energy(basis, state, cavity)));

        let SymmetricState::Excitonic { species: j, level: l, occ } = state else {
            continue;
        };
        let spec = &basis.species[*j];
        let fc = &spec.vib.fc;

        // De-excitation into the vibrational ground pool: photonic partner
        // with the same occupation, collective amplitude.
        let vac_partner = SymmetricState::Photonic { occ: occ.clone() };
        if let Some(p) = basis.index(&vac_partner) {
            let amp = match spec.count {
                MoleculeCount::Finite(n) => {
                    spec.single_g() * ((n - occ.carriers_of(*j)) as f64).sqrt()
                }
                MoleculeCount::Infinite => spec.collective_g(),
            } * fc[[*l, 0]];
            if amp != 0.0 {
                triplets.push((i, p, amp));
                triplets.push((p, i, amp));
            }
        }

        // De-excitation into an excited ground level k ≥ 1: the photonic
        // partner gains a carrier; the amplitude scales with the carrier
        // count in the partner.
        for k in 1..spec.vib.m_g() {
            let occ_p = occ.with_added(*j, k);
            let partner = SymmetricState::Photonic { occ: occ_p };
            let Some(p) = basis.index(&partner) else { continue };
            let n_k = partner.occ().count_at(*j, k);
            let amp = spec.single_g() * (n_k as f64).sqrt() * fc[[*l, k]];
            if amp != 0.0 {
                triplets.push((i, p, amp));
                triplets.push((p, i, amp));
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

    Ok(HamiltonianMatrix { storage, basis_fingerprint: basis.fingerprint() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate, Coupling, OccupationRecord, SpeciesSpec};
    use crate::vib::VibrationalBasis;
    use ndarray::{array, Array1};
    use proptest::prelude::*;

    fn species_with_fc(
        label: &str,
        n: MoleculeCount,
        coupling: Coupling,
        ground: Vec<f64>,
        excited: Vec<f64>,
        fc: Array2<f64>,
    ) -> SpeciesSpec {
        let vib = VibrationalBasis::from_parts(
            Array1::from_vec(ground),
            Array1::from_vec(excited),
            fc,
        );
        SpeciesSpec::new(label, n, coupling, vib).unwrap()
    }

    /// Single species, no carriers allowed: the matrix is the arrowhead with
    /// photon on the tip, collective couplings g√N·F[l][0] along the first
    /// row, and the vertical excitation energies on the diagonal.
    #[test]
    fn zero_order_arrowhead_matrix() {
        let n = 9usize;
        let g = 0.013;
        let fc = array![[0.8, 0.1], [0.5, 0.2], [-0.33, 0.6]];
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(n),
            Coupling::SingleMolecule(g),
            vec![0.0, 0.2],
            vec![2.0, 2.2, 2.4],
            fc.clone(),
        );
        let basis = enumerate(&[sp], 0).unwrap();
        let cavity = CavitySpec { omega_c: 2.1 };
        let h = build(&basis, &cavity).unwrap().storage.to_dense();

        assert_eq!(h.dim(), (4, 4));
        let root_n = (n as f64).sqrt();
        for l in 0..3usize {
            assert!((h[[0, 1 + l]] - g * root_n * fc[[l, 0]]).abs() < 1e-15);
            assert!((h[[1 + l, 1 + l]] - (2.0 + 0.2 * l as f64)).abs() < 1e-15);
        }
        assert!((h[[0, 0]] - 2.1).abs() < 1e-15);
        // No exciton-exciton couplings.
        for a in 1..4 {
            for b in 1..4 {
                if a != b {
                    assert_eq!(h[[a, b]], 0.0);
                }
            }
        }
    }

    /// One species, two ground levels, one excited level, one carrier
    /// allowed: the 4×4 with the collective √N and √(N−1) elements and the
    /// single-molecule carrier-changing element g·F[0][1].
    #[test]
    fn first_order_four_by_four_matrix() {
        let n = 7usize;
        let g = 0.02;
        let omega_v = 0.2; // ground vibrational gap
        let fc = array![[0.9, -0.4]];
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(n),
            Coupling::SingleMolecule(g),
            vec![0.0, omega_v],
            vec![2.0],
            fc.clone(),
        );
        let basis = enumerate(&[sp], 1).unwrap();
        let cavity = CavitySpec { omega_c: 2.05 };
        let h = build(&basis, &cavity).unwrap().storage.to_dense();

        // Canonical order: P{}, P{carrier}, X{}, X{carrier}.
        let empty = OccupationRecord::empty(1);
        let one = empty.with_added(0, 1);
        assert_eq!(basis.index(&SymmetricState::Photonic { occ: empty.clone() }), Some(0));
        assert_eq!(basis.index(&SymmetricState::Photonic { occ: one.clone() }), Some(1));
        assert_eq!(
            basis.index(&SymmetricState::Excitonic { species: 0, level: 0, occ: empty }),
            Some(2)
        );
        assert_eq!(
            basis.index(&SymmetricState::Excitonic { species: 0, level: 0, occ: one }),
            Some(3)
        );

        let nf = n as f64;
        let expect = array![
            [2.05, 0.0, g * nf.sqrt() * fc[[0, 0]], 0.0],
            [0.0, 2.05 + omega_v, g * fc[[0, 1]], g * (nf - 1.0).sqrt() * fc[[0, 0]]],
            [g * nf.sqrt() * fc[[0, 0]], g * fc[[0, 1]], 2.0, 0.0],
            [0.0, g * (nf - 1.0).sqrt() * fc[[0, 0]], 0.0, 2.0 + omega_v],
        ];
        for a in 0..4 {
            for b in 0..4 {
                assert!(
                    (h[[a, b]] - expect[[a, b]]).abs() < 1e-15,
                    "H[{a}][{b}] = {} vs {}",
                    h[[a, b]],
                    expect[[a, b]]
                );
            }
        }
    }

    /// Two species at zeroth order: the photon row couples to each species
    /// with its own collective strength; the species blocks never mix.
    #[test]
    fn two_species_zero_order_block_structure() {
        let fca = array![[0.7], [0.6]];
        let fcb = array![[0.9], [0.3]];
        let sa = species_with_fc(
            "a",
            MoleculeCount::Finite(16),
            Coupling::Collective(0.08),
            vec![0.0],
            vec![2.0, 2.3],
            fca.clone(),
        );
        let sb = species_with_fc(
            "b",
            MoleculeCount::Finite(25),
            Coupling::Collective(0.05),
            vec![0.0],
            vec![1.9, 2.15],
            fcb.clone(),
        );
        let basis = enumerate(&[sa, sb], 0).unwrap();
        let h = build(&basis, &CavitySpec { omega_c: 2.1 }).unwrap().storage.to_dense();

        assert_eq!(basis.dim(), 5);
        // Order: photon, species-0 excitons (l = 0, 1), species-1 excitons.
        for l in 0..2usize {
            assert!((h[[0, 1 + l]] - 0.08 * fca[[l, 0]]).abs() < 1e-15);
            assert!((h[[0, 3 + l]] - 0.05 * fcb[[l, 0]]).abs() < 1e-15);
        }
        for a in 1..3 {
            for b in 3..5 {
                assert_eq!(h[[a, b]], 0.0, "species blocks must not mix");
            }
        }
    }

    /// Two molecules parked in the same carrier level produce the √2
    /// enhancement on the carrier-changing element.
    #[test]
    fn double_carrier_level_gives_sqrt_two() {
        let g = 0.02;
        let fc = array![[0.9, -0.4]];
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(6),
            Coupling::SingleMolecule(g),
            vec![0.0, 0.2],
            vec![2.0],
            fc.clone(),
        );
        let basis = enumerate(&[sp], 2).unwrap();
        let h = build(&basis, &CavitySpec { omega_c: 2.0 }).unwrap().storage.to_dense();

        let empty = OccupationRecord::empty(1);
        let two = empty.with_added(0, 1).with_added(0, 1);
        let one = empty.with_added(0, 1);
        let p2 = basis.index(&SymmetricState::Photonic { occ: two }).unwrap();
        let x1 = basis
            .index(&SymmetricState::Excitonic { species: 0, level: 0, occ: one })
            .unwrap();
        assert!((h[[p2, x1]] - g * 2.0f64.sqrt() * fc[[0, 1]]).abs() < 1e-15);
    }

    /// Restricting the κ matrix to the κ−1 states reproduces the κ−1 matrix
    /// entry for entry.
    #[test]
    fn truncation_is_a_principal_submatrix() {
        let fc = array![[0.8, 0.3, 0.1], [0.4, -0.5, 0.2]];
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(5),
            Coupling::SingleMolecule(0.03),
            vec![0.0, 0.19, 0.37],
            vec![2.0, 2.21],
            fc,
        );
        let cavity = CavitySpec { omega_c: 2.1 };
        let big_basis = enumerate(&[sp.clone()], 2).unwrap();
        let small_basis = enumerate(&[sp], 1).unwrap();
        let big = build(&big_basis, &cavity).unwrap().storage.to_dense();
        let small = build(&small_basis, &cavity).unwrap().storage.to_dense();

        for (a, sa) in small_basis.states.iter().enumerate() {
            let ba = big_basis.index(sa).unwrap();
            for (b, sb) in small_basis.states.iter().enumerate() {
                let bb = big_basis.index(sb).unwrap();
                assert_eq!(small[[a, b]], big[[ba, bb]]);
            }
        }
    }

    /// With unit overlaps everywhere, every off-diagonal element is g times
    /// either a collective factor √(N−c) (carrier-conserving) or a carrier
    /// factor √(N_k ≤ κ) (carrier-changing) — verified from occupation deltas
    /// alone.
    #[test]
    fn coupling_factors_follow_carrier_delta() {
        let n = 6usize;
        let g = 1.0;
        let kappa = 2usize;
        let fc = Array2::from_elem((2, 3), 1.0);
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(n),
            Coupling::SingleMolecule(g),
            vec![0.0, 0.2, 0.4],
            vec![2.0, 2.2],
            fc,
        );
        let basis = enumerate(&[sp], kappa).unwrap();
        let h = build(&basis, &CavitySpec { omega_c: 2.1 }).unwrap().storage.to_dense();

        let mut seen_collective = 0usize;
        let mut seen_carrier = 0usize;
        for a in 0..basis.dim() {
            for b in 0..basis.dim() {
                if a == b || h[[a, b]] == 0.0 {
                    continue;
                }
                let (pa, pb) = (&basis.states[a], &basis.states[b]);
                let delta = pa.carriers() as i64 - pb.carriers() as i64;
                let v = h[[a, b]].abs();
                if delta == 0 {
                    // Collective: √N, √(N−1), … √(N−κ).
                    let ok = (0..=kappa)
                        .any(|c| (v - ((n - c) as f64).sqrt()).abs() < 1e-12);
                    assert!(ok, "collective element {v} not of form √(N−c)");
                    seen_collective += 1;
                } else {
                    assert_eq!(delta.abs(), 1, "couplings move exactly one carrier");
                    let ok =
                        (1..=kappa).any(|c| (v - (c as f64).sqrt()).abs() < 1e-12);
                    assert!(ok, "carrier element {v} not of form √(N_k ≤ κ)");
                    seen_carrier += 1;
                }
            }
        }
        assert!(seen_collective > 0 && seen_carrier > 0);
    }

    #[test]
    fn diagonalize_two_by_two_resonant_block() {
        let fc = array![[1.0]];
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(4),
            Coupling::Collective(0.1),
            vec![0.0],
            vec![2.0],
            fc,
        );
        let basis = enumerate(&[sp], 0).unwrap();
        let h = build(&basis, &CavitySpec { omega_c: 2.0 }).unwrap();
        let eig = h.diagonalize().unwrap();
        assert!((eig.eig.values[0] - 1.9).abs() < 1e-12);
        assert!((eig.eig.values[1] - 2.1).abs() < 1e-12);
    }

    /// Identity overlaps couple the photon to a single excited level; the
    /// rest of the arrowhead decouples analytically.
    #[test]
    fn arrowhead_with_identity_overlap_reduces_to_rabi_pair() {
        let m = 4usize;
        let g = 0.05;
        let n = 9usize;
        let fc = Array2::eye(m);
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(n),
            Coupling::SingleMolecule(g),
            (0..m).map(|k| 0.2 * k as f64).collect(),
            (0..m).map(|l| 2.0 + 0.2 * l as f64).collect(),
            fc,
        );
        let basis = enumerate(&[sp], 0).unwrap();
        let h = build(&basis, &CavitySpec { omega_c: 2.0 }).unwrap();
        let eig = h.diagonalize().unwrap();

        let split = g * (n as f64).sqrt();
        let mut expect: Vec<f64> = vec![2.0 - split, 2.0 + split];
        for l in 1..m {
            expect.push(2.0 + 0.2 * l as f64);
        }
        expect.sort_by(f64::total_cmp);
        for (got, want) in eig.eig.values.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn eigensystem_reconstructs_matrix() {
        let fc = array![[0.8, 0.3], [0.4, -0.5]];
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(5),
            Coupling::SingleMolecule(0.03),
            vec![0.0, 0.19],
            vec![2.0, 2.21],
            fc,
        );
        let basis = enumerate(&[sp], 2).unwrap();
        let h = build(&basis, &CavitySpec { omega_c: 2.1 }).unwrap();
        let dense = h.storage.to_dense();
        let eig = h.diagonalize().unwrap();
        let v = &eig.eig.vectors;
        let lam = Array2::from_diag(&eig.eig.values);
        let rebuilt = v.dot(&lam).dot(&v.t());
        let scale = dense.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let err = (&rebuilt - &dense).iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        assert!(err < 1e-9 * scale.max(1.0), "reconstruction error {err}");

        // Orthonormality.
        let gram = v.t().dot(v);
        for a in 0..gram.dim().0 {
            for b in 0..gram.dim().1 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((gram[[a, b]] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let fc = array![[1.0]];
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(4),
            Coupling::Collective(0.1),
            vec![0.0],
            vec![2.0],
            fc,
        );
        let basis = enumerate(&[sp], 0).unwrap();
        assert!(matches!(
            build(&basis, &CavitySpec { omega_c: 0.0 }),
            Err(HamiltonianError::InvalidCavity { .. })
        ));

        // Overlap matrix with the wrong shape.
        let bad = VibrationalBasis::from_parts(
            Array1::from_vec(vec![0.0, 0.2]),
            Array1::from_vec(vec![2.0]),
            Array2::from_elem((1, 1), 1.0), // should be 1×2
        );
        let sp_bad = SpeciesSpec::new(
            "b",
            MoleculeCount::Finite(3),
            Coupling::SingleMolecule(0.1),
            bad,
        )
        .unwrap();
        let basis_bad = enumerate(&[sp_bad], 0).unwrap();
        assert!(matches!(
            build(&basis_bad, &CavitySpec { omega_c: 2.0 }),
            Err(HamiltonianError::MissingOverlap { .. })
        ));
    }

    #[test]
    fn mismatched_basis_is_detected() {
        let fc = array![[1.0]];
        let sp = species_with_fc(
            "a",
            MoleculeCount::Finite(4),
            Coupling::Collective(0.1),
            vec![0.0],
            vec![2.0],
            fc,
        );
        let b0 = enumerate(&[sp.clone()], 0).unwrap();
        let b1 = enumerate(&[sp], 1).unwrap();
        let h = build(&b0, &CavitySpec { omega_c: 2.0 }).unwrap();
        assert!(h.check_basis(&b0).is_ok());
        assert!(matches!(h.check_basis(&b1), Err(HamiltonianError::BasisMismatch)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Every assembled matrix is symmetric with finite entries,
        /// regardless of species shapes, counts, and overlap values.
        #[test]
        fn assembled_matrices_are_hermitian(
            n in 1usize..7,
            m_g in 1usize..4,
            m_e in 1usize..4,
            kappa in 0usize..3,
            g in 0.001f64..0.2,
            seed in 0u64..1000,
        ) {
            // Cheap deterministic pseudo-random overlaps in [−1, 1].
            let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let mut next = move || {
                x ^= x >> 33;
                x = x.wrapping_mul(0xff51afd7ed558ccd);
                x ^= x >> 33;
                (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            };
            let fc = Array2::from_shape_fn((m_e, m_g), |_| next());
            let sp = species_with_fc(
                "a",
                MoleculeCount::Finite(n),
                Coupling::SingleMolecule(g),
                (0..m_g).map(|k| 0.2 * k as f64).collect(),
                (0..m_e).map(|l| 2.0 + 0.2 * l as f64).collect(),
                fc,
            );
            let basis = enumerate(&[sp], kappa).unwrap();
            let h = build(&basis, &CavitySpec { omega_c: 2.1 }).unwrap().storage.to_dense();
            let scale = h.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            for a in 0..basis.dim() {
                for b in 0..basis.dim() {
                    prop_assert!(h[[a, b]].is_finite());
                    prop_assert!((h[[a, b]] - h[[b, a]]).abs() <= 1e-12 * scale);
                }
            }
        }
    }
}
