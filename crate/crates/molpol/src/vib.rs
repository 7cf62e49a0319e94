//! Single-molecule vibrational eigenstructure on a uniform coordinate grid.
//!
//! Both electronic surfaces of a species are solved with a sinc-style grid
//! representation of the kinetic operator (uniform-grid DVR): the kinetic
//! matrix is analytic, the potential is diagonal, and eigenfunctions come out
//! as grid vectors normalized so that Σᵢ u(qᵢ)² = 1. In that normalization a
//! matrix element ⟨f|Â|g⟩ of any multiplicative operator is the plain grid
//! sum Σᵢ f(qᵢ) A(qᵢ) g(qᵢ), which is how the overlap and position matrices
//! below are evaluated.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::constants::HBAR2_OVER_AMU_ANG2_EV;
use crate::error::VibError;
use crate::linalg::eigh_checked;

/// Fraction of grid points at each edge counted as the boundary region by the
/// coarseness diagnostic (5% of the grid in total).
const EDGE_FRACTION: f64 = 0.025;
/// Largest boundary-region norm fraction a bound eigenfunction may carry.
const EDGE_NORM_LIMIT: f64 = 1e-2;

/// Uniform coordinate grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_points: usize,
    pub q_min: f64,
    pub q_max: f64,
}

impl Grid {
    pub fn new(n_points: usize, q_min: f64, q_max: f64) -> Result<Self, VibError> {
        if n_points < 16 {
            return Err(VibError::GridTooSmall { min: 16, got: n_points });
        }
        if !(q_max > q_min) {
            return Err(VibError::BadExtent { q_min, q_max });
        }
        Ok(Grid { n_points, q_min, q_max })
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points as f64 - 1.0)
    }

    pub fn points(&self) -> Array1<f64> {
        let dq = self.spacing();
        Array1::from_iter((0..self.n_points).map(|i| self.q_min + dq * i as f64))
    }
}

/// Coordinate/mass conventions for one species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum UnitMode {
    /// Mass-weighted dimensionless units, ħ = μ = 1. A harmonic surface of
    /// frequency ω (eV) is ω²q²/2 and the kinetic operator is −(1/2)∂².
    Natural,
    /// Coordinates in Å, reduced mass in amu, energies in eV.
    Physical { mass_amu: f64 },
}

impl UnitMode {
    /// ħ²/(2μ) in the grid's units: multiplies −∂²/∂q².
    pub fn inverse_inertia(&self) -> Result<f64, VibError> {
        match *self {
            UnitMode::Natural => Ok(0.5),
            UnitMode::Physical { mass_amu } => {
                if mass_amu <= 0.0 {
                    return Err(VibError::BadMass(mass_amu));
                }
                Ok(HBAR2_OVER_AMU_ANG2_EV / (2.0 * mass_amu))
            }
        }
    }

    /// Harmonic force prefactor: V = harmonic_prefactor(ω)·q², so that the
    /// level spacing is exactly ω (eV) in either mode.
    pub fn harmonic_prefactor(&self, omega: f64) -> Result<f64, VibError> {
        match *self {
            UnitMode::Natural => Ok(0.5 * omega * omega),
            UnitMode::Physical { mass_amu } => {
                if mass_amu <= 0.0 {
                    return Err(VibError::BadMass(mass_amu));
                }
                // V = μω²q²/2 with ω = E/ħ: μ m E² q² / (2 ħ²)
                Ok(mass_amu * omega * omega / (2.0 * HBAR2_OVER_AMU_ANG2_EV))
            }
        }
    }

    /// Displacement that produces a Huang-Rhys factor S for frequency ω.
    pub fn displacement_for_huang_rhys(&self, omega: f64, s: f64) -> Result<f64, VibError> {
        // S = (harmonic prefactor)·d²/ω in both modes:
        // natural S = ω d²/2, physical S = μ ω d²/(2ħ²).
        let pref = self.harmonic_prefactor(omega)?;
        Ok((s * omega / pref).sqrt())
    }

    /// Huang-Rhys factor of a displacement d at frequency ω (inverse of the
    /// above).
    pub fn huang_rhys_of_displacement(&self, omega: f64, d: f64) -> Result<f64, VibError> {
        let pref = self.harmonic_prefactor(omega)?;
        Ok(pref * d * d / omega)
    }
}

/// Analytic one-dimensional potential shapes, evaluated on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// ω²q²/2 (natural) or μω²q²/2 (physical); minimum at q = 0, energy 0.
    Harmonic { omega: f64 },
    /// Harmonic well of the same curvature convention, minimum shifted to
    /// `displacement` and lifted by `offset`.
    DisplacedHarmonic { omega: f64, displacement: f64, offset: f64 },
    /// Displaced harmonic parametrized by its Huang-Rhys factor instead of
    /// the displacement.
    HuangRhysHarmonic { omega: f64, huang_rhys: f64, offset: f64 },
    /// Repulsive wall decaying to `offset`: exp(−a (q − shift)) + offset.
    Exponential { steepness: f64, shift: f64, offset: f64 },
    /// Repulsive wall plus a Gaussian barrier:
    /// exp(−a (q − shift)) + height·exp(−width (q − center)²) + offset.
    ExponentialWithBump {
        steepness: f64,
        shift: f64,
        height: f64,
        width: f64,
        center: f64,
        offset: f64,
    },
    /// Values sampled on the grid (must match its point count).
    Tabulated { values: Vec<f64> },
}

impl PotentialSpec {
    pub fn evaluate(&self, grid: &Grid, mode: &UnitMode) -> Result<Array1<f64>, VibError> {
        let q = grid.points();
        match self {
            PotentialSpec::Harmonic { omega } => {
                let k = mode.harmonic_prefactor(*omega)?;
                Ok(q.mapv(|x| k * x * x))
            }
            PotentialSpec::DisplacedHarmonic { omega, displacement, offset } => {
                let k = mode.harmonic_prefactor(*omega)?;
                Ok(q.mapv(|x| k * (x - displacement) * (x - displacement) + offset))
            }
            PotentialSpec::HuangRhysHarmonic { omega, huang_rhys, offset } => {
                let d = mode.displacement_for_huang_rhys(*omega, *huang_rhys)?;
                let k = mode.harmonic_prefactor(*omega)?;
                Ok(q.mapv(|x| k * (x - d) * (x - d) + offset))
            }
            PotentialSpec::Exponential { steepness, shift, offset } => {
                Ok(q.mapv(|x| (-steepness * (x - shift)).exp() + offset))
            }
            PotentialSpec::ExponentialWithBump {
                steepness,
                shift,
                height,
                width,
                center,
                offset,
            } => Ok(q.mapv(|x| {
                (-steepness * (x - shift)).exp()
                    + height * (-width * (x - center) * (x - center)).exp()
                    + offset
            })),
            PotentialSpec::Tabulated { values } => {
                if values.len() != grid.n_points {
                    return Err(VibError::TabulatedLengthMismatch {
                        expected: grid.n_points,
                        got: values.len(),
                    });
                }
                Ok(Array1::from_vec(values.clone()))
            }
        }
    }
}

/// Eigenpairs of one electronic surface on its grid.
#[derive(Debug, Clone)]
pub struct SurfaceLevels {
    pub grid: Grid,
    pub unit_mode: UnitMode,
    pub potential: PotentialSpec,
    /// Ascending eigenenergies, length m.
    pub energies: Array1<f64>,
    /// Columns are eigenfunctions as grid vectors with Σᵢ u(qᵢ)² = 1; the
    /// sign convention fixes the largest-magnitude component positive.
    pub functions: Array2<f64>,
}

impl SurfaceLevels {
    pub fn m(&self) -> usize {
        self.energies.len()
    }

    /// ⟨u_a | q | u_b⟩ over the grid.
    pub fn position_element(&self, a: usize, b: usize) -> f64 {
        let q = self.grid.points();
        let mut acc = 0.0;
        for i in 0..self.grid.n_points {
            acc += self.functions[[i, a]] * q[i] * self.functions[[i, b]];
        }
        acc
    }

    /// Full position matrix ⟨u_a| q |u_b⟩.
    pub fn position_matrix(&self) -> Array2<f64> {
        let m = self.m();
        let q = self.grid.points();
        let mut out = Array2::zeros((m, m));
        for a in 0..m {
            for b in a..m {
                let mut acc = 0.0;
                for i in 0..self.grid.n_points {
                    acc += self.functions[[i, a]] * q[i] * self.functions[[i, b]];
                }
                out[[a, b]] = acc;
                out[[b, a]] = acc;
            }
        }
        out
    }
}

/// Build the uniform-grid kinetic matrix: prefactor · Kᵢⱼ with
/// Kᵢᵢ = π²/3 and Kᵢⱼ = 2(−1)^(i−j)/(i−j)² divided by Δq².
fn kinetic_matrix(grid: &Grid, mode: &UnitMode) -> Result<Array2<f64>, VibError> {
    let n = grid.n_points;
    let dq = grid.spacing();
    let pref = mode.inverse_inertia()? / (dq * dq);
    let mut t = Array2::zeros((n, n));
    for i in 0..n {
        t[[i, i]] = pref * std::f64::consts::PI * std::f64::consts::PI / 3.0;
        for j in 0..i {
            let d = (i - j) as f64;
            let sign = if (i - j) % 2 == 0 { 1.0 } else { -1.0 };
            let v = pref * 2.0 * sign / (d * d);
            t[[i, j]] = v;
            t[[j, i]] = v;
        }
    }
    Ok(t)
}

/// Solve one surface on the grid, retaining the lowest `m` eigenpairs.
///
/// The boundary diagnostic rejects the solve when a retained eigenfunction
/// that is energetically bound at both grid edges (E below the edge potential
/// on each side) still keeps more than 1% of its norm in the outer 5% of the
/// grid — the signature of a box that is too short or too coarse. States above
/// an edge potential are box-discretized continuum states and legitimately
/// reach the boundary, so they are exempt.
pub fn solve_dvr(
    grid: &Grid,
    potential: &PotentialSpec,
    mode: &UnitMode,
    m: usize,
) -> Result<SurfaceLevels, VibError> {
    let n = grid.n_points;
    if m > n {
        return Err(VibError::TooManyStates { requested: m, available: n });
    }
    let v = potential.evaluate(grid, mode)?;
    let mut h = kinetic_matrix(grid, mode)?;
    for i in 0..n {
        h[[i, i]] += v[i];
    }
    let eig = eigh_checked(&h, 1e-10)
        .map_err(|e| VibError::NonConvergedEigensolve(e.to_string()))?;

    let mut energies = Array1::zeros(m);
    let mut functions = Array2::zeros((n, m));
    for k in 0..m {
        energies[k] = eig.values[k];
        // Sign fix: first component reaching half the peak magnitude is made
        // positive. (Peak-based rules are unstable for odd eigenfunctions
        // whose two extrema agree to roundoff; the half-max crossing lands
        // inside a lobe, where neighbors share a sign.)
        let col = eig.vectors.column(k);
        let peak = col.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let anchor = (0..n).find(|&i| col[i].abs() >= 0.5 * peak).unwrap_or(0);
        let sign = if col[anchor] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            functions[[i, k]] = sign * col[i];
        }
    }

    // Boundary-region diagnostic for bound states.
    let edge = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    let bound_ceiling = v[0].min(v[n - 1]);
    for k in 0..m {
        if energies[k] >= bound_ceiling {
            continue; // box/continuum regime: boundary amplitude is expected
        }
        let mut frac = 0.0;
        for i in 0..edge {
            frac += functions[[i, k]].powi(2);
            frac += functions[[n - 1 - i, k]].powi(2);
        }
        if frac > EDGE_NORM_LIMIT {
            return Err(VibError::GridTooCoarse { index: k, fraction: frac });
        }
    }

    Ok(SurfaceLevels {
        grid: *grid,
        unit_mode: *mode,
        potential: potential.clone(),
        energies,
        functions,
    })
}

/// Overlap matrix F[l][k] = ⟨excited l | ground k⟩ between two surfaces solved
/// on the same grid. Row index runs over excited levels, column over ground
/// levels.
pub fn franck_condon_matrix(
    excited: &SurfaceLevels,
    ground: &SurfaceLevels,
) -> Result<Array2<f64>, VibError> {
    if excited.grid != ground.grid {
        return Err(VibError::GridMismatch);
    }
    let me = excited.m();
    let mg = ground.m();
    let n = excited.grid.n_points;
    let mut f = Array2::zeros((me, mg));
    for l in 0..me {
        for k in 0..mg {
            let mut acc = 0.0;
            for i in 0..n {
                acc += excited.functions[[i, l]] * ground.functions[[i, k]];
            }
            f[[l, k]] = acc;
        }
    }
    Ok(f)
}

/// Everything the ensemble model needs to know about one species' vibrational
/// structure: level energies on both surfaces and the overlap matrix, plus
/// the solved surfaces when they came from a grid (used for position
/// expectation values and eigenfunction export).
#[derive(Debug, Clone)]
pub struct VibrationalBasis {
    /// Ground-surface energies E_g[0..m_g] (ascending).
    pub ground_energies: Array1<f64>,
    /// Excited-surface energies E_e[0..m_e] (ascending).
    pub excited_energies: Array1<f64>,
    /// Overlaps fc[[l, k]] = ⟨excited l | ground k⟩, shape (m_e, m_g).
    pub fc: Array2<f64>,
    /// Grid-level detail, present when solved from potentials.
    pub solved: Option<SolvedSurfaces>,
}

/// The grid-solved surfaces backing a [`VibrationalBasis`].
#[derive(Debug, Clone)]
pub struct SolvedSurfaces {
    pub ground: SurfaceLevels,
    pub excited: SurfaceLevels,
    /// ⟨excited a | q | excited b⟩.
    pub position_excited: Array2<f64>,
}

impl VibrationalBasis {
    /// Solve both surfaces of one species and bundle the result.
    pub fn solve(
        grid: &Grid,
        mode: &UnitMode,
        ground: &PotentialSpec,
        excited: &PotentialSpec,
        m_g: usize,
        m_e: usize,
    ) -> Result<Self, VibError> {
        let gs = solve_dvr(grid, ground, mode, m_g)?;
        let es = solve_dvr(grid, excited, mode, m_e)?;
        let fc = franck_condon_matrix(&es, &gs)?;
        let position_excited = es.position_matrix();
        Ok(VibrationalBasis {
            ground_energies: gs.energies.clone(),
            excited_energies: es.energies.clone(),
            fc,
            solved: Some(SolvedSurfaces { ground: gs, excited: es, position_excited }),
        })
    }

    /// Assemble directly from level energies and an overlap matrix (no grid);
    /// used for synthetic models and randomized checks.
    pub fn from_parts(
        ground_energies: Array1<f64>,
        excited_energies: Array1<f64>,
        fc: Array2<f64>,
    ) -> Self {
        VibrationalBasis { ground_energies, excited_energies, fc, solved: None }
    }

    pub fn m_g(&self) -> usize {
        self.ground_energies.len()
    }

    pub fn m_e(&self) -> usize {
        self.excited_energies.len()
    }

    /// Ground-level spacing ω_g[k] = E_g[k] − E_g[0] (0-indexed level k).
    pub fn ground_gap(&self, k: usize) -> f64 {
        self.ground_energies[k] - self.ground_energies[0]
    }

    /// Vertical electronic gap ω_eg[l] = E_e[l] − E_g[0] (0-indexed level l).
    pub fn excitation_energy(&self, l: usize) -> f64 {
        self.excited_energies[l] - self.ground_energies[0]
    }

    /// Energy of the ideal photoexcited wavepacket (the ground vibrational
    /// state placed on the excited surface), within the retained levels:
    /// Σ_l F[l][0]² ω_eg[l] / Σ_l F[l][0]².
    pub fn vertical_centroid(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for l in 0..self.m_e() {
            let w = self.fc[[l, 0]] * self.fc[[l, 0]];
            num += w * self.excitation_energy(l);
            den += w;
        }
        num / den
    }

    /// Norm² of the photoexcited wavepacket inside the retained excited
    /// levels: Σ_l F[l][0]² (→ 1 as m_e → completeness).
    pub fn vertical_weight(&self) -> f64 {
        (0..self.m_e()).map(|l| self.fc[[l, 0]] * self.fc[[l, 0]]).sum()
    }
}
