//! Run configuration: a versioned, schema-validated description of one
//! simulation, parsed from TOML (JSON is accepted as an alternative).
//!
//! A [`RunConfig`] names the unit convention, the cavity, the molecular
//! species (each with a potential-surface pair solved on a grid, or a
//! directly tabulated level structure), the truncation order, and the
//! requested products (propagation, spectrum, populations, golden-rule rate
//! sweeps). Configs are fully resolvable before any heavy numerics:
//! [`RunConfig::violations`] lists every schema problem with its field path,
//! and [`RunConfig::preflight`] reports the exact basis dimension and a
//! memory estimate from the declared level counts alone.
//!
//! The shipped presets are embedded copies of the config files under
//! `presets/`, so a named reproduction run and its auditable on-disk recipe
//! are the same bytes.

use std::fmt;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::basis::{
    enumerate_with_cap, Coupling, MoleculeCount, SpeciesSpec, DEFAULT_DIMENSION_CAP,
};
use crate::error::{ConfigError, Error};
use crate::hamiltonian::vibronic::FgrOrder;
use crate::hamiltonian::CavitySpec;
use crate::linalg::SPARSE_THRESHOLD;
use crate::rates::{SpectralDensitySpec, Transition, DEFAULT_ETA_EV};
use crate::vib::{Grid, PotentialSpec, UnitMode, VibrationalBasis};

/// Config schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// The embedded preset configs, by name.
const PRESETS: [(&str, &str); 7] = [
    ("example1", include_str!("../presets/example1.toml")),
    ("example1-bare-a", include_str!("../presets/example1-bare-a.toml")),
    ("example1-pure-a", include_str!("../presets/example1-pure-a.toml")),
    ("example1-bare-b", include_str!("../presets/example1-bare-b.toml")),
    ("example2", include_str!("../presets/example2.toml")),
    ("example2-bare-b", include_str!("../presets/example2-bare-b.toml")),
    ("rate-table", include_str!("../presets/rate-table.toml")),
];

/// Names of the shipped presets, in display order.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// The raw TOML text of a shipped preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// One full run description.
///
/// Field order puts scalar keys ahead of tables so the struct serializes to
/// valid TOML as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Schema version; must equal [`SCHEMA_VERSION`].
    pub schema: u32,
    #[serde(default)]
    pub title: Option<String>,
    /// Truncation order: highest number of ground-electronic molecules that
    /// may carry phonons simultaneously.
    #[serde(default)]
    pub kappa: usize,
    /// Initial state: `"photonic"` or `"fc:<species label>"`.
    #[serde(default = "default_initial")]
    pub initial: String,
    /// Population columns to record; `None` selects the four basic kinds.
    #[serde(default)]
    pub observables: Option<Vec<ObservableKind>>,
    /// Seed for randomized property checks built on this config (the
    /// simulation itself is deterministic).
    #[serde(default)]
    pub seed: Option<u64>,
    /// Also write a gnuplot script next to the CSV outputs.
    #[serde(default)]
    pub emit_plot: bool,
    /// Output directory; the CLI falls back to `out/<config name>`.
    #[serde(default)]
    pub output_dir: Option<String>,
    /// Basis-size guard; defaults to the library cap.
    #[serde(default)]
    pub dimension_cap: Option<usize>,
    /// Coordinate/mass convention shared by all grid-solved species.
    #[serde(default = "default_unit_mode")]
    pub unit_mode: UnitMode,
    #[serde(default)]
    pub cavity: Option<CavitySpec>,
    #[serde(default)]
    pub time: Option<TimeConfig>,
    #[serde(default)]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default)]
    pub rates: Option<RatesConfig>,
    #[serde(default)]
    pub species: Vec<SpeciesConfig>,
}

fn default_initial() -> String {
    "photonic".to_string()
}

fn default_unit_mode() -> UnitMode {
    UnitMode::Natural
}

/// One molecular species: ensemble size, coupling, and level structure from
/// either a grid-solved potential pair (`grid` + `ground` + `excited` +
/// `m_g` + `m_e`) or a direct `table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    pub label: String,
    /// Ground-surface levels to retain (grid route).
    #[serde(default)]
    pub m_g: Option<usize>,
    /// Excited-surface levels to retain (grid route).
    #[serde(default)]
    pub m_e: Option<usize>,
    pub count: MoleculeCount,
    pub coupling: Coupling,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub ground: Option<PotentialSpec>,
    #[serde(default)]
    pub excited: Option<PotentialSpec>,
    #[serde(default)]
    pub table: Option<TableConfig>,
}

/// Uniform coordinate grid for the vibrational eigensolver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub q_min: f64,
    pub q_max: f64,
}

impl GridConfig {
    pub fn to_grid(self) -> Result<Grid, crate::error::VibError> {
        Grid::new(self.n_points, self.q_min, self.q_max)
    }
}

/// Directly tabulated level structure: energies on both surfaces plus the
/// overlap matrix `fc[l][k] = ⟨excited l | ground k⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub ground_energies: Vec<f64>,
    pub excited_energies: Vec<f64>,
    pub fc: Vec<Vec<f64>>,
}

impl TableConfig {
    fn to_vib(&self) -> VibrationalBasis {
        let m_g = self.ground_energies.len();
        let m_e = self.excited_energies.len();
        let mut fc = Array2::zeros((m_e, m_g));
        for (l, row) in self.fc.iter().enumerate() {
            for (k, &f) in row.iter().enumerate() {
                fc[[l, k]] = f;
            }
        }
        VibrationalBasis::from_parts(
            Array1::from_vec(self.ground_energies.clone()),
            Array1::from_vec(self.excited_energies.clone()),
            fc,
        )
    }
}

/// Propagation time grid: `n_steps` samples from 0 to `t_max_fs` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max_fs: f64,
    pub n_steps: usize,
}

impl TimeConfig {
    pub fn to_grid(self) -> Result<crate::dynamics::TimeGrid, crate::error::DynamicsError> {
        crate::dynamics::TimeGrid::new(self.t_max_fs, self.n_steps)
    }
}

/// Spectrum request: Lorentzian broadening γ, frequency window, and the
/// autocorrelation time grid the window is Fourier-transformed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Lorentzian half-width γ (eV).
    pub gamma: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
    pub t_max_fs: f64,
    pub n_steps: usize,
}

impl SpectrumConfig {
    pub fn window(&self) -> crate::dynamics::FrequencyWindow {
        crate::dynamics::FrequencyWindow {
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            n_points: self.n_points,
        }
    }

    pub fn time_grid(&self) -> Result<crate::dynamics::TimeGrid, crate::error::DynamicsError> {
        crate::dynamics::TimeGrid::new(self.t_max_fs, self.n_steps)
    }
}

/// Golden-rule rate sweep: transitions × orders × ensemble sizes at fixed
/// collective coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    /// Collective coupling G = g√N (eV), held fixed across the sweep.
    pub collective_g: f64,
    /// Lorentzian half-width for the broadened golden-rule sum (eV).
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Also fit each decay in the time domain (analytic-only when false).
    #[serde(default = "default_true")]
    pub fit: bool,
    pub orders: Vec<FgrOrder>,
    pub transitions: Vec<Transition>,
    pub n_values: Vec<usize>,
    /// Custom bath; `None` uses the per-transition benchmark baths.
    #[serde(default)]
    pub bath: Option<SpectralDensitySpec>,
}

fn default_eta() -> f64 {
    DEFAULT_ETA_EV
}

fn default_true() -> bool {
    true
}

/// Population observables selectable for `populations.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    /// Total photonic population.
    Photon,
    /// Per-species Franck-Condon wavepacket population.
    Fc,
    /// Population outside the photon and every FC wavepacket.
    Dark,
    /// Per-species total excited population.
    SpeciesExcited,
    /// Projection on the upper polariton (order zero only).
    PolaritonUpper,
    /// Projection on the lower polariton (order zero only).
    PolaritonLower,
}

impl ObservableKind {
    /// The four kinds recorded when a config does not select columns.
    pub fn default_set() -> Vec<ObservableKind> {
        vec![
            ObservableKind::Photon,
            ObservableKind::Fc,
            ObservableKind::Dark,
            ObservableKind::SpeciesExcited,
        ]
    }
}

/// Parsed initial-state selector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialSelector {
    /// The bare-photon state with all molecules in their vibrational ground
    /// level.
    Photonic,
    /// The Franck-Condon wavepacket of the named species.
    FranckCondon(String),
}

impl InitialSelector {
    /// Parse `"photonic"` or `"fc:<label>"`.
    pub fn parse(s: &str) -> Result<InitialSelector, String> {
        if s == "photonic" {
            return Ok(InitialSelector::Photonic);
        }
        if let Some(label) = s.strip_prefix("fc:") {
            if label.is_empty() {
                return Err("initial: 'fc:' needs a species label".to_string());
            }
            return Ok(InitialSelector::FranckCondon(label.to_string()));
        }
        Err(format!(
            "initial: '{s}' is neither 'photonic' nor 'fc:<species label>'"
        ))
    }
}

/// Exact basis dimension and memory footprint estimated from the declared
/// level counts, before any eigensolve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preflight {
    /// Enumerated symmetric-basis dimension (absent for rates-only configs).
    pub dimension: Option<usize>,
    /// Hamiltonian storage estimate in bytes.
    pub hamiltonian_bytes: Option<u64>,
    /// Dense eigenvector storage for propagation, 8·dim² bytes.
    pub eigenvector_bytes: Option<u64>,
}

impl fmt::Display for Preflight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dimension {
            Some(d) => write!(
                f,
                "basis dimension {d}; Hamiltonian ~{} bytes; eigenvectors ~{} bytes",
                self.hamiltonian_bytes.unwrap_or(0),
                self.eigenvector_bytes.unwrap_or(0),
            ),
            None => write!(f, "no basis requested (rates-only run)"),
        }
    }
}

impl RunConfig {
    /// Parse a TOML config.
    pub fn from_toml_str(text: &str) -> Result<RunConfig, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Parse a JSON config.
    pub fn from_json_str(text: &str) -> Result<RunConfig, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Read a config file: `.json` parses as JSON, anything else as TOML
    /// (falling back to JSON so piped JSON works under any name).
    pub fn from_path(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            return Self::from_json_str(&text);
        }
        match Self::from_toml_str(&text) {
            Ok(c) => Ok(c),
            Err(toml_err) => Self::from_json_str(&text).map_err(|_| toml_err),
        }
    }

    /// A shipped preset by name.
    pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
        match preset_source(name) {
            Some(text) => Self::from_toml_str(text),
            None => Err(ConfigError::UnknownPreset(
                name.to_string(),
                preset_names().join(", "),
            )),
        }
    }

    /// Serialize back to TOML.
    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Serialize to pretty JSON.
    pub fn to_json_string(&self) -> Result<String, ConfigError> {
        serde_json::to_string_pretty(self).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// The effective basis-size guard.
    pub fn dimension_cap(&self) -> usize {
        self.dimension_cap.unwrap_or(DEFAULT_DIMENSION_CAP)
    }

    /// The effective observable selection.
    pub fn observable_set(&self) -> Vec<ObservableKind> {
        self.observables.clone().unwrap_or_else(ObservableKind::default_set)
    }

    /// Parsed initial-state selector (label resolution happens in
    /// [`RunConfig::violations`]).
    pub fn initial_selector(&self) -> Result<InitialSelector, ConfigError> {
        InitialSelector::parse(&self.initial).map_err(ConfigError::Invalid)
    }

    /// Every schema violation, as `field path: problem` lines. Empty means
    /// the config is valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.schema != SCHEMA_VERSION {
            out.push(format!(
                "schema: this build reads version {SCHEMA_VERSION}, got {}",
                self.schema
            ));
        }

        if self.species.is_empty() && self.rates.is_none() {
            out.push(
                "species: at least one species (or a [rates] section) is required".to_string(),
            );
        }
        if !self.species.is_empty() && self.cavity.is_none() {
            out.push("cavity: required whenever species are declared".to_string());
        }
        if let Some(c) = &self.cavity {
            if !(c.omega_c > 0.0) || !c.omega_c.is_finite() {
                out.push(format!("cavity.omega_c: must be positive, got {}", c.omega_c));
            }
        }
        if let UnitMode::Physical { mass_amu } = self.unit_mode {
            if !(mass_amu > 0.0) || !mass_amu.is_finite() {
                out.push(format!("unit_mode.mass_amu: must be positive, got {mass_amu}"));
            }
        }

        match InitialSelector::parse(&self.initial) {
            Ok(InitialSelector::FranckCondon(label)) => {
                if !self.species.iter().any(|s| s.label == label) {
                    out.push(format!("initial: no species labeled '{label}'"));
                }
            }
            Ok(InitialSelector::Photonic) => {}
            Err(msg) => out.push(msg),
        }

        if let Some(obs) = &self.observables {
            if obs.is_empty() {
                out.push("observables: selection must not be empty".to_string());
            }
            let wants_polariton = obs.iter().any(|o| {
                matches!(o, ObservableKind::PolaritonUpper | ObservableKind::PolaritonLower)
            });
            if wants_polariton && self.kappa > 0 {
                out.push(format!(
                    "observables: polariton projections are defined at kappa = 0, got kappa = {}",
                    self.kappa
                ));
            }
        }

        for (i, sp) in self.species.iter().enumerate() {
            species_violations(i, sp, &mut out);
            if self.species[..i].iter().any(|t| t.label == sp.label) {
                out.push(format!("species[{i}].label: duplicate label '{}'", sp.label));
            }
        }

        if let Some(t) = &self.time {
            if !(t.t_max_fs > 0.0) || !t.t_max_fs.is_finite() {
                out.push(format!("time.t_max_fs: must be positive, got {}", t.t_max_fs));
            }
            if t.n_steps < 2 {
                out.push(format!("time.n_steps: need at least 2 samples, got {}", t.n_steps));
            }
        }

        if let Some(s) = &self.spectrum {
            spectrum_violations(s, &mut out);
        }

        if let Some(r) = &self.rates {
            rates_violations(r, &mut out);
        }

        out
    }

    /// Error with every violation joined, or `Ok` for a valid config.
    pub fn ensure_valid(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v.join("; ")))
        }
    }

    /// Solve every species' vibrational structure (the heavy step).
    pub fn resolve_species(&self) -> Result<Vec<SpeciesSpec>, Error> {
        self.ensure_valid()?;
        let mut out = Vec::with_capacity(self.species.len());
        for sp in &self.species {
            let vib = match &sp.table {
                Some(table) => table.to_vib(),
                None => {
                    let grid = sp
                        .grid
                        .expect("validated grid species carry a grid")
                        .to_grid()
                        .map_err(Error::Vib)?;
                    VibrationalBasis::solve(
                        &grid,
                        &self.unit_mode,
                        sp.ground.as_ref().expect("validated"),
                        sp.excited.as_ref().expect("validated"),
                        sp.m_g.expect("validated"),
                        sp.m_e.expect("validated"),
                    )
                    .map_err(Error::Vib)?
                }
            };
            out.push(
                SpeciesSpec::new(sp.label.clone(), sp.count, sp.coupling, vib)
                    .map_err(Error::Basis)?,
            );
        }
        Ok(out)
    }

    /// Placeholder species carrying only the declared level counts; enough
    /// to enumerate the basis without solving any potential.
    fn preflight_species(&self) -> Result<Vec<SpeciesSpec>, Error> {
        let mut out = Vec::with_capacity(self.species.len());
        for sp in &self.species {
            let (m_g, m_e) = declared_level_counts(sp)
                .map_err(|msg| Error::Config(ConfigError::Invalid(msg)))?;
            let vib = VibrationalBasis::from_parts(
                Array1::linspace(0.0, 1.0, m_g),
                Array1::linspace(1.0, 2.0, m_e),
                Array2::zeros((m_e, m_g)),
            );
            out.push(
                SpeciesSpec::new(sp.label.clone(), sp.count, sp.coupling, vib)
                    .map_err(Error::Basis)?,
            );
        }
        Ok(out)
    }

    /// Exact basis dimension and memory estimate from the declared counts.
    /// An oversize request surfaces as `BasisTooLarge` carrying the computed
    /// dimension.
    pub fn preflight(&self) -> Result<Preflight, Error> {
        self.ensure_valid()?;
        if self.species.is_empty() {
            return Ok(Preflight {
                dimension: None,
                hamiltonian_bytes: None,
                eigenvector_bytes: None,
            });
        }
        let species = self.preflight_species()?;
        let basis = enumerate_with_cap(&species, self.kappa, self.dimension_cap())
            .map_err(Error::Basis)?;
        let dim = basis.dim() as u64;
        let sum_m_e: u64 = species.iter().map(|s| s.vib.m_e() as u64).sum();
        let n_photonic = basis
            .states
            .iter()
            .filter(|s| matches!(s, crate::basis::SymmetricState::Photonic { .. }))
            .count() as u64;
        let hamiltonian_bytes = if dim <= SPARSE_THRESHOLD as u64 {
            8 * dim * dim
        } else {
            // CSR estimate: diagonal plus mirrored photon-exciton couplings,
            // at most (κ+1) channels per (photon row, excited level).
            let nnz = dim + 2 * n_photonic * sum_m_e * (self.kappa as u64 + 1);
            12 * nnz + 8 * dim
        };
        Ok(Preflight {
            dimension: Some(basis.dim()),
            hamiltonian_bytes: Some(hamiltonian_bytes),
            eigenvector_bytes: Some(8 * dim * dim),
        })
    }
}

/// The level counts a species declares, before any solve.
fn declared_level_counts(sp: &SpeciesConfig) -> Result<(usize, usize), String> {
    if let Some(t) = &sp.table {
        return Ok((t.ground_energies.len(), t.excited_energies.len()));
    }
    match (sp.m_g, sp.m_e) {
        (Some(g), Some(e)) => Ok((g, e)),
        _ => Err(format!(
            "species '{}': grid-solved species need m_g and m_e",
            sp.label
        )),
    }
}

fn species_violations(i: usize, sp: &SpeciesConfig, out: &mut Vec<String>) {
    let path = format!("species[{i}]");
    if sp.label.is_empty() {
        out.push(format!("{path}.label: must not be empty"));
    } else if !sp.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        out.push(format!(
            "{path}.label: '{}' may use only ASCII letters, digits, '_', '-' \
             (labels name CSV columns and files)",
            sp.label
        ));
    }
    if let MoleculeCount::Finite(0) = sp.count {
        out.push(format!("{path}.count: zero molecules"));
    }
    match sp.coupling {
        Coupling::SingleMolecule(g) => {
            if !g.is_finite() || g < 0.0 {
                out.push(format!("{path}.coupling: must be finite and >= 0, got {g}"));
            }
            if matches!(sp.count, MoleculeCount::Infinite) {
                out.push(format!(
                    "{path}.coupling: an infinite-count species needs a collective strength"
                ));
            }
        }
        Coupling::Collective(g) => {
            if !g.is_finite() || g < 0.0 {
                out.push(format!("{path}.coupling: must be finite and >= 0, got {g}"));
            }
        }
    }

    let grid_route =
        sp.grid.is_some() || sp.ground.is_some() || sp.excited.is_some() || sp.m_g.is_some();
    match (&sp.table, grid_route) {
        (Some(_), true) => out.push(format!(
            "{path}: declare either a level table or a grid-solved potential pair, not both"
        )),
        (None, false) => out.push(format!(
            "{path}: needs either a level table or grid + ground + excited + m_g + m_e"
        )),
        (Some(t), false) => table_violations(&path, t, out),
        (None, true) => grid_route_violations(&path, sp, out),
    }
}

fn table_violations(path: &str, t: &TableConfig, out: &mut Vec<String>) {
    if t.ground_energies.is_empty() {
        out.push(format!("{path}.table.ground_energies: must not be empty"));
    }
    if t.excited_energies.is_empty() {
        out.push(format!("{path}.table.excited_energies: must not be empty"));
    }
    for (name, list) in [
        ("ground_energies", &t.ground_energies),
        ("excited_energies", &t.excited_energies),
    ] {
        if list.iter().any(|e| !e.is_finite()) {
            out.push(format!("{path}.table.{name}: entries must be finite"));
        }
        if list.windows(2).any(|w| w[1] < w[0]) {
            out.push(format!("{path}.table.{name}: energies must ascend"));
        }
    }
    if t.fc.len() != t.excited_energies.len()
        || t.fc.iter().any(|row| row.len() != t.ground_energies.len())
    {
        out.push(format!(
            "{path}.table.fc: needs {} rows of {} overlaps",
            t.excited_energies.len(),
            t.ground_energies.len()
        ));
    } else if t.fc.iter().flatten().any(|f| !f.is_finite()) {
        out.push(format!("{path}.table.fc: entries must be finite"));
    }
}

fn grid_route_violations(path: &str, sp: &SpeciesConfig, out: &mut Vec<String>) {
    match sp.grid {
        None => out.push(format!("{path}.grid: missing")),
        Some(g) => {
            if g.n_points < 16 {
                out.push(format!(
                    "{path}.grid.n_points: the solver needs at least 16 points, got {}",
                    g.n_points
                ));
            }
            if !(g.q_max > g.q_min) || !g.q_min.is_finite() || !g.q_max.is_finite() {
                out.push(format!(
                    "{path}.grid: extent [{}, {}] is empty or not finite",
                    g.q_min, g.q_max
                ));
            }
        }
    }
    match sp.m_g {
        None => out.push(format!("{path}.m_g: missing")),
        Some(0) => out.push(format!("{path}.m_g: must be at least 1")),
        Some(m) => {
            if let Some(g) = sp.grid {
                if m > g.n_points {
                    out.push(format!(
                        "{path}.m_g: {m} exceeds the {} grid points",
                        g.n_points
                    ));
                }
            }
        }
    }
    match sp.m_e {
        None => out.push(format!("{path}.m_e: missing")),
        Some(0) => out.push(format!("{path}.m_e: must be at least 1")),
        Some(m) => {
            if let Some(g) = sp.grid {
                if m > g.n_points {
                    out.push(format!(
                        "{path}.m_e: {m} exceeds the {} grid points",
                        g.n_points
                    ));
                }
            }
        }
    }
    match &sp.ground {
        None => out.push(format!("{path}.ground: missing")),
        Some(p) => potential_violations(&format!("{path}.ground"), p, sp.grid, out),
    }
    match &sp.excited {
        None => out.push(format!("{path}.excited: missing")),
        Some(p) => potential_violations(&format!("{path}.excited"), p, sp.grid, out),
    }
}

fn potential_violations(
    path: &str,
    p: &PotentialSpec,
    grid: Option<GridConfig>,
    out: &mut Vec<String>,
) {
    let mut bad_number = |name: &str, v: f64, positive: bool| {
        if !v.is_finite() || (positive && !(v > 0.0)) {
            out.push(format!(
                "{path}.{name}: must be {}finite, got {v}",
                if positive { "positive and " } else { "" }
            ));
        }
    };
    match p {
        PotentialSpec::Harmonic { omega } => bad_number("omega", *omega, true),
        PotentialSpec::DisplacedHarmonic { omega, displacement, offset } => {
            bad_number("omega", *omega, true);
            bad_number("displacement", *displacement, false);
            bad_number("offset", *offset, false);
        }
        PotentialSpec::HuangRhysHarmonic { omega, huang_rhys, offset } => {
            bad_number("omega", *omega, true);
            bad_number("offset", *offset, false);
            if !huang_rhys.is_finite() || *huang_rhys < 0.0 {
                out.push(format!(
                    "{path}.huang_rhys: must be finite and >= 0, got {huang_rhys}"
                ));
            }
        }
        PotentialSpec::Exponential { steepness, shift, offset } => {
            bad_number("steepness", *steepness, true);
            bad_number("shift", *shift, false);
            bad_number("offset", *offset, false);
        }
        PotentialSpec::ExponentialWithBump { steepness, shift, height, width, center, offset } => {
            bad_number("steepness", *steepness, true);
            bad_number("shift", *shift, false);
            bad_number("height", *height, false);
            bad_number("center", *center, false);
            bad_number("offset", *offset, false);
            if !width.is_finite() || *width < 0.0 {
                out.push(format!("{path}.width: must be finite and >= 0, got {width}"));
            }
        }
        PotentialSpec::Tabulated { values } => {
            if values.iter().any(|v| !v.is_finite()) {
                out.push(format!("{path}.values: entries must be finite"));
            }
            if let Some(g) = grid {
                if values.len() != g.n_points {
                    out.push(format!(
                        "{path}.values: {} values for a {}-point grid",
                        values.len(),
                        g.n_points
                    ));
                }
            }
        }
    }
}

fn spectrum_violations(s: &SpectrumConfig, out: &mut Vec<String>) {
    if !s.gamma.is_finite() || s.gamma < 0.0 {
        out.push(format!("spectrum.gamma: must be finite and >= 0, got {}", s.gamma));
    }
    if !(s.omega_max > s.omega_min) {
        out.push(format!(
            "spectrum: window [{}, {}] is empty or inverted",
            s.omega_min, s.omega_max
        ));
    }
    if s.n_points < 2 {
        out.push(format!("spectrum.n_points: need at least 2, got {}", s.n_points));
    }
    if !(s.t_max_fs > 0.0) || !s.t_max_fs.is_finite() {
        out.push(format!("spectrum.t_max_fs: must be positive, got {}", s.t_max_fs));
    }
    if s.n_steps < 2 {
        out.push(format!("spectrum.n_steps: need at least 2 samples, got {}", s.n_steps));
    } else if s.t_max_fs > 0.0 && s.t_max_fs.is_finite() {
        let dt = s.t_max_fs / (s.n_steps - 1) as f64;
        let nyquist = std::f64::consts::PI * crate::constants::HBAR_EV_FS / dt;
        if s.omega_min.abs() > nyquist || s.omega_max.abs() > nyquist {
            out.push(format!(
                "spectrum: window [{}, {}] eV exceeds the Nyquist limit {nyquist:.4} eV of \
                 dt = {dt:.4} fs; increase n_steps or shorten t_max_fs",
                s.omega_min, s.omega_max
            ));
        }
    }
}

fn rates_violations(r: &RatesConfig, out: &mut Vec<String>) {
    if !r.collective_g.is_finite() || !(r.collective_g > 0.0) {
        out.push(format!(
            "rates.collective_g: must be positive, got {}",
            r.collective_g
        ));
    }
    if !r.eta.is_finite() || !(r.eta > 0.0) {
        out.push(format!("rates.eta: must be positive, got {}", r.eta));
    }
    if r.orders.is_empty() {
        out.push("rates.orders: must not be empty".to_string());
    }
    if r.transitions.is_empty() {
        out.push("rates.transitions: must not be empty".to_string());
    }
    if r.n_values.is_empty() {
        out.push("rates.n_values: must not be empty".to_string());
    }
    for (k, &n) in r.n_values.iter().enumerate() {
        if n < 2 {
            out.push(format!("rates.n_values[{k}]: need N >= 2, got {n}"));
        }
    }
    if let Some(bath) = &r.bath {
        if let Err(e) = bath.modes() {
            out.push(format!("rates.bath: {e}"));
        }
    }
}
