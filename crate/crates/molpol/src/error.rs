//! Error types, one enum per subsystem plus a crate-wide wrapper.

use thiserror::Error;

/// Vibrational grid solver errors.
#[derive(Debug, Error)]
pub enum VibError {
    #[error("grid must have at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("grid extent is empty or inverted: q_min = {q_min}, q_max = {q_max}")]
    BadExtent { q_min: f64, q_max: f64 },
    #[error("requested {requested} states but the grid supports only {available}")]
    TooManyStates { requested: usize, available: usize },
    #[error(
        "grid too coarse or too short: bound eigenfunction {index} keeps {fraction:.3e} \
         of its norm in the outer 5% of the grid (limit 1e-2)"
    )]
    GridTooCoarse { index: usize, fraction: f64 },
    #[error("tabulated potential has {got} values but the grid has {expected} points")]
    TabulatedLengthMismatch { expected: usize, got: usize },
    #[error("physical-mode mass must be positive, got {0}")]
    BadMass(f64),
    #[error("the two surfaces were solved on different grids")]
    GridMismatch,
    #[error("eigensolver failed to converge: {0}")]
    NonConvergedEigensolve(String),
}

/// Symmetric-basis enumeration errors.
#[derive(Debug, Error)]
pub enum BasisError {
    #[error("basis would have {dim} states, above the cap of {cap}")]
    BasisTooLarge { dim: usize, cap: usize },
    #[error("species {label} declares an infinite molecule count where a finite one is required")]
    InfiniteCount { label: String },
    #[error("species {label}: an infinite-count species needs a collective coupling strength")]
    CouplingUndefined { label: String },
    #[error("species {label} declares zero molecules")]
    NoMolecules { label: String },
    #[error("species {label} has an empty vibrational basis")]
    EmptyVibrationalBasis { label: String },
    #[error("no species declared")]
    NoSpecies,
    #[error("species labels must be unique; '{label}' repeats")]
    DuplicateLabel { label: String },
}

/// Hamiltonian assembly and diagonalization errors.
#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("cavity energy must be positive, got {omega_c}")]
    InvalidCavity { omega_c: f64 },
    #[error("species {species}: overlap matrix is {rows}x{cols} but m_e = {m_e}, m_g = {m_g}")]
    MissingOverlap { species: String, rows: usize, cols: usize, m_e: usize, m_g: usize },
    #[error("state vector or matrix built on a different basis (fingerprint mismatch)")]
    BasisMismatch,
    #[error("eigensolver failed: {0}")]
    NonConverged(String),
    #[error("eigenpair {index} residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { index: usize, residual: f64, tol: f64 },
    #[error("vibronic bath: {0}")]
    BathSpecInvalid(String),
    #[error("vibronic bath: {modes} modes with occupation cap {cap} gives {dim} states, above cap {max}")]
    BathTooLarge { modes: usize, cap: usize, dim: usize, max: usize },
    #[error("vibronic model: order supports molecule counts >= {min}, got N = {got}")]
    BadMoleculeCount { min: u64, got: u64 },
}

/// Propagation and spectrum errors.
#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("state vector does not live on the Hamiltonian's basis")]
    BasisMismatch,
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("time grid must have at least one step and positive duration")]
    EmptyTimeGrid,
    #[error(
        "spectrum window [{lo}, {hi}] eV needs sampling finer than the Nyquist limit {nyquist} eV \
         implied by the time step"
    )]
    WindowOutsideNyquist { lo: f64, hi: f64, nyquist: f64 },
    #[error("autocorrelation series and time grid have different lengths")]
    LengthMismatch,
    #[error("spectrum window is empty or inverted")]
    BadWindow,
    #[error("line broadening must be positive, got {0}")]
    BadBroadening(f64),
}

/// Observable evaluation errors.
#[derive(Debug, Error)]
pub enum ObservableError {
    #[error("state vector does not live on the given basis")]
    BasisMismatch,
    #[error("no species with label '{0}' in the basis")]
    UnknownSpecies(String),
    #[error("observable defined for truncation order {max_order} but the basis is order {got}")]
    OrderMismatch { max_order: usize, got: usize },
    #[error("species '{0}' has no solved eigenfunctions; position matrix unavailable")]
    MissingPositionMatrix(String),
    #[error("reconstruction needs a finite molecule count for species '{0}'")]
    InfiniteCount(String),
    #[error("polariton projector has zero norm")]
    ZeroProjector,
    #[error("FC-point polariton matrix failed to diagonalize: {0}")]
    FcPointDiagonalization(String),
}

/// Brute-force reference engine errors.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error("molecule count N = {n} exceeds the engine cap of {cap}")]
    MoleculeCountCap { n: u64, cap: u64 },
    #[error("basis dimension {dim} exceeds the engine cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("state is not permutation symmetric: transposition spread {spread:.3e} exceeds 1e-8")]
    NotSymmetric { spread: f64 },
    #[error("vector does not live on this product basis")]
    BasisMismatch,
    #[error("oracle requires a finite molecule count")]
    InfiniteCount,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Golden-rule rate errors.
#[derive(Debug, Error)]
pub enum RateError {
    #[error("no bath mode lies within 5η = {window:.3e} eV of the resonance at {resonance:.6} eV")]
    BandMiss { resonance: f64, window: f64 },
    #[error("broadening η must be positive, got {0}")]
    BadEta(f64),
    #[error("bath band is empty or inverted")]
    BadBand,
    #[error("survival rebounded to {peak:.3} inside the fit window; bath too sparse (recurrence)")]
    RecurrenceContamination { peak: f64 },
    #[error("decay fit window kept only {0} samples; need at least 4")]
    FitWindowTooSmall(usize),
    #[error("initial state option requires first-order model")]
    OrderMismatch,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Configuration / CLI errors (exit code 2).
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file '{path}': {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown preset '{0}'; known presets: {1}")]
    UnknownPreset(String, String),
}

/// Crate-wide error wrapper.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Vib(#[from] VibError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error class: 2 for config/input problems
    /// (including oversize basis requests caught in preflight), 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::Basis(BasisError::BasisTooLarge { .. }) => 2,
            _ => 3,
        }
    }
}
