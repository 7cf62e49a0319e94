//! Vacuum Rabi oscillations and the polariton doublet.
//!
//! Two-level molecules (one vibrational level per surface, unit overlap)
//! collectively coupled to a resonant cavity reduce to a 2x2 problem no
//! matter how many molecules take part: the photon exchanges population
//! with one bright collective state at the collective coupling G, and the
//! absorption spectrum splits into two lines at omega_c +/- G.
//!
//! Run with: cargo run --release --example rabi_splitting

use molpol::basis::{enumerate, Coupling, MoleculeCount, SpeciesSpec};
use molpol::constants::HBAR_EV_FS;
use molpol::dynamics::{
    autocorrelation_series, initial_photonic_state, peak_positions, propagate, spectrum,
    FrequencyWindow, TimeGrid,
};
use molpol::hamiltonian::{build, CavitySpec};
use molpol::vib::VibrationalBasis;
use ndarray::{Array1, Array2};

fn main() {
    let omega_c = 2.0; // eV, resonant with the electronic gap
    let big_g = 0.1; // eV, collective coupling G = g sqrt(N)

    // A two-level species: one ground and one excited vibrational state
    // with perfect overlap. In the thermodynamic limit only G matters.
    let vib = VibrationalBasis::from_parts(
        Array1::from_vec(vec![0.0]),
        Array1::from_vec(vec![omega_c]),
        Array2::from_elem((1, 1), 1.0),
    );
    let species = vec![SpeciesSpec::new(
        "tl".to_owned(),
        MoleculeCount::Infinite,
        Coupling::Collective(big_g),
        vib,
    )
    .unwrap()];

    let basis = enumerate(&species, 0).unwrap();
    println!("basis dimension: {} (photon + bright state)", basis.dim());

    let cavity = CavitySpec { omega_c };
    let eigen = build(&basis, &cavity).unwrap().diagonalize().unwrap();
    let v0 = initial_photonic_state(&basis);

    // One full Rabi cycle: the photon returns when G t / hbar = pi.
    let period_fs = std::f64::consts::PI * HBAR_EV_FS / big_g;
    let times = TimeGrid::new(2.0 * period_fs, 401).unwrap();
    let traj = propagate(&eigen, &v0, &times).unwrap();

    let mut worst = 0.0f64;
    for (i, &t) in traj.times_fs.iter().enumerate() {
        let photon = traj.states[i][0].norm_sqr();
        let expected = (big_g * t / HBAR_EV_FS).cos().powi(2);
        worst = worst.max((photon - expected).abs());
    }
    println!("Rabi period: {period_fs:.2} fs");
    println!("max |photon population - cos^2(G t / hbar)| = {worst:.2e}");

    let c = autocorrelation_series(&eigen, &v0, &times).unwrap();
    let window = FrequencyWindow {
        omega_min: omega_c - 4.0 * big_g,
        omega_max: omega_c + 4.0 * big_g,
        n_points: 1601,
    };
    let spec = spectrum(&c, &times, 0.01, &window).unwrap();
    let peaks = peak_positions(&spec, 0.05);
    println!("spectral peaks (expected at {} and {}):", omega_c - big_g, omega_c + big_g);
    for (w, h) in &peaks {
        println!("  omega = {w:.4} eV  (height {h:.3})");
    }
    assert_eq!(peaks.len(), 2, "the polariton doublet should be the whole spectrum");
}
