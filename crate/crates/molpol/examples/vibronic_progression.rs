//! Franck-Condon progression of a displaced harmonic emitter.
//!
//! A single uncoupled species whose excited surface is the ground harmonic
//! well displaced far enough for a Huang-Rhys factor S = 1.8 shows the
//! classic vibronic ladder: lines at the vertical gap plus integer multiples
//! of the vibrational quantum, with Poisson weights S^n e^{-S} / n!.
//!
//! Run with: cargo run --release --example vibronic_progression

use molpol::basis::{enumerate, Coupling, MoleculeCount, SpeciesSpec};
use molpol::dynamics::{
    autocorrelation_series, peak_positions, spectrum, FrequencyWindow, TimeGrid,
};
use molpol::hamiltonian::{build, CavitySpec};
use molpol::observables::fc_wavepacket_state;
use molpol::vib::{Grid, PotentialSpec, UnitMode, VibrationalBasis};

fn main() {
    let omega = 0.22; // eV vibrational quantum
    let s = 1.8; // Huang-Rhys factor
    let gap = 2.2; // eV electronic offset

    let grid = Grid::new(384, -14.0, 22.0).unwrap();
    let vib = VibrationalBasis::solve(
        &grid,
        &UnitMode::Natural,
        &PotentialSpec::Harmonic { omega },
        &PotentialSpec::HuangRhysHarmonic { omega, huang_rhys: s, offset: gap },
        6,
        18,
    )
    .unwrap();

    // Franck-Condon weights from the solved overlaps vs the Poisson law.
    println!("line  solved weight  Poisson S^n e^-S / n!");
    let mut poisson = (-s).exp();
    for n in 0..8 {
        let f = vib.fc[[n, 0]];
        println!("  {n}    {:<12.6}  {poisson:.6}", f * f);
        poisson *= s / (n as f64 + 1.0);
    }

    // An uncoupled species: the cavity is a spectator, so the photonic
    // absorption vanishes; excite the molecular wavepacket directly instead.
    let species = vec![SpeciesSpec::new(
        "A".to_owned(),
        MoleculeCount::Infinite,
        Coupling::Collective(0.0),
        vib,
    )
    .unwrap()];
    let basis = enumerate(&species, 0).unwrap();
    let eigen = build(&basis, &CavitySpec { omega_c: gap }).unwrap().diagonalize().unwrap();
    let v0 = fc_wavepacket_state(&basis, "A").unwrap();

    let times = TimeGrid::new(2500.0, 4501).unwrap();
    let c = autocorrelation_series(&eigen, &v0, &times).unwrap();
    let window = FrequencyWindow { omega_min: 2.05, omega_max: 3.55, n_points: 1501 };
    let spec = spectrum(&c, &times, 0.002, &window).unwrap();

    let peaks = peak_positions(&spec, 0.05);
    println!("\npeaks at or above 5% of the strongest line:");
    for (w, h) in &peaks {
        println!("  omega = {w:.4} eV  (height {h:.3})");
    }
    println!("count: {} (Poisson S = 1.8 puts exactly six lines above 5%)", peaks.len());
    for pair in peaks.windows(2) {
        let spacing = pair[1].0 - pair[0].0;
        assert!(
            (spacing - omega).abs() < 2.0 * 0.001,
            "progression spacing {spacing} strays from omega = {omega}"
        );
    }
}
