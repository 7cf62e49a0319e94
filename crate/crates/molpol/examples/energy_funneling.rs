//! Cavity-mediated energy funneling between two species.
//!
//! A bound species A and a dissociative species B are both resonant with
//! the cavity. Starting from a pure photon, population flows irreversibly
//! into B's dense manifold of dissociative states while A only borrows it
//! transiently — even though A and B couple to the light identically. The
//! long-time populations approach the statistical yields computed from the
//! eigenstates, not the 50:50 split the couplings alone would suggest.
//!
//! This is a miniature of the bundled `example1` preset (try
//! `molpol run --preset example1` for the full-scale version).
//!
//! Run with: cargo run --release --example energy_funneling

use molpol::basis::{enumerate, Coupling, MoleculeCount, SpeciesSpec};
use molpol::dynamics::{initial_photonic_state, propagate, TimeGrid};
use molpol::hamiltonian::{build, CavitySpec};
use molpol::observables::{population_record, statistical_yield, statistical_yield_fc};
use molpol::vib::{Grid, PotentialSpec, UnitMode, VibrationalBasis};

fn main() {
    let omega = 0.25; // eV vibrational quantum of both ground wells
    let mode = UnitMode::Natural;

    // Species A: bound displaced-harmonic excited surface.
    let grid_a = Grid::new(256, -12.0, 18.0).unwrap();
    let vib_a = VibrationalBasis::solve(
        &grid_a,
        &mode,
        &PotentialSpec::Harmonic { omega },
        &PotentialSpec::HuangRhysHarmonic { omega, huang_rhys: 1.0, offset: 2.0 },
        5,
        10,
    )
    .unwrap();

    // Species B: dissociative exponential wall, positioned so its vertical
    // transition matches A's. The long box discretizes B's continuum.
    let grid_b = Grid::new(512, -30.0, 170.0).unwrap();
    let vib_b = VibrationalBasis::solve(
        &grid_b,
        &mode,
        &PotentialSpec::Harmonic { omega },
        &PotentialSpec::Exponential { steepness: 0.3, shift: -2.292, offset: 1.7 },
        5,
        96,
    )
    .unwrap();
    println!(
        "vertical transitions: A at {:.3} eV, B at {:.3} eV",
        vib_a.vertical_centroid(),
        vib_b.vertical_centroid()
    );

    let g = Coupling::Collective(0.15);
    let species = vec![
        SpeciesSpec::new("A".to_owned(), MoleculeCount::Infinite, g, vib_a).unwrap(),
        SpeciesSpec::new("B".to_owned(), MoleculeCount::Infinite, g, vib_b).unwrap(),
    ];
    let basis = enumerate(&species, 0).unwrap();
    let cavity = CavitySpec { omega_c: 2.25 };
    let eigen = build(&basis, &cavity).unwrap().diagonalize().unwrap();

    let v0 = initial_photonic_state(&basis);
    let times = TimeGrid::new(300.0, 601).unwrap();
    let traj = propagate(&eigen, &v0, &times).unwrap();
    let record = population_record(&basis, &traj, &[]).unwrap();

    println!("\n  t (fs)   photon      A       B");
    for &i in &[0usize, 30, 60, 120, 240, 360, 480, 600] {
        let (a, b) = (&record.species_excited[0].1, &record.species_excited[1].1);
        println!(
            "  {:6.0}   {:.4}   {:.4}  {:.4}",
            record.times_fs[i], record.photon[i], a[i], b[i]
        );
    }

    // Time averages over the settled half vs eigenstate statistics.
    let half = times.n_steps() / 2;
    let avg = |v: &[f64]| v[half..].iter().sum::<f64>() / (v.len() - half) as f64;
    println!("\n            tail average   eigenstate yield");
    for (label, excited) in &record.species_excited {
        let yield_full = statistical_yield(&basis, &eigen, label).unwrap();
        println!("  {label}:        {:.4}          {:.4}", avg(excited), yield_full);
    }

    // The naive estimate from vertical (Franck-Condon) energies alone says
    // the species should split the excitation evenly — dynamics disagrees.
    println!("\nvertical-transition-only estimate (no excited-state dynamics):");
    for (label, p) in statistical_yield_fc(&basis, &cavity).unwrap() {
        println!("  {label}: {p:.4}");
    }
}
