//! Convergence of the truncation hierarchy against the brute-force engine.
//!
//! The symmetric basis at order kappa keeps states with at most kappa
//! ground-electronic molecules carrying phonons. For a finite ensemble the
//! untruncated product-space dynamics is tractable at small N, so the two
//! engines can be compared state by state: the amplitude error and the
//! population that leaks beyond kappa carriers both shrink as 1/N^(kappa+1),
//! and the truncated run becomes exact at kappa = N.
//!
//! Run with: cargo run --release --example truncation_convergence

use molpol::dynamics::TimeGrid;
use molpol::oracle::compare_dynamics;
use molpol::vib::{Grid, PotentialSpec, UnitMode, VibrationalBasis};

fn main() {
    // A compact two-level-per-surface species keeps the product space small
    // enough to enumerate (dimension grows like m_g^N).
    let vib = VibrationalBasis::solve(
        &Grid::new(128, -10.0, 14.0).unwrap(),
        &UnitMode::Natural,
        &PotentialSpec::Harmonic { omega: 0.2 },
        &PotentialSpec::HuangRhysHarmonic { omega: 0.2, huang_rhys: 0.6, offset: 2.0 },
        2,
        2,
    )
    .unwrap();

    let big_g = 0.1; // collective coupling, held fixed while N grows
    let omega_c = 2.0;
    let times = TimeGrid::new(250.0, 251).unwrap();

    println!("collective coupling {big_g} eV held fixed; per-molecule g = G/sqrt(N)");
    println!("\n  N   kappa   max amplitude distance   max leakage");
    for n in [2usize, 4, 8] {
        let g = big_g / (n as f64).sqrt();
        for kappa in 0..=2usize.min(n) {
            let r = compare_dynamics(n, &vib, g, omega_c, kappa, &times).unwrap();
            println!(
                "  {n}     {kappa}         {:>12.3e}         {:>12.3e}",
                r.max_distance, r.max_leakage
            );
        }
    }

    // Exactness at kappa = N.
    let n = 3;
    let r = compare_dynamics(n, &vib, big_g / (n as f64).sqrt(), omega_c, n, &times).unwrap();
    println!("\nkappa = N = {n}: max distance {:.3e} (exact)", r.max_distance);
    assert!(r.max_distance < 1e-9);
}
