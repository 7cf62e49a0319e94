//! Golden-rule relaxation rates between polaritons and the dark manifold.
//!
//! Under collective coupling the single-excitation spectrum splits into an
//! upper polariton, N-1 dark states, and a lower polariton. A phonon bath
//! with spectral density J relaxes them at famously N-dependent rates: for
//! a flat J the golden rule gives
//!
//!   upper -> dark    pi J0 (N-1)/N      (N-independent for large N)
//!   upper -> lower   pi J0 / (2N)       (vanishes as 1/N)
//!   dark  -> lower   pi J0 (N-1)/N^2    (vanishes as 1/N)
//!
//! This example evaluates the broadened golden-rule sums, checks them
//! against those closed forms, and cross-checks one rate with an explicit
//! time-domain decay fit.
//!
//! Run with: cargo run --release --example polariton_relaxation

use molpol::hamiltonian::vibronic::FgrOrder;
use molpol::io::fmt_f64;
use molpol::rates::{
    benchmark_bath, fgr_rate, flat_band_closed_form, measure_rate, Transition, DEFAULT_ETA_EV,
};

fn main() {
    let big_g = 0.1; // collective coupling (eV)
    let transitions = [
        (Transition::DarkFromUpper, FgrOrder::Zeroth, "upper -> dark "),
        (Transition::LowerFromUpper, FgrOrder::Zeroth, "upper -> lower"),
        (Transition::LowerFromDark, FgrOrder::First, "dark  -> lower"),
    ];

    println!("flat band around each transition's phonon resonance; rates in 1/fs");
    println!("\n  transition        N    golden rule   closed form     ratio");
    for &(transition, order, name) in &transitions {
        for n in [10usize, 20, 40] {
            let bath = benchmark_bath(transition, big_g);
            let g = big_g / (n as f64).sqrt();
            let r = fgr_rate(order, transition, n, g, &bath, DEFAULT_ETA_EV).unwrap();
            let j0 = match bath {
                molpol::rates::SpectralDensitySpec::FlatBand { j0, .. } => j0,
                _ => unreachable!("benchmark baths are flat"),
            };
            let closed = flat_band_closed_form(order, transition, n, j0);
            println!(
                "  {name}   {n:>3}   {:>11}   {:>11}    {:.4}",
                fmt_f64(r.analytic_per_fs),
                fmt_f64(closed),
                r.analytic_per_fs / closed
            );
        }
    }

    // Time-domain check: simulate the decay and fit the survival curve.
    let n = 10;
    let r = measure_rate(
        FgrOrder::Zeroth,
        Transition::DarkFromUpper,
        n,
        big_g,
        DEFAULT_ETA_EV,
    )
    .unwrap();
    println!(
        "\nupper -> dark at N = {n}: analytic {} /fs, fitted {} /fs (residual {})",
        fmt_f64(r.analytic_per_fs),
        fmt_f64(r.fitted_per_fs.unwrap()),
        fmt_f64(r.residual.unwrap()),
    );
    let ratio = r.fitted_per_fs.unwrap() / r.analytic_per_fs;
    assert!((0.8..1.25).contains(&ratio), "fit strays from the golden rule: {ratio}");
}
