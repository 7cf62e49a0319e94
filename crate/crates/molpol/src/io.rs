//! Deterministic renderers for the CLI's output files.
//!
//! Every renderer produces the complete file content as a `String` so that
//! byte-level determinism is easy to test; writing is a plain `fs::write`.
//! Floats are printed with [`fmt_f64`], which keeps full round-trip
//! precision, so repeated runs of the same configuration produce identical
//! bytes.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{SpeciesSpec, SymmetricBasis, SymmetricState};
use crate::config::{ObservableKind, RunConfig};
use crate::dynamics::SpectrumResult;
use crate::hamiltonian::vibronic::FgrOrder;
use crate::hamiltonian::{state_energy, CavitySpec};
use crate::observables::PopulationRecord;
use crate::oracle::ComparisonReport;
use crate::rates::{RateResult, Transition};
use crate::vib::VibrationalBasis;

/// Format a float with shortest round-trip precision and no locale or
/// padding surprises: `0` for zero, plain decimal notation for moderate
/// magnitudes, scientific notation otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let mag = x.abs();
    if (1e-4..1e6).contains(&mag) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Create `dir` if needed and write `name` inside it.
pub fn write_file(dir: &Path, name: &str, content: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)
}

/// `spectrum.csv`: one `(frequency, intensity)` row per window point.
pub fn render_spectrum_csv(s: &SpectrumResult) -> String {
    let mut out = String::with_capacity(32 * s.frequencies.len() + 24);
    out.push_str("omega_ev,intensity\n");
    for (w, v) in s.frequencies.iter().zip(&s.intensities) {
        out.push_str(&fmt_f64(*w));
        out.push(',');
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

/// `populations.csv`: `time_fs` plus one column per requested observable,
/// in the order the observables were requested. Multi-valued kinds (FC,
/// per-species excited, polariton projections) expand into one column per
/// species or projector, in record order.
pub fn render_populations_csv(
    p: &PopulationRecord,
    kinds: &[ObservableKind],
) -> String {
    let mut columns: Vec<(String, &[f64])> = Vec::new();
    for kind in kinds {
        match kind {
            ObservableKind::Photon => columns.push(("photon".to_owned(), &p.photon)),
            ObservableKind::Fc => {
                for (label, v) in &p.fc {
                    columns.push((format!("fc_{label}"), v));
                }
            }
            ObservableKind::Dark => columns.push(("dark".to_owned(), &p.dark)),
            ObservableKind::SpeciesExcited => {
                for (label, v) in &p.species_excited {
                    columns.push((format!("excited_{label}"), v));
                }
            }
            ObservableKind::PolaritonUpper | ObservableKind::PolaritonLower => {
                let want = if *kind == ObservableKind::PolaritonUpper {
                    "upper"
                } else {
                    "lower"
                };
                for (name, v) in &p.polariton {
                    if name == want {
                        columns.push((format!("polariton_{name}"), v));
                    }
                }
            }
        }
    }
    let mut out = String::with_capacity((columns.len() + 1) * 24 * (p.times_fs.len() + 1));
    out.push_str("time_fs");
    for (name, _) in &columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, t) in p.times_fs.iter().enumerate() {
        out.push_str(&fmt_f64(*t));
        for (_, v) in &columns {
            out.push(',');
            out.push_str(&fmt_f64(v[i]));
        }
        out.push('\n');
    }
    out
}

/// Stable file/CSV spelling of a transition.
pub fn transition_name(t: Transition) -> &'static str {
    match t {
        Transition::DarkFromUpper => "dark-from-upper",
        Transition::LowerFromUpper => "lower-from-upper",
        Transition::LowerFromDark => "lower-from-dark",
    }
}

/// `rates.csv`: one row per (transition, order, N) with the analytic rate
/// and, when a time-domain fit ran, the fitted rate and its residual
/// (blank fields otherwise).
pub fn render_rates_csv(rows: &[RateResult]) -> String {
    let mut out = String::with_capacity(48 * rows.len() + 64);
    out.push_str("transition,order,n,eta_ev,analytic_per_fs,fitted_per_fs,residual\n");
    for r in rows {
        let order = match r.order {
            FgrOrder::Zeroth => "0",
            FgrOrder::First => "1",
        };
        out.push_str(transition_name(r.transition));
        out.push(',');
        out.push_str(order);
        out.push(',');
        out.push_str(&r.n.to_string());
        out.push(',');
        out.push_str(&fmt_f64(r.eta_ev));
        out.push(',');
        out.push_str(&fmt_f64(r.analytic_per_fs));
        out.push(',');
        if let Some(f) = r.fitted_per_fs {
            out.push_str(&fmt_f64(f));
        }
        out.push(',');
        if let Some(res) = r.residual {
            out.push_str(&fmt_f64(res));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct BasisRow<'a> {
    index: usize,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    species: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<usize>,
    /// Per species: ascending `[level, molecules]` pairs of ground-surface
    /// carriers above level 0.
    occupation: &'a [Vec<(usize, usize)>],
    energy_ev: f64,
}

/// `basis.jsonl`: one JSON object per basis state, in canonical order,
/// carrying the state's diagonal energy.
pub fn render_basis_jsonl(basis: &SymmetricBasis, cavity: &CavitySpec) -> String {
    let mut out = String::with_capacity(96 * basis.dim());
    for (index, state) in basis.states.iter().enumerate() {
        let (kind, species, level) = match state {
            SymmetricState::Photonic { .. } => ("photonic", None, None),
            SymmetricState::Excitonic { species, level, .. } => (
                "excitonic",
                Some(basis.species[*species].label.as_str()),
                Some(*level),
            ),
        };
        let row = BasisRow {
            index,
            kind,
            species,
            level,
            occupation: &state.occ().levels,
            energy_ev: state_energy(basis, state, cavity),
        };
        out.push_str(&serde_json::to_string(&row).expect("basis row serializes"));
        out.push('\n');
    }
    out
}

/// `levels.csv`: every retained vibrational level of every species, both
/// surfaces, with absolute energies.
pub fn render_levels_csv(species: &[SpeciesSpec]) -> String {
    let mut out = String::from("species,surface,level,energy_ev\n");
    for sp in species {
        for (k, e) in sp.vib.ground_energies.iter().enumerate() {
            out.push_str(&format!("{},ground,{},{}\n", sp.label, k, fmt_f64(*e)));
        }
        for (l, e) in sp.vib.excited_energies.iter().enumerate() {
            out.push_str(&format!("{},excited,{},{}\n", sp.label, l, fmt_f64(*e)));
        }
    }
    out
}

/// `fc_<label>.csv`: the species' overlap matrix in long form, one row per
/// (excited level, ground level) pair.
pub fn render_fc_csv(vib: &VibrationalBasis) -> String {
    let mut out = String::from("excited_level,ground_level,overlap\n");
    for l in 0..vib.m_e() {
        for k in 0..vib.m_g() {
            out.push_str(&format!("{},{},{}\n", l, k, fmt_f64(vib.fc[[l, k]])));
        }
    }
    out
}

/// `autocorrelation.csv`: the complex autocorrelation series over time.
pub fn render_autocorrelation_csv(times_fs: &[f64], c: &[Complex64]) -> String {
    let mut out = String::from("time_fs,re,im\n");
    for (t, z) in times_fs.iter().zip(c) {
        out.push_str(&fmt_f64(*t));
        out.push(',');
        out.push_str(&fmt_f64(z.re));
        out.push(',');
        out.push_str(&fmt_f64(z.im));
        out.push('\n');
    }
    out
}

/// `oracle.csv`: per-time amplitude distance and carrier leakage between
/// the product-space engine and the symmetric engine.
pub fn render_oracle_csv(r: &ComparisonReport) -> String {
    let mut out = String::from("time_fs,distance,leakage\n");
    for i in 0..r.times_fs.len() {
        out.push_str(&fmt_f64(r.times_fs[i]));
        out.push(',');
        out.push_str(&fmt_f64(r.distance[i]));
        out.push(',');
        out.push_str(&fmt_f64(r.leakage[i]));
        out.push('\n');
    }
    out
}

/// `manifest.json`: what ran, with which resolved configuration, what it
/// produced, and how long it took. Wall time varies between runs; every
/// other output file is byte-deterministic.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_dimension: Option<usize>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<serde_json::Value>,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(subcommand: &str, config: RunConfig) -> Self {
        Manifest {
            tool: "molpol",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_owned(),
            preset: None,
            basis_dimension: None,
            outputs: Vec::new(),
            wall_time_s: 0.0,
            notes: None,
            config,
        }
    }
}

/// Pretty-printed manifest with a trailing newline.
pub fn render_manifest(m: &Manifest) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("manifest serializes");
    s.push('\n');
    s
}

/// `plot.gp`: a gnuplot script rendering whichever of the spectrum and
/// population files the run produced.
pub fn render_plot_script(spectrum: bool, populations: bool) -> String {
    let mut out = String::from(
        "# gnuplot script; run from this directory:  gnuplot plot.gp\n\
         set datafile separator ','\n\
         set key noenhanced\n\
         set terminal pngcairo size 960,640 font ',11'\n",
    );
    if spectrum {
        out.push_str(
            "\nset output 'spectrum.png'\n\
             set xlabel 'energy (eV)'\n\
             set ylabel 'absorption (arb. units)'\n\
             plot 'spectrum.csv' skip 1 using 1:2 with lines lw 2 title 'spectrum'\n",
        );
    }
    if populations {
        out.push_str(
            "\nset output 'populations.png'\n\
             set xlabel 'time (fs)'\n\
             set ylabel 'population'\n\
             set yrange [0:*]\n\
             set key outside right\n\
             plot for [i=2:*] 'populations.csv' using 1:i with lines lw 2 \\\n\
                 title columnheader(i)\n",
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Coupling, MoleculeCount};
    use ndarray::{Array1, Array2};

    #[test]
    fn floats_round_trip_and_pick_sensible_notation() {
        for &x in &[
            0.0,
            -0.0,
            1.0,
            -1.5,
            0.1 + 0.2,
            1e-4,
            9.9e-5,
            123456.0,
            1e6,
            6.324e-17,
            -2.7e300,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), if x == 0.0 { 0u64 } else { x.to_bits() }, "{s}");
        }
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(1e-4), "0.0001");
        assert_eq!(fmt_f64(9.9e-5), "9.9e-5");
        assert_eq!(fmt_f64(123456.0), "123456");
        assert_eq!(fmt_f64(1e6), "1e6");
    }

    #[test]
    fn spectrum_csv_is_exactly_header_plus_rows() {
        let s = SpectrumResult {
            frequencies: vec![1.0, 2.5],
            intensities: vec![0.25, 0.0],
            gamma: 0.002,
        };
        assert_eq!(render_spectrum_csv(&s), "omega_ev,intensity\n1,0.25\n2.5,0\n");
    }

    fn record() -> PopulationRecord {
        PopulationRecord {
            times_fs: vec![0.0, 1.0],
            photon: vec![1.0, 0.5],
            fc: vec![("A".into(), vec![0.0, 0.25]), ("B".into(), vec![0.0, 0.125])],
            dark: vec![0.0, 0.125],
            species_excited: vec![
                ("A".into(), vec![0.0, 0.3]),
                ("B".into(), vec![0.0, 0.2]),
            ],
            polariton: vec![
                ("upper".into(), vec![0.5, 0.25]),
                ("lower".into(), vec![0.5, 0.25]),
            ],
        }
    }

    #[test]
    fn population_columns_follow_the_requested_kinds() {
        let full = render_populations_csv(
            &record(),
            &[
                ObservableKind::Photon,
                ObservableKind::Fc,
                ObservableKind::Dark,
                ObservableKind::SpeciesExcited,
                ObservableKind::PolaritonUpper,
                ObservableKind::PolaritonLower,
            ],
        );
        let header = full.lines().next().unwrap();
        assert_eq!(
            header,
            "time_fs,photon,fc_A,fc_B,dark,excited_A,excited_B,\
             polariton_upper,polariton_lower"
        );
        assert_eq!(full.lines().nth(2).unwrap(), "1,0.5,0.25,0.125,0.125,0.3,0.2,0.25,0.25");

        let narrow = render_populations_csv(&record(), &[ObservableKind::Dark]);
        assert_eq!(narrow, "time_fs,dark\n0,0\n1,0.125\n");
    }

    #[test]
    fn rate_rows_leave_unfitted_fields_blank() {
        let rows = vec![
            RateResult {
                transition: Transition::LowerFromUpper,
                order: FgrOrder::Zeroth,
                n: 10,
                eta_ev: 1e-3,
                analytic_per_fs: 0.0125,
                fitted_per_fs: Some(0.0126),
                residual: Some(0.01),
            },
            RateResult {
                transition: Transition::LowerFromDark,
                order: FgrOrder::First,
                n: 20,
                eta_ev: 1e-3,
                analytic_per_fs: 0.5,
                fitted_per_fs: None,
                residual: None,
            },
        ];
        let text = render_rates_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "transition,order,n,eta_ev,analytic_per_fs,fitted_per_fs,residual"
        );
        assert_eq!(lines.next().unwrap(), "lower-from-upper,0,10,0.001,0.0125,0.0126,0.01");
        assert_eq!(lines.next().unwrap(), "lower-from-dark,1,20,0.001,0.5,,");
    }

    fn two_species_basis(kappa: usize) -> SymmetricBasis {
        let vib_a = VibrationalBasis::from_parts(
            Array1::from_vec(vec![0.0, 0.2]),
            Array1::from_vec(vec![2.0, 2.2]),
            Array2::from_elem((2, 2), 0.5),
        );
        let vib_b = VibrationalBasis::from_parts(
            Array1::from_vec(vec![0.0, 0.3]),
            Array1::from_vec(vec![2.5]),
            Array2::from_elem((1, 2), 0.7),
        );
        let species = vec![
            SpeciesSpec::new(
                "A".to_owned(),
                MoleculeCount::Infinite,
                Coupling::Collective(0.1),
                vib_a,
            )
            .unwrap(),
            SpeciesSpec::new(
                "B".to_owned(),
                MoleculeCount::Finite(3),
                Coupling::Collective(0.1),
                vib_b,
            )
            .unwrap(),
        ];
        crate::basis::enumerate(&species, kappa).unwrap()
    }

    #[test]
    fn basis_jsonl_has_one_valid_row_per_state() {
        let basis = two_species_basis(1);
        let cavity = CavitySpec { omega_c: 2.1 };
        let text = render_basis_jsonl(&basis, &cavity);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), basis.dim());

        let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(first["index"], 0);
        assert_eq!(first["kind"], "photonic");
        assert_eq!(first["energy_ev"], 2.1);
        assert!(first.get("species").is_none());

        let excitonic = lines
            .iter()
            .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
            .find(|v| v["kind"] == "excitonic")
            .unwrap();
        assert!(excitonic["species"].is_string());
        assert!(excitonic["level"].is_u64());
    }

    #[test]
    fn levels_and_fc_renderers_cover_every_entry() {
        let basis = two_species_basis(0);
        let levels = render_levels_csv(&basis.species);
        // Header + (2 ground + 2 excited) for A + (2 ground + 1 excited) for B.
        assert_eq!(levels.lines().count(), 1 + 4 + 3);
        assert!(levels.contains("A,ground,0,0\n"));
        assert!(levels.contains("B,excited,0,2.5\n"));

        let fc = render_fc_csv(&basis.species[0].vib);
        assert_eq!(fc.lines().count(), 1 + 4);
        assert!(fc.contains("1,0,0.5\n"));
    }

    #[test]
    fn manifest_serializes_the_resolved_config() {
        let cfg = RunConfig::preset("rate-table").unwrap();
        let mut m = Manifest::new("rates", cfg);
        m.preset = Some("rate-table".into());
        m.outputs = vec!["rates.csv".into()];
        let text = render_manifest(&m);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["tool"], "molpol");
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(v["preset"], "rate-table");
        assert_eq!(v["config"]["rates"]["collective_g"], 0.1);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn plot_script_covers_the_produced_files() {
        let both = render_plot_script(true, true);
        assert!(both.contains("spectrum.png") && both.contains("populations.png"));
        let only_spectrum = render_plot_script(true, false);
        assert!(!only_spectrum.contains("populations.png"));
    }

    #[test]
    fn series_renderers_emit_aligned_rows() {
        let auto = render_autocorrelation_csv(
            &[0.0, 0.5],
            &[Complex64::new(1.0, 0.0), Complex64::new(0.5, -0.25)],
        );
        assert_eq!(auto, "time_fs,re,im\n0,1,0\n0.5,0.5,-0.25\n");

        let report = ComparisonReport {
            times_fs: vec![0.0, 1.0],
            distance: vec![0.0, 1e-10],
            max_distance: 1e-10,
            leakage: vec![0.0, 2e-11],
            max_leakage: 2e-11,
        };
        assert_eq!(render_oracle_csv(&report), "time_fs,distance,leakage\n0,0,0\n1,1e-10,2e-11\n");
    }
}
