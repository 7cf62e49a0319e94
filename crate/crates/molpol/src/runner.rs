//! Orchestration behind the command-line interface: each subcommand's body
//! lives here as a plain function over a validated [`RunConfig`], so the
//! behaviors stay testable without spawning processes.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use crate::basis::{self, MoleculeCount, SymmetricBasis};
use crate::config::{InitialSelector, ObservableKind, RunConfig};
use crate::dynamics::{self, StateVector};
use crate::error::{ConfigError, Error};
use crate::hamiltonian::{self, CavitySpec, EigenSystem};
use crate::io::{self, Manifest};
use crate::observables::{self, PolaritonProjector};
use crate::oracle;
use crate::rates::{self, RateResult};

/// Invocation options shared by the file-producing subcommands.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Directory receiving every output file.
    pub out_dir: PathBuf,
    /// Preset name recorded in the manifest, when one was used.
    pub preset: Option<String>,
    /// Emit `plot.gp` even if the config does not ask for it.
    pub emit_plot: bool,
    /// Worker threads for independent sweep points.
    pub jobs: usize,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunOptions { out_dir: out_dir.into(), preset: None, emit_plot: false, jobs: 1 }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Config(ConfigError::Invalid(msg.into()))
}

/// Basis, cavity, and eigensystem for a config with species.
struct Solved {
    basis: SymmetricBasis,
    cavity: CavitySpec,
    eigen: EigenSystem,
}

fn prepare(cfg: &RunConfig) -> Result<(SymmetricBasis, CavitySpec), Error> {
    cfg.ensure_valid()?;
    let species = cfg.resolve_species()?;
    if species.is_empty() {
        return Err(invalid("species: at least one species is required here"));
    }
    let basis = basis::enumerate_with_cap(&species, cfg.kappa, cfg.dimension_cap())?;
    let cavity = cfg
        .cavity
        .clone()
        .ok_or_else(|| invalid("cavity: section required when species are present"))?;
    Ok((basis, cavity))
}

fn solve(cfg: &RunConfig) -> Result<Solved, Error> {
    let (basis, cavity) = prepare(cfg)?;
    let h = hamiltonian::build(&basis, &cavity)?;
    let eigen = h.diagonalize()?;
    Ok(Solved { basis, cavity, eigen })
}

fn initial_state(cfg: &RunConfig, basis: &SymmetricBasis) -> Result<StateVector, Error> {
    match cfg.initial_selector()? {
        InitialSelector::Photonic => Ok(dynamics::initial_photonic_state(basis)),
        InitialSelector::FranckCondon(label) => {
            Ok(observables::fc_wavepacket_state(basis, &label)?)
        }
    }
}

/// Polariton projectors implied by the observable selection.
fn projectors(cfg: &RunConfig) -> Vec<(String, PolaritonProjector)> {
    let kinds = cfg.observable_set();
    let mut out = Vec::new();
    if kinds.contains(&ObservableKind::PolaritonUpper) {
        out.push(("upper".to_owned(), PolaritonProjector::upper()));
    }
    if kinds.contains(&ObservableKind::PolaritonLower) {
        out.push(("lower".to_owned(), PolaritonProjector::lower()));
    }
    out
}

fn emit(
    opts: &RunOptions,
    manifest: &mut Manifest,
    name: &str,
    content: &str,
) -> Result<(), Error> {
    io::write_file(&opts.out_dir, name, content)?;
    manifest.outputs.push(name.to_owned());
    println!("wrote {}", opts.out_dir.join(name).display());
    Ok(())
}

fn finish(
    opts: &RunOptions,
    mut manifest: Manifest,
    started: Instant,
) -> Result<(), Error> {
    manifest.preset = opts.preset.clone();
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.outputs.push("manifest.json".to_owned());
    io::write_file(&opts.out_dir, "manifest.json", &io::render_manifest(&manifest))?;
    println!("wrote {}", opts.out_dir.join("manifest.json").display());
    Ok(())
}

/// `validate`: list every schema violation, or describe the run the config
/// would perform (exact basis dimension and storage estimate) without doing
/// any heavy work.
pub fn validate(cfg: &RunConfig) -> Result<String, Error> {
    let violations = cfg.violations();
    if !violations.is_empty() {
        return Err(Error::Config(ConfigError::Invalid(violations.join("\n"))));
    }
    let pf = cfg.preflight()?;
    Ok(format!("configuration valid\n{pf}"))
}

/// `solve-vib`: solve or load every species' vibrational problem and write
/// the level energies and overlap matrices.
pub fn solve_vib(cfg: &RunConfig, opts: &RunOptions) -> Result<(), Error> {
    let started = Instant::now();
    cfg.ensure_valid()?;
    let species = cfg.resolve_species()?;
    if species.is_empty() {
        return Err(invalid("species: at least one species is required here"));
    }
    let mut manifest = Manifest::new("solve-vib", cfg.clone());
    emit(opts, &mut manifest, "levels.csv", &io::render_levels_csv(&species))?;
    for sp in &species {
        println!(
            "species {}: {} ground / {} excited levels, vertical centroid {} eV",
            sp.label,
            sp.vib.m_g(),
            sp.vib.m_e(),
            io::fmt_f64(sp.vib.vertical_centroid()),
        );
        emit(
            opts,
            &mut manifest,
            &format!("fc_{}.csv", sp.label),
            &io::render_fc_csv(&sp.vib),
        )?;
    }
    finish(opts, manifest, started)
}

/// `build`: enumerate the symmetric basis and write it with diagonal
/// energies.
pub fn build(cfg: &RunConfig, opts: &RunOptions) -> Result<(), Error> {
    let started = Instant::now();
    let (basis, cavity) = prepare(cfg)?;
    println!("basis dimension {} at truncation order {}", basis.dim(), basis.kappa);
    let mut manifest = Manifest::new("build", cfg.clone());
    manifest.basis_dimension = Some(basis.dim());
    emit(opts, &mut manifest, "basis.jsonl", &io::render_basis_jsonl(&basis, &cavity))?;
    finish(opts, manifest, started)
}

fn propagation_record(
    cfg: &RunConfig,
    solved: &Solved,
) -> Result<(observables::PopulationRecord, Vec<num_complex::Complex64>), Error> {
    let time = cfg
        .time
        .clone()
        .ok_or_else(|| invalid("time: section required for propagation"))?;
    let grid = time.to_grid()?;
    let v0 = initial_state(cfg, &solved.basis)?;
    let traj = dynamics::propagate(&solved.eigen, &v0, &grid)?;
    let record = observables::population_record(&solved.basis, &traj, &projectors(cfg))?;
    let auto = dynamics::autocorrelation_series(&solved.eigen, &v0, &grid)?;
    Ok((record, auto))
}

/// `propagate`: time-evolve the initial state and write populations plus the
/// autocorrelation series.
pub fn propagate(cfg: &RunConfig, opts: &RunOptions) -> Result<(), Error> {
    let started = Instant::now();
    let solved = solve(cfg)?;
    let (record, auto) = propagation_record(cfg, &solved)?;
    println!(
        "propagated {} states over {} samples to {} fs",
        solved.basis.dim(),
        record.times_fs.len(),
        io::fmt_f64(*record.times_fs.last().unwrap_or(&0.0)),
    );
    let mut manifest = Manifest::new("propagate", cfg.clone());
    manifest.basis_dimension = Some(solved.basis.dim());
    emit(
        opts,
        &mut manifest,
        "populations.csv",
        &io::render_populations_csv(&record, &cfg.observable_set()),
    )?;
    emit(
        opts,
        &mut manifest,
        "autocorrelation.csv",
        &io::render_autocorrelation_csv(&record.times_fs, &auto),
    )?;
    if cfg.emit_plot || opts.emit_plot {
        emit(opts, &mut manifest, "plot.gp", &io::render_plot_script(false, true))?;
    }
    finish(opts, manifest, started)
}

/// `populations`: like `propagate`, but writes only the population columns.
pub fn populations(cfg: &RunConfig, opts: &RunOptions) -> Result<(), Error> {
    let started = Instant::now();
    let solved = solve(cfg)?;
    let (record, _) = propagation_record(cfg, &solved)?;
    let mut manifest = Manifest::new("populations", cfg.clone());
    manifest.basis_dimension = Some(solved.basis.dim());
    emit(
        opts,
        &mut manifest,
        "populations.csv",
        &io::render_populations_csv(&record, &cfg.observable_set()),
    )?;
    if cfg.emit_plot || opts.emit_plot {
        emit(opts, &mut manifest, "plot.gp", &io::render_plot_script(false, true))?;
    }
    finish(opts, manifest, started)
}

fn spectrum_result(
    cfg: &RunConfig,
    solved: &Solved,
) -> Result<dynamics::SpectrumResult, Error> {
    let sc = cfg
        .spectrum
        .clone()
        .ok_or_else(|| invalid("spectrum: section required for spectra"))?;
    let grid = sc.time_grid()?;
    let v0 = initial_state(cfg, &solved.basis)?;
    let c = dynamics::autocorrelation_series(&solved.eigen, &v0, &grid)?;
    Ok(dynamics::spectrum(&c, &grid, sc.gamma, &sc.window())?)
}

/// `spectrum`: write the broadened absorption spectrum over the configured
/// window.
pub fn spectrum(cfg: &RunConfig, opts: &RunOptions) -> Result<(), Error> {
    let started = Instant::now();
    let solved = solve(cfg)?;
    let spec = spectrum_result(cfg, &solved)?;
    println!(
        "spectrum over [{}, {}] eV ({} points), broadening {} eV",
        io::fmt_f64(*spec.frequencies.first().unwrap()),
        io::fmt_f64(*spec.frequencies.last().unwrap()),
        spec.frequencies.len(),
        io::fmt_f64(spec.gamma),
    );
    let mut manifest = Manifest::new("spectrum", cfg.clone());
    manifest.basis_dimension = Some(solved.basis.dim());
    emit(opts, &mut manifest, "spectrum.csv", &io::render_spectrum_csv(&spec))?;
    if cfg.emit_plot || opts.emit_plot {
        emit(opts, &mut manifest, "plot.gp", &io::render_plot_script(true, false))?;
    }
    finish(opts, manifest, started)
}

/// Run `n_tasks` independent jobs on up to `jobs` threads, preserving task
/// order in the returned vector regardless of scheduling.
fn run_indexed<T, F>(n_tasks: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let jobs = jobs.max(1).min(n_tasks.max(1));
    if jobs == 1 {
        return (0..n_tasks).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut collected: Vec<(usize, T)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|_| {
                s.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= n_tasks {
                            break;
                        }
                        local.push((i, f(i)));
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("rate worker panicked"))
            .collect()
    });
    collected.sort_by_key(|&(i, _)| i);
    collected.into_iter().map(|(_, t)| t).collect()
}

fn rate_rows(cfg: &RunConfig, jobs: usize) -> Result<Vec<RateResult>, Error> {
    let rc = cfg
        .rates
        .clone()
        .ok_or_else(|| invalid("rates: section required for the rate sweep"))?;
    let mut tasks = Vec::new();
    for &transition in &rc.transitions {
        for &order in &rc.orders {
            for &n in &rc.n_values {
                tasks.push((order, transition, n));
            }
        }
    }
    let results = run_indexed(tasks.len(), jobs, |i| {
        let (order, transition, n) = tasks[i];
        match &rc.bath {
            Some(bath) => {
                let g = rc.collective_g / (n as f64).sqrt();
                rates::fgr_rate(order, transition, n, g, bath, rc.eta)
            }
            None if rc.fit => rates::measure_rate(order, transition, n, rc.collective_g, rc.eta),
            None => {
                let g = rc.collective_g / (n as f64).sqrt();
                let bath = rates::benchmark_bath(transition, rc.collective_g);
                rates::fgr_rate(order, transition, n, g, &bath, rc.eta)
            }
        }
    });
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    Ok(rows)
}

/// `rates`: sweep the configured (transition, order, N) grid, in parallel
/// when `--jobs` exceeds one, and write the rate table.
pub fn rates(cfg: &RunConfig, opts: &RunOptions) -> Result<(), Error> {
    let started = Instant::now();
    cfg.ensure_valid()?;
    let rows = rate_rows(cfg, opts.jobs)?;
    println!("computed {} rate points on {} worker(s)", rows.len(), opts.jobs.max(1));
    let mut manifest = Manifest::new("rates", cfg.clone());
    emit(opts, &mut manifest, "rates.csv", &io::render_rates_csv(&rows))?;
    finish(opts, manifest, started)
}

/// `oracle-compare`: propagate the same photonic initial condition through
/// the untruncated product engine and the symmetric engine, and write the
/// per-time amplitude distance and carrier leakage.
pub fn oracle_compare(cfg: &RunConfig, opts: &RunOptions) -> Result<(), Error> {
    let started = Instant::now();
    cfg.ensure_valid()?;
    let species = cfg.resolve_species()?;
    if species.len() != 1 {
        return Err(invalid(format!(
            "species: the oracle comparison needs exactly one species, got {}",
            species.len()
        )));
    }
    let sp = &species[0];
    let n = match sp.count {
        MoleculeCount::Finite(n) => n,
        MoleculeCount::Infinite => {
            return Err(invalid(
                "species[0].count: the oracle comparison needs a finite molecule count",
            ));
        }
    };
    let cavity = cfg
        .cavity
        .clone()
        .ok_or_else(|| invalid("cavity: section required when species are present"))?;
    let grid = cfg
        .time
        .clone()
        .ok_or_else(|| invalid("time: section required for the oracle comparison"))?
        .to_grid()?;
    let report =
        oracle::compare_dynamics(n, &sp.vib, sp.single_g(), cavity.omega_c, cfg.kappa, &grid)?;
    println!(
        "N={n}, kappa={}: max amplitude distance {}, max carrier leakage {}",
        cfg.kappa,
        io::fmt_f64(report.max_distance),
        io::fmt_f64(report.max_leakage),
    );
    let mut manifest = Manifest::new("oracle-compare", cfg.clone());
    manifest.notes = Some(serde_json::json!({
        "n": n,
        "kappa": cfg.kappa,
        "max_distance": report.max_distance,
        "max_leakage": report.max_leakage,
    }));
    emit(opts, &mut manifest, "oracle.csv", &io::render_oracle_csv(&report))?;
    finish(opts, manifest, started)
}

/// `run`: the full bundle for a config — basis, populations, spectrum, and
/// rate table, each when the config asks for it, plus the plot script and
/// manifest.
pub fn full_run(cfg: &RunConfig, opts: &RunOptions) -> Result<(), Error> {
    let started = Instant::now();
    cfg.ensure_valid()?;
    let mut manifest = Manifest::new("run", cfg.clone());
    let mut wrote_spectrum = false;
    let mut wrote_populations = false;

    if !cfg.species.is_empty() {
        let solved = solve(cfg)?;
        println!(
            "basis dimension {} at truncation order {}",
            solved.basis.dim(),
            solved.basis.kappa
        );
        manifest.basis_dimension = Some(solved.basis.dim());
        emit(
            opts,
            &mut manifest,
            "basis.jsonl",
            &io::render_basis_jsonl(&solved.basis, &solved.cavity),
        )?;

        let mut notes = serde_json::Map::new();
        if cfg.kappa == 0 {
            let fc_yields = observables::statistical_yield_fc(&solved.basis, &solved.cavity)?;
            let mut eigen_yields = serde_json::Map::new();
            let mut fc_map = serde_json::Map::new();
            for (label, y) in &fc_yields {
                fc_map.insert(label.clone(), serde_json::json!(y));
                let full = observables::statistical_yield(&solved.basis, &solved.eigen, label)?;
                eigen_yields.insert(label.clone(), serde_json::json!(full));
                println!(
                    "species {label}: eigenstate yield {}, restricted-level estimate {}",
                    io::fmt_f64(full),
                    io::fmt_f64(*y),
                );
            }
            notes.insert("statistical_yield".to_owned(), eigen_yields.into());
            notes.insert("statistical_yield_fc".to_owned(), fc_map.into());
        }
        if !notes.is_empty() {
            manifest.notes = Some(notes.into());
        }

        if cfg.time.is_some() {
            let (record, _) = propagation_record(cfg, &solved)?;
            emit(
                opts,
                &mut manifest,
                "populations.csv",
                &io::render_populations_csv(&record, &cfg.observable_set()),
            )?;
            wrote_populations = true;
        }
        if cfg.spectrum.is_some() {
            let spec = spectrum_result(cfg, &solved)?;
            emit(opts, &mut manifest, "spectrum.csv", &io::render_spectrum_csv(&spec))?;
            wrote_spectrum = true;
        }
    }

    if cfg.rates.is_some() {
        let rows = rate_rows(cfg, opts.jobs)?;
        println!("computed {} rate points on {} worker(s)", rows.len(), opts.jobs.max(1));
        emit(opts, &mut manifest, "rates.csv", &io::render_rates_csv(&rows))?;
    }

    if (cfg.emit_plot || opts.emit_plot) && (wrote_spectrum || wrote_populations) {
        emit(
            opts,
            &mut manifest,
            "plot.gp",
            &io::render_plot_script(wrote_spectrum, wrote_populations),
        )?;
    }
    finish(opts, manifest, started)
}
