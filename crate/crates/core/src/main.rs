use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fpu5::exact::{elliptic_coeffs, g3_for_speed, Branch, GardnerSoliton, Kdv5Soliton, KinkSolution};
use fpu5::experiments::{
    kink_validation, recurrence_scan, run, run_fixture, InitialCondition, ShiftMode, Snapshot,
};
use fpu5::io::{
    builtin_fixture, format_table, manifest_path, parse_config, render_config, write_snapshots,
    RunManifest,
};
use fpu5::painleve::{fuchs_indices, leading_balance, passes_painleve};
use fpu5::params::velocity_curve;
use fpu5::{Grid, ModelParams, RealField};

#[derive(Parser)]
#[command(name = "fpu5", version, about = "Spectral simulations of the fifth-order FPU continuum equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file and write snapshots plus a manifest.
    Simulate {
        config: PathBuf,
        /// Output prefix; defaults to the config path without its extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a closed-form solution on a grid.
    Exact {
        kind: ExactKind,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long = "length", short = 'L')]
        length: f64,
        #[arg(long, short = 'N', default_value_t = 512)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Wavenumber of the kdv5 soliton.
        #[arg(long)]
        k: Option<f64>,
        /// Speed of the gardner soliton or the elliptic wave.
        #[arg(long)]
        c0: Option<f64>,
        /// Invariant g3 of the elliptic wave (instead of --c0).
        #[arg(long)]
        g3: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kink validation run for a config with kink_pair initial data.
    Validate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan a manifest's snapshots for recurrence.
    Recurrence {
        manifest: PathBuf,
        #[arg(long = "t-fix")]
        t_fix: f64,
        #[arg(long, default_value_t = 0.0)]
        skip: f64,
        /// Compare without circular shifts.
        #[arg(long)]
        fixed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leading balance, indicial polynomial and Fuchs indices.
    Painleve {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Kink speed as a function of mu.
    VelocityCurve {
        #[arg(long = "mu-min")]
        mu_min: f64,
        #[arg(long = "mu-max")]
        mu_max: f64,
        #[arg(short = 'n', default_value_t = 50)]
        n: usize,
    },
    /// Run a built-in experiment fixture.
    Experiment {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactKind {
    Kink,
    Elliptic,
    Gardner,
    Kdv5,
}

fn default_prefix(config: &Path, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| config.with_extension(""))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn sibling(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn file_name(path: &Path) -> PathBuf {
    PathBuf::from(path.file_name().unwrap_or(path.as_os_str()))
}

fn simulate(config: PathBuf, out: Option<PathBuf>) -> Result<()> {
    let started = Instant::now();
    let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = parse_config(&text).with_context(|| config.display().to_string())?;
    let result = run(&cfg)?;
    let prefix = default_prefix(&config, out);
    let mut manifest = write_snapshots(&result.snapshots, &prefix)?;
    manifest.config = Some(render_config(&cfg));
    manifest.mass_drift = Some(result.mass_drift);
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write(manifest_path(&prefix))?;
    println!(
        "{} snapshots, {} steps, mass drift {:.3e}",
        result.snapshots.len(),
        result.steps,
        result.mass_drift
    );
    println!("manifest: {}", manifest_path(&prefix).display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn exact(
    kind: ExactKind,
    delta: f64,
    mu: f64,
    length: f64,
    n: usize,
    t: f64,
    k: Option<f64>,
    c0: Option<f64>,
    g3: Option<f64>,
    out: PathBuf,
) -> Result<()> {
    let started = Instant::now();
    let params = ModelParams::new(delta, mu)?;
    let grid = Grid::new(length, n)?;
    let centre = 0.5 * length;
    let field = match kind {
        ExactKind::Kink => {
            let s = KinkSolution::new(params, Branch::Plus, 0.0)?;
            RealField::from_fn(grid, |x| s.eval(x - centre - s.c0 * t))?
        }
        ExactKind::Gardner => {
            let c0 = c0.context("gardner needs --c0")?;
            GardnerSoliton::new(c0, params)?.at(centre).sample(grid, t)?
        }
        ExactKind::Kdv5 => {
            let k = k.context("kdv5 needs --k")?;
            Kdv5Soliton::new(k, delta)?.at(centre).sample(grid, t)?
        }
        ExactKind::Elliptic => {
            let g3 = match (g3, c0) {
                (Some(g3), None) => g3,
                (None, Some(c0)) => g3_for_speed(&params, c0)?,
                _ => bail!("elliptic needs exactly one of --g3 and --c0"),
            };
            let mut s = elliptic_coeffs(&params, g3)?;
            if let Ok(shifted) = s.on_half_period_line() {
                if shifted.singularities().is_empty() {
                    s = shifted;
                }
            }
            let values = grid
                .points()
                .iter()
                .map(|&x| s.eval(x - s.c0 * t))
                .collect::<fpu5::Result<Vec<_>>>()?;
            RealField::new(grid, values)?
        }
    };
    let mut manifest = write_snapshots(&[Snapshot { t, field }], &out)?;
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write(manifest_path(&out))?;
    println!("manifest: {}", manifest_path(&out).display());
    Ok(())
}

fn validate(config: PathBuf, out: Option<PathBuf>) -> Result<()> {
    let started = Instant::now();
    let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = parse_config(&text).with_context(|| config.display().to_string())?;
    if cfg.initial_condition != InitialCondition::KinkPair {
        bail!("validate needs `initial_condition = kink_pair`");
    }
    let (report, result) = kink_validation(cfg.params, cfg.grid, Some(cfg.dt), cfg.t_end, cfg.snapshot_interval)?;
    let prefix = default_prefix(&config, out);
    let mut manifest = write_snapshots(&result.snapshots, &prefix)?;

    let table = sibling(&prefix, ".err.tsv");
    let rows: Vec<Vec<f64>> = report.times.iter().zip(&report.err).map(|(t, e)| vec![*t, *e]).collect();
    write_file(&table, &format_table(&["t", "err"], &rows))?;
    let json = sibling(&prefix, ".report.json");
    write_file(&json, &(serde_json::to_string_pretty(&report)? + "\n"))?;

    manifest.config = Some(render_config(&cfg));
    manifest.files = vec![file_name(&table), file_name(&json)];
    manifest.mass_drift = Some(result.mass_drift);
    manifest.max_err = Some(report.max_err);
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write(manifest_path(&prefix))?;
    print!("{}", format_table(&["t", "err"], &rows));
    println!("max err {:.6e}, mass drift {:.3e}", report.max_err, result.mass_drift);
    Ok(())
}

fn recurrence(manifest: PathBuf, t_fix: f64, skip: f64, fixed: bool, out: Option<PathBuf>) -> Result<()> {
    let started = Instant::now();
    let m = RunManifest::read(&manifest)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let snapshots = m.load_snapshots(base)?;
    let mode = if fixed { ShiftMode::Fixed } else { ShiftMode::Circular };
    let report = recurrence_scan(&snapshots, t_fix, skip, mode)?;

    let prefix = out.unwrap_or_else(|| {
        let s = manifest.to_string_lossy();
        PathBuf::from(s.strip_suffix(".manifest.json").unwrap_or(&s).to_string() + "_recurrence")
    });
    let rows: Vec<Vec<f64>> = report.times.iter().zip(&report.distance).map(|(t, d)| vec![*t, *d]).collect();
    let table = sibling(&prefix, ".tsv");
    write_file(&table, &format_table(&["t", "d"], &rows))?;
    let json = sibling(&prefix, ".report.json");
    write_file(&json, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    let mut own = RunManifest::new(Vec::new());
    own.files = vec![file_name(&table), file_name(&json)];
    own.wall_time_seconds = started.elapsed().as_secs_f64();
    own.write(sibling(&prefix, ".manifest.json"))?;

    print!("{}", format_table(&["t", "d"], &rows));
    println!("minima {:?}", report.minima);
    match report.period {
        Some(p) => println!("period {p}"),
        None => println!("period none (fewer than two minima)"),
    }
    Ok(())
}

fn painleve(mu: f64, delta: f64) -> Result<()> {
    let params = ModelParams::new(delta, mu)?;
    let balance = leading_balance(&params)?;
    let fuchs = fuchs_indices(&params)?;
    let verdict = passes_painleve(&fuchs);
    println!("pole order p = {}", balance.p);
    println!("a0 = {:+.12} or {:+.12}", balance.a0[0], balance.a0[1]);
    let poly: Vec<String> = fuchs.polynomial.iter().map(|c| c.to_string()).collect();
    println!("indicial polynomial (ascending) [{}]", poly.join(", "));
    for r in &fuchs.roots {
        if r.im == 0.0 {
            println!("index {:.6}", r.re);
        } else {
            println!("index {:.6} {} {:.6}i", r.re, if r.im < 0.0 { '-' } else { '+' }, r.im.abs());
        }
    }
    println!("{} ({})", if verdict.passes { "passes" } else { "does not pass" }, verdict.reason);
    Ok(())
}

fn experiment(name: String, out: Option<PathBuf>) -> Result<()> {
    let started = Instant::now();
    let fixture = builtin_fixture(&name)?;
    let outcome = run_fixture(&fixture)?;
    let prefix = out.unwrap_or_else(|| PathBuf::from(&name));

    // each run gets its own snapshot manifest, listed in the top-level one
    let mut files = Vec::new();
    for (label, r) in &outcome.runs {
        let run_prefix = sibling(&prefix, &format!("_{label}"));
        write_snapshots(&r.snapshots, &run_prefix)?;
        files.push(file_name(&manifest_path(&run_prefix)));
    }
    for table in &outcome.tables {
        let path = sibling(&prefix, &format!("_{}.tsv", table.name));
        let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
        write_file(&path, &format_table(&header, &table.rows))?;
        files.push(file_name(&path));
    }
    let report = sibling(&prefix, ".report.json");
    write_file(&report, &(serde_json::to_string_pretty(&outcome)? + "\n"))?;
    files.push(file_name(&report));

    let mut manifest = RunManifest::new(Vec::new());
    manifest.config = Some(render_config(&fixture.config));
    manifest.files = files;
    manifest.mass_drift = Some(outcome.max_mass_drift());
    manifest.max_err = outcome.validation.as_ref().map(|v| v.max_err);
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write(sibling(&prefix, ".manifest.json"))?;

    for c in &outcome.checks {
        let status = match (c.passed, c.soft) {
            (true, _) => "ok",
            (false, true) => "drift",
            (false, false) => "FAILED",
        };
        println!("{status:7} {}: {:.6e} (bound {:.6e})", c.name, c.value, c.bound);
    }
    if !outcome.passed() {
        bail!("experiment `{name}` failed its checks");
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => simulate(config, out),
        Command::Exact { kind, delta, mu, length, n, t, k, c0, g3, out } => {
            exact(kind, delta, mu, length, n, t, k, c0, g3, out)
        }
        Command::Validate { config, out } => validate(config, out),
        Command::Recurrence { manifest, t_fix, skip, fixed, out } => recurrence(manifest, t_fix, skip, fixed, out),
        Command::Painleve { mu, delta } => painleve(mu, delta),
        Command::VelocityCurve { mu_min, mu_max, n } => {
            let rows: Vec<Vec<f64>> = velocity_curve(mu_min, mu_max, n)?.into_iter().map(|(m, c)| vec![m, c]).collect();
            print!("{}", format_table(&["mu", "c0"], &rows));
            Ok(())
        }
        Command::Experiment { name, out } => experiment(name, out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
