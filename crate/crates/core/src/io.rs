//! Run configuration files, snapshot files and run manifests.
//!
//! Configs are `key = value` lines with `#` comments. Snapshot files carry a
//! `# t=<t> N=<N> L=<L>` header followed by `x<TAB>u` rows printed with 17
//! significant digits, which round-trips every `f64` exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{default_dt, InitialCondition, SimulationConfig, Snapshot, DEFAULT_CFL};
use crate::params::{EquationKind, ModelParams};
use crate::spectral::{Grid, RealField};

/// Parsed `key = value` pairs, remembering the line each came from.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "empty key or value".into(),
                });
            }
            if let Some((first, _)) = entries.insert(key.to_string(), (line, value.to_string())) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key `{key}` (first set on line {first})"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn take_str(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    pub fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                line,
                message: format!("`{key}` expects a number, got `{v}`"),
            }),
        }
    }

    pub fn require_f64(&mut self, key: &str) -> Result<f64> {
        self.take_f64(key)?
            .ok_or_else(|| Error::validation(key, "is required"))
    }

    /// Fails on the first key nobody consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().min_by_key(|(_, (line, _))| *line) {
            None => Ok(()),
            Some((key, (line, _))) => Err(Error::Parse {
                line,
                message: format!("unknown key `{key}`"),
            }),
        }
    }
}

fn take_config(kv: &mut KeyValues) -> Result<SimulationConfig> {
    let (_, kind) = kv
        .take_str("kind")
        .ok_or_else(|| Error::validation("kind", "is required"))?;
    let kind: EquationKind = kind.parse().map_err(|e: Error| Error::validation("kind", e.to_string()))?;
    let params = ModelParams::new(kv.require_f64("delta")?, kv.require_f64("mu")?)?;

    let length = kv.require_f64("L")?;
    let n = kv.require_f64("N")?;
    if !(n >= 2.0 && n.fract() == 0.0 && n <= 1e9) {
        return Err(Error::validation("N", "must be a positive integer"));
    }
    let grid = Grid::new(length, n as usize)?;
    let t_end = kv.require_f64("t_end")?;

    let ic = match kv.take_str("initial_condition").map(|(_, v)| v) {
        None => InitialCondition::Cosine,
        Some(name) => match name.as_str() {
            "kink_pair" => InitialCondition::KinkPair,
            "kdv5_soliton" => InitialCondition::Kdv5Soliton { k: kv.require_f64("k")? },
            "gardner_soliton" => InitialCondition::GardnerSoliton { c0: kv.require_f64("c0")? },
            "cosine" => InitialCondition::Cosine,
            "elliptic" => InitialCondition::Elliptic { g3: kv.require_f64("g3")? },
            "constant" => InitialCondition::Constant(kv.require_f64("value")?),
            "file" => {
                let (_, path) = kv
                    .take_str("path")
                    .ok_or_else(|| Error::validation("path", "is required for file initial data"))?;
                InitialCondition::FromFile(PathBuf::from(path))
            }
            other => {
                return Err(Error::validation(
                    "initial_condition",
                    format!("unknown choice `{other}`"),
                ))
            }
        },
    };

    let cfl = kv.take_f64("cfl")?.unwrap_or(DEFAULT_CFL);
    let given_dt = kv.take_f64("dt")?;
    let given_interval = kv.take_f64("snapshot_interval")?;
    let dt = match given_dt {
        Some(dt) => dt,
        None => {
            let u0 = ic.sample(&params, grid)?;
            let dt = default_dt(kind, &params, grid, u0.max_abs(), cfl);
            match given_interval {
                Some(s) => dt.min(s),
                None if t_end > 0.0 => dt.min(t_end),
                None => dt,
            }
        }
    };
    let snapshot_interval = match given_interval {
        Some(s) => s,
        None if t_end > 0.0 => t_end.max(dt),
        None => dt,
    };
    let config = SimulationConfig {
        kind,
        params,
        grid,
        dt,
        t_end,
        snapshot_interval,
        initial_condition: ic,
    };
    config.validate()?;
    Ok(config)
}

/// Parses and validates a run configuration.
///
/// Required keys: `kind`, `delta`, `mu`, `L`, `N`, `t_end`. Optional:
/// `dt` (default from the stiffness heuristic), `cfl`, `snapshot_interval`
/// (default `t_end`), `initial_condition` (default `cosine`) and its
/// parameter `k`, `c0`, `g3`, `value` or `path`.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let mut kv = KeyValues::parse(text)?;
    let config = take_config(&mut kv)?;
    kv.finish()?;
    Ok(config)
}

/// Renders a config that [`parse_config`] reads back unchanged.
pub fn render_config(config: &SimulationConfig) -> String {
    let mut s = String::new();
    let g = config.grid;
    let _ = writeln!(s, "kind = {}", config.kind);
    let _ = writeln!(s, "delta = {:?}", config.params.delta);
    let _ = writeln!(s, "mu = {:?}", config.params.mu);
    let _ = writeln!(s, "L = {:?}", g.length());
    let _ = writeln!(s, "N = {}", g.n());
    let _ = writeln!(s, "t_end = {:?}", config.t_end);
    let _ = writeln!(s, "dt = {:?}", config.dt);
    let _ = writeln!(s, "snapshot_interval = {:?}", config.snapshot_interval);
    let _ = writeln!(s, "initial_condition = {}", config.initial_condition.name());
    match &config.initial_condition {
        InitialCondition::Kdv5Soliton { k } => {
            let _ = writeln!(s, "k = {k:?}");
        }
        InitialCondition::GardnerSoliton { c0 } => {
            let _ = writeln!(s, "c0 = {c0:?}");
        }
        InitialCondition::Elliptic { g3 } => {
            let _ = writeln!(s, "g3 = {g3:?}");
        }
        InitialCondition::Constant(v) => {
            let _ = writeln!(s, "value = {v:?}");
        }
        InitialCondition::FromFile(p) => {
            let _ = writeln!(s, "path = {}", p.display());
        }
        InitialCondition::KinkPair | InitialCondition::Cosine => {}
    }
    s
}

/// A canned experiment: a run config plus the experiment's own numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub experiment: String,
    pub config: SimulationConfig,
    pub extra: BTreeMap<String, f64>,
}

impl Fixture {
    pub fn get(&self, key: &str) -> Result<f64> {
        self.extra
            .get(key)
            .copied()
            .ok_or_else(|| Error::validation(key, format!("missing from the `{}` fixture", self.experiment)))
    }
}

fn fixture_keys(experiment: &str) -> Result<&'static [&'static str]> {
    Ok(match experiment {
        "kink-validation" => &["err_bound"],
        "soliton-perturbation" => &["mu_reference", "steady_bound", "destroyed_bound"],
        "gardner" => &["t_deform", "steady_bound", "deformed_bound"],
        "zabusky-kruskal" => &["kdv_dt", "t_early", "t_late", "kdv_bound", "contrast"],
        "recurrence" => &["t_fix", "skip", "first_minimum", "period", "period_tolerance"],
        other => return Err(Error::validation("experiment", format!("unknown experiment `{other}`"))),
    })
}

/// Parses an experiment fixture: an `experiment = <name>` line, the run
/// config keys, and the numeric keys that experiment understands.
pub fn parse_fixture(text: &str) -> Result<Fixture> {
    let mut kv = KeyValues::parse(text)?;
    let (_, experiment) = kv
        .take_str("experiment")
        .ok_or_else(|| Error::validation("experiment", "is required"))?;
    let mut extra = BTreeMap::new();
    for key in fixture_keys(&experiment)? {
        if let Some(v) = kv.take_f64(key)? {
            extra.insert(key.to_string(), v);
        }
    }
    let config = take_config(&mut kv)?;
    kv.finish()?;
    Ok(Fixture { experiment, config, extra })
}

/// The fixtures shipped with the crate, by experiment name.
pub const FIXTURES: [(&str, &str); 5] = [
    ("kink-validation", include_str!("../fixtures/kink-validation.conf")),
    ("soliton-perturbation", include_str!("../fixtures/soliton-perturbation.conf")),
    ("gardner", include_str!("../fixtures/gardner.conf")),
    ("zabusky-kruskal", include_str!("../fixtures/zabusky-kruskal.conf")),
    ("recurrence", include_str!("../fixtures/recurrence.conf")),
];

pub fn builtin_fixture(name: &str) -> Result<Fixture> {
    let (_, text) = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| {
            let names: Vec<_> = FIXTURES.iter().map(|(n, _)| *n).collect();
            Error::usage(format!("unknown experiment `{name}` (known: {})", names.join(", ")))
        })?;
    parse_fixture(text)
}

pub fn format_snapshot(s: &Snapshot) -> String {
    let grid = s.field.grid();
    let mut out = String::with_capacity(48 * grid.n() + 64);
    let _ = writeln!(out, "# t={:?} N={} L={:?}", s.t, grid.n(), grid.length());
    for (x, u) in grid.points().iter().zip(s.field.values()) {
        let _ = writeln!(out, "{x:.16e}\t{u:.16e}");
    }
    out
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty snapshot file".into(),
    })?;
    let bad_header = || Error::Parse {
        line: 1,
        message: format!("expected `# t=<t> N=<N> L=<L>`, got `{header}`"),
    };
    let rest = header.strip_prefix('#').ok_or_else(bad_header)?;
    let mut fields = BTreeMap::new();
    for part in rest.split_whitespace() {
        let (k, v) = part.split_once('=').ok_or_else(bad_header)?;
        fields.insert(k, v);
    }
    let t: f64 = fields.get("t").and_then(|v| v.parse().ok()).ok_or_else(bad_header)?;
    let n: usize = fields.get("N").and_then(|v| v.parse().ok()).ok_or_else(bad_header)?;
    let l: f64 = fields.get("L").and_then(|v| v.parse().ok()).ok_or_else(bad_header)?;
    let grid = Grid::new(l, n)?;

    let mut values = Vec::with_capacity(n);
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (_x, u) = (cols.next(), cols.next());
        let u: f64 = u
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `x<TAB>u`, got `{line}`"),
            })?;
        values.push(u);
    }
    if values.len() != n {
        return Err(Error::Parse {
            line: values.len() + 1,
            message: format!("expected {n} rows, found {}", values.len()),
        });
    }
    Ok(Snapshot {
        t,
        field: RealField::new(grid, values)?,
    })
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub t: f64,
    pub file: PathBuf,
}

/// Everything a run leaves behind.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    /// The run configuration as `key = value` lines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
    #[serde(default)]
    pub wall_time_seconds: f64,
    pub snapshots: Vec<ManifestEntry>,
    /// Extra output files beyond the snapshots.
    #[serde(default)]
    pub files: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_err: Option<f64>,
}

impl RunManifest {
    pub fn new(snapshots: Vec<ManifestEntry>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            snapshots,
            ..Self::default()
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::usage(e.to_string()))?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Loads the listed snapshots; relative paths resolve against `base`.
    pub fn load_snapshots(&self, base: &Path) -> Result<Vec<Snapshot>> {
        self.snapshots
            .iter()
            .map(|e| read_snapshot(base.join(&e.file)))
            .collect()
    }
}

/// Path of the manifest that [`write_snapshots`] writes for `prefix`.
pub fn manifest_path(prefix: &Path) -> PathBuf {
    with_suffix(prefix, ".manifest.json")
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<prefix>_<i>.tsv` per snapshot and `<prefix>.manifest.json`
/// listing them. Manifest paths are relative to the manifest's directory.
pub fn write_snapshots(snapshots: &[Snapshot], prefix: impl AsRef<Path>) -> Result<RunManifest> {
    let prefix = prefix.as_ref();
    if snapshots.is_empty() {
        return Err(Error::usage("no snapshots to write"));
    }
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let width = (snapshots.len() - 1).to_string().len().max(4);
    let mut entries = Vec::with_capacity(snapshots.len());
    for (i, s) in snapshots.iter().enumerate() {
        let path = with_suffix(prefix, &format!("_{i:0width$}.tsv"));
        fs::write(&path, format_snapshot(s)).map_err(|e| Error::io(&path, e))?;
        let file = PathBuf::from(path.file_name().expect("snapshot path has a file name"));
        entries.push(ManifestEntry { t: s.t, file });
    }
    let manifest = RunManifest::new(entries);
    manifest.write(manifest_path(prefix))?;
    Ok(manifest)
}

/// Tab-separated table with a `#` header line.
pub fn format_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = format!("# {}\n", header.join("\t"));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}
