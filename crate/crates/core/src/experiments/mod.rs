//! Time integration driver and the numerical experiments built on it.

mod canned;
mod metrics;
mod recurrence;
mod scenarios;

use std::path::PathBuf;

use crate::equations::{linear_symbol, Nonlinearity};
use crate::error::{Error, Result};
use crate::exact::{elliptic_coeffs, EllipticLine, GardnerSoliton, Kdv5Soliton};
use crate::params::{EquationKind, ModelParams};
use crate::spectral::{Grid, IfRk4, RealField, Spectral};

pub use canned::{run_fixture, Check, ExperimentOutcome, Table};
pub use metrics::{best_integer_shift, best_shift, err_metric, shape_score, ShiftMatch, ShiftMode};
pub use recurrence::{local_minima, recurrence_scan, RecurrenceReport, MINIMUM_PROMINENCE};
pub use scenarios::{
    fiducial_mask, gardner_soliton_experiment, kink_pair, kink_validation, recurrence_reconstruction,
    soliton_perturbation, zabusky_kruskal, ComparedRun, PairedRuns, ValidationReport, ZabuskyKruskal,
};

/// Relative drift of the spatial mean tolerated in any run.
pub const MASS_TOLERANCE: f64 = 1e-10;

/// Default bound on `dt` times the explicit stiffness estimate.
pub const DEFAULT_CFL: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: RealField,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Kink on the left half, mirrored anti-kink on the right half.
    KinkPair,
    /// Fifth-order soliton with wavenumber `k`, centred in the domain.
    Kdv5Soliton { k: f64 },
    /// Gardner soliton with speed `c0`, centred in the domain.
    GardnerSoliton { c0: f64 },
    /// `cos(2πx/L)`.
    Cosine,
    /// Periodic elliptic profile; the domain must hold whole periods.
    Elliptic { g3: f64 },
    Constant(f64),
    FromFile(PathBuf),
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::KinkPair => "kink_pair",
            InitialCondition::Kdv5Soliton { .. } => "kdv5_soliton",
            InitialCondition::GardnerSoliton { .. } => "gardner_soliton",
            InitialCondition::Cosine => "cosine",
            InitialCondition::Elliptic { .. } => "elliptic",
            InitialCondition::Constant(_) => "constant",
            InitialCondition::FromFile(_) => "file",
        }
    }

    pub fn sample(&self, params: &ModelParams, grid: Grid) -> Result<RealField> {
        let l = grid.length();
        match self {
            InitialCondition::KinkPair => {
                let s = crate::exact::KinkSolution::new(*params, crate::exact::Branch::Plus, 0.0)?;
                kink_pair(&s, grid)
            }
            InitialCondition::Kdv5Soliton { k } => Kdv5Soliton::new(*k, params.delta)?.at(0.5 * l).sample(grid, 0.0),
            InitialCondition::GardnerSoliton { c0 } => GardnerSoliton::new(*c0, *params)?.at(0.5 * l).sample(grid, 0.0),
            InitialCondition::Cosine => {
                RealField::from_fn(grid, |x| (2.0 * std::f64::consts::PI * x / l).cos())
            }
            InitialCondition::Elliptic { g3 } => {
                let mut s = elliptic_coeffs(params, *g3)?;
                if let Ok(shifted) = s.on_half_period_line() {
                    if shifted.singularities().is_empty() {
                        s = shifted;
                    }
                }
                if s.line == EllipticLine::Real || !s.singularities().is_empty() {
                    return Err(Error::domain(format!(
                        "elliptic profile with g3 = {g3} has real poles"
                    )));
                }
                let periods = l / s.period();
                if (periods - periods.round()).abs() > 1e-9 * periods.max(1.0) || periods.round() < 1.0 {
                    return Err(Error::validation(
                        "L",
                        format!("must be a whole number of periods ({})", s.period()),
                    ));
                }
                let values = grid.points().iter().map(|&x| s.eval(x)).collect::<Result<Vec<_>>>()?;
                RealField::new(grid, values)
            }
            InitialCondition::Constant(c) => RealField::from_fn(grid, |_| *c),
            InitialCondition::FromFile(path) => {
                let snap = crate::io::read_snapshot(path)?;
                if snap.field.grid() != grid {
                    return Err(Error::validation(
                        "initial_condition",
                        format!("{} does not match the configured grid", path.display()),
                    ));
                }
                Ok(snap.field)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub kind: EquationKind,
    pub params: ModelParams,
    pub grid: Grid,
    /// Upper bound on the time step; the driver shrinks it to land on snapshots.
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_interval: f64,
    pub initial_condition: InitialCondition,
}

impl SimulationConfig {
    /// Config with the heuristic time step for the sampled initial condition.
    pub fn new(
        kind: EquationKind,
        params: ModelParams,
        grid: Grid,
        t_end: f64,
        snapshot_interval: f64,
        initial_condition: InitialCondition,
    ) -> Result<Self> {
        let u0 = initial_condition.sample(&params, grid)?;
        let dt = default_dt(kind, &params, grid, u0.max_abs(), DEFAULT_CFL).min(snapshot_interval);
        let config = Self {
            kind,
            params,
            grid,
            dt,
            t_end,
            snapshot_interval,
            initial_condition,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::validation("dt", "must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::validation("t_end", "must be non-negative"));
        }
        if !(self.snapshot_interval > 0.0 && self.snapshot_interval.is_finite()) {
            return Err(Error::validation("snapshot_interval", "must be positive"));
        }
        if self.snapshot_interval < self.dt {
            return Err(Error::validation("snapshot_interval", "must not be below dt"));
        }
        Ok(())
    }
}

/// Largest stable-looking step: `cfl` over the explicit stiffness estimate.
///
/// The fifth-order and `δ² u_xxx` parts of the linear operator are exact;
/// what limits the step is the explicit `δ² u u_xxx`-type terms
/// (`~ δ² k³ A (1 + μA)`) and advection (`~ k A (1 + μA)`), with `A = max|u|`
/// and `k` the largest retained wavenumber.
pub fn default_dt(kind: EquationKind, params: &ModelParams, grid: Grid, amplitude: f64, cfl: f64) -> f64 {
    let k = grid.max_dealiased_wavenumber();
    let mu = kind.effective_mu(params);
    let a = amplitude.max(1e-3);
    let growth = a * (1.0 + mu * a);
    let mut rate = k * growth;
    if kind.is_fifth_order() {
        rate += k.powi(3) * params.delta * params.delta * growth;
    }
    cfl / rate
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub snapshots: Vec<Snapshot>,
    /// Largest step actually taken.
    pub dt: f64,
    pub steps: usize,
    /// Largest relative drift of the spatial mean seen at any snapshot.
    pub mass_drift: f64,
}

impl SimulationRun {
    /// Snapshot closest to time `t`.
    pub fn at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

fn mass_scale(u0: &RealField) -> f64 {
    let s = u0.mean().abs().max(u0.max_abs());
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Integrates `config` and returns snapshots at every multiple of the
/// snapshot interval, plus one at `t_end`.
pub fn run(config: &SimulationConfig) -> Result<SimulationRun> {
    config.validate()?;
    let grid = config.grid;
    let u0 = config.initial_condition.sample(&config.params, grid)?;
    let spectral = Spectral::new(grid);
    let symbol = linear_symbol(config.kind, &config.params, &grid);
    let mut op = Nonlinearity::new(config.kind, &config.params, grid);
    let mut u_hat = spectral.forward(&u0)?.into_coeffs();

    let mean0 = u0.mean();
    let scale = mass_scale(&u0);
    let mut snapshots = vec![Snapshot { t: 0.0, field: u0 }];
    let mut mass_drift: f64 = 0.0;
    let mut steps = 0;
    let mut dt_used: f64 = 0.0;

    let interval = config.snapshot_interval;
    let whole = ((config.t_end / interval) * (1.0 + 1e-12)).floor() as usize;
    let mut segments: Vec<(f64, f64)> = (1..=whole).map(|s| ((s - 1) as f64 * interval, s as f64 * interval)).collect();
    let covered = whole as f64 * interval;
    if config.t_end - covered > 1e-9 * interval {
        segments.push((covered, config.t_end));
    }
    if let Some(last) = segments.last_mut() {
        last.1 = config.t_end;
    }

    let mut stepper: Option<IfRk4> = None;
    for (t0, t1) in segments {
        let span = t1 - t0;
        let n = (span / config.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = span / n as f64;
        if stepper.as_ref().is_none_or(|s| s.dt() != dt) {
            stepper = Some(IfRk4::new(symbol.values(), dt)?);
        }
        let st = stepper.as_mut().expect("stepper was just built");
        for i in 0..n {
            if let Err(e) = st.step(&mut u_hat, &mut op, steps) {
                return Err(match e {
                    Error::BlowUp { .. } => Error::BlowUp {
                        step: steps,
                        time: t0 + (i + 1) as f64 * dt,
                        last: snapshots.pop().map(Box::new),
                    },
                    other => other,
                });
            }
            steps += 1;
        }
        dt_used = dt_used.max(dt);
        let field = spectral.inverse(&crate::spectral::SpectralField::new(grid, u_hat.clone())?)?;
        mass_drift = mass_drift.max((field.mean() - mean0).abs() / scale);
        snapshots.push(Snapshot { t: t1, field });
    }

    Ok(SimulationRun {
        snapshots,
        dt: dt_used,
        steps,
        mass_drift,
    })
}
