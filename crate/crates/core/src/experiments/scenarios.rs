//! The canned numerical studies.

use std::thread;

use serde::Serialize;

use super::metrics::{best_shift, err_metric, shape_score, ShiftMode};
use super::recurrence::{recurrence_scan, RecurrenceReport};
use super::{run, InitialCondition, SimulationConfig, SimulationRun};
use crate::error::{Error, Result};
use crate::exact::{Branch, KinkSolution};
use crate::params::{EquationKind, ModelParams};
use crate::spectral::{Grid, RealField};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub times: Vec<f64>,
    pub err: Vec<f64>,
    pub max_err: f64,
}

/// Indices of the left half `[0, L/2)`, where the kink pair is exact.
pub fn fiducial_mask(grid: Grid) -> Vec<usize> {
    (0..grid.n() / 2).collect()
}

/// Kink centred at `L/4` on `[0, L/2)` and its mirror image on `[L/2, L)`.
///
/// Every term of the travelling-wave ODE has an odd number of z-derivatives,
/// so the mirrored profile is an exact solution with the same speed.
pub fn kink_pair(s: &KinkSolution, grid: Grid) -> Result<RealField> {
    let l = grid.length();
    RealField::from_fn(grid, |x| {
        if x < 0.5 * l {
            s.eval(x - 0.25 * l)
        } else {
            s.eval(0.75 * l - x)
        }
    })
}

/// Runs the full equation from a kink pair and measures the error of the
/// left half against the travelling exact kink.
pub fn kink_validation(
    params: ModelParams,
    grid: Grid,
    dt: Option<f64>,
    t_end: f64,
    interval: f64,
) -> Result<(ValidationReport, SimulationRun)> {
    let kink = KinkSolution::new(params, Branch::Plus, 0.0)?;
    let mut config = SimulationConfig::new(EquationKind::Fpu5, params, grid, t_end, interval, InitialCondition::KinkPair)?;
    if let Some(dt) = dt {
        config = config.with_dt(dt)?;
    }
    let result = run(&config)?;
    let mask = fiducial_mask(grid);
    let l = grid.length();
    let mut times = Vec::new();
    let mut errs = Vec::new();
    for snap in &result.snapshots {
        let exact = RealField::from_fn(grid, |x| kink.eval(x - 0.25 * l - kink.c0 * snap.t))?;
        times.push(snap.t);
        errs.push(err_metric(&exact, &snap.field, &mask)?);
    }
    let max_err = errs.iter().fold(0.0, |m: f64, &e| m.max(e));
    Ok((ValidationReport { times, err: errs, max_err }, result))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparedRun {
    pub kind: EquationKind,
    pub params: ModelParams,
    pub run: SimulationRun,
    /// Shape-invariance score of every snapshot against the initial profile.
    pub scores: Vec<f64>,
}

impl ComparedRun {
    fn from_run(kind: EquationKind, params: ModelParams, run: SimulationRun) -> Result<Self> {
        let initial = &run.snapshots[0].field;
        let scores = run
            .snapshots
            .iter()
            .map(|s| shape_score(initial, &s.field))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, params, run, scores })
    }

    pub fn max_score(&self) -> f64 {
        self.scores.iter().fold(0.0, |m: f64, &s| m.max(s))
    }

    /// First snapshot time at which the score exceeds `threshold`.
    pub fn first_exceeding(&self, threshold: f64) -> Option<f64> {
        self.run
            .snapshots
            .iter()
            .zip(&self.scores)
            .find(|(_, &s)| s > threshold)
            .map(|(snap, _)| snap.t)
    }
}

/// Two runs from the same initial profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedRuns {
    pub reference: ComparedRun,
    pub perturbed: ComparedRun,
}

fn run_pair(a: SimulationConfig, b: SimulationConfig) -> Result<(SimulationRun, SimulationRun)> {
    thread::scope(|scope| {
        let ha = scope.spawn(|| run(&a));
        let hb = scope.spawn(|| run(&b));
        let ra = ha.join().map_err(|_| Error::Undefined("simulation thread panicked".into()))?;
        let rb = hb.join().map_err(|_| Error::Undefined("simulation thread panicked".into()))?;
        Ok((ra?, rb?))
    })
}

/// Fifth-order soliton under `μ = 0` (reference) and `μ = mu` (perturbed).
pub fn soliton_perturbation(
    delta: f64,
    k: f64,
    mu: f64,
    grid: Grid,
    t_end: f64,
    interval: f64,
    dt: Option<f64>,
) -> Result<PairedRuns> {
    let ic = InitialCondition::Kdv5Soliton { k };
    let p0 = ModelParams::new(delta, 0.0)?;
    let p1 = ModelParams::new(delta, mu)?;
    let mut a = SimulationConfig::new(EquationKind::Fpu5, p0, grid, t_end, interval, ic.clone())?;
    let mut b = SimulationConfig::new(EquationKind::Fpu5, p1, grid, t_end, interval, ic)?;
    // a shared step keeps the pair comparable
    let step = dt.unwrap_or(a.dt.min(b.dt));
    a = a.with_dt(step)?;
    b = b.with_dt(step)?;
    let (ra, rb) = run_pair(a, b)?;
    Ok(PairedRuns {
        reference: ComparedRun::from_run(EquationKind::Fpu5, p0, ra)?,
        perturbed: ComparedRun::from_run(EquationKind::Fpu5, p1, rb)?,
    })
}

/// Gardner soliton under the Gardner equation (reference) and the full
/// equation (perturbed).
pub fn gardner_soliton_experiment(
    params: ModelParams,
    c0: f64,
    grid: Grid,
    t_end: f64,
    interval: f64,
    dt: Option<f64>,
) -> Result<PairedRuns> {
    let ic = InitialCondition::GardnerSoliton { c0 };
    let mut a = SimulationConfig::new(EquationKind::Gardner, params, grid, t_end, interval, ic.clone())?;
    let mut b = SimulationConfig::new(EquationKind::Fpu5, params, grid, t_end, interval, ic)?;
    if let Some(dt) = dt {
        let cap = dt.min(a.dt);
        a = a.with_dt(cap)?;
        b = b.with_dt(dt)?;
    }
    let (ra, rb) = run_pair(a, b)?;
    Ok(PairedRuns {
        reference: ComparedRun::from_run(EquationKind::Gardner, params, ra)?,
        perturbed: ComparedRun::from_run(EquationKind::Fpu5, params, rb)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZabuskyKruskal {
    pub kdv: SimulationRun,
    pub fpu5: SimulationRun,
    pub t_early: f64,
    pub t_late: f64,
    /// Shift-matched error between the early and late snapshots.
    pub kdv_match: f64,
    pub fpu5_match: f64,
}

/// Cosine initial data under KdV and the full equation.
#[allow(clippy::too_many_arguments)]
pub fn zabusky_kruskal(
    params: ModelParams,
    grid: Grid,
    t_early: f64,
    t_late: f64,
    interval: f64,
    kdv_dt: Option<f64>,
    fpu5_dt: Option<f64>,
) -> Result<ZabuskyKruskal> {
    let mut kdv = SimulationConfig::new(EquationKind::Kdv, params, grid, t_late, interval, InitialCondition::Cosine)?;
    if let Some(dt) = kdv_dt {
        kdv = kdv.with_dt(dt)?;
    }
    let mut fpu5 = SimulationConfig::new(EquationKind::Fpu5, params, grid, t_late, interval, InitialCondition::Cosine)?;
    if let Some(dt) = fpu5_dt {
        fpu5 = fpu5.with_dt(dt)?;
    }
    let (rk, rf) = run_pair(kdv, fpu5)?;
    let matched = |r: &SimulationRun| -> Result<f64> {
        let early = r.at(t_early).ok_or_else(|| Error::usage("no early snapshot"))?;
        let late = r.at(t_late).ok_or_else(|| Error::usage("no late snapshot"))?;
        Ok(best_shift(&early.field, &late.field)?.err)
    };
    Ok(ZabuskyKruskal {
        kdv_match: matched(&rk)?,
        fpu5_match: matched(&rf)?,
        kdv: rk,
        fpu5: rf,
        t_early,
        t_late,
    })
}

/// Fifth-order soliton under the full equation, scanned for recurrence.
#[allow(clippy::too_many_arguments)]
pub fn recurrence_reconstruction(
    params: ModelParams,
    k: f64,
    grid: Grid,
    t_end: f64,
    interval: f64,
    t_fix: f64,
    skip: f64,
    dt: Option<f64>,
) -> Result<(RecurrenceReport, SimulationRun)> {
    let mut config = SimulationConfig::new(
        EquationKind::Fpu5,
        params,
        grid,
        t_end,
        interval,
        InitialCondition::Kdv5Soliton { k },
    )?;
    if let Some(dt) = dt {
        config = config.with_dt(dt)?;
    }
    let result = run(&config)?;
    let report = recurrence_scan(&result.snapshots, t_fix, skip, ShiftMode::Circular)?;
    Ok((report, result))
}
