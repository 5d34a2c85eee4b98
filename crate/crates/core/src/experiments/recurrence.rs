//! Recurrence detection: distance of every later snapshot to a fixed one.

use serde::Serialize;

use super::metrics::{best_integer_shift, err_metric, ShiftMode};
use super::Snapshot;
use crate::error::{Error, Result};

/// A minimum must sit at least this far below the highest value of its window.
pub const MINIMUM_PROMINENCE: f64 = 1e-9;

/// Half-width of the window a minimum must dominate.
const HALF_WINDOW: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub t_fix: f64,
    pub skip: f64,
    pub mode: ShiftMode,
    pub times: Vec<f64>,
    /// Distance to the fixed snapshot at each time.
    pub distance: Vec<f64>,
    pub minima: Vec<f64>,
    /// Mean gap between consecutive minima.
    pub period: Option<f64>,
}

/// Indices `i` whose value is the least in the centred window of
/// `2·HALF_WINDOW + 1` samples, ties going to the earliest, and that sit at
/// least `MINIMUM_PROMINENCE` below the window maximum.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    if n < 2 * HALF_WINDOW + 1 {
        return Vec::new();
    }
    (HALF_WINDOW..n - HALF_WINDOW)
        .filter(|&i| {
            let v = values[i];
            let window = &values[i - HALF_WINDOW..=i + HALF_WINDOW];
            let left_ok = values[i - HALF_WINDOW..i].iter().all(|&w| v < w);
            let right_ok = values[i + 1..=i + HALF_WINDOW].iter().all(|&w| v <= w);
            let top = window.iter().fold(f64::NEG_INFINITY, |m, &w| m.max(w));
            left_ok && right_ok && top - v >= MINIMUM_PROMINENCE
        })
        .collect()
}

/// Compares the snapshot at `t_fix` with every snapshot at `t >= t_fix + skip`.
pub fn recurrence_scan(snapshots: &[Snapshot], t_fix: f64, skip: f64, mode: ShiftMode) -> Result<RecurrenceReport> {
    if !(skip >= 0.0) {
        return Err(Error::usage("skip must be non-negative"));
    }
    let tol = 1e-9 * t_fix.abs().max(1.0);
    let fixed = snapshots
        .iter()
        .find(|s| (s.t - t_fix).abs() <= tol)
        .ok_or_else(|| Error::usage(format!("no snapshot at t_fix = {t_fix}")))?;
    let mask: Vec<usize> = (0..fixed.field.grid().n()).collect();

    let mut times = Vec::new();
    let mut distance = Vec::new();
    for s in snapshots.iter().filter(|s| s.t >= t_fix + skip - tol) {
        let d = match mode {
            ShiftMode::Circular => best_integer_shift(&fixed.field, &s.field)?.1,
            ShiftMode::Fixed => err_metric(&fixed.field, &s.field, &mask)?,
        };
        times.push(s.t);
        distance.push(d);
    }
    let minima: Vec<f64> = local_minima(&distance).into_iter().map(|i| times[i]).collect();
    let period = (minima.len() >= 2).then(|| (minima[minima.len() - 1] - minima[0]) / (minima.len() - 1) as f64);
    Ok(RecurrenceReport {
        t_fix,
        skip,
        mode,
        times,
        distance,
        minima,
        period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, RealField};

    fn travelling(grid: Grid, c: f64, dt: f64, count: usize) -> Vec<Snapshot> {
        let l = grid.length();
        (0..count)
            .map(|i| {
                let t = i as f64 * dt;
                let field = RealField::from_fn(grid, |x| {
                    let z = (x - c * t).rem_euclid(l) - 0.5 * l;
                    1.0 + 2.0 / z.cosh().powi(2)
                })
                .unwrap();
                Snapshot { t, field }
            })
            .collect()
    }

    #[test]
    fn minima_rule() {
        let v = [5.0, 4.0, 3.0, 1.0, 3.0, 4.0, 5.0, 5.0, 5.0, 0.5, 2.0, 3.0];
        assert_eq!(local_minima(&v), vec![3, 9]);
        assert!(local_minima(&[1.0; 20]).is_empty());
        // the trailing dip lacks a full window
        assert!(local_minima(&[3.0, 2.0, 1.0, 0.0]).is_empty());
    }

    #[test]
    fn translating_profile() {
        let grid = Grid::new(32.0, 256).unwrap();
        // two cells per snapshot, so every snapshot samples the same shape
        let (c, dt) = (1.0, 0.25);
        let snaps = travelling(grid, c, dt, 400);
        let circ = recurrence_scan(&snaps, 5.0, 0.0, ShiftMode::Circular).unwrap();
        assert!(circ.distance.iter().all(|&d| d < 0.05));
        assert_eq!(circ.distance[0], 0.0);

        let fixed = recurrence_scan(&snaps, 5.0, 1.0, ShiftMode::Fixed).unwrap();
        let period = fixed.period.unwrap();
        assert!((period - grid.length() / c).abs() <= dt, "{period}");
        assert!((fixed.minima[0] - (5.0 + grid.length() / c)).abs() <= dt);
    }

    #[test]
    fn shift_consistent() {
        let grid = Grid::new(32.0, 256).unwrap();
        let snaps = travelling(grid, 0.7, 0.5, 60);
        let moved: Vec<Snapshot> = snaps
            .iter()
            .map(|s| Snapshot { t: s.t, field: s.field.shifted(37) })
            .collect();
        let a = recurrence_scan(&snaps, 2.0, 0.0, ShiftMode::Circular).unwrap();
        let b = recurrence_scan(&moved, 2.0, 0.0, ShiftMode::Circular).unwrap();
        for (x, y) in a.distance.iter().zip(&b.distance) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(a.period, b.period);
    }

    #[test]
    fn t_fix_must_be_a_snapshot() {
        let grid = Grid::new(32.0, 64).unwrap();
        let snaps = travelling(grid, 1.0, 0.5, 10);
        assert!(matches!(
            recurrence_scan(&snaps, 0.3, 0.0, ShiftMode::Circular),
            Err(Error::Usage(_))
        ));
        let r = recurrence_scan(&snaps, 1.0, 0.0, ShiftMode::Circular).unwrap();
        assert_eq!(r.times[0], 1.0);
        assert_eq!(r.period, None);
    }
}
