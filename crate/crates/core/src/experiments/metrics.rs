//! Relative max-norm error and shift-matched comparison of periodic profiles.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{RealField, Spectral};

/// `max_mask |a - c| / max_mask |c|`.
pub fn err_metric(u_analytic: &RealField, u_calc: &RealField, mask: &[usize]) -> Result<f64> {
    if u_analytic.grid() != u_calc.grid() {
        return Err(Error::usage("fields live on different grids"));
    }
    if mask.is_empty() {
        return Err(Error::usage("empty comparison mask"));
    }
    let (a, c) = (u_analytic.values(), u_calc.values());
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for &i in mask {
        let (x, y) = (
            *a.get(i).ok_or_else(|| Error::usage(format!("mask index {i} out of range")))?,
            c[i],
        );
        num = num.max((x - y).abs());
        den = den.max(y.abs());
    }
    if den == 0.0 {
        return Err(Error::Undefined("computed field vanishes on the mask".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShiftMode {
    /// Minimise over all circular shifts of the reference.
    Circular,
    /// Compare without shifting.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftMatch {
    /// Shift applied to the reference, in units of x.
    pub shift: f64,
    pub err: f64,
}

/// Circular cross-correlation `Σ_i r[i - s] c[i]` for every `s`.
fn cross_correlation(spectral: &Spectral, reference: &RealField, current: &RealField) -> Result<Vec<f64>> {
    let r = spectral.forward(reference)?;
    let c = spectral.forward(current)?;
    let product: Vec<Complex64> = r.coeffs().iter().zip(c.coeffs()).map(|(a, b)| a.conj() * b).collect();
    let mut buf = product;
    let mut scratch = spectral.scratch();
    spectral.fft_inverse(&mut buf, &mut scratch);
    let n = buf.len() as f64;
    Ok(buf.iter().map(|z| z.re / n).collect())
}

/// Max |r[i - s] - c[i]|, abandoning once it exceeds `bound`.
fn shifted_max_diff(r: &[f64], c: &[f64], s: usize, bound: f64) -> f64 {
    let n = r.len();
    let mut m: f64 = 0.0;
    for (i, &ci) in c.iter().enumerate() {
        m = m.max((r[(i + n - s) % n] - ci).abs());
        if m > bound {
            return m;
        }
    }
    m
}

/// Best whole-cell circular shift of `reference` onto `current` under the
/// max-norm error. Cross-correlation supplies the starting candidate; every
/// shift is then checked directly, so the result is the exact minimum.
pub fn best_integer_shift(reference: &RealField, current: &RealField) -> Result<(isize, f64)> {
    if reference.grid() != current.grid() {
        return Err(Error::usage("fields live on different grids"));
    }
    let den = current.max_abs();
    if den == 0.0 {
        return Err(Error::Undefined("computed field vanishes".into()));
    }
    let spectral = Spectral::new(reference.grid());
    let corr = cross_correlation(&spectral, reference, current)?;
    let start = corr
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    let (r, c) = (reference.values(), current.values());
    let mut best = (start, shifted_max_diff(r, c, start, f64::INFINITY));
    for s in 0..r.len() {
        if s == start {
            continue;
        }
        let d = shifted_max_diff(r, c, s, best.1);
        if d < best.1 {
            best = (s, d);
        }
    }
    let n = r.len() as isize;
    let s = best.0 as isize;
    let signed = if s > n / 2 { s - n } else { s };
    Ok((signed, best.1 / den))
}

/// Best shift with sub-cell refinement by spectral translation.
pub fn best_shift(reference: &RealField, current: &RealField) -> Result<ShiftMatch> {
    let (s0, err0) = best_integer_shift(reference, current)?;
    let grid = reference.grid();
    let dx = grid.dx();
    let spectral = Spectral::new(grid);
    let r_hat = spectral.forward(reference)?;
    let den = current.max_abs();
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.n()];
    let mut scratch = spectral.scratch();
    let wavenumbers = spectral.wavenumbers().to_vec();
    let nyquist = grid.n() / 2;
    let mut eval = |shift: f64| -> f64 {
        for (i, ((b, r), &k)) in buf.iter_mut().zip(r_hat.coeffs()).zip(&wavenumbers).enumerate() {
            *b = if i == nyquist {
                r * (k * shift).cos()
            } else {
                r * Complex64::from_polar(1.0, -k * shift)
            };
        }
        spectral.fft_inverse(&mut buf, &mut scratch);
        let n = buf.len() as f64;
        buf.iter()
            .zip(current.values())
            .fold(0.0f64, |m, (a, c)| m.max((a.re / n - c).abs()))
            / den
    };

    // golden-section search on [s0 - 1, s0 + 1] cells
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = ((s0 as f64 - 1.0) * dx, (s0 as f64 + 1.0) * dx);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..48 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2);
        }
    }
    let (x, f) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if f < err0 {
        Ok(ShiftMatch { shift: x, err: f })
    } else {
        Ok(ShiftMatch { shift: s0 as f64 * dx, err: err0 })
    }
}

/// Shape-invariance score: error of `current` against the best translate
/// of `initial`.
pub fn shape_score(initial: &RealField, current: &RealField) -> Result<f64> {
    Ok(best_shift(initial, current)?.err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn bump(grid: Grid, centre: f64) -> RealField {
        // nearest periodic image, so the profile is smooth across the seam
        let l = grid.length();
        RealField::from_fn(grid, |x| {
            let z = (x - centre + 0.5 * l).rem_euclid(l) - 0.5 * l;
            2.0 / z.cosh().powi(2)
        })
        .unwrap()
    }

    #[test]
    fn err_metric_examples() {
        let g = Grid::new(10.0, 64).unwrap();
        let a = bump(g, 5.0);
        let all: Vec<usize> = (0..64).collect();
        assert_eq!(err_metric(&a, &a, &all).unwrap(), 0.0);
        let c = RealField::from_fn(g, |x| 2.0 / (x - 5.0).cosh().powi(2) + 0.01).unwrap();
        let shifted = RealField::new(g, a.values().iter().map(|v| v + 0.01).collect()).unwrap();
        let peak = shifted.max_abs();
        assert!((err_metric(&a, &c, &all).unwrap() - 0.01 / peak).abs() < 1e-15);
        // offset 0.01 against a peak of exactly 2
        let two = RealField::from_fn(g, |_| 2.0).unwrap();
        let lower = RealField::from_fn(g, |_| 1.99).unwrap();
        assert!((err_metric(&lower, &two, &all).unwrap() - 0.005).abs() < 1e-15);
        assert!(matches!(err_metric(&a, &a, &[]), Err(Error::Usage(_))));
        let zero = RealField::zeros(g);
        assert!(matches!(err_metric(&a, &zero, &all), Err(Error::Undefined(_))));
    }

    #[test]
    fn integer_shift_is_found_exactly() {
        let g = Grid::new(20.0, 128).unwrap();
        let a = bump(g, 6.0);
        for s in [-40isize, -3, 0, 17, 63] {
            let (found, err) = best_integer_shift(&a, &a.shifted(s)).unwrap();
            assert_eq!(found.rem_euclid(128), s.rem_euclid(128));
            assert_eq!(err, 0.0);
        }
    }

    #[test]
    fn sub_cell_shift_is_refined() {
        let g = Grid::new(30.0, 256).unwrap();
        let a = bump(g, 6.0);
        let b = bump(g, 6.0 + 3.3 * g.dx());
        let coarse = best_integer_shift(&a, &b).unwrap().1;
        let m = best_shift(&a, &b).unwrap();
        assert!((m.shift - 3.3 * g.dx()).abs() < 1e-6, "{m:?} {coarse}");
        assert!(m.err < 1e-9 && m.err < coarse);
    }

    #[test]
    fn score_ignores_translation_but_sees_deformation() {
        let g = Grid::new(30.0, 256).unwrap();
        let a = bump(g, 6.0);
        assert!(shape_score(&a, &bump(g, 13.7)).unwrap() < 1e-9);
        let wide = RealField::from_fn(g, |x| 2.0 / ((x - 9.0) / 1.5).cosh().powi(2)).unwrap();
        assert!(shape_score(&a, &wide).unwrap() > 0.1);
    }
}
