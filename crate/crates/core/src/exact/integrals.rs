//! The travelling-wave ODE for `v(z)`, `z = x - C0 t`, and its two integrals,
//! evaluated on derivative samples.

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Travelling-wave ODE at one point; `jet = [v, v', v'', v''', v'''', v⁽⁵⁾]`.
pub fn travelling_wave_at(jet: &[f64; 6], c0: f64, p: &ModelParams) -> f64 {
    let [v, v1, v2, v3, _, v5] = *jet;
    let (d2, mu) = (p.delta * p.delta, p.mu);
    -c0 * v1 + v * v1 - mu * v * v * v1 + d2 * v3 + 2.0 * d2 * v1 * v2 + d2 * v * v3
        - mu * d2 * v1.powi(3)
        - 4.0 * mu * d2 * v * v1 * v2
        - mu * d2 * v * v * v3
        + 0.4 * d2 * d2 * v5
}

/// First integral at one point; `jet = [v, v', v'', v''', v'''']`.
pub fn first_integral_at(jet: &[f64; 5], c0: f64, c1: f64, p: &ModelParams) -> f64 {
    let [v, v1, v2, _, v4] = *jet;
    let (d2, mu) = (p.delta * p.delta, p.mu);
    c1 - c0 * v + v * v / 2.0 - mu * v.powi(3) / 3.0 + d2 * v2 + d2 * v1 * v1 / 2.0 + d2 * v * v2
        - mu * d2 * v * v1 * v1
        - mu * d2 * v * v * v2
        + 0.4 * d2 * d2 * v4
}

/// Second integral at one point; `jet = [v, v', v'', v''', _]`.
pub fn second_integral_at(jet: &[f64; 5], c0: f64, c1: f64, c2: f64, p: &ModelParams) -> f64 {
    let [v, v1, v2, v3, _] = *jet;
    let (d2, mu) = (p.delta * p.delta, p.mu);
    c2 + c1 * v - c0 * v * v / 2.0 + v.powi(3) / 6.0 - mu * v.powi(4) / 12.0
        + d2 * v1 * v1 / 2.0
        + d2 * v * v1 * v1 / 2.0
        - mu * d2 * v * v * v1 * v1 / 2.0
        + 0.4 * d2 * d2 * v1 * v3
        - 0.2 * d2 * d2 * v2 * v2
}

fn check_lengths(slices: &[&[f64]]) -> Result<usize> {
    let n = slices[0].len();
    if slices.iter().any(|s| s.len() != n) {
        return Err(Error::usage("derivative samples have different lengths"));
    }
    Ok(n)
}

/// Max absolute first-integral residual over the samples.
pub fn residual_first_integral(
    v: &[f64],
    d1: &[f64],
    d2: &[f64],
    d4: &[f64],
    c0: f64,
    c1: f64,
    params: &ModelParams,
) -> Result<f64> {
    let n = check_lengths(&[v, d1, d2, d4])?;
    Ok((0..n)
        .map(|i| first_integral_at(&[v[i], d1[i], d2[i], 0.0, d4[i]], c0, c1, params).abs())
        .fold(0.0, f64::max))
}

/// Max absolute second-integral residual over the samples.
#[allow(clippy::too_many_arguments)]
pub fn residual_second_integral(
    v: &[f64],
    d1: &[f64],
    d2: &[f64],
    d3: &[f64],
    c0: f64,
    c1: f64,
    c2: f64,
    params: &ModelParams,
) -> Result<f64> {
    let n = check_lengths(&[v, d1, d2, d3])?;
    Ok((0..n)
        .map(|i| second_integral_at(&[v[i], d1[i], d2[i], d3[i], 0.0], c0, c1, c2, params).abs())
        .fold(0.0, f64::max))
}
