//! Periodic grid, discrete Fourier transform, 2/3-rule dealiasing and
//! spectral differentiation.
//!
//! Normalization: the forward transform is unnormalized,
//! `û_j = Σ_n u_n e^{-2πi jn/N}`, and the inverse carries the `1/N`, so that
//! `inverse(forward(f)) = f`. Parseval then reads `Σ|u_n|² = (1/N) Σ|û_j|²`.
//!
//! Coefficients are stored in FFT order: index `i < N/2` holds mode `j = i`,
//! index `i ≥ N/2` holds `j = i - N`. The Nyquist index `N/2` is mode `-N/2`.

mod stepper;

pub use stepper::{if_rk4_step, IfRk4, NonlinearOperator};

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DERIVATIVE_ORDER: u32 = 5;

/// Uniform periodic grid `x_n = n·L/N`, `n = 0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    length: f64,
    n: usize,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::validation("L", format!("domain length {length} must be positive")));
        }
        if n < 8 {
            return Err(Error::validation("N", format!("N = {n} must be at least 8")));
        }
        if !n.is_power_of_two() {
            return Err(Error::validation("N", "N must be a power of two"));
        }
        Ok(Self { length, n })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.length / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Signed mode number stored at FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// `k_j = 2πj/L` for every FFT index.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| 2.0 * PI * self.mode(i) as f64 / self.length)
            .collect()
    }

    /// Largest retained mode under the 2/3 rule, `floor(N/3)`.
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// Largest retained wavenumber, `2π floor(N/3)/L`.
    pub fn max_dealiased_wavenumber(&self) -> f64 {
        2.0 * PI * self.dealias_cutoff() as f64 / self.length
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::usage(format!(
                "field has {len} samples but the grid has N = {}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Real samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::usage(format!("non-finite sample at index {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, (0..grid.n).map(|i| f(grid.x(i))).collect())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Circular shift by `s` cells: `out[i] = self[i - s]`.
    pub fn shifted(&self, s: isize) -> Self {
        let n = self.values.len() as isize;
        let s = s.rem_euclid(n) as usize;
        let mut values = Vec::with_capacity(self.values.len());
        values.extend_from_slice(&self.values[self.values.len() - s..]);
        values.extend_from_slice(&self.values[..self.values.len() - s]);
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Fourier coefficients on a grid, in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        grid.check_len(coeffs.len())?;
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Largest violation of `û_{-j} = conj(û_j)`, relative to the largest
    /// coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.coeffs.len();
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm())).max(f64::MIN_POSITIVE);
        let mut worst = self.coeffs[0].im.abs();
        worst = worst.max(self.coeffs[n / 2].im.abs());
        for i in 1..n / 2 {
            worst = worst.max((self.coeffs[i] - self.coeffs[n - i].conj()).norm());
        }
        worst / scale
    }
}

/// The 2/3-rule mask in FFT order: 1 for `|j| ≤ floor(N/3)`, else 0.
pub fn dealias_mask(grid: &Grid) -> Vec<f64> {
    let cut = grid.dealias_cutoff() as i64;
    (0..grid.n)
        .map(|i| if grid.mode(i).abs() <= cut { 1.0 } else { 0.0 })
        .collect()
}

/// FFT plans plus the per-mode tables for one grid.
///
/// Plans are built per instance; nothing is shared between simulations.
pub struct Spectral {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
    wavenumbers: Vec<f64>,
    mask: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n);
        let inverse = planner.plan_fft_inverse(grid.n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            scratch_len,
            wavenumbers: grid.wavenumbers(),
            mask: dealias_mask(&grid),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn mask(&self) -> &[f64] {
        &self.mask
    }

    pub(crate) fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.scratch_len]
    }

    /// Unnormalized in-place forward FFT.
    pub(crate) fn fft_forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    /// Unnormalized in-place inverse FFT; callers apply the `1/N`.
    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }

    pub fn forward(&self, f: &RealField) -> Result<SpectralField> {
        self.check_grid(&f.grid)?;
        let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft_forward(&mut buf, &mut self.scratch());
        SpectralField::new(self.grid, buf)
    }

    /// Inverse transform; the imaginary part of the result is discarded.
    pub fn inverse(&self, f: &SpectralField) -> Result<RealField> {
        self.check_grid(&f.grid)?;
        let mut buf = f.coeffs.clone();
        self.fft_inverse(&mut buf, &mut self.scratch());
        let scale = 1.0 / self.grid.n as f64;
        Ok(RealField {
            grid: self.grid,
            values: buf.iter().map(|c| c.re * scale).collect(),
        })
    }

    /// Per-mode multiplier `(i k_j)^order`, masked when `dealias` is set.
    /// The Nyquist mode is zeroed for odd orders.
    pub fn derivative_multiplier(&self, order: u32, dealias: bool) -> Result<Vec<Complex64>> {
        if order == 0 || order > MAX_DERIVATIVE_ORDER {
            return Err(Error::usage(format!(
                "derivative order {order} outside 1..={MAX_DERIVATIVE_ORDER}"
            )));
        }
        let nyquist = self.grid.n / 2;
        Ok(self
            .wavenumbers
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                if order % 2 == 1 && i == nyquist {
                    return Complex64::new(0.0, 0.0);
                }
                let m = if dealias { self.mask[i] } else { 1.0 };
                Complex64::new(0.0, k).powu(order) * m
            })
            .collect())
    }

    pub fn derivative(&self, f: &RealField, order: u32, dealias: bool) -> Result<RealField> {
        let mult = self.derivative_multiplier(order, dealias)?;
        let mut hat = self.forward(f)?;
        for (c, m) in hat.coeffs.iter_mut().zip(&mult) {
            *c *= m;
        }
        self.inverse(&hat)
    }

    /// Zeroes every mode outside the 2/3 band.
    pub fn apply_mask(&self, f: &mut SpectralField) {
        for (c, m) in f.coeffs.iter_mut().zip(&self.mask) {
            *c *= m;
        }
    }

    /// Translate by a (possibly fractional) distance: `out(x) = f(x - shift)`,
    /// exact for band-limited fields.
    pub fn translate(&self, f: &RealField, shift: f64) -> Result<RealField> {
        let mut hat = self.forward(f)?;
        let nyquist = self.grid.n / 2;
        for (i, (c, &k)) in hat.coeffs.iter_mut().zip(&self.wavenumbers).enumerate() {
            if i == nyquist {
                // cos(k·shift) keeps the Nyquist term real
                *c *= (k * shift).cos();
            } else {
                *c *= Complex64::from_polar(1.0, -k * shift);
            }
        }
        self.inverse(&hat)
    }

    fn check_grid(&self, g: &Grid) -> Result<()> {
        if *g != self.grid {
            return Err(Error::usage("field grid does not match the transform grid"));
        }
        Ok(())
    }
}

/// Convenience wrapper building a one-off plan.
pub fn spectral_derivative(f: &RealField, order: u32, dealias: bool) -> Result<RealField> {
    Spectral::new(f.grid()).derivative(f, order, dealias)
}
