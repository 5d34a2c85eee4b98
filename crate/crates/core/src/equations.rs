//! Right-hand sides of the four equation kinds, split for the
//! integrating-factor scheme.
//!
//! Only the constant-coefficient terms `δ² u_xxx` and `(2/5) δ⁴ u_xxxxx` go
//! into the linear symbol. Every `u`-dependent term, including the
//! `δ² u u_xxx` family, is explicit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{EquationKind, ModelParams};
use crate::spectral::{Grid, NonlinearOperator, RealField, Spectral};

/// Physical-space `du/dt` contribution.
pub type Tendency = RealField;

/// Per-mode multiplier of the linear part, in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSymbol {
    values: Vec<Complex64>,
}

impl LinearSymbol {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_purely_imaginary(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0)
    }
}

/// `λ(k)` for a single wavenumber. Moving the linear terms to the right of
/// `u_t = ...` gives `-(δ²(ik)³ + (2/5)δ⁴(ik)⁵) = i(δ²k³ - (2/5)δ⁴k⁵)`.
pub fn symbol_at(kind: EquationKind, params: &ModelParams, k: f64) -> Complex64 {
    let d2 = params.delta * params.delta;
    let third = d2 * k * k * k;
    let im = if kind.is_fifth_order() {
        third - 0.4 * d2 * d2 * k.powi(5)
    } else {
        third
    };
    Complex64::new(0.0, im)
}

/// The linear symbol on a grid. The Nyquist mode gets 0, matching the
/// treatment of odd derivatives.
pub fn linear_symbol(kind: EquationKind, params: &ModelParams, grid: &Grid) -> LinearSymbol {
    let nyquist = grid.n() / 2;
    let values = grid
        .wavenumbers()
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            if i == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                symbol_at(kind, params, k)
            }
        })
        .collect();
    LinearSymbol { values }
}

/// Nonlinear operator with its own transform plans and scratch buffers.
///
/// The tendency is formed in physical space from dealiased derivatives,
/// transformed back, masked with the 2/3 rule and stripped of its mean
/// (every term of the equation is an exact x-derivative, so the mean mode of
/// the true tendency vanishes).
pub struct Nonlinearity {
    kind: EquationKind,
    mu: f64,
    delta2: f64,
    spectral: Spectral,
    d1: Vec<Complex64>,
    d2: Vec<Complex64>,
    d3: Vec<Complex64>,
    pack_a: Vec<Complex64>,
    pack_b: Vec<Complex64>,
    scratch: Vec<Complex64>,
    tend: Vec<f64>,
}

impl std::fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("kind", &self.kind)
            .field("mu", &self.mu)
            .field("delta2", &self.delta2)
            .finish()
    }
}

impl Nonlinearity {
    pub fn new(kind: EquationKind, params: &ModelParams, grid: Grid) -> Self {
        let spectral = Spectral::new(grid);
        let d = |n| spectral.derivative_multiplier(n, true).expect("orders 1..=3 are valid");
        let (d1, d2, d3) = (d(1), d(2), d(3));
        let zero = vec![Complex64::new(0.0, 0.0); grid.n()];
        let scratch = spectral.scratch();
        Self {
            kind,
            mu: kind.effective_mu(params),
            delta2: params.delta * params.delta,
            spectral,
            d1,
            d2,
            d3,
            pack_a: zero.clone(),
            pack_b: zero,
            scratch,
            tend: vec![0.0; grid.n()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.spectral.grid()
    }

    /// Fills `self.tend` with the unmasked physical tendency.
    fn raw_tendency(&mut self, u_hat: &[Complex64]) -> Result<()> {
        let n = u_hat.len();
        if n != self.tend.len() {
            return Err(Error::usage("state length does not match the grid"));
        }
        let i = Complex64::new(0.0, 1.0);
        // Two real signals per complex transform: IFFT(A + iB) = a + ib.
        for j in 0..n {
            self.pack_a[j] = u_hat[j] + i * (self.d1[j] * u_hat[j]);
        }
        self.spectral.fft_inverse(&mut self.pack_a, &mut self.scratch);
        let scale = 1.0 / n as f64;
        let mu = self.mu;

        if self.kind.is_fifth_order() {
            for j in 0..n {
                self.pack_b[j] = self.d2[j] * u_hat[j] + i * (self.d3[j] * u_hat[j]);
            }
            self.spectral.fft_inverse(&mut self.pack_b, &mut self.scratch);
            let d2c = self.delta2;
            for j in 0..n {
                let u = self.pack_a[j].re * scale;
                let ux = self.pack_a[j].im * scale;
                let uxx = self.pack_b[j].re * scale;
                let uxxx = self.pack_b[j].im * scale;
                let quadratic = u * ux - mu * u * u * ux;
                let disp = 2.0 * ux * uxx + u * uxxx;
                let disp_mu = 4.0 * u * ux * uxx + ux * ux * ux + u * u * uxxx;
                self.tend[j] = -(quadratic + d2c * disp - d2c * mu * disp_mu);
            }
        } else {
            for j in 0..n {
                let u = self.pack_a[j].re * scale;
                let ux = self.pack_a[j].im * scale;
                self.tend[j] = -(u * ux - mu * u * u * ux);
            }
        }
        if !self.tend.iter().sum::<f64>().is_finite() {
            return Err(Error::BlowUp {
                step: 0,
                time: f64::NAN,
                last: None,
            });
        }
        Ok(())
    }

    /// Physical tendency of a physical field.
    pub fn tendency(&mut self, u: &RealField) -> Result<Tendency> {
        let u_hat = self.spectral.forward(u)?;
        let mut out = vec![Complex64::new(0.0, 0.0); u_hat.coeffs().len()];
        self.apply(u_hat.coeffs(), &mut out)?;
        self.spectral.fft_inverse(&mut out, &mut self.scratch);
        let scale = 1.0 / out.len() as f64;
        RealField::new(self.grid(), out.iter().map(|c| c.re * scale).collect())
    }
}

impl NonlinearOperator for Nonlinearity {
    fn apply(&mut self, u_hat: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.raw_tendency(u_hat)?;
        for (o, &t) in out.iter_mut().zip(&self.tend) {
            *o = Complex64::new(t, 0.0);
        }
        self.spectral.fft_forward(out, &mut self.scratch);
        for (o, m) in out.iter_mut().zip(self.spectral.mask()) {
            *o *= m;
        }
        out[0] = Complex64::new(0.0, 0.0);
        Ok(())
    }
}

/// Nonlinear tendency of `u` for the given equation kind.
pub fn nonlinear_rhs(kind: EquationKind, params: &ModelParams, u: &RealField) -> Result<Tendency> {
    Nonlinearity::new(kind, params, u.grid()).tendency(u)
}

/// Linear plus nonlinear right-hand side, `u_t = L u + N(u)`.
pub fn full_rhs(kind: EquationKind, params: &ModelParams, u: &RealField) -> Result<Tendency> {
    let grid = u.grid();
    let spectral = Spectral::new(grid);
    let symbol = linear_symbol(kind, params, &grid);
    let mut hat = spectral.forward(u)?;
    for (c, l) in hat.coeffs_mut().iter_mut().zip(symbol.values()) {
        *c *= l;
    }
    let linear = spectral.inverse(&hat)?;
    let nonlinear = nonlinear_rhs(kind, params, u)?;
    RealField::new(
        grid,
        linear.values().iter().zip(nonlinear.values()).map(|(a, b)| a + b).collect(),
    )
}

/// Flux `F` of the fifth-order equation, with `u_t = -∂x F`:
///
/// ```text
/// F = u²/2 - μu³/3 + δ² u_xx + δ²(u u_xx + u_x²/2)
///     - δ²μ(u² u_xx + u u_x²) + (2/5) δ⁴ u_xxxx
/// ```
pub fn conservation_flux(params: &ModelParams, u: &RealField) -> Result<RealField> {
    let spectral = Spectral::new(u.grid());
    let ux = spectral.derivative(u, 1, true)?;
    let uxx = spectral.derivative(u, 2, true)?;
    let uxxxx = spectral.derivative(u, 4, true)?;
    let (mu, d2) = (params.mu, params.delta * params.delta);
    let values = u
        .values()
        .iter()
        .zip(ux.values())
        .zip(uxx.values())
        .zip(uxxxx.values())
        .map(|(((&u, &ux), &uxx), &u4)| {
            u * u / 2.0 - mu * u * u * u / 3.0
                + d2 * uxx
                + d2 * (u * uxx + ux * ux / 2.0)
                - d2 * mu * (u * u * uxx + u * ux * ux)
                + 0.4 * d2 * d2 * u4
        })
        .collect();
    RealField::new(u.grid(), values)
}
