//! Solitary waves of the Gardner equation and of the μ = 0 fifth-order equation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::{Grid, RealField};

/// Offset of `x` from `x0` taken to the nearest periodic image.
fn periodic_offset(x: f64, x0: f64, length: Option<f64>) -> f64 {
    let d = x - x0;
    match length {
        Some(l) => d - (d / l).round() * l,
        None => d,
    }
}

/// `u = 6C0 / (cosh(√(C0/δ²) z) √(1 - 6C0μ) + 1)`, `z = x - x0 - C0 t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GardnerSoliton {
    pub c0: f64,
    pub params: ModelParams,
    pub x0: f64,
}

impl GardnerSoliton {
    pub fn new(c0: f64, params: ModelParams) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::domain(format!("soliton speed C0 = {c0} must be positive")));
        }
        if 1.0 - 6.0 * c0 * params.mu <= 0.0 {
            return Err(Error::domain(format!(
                "1 - 6 C0 mu = {} must be positive",
                1.0 - 6.0 * c0 * params.mu
            )));
        }
        Ok(Self { c0, params, x0: 0.0 })
    }

    pub fn at(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn profile(&self, z: f64) -> f64 {
        let w = (self.c0 / (self.params.delta * self.params.delta)).sqrt() * z;
        6.0 * self.c0 / (w.cosh() * (1.0 - 6.0 * self.c0 * self.params.mu).sqrt() + 1.0)
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.profile(x - self.x0 - self.c0 * t)
    }

    /// Samples on a periodic grid, each point taking the nearest image.
    pub fn sample(&self, grid: Grid, t: f64) -> Result<RealField> {
        let x0 = self.x0 + self.c0 * t;
        RealField::from_fn(grid, |x| self.profile(periodic_offset(x, x0, Some(grid.length()))))
    }
}

pub fn gardner_soliton(x: f64, t: f64, s: &GardnerSoliton) -> f64 {
    s.eval(x, t)
}

/// `w = δ²k² - 1/2 - (3δ²k²/2) tanh²(kz/2)`, `z = x - x0 + (δ⁴k⁴/10 + 1/2) t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kdv5Soliton {
    pub k: f64,
    pub delta: f64,
    pub x0: f64,
}

impl Kdv5Soliton {
    pub fn new(k: f64, delta: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite() && delta > 0.0 && delta.is_finite()) {
            return Err(Error::domain(format!("k = {k} and delta = {delta} must be positive")));
        }
        Ok(Self { k, delta, x0: 0.0 })
    }

    pub fn at(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    /// Velocity in x; negative, the wave moves left.
    pub fn velocity(&self) -> f64 {
        -(self.delta.powi(4) * self.k.powi(4) / 10.0 + 0.5)
    }

    pub fn crest(&self) -> f64 {
        (self.delta * self.k).powi(2) - 0.5
    }

    pub fn tail(&self) -> f64 {
        -(self.delta * self.k).powi(2) / 2.0 - 0.5
    }

    pub fn profile(&self, z: f64) -> f64 {
        let dk2 = (self.delta * self.k).powi(2);
        dk2 - 0.5 - 1.5 * dk2 * (0.5 * self.k * z).tanh().powi(2)
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.profile(x - self.x0 - self.velocity() * t)
    }

    pub fn sample(&self, grid: Grid, t: f64) -> Result<RealField> {
        let x0 = self.x0 + self.velocity() * t;
        RealField::from_fn(grid, |x| self.profile(periodic_offset(x, x0, Some(grid.length()))))
    }
}

pub fn kdv5_soliton(x: f64, t: f64, s: &Kdv5Soliton) -> f64 {
    s.eval(x, t)
}
