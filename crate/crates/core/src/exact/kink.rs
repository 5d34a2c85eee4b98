//! The tanh kink and its logistic form with a real pole.

use num_complex::Complex64;
use serde::Serialize;

use super::weierstrass::POLE_TOLERANCE;
use crate::error::{Error, Result};
use crate::params::{kink_speed, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// `v(z) = ±A tanh(k(z - z0)/2) + 1/(2μ)` with `A = √((28μ+15)/(30μ²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinkSolution {
    pub params: ModelParams,
    pub branch: Branch,
    pub z0: f64,
    pub k: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl KinkSolution {
    pub fn new(params: ModelParams, branch: Branch, z0: f64) -> Result<Self> {
        params.require_positive_mu()?;
        let (mu, delta) = (params.mu, params.delta);
        let k = (6.0 * mu * (28.0 * mu + 15.0)).sqrt() / (12.0 * mu * delta);
        Ok(Self {
            params,
            branch,
            z0,
            k,
            amplitude: ((28.0 * mu + 15.0) / (30.0 * mu * mu)).sqrt(),
            offset: 0.5 / mu,
            c0: kink_speed(mu)?,
            c1: -(15.0 + 56.0 * mu) / (360.0 * mu * mu),
            c2: -(3136.0 * mu * mu + 1680.0 * mu + 225.0) / (43200.0 * mu.powi(3)),
        })
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.offset + self.branch.sign() * self.amplitude * (0.5 * self.k * (z - self.z0)).tanh()
    }

    /// Limits as `z → -∞` and `z → +∞`.
    pub fn asymptotes(&self) -> (f64, f64) {
        let a = self.branch.sign() * self.amplitude;
        (self.offset - a, self.offset + a)
    }

    /// `[v, v', v'', v''', v'''']` at `z`.
    pub fn derivatives(&self, z: f64) -> [f64; 5] {
        let t = (0.5 * self.k * (z - self.z0)).tanh();
        // v as a polynomial in T; d/dz acts as (k/2)(1 - T²) d/dT
        let mut poly = vec![self.offset, self.branch.sign() * self.amplitude];
        let mut out = [0.0; 5];
        for slot in out.iter_mut() {
            *slot = poly.iter().rev().fold(0.0, |acc, c| acc * t + c);
            let mut next = vec![0.0; poly.len() + 1];
            for (n, c) in poly.iter().enumerate().skip(1) {
                let d = 0.5 * self.k * n as f64 * c;
                next[n - 1] += d;
                next[n + 1] -= d;
            }
            poly = next;
        }
        out
    }

    /// The logistic form `±2A(θ - 1/2) + 1/(2μ)`, `θ = 1/(1 - e^{-k(z - z0)})`,
    /// which has a real pole at `z0`.
    pub fn pole_variant(&self, z: f64) -> Result<f64> {
        let dist = (z - self.z0).abs();
        if dist < POLE_TOLERANCE {
            return Err(Error::Pole {
                location: self.z0,
                distance: dist,
            });
        }
        let theta = 1.0 / (-(-self.k * (z - self.z0)).exp_m1());
        Ok(self.offset + self.branch.sign() * 2.0 * self.amplitude * (theta - 0.5))
    }

    /// The logistic form at complex `z`.
    pub fn pole_variant_complex(&self, z: Complex64) -> Complex64 {
        let theta = 1.0 / (1.0 - (-(z - self.z0) * self.k).exp());
        (theta - 0.5) * (self.branch.sign() * 2.0 * self.amplitude) + self.offset
    }
}

pub fn kink_eval(s: &KinkSolution, z: f64) -> f64 {
    s.eval(z)
}

pub fn kink_pole_variant(s: &KinkSolution, z: f64) -> Result<f64> {
    s.pole_variant(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn kink(mu: f64, delta: f64) -> KinkSolution {
        KinkSolution::new(ModelParams::new(delta, mu).unwrap(), Branch::Plus, 0.3).unwrap()
    }

    #[test]
    fn centre_and_asymptotes() {
        let s = kink(1.0, 0.1);
        assert_eq!(s.eval(0.3), 0.5);
        assert!((s.k - 258f64.sqrt() / 1.2).abs() < 1e-12);
        assert!((s.k - 13.3853).abs() < 1e-4);
        assert!((s.eval(50.0) - 1.69721).abs() < 1e-5);
        assert!((s.asymptotes().1 - (0.5 + (43.0f64 / 30.0).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn monotone_on_each_branch() {
        let s = kink(0.7, 0.4);
        let m = KinkSolution { branch: Branch::Minus, ..s };
        for i in 0..200 {
            let z = -3.0 + 0.03 * i as f64;
            assert!(s.eval(z + 0.03) > s.eval(z));
            assert!(m.eval(z + 0.03) < m.eval(z));
        }
    }

    #[test]
    fn rejects_zero_mu() {
        let p = ModelParams::new(1.0, 0.0).unwrap();
        assert!(matches!(KinkSolution::new(p, Branch::Plus, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = kink(0.9, 0.6);
        let h = 1e-4;
        for &z in &[-0.4, 0.1, 0.35, 0.8] {
            let d = s.derivatives(z);
            let dp = s.derivatives(z + h);
            let dm = s.derivatives(z - h);
            for order in 0..4 {
                let fd = (dp[order] - dm[order]) / (2.0 * h);
                assert!((fd - d[order + 1]).abs() < 1e-5 * d[order + 1].abs().max(1.0));
            }
        }
    }

    #[test]
    fn pole_variant_values() {
        let s = kink(1.0, 0.5);
        let z = s.z0 + 2f64.ln() / s.k;
        let theta_two = s.offset + 2.0 * s.amplitude * 1.5;
        assert!((s.pole_variant(z).unwrap() - theta_two).abs() < 1e-12);
        assert!((s.pole_variant(s.z0 + 40.0).unwrap() - s.asymptotes().1).abs() < 1e-12);
        assert!(matches!(s.pole_variant(s.z0), Err(Error::Pole { .. })));
    }

    #[test]
    fn imaginary_shift_gives_the_kink() {
        let s = kink(0.4, 0.8);
        let shift = Complex64::new(0.0, PI / s.k);
        for i in 0..60 {
            let z = -3.0 + 0.1 * i as f64;
            let w = s.pole_variant_complex(Complex64::new(z, 0.0) + shift);
            assert!(w.im.abs() < 1e-12);
            assert!((w.re - s.eval(z)).abs() < 1e-12);
        }
    }
}
