//! Real-line Weierstrass ℘ with real invariants, reduced to Jacobi functions.
//!
//! With roots of `4t³ - g2 t - g3`:
//!
//! ```text
//! Δ > 0:  ℘(z) = e3 + (e1 - e3) / sn²(√(e1 - e3) z, m),   m = (e2 - e3)/(e1 - e3)
//! Δ < 0:  ℘(z) = e2 + H (1 + cn(2√H z, m)) / (1 - cn(2√H z, m)),
//!         H² = 3e2² - g2/4,  m = 1/2 - 3e2/(4H)
//! ```
//!
//! where `Δ = g2³ - 27 g3²`.

use std::f64::consts::PI;

use serde::Serialize;

use super::jacobi::{ellipk, sncndn};
use crate::error::{Error, Result};

/// Evaluation is refused this close to a singularity.
pub const POLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Lattice {
    /// Three real roots `e1 >= e2 >= e3`.
    ThreeReal { e1: f64, e2: f64, e3: f64 },
    /// One real root `e2`; `h` is the H above.
    OneReal { e2: f64, h: f64 },
    /// `g2 = g3 = 0`: ℘ = 1/z².
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weierstrass {
    pub g2: f64,
    pub g3: f64,
    pub lattice: Lattice,
    /// Jacobi parameter of the reduction.
    m: f64,
    /// Argument scale: the Jacobi argument is `scale · z`.
    scale: f64,
    /// Real period, infinite when the lattice degenerates.
    period: f64,
}

fn cubic(t: f64, g2: f64, g3: f64) -> f64 {
    4.0 * t * t * t - g2 * t - g3
}

fn polish(mut t: f64, g2: f64, g3: f64) -> f64 {
    for _ in 0..4 {
        let d = 12.0 * t * t - g2;
        if d == 0.0 {
            break;
        }
        let next = t - cubic(t, g2, g3) / d;
        if !next.is_finite() || cubic(next, g2, g3).abs() >= cubic(t, g2, g3).abs() {
            break;
        }
        t = next;
    }
    t
}

impl Weierstrass {
    pub fn new(g2: f64, g3: f64) -> Result<Self> {
        if !(g2.is_finite() && g3.is_finite()) {
            return Err(Error::domain("invariants must be finite"));
        }
        if g2 == 0.0 && g3 == 0.0 {
            return Ok(Self {
                g2,
                g3,
                lattice: Lattice::Rational,
                m: 0.0,
                scale: 1.0,
                period: f64::INFINITY,
            });
        }
        let disc = g2 * g2 * g2 - 27.0 * g3 * g3;
        if disc >= 0.0 {
            // trigonometric form of the depressed cubic t³ - (g2/4)t - g3/4
            let r = (g2 / 3.0).sqrt();
            let arg = (3.0 * g3 / (g2 * r)).clamp(-1.0, 1.0);
            let e1 = polish(r * (arg.acos() / 3.0).cos(), g2, g3);
            // the other two solve t² + e1 t + g3/(4 e1) = 0
            let rad = (e1 * e1 - g3 / e1).max(0.0).sqrt();
            let (e2, e3) = (0.5 * (-e1 + rad), 0.5 * (-e1 - rad));
            let span = e1 - e3;
            let m = ((e2 - e3) / span).clamp(0.0, 1.0);
            let scale = span.sqrt();
            let period = 2.0 * ellipk(m) / scale;
            Ok(Self {
                g2,
                g3,
                lattice: Lattice::ThreeReal { e1, e2, e3 },
                m,
                scale,
                period,
            })
        } else {
            let p = -g2 / 4.0;
            let q = -g3 / 4.0;
            let s = ((q / 2.0).powi(2) + (p / 3.0).powi(3)).sqrt();
            let e2 = polish((-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt(), g2, g3);
            let h = (3.0 * e2 * e2 - g2 / 4.0).sqrt();
            let m = (0.5 - 3.0 * e2 / (4.0 * h)).clamp(0.0, 1.0);
            let scale = 2.0 * h.sqrt();
            // cn has period 4K in its argument
            let period = 4.0 * ellipk(m) / scale;
            Ok(Self {
                g2,
                g3,
                lattice: Lattice::OneReal { e2, h },
                m,
                scale,
                period,
            })
        }
    }

    pub fn discriminant(&self) -> f64 {
        self.g2.powi(3) - 27.0 * self.g3 * self.g3
    }

    /// Real period `2ω`; infinite for degenerate lattices.
    pub fn real_period(&self) -> f64 {
        self.period
    }

    /// Lattice point nearest to `z` on the real line and the distance to it.
    pub fn nearest_pole(&self, z: f64) -> (f64, f64) {
        let pole = if self.period.is_finite() {
            (z / self.period).round() * self.period
        } else {
            0.0
        };
        (pole, (z - pole).abs())
    }

    /// Reduces `z` into `[-ω, ω]`.
    fn reduce(&self, z: f64) -> f64 {
        if self.period.is_finite() {
            z - (z / self.period).round() * self.period
        } else {
            z
        }
    }

    /// `(℘(z), ℘'(z))`.
    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        let (pole, dist) = self.nearest_pole(z);
        if dist < POLE_TOLERANCE || !z.is_finite() {
            return Err(Error::Pole {
                location: pole,
                distance: dist,
            });
        }
        let z = self.reduce(z);
        match self.lattice {
            Lattice::Rational => Ok((1.0 / (z * z), -2.0 / (z * z * z))),
            Lattice::ThreeReal { e1, e3, .. } => {
                let span = e1 - e3;
                let (sn, cn, dn) = sncndn(self.scale * z, self.m);
                let p = e3 + span / (sn * sn);
                let dp = -2.0 * span * self.scale * cn * dn / (sn * sn * sn);
                Ok((p, dp))
            }
            Lattice::OneReal { e2, h } => {
                let (sn, cn, dn) = sncndn(self.scale * z, self.m);
                // 1 - cn = sn²/(1 + cn) avoids cancellation near the pole when cn > 0
                let one_minus = if cn > 0.0 { sn * sn / (1.0 + cn) } else { 1.0 - cn };
                let p = e2 + h * (1.0 + cn) / one_minus;
                let dp = -4.0 * h * h.sqrt() * sn * dn / (one_minus * one_minus);
                Ok((p, dp))
            }
        }
    }

    /// `(℘(x + ω'), ℘'(x + ω'))` on the line through the imaginary half period;
    /// real and pole-free. Needs three real roots.
    pub fn eval_shifted(&self, x: f64) -> Result<(f64, f64)> {
        match self.lattice {
            Lattice::ThreeReal { e2, e3, .. } => {
                let (sn, cn, dn) = sncndn(self.scale * self.reduce(x), self.m);
                let p = e3 + (e2 - e3) * sn * sn;
                let dp = 2.0 * (e2 - e3) * self.scale * sn * cn * dn;
                Ok((p, dp))
            }
            _ => Err(Error::domain(
                "the shifted real line exists only for positive discriminant",
            )),
        }
    }
}

/// `(℘(z; g2, g3), ℘'(z; g2, g3))` for real `z`.
pub fn weierstrass_p(z: f64, g2: f64, g3: f64) -> Result<(f64, f64)> {
    Weierstrass::new(g2, g3)?.eval(z)
}

/// ℘ on the degenerate lattice `g2 = 3 g3^{2/3}`:
/// `c + (3c/2) cot²(√(3c/2) z)` with `c = g3^{1/3}`.
pub fn degenerate_p(z: f64, g3: f64) -> Result<f64> {
    if !(g3 > 0.0 && g3.is_finite()) {
        return Err(Error::domain(format!("degenerate ℘ needs g3 > 0, got {g3}")));
    }
    let c = g3.cbrt();
    let w = (1.5 * c).sqrt();
    let period = PI / w;
    let pole = (z / period).round() * period;
    let dist = (z - pole).abs();
    if dist < POLE_TOLERANCE {
        return Err(Error::Pole {
            location: pole,
            distance: dist,
        });
    }
    let t = (w * z).tan();
    Ok(c + 1.5 * c / (t * t))
}

/// Roots of `4t³ - 3g3^{2/3} t - g3`: the simple root and the double root.
pub fn degenerate_roots(g3: f64) -> (f64, f64) {
    let c = g3.cbrt();
    (c, -0.5 * c)
}
