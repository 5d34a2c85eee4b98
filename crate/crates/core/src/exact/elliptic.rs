//! Periodic travelling waves `v(z) = H + (A + B ℘'(z - z0)) / (C + ℘(z - z0))`.

use serde::Serialize;

use super::weierstrass::{Lattice, Weierstrass, POLE_TOLERANCE};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Which real line through the period lattice the solution lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EllipticLine {
    /// `z` real: passes through the poles of ℘.
    Real,
    /// `z` shifted by the imaginary half period: ℘ is bounded there.
    HalfPeriod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticSolution {
    pub params: ModelParams,
    pub g3: f64,
    pub z0: f64,
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub g2: f64,
    pub line: EllipticLine,
    pub lattice: Weierstrass,
}

/// Constants of the elliptic family for given `(δ, μ)` and free invariant `g3`.
pub fn elliptic_coeffs(params: &ModelParams, g3: f64) -> Result<EllipticSolution> {
    params.require_positive_mu()?;
    if !g3.is_finite() {
        return Err(Error::domain("g3 must be finite"));
    }
    let (mu, delta) = (params.mu, params.delta);
    let d6g3 = delta.powi(6) * g3;
    let s = 15.0 + 28.0 * mu;
    let (mu2, mu3, mu4) = (mu * mu, mu.powi(3), mu.powi(4));

    let c0 = -(2_985_984.0 * d6g3 * mu3 + 78_400.0 * mu3 + 50_400.0 * mu2 + 10_800.0 * mu + 3375.0)
        / (6480.0 * mu2 * s);
    let c1 = -(2_985_984.0 * d6g3 * mu3 + 78_400.0 * mu3 + 80_640.0 * mu2 + 27_000.0 * mu + 3375.0)
        / (12_960.0 * mu3 * s);
    let c2 = -336.0 * d6g3 / (25.0 * mu) + 15_552.0 * d6g3 / (25.0 * s)
        - 343.0 / (150.0 * s)
        - 833.0 / (180.0 * mu * s)
        - 7.0 / (2.0 * mu2 * s)
        - 75.0 / (64.0 * mu3 * s)
        + 1296.0 * d6g3 / (5.0 * mu * s)
        - 75.0 / (512.0 * mu4 * s)
        + 3577.0 / (48_600.0 * mu)
        + 721.0 / (4320.0 * mu2)
        + 103.0 / (1152.0 * mu3)
        + 65.0 / (4608.0 * mu4);
    let g2 = -(5_971_968.0 * d6g3 * mu3 - 21_952.0 * mu3 - 35_280.0 * mu2 - 18_900.0 * mu - 3375.0)
        / (20_736.0 * delta.powi(4) * mu2 * s);

    Ok(EllipticSolution {
        params: *params,
        g3,
        z0: 0.0,
        h: 0.5 / mu,
        a: 0.0,
        b: 2.0 * delta / (5.0 * mu).sqrt(),
        c: -s / (288.0 * mu * delta * delta),
        c0,
        c1,
        c2,
        g2,
        line: EllipticLine::Real,
        lattice: Weierstrass::new(g2, g3)?,
    })
}

/// The `g3` for which the elliptic family moves at speed `c0`.
pub fn g3_for_speed(params: &ModelParams, c0: f64) -> Result<f64> {
    params.require_positive_mu()?;
    let (mu, delta) = (params.mu, params.delta);
    let s = 15.0 + 28.0 * mu;
    Ok(-(c0 * 6480.0 * mu * mu * s + 78_400.0 * mu.powi(3) + 50_400.0 * mu * mu + 10_800.0 * mu + 3375.0)
        / (2_985_984.0 * delta.powi(6) * mu.powi(3)))
}

impl EllipticSolution {
    pub fn with_z0(mut self, z0: f64) -> Self {
        self.z0 = z0;
        self
    }

    /// Moves the solution onto the pole-free line of ℘ (positive discriminant only).
    pub fn on_half_period_line(mut self) -> Result<Self> {
        if self.lattice.discriminant() <= 0.0 {
            return Err(Error::domain(format!(
                "half-period line needs g2³ - 27g3² > 0, got {}",
                self.lattice.discriminant()
            )));
        }
        self.line = EllipticLine::HalfPeriod;
        Ok(self)
    }

    /// Spatial period of the profile.
    pub fn period(&self) -> f64 {
        self.lattice.real_period()
    }

    fn wp(&self, s: f64) -> Result<(f64, f64)> {
        match self.line {
            EllipticLine::Real => self.lattice.eval(s),
            EllipticLine::HalfPeriod => self.lattice.eval_shifted(s),
        }
    }

    /// Singular points in `[z0, z0 + period)`.
    ///
    /// `-C` is always a root of `4t³ - g2 t - g3`, so `C + ℘` has a double zero
    /// at the half period where ℘ takes that value, and `v` has a simple pole
    /// there besides the lattice poles.
    pub fn singularities(&self) -> Vec<f64> {
        let target = -self.c;
        let half = 0.5 * self.period();
        let nearest = |e: f64, others: [f64; 2]| others.iter().all(|o| (e - target).abs() <= (o - target).abs());
        let mut out = Vec::new();
        match (self.line, self.lattice.lattice) {
            (EllipticLine::Real, Lattice::ThreeReal { e1, e2, e3 }) => {
                out.push(0.0);
                if nearest(e1, [e2, e3]) {
                    out.push(half);
                }
            }
            (EllipticLine::Real, Lattice::OneReal { .. }) => out.extend([0.0, half]),
            (EllipticLine::Real, Lattice::Rational) => out.push(0.0),
            (EllipticLine::HalfPeriod, Lattice::ThreeReal { e1, e2, e3 }) => {
                if nearest(e3, [e1, e2]) {
                    out.push(0.0);
                } else if nearest(e2, [e1, e3]) {
                    out.push(half);
                }
            }
            (EllipticLine::HalfPeriod, _) => {}
        }
        out.into_iter().filter(|s| s.is_finite()).map(|s| s + self.z0).collect()
    }

    /// Nearest singular point to `z` and the distance to it.
    pub fn nearest_singularity(&self, z: f64) -> Option<(f64, f64)> {
        let t = self.period();
        self.singularities()
            .into_iter()
            .map(|s| {
                let s = if t.is_finite() { s + ((z - s) / t).round() * t } else { s };
                (s, (z - s).abs())
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// `[v, v', v'', v''', v'''']` at `z`.
    pub fn derivatives(&self, z: f64) -> Result<[f64; 5]> {
        if let Some((location, distance)) = self.nearest_singularity(z) {
            if distance < POLE_TOLERANCE {
                return Err(Error::Pole { location, distance });
            }
        }
        let (p, dp) = self.wp(z - self.z0)?;
        // Taylor coefficients f^(n)/n! of ℘ up to order 5 from the ODE
        let g2 = self.lattice.g2;
        let d2 = 6.0 * p * p - 0.5 * g2;
        let d3 = 12.0 * p * dp;
        let d4 = 12.0 * (dp * dp + p * d2);
        let d5 = 12.0 * (3.0 * dp * d2 + p * d3);
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0];
        let wp = [p, dp, d2, d3, d4, d5];
        let mut num: Vec<f64> = (0..5).map(|n| self.b * wp[n + 1] / fact[n]).collect();
        num[0] += self.a;
        let mut dnm: Vec<f64> = (0..5).map(|n| wp[n] / fact[n]).collect();
        dnm[0] += self.c;
        let mut q = [0.0; 5];
        for n in 0..5 {
            let acc: f64 = (1..=n).map(|i| dnm[i] * q[n - i]).sum();
            q[n] = (num[n] - acc) / dnm[0];
        }
        let mut out = [0.0; 5];
        for n in 0..5 {
            out[n] = q[n] * fact[n];
        }
        out[0] += self.h;
        Ok(out)
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        Ok(self.derivatives(z)?[0])
    }
}

pub fn elliptic_eval(s: &EllipticSolution, z: f64) -> Result<f64> {
    s.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::integrals::{first_integral_at, second_integral_at};

    fn params(delta: f64, mu: f64) -> ModelParams {
        ModelParams::new(delta, mu).unwrap()
    }

    /// The corrected C2, collected over a common denominator.
    fn c2_collected(delta: f64, mu: f64, g3: f64) -> f64 {
        let d6g3 = delta.powi(6) * g3;
        (191_102_976.0 * d6g3 * mu.powi(4) + 44_789_760.0 * d6g3 * mu.powi(3) - 175_616.0 * mu.powi(4)
            + 893_760.0 * mu.powi(3)
            + 1_171_800.0 * mu * mu
            + 438_750.0 * mu
            + 50_625.0)
            / (777_600.0 * mu.powi(4) * (28.0 * mu + 15.0))
    }

    #[test]
    fn fixed_coefficients() {
        let s = elliptic_coeffs(&params(1.0, 0.5), 0.1).unwrap();
        assert!((s.b - 1.26491).abs() < 1e-5);
        assert!((s.c + 29.0 / 144.0).abs() < 1e-15);
        assert_eq!(s.a, 0.0);
        assert_eq!(s.h, 1.0);
    }

    #[test]
    fn c2_matches_collected_form() {
        for &(d, mu, g3) in &[(1.0, 0.5, 0.1), (0.3, 2.0, -4.0), (1.7, 0.05, 0.01)] {
            let s = elliptic_coeffs(&params(d, mu), g3).unwrap();
            let want = c2_collected(d, mu, g3);
            assert!((s.c2 - want).abs() < 1e-11 * want.abs().max(1.0), "{} vs {want}", s.c2);
        }
    }

    #[test]
    fn speed_inversion() {
        let p = params(1.0, 0.5);
        let g3 = g3_for_speed(&p, 5.0).unwrap();
        assert!((g3 + 0.712_86).abs() < 1e-4);
        assert!((elliptic_coeffs(&p, g3).unwrap().c0 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = elliptic_coeffs(&params(1.0, 0.5), 0.1).unwrap().with_z0(0.2);
        let h = 1e-4;
        for &z in &[0.9, 1.3, 2.2] {
            let d = s.derivatives(z).unwrap();
            let (dp, dm) = (s.derivatives(z + h).unwrap(), s.derivatives(z - h).unwrap());
            for order in 0..4 {
                let fd = (dp[order] - dm[order]) / (2.0 * h);
                assert!((fd - d[order + 1]).abs() < 1e-5 * d[order + 1].abs().max(1.0), "order {order}");
            }
        }
    }

    #[test]
    fn both_integrals_hold() {
        for &(d, mu, g3) in &[(1.0, 0.5, 0.1), (0.7, 1.3, -0.4), (1.2, 0.2, 0.02)] {
            let s = elliptic_coeffs(&params(d, mu), g3).unwrap();
            let t = s.period();
            for i in 0..40 {
                let z = t * i as f64 / 40.0;
                if s.nearest_singularity(z).unwrap().1 < 0.1 * t {
                    continue;
                }
                let v = s.derivatives(z).unwrap();
                let r1 = first_integral_at(&v, s.c0, s.c1, &s.params);
                let r2 = second_integral_at(&v, s.c0, s.c1, s.c2, &s.params);
                assert!(r1.abs() < 1e-7 && r2.abs() < 1e-7, "{d} {mu} {g3} z={z}: {r1} {r2}");
            }
        }
    }

    #[test]
    fn simple_pole_at_lattice_points() {
        let s = elliptic_coeffs(&params(1.0, 0.5), 0.1).unwrap();
        for &z in &[1e-3, -1e-3, 1e-4] {
            let v = s.eval(z).unwrap();
            assert!(((v - s.h) * z + 2.0 * s.b).abs() < 1e-2 * s.b);
        }
        assert!(matches!(s.eval(0.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn minus_c_is_a_root_of_the_cubic() {
        for &(d, mu, g3) in &[(1.0, 0.5, 0.1), (0.4, 2.5, -1.0), (1.3, 0.1, 0.3)] {
            let s = elliptic_coeffs(&params(d, mu), g3).unwrap();
            let t = -s.c;
            let scale = 4.0 * t.abs().powi(3) + s.g2.abs() * t.abs() + g3.abs();
            assert!((4.0 * t.powi(3) - s.g2 * t - g3).abs() < 1e-13 * scale);
        }
        // a pole at the half period as well as at the lattice point
        let s = elliptic_coeffs(&params(1.0, 0.5), 0.1).unwrap().with_z0(0.3);
        let half = 0.3 + 0.5 * s.period();
        assert!(matches!(s.eval(half), Err(Error::Pole { .. })));
        let v = s.eval(half + 1e-3).unwrap();
        assert!(v.abs() > 1e3);
    }

    #[test]
    fn odd_about_lattice_points_and_periodic() {
        let s = elliptic_coeffs(&params(1.0, 0.5), 0.1).unwrap();
        let t = s.period();
        assert!(t.is_finite());
        for &z in &[0.37, 0.81] {
            let (a, b) = (s.eval(z).unwrap(), s.eval(-z).unwrap());
            assert!((a - s.h + b - s.h).abs() < 1e-9 * a.abs().max(1.0));
            assert!((s.eval(z + t).unwrap() - a).abs() < 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn half_period_line_solves_the_integrals() {
        let p = params(1.0, 0.5);
        let s = elliptic_coeffs(&p, g3_for_speed(&p, 5.0).unwrap())
            .unwrap()
            .on_half_period_line()
            .unwrap();
        let t = s.period();
        assert_eq!(s.singularities(), vec![0.5 * t]);
        for i in 0..50 {
            let z = t * i as f64 / 50.0;
            if s.nearest_singularity(z).unwrap().1 < 0.1 * t {
                continue;
            }
            let v = s.derivatives(z).unwrap();
            assert!(second_integral_at(&v, s.c0, s.c1, s.c2, &s.params).abs() < 1e-7);
        }
        let neg = elliptic_coeffs(&p, 3.0).unwrap();
        assert!(neg.on_half_period_line().is_err());
    }
}
