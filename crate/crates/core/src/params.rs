//! Model parameters, the chain-to-continuum parameter map and the equation
//! registry.
//!
//! The continuum equation is written as
//!
//! ```text
//! u_t + u u_x - μ u² u_x + δ² u_xxx + 2δ² u_x u_xx + δ² u u_xxx
//!     - 4δ²μ u u_x u_xx - δ²μ u_x³ - δ²μ u² u_xxx + (2/5) δ⁴ u_xxxxx = 0
//! ```
//!
//! with the Gardner equation `u_t + u u_x - μ u² u_x + δ² u_xxx = 0` as its
//! low-order truncation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the discrete α+β mass chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalChainParams {
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub h: f64,
}

impl PhysicalChainParams {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m", self.m),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("h", self.h),
        ] {
            // beta = 0 is the pure-α chain and maps to μ = 0.
            let ok = if name == "beta" { v >= 0.0 } else { v > 0.0 };
            if !(ok && v.is_finite()) {
                return Err(Error::domain(format!("chain parameter {name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Squared sound speed `c² = γh²/m`.
    pub fn wave_speed_squared(&self) -> f64 {
        self.gamma * self.h * self.h / self.m
    }
}

/// The pair (δ, μ). `μ = 0` is the quadratic-potential (KdV5) limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub delta: f64,
    pub mu: f64,
}

impl ModelParams {
    pub fn new(delta: f64, mu: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::domain(format!("delta = {delta} must be positive")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::domain(format!("mu = {mu} must be non-negative")));
        }
        Ok(Self { delta, mu })
    }

    /// Fails unless `mu > 0`; used by the closed forms that divide by μ.
    pub fn require_positive_mu(&self) -> Result<()> {
        if self.mu > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(format!("mu = {} must be positive here", self.mu)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquationKind {
    /// The full fifth-order equation.
    Fpu5,
    Gardner,
    Kdv,
    /// The fifth-order equation with μ forced to zero.
    Kdv5,
}

impl EquationKind {
    pub const ALL: [EquationKind; 4] = [
        EquationKind::Fpu5,
        EquationKind::Gardner,
        EquationKind::Kdv,
        EquationKind::Kdv5,
    ];

    /// The μ that the operators actually use for this kind.
    pub fn effective_mu(self, params: &ModelParams) -> f64 {
        match self {
            EquationKind::Fpu5 | EquationKind::Gardner => params.mu,
            EquationKind::Kdv | EquationKind::Kdv5 => 0.0,
        }
    }

    pub fn is_fifth_order(self) -> bool {
        matches!(self, EquationKind::Fpu5 | EquationKind::Kdv5)
    }

    pub fn name(self) -> &'static str {
        match self {
            EquationKind::Fpu5 => "fpu5",
            EquationKind::Gardner => "gardner",
            EquationKind::Kdv => "kdv",
            EquationKind::Kdv5 => "kdv5",
        }
    }
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EquationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fpu5" => Ok(EquationKind::Fpu5),
            "gardner" => Ok(EquationKind::Gardner),
            "kdv" => Ok(EquationKind::Kdv),
            "kdv5" => Ok(EquationKind::Kdv5),
            other => Err(Error::usage(format!(
                "unknown equation kind `{other}` (expected fpu5, gardner, kdv or kdv5)"
            ))),
        }
    }
}

/// Maps chain constants onto (δ, μ): `μ = 3βγ/(4α²)`, `δ = m c²/(12γ)`.
///
/// Substituting `c² = γh²/m` gives `δ = h²/12`, independent of m and γ; the
/// simplified form is what gets evaluated.
pub fn physical_to_model(p: &PhysicalChainParams) -> Result<ModelParams> {
    p.validate()?;
    let delta = p.h * p.h / 12.0;
    let mu = 3.0 * p.beta * p.gamma / (4.0 * p.alpha * p.alpha);
    ModelParams::new(delta, mu)
}

/// Speed of the tanh kink, `C0 = (15 - 56μ)/(180μ)`.
pub fn kink_speed(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("kink speed needs mu > 0, got {mu}")));
    }
    Ok((15.0 - 56.0 * mu) / (180.0 * mu))
}

/// `n` uniformly spaced `(μ, C0)` rows on `[mu_min, mu_max]`.
pub fn velocity_curve(mu_min: f64, mu_max: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    if !(mu_min > 0.0) {
        return Err(Error::domain(format!("mu_min = {mu_min} must be positive")));
    }
    if mu_max < mu_min {
        return Err(Error::domain("mu_max must not be below mu_min"));
    }
    if n == 0 {
        return Err(Error::usage("velocity curve needs at least one sample"));
    }
    if n == 1 {
        if mu_max != mu_min {
            return Err(Error::usage("a single sample needs mu_min == mu_max"));
        }
        return Ok(vec![(mu_min, kink_speed(mu_min)?)]);
    }
    let step = (mu_max - mu_min) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let mu = if i == n - 1 { mu_max } else { mu_min + step * i as f64 };
            kink_speed(mu).map(|c| (mu, c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(m: f64, alpha: f64, beta: f64, gamma: f64, h: f64) -> PhysicalChainParams {
        PhysicalChainParams { m, alpha, beta, gamma, h }
    }

    #[test]
    fn unit_chain() {
        let p = physical_to_model(&chain(1.0, 1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((p.delta - 1.0 / 12.0).abs() < 1e-16);
        assert!((p.mu - 0.75).abs() < 1e-16);
    }

    #[test]
    fn alpha_only_chain() {
        let p = physical_to_model(&chain(2.0, 1.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(p.mu, 0.0);
    }

    #[test]
    fn delta_matches_unsimplified_formula() {
        for &(m, gamma, h) in &[(1.0, 1.0, 1.0), (2.5, 0.3, 0.7), (0.01, 40.0, 3.0)] {
            let p = chain(m, 1.0, 1.0, gamma, h);
            let direct = p.m * p.wave_speed_squared() / (12.0 * p.gamma);
            let q = physical_to_model(&p).unwrap();
            assert!((q.delta - direct).abs() <= 1e-15 * direct);
            let doubled = physical_to_model(&chain(m, 1.0, 1.0, gamma, 2.0 * h)).unwrap();
            assert!((doubled.delta - 4.0 * q.delta).abs() <= 1e-15 * doubled.delta);
        }
    }

    #[test]
    fn rejects_non_positive_chain() {
        assert!(physical_to_model(&chain(0.0, 1.0, 1.0, 1.0, 1.0)).is_err());
        assert!(physical_to_model(&chain(1.0, -1.0, 1.0, 1.0, 1.0)).is_err());
        assert!(physical_to_model(&chain(1.0, 1.0, 1.0, 1.0, f64::NAN)).is_err());
    }

    #[test]
    fn kink_speed_values() {
        assert!(kink_speed(15.0 / 56.0).unwrap().abs() < 1e-16);
        assert!((kink_speed(1.0).unwrap() + 41.0 / 180.0).abs() < 1e-15);
        assert!(matches!(kink_speed(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn kink_speed_strictly_decreasing() {
        let mut prev = kink_speed(0.01).unwrap();
        for i in 2..2000 {
            let c = kink_speed(0.01 * i as f64).unwrap();
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn velocity_curve_rows() {
        let single = velocity_curve(15.0 / 56.0, 15.0 / 56.0, 1).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single[0].1.abs() < 1e-16);

        let rows = velocity_curve(0.1, 1.0, 10).unwrap();
        assert_eq!(rows.len(), 10);
        for (mu, c) in &rows {
            assert_eq!(*c, kink_speed(*mu).unwrap());
        }
        assert!(rows.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(velocity_curve(-1.0, 1.0, 5).is_err());
    }

    #[test]
    fn kind_parsing() {
        for k in EquationKind::ALL {
            assert_eq!(k.name().parse::<EquationKind>().unwrap(), k);
        }
        assert!("burgers".parse::<EquationKind>().is_err());
        let p = ModelParams::new(1.0, 0.3).unwrap();
        assert_eq!(EquationKind::Kdv5.effective_mu(&p), 0.0);
        assert_eq!(EquationKind::Gardner.effective_mu(&p), 0.3);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mu_invariant_under_joint_scaling(
                alpha in 0.1f64..10.0, beta in 0.0f64..10.0, gamma in 0.1f64..10.0, c in 0.1f64..10.0
            ) {
                let a = physical_to_model(&PhysicalChainParams { m: 1.0, alpha, beta, gamma, h: 1.0 }).unwrap();
                let b = physical_to_model(&PhysicalChainParams {
                    m: 1.0, alpha: c * alpha, beta: c * c * beta, gamma, h: 1.0,
                }).unwrap();
                prop_assert!((a.mu - b.mu).abs() <= 1e-13 * a.mu.max(1e-300));
            }

            #[test]
            fn delta_is_h_squared_over_twelve(
                m in 0.01f64..100.0, gamma in 0.01f64..100.0, h in 0.01f64..10.0
            ) {
                let p = physical_to_model(&PhysicalChainParams { m, alpha: 1.0, beta: 1.0, gamma, h }).unwrap();
                prop_assert_eq!(p.delta, h * h / 12.0);
            }
        }
    }
}
