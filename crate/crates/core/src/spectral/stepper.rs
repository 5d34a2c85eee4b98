//! Integrating-factor RK4 for `û_t = L û + N[û]` with a diagonal `L`.
//!
//! With `E = e^{L dt}` and `E2 = e^{L dt/2}`:
//!
//! ```text
//! a = dt N[û]
//! b = dt N[(û + a/2) E2]
//! c = dt N[û E2 + b/2]
//! d = dt N[û E + c E2]
//! û(t+dt) = û E + (a E + 2(b + c) E2 + d) / 6
//! ```

use num_complex::Complex64;

use super::SpectralField;
use crate::error::{Error, Result};

/// Spectral-space nonlinear tendency `N[û]`, not yet multiplied by `dt`.
pub trait NonlinearOperator {
    fn apply(&mut self, u_hat: &[Complex64], out: &mut [Complex64]) -> Result<()>;
}

impl<F> NonlinearOperator for F
where
    F: FnMut(&[Complex64], &mut [Complex64]) -> Result<()>,
{
    fn apply(&mut self, u_hat: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self(u_hat, out)
    }
}

#[derive(Debug, Clone)]
pub struct IfRk4 {
    dt: f64,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
    d: Vec<Complex64>,
    stage: Vec<Complex64>,
}

impl IfRk4 {
    pub fn new(symbol: &[Complex64], dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::usage(format!("time step {dt} must be positive")));
        }
        let zero = vec![Complex64::new(0.0, 0.0); symbol.len()];
        Ok(Self {
            dt,
            e_full: symbol.iter().map(|l| (l * dt).exp()).collect(),
            e_half: symbol.iter().map(|l| (l * (0.5 * dt)).exp()).collect(),
            a: zero.clone(),
            b: zero.clone(),
            c: zero.clone(),
            d: zero.clone(),
            stage: zero,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `u_hat` in place by one step. `step_index` is only used to
    /// label a blow-up.
    pub fn step<N: NonlinearOperator + ?Sized>(
        &mut self,
        u_hat: &mut [Complex64],
        op: &mut N,
        step_index: usize,
    ) -> Result<()> {
        if u_hat.len() != self.e_full.len() {
            return Err(Error::usage("state length does not match the linear symbol"));
        }
        let dt = self.dt;
        let (e, e2) = (&self.e_full, &self.e_half);

        op.apply(u_hat, &mut self.a)?;
        self.a.iter_mut().for_each(|v| *v *= dt);

        for i in 0..u_hat.len() {
            self.stage[i] = (u_hat[i] + self.a[i] * 0.5) * e2[i];
        }
        op.apply(&self.stage, &mut self.b)?;
        self.b.iter_mut().for_each(|v| *v *= dt);

        for i in 0..u_hat.len() {
            self.stage[i] = u_hat[i] * e2[i] + self.b[i] * 0.5;
        }
        op.apply(&self.stage, &mut self.c)?;
        self.c.iter_mut().for_each(|v| *v *= dt);

        for i in 0..u_hat.len() {
            self.stage[i] = u_hat[i] * e[i] + self.c[i] * e2[i];
        }
        op.apply(&self.stage, &mut self.d)?;
        self.d.iter_mut().for_each(|v| *v *= dt);

        let mut finite = true;
        for i in 0..u_hat.len() {
            let next = u_hat[i] * e[i]
                + (self.a[i] * e[i] + (self.b[i] + self.c[i]) * e2[i] * 2.0 + self.d[i]) / 6.0;
            finite &= next.re.is_finite() && next.im.is_finite();
            u_hat[i] = next;
        }
        if !finite {
            return Err(Error::BlowUp {
                step: step_index,
                time: (step_index + 1) as f64 * dt,
                last: None,
            });
        }
        Ok(())
    }
}

/// One IF-RK4 step on a standalone spectral field.
pub fn if_rk4_step<N: NonlinearOperator + ?Sized>(
    u_hat: &SpectralField,
    dt: f64,
    symbol: &[Complex64],
    op: &mut N,
) -> Result<SpectralField> {
    let mut stepper = IfRk4::new(symbol, dt)?;
    let mut out = u_hat.clone();
    stepper.step(out.coeffs_mut(), op, 0)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, RealField, Spectral};
    use std::f64::consts::PI;

    fn zero_op(_: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        Ok(())
    }

    #[test]
    fn linear_advection_is_exact() {
        let g = Grid::new(2.0 * PI, 32).unwrap();
        let s = Spectral::new(g);
        // u_t = u_x has symbol i k and solution sin(x + t)
        let symbol: Vec<Complex64> = s.wavenumbers().iter().map(|&k| Complex64::new(0.0, k)).collect();
        let u0 = s.forward(&RealField::from_fn(g, f64::sin).unwrap()).unwrap();
        let dt = 0.37;
        let u1 = if_rk4_step(&u0, dt, &symbol, &mut zero_op).unwrap();
        let back = s.inverse(&u1).unwrap();
        for (x, v) in g.points().iter().zip(back.values()) {
            assert!((v - (x + dt).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn imaginary_symbol_preserves_modulus() {
        let n = 64;
        let symbol: Vec<Complex64> = (0..n).map(|j| Complex64::new(0.0, (j as f64).powi(5) * 1e-3)).collect();
        let start: Vec<Complex64> = (0..n).map(|j| Complex64::new((j as f64).cos(), (j as f64 * 0.3).sin())).collect();
        let mut stepper = IfRk4::new(&symbol, 0.013).unwrap();
        let mut u = start.clone();
        for i in 0..100 {
            stepper.step(&mut u, &mut zero_op, i).unwrap();
        }
        for (a, b) in u.iter().zip(&start) {
            assert!((a.norm() - b.norm()).abs() < 1e-13);
        }
    }

    #[test]
    fn scalar_ode_fourth_order() {
        // u' = i ω u + u², exact stepping error shrinks ~16x per halving
        let omega = 3.0;
        let symbol = [Complex64::new(0.0, omega)];
        let mut op = |u: &[Complex64], out: &mut [Complex64]| -> Result<()> {
            out[0] = -u[0] * u[0] * 0.5;
            Ok(())
        };
        let run = |steps: usize, op: &mut dyn NonlinearOperator| {
            let mut s = IfRk4::new(&symbol, 1.0 / steps as f64).unwrap();
            let mut u = [Complex64::new(0.8, 0.1)];
            for i in 0..steps {
                s.step(&mut u, op, i).unwrap();
            }
            u[0]
        };
        let coarse = run(20, &mut op);
        let mid = run(40, &mut op);
        let fine = run(80, &mut op);
        let ratio = (coarse - mid).norm() / (mid - fine).norm();
        assert!((ratio - 16.0).abs() < 4.0, "ratio {ratio}");
    }

    #[test]
    fn nan_reports_blow_up() {
        let symbol = [Complex64::new(0.0, 1.0)];
        let mut op = |_: &[Complex64], out: &mut [Complex64]| -> Result<()> {
            out[0] = Complex64::new(f64::NAN, 0.0);
            Ok(())
        };
        let mut s = IfRk4::new(&symbol, 0.1).unwrap();
        let mut u = [Complex64::new(1.0, 0.0)];
        match s.step(&mut u, &mut op, 41) {
            Err(Error::BlowUp { step, .. }) => assert_eq!(step, 41),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_dt() {
        assert!(IfRk4::new(&[Complex64::new(0.0, 1.0)], 0.0).is_err());
        assert!(IfRk4::new(&[Complex64::new(0.0, 1.0)], f64::NAN).is_err());
    }
}
