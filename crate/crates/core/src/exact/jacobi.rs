//! Jacobi elliptic functions and the complete integral K for real parameter
//! `0 <= m <= 1`, by the arithmetic-geometric mean.

use std::f64::consts::PI;

const AGM_TOL: f64 = 1e-15;
const MAX_AGM_STEPS: usize = 40;

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, `K(m)`. Infinite at `m = 1`.
pub fn ellipk(m: f64) -> f64 {
    if m >= 1.0 {
        return f64::INFINITY;
    }
    PI / (2.0 * agm(1.0, (1.0 - m).sqrt()))
}

/// `(sn, cn, dn)` of `u` with parameter `m`, via descending Landen
/// transformations.
pub fn sncndn(u: f64, m: f64) -> (f64, f64, f64) {
    debug_assert!((0.0..=1.0).contains(&m), "parameter {m} outside [0, 1]");
    let mc = 1.0 - m;
    if mc <= 0.0 {
        let sech = 1.0 / u.cosh();
        return (u.tanh(), sech, sech);
    }
    if m == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }

    let mut em = [0.0; MAX_AGM_STEPS];
    let mut en = [0.0; MAX_AGM_STEPS];
    let mut a = 1.0;
    let mut emc = mc;
    let mut c = 1.0;
    let mut last = 0;
    for l in 0..MAX_AGM_STEPS {
        last = l;
        em[l] = a;
        emc = emc.sqrt();
        en[l] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= 1e-10 * a {
            break;
        }
        emc *= a;
        a = c;
    }

    let v = c * u;
    let mut sn = v.sin();
    let mut cn = v.cos();
    let mut dn = 1.0;
    if sn != 0.0 {
        let mut a = cn / sn;
        let mut c = c * a;
        for l in (0..=last).rev() {
            let b = em[l];
            a *= c;
            c *= dn;
            dn = (en[l] + a) / (b + a);
            a = c / b;
        }
        let a = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { a } else { -a };
        cn = c * sn;
    }
    (sn, cn, dn)
}
