//! Leading-order balance and Fuchs indices of the second-integral ODE.
//!
//! Only the dominant terms near a movable pole matter:
//!
//! ```text
//! -(1/2) μδ² v² v'² + (2/5) δ⁴ v' v''' - (1/5) δ⁴ v''² = 0
//! ```
//!
//! Each term is a product of derivatives of `v`. Substituting powers of `z`
//! reduces every derivative to a falling factorial, so the whole computation
//! stays in exact rational arithmetic.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;

pub type Q = Ratio<i64>;

/// Polynomial with rational coefficients, lowest degree first.
pub type Poly = Vec<Q>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// `coeff · μ^mu · δ^delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Monomial {
    #[serde(serialize_with = "ser_q")]
    pub coeff: Q,
    pub mu: i32,
    pub delta: i32,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl Monomial {
    pub fn eval(&self, p: &ModelParams) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN) * p.mu.powi(self.mu) * p.delta.powi(self.delta)
    }
}

/// `coeff · μ^mu · δ^delta · Π v^(orders[i])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Q,
    pub mu: i32,
    pub delta: i32,
    pub orders: Vec<u32>,
}

impl Term {
    fn degree(&self) -> i64 {
        self.orders.len() as i64
    }

    fn order_sum(&self) -> i64 {
        self.orders.iter().map(|&d| d as i64).sum()
    }
}

/// The dominant terms of the second integral near a pole.
pub fn leading_terms() -> Vec<Term> {
    vec![
        Term { coeff: q(-1, 2), mu: 1, delta: 2, orders: vec![0, 0, 1, 1] },
        Term { coeff: q(2, 5), mu: 0, delta: 4, orders: vec![1, 3] },
        Term { coeff: q(-1, 5), mu: 0, delta: 4, orders: vec![2, 2] },
    ]
}

/// `r (r-1) ... (r-d+1)`.
fn falling(r: Q, d: u32) -> Q {
    (0..d).fold(Q::one(), |acc, i| acc * (r - Q::from(i as i64)))
}

fn poly_mul(a: &[Q], b: &[Q]) -> Poly {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &mut Poly, b: &[Q]) {
    if a.len() < b.len() {
        a.resize(b.len(), Q::zero());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// `(j + c)(j + c - 1) ... (j + c - d + 1)` as a polynomial in `j`.
fn falling_poly(c: Q, d: u32) -> Poly {
    (0..d).fold(vec![Q::one()], |acc, i| poly_mul(&acc, &[c - Q::from(i as i64), Q::one()]))
}

pub fn eval_poly(p: &[Q], x: Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadingBalance {
    /// Pole order: `v ~ a0 z^{-p}`.
    pub p: i64,
    /// `a0²` as an exact monomial in (μ, δ).
    pub a0_squared: Monomial,
    /// The two branches `±a0` at the given parameters.
    pub a0: [f64; 2],
}

/// Pole order that balances the terms, from every pair of distinct degrees.
fn pole_order(terms: &[Term]) -> Result<i64> {
    let mut found: Option<Q> = None;
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            if a.degree() == b.degree() {
                continue;
            }
            // -n_a p - s_a = -n_b p - s_b
            let p = Q::new(b.order_sum() - a.order_sum(), a.degree() - b.degree());
            match found {
                None => found = Some(p),
                Some(f) if f == p => {}
                Some(_) => return Err(Error::Undefined("dominant terms admit no common balance".into())),
            }
        }
    }
    match found {
        Some(p) if p.is_integer() && p.is_positive() => Ok(p.to_integer()),
        _ => Err(Error::Undefined("no positive integer pole order".into())),
    }
}

/// Coefficient of `z^{-n p - s}` after substituting `v = a0 z^{-p}`, grouped
/// by power of `a0`.
fn balance_coefficients(terms: &[Term], p: i64) -> BTreeMap<i64, Vec<Monomial>> {
    let mut by_power: BTreeMap<i64, Vec<Monomial>> = BTreeMap::new();
    for t in terms {
        let c = t
            .orders
            .iter()
            .fold(t.coeff, |acc, &d| acc * falling(Q::from(-p), d));
        by_power.entry(t.degree()).or_default().push(Monomial { coeff: c, mu: t.mu, delta: t.delta });
    }
    by_power
}

fn collapse(monomials: &[Monomial]) -> Result<Monomial> {
    let mut sums: BTreeMap<(i32, i32), Q> = BTreeMap::new();
    for m in monomials {
        *sums.entry((m.mu, m.delta)).or_insert_with(Q::zero) += m.coeff;
    }
    sums.retain(|_, c| !c.is_zero());
    match sums.len() {
        0 => Ok(Monomial { coeff: Q::zero(), mu: 0, delta: 0 }),
        1 => {
            let ((mu, delta), coeff) = sums.pop_first().expect("one entry");
            Ok(Monomial { coeff, mu, delta })
        }
        _ => Err(Error::Undefined(format!("coefficient mixes {} parameter monomials", sums.len()))),
    }
}

pub fn leading_balance(params: &ModelParams) -> Result<LeadingBalance> {
    params.require_positive_mu()?;
    let terms = leading_terms();
    let p = pole_order(&terms)?;
    let groups = balance_coefficients(&terms, p);
    let mut it = groups.iter();
    let (Some((&lo_pow, lo)), Some((&hi_pow, hi)), None) = (it.next(), it.next(), it.next()) else {
        return Err(Error::Undefined("expected two powers of a0 in the balance".into()));
    };
    let (lo, hi) = (collapse(lo)?, collapse(hi)?);
    if hi_pow - lo_pow != 2 || hi.coeff.is_zero() {
        return Err(Error::Undefined("balance is not quadratic in a0²".into()));
    }
    // hi a0^2 + lo = 0
    let a0_squared = Monomial {
        coeff: -lo.coeff / hi.coeff,
        mu: lo.mu - hi.mu,
        delta: lo.delta - hi.delta,
    };
    let value = a0_squared.eval(params);
    if !(value > 0.0) {
        return Err(Error::Undefined(format!("a0² = {value} has no real branches")));
    }
    let a0 = value.sqrt();
    Ok(LeadingBalance { p, a0_squared, a0: [a0, -a0] })
}

/// The leading coefficient after substituting `v = a0/z`, divided by `a0^{n_min}`
/// and with `a0²` replaced by its monomial; zero when the balance is right.
pub fn balance_residual(a0_squared: &Monomial) -> Result<Monomial> {
    let terms = leading_terms();
    let p = pole_order(&terms)?;
    let groups = balance_coefficients(&terms, p);
    let min_pow = *groups.keys().next().unwrap_or(&0);
    let mut all = Vec::new();
    for (pow, ms) in &groups {
        let k = ((pow - min_pow) / 2) as i32;
        for m in ms {
            all.push(Monomial {
                coeff: m.coeff * a0_squared.coeff.pow(k),
                mu: m.mu + k * a0_squared.mu,
                delta: m.delta + k * a0_squared.delta,
            });
        }
    }
    collapse(&all)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuchsResult {
    /// Indicial polynomial in `j`, lowest degree first, normalised to be monic.
    #[serde(serialize_with = "ser_poly")]
    pub polynomial: Poly,
    /// The indices, exact where rational.
    pub roots: Vec<Complex64>,
}

fn ser_poly<S: serde::Serializer>(v: &Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&c.to_string())?;
    }
    seq.end()
}

impl FuchsResult {
    /// Builds a result from known indices, e.g. for testing the verdict.
    pub fn from_roots(roots: Vec<Complex64>) -> Self {
        Self { polynomial: Vec::new(), roots }
    }
}

/// Indicial polynomial from linearising about `v = a0/z`. The overall factor
/// `a0` and the one surviving parameter monomial are divided out.
fn indicial_polynomial(balance: &LeadingBalance) -> Result<Poly> {
    let terms = leading_terms();
    let p = balance.p;
    let base = Q::from(-p);
    let mut by_key: BTreeMap<(i32, i32), Poly> = BTreeMap::new();
    for t in &terms {
        // the perturbation z^{j-p} replaces one factor at a time
        for slot in 0..t.orders.len() {
            let mut poly: Poly = vec![t.coeff];
            for (i, &d) in t.orders.iter().enumerate() {
                if i == slot {
                    poly = poly_mul(&poly, &falling_poly(base, d));
                } else {
                    poly = poly_mul(&poly, &[falling(base, d)]);
                }
            }
            // a0^{n-1} = a0 · (a0²)^{(n-2)/2}
            let n = t.orders.len() as i32;
            if (n - 1) % 2 != 1 {
                return Err(Error::Undefined("even power of a0 in the linearisation".into()));
            }
            let k = (n - 2) / 2;
            let a2 = balance.a0_squared;
            let scale = a2.coeff.pow(k);
            let key = (t.mu + k * a2.mu, t.delta + k * a2.delta);
            let scaled: Poly = poly.iter().map(|c| c * scale).collect();
            poly_add(by_key.entry(key).or_default(), &scaled);
        }
    }
    by_key.retain(|_, p| p.iter().any(|c| !c.is_zero()));
    if by_key.len() != 1 {
        return Err(Error::Undefined(format!(
            "parameters do not cancel: {} monomials survive",
            by_key.len()
        )));
    }
    let poly = trim(by_key.into_values().next().unwrap_or_default());
    let lead = *poly.last().ok_or_else(|| Error::Undefined("empty indicial polynomial".into()))?;
    Ok(poly.into_iter().map(|c| c / lead).collect())
}

/// Rational roots by the rational-root theorem, with multiplicity.
fn rational_roots(poly: &[Q]) -> (Vec<Q>, Poly) {
    let mut rest = trim(poly.to_vec());
    let mut found = Vec::new();
    loop {
        if rest.len() <= 1 {
            break;
        }
        // clear denominators
        let lcm = rest.iter().fold(1i64, |l, c| num_integer::lcm(l, *c.denom()));
        let ints: Vec<i64> = rest.iter().map(|c| (c * Q::from(lcm)).to_integer()).collect();
        if ints[0] == 0 {
            found.push(Q::zero());
            rest.remove(0);
            continue;
        }
        let divisors = |n: i64| (1..=n.abs()).filter(move |d| n % d == 0);
        let lead = *ints.last().unwrap_or(&1);
        let root = divisors(ints[0])
            .flat_map(|a| divisors(lead).map(move |b| Q::new(a, b)))
            .flat_map(|r| [r, -r])
            .find(|&r| eval_poly(&rest, r).is_zero());
        let Some(r) = root else { break };
        found.push(r);
        // synthetic division by (j - r)
        let mut quotient = vec![Q::zero(); rest.len() - 1];
        let mut carry = Q::zero();
        for i in (0..rest.len()).rev() {
            let c = rest[i] + carry;
            if i > 0 {
                quotient[i - 1] = c;
                carry = c * r;
            }
        }
        rest = quotient;
    }
    (found, rest)
}

fn numeric_roots(poly: &[Q]) -> Result<Vec<Complex64>> {
    let c: Vec<f64> = poly.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    match c.len() {
        0 | 1 => Ok(Vec::new()),
        2 => Ok(vec![Complex64::new(-c[0] / c[1], 0.0)]),
        3 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = Complex64::new(b * b - 4.0 * a * cc, 0.0).sqrt();
            Ok(vec![(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)])
        }
        n => Err(Error::Undefined(format!("no closed form for the remaining degree-{} factor", n - 1))),
    }
}

pub fn fuchs_indices(params: &ModelParams) -> Result<FuchsResult> {
    let balance = leading_balance(params)?;
    let polynomial = indicial_polynomial(&balance)?;
    let (rational, rest) = rational_roots(&polynomial);
    let mut roots: Vec<Complex64> = rational
        .iter()
        .map(|r| Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    roots.extend(numeric_roots(&rest)?);
    Ok(FuchsResult { polynomial, roots })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub passes: bool,
    pub reason: String,
}

const INDEX_TOL: f64 = 1e-9;

/// Passes when every index other than one `-1` is a non-negative integer.
pub fn passes_painleve(result: &FuchsResult) -> Verdict {
    let mut others: Vec<Complex64> = result.roots.clone();
    if let Some(i) = others
        .iter()
        .position(|r| (r - Complex64::new(-1.0, 0.0)).norm() < INDEX_TOL)
    {
        others.remove(i);
    }
    let fail = |reason: &str| Verdict { passes: false, reason: reason.to_string() };
    if others.iter().any(|r| r.im.abs() > INDEX_TOL) {
        return fail("complex indices");
    }
    if others.iter().any(|r| (r.re - r.re.round()).abs() > INDEX_TOL) {
        return fail("non-integer index");
    }
    if others.iter().any(|r| r.re.round() < 0.0) {
        return fail("negative index");
    }
    Verdict { passes: true, reason: "all indices are non-negative integers".to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta: f64, mu: f64) -> ModelParams {
        ModelParams::new(delta, mu).unwrap()
    }

    #[test]
    fn balance_values() {
        let b = leading_balance(&params(1.0, 1.0)).unwrap();
        assert_eq!(b.p, 1);
        assert_eq!(b.a0_squared, Monomial { coeff: q(16, 5), mu: -1, delta: 2 });
        assert!((b.a0[0] - 4.0 * 5f64.sqrt() / 5.0).abs() < 1e-15);
        assert!((b.a0[0] - 1.78885).abs() < 1e-5);
        assert_eq!(b.a0[1], -b.a0[0]);
        let b = leading_balance(&params(5.0, 5.0)).unwrap();
        assert!((b.a0[0] - 4.0).abs() < 1e-14);
        assert!(leading_balance(&params(1.0, 0.0)).is_err());
    }

    #[test]
    fn balance_is_exact() {
        let b = leading_balance(&params(0.3, 2.0)).unwrap();
        assert!(balance_residual(&b.a0_squared).unwrap().coeff.is_zero());
        let wrong = Monomial { coeff: q(3, 1), ..b.a0_squared };
        assert!(!balance_residual(&wrong).unwrap().coeff.is_zero());
    }

    #[test]
    fn indicial_polynomial_and_roots() {
        let r = fuchs_indices(&params(1.0, 1.0)).unwrap();
        // (j + 1)(j² - 5j + 8)
        assert_eq!(r.polynomial, vec![q(8, 1), q(3, 1), q(-4, 1), q(1, 1)]);
        assert!(eval_poly(&r.polynomial, q(-1, 1)).is_zero());
        let want = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(2.5, 7f64.sqrt() / 2.0),
            Complex64::new(2.5, -(7f64.sqrt()) / 2.0),
        ];
        assert_eq!(r.roots.len(), 3);
        for w in want {
            assert!(r.roots.iter().any(|x| (x - w).norm() < 1e-14), "{w} missing from {:?}", r.roots);
        }
    }

    #[test]
    fn independent_of_parameters_and_branch() {
        let base = fuchs_indices(&params(1.0, 1.0)).unwrap().polynomial;
        for &(d, mu) in &[(0.1, 0.2), (3.0, 7.0), (0.5, 0.01), (2.2, 1.3)] {
            assert_eq!(fuchs_indices(&params(d, mu)).unwrap().polynomial, base);
        }
        // both branches share a0², and the linearised coefficient is odd in a0
        for t in leading_terms() {
            assert_eq!(t.orders.len() % 2, 0);
        }
    }

    #[test]
    fn verdicts() {
        let r = fuchs_indices(&params(1.0, 1.0)).unwrap();
        let v = passes_painleve(&r);
        assert!(!v.passes);
        assert_eq!(v.reason, "complex indices");
        let real = |xs: &[f64]| FuchsResult::from_roots(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect());
        assert!(passes_painleve(&real(&[-1.0, 4.0, 6.0])).passes);
        let v = passes_painleve(&real(&[-1.0, 0.5, 3.0]));
        assert!(!v.passes);
        assert_eq!(v.reason, "non-integer index");
        assert!(!passes_painleve(&real(&[-1.0, -2.0, 3.0])).passes);
    }

    #[test]
    fn helpers() {
        assert_eq!(falling_poly(q(-1, 1), 2), vec![q(2, 1), q(-3, 1), q(1, 1)]);
        let (found, rest) = rational_roots(&[q(-6, 1), q(11, 1), q(-6, 1), q(1, 1)]);
        assert_eq!(found.len(), 3);
        assert_eq!(rest, vec![q(1, 1)]);
        let (found, _) = rational_roots(&[q(-1, 1), q(0, 1), q(4, 1)]);
        assert!(found.contains(&q(1, 2)) && found.contains(&q(-1, 2)));
    }
}
