//! Integrals of `f_gamma` over moduli space for a described multicurve type,
//! and the volume-integral bounds built from them.

mod bounds;
mod cut;
pub mod quad;
mod weight;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::bracket::{BracketEngine, BracketError};
use crate::consistency::ConsistencyError;
use crate::exactnum::{PiLaurent, PiScalar};
use crate::volume::{SquarePoly, VolumeError};

pub use bounds::{
    expected_count_nonsep, multi_sep_bound, prob_sep_bound, reciprocal_systole_integral, thin_part_estimate,
    Expectation, MultiSepBound, ThinPart, DEFAULT_EPS0,
};
pub use cut::{Component, CutDescription, Slot};
pub use weight::WeightSpec;

/// Relative tolerance of every quadrature.
pub const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeodesicError {
    #[error("invalid cut description: {0}")]
    InvalidCut(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("expected {expected} boundary lengths, got {got}")]
    BoundaryArity { expected: usize, got: usize },
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error(transparent)]
    Consistency(#[from] ConsistencyError),
}

impl From<VolumeError> for GeodesicError {
    fn from(e: VolumeError) -> Self {
        match e {
            VolumeError::Bracket(b) => Self::Bracket(b),
            other => Self::Precondition(other.to_string()),
        }
    }
}

/// `sum_m c_m Lambda^m` with graded coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LambdaPoly {
    terms: BTreeMap<i64, PiScalar>,
}

impl LambdaPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, power: i64, c: &PiScalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(power).or_insert_with(PiScalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn add(&mut self, other: &LambdaPoly) {
        for (m, c) in &other.terms {
            self.add_term(*m, c);
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (*m, c.mul_rational(q))).collect() }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &PiScalar)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, power: i64) -> PiScalar {
        self.terms.get(&power).cloned().unwrap_or_else(PiScalar::zero)
    }

    pub fn lowest_power(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn highest_power(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.terms.iter().map(|(m, c)| c.to_f64() * lambda.powi(*m as i32)).sum()
    }

    /// `self(lambda) / v`, with each coefficient divided exactly before the
    /// single float conversion per term.
    pub fn eval_over(&self, v: &PiScalar, lambda: f64) -> f64 {
        self.terms.iter().map(|(m, c)| c.ratio(v).to_f64() * lambda.powi(*m as i32)).sum()
    }

    /// `self(lambda)` for rational `lambda`, as a finite pi-series.
    pub fn eval_exact(&self, lambda: &BigRational) -> PiLaurent {
        let mut out = PiLaurent::zero();
        for (m, c) in &self.terms {
            let lp = pow_signed(lambda, *m);
            out.add_term(c.pi_exp() as i32, &(c.coeff() * lp));
        }
        out
    }
}

fn pow_signed(q: &BigRational, m: i64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..m.unsigned_abs() {
        out *= q;
    }
    if m < 0 {
        out.recip()
    } else {
        out
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0*pi^0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*Lambda^{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Simplex moment formula.
    Exact,
    /// One-dimensional quadrature of `f` against the exact length density.
    Radial,
    /// Nested quadrature over the curve lengths.
    Nested,
}

#[derive(Debug, Clone)]
pub struct IntegralResult {
    /// Present for power-law weights with all boundary lengths zero.
    pub exact: Option<LambdaPoly>,
    pub numeric: f64,
    pub error_bound: f64,
    pub converged: bool,
    pub method: Method,
}

impl IntegralResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "exact": self.exact.as_ref().map(ToString::to_string),
            "numeric": self.numeric,
            "error_bound": self.error_bound,
            "converged": self.converged,
            "method": self.method,
        })
    }
}

fn factorial_big(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

// Float polynomial in the curve variables with boundary lengths substituted:
// (exponents of x_j^2, coefficient).
type FloatPoly = Vec<(Vec<u32>, f64)>;

fn substitute_boundaries(p: &SquarePoly, k: usize, lengths: &[f64]) -> FloatPoly {
    let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (e, c) in p.terms() {
        let lmono: f64 = e[k..].iter().zip(lengths).map(|(&x, l)| (l * l).powi(x as i32)).product();
        if lmono != 0.0 {
            *acc.entry(e[..k].to_vec()).or_default() += c.to_f64() * lmono;
        }
    }
    acc.into_iter().collect()
}

fn prefactor(cut: &CutDescription) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(cut.sym) << cut.one_handles as usize)
}

/// Integral of `f_gamma` over `M_{g,n}(L)`:
/// `2^{-M} / |Sym| int f(sum c_j x_j) prod V_{g_i,n_i} x_1 ... x_k dx`.
///
/// Power-law weights use the moment formula
/// `int_{sum c x <= lambda} prod x^a dx = lambda^{|a|+k} prod a_j! / ((|a|+k)! prod c_j^{a_j+1})`;
/// other weights integrate `f` against the exact density of `sum c_j x_j`.
pub fn integrate_f_gamma(
    engine: &BracketEngine,
    cut: &CutDescription,
    w: &WeightSpec,
    ambient: (u32, usize),
    lengths: &[f64],
) -> Result<IntegralResult, GeodesicError> {
    cut.check_ambient(ambient.0, ambient.1)?;
    w.validate()?;
    if lengths.len() != ambient.1 {
        return Err(GeodesicError::BoundaryArity { expected: ambient.1, got: lengths.len() });
    }
    let k = cut.k();
    let product = cut.volume_product(engine)?;
    let pre = prefactor(cut);
    if let Some((p, lambda)) = w.power_law() {
        if lengths.iter().all(|&l| l == 0.0) {
            let mut exact = LambdaPoly::new();
            for (e, c) in product.terms() {
                if e[k..].iter().any(|&x| x > 0) {
                    continue;
                }
                let (m, q) = moment(cut, &e[..k], p);
                exact.add_term(m, &c.mul_rational(&(q * &pre)));
            }
            let numeric = exact.eval(lambda);
            let error_bound = numeric.abs() * 4.0 * f64::EPSILON * exact.terms.len().max(1) as f64;
            return Ok(IntegralResult { exact: Some(exact), numeric, error_bound, converged: true, method: Method::Exact });
        }
        let fp = substitute_boundaries(&product, k, lengths);
        let pre_f = pre.to_f64().expect("finite");
        let numeric: f64 = fp
            .iter()
            .map(|(e, c)| {
                let (m, q) = moment(cut, e, p);
                c * q.to_f64().expect("finite") * lambda.powi(m as i32)
            })
            .sum::<f64>()
            * pre_f;
        let error_bound = numeric.abs() * 4.0 * f64::EPSILON * fp.len().max(1) as f64;
        return Ok(IntegralResult { exact: None, numeric, error_bound, converged: true, method: Method::Exact });
    }
    radial(cut, w, &substitute_boundaries(&product, k, lengths), pre.to_f64().expect("finite"))
}

/// `(power of lambda, rational factor)` for one monomial `prod x_j^{2 e_j}`
/// of the integrand, including the `x_j dx_j` measure.
fn moment(cut: &CutDescription, e: &[u32], p: i32) -> (i64, BigRational) {
    let k = e.len() as u64;
    let a: Vec<u64> = e.iter().map(|&x| 2 * u64::from(x) + 1).collect();
    let total = a.iter().sum::<u64>() + k;
    let mut num = BigInt::one();
    let mut den = factorial_big(total - 1) * BigInt::from(total as i64 + i64::from(p));
    for (aj, &cj) in a.iter().zip(&cut.curves) {
        num *= factorial_big(*aj);
        den *= BigInt::from(cj).pow(*aj as u32 + 1);
    }
    (total as i64 + i64::from(p), BigRational::new(num, den))
}

// The density of u = sum c_j x_j under prod x_j^{a_j} dx is
// prod a_j! / prod c_j^{a_j+1} u^{A-1} / (A-1)!, A = |a| + k.
fn radial(cut: &CutDescription, w: &WeightSpec, fp: &FloatPoly, pre: f64) -> Result<IntegralResult, GeodesicError> {
    let mut density: BTreeMap<u64, f64> = BTreeMap::new();
    for (e, c) in fp {
        let (m, q) = moment(cut, e, 0);
        // moment(.., 0) = prod a! / (A! prod c^{a+1}); density coefficient is A times that
        *density.entry(m as u64 - 1).or_default() += c * q.to_f64().expect("finite") * m as f64;
    }
    let rho = |u: f64| -> f64 { density.iter().map(|(d, c)| c * u.powi(*d as i32)).sum() };
    let (end, tail) = match w.support_end() {
        Some(end) => (end, 0.0),
        None => {
            let WeightSpec::ExpScaled { s } = *w else { unreachable!("only exp has unbounded support") };
            exp_cutoff(&density, s)
        }
    };
    let mut points: Vec<f64> = std::iter::once(0.0)
        .chain(w.breakpoints().into_iter().filter(|&t| t > 0.0 && t < end))
        .chain(std::iter::once(end))
        .collect();
    points.dedup();
    let r = quad::integrate_panels(|u| w.eval(u) * rho(u), &points, REL_TOL);
    Ok(IntegralResult {
        exact: None,
        numeric: r.value * pre,
        error_bound: (r.error + tail) * pre.abs(),
        converged: r.converged,
        method: Method::Radial,
    })
}

/// Cut-off `U` for `int_0^inf e^{-s u} rho(u) du` and a bound on the dropped
/// tail, using `int_z^inf e^{-v} v^d dv <= 2 e^{-z} z^d` for `z >= 2d`.
fn exp_cutoff(density: &BTreeMap<u64, f64>, s: f64) -> (f64, f64) {
    let d_max = density.keys().next_back().copied().unwrap_or(0) as f64;
    let mut z = (2.0 * d_max).max(40.0);
    loop {
        let tail: f64 = density.iter().map(|(d, c)| c.abs() * 2.0 * (-z).exp() * z.powi(*d as i32) / s.powi(*d as i32 + 1)).sum();
        let head: f64 = density.iter().map(|(d, c)| c.abs() * gamma_int(*d) / s.powi(*d as i32 + 1)).sum();
        if tail <= 1e-14 * head || z > 4000.0 {
            return (z / s, tail);
        }
        z *= 1.5;
    }
}

fn gamma_int(d: u64) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// Same integral by nested adaptive quadrature over the curve lengths,
/// independent of the moment formula. Exponential weights are truncated as
/// in the radial method.
pub fn integrate_f_gamma_quadrature(
    engine: &BracketEngine,
    cut: &CutDescription,
    w: &WeightSpec,
    ambient: (u32, usize),
    lengths: &[f64],
) -> Result<IntegralResult, GeodesicError> {
    cut.check_ambient(ambient.0, ambient.1)?;
    w.validate()?;
    if lengths.len() != ambient.1 {
        return Err(GeodesicError::BoundaryArity { expected: ambient.1, got: lengths.len() });
    }
    let k = cut.k();
    let fp = substitute_boundaries(&cut.volume_product(engine)?, k, lengths);
    let end = match w.support_end() {
        Some(e) => e,
        None => {
            let WeightSpec::ExpScaled { s } = *w else { unreachable!() };
            let mut density = BTreeMap::new();
            for (e, c) in &fp {
                let (m, _) = moment(cut, e, 0);
                *density.entry(m as u64 - 1).or_default() += c.abs();
            }
            exp_cutoff(&density, s).0
        }
    };
    let c: Vec<f64> = cut.curves.iter().map(|&x| f64::from(x)).collect();
    let mut x = vec![0.0; k];
    let mut worst_inner = 0.0f64;
    let mut converged = true;
    let r = nested(&fp, w, &c, &mut x, 0, end, &mut worst_inner, &mut converged);
    let pre = prefactor(cut).to_f64().expect("finite");
    Ok(IntegralResult {
        exact: None,
        numeric: r.value * pre,
        error_bound: (r.error + worst_inner * r.value.abs()) * pre.abs(),
        converged: converged && r.converged,
        method: Method::Nested,
    })
}

#[allow(clippy::too_many_arguments)]
fn nested(
    fp: &FloatPoly,
    w: &WeightSpec,
    c: &[f64],
    x: &mut Vec<f64>,
    level: usize,
    budget: f64,
    worst_inner: &mut f64,
    converged: &mut bool,
) -> quad::QuadResult {
    let k = c.len();
    let upper = budget / c[level];
    let mut inner_worst = 0.0f64;
    let mut inner_ok = true;
    let r = quad::integrate(
        |t| {
            x[level] = t;
            if level + 1 == k {
                let u: f64 = x.iter().zip(c).map(|(a, b)| a * b).sum();
                let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
                let poly: f64 = fp
                    .iter()
                    .map(|(e, coef)| coef * e.iter().zip(&sq).map(|(&p, s)| s.powi(p as i32)).product::<f64>())
                    .sum();
                w.eval(u) * poly * x.iter().product::<f64>()
            } else {
                let inner = nested(fp, w, c, x, level + 1, budget - c[level] * t, &mut inner_worst, &mut inner_ok);
                inner_worst = inner_worst.max(inner.relative_error());
                inner.value
            }
        },
        0.0,
        upper,
        REL_TOL,
    );
    *worst_inner = worst_inner.max(inner_worst);
    *converged &= inner_ok;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(n: i64, d: i64, e: u32) -> PiScalar {
        PiScalar::frac(n, d, e)
    }

    #[test]
    fn nonseparating_genus_two() {
        let e = BracketEngine::new();
        let cut = CutDescription::nonseparating(2);
        let r = integrate_f_gamma(&e, &cut, &WeightSpec::Indicator { lambda: 1.0 }, (2, 0), &[]).unwrap();
        // (1/48)(6 pi^4 L^2 + 2 pi^2 L^4 + L^6/6)
        let ex = r.exact.unwrap();
        assert_eq!(ex.coeff(2), ps(6, 48, 2));
        assert_eq!(ex.coeff(4), ps(2, 48, 1));
        assert_eq!(ex.coeff(6), ps(1, 288, 0));
        assert_eq!(ex.lowest_power(), Some(2));
        let pi2 = std::f64::consts::PI.powi(2);
        let want = (6.0 * pi2 * pi2 + 2.0 * pi2 + 1.0 / 6.0) / 48.0;
        assert!((r.numeric - want).abs() < 1e-13 * want);
    }

    #[test]
    fn separating_genus_two_matches_quadrature() {
        let e = BracketEngine::new();
        let cut = CutDescription::separating(2, 1);
        let w = WeightSpec::Indicator { lambda: 1.5 };
        let r = integrate_f_gamma(&e, &cut, &w, (2, 0), &[]).unwrap();
        // 1/4 int_0^L t V_{1,1}(t)^2 dt
        let v = |t: f64| (t * t + 4.0 * std::f64::consts::PI.powi(2)) / 48.0;
        let direct = quad::integrate(|t| 0.25 * t * v(t) * v(t), 0.0, 1.5, 1e-13).value;
        assert!((r.numeric - direct).abs() < 1e-12 * direct);
        let q = integrate_f_gamma_quadrature(&e, &cut, &w, (2, 0), &[]).unwrap();
        assert!((q.numeric - r.numeric).abs() < 1e-10 * r.numeric);
    }

    #[test]
    fn symmetry_factor_halves() {
        let e = BracketEngine::new();
        let mut cut = CutDescription::two_block(3, 1, 2);
        let w = WeightSpec::Monomial { power: 1, lambda: 0.7 };
        let a = integrate_f_gamma(&e, &cut, &w, (3, 0), &[]).unwrap().exact.unwrap();
        cut.sym *= 2;
        let b = integrate_f_gamma(&e, &cut, &w, (3, 0), &[]).unwrap().exact.unwrap();
        assert_eq!(a.scale(&BigRational::new(1.into(), 2.into())), b);
        // two curves: lowest order lambda^{4 + power}
        assert_eq!(a.lowest_power(), Some(5));
    }

    #[test]
    fn exponential_and_custom_weights() {
        let e = BracketEngine::new();
        let cut = CutDescription::nonseparating(2);
        let r = integrate_f_gamma(&e, &cut, &WeightSpec::ExpScaled { s: 2.0 }, (2, 0), &[]).unwrap();
        // int_0^inf e^{-2t} t V_{1,2}(t,t) dt with V(t,t) = (2pi^2+t^2)(6pi^2+t^2)/48
        let pi2 = std::f64::consts::PI.powi(2);
        let m = |j: i32| (1..=j).map(f64::from).product::<f64>() / 2f64.powi(j + 1);
        let want = (12.0 * pi2 * pi2 * m(1) + 8.0 * pi2 * m(3) + m(5)) / 48.0;
        assert!((r.numeric - want).abs() < 1e-10 * want, "{} {}", r.numeric, want);
        assert!(r.converged);
        let tri = WeightSpec::Custom { points: vec![(0.0, 1.0), (1.0, 1.0), (1.0 + 1e-9, 0.0)] };
        let a = integrate_f_gamma(&e, &cut, &tri, (2, 0), &[]).unwrap();
        let b = integrate_f_gamma(&e, &cut, &WeightSpec::Indicator { lambda: 1.0 }, (2, 0), &[]).unwrap();
        assert!((a.numeric - b.numeric).abs() < 1e-6 * b.numeric);
    }

    #[test]
    fn boundary_lengths() {
        let e = BracketEngine::new();
        // genus 1 with two boundaries, cut along a curve leaving (0,3) and (1,1)
        let cut = CutDescription::from_json(
            r#"{"curves":[1],"components":[{"genus":0,"slots":[{"curve":0},{"boundary":0},{"boundary":1}]},
                {"genus":1,"slots":[{"curve":0}]}]}"#,
        )
        .unwrap();
        let w = WeightSpec::Indicator { lambda: 2.0 };
        let z = integrate_f_gamma(&e, &cut, &w, (1, 2), &[0.0, 0.0]).unwrap();
        assert!(z.exact.is_some());
        let r = integrate_f_gamma(&e, &cut, &w, (1, 2), &[1.0, 2.0]).unwrap();
        assert!(r.exact.is_none());
        // V_{0,3} = 1, so lengths do not matter here
        assert!((r.numeric - z.numeric).abs() < 1e-13 * z.numeric);
        assert!(matches!(
            integrate_f_gamma(&e, &cut, &w, (1, 2), &[1.0]),
            Err(GeodesicError::BoundaryArity { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn tiny_lambda_vanishes() {
        let e = BracketEngine::new();
        let cut = CutDescription::nonseparating(3);
        let r = integrate_f_gamma(&e, &cut, &WeightSpec::Indicator { lambda: 1e-12 }, (3, 0), &[]).unwrap();
        let lead = r.exact.unwrap().coeff(2).to_f64();
        assert!((r.numeric / 1e-24 - lead).abs() < 1e-9 * lead);
    }
}
