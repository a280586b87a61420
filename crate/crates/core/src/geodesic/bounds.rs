//! Expected counts of short geodesics and the volume-integral bounds on
//! short (separating) systoles.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::bracket::BracketEngine;
use crate::consistency::genus_volume;
use crate::exactnum::PiScalar;
use crate::volume::{volume_polynomial, SquarePoly};

use super::{integrate_f_gamma, CutDescription, GeodesicError, IntegralResult, LambdaPoly, WeightSpec};

/// Default largest `eps` accepted by [`thin_part_estimate`].
pub const DEFAULT_EPS0: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct Expectation {
    /// `int_0^lambda t V_{g-1,2}(t,t) dt`.
    pub integral: IntegralResult,
    pub v_g: PiScalar,
    /// The integral over `V_g`.
    pub expectation: f64,
}

/// Expected number of nonseparating closed geodesics of length at most
/// `lambda` on a random closed genus-`g` surface.
pub fn expected_count_nonsep(engine: &BracketEngine, g: u32, lambda: f64) -> Result<Expectation, GeodesicError> {
    if g < 2 {
        return Err(GeodesicError::Precondition(format!("expected count needs g >= 2, got {g}")));
    }
    let cut = CutDescription::nonseparating(g);
    let integral = integrate_f_gamma(engine, &cut, &WeightSpec::Indicator { lambda }, (g, 0), &[])?;
    let v_g = genus_volume(engine, g)?;
    let exact = integral.exact.as_ref().expect("indicator with closed ambient is exact");
    let expectation = exact.eval_over(&v_g, lambda);
    Ok(Expectation { integral, v_g, expectation })
}

/// `int_0^lambda t^shift p(t) dt` for `p` a polynomial in `t^2`.
fn integrate_even(p: &SquarePoly, shift: u32) -> LambdaPoly {
    let mut out = LambdaPoly::new();
    for (e, c) in p.terms() {
        let m = 2 * e[0] + shift + 1;
        out.add_term(i64::from(m), &c.mul_rational(&BigRational::new(1.into(), BigInt::from(m))));
    }
    out
}

fn one_boundary(engine: &BracketEngine, g: u32) -> Result<SquarePoly, GeodesicError> {
    Ok(volume_polynomial(engine, g, 1)?.expanded())
}

/// `V_{g-1,2}(t,t)` and `V_{i,1}(t) V_{g-i,1}(t)` for `1 <= i <= g/2`, the
/// polynomials whose integrals bound the thin part.
fn cut_polynomials(engine: &BracketEngine, g: u32) -> Result<Vec<SquarePoly>, GeodesicError> {
    let mut out = vec![volume_polynomial(engine, g - 1, 2)?.restrict_equal()];
    for i in 1..=g / 2 {
        out.push(one_boundary(engine, i)?.mul(&one_boundary(engine, g - i)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThinPart {
    pub g: u32,
    pub eps: f64,
    /// First-moment heuristic `E[F_0^eps] - eps^4`; not a certified bound.
    pub lower: f64,
    pub upper: f64,
    /// Upper bound times `V_g` as an exact polynomial in `eps`.
    #[serde(serialize_with = "display")]
    pub upper_exact: LambdaPoly,
}

fn display<S: serde::Serializer, T: std::fmt::Display>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

/// Volume fraction of closed genus-`g` surfaces with systole below `eps`,
/// bounded above by the sum over cut types of `int_0^eps t V(t,t) dt / V_g`.
pub fn thin_part_estimate(engine: &BracketEngine, g: u32, eps: f64, eps0: f64) -> Result<ThinPart, GeodesicError> {
    if g < 2 {
        return Err(GeodesicError::Precondition(format!("thin part needs g >= 2, got {g}")));
    }
    if !(eps > 0.0 && eps <= eps0) {
        return Err(GeodesicError::Precondition(format!("eps = {eps} outside (0, {eps0}]")));
    }
    let v_g = genus_volume(engine, g)?;
    let mut upper_exact = LambdaPoly::new();
    for p in cut_polynomials(engine, g)? {
        upper_exact.add(&integrate_even(&p, 1));
    }
    let upper = upper_exact.eval_over(&v_g, eps);
    let first = integrate_even(&volume_polynomial(engine, g - 1, 2)?.restrict_equal(), 1).eval_over(&v_g, eps);
    Ok(ThinPart { g, eps, lower: first - eps.powi(4), upper, upper_exact })
}

/// `(1/V_g) [int_0^1 V_{g-1,2}(t,t) dt + sum_i int_0^1 V_{i,1}(t) V_{g-i,1}(t) dt]`,
/// which controls the expectation of `1 / systole`.
pub fn reciprocal_systole_integral(engine: &BracketEngine, g: u32) -> Result<f64, GeodesicError> {
    if g < 2 {
        return Err(GeodesicError::Precondition(format!("needs g >= 2, got {g}")));
    }
    let v_g = genus_volume(engine, g)?;
    let mut total = LambdaPoly::new();
    for p in cut_polynomials(engine, g)? {
        total.add(&integrate_even(&p, 0));
    }
    Ok(total.eval_over(&v_g, 1.0))
}

fn ln_v1(engine: &BracketEngine, g: u32) -> Result<f64, GeodesicError> {
    Ok(volume_polynomial(engine, g, 1)?.constant().ln_abs())
}

/// `e^{L/2} L^3 / g + sum_{i=2}^{g/2} e^L V_{i,1} V_{g-i,1} / V_g`.
pub fn prob_sep_bound(engine: &BracketEngine, g: u32, length: f64) -> Result<f64, GeodesicError> {
    if g < 4 {
        return Err(GeodesicError::Precondition(format!("separating bound needs g >= 4, got {g}")));
    }
    if !(length.is_finite() && length >= 0.0) {
        return Err(GeodesicError::Precondition(format!("length must be finite and nonnegative, got {length}")));
    }
    let ln_vg = genus_volume(engine, g)?.ln_abs();
    let mut total = (length / 2.0).exp() * length.powi(3) / f64::from(g);
    for i in 2..=g / 2 {
        total += (length + ln_v1(engine, i)? + ln_v1(engine, g - i)? - ln_vg).exp();
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MultiSepBound {
    pub ln_raw: f64,
    /// `e^{L + 1.5 L^{2/3}} V_{m,1} V_{g-m,1}`, infinite if it overflows.
    pub raw: f64,
    /// `raw / V_g`.
    pub normalized: f64,
}

pub fn multi_sep_bound(engine: &BracketEngine, g: u32, m: u32, length: f64) -> Result<MultiSepBound, GeodesicError> {
    if m == 0 || m >= g {
        return Err(GeodesicError::Precondition(format!("need 1 <= m <= g - 1, got m = {m}, g = {g}")));
    }
    if !(length.is_finite() && length >= 0.0) {
        return Err(GeodesicError::Precondition(format!("length must be finite and nonnegative, got {length}")));
    }
    let ln_raw = length + 1.5 * length.powf(2.0 / 3.0) + ln_v1(engine, m)? + ln_v1(engine, g - m)?;
    let ln_vg = genus_volume(engine, g)?.ln_abs();
    Ok(MultiSepBound { ln_raw, raw: ln_raw.exp(), normalized: (ln_raw - ln_vg).exp() })
}
