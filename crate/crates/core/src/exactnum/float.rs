//! Conversion of exact values to binary floating point, plus rigorous
//! rational enclosures of pi.

use std::cell::RefCell;
use std::collections::HashMap;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use parking_lot::Mutex;

use super::{PiLaurent, PiScalar};

/// Default mantissa width for rendered floats.
pub const DEFAULT_PRECISION_BITS: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

fn int_to_float(n: &BigInt, p: usize) -> BigFloat {
    with_consts(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, p, RM, cc))
}

/// `pi` rounded to `p` bits.
pub fn pi_float(p: usize) -> BigFloat {
    with_consts(|cc| cc.pi(p, RM))
}

/// Rounds `x` to `precision_bits` of mantissa.
///
/// Every intermediate step runs with 64 guard bits, so the result is within
/// one ulp of the correctly rounded value.
pub fn to_float(x: &PiScalar, precision_bits: usize) -> BigFloat {
    assert!(precision_bits >= 53, "precision below f64 mantissa");
    if x.is_zero() {
        return BigFloat::from_word(0, precision_bits);
    }
    let p = precision_bits + 64;
    let (coeff, pi_exp) = x.raw_parts();
    let num = int_to_float(coeff.numer(), p);
    let den = int_to_float(coeff.denom(), p);
    let mut v = num.div(&den, p, RM);
    if pi_exp > 0 {
        let pi = pi_float(p);
        let pi2 = pi.mul(&pi, p, RM);
        v = v.mul(&pi2.powi(pi_exp as usize, p, RM), p, RM);
    }
    let mut out = v;
    out.set_precision(precision_bits, RM).expect("precision change");
    out
}

/// Nearest f64, via the decimal rendering of the big float.
pub fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let s = with_consts(|cc| x.format(Radix::Dec, RM, cc)).expect("format big float");
    s.parse::<f64>().unwrap_or_else(|_| panic!("unparseable float rendering {s}"))
}

/// Decimal rendering with `digits` significant digits.
pub fn render_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
}

/// `x` rounded to `digits` significant decimals, as `d.ddd...e<exp>`.
///
/// Uses a rational value of `pi^2` good to `digits + 20` places, so only a
/// value sitting on a rounding tie could be off in the last digit.
pub fn render_decimal(x: &PiLaurent, digits: usize) -> String {
    let digits = digits.max(1);
    let (pi2, _) = pi_squared_enclosure(digits as u32 + 20);
    let mut v = BigRational::zero();
    for (k, c) in x.terms() {
        let mut p = BigRational::one();
        for _ in 0..k.unsigned_abs() {
            p *= &pi2;
        }
        v += if k < 0 { c / p } else { c * p };
    }
    if v.is_zero() {
        return "0".to_string();
    }
    let sign = if v.is_negative() { "-" } else { "" };
    let v = v.abs();
    let ten = BigInt::from(10);
    let mut e = x.to_f64().abs().log10().floor() as i64;
    loop {
        let shift = digits as i64 - 1 - e;
        let scaled = if shift >= 0 {
            &v * BigRational::from_integer(ten.pow(shift as u32))
        } else {
            &v / BigRational::from_integer(ten.pow((-shift) as u32))
        };
        let m = scaled.round().to_integer();
        let lo = ten.pow(digits as u32 - 1);
        if m < lo {
            e -= 1;
            continue;
        }
        if m >= &lo * &ten {
            e += 1;
            continue;
        }
        let s = m.to_string();
        let (head, tail) = s.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{e}")
        } else {
            format!("{sign}{head}.{tail}e{e}")
        };
    }
}

static PI_SQ_ENCLOSURES: Lazy<Mutex<HashMap<u32, (BigRational, BigRational)>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Rationals `lo < pi^2 < hi` with `hi - lo < 10^(-digits)`.
pub fn pi_squared_enclosure(digits: u32) -> (BigRational, BigRational) {
    if let Some(e) = PI_SQ_ENCLOSURES.lock().get(&digits) {
        return e.clone();
    }
    let (lo, hi) = pi_enclosure(digits + 2);
    let e = (&lo * &lo, &hi * &hi);
    PI_SQ_ENCLOSURES.lock().insert(digits, e.clone());
    e
}

/// Rationals `lo < pi < hi` from Machin's formula, rounded outward to
/// `digits + 4` decimals.
pub fn pi_enclosure(digits: u32) -> (BigRational, BigRational) {
    let (a_lo, a_hi) = arctan_inv_enclosure(5, digits + 4);
    let (b_lo, b_hi) = arctan_inv_enclosure(239, digits + 4);
    let sixteen = BigRational::from_integer(16.into());
    let four = BigRational::from_integer(4.into());
    let lo = &sixteen * a_lo - &four * b_hi;
    let hi = &sixteen * a_hi - &four * b_lo;
    let scale = BigInt::from(10).pow(digits + 4);
    (round_down(&lo, &scale), round_up(&hi, &scale))
}

fn round_down(q: &BigRational, scale: &BigInt) -> BigRational {
    let scaled = q * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.numer().div_floor(scaled.denom()), scale.clone())
}

fn round_up(q: &BigRational, scale: &BigInt) -> BigRational {
    let scaled = q * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.numer().div_ceil(scaled.denom()), scale.clone())
}

// arctan(1/x) lies between consecutive partial sums of its alternating series.
fn arctan_inv_enclosure(x: u32, digits: u32) -> (BigRational, BigRational) {
    let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(digits) * 64);
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = BigInt::from(x);
    let mut sum = BigRational::zero();
    let mut k: u64 = 0;
    loop {
        let term = BigRational::new(BigInt::one(), BigInt::from(2 * k + 1) * &power);
        let next = if k.is_multiple_of(2) { &sum + &term } else { &sum - &term };
        if term.abs() < tol {
            return if next < sum { (next, sum) } else { (sum, next) };
        }
        sum = next;
        power *= &x2;
        k += 1;
    }
}
