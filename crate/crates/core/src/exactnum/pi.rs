use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::float;

/// Attempted to add two quantities of different pi-degree.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("graded addition of pi^{left} and pi^{right} terms")]
pub struct GradingError {
    pub left: u32,
    pub right: u32,
}

/// An exact number `coeff * pi^(2 * pi_exp)`.
///
/// `pi_exp` counts powers of `pi^2`. Zero is always stored with `pi_exp = 0`,
/// and addition is only defined between scalars of the same grade.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiScalar {
    #[serde(with = "rational_string")]
    coeff: BigRational,
    pi_exp: u32,
}

impl PiScalar {
    pub fn new(coeff: BigRational, pi_exp: u32) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Self { coeff, pi_exp }
        }
    }

    pub fn zero() -> Self {
        Self { coeff: BigRational::zero(), pi_exp: 0 }
    }

    pub fn one() -> Self {
        Self { coeff: BigRational::one(), pi_exp: 0 }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::new(q, 0)
    }

    pub fn from_integer(i: i64) -> Self {
        Self::new(BigRational::from_integer(i.into()), 0)
    }

    /// `num/den * pi^(2 * pi_exp)`.
    pub fn frac(num: i64, den: i64, pi_exp: u32) -> Self {
        Self::new(BigRational::new(num.into(), den.into()), pi_exp)
    }

    /// `pi^(2k)`.
    pub fn pi_squared_pow(k: u32) -> Self {
        Self::new(BigRational::one(), k)
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn pi_exp(&self) -> u32 {
        self.pi_exp
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.coeff.is_negative()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GradingError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.pi_exp != other.pi_exp {
            return Err(GradingError { left: 2 * self.pi_exp, right: 2 * other.pi_exp });
        }
        Ok(Self::new(&self.coeff + &other.coeff, self.pi_exp))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, GradingError> {
        self.try_add(&-other)
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        Self::new(&self.coeff * q, self.pi_exp)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Self::new(&self.coeff * BigRational::from_integer(k.into()), self.pi_exp)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Exact quotient, which in general has a negative pi-degree.
    pub fn ratio(&self, other: &Self) -> PiLaurent {
        assert!(!other.is_zero(), "division by zero PiScalar");
        let mut terms = BTreeMap::new();
        if !self.is_zero() {
            terms.insert(
                self.pi_exp as i32 - other.pi_exp as i32,
                &self.coeff / &other.coeff,
            );
        }
        PiLaurent { terms }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        float::big_to_f64(&self.to_big_float(128))
    }

    pub fn to_big_float(&self, precision_bits: usize) -> astro_float::BigFloat {
        float::to_float(self, precision_bits)
    }

    /// Natural log of `|self|`, valid far beyond the f64 range of the value.
    pub fn ln_abs(&self) -> f64 {
        assert!(!self.is_zero(), "log of zero");
        ln_bigint(self.coeff.numer()) - ln_bigint(self.coeff.denom())
            + f64::from(self.pi_exp) * 2.0 * std::f64::consts::PI.ln()
    }

    /// Compares the real values, also across different pi-degrees.
    ///
    /// Uses rational enclosures of `pi^2` that are tightened until the
    /// comparison is decided; two nonzero scalars of different grade are never
    /// equal because pi is transcendental.
    pub fn cmp_real(&self, other: &Self) -> Ordering {
        let sa = sign_of(&self.coeff);
        let sb = sign_of(&other.coeff);
        if sa != sb || sa == 0 || self.pi_exp == other.pi_exp {
            return if sa != sb || sa == 0 {
                sa.cmp(&sb)
            } else {
                self.coeff.cmp(&other.coeff)
            };
        }
        // Same nonzero sign, different grade: compare |a| pi^(2e) with |b|.
        let (small, big, flip) = if self.pi_exp < other.pi_exp {
            (other, self, true)
        } else {
            (self, other, false)
        };
        let e = small.pi_exp - big.pi_exp;
        let a = small.coeff.abs();
        let b = big.coeff.abs();
        let mut digits = 30;
        loop {
            let (lo, hi) = float::pi_squared_enclosure(digits);
            let lo_v = &a * pow_rat(&lo, e);
            let hi_v = &a * pow_rat(&hi, e);
            let ord = if lo_v > b {
                Some(Ordering::Greater)
            } else if hi_v < b {
                Some(Ordering::Less)
            } else {
                None
            };
            if let Some(mut o) = ord {
                if sa < 0 {
                    o = o.reverse();
                }
                return if flip { o.reverse() } else { o };
            }
            digits *= 2;
        }
    }

    pub(crate) fn raw_parts(&self) -> (&BigRational, u32) {
        (&self.coeff, self.pi_exp)
    }
}

fn pow_rat(q: &BigRational, e: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= q;
    }
    out
}

fn sign_of(q: &BigRational) -> i8 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub(crate) fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for PiScalar {
    /// Canonical `p/q*pi^k` form with `k` the literal (even) power of pi.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*pi^{}", self.coeff, 2 * self.pi_exp)
    }
}

impl fmt::Debug for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;

    fn add(self, rhs: &'a PiScalar) -> PiScalar {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for PiScalar {
    type Output = PiScalar;

    fn add(self, rhs: PiScalar) -> PiScalar {
        &self + &rhs
    }
}

impl AddAssign<&PiScalar> for PiScalar {
    fn add_assign(&mut self, rhs: &PiScalar) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        if self.pi_exp != rhs.pi_exp {
            panic!("{}", GradingError { left: 2 * self.pi_exp, right: 2 * rhs.pi_exp });
        }
        self.coeff += &rhs.coeff;
        if self.coeff.is_zero() {
            self.pi_exp = 0;
        }
    }
}

impl<'a> Sub<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;

    fn sub(self, rhs: &'a PiScalar) -> PiScalar {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Mul<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;

    fn mul(self, rhs: &'a PiScalar) -> PiScalar {
        if self.is_zero() || rhs.is_zero() {
            return PiScalar::zero();
        }
        PiScalar { coeff: &self.coeff * &rhs.coeff, pi_exp: self.pi_exp + rhs.pi_exp }
    }
}

impl Neg for &PiScalar {
    type Output = PiScalar;

    fn neg(self) -> PiScalar {
        PiScalar { coeff: -&self.coeff, pi_exp: self.pi_exp }
    }
}

impl Neg for PiScalar {
    type Output = PiScalar;

    fn neg(self) -> PiScalar {
        -&self
    }
}

/// A finite sum `sum_k c_k pi^(2k)` with `k` possibly negative.
///
/// Only used where homogeneity is intentionally broken: quotients of volumes
/// and mixed-degree combinations. No zero coefficients are stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct PiLaurent {
    terms: BTreeMap<i32, BigRational>,
}

impl PiLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, pi_exp: i32, coeff: &BigRational) {
        let entry = self.terms.entry(pi_exp).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&pi_exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some((coeff, pi_exp))` when the value is a single graded term.
    pub fn single_term(&self) -> Option<(&BigRational, i32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(k, v)| (v, *k))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        self.terms
            .iter()
            .map(|(k, c)| {
                let lnc = ln_bigint(c.numer()) - ln_bigint(c.denom());
                let sign = if c.is_negative() { -1.0 } else { 1.0 };
                sign * (lnc + f64::from(*k) * pi2.ln()).exp()
            })
            .sum()
    }
}

impl From<PiScalar> for PiLaurent {
    fn from(s: PiScalar) -> Self {
        let mut out = PiLaurent::zero();
        out.add_term(s.pi_exp as i32, &s.coeff);
        out
    }
}

impl fmt::Display for PiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0*pi^0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*pi^{}", c, 2 * k)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `p/q` or `p` into a reduced rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse_rational(&raw).ok_or_else(|| serde::de::Error::custom("bad rational"))
    }
}
