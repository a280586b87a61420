//! Large-genus ratio laws, the Zograf comparison and sums of products of
//! one-boundary volumes, tabulated over the computable range.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bracket::{BracketEngine, BracketError};
use crate::consistency::{volume_value, ConsistencyError};
use crate::exactnum::PiLaurent;
use crate::par::map_collect;

#[derive(Debug, thiserror::Error)]
pub enum AsymptoticsError {
    #[error("unstable or unsupported input: {0}")]
    Unstable(String),
    #[error(transparent)]
    Consistency(#[from] ConsistencyError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error("thresholds file: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// An exact volume quotient and its float value.
#[derive(Debug, Clone, PartialEq)]
pub struct Ratio {
    pub exact: PiLaurent,
    pub value: f64,
}

impl Ratio {
    fn new(exact: PiLaurent) -> Self {
        let value = exact.to_f64();
        Self { exact, value }
    }

    /// `(coefficient, pi grade)` of a homogeneous quotient.
    pub fn graded(&self) -> Option<(&BigRational, i32)> {
        self.exact.single_term()
    }
}

fn four_pi_squared() -> f64 {
    4.0 * std::f64::consts::PI.powi(2)
}

/// `C_{g,n} = V_{g,n+1} / (2g V_{g,n})`, tending to `4 pi^2`.
pub fn ratio_c(engine: &BracketEngine, g: u32, n: usize) -> Result<Ratio, AsymptoticsError> {
    if g == 0 || (g == 1 && n == 0) {
        return Err(AsymptoticsError::Unstable(format!("C needs V_{{{g},{n}}}")));
    }
    let top = volume_value(engine, g, n + 1)?;
    let bottom = volume_value(engine, g, n)?.mul_int(2 * i64::from(g));
    Ok(Ratio::new(top.ratio(&bottom)))
}

/// `B_{g,n} = V_{g,n} / V_{g-1,n+2}`, tending to 1.
pub fn ratio_b(engine: &BracketEngine, g: u32, n: usize) -> Result<Ratio, AsymptoticsError> {
    if g == 0 || (g == 1 && n == 0) {
        return Err(AsymptoticsError::Unstable(format!("B needs V_{{{g},{n}}}")));
    }
    let top = volume_value(engine, g, n)?;
    let bottom = volume_value(engine, g - 1, n + 2)?;
    Ok(Ratio::new(top.ratio(&bottom)))
}

/// `[tau_k tau_0^n]_{g,n+1} / V_{g,n+1}`.
pub fn tau_flatness(engine: &BracketEngine, g: u32, n: usize, k: u32) -> Result<Ratio, AsymptoticsError> {
    if i64::from(k) > 3 * i64::from(g) - 2 + n as i64 {
        return Err(AsymptoticsError::Unstable(format!("k = {k} above 3g - 2 + n")));
    }
    let mut d = vec![0; n + 1];
    d[0] = k;
    let top = engine.bracket_of(g, &d)?;
    let bottom = engine.volume_constant(g, n + 1)?;
    Ok(Ratio::new(top.ratio(&bottom)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    B,
    C,
    Tau,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub g: u32,
    pub n: usize,
    pub exact: String,
    pub float: f64,
    /// `g |ratio / limit - 1|`; for the tau ratio also divided by `k^2`.
    pub deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub which: Which,
    pub rows: Vec<RatioRow>,
}

impl RatioReport {
    pub fn sup_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }

    pub fn row(&self, g: u32, n: usize) -> Option<&RatioRow> {
        self.rows.iter().find(|r| r.g == g && r.n == n)
    }

    pub fn to_csv(&self) -> Result<String, AsymptoticsError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| AsymptoticsError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn lowest_genus(n: usize) -> u32 {
    if n == 0 {
        2
    } else {
        1
    }
}

/// `B` or `C` rows for `g` from the lowest stable genus up to `max_g`. The
/// volumes are filled in increasing genus first, then the rows are built in
/// parallel by `g`.
pub fn ratio_table(engine: &BracketEngine, which: Which, max_g: u32, n: usize) -> Result<RatioReport, AsymptoticsError> {
    if which == Which::Tau {
        return tau_table(engine, max_g, n, 3);
    }
    let gs: Vec<u32> = (lowest_genus(n)..=max_g).collect();
    for &g in &gs {
        match which {
            Which::B => ratio_b(engine, g, n)?,
            _ => ratio_c(engine, g, n)?,
        };
    }
    let rows = map_collect(engine.execution(), &gs, |&g| {
        let (r, limit) = match which {
            Which::B => (ratio_b(engine, g, n), 1.0),
            _ => (ratio_c(engine, g, n), four_pi_squared()),
        };
        r.map(|r| RatioRow {
            g,
            n,
            exact: r.exact.to_string(),
            float: r.value,
            deviation: f64::from(g) * (r.value / limit - 1.0).abs(),
            k: None,
        })
    });
    Ok(RatioReport { which, rows: rows.into_iter().collect::<Result<_, _>>()? })
}

/// Tau-flatness rows `(g, n, k)` for `1 <= g <= max_g`, `1 <= k <= max_k`.
pub fn tau_table(engine: &BracketEngine, max_g: u32, n: usize, max_k: u32) -> Result<RatioReport, AsymptoticsError> {
    let mut rows = Vec::new();
    for g in 1..=max_g {
        for k in 1..=max_k.min(3 * g + n as u32 - 2) {
            let r = tau_flatness(engine, g, n, k)?;
            rows.push(RatioRow {
                g,
                n,
                exact: r.exact.to_string(),
                float: r.value,
                deviation: f64::from(g) * (r.value - 1.0).abs() / f64::from(k * k),
                k: Some(k),
            });
        }
    }
    Ok(RatioReport { which: Which::Tau, rows })
}

/// `sup g |ratio - 1| / k^2` over every `(g, n)` with `g >= 1`,
/// `2g - 2 + n <= max_weight` and `1 <= k <= min(max_k, 3g - 2 + n)`.
pub fn tau_flatness_sweep(engine: &BracketEngine, max_weight: u32, max_k: u32) -> Result<f64, AsymptoticsError> {
    let mut sup = 0.0f64;
    for g in 1..=max_weight / 2 + 1 {
        let top_n = (i64::from(max_weight) + 2 - 2 * i64::from(g)).max(-1);
        for n in 0..=top_n {
            let t = tau_table(engine, g, n as usize, max_k)?;
            sup = sup.max(t.rows.iter().filter(|r| r.g == g).map(|r| r.deviation).fold(0.0, f64::max));
        }
    }
    Ok(sup)
}

/// `ln F_{g,n}` with `F_{g,n} = (4 pi^2)^{2g+n-3} (2g-3+n)! / sqrt(g pi)`.
pub fn ln_zograf(g: u32, n: usize) -> f64 {
    let m = 2 * i64::from(g) + n as i64 - 3;
    let ln_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
    m as f64 * four_pi_squared().ln() + ln_fact - 0.5 * (f64::from(g) * std::f64::consts::PI).ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct ZografRow {
    pub g: u32,
    pub n: usize,
    pub ln_f: f64,
    pub ln_v: f64,
    /// `V / F`.
    pub ratio: f64,
    /// `ln(V / F) / ln g`.
    pub exponent: f64,
}

pub fn zograf_deviation(engine: &BracketEngine, g: u32, n: usize) -> Result<ZografRow, AsymptoticsError> {
    if g < 2 {
        return Err(AsymptoticsError::Unstable(format!("needs g >= 2 for ln g > 0, got {g}")));
    }
    let ln_v = volume_value(engine, g, n)?.ln_abs();
    let ln_f = ln_zograf(g, n);
    Ok(ZografRow { g, n, ln_f, ln_v, ratio: (ln_v - ln_f).exp(), exponent: (ln_v - ln_f) / f64::from(g).ln() })
}

pub fn zograf_table(engine: &BracketEngine, max_g: u32, n: usize) -> Result<Vec<ZografRow>, AsymptoticsError> {
    (2..=max_g).map(|g| zograf_deviation(engine, g, n)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PairProducts {
    pub g: u32,
    pub r: u32,
    /// `sum_{i=r+1}^{g/2} V_{i,1} V_{g-i,1}` as an exact graded value.
    pub exact: String,
    pub float: f64,
    /// The sum over `V_g / g^{2r+1}`.
    pub ratio: f64,
    /// Every summand is positive.
    pub positive: bool,
}

/// Sum of products of one-boundary volumes; empty when `r >= g/2`.
pub fn sum_pair_products(engine: &BracketEngine, g: u32, r: u32) -> Result<PairProducts, AsymptoticsError> {
    if g < 2 {
        return Err(AsymptoticsError::Unstable(format!("needs g >= 2, got {g}")));
    }
    let mut total: Option<crate::exactnum::PiScalar> = None;
    let mut positive = true;
    for i in r + 1..=g / 2 {
        let term = &engine.volume_constant(i, 1)? * &engine.volume_constant(g - i, 1)?;
        positive &= term.is_positive();
        total = Some(match total {
            None => term,
            Some(t) => t.try_add(&term).expect("products share the grade 3g - 4"),
        });
    }
    let v_g = volume_value(engine, g, 0)?;
    let (exact, float, ratio) = match total {
        None => ("0*pi^0".to_string(), 0.0, 0.0),
        Some(t) => {
            let scale = BigRational::from_integer(BigInt::from(g).pow(2 * r + 1));
            let ratio = t.mul_rational(&scale).ratio(&v_g).to_f64();
            (t.to_string(), t.to_f64(), ratio)
        }
    };
    Ok(PairProducts { g, r, exact, float, ratio, positive })
}

/// `(g / V_g) sum_{g0 + g1 = g + 1 - k} e^{2 ln 2 g0 + c g0^beta} g0 V_{g0,k} V_{g1,k}`
/// over stable `(g0, k)` and `(g1, k)`, evaluated in log space.
pub fn b0_sum(engine: &BracketEngine, g: u32, k: usize, c: f64, beta: f64) -> Result<f64, AsymptoticsError> {
    let total = (i64::from(g) + 1 - k as i64).max(0) as u32;
    let ln_vg = volume_value(engine, g, 0)?.ln_abs();
    let stable = |h: u32| 2 * h as usize + k > 2;
    let big_c = 2.0 * std::f64::consts::LN_2;
    let mut sum = 0.0;
    for g0 in 1..=total {
        let g1 = total - g0;
        if !stable(g0) || !stable(g1) {
            continue;
        }
        let ln_term = big_c * f64::from(g0)
            + c * f64::from(g0).powf(beta)
            + f64::from(g0).ln()
            + volume_value(engine, g0, k)?.ln_abs()
            + volume_value(engine, g1, k)?.ln_abs();
        sum += (ln_term - ln_vg).exp();
    }
    Ok(sum * f64::from(g))
}

/// Sweep-recorded bounds for the boundedness checks. The defaults are the
/// sups observed over `g <= 12`, rounded up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub max_g: u32,
    pub ratio_b_n0: f64,
    pub ratio_b_n1: f64,
    pub ratio_c_n0: f64,
    pub ratio_c_n1: f64,
    pub tau: f64,
    pub zograf_exponent: f64,
    pub pair_ratio_lo: f64,
    pub pair_ratio_hi: f64,
    pub thin_lo: f64,
    pub thin_hi: f64,
}

const DEFAULT_THRESHOLDS: &str = include_str!("../thresholds.json");

impl Default for Thresholds {
    fn default() -> Self {
        serde_json::from_str(DEFAULT_THRESHOLDS).expect("bundled thresholds parse")
    }
}

impl Thresholds {
    pub fn load(path: &Path) -> Result<Self, AsymptoticsError> {
        let s = std::fs::read_to_string(path).map_err(|e| AsymptoticsError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&s).map_err(|e| AsymptoticsError::Config(e.to_string()))
    }

    pub fn ratio_bound(&self, which: Which, n: usize) -> Option<f64> {
        match (which, n) {
            (Which::B, 0) => Some(self.ratio_b_n0),
            (Which::B, 1) => Some(self.ratio_b_n1),
            (Which::C, 0) => Some(self.ratio_c_n0),
            (Which::C, 1) => Some(self.ratio_c_n1),
            (Which::Tau, _) => Some(self.tau),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::PiScalar;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_ratios() {
        let e = BracketEngine::new();
        // V_{1,2} = pi^4/4, [tau_1 tau_0]_{1,2} = 2 pi^2
        let t = tau_flatness(&e, 1, 1, 1).unwrap();
        assert_eq!(t.graded(), Some((&rat(8, 1), -1)));
        let one = tau_flatness(&e, 3, 2, 0).unwrap();
        assert_eq!(one.exact, PiLaurent::from(PiScalar::one()));
        assert!(tau_flatness(&e, 1, 0, 2).is_err());
        let c = ratio_c(&e, 2, 0).unwrap();
        assert_eq!(c.graded().unwrap().1, 1);
        let b = ratio_b(&e, 2, 1).unwrap();
        assert_eq!(b.graded().unwrap().1, 1);
        assert!(b.value < 1.0);
        assert!(ratio_b(&e, 2, 2).unwrap().value > 1.0);
        assert!(ratio_b(&e, 1, 0).is_err());
    }

    #[test]
    fn zograf_genus_two() {
        let e = BracketEngine::new();
        let z = zograf_deviation(&e, 2, 0).unwrap();
        let pi = std::f64::consts::PI;
        let f = 4.0 * pi * pi / (2.0 * pi).sqrt();
        let v = 43.0 * pi.powi(6) / 2160.0;
        assert!((z.ratio - v / f).abs() < 1e-12 * v / f);
        assert!(z.exponent.is_finite());
    }

    #[test]
    fn pair_products() {
        let e = BracketEngine::new();
        let p = sum_pair_products(&e, 6, 0).unwrap();
        assert!(p.positive && p.ratio > 0.0 && p.ratio.is_finite());
        let empty = sum_pair_products(&e, 6, 3).unwrap();
        assert_eq!(empty.float, 0.0);
        assert_eq!(empty.exact, "0*pi^0");
        assert!(b0_sum(&e, 6, 1, 1.0, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn tables_emit() {
        let e = BracketEngine::new();
        let r = ratio_table(&e, Which::C, 4, 1).unwrap();
        assert_eq!(r.rows.iter().map(|r| r.g).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("g,n,exact,float,deviation"));
        let mut rd = csv::Reader::from_reader(csv.as_bytes());
        assert_eq!(rd.records().count(), 4);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
        assert!(Thresholds::default().ratio_bound(Which::B, 0).unwrap() > 0.0);
    }
}
