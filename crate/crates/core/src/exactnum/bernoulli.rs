//! Bernoulli numbers, zeta at even integers, and the `a_n` sequence that
//! weights the boundary-removal recursion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use super::PiScalar;

static BERNOULLI: Lazy<RwLock<Vec<BigRational>>> =
    Lazy::new(|| RwLock::new(vec![BigRational::one()]));

static A_SEQUENCE: Lazy<RwLock<Vec<PiScalar>>> =
    Lazy::new(|| RwLock::new(vec![PiScalar::from_rational(BigRational::new(1.into(), 2.into()))]));

/// Bernoulli number `B_m` with the `B_1 = -1/2` convention.
///
/// Computed from `sum_{j=0}^{m} C(m+1, j) B_j = 0` and memoized; the table is
/// append-only so concurrent readers never observe a partially built entry.
pub fn bernoulli(m: usize) -> BigRational {
    if let Some(b) = BERNOULLI.read().get(m) {
        return b.clone();
    }
    let mut table = BERNOULLI.write();
    while table.len() <= m {
        let next = table.len();
        let value = bernoulli_step(&table, next);
        table.push(value);
    }
    table[m].clone()
}

fn bernoulli_step(known: &[BigRational], m: usize) -> BigRational {
    // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
    let mut binom = BigInt::one();
    let mut acc = BigRational::zero();
    for (j, b) in known.iter().enumerate().take(m) {
        if !b.is_zero() {
            acc += BigRational::from_integer(binom.clone()) * b;
        }
        binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
    }
    -acc / BigRational::from_integer(BigInt::from(m + 1))
}

/// `zeta(2n)` as an exact multiple of `pi^(2n)`.
pub fn zeta_even(n: u32) -> PiScalar {
    assert!(n >= 1, "zeta_even is defined for n >= 1");
    let two_n = 2 * n as usize;
    let b = bernoulli(two_n);
    let mut fact = BigInt::one();
    for i in 2..=two_n {
        fact *= i;
    }
    let pow2 = BigInt::one() << two_n;
    let mut coeff = b * BigRational::new(pow2, fact * 2);
    if n.is_multiple_of(2) {
        coeff = -coeff;
    }
    PiScalar::new(coeff, n)
}

/// `a_0 = 1/2`, `a_L = zeta(2L) (1 - 2^(1-2L))`.
pub fn a_seq(l: u32) -> PiScalar {
    let idx = l as usize;
    if let Some(a) = A_SEQUENCE.read().get(idx) {
        return a.clone();
    }
    let mut table = A_SEQUENCE.write();
    while table.len() <= idx {
        let next = table.len() as u32;
        let z = zeta_even(next);
        let den = BigInt::one() << (2 * next as usize - 1);
        let factor = BigRational::new(den.clone() - BigInt::one(), den);
        table.push(z.mul_rational(&factor));
    }
    table[idx].clone()
}

/// Makes sure `a_0..=a_max` are memoized so that hot loops only take read locks.
pub fn warm_a_seq(max: u32) {
    a_seq(max);
}
