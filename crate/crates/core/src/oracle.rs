//! Independent source of small psi/kappa1 intersection numbers.
//!
//! Nothing here touches the boundary-removal recursion: genus 0 uses the
//! multinomial closed form, genus 1 and 2 are propagated from the seeds
//! `<tau_1>_1 = 1/24` and `<tau_4>_2 = 1/1152` (both `1/(24^g g!)`) by the
//! string and dilaton equations, and kappa1 insertions are pushed forward
//! along the forgetful map.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exactnum::PiScalar;

/// Largest genus the oracle answers for.
pub const MAX_GENUS: u32 = 2;
/// Largest number of marked points accepted by [`bracket_oracle`].
pub const MAX_POINTS: usize = 5;
/// Largest power of kappa1 accepted by [`kappa_to_psi`].
pub const MAX_KAPPA: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("unstable moduli space (g = {g}, n = {n})")]
    Unstable { g: u32, n: usize },
    #[error("degree mismatch: classes have degree {degree}, dimension is {dim}")]
    DegreeMismatch { degree: i64, dim: i64 },
    #[error("outside the oracle table: {0}")]
    OutOfRange(String),
}

/// Exponents of psi classes on `M_{g,n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiIndex {
    pub g: u32,
    pub d: Vec<u32>,
}

/// `int psi^d kappa1^k` on `M_{g,n}`, top degree only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaIndex {
    pub g: u32,
    pub d: Vec<u32>,
    pub k: u32,
}

fn dim(g: u32, n: usize) -> i64 {
    3 * i64::from(g) - 3 + n as i64
}

fn degree(d: &[u32]) -> i64 {
    d.iter().map(|&x| i64::from(x)).sum()
}

fn check_stable(g: u32, n: usize) -> Result<(), OracleError> {
    if n == 0 || 2 * i64::from(g) - 2 + n as i64 <= 0 {
        return Err(OracleError::Unstable { g, n });
    }
    Ok(())
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn double_factorial_odd(m: u32) -> BigInt {
    // (2m+1)!!
    (1..=m).fold(BigInt::one(), |acc, i| acc * (2 * i + 1))
}

/// `<tau_{d_1} ... tau_{d_n}>_0 = (n-3)! / prod d_i!`.
pub fn psi_genus0(d: &[u32]) -> Result<BigRational, OracleError> {
    let n = d.len();
    check_stable(0, n)?;
    if degree(d) != dim(0, n) {
        return Err(OracleError::DegreeMismatch { degree: degree(d), dim: dim(0, n) });
    }
    let den = d.iter().fold(BigInt::one(), |acc, &x| acc * factorial(u64::from(x)));
    Ok(BigRational::new(factorial(n as u64 - 3), den))
}

/// `<tau_{d_1} ... tau_{d_n}>_g` for `g <= 2`, where reachable from the seeds.
pub fn psi_small(g: u32, d: &[u32]) -> Result<BigRational, OracleError> {
    let n = d.len();
    check_stable(g, n)?;
    if degree(d) != dim(g, n) {
        return Err(OracleError::DegreeMismatch { degree: degree(d), dim: dim(g, n) });
    }
    if g > MAX_GENUS {
        return Err(OracleError::OutOfRange(format!("genus {g}")));
    }
    if g == 0 {
        return psi_genus0(d);
    }
    match (g, d) {
        (1, [1]) => return Ok(BigRational::new(1.into(), 24.into())),
        (2, [4]) => return Ok(BigRational::new(1.into(), 1152.into())),
        _ => {}
    }
    if let Some(pos) = d.iter().position(|&x| x == 0) {
        // string equation
        let rest: Vec<u32> = d.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, &x)| x).collect();
        let mut acc = BigRational::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut lowered = rest.clone();
                lowered[j] -= 1;
                acc += psi_small(g, &lowered)?;
            }
        }
        return Ok(acc);
    }
    if let Some(pos) = d.iter().position(|&x| x == 1) {
        // dilaton equation
        let rest: Vec<u32> = d.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, &x)| x).collect();
        let chi = 2 * i64::from(g) - 2 + rest.len() as i64;
        return Ok(psi_small(g, &rest)? * BigRational::from_integer(chi.into()));
    }
    Err(OracleError::OutOfRange(format!("<{d:?}>_{g} is not reachable from the seeds")))
}

/// `int_{M_{g,n}} psi^d kappa1^k`.
pub fn kappa_to_psi(idx: &KappaIndex) -> Result<BigRational, OracleError> {
    let n = idx.d.len();
    check_stable(idx.g, n)?;
    if degree(&idx.d) + i64::from(idx.k) != dim(idx.g, n) {
        return Err(OracleError::DegreeMismatch {
            degree: degree(&idx.d) + i64::from(idx.k),
            dim: dim(idx.g, n),
        });
    }
    if idx.k > MAX_KAPPA {
        return Err(OracleError::OutOfRange(format!("kappa1^{}", idx.k)));
    }
    kappa_integral(idx.g, &idx.d, &vec![1; idx.k as usize])
}

// int psi^d kappa_{b_1}...kappa_{b_m}. With kappa_b = pi_*(psi_{n+1}^{b+1}) and
// pi^* kappa_a = kappa_a - psi_{n+1}^a, the last kappa becomes a new marked
// point and the others pick up correction terms supported on it.
fn kappa_integral(g: u32, d: &[u32], kappas: &[u32]) -> Result<BigRational, OracleError> {
    let Some((&last, rest)) = kappas.split_last() else {
        return psi_small(g, d);
    };
    let mut acc = BigRational::zero();
    for mask in 0u32..(1 << rest.len()) {
        let mut extra = last + 1;
        let mut kept = Vec::with_capacity(rest.len());
        for (i, &b) in rest.iter().enumerate() {
            if mask & (1 << i) != 0 {
                extra += b;
            } else {
                kept.push(b);
            }
        }
        let mut d_next = d.to_vec();
        d_next.push(extra);
        let term = kappa_integral(g, &d_next, &kept)?;
        if mask.count_ones() % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// The normalized bracket `prod (2d_i+1)!! 4^|d| (2 pi^2)^d0 / d0! * int psi^d kappa1^d0`,
/// with `d0 = 3g - 3 + n - |d|`.
pub fn bracket_oracle(g: u32, d: &[u32]) -> Result<PiScalar, OracleError> {
    let n = d.len();
    check_stable(g, n)?;
    if n > MAX_POINTS {
        return Err(OracleError::OutOfRange(format!("{n} marked points")));
    }
    let d0 = dim(g, n) - degree(d);
    if d0 < 0 {
        return Ok(PiScalar::zero());
    }
    let d0 = d0 as u32;
    let integral = kappa_to_psi(&KappaIndex { g, d: d.to_vec(), k: d0 })?;
    let mut num = d.iter().fold(BigInt::one(), |acc, &x| acc * double_factorial_odd(x));
    num <<= 2 * degree(d) as usize + d0 as usize;
    let norm = BigRational::new(num, factorial(u64::from(d0)));
    Ok(PiScalar::new(norm * integral, d0))
}

/// Every `(g, d)` (with `d` sorted descending) the oracle can evaluate.
pub fn oracle_range() -> Vec<(u32, Vec<u32>)> {
    let mut out = Vec::new();
    for g in 0..=MAX_GENUS {
        for n in 1..=MAX_POINTS {
            if 2 * g as i64 - 2 + n as i64 <= 0 {
                continue;
            }
            let top = dim(g, n) as u32;
            for d in crate::bracket::multisets_desc(n, top) {
                if bracket_oracle(g, &d).is_ok() {
                    out.push((g, d));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn genus_zero_closed_form() {
        assert_eq!(psi_genus0(&[0, 0, 0]).unwrap(), q(1, 1));
        assert_eq!(psi_genus0(&[1, 0, 0, 0]).unwrap(), q(1, 1));
        assert_eq!(psi_genus0(&[2, 0, 0, 0, 0]).unwrap(), q(1, 1));
        assert_eq!(psi_genus0(&[1, 1, 0, 0, 0]).unwrap(), q(2, 1));
        assert!(matches!(psi_genus0(&[1, 0, 0]), Err(OracleError::DegreeMismatch { .. })));
    }

    #[test]
    fn seeded_values() {
        assert_eq!(psi_small(1, &[1]).unwrap(), q(1, 24));
        assert_eq!(psi_small(2, &[4]).unwrap(), q(1, 1152));
        assert_eq!(psi_small(1, &[2, 0]).unwrap(), q(1, 24));
        assert_eq!(psi_small(1, &[1, 1]).unwrap(), q(1, 24));
        // <tau_4 tau_1>_2 = (2*2-2+1) <tau_4>_2
        assert_eq!(psi_small(2, &[4, 1]).unwrap(), q(3, 1152));
        assert!(matches!(psi_small(2, &[3, 2]), Err(OracleError::OutOfRange(_))));
        assert!(matches!(psi_small(3, &[7]), Err(OracleError::OutOfRange(_))));
        assert!(matches!(psi_small(0, &[0, 0]), Err(OracleError::Unstable { .. })));
    }

    #[test]
    fn kappa_pushforward() {
        let k = |g, d: &[u32], k| kappa_to_psi(&KappaIndex { g, d: d.to_vec(), k }).unwrap();
        assert_eq!(k(0, &[0, 0, 0, 0], 1), q(1, 1));
        assert_eq!(k(1, &[0], 1), q(1, 24));
        assert_eq!(k(0, &[0, 0, 0, 0, 0], 2), q(5, 1));
    }

    #[test]
    fn normalized_brackets() {
        assert_eq!(bracket_oracle(0, &[0, 0, 0]).unwrap(), PiScalar::one());
        assert_eq!(bracket_oracle(1, &[1]).unwrap(), PiScalar::frac(1, 2, 0));
        assert_eq!(bracket_oracle(0, &[0, 0, 0, 0]).unwrap(), PiScalar::frac(2, 1, 1));
        assert_eq!(bracket_oracle(0, &[1, 0, 0, 0]).unwrap(), PiScalar::frac(12, 1, 0));
        assert_eq!(bracket_oracle(0, &[0, 0, 0, 0, 0]).unwrap(), PiScalar::frac(10, 1, 2));
        assert_eq!(bracket_oracle(1, &[0, 0]).unwrap(), PiScalar::frac(1, 4, 2));
        assert_eq!(bracket_oracle(1, &[1, 0]).unwrap(), PiScalar::frac(2, 1, 1));
        assert_eq!(bracket_oracle(1, &[2, 0]).unwrap(), PiScalar::frac(10, 1, 0));
        assert_eq!(bracket_oracle(1, &[1, 1]).unwrap(), PiScalar::frac(6, 1, 0));
        assert_eq!(bracket_oracle(1, &[0]).unwrap(), PiScalar::frac(1, 12, 1));
    }

    #[test]
    fn string_and_dilaton_close_over_table() {
        for (g, d) in oracle_range() {
            if dim(g, d.len()) != degree(&d) || d.len() < 2 {
                continue;
            }
            let value = psi_small(g, &d).unwrap();
            if let Some(pos) = d.iter().position(|&x| x == 0) {
                let mut rest = d.clone();
                rest.remove(pos);
                if 2 * g as i64 - 2 + rest.len() as i64 > 0 {
                    let mut rhs = BigRational::zero();
                    for j in 0..rest.len() {
                        if rest[j] > 0 {
                            let mut l = rest.clone();
                            l[j] -= 1;
                            rhs += psi_small(g, &l).unwrap();
                        }
                    }
                    assert_eq!(value, rhs, "string equation at {g} {d:?}");
                }
            }
            if let Some(pos) = d.iter().position(|&x| x == 1) {
                let mut rest = d.clone();
                rest.remove(pos);
                if 2 * g as i64 - 2 + rest.len() as i64 > 0 {
                    let chi = 2 * g as i64 - 2 + rest.len() as i64;
                    let rhs = psi_small(g, &rest).unwrap() * BigRational::from_integer(chi.into());
                    assert_eq!(value, rhs, "dilaton equation at {g} {d:?}");
                }
            }
        }
    }

    #[test]
    fn symmetric_under_permutation() {
        let base = psi_small(1, &[2, 1, 0]).unwrap();
        for perm in [[2, 0, 1], [1, 2, 0], [1, 0, 2], [0, 2, 1], [0, 1, 2]] {
            assert_eq!(psi_small(1, &perm).unwrap(), base);
        }
        let base = bracket_oracle(0, &[1, 0, 0, 0, 0]).unwrap();
        assert_eq!(bracket_oracle(0, &[0, 0, 1, 0, 0]).unwrap(), base);
    }

    #[test]
    fn range_is_nontrivial() {
        let range = oracle_range();
        assert!(range.len() > 40, "only {} oracle keys", range.len());
        assert!(range.iter().any(|(g, _)| *g == 2));
    }
}
