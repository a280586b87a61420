//! Volume polynomials `V_{g,n}(L_1, ..., L_n)` in the plain-`L` convention.

mod poly;

use std::collections::BTreeMap;
use std::fmt;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::bracket::{multisets_desc, BracketEngine, BracketError, BracketKey};
use crate::exactnum::{PiLaurent, PiScalar};

pub(crate) use poly::distinct_permutations;
pub use poly::SquarePoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VolumeError {
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error("expected {expected} lengths, got {got}")]
    Arity { expected: usize, got: usize },
}

/// `V_{g,n}` stored by sorted exponent vectors; symmetric, so one entry per
/// multiset of exponents.
#[derive(Clone, PartialEq, Eq)]
pub struct VolumePolynomial {
    g: u32,
    n: usize,
    sorted: BTreeMap<Vec<u32>, PiScalar>,
}

/// `prod (2d_i + 1)! 4^{d_i}`: converts a bracket to a plain-`L` coefficient.
fn coefficient_scale(d: &[u32]) -> BigRational {
    let mut s = BigInt::one();
    for &di in d {
        for k in 2..=(2 * di + 1) {
            s *= k;
        }
        s <<= 2 * di as usize;
    }
    BigRational::from_integer(s)
}

pub fn volume_polynomial(engine: &BracketEngine, g: u32, n: usize) -> Result<VolumePolynomial, VolumeError> {
    let top = crate::bracket::BracketKey::new(g, vec![0; n])?.dim() as u32;
    let keys: Vec<BracketKey> = multisets_desc(n, top)
        .into_iter()
        .map(|d| BracketKey::new(g, d).expect("stable"))
        .collect();
    engine.ensure(&keys);
    let mut sorted = BTreeMap::new();
    for k in keys {
        let b = engine.bracket(&k);
        assert!(b.is_positive(), "nonpositive bracket {k}");
        let c = b.mul_rational(&coefficient_scale(k.d()).recip());
        sorted.insert(k.d().to_vec(), c);
    }
    Ok(VolumePolynomial { g, n, sorted })
}

impl VolumePolynomial {
    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `3g - 3 + n`, the degree in the squared lengths.
    pub fn degree(&self) -> u32 {
        3 * self.g + self.n as u32 - 3
    }

    /// Coefficient of `prod L_i^(2 e_i)`.
    pub fn coefficient(&self, exps: &[u32]) -> PiScalar {
        let mut key = exps.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.sorted.get(&key).cloned().unwrap_or_else(PiScalar::zero)
    }

    /// Constant term, `V_{g,n}` itself.
    pub fn constant(&self) -> PiScalar {
        self.coefficient(&vec![0; self.n])
    }

    /// One entry per exponent multiset, sorted descending.
    pub fn sorted_terms(&self) -> impl Iterator<Item = (&[u32], &PiScalar)> {
        self.sorted.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Full expansion over all exponent orderings.
    pub fn expanded(&self) -> SquarePoly {
        let mut out = SquarePoly::new(self.n);
        for (d, c) in &self.sorted {
            for e in distinct_permutations(d) {
                out.add_term(e, c);
            }
        }
        out
    }

    pub fn evaluate(&self, lengths: &[BigFloat], precision_bits: usize) -> Result<BigFloat, VolumeError> {
        self.check_arity(lengths.len())?;
        Ok(self.expanded().eval_big(lengths, precision_bits))
    }

    pub fn evaluate_f64(&self, lengths: &[f64]) -> Result<f64, VolumeError> {
        self.check_arity(lengths.len())?;
        Ok(self.expanded().eval_f64(lengths))
    }

    /// Exact value at rational lengths, as a finite pi-series.
    pub fn evaluate_exact(&self, lengths: &[BigRational]) -> Result<PiLaurent, VolumeError> {
        self.check_arity(lengths.len())?;
        let squares: Vec<BigRational> = lengths.iter().map(|l| l * l).collect();
        let mut out = PiLaurent::zero();
        for (e, c) in self.expanded().terms() {
            let mut m = c.coeff().clone();
            for (s, &x) in squares.iter().zip(e) {
                for _ in 0..x {
                    m *= s;
                }
            }
            out.add_term(c.pi_exp() as i32, &m);
        }
        Ok(out)
    }

    fn check_arity(&self, got: usize) -> Result<(), VolumeError> {
        if got == self.n {
            Ok(())
        } else {
            Err(VolumeError::Arity { expected: self.n, got })
        }
    }

    /// `V(t, ..., t)` as a polynomial in `t^2`.
    pub fn restrict_equal(&self) -> SquarePoly {
        let mut out = SquarePoly::new(1);
        for (d, c) in &self.sorted {
            let mult = distinct_permutations(d).len() as i64;
            out.add_term(vec![d.iter().sum()], &c.mul_int(mult));
        }
        out
    }

    /// Substitutes `L_var^2 = -4 pi^2`.
    pub fn eval_at_2pi_i(&self, var: usize) -> SquarePoly {
        self.expanded().at_two_pi_i(var)
    }

    /// `Q(-4 pi^2)` where `dV/dL_var = L_var Q(L_var^2)`; the derivative at
    /// `2 pi i` is `2 pi i` times this.
    pub fn derivative_at_2pi_i(&self, var: usize) -> SquarePoly {
        self.expanded().derivative_at_two_pi_i(var)
    }

    /// Largest `V(2L) / (e^{sum L} V)` over the grid points, which should
    /// never exceed 1.
    pub fn upper_bound_ratio(&self, grid: &[Vec<f64>]) -> f64 {
        let full = self.expanded();
        let v0 = self.constant().to_f64();
        grid.iter()
            .map(|pt| {
                let doubled: Vec<f64> = pt.iter().map(|x| 2.0 * x).collect();
                let total: f64 = pt.iter().sum();
                full.eval_f64(&doubled) / (total.exp() * v0)
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for VolumePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.expanded(), f)
    }
}

impl fmt::Debug for VolumePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V_{{{},{}}} = {}", self.g, self.n, self)
    }
}
