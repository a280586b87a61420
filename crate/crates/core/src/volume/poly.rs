use std::collections::BTreeMap;
use std::fmt;

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exactnum::{to_float, PiScalar};

const RM: RoundingMode = RoundingMode::ToEven;

/// Sparse polynomial in the squares `L_1^2, ..., L_m^2` with graded
/// coefficients. The key `e` stands for `prod L_i^(2 e_i)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SquarePoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, PiScalar>,
}

impl SquarePoly {
    pub fn new(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &PiScalar)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> PiScalar {
        self.terms.get(exps).cloned().unwrap_or_else(PiScalar::zero)
    }

    /// Graded accumulation; panics when like terms disagree in pi-degree.
    pub fn add_term(&mut self, exps: Vec<u32>, c: &PiScalar) {
        assert_eq!(exps.len(), self.nvars, "exponent arity");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count");
        let mut out = Self::new(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, &(ca * cb));
            }
        }
        out
    }

    /// Sets every variable equal to one variable `t`.
    pub fn diagonal(&self) -> Self {
        let mut out = Self::new(1);
        for (e, c) in &self.terms {
            out.add_term(vec![e.iter().sum()], c);
        }
        out
    }

    /// Substitutes `L_var^2 = -4 pi^2`.
    pub fn at_two_pi_i(&self, var: usize) -> Self {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = Self::new(self.nvars - 1);
        for (e, c) in &self.terms {
            let k = e[var];
            let factor = PiScalar::new(BigRational::from_integer(BigInt::from(-4).pow(k)), k);
            let mut rest = e.clone();
            rest.remove(var);
            out.add_term(rest, &(c * &factor));
        }
        out
    }

    /// Writing `dP/dL_var = L_var * Q(L_var^2)`, returns `Q(-4 pi^2)`.
    pub fn derivative_at_two_pi_i(&self, var: usize) -> Self {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = Self::new(self.nvars - 1);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let q = BigRational::from_integer(BigInt::from(2 * k) * BigInt::from(-4).pow(k - 1));
            let factor = PiScalar::new(q, k - 1);
            let mut rest = e.clone();
            rest.remove(var);
            out.add_term(rest, &(c * &factor));
        }
        out
    }

    pub fn eval_f64(&self, lengths: &[f64]) -> f64 {
        assert_eq!(lengths.len(), self.nvars, "length arity");
        let sq: Vec<f64> = lengths.iter().map(|l| l * l).collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = e.iter().zip(&sq).map(|(&k, s)| s.powi(k as i32)).product();
                c.to_f64() * mono
            })
            .sum()
    }

    /// Evaluation at `precision_bits`; one variable goes through Horner.
    pub fn eval_big(&self, lengths: &[BigFloat], precision_bits: usize) -> BigFloat {
        assert_eq!(lengths.len(), self.nvars, "length arity");
        let p = precision_bits + 32;
        let sq: Vec<BigFloat> = lengths.iter().map(|l| l.mul(l, p, RM)).collect();
        let mut acc = BigFloat::from_word(0, p);
        if self.nvars == 1 {
            let top = self.terms.keys().map(|e| e[0]).max().unwrap_or(0);
            for k in (0..=top).rev() {
                acc = acc.mul(&sq[0], p, RM);
                if let Some(c) = self.terms.get(&vec![k]) {
                    acc = acc.add(&to_float(c, p), p, RM);
                }
            }
        } else {
            for (e, c) in &self.terms {
                let mut term = to_float(c, p);
                for (&k, s) in e.iter().zip(&sq) {
                    if k > 0 {
                        term = term.mul(&s.powi(k as usize, p, RM), p, RM);
                    }
                }
                acc = acc.add(&term, p, RM);
            }
        }
        acc.set_precision(precision_bits, RM).expect("precision change");
        acc
    }

    /// Canonical text: ascending total degree, then exponent vectors in
    /// descending lexicographic order, e.g. `2*pi^2 + 1/2*pi^0*L1^2`.
    pub fn render(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0*pi^0".to_string();
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (i, e) in keys.into_iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&self.terms[e].to_string());
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    out.push_str(&format!("*{var}{}^{}", j + 1, 2 * k));
                }
            }
        }
        out
    }
}

impl fmt::Display for SquarePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("L"))
    }
}

impl fmt::Debug for SquarePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Distinct permutations of a multiset, starting from any ordering.
pub(crate) fn distinct_permutations(v: &[u32]) -> Vec<Vec<u32>> {
    let mut cur = v.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).expect("pivot");
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}
