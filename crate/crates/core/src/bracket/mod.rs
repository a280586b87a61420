//! Memoized evaluation of the normalized brackets
//! `[tau_{d_1} ... tau_{d_n}]_{g,n}`.
//!
//! A request first discovers every missing key its recursion reaches, then
//! evaluates them level by level in increasing `2g - 2 + n`. All children of
//! a key sit on strictly lower levels, so each level is an embarrassingly
//! parallel batch over a read-only memo table.

mod cache;
mod key;
pub(crate) mod recursion;

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use parking_lot::RwLock;

use crate::exactnum::{a_seq, warm_a_seq, PiScalar};
use crate::par::{map_collect, Execution};

pub use cache::{CacheError, CacheStats, CACHE_HEADER};
pub use key::{multisets_desc, BracketKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BracketError {
    #[error("unstable moduli space (g = {g}, n = {n})")]
    Unstable { g: u32, n: usize },
}

/// Insert-once memo table of bracket values.
#[derive(Default)]
pub struct BracketEngine {
    memo: RwLock<HashMap<BracketKey, PiScalar>>,
    execution: Execution,
}

impl BracketEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_execution(execution: Execution) -> Self {
        Self { memo: RwLock::default(), execution }
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    /// Number of memoized brackets.
    pub fn len(&self) -> usize {
        self.memo.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.read().is_empty()
    }

    /// `[tau_d]_{g,n}` for any (not necessarily sorted) `d`.
    pub fn bracket_of(&self, g: u32, d: &[u32]) -> Result<PiScalar, BracketError> {
        Ok(self.bracket(&BracketKey::new(g, d.to_vec())?))
    }

    pub fn bracket(&self, key: &BracketKey) -> PiScalar {
        if !key.is_admissible() {
            return PiScalar::zero();
        }
        if let Some(v) = self.memo.read().get(key) {
            return v.clone();
        }
        self.ensure(std::slice::from_ref(key));
        self.memo.read().get(key).cloned().expect("bracket evaluated")
    }

    /// `V_{g,n} = [tau_0^n]_{g,n}` for `n >= 1`.
    pub fn volume_constant(&self, g: u32, n: usize) -> Result<PiScalar, BracketError> {
        self.bracket_of(g, &vec![0; n])
    }

    /// Evaluates every admissible key in `keys` that is not memoized yet.
    pub fn ensure(&self, keys: &[BracketKey]) {
        let levels = self.plan(keys);
        let Some(max_d0) = levels.values().flatten().filter_map(BracketKey::d0).max() else {
            return;
        };
        warm_a_seq(max_d0 + 1);
        for batch in levels.values() {
            let values = {
                let memo = self.memo.read();
                map_collect(self.execution, batch, |k| evaluate(k, &memo))
            };
            let mut memo = self.memo.write();
            for (k, v) in batch.iter().zip(values) {
                check_invariants(k, &v);
                memo.entry(k.clone()).or_insert(v);
            }
        }
    }

    // Missing keys reachable from `roots`, grouped by weight.
    fn plan(&self, roots: &[BracketKey]) -> BTreeMap<u32, Vec<BracketKey>> {
        let memo = self.memo.read();
        let mut seen: HashSet<BracketKey> = HashSet::new();
        let mut stack: Vec<BracketKey> = roots
            .iter()
            .filter(|k| k.is_admissible() && !memo.contains_key(k))
            .cloned()
            .collect();
        let mut levels: BTreeMap<u32, Vec<BracketKey>> = BTreeMap::new();
        while let Some(k) = stack.pop() {
            if seen.contains(&k) {
                continue;
            }
            if !recursion::is_base(&k) {
                recursion::expand(&k, |t| {
                    for c in std::iter::once(t.left).chain(t.right) {
                        if !memo.contains_key(c) && !seen.contains(c) {
                            stack.push(c.clone());
                        }
                    }
                });
            }
            levels.entry(k.weight()).or_default().push(k.clone());
            seen.insert(k);
        }
        for batch in levels.values_mut() {
            batch.sort();
        }
        levels
    }

    /// All stable keys with `2g - 2 + n <= max_weight` and `|d| <= 3g - 3 + n`,
    /// with values, in non-decreasing weight.
    pub fn bracket_range(&self, max_weight: u32) -> Vec<(BracketKey, PiScalar)> {
        let keys = keys_up_to_weight(max_weight);
        self.ensure(&keys);
        let memo = self.memo.read();
        keys.into_iter()
            .map(|k| {
                let v = memo.get(&k).cloned().expect("range key evaluated");
                (k, v)
            })
            .collect()
    }

    /// Snapshot of the memo table in canonical order (weight, g, d descending).
    pub fn snapshot(&self) -> Vec<(BracketKey, PiScalar)> {
        let memo = self.memo.read();
        let mut out: Vec<_> = memo.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        out.sort_by(|a, b| canonical_order(&a.0, &b.0));
        out
    }

    pub(crate) fn insert_loaded(&self, key: BracketKey, value: PiScalar) -> Result<(), PiScalar> {
        let mut memo = self.memo.write();
        match memo.get(&key) {
            Some(existing) if *existing != value => Err(existing.clone()),
            Some(_) => Ok(()),
            None => {
                memo.insert(key, value);
                Ok(())
            }
        }
    }
}

pub(crate) fn canonical_order(a: &BracketKey, b: &BracketKey) -> std::cmp::Ordering {
    (a.weight(), a.g(), std::cmp::Reverse(a.d())).cmp(&(b.weight(), b.g(), std::cmp::Reverse(b.d())))
}

/// Every admissible stable key up to the given weight, in canonical order.
pub fn keys_up_to_weight(max_weight: u32) -> Vec<BracketKey> {
    let mut keys = Vec::new();
    for w in 1..=max_weight {
        for g in 0..=(w + 2) / 2 {
            let Some(n) = (w + 2).checked_sub(2 * g) else { continue };
            let n = n as usize;
            if n == 0 {
                continue;
            }
            let top = key::dim(g, n) as u32;
            for d in multisets_desc(n, top) {
                keys.push(BracketKey::from_sorted(g, d));
            }
        }
    }
    keys
}

fn base_value(key: &BracketKey) -> PiScalar {
    match (key.g(), key.d()) {
        (0, [0, 0, 0]) => PiScalar::one(),
        (1, [0]) => PiScalar::frac(1, 12, 1),
        (1, [1]) => PiScalar::frac(1, 2, 0),
        _ => PiScalar::zero(),
    }
}

fn evaluate(key: &BracketKey, memo: &HashMap<BracketKey, PiScalar>) -> PiScalar {
    if recursion::is_base(key) {
        return base_value(key);
    }
    let d0 = key.d0().expect("admissible key");
    let lookup = |k: &BracketKey| -> &PiScalar {
        memo.get(k).unwrap_or_else(|| panic!("child {k} of {key} not evaluated"))
    };
    // Integer numerators are summed per (L, denominators) group so that the
    // expensive rational normalization happens once per group, not per term.
    let mut groups: HashMap<(u32, &BigInt, Option<&BigInt>), BigInt> = HashMap::new();
    let mut grades: Vec<Option<u32>> = vec![None; d0 as usize + 1];
    recursion::expand(key, |t| {
        let left = lookup(t.left);
        let right = t.right.map(lookup);
        let grade = left.pi_exp() + right.map_or(0, PiScalar::pi_exp);
        match grades[t.l as usize] {
            None => grades[t.l as usize] = Some(grade),
            Some(seen) => assert_eq!(seen, grade, "mixed grades in the terms of {key}"),
        }
        let mut num = left.coeff().numer() * BigInt::from(t.mult);
        if let Some(r) = right {
            num *= r.coeff().numer();
        }
        let den_l = left.coeff().denom();
        let den_r = right.map(|r| r.coeff().denom());
        *groups.entry((t.l, den_l, den_r)).or_default() += num;
    });
    let mut per_l: Vec<PiScalar> = vec![PiScalar::zero(); d0 as usize + 1];
    for ((l, den_l, den_r), num) in groups {
        let den = match den_r {
            Some(r) => den_l * r,
            None => den_l.clone(),
        };
        let grade = grades[l as usize].expect("grade recorded");
        per_l[l as usize] += &PiScalar::new(BigRational::new(num, den), grade);
    }
    let mut total = PiScalar::zero();
    for (l, inner) in per_l.iter().enumerate() {
        if !inner.is_zero() {
            total += &(&a_seq(l as u32) * inner);
        }
    }
    total
}

fn check_invariants(key: &BracketKey, value: &PiScalar) {
    let d0 = key.d0().expect("only admissible keys are memoized");
    assert!(value.is_positive(), "bracket {key} = {value} is not positive");
    assert_eq!(value.pi_exp(), d0, "bracket {key} = {value} breaks pi-homogeneity");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(engine: &BracketEngine, g: u32, d: &[u32]) -> PiScalar {
        engine.bracket_of(g, d).unwrap()
    }

    #[test]
    fn anchor_values() {
        let e = BracketEngine::new();
        assert_eq!(b(&e, 0, &[0, 0, 0]), PiScalar::one());
        assert_eq!(b(&e, 1, &[1]), PiScalar::frac(1, 2, 0));
        assert_eq!(b(&e, 1, &[0]), PiScalar::frac(1, 12, 1));
        assert_eq!(b(&e, 0, &[0, 0, 0, 0]), PiScalar::frac(2, 1, 1));
        assert_eq!(b(&e, 0, &[1, 0, 0, 0]), PiScalar::frac(12, 1, 0));
        assert_eq!(b(&e, 0, &[0, 0, 0, 0, 0]), PiScalar::frac(10, 1, 2));
        assert_eq!(b(&e, 1, &[0, 0]), PiScalar::frac(1, 4, 2));
        assert_eq!(b(&e, 1, &[1, 0]), PiScalar::frac(2, 1, 1));
        assert_eq!(b(&e, 1, &[0, 1]), PiScalar::frac(2, 1, 1));
        assert_eq!(b(&e, 1, &[2, 0]), PiScalar::frac(10, 1, 0));
        assert_eq!(b(&e, 1, &[1, 1]), PiScalar::frac(6, 1, 0));
    }

    #[test]
    fn vanishing_and_unstable() {
        let e = BracketEngine::new();
        assert!(b(&e, 0, &[1, 0, 0]).is_zero());
        assert!(b(&e, 1, &[3, 0]).is_zero());
        assert_eq!(e.bracket_of(0, &[0, 0]), Err(BracketError::Unstable { g: 0, n: 2 }));
        assert_eq!(e.bracket_of(0, &[0]), Err(BracketError::Unstable { g: 0, n: 1 }));
    }

    #[test]
    fn range_enumeration() {
        let e = BracketEngine::new();
        let w1: Vec<_> = e.bracket_range(1).into_iter().map(|(k, _)| k.to_string()).collect();
        assert_eq!(w1, vec!["[0,0,0]_{0,3}", "[1]_{1,1}", "[0]_{1,1}"]);
        let w2 = e.bracket_range(2);
        assert_eq!(w2.len(), 9);
        assert!(w2.windows(2).all(|p| p[0].0.weight() <= p[1].0.weight()));
    }

    #[test]
    fn memo_is_reused() {
        let e = BracketEngine::new();
        let v = b(&e, 2, &[0]);
        let n = e.len();
        assert_eq!(b(&e, 2, &[0]), v);
        assert_eq!(e.len(), n);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let seq = BracketEngine::with_execution(Execution::Sequential);
        let par = BracketEngine::with_execution(Execution::Parallel);
        seq.bracket_range(6);
        par.bracket_range(6);
        assert_eq!(seq.snapshot(), par.snapshot());
    }
}
