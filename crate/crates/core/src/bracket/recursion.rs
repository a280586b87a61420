//! Term expansion of the boundary-removal recursion.
//!
//! For a canonical key with first (largest) index `d_1`, the bracket is
//!
//! ```text
//!   8 * sum_{j>=2} sum_L (2 d_j + 1) a_L [d_1 + d_j + L - 1, d_{i != 1,j}]_{g,n-1}
//! + 16 * sum_L sum_{k1 + k2 = L + d_1 - 2} a_L [k1, k2, d_{i != 1}]_{g-1,n+1}
//! + 16 * sum_{ordered splits} sum_L sum_{k1 + k2 = L + d_1 - 2} a_L
//!        [k1, d_I]_{g',|I|+1} [k2, d_J]_{g-g',|J|+1}
//! ```
//!
//! with `L` running from 0 to `d0 = 3g - 3 + n - |d|`. The prefactors 8, 16,
//! 16 are what the normalized brackets require; they reproduce the
//! independently derived values on `M_{0,4}`, `M_{0,5}` and `M_{1,2}`.
//! Unstable or vanishing children are dropped during expansion.

use super::key::{dim, is_stable, BracketKey};

pub(crate) const A_FACTOR: u64 = 8;
pub(crate) const B_FACTOR: u64 = 16;
pub(crate) const C_FACTOR: u64 = 16;

/// One product in the expansion: `mult * a_L * left * right`.
pub(crate) struct Term<'a> {
    pub l: u32,
    pub mult: u64,
    pub left: &'a BracketKey,
    pub right: Option<&'a BracketKey>,
}

/// Base cases on `M_{0,3}` and `M_{1,1}`, which the recursion does not reach.
pub(crate) fn is_base(key: &BracketKey) -> bool {
    matches!((key.g(), key.n()), (0, 3) | (1, 1))
}

fn child(g: u32, mut d: Vec<u32>) -> Option<BracketKey> {
    if !is_stable(g, d.len()) {
        return None;
    }
    let degree: u64 = d.iter().map(|&x| u64::from(x)).sum();
    if degree > dim(g, d.len()) {
        return None;
    }
    d.sort_unstable_by(|a, b| b.cmp(a));
    Some(BracketKey::from_sorted(g, d))
}

fn grouped(values: &[u32]) -> Vec<(u32, usize)> {
    let mut out: Vec<(u32, usize)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((last, c)) if *last == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * (n - i) as u64 / (i + 1) as u64;
    }
    c
}

/// Calls `visit` once per nonzero term of the recursion for an admissible,
/// non-base key.
pub(crate) fn expand(key: &BracketKey, mut visit: impl FnMut(Term<'_>)) {
    let g = key.g();
    let d = key.d();
    let Some(d0) = key.d0() else { return };
    let d1 = d[0];
    let rest = &d[1..];
    let groups = grouped(rest);

    // A: merge the first boundary with another one.
    for (gi, &(v, count)) in groups.iter().enumerate() {
        let mut others: Vec<u32> = Vec::with_capacity(rest.len());
        for (gj, &(w, c)) in groups.iter().enumerate() {
            let c = if gi == gj { c - 1 } else { c };
            others.extend(std::iter::repeat_n(w, c));
        }
        for l in 0..=d0 {
            let Some(t) = (d1 + v + l).checked_sub(1) else { continue };
            let mut cd = others.clone();
            cd.push(t);
            if let Some(k) = child(g, cd) {
                let mult = A_FACTOR * (2 * u64::from(v) + 1) * count as u64;
                visit(Term { l, mult, left: &k, right: None });
            }
        }
    }

    for l in 0..=d0 {
        let Some(s) = (l + d1).checked_sub(2) else { continue };

        // B: the pair of pants cuts off a handle.
        if g >= 1 {
            for k1 in 0..=s / 2 {
                let k2 = s - k1;
                let mut cd = rest.to_vec();
                cd.push(k1);
                cd.push(k2);
                if let Some(k) = child(g - 1, cd) {
                    let mult = B_FACTOR * if k1 == k2 { 1 } else { 2 };
                    visit(Term { l, mult, left: &k, right: None });
                }
            }
        }

        // C: the pair of pants separates the surface.
        let mut choice = vec![0usize; groups.len()];
        loop {
            let mut left_d = Vec::new();
            let mut right_d = Vec::new();
            let mut mult = C_FACTOR;
            for (&(v, c), &take) in groups.iter().zip(&choice) {
                left_d.extend(std::iter::repeat_n(v, take));
                right_d.extend(std::iter::repeat_n(v, c - take));
                mult *= binomial(c, take);
            }
            let mirror: Vec<usize> = groups.iter().zip(&choice).map(|(&(_, c), &t)| c - t).collect();
            for g1 in 0..=g {
                let g2 = g - g1;
                if !is_stable(g1, left_d.len() + 1) || !is_stable(g2, right_d.len() + 1) {
                    continue;
                }
                for k1 in 0..=s {
                    let k2 = s - k1;
                    // A split and its mirror image give the same product:
                    // visit the smaller one with doubled weight.
                    let side = (g1, k1, &choice).cmp(&(g2, k2, &mirror));
                    let twice = match side {
                        std::cmp::Ordering::Greater => continue,
                        std::cmp::Ordering::Less => 2,
                        std::cmp::Ordering::Equal => 1,
                    };
                    let mut ld = left_d.clone();
                    ld.push(k1);
                    let Some(lk) = child(g1, ld) else { continue };
                    let mut rd = right_d.clone();
                    rd.push(k2);
                    let Some(rk) = child(g2, rd) else { continue };
                    visit(Term { l, mult: mult * twice, left: &lk, right: Some(&rk) });
                }
            }
            // next multiset split
            let mut i = 0;
            while i < choice.len() {
                if choice[i] < groups[i].1 {
                    choice[i] += 1;
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_child_has_lower_weight() {
        for (g, d) in [(0u32, vec![0u32, 0, 0, 0, 0, 0]), (2, vec![2, 1, 0]), (3, vec![1]), (1, vec![3, 0, 0])] {
            let key = BracketKey::new(g, d).unwrap();
            let mut count = 0;
            expand(&key, |t| {
                count += 1;
                assert!(t.left.weight() < key.weight(), "{key} -> {}", t.left);
                if let Some(r) = t.right {
                    assert_eq!(t.left.weight() + r.weight() + 1, key.weight());
                }
                assert!(t.left.is_admissible());
            });
            assert!(count > 0);
        }
    }

    #[test]
    fn c_term_children_preserve_grade() {
        // pi-degree of each product plus L equals d0 of the parent.
        let key = BracketKey::new(3, vec![2, 1, 0, 0]).unwrap();
        let d0 = key.d0().unwrap();
        expand(&key, |t| {
            let mut total = t.l + t.left.d0().unwrap();
            if let Some(r) = t.right {
                total += r.d0().unwrap();
            }
            assert_eq!(total, d0);
        });
    }
}
