use std::fmt;

use serde::{Deserialize, Serialize};

use super::BracketError;

/// `(g, d)` naming `[tau_{d_1} ... tau_{d_n}]_{g,n}`, with `d` sorted descending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BracketKey {
    g: u32,
    d: Vec<u32>,
}

impl BracketKey {
    /// Canonicalizes `d` and rejects unstable `(g, n)`.
    pub fn new(g: u32, d: impl Into<Vec<u32>>) -> Result<Self, BracketError> {
        let mut d = d.into();
        if !is_stable(g, d.len()) {
            return Err(BracketError::Unstable { g, n: d.len() });
        }
        d.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { g, d })
    }

    /// `d` must already be sorted descending and `(g, n)` stable.
    pub(crate) fn from_sorted(g: u32, d: Vec<u32>) -> Self {
        debug_assert!(d.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(is_stable(g, d.len()));
        Self { g, d }
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[u32] {
        &self.d
    }

    pub fn degree(&self) -> u64 {
        self.d.iter().map(|&x| u64::from(x)).sum()
    }

    /// `3g - 3 + n`, the complex dimension of `M_{g,n}`.
    pub fn dim(&self) -> u64 {
        dim(self.g, self.d.len())
    }

    /// `2g - 2 + n`; every term of the recursion lowers it.
    pub fn weight(&self) -> u32 {
        2 * self.g + self.d.len() as u32 - 2
    }

    /// Whether `|d| <= 3g - 3 + n`, i.e. whether the bracket is nonzero.
    pub fn is_admissible(&self) -> bool {
        self.degree() <= self.dim()
    }

    /// The kappa1 exponent `3g - 3 + n - |d|`, for admissible keys.
    pub fn d0(&self) -> Option<u32> {
        self.dim().checked_sub(self.degree()).map(|x| x as u32)
    }
}

pub(crate) fn is_stable(g: u32, n: usize) -> bool {
    n >= 1 && 2 * i64::from(g) - 2 + n as i64 > 0
}

pub(crate) fn dim(g: u32, n: usize) -> u64 {
    (3 * u64::from(g) + n as u64).saturating_sub(3)
}

impl fmt::Display for BracketKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.d.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]_{{{},{}}}", self.g, self.d.len())
    }
}

impl fmt::Debug for BracketKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All non-increasing sequences of length `n` with sum at most `max_sum`,
/// in descending lexicographic order.
pub fn multisets_desc(n: usize, max_sum: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, cap: u32, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in (0..=cap.min(budget)).rev() {
            prefix.push(x);
            rec(n, x, budget - x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max_sum, max_sum, &mut Vec::with_capacity(n), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_sorts_descending() {
        let k = BracketKey::new(1, vec![0, 2, 1]).unwrap();
        assert_eq!(k.d(), &[2, 1, 0]);
        assert_eq!(k.dim(), 3);
        assert_eq!(k.d0(), Some(0));
        assert_eq!(k.weight(), 3);
        assert_eq!(k.to_string(), "[2,1,0]_{1,3}");
    }

    #[test]
    fn unstable_keys_rejected() {
        assert!(matches!(BracketKey::new(0, vec![0]), Err(BracketError::Unstable { .. })));
        assert!(matches!(BracketKey::new(0, vec![0, 0]), Err(BracketError::Unstable { .. })));
        assert!(matches!(BracketKey::new(2, vec![]), Err(BracketError::Unstable { .. })));
        assert!(BracketKey::new(1, vec![0]).is_ok());
    }

    #[test]
    fn inadmissible_key_has_no_d0() {
        let k = BracketKey::new(0, vec![1, 0, 0]).unwrap();
        assert!(!k.is_admissible());
        assert_eq!(k.d0(), None);
    }

    #[test]
    fn multiset_enumeration_counts() {
        assert_eq!(multisets_desc(4, 1), vec![vec![1, 0, 0, 0], vec![0, 0, 0, 0]]);
        assert_eq!(multisets_desc(2, 2).len(), 4);
        // partitions of 0..=5 into at most 3 parts: 1+1+2+3+4+5
        assert_eq!(multisets_desc(3, 5).len(), 16);
    }
}
