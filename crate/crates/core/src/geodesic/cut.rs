use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bracket::BracketEngine;
use crate::volume::{volume_polynomial, SquarePoly};

use super::GeodesicError;

/// Where one boundary slot of a cut component is glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// Curve variable `x_j`; every curve fills exactly two slots.
    Curve(usize),
    /// Original boundary `b` of the ambient surface, with a fixed length.
    Boundary(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub genus: u32,
    pub slots: Vec<Slot>,
}

/// The surface cut along a multicurve `sum c_j gamma_j`.
///
/// JSON form:
/// ```json
/// {"curves": [1], "components": [{"genus": 1, "slots": [{"curve": 0}, {"curve": 0}]}],
///  "sym": 1, "one_handles": 0}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutDescription {
    /// Multiplicities `c_j`, one per curve.
    pub curves: Vec<u32>,
    pub components: Vec<Component>,
    /// `|Sym(gamma)|`.
    #[serde(default = "one")]
    pub sym: u32,
    /// `M(gamma)`, curves that cut off a one-handle.
    #[serde(default)]
    pub one_handles: u32,
}

fn one() -> u32 {
    1
}

impl CutDescription {
    pub fn from_json(s: &str) -> Result<Self, GeodesicError> {
        serde_json::from_str(s).map_err(|e| GeodesicError::InvalidCut(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cut serializes")
    }

    /// A nonseparating curve on a closed genus-`g` surface.
    pub fn nonseparating(g: u32) -> Self {
        Self {
            curves: vec![1],
            components: vec![Component { genus: g.saturating_sub(1), slots: vec![Slot::Curve(0), Slot::Curve(0)] }],
            sym: 1,
            one_handles: 0,
        }
    }

    /// A separating curve splitting a closed genus-`g` surface into `(i, 1)` and `(g - i, 1)`.
    pub fn separating(g: u32, i: u32) -> Self {
        let j = g.saturating_sub(i);
        Self {
            curves: vec![1],
            components: vec![
                Component { genus: i, slots: vec![Slot::Curve(0)] },
                Component { genus: j, slots: vec![Slot::Curve(0)] },
            ],
            sym: if i == j { 2 } else { 1 },
            one_handles: u32::from(i == 1 || j == 1),
        }
    }

    /// `k` curves cutting a closed genus-`g` surface into `(g1, k)` and
    /// `(g - g1 - k + 1, k)`, every curve meeting both sides.
    pub fn two_block(g: u32, g1: u32, k: usize) -> Self {
        let g2 = (g + 1).saturating_sub(g1 + k as u32);
        let slots: Vec<Slot> = (0..k).map(Slot::Curve).collect();
        let sym = (1..=k as u32).product();
        Self {
            curves: vec![1; k],
            components: vec![Component { genus: g1, slots: slots.clone() }, Component { genus: g2, slots }],
            sym,
            one_handles: u32::from(k == 1 && (g1 == 1 || g2 == 1)),
        }
    }

    pub fn k(&self) -> usize {
        self.curves.len()
    }

    fn boundary_count(&self) -> usize {
        self.components
            .iter()
            .flat_map(|c| &c.slots)
            .filter(|s| matches!(s, Slot::Boundary(_)))
            .count()
    }

    /// `(g, n)` of the glued surface, after validating the wiring.
    pub fn ambient(&self) -> Result<(u32, usize), GeodesicError> {
        let bad = |m: String| Err(GeodesicError::InvalidCut(m));
        if self.curves.is_empty() {
            return bad("no curves".into());
        }
        if self.curves.contains(&0) {
            return bad("curve multiplicities must be positive".into());
        }
        if self.sym == 0 {
            return bad("sym must be positive".into());
        }
        let k = self.k();
        let n = self.boundary_count();
        let mut curve_uses = vec![0; k];
        let mut boundary_uses = vec![0; n];
        for c in &self.components {
            if 2 * c.genus + c.slots.len() as u32 <= 2 {
                return bad(format!("unstable component (g = {}, n = {})", c.genus, c.slots.len()));
            }
            for s in &c.slots {
                match *s {
                    Slot::Curve(j) if j < k => curve_uses[j] += 1,
                    Slot::Boundary(b) if b < n => boundary_uses[b] += 1,
                    Slot::Curve(j) => return bad(format!("curve {j} out of range")),
                    Slot::Boundary(b) => return bad(format!("boundary {b} out of range")),
                }
            }
        }
        if let Some(j) = curve_uses.iter().position(|&u| u != 2) {
            return bad(format!("curve {j} fills {} slots, expected 2", curve_uses[j]));
        }
        if let Some(b) = boundary_uses.iter().position(|&u| u != 1) {
            return bad(format!("boundary {b} used {} times", boundary_uses[b]));
        }
        if !self.connected() {
            return bad("cut components do not glue to a connected surface".into());
        }
        let chi: i64 = self.components.iter().map(|c| 2 * i64::from(c.genus) - 2 + c.slots.len() as i64).sum();
        let twice_g = chi - n as i64 + 2;
        if twice_g < 0 || twice_g % 2 != 0 {
            return bad("Euler characteristics do not add up".into());
        }
        Ok(((twice_g / 2) as u32, n))
    }

    fn connected(&self) -> bool {
        let m = self.components.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut first: HashMap<usize, usize> = HashMap::new();
        for (ci, c) in self.components.iter().enumerate() {
            for s in &c.slots {
                if let Slot::Curve(j) = s {
                    if let Some(&other) = first.get(j) {
                        let (a, b) = (find(&mut parent, ci), find(&mut parent, other));
                        parent[a] = b;
                    } else {
                        first.insert(*j, ci);
                    }
                }
            }
        }
        let root = find(&mut parent, 0);
        (0..m).all(|i| find(&mut parent, i) == root)
    }

    pub fn check_ambient(&self, g: u32, n: usize) -> Result<(), GeodesicError> {
        let got = self.ambient()?;
        if got == (g, n) {
            Ok(())
        } else {
            Err(GeodesicError::InvalidCut(format!("cut glues to {got:?}, expected {:?}", (g, n))))
        }
    }

    /// `prod_i V_{g_i,n_i}` over the components as one polynomial in the
    /// squares of `(x_1, ..., x_k, L_1, ..., L_n)`.
    pub fn volume_product(&self, engine: &BracketEngine) -> Result<SquarePoly, GeodesicError> {
        let (_, n) = self.ambient()?;
        let k = self.k();
        let nvars = k + n;
        let mut out = SquarePoly::new(nvars);
        out.add_term(vec![0; nvars], &crate::exactnum::PiScalar::one());
        for c in &self.components {
            let v = volume_polynomial(engine, c.genus, c.slots.len())?.expanded();
            let mut lifted = SquarePoly::new(nvars);
            for (e, coef) in v.terms() {
                let mut big = vec![0; nvars];
                for (s, &x) in c.slots.iter().zip(e) {
                    let idx = match *s {
                        Slot::Curve(j) => j,
                        Slot::Boundary(b) => k + b,
                    };
                    big[idx] += x;
                }
                lifted.add_term(big, coef);
            }
            out = out.mul(&lifted);
        }
        Ok(out)
    }
}
