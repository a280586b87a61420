//! Adaptive composite Gauss–Legendre quadrature.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use once_cell::sync::Lazy;

/// Nodes per panel.
pub const NODES: usize = 32;
const MAX_DEPTH: u32 = 40;

static RULE: Lazy<GaussLegendre> = Lazy::new(|| GaussLegendre::new(NonZeroUsize::new(NODES).expect("nonzero")));

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Sum over accepted panels of `|coarse - fine|`.
    pub error: f64,
    pub converged: bool,
}

impl QuadResult {
    pub fn zero() -> Self {
        Self { value: 0.0, error: 0.0, converged: true }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error
        } else {
            self.error / self.value.abs()
        }
    }
}

/// Integrates `f` over `[a, b]`, bisecting panels until the 32-point
/// estimate and its two halves agree to `rel_tol` of the running total.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> QuadResult {
    if b <= a {
        return QuadResult::zero();
    }
    let whole = RULE.integrate(a, b, &mut f);
    let tol = (rel_tol * whole.abs()).max(f64::MIN_POSITIVE);
    let mut out = QuadResult::zero();
    // explicit stack keeps the panel order deterministic
    let mut stack = vec![(a, b, whole, tol, 0u32)];
    while let Some((lo, hi, coarse, tol, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = RULE.integrate(lo, mid, &mut f);
        let right = RULE.integrate(mid, hi, &mut f);
        let fine = left + right;
        let err = (fine - coarse).abs();
        if err <= tol || depth >= MAX_DEPTH {
            out.value += fine;
            out.error += err;
            out.converged &= err <= tol;
        } else {
            stack.push((mid, hi, right, tol / 2.0, depth + 1));
            stack.push((lo, mid, left, tol / 2.0, depth + 1));
        }
    }
    out
}

/// [`integrate`] over consecutive panels `[p_0, p_1], [p_1, p_2], ...`.
pub fn integrate_panels(mut f: impl FnMut(f64) -> f64, points: &[f64], rel_tol: f64) -> QuadResult {
    let mut out = QuadResult::zero();
    for w in points.windows(2) {
        let r = integrate(&mut f, w[0], w[1], rel_tol);
        out.value += r.value;
        out.error += r.error;
        out.converged &= r.converged;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_smooth_functions() {
        let r = integrate(|x| x.powi(7), 0.0, 2.0, 1e-12);
        assert!((r.value - 32.0).abs() < 1e-12);
        assert!(r.converged);
        let e = integrate(f64::exp, 0.0, 1.0, 1e-12);
        assert!((e.value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        let s = integrate(f64::sqrt, 0.0, 1.0, 1e-10);
        assert!((s.value - 2.0 / 3.0).abs() < 1e-10);
        assert!(s.converged);
    }

    #[test]
    fn kinks_on_panel_edges() {
        let r = integrate_panels(|x: f64| (x - 1.0).abs(), &[0.0, 1.0, 3.0], 1e-12);
        assert!((r.value - 2.5).abs() < 1e-13);
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-10), QuadResult::zero());
    }
}
