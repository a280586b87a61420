use serde::{Deserialize, Serialize};

use super::GeodesicError;

/// The length profile `f` in `f_gamma(X) = sum f(l_alpha(X))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `1_{t <= lambda}`
    Indicator { lambda: f64 },
    /// `t^power 1_{t <= lambda}`
    Monomial { power: u32, lambda: f64 },
    /// `t^{-1} 1_{t <= lambda}`
    Reciprocal { lambda: f64 },
    /// `e^{-s t}`
    ExpScaled { s: f64 },
    /// Piecewise linear through `(t, f(t))`, zero outside the table.
    Custom { points: Vec<(f64, f64)> },
}

impl WeightSpec {
    pub fn validate(&self) -> Result<(), GeodesicError> {
        let bad = |m: &str| Err(GeodesicError::InvalidWeight(m.to_string()));
        match self {
            Self::Indicator { lambda } | Self::Monomial { lambda, .. } | Self::Reciprocal { lambda } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return bad("lambda must be positive");
                }
            }
            Self::ExpScaled { s } => {
                if !(s.is_finite() && *s > 0.0) {
                    return bad("s must be positive");
                }
            }
            Self::Custom { points } => {
                if points.len() < 2 {
                    return bad("custom table needs at least two points");
                }
                if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite() || *t < 0.0) {
                    return bad("custom table entries must be finite with t >= 0");
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return bad("custom table must be strictly increasing in t");
                }
            }
        }
        Ok(())
    }

    /// `Some(p)` when `f(t) = t^p 1_{t <= lambda}`, which has an exact integral.
    pub fn power_law(&self) -> Option<(i32, f64)> {
        match *self {
            Self::Indicator { lambda } => Some((0, lambda)),
            Self::Monomial { power, lambda } => Some((power as i32, lambda)),
            Self::Reciprocal { lambda } => Some((-1, lambda)),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Indicator { lambda } => f64::from(u8::from(t <= *lambda)),
            Self::Monomial { power, lambda } => {
                if t <= *lambda {
                    t.powi(*power as i32)
                } else {
                    0.0
                }
            }
            Self::Reciprocal { lambda } => {
                if t <= *lambda {
                    1.0 / t
                } else {
                    0.0
                }
            }
            Self::ExpScaled { s } => (-s * t).exp(),
            Self::Custom { points } => {
                let (t0, tn) = (points[0].0, points[points.len() - 1].0);
                if t < t0 || t > tn {
                    return 0.0;
                }
                let i = points.partition_point(|p| p.0 <= t).clamp(1, points.len() - 1);
                let (a, b) = (points[i - 1], points[i]);
                a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
            }
        }
    }

    /// Points where `f` is not smooth; quadrature panels start there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Custom { points } => points.iter().map(|p| p.0).collect(),
            Self::ExpScaled { .. } => Vec::new(),
            _ => vec![self.power_law().expect("power law").1],
        }
    }

    /// Right end of the support, if bounded.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            Self::ExpScaled { .. } => None,
            Self::Custom { points } => Some(points[points.len() - 1].0),
            _ => Some(self.power_law().expect("power law").1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_validation() {
        assert_eq!(WeightSpec::Indicator { lambda: 1.0 }.eval(0.5), 1.0);
        assert_eq!(WeightSpec::Indicator { lambda: 1.0 }.eval(1.5), 0.0);
        assert_eq!(WeightSpec::Monomial { power: 2, lambda: 1.0 }.eval(0.5), 0.25);
        assert_eq!(WeightSpec::Reciprocal { lambda: 1.0 }.eval(0.5), 2.0);
        let c = WeightSpec::Custom { points: vec![(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)] };
        assert!(c.validate().is_ok());
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.eval(1.5), 1.0);
        assert_eq!(c.eval(3.0), 0.0);
        assert!(WeightSpec::Indicator { lambda: 0.0 }.validate().is_err());
        assert!(WeightSpec::ExpScaled { s: -1.0 }.validate().is_err());
        assert!(WeightSpec::Custom { points: vec![(1.0, 0.0), (0.5, 1.0)] }.validate().is_err());
    }

    #[test]
    fn json_form() {
        let w: WeightSpec = serde_json::from_str(r#"{"kind":"monomial","power":2,"lambda":1.5}"#).unwrap();
        assert_eq!(w, WeightSpec::Monomial { power: 2, lambda: 1.5 });
        let e: WeightSpec = serde_json::from_str(r#"{"kind":"exp_scaled","s":2.0}"#).unwrap();
        assert_eq!(e, WeightSpec::ExpScaled { s: 2.0 });
    }
}
