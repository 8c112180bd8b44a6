//! The five ways of sending `z` to the critical point `1/n` that the
//! limit theorems are stated for.

use std::fmt;

use crate::error::{domain, Result};
use crate::exact::SawModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    /// `z = 1/(s n)` with `s > 1`.
    Subcritical { s: f64 },
    /// `z = 1/(n + a n^q)` with `a > 0`, `q ∈ (1/2, 1)`.
    NearSubcritical { a: f64, q: f64 },
    /// `z = 1/(n + τ √n)`.
    Critical { tau: f64 },
    /// `z = 1/(n - a n^q)` with `a > 0`, `q ∈ (1/2, 1)`.
    NearSupercritical { a: f64, q: f64 },
    /// `z = 1/(s n)` with `s ∈ (0, 1)`.
    Supercritical { s: f64 },
}

impl Scaling {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Scaling::Subcritical { s } if s <= 1.0 || !s.is_finite() => {
                domain(format!("subcritical scaling needs s > 1, got {s}"))
            }
            Scaling::Supercritical { s } if !(s > 0.0 && s < 1.0) => {
                domain(format!("supercritical scaling needs 0 < s < 1, got {s}"))
            }
            Scaling::Critical { tau } if !tau.is_finite() => {
                domain(format!("critical scaling needs finite tau, got {tau}"))
            }
            Scaling::NearSubcritical { a, q } | Scaling::NearSupercritical { a, q } => {
                if a <= 0.0 || !a.is_finite() {
                    return domain(format!("near-critical scaling needs a > 0, got {a}"));
                }
                if !(q > 0.5 && q < 1.0) {
                    return domain(format!("near-critical scaling needs 1/2 < q < 1, got {q}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `y = 1/z` at size `n`.
    pub fn inverse_weight(&self, n: u64) -> f64 {
        let n = n as f64;
        match *self {
            Scaling::Subcritical { s } | Scaling::Supercritical { s } => s * n,
            Scaling::NearSubcritical { a, q } => n + a * n.powf(q),
            Scaling::Critical { tau } => n + tau * n.sqrt(),
            Scaling::NearSupercritical { a, q } => n - a * n.powf(q),
        }
    }

    /// The model on `K_n` along this scaling.
    pub fn model(&self, n: u64) -> Result<SawModel> {
        self.validate()?;
        let y = self.inverse_weight(n);
        if y.is_nan() || y <= 0.0 {
            return domain(format!("{self} gives non-positive y = {y} at n = {n}"));
        }
        SawModel::from_inverse_weight(n, y)
    }

    /// Whether `model` lies on this scaling (same `y` to 1e-12 relative).
    pub fn matches(&self, model: &SawModel) -> bool {
        let y = self.inverse_weight(model.n());
        ((model.y() - y) / y).abs() <= 1e-12
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scaling::Subcritical { s } => write!(f, "z=1/(s n), s={s}"),
            Scaling::NearSubcritical { a, q } => write!(f, "z=1/(n+a n^q), a={a}, q={q}"),
            Scaling::Critical { tau } => write!(f, "z=1/(n+tau sqrt n), tau={tau}"),
            Scaling::NearSupercritical { a, q } => write!(f, "z=1/(n-a n^q), a={a}, q={q}"),
            Scaling::Supercritical { s } => write!(f, "z=1/(s n), s={s}"),
        }
    }
}
