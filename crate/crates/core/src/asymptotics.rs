//! Finite-size scaling of the susceptibility and the expected length.
//!
//! With `y = 1/z`, a model is subcritical when `y >= n + n^w`, supercritical
//! when `y <= n - n^w`, and critical in between, where it is described by
//! `τ_n = (y - n)/√n`. The window exponent `w` must lie in `(1/2, 2/3)`.
//! That is the range where the three-regime asymptotics and the crossover
//! form are both valid.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use crate::error::{domain, Result};
use crate::exact::SawModel;
use crate::scaling::Scaling;
use crate::specfun::{log1pmx, log_erfcx, log_gamma, stirling_correction, LogValue, HALF_LN_2PI};

pub const DEFAULT_WINDOW_EXPONENT: f64 = 0.6;

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `delta = y - n > 0`.
    Subcritical { delta: f64 },
    /// `tau_n = (y - n) / √n`.
    Critical { tau_n: f64 },
    /// `delta = n - y > 0`.
    Supercritical { delta: f64 },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Subcritical { .. } => "subcritical",
            Regime::Critical { .. } => "critical",
            Regime::Supercritical { .. } => "supercritical",
        }
    }
}

pub fn check_window_exponent(w: f64) -> Result<()> {
    if !(w > 0.5 && w < 2.0 / 3.0) {
        return domain(format!("window exponent must lie in (1/2, 2/3), got {w}"));
    }
    Ok(())
}

/// Assigns the model to a regime; thresholds `y = n ± n^w` are closed on
/// the off-critical side.
pub fn classify(model: &SawModel, w: f64) -> Result<Regime> {
    check_window_exponent(w)?;
    let n = model.n() as f64;
    let y = model.y();
    let width = n.powf(w);
    Ok(if y >= n + width {
        Regime::Subcritical { delta: y - n }
    } else if y <= n - width {
        Regime::Supercritical { delta: n - y }
    } else {
        Regime::Critical {
            tau_n: (y - n) / n.sqrt(),
        }
    })
}

fn check_consistent(model: &SawModel, regime: &Regime) -> Result<()> {
    let n = model.n() as f64;
    let y = model.y();
    let (claimed, actual) = match *regime {
        Regime::Subcritical { delta } => (delta, y - n),
        Regime::Supercritical { delta } => (delta, n - y),
        Regime::Critical { tau_n } => (tau_n, (y - n) / n.sqrt()),
    };
    let off_critical_sign_ok = match regime {
        Regime::Critical { .. } => true,
        _ => actual > 0.0,
    };
    if !off_critical_sign_ok || (claimed - actual).abs() > 1e-9 * actual.abs().max(1.0) {
        return domain(format!(
            "{} regime with parameter {claimed} does not match n = {n}, y = {y}",
            regime.name()
        ));
    }
    Ok(())
}

/// `ln[√(2πn) e^{τ²/2} erfc(τ/√2) / 2]`, the crossover form of the critical
/// susceptibility.
pub fn log_chi_crossover(n: u64, tau: f64) -> Result<f64> {
    let nf = n as f64;
    Ok(0.5 * (2.0 * PI * nf).ln() - LN_2 + log_erfcx(tau * FRAC_1_SQRT_2)?)
}

/// `ln[y^{1-n} e^y Γ(n)]`, the supercritical susceptibility.
fn log_chi_supercritical(n: u64, y: f64) -> Result<f64> {
    let nf = n as f64;
    if nf < 10.0 {
        return Ok((1.0 - nf) * y.ln() + y + log_gamma(nf)?);
    }
    // Stirling for Γ(n) with the (n-1) ln(n/y) + (y - n) part kept small.
    let d = (y - nf) / nf;
    Ok(HALF_LN_2PI + 0.5 * nf.ln() + stirling_correction(nf) - nf * log1pmx(d) + d.ln_1p())
}

/// Leading asymptotics of `ln χ` in the given regime.
pub fn log_chi_asymptotic(model: &SawModel, regime: &Regime) -> Result<LogValue> {
    check_consistent(model, regime)?;
    let y = model.y();
    let ln = match *regime {
        Regime::Subcritical { delta } => {
            let second_order = 1.0 - y / (delta * delta);
            if second_order.is_nan() || second_order <= 0.0 {
                return domain(format!(
                    "subcritical correction 1 - y/(y-n)^2 = {second_order} is not positive; \
                     the model is too close to the critical window"
                ));
            }
            (y / delta).ln() + second_order.ln()
        }
        Regime::Critical { tau_n } => log_chi_crossover(model.n(), tau_n)?,
        Regime::Supercritical { .. } => log_chi_supercritical(model.n(), y)?,
    };
    LogValue::from_ln(ln)
}

/// `α_τ = -τ + √(2/π) e^{-τ²/2} / erfc(τ/√2)`, the mean of the critical
/// limit law.
///
/// For `τ > 5` the subtraction loses digits, so the Laplace continued
/// fraction `α_τ = 1/(τ + 2/(τ + 3/(τ + …)))` is used instead.
pub fn alpha_tau(tau: f64) -> Result<f64> {
    if tau.is_nan() {
        return domain("alpha_tau of NaN");
    }
    if tau == f64::INFINITY {
        return Ok(0.0);
    }
    if tau <= 5.0 {
        let scaled = crate::specfun::erfcx(tau * FRAC_1_SQRT_2)?;
        return Ok(-tau + SQRT_2_OVER_PI / scaled);
    }
    const TINY: f64 = 1e-300;
    let mut f = tau;
    let mut c = tau;
    let mut d = 0.0;
    for k in 1..10_000 {
        let a = (k + 1) as f64;
        d = tau + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = tau + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    Ok(1.0 / f)
}

/// Leading asymptotics of `E L` in the given regime.
pub fn mean_length_asymptotic(model: &SawModel, regime: &Regime) -> Result<f64> {
    check_consistent(model, regime)?;
    let n = model.n() as f64;
    Ok(match *regime {
        Regime::Subcritical { delta } => n / delta,
        Regime::Critical { tau_n } => alpha_tau(tau_n)? * n.sqrt(),
        Regime::Supercritical { delta } => delta,
    })
}

/// Closed-form `ln χ` along one of the standard scalings:
/// `ln(s/(s-1))`, `ln(n^{1-q}/a)`, the critical form at fixed `τ`,
/// `a² n^{2q-1}/2 + ln √(2πn)`, and `ln(s √(2πn)) + (|ln s| + s - 1) n`.
pub fn special_case_log_chi(scaling: Scaling, n: u64) -> Result<LogValue> {
    scaling.validate()?;
    let nf = n as f64;
    let ln_sqrt_2pi_n = 0.5 * (2.0 * PI * nf).ln();
    let ln = match scaling {
        Scaling::Subcritical { s } => (s / (s - 1.0)).ln(),
        Scaling::NearSubcritical { a, q } => (1.0 - q) * nf.ln() - a.ln(),
        Scaling::Critical { tau } => log_chi_crossover(n, tau)?,
        Scaling::NearSupercritical { a, q } => 0.5 * a * a * nf.powf(2.0 * q - 1.0) + ln_sqrt_2pi_n,
        Scaling::Supercritical { s } => s.ln() + ln_sqrt_2pi_n + (s.ln().abs() + s - 1.0) * nf,
    };
    LogValue::from_ln(ln)
}
