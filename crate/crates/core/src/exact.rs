//! Exact (non-asymptotic) quantities of the walk ensemble on `K_n`.
//!
//! A walk of `N` steps from a fixed origin is a sequence of `N + 1` distinct
//! vertices, so there are `c_N = (n-1)(n-2)…(n-N)` of them. Under the weight
//! `z^N / χ` the length `L` has `P(L = N) = c_N z^N / χ`, with the ratio
//! recurrence `p_N / p_{N-1} = (n - N) z`.

use crate::error::{domain, Error, Result};
use crate::numeric::CompensatedSum;
use crate::specfun::{log_gamma, log_scaled_upper_gamma, LogValue};

/// Default vertex cap for O(n) evaluation (`SAW_KN_N_CAP` overrides it in the CLI).
pub const DEFAULT_N_CAP: u64 = 100_000_000;

/// Step counts below this use a direct log sum instead of a log-gamma
/// difference.
const DIRECT_COUNT_STEPS: u64 = 1000;

/// `(n, z)` of the ensemble on `K_n`, with `y = 1/z` kept alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SawModel {
    n: u64,
    z: f64,
    y: f64,
}

impl SawModel {
    pub fn new(n: u64, z: f64) -> Result<Self> {
        check_n(n)?;
        if z <= 0.0 || !z.is_finite() || !(1.0 / z).is_finite() {
            return domain(format!(
                "step weight z must be positive and finite, got {z}"
            ));
        }
        Ok(SawModel { n, z, y: 1.0 / z })
    }

    /// Builds the model from `y = 1/z`, keeping `y` exactly as given.
    pub fn from_inverse_weight(n: u64, y: f64) -> Result<Self> {
        check_n(n)?;
        if y <= 0.0 || !y.is_finite() || 1.0 / y <= 0.0 {
            return domain(format!(
                "inverse weight y must be positive and finite, got {y}"
            ));
        }
        Ok(SawModel { n, z: 1.0 / y, y })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// The model at `z e^t`.
    pub fn tilted(&self, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return domain(format!("tilt must be finite, got {t}"));
        }
        SawModel::from_inverse_weight(self.n, self.y * (-t).exp())
    }

    /// Index of the largest term `c_N z^N`.
    pub fn mode(&self) -> u64 {
        let gap = self.n as f64 - self.y;
        if gap <= 0.0 {
            0
        } else {
            (gap.floor() as u64).min(self.n - 1)
        }
    }
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return domain(format!("K_n needs n >= 2, got {n}"));
    }
    Ok(())
}

/// `ln c_N = ln Γ(n) - ln Γ(n - N)`.
pub fn log_c_count(n: u64, steps: u64) -> Result<LogValue> {
    check_n(n)?;
    if steps >= n {
        return domain(format!(
            "a walk on K_{n} has at most {} steps, got {steps}",
            n - 1
        ));
    }
    let ln = if steps <= DIRECT_COUNT_STEPS {
        let mut s = CompensatedSum::new();
        for j in 1..=steps {
            s.add(((n - j) as f64).ln());
        }
        s.value()
    } else {
        log_gamma(n as f64)? - log_gamma((n - steps) as f64)?
    };
    Ok(LogValue::from_ln_unchecked(ln))
}

/// `ln χ` by direct summation of `c_N z^N`, with the default cap.
pub fn log_chi_sum(model: &SawModel) -> Result<LogValue> {
    log_chi_sum_with_cap(model, DEFAULT_N_CAP)
}

/// `ln χ` by direct summation in O(n).
///
/// The log-terms follow the ratio recurrence through a compensated
/// running sum. They are exponentiated against the precomputed log of the
/// largest term and accumulated with compensation. All terms are positive.
/// Past the mode the terms decay geometrically, and the loop stops once
/// the remaining tail is below 1e-18 of the total.
pub fn log_chi_sum_with_cap(model: &SawModel, cap: u64) -> Result<LogValue> {
    let n = model.n;
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let z = model.z;
    let peak = model.mode();
    let shift = log_c_count(n, peak)?.ln() + peak as f64 * z.ln();

    let mut ln_term = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    total.add((-shift).exp());
    for steps in 1..n {
        let ratio = (n - steps) as f64 * z;
        ln_term.add(ratio.ln());
        let term = (ln_term.value() - shift).exp();
        total.add(term);
        if steps > peak && ratio < 1.0 && term <= 1e-18 * (1.0 - ratio) * total.value() {
            break;
        }
    }
    Ok(LogValue::from_ln_unchecked(shift + total.value().ln()))
}

/// `ln χ = (n-1) ln z + y + ln Γ(n, y)` through the incomplete gamma function.
pub fn log_chi_gamma(model: &SawModel) -> Result<LogValue> {
    let ln = log_scaled_upper_gamma(model.n, model.y)?;
    Ok(LogValue::from_ln_unchecked(ln))
}

/// `E L = (n-1) - y + y/χ`.
pub fn mean_length(model: &SawModel) -> Result<f64> {
    Ok(moments(model)?.0)
}

/// `Var L = y (1 - (E L + 1)/χ)`.
pub fn variance_length(model: &SawModel) -> Result<f64> {
    Ok(moments(model)?.1)
}

fn moments(model: &SawModel) -> Result<(f64, f64)> {
    let n1 = (model.n - 1) as f64;
    // Both closed forms subtract O(y) quantities to get O(n z) results,
    // which is hopeless for n z -> 0; the series converges geometrically there.
    if n1 * model.z <= 0.5 {
        return Ok(series_moments(model));
    }
    let ln_chi = log_chi_gamma(model)?.ln();
    let y = model.y;
    let mean = (n1 - y + (y.ln() - ln_chi).exp()).clamp(0.0, n1);
    let var = y * (1.0 - ((mean + 1.0).ln() - ln_chi).exp());
    Ok((mean, var.max(0.0)))
}

/// Mean and variance summed term by term; for `(n-1) z <= 1/2` only.
fn series_moments(model: &SawModel) -> (f64, f64) {
    let n = model.n;
    let mut terms = vec![1.0f64];
    let mut t = 1.0;
    let mut total = 1.0;
    for steps in 1..n {
        t *= (n - steps) as f64 * model.z;
        terms.push(t);
        total += t;
        if t < 1e-18 * total {
            break;
        }
    }
    let mean = terms
        .iter()
        .enumerate()
        .map(|(k, t)| k as f64 * t)
        .sum::<f64>()
        / total;
    let var = terms
        .iter()
        .enumerate()
        .map(|(k, t)| (k as f64 - mean).powi(2) * t)
        .sum::<f64>()
        / total;
    (mean, var)
}

/// `ln M_L(t) = ln χ(z e^t) - ln χ(z)`.
pub fn log_mgf_length(model: &SawModel, t: f64) -> Result<f64> {
    let tilted = model.tilted(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(log_chi_gamma(&tilted)?.ln() - log_chi_gamma(model)?.ln())
}

/// Exact law of the walk length, generated on demand.
#[derive(Debug, Clone, Copy)]
pub struct LengthPmf {
    model: SawModel,
    log_chi: LogValue,
}

pub fn length_pmf(model: &SawModel) -> Result<LengthPmf> {
    Ok(LengthPmf {
        model: *model,
        log_chi: log_chi_gamma(model)?,
    })
}

impl LengthPmf {
    pub fn model(&self) -> &SawModel {
        &self.model
    }

    pub fn log_chi(&self) -> LogValue {
        self.log_chi
    }

    /// `p_0, …, p_{n-1}` by the ratio recurrence.
    pub fn iter(&self) -> PmfIter {
        PmfIter {
            n: self.model.n,
            z: self.model.z,
            ln_chi: self.log_chi.ln(),
            next: 0,
            ln_term: CompensatedSum::new(),
        }
    }

    /// `p_N` by direct evaluation; zero outside the support `N < n`.
    pub fn probability(&self, steps: u64) -> Result<f64> {
        if steps >= self.model.n {
            return Ok(0.0);
        }
        let ln_c = log_c_count(self.model.n, steps)?.ln();
        Ok((ln_c + steps as f64 * self.model.z.ln() - self.log_chi.ln()).exp())
    }

    /// Materializes the whole table (O(n) memory).
    pub fn to_vec(&self) -> Vec<f64> {
        self.iter().collect()
    }
}

/// Streaming iterator over `p_N`.
#[derive(Debug, Clone)]
pub struct PmfIter {
    n: u64,
    z: f64,
    ln_chi: f64,
    next: u64,
    ln_term: CompensatedSum,
}

impl PmfIter {
    /// `ln p_N` for the next `N`, advancing the iterator.
    pub fn next_ln(&mut self) -> Option<f64> {
        if self.next >= self.n {
            return None;
        }
        if self.next > 0 {
            self.ln_term
                .add(((self.n - self.next) as f64 * self.z).ln());
        }
        self.next += 1;
        Some(self.ln_term.value() - self.ln_chi)
    }
}

impl Iterator for PmfIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.next_ln().map(f64::exp)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.n - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for PmfIter {}
