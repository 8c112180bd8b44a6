//! Limiting laws of the rescaled walk length and the distances used to
//! watch the exact laws converge to them.
//!
//! `X_τ` is handled through its representation as `Z - τ` for a standard
//! normal `Z` conditioned on `Z > τ`. That gives a closed CDF, a mean, and an
//! inverse-CDF sampler. The moment generating function is kept as a checked
//! identity.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::asymptotics::alpha_tau;
use crate::error::{domain, Error, Result};
use crate::exact::{length_pmf, SawModel};
use crate::numeric::CompensatedSum;
use crate::scaling::Scaling;
use crate::specfun::{log_erfc, normal_hazard};

/// Points in the uniform part of a KS grid.
pub const KS_UNIFORM_POINTS: usize = 10_000;
/// Upper end of the KS grid, as a quantile of the limit law.
pub const KS_UPPER_QUANTILE: f64 = 0.9999;

const QUANTILE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitLaw {
    /// `G_p - 1` for a geometric `G_p` on `{1, 2, ...}`.
    ShiftedGeometric {
        p: f64,
    },
    Exponential {
        rate: f64,
    },
    XTau {
        tau: f64,
    },
    PointMass {
        c: f64,
    },
}

impl LimitLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LimitLaw::ShiftedGeometric { p } if !(p > 0.0 && p < 1.0) => {
                domain(format!("geometric parameter must lie in (0, 1), got {p}"))
            }
            LimitLaw::Exponential { rate } if rate <= 0.0 || !rate.is_finite() => {
                domain(format!("exponential rate must be positive, got {rate}"))
            }
            LimitLaw::XTau { tau } if !tau.is_finite() => {
                domain(format!("tau must be finite, got {tau}"))
            }
            LimitLaw::PointMass { c } if c < 0.0 || !c.is_finite() => {
                domain(format!("point mass location must be >= 0, got {c}"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            LimitLaw::ShiftedGeometric { .. } | LimitLaw::PointMass { .. }
        )
    }

    /// Right-continuous CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            LimitLaw::ShiftedGeometric { p } => {
                if x < 0.0 {
                    0.0
                } else {
                    -((x.floor() + 1.0) * (-p).ln_1p()).exp_m1()
                }
            }
            LimitLaw::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            LimitLaw::XTau { tau } => xtau_cdf(tau, x).unwrap_or(f64::NAN),
            LimitLaw::PointMass { c } => {
                if x < c {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Probability of the atom at `k` for discrete laws.
    pub fn pmf(&self, k: f64) -> Option<f64> {
        match *self {
            LimitLaw::ShiftedGeometric { p } => Some(if k >= 0.0 && k.fract() == 0.0 {
                p * (k * (-p).ln_1p()).exp()
            } else {
                0.0
            }),
            LimitLaw::PointMass { c } => Some(if k == c { 1.0 } else { 0.0 }),
            _ => None,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            LimitLaw::ShiftedGeometric { p } => (1.0 - p) / p,
            LimitLaw::Exponential { rate } => 1.0 / rate,
            LimitLaw::XTau { tau } => alpha_tau(tau).unwrap_or(f64::NAN),
            LimitLaw::PointMass { c } => c,
        }
    }

    /// Smallest `x` with `F(x) >= u`, for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            LimitLaw::ShiftedGeometric { p } => {
                // F(k) = 1 - (1-p)^{k+1} >= u  ⇔  k >= ln(1-u)/ln(1-p) - 1
                let k = ((-u).ln_1p() / (-p).ln_1p() - 1.0).ceil().max(0.0);
                // Guard the ceiling against rounding on either side.
                if k > 0.0 && self.cdf(k - 1.0) >= u {
                    k - 1.0
                } else if self.cdf(k) < u {
                    k + 1.0
                } else {
                    k
                }
            }
            LimitLaw::Exponential { rate } => -(-u).ln_1p() / rate,
            LimitLaw::XTau { tau } => xtau_quantile(tau, u).unwrap_or(f64::NAN),
            LimitLaw::PointMass { c } => c,
        }
    }

    /// One inverse-CDF draw; consumes exactly one `f64` from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u)
    }
}

/// The limit law matching `scaling`, and the normalization `L / scale`
/// that converges to it.
pub fn law_for_model(model: &SawModel, scaling: Scaling) -> Result<(LimitLaw, f64)> {
    scaling.validate()?;
    if !scaling.matches(model) {
        return domain(format!(
            "model with n = {}, y = {} is not on {scaling}",
            model.n(),
            model.y()
        ));
    }
    let n = model.n() as f64;
    Ok(match scaling {
        Scaling::Subcritical { s } => (LimitLaw::ShiftedGeometric { p: 1.0 - 1.0 / s }, 1.0),
        Scaling::NearSubcritical { a, q } => (LimitLaw::Exponential { rate: a }, n.powf(1.0 - q)),
        Scaling::Critical { tau } => (LimitLaw::XTau { tau }, n.sqrt()),
        Scaling::NearSupercritical { a, q } => (LimitLaw::PointMass { c: a }, n.powf(q)),
        Scaling::Supercritical { s } => (LimitLaw::PointMass { c: 1.0 - s }, n),
    })
}

fn log_xtau_sf(tau: f64, x: f64) -> Result<f64> {
    Ok(log_erfc((x + tau) * FRAC_1_SQRT_2)? - log_erfc(tau * FRAC_1_SQRT_2)?)
}

/// `P(X_τ <= x) = (Φ(x+τ) - Φ(τ)) / (1 - Φ(τ))`, computed from the ratio of
/// complementary error functions so that large `τ` keeps full precision.
pub fn xtau_cdf(tau: f64, x: f64) -> Result<f64> {
    if tau.is_nan() || x.is_nan() {
        return domain("xtau_cdf of NaN");
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    Ok(-log_xtau_sf(tau, x)?.exp_m1())
}

/// `E e^{t X_τ} = e^{-τt + t²/2} erfc((τ-t)/√2) / erfc(τ/√2)`.
pub fn xtau_mgf(tau: f64, t: f64) -> Result<f64> {
    if !tau.is_finite() || !t.is_finite() {
        return domain(format!("xtau_mgf needs finite inputs, got tau={tau} t={t}"));
    }
    let ln = -tau * t + 0.5 * t * t + log_erfc((tau - t) * FRAC_1_SQRT_2)?
        - log_erfc(tau * FRAC_1_SQRT_2)?;
    Ok(ln.exp())
}

/// Inverse CDF of `X_τ` by safeguarded Newton on the log survival function,
/// which is concave; the bracket is kept and bisected when Newton leaves it.
fn xtau_quantile(tau: f64, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return domain(format!("quantile level must lie in [0, 1), got {u}"));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let target = (-u).ln_1p();
    let g = |x: f64| -> Result<f64> { Ok(log_xtau_sf(tau, x)? - target) };
    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x)?;
        if gx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = -normal_hazard(x + tau)?;
        let mut next = x - gx / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= QUANTILE_TOL * x.max(1.0) || hi - lo <= QUANTILE_TOL * hi.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence("X_tau quantile"))
}

/// `max |F_a - F_b|` over `grid`, also comparing left limits at every grid
/// point so that jumps of step functions are captured.
pub fn ks_distance<A, B>(cdf_a: A, cdf_b: B, grid: &[f64]) -> Result<f64>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[0] > w[1]) {
        return domain("KS grid must be finite and sorted");
    }
    let mut worst = 0.0f64;
    for &x in grid {
        let here = (cdf_a(x) - cdf_b(x)).abs();
        let left = x.next_down();
        let before = (cdf_a(left) - cdf_b(left)).abs();
        worst = worst.max(here).max(before);
    }
    Ok(worst)
}

/// Grid for comparing a step CDF with jumps at `jumps` against `law`: the
/// jumps plus [`KS_UNIFORM_POINTS`] equally spaced points on
/// `[0, q_{0.9999}]` of the law.
pub fn ks_grid(law: &LimitLaw, jumps: &[f64]) -> Vec<f64> {
    let upper = law.quantile(KS_UPPER_QUANTILE);
    let mut grid: Vec<f64> = (0..KS_UNIFORM_POINTS)
        .map(|i| upper * i as f64 / (KS_UNIFORM_POINTS - 1) as f64)
        .collect();
    grid.extend_from_slice(jumps);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// `(1/2) Σ |p_a - p_b|`, treating the shorter slice as zero-padded.
pub fn tv_distance_discrete(pmf_a: &[f64], pmf_b: &[f64]) -> f64 {
    let len = pmf_a.len().max(pmf_b.len());
    let mut sum = CompensatedSum::new();
    for i in 0..len {
        let a = pmf_a.get(i).copied().unwrap_or(0.0);
        let b = pmf_b.get(i).copied().unwrap_or(0.0);
        sum.add((a - b).abs());
    }
    (0.5 * sum.value()).clamp(0.0, 1.0)
}

/// Lévy distance between the law with CDF `cdf` (left limits `cdf_left`)
/// and the point mass at `c`, to 1e-13.
pub fn levy_to_point_mass<F, G>(cdf_left: F, cdf: G, c: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let feasible = |eps: f64| cdf_left(c - eps) <= eps && cdf(c + eps) >= 1.0 - eps;
    if feasible(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The exact law of `L / scale`, kept as its positive atoms.
#[derive(Debug, Clone)]
pub struct RescaledLength {
    scale: f64,
    steps: Vec<u64>,
    support: Vec<f64>,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl RescaledLength {
    pub fn new(model: &SawModel, scale: f64) -> Result<Self> {
        if scale <= 0.0 || !scale.is_finite() {
            return domain(format!("scale must be positive, got {scale}"));
        }
        let mut steps = Vec::new();
        let mut pmf = Vec::new();
        for (k, p) in length_pmf(model)?.iter().enumerate() {
            if p > 0.0 {
                steps.push(k as u64);
                pmf.push(p);
            }
        }
        let mut running = CompensatedSum::new();
        let mut cdf: Vec<f64> = pmf
            .iter()
            .map(|&p| {
                running.add(p);
                running.value()
            })
            .collect();
        let total = running.value();
        for c in &mut cdf {
            *c = (*c / total).min(1.0);
        }
        let support = steps.iter().map(|&k| k as f64 / scale).collect();
        Ok(Self {
            scale,
            steps,
            support,
            pmf,
            cdf,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Atom locations `N / scale`, increasing.
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// `(N, P(L = N))` for every positive atom.
    pub fn atoms(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.steps.iter().copied().zip(self.pmf.iter().copied())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.support.partition_point(|&v| v <= x) {
            0 => 0.0,
            i => self.cdf[i - 1],
        }
    }

    /// `P(L / scale < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self.support.partition_point(|&v| v < x) {
            0 => 0.0,
            i => self.cdf[i - 1],
        }
    }

    /// `P(|L / scale - c| > eps)`.
    pub fn mass_outside(&self, c: f64, eps: f64) -> f64 {
        let below = self.cdf_left(c - eps);
        let above = 1.0 - self.cdf(c + eps);
        (below + above).clamp(0.0, 1.0)
    }

    /// Lévy distance to the point mass at `c`: the least `ε` with
    /// `P(X < c - ε) <= ε` and `P(X <= c + ε) >= 1 - ε`.
    pub fn levy_to_point_mass(&self, c: f64) -> f64 {
        levy_to_point_mass(|x| self.cdf_left(x), |x| self.cdf(x), c)
    }

    /// `sup |F(x) - 1{x >= c}|` over `|x - c| >= eps`.
    pub fn distance_to_point_mass_off_jump(&self, c: f64, eps: f64) -> f64 {
        self.cdf(c - eps).max(1.0 - self.cdf(c + eps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    TotalVariation,
    Kolmogorov,
    Levy,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::TotalVariation => "tv",
            Metric::Kolmogorov => "ks",
            Metric::Levy => "levy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub law: LimitLaw,
    pub scale: f64,
    pub metric: Metric,
    pub distance: f64,
    /// `E[L] / scale` under the exact law.
    pub exact_mean: f64,
}

/// Distance between the exact law of `L / scale` and its limit.
///
/// Total variation is used for the geometric limit and Kolmogorov for the
/// continuous ones. For point masses the Lévy distance is used: the
/// Kolmogorov distance to a point mass does not tend to zero when the
/// approximating laws spread mass on both sides of the atom.
pub fn convergence_distance(model: &SawModel, scaling: Scaling) -> Result<Convergence> {
    let (law, scale) = law_for_model(model, scaling)?;
    let exact = RescaledLength::new(model, scale)?;
    let exact_mean = {
        let mut m = CompensatedSum::new();
        for (k, p) in exact.atoms() {
            m.add(k as f64 * p);
        }
        m.value() / scale
    };
    let (metric, distance) = match law {
        LimitLaw::ShiftedGeometric { p } => {
            let n = model.n() as usize;
            let exact_pmf = length_pmf(model)?.to_vec();
            let limit_pmf: Vec<f64> = (0..n).map(|k| law.pmf(k as f64).unwrap_or(0.0)).collect();
            // Limit mass beyond the last possible length.
            let tail = (n as f64 * (-p).ln_1p()).exp();
            let tv = (tv_distance_discrete(&exact_pmf, &limit_pmf) + 0.5 * tail).min(1.0);
            (Metric::TotalVariation, tv)
        }
        LimitLaw::PointMass { c } => (Metric::Levy, exact.levy_to_point_mass(c)),
        LimitLaw::Exponential { .. } | LimitLaw::XTau { .. } => {
            let grid = ks_grid(&law, exact.support());
            let ks = ks_distance(|x| exact.cdf(x), |x| law.cdf(x), &grid)?;
            (Metric::Kolmogorov, ks)
        }
    };
    Ok(Convergence {
        law,
        scale,
        metric,
        distance,
        exact_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::mean_length;
    use crate::oracle::integrate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

    fn normal_density(z: f64) -> f64 {
        (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    /// `∫_τ^∞ e^{t(z-τ)} φ(z) dz / ∫_τ^∞ φ(z) dz` by quadrature.
    fn conditioned_normal_mgf(tau: f64, t: f64) -> f64 {
        let hi = tau.max(t) + 40.0;
        let num = integrate(|z| (t * (z - tau)).exp() * normal_density(z), tau, hi, 400);
        let den = integrate(normal_density, tau, hi, 400);
        num / den
    }

    #[test]
    fn laws_for_the_five_scalings() {
        let n = 10_000u64;
        let s = Scaling::Subcritical { s: 2.0 };
        let (law, scale) = law_for_model(&s.model(n).unwrap(), s).unwrap();
        assert_eq!(law, LimitLaw::ShiftedGeometric { p: 0.5 });
        assert_eq!(scale, 1.0);

        let s = Scaling::Critical { tau: 0.0 };
        let (law, scale) = law_for_model(&s.model(n).unwrap(), s).unwrap();
        assert_eq!(law, LimitLaw::XTau { tau: 0.0 });
        assert_eq!(scale, 100.0);

        let s = Scaling::Supercritical { s: 0.5 };
        let (law, scale) = law_for_model(&s.model(n).unwrap(), s).unwrap();
        assert_eq!(law, LimitLaw::PointMass { c: 0.5 });
        assert_eq!(scale, 1e4);

        let s = Scaling::NearSubcritical { a: 2.0, q: 0.75 };
        let (law, scale) = law_for_model(&s.model(n).unwrap(), s).unwrap();
        assert_eq!(law, LimitLaw::Exponential { rate: 2.0 });
        assert!((scale - 10.0).abs() < 1e-12);

        let s = Scaling::NearSupercritical { a: 1.0, q: 0.75 };
        let (law, scale) = law_for_model(&s.model(n).unwrap(), s).unwrap();
        assert_eq!(law, LimitLaw::PointMass { c: 1.0 });
        assert!((scale - 1000.0).abs() < 1e-9);

        let m = SawModel::new(n, 1e-4).unwrap();
        assert!(law_for_model(&m, Scaling::Subcritical { s: 2.0 }).is_err());
        assert!(law_for_model(&m, Scaling::Subcritical { s: 0.5 }).is_err());
    }

    #[test]
    fn xtau_cdf_examples() {
        for tau in [-5.0, 0.0, 3.0, 40.0] {
            assert_eq!(xtau_cdf(tau, 0.0).unwrap(), 0.0);
            assert!((xtau_cdf(tau, 50.0).unwrap() - 1.0).abs() < 1e-12);
        }
        let want = integrate(|z| 2.0 * normal_density(z), 0.0, 1.0, 10);
        assert!((xtau_cdf(0.0, 1.0).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.682_689_492_137_086).abs() < 1e-14);
    }

    #[test]
    fn xtau_cdf_large_tau_is_exponential() {
        // Conditioned on Z > τ, τ(Z - τ) is asymptotically Exp(1).
        let tau = 1e4;
        let v = xtau_cdf(tau, 1.0 / tau).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-6);
    }

    #[test]
    fn mgf_examples() {
        assert_eq!(xtau_mgf(1.3, 0.0).unwrap(), 1.0);
        let h = 1e-5;
        let d = (xtau_mgf(0.0, h).unwrap() - xtau_mgf(0.0, -h).unwrap()) / (2.0 * h);
        assert!((d - SQRT_2_OVER_PI).abs() < 1e-6);
        let got = xtau_mgf(2.0, 1.0).unwrap();
        let want = conditioned_normal_mgf(2.0, 1.0);
        assert!(((got - want) / want).abs() < 1e-9);
    }

    #[test]
    fn mgf_matches_conditioned_normal() {
        for tau in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                let got = xtau_mgf(tau, t).unwrap();
                let want = conditioned_normal_mgf(tau, t);
                assert!(
                    ((got - want) / want).abs() < 1e-9,
                    "tau={tau} t={t}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn mgf_matches_on_the_wider_grid() {
        for tau in [-5.0, -2.5, 2.5, 5.0] {
            for t in [-3.0, -1.5, 1.5, 3.0] {
                let got = xtau_mgf(tau, t).unwrap();
                let want = conditioned_normal_mgf(tau, t);
                assert!(((got - want) / want).abs() < 1e-9, "tau={tau} t={t}");
            }
        }
    }

    #[test]
    fn xtau_mean_is_alpha() {
        for tau in [-3.0, 0.0, 3.0] {
            let law = LimitLaw::XTau { tau };
            let a = alpha_tau(tau).unwrap();
            assert!(((law.mean() - a) / a).abs() < 1e-10);
            // E[Z | Z > τ] - τ = φ(τ)/(1 - Φ(τ)) - τ
            let hazard = normal_hazard(tau).unwrap() - tau;
            assert!(((hazard - a) / a).abs() < 1e-10);
            // ∫ survival
            let q = integrate(|x| 1.0 - law.cdf(x), 0.0, 60.0, 600);
            assert!(((q - a) / a).abs() < 1e-10, "tau={tau}: {q} vs {a}");
        }
        assert!((LimitLaw::XTau { tau: 0.0 }.mean() - SQRT_2_OVER_PI).abs() < 1e-15);
    }

    #[test]
    fn simple_law_facts() {
        assert_eq!(LimitLaw::ShiftedGeometric { p: 0.5 }.mean(), 1.0);
        let pm = LimitLaw::PointMass { c: 0.5 };
        assert_eq!(pm.cdf(0.4999), 0.0);
        assert_eq!(pm.cdf(0.5), 1.0);
        assert_eq!(LimitLaw::Exponential { rate: 4.0 }.mean(), 0.25);
        let g = LimitLaw::ShiftedGeometric { p: 0.25 };
        assert!((g.cdf(0.0) - 0.25).abs() < 1e-15);
        assert!((g.cdf(1.999) - (0.25 + 0.1875)).abs() < 1e-15);
        assert!(LimitLaw::ShiftedGeometric { p: 1.0 }.validate().is_err());
        assert!(LimitLaw::PointMass { c: -1.0 }.validate().is_err());
    }

    #[test]
    fn cdfs_monotone_and_right_continuous() {
        let laws = [
            LimitLaw::ShiftedGeometric { p: 0.3 },
            LimitLaw::Exponential { rate: 1.5 },
            LimitLaw::XTau { tau: -2.0 },
            LimitLaw::XTau { tau: 8.0 },
            LimitLaw::PointMass { c: 1.0 },
        ];
        for law in laws {
            let mut prev = 0.0;
            for i in -10..2000 {
                let x = i as f64 * 0.005;
                let f = law.cdf(x);
                assert!((0.0..=1.0).contains(&f) && f >= prev, "{law:?} at {x}");
                prev = f;
            }
            assert_eq!(law.cdf(1.0), law.cdf(1.0));
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let laws = [
            LimitLaw::ShiftedGeometric { p: 0.5 },
            LimitLaw::Exponential { rate: 0.7 },
            LimitLaw::XTau { tau: -4.0 },
            LimitLaw::XTau { tau: 0.0 },
            LimitLaw::XTau { tau: 12.0 },
        ];
        for law in laws {
            for u in [0.0, 1e-9, 0.1, 0.5, 0.9, 0.999_999] {
                let x = law.quantile(u);
                assert!(law.cdf(x) >= u - 1e-12, "{law:?} u={u}");
                if !law.is_discrete() && u > 0.0 {
                    assert!((law.cdf(x) - u).abs() < 1e-10, "{law:?} u={u}");
                } else if x >= 1.0 {
                    assert!(law.cdf(x - 1.0) < u);
                }
            }
        }
    }

    fn empirical_ks(law: LimitLaw, seed: u64, count: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut xs: Vec<f64> = (0..count).map(|_| law.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let m = xs.len() as f64;
        let ecdf = |x: f64| xs.partition_point(|&v| v <= x) as f64 / m;
        let mut grid = xs.clone();
        grid.dedup();
        ks_distance(ecdf, |x| law.cdf(x), &grid).unwrap()
    }

    #[test]
    fn samplers_match_their_laws() {
        let laws = [
            LimitLaw::ShiftedGeometric { p: 0.5 },
            LimitLaw::Exponential { rate: 1.0 },
            LimitLaw::XTau { tau: 0.0 },
            LimitLaw::XTau { tau: -2.0 },
            LimitLaw::PointMass { c: 0.5 },
        ];
        for (i, law) in laws.into_iter().enumerate() {
            let ks = empirical_ks(law, 17 + i as u64, 1_000_000);
            assert!(ks < 0.002, "{law:?}: {ks}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let law = LimitLaw::XTau { tau: 1.0 };
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            (0..100)
                .map(|_| law.sample(&mut rng).to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn distance_basics() {
        assert!(matches!(
            ks_distance(|x| x, |x| x, &[]),
            Err(Error::EmptyGrid)
        ));
        assert!(ks_distance(|x| x, |x| x, &[1.0, 0.0]).is_err());
        let law = LimitLaw::XTau { tau: 0.5 };
        let grid: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        assert_eq!(
            ks_distance(|x| law.cdf(x), |x| law.cdf(x), &grid).unwrap(),
            0.0
        );
        // A jump at 1 seen from its left limit.
        let step = |x: f64| if x < 1.0 { 0.0 } else { 1.0 };
        assert_eq!(ks_distance(step, |_| 1.0, &[1.0]).unwrap(), 1.0);

        let g = LimitLaw::ShiftedGeometric { p: 0.5 };
        let full: Vec<f64> = (0..200).map(|k| g.pmf(k as f64).unwrap()).collect();
        assert!(tv_distance_discrete(&full, &full[..61]) < 1e-15);
        assert_eq!(tv_distance_discrete(&[1.0], &[0.0, 1.0]), 1.0);
    }

    #[test]
    fn subcritical_exact_law_is_near_geometric() {
        let s = Scaling::Subcritical { s: 2.0 };
        let c = convergence_distance(&s.model(10_000).unwrap(), s).unwrap();
        assert_eq!(c.metric, Metric::TotalVariation);
        assert!(c.distance < 0.01, "{}", c.distance);
    }

    #[test]
    fn rescaled_law_accessors() {
        let m = SawModel::new(4, 0.5).unwrap();
        let r = RescaledLength::new(&m, 2.0).unwrap();
        assert_eq!(r.support(), &[0.0, 0.5, 1.0, 1.5]);
        assert!((r.cdf(0.5) - 2.5 / 4.75).abs() < 1e-15);
        assert!((r.cdf_left(0.5) - 1.0 / 4.75).abs() < 1e-15);
        assert_eq!(r.cdf(1.5), 1.0);
        assert!((r.mass_outside(0.75, 0.25) - 1.75 / 4.75).abs() < 1e-15);
        let mean: f64 = r.atoms().map(|(k, p)| k as f64 * p).sum();
        assert!((mean - mean_length(&m).unwrap()).abs() < 1e-14);
        assert!(RescaledLength::new(&m, 0.0).is_err());
    }

    #[test]
    fn levy_distance_to_point_mass() {
        // Two atoms at 0 and 1 with mass 1/2: ε = 1/2 works for c = 1/2.
        let m = SawModel::new(2, 1.0).unwrap();
        let r = RescaledLength::new(&m, 1.0).unwrap();
        assert!((r.levy_to_point_mass(0.5) - 0.5).abs() < 1e-12);
        assert_eq!(r.levy_to_point_mass(5.0), 1.0);
        let m = SawModel::new(3, 1e-9).unwrap();
        let r = RescaledLength::new(&m, 1.0).unwrap();
        assert!(r.levy_to_point_mass(0.0) < 1e-8);
    }

    #[test]
    fn distances_shrink_along_n() {
        let scalings = [
            Scaling::Subcritical { s: 2.0 },
            Scaling::NearSubcritical { a: 1.0, q: 0.75 },
            Scaling::Critical { tau: 0.0 },
            Scaling::NearSupercritical { a: 1.0, q: 0.75 },
            Scaling::Supercritical { s: 0.5 },
        ];
        for scaling in scalings {
            let mut last = f64::INFINITY;
            for n in [100u64, 1000, 10_000, 100_000] {
                let d = convergence_distance(&scaling.model(n).unwrap(), scaling)
                    .unwrap()
                    .distance;
                assert!(d < last, "{scaling} n={n}: {d} after {last}");
                last = d;
            }
        }
    }

    #[test]
    fn supercritical_mass_concentrates_at_the_mean() {
        let mut last = f64::INFINITY;
        for n in [1000u64, 10_000, 100_000] {
            let nf = n as f64;
            let m = SawModel::from_inverse_weight(n, nf - nf.powf(0.6)).unwrap();
            let ell = mean_length(&m).unwrap();
            let r = RescaledLength::new(&m, ell).unwrap();
            let d = r.distance_to_point_mass_off_jump(1.0, 0.05);
            assert!(d < last, "n={n}: {d} after {last}");
            last = d;
        }
    }
}
