//! Exact sampling of the walk length and Monte Carlo summaries.
//!
//! Every random draw comes from a [`CounterRng`] addressed by
//! `(seed, stream, counter)`. Parallel summaries give each fixed-size chunk
//! of samples its own stream and merge chunk statistics in chunk order. The
//! result is therefore the same whatever the number of worker threads.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::exact::{length_pmf, mean_length, variance_length, LengthPmf, SawModel};
use crate::numeric::CompensatedSum;

/// Samples per independent stream in [`monte_carlo_summary`].
pub const CHUNK_SIZE: u64 = 4096;
/// Largest `n` for which a CDF table is built automatically.
pub const TABLE_MAX_N: u64 = 10_000_000;
/// Fewest samples for which a CDF table is built automatically.
pub const TABLE_MIN_SAMPLES: u64 = 33;

/// ChaCha8 keyed by `seed`, on stream `stream`, positioned at 32-bit word
/// `counter`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self::at(seed, stream, 0)
    }

    pub fn at(seed: u64, stream: u64, counter: u128) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        inner.set_word_pos(counter);
        Self { inner }
    }

    pub fn stream(&self) -> u64 {
        self.inner.get_stream()
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.inner.get_word_pos()
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Walk the PMF from `N = 0` for every draw; no storage.
    LinearScan,
    /// Binary search in a stored cumulative table.
    CdfTable,
}

impl Strategy {
    pub fn auto(n: u64, num_samples: u64) -> Self {
        if num_samples >= TABLE_MIN_SAMPLES && n <= TABLE_MAX_N {
            Strategy::CdfTable
        } else {
            Strategy::LinearScan
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::LinearScan => "linear-scan",
            Strategy::CdfTable => "cdf-table",
        }
    }
}

/// Inverse-CDF sampler for `L`.
///
/// A uniform `u` maps to the smallest `N` whose cumulative weight reaches
/// `u · total`. A tie at a boundary therefore goes to the lower index. Both
/// strategies accumulate the same weights in the same order, so a given
/// `u` gives the same `N` under either strategy.
#[derive(Debug, Clone)]
pub struct LengthSampler {
    pmf: LengthPmf,
    strategy: Strategy,
    table: Vec<f64>,
    total: f64,
    last_positive: u64,
}

impl LengthSampler {
    pub fn new(model: &SawModel, strategy: Strategy) -> Result<Self> {
        let pmf = length_pmf(model)?;
        let mut acc = CompensatedSum::new();
        let mut table = Vec::new();
        let mut last_positive = 0;
        for (k, p) in pmf.iter().enumerate() {
            acc.add(p);
            if p > 0.0 {
                last_positive = k as u64;
            }
            if strategy == Strategy::CdfTable {
                table.push(acc.value());
            }
        }
        Ok(Self {
            pmf,
            strategy,
            table,
            total: acc.value(),
            last_positive,
        })
    }

    pub fn model(&self) -> &SawModel {
        self.pmf.model()
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// The length selected by the uniform variate `u ∈ [0, 1)`.
    pub fn length_for_uniform(&self, u: f64) -> u64 {
        let target = u * self.total;
        let found = match self.strategy {
            Strategy::CdfTable => {
                let i = self.table.partition_point(|&c| c < target);
                (i < self.table.len()).then_some(i as u64)
            }
            Strategy::LinearScan => {
                let mut acc = CompensatedSum::new();
                self.pmf
                    .iter()
                    .position(|p| {
                        acc.add(p);
                        target <= acc.value()
                    })
                    .map(|i| i as u64)
            }
        };
        found.unwrap_or(self.last_positive)
    }

    /// One draw of `L`; consumes exactly one `f64` from `rng`.
    pub fn sample_length<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        self.length_for_uniform(u)
    }
}

/// Running count, mean and centered second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }
}

/// Empirical distribution of sampled lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    lengths: Vec<u64>,
    cumulative: Vec<u64>,
    total: u64,
}

impl EmpiricalCdf {
    fn from_histogram(hist: BTreeMap<u64, u64>) -> Self {
        let mut running = 0;
        let mut lengths = Vec::with_capacity(hist.len());
        let mut cumulative = Vec::with_capacity(hist.len());
        for (k, c) in hist {
            running += c;
            lengths.push(k);
            cumulative.push(running);
        }
        Self {
            lengths,
            cumulative,
            total: running,
        }
    }

    /// Fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.lengths.partition_point(|&k| (k as f64) <= x) {
            0 => 0.0,
            i => self.cumulative[i - 1] as f64 / self.total as f64,
        }
    }

    /// Sample count of each length `0..n`.
    pub fn counts(&self, n: u64) -> Vec<u64> {
        let mut out = vec![0; n as usize];
        let mut prev = 0;
        for (&k, &c) in self.lengths.iter().zip(&self.cumulative) {
            out[k as usize] = c - prev;
            prev = c;
        }
        out
    }

    /// Distinct sampled lengths, increasing.
    pub fn support(&self) -> &[u64] {
        &self.lengths
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub num_samples: u64,
    pub seed: u64,
    pub strategy: Strategy,
    pub mean: f64,
    /// Population variance (divisor `num_samples`).
    pub variance: f64,
    pub ecdf: EmpiricalCdf,
    pub exact_mean: f64,
    pub exact_variance: f64,
}

impl MonteCarloSummary {
    pub fn standard_error(&self) -> f64 {
        (self.exact_variance / self.num_samples as f64).sqrt()
    }
}

/// Draws `num_samples` lengths and summarizes them next to the exact mean
/// and variance. Chunk `i` uses stream `i` of `seed`.
pub fn monte_carlo_summary(
    model: &SawModel,
    num_samples: u64,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if num_samples == 0 {
        return domain("monte_carlo_summary needs at least one sample");
    }
    let strategy = Strategy::auto(model.n(), num_samples);
    let sampler = LengthSampler::new(model, strategy)?;
    let chunks = num_samples.div_ceil(CHUNK_SIZE);
    let parts: Vec<(Moments, BTreeMap<u64, u64>)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = CounterRng::new(seed, chunk);
            let len = CHUNK_SIZE.min(num_samples - chunk * CHUNK_SIZE);
            let mut moments = Moments::default();
            let mut hist = BTreeMap::new();
            for _ in 0..len {
                let k = sampler.sample_length(&mut rng);
                moments.push(k as f64);
                *hist.entry(k).or_insert(0) += 1;
            }
            (moments, hist)
        })
        .collect();
    let mut moments = Moments::default();
    let mut hist = BTreeMap::new();
    for (m, h) in parts {
        moments = moments.merge(m);
        for (k, c) in h {
            *hist.entry(k).or_insert(0) += c;
        }
    }
    Ok(MonteCarloSummary {
        num_samples,
        seed,
        strategy,
        mean: moments.mean,
        variance: moments.m2 / moments.count as f64,
        ecdf: EmpiricalCdf::from_histogram(hist),
        exact_mean: mean_length(model)?,
        exact_variance: variance_length(model)?,
    })
}

/// Pearson statistic `Σ (O - E)² / E` over cells with positive expectation.
pub fn chi_squared_statistic(counts: &[u64], probabilities: &[f64]) -> Result<f64> {
    if counts.len() != probabilities.len() {
        return domain("counts and probabilities differ in length");
    }
    let total: u64 = counts.iter().sum();
    let mut stat = CompensatedSum::new();
    for (&o, &p) in counts.iter().zip(probabilities) {
        let e = p * total as f64;
        if e > 0.0 {
            let d = o as f64 - e;
            stat.add(d * d / e);
        } else if o > 0 {
            return domain("observed count in a cell of zero probability");
        }
    }
    Ok(stat.value())
}
