//! Independent ground truth for tests: brute-force walk enumeration, exact
//! rational susceptibility, the finite-sum incomplete gamma function and a
//! Gauss–Legendre quadrature.
//!
//! Nothing here is used by the production paths. Everything is slow on
//! purpose and shares nothing with `specfun` or `exact` beyond compensated
//! summation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{domain, Error, Result};
use crate::numeric::CompensatedSum;

/// Largest `n` accepted by [`enumerate_counts`]; `9! ≈ 3.6e5` leaves.
pub const ENUMERATION_MAX_N: u64 = 10;
/// Largest `n` accepted by [`chi_reference`] and the finite-sum gamma.
pub const REFERENCE_MAX_N: u64 = 10_000;

/// Counts `N`-step self-avoiding walks on `K_n` from vertex 0, for
/// `N = 0..n-1`, by explicit depth-first enumeration.
pub fn enumerate_counts(n: u64) -> Result<Vec<u64>> {
    if n < 2 {
        return domain(format!("enumeration needs n >= 2, got {n}"));
    }
    if n > ENUMERATION_MAX_N {
        return Err(Error::Size(format!(
            "enumeration is limited to n <= {ENUMERATION_MAX_N}, got {n}"
        )));
    }
    let mut counts = vec![0u64; n as usize];
    // K_n: every other unvisited vertex is a neighbour.
    fn extend(n: u32, current: u32, visited: u32, depth: usize, counts: &mut [u64]) {
        counts[depth] += 1;
        for next in 0..n {
            let bit = 1u32 << next;
            if next != current && visited & bit == 0 {
                extend(n, next, visited | bit, depth + 1, counts);
            }
        }
    }
    extend(n as u32, 0, 1, 0, &mut counts);
    Ok(counts)
}

/// `(n-1)(n-2)…(n-N)` in exact integer arithmetic.
pub fn falling_factorial_count(n: u64, steps: u64) -> BigInt {
    (1..=steps).fold(BigInt::one(), |acc, j| acc * BigInt::from(n - j))
}

/// The exact rational `p / q`.
pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// The exact dyadic rational equal to a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("not finite: {x}")))
}

/// Susceptibility `Σ_{N<n} c_N z^N` in exact rational arithmetic.
pub fn chi_reference(n: u64, z: &BigRational) -> Result<BigRational> {
    if n < 2 {
        return domain(format!("chi_reference needs n >= 2, got {n}"));
    }
    if n > REFERENCE_MAX_N {
        return Err(Error::Size(format!(
            "chi_reference is limited to n <= {REFERENCE_MAX_N}, got {n}"
        )));
    }
    if !z.is_positive() {
        return domain("chi_reference needs z > 0");
    }
    // Horner S ← 1 + (n-j) z S with a common denominator q^k.
    let p = z.numer().clone();
    let q = z.denom().clone();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in (1..n).rev() {
        num = &den * &q + &p * BigInt::from(n - j) * &num;
        den *= &q;
    }
    Ok(BigRational::new(num, den))
}

/// Natural logarithm of a positive rational, correct to about one ulp of
/// the result even when numerator and denominator have 10⁵ bits.
pub fn ln_rational(x: &BigRational) -> Result<f64> {
    if !x.is_positive() {
        return domain("ln of a non-positive rational");
    }
    let num_bits = x.numer().bits() as i64;
    let den_bits = x.denom().bits() as i64;
    // Scale so the integer quotient has ~64 significant bits.
    let shift = 64 - (num_bits - den_bits);
    let scaled = if shift >= 0 {
        (x.numer() << shift as usize).div_floor(x.denom())
    } else {
        x.numer().div_floor(&(x.denom() << (-shift) as usize))
    };
    // scaled = m · 2^e with m in [1, 2); the power of two is exact.
    let e = scaled.bits() as i64 - 1;
    let m = scaled.to_f64().expect("quotient fits in f64") / 2f64.powi(e as i32);
    Ok(m.ln() + (e - shift) as f64 * std::f64::consts::LN_2)
}

/// `ln(m!)` as a compensated sum of `ln j`.
pub fn ln_factorial_by_sum(m: u64) -> f64 {
    let mut s = CompensatedSum::new();
    for j in 2..=m {
        s.add((j as f64).ln());
    }
    s.value()
}

/// `ln Γ(n, x)` from `(n-1)! e^{-x} Σ_{k<n} x^k / k!`.
///
/// Terms are generated outward from the largest one by their ratios and
/// accumulated with compensation; all terms are positive.
pub fn log_upper_gamma_finite_sum(n: u64, x: f64) -> Result<f64> {
    if n == 0 || x < 0.0 || !x.is_finite() {
        return domain(format!(
            "finite-sum gamma needs n >= 1 and x >= 0, got n={n} x={x}"
        ));
    }
    if n > REFERENCE_MAX_N {
        return Err(Error::Size(format!(
            "finite-sum gamma is limited to n <= {REFERENCE_MAX_N}"
        )));
    }
    let ln_fact_n1 = ln_factorial_by_sum(n - 1);
    if x == 0.0 {
        return Ok(ln_fact_n1);
    }
    let peak = (x.floor() as u64).min(n - 1);
    let ln_peak_term = peak as f64 * x.ln() - ln_factorial_by_sum(peak);
    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    let mut r = 1.0;
    for k in (1..=peak).rev() {
        r *= k as f64 / x;
        if r < 1e-20 {
            break;
        }
        sum.add(r);
    }
    let mut r = 1.0;
    for k in peak + 1..n {
        r *= x / k as f64;
        if r < 1e-20 {
            break;
        }
        sum.add(r);
    }
    Ok(ln_fact_n1 - x + ln_peak_term + sum.value().ln())
}

/// Nodes and weights of `order`-point Gauss–Legendre on `[-1, 1]`, by
/// Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre quadrature of `f` on `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = CompensatedSum::new();
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in nodes.iter().zip(&weights) {
            total.add(0.5 * h * w * f(mid + 0.5 * h * x));
        }
    }
    total.value()
}
