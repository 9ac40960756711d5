//! Discrete power-law and exponential fits for degree data.
//!
//! The power-law exponent is the exact discrete maximum-likelihood estimate,
//! normalized by the Hurwitz zeta function. Goodness of fit is the
//! Kolmogorov-Smirnov distance between the empirical and fitted CDFs, with a
//! p-value from a semiparametric bootstrap: the fraction of synthetic data
//! sets drawn from the fitted model whose own refit distance is at least
//! the observed one.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::MetricError;
use crate::rng;

/// Minimum number of tail observations for a fit.
pub const MIN_TAIL: usize = 10;
const GAMMA_MAX: f64 = 50.0;
const TABLE_MAX: usize = 1 << 16;

// B_2j / (2j)! for j = 1..=8
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// Hurwitz zeta `sum_{k>=0} (q + k)^-s` for `s > 1`, `q > 0`, by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    let n = (10.0 - q.floor()).max(0.0) as usize;
    let mut sum = 0.0;
    for k in 0..n {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + n as f64;
    let a_pow = a.powf(-s);
    sum += a * a_pow / (s - 1.0) + 0.5 * a_pow;
    // rising factorial s (s+1) ... (s+2j-2) times a^(-s-2j+1)
    let mut rising = s;
    let mut term_pow = a_pow / a;
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let m = (2 * j) as f64;
            rising *= (s + m - 1.0) * (s + m);
            term_pow /= a * a;
        }
        sum += coeff * rising * term_pow;
    }
    sum
}

/// `p(k) = k^-gamma / zeta(gamma, xmin)` for integers `k >= xmin >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretePowerLaw {
    pub gamma: f64,
    pub xmin: u64,
    norm: f64,
}

impl DiscretePowerLaw {
    pub fn new(gamma: f64, xmin: u64) -> Self {
        assert!(gamma > 1.0 && xmin >= 1, "invalid power law ({gamma}, {xmin})");
        Self {
            gamma,
            xmin,
            norm: hurwitz_zeta(gamma, xmin as f64),
        }
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k < self.xmin {
            0.0
        } else {
            (k as f64).powf(-self.gamma) / self.norm
        }
    }

    /// `P(K >= k)`.
    pub fn ccdf(&self, k: u64) -> f64 {
        if k <= self.xmin {
            1.0
        } else {
            hurwitz_zeta(self.gamma, k as f64) / self.norm
        }
    }

    /// `P(K <= k)`.
    pub fn cdf(&self, k: u64) -> f64 {
        1.0 - self.ccdf(k + 1)
    }

    pub fn sampler(&self) -> PowerLawSampler {
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut k = self.xmin;
        while cdf.len() < TABLE_MAX && acc < 1.0 - 1e-12 {
            acc += self.pmf(k);
            cdf.push(acc);
            k += 1;
        }
        PowerLawSampler { law: *self, cdf }
    }
}

/// Inverse-CDF sampler: a table for the bulk, zeta bisection for the far tail.
#[derive(Debug, Clone)]
pub struct PowerLawSampler {
    law: DiscretePowerLaw,
    cdf: Vec<f64>,
}

impl PowerLawSampler {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        let i = self.cdf.partition_point(|&c| c < u);
        if i < self.cdf.len() {
            return self.law.xmin + i as u64;
        }
        // smallest k with P(K >= k + 1) <= 1 - u
        let tail = 1.0 - u;
        let mut lo = self.law.xmin + self.cdf.len() as u64 - 1;
        let mut hi = lo.max(1) * 2;
        while self.law.ccdf(hi + 1) > tail {
            lo = hi;
            hi = hi.saturating_mul(2);
            if hi == u64::MAX {
                return hi;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.law.ccdf(mid + 1) > tail {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Lower cutoff of the fitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Xmin {
    Fixed(u64),
    /// Choose the cutoff minimizing the KS distance.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub gamma: f64,
    /// Closed-form approximation `1 + n / sum ln(k / (xmin - 1/2))`, for reference.
    pub gamma_approx: f64,
    pub xmin: u64,
    pub n_tail: usize,
    pub ks_statistic: f64,
    pub ks_p_value: Option<f64>,
    pub bootstrap_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub rate: f64,
    pub xmin: u64,
    pub n_tail: usize,
    pub ks_statistic: f64,
    pub ks_p_value: Option<f64>,
    pub bootstrap_n: usize,
}

/// Sorted tail `>= xmin`, validated for fitting.
fn tail(data: &[u64], xmin: u64) -> Result<Vec<u64>, MetricError> {
    let mut t: Vec<u64> = data.iter().copied().filter(|&k| k >= xmin).collect();
    if t.len() < MIN_TAIL {
        return Err(MetricError::InsufficientTail {
            have: t.len(),
            need: MIN_TAIL,
        });
    }
    t.sort_unstable();
    if t[0] == t[t.len() - 1] {
        return Err(MetricError::DegenerateFit);
    }
    Ok(t)
}

/// Maximum distance between the empirical CDF of sorted `tail` and `cdf`.
fn ks_distance(tail: &[u64], xmin: u64, cdf: impl Fn(u64) -> f64) -> f64 {
    let n = tail.len() as f64;
    let mut d: f64 = 0.0;
    let mut below = 0usize;
    let mut i = 0;
    while i < tail.len() {
        let v = tail[i];
        let mut j = i;
        while j < tail.len() && tail[j] == v {
            j += 1;
        }
        if v > xmin {
            d = d.max((below as f64 / n - cdf(v - 1)).abs());
        }
        below = j;
        d = d.max((below as f64 / n - cdf(v)).abs());
        i = j;
    }
    d
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

struct TailFit {
    gamma: f64,
    gamma_approx: f64,
    ks: f64,
}

fn fit_tail(tail: &[u64], xmin: u64) -> TailFit {
    let n = tail.len() as f64;
    let log_sum: f64 = tail.iter().map(|&k| (k as f64).ln()).sum();
    let nll = |g: f64| g * log_sum + n * hurwitz_zeta(g, xmin as f64).ln();
    let gamma = golden_min(nll, 1.0 + 1e-6, GAMMA_MAX);
    let shifted = xmin as f64 - 0.5;
    let gamma_approx = 1.0 + n / tail.iter().map(|&k| (k as f64 / shifted).ln()).sum::<f64>();
    let law = DiscretePowerLaw::new(gamma, xmin);
    TailFit {
        gamma,
        gamma_approx,
        ks: ks_distance(tail, xmin, |k| law.cdf(k)),
    }
}

/// Best `(xmin, tail, fit)` over candidate cutoffs, ties to the smaller cutoff.
fn select_xmin(data: &[u64]) -> Result<(u64, Vec<u64>, TailFit), MetricError> {
    let mut candidates: Vec<u64> = data.iter().copied().filter(|&k| k >= 1).collect();
    candidates.sort_unstable();
    candidates.dedup();
    let mut best: Option<(u64, Vec<u64>, TailFit)> = None;
    for xmin in candidates {
        let Ok(t) = tail(data, xmin) else { continue };
        let fit = fit_tail(&t, xmin);
        if best.as_ref().is_none_or(|b| fit.ks < b.2.ks) {
            best = Some((xmin, t, fit));
        }
    }
    // With no valid candidate, report why the widest tail fails.
    best.ok_or_else(|| tail(data, 1).err().unwrap_or(MetricError::DegenerateFit))
}

/// Fit a discrete power law to `data` (zeros and values below `xmin` ignored).
pub fn fit_power_law(data: &[u64], xmin: Xmin, bootstrap_n: usize, seed: u64) -> Result<PowerLawFit, MetricError> {
    let (xmin_value, t, fit) = match xmin {
        Xmin::Fixed(x) => {
            let x = x.max(1);
            let t = tail(data, x)?;
            let fit = fit_tail(&t, x);
            (x, t, fit)
        }
        Xmin::Auto => select_xmin(data)?,
    };
    let ks_p_value = (bootstrap_n > 0).then(|| {
        let law = DiscretePowerLaw::new(fit.gamma, xmin_value);
        let sampler = law.sampler();
        let body: Vec<u64> = data.iter().copied().filter(|&k| k < xmin_value).collect();
        let n_total = t.len() + body.len();
        let exceed: usize = (0..bootstrap_n)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng::stream(seed, "powerlaw/bootstrap", r as u64);
                let ks = match xmin {
                    Xmin::Fixed(_) => {
                        let mut synth: Vec<u64> = (0..t.len()).map(|_| sampler.sample(&mut rng)).collect();
                        synth.sort_unstable();
                        if synth[0] == synth[synth.len() - 1] {
                            return 0;
                        }
                        fit_tail(&synth, xmin_value).ks
                    }
                    Xmin::Auto => {
                        let p_tail = t.len() as f64 / n_total as f64;
                        let synth: Vec<u64> = (0..n_total)
                            .map(|_| {
                                if body.is_empty() || rng.gen_bool(p_tail) {
                                    sampler.sample(&mut rng)
                                } else {
                                    body[rng.gen_range(0..body.len())]
                                }
                            })
                            .collect();
                        match select_xmin(&synth) {
                            Ok((_, _, f)) => f.ks,
                            Err(_) => return 0,
                        }
                    }
                };
                usize::from(ks >= fit.ks)
            })
            .sum();
        exceed as f64 / bootstrap_n as f64
    });
    Ok(PowerLawFit {
        gamma: fit.gamma,
        gamma_approx: fit.gamma_approx,
        xmin: xmin_value,
        n_tail: t.len(),
        ks_statistic: fit.ks,
        ks_p_value,
        bootstrap_n,
    })
}

fn exponential_tail_fit(tail: &[u64], xmin: u64) -> (f64, f64) {
    let mean = tail.iter().map(|&k| k as f64).sum::<f64>() / tail.len() as f64;
    let rate = 1.0 / (mean - xmin as f64);
    let ks = ks_distance(tail, xmin, |k| 1.0 - (-rate * ((k + 1 - xmin) as f64)).exp());
    (rate, ks)
}

/// Shifted exponential tail `P(K >= k) = exp(-rate (k - xmin))`, `rate = 1 / (mean - xmin)`.
pub fn fit_exponential(data: &[u64], xmin: u64, bootstrap_n: usize, seed: u64) -> Result<ExponentialFit, MetricError> {
    let xmin = xmin.max(1);
    let t = tail(data, xmin)?;
    let (rate, ks) = exponential_tail_fit(&t, xmin);
    let ks_p_value = (bootstrap_n > 0).then(|| {
        let exceed: usize = (0..bootstrap_n)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng::stream(seed, "exponential/bootstrap", r as u64);
                let mut synth: Vec<u64> = (0..t.len())
                    .map(|_| {
                        let e = -(1.0 - rng.gen::<f64>()).ln() / rate;
                        xmin + e.floor() as u64
                    })
                    .collect();
                synth.sort_unstable();
                if synth[0] == synth[synth.len() - 1] {
                    return 0;
                }
                usize::from(exponential_tail_fit(&synth, xmin).1 >= ks)
            })
            .sum();
        exceed as f64 / bootstrap_n as f64
    });
    Ok(ExponentialFit {
        rate,
        xmin,
        n_tail: t.len(),
        ks_statistic: ks,
        ks_p_value,
        bootstrap_n,
    })
}
