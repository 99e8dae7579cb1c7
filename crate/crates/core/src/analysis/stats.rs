//! First-success hash cycle (FSHC) statistics and a geometric goodness-of-fit test.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Geometric law of the first successful hash cycle among `M` equal miners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FshcStats {
    pub p: f64,
    pub miners: u64,
    /// Probability that every miner fails in one cycle, `(1 - p)^M`.
    pub p_fail_all: f64,
    pub mean: f64,
    pub variance: f64,
    /// `ln(E[X_M] - 1)`. Stays strictly monotone in `M` long after `mean`
    /// has rounded to exactly 1.
    pub ln_mean_excess: f64,
}

impl FshcStats {
    pub fn new(p: f64, miners: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside (0, 1]")));
        }
        if p == 0.0 {
            return Err(Error::UndefinedMean);
        }
        if miners == 0 {
            return Err(Error::Domain("miner count must be positive".into()));
        }
        // log-domain keeps 1 - (1-p)^M accurate for tiny p and huge M
        let log_fail = miners as f64 * (-p).ln_1p();
        let p_fail_all = log_fail.exp();
        let success = -log_fail.exp_m1();
        let excess = p_fail_all / success;
        Ok(FshcStats {
            p,
            miners,
            p_fail_all,
            mean: 1.0 + excess,
            variance: excess / success,
            ln_mean_excess: log_fail - success.ln(),
        })
    }

    /// Per-round success probability `1 - (1 - p)^M`.
    pub fn round_success(&self) -> f64 {
        1.0 / self.mean
    }

    /// `Pr{X_M = l} = p_fa^(l-1) (1 - p_fa)`.
    pub fn pmf(&self, l: u64) -> f64 {
        if l == 0 {
            return 0.0;
        }
        self.p_fail_all.powf((l - 1) as f64) * self.round_success()
    }
}

pub fn fshc_stats(p: f64, miners: u64) -> Result<FshcStats> {
    FshcStats::new(p, miners)
}

pub fn sample_mean_variance(samples: &[u64]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().map(|&x| x as f64).sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// One pooled bin `[lo, hi]` (`hi = None` for the open tail).
#[derive(Debug, Clone, PartialEq)]
pub struct GofBin {
    pub lo: u64,
    pub hi: Option<u64>,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Geometric rate fitted as `1 / sample mean`.
    pub rate: f64,
    pub bins: Vec<GofBin>,
}

pub const MIN_GOF_SAMPLES: usize = 100;
const MIN_EXPECTED: f64 = 5.0;

/// Chi-square test of `samples` against a geometric law on `{1, 2, ...}` with
/// rate `1 / mean`. Bins are merged left to right until each expects at least
/// five counts and the remaining tail is folded into the last bin. One degree
/// of freedom is spent on the fitted rate.
pub fn geometric_gof(samples: &[u64]) -> Result<GofResult> {
    if samples.len() < MIN_GOF_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_GOF_SAMPLES,
            actual: samples.len(),
        });
    }
    if samples.contains(&0) {
        return Err(Error::Domain("first-success samples must be >= 1".into()));
    }
    let total = samples.len() as f64;
    let (mean, _) = sample_mean_variance(samples);
    let rate = (1.0 / mean).min(1.0);
    let fail = 1.0 - rate;

    let mut hist = BTreeMap::new();
    for &s in samples {
        *hist.entry(s).or_insert(0u64) += 1;
    }
    let observed_at = |l: u64| hist.get(&l).copied().unwrap_or(0);
    let observed_above = |l: u64| hist.range(l + 1..).map(|(_, &c)| c).sum::<u64>();

    let mut bins: Vec<GofBin> = Vec::new();
    let mut lo = 1u64;
    let mut exp_acc = 0.0;
    let mut obs_acc = 0u64;
    let mut l = 1u64;
    loop {
        exp_acc += total * rate * fail.powf((l - 1) as f64);
        obs_acc += observed_at(l);
        let tail = total * fail.powf(l as f64);
        if tail < MIN_EXPECTED {
            bins.push(GofBin {
                lo,
                hi: None,
                observed: obs_acc + observed_above(l),
                expected: exp_acc + tail,
            });
            break;
        }
        if exp_acc >= MIN_EXPECTED {
            bins.push(GofBin {
                lo,
                hi: Some(l),
                observed: obs_acc,
                expected: exp_acc,
            });
            lo = l + 1;
            exp_acc = 0.0;
            obs_acc = 0;
        }
        l += 1;
    }
    if bins.len() > 1 && bins.last().unwrap().expected < MIN_EXPECTED {
        let last = bins.pop().unwrap();
        let prev = bins.last_mut().unwrap();
        prev.hi = None;
        prev.observed += last.observed;
        prev.expected += last.expected;
    }

    let statistic: f64 = bins
        .iter()
        .map(|b| (b.observed as f64 - b.expected).powi(2) / b.expected)
        .sum();
    let dof = bins.len().saturating_sub(2);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    };
    Ok(GofResult {
        statistic,
        degrees_of_freedom: dof,
        p_value,
        rate,
        bins,
    })
}
