//! Maximum-likelihood fits of the heavy-tailed families used for popularity
//! and cascade-property distributions, with Kolmogorov-Smirnov goodness of
//! fit.
//!
//! Lognormal and Weibull fit the full sample; the power law fits the tail
//! above an `xmin` chosen by KS minimization over candidate sample values
//! (capped at the 90th percentile). Integer-valued samples get the standard
//! 0.5 continuity offset in the power-law scan.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

/// Minimum tail size below which a power-law fit is flagged low-confidence.
const MIN_TAIL: usize = 10;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("samples must be positive and finite (found {value})")]
    NonPositiveSample { value: f64 },
    #[error("weibull shape estimation did not converge (last iterate {last_shape})")]
    NoConvergence { last_shape: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitFamily {
    Lognormal,
    Weibull,
    Powerlaw,
}

impl fmt::Display for FitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FitFamily::Lognormal => "lognormal",
            FitFamily::Weibull => "weibull",
            FitFamily::Powerlaw => "powerlaw",
        };
        f.write_str(name)
    }
}

impl FromStr for FitFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lognormal" => Ok(FitFamily::Lognormal),
            "weibull" => Ok(FitFamily::Weibull),
            "powerlaw" => Ok(FitFamily::Powerlaw),
            other => Err(format!(
                "unknown family \"{other}\" (expected lognormal, weibull, or powerlaw)"
            )),
        }
    }
}

/// Fitted parameters; degenerate fits may carry limit values (`sigma` 0,
/// infinite `shape`/`alpha`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FitParams {
    Lognormal { mu: f64, sigma: f64 },
    Weibull { shape: f64, scale: f64 },
    Powerlaw { alpha: f64, xmin: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub family: FitFamily,
    pub params: FitParams,
    /// Log-likelihood over the fitted samples (the tail for power law).
    /// NaN when degenerate.
    pub log_likelihood: f64,
    /// KS distance between the fitted CDF and the empirical CDF of the
    /// fitted samples; 1.0 when degenerate.
    pub ks: f64,
    /// Number of samples the fit used.
    pub n: usize,
    pub degenerate: bool,
    /// Power law only: fewer than 10 samples above the chosen xmin.
    pub low_confidence: bool,
}

/// One-sample KS statistic of `sorted` ascending samples against `cdf`.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x).clamp(0.0, 1.0);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

fn check_samples(samples: &[f64], needed: usize) -> Result<(), FitError> {
    if samples.len() < needed {
        return Err(FitError::TooFewSamples {
            needed,
            got: samples.len(),
        });
    }
    for &x in samples {
        if !(x > 0.0 && x.is_finite()) {
            return Err(FitError::NonPositiveSample { value: x });
        }
    }
    Ok(())
}

fn sorted_copy(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

fn all_equal(sorted: &[f64]) -> bool {
    sorted.first() == sorted.last()
}

/// MLE lognormal fit: mean and (population) deviation of the log samples.
pub fn fit_lognormal(samples: &[f64]) -> Result<FitResult, FitError> {
    check_samples(samples, 2)?;
    let sorted = sorted_copy(samples);
    let n = sorted.len();
    let logs: Vec<f64> = sorted.iter().map(|&x| x.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n as f64;
    let var = logs.iter().map(|&l| (l - mu) * (l - mu)).sum::<f64>() / n as f64;
    let sigma = var.sqrt();

    if all_equal(&sorted) || sigma < 1e-12 {
        return Ok(FitResult {
            family: FitFamily::Lognormal,
            params: FitParams::Lognormal { mu, sigma: 0.0 },
            log_likelihood: f64::NAN,
            ks: 1.0,
            n,
            degenerate: true,
            low_confidence: false,
        });
    }

    let std_normal = Normal::new(0.0, 1.0).expect("standard normal");
    let ks = ks_statistic(&sorted, |x| std_normal.cdf((x.ln() - mu) / sigma));
    let log_likelihood = logs
        .iter()
        .map(|&l| {
            let z = (l - mu) / sigma;
            -sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() - l - 0.5 * z * z
        })
        .sum();

    Ok(FitResult {
        family: FitFamily::Lognormal,
        params: FitParams::Lognormal { mu, sigma },
        log_likelihood,
        ks,
        n,
        degenerate: false,
        low_confidence: false,
    })
}

/// MLE Weibull fit via bisection on the profile-likelihood shape equation.
///
/// Samples are normalized by their maximum first so the `x^k` power sums
/// stay bounded for any shape.
pub fn fit_weibull(samples: &[f64]) -> Result<FitResult, FitError> {
    check_samples(samples, 2)?;
    let sorted = sorted_copy(samples);
    let n = sorted.len();

    if all_equal(&sorted) {
        return Ok(FitResult {
            family: FitFamily::Weibull,
            params: FitParams::Weibull {
                shape: f64::INFINITY,
                scale: sorted[0],
            },
            log_likelihood: f64::NAN,
            ks: 1.0,
            n,
            degenerate: true,
            low_confidence: false,
        });
    }

    let max = *sorted.last().expect("non-empty");
    let scaled: Vec<f64> = sorted.iter().map(|&x| x / max).collect();
    let logs: Vec<f64> = scaled.iter().map(|&y| y.ln()).collect();
    let mean_log = logs.iter().sum::<f64>() / n as f64;

    // g(k) = sum(y^k ln y)/sum(y^k) - 1/k - mean(ln y); strictly increasing,
    // negative at 0+, approaches -mean(ln y) > 0 as k grows
    let g = |k: f64| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (&y, &l) in scaled.iter().zip(&logs) {
            let w = y.powf(k);
            num += w * l;
            den += w;
        }
        num / den - 1.0 / k - mean_log
    };

    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    let mut expansions = 0;
    while g(lo) > 0.0 {
        lo /= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(FitError::NoConvergence { last_shape: lo });
        }
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 120 {
            return Err(FitError::NoConvergence { last_shape: hi });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-12 * hi {
            break;
        }
    }
    let shape = 0.5 * (lo + hi);
    let mean_pow = scaled.iter().map(|&y| y.powf(shape)).sum::<f64>() / n as f64;
    let scale = max * mean_pow.powf(1.0 / shape);

    let ks = ks_statistic(&sorted, |x| 1.0 - (-(x / scale).powf(shape)).exp());
    let log_likelihood = sorted
        .iter()
        .map(|&x| {
            shape.ln() - shape * scale.ln() + (shape - 1.0) * x.ln() - (x / scale).powf(shape)
        })
        .sum();

    Ok(FitResult {
        family: FitFamily::Weibull,
        params: FitParams::Weibull { shape, scale },
        log_likelihood,
        ks,
        n,
        degenerate: false,
        low_confidence: false,
    })
}

/// MLE power-law fit over the tail `x >= xmin`, scanning candidate xmin
/// values (unique samples up to the 90th percentile) for the smallest KS.
pub fn fit_powerlaw(samples: &[f64]) -> Result<FitResult, FitError> {
    check_samples(samples, MIN_TAIL)?;
    let sorted = sorted_copy(samples);
    let n = sorted.len();

    if all_equal(&sorted) {
        return Ok(FitResult {
            family: FitFamily::Powerlaw,
            params: FitParams::Powerlaw {
                alpha: f64::INFINITY,
                xmin: sorted[0],
            },
            log_likelihood: f64::NAN,
            ks: 1.0,
            n,
            degenerate: true,
            low_confidence: false,
        });
    }

    // integer-valued metrics get the continuity offset xmin - 0.5
    let offset = if sorted.iter().all(|&x| x.fract() == 0.0) {
        0.5
    } else {
        0.0
    };

    // suffix sums of ln x for O(1) tail log-sums per candidate
    let mut suffix_ln = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + sorted[i].ln();
    }

    let p90 = sorted[(0.9 * (n - 1) as f64) as usize];
    let mut best: Option<(f64, f64, f64, usize)> = None; // (ks, alpha, xmin, tail)
    for i in 0..n {
        if i > 0 && sorted[i] == sorted[i - 1] {
            continue;
        }
        let xmin = sorted[i];
        if xmin > p90 {
            break;
        }
        let x_eff = xmin - offset;
        let m = n - i;
        let sum_ln_tail = suffix_ln[i] - m as f64 * x_eff.ln();
        if sum_ln_tail <= f64::EPSILON * m as f64 {
            continue; // whole tail at xmin: no slope information
        }
        let alpha = 1.0 + m as f64 / sum_ln_tail;
        let tail = &sorted[i..];
        let ks = ks_statistic(tail, |x| 1.0 - (x / x_eff).powf(1.0 - alpha));
        if best.is_none_or(|(bks, ..)| ks < bks) {
            best = Some((ks, alpha, xmin, m));
        }
    }

    let Some((ks, alpha, xmin, m)) = best else {
        // every candidate tail was constant up to the 90th percentile
        return Ok(FitResult {
            family: FitFamily::Powerlaw,
            params: FitParams::Powerlaw {
                alpha: f64::INFINITY,
                xmin: sorted[0],
            },
            log_likelihood: f64::NAN,
            ks: 1.0,
            n,
            degenerate: true,
            low_confidence: false,
        });
    };

    let x_eff = xmin - offset;
    let sum_ln_tail = suffix_ln[n - m] - m as f64 * x_eff.ln();
    let log_likelihood = m as f64 * (alpha - 1.0).ln() - m as f64 * x_eff.ln() - alpha * sum_ln_tail;

    Ok(FitResult {
        family: FitFamily::Powerlaw,
        params: FitParams::Powerlaw { alpha, xmin },
        log_likelihood,
        ks,
        n: m,
        degenerate: false,
        low_confidence: m < MIN_TAIL,
    })
}

pub fn fit_family(family: FitFamily, samples: &[f64]) -> Result<FitResult, FitError> {
    match family {
        FitFamily::Lognormal => fit_lognormal(samples),
        FitFamily::Weibull => fit_weibull(samples),
        FitFamily::Powerlaw => fit_powerlaw(samples),
    }
}

/// Outcome of fitting several families to one sample set.
#[derive(Debug)]
pub struct FitComparison {
    /// Successful fits, best first: ascending KS, ties broken by descending
    /// log-likelihood.
    pub ranked: Vec<FitResult>,
    /// Families whose fit failed, with the reason; never aborts the rest.
    pub failures: Vec<(FitFamily, FitError)>,
}

impl FitComparison {
    pub fn best(&self) -> Option<&FitResult> {
        self.ranked.first()
    }
}

pub fn compare_fits(samples: &[f64], families: &[FitFamily]) -> FitComparison {
    let mut ranked = Vec::new();
    let mut failures = Vec::new();
    for &family in families {
        match fit_family(family, samples) {
            Ok(result) => ranked.push(result),
            Err(err) => failures.push((family, err)),
        }
    }
    ranked.sort_by(|a, b| {
        a.ks.total_cmp(&b.ks)
            .then_with(|| b.log_likelihood.total_cmp(&a.log_likelihood))
    });
    FitComparison { ranked, failures }
}
