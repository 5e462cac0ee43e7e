//! Citation-distribution shape analysis.
//!
//! Citations here are integer counts; the distributional work happens on
//! log-transformed values. When a sample contains zeros, the transform is
//! ln(c + 1), otherwise ln(c) — [`Shift`] carries that choice explicitly.
//!
//! Goodness-of-fit comes in two flavours: the fixed-parameter KS p-value
//! (asymptotic Kolmogorov series, treating the fitted parameters as
//! known) and a Monte Carlo Lilliefors p-value (parameters re-estimated
//! per replicate), which is the appropriate null when mu and sigma were
//! fitted on the same sample. The Monte Carlo loop is deterministic given
//! (seed, mc_runs): replicate k draws from a fresh generator seeded with
//! `Prng::derive_seed(seed, k)`.

pub mod normal;

use thiserror::Error;

use crate::synth::Prng;
use normal::inv_norm;

pub use normal::{erfc, inv_normal_cdf, normal_cdf, normal_pdf};

#[derive(Debug, Error)]
pub enum DistFitError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample of {n} is too small (need at least {min})")]
    TooFewSamples { n: usize, min: usize },
    #[error("sample contains zero citations; use shift 1")]
    ZeroNeedsShift,
    #[error("degenerate sample: all values equal")]
    DegenerateSample,
    #[error("probability {p} outside (0, 1)")]
    ProbabilityOutOfRange { p: f64 },
    #[error("mc_runs {given} is too small for a Monte Carlo p-value (need at least {min})")]
    TooFewMcRuns { given: usize, min: usize },
}

/// Offset applied before the log transform: ln(c + shift).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    Zero,
    One,
}

impl Shift {
    /// Shift 1 when zeros are present, 0 otherwise.
    pub fn auto(citations: &[u64]) -> Shift {
        if citations.contains(&0) {
            Shift::One
        } else {
            Shift::Zero
        }
    }

    pub fn offset(self) -> f64 {
        match self {
            Shift::Zero => 0.0,
            Shift::One => 1.0,
        }
    }
}

impl std::fmt::Display for Shift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.offset() as u8)
    }
}

fn log_values(citations: &[u64], shift: Shift) -> Result<Vec<f64>, DistFitError> {
    if citations.is_empty() {
        return Err(DistFitError::EmptySample);
    }
    if shift == Shift::Zero && citations.contains(&0) {
        return Err(DistFitError::ZeroNeedsShift);
    }
    Ok(citations
        .iter()
        .map(|&c| (c as f64 + shift.offset()).ln())
        .collect())
}

// ---------------------------------------------------------------------
// Logarithmic histogram
// ---------------------------------------------------------------------

/// Histogram bin with inclusive integer bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistBin {
    pub lower: u64,
    pub upper: u64,
    pub count: usize,
}

/// Log-binned citation histogram: unit bins {0}, {1}, {2}, then
/// [2^k+1, 2^(k+1)] for k = 1, 2, ...
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogHistogram {
    pub bins: Vec<HistBin>,
    pub total: usize,
}

fn bin_index(c: u64) -> usize {
    if c <= 2 {
        return c as usize;
    }
    // smallest k with c <= 2^k, for c >= 3 (so k >= 2)
    let k = 64 - (c - 1).leading_zeros() as usize;
    k + 1
}

fn bin_bounds(index: usize) -> (u64, u64) {
    if index < 3 {
        (index as u64, index as u64)
    } else {
        // index 3 is [3, 4], index 4 is [5, 8], ...
        let k = (index - 1) as u32;
        ((1u64 << (k - 1)) + 1, 1u64 << k)
    }
}

/// Bin a citation multiset; trailing empty bins are trimmed.
pub fn log_histogram(citations: &[u64]) -> Result<LogHistogram, DistFitError> {
    if citations.is_empty() {
        return Err(DistFitError::EmptySample);
    }
    let last = citations.iter().map(|&c| bin_index(c)).max().unwrap();
    let mut counts = vec![0usize; last + 1];
    for &c in citations {
        counts[bin_index(c)] += 1;
    }
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let (lower, upper) = bin_bounds(i);
            HistBin { lower, upper, count }
        })
        .collect();
    Ok(LogHistogram {
        bins,
        total: citations.len(),
    })
}

// ---------------------------------------------------------------------
// Normal probability plot
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NppPoint {
    /// Plotting position p_i = (i - 0.5)/n.
    pub position: f64,
    /// Normal quantile of the position.
    pub z: f64,
    /// ln(c_i + shift), sample sorted ascending.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NppSeries {
    pub points: Vec<NppPoint>,
    pub shift: Shift,
    pub n: usize,
}

/// Normal probability plot of the log-transformed sample.
pub fn npp(citations: &[u64], shift: Shift) -> Result<NppSeries, DistFitError> {
    let mut values = log_values(citations, shift)?;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    let points = values
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let position = (i as f64 + 0.5) / n as f64;
            NppPoint {
                position,
                z: inv_norm(position),
                value,
            }
        })
        .collect();
    Ok(NppSeries {
        points,
        shift,
        n,
    })
}

// ---------------------------------------------------------------------
// Lognormal fit
// ---------------------------------------------------------------------

/// Lognormal parameters of a citation sample: mean and sample standard
/// deviation (n-1 denominator) of ln(c + shift).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalFit {
    pub mu: f64,
    pub sigma: f64,
    pub shift: Shift,
    pub n: usize,
}

/// Mean and sample standard deviation of an already-transformed sample.
pub fn fit_normal(sample: &[f64]) -> Result<(f64, f64), DistFitError> {
    let n = sample.len();
    if n < 3 {
        return Err(DistFitError::TooFewSamples { n, min: 3 });
    }
    let (mu, sigma) = mean_std(sample);
    if sigma == 0.0 {
        return Err(DistFitError::DegenerateSample);
    }
    Ok((mu, sigma))
}

fn mean_std(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let ss = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

pub fn fit_lognormal(citations: &[u64], shift: Shift) -> Result<LognormalFit, DistFitError> {
    let logs = log_values(citations, shift)?;
    fit_lognormal_from_logs(&logs, shift)
}

/// Fit on continuous positive values instead of integer counts.
pub fn fit_lognormal_values(values: &[f64], shift: Shift) -> Result<LognormalFit, DistFitError> {
    if values.is_empty() {
        return Err(DistFitError::EmptySample);
    }
    if shift == Shift::Zero && values.iter().any(|&v| v <= 0.0) {
        return Err(DistFitError::ZeroNeedsShift);
    }
    let logs: Vec<f64> = values.iter().map(|&v| (v + shift.offset()).ln()).collect();
    fit_lognormal_from_logs(&logs, shift)
}

fn fit_lognormal_from_logs(logs: &[f64], shift: Shift) -> Result<LognormalFit, DistFitError> {
    let (mu, sigma) = fit_normal(logs)?;
    Ok(LognormalFit {
        mu,
        sigma,
        shift,
        n: logs.len(),
    })
}

// ---------------------------------------------------------------------
// Kolmogorov-Smirnov / Lilliefors
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsMethod {
    /// Asymptotic Kolmogorov series, parameters treated as known.
    FixedParameter,
    /// Monte Carlo null with parameters re-estimated per replicate.
    MonteCarloLilliefors,
}

impl std::fmt::Display for KsMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KsMethod::FixedParameter => write!(f, "fixed"),
            KsMethod::MonteCarloLilliefors => write!(f, "lilliefors"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// Two-sided KS statistic.
    pub d: f64,
    pub p_value: f64,
    pub n: usize,
    pub method: KsMethod,
}

const KS_MIN_N: usize = 5;
const MC_MIN_RUNS: usize = 1000;

/// Two-sided KS statistic of a sorted sample against N(mu, sigma):
/// max over i of max(i/n - F(x_i), F(x_i) - (i-1)/n).
pub fn ks_statistic_normal(sorted: &[f64], mu: f64, sigma: f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = normal_cdf((x - mu) / sigma);
        let hi = (i + 1) as f64 / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Lilliefors normality test on a continuous sample, p-value by Monte
/// Carlo under the estimated-parameter null. Deterministic given seed.
pub fn lilliefors_normal(
    sample: &[f64],
    mc_runs: usize,
    seed: u64,
) -> Result<KsResult, DistFitError> {
    let n = sample.len();
    if n < KS_MIN_N {
        return Err(DistFitError::TooFewSamples { n, min: KS_MIN_N });
    }
    if mc_runs < MC_MIN_RUNS {
        return Err(DistFitError::TooFewMcRuns {
            given: mc_runs,
            min: MC_MIN_RUNS,
        });
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (mu, sigma) = fit_normal(&sorted)?;
    let d = ks_statistic_normal(&sorted, mu, sigma);

    let mut exceed = 0usize;
    let mut draw = vec![0.0f64; n];
    for run in 0..mc_runs {
        let mut rng = Prng::new(Prng::derive_seed(seed, run as u64));
        for v in draw.iter_mut() {
            *v = mu + sigma * rng.next_normal();
        }
        draw.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (m, s) = mean_std(&draw);
        if ks_statistic_normal(&draw, m, s) >= d {
            exceed += 1;
        }
    }
    Ok(KsResult {
        d,
        p_value: exceed as f64 / mc_runs as f64,
        n,
        method: KsMethod::MonteCarloLilliefors,
    })
}

/// Fixed-parameter KS test on a continuous sample (parameters fitted,
/// then treated as known; p from the asymptotic Kolmogorov series).
pub fn ks_fixed_normal(sample: &[f64]) -> Result<KsResult, DistFitError> {
    let n = sample.len();
    if n < KS_MIN_N {
        return Err(DistFitError::TooFewSamples { n, min: KS_MIN_N });
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (mu, sigma) = fit_normal(&sorted)?;
    let d = ks_statistic_normal(&sorted, mu, sigma);
    Ok(KsResult {
        d,
        p_value: kolmogorov_q((n as f64).sqrt() * d),
        n,
        method: KsMethod::FixedParameter,
    })
}

/// Lilliefors test of log-transformed citations (the default method).
pub fn ks_test(
    citations: &[u64],
    shift: Shift,
    mc_runs: usize,
    seed: u64,
) -> Result<KsResult, DistFitError> {
    let logs = log_values(citations, shift)?;
    lilliefors_normal(&logs, mc_runs, seed)
}

/// Fixed-parameter KS test of log-transformed citations.
pub fn ks_test_fixed(citations: &[u64], shift: Shift) -> Result<KsResult, DistFitError> {
    let logs = log_values(citations, shift)?;
    ks_fixed_normal(&logs)
}

/// Survival function of the Kolmogorov distribution,
/// Q(z) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 z^2), with the
/// theta-inversion form below z = 1.18 where the series converges slowly.
pub fn kolmogorov_q(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.18 {
        let v = std::f64::consts::PI * std::f64::consts::PI / (8.0 * z * z);
        let sum = (-v).exp() + (-9.0 * v).exp() + (-25.0 * v).exp() + (-49.0 * v).exp();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / z * sum
    } else {
        let w = -2.0 * z * z;
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100u32 {
            let term = sign * (w * (k * k) as f64).exp();
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
            sign = -sign;
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Banded p-value string in the reporting style of goodness-of-fit
/// tables: "< 0.01", exact with two decimals in between, "> 0.15".
pub fn p_value_band(p: f64) -> String {
    if p < 0.01 {
        "< 0.01".to_string()
    } else if p > 0.15 {
        "> 0.15".to_string()
    } else {
        format!("{p:.2}")
    }
}
