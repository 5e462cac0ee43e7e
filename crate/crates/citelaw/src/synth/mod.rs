//! Seeded synthetic corpora.
//!
//! Real citation databases are proprietary, so verification runs on
//! synthetic corpora with known generative parameters: discretized
//! lognormal citation counts (optionally zero-inflated) and ideal
//! power-law subsamples. Everything is driven by [`Prng`], a fixed
//! splitmix64 generator, so a (spec, seed) pair produces byte-identical
//! corpora on every platform. Normal variates come from the shared
//! quantile routine (inverse-CDF sampling), keeping the entire stream
//! reproducible from the documented constants alone.

pub mod scenarios;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::corpus::{Corpus, PaperRecord};
use crate::distfit::normal::inv_norm;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("n must be positive")]
    EmptySpec,
    #[error("sigma must be positive (got {0})")]
    NonPositiveSigma(f64),
    #[error("extra_zero_fraction {0} outside [0, 1)")]
    BadZeroFraction(f64),
    #[error("alpha must be positive (got {0})")]
    NonPositiveAlpha(f64),
    #[error("n_local {n_local} exceeds n_global {n_global}")]
    LocalExceedsGlobal { n_local: usize, n_global: usize },
    #[error("subsample infeasible: bumping collisions ran past n_global = {n_global}")]
    Infeasible { n_global: usize },
    #[error("group plan covers {planned} records, spec.n is {n}")]
    PlanSizeMismatch { planned: usize, n: usize },
}

/// splitmix64: 64-bit state advanced by the golden-gamma constant, output
/// mixed by two shift-multiply rounds. Small, seedable from any u64, and
/// identical on every platform.
#[derive(Debug, Clone)]
pub struct Prng {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;
const TWO_POW_NEG_53: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

impl Prng {
    pub fn new(seed: u64) -> Prng {
        Prng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform in the open interval (0, 1); safe to feed the quantile.
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_NEG_53
    }

    /// Standard normal variate by inverse-CDF.
    pub fn next_normal(&mut self) -> f64 {
        inv_norm(self.next_open01())
    }

    /// Uniform integer in [0, bound) by 128-bit multiply.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Child seed for an indexed stream (Monte Carlo replicates, groups).
    pub fn derive_seed(seed: u64, stream: u64) -> u64 {
        let mut p = Prng::new(seed ^ stream.wrapping_mul(0xA24B_AED4_963E_E407));
        p.next_u64()
    }
}

/// Parameters of a discretized-lognormal citation sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    /// Fraction of entries forced to zero after discretization.
    pub extra_zero_fraction: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n == 0 {
            return Err(SynthError::EmptySpec);
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(SynthError::NonPositiveSigma(self.sigma));
        }
        if !(0.0..1.0).contains(&self.extra_zero_fraction) {
            return Err(SynthError::BadZeroFraction(self.extra_zero_fraction));
        }
        Ok(())
    }
}

/// How a continuous draw becomes an integer count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscretizeMode {
    /// Round to nearest; draws below 0.5 become zeros.
    Round,
    /// Truncate; draws below 1 become zeros.
    Floor,
}

/// Citation counts c = round(exp(mu + sigma*z)) for n normal draws; then
/// extra_zero_fraction * n randomly chosen entries are forced to zero.
pub fn sample_discrete_lognormal(spec: &SynthSpec) -> Result<Vec<u64>, SynthError> {
    sample_discrete_lognormal_mode(spec, DiscretizeMode::Round)
}

pub fn sample_discrete_lognormal_mode(
    spec: &SynthSpec,
    mode: DiscretizeMode,
) -> Result<Vec<u64>, SynthError> {
    spec.validate()?;
    let mut rng = Prng::new(spec.seed);
    let mut counts: Vec<u64> = (0..spec.n)
        .map(|_| {
            let x = (spec.mu + spec.sigma * rng.next_normal()).exp();
            match mode {
                DiscretizeMode::Round => x.round() as u64,
                DiscretizeMode::Floor => x.floor() as u64,
            }
        })
        .collect();
    let k = (spec.extra_zero_fraction * spec.n as f64).round() as usize;
    if k > 0 {
        // partial Fisher-Yates picks k distinct indices deterministically
        let mut idx: Vec<usize> = (0..spec.n).collect();
        for i in 0..k {
            let j = i + rng.next_below((spec.n - i) as u64) as usize;
            idx.swap(i, j);
            counts[idx[i]] = 0;
        }
    }
    Ok(counts)
}

/// Global ranks of an ideal subsample: for local rank i, the target is
/// g(i) = n_global * (i/n_local)^(1/alpha), inverted from
/// local = C * global^alpha with C = n_local / n_global^alpha. Optional
/// jitter perturbs each target uniformly within half the gap to its
/// neighbours; collisions after rounding bump to the next free rank.
pub fn sample_ideal_subsample(
    n_global: usize,
    n_local: usize,
    alpha: f64,
    seed: u64,
    jitter: bool,
) -> Result<Vec<usize>, SynthError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(SynthError::NonPositiveAlpha(alpha));
    }
    if n_local == 0 || n_global == 0 {
        return Err(SynthError::EmptySpec);
    }
    if n_local > n_global {
        return Err(SynthError::LocalExceedsGlobal { n_local, n_global });
    }
    let inv_alpha = 1.0 / alpha;
    let targets: Vec<f64> = (1..=n_local)
        .map(|i| n_global as f64 * (i as f64 / n_local as f64).powf(inv_alpha))
        .collect();
    let mut rng = Prng::new(seed);
    let mut ranks = Vec::with_capacity(n_local);
    let mut prev_rank = 0usize;
    for i in 0..n_local {
        let mut t = targets[i];
        if jitter {
            let lower = if i == 0 { targets[i] } else { targets[i] - targets[i - 1] };
            let upper = if i + 1 == n_local {
                n_global as f64 - targets[i]
            } else {
                targets[i + 1] - targets[i]
            };
            let gap = lower.min(upper).max(0.0);
            t += (rng.next_f64() - 0.5) * gap;
        }
        let r = (t.round() as i64).max(1) as usize;
        let r = r.max(prev_rank + 1);
        if r > n_global {
            return Err(SynthError::Infeasible { n_global });
        }
        prev_rank = r;
        ranks.push(r);
    }
    Ok(ranks)
}

/// One group of a synthetic corpus: a label, how many records it covers,
/// and which citation generator to use.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPlan {
    pub label: String,
    pub count: usize,
    pub gen: CitationGen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CitationGen {
    /// Use the spec's (mu, sigma, extra_zero_fraction).
    Shared,
    /// Group-specific lognormal parameters.
    Lognormal {
        mu: f64,
        sigma: f64,
        extra_zero_fraction: f64,
    },
}

impl GroupPlan {
    pub fn shared(label: impl Into<String>, count: usize) -> GroupPlan {
        GroupPlan {
            label: label.into(),
            count,
            gen: CitationGen::Shared,
        }
    }

    pub fn lognormal(
        label: impl Into<String>,
        count: usize,
        mu: f64,
        sigma: f64,
        extra_zero_fraction: f64,
    ) -> GroupPlan {
        GroupPlan {
            label: label.into(),
            count,
            gen: CitationGen::Lognormal {
                mu,
                sigma,
                extra_zero_fraction,
            },
        }
    }
}

/// Publication window stamped on synthetic corpora.
pub const DEFAULT_PUB_WINDOW: (i32, i32) = (2014, 2017);

/// Assemble a full synthetic corpus: deterministic ids ("S000001", ...),
/// years uniform over the publication window, one group label per plan
/// entry. Group counts must sum to spec.n.
pub fn make_global_corpus(spec: &SynthSpec, plan: &[GroupPlan]) -> Result<Corpus, SynthError> {
    spec.validate()?;
    let planned: usize = plan.iter().map(|g| g.count).sum();
    if planned != spec.n {
        return Err(SynthError::PlanSizeMismatch {
            planned,
            n: spec.n,
        });
    }
    let (lo, hi) = DEFAULT_PUB_WINDOW;
    let span = (hi - lo + 1) as u64;
    let mut records = Vec::with_capacity(spec.n);
    let mut next_id = 1usize;
    for (gi, group) in plan.iter().enumerate() {
        let group_seed = Prng::derive_seed(spec.seed, gi as u64);
        let sub_spec = match group.gen {
            CitationGen::Shared => SynthSpec {
                n: group.count,
                seed: group_seed,
                ..*spec
            },
            CitationGen::Lognormal {
                mu,
                sigma,
                extra_zero_fraction,
            } => SynthSpec {
                n: group.count,
                mu,
                sigma,
                extra_zero_fraction,
                seed: group_seed,
            },
        };
        let citations = sample_discrete_lognormal(&sub_spec)?;
        let mut year_rng = Prng::new(Prng::derive_seed(group_seed, 1));
        for c in citations {
            let year = lo + year_rng.next_below(span) as i32;
            let mut groups = BTreeSet::new();
            groups.insert(group.label.clone());
            records.push(PaperRecord {
                id: format!("S{next_id:06}"),
                year,
                citations: c,
                journal: None,
                groups,
                topic: None,
                extra: Default::default(),
            });
            next_id += 1;
        }
    }
    let mut corpus =
        Corpus::from_records(records, Some(DEFAULT_PUB_WINDOW)).expect("synthetic ids are unique");
    corpus.citation_window_note = "synthetic: counts drawn at generation time".to_string();
    Ok(corpus)
}

/// Expected zero share of a discretized lognormal: Phi((ln 0.5 - mu)/sigma),
/// plus the forced-zero contribution on the remainder.
pub fn expected_zero_share(mu: f64, sigma: f64, extra_zero_fraction: f64) -> f64 {
    let p0 = crate::distfit::normal::normal_cdf((0.5f64.ln() - mu) / sigma);
    p0 + extra_zero_fraction * (1.0 - p0)
}
