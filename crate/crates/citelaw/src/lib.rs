//! Citation-distribution rank analysis.
//!
//! `citelaw` takes a corpus of publication records (id, year, citation count,
//! group labels) and answers the questions that size-independent,
//! percentile-based research indicators raise in practice:
//!
//! - [`ranking`] imposes a deterministic total order on a corpus and derives
//!   global ranks, double-rank series (local vs. global rank of a group's
//!   papers) and top-percentile counts.
//! - [`indicators`] turns those counts into the usual scalar indicators
//!   (MNC, uncited share, serial percentile ratios) and classifies how well
//!   a group conforms to the ideal rank power law.
//! - [`distfit`] analyses the shape of a citation distribution:
//!   log-binned histograms, normal probability plots of log counts,
//!   lognormal parameter fits and KS/Lilliefors goodness-of-fit.
//! - [`rankfit`] fits power laws to double-rank series, compares segment
//!   slopes (top 10% vs. bottom 50%) and classifies log-log curvature.
//! - [`synth`] generates seeded synthetic corpora (discretized lognormal
//!   citations, zero inflation, ideal power-law subsamples) so that every
//!   analysis can be verified without access to proprietary citation data.
//! - [`corpus`] holds the record model and file ingestion (JSONL / CSV).
//!
//! All randomness flows through [`synth::Prng`], a fixed splitmix64
//! generator, so equal seeds produce byte-identical corpora and p-values on
//! every platform.

#![forbid(unsafe_code)]

pub mod corpus;
pub mod distfit;
pub mod indicators;
pub mod ranking;
pub mod rankfit;
pub mod synth;

pub use corpus::{load_corpus, Corpus, CorpusError, Filter, InputFormat, JournalMeta, PaperRecord};
pub use distfit::{KsMethod, KsResult, LogHistogram, LognormalFit, NppSeries, Shift};
pub use indicators::{Conformity, ConformityClass, IndicatorQuartet, IndicatorRow};
pub use ranking::{DoubleRankSeries, PercentileProfile, RankedCorpus};
pub use rankfit::{Concavity, CurvatureClass, PowerLawFit, ScaledHistogram, SegmentSlopes};
pub use synth::{GroupPlan, Prng, SynthSpec};
