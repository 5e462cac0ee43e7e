//! Shared fixtures for the criterion benchmarks.

use citelaw::corpus::Corpus;
use citelaw::synth::{make_global_corpus, GroupPlan, SynthSpec};

/// Two-group corpus of the given size, deterministic.
pub fn bench_corpus(n: usize) -> Corpus {
    let spec = SynthSpec {
        n,
        mu: 2.2,
        sigma: 1.25,
        extra_zero_fraction: 0.03,
        seed: 2024,
    };
    let big = n * 4 / 5;
    make_global_corpus(
        &spec,
        &[
            GroupPlan::shared("world", big),
            GroupPlan::shared("focus", n - big),
        ],
    )
    .expect("valid bench spec")
}
