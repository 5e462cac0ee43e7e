//! End-to-end pipeline checks across module boundaries: generate, save,
//! reload, rank, profile, classify, fit.

use citelaw::corpus::{load_corpus, Filter, InputFormat};
use citelaw::indicators::{classify_conformity, ConformityClass};
use citelaw::ranking::{double_rank, group_ids, percentile_profile, total_order};
use citelaw::rankfit::{
    classify_curvature, fit_power_law, segment_slopes, Concavity, FULL_RANGE,
};
use citelaw::synth::{
    make_global_corpus, sample_ideal_subsample, scenarios, GroupPlan, SynthSpec,
};

#[test]
fn save_load_rank_profile_roundtrip() {
    let spec = SynthSpec {
        n: 2000,
        mu: 2.3,
        sigma: 1.2,
        extra_zero_fraction: 0.03,
        seed: 100,
    };
    let corpus = make_global_corpus(
        &spec,
        &[GroupPlan::shared("a", 1200), GroupPlan::shared("b", 800)],
    )
    .unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.jsonl");
    corpus.save_jsonl(&path).unwrap();
    let reloaded = load_corpus(&path, InputFormat::Jsonl).unwrap();
    assert_eq!(corpus.records, reloaded.records);

    let ranked = total_order(&reloaded, scenarios::reference_year()).unwrap();
    let profile = percentile_profile(&ranked, &reloaded.ids(), 10).unwrap();
    for r in profile.ratios {
        let r = r.unwrap();
        assert!((r - 0.1).abs() < 2.0 / 2000.0, "self ratio = {r}");
    }
}

#[test]
fn ideal_subsample_full_pipeline() {
    let ranks = sample_ideal_subsample(100_000, 2000, 0.8, 42, true).unwrap();
    let series =
        citelaw::ranking::DoubleRankSeries::from_global_ranks(ranks.clone(), 100_000).unwrap();

    let profile =
        citelaw::ranking::percentile_profile_from_ranks(&ranks, 100_000, 10).unwrap();
    let conf = classify_conformity(&profile, 0.15);
    assert_eq!(conf.class, ConformityClass::Ideal, "spread = {:?}", conf.spread);

    let fit = fit_power_law(&series, FULL_RANGE).unwrap();
    assert!((fit.alpha - 0.8).abs() < 0.05, "alpha = {}", fit.alpha);

    let curv = classify_curvature(&series, 0.02).unwrap();
    assert_eq!(curv.concavity, Concavity::None, "quad = {}", curv.quad_coeff);
}

#[test]
fn full_range_alpha_sits_between_segment_slopes_on_curved_series() {
    // loose OLS averaging property, checked on both curved scenarios
    for (corpus, label) in [
        (scenarios::journal_like(8), scenarios::SELECTIVE),
        (scenarios::zero_inflated(8), scenarios::INFLATED),
    ] {
        let ranked = total_order(&corpus, scenarios::reference_year()).unwrap();
        let series = double_rank(&ranked, &group_ids(&corpus, label)).unwrap();
        let curv = classify_curvature(&series, 0.02).unwrap();
        assert_ne!(curv.concavity, Concavity::None);
        let seg = segment_slopes(&series);
        let (a, b) = (seg.top10.unwrap().alpha, seg.bottom50.unwrap().alpha);
        let full = fit_power_law(&series, FULL_RANGE).unwrap().alpha;
        let (lo, hi) = (a.min(b), a.max(b));
        assert!(
            full >= lo - 0.05 && full <= hi + 0.05,
            "{label}: full = {full}, segments = ({a}, {b})"
        );
    }
}

#[test]
fn filtered_subcorpus_feeds_the_same_pipeline() {
    let corpus = scenarios::journal_like(5);
    let (world, warnings) = corpus.select(&Filter {
        groups: vec![scenarios::WORLD.to_string()],
        ..Default::default()
    });
    assert!(warnings.is_empty());
    assert_eq!(world.len(), 40_000);
    // the filtered world re-ranks standalone and self-evaluates to 0.1
    let ranked = total_order(&world, scenarios::reference_year()).unwrap();
    let profile = percentile_profile(&ranked, &world.ids(), 10).unwrap();
    assert!((profile.ratios[0].unwrap() - 0.1).abs() < 1e-3);
}

#[test]
fn lilliefors_rejection_rate_smoke() {
    // light version of the calibration gate: 40 null samples, alpha 0.05
    let mut rejections = 0;
    for trial in 0..40u64 {
        let mut rng = citelaw::synth::Prng::new(5000 + trial);
        let sample: Vec<f64> = (0..60).map(|_| 1.5 + 0.8 * rng.next_normal()).collect();
        let res = citelaw::distfit::lilliefors_normal(&sample, 1000, 900 + trial).unwrap();
        if res.p_value < 0.05 {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / 40.0;
    assert!(rate <= 0.20, "rejection rate {rate} is far off the 5% level");
}
