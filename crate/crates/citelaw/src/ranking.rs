//! Deterministic total order on corpora and rank-derived series.
//!
//! Papers are ordered by citations from highest to lowest, rank 1 for the
//! most cited. Ties are broken by average citations per year (citations
//! divided by reference_year - publication year) descending, then by
//! publication year descending, then by id ascending, which makes the
//! order strict and platform-independent. The citations-per-year
//! comparison is done in integer cross-multiplication, so no float
//! rounding can reorder records.

use std::collections::HashMap;

use thiserror::Error;

use crate::corpus::{Corpus, PaperRecord};

#[derive(Debug, Error)]
pub enum RankingError {
    #[error("cannot rank an empty corpus")]
    EmptyCorpus,
    #[error("reference year {year} must be after the publication window end {end}")]
    ReferenceYearTooEarly { year: i32, end: i32 },
    #[error("unknown id `{0}` (not in the global corpus)")]
    UnknownId(String),
    #[error("duplicate global rank {0} in series input")]
    DuplicateRank(usize),
    #[error("global rank {rank} outside 1..={n}")]
    RankOutOfRange { rank: usize, n: usize },
    #[error("percentage {0} outside (0, 100]")]
    PercentageOutOfRange(f64),
    #[error("min_support must be at least 1")]
    ZeroMinSupport,
}

/// A corpus under the deterministic total order, rank 1 = most cited.
#[derive(Debug, Clone)]
pub struct RankedCorpus {
    records: Vec<PaperRecord>,
    rank_of: HashMap<String, usize>,
    reference_year: i32,
}

/// Sort key comparison; `true` when a ranks before b.
fn ranks_before(a: &PaperRecord, b: &PaperRecord, reference_year: i32) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    // citations descending
    match b.citations.cmp(&a.citations) {
        Ordering::Equal => {}
        other => return other,
    }
    // citations per year descending: a.c/(R-a.y) vs b.c/(R-b.y), compared
    // as a.c*(R-b.y) vs b.c*(R-a.y) with positive integer spans
    let span_a = (reference_year - a.year) as u128;
    let span_b = (reference_year - b.year) as u128;
    let cpy_a = a.citations as u128 * span_b;
    let cpy_b = b.citations as u128 * span_a;
    match cpy_b.cmp(&cpy_a) {
        Ordering::Equal => {}
        other => return other,
    }
    // year descending
    match b.year.cmp(&a.year) {
        Ordering::Equal => {}
        other => return other,
    }
    // id ascending
    a.id.cmp(&b.id)
}

/// Impose the total order on a corpus.
pub fn total_order(corpus: &Corpus, reference_year: i32) -> Result<RankedCorpus, RankingError> {
    if corpus.is_empty() {
        return Err(RankingError::EmptyCorpus);
    }
    if reference_year <= corpus.pub_window.1 {
        return Err(RankingError::ReferenceYearTooEarly {
            year: reference_year,
            end: corpus.pub_window.1,
        });
    }
    let mut records = corpus.records.clone();
    records.sort_by(|a, b| ranks_before(a, b, reference_year));
    let rank_of = records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.clone(), i + 1))
        .collect();
    Ok(RankedCorpus {
        records,
        rank_of,
        reference_year,
    })
}

impl RankedCorpus {
    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn reference_year(&self) -> i32 {
        self.reference_year
    }

    /// Records in rank order (index 0 = rank 1).
    pub fn records(&self) -> &[PaperRecord] {
        &self.records
    }

    /// 1-based global rank of an id.
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.rank_of.get(id).copied()
    }

    /// Sorted global ranks of a set of local ids.
    pub fn ranks_of(&self, local_ids: &[String]) -> Result<Vec<usize>, RankingError> {
        let mut ranks = Vec::with_capacity(local_ids.len());
        for id in local_ids {
            match self.rank_of(id) {
                Some(r) => ranks.push(r),
                None => return Err(RankingError::UnknownId(id.clone())),
            }
        }
        ranks.sort_unstable();
        Ok(ranks)
    }
}

/// One point of a double-rank series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankPair {
    pub local: usize,
    pub global: usize,
}

/// (local rank, global rank) pairs for a group against the global
/// corpus, sorted by local rank; both coordinates strictly increase and
/// global >= local everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleRankSeries {
    pub pairs: Vec<RankPair>,
    pub n_local: usize,
    pub n_global: usize,
}

impl DoubleRankSeries {
    /// Build a series from the global ranks of a group's papers.
    pub fn from_global_ranks(
        mut ranks: Vec<usize>,
        n_global: usize,
    ) -> Result<DoubleRankSeries, RankingError> {
        ranks.sort_unstable();
        let mut pairs = Vec::with_capacity(ranks.len());
        let mut prev = 0usize;
        for (i, &g) in ranks.iter().enumerate() {
            if g == prev {
                return Err(RankingError::DuplicateRank(g));
            }
            if g < 1 || g > n_global {
                return Err(RankingError::RankOutOfRange { rank: g, n: n_global });
            }
            prev = g;
            pairs.push(RankPair { local: i + 1, global: g });
        }
        Ok(DoubleRankSeries {
            n_local: pairs.len(),
            n_global,
            pairs,
        })
    }

    pub fn global_ranks(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.global).collect()
    }
}

/// Double-rank series of a group of local ids against the global order.
pub fn double_rank(
    global: &RankedCorpus,
    local_ids: &[String],
) -> Result<DoubleRankSeries, RankingError> {
    let ranks = global.ranks_of(local_ids)?;
    DoubleRankSeries::from_global_ranks(ranks, global.n())
}

/// Rank boundary of the global top x%: k = floor(x*N/100). Integer x is
/// computed exactly in integer arithmetic.
pub fn top_boundary(x: f64, n_global: usize) -> Result<usize, RankingError> {
    if !(x > 0.0 && x <= 100.0) {
        return Err(RankingError::PercentageOutOfRange(x));
    }
    if x.fract() == 0.0 {
        Ok((x as u128 * n_global as u128 / 100) as usize)
    } else {
        Ok(((x / 100.0) * n_global as f64).floor() as usize)
    }
}

/// Number of local papers within the global top x%.
pub fn top_count(
    global: &RankedCorpus,
    local_ids: &[String],
    x: f64,
) -> Result<usize, RankingError> {
    let ranks = global.ranks_of(local_ids)?;
    top_count_from_ranks(&ranks, global.n(), x)
}

/// Same as [`top_count`], on pre-sorted global ranks.
pub fn top_count_from_ranks(
    sorted_ranks: &[usize],
    n_global: usize,
    x: f64,
) -> Result<usize, RankingError> {
    let k = top_boundary(x, n_global)?;
    Ok(sorted_ranks.partition_point(|&r| r <= k))
}

/// Percentiles at which profile counts are taken.
pub const PROFILE_PERCENTILES: [f64; 7] = [1.0, 3.0, 5.0, 10.0, 30.0, 50.0, 100.0];

/// Serial ratios: (numerator percentile index, denominator percentile
/// index) into [`PROFILE_PERCENTILES`]; the denominator of r1 is P itself
/// (index of the 100% count).
pub const RATIO_PAIRS: [(usize, usize); 4] = [(3, 6), (2, 5), (1, 4), (0, 3)];

/// Short ratio names in serial order, for reports.
pub const RATIO_NAMES: [&str; 4] = ["r10_P", "r5_50", "r3_30", "r1_10"];

/// Top-percentile counts and the serial ratios of the ideal-model test.
/// A ratio is unsupported (None) when its numerator count is below
/// `min_support` or its denominator count is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentileProfile {
    /// Group size (= count at 100%).
    pub p: usize,
    pub n_global: usize,
    /// Counts aligned with [`PROFILE_PERCENTILES`].
    pub counts: [usize; 7],
    /// r1 = c10/P, r2 = c5/c50, r3 = c3/c30, r4 = c1/c10.
    pub ratios: [Option<f64>; 4],
    pub min_support: usize,
}

impl PercentileProfile {
    /// Ratios that are supported, in serial order.
    pub fn supported_ratios(&self) -> Vec<f64> {
        self.ratios.iter().flatten().copied().collect()
    }

    pub fn count_at(&self, x: f64) -> Option<usize> {
        PROFILE_PERCENTILES
            .iter()
            .position(|&p| p == x)
            .map(|i| self.counts[i])
    }
}

/// Profile of a group of local ids against the global order.
pub fn percentile_profile(
    global: &RankedCorpus,
    local_ids: &[String],
    min_support: usize,
) -> Result<PercentileProfile, RankingError> {
    let ranks = global.ranks_of(local_ids)?;
    percentile_profile_from_ranks(&ranks, global.n(), min_support)
}

/// Same as [`percentile_profile`], on pre-sorted global ranks.
pub fn percentile_profile_from_ranks(
    sorted_ranks: &[usize],
    n_global: usize,
    min_support: usize,
) -> Result<PercentileProfile, RankingError> {
    if min_support == 0 {
        return Err(RankingError::ZeroMinSupport);
    }
    let mut counts = [0usize; 7];
    for (i, &x) in PROFILE_PERCENTILES.iter().enumerate() {
        counts[i] = top_count_from_ranks(sorted_ranks, n_global, x)?;
    }
    let mut ratios = [None; 4];
    for (r, &(num, den)) in RATIO_PAIRS.iter().enumerate() {
        let (cn, cd) = (counts[num], counts[den]);
        if cn >= min_support && cd > 0 {
            ratios[r] = Some(cn as f64 / cd as f64);
        }
    }
    Ok(PercentileProfile {
        p: sorted_ranks.len(),
        n_global,
        counts,
        ratios,
        min_support,
    })
}

/// Distinct labels of a grouping key, for per-group iteration.
pub fn group_ids(corpus: &Corpus, label: &str) -> Vec<String> {
    corpus
        .records
        .iter()
        .filter(|r| r.groups.contains(label))
        .map(|r| r.id.clone())
        .collect()
}

/// Ids of records published in a given journal.
pub fn journal_ids(corpus: &Corpus, journal: &str) -> Vec<String> {
    corpus
        .records
        .iter()
        .filter(|r| r.journal.as_deref() == Some(journal))
        .map(|r| r.id.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PaperRecord;
    use proptest::prelude::*;
    use std::collections::{BTreeMap, BTreeSet};

    fn rec(id: &str, year: i32, citations: u64) -> PaperRecord {
        PaperRecord {
            id: id.to_string(),
            year,
            citations,
            journal: None,
            groups: BTreeSet::new(),
            topic: None,
            extra: BTreeMap::new(),
        }
    }

    fn corpus(records: Vec<PaperRecord>) -> Corpus {
        Corpus::from_records(records, None).unwrap()
    }

    #[test]
    fn later_year_wins_citation_tie() {
        // equal citations: 10/6 cpy beats 10/9 at reference year 2023
        let c = corpus(vec![rec("a", 2014, 10), rec("b", 2017, 10)]);
        let ranked = total_order(&c, 2023).unwrap();
        assert_eq!(ranked.records()[0].id, "b");
        assert_eq!(ranked.rank_of("b"), Some(1));
        assert_eq!(ranked.rank_of("a"), Some(2));
    }

    #[test]
    fn single_record_gets_rank_one() {
        let c = corpus(vec![rec("only", 2015, 3)]);
        let ranked = total_order(&c, 2020).unwrap();
        assert_eq!(ranked.rank_of("only"), Some(1));
        assert_eq!(ranked.n(), 1);
    }

    #[test]
    fn full_tie_breaks_on_id() {
        let c = corpus(vec![rec("10.1/b", 2015, 4), rec("10.1/a", 2015, 4)]);
        let ranked = total_order(&c, 2020).unwrap();
        assert_eq!(ranked.records()[0].id, "10.1/a");
    }

    #[test]
    fn empty_corpus_and_bad_reference_year() {
        let c = corpus(vec![]);
        assert!(matches!(total_order(&c, 2020), Err(RankingError::EmptyCorpus)));
        let c = corpus(vec![rec("a", 2017, 1)]);
        assert!(matches!(
            total_order(&c, 2017),
            Err(RankingError::ReferenceYearTooEarly { .. })
        ));
    }

    fn seq_corpus(n: usize) -> Corpus {
        // distinct citation counts, so ranks follow construction order
        corpus((0..n).map(|i| rec(&format!("p{i:04}"), 2015, (n - i) as u64 * 3)).collect())
    }

    #[test]
    fn double_rank_identity() {
        let c = seq_corpus(5);
        let ranked = total_order(&c, 2020).unwrap();
        let series = double_rank(&ranked, &c.ids()).unwrap();
        for (i, pair) in series.pairs.iter().enumerate() {
            assert_eq!(pair.local, i + 1);
            assert_eq!(pair.global, i + 1);
        }
    }

    #[test]
    fn double_rank_picks_out_global_ranks() {
        let c = seq_corpus(10);
        let ranked = total_order(&c, 2020).unwrap();
        let ids = vec!["p0001".to_string(), "p0006".to_string(), "p0008".to_string()];
        let series = double_rank(&ranked, &ids).unwrap();
        let got: Vec<(usize, usize)> = series.pairs.iter().map(|p| (p.local, p.global)).collect();
        assert_eq!(got, vec![(1, 2), (2, 7), (3, 9)]);
    }

    #[test]
    fn double_rank_unknown_id() {
        let c = seq_corpus(3);
        let ranked = total_order(&c, 2020).unwrap();
        let err = double_rank(&ranked, &["nope".to_string()]).unwrap_err();
        match err {
            RankingError::UnknownId(id) => assert_eq!(id, "nope"),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn top_count_boundary_example() {
        let c = seq_corpus(100);
        let ranked = total_order(&c, 2020).unwrap();
        let ids = vec!["p0002".to_string(), "p0010".to_string()]; // ranks 3 and 11
        assert_eq!(top_count(&ranked, &ids, 10.0).unwrap(), 1);
    }

    #[test]
    fn top_count_self_evaluation_is_floor() {
        let c = seq_corpus(137);
        let ranked = total_order(&c, 2020).unwrap();
        let ids = c.ids();
        for x in PROFILE_PERCENTILES {
            let want = (x as usize) * 137 / 100;
            assert_eq!(top_count(&ranked, &ids, x).unwrap(), want, "x = {x}");
        }
    }

    #[test]
    fn top_count_range_check() {
        let c = seq_corpus(10);
        let ranked = total_order(&c, 2020).unwrap();
        assert!(matches!(
            top_count(&ranked, &c.ids(), 0.0),
            Err(RankingError::PercentageOutOfRange(_))
        ));
        assert!(top_count(&ranked, &c.ids(), 100.0).is_ok());
        assert!(top_count(&ranked, &c.ids(), 100.1).is_err());
    }

    #[test]
    fn top_count_matches_brute_force_scan() {
        // seeded synthetic corpus; oracle scans the ranked list directly
        let spec = crate::synth::SynthSpec {
            n: 500,
            mu: 2.0,
            sigma: 1.3,
            extra_zero_fraction: 0.05,
            seed: 11,
        };
        let c = crate::synth::make_global_corpus(
            &spec,
            &[crate::synth::GroupPlan::shared("all", 500)],
        )
        .unwrap();
        let ranked = total_order(&c, 2020).unwrap();
        let mut rng = crate::synth::Prng::new(99);
        let local: Vec<String> = c
            .ids()
            .into_iter()
            .filter(|_| rng.next_f64() < 0.3)
            .collect();
        for x in [1.0, 3.0, 5.0, 10.0, 30.0, 50.0] {
            let k = top_boundary(x, ranked.n()).unwrap();
            let want = ranked.records()[..k]
                .iter()
                .filter(|r| local.contains(&r.id))
                .count();
            assert_eq!(top_count(&ranked, &local, x).unwrap(), want, "x = {x}");
        }
    }

    #[test]
    fn profile_self_evaluation() {
        let c = seq_corpus(1000);
        let ranked = total_order(&c, 2020).unwrap();
        let profile = percentile_profile(&ranked, &c.ids(), 10).unwrap();
        for r in profile.ratios {
            let r = r.expect("all supported");
            assert!((r - 0.1).abs() < 2.0 / 1000.0, "ratio = {r}");
        }
        assert_eq!(profile.counts[6], 1000);
    }

    #[test]
    fn profile_marks_unsupported_ratios() {
        // 5 local papers in a corpus of 100: c1 = c3 = 0, denominators fine
        let c = seq_corpus(100);
        let ranked = total_order(&c, 2020).unwrap();
        let ids: Vec<String> = (40..45).map(|i| format!("p{i:04}")).collect();
        let profile = percentile_profile(&ranked, &ids, 1).unwrap();
        assert_eq!(profile.ratios[3], None); // c1 = 0 < min_support
        let profile = percentile_profile(&ranked, &ids, 10).unwrap();
        assert!(profile.ratios.iter().all(Option::is_none));
    }

    #[test]
    fn ideal_subsample_has_equal_serial_ratios() {
        // generated from local = C * global^alpha: every serial ratio is
        // 0.1^alpha
        let alpha = 0.8;
        let ranks =
            crate::synth::sample_ideal_subsample(100_000, 2000, alpha, 3, true).unwrap();
        let profile = percentile_profile_from_ranks(&ranks, 100_000, 10).unwrap();
        let want = 0.1f64.powf(alpha);
        for r in profile.ratios {
            let r = r.expect("supported");
            assert!((r - want).abs() < 0.02, "ratio = {r}, want ~{want}");
        }
    }

    proptest! {
        #[test]
        fn total_order_is_a_permutation(
            cit in proptest::collection::vec(0u64..50, 1..120),
            years in proptest::collection::vec(2014i32..2018, 120),
        ) {
            let records: Vec<PaperRecord> = cit
                .iter()
                .enumerate()
                .map(|(i, &c)| rec(&format!("r{i:03}"), years[i], c))
                .collect();
            let n = records.len();
            let c = corpus(records);
            let ranked = total_order(&c, 2023).unwrap();
            // citations non-increasing along ranks
            for w in ranked.records().windows(2) {
                prop_assert!(w[0].citations >= w[1].citations);
            }
            // ranks are a permutation of 1..n
            let mut ranks: Vec<usize> = c.ids().iter().map(|id| ranked.rank_of(id).unwrap()).collect();
            ranks.sort_unstable();
            prop_assert_eq!(ranks, (1..=n).collect::<Vec<_>>());
        }

        #[test]
        fn extra_citation_never_worsens_rank(
            cit in proptest::collection::vec(0u64..30, 2..80),
            pick in 0usize..80,
        ) {
            let n = cit.len();
            let pick = pick % n;
            let make = |boost: u64| -> Vec<PaperRecord> {
                cit.iter()
                    .enumerate()
                    .map(|(i, &c)| rec(&format!("r{i:03}"), 2015, c + if i == pick { boost } else { 0 }))
                    .collect()
            };
            let before = total_order(&corpus(make(0)), 2020).unwrap();
            let after = total_order(&corpus(make(1)), 2020).unwrap();
            let id = format!("r{pick:03}");
            prop_assert!(after.rank_of(&id).unwrap() <= before.rank_of(&id).unwrap());
        }

        #[test]
        fn counts_monotone_and_pairs_valid(
            picks in proptest::collection::btree_set(0usize..400, 3..120),
        ) {
            let c = seq_corpus(400);
            let ranked = total_order(&c, 2020).unwrap();
            let ids: Vec<String> = picks.iter().map(|&i| format!("p{i:04}")).collect();
            let profile = percentile_profile(&ranked, &ids, 1).unwrap();
            for w in profile.counts.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            prop_assert_eq!(profile.counts[6], ids.len());
            let series = double_rank(&ranked, &ids).unwrap();
            for pair in &series.pairs {
                prop_assert!(pair.global >= pair.local);
            }
            for w in series.pairs.windows(2) {
                prop_assert!(w[1].local > w[0].local && w[1].global > w[0].global);
            }
        }
    }
}
