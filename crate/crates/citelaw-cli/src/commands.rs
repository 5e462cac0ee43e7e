//! Subcommand implementations. Each command loads and filters the
//! corpus, runs the analyses, writes its output files under the
//! configured directory, and returns the written paths.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use citelaw::corpus::{load_corpus, load_corpus_with_window, load_journal_sidecar, Corpus, InputFormat};
use citelaw::distfit::{
    fit_lognormal, ks_test, ks_test_fixed, log_histogram, npp, p_value_band, KsResult,
    LogHistogram, Shift,
};
use citelaw::indicators::{quartet, ratios_agree, IndicatorRow};
use citelaw::ranking::{
    double_rank, percentile_profile, top_count_from_ranks, total_order, DoubleRankSeries,
    RankedCorpus,
};
use citelaw::rankfit::{
    classify_curvature, downscale_histogram, fit_power_law, segment_slopes, CurvatureClass,
    PowerLawFit, ScaledHistogram, SegmentSlopes, FULL_RANGE,
};
use citelaw::synth::{
    make_global_corpus, scenarios, sample_discrete_lognormal, CitationGen, GroupPlan, SynthSpec,
};

use crate::config::{sanitize_label, GroupBy, KsMethodChoice, RunConfig, ShiftPolicy};
use crate::report;
use crate::svg::{Plot, PlotLine, PlotSeries, Scale, SERIES_COLORS};
use crate::CliError;

/// Corpus after filtering, with the resolved reference year.
pub struct Workspace {
    pub corpus: Corpus,
    pub reference_year: i32,
}

pub fn load_workspace(config: &RunConfig) -> Result<Workspace, CliError> {
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| CliError::Validation("--input is required".to_string()))?;
    let format = config
        .format
        .unwrap_or_else(|| InputFormat::from_path(input));
    let mut corpus = match config.pub_window {
        Some(window) => load_corpus_with_window(input, format, window)?,
        None => load_corpus(input, format)?,
    };
    if let Some(meta) = &config.journal_meta {
        corpus.journals = load_journal_sidecar(meta)?;
    }
    let (filtered, warnings) = corpus.select(&config.filter);
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if filtered.is_empty() {
        return Err(CliError::Insufficient(
            "no records left after filtering".to_string(),
        ));
    }
    let reference_year = config
        .reference_year
        .unwrap_or(filtered.pub_window.1 + 1);
    Ok(Workspace {
        corpus: filtered,
        reference_year,
    })
}

impl Workspace {
    pub fn ranked(&self) -> Result<RankedCorpus, CliError> {
        Ok(total_order(&self.corpus, self.reference_year)?)
    }

    /// Distinct labels of the grouping key, sorted.
    pub fn labels(&self, group_by: GroupBy) -> Vec<String> {
        let set: BTreeSet<String> = match group_by {
            GroupBy::Groups => self.corpus.group_labels(),
            GroupBy::Journal => self.corpus.journal_labels(),
        };
        set.into_iter().collect()
    }

    pub fn ids_for(&self, group_by: GroupBy, label: &str) -> Vec<String> {
        match group_by {
            GroupBy::Groups => citelaw::ranking::group_ids(&self.corpus, label),
            GroupBy::Journal => citelaw::ranking::journal_ids(&self.corpus, label),
        }
    }

    pub fn citations_for(&self, group_by: GroupBy, label: &str) -> Vec<u64> {
        self.corpus
            .records
            .iter()
            .filter(|r| match group_by {
                GroupBy::Groups => r.groups.contains(label),
                GroupBy::Journal => r.journal.as_deref() == Some(label),
            })
            .map(|r| r.citations)
            .collect()
    }
}

fn resolve_shift(policy: ShiftPolicy, citations: &[u64]) -> Shift {
    match policy {
        ShiftPolicy::Auto => Shift::auto(citations),
        ShiftPolicy::Zero => Shift::Zero,
        ShiftPolicy::One => Shift::One,
    }
}

fn write_out(config: &RunConfig, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&config.out)?;
    let path = config.out.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn indicator_rows(config: &RunConfig, ws: &Workspace) -> Result<Vec<IndicatorRow>, CliError> {
    let ranked = ws.ranked()?;
    let mut rows = Vec::new();
    for label in ws.labels(config.group_by) {
        let ids = ws.ids_for(config.group_by, &label);
        if ids.is_empty() {
            continue;
        }
        let profile = percentile_profile(&ranked, &ids, config.min_support)?;
        let citations = ws.citations_for(config.group_by, &label);
        rows.push(IndicatorRow::compute(
            label,
            &citations,
            profile,
            config.tolerance,
        )?);
    }
    report::sort_rows(&mut rows);
    Ok(rows)
}

/// Per-group indicator table.
pub fn cmd_indicators(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let ws = load_workspace(config)?;
    let rows = indicator_rows(config, &ws)?;
    if rows.is_empty() {
        return Err(CliError::Insufficient(
            "no groups under the selected grouping key".to_string(),
        ));
    }
    let mut written = Vec::new();
    if config.emit.csv {
        written.push(write_out(config, "indicators.csv", &report::indicators_csv(&rows))?);
    }
    if config.emit.md {
        written.push(write_out(config, "indicators.md", &report::indicators_md(&rows))?);
    }
    Ok(written)
}

struct GroupAnalysis {
    series: DoubleRankSeries,
    full: Option<PowerLawFit>,
    segments: SegmentSlopes,
    curvature: Option<CurvatureClass>,
}

fn analyze_group(
    config: &RunConfig,
    ws: &Workspace,
    ranked: &RankedCorpus,
    label: &str,
) -> Result<GroupAnalysis, CliError> {
    let ids = ws.ids_for(config.group_by, label);
    if ids.len() < 3 {
        return Err(CliError::Insufficient(format!(
            "group `{label}` has {} records, need at least 3",
            ids.len()
        )));
    }
    let series = double_rank(ranked, &ids)?;
    let full = fit_power_law(&series, FULL_RANGE).ok();
    let segments = segment_slopes(&series);
    let curvature = classify_curvature(&series, config.curvature_threshold).ok();
    Ok(GroupAnalysis {
        series,
        full,
        segments,
        curvature,
    })
}

fn percentile_markers(
    config: &RunConfig,
    series: &DoubleRankSeries,
) -> Result<Vec<(f64, f64)>, CliError> {
    let ranks = series.global_ranks();
    let mut markers = Vec::new();
    for &x in &config.percentiles {
        let c = top_count_from_ranks(&ranks, series.n_global, x)?;
        if c >= 1 {
            let pair = series.pairs[c - 1];
            markers.push((pair.global as f64, pair.local as f64));
        }
    }
    Ok(markers)
}

fn doublerank_plot(
    label: &str,
    series: &DoubleRankSeries,
    full: Option<&PowerLawFit>,
    markers: Vec<(f64, f64)>,
) -> Plot {
    let points: Vec<(f64, f64)> = series
        .pairs
        .iter()
        .map(|p| (p.global as f64, p.local as f64))
        .collect();
    let lines = full
        .map(|f| {
            vec![PlotLine {
                slope: f.alpha,
                intercept: f.ln_c / std::f64::consts::LN_10,
                color: "#555555",
            }]
        })
        .unwrap_or_default();
    Plot {
        title: format!("double rank: {label}"),
        x_label: "global rank".to_string(),
        y_label: "local rank".to_string(),
        x_scale: Scale::Log10,
        y_scale: Scale::Log10,
        series: vec![PlotSeries {
            name: label.to_string(),
            color: SERIES_COLORS[0],
            points,
        }],
        markers,
        lines,
    }
}

/// Double-rank series, fit summary and plot for one group.
pub fn cmd_doublerank(config: &RunConfig, label: &str) -> Result<Vec<PathBuf>, CliError> {
    let ws = load_workspace(config)?;
    let ranked = ws.ranked()?;
    let analysis = analyze_group(config, &ws, &ranked, label)?;
    let safe = sanitize_label(label);
    let mut written = Vec::new();
    if config.emit.csv {
        written.push(write_out(
            config,
            &format!("doublerank_{safe}.csv"),
            &report::series_csv(&analysis.series),
        )?);
        written.push(write_out(
            config,
            &format!("doublerank_{safe}_fit.csv"),
            &report::fit_csv(
                analysis.full.as_ref(),
                &analysis.segments,
                analysis.curvature.as_ref(),
            ),
        )?);
    }
    if config.emit.svg {
        let markers = percentile_markers(config, &analysis.series)?;
        let plot = doublerank_plot(label, &analysis.series, analysis.full.as_ref(), markers);
        written.push(write_out(config, &format!("doublerank_{safe}.svg"), &plot.render())?);
    }
    Ok(written)
}

fn run_ks(config: &RunConfig, citations: &[u64], shift: Shift) -> Result<KsResult, CliError> {
    Ok(match config.ks_method {
        KsMethodChoice::Lilliefors => ks_test(citations, shift, config.mc_runs, config.seed)?,
        KsMethodChoice::Fixed => ks_test_fixed(citations, shift)?,
    })
}

fn distfit_summary_csv(
    label: &str,
    fit: &citelaw::distfit::LognormalFit,
    ks: &KsResult,
    config: &RunConfig,
) -> String {
    let mut out =
        String::from("label,n,shift,mu,sigma,ks_method,ks_d,ks_p,ks_p_band,mc_runs,seed\n");
    let mc = match ks.method {
        citelaw::distfit::KsMethod::MonteCarloLilliefors => config.mc_runs.to_string(),
        citelaw::distfit::KsMethod::FixedParameter => String::new(),
    };
    out.push_str(&format!(
        "{},{},{},{:.6},{:.6},{},{:.6},{:.6},{},{},{}\n",
        report::csv_field(label),
        fit.n,
        fit.shift,
        fit.mu,
        fit.sigma,
        ks.method,
        ks.d,
        ks.p_value,
        p_value_band(ks.p_value),
        mc,
        config.seed,
    ));
    out
}

/// Histogram, NPP series and lognormal goodness-of-fit for one group.
pub fn cmd_distfit(config: &RunConfig, label: &str) -> Result<Vec<PathBuf>, CliError> {
    let ws = load_workspace(config)?;
    let citations = ws.citations_for(config.group_by, label);
    if citations.len() < 5 {
        return Err(CliError::Insufficient(format!(
            "group `{label}` has {} records, need at least 5",
            citations.len()
        )));
    }
    let shift = resolve_shift(config.shift, &citations);
    let hist = log_histogram(&citations)?;
    let series = npp(&citations, shift)?;
    let fit = fit_lognormal(&citations, shift)?;
    let ks = run_ks(config, &citations, shift)?;

    let safe = sanitize_label(label);
    let mut written = Vec::new();
    if config.emit.csv {
        written.push(write_out(
            config,
            &format!("distfit_{safe}_hist.csv"),
            &report::histogram_csv(&hist),
        )?);
        written.push(write_out(
            config,
            &format!("distfit_{safe}_npp.csv"),
            &report::npp_csv(&series),
        )?);
        written.push(write_out(
            config,
            &format!("distfit_{safe}_summary.csv"),
            &distfit_summary_csv(label, &fit, &ks, config),
        )?);
    }
    if config.emit.svg {
        let points: Vec<(f64, f64)> = series.points.iter().map(|p| (p.z, p.value)).collect();
        let plot = Plot {
            title: format!("normal probability plot: {label} (shift {})", series.shift),
            x_label: "normal quantile".to_string(),
            y_label: format!("ln(citations + {})", series.shift),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: vec![PlotSeries {
                name: label.to_string(),
                color: SERIES_COLORS[0],
                points,
            }],
            markers: Vec::new(),
            lines: vec![PlotLine {
                slope: fit.sigma,
                intercept: fit.mu,
                color: "#555555",
            }],
        };
        written.push(write_out(config, &format!("distfit_{safe}_npp.svg"), &plot.render())?);
    }
    println!(
        "{label}: n={} shift={} mu={:.3} sigma={:.3} D={:.4} p={} ",
        fit.n,
        fit.shift,
        fit.mu,
        fit.sigma,
        ks.d,
        p_value_band(ks.p_value)
    );
    Ok(written)
}

fn segment_agreement(seg: &SegmentSlopes, tolerance: f64) -> Option<bool> {
    match (&seg.top10, &seg.bottom50) {
        (Some(a), Some(b)) => Some(ratios_agree(a.alpha, b.alpha, tolerance)),
        _ => None,
    }
}

/// Overlay comparison of two groups: series, scaled histogram overlay,
/// quartets and a verdict.
pub fn cmd_compare(config: &RunConfig, label_a: &str, label_b: &str) -> Result<Vec<PathBuf>, CliError> {
    let ws = load_workspace(config)?;
    let ranked = ws.ranked()?;
    let a = analyze_group(config, &ws, &ranked, label_a)?;
    let b = analyze_group(config, &ws, &ranked, label_b)?;

    let cit_a = ws.citations_for(config.group_by, label_a);
    let cit_b = ws.citations_for(config.group_by, label_b);
    let hist_a = log_histogram(&cit_a)?;
    let hist_b = log_histogram(&cit_b)?;
    // scale the larger group down to the smaller, keep the smaller as is
    let (scaled_a, scaled_b) = if hist_a.total >= hist_b.total {
        (
            downscale_histogram(&hist_a, hist_b.total)?,
            as_scaled(&hist_b),
        )
    } else {
        (
            as_scaled(&hist_a),
            downscale_histogram(&hist_b, hist_a.total)?,
        )
    };

    let ranks_a = a.series.global_ranks();
    let ranks_b = b.series.global_ranks();
    let quartet_a = quartet(&citelaw::ranking::percentile_profile_from_ranks(
        &ranks_a,
        ranked.n(),
        config.min_support,
    )?);
    let quartet_b = quartet(&citelaw::ranking::percentile_profile_from_ranks(
        &ranks_b,
        ranked.n(),
        config.min_support,
    )?);

    let agree_a = segment_agreement(&a.segments, config.tolerance).ok_or_else(|| {
        CliError::Insufficient(format!("group `{label_a}`: segment slopes unavailable"))
    })?;
    let agree_b = segment_agreement(&b.segments, config.tolerance).ok_or_else(|| {
        CliError::Insufficient(format!("group `{label_b}`: segment slopes unavailable"))
    })?;
    let verdict = if agree_a && agree_b {
        "comparable-by-single-indicator"
    } else {
        "divergent-segments"
    };

    let safe_a = sanitize_label(label_a);
    let safe_b = sanitize_label(label_b);
    let stem = format!("compare_{safe_a}_vs_{safe_b}");
    let mut written = Vec::new();
    if config.emit.csv {
        written.push(write_out(
            config,
            &format!("{stem}_series_{safe_a}.csv"),
            &report::series_csv(&a.series),
        )?);
        written.push(write_out(
            config,
            &format!("{stem}_series_{safe_b}.csv"),
            &report::series_csv(&b.series),
        )?);
        written.push(write_out(
            config,
            &format!("{stem}_hist.csv"),
            &report::overlay_csv(&scaled_a, &scaled_b),
        )?);
        written.push(write_out(
            config,
            &format!("{stem}_quartets.csv"),
            &report::quartets_csv(&[
                (label_a.to_string(), quartet_a),
                (label_b.to_string(), quartet_b),
            ]),
        )?);
    }
    let verdict_text = verdict_block(
        verdict,
        config.tolerance,
        &[(label_a, &a.segments, agree_a), (label_b, &b.segments, agree_b)],
    );
    written.push(write_out(config, &format!("{stem}_verdict.txt"), &verdict_text)?);
    if config.emit.svg {
        let plot = compare_plot(config, label_a, label_b, &a, &b)?;
        written.push(write_out(config, &format!("{stem}.svg"), &plot.render())?);
    }
    println!("{label_a} vs {label_b}: {verdict}");
    Ok(written)
}

fn as_scaled(hist: &LogHistogram) -> ScaledHistogram {
    downscale_histogram(hist, hist.total).expect("identity scaling")
}

fn verdict_block(
    verdict: &str,
    tolerance: f64,
    groups: &[(&str, &SegmentSlopes, bool)],
) -> String {
    let mut out = format!("verdict: {verdict}\ntolerance: {tolerance}\n");
    for (label, seg, agree) in groups {
        let fmt = |f: &Option<PowerLawFit>| {
            f.as_ref()
                .map(|x| format!("{:.4}", x.alpha))
                .unwrap_or_else(|| "n/a".to_string())
        };
        out.push_str(&format!(
            "{label}: slope_top10={} slope_bottom50={} agree={}\n",
            fmt(&seg.top10),
            fmt(&seg.bottom50),
            agree
        ));
    }
    out
}

fn compare_plot(
    config: &RunConfig,
    label_a: &str,
    label_b: &str,
    a: &GroupAnalysis,
    b: &GroupAnalysis,
) -> Result<Plot, CliError> {
    let to_points = |s: &DoubleRankSeries| -> Vec<(f64, f64)> {
        s.pairs.iter().map(|p| (p.global as f64, p.local as f64)).collect()
    };
    let mut markers = percentile_markers(config, &a.series)?;
    markers.extend(percentile_markers(config, &b.series)?);
    Ok(Plot {
        title: format!("double rank: {label_a} vs {label_b}"),
        x_label: "global rank".to_string(),
        y_label: "local rank".to_string(),
        x_scale: Scale::Log10,
        y_scale: Scale::Log10,
        series: vec![
            PlotSeries {
                name: label_a.to_string(),
                color: SERIES_COLORS[0],
                points: to_points(&a.series),
            },
            PlotSeries {
                name: label_b.to_string(),
                color: SERIES_COLORS[1],
                points: to_points(&b.series),
            },
        ],
        markers,
        lines: Vec::new(),
    })
}

/// Synthetic-corpus generation arguments.
pub struct SimulateArgs {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub extra_zero_fraction: f64,
    /// "label:count" or "label:count:mu:sigma:zero_fraction" entries;
    /// empty means a single group covering everything.
    pub groups: Vec<String>,
    /// Preset corpus shape; overrides n/mu/sigma/groups.
    pub scenario: Option<ScenarioKind>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    JournalLike,
    ZeroInflated,
    SegmentCrossing,
}

fn parse_group_plan(expr: &str) -> Result<GroupPlan, CliError> {
    let parts: Vec<&str> = expr.split(':').collect();
    let parse_f = |s: &str, what: &str| -> Result<f64, CliError> {
        s.parse()
            .map_err(|_| CliError::Validation(format!("group spec `{expr}`: bad {what} `{s}`")))
    };
    match parts.as_slice() {
        [label, count] => Ok(GroupPlan {
            label: label.to_string(),
            count: count.parse().map_err(|_| {
                CliError::Validation(format!("group spec `{expr}`: bad count `{count}`"))
            })?,
            gen: CitationGen::Shared,
        }),
        [label, count, mu, sigma, zf] => Ok(GroupPlan {
            label: label.to_string(),
            count: count.parse().map_err(|_| {
                CliError::Validation(format!("group spec `{expr}`: bad count `{count}`"))
            })?,
            gen: CitationGen::Lognormal {
                mu: parse_f(mu, "mu")?,
                sigma: parse_f(sigma, "sigma")?,
                extra_zero_fraction: parse_f(zf, "zero fraction")?,
            },
        }),
        _ => Err(CliError::Validation(format!(
            "group spec `{expr}` is not label:count or label:count:mu:sigma:zf"
        ))),
    }
}

/// Write a synthetic corpus and print its summary.
pub fn cmd_simulate(config: &RunConfig, args: &SimulateArgs) -> Result<Vec<PathBuf>, CliError> {
    let corpus = match args.scenario {
        Some(ScenarioKind::JournalLike) => scenarios::journal_like(config.seed),
        Some(ScenarioKind::ZeroInflated) => scenarios::zero_inflated(config.seed),
        Some(ScenarioKind::SegmentCrossing) => scenarios::segment_crossing(config.seed),
        None => {
            let spec = SynthSpec {
                n: args.n,
                mu: args.mu,
                sigma: args.sigma,
                extra_zero_fraction: args.extra_zero_fraction,
                seed: config.seed,
            };
            let plan: Vec<GroupPlan> = if args.groups.is_empty() {
                vec![GroupPlan::shared("all", args.n)]
            } else {
                args.groups
                    .iter()
                    .map(|g| parse_group_plan(g))
                    .collect::<Result<_, _>>()?
            };
            // quick determinism check of the sampler itself before the
            // corpus assembly validates the plan
            sample_discrete_lognormal(&SynthSpec { n: 1, ..spec })?;
            make_global_corpus(&spec, &plan)?
        }
    };
    fs::create_dir_all(&config.out)?;
    let path = match &args.output {
        Some(p) => {
            if p.is_absolute() {
                p.clone()
            } else {
                config.out.join(p)
            }
        }
        None => config.out.join("corpus.jsonl"),
    };
    corpus.save_jsonl(&path)?;
    let citations = corpus.citations();
    let zero_share = citelaw::indicators::uncited_share(&citations)?;
    let mean = citelaw::indicators::mnc(&citations)?;
    println!(
        "n={} zero_share={:.4} mnc={:.1}",
        corpus.len(),
        zero_share,
        mean
    );
    Ok(vec![path])
}

/// Combined report: indicators plus fit and goodness-of-fit columns.
pub fn cmd_report(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let ws = load_workspace(config)?;
    let ranked = ws.ranked()?;
    let rows = indicator_rows(config, &ws)?;
    if rows.is_empty() {
        return Err(CliError::Insufficient(
            "no groups under the selected grouping key".to_string(),
        ));
    }

    let mut csv = String::from(
        "label,P,P0_pct,MNC,r10_P,r5_50,r3_30,r1_10,class,alpha,r2,slope_top10,slope_bottom50,quad_coeff,curvature,ks_p_band\n",
    );
    let mut md = String::from(
        "| label | P | P0 (%) | MNC | class | alpha | r2 | top10 | bottom50 | curvature | KS p |\n|---|---:|---:|---:|---|---:|---:|---:|---:|---|---|\n",
    );
    for row in &rows {
        let analysis = analyze_group(config, &ws, &ranked, &row.label).ok();
        let citations = ws.citations_for(config.group_by, &row.label);
        let shift = resolve_shift(config.shift, &citations);
        let ks = if citations.len() >= 5 {
            run_ks(config, &citations, shift).ok()
        } else {
            None
        };
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        let (alpha, r2, top10, bottom50, quad, curv) = match &analysis {
            Some(a) => (
                fmt(a.full.map(|f| f.alpha)),
                fmt(a.full.map(|f| f.r2)),
                fmt(a.segments.top10.map(|f| f.alpha)),
                fmt(a.segments.bottom50.map(|f| f.alpha)),
                fmt(a.curvature.map(|c| c.quad_coeff)),
                a.curvature
                    .map(|c| c.concavity.to_string())
                    .unwrap_or_default(),
            ),
            None => Default::default(),
        };
        let band = ks.map(|k| p_value_band(k.p_value)).unwrap_or_default();
        csv.push_str(&format!(
            "{},{alpha},{r2},{top10},{bottom50},{quad},{curv},{band}\n",
            report::indicator_csv_row(row)
        ));
        md.push_str(&format!(
            "| {} | {} | {:.1} | {:.1} | {} | {alpha} | {r2} | {top10} | {bottom50} | {curv} | {band} |\n",
            row.label.replace('|', "\\|"),
            row.p,
            row.p0 * 100.0,
            row.mnc,
            row.conformity.class,
        ));
    }

    let mut written = Vec::new();
    if config.emit.csv {
        written.push(write_out(config, "report.csv", &csv)?);
    }
    if config.emit.md {
        written.push(write_out(config, "report.md", &md)?);
    }
    Ok(written)
}
