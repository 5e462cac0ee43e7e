//! Table assembly and CSV/Markdown emission.
//!
//! Numbers follow the conventions of the printed indicator tables:
//! percentile ratios to 3 decimals, MNC and uncited percentage to 1
//! decimal, quartet ratios to 2 decimals. Unsupported cells stay blank.

use citelaw::indicators::{IndicatorQuartet, IndicatorRow};
use citelaw::ranking::DoubleRankSeries;
use citelaw::rankfit::{CurvatureClass, PowerLawFit, ScaledHistogram, SegmentSlopes};

/// Minimal RFC 4180 quoting: only when the field needs it.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| format!("{x:.decimals$}")).unwrap_or_default()
}

pub const INDICATOR_HEADER: &str = "label,P,P0_pct,MNC,r10_P,r5_50,r3_30,r1_10,class";

/// One indicator row in the CSV column contract.
pub fn indicator_csv_row(row: &IndicatorRow) -> String {
    let r = &row.profile.ratios;
    format!(
        "{},{},{:.1},{:.1},{},{},{},{},{}",
        csv_field(&row.label),
        row.p,
        row.p0 * 100.0,
        row.mnc,
        fmt_opt(r[0], 3),
        fmt_opt(r[1], 3),
        fmt_opt(r[2], 3),
        fmt_opt(r[3], 3),
        row.conformity.class,
    )
}

pub fn indicators_csv(rows: &[IndicatorRow]) -> String {
    let mut out = String::from(INDICATOR_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&indicator_csv_row(row));
        out.push('\n');
    }
    out
}

pub fn indicators_md(rows: &[IndicatorRow]) -> String {
    let mut out = String::new();
    out.push_str(
        "| label | P | P0 (%) | MNC | Ptop10%/P | Ptop5%/Ptop50% | Ptop3%/Ptop30% | Ptop1%/Ptop10% | class |\n",
    );
    out.push_str("|---|---:|---:|---:|---:|---:|---:|---:|---|\n");
    for row in rows {
        let r = &row.profile.ratios;
        out.push_str(&format!(
            "| {} | {} | {:.1} | {:.1} | {} | {} | {} | {} | {} |\n",
            row.label.replace('|', "\\|"),
            row.p,
            row.p0 * 100.0,
            row.mnc,
            fmt_opt(r[0], 3),
            fmt_opt(r[1], 3),
            fmt_opt(r[2], 3),
            fmt_opt(r[3], 3),
            row.conformity.class,
        ));
    }
    out
}

/// Sort rows into the deterministic report order: P descending, then
/// label ascending.
pub fn sort_rows(rows: &mut [IndicatorRow]) {
    rows.sort_by(|a, b| b.p.cmp(&a.p).then_with(|| a.label.cmp(&b.label)));
}

pub fn series_csv(series: &DoubleRankSeries) -> String {
    let mut out = String::from("local_rank,global_rank\n");
    for pair in &series.pairs {
        out.push_str(&format!("{},{}\n", pair.local, pair.global));
    }
    out
}

pub const FIT_HEADER: &str = "segment,range_lo,range_hi,n_points,alpha,lnC,r2,quad_coeff,curvature";

fn fit_cells(fit: Option<&PowerLawFit>) -> String {
    match fit {
        Some(f) => format!("{},{:.6},{:.6},{:.6}", f.n_points, f.alpha, f.ln_c, f.r2),
        None => ",,,".to_string(),
    }
}

/// Fit summary rows: full range first, then the two segments. Curvature
/// columns are filled on the full-range row only.
pub fn fit_csv(
    full: Option<&PowerLawFit>,
    segments: &SegmentSlopes,
    curvature: Option<&CurvatureClass>,
) -> String {
    let mut out = String::from(FIT_HEADER);
    out.push('\n');
    let curv_cells = match curvature {
        Some(c) => format!("{:.6},{}", c.quad_coeff, c.concavity),
        None => ",".to_string(),
    };
    out.push_str(&format!(
        "full,0.00,1.00,{},{curv_cells}\n",
        fit_cells(full)
    ));
    out.push_str(&format!(
        "top10,0.00,0.10,{},,\n",
        fit_cells(segments.top10.as_ref())
    ));
    out.push_str(&format!(
        "bottom50,0.50,1.00,{},,\n",
        fit_cells(segments.bottom50.as_ref())
    ));
    out
}

pub fn histogram_csv(hist: &citelaw::distfit::LogHistogram) -> String {
    let mut out = String::from("lower,upper,count\n");
    for bin in &hist.bins {
        out.push_str(&format!("{},{},{}\n", bin.lower, bin.upper, bin.count));
    }
    out
}

pub fn npp_csv(series: &citelaw::distfit::NppSeries) -> String {
    let mut out = String::from("position,z,ln_value\n");
    for p in &series.points {
        out.push_str(&format!("{:.6},{:.6},{:.6}\n", p.position, p.z, p.value));
    }
    out
}

/// Overlay of two histograms on the shared canonical bins; the longer
/// bin list wins, missing bins count zero.
pub fn overlay_csv(a: &ScaledHistogram, b: &ScaledHistogram) -> String {
    let mut out = String::from("lower,upper,freq_a,freq_b\n");
    let n = a.bins.len().max(b.bins.len());
    for i in 0..n {
        let bounds = a
            .bins
            .get(i)
            .map(|x| (x.lower, x.upper))
            .or_else(|| b.bins.get(i).map(|x| (x.lower, x.upper)))
            .unwrap();
        let fa = a.bins.get(i).map(|x| x.frequency).unwrap_or(0.0);
        let fb = b.bins.get(i).map(|x| x.frequency).unwrap_or(0.0);
        out.push_str(&format!("{},{},{fa:.3},{fb:.3}\n", bounds.0, bounds.1));
    }
    out
}

/// Quartet rows in the two-decimal style of country comparison tables.
pub fn quartets_csv(entries: &[(String, IndicatorQuartet)]) -> String {
    let mut out = String::from("label,P,lower_tail,mid,upper_extreme\n");
    for (label, q) in entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(label),
            q.size,
            fmt_opt(q.lower_tail, 2),
            fmt_opt(q.mid, 2),
            fmt_opt(q.upper_extreme, 2),
        ));
    }
    out
}
