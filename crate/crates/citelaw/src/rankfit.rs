//! Power-law fitting and curvature diagnosis of double-rank series.
//!
//! All fits run in log-log space with ln(local rank) as the dependent
//! variable. The full-range fit estimates the exponent of
//! local = C * global^alpha; segment fits over the top-10% and
//! bottom-50% local-rank fractions expose the divergence that makes
//! single-indicator comparisons unreliable; a quadratic term classifies
//! the concavity of the lower tail.

use thiserror::Error;

use crate::distfit::LogHistogram;
use crate::ranking::DoubleRankSeries;

#[derive(Debug, Error)]
pub enum RankFitError {
    #[error("{got} points in range [{lo}, {hi}], need at least {need}")]
    TooFewPoints { got: usize, need: usize, lo: f64, hi: f64 },
    #[error("cannot upscale a histogram ({total} -> {target})")]
    UpscaleRefused { total: usize, target: usize },
    #[error("invalid local-rank range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
}

/// Least-squares line in log-log space: ln(local) = lnC + alpha*ln(global).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub ln_c: f64,
    pub r2: f64,
    /// Local-rank fraction interval the fit was restricted to.
    pub rank_range: (f64, f64),
    pub n_points: usize,
}

/// Full local-rank range.
pub const FULL_RANGE: (f64, f64) = (0.0, 1.0);
/// Top 10% of local ranks (most cited papers).
pub const TOP10_RANGE: (f64, f64) = (0.0, 0.10);
/// Bottom 50% of local ranks (least cited papers).
pub const BOTTOM50_RANGE: (f64, f64) = (0.5, 1.0);

fn points_in_range(series: &DoubleRankSeries, range: (f64, f64)) -> Vec<(f64, f64)> {
    let n = series.n_local as f64;
    series
        .pairs
        .iter()
        .filter(|p| {
            let frac = p.local as f64 / n;
            frac >= range.0 && frac <= range.1
        })
        .map(|p| ((p.global as f64).ln(), (p.local as f64).ln()))
        .collect()
}

/// OLS of ln(local) on ln(global) over the pairs whose local-rank
/// fraction lies in `range`.
pub fn fit_power_law(
    series: &DoubleRankSeries,
    range: (f64, f64),
) -> Result<PowerLawFit, RankFitError> {
    if !(range.0 <= range.1 && range.0 >= 0.0 && range.1 <= 1.0) {
        return Err(RankFitError::InvalidRange { lo: range.0, hi: range.1 });
    }
    let pts = points_in_range(series, range);
    if pts.len() < 3 {
        return Err(RankFitError::TooFewPoints {
            got: pts.len(),
            need: 3,
            lo: range.0,
            hi: range.1,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &pts {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let alpha = sxy / sxx;
    let ln_c = my - alpha * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        alpha,
        ln_c,
        r2,
        rank_range: range,
        n_points: pts.len(),
    })
}

/// Independent power-law fits over the top-10% and bottom-50% local-rank
/// segments; a segment with fewer than 3 points is unavailable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSlopes {
    pub top10: Option<PowerLawFit>,
    pub bottom50: Option<PowerLawFit>,
}

pub fn segment_slopes(series: &DoubleRankSeries) -> SegmentSlopes {
    SegmentSlopes {
        top10: fit_power_law(series, TOP10_RANGE).ok(),
        bottom50: fit_power_law(series, BOTTOM50_RANGE).ok(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Concavity {
    None,
    Downward,
    Upward,
}

impl std::fmt::Display for Concavity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Concavity::None => "none",
            Concavity::Downward => "downward",
            Concavity::Upward => "upward",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureClass {
    pub concavity: Concavity,
    /// Quadratic coefficient of the log-log fit.
    pub quad_coeff: f64,
    pub threshold: f64,
}

/// Default threshold on the quadratic coefficient, calibrated so ideal
/// synthetic series classify as `none` in at least 95% of seeded runs.
pub const DEFAULT_CURVATURE_THRESHOLD: f64 = 0.02;

/// Least-squares quadratic of ln(local) on ln(global); the sign of the
/// quadratic coefficient against the threshold names the concavity
/// (negative = downward, positive = upward).
pub fn classify_curvature(
    series: &DoubleRankSeries,
    threshold: f64,
) -> Result<CurvatureClass, RankFitError> {
    let pts = points_in_range(series, FULL_RANGE);
    if pts.len() < 10 {
        return Err(RankFitError::TooFewPoints {
            got: pts.len(),
            need: 10,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    // centering x keeps the normal equations well conditioned and leaves
    // the quadratic coefficient unchanged
    let (mut s1, mut s2, mut s3, mut s4) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut sy, mut sxy, mut sx2y) = (0.0f64, 0.0f64, 0.0f64);
    for &(x, y) in &pts {
        let d = x - mx;
        let d2 = d * d;
        s1 += d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
        sy += y;
        sxy += d * y;
        sx2y += d2 * y;
    }
    // normal equations for y = a + b*d + c*d^2
    let m = [[n, s1, s2], [s1, s2, s3], [s2, s3, s4]];
    let rhs = [sy, sxy, sx2y];
    let det = det3(&m);
    let mut mc = m;
    mc[0][2] = rhs[0];
    mc[1][2] = rhs[1];
    mc[2][2] = rhs[2];
    let quad_coeff = det3(&mc) / det;
    let concavity = if quad_coeff.abs() <= threshold {
        Concavity::None
    } else if quad_coeff < 0.0 {
        Concavity::Downward
    } else {
        Concavity::Upward
    };
    Ok(CurvatureClass {
        concavity,
        quad_coeff,
        threshold,
    })
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Histogram rescaled to a smaller total, for overlay plots.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledHistogram {
    pub bins: Vec<ScaledBin>,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBin {
    pub lower: u64,
    pub upper: u64,
    pub frequency: f64,
}

/// Multiply every frequency by target_total/total. Upscaling is refused.
pub fn downscale_histogram(
    hist: &LogHistogram,
    target_total: usize,
) -> Result<ScaledHistogram, RankFitError> {
    if target_total == 0 || target_total > hist.total {
        return Err(RankFitError::UpscaleRefused {
            total: hist.total,
            target: target_total,
        });
    }
    let scale = target_total as f64 / hist.total as f64;
    let bins = hist
        .bins
        .iter()
        .map(|b| ScaledBin {
            lower: b.lower,
            upper: b.upper,
            frequency: b.count as f64 * scale,
        })
        .collect();
    Ok(ScaledHistogram {
        bins,
        total: target_total as f64,
    })
}
