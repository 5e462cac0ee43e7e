//! Scalar indicators and conformity with the ideal rank power law.
//!
//! Under the ideal model local = C * global^alpha the four serial ratios
//! P_top10%/P, P_top5%/P_top50%, P_top3%/P_top30%, P_top1%/P_top10% are
//! equal; a profile is classified by how far its supported ratios spread
//! around their mean, with monotone patterns singled out because they
//! are what deviating research systems actually produce.

use thiserror::Error;

use crate::ranking::PercentileProfile;

#[derive(Debug, Error)]
pub enum IndicatorError {
    #[error("empty input")]
    EmptyInput,
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sequence of {n} is too short (need at least {min})")]
    TooShort { n: usize, min: usize },
    #[error("correlation undefined for a constant sequence")]
    ConstantSequence,
}

/// Mean number of citations per paper.
pub fn mnc(citations: &[u64]) -> Result<f64, IndicatorError> {
    if citations.is_empty() {
        return Err(IndicatorError::EmptyInput);
    }
    let sum: u128 = citations.iter().map(|&c| c as u128).sum();
    Ok(sum as f64 / citations.len() as f64)
}

/// Fraction of papers with zero citations.
pub fn uncited_share(citations: &[u64]) -> Result<f64, IndicatorError> {
    if citations.is_empty() {
        return Err(IndicatorError::EmptyInput);
    }
    let zeros = citations.iter().filter(|&&c| c == 0).count();
    Ok(zeros as f64 / citations.len() as f64)
}

/// Sample Pearson correlation, single pass over co-moments.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, IndicatorError> {
    if xs.len() != ys.len() {
        return Err(IndicatorError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(IndicatorError::TooShort { n: xs.len(), min: 3 });
    }
    let mut mean_x = 0.0;
    let mut mean_y = 0.0;
    let mut cxx = 0.0;
    let mut cyy = 0.0;
    let mut cxy = 0.0;
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let k = (i + 1) as f64;
        let dx = x - mean_x;
        let dy = y - mean_y;
        mean_x += dx / k;
        mean_y += dy / k;
        // co-moment updates use the pre-update delta of one variable and
        // the post-update delta of the other
        cxx += dx * (x - mean_x);
        cyy += dy * (y - mean_y);
        cxy += dx * (y - mean_y);
    }
    if cxx == 0.0 || cyy == 0.0 {
        return Err(IndicatorError::ConstantSequence);
    }
    Ok((cxy / (cxx * cyy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConformityClass {
    Ideal,
    Increasing,
    Decreasing,
    Irregular,
    Insufficient,
}

impl std::fmt::Display for ConformityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConformityClass::Ideal => "ideal",
            ConformityClass::Increasing => "increasing",
            ConformityClass::Decreasing => "decreasing",
            ConformityClass::Irregular => "irregular",
            ConformityClass::Insufficient => "insufficient",
        };
        write!(f, "{s}")
    }
}

/// Conformity verdict plus the relative spread it was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conformity {
    pub class: ConformityClass,
    /// (max - min)/mean over the supported ratios; None when no ratio is
    /// supported.
    pub spread: Option<f64>,
}

/// Default spread tolerance for calling serial ratios equal.
pub const DEFAULT_TOLERANCE: f64 = 0.15;

/// Classify a profile: fewer than 3 supported ratios is `insufficient`;
/// spread below tolerance is `ideal`; otherwise strict monotonicity in
/// serial order decides `increasing`/`decreasing`, else `irregular`.
pub fn classify_conformity(profile: &PercentileProfile, tolerance: f64) -> Conformity {
    let ratios = profile.supported_ratios();
    let spread = relative_spread(&ratios);
    if ratios.len() < 3 {
        return Conformity {
            class: ConformityClass::Insufficient,
            spread,
        };
    }
    let spread_val = spread.unwrap();
    let class = if spread_val < tolerance {
        ConformityClass::Ideal
    } else if ratios.windows(2).all(|w| w[1] > w[0]) {
        ConformityClass::Increasing
    } else if ratios.windows(2).all(|w| w[1] < w[0]) {
        ConformityClass::Decreasing
    } else {
        ConformityClass::Irregular
    };
    Conformity {
        class,
        spread: Some(spread_val),
    }
}

fn relative_spread(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean == 0.0 {
        return Some(0.0);
    }
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    Some((max - min) / mean)
}

/// Whether two ratios agree within the spread tolerance.
pub fn ratios_agree(a: f64, b: f64, tolerance: f64) -> bool {
    relative_spread(&[a, b]).map(|s| s < tolerance).unwrap_or(false)
}

/// The minimum description of a research system: size, lower tail
/// (P_top50%/P), mid (P_top5%/P_top10%) and upper extreme
/// (P_top1%/P_top10%). Fields are None when their numerator count falls
/// below the profile's min_support or the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorQuartet {
    pub size: usize,
    pub lower_tail: Option<f64>,
    pub mid: Option<f64>,
    pub upper_extreme: Option<f64>,
}

/// Assemble the indicator quartet from a profile.
pub fn quartet(profile: &PercentileProfile) -> IndicatorQuartet {
    // counts index: 0=1%, 1=3%, 2=5%, 3=10%, 4=30%, 5=50%, 6=100%
    let c = &profile.counts;
    let ms = profile.min_support;
    let ratio = |num: usize, den: usize| -> Option<f64> {
        (num >= ms && den > 0).then(|| num as f64 / den as f64)
    };
    IndicatorQuartet {
        size: profile.p,
        lower_tail: ratio(c[5], c[6]),
        mid: ratio(c[2], c[3]),
        upper_extreme: ratio(c[0], c[3]),
    }
}

/// One row of an indicator table: group label, size, uncited share, MNC,
/// percentile profile and conformity class.
#[derive(Debug, Clone)]
pub struct IndicatorRow {
    pub label: String,
    pub p: usize,
    pub p0: f64,
    pub mnc: f64,
    pub profile: PercentileProfile,
    pub conformity: Conformity,
}

impl IndicatorRow {
    pub fn compute(
        label: impl Into<String>,
        citations: &[u64],
        profile: PercentileProfile,
        tolerance: f64,
    ) -> Result<IndicatorRow, IndicatorError> {
        let conformity = classify_conformity(&profile, tolerance);
        Ok(IndicatorRow {
            label: label.into(),
            p: profile.p,
            p0: uncited_share(citations)?,
            mnc: mnc(citations)?,
            profile,
            conformity,
        })
    }
}
