//! Run configuration shared by all subcommands.

use std::path::PathBuf;

use citelaw::corpus::{Filter, InputFormat};
use citelaw::indicators::DEFAULT_TOLERANCE;
use citelaw::ranking::PROFILE_PERCENTILES;
use citelaw::rankfit::DEFAULT_CURVATURE_THRESHOLD;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Groups,
    Journal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftPolicy {
    Auto,
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsMethodChoice {
    Lilliefors,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitSet {
    pub csv: bool,
    pub md: bool,
    pub svg: bool,
}

impl Default for EmitSet {
    fn default() -> Self {
        EmitSet { csv: true, md: false, svg: false }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// None: inferred from the input file extension.
    pub format: Option<InputFormat>,
    pub journal_meta: Option<PathBuf>,
    pub group_by: GroupBy,
    pub filter: Filter,
    /// Declared publication window; None infers it from the records.
    pub pub_window: Option<(i32, i32)>,
    /// None: first year after the publication window.
    pub reference_year: Option<i32>,
    pub percentiles: Vec<f64>,
    pub tolerance: f64,
    pub min_support: usize,
    pub seed: u64,
    pub mc_runs: usize,
    pub shift: ShiftPolicy,
    pub ks_method: KsMethodChoice,
    pub curvature_threshold: f64,
    pub out: PathBuf,
    pub emit: EmitSet,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            format: None,
            journal_meta: None,
            group_by: GroupBy::Groups,
            filter: Filter::default(),
            pub_window: None,
            reference_year: None,
            percentiles: PROFILE_PERCENTILES.to_vec(),
            tolerance: DEFAULT_TOLERANCE,
            min_support: 10,
            seed: 42,
            mc_runs: 5000,
            shift: ShiftPolicy::Auto,
            ks_method: KsMethodChoice::Lilliefors,
            curvature_threshold: DEFAULT_CURVATURE_THRESHOLD,
            out: PathBuf::from("out"),
            emit: EmitSet::default(),
        }
    }
}

/// Apply one `key=value` filter expression. Keys: group, journal, topic,
/// years (YYYY:YYYY). Repeated `group` keys accumulate.
pub fn apply_filter_kv(filter: &mut Filter, expr: &str) -> Result<(), CliError> {
    let (key, value) = expr
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("filter `{expr}` is not key=value")))?;
    match key {
        "group" => filter.groups.push(value.to_string()),
        "journal" => filter.journal = Some(value.to_string()),
        "topic" => filter.topic = Some(value.to_string()),
        "years" => filter.years = Some(parse_window(value)?),
        other => {
            return Err(CliError::Validation(format!(
                "unknown filter key `{other}` (expected group, journal, topic or years)"
            )))
        }
    }
    Ok(())
}

/// Parse an inclusive year window "YYYY:YYYY".
pub fn parse_window(s: &str) -> Result<(i32, i32), CliError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| CliError::Validation(format!("window `{s}` is not YYYY:YYYY")))?;
    let lo: i32 = lo
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("bad year `{lo}`")))?;
    let hi: i32 = hi
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("bad year `{hi}`")))?;
    if lo > hi {
        return Err(CliError::Validation(format!("window {lo}:{hi} is reversed")));
    }
    Ok((lo, hi))
}

/// Parse a comma-separated percentile list; each value in (0, 100].
pub fn parse_percentiles(s: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let x: f64 = part
            .parse()
            .map_err(|_| CliError::Validation(format!("bad percentile `{part}`")))?;
        if !(x > 0.0 && x <= 100.0) {
            return Err(CliError::Validation(format!(
                "percentile {x} outside (0, 100]"
            )));
        }
        out.push(x);
    }
    if out.is_empty() {
        return Err(CliError::Validation("empty percentile list".to_string()));
    }
    Ok(out)
}

/// Parse an emit set like "csv,md,svg".
pub fn parse_emit(s: &str) -> Result<EmitSet, CliError> {
    let mut set = EmitSet { csv: false, md: false, svg: false };
    for part in s.split(',') {
        match part.trim() {
            "csv" => set.csv = true,
            "md" => set.md = true,
            "svg" => set.svg = true,
            "" => {}
            other => {
                return Err(CliError::Validation(format!(
                    "unknown emit target `{other}` (expected csv, md or svg)"
                )))
            }
        }
    }
    if !(set.csv || set.md || set.svg) {
        return Err(CliError::Validation("empty emit set".to_string()));
    }
    Ok(set)
}

/// File-system safe version of a group label.
pub fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}
