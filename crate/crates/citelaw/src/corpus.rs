//! Record model and corpus ingestion.
//!
//! A corpus is an immutable list of publication records plus a little
//! metadata: the publication-year window, a free-form note about the
//! citation window, and an optional journal table (name → JIF). Input
//! formats are JSONL (one record per line) and CSV with a header row;
//! unknown fields are preserved opaquely and ignored by the analyses.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate record id `{id}`")]
    DuplicateId { id: String },
    #[error("record `{id}` (line {line}): negative citation count {value}")]
    NegativeCitations { id: String, line: usize, value: i64 },
    #[error("record `{id}`: year {year} outside declared window {lo}..={hi}")]
    YearOutsideWindow { id: String, year: i32, lo: i32, hi: i32 },
    #[error("invalid publication window {lo}..={hi}")]
    InvalidWindow { lo: i32, hi: i32 },
    #[error("csv is missing required column `{0}`")]
    MissingColumn(&'static str),
}

/// One publication. `groups` carries country-style labels; a paper
/// written by a multi-country collaboration carries several.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperRecord {
    pub id: String,
    pub year: i32,
    pub citations: u64,
    pub journal: Option<String>,
    pub groups: BTreeSet<String>,
    pub topic: Option<String>,
    /// Fields present in the input but unknown to the analyses, kept for
    /// lossless re-serialization.
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JournalMeta {
    pub name: String,
    pub jif: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub records: Vec<PaperRecord>,
    /// Inclusive publication-year window (start, end).
    pub pub_window: (i32, i32),
    pub citation_window_note: String,
    pub journals: BTreeMap<String, JournalMeta>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    /// Guess the format from a file extension; defaults to JSONL.
    pub fn from_path(path: &Path) -> InputFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => InputFormat::Csv,
            _ => InputFormat::Jsonl,
        }
    }
}

/// Selection criteria. A record matches when it satisfies *all* present
/// fields; `groups` matches when the record carries any of the listed
/// labels. `single_group` additionally restricts to records with exactly
/// one group label (whole counting of domestic papers).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filter {
    pub groups: Vec<String>,
    pub journal: Option<String>,
    pub topic: Option<String>,
    pub years: Option<(i32, i32)>,
    pub single_group: bool,
}

impl Filter {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
            && self.journal.is_none()
            && self.topic.is_none()
            && self.years.is_none()
            && !self.single_group
    }

    fn matches(&self, r: &PaperRecord) -> bool {
        if !self.groups.is_empty() && !self.groups.iter().any(|g| r.groups.contains(g)) {
            return false;
        }
        if let Some(j) = &self.journal {
            if r.journal.as_deref() != Some(j.as_str()) {
                return false;
            }
        }
        if let Some(t) = &self.topic {
            if r.topic.as_deref() != Some(t.as_str()) {
                return false;
            }
        }
        if let Some((lo, hi)) = self.years {
            if r.year < lo || r.year > hi {
                return false;
            }
        }
        if self.single_group && r.groups.len() != 1 {
            return false;
        }
        true
    }
}

// Wire form of a record. Extra fields land in `extra` via flatten and are
// written back out after the known ones (BTreeMap keeps them sorted).
#[derive(Deserialize)]
struct RecordDe {
    id: String,
    year: i32,
    citations: i64,
    #[serde(default)]
    journal: Option<String>,
    #[serde(default)]
    groups: Vec<String>,
    #[serde(default)]
    topic: Option<String>,
    #[serde(flatten)]
    extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize)]
struct RecordSer<'a> {
    id: &'a str,
    year: i32,
    citations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    journal: Option<&'a str>,
    groups: &'a BTreeSet<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    topic: Option<&'a str>,
    #[serde(flatten)]
    extra: &'a BTreeMap<String, serde_json::Value>,
}

fn validate_record(raw: RecordDe, line: usize) -> Result<PaperRecord, CorpusError> {
    if raw.citations < 0 {
        return Err(CorpusError::NegativeCitations {
            id: raw.id,
            line,
            value: raw.citations,
        });
    }
    Ok(PaperRecord {
        id: raw.id,
        year: raw.year,
        citations: raw.citations as u64,
        journal: raw.journal.filter(|s| !s.is_empty()),
        groups: raw.groups.into_iter().filter(|s| !s.is_empty()).collect(),
        topic: raw.topic.filter(|s| !s.is_empty()),
        extra: raw.extra,
    })
}

/// Load a corpus, inferring the publication window from the records.
pub fn load_corpus(path: impl AsRef<Path>, format: InputFormat) -> Result<Corpus, CorpusError> {
    load_corpus_impl(path.as_ref(), format, None)
}

/// Load a corpus against a declared publication window; records outside
/// the window are rejected.
pub fn load_corpus_with_window(
    path: impl AsRef<Path>,
    format: InputFormat,
    window: (i32, i32),
) -> Result<Corpus, CorpusError> {
    load_corpus_impl(path.as_ref(), format, Some(window))
}

fn load_corpus_impl(
    path: &Path,
    format: InputFormat,
    window: Option<(i32, i32)>,
) -> Result<Corpus, CorpusError> {
    let records = match format {
        InputFormat::Jsonl => read_jsonl(path)?,
        InputFormat::Csv => read_csv(path)?,
    };
    Corpus::from_records(records, window)
}

fn read_jsonl(path: &Path) -> Result<Vec<PaperRecord>, CorpusError> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let raw: RecordDe = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        records.push(validate_record(raw, lineno)?);
    }
    Ok(records)
}

fn read_csv(path: &Path) -> Result<Vec<PaperRecord>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let col = |name: &'static str| -> Result<usize, CorpusError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or(CorpusError::MissingColumn(name))
    };
    let (c_id, c_year, c_cit) = (col("id")?, col("year")?, col("citations")?);
    let c_journal = headers.iter().position(|h| h == "journal");
    let c_groups = headers.iter().position(|h| h == "groups");
    let c_topic = headers.iter().position(|h| h == "topic");
    let known = [Some(c_id), Some(c_year), Some(c_cit), c_journal, c_groups, c_topic];

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err)?;
        let lineno = row
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(records.len() + 2);
        let field = |i: usize| row.get(i).unwrap_or("").trim();
        let parse_int = |name: &str, v: &str| -> Result<i64, CorpusError> {
            v.parse().map_err(|_| CorpusError::Parse {
                line: lineno,
                msg: format!("column `{name}`: `{v}` is not an integer"),
            })
        };
        let year = parse_int("year", field(c_year))? as i32;
        let citations = parse_int("citations", field(c_cit))?;
        let mut extra = BTreeMap::new();
        for (i, h) in headers.iter().enumerate() {
            if !known.contains(&Some(i)) && !field(i).is_empty() {
                extra.insert(h.to_string(), serde_json::Value::String(field(i).to_string()));
            }
        }
        let raw = RecordDe {
            id: field(c_id).to_string(),
            year,
            citations,
            journal: c_journal.map(|i| field(i).to_string()),
            groups: c_groups
                .map(|i| field(i).split('|').map(str::to_string).collect())
                .unwrap_or_default(),
            topic: c_topic.map(|i| field(i).to_string()),
            extra,
        };
        records.push(validate_record(raw, lineno)?);
    }
    Ok(records)
}

fn csv_err(e: csv::Error) -> CorpusError {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or_default();
    CorpusError::Parse {
        line,
        msg: e.to_string(),
    }
}

/// Load the journal metadata sidecar (`name,jif` CSV).
pub fn load_journal_sidecar(
    path: impl AsRef<Path>,
) -> Result<BTreeMap<String, JournalMeta>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path.as_ref())
        .map_err(csv_err)?;
    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(csv_err)?;
        let lineno = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let name = row.get(0).unwrap_or("").trim().to_string();
        if name.is_empty() {
            continue;
        }
        let jif = match row.get(1).map(str::trim) {
            None | Some("") => None,
            Some(v) => {
                let x: f64 = v.parse().map_err(|_| CorpusError::Parse {
                    line: lineno,
                    msg: format!("jif `{v}` is not a number"),
                })?;
                if x < 0.0 {
                    return Err(CorpusError::Parse {
                        line: lineno,
                        msg: format!("jif {x} is negative"),
                    });
                }
                Some(x)
            }
        };
        out.insert(name.clone(), JournalMeta { name, jif });
    }
    Ok(out)
}

impl Corpus {
    /// Assemble a corpus from records, checking id uniqueness and the
    /// publication window (declared, or inferred from the data).
    pub fn from_records(
        records: Vec<PaperRecord>,
        declared_window: Option<(i32, i32)>,
    ) -> Result<Corpus, CorpusError> {
        if let Some((lo, hi)) = declared_window {
            if lo > hi {
                return Err(CorpusError::InvalidWindow { lo, hi });
            }
        }
        let mut seen = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(CorpusError::DuplicateId { id: r.id.clone() });
            }
            if let Some((lo, hi)) = declared_window {
                if r.year < lo || r.year > hi {
                    return Err(CorpusError::YearOutsideWindow {
                        id: r.id.clone(),
                        year: r.year,
                        lo,
                        hi,
                    });
                }
            }
        }
        let pub_window = declared_window.unwrap_or_else(|| {
            let lo = records.iter().map(|r| r.year).min().unwrap_or(0);
            let hi = records.iter().map(|r| r.year).max().unwrap_or(0);
            (lo, hi)
        });
        Ok(Corpus {
            records,
            pub_window,
            citation_window_note: String::new(),
            journals: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn citations(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.citations).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.records.iter().map(|r| r.id.clone()).collect()
    }

    /// Distinct group labels present in the corpus.
    pub fn group_labels(&self) -> BTreeSet<String> {
        self.records
            .iter()
            .flat_map(|r| r.groups.iter().cloned())
            .collect()
    }

    /// Distinct journal names present in the corpus.
    pub fn journal_labels(&self) -> BTreeSet<String> {
        self.records
            .iter()
            .filter_map(|r| r.journal.clone())
            .collect()
    }

    /// Sub-corpus of records matching the filter. Metadata is inherited.
    /// The second return value lists filter labels that matched nothing
    /// in `self` (empty results are valid, not an error).
    pub fn select(&self, filter: &Filter) -> (Corpus, Vec<String>) {
        let records: Vec<PaperRecord> = self
            .records
            .iter()
            .filter(|r| filter.matches(r))
            .cloned()
            .collect();
        let mut warnings = Vec::new();
        for g in &filter.groups {
            if !self.records.iter().any(|r| r.groups.contains(g)) {
                warnings.push(format!("group `{g}` matched no records"));
            }
        }
        if let Some(j) = &filter.journal {
            if !self.records.iter().any(|r| r.journal.as_deref() == Some(j)) {
                warnings.push(format!("journal `{j}` matched no records"));
            }
        }
        if let Some(t) = &filter.topic {
            if !self.records.iter().any(|r| r.topic.as_deref() == Some(t)) {
                warnings.push(format!("topic `{t}` matched no records"));
            }
        }
        let sub = Corpus {
            records,
            pub_window: self.pub_window,
            citation_window_note: self.citation_window_note.clone(),
            journals: self.journals.clone(),
        };
        (sub, warnings)
    }

    /// Serialize to the JSONL record format (one record per line, fields
    /// in canonical order, extra fields sorted by key).
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<(), CorpusError> {
        for r in &self.records {
            let ser = RecordSer {
                id: &r.id,
                year: r.year,
                citations: r.citations,
                journal: r.journal.as_deref(),
                groups: &r.groups,
                topic: r.topic.as_deref(),
                extra: &r.extra,
            };
            let line = serde_json::to_string(&ser).map_err(|e| CorpusError::Parse {
                line: 0,
                msg: e.to_string(),
            })?;
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn save_jsonl(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_jsonl(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn temp_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn rec(id: &str, year: i32, citations: u64, groups: &[&str]) -> PaperRecord {
        PaperRecord {
            id: id.to_string(),
            year,
            citations,
            journal: None,
            groups: groups.iter().map(|s| s.to_string()).collect(),
            topic: None,
            extra: BTreeMap::new(),
        }
    }

    #[test]
    fn loads_three_jsonl_rows() {
        let f = temp_file(concat!(
            "{\"id\":\"10.1/a\",\"year\":2014,\"citations\":3,\"groups\":[\"ES\"]}\n",
            "{\"id\":\"10.1/b\",\"year\":2015,\"citations\":0,\"groups\":[\"ES\",\"DE\"]}\n",
            "{\"id\":\"10.1/c\",\"year\":2016,\"citations\":12,\"groups\":[]}\n",
        ));
        let c = load_corpus(f.path(), InputFormat::Jsonl).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.pub_window, (2014, 2016));
        assert_eq!(c.records[1].groups.len(), 2);
    }

    #[test]
    fn duplicate_id_is_reported_by_name() {
        let f = temp_file(concat!(
            "{\"id\":\"10.1/x\",\"year\":2014,\"citations\":1}\n",
            "{\"id\":\"10.1/x\",\"year\":2015,\"citations\":2}\n",
        ));
        let err = load_corpus(f.path(), InputFormat::Jsonl).unwrap_err();
        match err {
            CorpusError::DuplicateId { id } => assert_eq!(id, "10.1/x"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn negative_citations_rejected() {
        let f = temp_file("{\"id\":\"a\",\"year\":2014,\"citations\":-1}\n");
        let err = load_corpus(f.path(), InputFormat::Jsonl).unwrap_err();
        assert!(matches!(err, CorpusError::NegativeCitations { .. }));
    }

    #[test]
    fn year_outside_declared_window_rejected() {
        let f = temp_file("{\"id\":\"a\",\"year\":2019,\"citations\":1}\n");
        let err = load_corpus_with_window(f.path(), InputFormat::Jsonl, (2014, 2017)).unwrap_err();
        assert!(matches!(err, CorpusError::YearOutsideWindow { year: 2019, .. }));
    }

    #[test]
    fn malformed_jsonl_reports_line_number() {
        let f = temp_file(concat!(
            "{\"id\":\"a\",\"year\":2014,\"citations\":1}\n",
            "{not json}\n",
        ));
        let err = load_corpus(f.path(), InputFormat::Jsonl).unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn csv_roundtrip_of_basic_fields() {
        let f = temp_file(concat!(
            "id,year,citations,journal,groups,topic\n",
            "a,2014,3,J1,ES|DE,graphene\n",
            "b,2015,0,,US,\n",
        ));
        let c = load_corpus(f.path(), InputFormat::Csv).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.records[0].journal.as_deref(), Some("J1"));
        assert_eq!(c.records[0].groups.len(), 2);
        assert_eq!(c.records[1].topic, None);
    }

    #[test]
    fn csv_missing_required_column() {
        let f = temp_file("id,year\na,2014\n");
        let err = load_corpus(f.path(), InputFormat::Csv).unwrap_err();
        assert!(matches!(err, CorpusError::MissingColumn("citations")));
    }

    #[test]
    fn extra_jsonl_fields_survive_roundtrip() {
        let f = temp_file(
            "{\"id\":\"a\",\"year\":2014,\"citations\":3,\"note\":\"kept\",\"score\":1.5}\n",
        );
        let c = load_corpus(f.path(), InputFormat::Jsonl).unwrap();
        assert_eq!(c.records[0].extra.len(), 2);
        let mut buf = Vec::new();
        c.write_jsonl(&mut buf).unwrap();
        let f2 = temp_file(std::str::from_utf8(&buf).unwrap());
        let c2 = load_corpus(f2.path(), InputFormat::Jsonl).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn select_by_journal() {
        let records = vec![
            PaperRecord { journal: Some("J1".into()), ..rec("a", 2014, 1, &[]) },
            PaperRecord { journal: Some("J1".into()), ..rec("b", 2014, 2, &[]) },
            PaperRecord { journal: Some("J2".into()), ..rec("c", 2014, 3, &[]) },
            rec("d", 2014, 4, &[]),
            rec("e", 2014, 5, &[]),
        ];
        let c = Corpus::from_records(records, None).unwrap();
        let filter = Filter { journal: Some("J1".into()), ..Filter::default() };
        let (sub, warnings) = c.select(&filter);
        assert_eq!(sub.len(), 2);
        assert!(warnings.is_empty());
    }

    #[test]
    fn empty_filter_is_identity() {
        let c = Corpus::from_records(vec![rec("a", 2014, 1, &["ES"])], None).unwrap();
        let (sub, warnings) = c.select(&Filter::default());
        assert_eq!(sub, c);
        assert!(warnings.is_empty());
    }

    #[test]
    fn zero_match_filter_warns() {
        let c = Corpus::from_records(vec![rec("a", 2014, 1, &["ES"])], None).unwrap();
        let filter = Filter { groups: vec!["XX".into()], ..Filter::default() };
        let (sub, warnings) = c.select(&filter);
        assert!(sub.is_empty());
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("XX"));
    }

    #[test]
    fn single_group_mode_drops_collaborations() {
        let c = Corpus::from_records(
            vec![rec("a", 2014, 1, &["ES"]), rec("b", 2014, 2, &["ES", "DE"])],
            None,
        )
        .unwrap();
        let filter = Filter {
            groups: vec!["ES".into()],
            single_group: true,
            ..Filter::default()
        };
        let (sub, _) = c.select(&filter);
        assert_eq!(sub.len(), 1);
        assert_eq!(sub.records[0].id, "a");
    }

    #[test]
    fn journal_sidecar_parses() {
        let f = temp_file("name,jif\nNature,43.1\nNo JIF Journal,\n");
        let m = load_journal_sidecar(f.path()).unwrap();
        assert_eq!(m["Nature"].jif, Some(43.1));
        assert_eq!(m["No JIF Journal"].jif, None);
    }

    proptest! {
        #[test]
        fn select_is_idempotent(
            labels in proptest::collection::vec("[a-c]", 1..40),
            pick in "[a-c]",
        ) {
            let records: Vec<PaperRecord> = labels
                .iter()
                .enumerate()
                .map(|(i, g)| rec(&format!("r{i}"), 2014, i as u64, &[g]))
                .collect();
            let c = Corpus::from_records(records, None).unwrap();
            let filter = Filter { groups: vec![pick], ..Filter::default() };
            let (once, _) = c.select(&filter);
            let (twice, _) = once.select(&filter);
            prop_assert_eq!(once, twice);
        }

        // With single-label records, sub-corpus sizes over a label
        // partition sum to at most the corpus size. (Multi-label records
        // break this bound by design; `single_group` restores it.)
        #[test]
        fn partition_sizes_bounded(labels in proptest::collection::vec(0usize..4, 1..60)) {
            let names = ["w", "x", "y", "z"];
            let records: Vec<PaperRecord> = labels
                .iter()
                .enumerate()
                .map(|(i, &g)| rec(&format!("r{i}"), 2014, i as u64, &[names[g]]))
                .collect();
            let c = Corpus::from_records(records, None).unwrap();
            let total: usize = names
                .iter()
                .map(|n| {
                    let f = Filter { groups: vec![n.to_string()], ..Filter::default() };
                    c.select(&f).0.len()
                })
                .sum();
            prop_assert!(total <= c.len());
        }

        #[test]
        fn jsonl_roundtrip_identity(
            n in 1usize..30,
            seed_years in proptest::collection::vec(2014i32..2018, 30),
            cit in proptest::collection::vec(0u64..1000, 30),
        ) {
            let records: Vec<PaperRecord> = (0..n)
                .map(|i| rec(&format!("10.x/{i}"), seed_years[i], cit[i], &["A"]))
                .collect();
            let c = Corpus::from_records(records, None).unwrap();
            let mut buf = Vec::new();
            c.write_jsonl(&mut buf).unwrap();
            let f = temp_file(std::str::from_utf8(&buf).unwrap());
            let c2 = load_corpus(f.path(), InputFormat::Jsonl).unwrap();
            prop_assert_eq!(c, c2);
        }
    }
}
