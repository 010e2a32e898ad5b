//! Line-delimited publication datasets.
//!
//! One JSON object per line, discriminated by `kind`:
//!
//! ```text
//! {"kind":"author","author_id":"u1","name":"Ada","affiliation":"ACME"}
//! {"kind":"paper","paper_id":"p1","title":"...","year":2015,"topics":["databases"],"author_ids":["u1","u2"],"citation_count":3}
//! ```
//!
//! Blank lines are skipped and unknown fields ignored. Topic labels are
//! lowercased on load.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AuthorId, AuthorRecord, PaperId, PaperRecord};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: parse error: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: paper {paper_id} references unknown author {author_id}")]
    DanglingAuthor { line: usize, paper_id: PaperId, author_id: AuthorId },
    #[error("line {line}: paper {paper_id} has negative citation count {value}")]
    NegativeCitation { line: usize, paper_id: PaperId, value: i64 },
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
}

impl DatasetError {
    pub fn line(&self) -> Option<usize> {
        match self {
            DatasetError::Io { .. } => None,
            DatasetError::Parse { line, .. }
            | DatasetError::DanglingAuthor { line, .. }
            | DatasetError::NegativeCitation { line, .. }
            | DatasetError::Invalid { line, .. } => Some(*line),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawRecord {
    Author(AuthorRecord),
    Paper(RawPaper),
}

#[derive(Deserialize)]
struct RawPaper {
    paper_id: PaperId,
    title: String,
    year: i32,
    #[serde(default)]
    topics: Vec<String>,
    author_ids: Vec<AuthorId>,
    citation_count: i64,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum OutRecord<'a> {
    Author(&'a AuthorRecord),
    Paper(&'a PaperRecord),
}

/// A validated, indexed corpus.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Dataset {
    papers: Vec<PaperRecord>,
    authors: Vec<AuthorRecord>,
    author_index: HashMap<AuthorId, usize>,
    topic_index: BTreeMap<String, Vec<PaperId>>,
    year_index: BTreeMap<i32, Vec<PaperId>>,
}

/// Record positions as they would appear in a serialized file.
struct Located<T> {
    line: usize,
    record: T,
}

impl Dataset {
    /// Validates records and builds indexes. Reported line numbers follow
    /// the [`Dataset::to_jsonl`] layout (authors first, then papers).
    pub fn from_records(authors: Vec<AuthorRecord>, papers: Vec<PaperRecord>) -> Result<Self, DatasetError> {
        let n_authors = authors.len();
        let authors = authors.into_iter().enumerate().map(|(i, record)| Located { line: i + 1, record }).collect();
        let papers =
            papers.into_iter().enumerate().map(|(i, record)| Located { line: n_authors + i + 1, record }).collect();
        let mut violations = Vec::new();
        let d = Self::assemble(authors, papers, &mut violations);
        match violations.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(d),
        }
    }

    fn assemble(
        authors: Vec<Located<AuthorRecord>>,
        papers: Vec<Located<PaperRecord>>,
        violations: &mut Vec<DatasetError>,
    ) -> Dataset {
        let mut author_index = HashMap::new();
        let mut kept_authors = Vec::with_capacity(authors.len());
        for Located { line, record } in authors {
            if author_index.contains_key(&record.author_id) {
                violations
                    .push(DatasetError::Invalid { line, reason: format!("duplicate author_id {}", record.author_id) });
                continue;
            }
            author_index.insert(record.author_id.clone(), kept_authors.len());
            kept_authors.push(record);
        }

        let mut paper_ids = HashSet::new();
        let mut kept_papers = Vec::with_capacity(papers.len());
        for Located { line, record } in papers {
            if let Err(e) = record.validate() {
                violations.push(DatasetError::Invalid { line, reason: e.to_string() });
                continue;
            }
            if !paper_ids.insert(record.paper_id.clone()) {
                violations
                    .push(DatasetError::Invalid { line, reason: format!("duplicate paper_id {}", record.paper_id) });
                continue;
            }
            if let Some(missing) = record.author_ids.iter().find(|a| !author_index.contains_key(*a)) {
                violations.push(DatasetError::DanglingAuthor {
                    line,
                    paper_id: record.paper_id.clone(),
                    author_id: missing.clone(),
                });
                continue;
            }
            kept_papers.push(record);
        }

        let (topic_index, year_index) = build_indexes(&kept_papers);
        Dataset { papers: kept_papers, authors: kept_authors, author_index, topic_index, year_index }
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn authors(&self) -> &[AuthorRecord] {
        &self.authors
    }

    pub fn author(&self, id: &AuthorId) -> Option<&AuthorRecord> {
        self.author_index.get(id).map(|&i| &self.authors[i])
    }

    pub fn topic_index(&self) -> &BTreeMap<String, Vec<PaperId>> {
        &self.topic_index
    }

    pub fn year_index(&self) -> &BTreeMap<i32, Vec<PaperId>> {
        &self.year_index
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty() && self.authors.is_empty()
    }

    /// Smallest and largest publication year, if any papers exist.
    pub fn year_span(&self) -> Option<(i32, i32)> {
        Some((*self.year_index.keys().next()?, *self.year_index.keys().next_back()?))
    }

    /// Restricts the dataset to `papers` and the authors they reference.
    pub fn restrict(&self, papers: Vec<PaperRecord>) -> Dataset {
        let used: HashSet<&AuthorId> = papers.iter().flat_map(|p| p.author_ids.iter()).collect();
        let authors: Vec<AuthorRecord> = self.authors.iter().filter(|a| used.contains(&a.author_id)).cloned().collect();
        Dataset::from_records(authors, papers).expect("subset of a valid dataset is valid")
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for a in &self.authors {
            out.push_str(&serde_json::to_string(&OutRecord::Author(a)).expect("serializable"));
            out.push('\n');
        }
        for p in &self.papers {
            out.push_str(&serde_json::to_string(&OutRecord::Paper(p)).expect("serializable"));
            out.push('\n');
        }
        out
    }
}

fn build_indexes(papers: &[PaperRecord]) -> (BTreeMap<String, Vec<PaperId>>, BTreeMap<i32, Vec<PaperId>>) {
    let mut topics: BTreeMap<String, Vec<PaperId>> = BTreeMap::new();
    let mut years: BTreeMap<i32, Vec<PaperId>> = BTreeMap::new();
    for p in papers {
        for t in &p.topics {
            topics.entry(t.clone()).or_default().push(p.paper_id.clone());
        }
        years.entry(p.year).or_default().push(p.paper_id.clone());
    }
    (topics, years)
}

/// Parses dataset text, collecting every violation instead of stopping at
/// the first. Returns the records that passed alongside the violations.
pub fn parse_dataset(text: &str) -> (Dataset, Vec<DatasetError>) {
    let mut violations = Vec::new();
    let mut authors = Vec::new();
    let mut papers = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawRecord>(raw) {
            Ok(RawRecord::Author(record)) => authors.push(Located { line, record }),
            Ok(RawRecord::Paper(raw)) => {
                if raw.citation_count < 0 {
                    violations.push(DatasetError::NegativeCitation {
                        line,
                        paper_id: raw.paper_id,
                        value: raw.citation_count,
                    });
                    continue;
                }
                let record = PaperRecord {
                    paper_id: raw.paper_id,
                    title: raw.title,
                    year: raw.year,
                    topics: raw.topics.iter().map(|t| t.trim().to_lowercase()).filter(|t| !t.is_empty()).collect(),
                    author_ids: raw.author_ids,
                    citation_count: raw.citation_count as u64,
                };
                papers.push(Located { line, record });
            }
            Err(e) => violations.push(DatasetError::Parse { line, reason: e.to_string() }),
        }
    }
    let d = Dataset::assemble(authors, papers, &mut violations);
    violations.sort_by_key(|e| e.line());
    (d, violations)
}

pub fn load_dataset_str(text: &str) -> Result<Dataset, DatasetError> {
    let (d, violations) = parse_dataset(text);
    match violations.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(d),
    }
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io { path: path.to_owned(), source })?;
    load_dataset_str(&text)
}

pub fn write_dataset(d: &Dataset, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, d.to_jsonl())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicStat {
    pub topic: String,
    pub paper_count: usize,
    pub author_count: usize,
    pub papers_per_year: BTreeMap<i32, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub paper_count: usize,
    pub author_count: usize,
    pub year_span: Option<(i32, i32)>,
    /// Top five topics by paper count (descending, then topic ascending).
    pub top_topics_by_papers: Vec<TopicStat>,
    /// Top five topics by distinct author count, same tie rule.
    pub top_topics_by_authors: Vec<TopicStat>,
}

pub const SUMMARY_TOP_TOPICS: usize = 5;

/// Paper count, distinct authors and papers per year for one topic.
type TopicTally<'a> = (usize, BTreeSet<&'a AuthorId>, BTreeMap<i32, usize>);

pub fn summarize_papers(papers: &[PaperRecord]) -> SummaryStats {
    let mut per_topic: BTreeMap<&str, TopicTally> = BTreeMap::new();
    let mut authors = BTreeSet::new();
    let mut years = BTreeSet::new();
    for p in papers {
        years.insert(p.year);
        authors.extend(p.author_ids.iter());
        for t in &p.topics {
            let entry = per_topic.entry(t.as_str()).or_default();
            entry.0 += 1;
            entry.1.extend(p.author_ids.iter());
            *entry.2.entry(p.year).or_default() += 1;
        }
    }
    let stats: Vec<TopicStat> = per_topic
        .into_iter()
        .map(|(topic, (paper_count, authors, papers_per_year))| TopicStat {
            topic: topic.to_owned(),
            paper_count,
            author_count: authors.len(),
            papers_per_year,
        })
        .collect();

    let top = |key: fn(&TopicStat) -> usize| {
        let mut v = stats.clone();
        v.sort_by(|a, b| key(b).cmp(&key(a)).then_with(|| a.topic.cmp(&b.topic)));
        v.truncate(SUMMARY_TOP_TOPICS);
        v
    };
    SummaryStats {
        paper_count: papers.len(),
        author_count: authors.len(),
        year_span: years.first().copied().zip(years.last().copied()),
        top_topics_by_papers: top(|s| s.paper_count),
        top_topics_by_authors: top(|s| s.author_count),
    }
}

pub fn dataset_summary(d: &Dataset) -> SummaryStats {
    summarize_papers(d.papers())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn loads_seven_authors_fixture() {
        let d = load_dataset_str(&fixtures::seven_authors_jsonl()).unwrap();
        assert_eq!(d.papers().len(), 8);
        assert_eq!(d.authors().len(), 7);
        assert_eq!(d.year_index().values().map(Vec::len).sum::<usize>(), 8);
    }

    #[test]
    fn empty_input_is_empty_dataset() {
        let d = load_dataset_str("").unwrap();
        assert!(d.is_empty());
        assert_eq!(dataset_summary(&d), SummaryStats::default());
        assert!(load_dataset_str("\n  \n").unwrap().is_empty());
    }

    #[test]
    fn negative_citation_reports_line() {
        let text = concat!(
            r#"{"kind":"author","author_id":"a","name":"A"}"#,
            "\n\n",
            r#"{"kind":"paper","paper_id":"p","title":"t","year":2000,"topics":[],"author_ids":["a"],"citation_count":-1}"#,
        );
        match load_dataset_str(text) {
            Err(DatasetError::NegativeCitation { line, value, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(value, -1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_author_names_paper() {
        let text = r#"{"kind":"paper","paper_id":"p9","title":"t","year":2000,"topics":[],"author_ids":["ghost"],"citation_count":1}"#;
        let err = load_dataset_str(text).unwrap_err();
        assert!(matches!(err, DatasetError::DanglingAuthor { line: 1, .. }));
        assert!(err.to_string().contains("p9"));
    }

    #[test]
    fn malformed_line_is_parse_error() {
        let err = load_dataset_str("{\"kind\":\"paper\"").unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 1, .. }));
        let err = load_dataset_str(r#"{"kind":"venue","id":"x"}"#).unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 1, .. }));
    }

    #[test]
    fn collects_all_violations() {
        let text = concat!(
            r#"{"kind":"paper","paper_id":"p1","title":"t","year":2000,"author_ids":["x"],"citation_count":1}"#,
            "\n",
            r#"{"kind":"paper","paper_id":"p2","title":"t","year":2000,"author_ids":["y"],"citation_count":-4}"#,
            "\n",
            "garbage\n",
        );
        let (_, v) = parse_dataset(text);
        assert_eq!(v.iter().map(|e| e.line()).collect::<Vec<_>>(), [Some(1), Some(2), Some(3)]);
    }

    #[test]
    fn unknown_fields_ignored_and_topics_lowercased() {
        let text = concat!(
            r#"{"kind":"author","author_id":"a","name":"A","h_index":12}"#,
            "\n",
            r#"{"kind":"paper","paper_id":"p","title":"t","year":2000,"topics":["Data Mining"],"author_ids":["a"],"citation_count":0,"venue":"X"}"#,
        );
        let d = load_dataset_str(text).unwrap();
        assert!(d.papers()[0].topics.contains("data mining"));
        assert!(d.author(&"a".into()).unwrap().affiliation.is_none());
    }

    #[test]
    fn summary_of_seven_authors() {
        let d = load_dataset_str(&fixtures::seven_authors_jsonl()).unwrap();
        let s = dataset_summary(&d);
        assert_eq!(s.top_topics_by_papers.len(), 1);
        let t = &s.top_topics_by_papers[0];
        assert_eq!((t.topic.as_str(), t.author_count, t.paper_count), ("databases", 7, 8));
    }

    #[test]
    fn summary_ties_are_alphabetical_and_capped() {
        let papers: Vec<PaperRecord> = ["zeta", "alpha", "mid", "b", "c", "d", "e"]
            .iter()
            .enumerate()
            .map(|(i, t)| PaperRecord {
                paper_id: PaperId(format!("p{i}")),
                title: String::new(),
                year: 2000,
                topics: [t.to_string()].into(),
                author_ids: vec!["a".into()],
                citation_count: 0,
            })
            .collect();
        let s = summarize_papers(&papers);
        let names: Vec<_> = s.top_topics_by_papers.iter().map(|t| t.topic.as_str()).collect();
        assert_eq!(names, ["alpha", "b", "c", "d", "e"]);
    }

    #[test]
    fn round_trip_is_fixed_point() {
        let d = load_dataset_str(&fixtures::seven_authors_jsonl()).unwrap();
        let text = d.to_jsonl();
        let again = load_dataset_str(&text).unwrap();
        assert_eq!(d, again);
        assert_eq!(text, again.to_jsonl());
    }

    #[test]
    fn indexes_rebuild_identically() {
        let d = load_dataset_str(&fixtures::seven_authors_jsonl()).unwrap();
        let (topics, years) = build_indexes(d.papers());
        assert_eq!(&topics, d.topic_index());
        assert_eq!(&years, d.year_index());
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        std::fs::write(&path, fixtures::seven_authors_jsonl()).unwrap();
        assert_eq!(load_dataset(&path).unwrap().papers().len(), 8);
        assert!(matches!(load_dataset(dir.path().join("missing")), Err(DatasetError::Io { .. })));
    }
}
