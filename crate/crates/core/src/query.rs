//! Query pipeline and the payloads served to the exploration UI.
//!
//! A [`Snapshot`] is the immutable result of one query: filter the corpus,
//! build the co-author graph, run detection, cut, rank. Detail lookups for
//! communities and authors are answered from the snapshot.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conga::{best_level, cut_at_count, run_conga, CutLevel};
use crate::dataset::{summarize_papers, Dataset, SummaryStats};
use crate::influence::{most_influential_author, owned_papers, rank_all, InfluenceReport};
use crate::model::{build_coauthor_graph, AuthorId, CoauthorGraph, CorpusFilter, ModelError, PaperId, PaperRecord};

/// Node area per unit of normalized influence.
pub const NODE_AREA_PER_UNIT: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("invalid year range: {from} > {to}")]
    InvalidRange { from: i32, to: i32 },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("requested community count must be at least 1")]
    InvalidCommunityCount,
    #[error("unknown community {0}")]
    UnknownCommunity(usize),
    #[error("unknown author {0}")]
    UnknownAuthor(AuthorId),
    #[error("no query has been run yet")]
    NoSnapshot,
}

impl QueryError {
    /// HTTP-style status class for the error.
    pub fn status(&self) -> u16 {
        match self {
            QueryError::InvalidRange { .. } | QueryError::InvalidK | QueryError::InvalidCommunityCount => 400,
            QueryError::UnknownCommunity(_) | QueryError::UnknownAuthor(_) | QueryError::NoSnapshot => 404,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            QueryError::InvalidRange { .. } => "invalid_range",
            QueryError::InvalidK => "invalid_k",
            QueryError::InvalidCommunityCount => "invalid_community_count",
            QueryError::UnknownCommunity(_) => "unknown_community",
            QueryError::UnknownAuthor(_) => "unknown_author",
            QueryError::NoSnapshot => "no_snapshot",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QueryRequest {
    #[serde(default)]
    pub topics: Vec<String>,
    pub year_from: i32,
    pub year_to: i32,
    /// Top-K cutoff; absent means every community.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Fixes detection granularity instead of the modularity-optimal cut.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub community_count: Option<usize>,
}

impl QueryRequest {
    pub fn new(topics: Vec<String>, year_from: i32, year_to: i32, k: Option<usize>) -> Self {
        QueryRequest { topics, year_from, year_to, k, community_count: None }
    }

    /// Validates and canonicalizes: keywords trimmed, lowercased, sorted,
    /// deduplicated, blanks dropped.
    pub fn normalized(&self) -> Result<QueryRequest, QueryError> {
        if self.k == Some(0) {
            return Err(QueryError::InvalidK);
        }
        if self.community_count == Some(0) {
            return Err(QueryError::InvalidCommunityCount);
        }
        let filter = self.filter()?;
        Ok(QueryRequest { topics: filter.topics, ..self.clone() })
    }

    pub fn filter(&self) -> Result<CorpusFilter, QueryError> {
        CorpusFilter::new(&self.topics, self.year_from, self.year_to).map_err(|e| match e {
            ModelError::InvalidRange { from, to } => QueryError::InvalidRange { from, to },
            _ => unreachable!("filter construction only checks the range"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YearPoint {
    pub year: i32,
    pub papers: usize,
    pub citations: u64,
}

fn year_series<'a>(papers: impl IntoIterator<Item = &'a PaperRecord>) -> Vec<YearPoint> {
    let mut by_year: BTreeMap<i32, (usize, u64)> = BTreeMap::new();
    for p in papers {
        let e = by_year.entry(p.year).or_default();
        e.0 += 1;
        e.1 += p.citation_count;
    }
    by_year.into_iter().map(|(year, (papers, citations))| YearPoint { year, papers, citations }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityEntry {
    #[serde(flatten)]
    pub report: InfluenceReport,
    pub author_count: usize,
    /// Proportional to `normalized`.
    pub node_area: f64,
    pub papers_per_year: Vec<YearPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiCommunityAuthor {
    pub author_id: AuthorId,
    pub name: String,
    pub community_ids: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuthorNode {
    pub author_id: AuthorId,
    pub name: String,
    /// Shown communities containing the author; its length drives the
    /// node shape in the author view.
    pub community_ids: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuthorEdge {
    pub source: AuthorId,
    pub target: AuthorId,
    pub collaboration_count: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityLink {
    pub source: usize,
    pub target: usize,
    pub shared_authors: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphPayload {
    pub authors: Vec<AuthorNode>,
    pub edges: Vec<AuthorEdge>,
    pub community_links: Vec<CommunityLink>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub request: QueryRequest,
    pub detected_community_count: usize,
    pub modularity: f64,
    pub cut_step: usize,
    pub communities: Vec<CommunityEntry>,
    pub multi_community_authors: Vec<MultiCommunityAuthor>,
    pub graph: GraphPayload,
    pub summary: SummaryStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityDetail {
    pub community_id: usize,
    pub rank: usize,
    pub influence: f64,
    pub normalized: f64,
    pub author_ids: Vec<AuthorId>,
    pub author_count: usize,
    pub paper_count: usize,
    pub citation_total: u64,
    pub most_influential_author: Option<AuthorId>,
    pub overlapping_community_ids: Vec<usize>,
    pub per_year: Vec<YearPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Publication {
    pub paper_id: PaperId,
    pub title: String,
    pub year: i32,
    pub citation_count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuthorDetail {
    pub author_id: AuthorId,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affiliation: Option<String>,
    pub paper_count: usize,
    pub citation_total: u64,
    pub community_ids: Vec<usize>,
    pub coauthor_ids: Vec<AuthorId>,
    /// Always 0: the dataset carries no citing-paper edges.
    pub citing_author_count: usize,
    pub citing_authors_available: bool,
    pub publications: Vec<Publication>,
}

/// Immutable outcome of one query.
#[derive(Debug)]
pub struct Snapshot {
    dataset: Arc<Dataset>,
    papers: Vec<PaperRecord>,
    graph: CoauthorGraph,
    level: CutLevel,
    /// Every community, in rank order.
    reports: Vec<InfluenceReport>,
    result: QueryResult,
}

impl Snapshot {
    pub fn build(dataset: Arc<Dataset>, request: &QueryRequest) -> Result<Snapshot, QueryError> {
        let request = request.normalized()?;
        let filter = request.filter()?;
        let papers = filter.apply(dataset.papers());
        let graph = build_coauthor_graph(&papers).with_provenance(filter);
        let dendrogram = run_conga(&graph);
        let level = match request.community_count {
            Some(count) => cut_at_count(&dendrogram, count),
            None => best_level(&dendrogram),
        };
        let reports = rank_all(&level.communities, &papers);
        let shown = request.k.map_or(reports.len(), |k| k.min(reports.len()));
        let result = assemble_result(&dataset, &request, &papers, &graph, &level, &reports[..shown]);
        Ok(Snapshot { dataset, papers, graph, level, reports, result })
    }

    pub fn result(&self) -> &QueryResult {
        &self.result
    }

    pub fn graph(&self) -> &CoauthorGraph {
        &self.graph
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn reports(&self) -> &[InfluenceReport] {
        &self.reports
    }

    pub fn community(&self, id: usize) -> Result<CommunityDetail, QueryError> {
        let c = self.level.communities.get(id).ok_or(QueryError::UnknownCommunity(id))?;
        let report = self.reports.iter().find(|r| r.community_id == id).expect("every community is ranked");
        let owned = owned_papers(c, &self.papers);
        let overlapping = self
            .level
            .communities
            .iter()
            .filter(|o| o.community_id != id && !o.member_ids.is_disjoint(&c.member_ids))
            .map(|o| o.community_id)
            .collect();
        Ok(CommunityDetail {
            community_id: id,
            rank: report.rank,
            influence: report.influence,
            normalized: report.normalized,
            author_ids: c.member_ids.iter().cloned().collect(),
            author_count: c.len(),
            paper_count: owned.len(),
            citation_total: owned.iter().map(|p| p.citation_count).sum(),
            most_influential_author: most_influential_author(c, &self.papers),
            overlapping_community_ids: overlapping,
            per_year: year_series(owned),
        })
    }

    pub fn author(&self, id: &AuthorId) -> Result<AuthorDetail, QueryError> {
        let coauthors = self.graph.neighbor_ids(id).ok_or_else(|| QueryError::UnknownAuthor(id.clone()))?;
        let record = self.dataset.author(id);
        let mut mine: Vec<&PaperRecord> = self.papers.iter().filter(|p| p.has_author(id)).collect();
        mine.sort_by(|a, b| a.year.cmp(&b.year).then_with(|| a.paper_id.cmp(&b.paper_id)));
        Ok(AuthorDetail {
            author_id: id.clone(),
            name: record.map_or_else(|| id.to_string(), |r| r.name.clone()),
            affiliation: record.and_then(|r| r.affiliation.clone()),
            paper_count: mine.len(),
            citation_total: mine.iter().map(|p| p.citation_count).sum(),
            community_ids: self.level.communities.memberships(id),
            coauthor_ids: coauthors,
            citing_author_count: 0,
            citing_authors_available: false,
            publications: mine
                .into_iter()
                .map(|p| Publication {
                    paper_id: p.paper_id.clone(),
                    title: p.title.clone(),
                    year: p.year,
                    citation_count: p.citation_count,
                })
                .collect(),
        })
    }
}

fn assemble_result(
    dataset: &Dataset,
    request: &QueryRequest,
    papers: &[PaperRecord],
    graph: &CoauthorGraph,
    level: &CutLevel,
    shown: &[InfluenceReport],
) -> QueryResult {
    let name_of = |a: &AuthorId| dataset.author(a).map_or_else(|| a.to_string(), |r| r.name.clone());

    let communities = shown
        .iter()
        .map(|r| {
            let c = level.communities.get(r.community_id).expect("reported community exists");
            CommunityEntry {
                report: r.clone(),
                author_count: c.len(),
                node_area: r.normalized * NODE_AREA_PER_UNIT,
                papers_per_year: year_series(owned_papers(c, papers)),
            }
        })
        .collect();

    let mut membership: BTreeMap<&AuthorId, Vec<usize>> = BTreeMap::new();
    for r in shown {
        for m in &r.member_ids {
            membership.entry(m).or_default().push(r.community_id);
        }
    }
    for ids in membership.values_mut() {
        ids.sort_unstable();
    }

    let multi_community_authors = membership
        .iter()
        .filter(|(_, ids)| ids.len() > 1)
        .map(|(&a, ids)| MultiCommunityAuthor { author_id: a.clone(), name: name_of(a), community_ids: ids.clone() })
        .collect();

    let authors: Vec<AuthorNode> = membership
        .iter()
        .map(|(&a, ids)| AuthorNode { author_id: a.clone(), name: name_of(a), community_ids: ids.clone() })
        .collect();
    let edges = graph
        .edges()
        .filter_map(|((i, j), count)| {
            let (a, b) = (graph.author(i), graph.author(j));
            (membership.contains_key(a) && membership.contains_key(b)).then(|| AuthorEdge {
                source: a.clone(),
                target: b.clone(),
                collaboration_count: count,
            })
        })
        .collect();
    let mut community_links = Vec::new();
    for (i, a) in shown.iter().enumerate() {
        for b in &shown[i + 1..] {
            let shared = a.member_ids.intersection(&b.member_ids).count();
            if shared > 0 {
                let (s, t) = (a.community_id.min(b.community_id), a.community_id.max(b.community_id));
                community_links.push(CommunityLink { source: s, target: t, shared_authors: shared });
            }
        }
    }
    community_links.sort_by_key(|l| (l.source, l.target));

    QueryResult {
        request: request.clone(),
        detected_community_count: level.communities.len(),
        modularity: level.modularity.value,
        cut_step: level.step,
        communities,
        multi_community_authors,
        graph: GraphPayload { authors, edges, community_links },
        summary: summarize_papers(papers),
    }
}

/// Distinct authors of a paper list, ascending.
pub fn authors_of(papers: &[PaperRecord]) -> BTreeSet<AuthorId> {
    papers.iter().flat_map(|p| p.author_ids.iter().cloned()).collect()
}
