//! Domain records and the co-author graph.
//!
//! Papers and authors are plain records keyed by opaque string identifiers.
//! [`CoauthorGraph`] is the undirected collaboration graph built from a
//! (possibly filtered) paper list. Vertices are stored in ascending
//! author-id order so that vertex indices double as a deterministic
//! tie-break order for the graph kernels.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AuthorId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaperId(pub String);

impl AuthorId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PaperId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AuthorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for PaperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AuthorId {
    fn from(s: &str) -> Self {
        AuthorId(s.to_owned())
    }
}

impl From<&str> for PaperId {
    fn from(s: &str) -> Self {
        PaperId(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorRecord {
    pub author_id: AuthorId,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affiliation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: PaperId,
    pub title: String,
    pub year: i32,
    /// Lowercase topic labels.
    pub topics: BTreeSet<String>,
    pub author_ids: Vec<AuthorId>,
    pub citation_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid year range: {from} > {to}")]
    InvalidRange { from: i32, to: i32 },
    #[error("paper {0} has no authors")]
    NoAuthors(PaperId),
    #[error("paper {paper} lists author {author} more than once")]
    DuplicateAuthor { paper: PaperId, author: AuthorId },
}

impl PaperRecord {
    /// Checks the per-record invariants: at least one author, no repeats.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.author_ids.is_empty() {
            return Err(ModelError::NoAuthors(self.paper_id.clone()));
        }
        let mut seen = HashSet::with_capacity(self.author_ids.len());
        for a in &self.author_ids {
            if !seen.insert(a) {
                return Err(ModelError::DuplicateAuthor { paper: self.paper_id.clone(), author: a.clone() });
            }
        }
        Ok(())
    }

    pub fn has_author(&self, author: &AuthorId) -> bool {
        self.author_ids.iter().any(|a| a == author)
    }
}

/// Topic and year-window selection applied to a corpus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFilter {
    /// Normalized keywords (trimmed, lowercase, sorted, deduplicated).
    pub topics: Vec<String>,
    pub year_from: i32,
    pub year_to: i32,
}

impl CorpusFilter {
    pub fn new<S: AsRef<str>>(topics: &[S], year_from: i32, year_to: i32) -> Result<Self, ModelError> {
        if year_from > year_to {
            return Err(ModelError::InvalidRange { from: year_from, to: year_to });
        }
        let topics: BTreeSet<String> =
            topics.iter().map(|t| t.as_ref().trim().to_lowercase()).filter(|t| !t.is_empty()).collect();
        Ok(CorpusFilter { topics: topics.into_iter().collect(), year_from, year_to })
    }

    /// A filter that keeps every paper.
    pub fn unbounded() -> Self {
        CorpusFilter { topics: Vec::new(), year_from: i32::MIN, year_to: i32::MAX }
    }

    pub fn matches(&self, paper: &PaperRecord) -> bool {
        if paper.year < self.year_from || paper.year > self.year_to {
            return false;
        }
        if self.topics.is_empty() {
            return true;
        }
        paper.topics.iter().any(|label| {
            let label = label.to_lowercase();
            self.topics.iter().any(|kw| label.contains(kw.as_str()))
        })
    }

    pub fn apply(&self, papers: &[PaperRecord]) -> Vec<PaperRecord> {
        papers.iter().filter(|p| self.matches(p)).cloned().collect()
    }
}

/// Keeps papers inside `[year_from, year_to]` whose topics contain one of
/// `topics` (case-insensitive substring). An empty keyword list keeps all topics.
pub fn filter_corpus<S: AsRef<str>>(
    papers: &[PaperRecord],
    topics: &[S],
    year_from: i32,
    year_to: i32,
) -> Result<Vec<PaperRecord>, ModelError> {
    Ok(CorpusFilter::new(topics, year_from, year_to)?.apply(papers))
}

/// Undirected co-authorship graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoauthorGraph {
    authors: Vec<AuthorId>,
    index: HashMap<AuthorId, usize>,
    adjacency: Vec<Vec<usize>>,
    collaborations: BTreeMap<(usize, usize), u32>,
    provenance: Option<CorpusFilter>,
}

impl CoauthorGraph {
    /// Builds a graph from a vertex list and weighted edges. Self-loops are
    /// dropped, parallel edges accumulate their counts, and edge endpoints
    /// missing from `vertices` are added.
    pub fn from_parts<V, E>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator<Item = AuthorId>,
        E: IntoIterator<Item = (AuthorId, AuthorId, u32)>,
    {
        let edges: Vec<_> = edges.into_iter().filter(|(a, b, _)| a != b).collect();
        let mut set: BTreeSet<AuthorId> = vertices.into_iter().collect();
        for (a, b, _) in &edges {
            set.insert(a.clone());
            set.insert(b.clone());
        }
        let authors: Vec<AuthorId> = set.into_iter().collect();
        let index: HashMap<AuthorId, usize> = authors.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut collaborations = BTreeMap::new();
        for (a, b, count) in edges {
            let (i, j) = (index[&a], index[&b]);
            let key = (i.min(j), i.max(j));
            *collaborations.entry(key).or_insert(0) += count;
        }
        collaborations.retain(|_, c| *c > 0);
        let mut adjacency = vec![Vec::new(); authors.len()];
        for &(i, j) in collaborations.keys() {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        CoauthorGraph { authors, index, adjacency, collaborations, provenance: None }
    }

    /// Unit-weight graph from string pairs; handy for fixtures.
    pub fn from_edges(edges: &[(&str, &str)]) -> Self {
        Self::from_parts(std::iter::empty(), edges.iter().map(|(a, b)| (AuthorId::from(*a), AuthorId::from(*b), 1)))
    }

    pub fn with_provenance(mut self, filter: CorpusFilter) -> Self {
        self.provenance = Some(filter);
        self
    }

    pub fn provenance(&self) -> Option<&CorpusFilter> {
        self.provenance.as_ref()
    }

    pub fn vertex_count(&self) -> usize {
        self.authors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.collaborations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.authors.is_empty()
    }

    /// Authors in ascending id order; position is the vertex index.
    pub fn authors(&self) -> &[AuthorId] {
        &self.authors
    }

    pub fn author(&self, vertex: usize) -> &AuthorId {
        &self.authors[vertex]
    }

    pub fn index_of(&self, author: &AuthorId) -> Option<usize> {
        self.index.get(author).copied()
    }

    pub fn contains(&self, author: &AuthorId) -> bool {
        self.index.contains_key(author)
    }

    pub fn neighbors(&self, vertex: usize) -> &[usize] {
        &self.adjacency[vertex]
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.adjacency[vertex].len()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Edges as `(low, high)` vertex-index pairs with their collaboration count.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.collaborations.iter().map(|(&k, &c)| (k, c))
    }

    pub fn collaboration_count(&self, a: &AuthorId, b: &AuthorId) -> Option<u32> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.collaborations.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn neighbor_ids(&self, author: &AuthorId) -> Option<Vec<AuthorId>> {
        let v = self.index_of(author)?;
        Some(self.adjacency[v].iter().map(|&w| self.authors[w].clone()).collect())
    }
}

/// Every author becomes a vertex; each paper adds one collaboration to every
/// pair of its authors.
pub fn build_coauthor_graph(papers: &[PaperRecord]) -> CoauthorGraph {
    let vertices = papers.iter().flat_map(|p| p.author_ids.iter().cloned());
    let edges = papers.iter().flat_map(|p| {
        let ids = &p.author_ids;
        (0..ids.len()).flat_map(move |i| (i + 1..ids.len()).map(move |j| (ids[i].clone(), ids[j].clone(), 1)))
    });
    CoauthorGraph::from_parts(vertices, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Community {
    pub community_id: usize,
    pub member_ids: BTreeSet<AuthorId>,
}

impl Community {
    pub fn new<I, A>(community_id: usize, members: I) -> Self
    where
        I: IntoIterator<Item = A>,
        A: Into<AuthorId>,
    {
        Community { community_id, member_ids: members.into_iter().map(Into::into).collect() }
    }

    pub fn contains(&self, author: &AuthorId) -> bool {
        self.member_ids.contains(author)
    }

    pub fn len(&self) -> usize {
        self.member_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_ids.is_empty()
    }
}

impl From<String> for AuthorId {
    fn from(s: String) -> Self {
        AuthorId(s)
    }
}

/// Possibly overlapping communities covering a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunitySet {
    pub communities: Vec<Community>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("vertex {0} is not covered by any community")]
    Uncovered(AuthorId),
    #[error("community {0} contains unknown author {1}")]
    UnknownMember(usize, AuthorId),
    #[error("community {0} is empty")]
    Empty(usize),
    #[error("communities {0} and {1} have identical members")]
    Duplicate(usize, usize),
}

impl CommunitySet {
    pub fn new(communities: Vec<Community>) -> Self {
        CommunitySet { communities }
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Community> {
        self.communities.iter()
    }

    pub fn get(&self, community_id: usize) -> Option<&Community> {
        self.communities.iter().find(|c| c.community_id == community_id)
    }

    /// Ids of the communities containing `author`, ascending.
    pub fn memberships(&self, author: &AuthorId) -> Vec<usize> {
        let mut ids: Vec<usize> =
            self.communities.iter().filter(|c| c.contains(author)).map(|c| c.community_id).collect();
        ids.sort_unstable();
        ids
    }

    /// Checks cover, membership and distinctness against `graph`.
    pub fn validate(&self, graph: &CoauthorGraph) -> Result<(), CoverError> {
        let mut covered = HashSet::new();
        let mut seen: HashMap<&BTreeSet<AuthorId>, usize> = HashMap::new();
        for c in &self.communities {
            if c.is_empty() {
                return Err(CoverError::Empty(c.community_id));
            }
            if let Some(&other) = seen.get(&c.member_ids) {
                return Err(CoverError::Duplicate(other, c.community_id));
            }
            seen.insert(&c.member_ids, c.community_id);
            for m in &c.member_ids {
                if !graph.contains(m) {
                    return Err(CoverError::UnknownMember(c.community_id, m.clone()));
                }
                covered.insert(m);
            }
        }
        for a in graph.authors() {
            if !covered.contains(a) {
                return Err(CoverError::Uncovered(a.clone()));
            }
        }
        Ok(())
    }
}
