//! Overlapping community detection by edge removal and vertex splitting.
//!
//! The loop recomputes every betweenness quantity after each action. When
//! the best split betweenness strictly exceeds the best edge betweenness
//! the vertex is split into two copies, otherwise the edge is removed. The
//! resulting [`Dendrogram`] is cut where modularity of the component
//! partition peaks; split copies are mapped back to their author so that
//! a split author ends up in several communities.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::betweenness::{compute_flows, definitely_greater, definitely_less, greedy_split, EdgeIndex, TIE_EPS};
use crate::model::{AuthorId, CoauthorGraph, Community, CommunitySet};

/// Minimum degree for a vertex to be considered for splitting.
pub const SPLIT_MIN_DEGREE: usize = 4;
/// Minimum neighbours on each side of an accepted split.
pub const SPLIT_MIN_SIDE: usize = 2;

/// A vertex of the working graph: an author, or the `copy`-th split-off
/// copy of one. Copy 0 is the original.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorkingVertex {
    pub author: AuthorId,
    pub copy: u32,
}

impl fmt::Display for WorkingVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.copy == 0 {
            write!(f, "{}", self.author)
        } else {
            write!(f, "{}#{}", self.author, self.copy)
        }
    }
}

impl Serialize for WorkingVertex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum DendrogramAction {
    RemoveEdge {
        edge: (WorkingVertex, WorkingVertex),
        score: f64,
    },
    /// `vertex` keeps the `left` neighbours, the new `copy` takes `right`.
    SplitVertex {
        vertex: WorkingVertex,
        copy: WorkingVertex,
        left: Vec<WorkingVertex>,
        right: Vec<WorkingVertex>,
        score: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DendrogramEvent {
    pub step: usize,
    #[serde(flatten)]
    pub action: DendrogramAction,
    pub components_after: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    pub events: Vec<DendrogramEvent>,
    pub initial_graph: CoauthorGraph,
}

impl Dendrogram {
    /// One JSON object per event.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn split_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e.action, DendrogramAction::SplitVertex { .. })).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModularityScore {
    pub value: f64,
    pub community_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModularityError {
    #[error("author {0} is not assigned to any cluster")]
    Uncovered(AuthorId),
    #[error("author {0} is assigned to more than one cluster")]
    Overlap(AuthorId),
    #[error("author {0} is not in the graph")]
    Unknown(AuthorId),
}

/// `Σ (e_ii − a_i²)` for a cluster assignment; `0` for an edgeless graph.
fn modularity_value(edges: &[(usize, usize)], cluster_of: &[usize], clusters: usize) -> f64 {
    if edges.is_empty() {
        return 0.0;
    }
    let m = edges.len() as f64;
    let mut inside = vec![0usize; clusters];
    let mut ends = vec![0usize; clusters];
    for &(a, b) in edges {
        let (ca, cb) = (cluster_of[a], cluster_of[b]);
        if ca == cb {
            inside[ca] += 1;
        }
        ends[ca] += 1;
        ends[cb] += 1;
    }
    inside
        .iter()
        .zip(&ends)
        .map(|(&e, &a)| {
            let a = a as f64 / (2.0 * m);
            e as f64 / m - a * a
        })
        .sum()
}

/// Modularity of a disjoint cover of `g`.
pub fn modularity(g: &CoauthorGraph, partition: &[BTreeSet<AuthorId>]) -> Result<ModularityScore, ModularityError> {
    let mut cluster_of = vec![usize::MAX; g.vertex_count()];
    for (c, members) in partition.iter().enumerate() {
        for a in members {
            let v = g.index_of(a).ok_or_else(|| ModularityError::Unknown(a.clone()))?;
            if cluster_of[v] != usize::MAX {
                return Err(ModularityError::Overlap(a.clone()));
            }
            cluster_of[v] = c;
        }
    }
    if let Some(v) = cluster_of.iter().position(|&c| c == usize::MAX) {
        return Err(ModularityError::Uncovered(g.author(v).clone()));
    }
    let edges: Vec<(usize, usize)> = g.edges().map(|(e, _)| e).collect();
    Ok(ModularityScore {
        value: modularity_value(&edges, &cluster_of, partition.len()),
        community_count: partition.len(),
    })
}

/// Mutable graph the loop works on. Vertices are ordered by
/// `(author index, copy)`; adjacency lists follow that order so neighbour
/// positions double as the tie-break order.
struct WorkGraph<'g> {
    source: &'g CoauthorGraph,
    /// `(origin vertex, copy number)` per working vertex.
    verts: Vec<(usize, u32)>,
    lookup: HashMap<(usize, u32), usize>,
    adj: Vec<Vec<usize>>,
    /// Every original edge, rewired through splits but never removed;
    /// modularity is measured against this edge set.
    all_edges: Vec<(usize, usize)>,
    copies: Vec<u32>,
}

impl<'g> WorkGraph<'g> {
    fn new(source: &'g CoauthorGraph) -> Self {
        let n = source.vertex_count();
        WorkGraph {
            source,
            verts: (0..n).map(|v| (v, 0)).collect(),
            lookup: (0..n).map(|v| ((v, 0), v)).collect(),
            adj: source.adjacency().to_vec(),
            all_edges: source.edges().map(|(e, _)| e).collect(),
            copies: vec![0; n],
        }
    }

    fn key(&self, v: usize) -> (usize, u32) {
        self.verts[v]
    }

    fn label(&self, v: usize) -> WorkingVertex {
        let (origin, copy) = self.verts[v];
        WorkingVertex { author: self.source.author(origin).clone(), copy }
    }

    fn index(&self, w: &WorkingVertex) -> usize {
        let origin = self.source.index_of(&w.author).expect("author in graph");
        self.lookup[&(origin, w.copy)]
    }

    fn edge_key(&self, a: usize, b: usize) -> ((usize, u32), (usize, u32)) {
        let (ka, kb) = (self.key(a), self.key(b));
        if ka <= kb {
            (ka, kb)
        } else {
            (kb, ka)
        }
    }

    fn has_edges(&self) -> bool {
        self.adj.iter().any(|l| !l.is_empty())
    }

    fn remove_edge(&mut self, a: usize, b: usize) {
        self.adj[a].retain(|&x| x != b);
        self.adj[b].retain(|&x| x != a);
    }

    /// Moves the `right` neighbours of `v` onto a fresh copy; returns it.
    fn split(&mut self, v: usize, right: &[usize]) -> usize {
        let origin = self.verts[v].0;
        self.copies[origin] += 1;
        let copy = self.adj.len();
        self.verts.push((origin, self.copies[origin]));
        self.lookup.insert((origin, self.copies[origin]), copy);
        self.adj[v].retain(|x| !right.contains(x));
        let mut moved = right.to_vec();
        moved.sort_by_key(|&x| self.verts[x]);
        self.adj.push(moved);
        for &x in right {
            for y in self.adj[x].iter_mut() {
                if *y == v {
                    *y = copy;
                }
            }
            let verts = &self.verts;
            self.adj[x].sort_by_key(|&y| verts[y]);
        }
        for e in self.all_edges.iter_mut() {
            if e.0 == v && right.contains(&e.1) {
                e.0 = copy;
            } else if e.1 == v && right.contains(&e.0) {
                e.1 = copy;
            }
        }
        copy
    }

    /// Connected components as a cluster assignment, numbered by first vertex.
    fn components(&self) -> (Vec<usize>, usize) {
        let n = self.adj.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    fn component_count(&self) -> usize {
        self.components().1
    }

    fn modularity(&self) -> ModularityScore {
        let (comp, count) = self.components();
        ModularityScore { value: modularity_value(&self.all_edges, &comp, count), community_count: count }
    }

    /// Overlapping communities: components mapped back to authors,
    /// deduplicated, ordered by sorted member list.
    fn communities(&self) -> CommunitySet {
        let (comp, count) = self.components();
        let mut groups: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
        for (v, &c) in comp.iter().enumerate() {
            groups[c].insert(self.verts[v].0);
        }
        let unique: BTreeSet<Vec<AuthorId>> =
            groups.into_iter().map(|g| g.into_iter().map(|o| self.source.author(o).clone()).collect()).collect();
        CommunitySet::new(unique.into_iter().enumerate().map(|(i, m)| Community::new(i, m)).collect())
    }

    fn apply(&mut self, action: &DendrogramAction) {
        match action {
            DendrogramAction::RemoveEdge { edge, .. } => {
                let (a, b) = (self.index(&edge.0), self.index(&edge.1));
                self.remove_edge(a, b);
            }
            DendrogramAction::SplitVertex { vertex, right, .. } => {
                let v = self.index(vertex);
                let right: Vec<usize> = right.iter().map(|w| self.index(w)).collect();
                self.split(v, &right);
            }
        }
    }

    /// Chooses the next action by full recomputation.
    fn next_action(&self) -> Option<DendrogramAction> {
        let edges = EdgeIndex::new(&self.adj);
        if edges.len() == 0 {
            return None;
        }
        let track: Vec<bool> = self.adj.iter().map(|l| l.len() >= SPLIT_MIN_DEGREE).collect();
        let flows = compute_flows(&self.adj, &edges, &track);

        let mut best_edge = 0;
        for id in 1..edges.len() {
            let (x, best) = (flows.edge[id], flows.edge[best_edge]);
            let tie = !definitely_greater(x, best) && !definitely_less(x, best);
            let (a, b) = edges.endpoints(id);
            let (ba, bb) = edges.endpoints(best_edge);
            if definitely_greater(x, best) || (tie && self.edge_key(a, b) < self.edge_key(ba, bb)) {
                best_edge = id;
            }
        }
        let edge_score = flows.edge[best_edge];

        let mut best_split: Option<(f64, usize, Vec<usize>, Vec<usize>)> = None;
        for (v, m) in flows.pairs.iter().enumerate() {
            let Some(m) = m else { continue };
            let (score, left, right) = greedy_split(self.adj[v].len(), m);
            if left.len() < SPLIT_MIN_SIDE || right.len() < SPLIT_MIN_SIDE {
                continue;
            }
            let better = match &best_split {
                None => true,
                Some((s, u, ..)) => {
                    definitely_greater(score, *s) || (!definitely_less(score, *s) && self.key(v) < self.key(*u))
                }
            };
            if better {
                best_split = Some((score, v, left, right));
            }
        }

        match best_split {
            Some((score, v, left, right)) if definitely_greater(score, edge_score) => {
                let name = |pos: &[usize]| pos.iter().map(|&p| self.label(self.adj[v][p])).collect::<Vec<_>>();
                let origin = self.verts[v].0;
                Some(DendrogramAction::SplitVertex {
                    vertex: self.label(v),
                    copy: WorkingVertex { author: self.source.author(origin).clone(), copy: self.copies[origin] + 1 },
                    left: name(&left),
                    right: name(&right),
                    score,
                })
            }
            _ => {
                let (a, b) = edges.endpoints(best_edge);
                let (a, b) = if self.key(a) <= self.key(b) { (a, b) } else { (b, a) };
                Some(DendrogramAction::RemoveEdge { edge: (self.label(a), self.label(b)), score: edge_score })
            }
        }
    }
}

/// Runs the removal/split loop until no edges remain.
pub fn run_conga(g: &CoauthorGraph) -> Dendrogram {
    let mut work = WorkGraph::new(g);
    let mut events = Vec::new();
    while let Some(action) = work.next_action() {
        work.apply(&action);
        events.push(DendrogramEvent { step: events.len() + 1, action, components_after: work.component_count() });
    }
    debug_assert!(!work.has_edges());
    Dendrogram { events, initial_graph: g.clone() }
}

/// A dendrogram level: the state after `step` events (0 = initial graph).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutLevel {
    pub step: usize,
    pub modularity: ModularityScore,
    pub communities: CommunitySet,
}

/// Modularity after each step, starting with the initial graph at step 0.
pub fn modularity_profile(d: &Dendrogram) -> Vec<ModularityScore> {
    let mut work = WorkGraph::new(&d.initial_graph);
    let mut out = vec![work.modularity()];
    for e in &d.events {
        work.apply(&e.action);
        out.push(work.modularity());
    }
    out
}

fn level_at(d: &Dendrogram, step: usize) -> CutLevel {
    let mut work = WorkGraph::new(&d.initial_graph);
    for e in &d.events[..step] {
        work.apply(&e.action);
    }
    CutLevel { step, modularity: work.modularity(), communities: work.communities() }
}

/// The level with maximal modularity; ties prefer fewer communities, then
/// the earlier step.
pub fn best_level(d: &Dendrogram) -> CutLevel {
    let profile = modularity_profile(d);
    let mut best = 0;
    for (step, q) in profile.iter().enumerate().skip(1) {
        let b = profile[best];
        let same = (q.value - b.value).abs() <= TIE_EPS * (1.0 + b.value.abs());
        if (!same && q.value > b.value) || (same && q.community_count < b.community_count) {
            best = step;
        }
    }
    level_at(d, best)
}

pub fn best_cut(d: &Dendrogram) -> CommunitySet {
    best_level(d).communities
}

/// The earliest level with at least `count` components, or the final level
/// when the dendrogram never reaches that many.
pub fn cut_at_count(d: &Dendrogram, count: usize) -> CutLevel {
    let mut work = WorkGraph::new(&d.initial_graph);
    let mut step = 0;
    while work.component_count() < count && step < d.events.len() {
        work.apply(&d.events[step].action);
        step += 1;
    }
    CutLevel { step, modularity: work.modularity(), communities: work.communities() }
}

/// Which community ids each author belongs to.
pub fn membership_map(cs: &CommunitySet) -> BTreeMap<AuthorId, Vec<usize>> {
    let mut map: BTreeMap<AuthorId, Vec<usize>> = BTreeMap::new();
    for c in cs.iter() {
        for m in &c.member_ids {
            map.entry(m.clone()).or_default().push(c.community_id);
        }
    }
    map
}
