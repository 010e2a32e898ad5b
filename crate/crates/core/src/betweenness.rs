//! Shortest-path flow kernels: edge, vertex, pair and split betweenness.
//!
//! All quantities come out of one Brandes-style pass per source vertex.
//! The BFS from `s` yields path counts `σ`; walking back in reverse BFS
//! order, the flow over a DAG edge `v → w` is `σ_v / σ_w · (1 + δ_w)`.
//! Pair betweenness at `v` refines that flow by the predecessor `a` the
//! paths arrived through: `σ_a / σ_v` of it entered via `a`.
//!
//! Each unordered pair is seen once from either endpoint, so all totals
//! are halved at the end. Disconnected pairs contribute nothing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{AuthorId, CoauthorGraph};

/// Sources per parallel work unit. Partial sums are reduced in chunk
/// order, so results are identical for any thread count.
const SOURCE_CHUNK: usize = 16;

/// Relative tolerance used when comparing accumulated flows for ties.
pub const TIE_EPS: f64 = 1e-9;

#[inline]
pub(crate) fn definitely_less(a: f64, b: f64) -> bool {
    a < b - TIE_EPS * (1.0 + b.abs())
}

#[inline]
pub(crate) fn definitely_greater(a: f64, b: f64) -> bool {
    definitely_less(b, a)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BetweennessError {
    #[error("vertex {0} is not in the graph")]
    VertexNotFound(AuthorId),
    #[error("vertex {vertex} has degree {degree}; splitting needs at least 2 neighbours")]
    DegreeTooSmall { vertex: AuthorId, degree: usize },
}

/// Undirected edge numbering over an adjacency list.
pub(crate) struct EdgeIndex {
    /// `ids[v][k]` is the id of the edge `v – adj[v][k]`.
    ids: Vec<Vec<usize>>,
    /// `back[v][k]` is the position of `v` inside `adj[adj[v][k]]`.
    back: Vec<Vec<usize>>,
    endpoints: Vec<(usize, usize)>,
}

impl EdgeIndex {
    pub(crate) fn new(adj: &[Vec<usize>]) -> Self {
        let mut ids: Vec<Vec<usize>> = adj.iter().map(|l| vec![usize::MAX; l.len()]).collect();
        let mut back: Vec<Vec<usize>> = adj.iter().map(|l| vec![usize::MAX; l.len()]).collect();
        let mut endpoints = Vec::new();
        for (v, list) in adj.iter().enumerate() {
            for (k, &w) in list.iter().enumerate() {
                if v < w {
                    let kw = adj[w].iter().position(|&x| x == v).expect("adjacency is symmetric");
                    let id = endpoints.len();
                    endpoints.push((v, w));
                    ids[v][k] = id;
                    ids[w][kw] = id;
                    back[v][k] = kw;
                    back[w][kw] = k;
                }
            }
        }
        EdgeIndex { ids, back, endpoints }
    }

    pub(crate) fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub(crate) fn endpoints(&self, id: usize) -> (usize, usize) {
        self.endpoints[id]
    }
}

/// Raw kernel output in vertex/edge index space.
pub(crate) struct Flows {
    pub edge: Vec<f64>,
    pub vertex: Vec<f64>,
    /// For tracked vertices, a symmetric `deg × deg` matrix of pair flows
    /// indexed by neighbour position.
    pub pairs: Vec<Option<Vec<f64>>>,
}

impl Flows {
    fn zeroed(adj: &[Vec<usize>], edges: usize, track: &[bool]) -> Self {
        Flows {
            edge: vec![0.0; edges],
            vertex: vec![0.0; adj.len()],
            pairs: adj.iter().zip(track).map(|(l, &t)| t.then(|| vec![0.0; l.len() * l.len()])).collect(),
        }
    }

    fn add(&mut self, other: &Flows) {
        for (a, b) in self.edge.iter_mut().zip(&other.edge) {
            *a += b;
        }
        for (a, b) in self.vertex.iter_mut().zip(&other.vertex) {
            *a += b;
        }
        for (a, b) in self.pairs.iter_mut().zip(&other.pairs) {
            if let (Some(a), Some(b)) = (a, b) {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
        }
    }

    /// Halves everything and folds pair matrices to symmetric form.
    fn finish(&mut self, adj: &[Vec<usize>]) {
        self.edge.iter_mut().for_each(|x| *x *= 0.5);
        self.vertex.iter_mut().for_each(|x| *x *= 0.5);
        for (v, m) in self.pairs.iter_mut().enumerate() {
            let Some(m) = m else { continue };
            let d = adj[v].len();
            for i in 0..d {
                m[i * d + i] = 0.0;
                for j in i + 1..d {
                    let s = 0.5 * (m[i * d + j] + m[j * d + i]);
                    m[i * d + j] = s;
                    m[j * d + i] = s;
                }
            }
        }
    }
}

struct Scratch {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    /// Predecessors as positions in the vertex's own adjacency list.
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }
}

fn single_source(adj: &[Vec<usize>], edges: &EdgeIndex, s: usize, sc: &mut Scratch, out: &mut Flows) {
    for &v in &sc.order {
        sc.dist[v] = -1;
        sc.sigma[v] = 0.0;
        sc.delta[v] = 0.0;
        sc.preds[v].clear();
    }
    sc.order.clear();

    sc.dist[s] = 0;
    sc.sigma[s] = 1.0;
    sc.queue.push_back(s);
    while let Some(v) = sc.queue.pop_front() {
        sc.order.push(v);
        for (k, &w) in adj[v].iter().enumerate() {
            if sc.dist[w] < 0 {
                sc.dist[w] = sc.dist[v] + 1;
                sc.queue.push_back(w);
            }
            if sc.dist[w] == sc.dist[v] + 1 {
                sc.sigma[w] += sc.sigma[v];
                sc.preds[w].push(edges.back[v][k]);
            }
        }
    }

    for idx in (0..sc.order.len()).rev() {
        let w = sc.order[idx];
        let coeff = (1.0 + sc.delta[w]) / sc.sigma[w];
        for pi in 0..sc.preds[w].len() {
            let k = sc.preds[w][pi];
            let v = adj[w][k];
            let flow = sc.sigma[v] * coeff;
            out.edge[edges.ids[w][k]] += flow;
            sc.delta[v] += flow;
            if let Some(m) = out.pairs[v].as_mut() {
                // flow leaves v towards w; split it by the entry neighbour
                let d = adj[v].len();
                let exit = edges.back[w][k];
                for &entry in &sc.preds[v] {
                    let a = adj[v][entry];
                    m[entry * d + exit] += sc.sigma[a] / sc.sigma[v] * flow;
                }
            }
        }
        if w != s {
            out.vertex[w] += sc.delta[w];
        }
    }
}

/// Runs the all-sources pass. `track[v]` enables pair flows for `v`.
pub(crate) fn compute_flows(adj: &[Vec<usize>], edges: &EdgeIndex, track: &[bool]) -> Flows {
    let n = adj.len();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Flows> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut acc = Flows::zeroed(adj, edges.len(), track);
            let mut sc = Scratch::new(n);
            for &s in chunk {
                single_source(adj, edges, s, &mut sc, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = Flows::zeroed(adj, edges.len(), track);
    for p in &partials {
        total.add(p);
    }
    total.finish(adj);
    total
}

/// Greedy neighbour bipartition over a symmetric pair-flow matrix.
///
/// Starts from singleton clusters and repeatedly merges the two clusters
/// with the least flow between them until two remain. Clusters are kept in
/// order of their smallest position; ties go to the first pair in that
/// order. Returns `(score, left, right)` with positions ascending.
#[allow(clippy::needless_range_loop)]
pub(crate) fn greedy_split(d: usize, pairs: &[f64]) -> (f64, Vec<usize>, Vec<usize>) {
    assert!(d >= 2, "split needs at least two neighbours");
    let mut members: Vec<Vec<usize>> = (0..d).map(|i| vec![i]).collect();
    let mut weight: Vec<Vec<f64>> = (0..d).map(|i| pairs[i * d..(i + 1) * d].to_vec()).collect();
    while members.len() > 2 {
        let mut best = (0, 1);
        let mut best_w = weight[0][1];
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if definitely_less(weight[i][j], best_w) {
                    best = (i, j);
                    best_w = weight[i][j];
                }
            }
        }
        let (i, j) = best;
        let absorbed = members.remove(j);
        members[i].extend(absorbed);
        members[i].sort_unstable();
        for k in 0..weight.len() {
            let wj = weight[j][k];
            weight[i][k] += wj;
            weight[k][i] = weight[i][k];
        }
        weight[i][i] = 0.0;
        weight.remove(j);
        for row in weight.iter_mut() {
            row.remove(j);
        }
    }
    let score = weight[0][1];
    let right = members.pop().expect("two clusters");
    let left = members.pop().expect("two clusters");
    (score, left, right)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetweennessScores {
    /// Keyed by `(low, high)` author id.
    pub edge_scores: BTreeMap<(AuthorId, AuthorId), f64>,
    pub vertex_scores: BTreeMap<AuthorId, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairBetweenness {
    pub vertex: AuthorId,
    /// Keyed by `(low, high)` neighbour id; every neighbour pair is present.
    pub pair_scores: BTreeMap<(AuthorId, AuthorId), f64>,
}

impl PairBetweenness {
    pub fn total(&self) -> f64 {
        self.pair_scores.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitResult {
    pub vertex: AuthorId,
    pub score: f64,
    pub partition: (BTreeSet<AuthorId>, BTreeSet<AuthorId>),
}

fn ordered(a: &AuthorId, b: &AuthorId) -> (AuthorId, AuthorId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Edge and vertex betweenness for every edge and vertex of `g`.
pub fn edge_vertex_betweenness(g: &CoauthorGraph) -> BetweennessScores {
    let adj = g.adjacency();
    let edges = EdgeIndex::new(adj);
    let flows = compute_flows(adj, &edges, &vec![false; adj.len()]);
    let edge_scores = (0..edges.len())
        .map(|id| {
            let (a, b) = edges.endpoints(id);
            (ordered(g.author(a), g.author(b)), flows.edge[id])
        })
        .collect();
    let vertex_scores = flows.vertex.iter().enumerate().map(|(v, &x)| (g.author(v).clone(), x)).collect();
    BetweennessScores { edge_scores, vertex_scores }
}

fn tracked_flows(g: &CoauthorGraph, v: &AuthorId) -> Result<(usize, Vec<f64>), BetweennessError> {
    let vi = g.index_of(v).ok_or_else(|| BetweennessError::VertexNotFound(v.clone()))?;
    let adj = g.adjacency();
    let edges = EdgeIndex::new(adj);
    let mut track = vec![false; adj.len()];
    track[vi] = true;
    let mut flows = compute_flows(adj, &edges, &track);
    Ok((vi, flows.pairs[vi].take().expect("tracked")))
}

/// Through-flow at `v` decomposed by entry and exit neighbour.
pub fn pair_betweenness(g: &CoauthorGraph, v: &AuthorId) -> Result<PairBetweenness, BetweennessError> {
    let (vi, m) = tracked_flows(g, v)?;
    let nbrs = g.neighbors(vi);
    let d = nbrs.len();
    let mut pair_scores = BTreeMap::new();
    for i in 0..d {
        for j in i + 1..d {
            pair_scores.insert(ordered(g.author(nbrs[i]), g.author(nbrs[j])), m[i * d + j]);
        }
    }
    Ok(PairBetweenness { vertex: v.clone(), pair_scores })
}

/// Greedy split betweenness of `v` and the neighbour bipartition achieving it.
pub fn split_betweenness(g: &CoauthorGraph, v: &AuthorId) -> Result<SplitResult, BetweennessError> {
    let vi = g.index_of(v).ok_or_else(|| BetweennessError::VertexNotFound(v.clone()))?;
    let degree = g.degree(vi);
    if degree < 2 {
        return Err(BetweennessError::DegreeTooSmall { vertex: v.clone(), degree });
    }
    let (_, m) = tracked_flows(g, v)?;
    let (score, left, right) = greedy_split(degree, &m);
    let nbrs = g.neighbors(vi);
    let side = |pos: Vec<usize>| pos.into_iter().map(|p| g.author(nbrs[p]).clone()).collect();
    Ok(SplitResult { vertex: v.clone(), score, partition: (side(left), side(right)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn id(s: &str) -> AuthorId {
        s.into()
    }

    fn edge(scores: &BetweennessScores, a: &str, b: &str) -> f64 {
        scores.edge_scores[&ordered(&id(a), &id(b))]
    }

    #[test]
    fn path_of_three() {
        let g = CoauthorGraph::from_edges(&[("a", "b"), ("b", "c")]);
        let s = edge_vertex_betweenness(&g);
        assert_eq!(edge(&s, "a", "b"), 2.0);
        assert_eq!(edge(&s, "b", "c"), 2.0);
        assert_eq!(s.vertex_scores[&id("b")], 1.0);
        assert_eq!(s.vertex_scores[&id("a")], 0.0);
        let p = pair_betweenness(&g, &id("b")).unwrap();
        assert_eq!(p.pair_scores[&(id("a"), id("c"))], 1.0);
    }

    #[test]
    fn triangle() {
        let g = CoauthorGraph::from_edges(&[("a", "b"), ("b", "c"), ("a", "c")]);
        let s = edge_vertex_betweenness(&g);
        assert!(s.edge_scores.values().all(|&x| x == 1.0));
        assert!(s.vertex_scores.values().all(|&x| x == 0.0));
    }

    #[test]
    fn bridged_triangles_bridge() {
        let s = edge_vertex_betweenness(&fixtures::bridged_triangles());
        assert_eq!(edge(&s, "c", "d"), 9.0);
    }

    #[test]
    fn disconnected_pairs_contribute_nothing() {
        let s = edge_vertex_betweenness(&fixtures::two_triangles());
        assert!(s.edge_scores.values().all(|&x| x == 1.0));
    }

    #[test]
    fn star_pairs() {
        let g = CoauthorGraph::from_edges(&[("s", "l1"), ("s", "l2"), ("s", "l3")]);
        let p = pair_betweenness(&g, &id("s")).unwrap();
        assert_eq!(p.pair_scores.len(), 3);
        assert!(p.pair_scores.values().all(|&x| x == 1.0));
        assert_eq!(p.total(), 3.0);
    }

    #[test]
    fn leaf_has_no_pairs() {
        let g = CoauthorGraph::from_edges(&[("a", "b"), ("b", "c")]);
        assert!(pair_betweenness(&g, &id("a")).unwrap().pair_scores.is_empty());
    }

    #[test]
    fn unknown_vertex() {
        let g = CoauthorGraph::from_edges(&[("a", "b")]);
        assert_eq!(pair_betweenness(&g, &id("z")).unwrap_err(), BetweennessError::VertexNotFound(id("z")));
        assert!(matches!(split_betweenness(&g, &id("z")), Err(BetweennessError::VertexNotFound(_))));
    }

    #[test]
    fn split_needs_two_neighbours() {
        let g = CoauthorGraph::from_edges(&[("a", "b")]);
        assert_eq!(
            split_betweenness(&g, &id("a")).unwrap_err(),
            BetweennessError::DegreeTooSmall { vertex: id("a"), degree: 1 }
        );
    }

    #[test]
    fn degree_two_split_equals_vertex_betweenness() {
        let g = CoauthorGraph::from_edges(&[("a", "b"), ("b", "c"), ("c", "d")]);
        let s = edge_vertex_betweenness(&g);
        let split = split_betweenness(&g, &id("b")).unwrap();
        assert_eq!(split.score, s.vertex_scores[&id("b")]);
    }

    #[test]
    fn bowtie_center_split() {
        let split = split_betweenness(&fixtures::bowtie(), &id("v")).unwrap();
        assert_eq!(split.score, 4.0);
        let expected: (BTreeSet<AuthorId>, BTreeSet<AuthorId>) = ([id("a"), id("b")].into(), [id("c"), id("d")].into());
        assert_eq!(split.partition, expected);
    }

    #[test]
    fn star_of_four_splits_two_two() {
        let g = CoauthorGraph::from_edges(&[("s", "l1"), ("s", "l2"), ("s", "l3"), ("s", "l4")]);
        let split = split_betweenness(&g, &id("s")).unwrap();
        assert_eq!(split.score, 4.0);
        assert_eq!(split.partition.0.len(), 2);
        assert_eq!(split.partition.1.len(), 2);
    }

    #[test]
    fn greedy_merges_least_flow_first() {
        // neighbours 0..3; heavy flow 0<->1 must end up crossing the cut
        let d = 3;
        let m = [0.0, 5.0, 1.0, 5.0, 0.0, 2.0, 1.0, 2.0, 0.0];
        let (score, left, right) = greedy_split(d, &m);
        assert_eq!(score, 7.0);
        assert_eq!((left, right), (vec![0, 2], vec![1]));
    }

    #[test]
    fn seven_authors_split_at_shared_author() {
        let g = crate::model::build_coauthor_graph(&fixtures::seven_authors_papers());
        let split = split_betweenness(&g, &id("u4")).unwrap();
        assert_eq!(split.score, 9.0);
        let s = edge_vertex_betweenness(&g);
        assert_eq!(s.edge_scores.values().cloned().fold(f64::MIN, f64::max), 6.5);
    }
}
