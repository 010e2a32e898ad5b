//! Brute-force reference implementations. They enumerate explicitly and
//! share no code with the library kernels.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Plain adjacency-set graph on `0..n`.
#[derive(Clone, Debug)]
pub struct SmallGraph {
    pub n: usize,
    pub adj: Vec<BTreeSet<usize>>,
}

impl SmallGraph {
    pub fn new(n: usize) -> Self {
        SmallGraph { n, adj: vec![BTreeSet::new(); n] }
    }

    pub fn add(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for &b in &self.adj[a] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn label(v: usize) -> String {
        format!("v{v:02}")
    }

    pub fn edge_labels(&self) -> Vec<(String, String)> {
        self.edges().into_iter().map(|(a, b)| (Self::label(a), Self::label(b))).collect()
    }

    fn dist_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; self.n];
        d[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &self.adj[v] {
                if d[w].is_none() {
                    d[w] = Some(d[v].unwrap() + 1);
                    q.push_back(w);
                }
            }
        }
        d
    }

    /// Every shortest path from `s` to `t`, as vertex sequences.
    pub fn all_shortest_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let dt = self.dist_from(t);
        if dt[s].is_none() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut path = vec![s];
        self.extend(&dt, t, &mut path, &mut out);
        out
    }

    fn extend(&self, dt: &[Option<usize>], t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == t {
            out.push(path.clone());
            return;
        }
        let dv = dt[v].unwrap();
        for &w in &self.adj[v] {
            if dt[w] == Some(dv - 1) {
                path.push(w);
                self.extend(dt, t, path, out);
                path.pop();
            }
        }
    }

    pub fn distance(&self, s: usize, t: usize) -> Option<usize> {
        self.dist_from(s)[t]
    }
}

pub struct BruteForce {
    pub edge: BTreeMap<(usize, usize), f64>,
    pub vertex: Vec<f64>,
    /// pair[v][(a, b)] with a < b
    pub pair: Vec<BTreeMap<(usize, usize), f64>>,
}

/// Fractional shortest-path credit by explicit path enumeration.
pub fn brute_force(g: &SmallGraph) -> BruteForce {
    let mut edge: BTreeMap<(usize, usize), f64> = g.edges().into_iter().map(|e| (e, 0.0)).collect();
    let mut vertex = vec![0.0; g.n];
    let mut pair: Vec<BTreeMap<(usize, usize), f64>> = (0..g.n)
        .map(|v| {
            let nb: Vec<usize> = g.adj[v].iter().copied().collect();
            let mut m = BTreeMap::new();
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    m.insert((nb[i], nb[j]), 0.0);
                }
            }
            m
        })
        .collect();
    for s in 0..g.n {
        for t in s + 1..g.n {
            let paths = g.all_shortest_paths(s, t);
            if paths.is_empty() {
                continue;
            }
            let share = 1.0 / paths.len() as f64;
            for p in &paths {
                for w in p.windows(2) {
                    *edge.get_mut(&(w[0].min(w[1]), w[0].max(w[1]))).unwrap() += share;
                }
                for w in p.windows(3) {
                    vertex[w[1]] += share;
                    let key = (w[0].min(w[2]), w[0].max(w[2]));
                    *pair[w[1]].get_mut(&key).unwrap() += share;
                }
            }
        }
    }
    BruteForce { edge, vertex, pair }
}

/// Best crossing flow over every neighbour bipartition with both sides
/// non-empty.
pub fn exhaustive_split(neighbours: &[usize], pair: &BTreeMap<(usize, usize), f64>) -> f64 {
    let d = neighbours.len();
    assert!(d >= 2);
    let mut best = f64::MIN;
    // fix neighbours[0] on the left to skip mirrored partitions
    for mask in 0u32..(1 << (d - 1)) {
        let in_left = |i: usize| i == 0 || mask & (1 << (i - 1)) == 0;
        if (0..d).all(in_left) {
            continue;
        }
        let mut score = 0.0;
        for i in 0..d {
            for j in 0..d {
                if in_left(i) && !in_left(j) {
                    let (a, b) = (neighbours[i], neighbours[j]);
                    score += pair[&(a.min(b), a.max(b))];
                }
            }
        }
        if score > best {
            best = score;
        }
    }
    best
}

/// Connected graph: random spanning tree plus random extra edges.
pub fn random_connected(rng: &mut ChaCha8Rng, max_n: usize) -> SmallGraph {
    let n = rng.gen_range(3..=max_n);
    let mut g = SmallGraph::new(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add(u, v);
    }
    let p: f64 = rng.gen_range(0.0..0.5);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add(a, b);
            }
        }
    }
    g
}

/// Modularity via `1/2m Σ_ij (A_ij − k_i k_j / 2m) [c_i = c_j]`.
pub fn modularity_matrix_form(g: &SmallGraph, cluster: &[usize]) -> f64 {
    let m = g.edges().len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..g.n {
        for j in 0..g.n {
            if cluster[i] != cluster[j] {
                continue;
            }
            let a = if g.adj[i].contains(&j) { 1.0 } else { 0.0 };
            q += a - (g.adj[i].len() as f64 * g.adj[j].len() as f64) / (2.0 * m);
        }
    }
    q / (2.0 * m)
}

/// Influence by literal double summation over the corpus: owned-paper
/// indicator times the "at least as cited" indicator.
pub fn influence_by_counting(owned: &[bool], cites: &[u64]) -> f64 {
    let n_owned = owned.iter().filter(|&&o| o).count();
    if n_owned == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for j in 0..cites.len() {
        if !owned[j] {
            continue;
        }
        let mut numerator = 0usize;
        for l in 0..cites.len() {
            if owned[l] && cites[l] >= cites[j] {
                numerator += 1;
            }
        }
        let w = numerator as f64 / n_owned as f64;
        sum += w * cites[j] as f64;
    }
    sum / n_owned as f64
}
