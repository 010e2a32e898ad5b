//! Synthetic inputs for the benchmarks.

use std::collections::BTreeSet;

use infcom_core::{build_coauthor_graph, AuthorId, CoauthorGraph, Community, CommunitySet, PaperRecord};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A corpus of `groups` research groups of `group_size` authors each. Most
/// papers stay inside one group; `bridge_rate` of them pull in an author
/// from the next group so the groups overlap.
pub fn clustered_corpus(
    groups: usize,
    group_size: usize,
    papers_per_group: usize,
    bridge_rate: f64,
    seed: u64,
) -> Vec<PaperRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let author = |g: usize, i: usize| AuthorId(format!("g{g:03}a{i:02}"));
    let mut papers = Vec::with_capacity(groups * papers_per_group);
    for g in 0..groups {
        for p in 0..papers_per_group {
            let team = rng.gen_range(2..=group_size.min(4));
            let mut ids: Vec<AuthorId> = sample(&mut rng, group_size, team).into_iter().map(|i| author(g, i)).collect();
            if groups > 1 && rng.gen_bool(bridge_rate) {
                ids.push(author((g + 1) % groups, rng.gen_range(0..group_size)));
            }
            papers.push(PaperRecord {
                paper_id: format!("g{g:03}p{p:03}").as_str().into(),
                title: String::new(),
                year: 2000 + rng.gen_range(0..20),
                topics: BTreeSet::from(["synthetic".to_string()]),
                author_ids: ids,
                citation_count: rng.gen_range(0..200),
            });
        }
    }
    papers
}

pub fn clustered_graph(groups: usize, group_size: usize, seed: u64) -> CoauthorGraph {
    build_coauthor_graph(&clustered_corpus(groups, group_size, group_size * 2, 0.1, seed))
}

/// One community per group, matching [`clustered_corpus`] naming.
pub fn group_communities(groups: usize, group_size: usize) -> CommunitySet {
    CommunitySet::new(
        (0..groups).map(|g| Community::new(g, (0..group_size).map(|i| AuthorId(format!("g{g:03}a{i:02}"))))).collect(),
    )
}
