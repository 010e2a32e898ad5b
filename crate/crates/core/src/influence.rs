//! Citation-based community influence and the baseline metrics it is
//! compared against.
//!
//! A community *owns* a paper when every author of the paper is a member.
//! Each owned paper is weighted by the fraction of owned papers cited at
//! least as often, so a single heavily cited outlier is discounted:
//!
//! ```text
//! w(p)   = |{ q owned : cite(q) >= cite(p) }| / |owned|
//! imp(p) = w(p) * cite(p)
//! I(c)   = mean of imp(p) over owned papers
//! ```

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AuthorId, Community, CommunitySet, PaperId, PaperRecord};

/// Scale of the normalized score: the most influential community gets this.
pub const NORMALIZED_MAX: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InfluenceError {
    #[error("paper {paper} is not owned by community {community}")]
    NotOwned { community: usize, paper: PaperId },
    #[error("community {0} owns no papers")]
    NoOwnedPapers(usize),
}

/// Whether every author of `p` belongs to `c`.
pub fn paper_membership(c: &Community, p: &PaperRecord) -> bool {
    p.author_ids.iter().all(|a| c.contains(a))
}

/// Whether `p_l` is cited at least as often as `p_k`.
pub fn cite_compare(p_l: &PaperRecord, p_k: &PaperRecord) -> bool {
    p_l.citation_count >= p_k.citation_count
}

pub fn owned_papers<'a>(c: &Community, corpus: &'a [PaperRecord]) -> Vec<&'a PaperRecord> {
    corpus.iter().filter(|p| paper_membership(c, p)).collect()
}

fn owned_citations(c: &Community, corpus: &[PaperRecord]) -> Vec<u64> {
    corpus.iter().filter(|p| paper_membership(c, p)).map(|p| p.citation_count).collect()
}

/// `(owned papers cited at least as often as p, owned papers)`.
fn weight_ratio(c: &Community, p: &PaperRecord, corpus: &[PaperRecord]) -> Result<(u64, u64), InfluenceError> {
    if !paper_membership(c, p) {
        return Err(InfluenceError::NotOwned { community: c.community_id, paper: p.paper_id.clone() });
    }
    let cites = owned_citations(c, corpus);
    if cites.is_empty() {
        return Err(InfluenceError::NoOwnedPapers(c.community_id));
    }
    let at_least = cites.iter().filter(|&&x| x >= p.citation_count).count();
    Ok((at_least as u64, cites.len() as u64))
}

pub fn paper_weight(c: &Community, p: &PaperRecord, corpus: &[PaperRecord]) -> Result<f64, InfluenceError> {
    let (at_least, n) = weight_ratio(c, p, corpus)?;
    Ok(at_least as f64 / n as f64)
}

pub fn paper_impact(c: &Community, p: &PaperRecord, corpus: &[PaperRecord]) -> Result<f64, InfluenceError> {
    let (at_least, n) = weight_ratio(c, p, corpus)?;
    Ok((at_least * p.citation_count) as f64 / n as f64)
}

/// Influence computed straight from the owned papers' citation counts.
/// Returns 0 for an empty list.
pub fn influence_from_citations(citations: &[u64]) -> f64 {
    let n = citations.len();
    if n == 0 {
        return 0.0;
    }
    let mut sorted = citations.to_vec();
    sorted.sort_unstable();
    // integer numerator keeps the single division as the only rounding step
    let total: u128 = sorted
        .iter()
        .map(|&c| {
            let at_least = n - sorted.partition_point(|&x| x < c);
            at_least as u128 * c as u128
        })
        .sum();
    total as f64 / (n as f64 * n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityInfluence {
    pub influence: f64,
    pub owned_paper_count: usize,
}

pub fn community_influence(c: &Community, corpus: &[PaperRecord]) -> CommunityInfluence {
    let cites = owned_citations(c, corpus);
    CommunityInfluence { influence: influence_from_citations(&cites), owned_paper_count: cites.len() }
}

pub fn min_citation_influence(c: &Community, corpus: &[PaperRecord]) -> Result<u64, InfluenceError> {
    owned_citations(c, corpus).into_iter().min().ok_or(InfluenceError::NoOwnedPapers(c.community_id))
}

pub fn mean_citation_influence(c: &Community, corpus: &[PaperRecord]) -> Result<f64, InfluenceError> {
    let cites = owned_citations(c, corpus);
    if cites.is_empty() {
        return Err(InfluenceError::NoOwnedPapers(c.community_id));
    }
    Ok(cites.iter().sum::<u64>() as f64 / cites.len() as f64)
}

pub fn h_index(citations: &[u64]) -> u64 {
    let mut sorted = citations.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().enumerate().take_while(|&(i, &c)| c > i as u64).count() as u64
}

pub fn community_h_index(c: &Community, corpus: &[PaperRecord]) -> u64 {
    h_index(&owned_citations(c, corpus))
}

/// Scales influences so the largest becomes [`NORMALIZED_MAX`]. All zeros
/// when the largest is not positive.
pub fn normalize(influences: &[f64]) -> Vec<f64> {
    let max = influences.iter().cloned().fold(0.0_f64, f64::max);
    if max > 0.0 {
        influences.iter().map(|&x| x / max * NORMALIZED_MAX).collect()
    } else {
        vec![0.0; influences.len()]
    }
}

/// Rounds half-up to two decimals, for display. The nudge keeps decimal
/// halves such as `6.445` (stored as `6.44499..`) rounding up.
pub fn round2(x: f64) -> f64 {
    let scaled = x * 100.0;
    (scaled + 1e-9 * scaled.abs().max(1.0)).round() / 100.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    /// `None` when the community owns no papers.
    pub min_citation: Option<u64>,
    pub mean_citation: Option<f64>,
    pub h_index: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfluenceReport {
    pub community_id: usize,
    pub influence: f64,
    pub normalized: f64,
    pub rank: usize,
    pub baselines: Baselines,
    pub owned_paper_count: usize,
    pub member_ids: BTreeSet<AuthorId>,
}

fn report_for(c: &Community, corpus: &[PaperRecord]) -> InfluenceReport {
    let cites = owned_citations(c, corpus);
    let n = cites.len();
    InfluenceReport {
        community_id: c.community_id,
        influence: influence_from_citations(&cites),
        normalized: 0.0,
        rank: 0,
        baselines: Baselines {
            min_citation: cites.iter().copied().min(),
            mean_citation: (n > 0).then(|| cites.iter().sum::<u64>() as f64 / n as f64),
            h_index: h_index(&cites),
        },
        owned_paper_count: n,
        member_ids: c.member_ids.clone(),
    }
}

/// Descending influence; equal influence goes to the lower id.
pub fn report_order(a: &InfluenceReport, b: &InfluenceReport) -> Ordering {
    b.influence.total_cmp(&a.influence).then(a.community_id.cmp(&b.community_id))
}

/// Scores every community and returns all of them in rank order.
pub fn rank_all(cs: &CommunitySet, corpus: &[PaperRecord]) -> Vec<InfluenceReport> {
    let mut reports: Vec<InfluenceReport> = cs.communities.par_iter().map(|c| report_for(c, corpus)).collect();
    let normalized = normalize(&reports.iter().map(|r| r.influence).collect::<Vec<_>>());
    for (r, n) in reports.iter_mut().zip(normalized) {
        r.normalized = n;
    }
    reports.sort_by(report_order);
    for (i, r) in reports.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    reports
}

/// The `k` most influential communities, normalized against the whole set.
pub fn rank_top_k(cs: &CommunitySet, corpus: &[PaperRecord], k: usize) -> Vec<InfluenceReport> {
    let mut all = rank_all(cs, corpus);
    all.truncate(k.max(1));
    all
}

/// Member with the most citations summed over the community's owned
/// papers; ties go to the smaller id.
pub fn most_influential_author(c: &Community, corpus: &[PaperRecord]) -> Option<AuthorId> {
    let owned = owned_papers(c, corpus);
    c.member_ids
        .iter()
        .map(|m| {
            let total: u64 = owned.iter().filter(|p| p.has_author(m)).map(|p| p.citation_count).sum();
            (m, total)
        })
        .fold(None, |best: Option<(&AuthorId, u64)>, (m, t)| match best {
            Some((_, bt)) if bt >= t => best,
            _ => Some((m, t)),
        })
        .map(|(m, _)| m.clone())
}

/// One line per report, in rank order.
pub fn reports_to_jsonl(reports: &[InfluenceReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("serializable"));
        out.push('\n');
    }
    out
}
