//! Overlapping community detection and citation-based influence ranking
//! for co-author networks.
//!
//! The pipeline: load a [`Dataset`], filter it with [`filter_corpus`],
//! build the [`CoauthorGraph`], detect overlapping communities with
//! [`run_conga`] + [`best_cut`], then score and rank them with
//! [`rank_top_k`]. [`query::Snapshot`] bundles the whole chain for the
//! service and CLI.

pub mod betweenness;
pub mod conga;
pub mod dataset;
pub mod fixtures;
pub mod influence;
pub mod model;
pub mod query;

pub use betweenness::{
    edge_vertex_betweenness, pair_betweenness, split_betweenness, BetweennessError, BetweennessScores, PairBetweenness,
    SplitResult,
};
pub use conga::{
    best_cut, best_level, cut_at_count, modularity, run_conga, CutLevel, Dendrogram, DendrogramAction, DendrogramEvent,
    ModularityError, ModularityScore, WorkingVertex,
};
pub use dataset::{dataset_summary, load_dataset, parse_dataset, write_dataset, Dataset, DatasetError, SummaryStats};
pub use influence::{
    cite_compare, community_h_index, community_influence, mean_citation_influence, min_citation_influence,
    paper_impact, paper_membership, paper_weight, rank_all, rank_top_k, Baselines, InfluenceError, InfluenceReport,
};
pub use model::{
    build_coauthor_graph, filter_corpus, AuthorId, AuthorRecord, CoauthorGraph, Community, CommunitySet, CorpusFilter,
    ModelError, PaperId, PaperRecord,
};
pub use query::{AuthorDetail, CommunityDetail, QueryError, QueryRequest, QueryResult, Snapshot};
