//! Small canonical corpora and graphs used by tests, benches and the CLI docs.

use crate::dataset::Dataset;
use crate::model::{AuthorRecord, CoauthorGraph, Community, PaperRecord};

fn author(id: &str) -> AuthorRecord {
    AuthorRecord { author_id: id.into(), name: format!("Author {}", id.to_uppercase()), affiliation: None }
}

fn paper(id: &str, year: i32, topic: &str, authors: &[&str], citations: u64) -> PaperRecord {
    PaperRecord {
        paper_id: id.into(),
        title: format!("Paper {}", id.to_uppercase()),
        year,
        topics: [topic.to_owned()].into(),
        author_ids: authors.iter().map(|&a| a.into()).collect(),
        citation_count: citations,
    }
}

/// Seven authors, eight papers; two four-author communities sharing `u4`.
pub fn seven_authors_papers() -> Vec<PaperRecord> {
    vec![
        paper("p1", 2010, "databases", &["u1", "u2"], 0),
        paper("p2", 2011, "databases", &["u1", "u4"], 0),
        paper("p3", 2012, "databases", &["u2", "u3"], 3),
        paper("p4", 2013, "databases", &["u3", "u4"], 3),
        paper("p5", 2014, "databases", &["u1", "u2"], 50),
        paper("p6", 2012, "databases", &["u4", "u5", "u6"], 9),
        paper("p7", 2014, "databases", &["u6", "u7"], 10),
        paper("p8", 2015, "databases", &["u4", "u7"], 11),
    ]
}

pub fn seven_authors_communities() -> Vec<Community> {
    vec![Community::new(0, ["u1", "u2", "u3", "u4"]), Community::new(1, ["u4", "u5", "u6", "u7"])]
}

pub fn seven_authors_dataset() -> Dataset {
    let authors = (1..=7).map(|i| author(&format!("u{i}"))).collect();
    Dataset::from_records(authors, seven_authors_papers()).expect("fixture is valid")
}

pub fn seven_authors_jsonl() -> String {
    seven_authors_dataset().to_jsonl()
}

fn dataset_from_edges(edges: &[(&str, &str)], isolated: &[&str]) -> Dataset {
    let mut ids: Vec<&str> = edges.iter().flat_map(|&(a, b)| [a, b]).chain(isolated.iter().copied()).collect();
    ids.sort_unstable();
    ids.dedup();
    let authors = ids.iter().map(|a| author(a)).collect();
    let mut papers: Vec<PaperRecord> = edges
        .iter()
        .enumerate()
        .map(|(i, (a, b))| paper(&format!("e{i}"), 2012, "networks", &[a, b], (i as u64 + 1) * 2))
        .collect();
    papers.extend(isolated.iter().enumerate().map(|(i, a)| paper(&format!("s{i}"), 2012, "networks", &[a], 1)));
    Dataset::from_records(authors, papers).expect("fixture is valid")
}

pub const BOWTIE_EDGES: [(&str, &str); 6] = [("a", "b"), ("a", "v"), ("b", "v"), ("c", "d"), ("c", "v"), ("d", "v")];

pub const BRIDGED_TRIANGLES_EDGES: [(&str, &str); 7] =
    [("a", "b"), ("a", "c"), ("b", "c"), ("c", "d"), ("d", "e"), ("d", "f"), ("e", "f")];

pub const TWO_TRIANGLES_EDGES: [(&str, &str); 6] =
    [("a", "b"), ("a", "c"), ("b", "c"), ("d", "e"), ("d", "f"), ("e", "f")];

/// Two triangles sharing the vertex `v`.
pub fn bowtie() -> CoauthorGraph {
    CoauthorGraph::from_edges(&BOWTIE_EDGES)
}

/// Triangles `{a,b,c}` and `{d,e,f}` joined by the edge `c–d`.
pub fn bridged_triangles() -> CoauthorGraph {
    CoauthorGraph::from_edges(&BRIDGED_TRIANGLES_EDGES)
}

pub fn two_triangles() -> CoauthorGraph {
    CoauthorGraph::from_edges(&TWO_TRIANGLES_EDGES)
}

/// Dataset whose co-author graph is the bowtie (one paper per edge).
pub fn bowtie_dataset() -> Dataset {
    dataset_from_edges(&BOWTIE_EDGES, &[])
}

pub fn bridged_triangles_dataset() -> Dataset {
    dataset_from_edges(&BRIDGED_TRIANGLES_EDGES, &[])
}

/// Three authors who never collaborate.
pub fn edgeless_dataset() -> Dataset {
    dataset_from_edges(&[], &["x", "y", "z"])
}
