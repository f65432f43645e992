//! Typed heterogeneous academic network: papers, authors, topics, venues.
//!
//! Corpus records arrive as JSONL (one paper object per line). The graph
//! assigns dense node ids — papers first in record order, then authors,
//! topics, and venues by first appearance — so a paper's node id doubles as
//! its record index. All edges are stored undirected and deduplicated.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: duplicate paper_id `{paper_id}`")]
    DuplicateId { line: usize, paper_id: String },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown node id {0}")]
    UnknownNode(u32),
    #[error("feature dimension must be at least 8, got {0}")]
    FeatureDimTooSmall(usize),
    #[error("feature matrix has {rows} rows for {papers} papers")]
    FeatureRowMismatch { rows: usize, papers: usize },
}

/// Dense node identifier, unique across all node kinds of one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Paper,
    Author,
    Topic,
    Venue,
}

/// Undirected relation kinds. Each has a fixed endpoint-kind signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Author - Paper
    Writes,
    /// Paper - Paper
    Cites,
    /// Paper - Topic
    HasTopic,
    /// Paper - Venue
    PublishedIn,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 4] = [
        EdgeKind::Writes,
        EdgeKind::Cites,
        EdgeKind::HasTopic,
        EdgeKind::PublishedIn,
    ];

    fn index(self) -> usize {
        match self {
            EdgeKind::Writes => 0,
            EdgeKind::Cites => 1,
            EdgeKind::HasTopic => 2,
            EdgeKind::PublishedIn => 3,
        }
    }

    /// The non-paper endpoint kind (Paper for Cites).
    pub fn partner_kind(self) -> NodeKind {
        match self {
            EdgeKind::Writes => NodeKind::Author,
            EdgeKind::Cites => NodeKind::Paper,
            EdgeKind::HasTopic => NodeKind::Topic,
            EdgeKind::PublishedIn => NodeKind::Venue,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AuthorRef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub email: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affiliation: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub title: String,
    pub year: i32,
    #[serde(default)]
    pub venue: String,
    pub authors: Vec<AuthorRef>,
    #[serde(default)]
    pub topics: Vec<String>,
    #[serde(default)]
    pub references: Vec<String>,
}

/// Lowercase, trim, and collapse internal whitespace runs.
pub fn normalize_name(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse line-delimited JSON paper records. Blank lines are skipped;
/// unknown fields are ignored.
pub fn load_corpus(reader: impl BufRead) -> Result<Vec<PaperRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PaperRecord = serde_json::from_str(&line).map_err(|source| {
            CorpusError::Parse {
                line: line_no,
                source,
            }
        })?;
        if record.paper_id.is_empty() {
            return Err(CorpusError::Schema {
                line: line_no,
                message: "paper_id must be non-empty".into(),
            });
        }
        if record.title.is_empty() {
            return Err(CorpusError::Schema {
                line: line_no,
                message: "title must be non-empty".into(),
            });
        }
        if record.year <= 0 {
            return Err(CorpusError::Schema {
                line: line_no,
                message: format!("year must be positive, got {}", record.year),
            });
        }
        match seen.entry(record.paper_id.clone()) {
            Entry::Occupied(_) => {
                return Err(CorpusError::DuplicateId {
                    line: line_no,
                    paper_id: record.paper_id,
                })
            }
            Entry::Vacant(v) => {
                v.insert(line_no);
            }
        }
        records.push(record);
    }
    Ok(records)
}

/// The typed academic network. Immutable once built.
pub struct HeteroGraph {
    kinds: Vec<NodeKind>,
    labels: Vec<String>,
    paper_count: usize,
    adjacency: [Vec<Vec<u32>>; 4],
    features: Vec<Vec<f32>>,
    feature_dim: usize,
    dropped_citations: usize,
}

impl HeteroGraph {
    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn paper_count(&self) -> usize {
        self.paper_count
    }

    pub fn kind(&self, v: NodeId) -> Option<NodeKind> {
        self.kinds.get(v.0 as usize).copied()
    }

    /// Original label: paper_id for papers, normalized name for authors,
    /// the raw string for topics and venues.
    pub fn label(&self, v: NodeId) -> Option<&str> {
        self.labels.get(v.0 as usize).map(String::as_str)
    }

    pub fn count_of(&self, kind: NodeKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    /// Citation references that pointed at paper_ids absent from the corpus.
    pub fn dropped_citations(&self) -> usize {
        self.dropped_citations
    }

    /// Sorted, duplicate-free neighbors of `v` under one edge kind. A kind
    /// whose signature cannot touch `v` yields an empty list.
    pub fn neighbors(&self, v: NodeId, kind: EdgeKind) -> Result<&[u32], GraphError> {
        let idx = v.0 as usize;
        if idx >= self.kinds.len() {
            return Err(GraphError::UnknownNode(v.0));
        }
        Ok(&self.adjacency[kind.index()][idx])
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Feature row of a paper node. Panics on non-paper ids.
    pub fn feature(&self, paper: NodeId) -> &[f32] {
        assert!((paper.0 as usize) < self.paper_count, "not a paper node");
        &self.features[paper.0 as usize]
    }

    /// Attach per-paper feature rows (one per paper node, papers only).
    pub fn attach_features(&mut self, features: Vec<Vec<f32>>, d0: usize) -> Result<(), GraphError> {
        if features.len() != self.paper_count {
            return Err(GraphError::FeatureRowMismatch {
                rows: features.len(),
                papers: self.paper_count,
            });
        }
        self.features = features;
        self.feature_dim = d0;
        Ok(())
    }
}

/// Build the network from validated records. One paper node per record, one
/// author node per distinct normalized name, one topic/venue node per
/// distinct non-empty string. Citations to unknown paper_ids are dropped
/// and counted, self-citations are dropped, reciprocal citations collapse
/// to one undirected edge.
pub fn build_graph(records: &[PaperRecord]) -> HeteroGraph {
    let mut kinds: Vec<NodeKind> = Vec::new();
    let mut labels: Vec<String> = Vec::new();

    let mut paper_ids: HashMap<&str, u32> = HashMap::new();
    for r in records {
        paper_ids.insert(&r.paper_id, kinds.len() as u32);
        kinds.push(NodeKind::Paper);
        labels.push(r.paper_id.clone());
    }

    let mut author_ids: HashMap<String, u32> = HashMap::new();
    for r in records {
        for a in &r.authors {
            let norm = normalize_name(&a.name);
            if norm.is_empty() {
                continue;
            }
            author_ids.entry(norm.clone()).or_insert_with(|| {
                kinds.push(NodeKind::Author);
                labels.push(norm.clone());
                (kinds.len() - 1) as u32
            });
        }
    }

    let mut topic_ids: HashMap<&str, u32> = HashMap::new();
    for r in records {
        for t in &r.topics {
            if t.is_empty() {
                continue;
            }
            topic_ids.entry(t).or_insert_with(|| {
                kinds.push(NodeKind::Topic);
                labels.push(t.clone());
                (kinds.len() - 1) as u32
            });
        }
    }

    let mut venue_ids: HashMap<&str, u32> = HashMap::new();
    for r in records {
        if r.venue.is_empty() {
            continue;
        }
        venue_ids.entry(&r.venue).or_insert_with(|| {
            kinds.push(NodeKind::Venue);
            labels.push(r.venue.clone());
            (kinds.len() - 1) as u32
        });
    }

    let n = kinds.len();
    let mut adjacency: [Vec<Vec<u32>>; 4] = [
        vec![Vec::new(); n],
        vec![Vec::new(); n],
        vec![Vec::new(); n],
        vec![Vec::new(); n],
    ];
    let mut dropped = 0usize;

    let link = |adj: &mut Vec<Vec<u32>>, a: u32, b: u32| {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    };

    for (pi, r) in records.iter().enumerate() {
        let p = pi as u32;
        for a in &r.authors {
            let norm = normalize_name(&a.name);
            if let Some(&aid) = author_ids.get(&norm) {
                link(&mut adjacency[EdgeKind::Writes.index()], aid, p);
            }
        }
        for t in &r.topics {
            if let Some(&tid) = topic_ids.get(t.as_str()) {
                link(&mut adjacency[EdgeKind::HasTopic.index()], p, tid);
            }
        }
        if let Some(&vid) = venue_ids.get(r.venue.as_str()) {
            link(&mut adjacency[EdgeKind::PublishedIn.index()], p, vid);
        }
        for dst in &r.references {
            match paper_ids.get(dst.as_str()) {
                Some(&q) if q != p => link(&mut adjacency[EdgeKind::Cites.index()], p, q),
                Some(_) => {} // self-citation
                None => dropped += 1,
            }
        }
    }

    for adj in &mut adjacency {
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
    }

    HeteroGraph {
        kinds,
        labels,
        paper_count: records.len(),
        adjacency,
        features: Vec::new(),
        feature_dim: 0,
        dropped_citations: dropped,
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Seeded FNV-1a over the seed's little-endian bytes then the token bytes.
/// Fixed here so feature rows are stable across platforms and runs.
pub fn token_bucket_hash(seed: u64, token: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in seed.to_le_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    for b in token.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn tokens_of(record: &PaperRecord) -> impl Iterator<Item = String> + '_ {
    record
        .title
        .split(|c: char| !c.is_alphanumeric())
        .chain(
            record
                .topics
                .iter()
                .flat_map(|t| t.split(|c: char| !c.is_alphanumeric())),
        )
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Hashed bag-of-tokens over title and topics, one L2-normalized row per
/// record. Rows with no tokens stay all-zero. Inductive: no fitted
/// vocabulary, so unseen papers featurize identically.
pub fn featurize_papers(
    records: &[PaperRecord],
    d0: usize,
    seed: u64,
) -> Result<Vec<Vec<f32>>, GraphError> {
    if d0 < 8 {
        return Err(GraphError::FeatureDimTooSmall(d0));
    }
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let mut row = vec![0.0f32; d0];
        for tok in tokens_of(r) {
            let bucket = (token_bucket_hash(seed, &tok) % d0 as u64) as usize;
            row[bucket] += 1.0;
        }
        let norm: f64 = row.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut row {
                *x = (f64::from(*x) / norm) as f32;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
