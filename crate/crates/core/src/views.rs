//! Meta-path compilation: paper-paper adjacency views and egonet sampling.
//!
//! A meta-path like Paper-Author-Paper induces a homogeneous view whose
//! edges mark paper pairs connected through at least one shared interior
//! node. Views are unweighted; sharing three authors and sharing one yield
//! the same edge. Mini-batches operate on l-egonets: the seeds, everything
//! within l hops, and all view edges among them.

use thiserror::Error;

use crate::graph::{EdgeKind, HeteroGraph, NodeId, NodeKind};

#[derive(Debug, Error)]
pub enum ViewError {
    #[error("meta-path `{0}` is not recognized (expected PP, PAP, PTP, or PVP)")]
    UnknownName(String),
    #[error("meta-path must start and end at Paper nodes")]
    BadEndpoints,
    #[error("meta-path must have length 2 or 3")]
    BadLength,
    #[error("seed node {0} is not a paper in this view")]
    UnknownSeed(u32),
}

/// An ordered node-kind sequence, Paper at both ends, length 2 or 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaPath {
    kinds: Vec<NodeKind>,
}

impl MetaPath {
    pub fn new(kinds: Vec<NodeKind>) -> Result<Self, ViewError> {
        if kinds.len() < 2 || kinds.len() > 3 {
            return Err(ViewError::BadLength);
        }
        if kinds[0] != NodeKind::Paper || *kinds.last().unwrap() != NodeKind::Paper {
            return Err(ViewError::BadEndpoints);
        }
        if kinds.len() == 3 && kinds[1] == NodeKind::Paper {
            return Err(ViewError::BadEndpoints);
        }
        Ok(MetaPath { kinds })
    }

    /// Parse a canonical name: "PP", "PAP", "PTP", or "PVP".
    pub fn parse(name: &str) -> Result<Self, ViewError> {
        let kinds = match name {
            "PP" => vec![NodeKind::Paper, NodeKind::Paper],
            "PAP" => vec![NodeKind::Paper, NodeKind::Author, NodeKind::Paper],
            "PTP" => vec![NodeKind::Paper, NodeKind::Topic, NodeKind::Paper],
            "PVP" => vec![NodeKind::Paper, NodeKind::Venue, NodeKind::Paper],
            other => return Err(ViewError::UnknownName(other.to_string())),
        };
        Ok(MetaPath { kinds })
    }

    pub fn name(&self) -> String {
        self.kinds
            .iter()
            .map(|k| match k {
                NodeKind::Paper => 'P',
                NodeKind::Author => 'A',
                NodeKind::Topic => 'T',
                NodeKind::Venue => 'V',
            })
            .collect()
    }

    pub fn interior(&self) -> Option<NodeKind> {
        (self.kinds.len() == 3).then(|| self.kinds[1])
    }
}

/// Paper-paper adjacency induced by one meta-path. Node universe is all
/// paper ids of the source graph; adjacency lists are sorted and symmetric.
pub struct MetaPathView {
    path: MetaPath,
    adj: Vec<Vec<u32>>,
}

impl MetaPathView {
    pub fn path(&self) -> &MetaPath {
        &self.path
    }

    pub fn paper_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, paper: u32) -> &[u32] {
        &self.adj[paper as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Compile one meta-path into its view. For length-3 paths, papers i and j
/// are connected iff they share at least one interior node of the required
/// kind; for PP the view is the citation adjacency itself.
pub fn build_view(g: &HeteroGraph, path: &MetaPath) -> MetaPathView {
    let papers = g.paper_count();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); papers];

    match path.interior() {
        None => {
            for p in 0..papers as u32 {
                adj[p as usize] = g
                    .neighbors(NodeId(p), EdgeKind::Cites)
                    .expect("paper id in range")
                    .to_vec();
            }
        }
        Some(kind) => {
            let edge = match kind {
                NodeKind::Author => EdgeKind::Writes,
                NodeKind::Topic => EdgeKind::HasTopic,
                NodeKind::Venue => EdgeKind::PublishedIn,
                NodeKind::Paper => unreachable!("validated at construction"),
            };
            for v in papers as u32..g.node_count() as u32 {
                if g.kind(NodeId(v)) != Some(kind) {
                    continue;
                }
                let linked = g.neighbors(NodeId(v), edge).expect("node id in range");
                for (i, &a) in linked.iter().enumerate() {
                    for &b in &linked[i + 1..] {
                        adj[a as usize].push(b);
                        adj[b as usize].push(a);
                    }
                }
            }
            for list in &mut adj {
                list.sort_unstable();
                list.dedup();
            }
        }
    }

    MetaPathView {
        path: path.clone(),
        adj,
    }
}

/// Build every view in the configured meta-path set.
pub fn build_views(g: &HeteroGraph, paths: &[MetaPath]) -> Vec<MetaPathView> {
    paths.iter().map(|p| build_view(g, p)).collect()
}

/// Seeds, their l-hop ball in one view, and all view edges among them.
/// Nodes are sorted; `adj[i]` holds the in-subgraph neighbors of `nodes[i]`
/// in ascending order, so downstream aggregation order is reproducible.
pub struct EgonetSubgraph {
    nodes: Vec<u32>,
    seeds: Vec<u32>,
    adj: Vec<Vec<u32>>,
}

impl EgonetSubgraph {
    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    pub fn seeds(&self) -> &[u32] {
        &self.seeds
    }

    pub fn contains(&self, node: u32) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    pub fn local_index(&self, node: u32) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    /// In-subgraph neighbors of the i-th node, ascending.
    pub fn neighbors_of_index(&self, i: usize) -> &[u32] {
        &self.adj[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The whole view as one subgraph (every paper a member, no seeds).
    pub fn full(view: &MetaPathView) -> EgonetSubgraph {
        let nodes: Vec<u32> = (0..view.paper_count() as u32).collect();
        let adj = nodes
            .iter()
            .map(|&n| view.neighbors(n).to_vec())
            .collect();
        EgonetSubgraph {
            nodes,
            seeds: Vec::new(),
            adj,
        }
    }
}

/// Optional per-node expansion cap for very dense views. When the frontier
/// of a node exceeds `limit`, a seeded deterministic subset is visited;
/// induced edges among visited nodes are still complete.
#[derive(Debug, Clone, Copy)]
pub struct NeighborCap {
    pub limit: usize,
    pub seed: u64,
}

/// BFS to depth `l` from every seed, then induce the edge set. `l = 0`
/// returns the seeds alone with no edges.
pub fn sample_egonet(
    view: &MetaPathView,
    seeds: &[u32],
    l: usize,
    cap: Option<NeighborCap>,
) -> Result<EgonetSubgraph, ViewError> {
    assert!(!seeds.is_empty(), "egonet sampling needs at least one seed");
    let papers = view.paper_count() as u32;
    for &s in seeds {
        if s >= papers {
            return Err(ViewError::UnknownSeed(s));
        }
    }

    let mut seen = vec![false; papers as usize];
    let mut frontier: Vec<u32> = Vec::new();
    for &s in seeds {
        if !seen[s as usize] {
            seen[s as usize] = true;
            frontier.push(s);
        }
    }
    frontier.sort_unstable();

    for _ in 0..l {
        let mut next = Vec::new();
        for &u in &frontier {
            let neigh = view.neighbors(u);
            let expand: Vec<u32> = match cap {
                Some(c) if neigh.len() > c.limit => capped_selection(neigh, u, c),
                _ => neigh.to_vec(),
            };
            for v in expand {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    let nodes: Vec<u32> = (0..papers).filter(|&v| seen[v as usize]).collect();
    let adj = if l == 0 {
        vec![Vec::new(); nodes.len()]
    } else {
        nodes
            .iter()
            .map(|&n| {
                view.neighbors(n)
                    .iter()
                    .copied()
                    .filter(|&v| seen[v as usize])
                    .collect()
            })
            .collect()
    };

    let mut sorted_seeds = seeds.to_vec();
    sorted_seeds.sort_unstable();
    sorted_seeds.dedup();
    Ok(EgonetSubgraph {
        nodes,
        seeds: sorted_seeds,
        adj,
    })
}

/// Deterministic cap: rank neighbors by a hash of (seed, node, neighbor)
/// and keep the lowest `limit`.
fn capped_selection(neighbors: &[u32], node: u32, cap: NeighborCap) -> Vec<u32> {
    let mut ranked: Vec<(u64, u32)> = neighbors
        .iter()
        .map(|&v| {
            let key = cap
                .seed
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(u64::from(node) << 32 | u64::from(v));
            let mut h = key;
            h ^= h >> 33;
            h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
            h ^= h >> 33;
            (h, v)
        })
        .collect();
    ranked.sort_unstable();
    ranked.truncate(cap.limit);
    let mut out: Vec<u32> = ranked.into_iter().map(|(_, v)| v).collect();
    out.sort_unstable();
    out
}

/// One egonet per view, all seeded with the full batch. `l` defaults to the
/// embedding depth at call sites so every aggregation keeps its receptive
/// field.
pub fn batch_subgraphs(
    views: &[MetaPathView],
    batch: &[u32],
    l: usize,
) -> Result<Vec<EgonetSubgraph>, ViewError> {
    assert!(!batch.is_empty(), "batch must be nonempty");
    views
        .iter()
        .map(|v| sample_egonet(v, batch, l, None))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, load_corpus, PaperRecord};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::io::Cursor;

    fn graph_from(lines: &[String]) -> HeteroGraph {
        let records = load_corpus(Cursor::new(lines.join("\n"))).unwrap();
        build_graph(&records)
    }

    fn paper(id: &str, authors: &[&str], topics: &[&str], venue: &str, refs: &[&str]) -> String {
        let authors = authors
            .iter()
            .map(|a| format!(r#"{{"name": "{a}"}}"#))
            .collect::<Vec<_>>()
            .join(",");
        let topics = topics
            .iter()
            .map(|t| format!(r#""{t}""#))
            .collect::<Vec<_>>()
            .join(",");
        let refs = refs
            .iter()
            .map(|r| format!(r#""{r}""#))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            r#"{{"paper_id": "{id}", "title": "t", "year": 2000, "venue": "{venue}", "authors": [{authors}], "topics": [{topics}], "references": [{refs}]}}"#
        )
    }

    #[test]
    fn parse_canonical_names() {
        for name in ["PP", "PAP", "PTP", "PVP"] {
            assert_eq!(MetaPath::parse(name).unwrap().name(), name);
        }
        assert!(MetaPath::parse("APA").is_err());
    }

    #[test]
    fn invalid_endpoints_rejected() {
        assert!(matches!(
            MetaPath::new(vec![NodeKind::Author, NodeKind::Paper]),
            Err(ViewError::BadEndpoints)
        ));
        assert!(matches!(
            MetaPath::new(vec![NodeKind::Paper]),
            Err(ViewError::BadLength)
        ));
    }

    #[test]
    fn shared_author_makes_pap_edge() {
        let g = graph_from(&[
            paper("p1", &["a1"], &[], "", &[]),
            paper("p2", &["a1"], &[], "", &[]),
        ]);
        let view = build_view(&g, &MetaPath::parse("PAP").unwrap());
        assert_eq!(view.neighbors(0), &[1]);
        assert_eq!(view.neighbors(1), &[0]);
    }

    #[test]
    fn distinct_venues_make_no_pvp_edge() {
        let g = graph_from(&[
            paper("p1", &[], &[], "v1", &[]),
            paper("p2", &[], &[], "v2", &[]),
        ]);
        let view = build_view(&g, &MetaPath::parse("PVP").unwrap());
        assert_eq!(view.edge_count(), 0);
    }

    #[test]
    fn topic_star_becomes_triangle() {
        let g = graph_from(&[
            paper("p1", &[], &["t1"], "", &[]),
            paper("p2", &[], &["t1"], "", &[]),
            paper("p3", &[], &["t1"], "", &[]),
        ]);
        let view = build_view(&g, &MetaPath::parse("PTP").unwrap());
        assert_eq!(view.edge_count(), 3);
        assert_eq!(view.neighbors(0), &[1, 2]);
        assert_eq!(view.neighbors(1), &[0, 2]);
        assert_eq!(view.neighbors(2), &[0, 1]);
    }

    #[test]
    fn pp_view_is_citation_adjacency() {
        let g = graph_from(&[
            paper("p1", &[], &[], "", &["p2"]),
            paper("p2", &[], &[], "", &[]),
            paper("p3", &[], &[], "", &[]),
        ]);
        let view = build_view(&g, &MetaPath::parse("PP").unwrap());
        assert_eq!(view.neighbors(0), &[1]);
        assert!(view.neighbors(2).is_empty());
    }

    /// Brute-force oracle: a pair (i, j) is connected under a length-3 path
    /// iff some interior node of the right kind links to both; under PP iff
    /// a citation edge exists. Enumerates all pairs directly.
    fn brute_force_pairs(g: &HeteroGraph, path: &MetaPath) -> Vec<(u32, u32)> {
        let papers = g.paper_count() as u32;
        let mut out = Vec::new();
        for i in 0..papers {
            for j in (i + 1)..papers {
                let connected = match path.interior() {
                    None => g
                        .neighbors(NodeId(i), EdgeKind::Cites)
                        .unwrap()
                        .contains(&j),
                    Some(kind) => {
                        let edge = match kind {
                            NodeKind::Author => EdgeKind::Writes,
                            NodeKind::Topic => EdgeKind::HasTopic,
                            NodeKind::Venue => EdgeKind::PublishedIn,
                            NodeKind::Paper => unreachable!(),
                        };
                        let ni = g.neighbors(NodeId(i), edge).unwrap();
                        let nj = g.neighbors(NodeId(j), edge).unwrap();
                        ni.iter().any(|m| nj.contains(m))
                    }
                };
                if connected {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn view_pairs(view: &MetaPathView) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for i in 0..view.paper_count() as u32 {
            for &j in view.neighbors(i) {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn random_corpus(rng: &mut ChaCha8Rng, papers: usize) -> Vec<PaperRecord> {
        let authors = 1 + papers / 3;
        let topics = 1 + papers / 4;
        let venues = 1 + papers / 8;
        let lines: Vec<String> = (0..papers)
            .map(|i| {
                let n_auth = rng.gen_range(0..4usize);
                let auth: Vec<String> = (0..n_auth)
                    .map(|_| format!("a{}", rng.gen_range(0..authors)))
                    .collect();
                let n_top = rng.gen_range(0..4usize);
                let top: Vec<String> = (0..n_top)
                    .map(|_| format!("t{}", rng.gen_range(0..topics)))
                    .collect();
                let venue = if rng.gen_bool(0.8) {
                    format!("v{}", rng.gen_range(0..venues))
                } else {
                    String::new()
                };
                let n_ref = rng.gen_range(0..3usize);
                let refs: Vec<String> = (0..n_ref)
                    .map(|_| format!("p{}", rng.gen_range(0..papers + 2)))
                    .collect();
                paper(
                    &format!("p{i}"),
                    &auth.iter().map(String::as_str).collect::<Vec<_>>(),
                    &top.iter().map(String::as_str).collect::<Vec<_>>(),
                    &venue,
                    &refs.iter().map(String::as_str).collect::<Vec<_>>(),
                )
            })
            .collect();
        load_corpus(Cursor::new(lines.join("\n"))).unwrap()
    }

    #[test]
    fn views_match_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let papers = rng.gen_range(5..60);
            let records = random_corpus(&mut rng, papers);
            let g = build_graph(&records);
            for name in ["PP", "PAP", "PTP", "PVP"] {
                let path = MetaPath::parse(name).unwrap();
                let view = build_view(&g, &path);
                assert_eq!(
                    view_pairs(&view),
                    brute_force_pairs(&g, &path),
                    "mismatch for {name} on {papers} papers"
                );
                // symmetry + irreflexivity
                for i in 0..view.paper_count() as u32 {
                    assert!(!view.neighbors(i).contains(&i));
                    for &j in view.neighbors(i) {
                        assert!(view.neighbors(j).contains(&i));
                    }
                }
            }
        }
    }

    fn path_view_3() -> MetaPathView {
        // p1 - p2 - p3 citation chain
        let g = graph_from(&[
            paper("p1", &[], &[], "", &["p2"]),
            paper("p2", &[], &[], "", &["p3"]),
            paper("p3", &[], &[], "", &[]),
        ]);
        build_view(&g, &MetaPath::parse("PP").unwrap())
    }

    #[test]
    fn egonet_one_hop() {
        let view = path_view_3();
        let sg = sample_egonet(&view, &[0], 1, None).unwrap();
        assert_eq!(sg.nodes(), &[0, 1]);
        assert_eq!(sg.edge_count(), 1);
    }

    #[test]
    fn egonet_two_hops_reaches_end() {
        let view = path_view_3();
        let sg = sample_egonet(&view, &[0], 2, None).unwrap();
        assert_eq!(sg.nodes(), &[0, 1, 2]);
        assert_eq!(sg.edge_count(), 2);
    }

    #[test]
    fn egonet_two_seeds() {
        let view = path_view_3();
        let sg = sample_egonet(&view, &[0, 2], 1, None).unwrap();
        assert_eq!(sg.nodes(), &[0, 1, 2]);
        assert_eq!(sg.edge_count(), 2);
    }

    #[test]
    fn egonet_depth_zero_is_seeds_only() {
        let view = path_view_3();
        let sg = sample_egonet(&view, &[1], 0, None).unwrap();
        assert_eq!(sg.nodes(), &[1]);
        assert_eq!(sg.edge_count(), 0);
    }

    #[test]
    fn unknown_seed_errors() {
        let view = path_view_3();
        assert!(matches!(
            sample_egonet(&view, &[9], 1, None),
            Err(ViewError::UnknownSeed(9))
        ));
    }

    #[test]
    fn egonet_monotone_in_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let records = random_corpus(&mut rng, 40);
        let g = build_graph(&records);
        for name in ["PAP", "PTP"] {
            let view = build_view(&g, &MetaPath::parse(name).unwrap());
            let seed = rng.gen_range(0..40u32);
            let mut prev: Vec<u32> = Vec::new();
            for l in 0..4 {
                let sg = sample_egonet(&view, &[seed], l, None).unwrap();
                assert!(
                    prev.iter().all(|v| sg.nodes().contains(v)),
                    "egonet shrank between depths"
                );
                prev = sg.nodes().to_vec();
            }
        }
    }

    #[test]
    fn egonet_matches_reachability_oracle() {
        // Oracle: repeated one-step expansion over the full adjacency.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let records = random_corpus(&mut rng, 30);
        let g = build_graph(&records);
        let view = build_view(&g, &MetaPath::parse("PAP").unwrap());
        for _ in 0..10 {
            let seed = rng.gen_range(0..30u32);
            let l = rng.gen_range(0..3usize);
            let mut reach: Vec<u32> = vec![seed];
            for _ in 0..l {
                let mut grown = reach.clone();
                for &u in &reach {
                    grown.extend_from_slice(view.neighbors(u));
                }
                grown.sort_unstable();
                grown.dedup();
                reach = grown;
            }
            let sg = sample_egonet(&view, &[seed], l, None).unwrap();
            assert_eq!(sg.nodes(), reach.as_slice());
        }
    }

    #[test]
    fn batch_saturates_to_whole_view() {
        let view = path_view_3();
        let all: Vec<u32> = (0..3).collect();
        let subs = batch_subgraphs(std::slice::from_ref(&view), &all, 5).unwrap();
        assert_eq!(subs[0].nodes(), &[0, 1, 2]);
        assert_eq!(subs[0].edge_count(), view.edge_count());
    }

    #[test]
    fn isolated_paper_stays_singleton() {
        let g = graph_from(&[paper("p1", &[], &[], "", &[])]);
        let views = build_views(
            &g,
            &["PP", "PAP"]
                .iter()
                .map(|n| MetaPath::parse(n).unwrap())
                .collect::<Vec<_>>(),
        );
        let subs = batch_subgraphs(&views, &[0], 2).unwrap();
        for sg in subs {
            assert_eq!(sg.nodes(), &[0]);
            assert_eq!(sg.edge_count(), 0);
        }
    }

    #[test]
    fn neighbor_cap_is_deterministic_and_bounded() {
        let g = graph_from(&[
            paper("p0", &[], &["t"], "", &[]),
            paper("p1", &[], &["t"], "", &[]),
            paper("p2", &[], &["t"], "", &[]),
            paper("p3", &[], &["t"], "", &[]),
            paper("p4", &[], &["t"], "", &[]),
        ]);
        let view = build_view(&g, &MetaPath::parse("PTP").unwrap());
        let cap = NeighborCap { limit: 2, seed: 3 };
        let a = sample_egonet(&view, &[0], 1, Some(cap)).unwrap();
        let b = sample_egonet(&view, &[0], 1, Some(cap)).unwrap();
        assert_eq!(a.nodes(), b.nodes());
        assert!(a.nodes().len() <= 3); // seed + capped frontier
    }
}
