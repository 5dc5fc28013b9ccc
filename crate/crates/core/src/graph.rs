//! Simple directed link graph in compressed sparse row form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::NodeId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({source_id}, {target_id}) references a node outside 0..{node_count}")]
    NodeOutOfRange { source_id: NodeId, target_id: NodeId, node_count: usize },
    #[error("log-binned histogram ratio must exceed 1, got {0}")]
    BadRatio(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildTally {
    pub duplicates_dropped: u64,
    pub self_loops_dropped: u64,
    pub off_roster_dropped: u64,
}

/// Adjacency of one direction: `targets[offsets[v]..offsets[v + 1]]` are the
/// sorted neighbours of `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Csr {
    /// `edges` must be sorted and unique.
    fn from_sorted(n: usize, edges: impl Iterator<Item = (NodeId, NodeId)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (s, _) in edges.clone() {
            offsets[s as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = edges.map(|(_, t)| t).collect();
        Csr { offsets, targets }
    }

    fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Entity-resolved simple digraph: no self-loops, no parallel edges, and a
/// reverse adjacency that is the exact transpose of the forward one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkGraph {
    n: usize,
    forward: Csr,
    reverse: Csr,
}

impl LinkGraph {
    /// Deduplicate, drop self-loops, and index both directions.
    pub fn build(node_count: usize, raw_edges: &[(NodeId, NodeId)]) -> Result<(LinkGraph, BuildTally), GraphError> {
        let mut tally = BuildTally::default();
        let mut edges = Vec::with_capacity(raw_edges.len());
        for &(s, t) in raw_edges {
            if s as usize >= node_count || t as usize >= node_count {
                return Err(GraphError::NodeOutOfRange { source_id: s, target_id: t, node_count });
            }
            if s == t {
                tally.self_loops_dropped += 1;
            } else {
                edges.push((s, t));
            }
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        tally.duplicates_dropped = (before - edges.len()) as u64;
        Ok((Self::from_sorted_unique(node_count, edges), tally))
    }

    fn from_sorted_unique(n: usize, mut edges: Vec<(NodeId, NodeId)>) -> LinkGraph {
        let forward = Csr::from_sorted(n, edges.iter().copied());
        for e in edges.iter_mut() {
            *e = (e.1, e.0);
        }
        edges.sort_unstable();
        let reverse = Csr::from_sorted(n, edges.iter().copied());
        LinkGraph { n, forward, reverse }
    }

    pub fn empty(node_count: usize) -> LinkGraph {
        Self::from_sorted_unique(node_count, Vec::new())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.forward.targets.len()
    }

    /// Sorted targets of `v`.
    pub fn successors(&self, v: NodeId) -> &[NodeId] {
        self.forward.neighbors(v)
    }

    /// Sorted sources of edges into `v`.
    pub fn predecessors(&self, v: NodeId) -> &[NodeId] {
        self.reverse.neighbors(v)
    }

    pub fn has_edge(&self, s: NodeId, t: NodeId) -> bool {
        self.successors(s).binary_search(&t).is_ok()
    }

    /// Edges in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n as NodeId).flat_map(move |s| self.successors(s).iter().map(move |&t| (s, t)))
    }

    /// Same node set, every edge reversed.
    pub fn transpose(&self) -> LinkGraph {
        LinkGraph { n: self.n, forward: self.reverse.clone(), reverse: self.forward.clone() }
    }

    /// Subgraph over the same nodes keeping edges for which `keep` holds.
    pub fn retain_edges(&self, mut keep: impl FnMut(NodeId, NodeId) -> bool) -> LinkGraph {
        let edges: Vec<_> = self.edges().filter(|&(s, t)| keep(s, t)).collect();
        Self::from_sorted_unique(self.n, edges)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeVector {
    pub in_degree: Vec<u32>,
    pub out_degree: Vec<u32>,
}

impl DegreeVector {
    pub fn total(&self, v: usize) -> u32 {
        self.in_degree[v] + self.out_degree[v]
    }

    pub fn totals(&self) -> Vec<u32> {
        (0..self.in_degree.len()).map(|v| self.total(v)).collect()
    }
}

pub fn degrees(graph: &LinkGraph) -> DegreeVector {
    let n = graph.node_count() as NodeId;
    DegreeVector {
        in_degree: (0..n).map(|v| graph.predecessors(v).len() as u32).collect(),
        out_degree: (0..n).map(|v| graph.successors(v).len() as u32).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinMode {
    Linear,
    /// Multiplicative bins `[b, b * ratio)` starting at 1.
    LogBinned(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeBin {
    pub start: f64,
    pub end: f64,
    pub count: u64,
}

/// Degree histogram. Degree-0 samples are kept apart in `zero_count` since
/// they have no place on a log axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub zero_count: u64,
    pub bins: Vec<DegreeBin>,
    pub total: u64,
}

/// Linear mode lists each observed positive degree as `[d, d + 1)`. Log mode
/// lists every bin from 1 up to the one holding the largest sample.
pub fn degree_histogram(samples: &[u32], mode: BinMode) -> Result<DegreeHistogram, GraphError> {
    let zero_count = samples.iter().filter(|&&d| d == 0).count() as u64;
    let total = samples.len() as u64;
    let bins = match mode {
        BinMode::Linear => {
            let mut counts = std::collections::BTreeMap::<u32, u64>::new();
            for &d in samples.iter().filter(|&&d| d > 0) {
                *counts.entry(d).or_default() += 1;
            }
            counts.into_iter().map(|(d, count)| DegreeBin { start: d as f64, end: d as f64 + 1.0, count }).collect()
        }
        BinMode::LogBinned(ratio) => {
            if !ratio.is_finite() || ratio <= 1.0 {
                return Err(GraphError::BadRatio(ratio.to_string()));
            }
            let max = samples.iter().copied().max().unwrap_or(0);
            let mut edges = vec![1.0f64];
            if max > 0 {
                while *edges.last().unwrap() <= max as f64 {
                    let next = edges.last().unwrap() * ratio;
                    edges.push(next);
                }
            }
            let mut bins: Vec<DegreeBin> =
                edges.windows(2).map(|w| DegreeBin { start: w[0], end: w[1], count: 0 }).collect();
            for &d in samples.iter().filter(|&&d| d > 0) {
                let x = d as f64;
                // bins are sorted; last bin whose start is <= x
                let idx = bins.partition_point(|b| b.start <= x) - 1;
                bins[idx].count += 1;
            }
            bins
        }
    };
    Ok(DegreeHistogram { zero_count, bins, total })
}
