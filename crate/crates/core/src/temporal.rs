//! Birth-year spans of person-person links.
//!
//! Each edge `(source, target)` gets `delta = birth(source) - birth(target)`.
//! A positive delta means the link points into the past (the target was born
//! earlier). Edges with an endpoint lacking a birth year are counted as
//! unknown and excluded from every span statistic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::LinkGraph;
use crate::ingest::NodeId;

pub const DEFAULT_BIN_WIDTH: f64 = 37.5;
pub const DEFAULT_MAX_SPAN_YEARS: f64 = 75.0;
/// Reciprocal-link share reported for a large cross-domain Wikipedia sample,
/// emitted next to the measured share for comparison.
pub const CROSS_DOMAIN_RECIPROCITY_REFERENCE: f64 = 0.087;

#[derive(Debug, Error, PartialEq)]
pub enum TemporalError {
    #[error("bin width must be positive and finite, got {0}")]
    BadBinWidth(f64),
    #[error("max span must be non-negative, got {0}")]
    NegativeMaxSpan(f64),
    #[error("span set covers {spans} edges but the graph has {edges}")]
    SpanMismatch { spans: usize, edges: usize },
    #[error("graph has {graph} nodes but {years} birth years were supplied")]
    NodeCountMismatch { graph: usize, years: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Past,
    Future,
    Same,
}

impl Direction {
    pub fn of_delta(delta: i64) -> Direction {
        match delta.signum() {
            1 => Direction::Past,
            -1 => Direction::Future,
            _ => Direction::Same,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanRecord {
    pub source: NodeId,
    pub target: NodeId,
    pub delta_years: i64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpanSet {
    pub records: Vec<SpanRecord>,
    pub unknown_count: u64,
}

/// Annotate every edge with its birth-year delta.
///
/// `birth_years` is indexed by node id.
pub fn link_spans(graph: &LinkGraph, birth_years: &[Option<i32>]) -> Result<SpanSet, TemporalError> {
    if graph.node_count() != birth_years.len() {
        return Err(TemporalError::NodeCountMismatch { graph: graph.node_count(), years: birth_years.len() });
    }
    let mut set = SpanSet::default();
    for (s, t) in graph.edges() {
        match (birth_years[s as usize], birth_years[t as usize]) {
            (Some(bs), Some(bt)) => {
                let delta = bs as i64 - bt as i64;
                set.records.push(SpanRecord {
                    source: s,
                    target: t,
                    delta_years: delta,
                    direction: Direction::of_delta(delta),
                });
            }
            _ => set.unknown_count += 1,
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanBin {
    pub start: f64,
    pub end: f64,
    pub count: u64,
}

/// Fixed-width histogram over half-open bins `[i*w, (i+1)*w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub bins: Vec<SpanBin>,
    pub total: u64,
}

impl Histogram {
    /// count / total per bin; empty when total is 0.
    pub fn shares(&self) -> Vec<f64> {
        if self.total == 0 {
            return Vec::new();
        }
        self.bins.iter().map(|b| b.count as f64 / self.total as f64).collect()
    }

    pub fn first_bin_share(&self) -> Option<f64> {
        self.shares().first().copied()
    }
}

/// A histogram plus its companion series for a logarithmic span axis:
/// the same counts placed at bin midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanHistogram {
    pub histogram: Histogram,
    pub log_midpoints: Vec<f64>,
}

/// Index `i` with `i*w <= x < (i+1)*w`, robust to rounding in `x / w`.
fn bin_index(x: f64, w: f64) -> usize {
    let mut i = (x / w).floor().max(0.0) as usize;
    while (i as f64 + 1.0) * w <= x {
        i += 1;
    }
    while i > 0 && i as f64 * w > x {
        i -= 1;
    }
    i
}

pub fn span_histogram(spans: &SpanSet, bin_width: f64) -> Result<SpanHistogram, TemporalError> {
    histogram_of_abs(spans.records.iter().map(|r| r.delta_years.unsigned_abs() as f64), bin_width)
}

/// Bin absolute values; bins run contiguously from 0 to the largest value.
pub fn histogram_of_abs(values: impl Iterator<Item = f64>, bin_width: f64) -> Result<SpanHistogram, TemporalError> {
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(TemporalError::BadBinWidth(bin_width));
    }
    let mut counts: Vec<u64> = Vec::new();
    let mut total = 0u64;
    for x in values {
        let i = bin_index(x.abs(), bin_width);
        if i >= counts.len() {
            counts.resize(i + 1, 0);
        }
        counts[i] += 1;
        total += 1;
    }
    let bins: Vec<SpanBin> = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| SpanBin { start: i as f64 * bin_width, end: (i + 1) as f64 * bin_width, count })
        .collect();
    let log_midpoints = bins.iter().map(|b| (b.start + b.end) / 2.0).collect();
    Ok(SpanHistogram { histogram: Histogram { bin_width, bins, total }, log_midpoints })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionShares {
    pub past_count: u64,
    pub future_count: u64,
    pub same_count: u64,
    pub unknown_count: u64,
    /// Over past + future only; `None` when both are zero.
    pub past_share: Option<f64>,
    pub future_share: Option<f64>,
}

pub fn direction_shares(spans: &SpanSet) -> DirectionShares {
    let (mut past, mut future, mut same) = (0u64, 0u64, 0u64);
    for r in &spans.records {
        match r.direction {
            Direction::Past => past += 1,
            Direction::Future => future += 1,
            Direction::Same => same += 1,
        }
    }
    let directed = past + future;
    let share = |c: u64| (directed > 0).then(|| c as f64 / directed as f64);
    DirectionShares {
        past_count: past,
        future_count: future,
        same_count: same,
        unknown_count: spans.unknown_count,
        past_share: share(past),
        future_share: share(future),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReciprocityStats {
    pub mirrored_count: u64,
    pub unique_count: u64,
    pub mirrored_share: f64,
    pub cross_domain_reference_share: f64,
}

/// An edge is mirrored when its reverse is also present.
pub fn reciprocity_stats(graph: &LinkGraph) -> ReciprocityStats {
    let mirrored = graph.edges().filter(|&(s, t)| graph.has_edge(t, s)).count() as u64;
    let m = graph.edge_count() as u64;
    ReciprocityStats {
        mirrored_count: mirrored,
        unique_count: m - mirrored,
        mirrored_share: if m == 0 { 0.0 } else { mirrored as f64 / m as f64 },
        cross_domain_reference_share: CROSS_DOMAIN_RECIPROCITY_REFERENCE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionStats {
    pub max_span_years: f64,
    pub total_edges: u64,
    pub known_span_edges: u64,
    pub kept: u64,
    pub dropped_over_span: u64,
    pub dropped_unknown: u64,
    /// kept / known_span_edges
    pub share_of_known: Option<f64>,
    /// kept / total_edges
    pub share_of_all: Option<f64>,
}

/// Keep edges whose known span is at most `max_years` (inclusive).
///
/// Unknown-span edges are dropped and reported. Nodes are never removed.
pub fn filter_by_span(
    graph: &LinkGraph,
    spans: &SpanSet,
    max_years: f64,
) -> Result<(LinkGraph, RetentionStats), TemporalError> {
    if max_years.is_nan() || max_years < 0.0 {
        return Err(TemporalError::NegativeMaxSpan(max_years));
    }
    let covered = spans.records.len() + spans.unknown_count as usize;
    if covered != graph.edge_count() {
        return Err(TemporalError::SpanMismatch { spans: covered, edges: graph.edge_count() });
    }
    let mut keep: Vec<(NodeId, NodeId)> = spans
        .records
        .iter()
        .filter(|r| r.delta_years.unsigned_abs() as f64 <= max_years)
        .map(|r| (r.source, r.target))
        .collect();
    keep.sort_unstable();
    let filtered = graph.retain_edges(|s, t| keep.binary_search(&(s, t)).is_ok());
    let kept = filtered.edge_count() as u64;
    let known = spans.records.len() as u64;
    let total = graph.edge_count() as u64;
    let stats = RetentionStats {
        max_span_years: max_years,
        total_edges: total,
        known_span_edges: known,
        kept,
        dropped_over_span: known - kept,
        dropped_unknown: spans.unknown_count,
        share_of_known: (known > 0).then(|| kept as f64 / known as f64),
        share_of_all: (total > 0).then(|| kept as f64 / total as f64),
    };
    Ok((filtered, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(u32, u32)]) -> LinkGraph {
        LinkGraph::build(n, edges).unwrap().0
    }

    #[test]
    fn delta_sign_convention() {
        let g = graph(2, &[(0, 1)]);
        let s = link_spans(&g, &[Some(1500), Some(1450)]).unwrap();
        assert_eq!(s.records[0].delta_years, 50);
        assert_eq!(s.records[0].direction, Direction::Past);
    }

    #[test]
    fn missing_birth_is_unknown() {
        let g = graph(2, &[(0, 1)]);
        let s = link_spans(&g, &[Some(1500), None]).unwrap();
        assert!(s.records.is_empty());
        assert_eq!(s.unknown_count, 1);
    }

    #[test]
    fn bin_boundary_goes_up() {
        let h = histogram_of_abs([0.0, 37.0, 37.5, 100.0].into_iter(), 37.5).unwrap();
        let counts: Vec<_> = h.histogram.bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![2, 1, 1]);
        assert_eq!(h.histogram.bins[2].start, 75.0);
        assert_eq!(h.log_midpoints, vec![18.75, 56.25, 93.75]);
        for w in [0.1, 0.3, 37.5, 7.0] {
            for i in 0..2000 {
                let x = i as f64 * 0.05;
                let b = bin_index(x, w);
                assert!(b as f64 * w <= x && x < (b + 1) as f64 * w, "x={x} w={w} b={b}");
            }
        }
    }

    #[test]
    fn empty_histogram() {
        let h = span_histogram(&SpanSet::default(), 37.5).unwrap();
        assert_eq!(h.histogram.total, 0);
        assert!(h.histogram.shares().is_empty());
        assert!(span_histogram(&SpanSet::default(), 0.0).is_err());
    }

    fn spans_of(deltas: &[i64]) -> SpanSet {
        SpanSet {
            records: deltas
                .iter()
                .enumerate()
                .map(|(i, &d)| SpanRecord {
                    source: i as u32,
                    target: i as u32 + 1,
                    delta_years: d,
                    direction: Direction::of_delta(d),
                })
                .collect(),
            unknown_count: 0,
        }
    }

    #[test]
    fn direction_counts() {
        let d = direction_shares(&spans_of(&[50, 10, -20]));
        assert_eq!((d.past_count, d.future_count), (2, 1));
        assert!((d.past_share.unwrap() - 2.0 / 3.0).abs() < 1e-12);

        let d = direction_shares(&spans_of(&[0, 0]));
        assert_eq!(d.same_count, 2);
        assert_eq!(d.past_share, None);
        assert_eq!(d.future_share, None);
    }

    #[test]
    fn reciprocity_counts() {
        let r = reciprocity_stats(&graph(3, &[(0, 1), (1, 0), (0, 2)]));
        assert_eq!((r.mirrored_count, r.unique_count), (2, 1));
        assert!((r.mirrored_share - 2.0 / 3.0).abs() < 1e-12);
        let r = reciprocity_stats(&graph(3, &[]));
        assert_eq!(r.mirrored_share, 0.0);
    }

    #[test]
    fn filter_keeps_inclusive_bound() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let spans = link_spans(&g, &[Some(1600), Some(1550), Some(1470)]).unwrap();
        let (f, stats) = filter_by_span(&g, &spans, 75.0).unwrap();
        assert_eq!(f.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(stats.share_of_known, Some(0.5));
        assert_eq!(f.node_count(), 3);

        let spans = link_spans(&g, &[Some(1600), Some(1525), Some(1525)]).unwrap();
        let (f, _) = filter_by_span(&g, &spans, 75.0).unwrap();
        assert_eq!(f.edge_count(), 2);
        let (f, _) = filter_by_span(&g, &spans, 0.0).unwrap();
        assert_eq!(f.edges().collect::<Vec<_>>(), vec![(1, 2)]);
        assert_eq!(filter_by_span(&g, &spans, -1.0).unwrap_err(), TemporalError::NegativeMaxSpan(-1.0));
    }

    #[test]
    fn filter_rejects_foreign_spans() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let other = graph(3, &[(0, 1)]);
        let spans = link_spans(&other, &[Some(1), Some(2), Some(3)]).unwrap();
        assert!(matches!(filter_by_span(&g, &spans, 75.0), Err(TemporalError::SpanMismatch { .. })));
    }
}
