//! Aggregate statistics of one link graph (and optionally a reference edge
//! set over the same roster).

use serde::{Deserialize, Serialize};

use crate::components::{
    component_summary, strongly_connected_components, weakly_connected_components, ComponentSummary,
};
use crate::graph::{
    degree_histogram, degrees, BinMode, BuildTally, DegreeHistogram, DegreeVector, GraphError, LinkGraph,
};
use crate::ingest::ParseTally;
use crate::powerlaw::{fit_power_law, PowerLawFit};
use crate::roster::ReferenceEdgeTally;
use crate::temporal::{
    direction_shares, filter_by_span, link_spans, reciprocity_stats, span_histogram, DirectionShares, ReciprocityStats,
    RetentionStats, SpanHistogram, SpanSet, TemporalError,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub bin_width: f64,
    pub max_span_years: f64,
    pub power_law_xmin: u64,
    pub degree_log_ratio: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            bin_width: crate::temporal::DEFAULT_BIN_WIDTH,
            max_span_years: crate::temporal::DEFAULT_MAX_SPAN_YEARS,
            power_law_xmin: 1,
            degree_log_ratio: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub mean_total: f64,
    pub max_in: u32,
    pub max_out: u32,
    pub max_total: u32,
    pub histogram_linear: DegreeHistogram,
    pub histogram_log: DegreeHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalStats {
    pub span_count: u64,
    pub unknown_span_count: u64,
    pub span_histogram: SpanHistogram,
    /// Share of known-span links in the first bin `[0, bin_width)`.
    pub first_bin_share: Option<f64>,
    pub direction_shares: DirectionShares,
    pub filter_retention: RetentionStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceStats {
    pub edge_count: u64,
    pub load_tally: ReferenceEdgeTally,
    pub build_tally: BuildTally,
    pub reciprocity: ReciprocityStats,
    pub temporal: TemporalStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub links_parse: ParseTally,
    pub roster_size: u64,
}

/// Every field is always serialized; analyses that could not run are null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub params: AnalysisParams,
    pub ingest: IngestSummary,
    pub node_count: u64,
    pub edge_count: u64,
    pub build_tally: BuildTally,
    pub degree: DegreeStats,
    pub wcc: ComponentSummary,
    pub scc: ComponentSummary,
    pub power_law_fit: Option<PowerLawFit>,
    pub power_law_error: Option<String>,
    pub reciprocity: ReciprocityStats,
    pub temporal: TemporalStats,
    pub reference: Option<ReferenceStats>,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
}

/// Span-derived statistics plus the span-filtered graph.
pub fn temporal_stats(
    graph: &LinkGraph,
    birth_years: &[Option<i32>],
    params: &AnalysisParams,
) -> Result<(TemporalStats, SpanSet, LinkGraph), TemporalError> {
    let spans = link_spans(graph, birth_years)?;
    let hist = span_histogram(&spans, params.bin_width)?;
    let (filtered, retention) = filter_by_span(graph, &spans, params.max_span_years)?;
    let stats = TemporalStats {
        span_count: spans.records.len() as u64,
        unknown_span_count: spans.unknown_count,
        first_bin_share: hist.histogram.first_bin_share(),
        span_histogram: hist,
        direction_shares: direction_shares(&spans),
        filter_retention: retention,
    };
    Ok((stats, spans, filtered))
}

pub fn degree_stats(deg: &DegreeVector, params: &AnalysisParams) -> Result<DegreeStats, GraphError> {
    let totals = deg.totals();
    let n = totals.len();
    Ok(DegreeStats {
        mean_total: if n == 0 { 0.0 } else { totals.iter().map(|&d| d as f64).sum::<f64>() / n as f64 },
        max_in: deg.in_degree.iter().copied().max().unwrap_or(0),
        max_out: deg.out_degree.iter().copied().max().unwrap_or(0),
        max_total: totals.iter().copied().max().unwrap_or(0),
        histogram_linear: degree_histogram(&totals, BinMode::Linear)?,
        histogram_log: degree_histogram(&totals, BinMode::LogBinned(params.degree_log_ratio))?,
    })
}

/// Output of [`analyze`]: the report and the pieces later stages reuse.
pub struct Analysis {
    pub report: StatsReport,
    pub degrees: DegreeVector,
    pub filtered: LinkGraph,
    pub spans: SpanSet,
}

pub struct ReferenceInput<'a> {
    pub graph: &'a LinkGraph,
    pub load_tally: ReferenceEdgeTally,
    pub build_tally: BuildTally,
}

pub fn analyze(
    graph: &LinkGraph,
    build_tally: BuildTally,
    ingest: IngestSummary,
    birth_years: &[Option<i32>],
    reference: Option<ReferenceInput<'_>>,
    params: &AnalysisParams,
) -> Result<Analysis, AnalysisError> {
    let deg = degrees(graph);
    let degree = degree_stats(&deg, params)?;
    let wcc = weakly_connected_components(graph);
    let scc = strongly_connected_components(graph);

    let samples: Vec<u64> = deg.totals().into_iter().filter(|&d| d > 0).map(u64::from).collect();
    let (power_law_fit, power_law_error) = match fit_power_law(&samples, params.power_law_xmin) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let (temporal, spans, filtered) = temporal_stats(graph, birth_years, params)?;
    let reference = match reference {
        Some(r) => {
            let (temporal, _, _) = temporal_stats(r.graph, birth_years, params)?;
            Some(ReferenceStats {
                edge_count: r.graph.edge_count() as u64,
                load_tally: r.load_tally,
                build_tally: r.build_tally,
                reciprocity: reciprocity_stats(r.graph),
                temporal,
            })
        }
        None => None,
    };

    let report = StatsReport {
        params: *params,
        ingest,
        node_count: graph.node_count() as u64,
        edge_count: graph.edge_count() as u64,
        build_tally,
        degree,
        wcc: component_summary(&wcc.sizes),
        scc: component_summary(&scc.sizes),
        power_law_fit,
        power_law_error,
        reciprocity: reciprocity_stats(graph),
        temporal,
        reference,
    };
    Ok(Analysis { report, degrees: deg, filtered, spans })
}
