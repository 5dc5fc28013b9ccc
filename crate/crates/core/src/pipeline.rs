//! End-to-end orchestration: dumps in, report and figures out.
//!
//! Stages run in a fixed order and every output is written as soon as its
//! stage completes, so a late failure (say, in layout) leaves the earlier
//! files intact.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::export::{write_csv_degree_histogram, write_csv_histogram, write_gexf, write_report, write_svg};
use crate::graph::{BuildTally, LinkGraph};
use crate::ingest::{
    extract_edges, parse_ntriples, ExtractedEdges, Iri, NTriplesReader, ParseTally, DEFAULT_LINK_PREDICATE,
};
use crate::layout::{
    assign_roster_colors, fruchterman_reingold, node_sizes, node_styles, ColorAttribute, Layout, LayoutParams,
    NodeStyle, DEFAULT_R_MAX, DEFAULT_R_MIN,
};
use crate::report::{analyze, AnalysisParams, IngestSummary, ReferenceInput, StatsReport};
use crate::roster::{
    build_roster, load_reference_edges_csv, load_roster_csv, JoinTally, PredicateMap, ReferenceEdgeTally, Roster,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Roster,
    Ingest,
    Graph,
    Reference,
    Analysis,
    Report,
    Filter,
    Layout,
    Render,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Roster => "roster",
            Stage::Ingest => "ingest",
            Stage::Graph => "graph",
            Stage::Reference => "reference",
            Stage::Analysis => "analysis",
            Stage::Report => "report",
            Stage::Filter => "filter",
            Stage::Layout => "layout",
            Stage::Render => "render",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl PipelineError {
    pub fn new(stage: Stage, source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        PipelineError { stage, source: source.into() }
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<Box<dyn std::error::Error + Send + Sync>>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::new(stage, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RosterSource {
    Csv(PathBuf),
    Join { mappings: PathBuf, attributes: PathBuf, predicate_map: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub links: Vec<PathBuf>,
    pub predicate: Iri,
    pub roster: RosterSource,
    pub ulan_edges: Option<PathBuf>,
    pub analysis: AnalysisParams,
    pub layout: LayoutParams,
    pub color_attribute: ColorAttribute,
    pub out: PathBuf,
}

impl PipelineConfig {
    pub fn new(links: Vec<PathBuf>, roster: RosterSource, out: PathBuf) -> Self {
        PipelineConfig {
            links,
            predicate: Iri::new(DEFAULT_LINK_PREDICATE).expect("default predicate is a valid IRI"),
            roster,
            ulan_edges: None,
            analysis: AnalysisParams::default(),
            layout: LayoutParams::default(),
            color_attribute: ColorAttribute::Nationality,
            out,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::new(Stage::Config, msg));
        if self.links.is_empty() {
            return bad("at least one --links file is required".into());
        }
        let a = &self.analysis;
        if !(a.bin_width > 0.0 && a.bin_width.is_finite()) {
            return bad(format!("bin width must be positive, got {}", a.bin_width));
        }
        if a.max_span_years.is_nan() || a.max_span_years < 0.0 {
            return bad(format!("max span must be non-negative, got {}", a.max_span_years));
        }
        if a.power_law_xmin < 1 {
            return bad("xmin must be at least 1".into());
        }
        if a.degree_log_ratio.is_nan() || a.degree_log_ratio <= 1.0 {
            return bad(format!("log bin ratio must exceed 1, got {}", a.degree_log_ratio));
        }
        self.layout.validate().at(Stage::Config)
    }
}

/// Roster, link graph and optional reference graph, ready for analysis.
pub struct Inputs {
    pub roster: Roster,
    pub join_tally: Option<JoinTally>,
    pub graph: LinkGraph,
    pub build_tally: BuildTally,
    pub links_parse: ParseTally,
    pub reference: Option<ReferenceGraph>,
}

pub struct ReferenceGraph {
    pub graph: LinkGraph,
    pub load_tally: ReferenceEdgeTally,
    pub build_tally: BuildTally,
}

fn open(path: &Path) -> Result<BufReader<File>, std::io::Error> {
    File::open(path)
        .map(|f| BufReader::with_capacity(1 << 16, f))
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn load_roster(source: &RosterSource) -> Result<(Roster, Option<JoinTally>), PipelineError> {
    match source {
        RosterSource::Csv(path) => {
            let roster = load_roster_csv(open(path).at(Stage::Roster)?).at(Stage::Roster)?;
            Ok((roster, None))
        }
        RosterSource::Join { mappings, attributes, predicate_map } => {
            let map_text = std::fs::read_to_string(predicate_map)
                .map_err(|e| format!("{}: {e}", predicate_map.display()))
                .at(Stage::Roster)?;
            let map: PredicateMap = toml::from_str(&map_text).at(Stage::Roster)?;
            let (m, _) = parse_ntriples(open(mappings).at(Stage::Roster)?).at(Stage::Roster)?;
            let (a, _) = parse_ntriples(open(attributes).at(Stage::Roster)?).at(Stage::Roster)?;
            let (roster, tally) = build_roster(&m, &a, &map);
            Ok((roster, Some(tally)))
        }
    }
}

/// Parse and resolve every link file; files are read concurrently and the
/// results combined in argument order.
fn load_links(
    paths: &[PathBuf],
    predicate: &Iri,
    roster: &Roster,
) -> Result<(ExtractedEdges, ParseTally), PipelineError> {
    let per_file: Vec<Result<(ExtractedEdges, ParseTally), PipelineError>> = paths
        .par_iter()
        .map(|path| {
            let mut reader = NTriplesReader::new(open(path).at(Stage::Ingest)?);
            let edges = extract_edges(reader.by_ref(), predicate, roster.iri_index()).at(Stage::Ingest)?;
            Ok((edges, *reader.tally()))
        })
        .collect();
    let mut edges = ExtractedEdges::default();
    let mut tally = ParseTally::default();
    for result in per_file {
        let (e, t) = result?;
        edges.append(e);
        tally.merge(&t);
    }
    Ok((edges, tally))
}

pub fn load_inputs(config: &PipelineConfig) -> Result<Inputs, PipelineError> {
    config.validate()?;
    let (roster, join_tally) = load_roster(&config.roster)?;
    info!("roster: {} entities", roster.len());
    let (extracted, links_parse) = load_links(&config.links, &config.predicate, &roster)?;
    info!(
        "ingest: {} lines, {} triples, {} malformed, {} link edges, {} off-roster",
        links_parse.lines_total,
        links_parse.triples_ok,
        links_parse.lines_malformed,
        extracted.edges.len(),
        extracted.off_roster
    );
    let (graph, mut build_tally) = LinkGraph::build(roster.len(), &extracted.edges).at(Stage::Graph)?;
    build_tally.off_roster_dropped = extracted.off_roster;
    info!("graph: {} nodes, {} edges", graph.node_count(), graph.edge_count());

    let reference = match &config.ulan_edges {
        Some(path) => {
            let (edges, load_tally) =
                load_reference_edges_csv(open(path).at(Stage::Reference)?, &roster).at(Stage::Reference)?;
            let (graph, build_tally) = LinkGraph::build(roster.len(), &edges).at(Stage::Reference)?;
            info!("reference: {} edges ({} rows skipped)", graph.edge_count(), load_tally.skipped);
            Some(ReferenceGraph { graph, load_tally, build_tally })
        }
        None => None,
    };
    Ok(Inputs { roster, join_tally, graph, build_tally, links_parse, reference })
}

fn create(path: &Path, stage: Stage) -> Result<BufWriter<File>, PipelineError> {
    File::create(path).map(BufWriter::new).map_err(|e| format!("{}: {e}", path.display())).at(stage)
}

/// Which outputs a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// report.json and histogram CSVs
    Report,
    /// filtered.gexf without positions
    Filter,
    /// filtered.gexf with layout and styles
    Layout,
    /// filtered.gexf and filtered.svg
    Render,
    /// everything
    All,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub report: Option<StatsReport>,
}

pub const REPORT_FILE: &str = "report.json";
pub const DEGREE_LINEAR_CSV: &str = "degree_hist_linear.csv";
pub const DEGREE_LOG_CSV: &str = "degree_hist_log.csv";
pub const SPAN_CSV: &str = "span_hist.csv";
pub const SPAN_REFERENCE_CSV: &str = "span_hist_reference.csv";
pub const FULL_GEXF: &str = "full.gexf";
pub const FILTERED_GEXF: &str = "filtered.gexf";
pub const FILTERED_SVG: &str = "filtered.svg";

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(
        &mut self,
        name: &str,
        stage: Stage,
        body: impl FnOnce(&mut BufWriter<File>) -> Result<(), crate::export::ExportError>,
    ) -> Result<(), PipelineError> {
        let path = self.dir.join(name);
        let mut sink = create(&path, stage)?;
        body(&mut sink).at(stage)?;
        sink.flush().at(stage)?;
        info!("wrote {}", path.display());
        self.files.push(path);
        Ok(())
    }
}

pub fn run(config: &PipelineConfig, command: Command) -> Result<RunOutcome, PipelineError> {
    let inputs = load_inputs(config)?;
    run_with_inputs(config, &inputs, command)
}

pub fn run_with_inputs(
    config: &PipelineConfig,
    inputs: &Inputs,
    command: Command,
) -> Result<RunOutcome, PipelineError> {
    std::fs::create_dir_all(&config.out).map_err(|e| format!("{}: {e}", config.out.display())).at(Stage::Config)?;
    let births = inputs.roster.birth_years();
    let analysis = analyze(
        &inputs.graph,
        inputs.build_tally,
        IngestSummary { links_parse: inputs.links_parse, roster_size: inputs.roster.len() as u64 },
        &births,
        inputs.reference.as_ref().map(|r| ReferenceInput {
            graph: &r.graph,
            load_tally: r.load_tally,
            build_tally: r.build_tally,
        }),
        &config.analysis,
    )
    .at(Stage::Analysis)?;
    let report = &analysis.report;
    let mut out = Writer { dir: &config.out, files: Vec::new() };
    let colors = assign_roster_colors(&inputs.roster, config.color_attribute, 20);

    if matches!(command, Command::Report | Command::All) {
        out.write(REPORT_FILE, Stage::Report, |w| write_report(report, w).map(|_| ()))?;
        out.write(DEGREE_LINEAR_CSV, Stage::Report, |w| {
            write_csv_degree_histogram(&report.degree.histogram_linear, w)
        })?;
        out.write(DEGREE_LOG_CSV, Stage::Report, |w| write_csv_degree_histogram(&report.degree.histogram_log, w))?;
        out.write(SPAN_CSV, Stage::Report, |w| write_csv_histogram(&report.temporal.span_histogram.histogram, w))?;
        if let Some(r) = &report.reference {
            out.write(SPAN_REFERENCE_CSV, Stage::Report, |w| {
                write_csv_histogram(&r.temporal.span_histogram.histogram, w)
            })?;
        }
    }
    if command == Command::All {
        let radii = node_sizes(&analysis.degrees.totals(), DEFAULT_R_MIN, DEFAULT_R_MAX).at(Stage::Render)?;
        let styles = node_styles(&radii, &colors);
        out.write(FULL_GEXF, Stage::Render, |w| write_gexf(&inputs.graph, &inputs.roster, None, Some(&styles), w))?;
    }
    if command == Command::Report {
        return Ok(RunOutcome { files: out.files, report: Some(analysis.report) });
    }

    let filtered = &analysis.filtered;
    let retention = &report.temporal.filter_retention;
    info!(
        "filter: kept {} of {} edges (max span {} years, {} unknown dropped)",
        retention.kept, retention.total_edges, retention.max_span_years, retention.dropped_unknown
    );
    if command == Command::Filter {
        out.write(FILTERED_GEXF, Stage::Filter, |w| write_gexf(filtered, &inputs.roster, None, None, w))?;
        return Ok(RunOutcome { files: out.files, report: Some(analysis.report) });
    }

    let layout: Layout = fruchterman_reingold(filtered, &config.layout).at(Stage::Layout)?;
    info!("layout: {} iterations over {} nodes", config.layout.iterations, filtered.node_count());
    let filtered_degrees = crate::graph::degrees(filtered).totals();
    let radii = node_sizes(&filtered_degrees, DEFAULT_R_MIN, DEFAULT_R_MAX).at(Stage::Render)?;
    let styles: Vec<NodeStyle> = node_styles(&radii, &colors);
    out.write(FILTERED_GEXF, Stage::Render, |w| write_gexf(filtered, &inputs.roster, Some(&layout), Some(&styles), w))?;
    if matches!(command, Command::Render | Command::All) {
        out.write(FILTERED_SVG, Stage::Render, |w| write_svg(filtered, &layout, &styles, w))?;
    }
    Ok(RunOutcome { files: out.files, report: Some(analysis.report) })
}
