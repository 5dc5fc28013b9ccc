use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use serde::Deserialize;

use linkscope::fixture::{SyntheticDataset, SyntheticSpec};
use linkscope::layout::ColorAttribute;
use linkscope::pipeline::{self, load_inputs, Command, PipelineConfig, PipelineError, RosterSource, Stage};
use linkscope::Iri;

#[derive(Parser, Debug)]
#[command(name = "linkscope", version, about = "Extract and analyse a roster-scoped link graph from N-Triples dumps")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand, Debug)]
enum Commands {
    /// Parse inputs and print ingest, roster and graph tallies
    IngestCheck(PipelineArgs),
    /// Write report.json and the histogram CSVs
    Report(PipelineArgs),
    /// Write the span-filtered graph as GEXF
    Filter(PipelineArgs),
    /// Lay out the filtered graph and write it as GEXF with positions
    Layout(PipelineArgs),
    /// Lay out the filtered graph and render it as SVG
    Render(PipelineArgs),
    /// Run every stage
    All(PipelineArgs),
    /// Generate a seeded synthetic dataset (roster.csv, links.nt, ulan_edges.csv)
    Synth(SynthArgs),
}

#[derive(Args, Debug, Default)]
struct PipelineArgs {
    /// Key-value (TOML) file with any of the options below; flags win
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// N-Triples link dump(s)
    #[arg(long, value_name = "PATH", num_args = 1..)]
    links: Vec<PathBuf>,
    /// Link predicate IRI
    #[arg(long, value_name = "IRI")]
    predicate: Option<String>,
    /// Prepared roster CSV
    #[arg(long, value_name = "PATH", conflicts_with_all = ["mappings", "attributes", "predicate_map"])]
    roster_csv: Option<PathBuf>,
    /// Mapping triples (authority record -> entity IRI)
    #[arg(long, value_name = "PATH")]
    mappings: Option<PathBuf>,
    /// Attribute triples for authority records
    #[arg(long, value_name = "PATH")]
    attributes: Option<PathBuf>,
    /// TOML file naming the predicate of each roster field
    #[arg(long, value_name = "PATH")]
    predicate_map: Option<PathBuf>,
    /// Reference edges CSV keyed by ULAN id
    #[arg(long, value_name = "PATH")]
    ulan_edges: Option<PathBuf>,
    /// Span histogram bin width in years [default: 37.5]
    #[arg(long)]
    bin_width: Option<f64>,
    /// Largest birth-year span kept by the filter [default: 75]
    #[arg(long)]
    max_span: Option<f64>,
    /// Power-law fit lower bound [default: 1]
    #[arg(long)]
    xmin: Option<u64>,
    /// Layout iterations [default: 500]
    #[arg(long)]
    iterations: Option<usize>,
    /// Barnes-Hut opening angle [default: 1.2]
    #[arg(long)]
    theta: Option<f64>,
    /// Layout seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Node colour attribute: nationality or role [default: nationality]
    #[arg(long)]
    color_by: Option<String>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    entities: usize,
    #[arg(long, default_value_t = 2000)]
    links: usize,
    #[arg(long, default_value_t = 350)]
    reference_links: usize,
    #[arg(long, default_value_t = 2012)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    links: Option<Vec<PathBuf>>,
    predicate: Option<String>,
    roster_csv: Option<PathBuf>,
    mappings: Option<PathBuf>,
    attributes: Option<PathBuf>,
    predicate_map: Option<PathBuf>,
    ulan_edges: Option<PathBuf>,
    bin_width: Option<f64>,
    max_span: Option<f64>,
    xmin: Option<u64>,
    iterations: Option<usize>,
    theta: Option<f64>,
    seed: Option<u64>,
    color_by: Option<String>,
    out: Option<PathBuf>,
}

fn config_error(msg: impl Into<String>) -> PipelineError {
    PipelineError::new(Stage::Config, msg.into())
}

impl PipelineArgs {
    fn resolve(self) -> Result<PipelineConfig, PipelineError> {
        let file: ConfigFile = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let links = if self.links.is_empty() { file.links.unwrap_or_default() } else { self.links };
        let out = self.out.or(file.out).ok_or_else(|| config_error("--out is required"))?;

        let roster_csv = self.roster_csv.or(file.roster_csv);
        let mappings = self.mappings.or(file.mappings);
        let attributes = self.attributes.or(file.attributes);
        let predicate_map = self.predicate_map.or(file.predicate_map);
        let roster = match (roster_csv, mappings, attributes, predicate_map) {
            (Some(csv), None, None, None) => RosterSource::Csv(csv),
            (None, Some(mappings), Some(attributes), Some(predicate_map)) => {
                RosterSource::Join { mappings, attributes, predicate_map }
            }
            _ => return Err(config_error(
                "specify exactly one roster source: --roster-csv, or --mappings with --attributes and --predicate-map",
            )),
        };

        let mut config = PipelineConfig::new(links, roster, out);
        if let Some(p) = self.predicate.or(file.predicate) {
            config.predicate = Iri::new(p).map_err(|e| config_error(e.to_string()))?;
        }
        config.ulan_edges = self.ulan_edges.or(file.ulan_edges);
        let a = &mut config.analysis;
        a.bin_width = self.bin_width.or(file.bin_width).unwrap_or(a.bin_width);
        a.max_span_years = self.max_span.or(file.max_span).unwrap_or(a.max_span_years);
        a.power_law_xmin = self.xmin.or(file.xmin).unwrap_or(a.power_law_xmin);
        let l = &mut config.layout;
        l.iterations = self.iterations.or(file.iterations).unwrap_or(l.iterations);
        l.theta = self.theta.or(file.theta).unwrap_or(l.theta);
        l.seed = self.seed.or(file.seed).unwrap_or(l.seed);
        config.color_attribute = match self.color_by.or(file.color_by).as_deref() {
            None | Some("nationality") => ColorAttribute::Nationality,
            Some("role") => ColorAttribute::Role,
            Some(other) => return Err(config_error(format!("unknown colour attribute {other:?}"))),
        };
        config.validate()?;
        Ok(config)
    }
}

fn ingest_check(config: &PipelineConfig) -> Result<(), PipelineError> {
    let inputs = load_inputs(config)?;
    let summary = serde_json::json!({
        "links_parse": inputs.links_parse,
        "roster_size": inputs.roster.len(),
        "join_tally": inputs.join_tally,
        "node_count": inputs.graph.node_count(),
        "edge_count": inputs.graph.edge_count(),
        "build_tally": inputs.build_tally,
        "reference_edges": inputs.reference.as_ref().map(|r| r.graph.edge_count()),
        "reference_load_tally": inputs.reference.as_ref().map(|r| r.load_tally),
    });
    println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| config_error(e.to_string()))?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let (args, command) = match cli.command {
        Commands::IngestCheck(args) => return ingest_check(&args.resolve()?),
        Commands::Synth(s) => {
            let spec = SyntheticSpec {
                entities: s.entities,
                links: s.links,
                reference_links: s.reference_links,
                seed: s.seed,
                noise: true,
            };
            SyntheticDataset::generate(&spec)
                .write_to_dir(&s.out)
                .map_err(|e| config_error(format!("{}: {e}", s.out.display())))?;
            println!("wrote synthetic dataset to {}", s.out.display());
            return Ok(());
        }
        Commands::Report(args) => (args, Command::Report),
        Commands::Filter(args) => (args, Command::Filter),
        Commands::Layout(args) => (args, Command::Layout),
        Commands::Render(args) => (args, Command::Render),
        Commands::All(args) => (args, Command::All),
    };
    let config = args.resolve()?;
    let outcome = pipeline::run(&config, command)?;
    for f in &outcome.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
