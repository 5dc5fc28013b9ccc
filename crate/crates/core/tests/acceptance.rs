//! Acceptance suite. Each test prints one PASS/FAIL line; run with
//! `cargo test -p linkscope --test acceptance -- --nocapture --test-threads=1`.

mod common;

use std::collections::BTreeSet;
use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use linkscope::components::{strongly_connected_components, weakly_connected_components};
use linkscope::fixture::{SyntheticDataset, SyntheticSpec};
use linkscope::ingest::{parse_line, parse_ntriples, LineKind};
use linkscope::layout::fruchterman_reingold;
use linkscope::pipeline::{self, REPORT_FILE};
use linkscope::powerlaw::{fit_power_law, synth_power_law_sample};
use linkscope::temporal::{filter_by_span, histogram_of_abs, link_spans, reciprocity_stats, span_histogram, Direction};
use linkscope::{LayoutParams, LinkGraph, PipelineConfig, RosterSource};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn verdict(id: &str, name: &str, ok: bool, detail: String) -> bool {
    println!("criterion {id} [{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

struct Corpus {
    n: usize,
    raw: Vec<(u32, u32)>,
}

/// 100 seeded random digraphs, n <= 200, density 0.005..0.2.
fn random_corpus() -> Vec<Corpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    (0..100)
        .map(|i| {
            let n = rng.random_range(2..=200usize);
            let density = 0.005 + (0.2 - 0.005) * (i as f64 / 99.0);
            let m = (density * (n * (n - 1)) as f64).round() as usize;
            Corpus { n, raw: random_raw_edges(n, m, rng.random()) }
        })
        .collect()
}

#[test]
fn c1_component_oracle_equality() {
    let start = Instant::now();
    let mut mismatches = 0;
    for c in random_corpus() {
        let (g, _) = LinkGraph::build(c.n, &c.raw).unwrap();
        let edges = simple_edges(&c.raw);
        let weak = partition_of_labels(&weakly_connected_components(&g).labels);
        let strong = partition_of_labels(&strongly_connected_components(&g).labels);
        if weak != weak_partition_oracle(c.n, &edges) || strong != strong_partition_oracle(c.n, &edges) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = verdict(
        "1",
        "component oracle equality",
        mismatches == 0 && elapsed < Duration::from_secs(10),
        format!("{mismatches} mismatching graphs of 100, {:.2} s (limit 10 s)", elapsed.as_secs_f64()),
    );
    assert!(ok);
}

#[test]
fn c2_reciprocity_oracle_equality() {
    let mut bad = 0;
    let mut odd = 0;
    for c in random_corpus() {
        let (g, _) = LinkGraph::build(c.n, &c.raw).unwrap();
        let edges = simple_edges(&c.raw);
        let r = reciprocity_stats(&g);
        if r.mirrored_count as usize != mirrored_oracle(&edges)
            || r.mirrored_count + r.unique_count != edges.len() as u64
        {
            bad += 1;
        }
        if !r.mirrored_count.is_multiple_of(2) {
            odd += 1;
        }
    }
    let ok = verdict(
        "2",
        "reciprocity oracle equality",
        bad == 0 && odd == 0,
        format!("{bad} mismatching graphs, {odd} odd mirrored counts"),
    );
    assert!(ok);
}

#[test]
fn c3_power_law_recovery() {
    let mut details = Vec::new();
    let mut ok = true;
    for (alpha, seed) in [(1.8, 18u64), (2.5, 25), (3.2, 32)] {
        let sample = synth_power_law_sample(alpha, 1, 10_000, seed).unwrap();
        let fit = fit_power_law(&sample, 1).unwrap();
        let err = (fit.alpha - alpha).abs();
        ok &= err <= 0.1;
        details.push(format!("alpha={alpha}: fitted {:.4} (|err| {:.4})", fit.alpha, err));
    }
    let ok = verdict("3a", "power-law recovery, n=10^4, xmin=1, tol 0.1", ok, details.join("; "));
    assert!(ok);
}

/// Expected value from the acceptance list; see the decisions ledger for why
/// no maximum-likelihood estimator of the stated model produces it.
#[test]
fn c3_power_law_hand_case() {
    let fit = fit_power_law(&[1, 1, 1, 1, 10], 1).unwrap();
    let expected = 2.669;
    let ok = verdict(
        "3b",
        "power-law hand case [1,1,1,1,10]",
        (fit.alpha - expected).abs() <= 0.001,
        format!(
            "fitted {:.6} (closed-form approximation {:.6}), expected {expected} +/- 0.001",
            fit.alpha, fit.alpha_continuous_approx
        ),
    );
    assert!(ok);
}

#[test]
fn c4_temporal_semantics() {
    // A=1500 B=1425 C=1576 D=1500 E=1463 F=1538
    let births = [Some(1500), Some(1425), Some(1576), Some(1500), Some(1463), Some(1538)];
    let edges = [(0, 1), (0, 2), (0, 3), (0, 4), (5, 0)];
    let (g, _) = LinkGraph::build(6, &edges).unwrap();
    let spans = link_spans(&g, &births).unwrap();
    let mut got: Vec<_> = spans.records.iter().map(|r| ((r.source, r.target), r.delta_years, r.direction)).collect();
    got.sort_by_key(|g| g.0);
    let expected = vec![
        ((0, 1), 75, Direction::Past),
        ((0, 2), -76, Direction::Future),
        ((0, 3), 0, Direction::Same),
        ((0, 4), 37, Direction::Past),
        ((5, 0), 38, Direction::Past),
    ];
    let mut ok = got == expected && spans.unknown_count == 0;

    let hist = span_histogram(&spans, 37.5).unwrap().histogram;
    let counts: Vec<u64> = hist.bins.iter().map(|b| b.count).collect();
    ok &= counts == [2, 1, 2];
    let boundary = histogram_of_abs([37.5].into_iter(), 37.5).unwrap().histogram;
    ok &= boundary.bins.iter().map(|b| b.count).collect::<Vec<_>>() == [0, 1];

    let (filtered, retention) = filter_by_span(&g, &spans, 75.0).unwrap();
    let kept: BTreeSet<_> = filtered.edges().collect();
    ok &= kept == BTreeSet::from([(0, 1), (0, 3), (0, 4), (5, 0)]);
    ok &= retention.kept == 4 && retention.dropped_over_span == 1;

    // antisymmetry on the fixture and every random test graph
    let mut antisymmetric = true;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut graphs: Vec<(LinkGraph, Vec<Option<i32>>)> = vec![(g.clone(), births.to_vec())];
    for c in random_corpus() {
        let b = (0..c.n).map(|_| (rng.random::<f64>() < 0.85).then(|| rng.random_range(1300..2000))).collect();
        graphs.push((LinkGraph::build(c.n, &c.raw).unwrap().0, b));
    }
    for (graph, b) in &graphs {
        let fwd = link_spans(graph, b).unwrap();
        let rev = link_spans(&graph.transpose(), b).unwrap();
        let count =
            |s: &linkscope::temporal::SpanSet, d: Direction| s.records.iter().filter(|r| r.direction == d).count();
        antisymmetric &= count(&fwd, Direction::Past) == count(&rev, Direction::Future)
            && count(&fwd, Direction::Future) == count(&rev, Direction::Past)
            && count(&fwd, Direction::Same) == count(&rev, Direction::Same);
        for r in &fwd.records {
            let mirror = rev.records.iter().find(|q| q.source == r.target && q.target == r.source).unwrap();
            antisymmetric &= mirror.delta_years == -r.delta_years;
        }
    }
    ok &= antisymmetric;
    let ok = verdict(
        "4",
        "temporal semantics",
        ok,
        format!(
            "deltas/directions {}, bins {:?}, 37.5 -> bin {}, kept {} of 5, antisymmetry over {} graphs {}",
            if got == expected { "match" } else { "differ" },
            counts,
            boundary.bins.iter().position(|b| b.count == 1).unwrap_or(usize::MAX),
            retention.kept,
            graphs.len(),
            if antisymmetric { "holds" } else { "broken" }
        ),
    );
    assert!(ok);
}

#[test]
fn c5_parser_conformance() {
    let corpus = include_str!("data/conformance.nt");
    let (triples, tally) = parse_ntriples(Cursor::new(corpus)).unwrap();
    let tally_ok = (tally.triples_ok, tally.lines_skipped_comment_or_blank, tally.lines_malformed) == (21, 4, 5);
    let once: String = triples.iter().map(|t| format!("{t}\n")).collect();
    let reparsed: Vec<_> = once.lines().map(parse_line).collect();
    let fixpoint = reparsed.len() == triples.len()
        && reparsed.iter().zip(&triples).all(|(k, t)| matches!(k, LineKind::Triple(r) if r == t))
        && reparsed
            .iter()
            .filter_map(|k| if let LineKind::Triple(t) = k { Some(format!("{t}\n")) } else { None })
            .collect::<String>()
            == once;
    let ok = verdict(
        "5",
        "parser conformance",
        tally_ok && fixpoint,
        format!(
            "tally (triples, skipped, malformed) = ({}, {}, {}) expected (21, 4, 5); fixpoint {}",
            tally.triples_ok,
            tally.lines_skipped_comment_or_blank,
            tally.lines_malformed,
            if fixpoint { "holds" } else { "broken" }
        ),
    );
    assert!(ok);
}

fn bundled_fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic")
}

fn run_all(out: &Path) -> bool {
    let fx = bundled_fixture();
    Command::new(env!("CARGO_BIN_EXE_linkscope"))
        .env("RUST_LOG", "warn")
        .stdout(Stdio::null())
        .arg("all")
        .arg("--links")
        .arg(fx.join("links.nt"))
        .arg("--roster-csv")
        .arg(fx.join("roster.csv"))
        .arg("--ulan-edges")
        .arg(fx.join("ulan_edges.csv"))
        .arg("--out")
        .arg(out)
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn format_check(path: &Path) -> Result<(), String> {
    let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext {
        "json" => serde_json::from_slice::<serde_json::Value>(&bytes).map(|_| ()).map_err(|e| e.to_string()),
        "csv" => {
            let mut rdr = csv::Reader::from_reader(bytes.as_slice());
            let width = rdr.headers().map_err(|e| e.to_string())?.len();
            for rec in rdr.records() {
                let rec = rec.map_err(|e| e.to_string())?;
                if rec.len() != width {
                    return Err(format!("ragged row {rec:?}"));
                }
            }
            Ok(())
        }
        "gexf" | "svg" => {
            let text = std::str::from_utf8(&bytes).map_err(|e| e.to_string())?;
            roxmltree::Document::parse(text).map(|_| ()).map_err(|e| e.to_string())
        }
        other => Err(format!("unexpected output type {other:?}")),
    }
}

#[test]
fn c6_end_to_end_determinism() {
    let fx = bundled_fixture();
    let regenerated = SyntheticDataset::generate(&SyntheticSpec::bundled());
    let fixture_current = std::fs::read(fx.join("links.nt")).unwrap() == regenerated.links_ntriples().as_bytes()
        && std::fs::read(fx.join("roster.csv")).unwrap() == regenerated.roster_csv();

    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ran = run_all(a.path()) && run_all(b.path());
    let mut names: Vec<_> =
        std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    let mut differing = Vec::new();
    let mut invalid = Vec::new();
    for name in &names {
        if std::fs::read(a.path().join(name)).ok() != std::fs::read(b.path().join(name)).ok() {
            differing.push(name.clone());
        }
        if let Err(e) = format_check(&a.path().join(name)) {
            invalid.push(format!("{name}: {e}"));
        }
    }
    let ok = verdict(
        "6",
        "end-to-end determinism",
        fixture_current && ran && names.len() == 8 && differing.is_empty() && invalid.is_empty(),
        format!(
            "{} outputs, differing {:?}, format errors {:?}, fixture matches generator: {fixture_current}",
            names.len(),
            differing,
            invalid
        ),
    );
    assert!(ok);
}

#[test]
fn c7_full_scale_performance() {
    let spec = SyntheticSpec { entities: 18_000, links: 55_000, reference_links: 0, seed: 18_002, noise: false };
    let tmp = tempfile::tempdir().unwrap();
    SyntheticDataset::generate(&spec).write_to_dir(tmp.path()).unwrap();
    let config = PipelineConfig::new(
        vec![tmp.path().join("links.nt")],
        RosterSource::Csv(tmp.path().join("roster.csv")),
        tmp.path().join("out"),
    );

    let start = Instant::now();
    let outcome = pipeline::run(&config, linkscope::Command::Report).unwrap();
    let report_time = start.elapsed();
    let report = outcome.report.unwrap();
    assert!(tmp.path().join("out").join(REPORT_FILE).is_file());

    let edges: Vec<(u32, u32)> = {
        let inputs = pipeline::load_inputs(&config).unwrap();
        inputs.graph.edges().collect()
    };
    let (g, _) = LinkGraph::build(spec.entities, &edges).unwrap();
    let params = LayoutParams { iterations: 500, ..LayoutParams::default() };
    let start = Instant::now();
    let layout = fruchterman_reingold(&g, &params).unwrap();
    let layout_time = start.elapsed();

    let ok = verdict(
        "7",
        "full-scale performance",
        report_time < Duration::from_secs(5)
            && layout_time < Duration::from_secs(120)
            && layout.positions.len() == 18_000,
        format!(
            "n={} m={}: ingest-through-report {:.2} s (limit 5 s), 500-iteration layout {:.1} s (limit 120 s)",
            report.node_count,
            report.edge_count,
            report_time.as_secs_f64(),
            layout_time.as_secs_f64()
        ),
    );
    assert!(ok);
}

/// Report fields that correspond one-to-one to the headline statistics.
const HEADLINE_FIELDS: [&str; 13] = [
    "/node_count",
    "/edge_count",
    "/wcc/count",
    "/wcc/giant_fraction",
    "/scc/count",
    "/scc/giant_fraction",
    "/temporal/first_bin_share",
    "/temporal/direction_shares/past_share",
    "/temporal/direction_shares/future_share",
    "/reciprocity/mirrored_share",
    "/reciprocity/cross_domain_reference_share",
    "/temporal/filter_retention/share_of_known",
    "/temporal/filter_retention/share_of_all",
];

const REFERENCE_FIELDS: [&str; 5] = [
    "/reference/edge_count",
    "/reference/reciprocity/mirrored_share",
    "/reference/temporal/first_bin_share",
    "/reference/temporal/direction_shares/past_share",
    "/reference/temporal/filter_retention/share_of_known",
];

#[test]
fn c8_report_shape_fidelity() {
    let out = tempfile::tempdir().unwrap();
    let fx = bundled_fixture();
    let mut config = PipelineConfig::new(
        vec![fx.join("links.nt")],
        RosterSource::Csv(fx.join("roster.csv")),
        out.path().to_path_buf(),
    );
    config.ulan_edges = Some(fx.join("ulan_edges.csv"));
    pipeline::run(&config, linkscope::Command::Report).unwrap();
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.path().join(REPORT_FILE)).unwrap()).unwrap();

    let missing: Vec<&str> = HEADLINE_FIELDS
        .iter()
        .chain(REFERENCE_FIELDS.iter())
        .copied()
        .filter(|p| !report.pointer(p).is_some_and(|v| v.is_number()))
        .collect();
    let retention_years = report.pointer("/temporal/filter_retention/max_span_years").and_then(|v| v.as_f64());

    // Fields stay present (as null) when a statistic is undefined.
    let empty_dir = tempfile::tempdir().unwrap();
    std::fs::write(empty_dir.path().join("links.nt"), "").unwrap();
    std::fs::write(
        empty_dir.path().join("roster.csv"),
        "entity_iri,ulan_id,viaf_id,birth_year,death_year,nationality,role\n",
    )
    .unwrap();
    let empty = PipelineConfig::new(
        vec![empty_dir.path().join("links.nt")],
        RosterSource::Csv(empty_dir.path().join("roster.csv")),
        empty_dir.path().join("out"),
    );
    pipeline::run(&empty, linkscope::Command::Report).unwrap();
    let empty_report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(empty_dir.path().join("out").join(REPORT_FILE)).unwrap()).unwrap();
    let absent: Vec<&str> = HEADLINE_FIELDS.iter().copied().filter(|p| empty_report.pointer(p).is_none()).collect();
    let fit_null = empty_report.get("power_law_fit") == Some(&serde_json::Value::Null)
        && empty_report.get("reference") == Some(&serde_json::Value::Null);

    let ok = verdict(
        "8",
        "report-shape fidelity",
        missing.is_empty() && retention_years == Some(75.0) && absent.is_empty() && fit_null,
        format!(
            "{} headline and {} reference fields checked; missing {:?}; retention window {:?}; empty-input report absent {:?}",
            HEADLINE_FIELDS.len(),
            REFERENCE_FIELDS.len(),
            missing,
            retention_years,
            absent
        ),
    );
    assert!(ok);
}
