//! Deterministic writers: canonical JSON report, GEXF, DOT, CSV histograms
//! and static SVG.
//!
//! Reals are written with at most six significant digits everywhere, so
//! identical inputs always give identical bytes.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde_json::Value;
use thiserror::Error;

use crate::graph::{degrees, DegreeHistogram, LinkGraph};
use crate::layout::{Layout, NodeStyle};
use crate::report::StatsReport;
use crate::roster::Roster;
use crate::temporal::Histogram;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{what} covers {found} nodes, graph has {expected}")]
    Inconsistent { what: &'static str, found: usize, expected: usize },
}

/// Round to six significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.5e}", x).parse().unwrap_or(x)
}

/// Shortest decimal form of `x` after rounding to six significant digits.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig6(x);
    if r == 0.0 {
        return "0".to_string();
    }
    format!("{}", r)
}

fn canonicalize(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            serde_json::Number::from_f64(round_sig6(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, canonicalize(v))).collect())
        }
        other => other,
    }
}

/// Canonical JSON bytes of a report: sorted keys, two-space indentation,
/// six-significant-digit reals, trailing newline.
pub fn report_json(report: &StatsReport) -> Result<Vec<u8>, ExportError> {
    let value = canonicalize(serde_json::to_value(report)?);
    let mut bytes = serde_json::to_vec_pretty(&value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_report<W: Write>(report: &StatsReport, mut sink: W) -> Result<usize, ExportError> {
    let bytes = report_json(report)?;
    sink.write_all(&bytes)?;
    sink.flush()?;
    Ok(bytes.len())
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            c => out.push(c),
        }
    }
    out
}

fn check_len(what: &'static str, found: usize, expected: usize) -> Result<(), ExportError> {
    if found != expected {
        return Err(ExportError::Inconsistent { what, found, expected });
    }
    Ok(())
}

/// GEXF 1.2 document with node attributes and, when given, viz elements.
pub fn write_gexf<W: Write>(
    graph: &LinkGraph,
    roster: &Roster,
    layout: Option<&Layout>,
    styles: Option<&[NodeStyle]>,
    mut sink: W,
) -> Result<(), ExportError> {
    let n = graph.node_count();
    check_len("roster", roster.len(), n)?;
    if let Some(l) = layout {
        check_len("layout", l.positions.len(), n)?;
    }
    if let Some(s) = styles {
        check_len("styles", s.len(), n)?;
    }
    let totals = degrees(graph).totals();

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<gexf xmlns=\"http://gexf.net/1.2\" xmlns:viz=\"http://gexf.net/1.2/viz\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://gexf.net/1.2 http://gexf.net/1.2/gexf.xsd\" version=\"1.2\">\n",
    );
    out.push_str("  <meta>\n    <creator>linkscope</creator>\n  </meta>\n");
    out.push_str("  <graph mode=\"static\" defaultedgetype=\"directed\">\n");
    out.push_str("    <attributes class=\"node\">\n");
    for (id, title, ty) in [
        (0, "ulan_id", "string"),
        (1, "birth_year", "integer"),
        (2, "nationality", "string"),
        (3, "role", "string"),
        (4, "total_degree", "integer"),
    ] {
        let _ = writeln!(out, "      <attribute id=\"{id}\" title=\"{title}\" type=\"{ty}\"/>");
    }
    out.push_str("    </attributes>\n");
    let _ = writeln!(out, "    <nodes count=\"{n}\">");
    for (v, rec) in roster.records().iter().enumerate() {
        let _ = writeln!(out, "      <node id=\"{v}\" label=\"{}\">", xml_escape(rec.entity_iri.as_str()));
        out.push_str("        <attvalues>\n");
        let _ = writeln!(out, "          <attvalue for=\"0\" value=\"{}\"/>", xml_escape(&rec.ulan_id));
        if let Some(b) = rec.birth_year {
            let _ = writeln!(out, "          <attvalue for=\"1\" value=\"{b}\"/>");
        }
        if let Some(nat) = &rec.nationality {
            let _ = writeln!(out, "          <attvalue for=\"2\" value=\"{}\"/>", xml_escape(nat));
        }
        if let Some(role) = &rec.role {
            let _ = writeln!(out, "          <attvalue for=\"3\" value=\"{}\"/>", xml_escape(role));
        }
        let _ = writeln!(out, "          <attvalue for=\"4\" value=\"{}\"/>", totals[v]);
        out.push_str("        </attvalues>\n");
        if let Some(l) = layout {
            let [x, y] = l.positions[v];
            let _ = writeln!(out, "        <viz:position x=\"{}\" y=\"{}\" z=\"0\"/>", fmt_num(x), fmt_num(y));
        }
        if let Some(s) = styles {
            let st = &s[v];
            let _ = writeln!(out, "        <viz:size value=\"{}\"/>", fmt_num(st.radius));
            let _ =
                writeln!(out, "        <viz:color r=\"{}\" g=\"{}\" b=\"{}\"/>", st.color.0, st.color.1, st.color.2);
        }
        out.push_str("      </node>\n");
    }
    out.push_str("    </nodes>\n");
    let _ = writeln!(out, "    <edges count=\"{}\">", graph.edge_count());
    for (i, (s, t)) in graph.edges().enumerate() {
        let _ = writeln!(out, "      <edge id=\"{i}\" source=\"{s}\" target=\"{t}\"/>");
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph; nodes are named by their quoted entity IRI.
pub fn write_dot<W: Write>(graph: &LinkGraph, roster: &Roster, mut sink: W) -> Result<(), ExportError> {
    check_len("roster", roster.len(), graph.node_count())?;
    let names: Vec<String> = roster.records().iter().map(|r| dot_quote(r.entity_iri.as_str())).collect();
    let mut out = String::from("digraph links {\n");
    for name in &names {
        let _ = writeln!(out, "  {name};");
    }
    for (s, t) in graph.edges() {
        let _ = writeln!(out, "  {} -> {};", names[s as usize], names[t as usize]);
    }
    out.push_str("}\n");
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

pub const HISTOGRAM_CSV_HEADER: [&str; 4] = ["bin_start", "bin_end", "count", "share"];

fn write_rows<W: Write>(rows: impl Iterator<Item = (f64, f64, u64)>, total: u64, sink: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => ExportError::Io(io),
        other => ExportError::Io(io::Error::other(format!("{other:?}"))),
    };
    w.write_record(HISTOGRAM_CSV_HEADER).map_err(csv_err)?;
    for (start, end, count) in rows {
        let share = if total == 0 { String::new() } else { fmt_num(count as f64 / total as f64) };
        w.write_record([fmt_num(start), fmt_num(end), count.to_string(), share]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `bin_start,bin_end,count,share`, one row per bin.
pub fn write_csv_histogram<W: Write>(hist: &Histogram, sink: W) -> Result<(), ExportError> {
    write_rows(hist.bins.iter().map(|b| (b.start, b.end, b.count)), hist.total, sink)
}

/// Degree histogram as CSV; the zero bucket is the first row, `[0, 1)`.
pub fn write_csv_degree_histogram<W: Write>(hist: &DegreeHistogram, sink: W) -> Result<(), ExportError> {
    let zero = std::iter::once((0.0, 1.0, hist.zero_count));
    write_rows(zero.chain(hist.bins.iter().map(|b| (b.start, b.end, b.count))), hist.total, sink)
}

/// Static SVG: edges as faint grey lines beneath nodes as filled circles.
pub fn write_svg<W: Write>(
    graph: &LinkGraph,
    layout: &Layout,
    styles: &[NodeStyle],
    mut sink: W,
) -> Result<(), ExportError> {
    let n = graph.node_count();
    check_len("layout", layout.positions.len(), n)?;
    check_len("styles", styles.len(), n)?;
    let (w, h) = (fmt_num(layout.params.frame_width), fmt_num(layout.params.frame_height));
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");
    out.push_str("<g id=\"edges\" stroke=\"#808080\" stroke-opacity=\"0.15\" stroke-width=\"1\">\n");
    for (s, t) in graph.edges() {
        let [x1, y1] = layout.positions[s as usize];
        let [x2, y2] = layout.positions[t as usize];
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            fmt_num(x1),
            fmt_num(y1),
            fmt_num(x2),
            fmt_num(y2)
        );
    }
    out.push_str("</g>\n<g id=\"nodes\">\n");
    for (v, st) in styles.iter().enumerate() {
        let [x, y] = layout.positions[v];
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            fmt_num(x),
            fmt_num(y),
            fmt_num(st.radius),
            st.color.hex()
        );
    }
    out.push_str("</g>\n</svg>\n");
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{LayoutParams, Rgb};
    use crate::roster::load_roster_csv;
    use crate::temporal::SpanBin;

    fn roster(names: &[&str]) -> Roster {
        let mut src = String::from("entity_iri,ulan_id,viaf_id,birth_year,death_year,nationality,role\n");
        for (i, n) in names.iter().enumerate() {
            src.push_str(&format!("http://ex/{n},{i},,,,,\n"));
        }
        load_roster_csv(src.as_bytes()).unwrap()
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(37.5), "37.5");
        assert_eq!(fmt_num(0.75), "0.75");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666667");
        assert_eq!(fmt_num(1234.5678), "1234.57");
        assert_eq!(fmt_num(-0.0), "0");
    }

    #[test]
    fn dot_edge_line() {
        let (g, _) = LinkGraph::build(2, &[(0, 1)]).unwrap();
        let mut buf = Vec::new();
        write_dot(&g, &roster(&["A", "B"]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("  \"http://ex/A\" -> \"http://ex/B\";\n"), "{text}");
    }

    #[test]
    fn csv_row_format() {
        let hist = Histogram {
            bin_width: 37.5,
            bins: vec![SpanBin { start: 0.0, end: 37.5, count: 3 }, SpanBin { start: 37.5, end: 75.0, count: 1 }],
            total: 4,
        };
        let mut buf = Vec::new();
        write_csv_histogram(&hist, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "bin_start,bin_end,count,share\n0,37.5,3,0.75\n37.5,75,1,0.25\n");
    }

    #[test]
    fn svg_single_node() {
        let (g, _) = LinkGraph::build(1, &[]).unwrap();
        let layout = Layout { positions: vec![[5.0, 5.0]], params: LayoutParams::default() };
        let styles = vec![NodeStyle { radius: 2.0, color: Rgb(1, 2, 3) }];
        let mut buf = Vec::new();
        write_svg(&g, &layout, &styles, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("<circle").count(), 1);
        assert_eq!(text.matches("<line").count(), 0);
        assert!(text.contains("viewBox=\"0 0 10000 10000\""));
        assert!(text.contains("fill=\"#010203\""));
    }

    #[test]
    fn inconsistent_inputs_rejected() {
        let (g, _) = LinkGraph::build(2, &[]).unwrap();
        let err = write_gexf(&g, &roster(&["A"]), None, None, Vec::new()).unwrap_err();
        assert!(matches!(err, ExportError::Inconsistent { what: "roster", .. }));
    }

    #[test]
    fn xml_escaping() {
        assert_eq!(xml_escape("a&b<\"c\">"), "a&amp;b&lt;&quot;c&quot;&gt;");
    }
}
