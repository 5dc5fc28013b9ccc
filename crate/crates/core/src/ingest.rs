//! Streaming N-Triples ingestion.
//!
//! Accepts the line-oriented subset
//! `<iri> <iri> (<iri> | _:label | "literal"(@lang | ^^<iri>)?) .`
//! with the usual string escapes. Comment and blank lines are skipped and
//! malformed lines are counted, so a single stray line never aborts a dump.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default predicate carrying inter-article links in DBpedia dumps.
pub const DEFAULT_LINK_PREDICATE: &str = "http://dbpedia.org/ontology/wikiPageWikiLink";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O failure while reading dump: {0}")]
    Io(#[from] io::Error),
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
}

/// An absolute IRI, compared by exact string equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, IngestError> {
        let value = value.into();
        if is_valid_iri(&value) {
            Ok(Iri(value))
        } else {
            Err(IngestError::InvalidIri(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for Iri {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Iri::new(s)
    }
}

impl Serialize for Iri {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Iri {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Iri::new(raw).map_err(serde::de::Error::custom)
    }
}

/// Non-empty, no whitespace or angle brackets, and a URI scheme prefix.
fn is_valid_iri(value: &str) -> bool {
    if value.is_empty() || value.chars().any(|c| c.is_whitespace() || c == '<' || c == '>') {
        return false;
    }
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    lexical: String,
    annotation: LiteralAnnotation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum LiteralAnnotation {
    Plain,
    Lang(String),
    Typed(Iri),
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), annotation: LiteralAnnotation::Plain }
    }

    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), annotation: LiteralAnnotation::Lang(tag.into()) }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal { lexical: lexical.into(), annotation: LiteralAnnotation::Typed(datatype) }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn lang_tag(&self) -> Option<&str> {
        match &self.annotation {
            LiteralAnnotation::Lang(tag) => Some(tag),
            _ => None,
        }
    }

    pub fn datatype(&self) -> Option<&Iri> {
        match &self.annotation {
            LiteralAnnotation::Typed(dt) => Some(dt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(String),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }
}

/// One statement. Subjects are never literals; the parser enforces it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{}>", iri),
            Term::Blank(label) => write!(f, "_:{}", label),
            Term::Literal(lit) => {
                f.write_str("\"")?;
                for c in lit.lexical.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        c if (c as u32) < 0x20 || c == '\u{7f}' => write!(f, "\\u{:04X}", c as u32)?,
                        c => write!(f, "{}", c)?,
                    }
                }
                f.write_str("\"")?;
                match &lit.annotation {
                    LiteralAnnotation::Plain => Ok(()),
                    LiteralAnnotation::Lang(tag) => write!(f, "@{}", tag),
                    LiteralAnnotation::Typed(dt) => write!(f, "^^<{}>", dt),
                }
            }
        }
    }
}

/// Serializes as a single N-Triples statement without the trailing newline.
impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseTally {
    pub lines_total: u64,
    pub triples_ok: u64,
    pub lines_skipped_comment_or_blank: u64,
    pub lines_malformed: u64,
}

impl ParseTally {
    pub fn merge(&mut self, other: &ParseTally) {
        self.lines_total += other.lines_total;
        self.triples_ok += other.triples_ok;
        self.lines_skipped_comment_or_blank += other.lines_skipped_comment_or_blank;
        self.lines_malformed += other.lines_malformed;
    }
}

/// Outcome of classifying a single line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineKind {
    Triple(Triple),
    Skipped,
    Malformed,
}

/// Classify one line (without its terminator).
pub fn parse_line(line: &str) -> LineKind {
    let trimmed = line.trim_matches(|c| c == ' ' || c == '\t' || c == '\r');
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return LineKind::Skipped;
    }
    match LineParser::new(trimmed).statement() {
        Some(t) => LineKind::Triple(t),
        None => LineKind::Malformed,
    }
}

struct LineParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn new(src: &'a str) -> Self {
        LineParser { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// Consumes at least one space or tab.
    fn whitespace(&mut self) -> bool {
        let start = self.pos;
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn statement(&mut self) -> Option<Triple> {
        let subject = match self.peek()? {
            '<' => Term::Iri(self.iri()?),
            '_' => Term::Blank(self.blank()?),
            _ => return None,
        };
        self.whitespace();
        let predicate = self.iri()?;
        self.whitespace();
        let object = match self.peek()? {
            '<' => Term::Iri(self.iri()?),
            '_' => Term::Blank(self.blank()?),
            '"' => Term::Literal(self.literal()?),
            _ => return None,
        };
        self.whitespace();
        if !self.eat('.') {
            return None;
        }
        self.whitespace();
        match self.peek() {
            None => {}
            Some('#') => {}
            Some(_) => return None,
        }
        Some(Triple { subject, predicate, object })
    }

    fn iri(&mut self) -> Option<Iri> {
        if !self.eat('<') {
            return None;
        }
        let mut value = String::new();
        loop {
            match self.bump()? {
                '>' => break,
                '\\' => {
                    let c = match self.bump()? {
                        'u' => self.hex_escape(4)?,
                        'U' => self.hex_escape(8)?,
                        _ => return None,
                    };
                    value.push(c);
                }
                '"' | '{' | '}' | '|' | '^' | '`' | '<' => return None,
                c if c.is_whitespace() || (c as u32) < 0x20 => return None,
                c => value.push(c),
            }
        }
        Iri::new(value).ok()
    }

    fn blank(&mut self) -> Option<String> {
        if !(self.eat('_') && self.eat(':')) {
            return None;
        }
        let rest = self.rest();
        let mut end = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.')))
            .map_or(rest.len(), |(i, _)| i);
        // a trailing '.' belongs to the statement terminator
        while end > 0 && rest[..end].ends_with('.') {
            end -= 1;
        }
        if end == 0 {
            return None;
        }
        let label = rest[..end].to_string();
        if label.starts_with(['-', '.']) {
            return None;
        }
        self.pos += end;
        Some(label)
    }

    fn literal(&mut self) -> Option<Literal> {
        if !self.eat('"') {
            return None;
        }
        let mut lexical = String::new();
        loop {
            match self.bump()? {
                '"' => break,
                '\\' => {
                    let c = match self.bump()? {
                        't' => '\t',
                        'b' => '\u{8}',
                        'n' => '\n',
                        'r' => '\r',
                        'f' => '\u{c}',
                        '"' => '"',
                        '\'' => '\'',
                        '\\' => '\\',
                        'u' => self.hex_escape(4)?,
                        'U' => self.hex_escape(8)?,
                        _ => return None,
                    };
                    lexical.push(c);
                }
                c => lexical.push(c),
            }
        }
        if self.eat('@') {
            let rest = self.rest();
            let end = rest
                .char_indices()
                .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '-'))
                .map_or(rest.len(), |(i, _)| i);
            let tag = &rest[..end];
            if !is_valid_lang_tag(tag) {
                return None;
            }
            self.pos += end;
            Some(Literal::lang(lexical, tag))
        } else if self.rest().starts_with("^^") {
            self.pos += 2;
            let dt = self.iri()?;
            Some(Literal::typed(lexical, dt))
        } else {
            Some(Literal::plain(lexical))
        }
    }

    fn hex_escape(&mut self, digits: usize) -> Option<char> {
        let rest = self.rest();
        let hex = rest.get(..digits)?;
        if !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return None;
        }
        self.pos += digits;
        char::from_u32(u32::from_str_radix(hex, 16).ok()?)
    }
}

fn is_valid_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first = parts.next().unwrap_or("");
    !first.is_empty()
        && first.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// Streaming reader over an N-Triples byte stream.
///
/// Yields `Ok(Triple)` per well-formed line and `Err` only on I/O failure,
/// after which iteration stops. Memory use is bounded by the longest line.
pub struct NTriplesReader<R> {
    input: R,
    buf: Vec<u8>,
    tally: ParseTally,
    failed: bool,
}

impl<R: BufRead> NTriplesReader<R> {
    pub fn new(input: R) -> Self {
        NTriplesReader { input, buf: Vec::with_capacity(256), tally: ParseTally::default(), failed: false }
    }

    pub fn tally(&self) -> &ParseTally {
        &self.tally
    }
}

impl<R: BufRead> Iterator for NTriplesReader<R> {
    type Item = Result<Triple, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.input.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(IngestError::Io(e)));
                }
            }
            self.tally.lines_total += 1;
            let raw = self.buf.strip_suffix(b"\n").unwrap_or(&self.buf);
            let kind = match std::str::from_utf8(raw) {
                Ok(line) => parse_line(line),
                Err(_) => LineKind::Malformed,
            };
            match kind {
                LineKind::Triple(t) => {
                    self.tally.triples_ok += 1;
                    return Some(Ok(t));
                }
                LineKind::Skipped => self.tally.lines_skipped_comment_or_blank += 1,
                LineKind::Malformed => self.tally.lines_malformed += 1,
            }
        }
    }
}

/// Parse a whole stream into memory. Prefer [`NTriplesReader`] for large dumps.
pub fn parse_ntriples<R: BufRead>(input: R) -> Result<(Vec<Triple>, ParseTally), IngestError> {
    let mut reader = NTriplesReader::new(input);
    let triples = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
    Ok((triples, reader.tally))
}

pub type NodeId = u32;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractedEdges {
    pub edges: Vec<(NodeId, NodeId)>,
    pub off_roster: u64,
}

impl ExtractedEdges {
    pub fn append(&mut self, mut other: ExtractedEdges) {
        self.edges.append(&mut other.edges);
        self.off_roster += other.off_roster;
    }
}

/// Keep link triples whose endpoints both resolve in `index`.
///
/// Duplicates are preserved; blank nodes and literals never resolve.
pub fn extract_edges<I>(
    triples: I,
    link_predicate: &Iri,
    index: &HashMap<Iri, NodeId>,
) -> Result<ExtractedEdges, IngestError>
where
    I: IntoIterator<Item = Result<Triple, IngestError>>,
{
    let mut out = ExtractedEdges::default();
    for triple in triples {
        let triple = triple?;
        if triple.predicate != *link_predicate {
            continue;
        }
        let source = triple.subject.as_iri().and_then(|s| index.get(s));
        let target = triple.object.as_iri().and_then(|o| index.get(o));
        match (source, target) {
            (Some(&s), Some(&t)) => out.edges.push((s, t)),
            _ => out.off_roster += 1,
        }
    }
    Ok(out)
}
