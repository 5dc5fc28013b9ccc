//! The authority roster: in-domain entities and their biographical attributes.
//!
//! A roster is either loaded from a prepared CSV or joined from mapping and
//! attribute triples. Record order is always sorted by entity IRI, and node
//! ids handed to the graph are indices into that order.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Iri, NodeId, Term, Triple};

pub const ROSTER_HEADER: [&str; 7] =
    ["entity_iri", "ulan_id", "viaf_id", "birth_year", "death_year", "nationality", "role"];
pub const REFERENCE_EDGE_HEADER: [&str; 3] = ["from_ulan_id", "to_ulan_id", "rel_type"];

#[derive(Debug, Error)]
pub enum RosterError {
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: duplicate entity_iri {value}")]
    DuplicateIri { row: u64, value: String },
    #[error("row {row}: duplicate ulan_id {value}")]
    DuplicateUlan { row: u64, value: String },
    #[error("row {row}: {field} is not an integer: {value:?}")]
    BadYear { row: u64, field: &'static str, value: String },
    #[error("row {row}: invalid entity_iri {value:?}")]
    BadIri { row: u64, value: String },
    #[error("row {row}: empty ulan_id")]
    EmptyUlan { row: u64 },
    #[error("row {row}: birth_year {birth} is after death_year {death}")]
    YearOrder { row: u64, birth: i32, death: i32 },
    #[error("row {row}: expected 7 fields, found {found}")]
    FieldCount { row: u64, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub entity_iri: Iri,
    pub ulan_id: String,
    pub viaf_id: Option<String>,
    pub birth_year: Option<i32>,
    pub death_year: Option<i32>,
    pub nationality: Option<String>,
    pub role: Option<String>,
}

/// Immutable set of rostered entities with lookups by IRI and ULAN id.
#[derive(Debug, Clone, Default)]
pub struct Roster {
    records: Vec<EntityRecord>,
    by_iri: HashMap<Iri, NodeId>,
    by_ulan: HashMap<String, NodeId>,
}

impl Roster {
    /// Validates uniqueness and year order; records are re-sorted by IRI.
    pub fn from_records(mut records: Vec<EntityRecord>) -> Result<Self, RosterError> {
        records.sort_by(|a, b| a.entity_iri.cmp(&b.entity_iri));
        let mut by_iri = HashMap::with_capacity(records.len());
        let mut by_ulan = HashMap::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            let row = i as u64 + 1;
            if rec.ulan_id.is_empty() {
                return Err(RosterError::EmptyUlan { row });
            }
            if let (Some(b), Some(d)) = (rec.birth_year, rec.death_year) {
                if b > d {
                    return Err(RosterError::YearOrder { row, birth: b, death: d });
                }
            }
            if by_iri.insert(rec.entity_iri.clone(), i as NodeId).is_some() {
                return Err(RosterError::DuplicateIri { row, value: rec.entity_iri.to_string() });
            }
            if by_ulan.insert(rec.ulan_id.clone(), i as NodeId).is_some() {
                return Err(RosterError::DuplicateUlan { row, value: rec.ulan_id.clone() });
            }
        }
        Ok(Roster { records, by_iri, by_ulan })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[EntityRecord] {
        &self.records
    }

    pub fn get(&self, id: NodeId) -> Option<&EntityRecord> {
        self.records.get(id as usize)
    }

    pub fn id_of_iri(&self, iri: &Iri) -> Option<NodeId> {
        self.by_iri.get(iri).copied()
    }

    pub fn id_of_ulan(&self, ulan_id: &str) -> Option<NodeId> {
        self.by_ulan.get(ulan_id).copied()
    }

    /// IRI → node id lookup, as consumed by [`crate::ingest::extract_edges`].
    pub fn iri_index(&self) -> &HashMap<Iri, NodeId> {
        &self.by_iri
    }

    pub fn birth_years(&self) -> Vec<Option<i32>> {
        self.records.iter().map(|r| r.birth_year).collect()
    }
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<(), RosterError> {
    let trimmed: Vec<&str> = found.iter().map(|f| f.trim_start_matches('\u{feff}')).collect();
    if trimmed != expected {
        return Err(RosterError::Header { expected: expected.join(","), found: trimmed.join(",") });
    }
    Ok(())
}

fn opt_cell(cell: &str) -> Option<String> {
    if cell.is_empty() {
        None
    } else {
        Some(cell.to_string())
    }
}

fn strict_year(cell: &str, row: u64, field: &'static str) -> Result<Option<i32>, RosterError> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.trim().parse::<i32>().map(Some).map_err(|_| RosterError::BadYear { row, field, value: cell.to_string() })
}

/// Load a roster CSV with the exact header
/// `entity_iri,ulan_id,viaf_id,birth_year,death_year,nationality,role`.
///
/// Row numbers in errors count the header as row 1.
pub fn load_roster_csv<R: Read>(input: R) -> Result<Roster, RosterError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    check_header(rdr.headers()?, &ROSTER_HEADER)?;

    let mut records = Vec::new();
    let mut seen_iri: HashMap<String, u64> = HashMap::new();
    let mut seen_ulan: HashMap<String, u64> = HashMap::new();
    for result in rdr.records() {
        let rec = result?;
        let row = rec.position().map_or(0, |p| p.line());
        if rec.len() != ROSTER_HEADER.len() {
            return Err(RosterError::FieldCount { row, found: rec.len() });
        }
        let entity_iri = Iri::new(&rec[0]).map_err(|_| RosterError::BadIri { row, value: rec[0].to_string() })?;
        let ulan_id = rec[1].to_string();
        if ulan_id.is_empty() {
            return Err(RosterError::EmptyUlan { row });
        }
        if seen_iri.insert(rec[0].to_string(), row).is_some() {
            return Err(RosterError::DuplicateIri { row, value: rec[0].to_string() });
        }
        if seen_ulan.insert(ulan_id.clone(), row).is_some() {
            return Err(RosterError::DuplicateUlan { row, value: ulan_id });
        }
        let birth_year = strict_year(&rec[3], row, "birth_year")?;
        let death_year = strict_year(&rec[4], row, "death_year")?;
        if let (Some(b), Some(d)) = (birth_year, death_year) {
            if b > d {
                return Err(RosterError::YearOrder { row, birth: b, death: d });
            }
        }
        records.push(EntityRecord {
            entity_iri,
            ulan_id,
            viaf_id: opt_cell(&rec[2]),
            birth_year,
            death_year,
            nationality: opt_cell(&rec[5]),
            role: opt_cell(&rec[6]),
        });
    }
    Roster::from_records(records)
}

/// Writes the roster in the same CSV layout [`load_roster_csv`] reads.
pub fn write_roster_csv<W: std::io::Write>(roster: &Roster, sink: W) -> Result<(), RosterError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(ROSTER_HEADER)?;
    for r in roster.records() {
        let year = |y: Option<i32>| y.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            r.entity_iri.as_str(),
            &r.ulan_id,
            r.viaf_id.as_deref().unwrap_or(""),
            &year(r.birth_year),
            &year(r.death_year),
            r.nationality.as_deref().unwrap_or(""),
            r.role.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Leading signed integer of a date-like lexical form.
///
/// `1452-04-15` and `1452` both give 1452; `-0500` gives -500. A non-numeric
/// prefix such as `ca. ` is skipped. Returns `None` when no digits follow.
pub fn leading_year(lexical: &str) -> Option<i32> {
    let s = lexical.trim();
    let start = s.find(|c: char| c.is_ascii_digit() || c == '-' || c == '+')?;
    let s = &s[start..];
    let (negative, digits) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let end = digits.find(|c: char| !c.is_ascii_digit()).unwrap_or(digits.len());
    if end == 0 {
        return None;
    }
    let value: i64 = digits[..end].parse().ok()?;
    let value = if negative { -value } else { value };
    i32::try_from(value).ok()
}

/// Per-field predicate IRIs used to join mapping and attribute triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateMap {
    pub same_as: Iri,
    pub ulan_id: Iri,
    pub viaf_id: Option<Iri>,
    pub birth: Option<Iri>,
    pub death: Option<Iri>,
    pub nationality: Option<Iri>,
    pub role: Option<Iri>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinTally {
    pub subjects_seen: u64,
    pub records_built: u64,
    pub missing_entity: u64,
    pub missing_ulan: u64,
    pub multivalued: u64,
    pub unparsable_year: u64,
    pub wrong_term_kind: u64,
    pub inconsistent_years: u64,
    pub duplicate_entity: u64,
    pub duplicate_ulan: u64,
}

#[derive(Default)]
struct SubjectFacts {
    entity: Vec<String>,
    ulan: Vec<String>,
    viaf: Vec<String>,
    birth: Vec<String>,
    death: Vec<String>,
    nationality: Vec<String>,
    role: Vec<String>,
}

#[derive(Clone, Copy)]
enum Field {
    Entity,
    Ulan,
    Viaf,
    Birth,
    Death,
    Nationality,
    Role,
}

impl SubjectFacts {
    fn slot(&mut self, field: Field) -> &mut Vec<String> {
        match field {
            Field::Entity => &mut self.entity,
            Field::Ulan => &mut self.ulan,
            Field::Viaf => &mut self.viaf,
            Field::Birth => &mut self.birth,
            Field::Death => &mut self.death,
            Field::Nationality => &mut self.nationality,
            Field::Role => &mut self.role,
        }
    }
}

fn subject_key(term: &Term) -> Option<String> {
    match term {
        Term::Iri(iri) => Some(format!("<{}>", iri)),
        Term::Blank(label) => Some(format!("_:{}", label)),
        Term::Literal(_) => None,
    }
}

fn pick_year(values: &mut Vec<String>, tally: &mut JoinTally) -> Option<i32> {
    values.retain(|v| {
        let ok = leading_year(v).is_some();
        if !ok {
            tally.unparsable_year += 1;
        }
        ok
    });
    pick(values, tally).and_then(|v| leading_year(&v))
}

/// Smallest value wins; a second distinct value counts as multivalued.
fn pick(values: &mut Vec<String>, tally: &mut JoinTally) -> Option<String> {
    values.sort();
    values.dedup();
    if values.len() > 1 {
        tally.multivalued += 1;
    }
    values.first().cloned()
}

/// Join mapping and attribute triples into a roster.
///
/// Triples are grouped by subject. A subject with a same-as IRI object and a
/// ULAN id literal becomes a record; everything else is tallied. The result
/// does not depend on input order.
pub fn build_roster<'a, M, A>(mapping: M, attributes: A, config: &PredicateMap) -> (Roster, JoinTally)
where
    M: IntoIterator<Item = &'a Triple>,
    A: IntoIterator<Item = &'a Triple>,
{
    let mut fields: Vec<(&Iri, Field)> = vec![(&config.same_as, Field::Entity), (&config.ulan_id, Field::Ulan)];
    for (pred, field) in [
        (&config.viaf_id, Field::Viaf),
        (&config.birth, Field::Birth),
        (&config.death, Field::Death),
        (&config.nationality, Field::Nationality),
        (&config.role, Field::Role),
    ] {
        if let Some(p) = pred {
            fields.push((p, field));
        }
    }

    let mut tally = JoinTally::default();
    let mut subjects: BTreeMap<String, SubjectFacts> = BTreeMap::new();
    for triple in mapping.into_iter().chain(attributes) {
        let Some(key) = subject_key(&triple.subject) else { continue };
        for &(pred, field) in &fields {
            if triple.predicate != *pred {
                continue;
            }
            let value = match (field, &triple.object) {
                (Field::Entity, Term::Iri(iri)) => iri.as_str().to_string(),
                (Field::Entity, _) => {
                    tally.wrong_term_kind += 1;
                    continue;
                }
                (_, Term::Literal(lit)) => lit.lexical().to_string(),
                _ => {
                    tally.wrong_term_kind += 1;
                    continue;
                }
            };
            subjects.entry(key.clone()).or_default().slot(field).push(value);
        }
    }

    tally.subjects_seen = subjects.len() as u64;
    let mut candidates = Vec::new();
    for (_, mut facts) in subjects {
        let entity = pick(&mut facts.entity, &mut tally);
        let ulan = pick(&mut facts.ulan, &mut tally);
        let (entity, ulan) = match (entity, ulan) {
            (None, _) => {
                tally.missing_entity += 1;
                continue;
            }
            (Some(_), None) => {
                tally.missing_ulan += 1;
                continue;
            }
            (Some(e), Some(u)) if !u.is_empty() => (e, u),
            (Some(_), Some(_)) => {
                tally.missing_ulan += 1;
                continue;
            }
        };
        let birth_year = pick_year(&mut facts.birth, &mut tally);
        let mut death_year = pick_year(&mut facts.death, &mut tally);
        if let (Some(b), Some(d)) = (birth_year, death_year) {
            if b > d {
                tally.inconsistent_years += 1;
                death_year = None;
            }
        }
        candidates.push(EntityRecord {
            entity_iri: Iri::new(entity).expect("parsed IRIs are valid"),
            ulan_id: ulan,
            viaf_id: pick(&mut facts.viaf, &mut tally),
            birth_year,
            death_year,
            nationality: pick(&mut facts.nationality, &mut tally),
            role: pick(&mut facts.role, &mut tally),
        });
    }

    // Two authority records may map to one entity (or share a ULAN id); the
    // smallest (entity_iri, ulan_id) pair is kept.
    candidates.sort_by(|a, b| (&a.entity_iri, &a.ulan_id).cmp(&(&b.entity_iri, &b.ulan_id)));
    let mut records: Vec<EntityRecord> = Vec::with_capacity(candidates.len());
    let mut ulans: HashMap<String, ()> = HashMap::new();
    for rec in candidates {
        if records.last().is_some_and(|last| last.entity_iri == rec.entity_iri) {
            tally.duplicate_entity += 1;
            continue;
        }
        if ulans.insert(rec.ulan_id.clone(), ()).is_some() {
            tally.duplicate_ulan += 1;
            continue;
        }
        records.push(rec);
    }
    tally.records_built = records.len() as u64;
    let roster = Roster::from_records(records).expect("join output satisfies roster invariants");
    (roster, tally)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceEdgeTally {
    pub rows: u64,
    pub resolved: u64,
    pub skipped: u64,
}

/// Load associative reference links keyed by ULAN id, resolved to node ids.
pub fn load_reference_edges_csv<R: Read>(
    input: R,
    roster: &Roster,
) -> Result<(Vec<(NodeId, NodeId)>, ReferenceEdgeTally), RosterError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    check_header(rdr.headers()?, &REFERENCE_EDGE_HEADER)?;
    let mut edges = Vec::new();
    let mut tally = ReferenceEdgeTally::default();
    for result in rdr.records() {
        let rec = result?;
        tally.rows += 1;
        let from = rec.get(0).and_then(|u| roster.id_of_ulan(u));
        let to = rec.get(1).and_then(|u| roster.id_of_ulan(u));
        match (from, to) {
            (Some(f), Some(t)) => {
                edges.push((f, t));
                tally.resolved += 1;
            }
            _ => tally.skipped += 1,
        }
    }
    Ok((edges, tally))
}
