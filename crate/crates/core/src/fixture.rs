//! Seeded synthetic datasets in the on-disk input formats.
//!
//! Entities get birth years spread over several centuries and a skewed
//! nationality mix; links favour near-contemporaries and high-weight
//! targets, so the output has a heavy-tailed degree distribution, a giant
//! component and a clear temporal signal. A little noise (comments,
//! malformed lines, duplicates, self-loops, off-roster endpoints) is mixed
//! into the link dump to exercise the tallies.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{Iri, DEFAULT_LINK_PREDICATE};
use crate::roster::{write_roster_csv, EntityRecord, Roster};

const NATIONALITIES: [(&str, u32); 12] = [
    ("Italian", 22),
    ("French", 18),
    ("American", 16),
    ("British", 12),
    ("Dutch", 9),
    ("German", 8),
    ("Spanish", 5),
    ("Flemish", 4),
    ("Russian", 2),
    ("Austrian", 2),
    ("Swiss", 1),
    ("Belgian", 1),
];
const ROLES: [&str; 6] = ["painter", "sculptor", "architect", "printmaker", "patron", "draftsman"];

pub const ENTITY_PREFIX: &str = "http://dbpedia.org/resource/Person_";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub entities: usize,
    pub links: usize,
    pub reference_links: usize,
    pub seed: u64,
    /// Extra non-link noise lines in the dump.
    pub noise: bool,
}

impl SyntheticSpec {
    /// The bundled 500-entity fixture.
    pub fn bundled() -> Self {
        SyntheticSpec { entities: 500, links: 2_000, reference_links: 350, seed: 2012, noise: true }
    }
}

pub struct SyntheticDataset {
    pub roster: Roster,
    pub links: Vec<(usize, usize)>,
    pub reference_links: Vec<(usize, usize)>,
    pub noise_lines: Vec<String>,
}

fn entity_iri(i: usize) -> String {
    format!("{ENTITY_PREFIX}{i:06}")
}

fn pick_weighted(cumulative: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cumulative.last().expect("non-empty weights");
    let u: f64 = rng.random::<f64>() * total;
    cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
}

impl SyntheticDataset {
    pub fn generate(spec: &SyntheticSpec) -> SyntheticDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let n = spec.entities;
        let nat_total: u32 = NATIONALITIES.iter().map(|&(_, w)| w).sum();

        let mut records = Vec::with_capacity(n);
        for i in 0..n {
            let birth = if rng.random::<f64>() < 0.92 { Some(rng.random_range(1400..1960)) } else { None };
            let death = birth.and_then(|b: i32| (rng.random::<f64>() < 0.8).then(|| b + rng.random_range(25..95)));
            let nationality = if rng.random::<f64>() < 0.95 {
                let mut r = rng.random_range(0..nat_total);
                let mut pick = NATIONALITIES[0].0;
                for &(name, w) in &NATIONALITIES {
                    if r < w {
                        pick = name;
                        break;
                    }
                    r -= w;
                }
                Some(pick.to_string())
            } else {
                None
            };
            records.push(EntityRecord {
                entity_iri: Iri::new(entity_iri(i)).expect("generated IRI"),
                ulan_id: format!("{}", 500_000_000 + i),
                viaf_id: (rng.random::<f64>() < 0.7).then(|| format!("{}", 10_000_000 + i * 7)),
                birth_year: birth,
                death_year: death,
                nationality,
                role: Some(ROLES[rng.random_range(0..ROLES.len())].to_string()),
            });
        }
        let roster = Roster::from_records(records).expect("generated roster is valid");

        // Node order in the roster is by IRI, which matches generation order.
        let births: Vec<Option<i32>> = roster.birth_years();
        let mut weights = Vec::with_capacity(n);
        let mut acc = 0.0;
        for _ in 0..n {
            let u: f64 = rng.random();
            acc += (1.0 - u).powf(-1.0 / 1.3);
            weights.push(acc);
        }
        let mut by_birth: Vec<usize> = (0..n).collect();
        by_birth.sort_by_key(|&i| (births[i].unwrap_or(i32::MAX), i));
        let mut rank = vec![0usize; n];
        for (r, &v) in by_birth.iter().enumerate() {
            rank[v] = r;
        }

        let draw_links = |count: usize, locality: f64, rng: &mut ChaCha8Rng| -> Vec<(usize, usize)> {
            let mut out = Vec::with_capacity(count);
            if n < 2 {
                return out;
            }
            while out.len() < count {
                let s = rng.random_range(0..n);
                let t = if rng.random::<f64>() < locality {
                    // a neighbour in birth order, mostly earlier-born
                    let pos = rank[s] as i64;
                    let offset = rng.random_range(1..=(n as i64 / 25).max(2));
                    let offset = if rng.random::<f64>() < 0.62 { -offset } else { offset };
                    by_birth[(pos + offset).clamp(0, n as i64 - 1) as usize]
                } else {
                    pick_weighted(&weights, rng)
                };
                if s != t {
                    out.push((s, t));
                }
            }
            out
        };
        let mut links = draw_links(spec.links, 0.7, &mut rng);
        // a share of mirrored links
        let mirrors: Vec<(usize, usize)> =
            links.iter().filter(|_| rng.random::<f64>() < 0.15).map(|&(s, t)| (t, s)).collect();
        let keep = spec.links.saturating_sub(mirrors.len());
        links.truncate(keep);
        links.extend(mirrors);
        let mut reference_links = draw_links(spec.reference_links / 2, 0.95, &mut rng);
        let reverse: Vec<_> = reference_links.iter().map(|&(s, t)| (t, s)).collect();
        reference_links.extend(reverse);

        let mut noise_lines = Vec::new();
        if spec.noise {
            noise_lines.push("# synthetic link dump".to_string());
            noise_lines.push(String::new());
            noise_lines.push(format!(
                "<{}> <{DEFAULT_LINK_PREDICATE}> <http://dbpedia.org/resource/Elsewhere> .",
                entity_iri(0)
            ));
            noise_lines
                .push(format!("<{}> <http://www.w3.org/2000/01/rdf-schema#label> \"Person 1\"@en .", entity_iri(1)));
            noise_lines.push(format!("<{}> <{DEFAULT_LINK_PREDICATE}> <{}>", entity_iri(2), entity_iri(3)));
            if n > 0 {
                noise_lines.push(format!("<{}> <{DEFAULT_LINK_PREDICATE}> <{}> .", entity_iri(0), entity_iri(0)));
            }
            if let Some(&(s, t)) = links.first() {
                noise_lines.push(format!("<{}> <{DEFAULT_LINK_PREDICATE}> <{}> .", entity_iri(s), entity_iri(t)));
            }
        }
        SyntheticDataset { roster, links, reference_links, noise_lines }
    }

    pub fn links_ntriples(&self) -> String {
        let mut out = String::with_capacity(self.links.len() * 120);
        for line in &self.noise_lines {
            out.push_str(line);
            out.push('\n');
        }
        for &(s, t) in &self.links {
            let _ = writeln!(out, "<{}> <{DEFAULT_LINK_PREDICATE}> <{}> .", entity_iri(s), entity_iri(t));
        }
        out
    }

    pub fn roster_csv(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        write_roster_csv(&self.roster, &mut buf).expect("in-memory write");
        buf
    }

    pub fn reference_csv(&self) -> String {
        let mut out = String::from("from_ulan_id,to_ulan_id,rel_type\n");
        for &(s, t) in &self.reference_links {
            let rel = if s < t { "teacher_of" } else { "student_of" };
            let _ = writeln!(out, "{},{},{rel}", self.roster.records()[s].ulan_id, self.roster.records()[t].ulan_id);
        }
        out
    }

    /// Writes `roster.csv`, `links.nt` and `ulan_edges.csv` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("roster.csv"), self.roster_csv())?;
        std::fs::write(dir.join("links.nt"), self.links_ntriples())?;
        std::fs::write(dir.join("ulan_edges.csv"), self.reference_csv())?;
        Ok(())
    }
}
