//! Seeded Fruchterman-Reingold layout with Barnes-Hut repulsion, plus node
//! styling (radius from degree, colour from a categorical attribute).

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::LinkGraph;
use crate::roster::Roster;

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("frame dimensions must be positive and finite")]
    BadFrame,
    #[error("theta must be positive")]
    BadTheta,
    #[error("non-finite coordinate for node {node} at iteration {iteration}")]
    NonFinite { node: usize, iteration: usize },
    #[error("radius bounds must satisfy 0 < r_min < r_max")]
    BadRadii,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub iterations: usize,
    pub frame_width: f64,
    pub frame_height: f64,
    pub theta: f64,
    pub seed: u64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams { iterations: 500, frame_width: 10_000.0, frame_height: 10_000.0, theta: 1.2, seed: 0 }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<(), LayoutError> {
        if self.iterations == 0 {
            return Err(LayoutError::NoIterations);
        }
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.frame_width) || !ok(self.frame_height) {
            return Err(LayoutError::BadFrame);
        }
        if self.theta.is_nan() || self.theta <= 0.0 {
            return Err(LayoutError::BadTheta);
        }
        Ok(())
    }

    /// Ideal edge length `sqrt(area / n)`.
    pub fn ideal_distance(&self, n: usize) -> f64 {
        (self.frame_width * self.frame_height / n.max(1) as f64).sqrt()
    }

    /// Linear cooling from `width / 10` to `width / 5000`.
    pub fn temperature(&self, iteration: usize) -> f64 {
        let start = self.frame_width / 10.0;
        let end = self.frame_width / 5000.0;
        if self.iterations <= 1 {
            return start;
        }
        start + (end - start) * iteration as f64 / (self.iterations - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub positions: Vec<[f64; 2]>,
    pub params: LayoutParams,
}

const MAX_DEPTH: u32 = 48;
const MIN_DISTANCE: f64 = 1e-6;

struct Cell {
    x0: f64,
    y0: f64,
    size: f64,
    mass: f64,
    com: [f64; 2],
    children: Option<[u32; 4]>,
    /// Range into `QuadTree::order` covered by this cell.
    start: usize,
    end: usize,
}

/// Region quadtree over the current positions with per-cell centre of mass.
struct QuadTree {
    cells: Vec<Cell>,
    order: Vec<u32>,
}

impl QuadTree {
    fn build(positions: &[[f64; 2]], x0: f64, y0: f64, size: f64) -> QuadTree {
        let mut tree = QuadTree { cells: Vec::new(), order: (0..positions.len() as u32).collect() };
        if !positions.is_empty() {
            tree.split(positions, (x0, y0, size), 0..positions.len(), 0);
        }
        tree
    }

    fn split(&mut self, pos: &[[f64; 2]], square: (f64, f64, f64), range: std::ops::Range<usize>, depth: u32) -> u32 {
        let (x0, y0, size) = square;
        let (start, end) = (range.start, range.end);
        let id = self.cells.len() as u32;
        let mass = (end - start) as f64;
        let mut com = [0.0, 0.0];
        for &i in &self.order[start..end] {
            com[0] += pos[i as usize][0];
            com[1] += pos[i as usize][1];
        }
        com[0] /= mass;
        com[1] /= mass;
        self.cells.push(Cell { x0, y0, size, mass, com, children: None, start, end });
        if end - start <= 1 || depth >= MAX_DEPTH {
            return id;
        }
        let half = size / 2.0;
        let (mx, my) = (x0 + half, y0 + half);
        let quadrant = |p: [f64; 2]| (p[0] >= mx) as usize + 2 * (p[1] >= my) as usize;
        self.order[start..end].sort_by_key(|&i| quadrant(pos[i as usize]));
        let mut bounds = [start; 5];
        for q in 0..4 {
            bounds[q + 1] =
                bounds[q] + self.order[bounds[q]..end].iter().take_while(|&&i| quadrant(pos[i as usize]) == q).count();
        }
        let mut children = [0u32; 4];
        for q in 0..4 {
            let cx = if q & 1 == 1 { mx } else { x0 };
            let cy = if q & 2 == 2 { my } else { y0 };
            children[q] = if bounds[q] < bounds[q + 1] {
                self.split(pos, (cx, cy, half), bounds[q]..bounds[q + 1], depth + 1)
            } else {
                u32::MAX
            };
        }
        self.cells[id as usize].children = Some(children);
        id
    }

    fn contains(cell: &Cell, p: [f64; 2]) -> bool {
        p[0] >= cell.x0 && p[0] <= cell.x0 + cell.size && p[1] >= cell.y0 && p[1] <= cell.y0 + cell.size
    }

    /// Total repulsive force `k^2 / d` on node `v`.
    fn repulsion(&self, v: usize, pos: &[[f64; 2]], k2: f64, theta: f64) -> [f64; 2] {
        let p = pos[v];
        let mut force = [0.0, 0.0];
        if self.cells.is_empty() {
            return force;
        }
        let mut stack = vec![0u32];
        while let Some(c) = stack.pop() {
            let cell = &self.cells[c as usize];
            match cell.children {
                Some(children) => {
                    let dx = p[0] - cell.com[0];
                    let dy = p[1] - cell.com[1];
                    let d = (dx * dx + dy * dy).sqrt();
                    if !Self::contains(cell, p) && d > MIN_DISTANCE && cell.size / d < theta {
                        let f = cell.mass * k2 / (d * d);
                        force[0] += dx * f;
                        force[1] += dy * f;
                    } else {
                        // reversed so children are visited in quadrant order
                        stack.extend(children.iter().rev().filter(|&&ch| ch != u32::MAX));
                    }
                }
                None => {
                    for &u in &self.order[cell.start..cell.end] {
                        let u = u as usize;
                        if u == v {
                            continue;
                        }
                        let (dx, dy, d2) = separation(p, pos[u], v, u);
                        let f = k2 / d2;
                        force[0] += dx * f;
                        force[1] += dy * f;
                    }
                }
            }
        }
        force
    }
}

/// Offset from `q` to `p` with a deterministic nudge when they coincide.
fn separation(p: [f64; 2], q: [f64; 2], pi: usize, qi: usize) -> (f64, f64, f64) {
    let (mut dx, mut dy) = (p[0] - q[0], p[1] - q[1]);
    let mut d2 = dx * dx + dy * dy;
    if d2 < MIN_DISTANCE * MIN_DISTANCE {
        let angle = ((pi.min(qi) * 7919 + pi.max(qi)) % 360) as f64 * std::f64::consts::PI / 180.0;
        let sign = if pi < qi { 1.0 } else { -1.0 };
        dx = sign * MIN_DISTANCE * angle.cos();
        dy = sign * MIN_DISTANCE * angle.sin();
        d2 = MIN_DISTANCE * MIN_DISTANCE;
    }
    (dx, dy, d2)
}

fn initial_positions(n: usize, params: &LayoutParams) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    (0..n)
        .map(|_| {
            let x: f64 = rng.random();
            let y: f64 = rng.random();
            [x * params.frame_width, y * params.frame_height]
        })
        .collect()
}

/// Net force per node: Barnes-Hut repulsion plus `d^2 / k` edge attraction.
pub fn net_forces(graph: &LinkGraph, pos: &[[f64; 2]], k: f64, theta: f64, params: &LayoutParams) -> Vec<[f64; 2]> {
    let side = params.frame_width.max(params.frame_height);
    let tree = QuadTree::build(pos, 0.0, 0.0, side);
    let k2 = k * k;
    let mut forces: Vec<[f64; 2]> = (0..pos.len()).into_par_iter().map(|v| tree.repulsion(v, pos, k2, theta)).collect();
    for (s, t) in graph.edges() {
        let (s, t) = (s as usize, t as usize);
        let (dx, dy, d2) = separation(pos[s], pos[t], s, t);
        let f = d2.sqrt() / k;
        forces[s][0] -= dx * f;
        forces[s][1] -= dy * f;
        forces[t][0] += dx * f;
        forces[t][1] += dy * f;
    }
    forces
}

/// Displacement capped at `temperature`.
fn capped(force: [f64; 2], temperature: f64) -> [f64; 2] {
    let len = (force[0] * force[0] + force[1] * force[1]).sqrt();
    if len <= 0.0 {
        return [0.0, 0.0];
    }
    let scale = len.min(temperature) / len;
    [force[0] * scale, force[1] * scale]
}

/// Capped displacements of the first iteration from the seeded start, with
/// the given opening angle. Exposed for approximation checks.
pub fn first_step_displacements(graph: &LinkGraph, params: &LayoutParams, theta: f64) -> Vec<[f64; 2]> {
    let n = graph.node_count();
    let pos = initial_positions(n, params);
    let k = params.ideal_distance(n);
    let t = params.temperature(0);
    net_forces(graph, &pos, k, theta, params).into_iter().map(|f| capped(f, t)).collect()
}

pub fn fruchterman_reingold(graph: &LinkGraph, params: &LayoutParams) -> Result<Layout, LayoutError> {
    params.validate()?;
    let n = graph.node_count();
    let mut pos = initial_positions(n, params);
    let k = params.ideal_distance(n);
    for iteration in 0..params.iterations {
        let temperature = params.temperature(iteration);
        let forces = net_forces(graph, &pos, k, params.theta, params);
        for (v, (p, f)) in pos.iter_mut().zip(forces).enumerate() {
            let d = capped(f, temperature);
            let x = (p[0] + d[0]).clamp(0.0, params.frame_width);
            let y = (p[1] + d[1]).clamp(0.0, params.frame_height);
            if !x.is_finite() || !y.is_finite() {
                return Err(LayoutError::NonFinite { node: v, iteration });
            }
            *p = [x, y];
        }
    }
    Ok(Layout { positions: pos, params: *params })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

pub const NEUTRAL_GREY: Rgb = Rgb(128, 128, 128);

/// Twenty hues 18 degrees apart, visited in steps of 7 so neighbours in
/// rank order are far apart on the colour wheel.
pub const PALETTE: [Rgb; 20] = [
    Rgb(235, 52, 52),
    Rgb(40, 184, 55),
    Rgb(88, 52, 235),
    Rgb(184, 83, 40),
    Rgb(52, 235, 125),
    Rgb(112, 40, 184),
    Rgb(235, 161, 52),
    Rgb(40, 184, 141),
    Rgb(198, 52, 235),
    Rgb(184, 169, 40),
    Rgb(52, 235, 235),
    Rgb(184, 40, 169),
    Rgb(198, 235, 52),
    Rgb(40, 141, 184),
    Rgb(235, 52, 161),
    Rgb(112, 184, 40),
    Rgb(52, 125, 235),
    Rgb(184, 40, 83),
    Rgb(88, 235, 52),
    Rgb(40, 55, 184),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeStyle {
    pub radius: f64,
    pub color: Rgb,
}

pub const DEFAULT_R_MIN: f64 = 2.0;
pub const DEFAULT_R_MAX: f64 = 40.0;

/// `r_min + (r_max - r_min) * sqrt(degree / max_degree)`.
pub fn node_sizes(total_degrees: &[u32], r_min: f64, r_max: f64) -> Result<Vec<f64>, LayoutError> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(LayoutError::BadRadii);
    }
    let max = total_degrees.iter().copied().max().unwrap_or(0);
    Ok(total_degrees
        .iter()
        .map(|&d| if max == 0 { r_min } else { r_min + (r_max - r_min) * (d as f64 / max as f64).sqrt() })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorAttribute {
    Nationality,
    Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    /// `None` is the entry for nodes without a value.
    pub category: Option<String>,
    pub color: Rgb,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorAssignment {
    pub colors: Vec<Rgb>,
    pub legend: Vec<LegendEntry>,
}

/// Colour per node from a categorical attribute.
///
/// Categories are ranked by frequency (ties lexicographic); the first
/// `palette_size` (at most 20) take palette entries in rank order and the
/// rest, like missing values, are grey. The legend lists every category in
/// rank order followed by one entry for missing values.
pub fn assign_colors(values: &[Option<&str>], palette_size: usize) -> ColorAssignment {
    let palette_size = palette_size.min(PALETTE.len());
    let mut freq: HashMap<&str, u64> = HashMap::new();
    let mut missing = 0u64;
    for v in values {
        match v {
            Some(c) => *freq.entry(c).or_default() += 1,
            None => missing += 1,
        }
    }
    let mut ranked: Vec<(&str, u64)> = freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let color_of: HashMap<&str, Rgb> = ranked
        .iter()
        .enumerate()
        .map(|(i, &(c, _))| (c, if i < palette_size { PALETTE[i] } else { NEUTRAL_GREY }))
        .collect();
    let colors = values.iter().map(|v| v.map_or(NEUTRAL_GREY, |c| color_of[c])).collect();
    let mut legend: Vec<LegendEntry> = ranked
        .iter()
        .map(|&(c, count)| LegendEntry { category: Some(c.to_string()), color: color_of[c], count })
        .collect();
    legend.push(LegendEntry { category: None, color: NEUTRAL_GREY, count: missing });
    ColorAssignment { colors, legend }
}

/// [`assign_colors`] over a roster field.
pub fn assign_roster_colors(roster: &Roster, attribute: ColorAttribute, palette_size: usize) -> ColorAssignment {
    let values: Vec<Option<&str>> = roster
        .records()
        .iter()
        .map(|r| match attribute {
            ColorAttribute::Nationality => r.nationality.as_deref(),
            ColorAttribute::Role => r.role.as_deref(),
        })
        .collect();
    assign_colors(&values, palette_size)
}

/// Radius and colour per node.
pub fn node_styles(radii: &[f64], colors: &ColorAssignment) -> Vec<NodeStyle> {
    radii.iter().zip(&colors.colors).map(|(&radius, &color)| NodeStyle { radius, color }).collect()
}
