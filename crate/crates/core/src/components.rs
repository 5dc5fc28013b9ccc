//! Weakly and strongly connected components.

use serde::{Deserialize, Serialize};

use crate::graph::LinkGraph;
use crate::ingest::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Weak,
    Strong,
}

/// Component label per node. Labels are numbered by descending component
/// size, ties broken by the smallest member id, so label 0 is the giant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub kind: ComponentKind,
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl ComponentLabeling {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn giant_fraction(&self) -> f64 {
        let n = self.labels.len();
        if n == 0 {
            0.0
        } else {
            self.sizes[0] as f64 / n as f64
        }
    }

    /// Relabel from arbitrary raw ids into the canonical numbering.
    fn canonical(kind: ComponentKind, raw: &[u32], raw_count: usize) -> Self {
        let mut size = vec![0usize; raw_count];
        let mut min_member = vec![NodeId::MAX; raw_count];
        for (v, &c) in raw.iter().enumerate() {
            size[c as usize] += 1;
            min_member[c as usize] = min_member[c as usize].min(v as NodeId);
        }
        let mut order: Vec<usize> = (0..raw_count).collect();
        order.sort_unstable_by(|&a, &b| size[b].cmp(&size[a]).then(min_member[a].cmp(&min_member[b])));
        let mut rank = vec![0u32; raw_count];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new as u32;
        }
        ComponentLabeling {
            kind,
            labels: raw.iter().map(|&c| rank[c as usize]).collect(),
            sizes: order.iter().map(|&c| size[c]).collect(),
        }
    }
}

/// Disjoint sets with path halving and union by size.
struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

pub fn weakly_connected_components(graph: &LinkGraph) -> ComponentLabeling {
    let n = graph.node_count();
    let mut sets = DisjointSets::new(n);
    for (s, t) in graph.edges() {
        sets.union(s, t);
    }
    let mut root_label = vec![u32::MAX; n];
    let mut raw = vec![0u32; n];
    let mut next = 0u32;
    for v in 0..n as u32 {
        let r = sets.find(v) as usize;
        if root_label[r] == u32::MAX {
            root_label[r] = next;
            next += 1;
        }
        raw[v as usize] = root_label[r];
    }
    ComponentLabeling::canonical(ComponentKind::Weak, &raw, next as usize)
}

/// Tarjan's algorithm driven by an explicit call stack, so path-shaped
/// graphs of any length are safe.
pub fn strongly_connected_components(graph: &LinkGraph) -> ComponentLabeling {
    const UNVISITED: u32 = u32::MAX;
    let n = graph.node_count();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<NodeId> = Vec::new();
    let mut raw = vec![0u32; n];
    let mut components = 0u32;
    let mut counter = 0u32;
    // (node, position in its successor list)
    let mut call: Vec<(NodeId, usize)> = Vec::new();

    for root in 0..n as NodeId {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = counter;
        lowlink[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&(v, pos)) = call.last() {
            let succ = graph.successors(v);
            if pos < succ.len() {
                let w = succ[pos];
                call.last_mut().expect("non-empty").1 += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = counter;
                    lowlink[w as usize] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent as usize] = lowlink[parent as usize].min(lowlink[v as usize]);
            }
            if lowlink[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack holds v");
                    on_stack[w as usize] = false;
                    raw[w as usize] = components;
                    if w == v {
                        break;
                    }
                }
                components += 1;
            }
        }
    }
    ComponentLabeling::canonical(ComponentKind::Strong, &raw, components as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub count: usize,
    pub giant_size: usize,
    pub giant_fraction: f64,
    pub smallest_nonsingleton: Option<usize>,
    pub singleton_count: usize,
}

/// Aggregate a descending size vector.
pub fn component_summary(sizes: &[usize]) -> ComponentSummary {
    let n: usize = sizes.iter().sum();
    let giant_size = sizes.first().copied().unwrap_or(0);
    ComponentSummary {
        count: sizes.len(),
        giant_size,
        giant_fraction: if n == 0 { 0.0 } else { giant_size as f64 / n as f64 },
        smallest_nonsingleton: sizes.iter().copied().filter(|&s| s > 1).min(),
        singleton_count: sizes.iter().filter(|&&s| s == 1).count(),
    }
}
