//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Raw edge list with duplicates and self-loops left in.
pub fn random_raw_edges(n: usize, m: usize, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n == 0 {
        return Vec::new();
    }
    (0..m).map(|_| (rng.random_range(0..n as u32), rng.random_range(0..n as u32))).collect()
}

/// The simple-digraph edge set implied by a raw list.
pub fn simple_edges(raw: &[(u32, u32)]) -> BTreeSet<(u32, u32)> {
    raw.iter().copied().filter(|(s, t)| s != t).collect()
}

/// `reach[u][v]` is true when v is reachable from u (every node reaches itself).
pub fn reachability(n: usize, edges: &BTreeSet<(u32, u32)>) -> Vec<Vec<bool>> {
    let mut adj = vec![Vec::new(); n];
    for &(s, t) in edges {
        adj[s as usize].push(t as usize);
    }
    (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Partition as a sorted list of sorted member lists.
pub type Partition = Vec<Vec<u32>>;

pub fn strong_partition_oracle(n: usize, edges: &BTreeSet<(u32, u32)>) -> Partition {
    let reach = reachability(n, edges);
    let mut assigned = vec![false; n];
    let mut parts = Vec::new();
    for u in 0..n {
        if assigned[u] {
            continue;
        }
        let part: Vec<u32> = (0..n).filter(|&v| reach[u][v] && reach[v][u]).map(|v| v as u32).collect();
        for &v in &part {
            assigned[v as usize] = true;
        }
        parts.push(part);
    }
    parts.sort();
    parts
}

pub fn weak_partition_oracle(n: usize, edges: &BTreeSet<(u32, u32)>) -> Partition {
    let mut sym = BTreeSet::new();
    for &(s, t) in edges {
        sym.insert((s, t));
        sym.insert((t, s));
    }
    let reach = reachability(n, &sym);
    let mut seen = vec![false; n];
    let mut parts = Vec::new();
    for u in 0..n {
        if seen[u] {
            continue;
        }
        let part: Vec<u32> = (0..n).filter(|&v| reach[u][v]).map(|v| v as u32).collect();
        for &v in &part {
            seen[v as usize] = true;
        }
        parts.push(part);
    }
    parts.sort();
    parts
}

pub fn partition_of_labels(labels: &[u32]) -> Partition {
    let k = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut parts = vec![Vec::new(); k];
    for (v, &l) in labels.iter().enumerate() {
        parts[l as usize].push(v as u32);
    }
    parts.retain(|p| !p.is_empty());
    parts.sort();
    parts
}

/// Count of edges whose reverse is present, by pairwise lookup.
pub fn mirrored_oracle(edges: &BTreeSet<(u32, u32)>) -> usize {
    edges.iter().filter(|&&(s, t)| edges.contains(&(t, s))).count()
}

/// True when `fine` refines `coarse`: every fine block sits inside one coarse block.
pub fn refines(fine: &Partition, coarse: &Partition) -> bool {
    let mut owner = std::collections::HashMap::new();
    for (i, block) in coarse.iter().enumerate() {
        for &v in block {
            owner.insert(v, i);
        }
    }
    fine.iter().all(|block| {
        let first = owner.get(&block[0]);
        first.is_some() && block.iter().all(|v| owner.get(v) == first)
    })
}
