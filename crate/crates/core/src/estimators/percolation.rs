//! Bernoulli site percolation on tori.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BoxPartition, Graph, Vertex};
use crate::rng::{stream_rng, Domain};

const CLOSED: u32 = u32::MAX;

#[derive(Clone, Debug, Serialize)]
pub struct PercolationResult {
    pub p: f64,
    pub open_set: Vec<Vertex>,
    /// Component sizes, largest first.
    pub components: Vec<usize>,
    pub gc_size: usize,
    /// `prefactor · (log n)^{d/(d-1)}` for side length `n`.
    pub threshold: f64,
    /// Components of size at least `threshold`.
    pub large_count: usize,
    /// Exactly one component reaches the threshold.
    pub unique_large: bool,
    #[serde(skip)]
    label: Vec<u32>,
}

impl PercolationResult {
    /// Index into `components` of the component containing `v`, if open.
    pub fn component(&self, v: Vertex) -> Option<usize> {
        let l = self.label[v as usize];
        (l != CLOSED).then_some(l as usize)
    }

    pub fn in_giant(&self, v: Vertex) -> bool {
        self.gc_size > 0 && self.component(v) == Some(0)
    }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
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

pub fn percolation_threshold(dim: usize, side: usize, prefactor: f64) -> f64 {
    let d = dim as f64;
    prefactor * (side as f64).ln().powf(d / (d - 1.0))
}

fn sample_open(graph: &Graph, p: f64, seed: u64, replicate: u64) -> Vec<bool> {
    let mut rng = stream_rng(seed, Domain::Percolation, &[replicate]);
    (0..graph.vertex_count()).map(|_| rng.random::<f64>() < p).collect()
}

/// Samples open sites i.i.d. with probability `p` and labels the open
/// clusters by union-find.
pub fn site_percolation(graph: &Graph, p: f64, seed: u64, replicate: u64, prefactor: f64) -> Result<PercolationResult> {
    let (Some(dim), Some(side)) = (graph.torus_dim(), graph.torus_side()) else {
        return Err(Error::NotATorus);
    };
    if dim < 2 {
        return Err(Error::InvalidParams("percolation needs a torus of dimension at least 2".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("p = {p} must lie in [0,1]")));
    }
    let open = sample_open(graph, p, seed, replicate);
    let n = graph.vertex_count();
    let mut uf = UnionFind::new(n);
    for (u, v) in graph.edges() {
        if open[u as usize] && open[v as usize] {
            uf.union(u, v);
        }
    }
    let mut roots: Vec<(usize, u32)> = Vec::new();
    for v in 0..n as u32 {
        if open[v as usize] && uf.find(v) == v {
            roots.push((uf.size[v as usize] as usize, v));
        }
    }
    // largest first, ties by root for a deterministic order
    roots.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut index = vec![CLOSED; n];
    for (i, &(_, r)) in roots.iter().enumerate() {
        index[r as usize] = i as u32;
    }
    let label: Vec<u32> = (0..n as u32)
        .map(|v| if open[v as usize] { index[uf.find(v) as usize] } else { CLOSED })
        .collect();
    let components: Vec<usize> = roots.iter().map(|&(s, _)| s).collect();
    let threshold = percolation_threshold(dim, side, prefactor);
    let large_count = components.iter().filter(|&&s| s as f64 >= threshold).count();
    Ok(PercolationResult {
        p,
        open_set: (0..n as u32).filter(|&v| open[v as usize]).collect(),
        gc_size: components.first().copied().unwrap_or(0),
        components,
        threshold,
        large_count,
        unique_large: large_count == 1,
        label,
    })
}

/// Component sizes by breadth-first flood fill, largest first.
pub fn components_by_flood(graph: &Graph, open: &[bool]) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        if !open[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s as Vertex);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &w in graph.neighbors(u) {
                if open[w as usize] && !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Fraction of partition boxes that contain a vertex of the largest cluster.
pub fn giant_box_fraction(result: &PercolationResult, partition: &BoxPartition) -> Result<f64> {
    if partition.vertex_count() != result.label.len() {
        return Err(Error::PartitionMismatch(format!(
            "partition has {} vertices, percolation {}",
            partition.vertex_count(),
            result.label.len()
        )));
    }
    let boxes = partition.boxes.len();
    let mut hit = vec![false; boxes];
    for v in 0..result.label.len() as Vertex {
        if result.in_giant(v) {
            hit[partition.box_of(v)] = true;
        }
    }
    Ok(hit.iter().filter(|&&h| h).count() as f64 / boxes as f64)
}

/// Fraction of `reps` samples in which `set` misses the largest cluster.
pub fn empty_intersection_frequency(graph: &Graph, p: f64, set: &[Vertex], reps: u64, seed: u64) -> Result<f64> {
    let mut misses = 0;
    for r in 0..reps {
        let res = site_percolation(graph, p, seed, r, 1.0)?;
        if !set.iter().any(|&v| res.in_giant(v)) {
            misses += 1;
        }
    }
    Ok(misses as f64 / reps.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{box_partition, generate_graph, Family};

    fn torus(d: usize, n: usize) -> Graph {
        generate_graph(&Family::Torus { d, n }).unwrap()
    }

    #[test]
    fn extremes() {
        let g = torus(2, 12);
        let full = site_percolation(&g, 1.0, 1, 0, 1.0).unwrap();
        assert_eq!(full.components, vec![144]);
        assert!(full.unique_large);
        let empty = site_percolation(&g, 0.0, 1, 0, 1.0).unwrap();
        assert_eq!(empty.gc_size, 0);
        assert!(empty.open_set.is_empty() && empty.components.is_empty());
    }

    #[test]
    fn union_find_matches_flood_fill() {
        for (d, n) in [(2, 64), (2, 17), (3, 9)] {
            let g = torus(d, n);
            for (r, p) in [0.3, 0.55, 0.6, 0.8].into_iter().enumerate() {
                let res = site_percolation(&g, p, 8, r as u64, 1.0).unwrap();
                let open = sample_open(&g, p, 8, r as u64);
                assert_eq!(res.components, components_by_flood(&g, &open));
                assert_eq!(res.components.iter().sum::<usize>(), res.open_set.len());
                assert!(res.gc_size <= res.open_set.len());
            }
        }
    }

    #[test]
    fn labels_follow_sizes() {
        let g = torus(2, 20);
        let res = site_percolation(&g, 0.6, 3, 0, 1.0).unwrap();
        let mut counts = vec![0; res.components.len()];
        for &v in &res.open_set {
            counts[res.component(v).unwrap()] += 1;
        }
        assert_eq!(counts, res.components);
    }

    #[test]
    fn box_and_intersection_statistics() {
        let g = torus(2, 32);
        let res = site_percolation(&g, 0.95, 2, 0, 1.0).unwrap();
        let part = box_partition(&g, 8).unwrap();
        assert_eq!(giant_box_fraction(&res, &part).unwrap(), 1.0);
        let wrong = box_partition(&torus(2, 16), 8).unwrap();
        assert!(matches!(giant_box_fraction(&res, &wrong), Err(Error::PartitionMismatch(_))));
        let u: Vec<Vertex> = (0..50).collect();
        assert_eq!(empty_intersection_frequency(&g, 0.95, &u, 20, 4).unwrap(), 0.0);
        assert_eq!(empty_intersection_frequency(&g, 0.0, &u, 5, 4).unwrap(), 1.0);
    }

    #[test]
    fn requires_torus() {
        let g = generate_graph(&Family::Cycle { n: 10 }).unwrap();
        assert!(matches!(site_percolation(&g, 0.5, 0, 0, 1.0), Err(Error::NotATorus)));
    }
}
