use rand::Rng;

use super::{Family, Graph, Vertex};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Domain};

/// Attempt budget for the random regular generator.
pub const RANDOM_REGULAR_RETRIES: usize = 100;

pub fn generate_graph(family: &Family) -> Result<Graph> {
    match *family {
        Family::Cycle { n } => cycle(n),
        Family::Torus { d, n } => torus(d, n),
        Family::Complete { n } => complete(n),
        Family::DaryTree { d, depth } => dary_tree(d, depth),
        Family::GadgetRing { d, n } => gadget_ring(d, n),
        Family::RandomRegular { n, d, seed } => random_regular(n, d, seed),
        Family::Custom => Err(Error::InvalidParams(
            "custom graphs are loaded from edge lists, not generated".into(),
        )),
    }
}

fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("cycle needs n >= 3, got {n}")));
    }
    let adj = (0..n)
        .map(|v| vec![((v + n - 1) % n) as Vertex, ((v + 1) % n) as Vertex])
        .collect();
    Graph::from_adjacency(adj, Family::Cycle { n })
}

fn torus(d: usize, n: usize) -> Result<Graph> {
    if d < 1 || n < 2 {
        return Err(Error::InvalidParams(format!("torus needs d >= 1 and n >= 2, got d={d}, n={n}")));
    }
    let size = n
        .checked_pow(d as u32)
        .filter(|&s| s <= Vertex::MAX as usize)
        .ok_or_else(|| Error::InvalidParams(format!("torus {n}^{d} is too large")))?;
    let mut adj = Vec::with_capacity(size);
    for v in 0..size {
        let mut list = Vec::with_capacity(2 * d);
        let mut stride = 1;
        for _ in 0..d {
            let c = (v / stride) % n;
            let up = v - c * stride + ((c + 1) % n) * stride;
            let down = v - c * stride + ((c + n - 1) % n) * stride;
            list.push(up as Vertex);
            if down != up {
                list.push(down as Vertex);
            }
            stride *= n;
        }
        adj.push(list);
    }
    Graph::from_adjacency(adj, Family::Torus { d, n })
}

fn complete(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParams("complete graph needs n >= 1".into()));
    }
    let adj = (0..n)
        .map(|v| (0..n).filter(|&u| u != v).map(|u| u as Vertex).collect())
        .collect();
    Graph::from_adjacency(adj, Family::Complete { n })
}

fn dary_tree(d: usize, depth: usize) -> Result<Graph> {
    if d < 1 {
        return Err(Error::InvalidParams("tree arity must be >= 1".into()));
    }
    let mut size = 1usize;
    let mut level = 1usize;
    for _ in 0..depth {
        level = level
            .checked_mul(d)
            .ok_or_else(|| Error::InvalidParams("tree too large".into()))?;
        size += level;
    }
    if size > Vertex::MAX as usize {
        return Err(Error::InvalidParams("tree too large".into()));
    }
    let mut edges = Vec::with_capacity(size - 1);
    for child in 1..size {
        edges.push((((child - 1) / d) as Vertex, child as Vertex));
    }
    Graph::from_edges(size, &edges, Family::DaryTree { d, depth })
}

/// `ceil(n/d)` copies of K_{d+1} minus the edge {0,1}; local vertex 1 of copy
/// j is joined to local vertex 0 of copy j+1 (indices mod the copy count).
fn gadget_ring(d: usize, n: usize) -> Result<Graph> {
    if d < 2 || 2 * d > n {
        return Err(Error::InvalidParams(format!(
            "gadget ring needs 2 <= d and 2d <= n, got d={d}, n={n}"
        )));
    }
    let copies = n.div_ceil(d);
    let k = d + 1;
    let mut edges = Vec::new();
    for c in 0..copies {
        let base = c * k;
        for a in 0..k {
            for b in a + 1..k {
                if (a, b) != (0, 1) {
                    edges.push(((base + a) as Vertex, (base + b) as Vertex));
                }
            }
        }
        let next = ((c + 1) % copies) * k;
        edges.push(((base + 1) as Vertex, next as Vertex));
    }
    Graph::from_edges(copies * k, &edges, Family::GadgetRing { d, n })
}

/// Configuration-model pairing that rejects loops and multi-edges at each
/// pairing step and restarts when stuck; connectivity is checked at the end.
fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d < 1 || n < d + 1 || (n * d) % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "random regular graph needs d >= 1, n >= d+1 and n*d even, got n={n}, d={d}"
        )));
    }
    let family = Family::RandomRegular { n, d, seed };
    let mut last_reason = String::new();
    for attempt in 0..RANDOM_REGULAR_RETRIES {
        let mut rng = stream_rng(seed, Domain::Graph, &[n as u64, d as u64, attempt as u64]);
        match pair_points(n, d, &mut rng) {
            Some(adj) => match Graph::from_adjacency(adj, family.clone()) {
                Ok(g) => return Ok(g),
                Err(e) => last_reason = e.to_string(),
            },
            None => last_reason = "pairing got stuck".into(),
        }
    }
    Err(Error::GenerationFailed {
        attempts: RANDOM_REGULAR_RETRIES,
        reason: last_reason,
    })
}

fn pair_points(n: usize, d: usize, rng: &mut impl Rng) -> Option<Vec<Vec<Vertex>>> {
    let mut points: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat_n(v as Vertex, d)).collect();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::with_capacity(d); n];
    // Each failed draw is cheap; a pairing is abandoned when the remaining
    // points admit no legal pair.
    while !points.is_empty() {
        let m = points.len();
        let mut placed = false;
        for _ in 0..64 * m.max(8) {
            let i = rng.random_range(0..m as u32) as usize;
            let j = rng.random_range(0..m as u32) as usize;
            let (u, v) = (points[i], points[j]);
            if i == j || u == v || adj[u as usize].contains(&v) {
                continue;
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            points.swap_remove(hi);
            points.swap_remove(lo);
            placed = true;
            break;
        }
        if !placed {
            let legal = points.iter().enumerate().any(|(i, &u)| {
                points[i + 1..]
                    .iter()
                    .any(|&v| u != v && !adj[u as usize].contains(&v))
            });
            if !legal {
                return None;
            }
        }
    }
    Some(adj)
}
