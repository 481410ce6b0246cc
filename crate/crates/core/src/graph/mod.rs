//! Graph families, generators and the plain-text edge-list format.

mod generate;
mod io;
pub mod linalg;
mod partition;

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

pub use generate::{generate_graph, RANDOM_REGULAR_RETRIES};
pub use io::{read_edge_list, write_edge_list};
pub use linalg::{
    green_sum, hitting_times_exact, mixing_decay, spectral_gap, GreenMethod, GreenStats,
    HittingMatrix, SpectralMethod, SpectralStats, DENSE_CAP,
};
pub use partition::{box_partition, BoxPartition};

pub type Vertex = u32;

/// Which family a graph was generated from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Cycle { n: usize },
    Torus { d: usize, n: usize },
    Complete { n: usize },
    /// Rooted `d`-ary tree of the given depth. Not regular.
    DaryTree { d: usize, depth: usize },
    /// Ring of `ceil(n/d)` gadgets, each a complete graph on `d + 1`
    /// vertices with one edge removed.
    GadgetRing { d: usize, n: usize },
    RandomRegular { n: usize, d: usize, seed: u64 },
    Custom,
}

impl Family {
    /// Families whose automorphism group acts transitively on vertices.
    pub fn is_vertex_transitive(&self) -> bool {
        matches!(
            self,
            Family::Cycle { .. } | Family::Torus { .. } | Family::Complete { .. }
        )
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            Family::Cycle { .. } => "cycle",
            Family::Torus { .. } => "torus",
            Family::Complete { .. } => "complete",
            Family::DaryTree { .. } => "tree",
            Family::GadgetRing { .. } => "gadget_ring",
            Family::RandomRegular { .. } => "random_regular",
            Family::Custom => "custom",
        }
    }

    /// Parses the `Display` form, e.g. `Torus(2,3)`.
    pub fn parse(s: &str) -> Result<Family> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("custom") {
            return Ok(Family::Custom);
        }
        let open = s
            .find('(')
            .ok_or_else(|| Error::InvalidParams(format!("family '{s}' has no parameter list")))?;
        if !s.ends_with(')') {
            return Err(Error::InvalidParams(format!("family '{s}' is not closed")));
        }
        let name = s[..open].trim().to_ascii_lowercase();
        let args: Vec<u64> = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidParams(format!("bad family argument '{a}'")))
            })
            .collect::<Result<_>>()?;
        let want = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!(
                    "family '{name}' takes {k} arguments, got {}",
                    args.len()
                )))
            }
        };
        let u = |i: usize| args[i] as usize;
        match name.as_str() {
            "cycle" => want(1).map(|_| Family::Cycle { n: u(0) }),
            "torus" => want(2).map(|_| Family::Torus { d: u(0), n: u(1) }),
            "complete" => want(1).map(|_| Family::Complete { n: u(0) }),
            "darytree" | "tree" => want(2).map(|_| Family::DaryTree { d: u(0), depth: u(1) }),
            "gadgetring" | "gadget_ring" => want(2).map(|_| Family::GadgetRing { d: u(0), n: u(1) }),
            "randomregular" | "random_regular" => want(3).map(|_| Family::RandomRegular {
                n: u(0),
                d: u(1),
                seed: args[2],
            }),
            _ => Err(Error::InvalidParams(format!("unknown family '{name}'"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cycle { n } => write!(f, "Cycle({n})"),
            Family::Torus { d, n } => write!(f, "Torus({d},{n})"),
            Family::Complete { n } => write!(f, "Complete({n})"),
            Family::DaryTree { d, depth } => write!(f, "DaryTree({d},{depth})"),
            Family::GadgetRing { d, n } => write!(f, "GadgetRing({d},{n})"),
            Family::RandomRegular { n, d, seed } => write!(f, "RandomRegular({n},{d},{seed})"),
            Family::Custom => write!(f, "Custom"),
        }
    }
}

/// Immutable simple undirected connected graph in CSR layout.
#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<Vertex>,
    degree: Option<usize>,
    family: Family,
    origin: Vertex,
}

impl Graph {
    /// Builds a graph from adjacency lists and checks every invariant:
    /// symmetry, no loops or multi-edges, connectivity.
    pub fn from_adjacency(adj: Vec<Vec<Vertex>>, family: Family) -> Result<Graph> {
        let n = adj.len();
        if n == 0 {
            return Err(Error::InvalidParams("graph must have at least one vertex".into()));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        offsets.push(0);
        for (v, mut list) in adj.into_iter().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParams(format!("multi-edge at vertex {v}")));
            }
            if list.iter().any(|&u| u as usize == v) {
                return Err(Error::InvalidParams(format!("self-loop at vertex {v}")));
            }
            if let Some(&u) = list.iter().find(|&&u| u as usize >= n) {
                return Err(Error::InvalidParams(format!("vertex {v} has out-of-range neighbor {u}")));
            }
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        let mut g = Graph {
            offsets,
            neighbors,
            degree: None,
            family,
            origin: 0,
        };
        for v in 0..n as Vertex {
            for &u in g.neighbors(v) {
                if g.neighbors(u).binary_search(&v).is_err() {
                    return Err(Error::InvalidParams(format!("edge {v}-{u} is not symmetric")));
                }
            }
        }
        let d0 = g.degree_of(0);
        if (0..n as Vertex).all(|v| g.degree_of(v) == d0) {
            g.degree = Some(d0);
        }
        if !g.is_connected() {
            return Err(Error::InvalidParams("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)], family: Family) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidParams(format!("edge {u}-{v} out of range")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        Graph::from_adjacency(adj, family)
    }

    pub fn with_origin(mut self, origin: Vertex) -> Result<Graph> {
        if origin as usize >= self.vertex_count() {
            return Err(Error::InvalidParams(format!("origin {origin} out of range")));
        }
        self.origin = origin;
        Ok(self)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree_of(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Common degree, `None` for irregular graphs.
    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn is_regular(&self) -> bool {
        self.degree.is_some()
    }

    pub fn require_regular(&self) -> Result<usize> {
        self.degree.ok_or_else(|| Error::NotRegular(self.family.to_string()))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn origin(&self) -> Vertex {
        self.origin
    }

    /// Edges `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.vertex_count() as Vertex)
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn bfs_distances(&self, source: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source as usize] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize].unwrap();
            for &u in self.neighbors(v) {
                if dist[u as usize].is_none() {
                    dist[u as usize] = Some(dv + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: Vertex, b: Vertex) -> Option<usize> {
        if let (Family::Torus { .. }, Some(ta), Some(tb)) =
            (&self.family, self.torus_coords(a), self.torus_coords(b))
        {
            let n = self.torus_side().unwrap();
            return Some(ta.iter().zip(&tb).map(|(&x, &y)| torus_axis_distance(x, y, n)).sum());
        }
        self.bfs_distances(a)[b as usize]
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Eccentricity of the origin for transitive families, otherwise the
    /// exact diameter by all-sources BFS.
    pub fn diameter(&self) -> usize {
        match self.family {
            Family::Cycle { n } => n / 2,
            Family::Torus { d, n } => d * (n / 2),
            Family::Complete { n } => usize::from(n > 1),
            _ => (0..self.vertex_count() as Vertex)
                .map(|v| self.bfs_distances(v).into_iter().flatten().max().unwrap_or(0))
                .max()
                .unwrap_or(0),
        }
    }

    pub fn torus_side(&self) -> Option<usize> {
        match self.family {
            Family::Torus { n, .. } => Some(n),
            _ => None,
        }
    }

    pub fn torus_dim(&self) -> Option<usize> {
        match self.family {
            Family::Torus { d, .. } => Some(d),
            _ => None,
        }
    }

    /// Coordinates of `v` in `(Z/nZ)^d`, least significant axis first.
    pub fn torus_coords(&self, v: Vertex) -> Option<Vec<usize>> {
        let (d, n) = match self.family {
            Family::Torus { d, n } => (d, n),
            _ => return None,
        };
        let mut rest = v as usize;
        let mut out = Vec::with_capacity(d);
        for _ in 0..d {
            out.push(rest % n);
            rest /= n;
        }
        Some(out)
    }

    pub fn torus_vertex(&self, coords: &[usize]) -> Option<Vertex> {
        let (d, n) = match self.family {
            Family::Torus { d, n } => (d, n),
            _ => return None,
        };
        if coords.len() != d {
            return None;
        }
        let mut idx = 0usize;
        for &c in coords.iter().rev() {
            idx = idx * n + c % n;
        }
        Some(idx as Vertex)
    }
}

pub(crate) fn torus_axis_distance(x: usize, y: usize, n: usize) -> usize {
    let diff = x.abs_diff(y);
    diff.min(n - diff)
}
