use super::{Family, Graph, Vertex};
use crate::error::{Error, Result};

/// Partition of a torus into `floor(n/r)^d` boxes. Along each axis the first
/// `m - 1` intervals have length `r` and the last absorbs the remainder, so
/// every side length lies in `[r, 2r)`.
#[derive(Clone, Debug)]
pub struct BoxPartition {
    pub side_length: usize,
    /// Boxes per axis, `floor(n/r)`.
    pub boxes_per_axis: usize,
    pub dim: usize,
    pub torus_side: usize,
    /// Box `b` is indexed by its renormalized coordinate in `T_d(m)`,
    /// least significant axis first.
    pub boxes: Vec<Vec<Vertex>>,
    box_of: Vec<u32>,
}

impl BoxPartition {
    pub fn box_of(&self, v: Vertex) -> usize {
        self.box_of[v as usize] as usize
    }

    pub fn vertex_count(&self) -> usize {
        self.box_of.len()
    }

    /// Side lengths of box `b` along each axis.
    pub fn box_sides(&self, b: usize) -> Vec<usize> {
        let m = self.boxes_per_axis;
        let mut rest = b;
        (0..self.dim)
            .map(|_| {
                let c = rest % m;
                rest /= m;
                axis_interval_len(c, m, self.side_length, self.torus_side)
            })
            .collect()
    }
}

fn axis_interval_len(c: usize, m: usize, r: usize, n: usize) -> usize {
    if c + 1 < m {
        r
    } else {
        n - r * (m - 1)
    }
}

pub fn box_partition(graph: &Graph, r: usize) -> Result<BoxPartition> {
    let (d, n) = match *graph.family() {
        Family::Torus { d, n } => (d, n),
        _ => return Err(Error::NotATorus),
    };
    if r < 1 || r > n {
        return Err(Error::InvalidParams(format!("box side must be in [1, {n}], got {r}")));
    }
    let m = n / r;
    let box_count = m.pow(d as u32);
    let mut boxes = vec![Vec::new(); box_count];
    let mut box_of = vec![0u32; graph.vertex_count()];
    for v in 0..graph.vertex_count() {
        let mut rest = v;
        let mut b = 0;
        let mut stride = 1;
        for _ in 0..d {
            let c = rest % n;
            rest /= n;
            b += (c / r).min(m - 1) * stride;
            stride *= m;
        }
        boxes[b].push(v as Vertex);
        box_of[v] = b as u32;
    }
    Ok(BoxPartition {
        side_length: r,
        boxes_per_axis: m,
        dim: d,
        torus_side: n,
        boxes,
        box_of,
    })
}
