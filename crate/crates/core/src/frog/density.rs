use serde::Serialize;

use super::VisitSet;
use crate::error::{Error, Result};
use crate::graph::BoxPartition;

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub dense: bool,
    pub min_density: f64,
    /// `|A ∩ B| / |B|` per box.
    pub densities: Vec<f64>,
}

/// `(α, r)`-density: every box holds at least an `α` fraction of visited
/// vertices.
pub fn is_dense(visits: &VisitSet, partition: &BoxPartition, alpha: f64) -> Result<DensityReport> {
    if visits.vertex_count != partition.vertex_count() {
        return Err(Error::PartitionMismatch(format!(
            "visit set over {} vertices, partition over {}",
            visits.vertex_count,
            partition.vertex_count()
        )));
    }
    let mut hits = vec![0usize; partition.boxes.len()];
    for &v in &visits.vertices {
        hits[partition.box_of(v)] += 1;
    }
    let densities: Vec<f64> = hits
        .iter()
        .zip(&partition.boxes)
        .map(|(&h, b)| h as f64 / b.len() as f64)
        .collect();
    let min_density = densities.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DensityReport {
        dense: densities.iter().all(|&d| d >= alpha),
        min_density,
        densities,
    })
}
