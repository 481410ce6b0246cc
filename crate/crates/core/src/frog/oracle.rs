//! Synchronous discrete-event simulation of the frog model. Used only as an
//! independent check of the shortest-path engine.

use super::{variant_setup, Steps, Variant};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::sampling::{Kernel, ParticleField, WalkCursor};

pub const DEFAULT_ORACLE_BUDGET: u64 = 1_000;

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub first_visit: Vec<Steps>,
    pub particle_steps: u64,
}

impl OracleOutcome {
    pub fn visited(&self) -> Vec<Vertex> {
        (0..self.first_visit.len() as Vertex)
            .filter(|&v| self.first_visit[v as usize].is_finite())
            .collect()
    }
}

struct Active {
    walk: WalkCursor,
    /// `None` for an infinite lifetime.
    remaining: Option<u64>,
}

/// Steps every active particle once per time unit. A particle woken at time
/// `s` is at `S_j` at time `s + j`; a vertex's sleeping particles wake the
/// first time any active particle stands on it. Newly visited vertices in one
/// step are processed in vertex-id order, which cannot change the outcome
/// since waking is idempotent.
pub fn brute_force_frog(
    graph: &Graph,
    field: &ParticleField,
    variant: &Variant,
    budget: u64,
) -> Result<OracleOutcome> {
    let (sources, lifetimes) = variant_setup(graph, field, variant)?;
    let n = graph.vertex_count();
    let origin = field.origin();
    let mut first_visit = vec![Steps::INFINITY; n];
    let mut active: Vec<Active> = Vec::new();
    let mut visited = 0usize;

    let wake = |v: Vertex, active: &mut Vec<Active>| {
        for id in field.ambient_ids(v) {
            active.push(Active {
                walk: field.cursor(id, Kernel::Srw),
                remaining: lifetimes.ambient.get(),
            });
        }
        if v == origin {
            if let Some(pt) = lifetimes.planted {
                active.push(Active {
                    walk: field.cursor(field.planted_id(), Kernel::Srw),
                    remaining: pt.get(),
                });
            }
        }
    };

    for &s in &sources {
        first_visit[s as usize] = Steps::ZERO;
        visited += 1;
        wake(s, &mut active);
    }
    active.retain(|a| a.remaining != Some(0));

    let mut steps = 0u64;
    let mut t = 0u64;
    let mut fresh: Vec<Vertex> = Vec::new();
    while !active.is_empty() && visited < n {
        t += 1;
        steps += active.len() as u64;
        if steps > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        fresh.clear();
        for a in active.iter_mut() {
            let v = a.walk.step(graph);
            if let Some(r) = a.remaining.as_mut() {
                *r -= 1;
            }
            if !first_visit[v as usize].is_finite() {
                first_visit[v as usize] = Steps::finite(t);
                visited += 1;
                fresh.push(v);
            }
        }
        active.retain(|a| a.remaining != Some(0));
        fresh.sort_unstable();
        for &v in &fresh {
            wake(v, &mut active);
        }
        active.retain(|a| a.remaining != Some(0));
    }
    Ok(OracleOutcome { first_visit, particle_steps: steps })
}
