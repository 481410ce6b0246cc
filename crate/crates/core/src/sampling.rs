//! Reproducible randomness for the frog model.
//!
//! A [`ParticleField`] stores, for every vertex, the arrival marks of a rate-1
//! Poisson process on `[0, λ_max]`. The ambient particles present at density
//! `λ ≤ λ_max` are the marks `≤ λ`, and particle `i` at a vertex is always
//! the one with the `i`-th smallest mark, so thresholding at a larger density
//! only adds particles. Each particle's walk is a pure function of
//! `(master seed, replicate, vertex, particle index)`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::graph::{Graph, Vertex};
use crate::rng::{stream_rng, Domain, StreamRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Kernel {
    Srw,
    /// Stays put with probability 1/2, otherwise moves like [`Kernel::Srw`].
    Lazy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Particle {
    /// The extra particle planted at the origin.
    Planted,
    Ambient(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StreamId {
    pub replicate: u64,
    pub vertex: Vertex,
    pub particle: Particle,
}

impl StreamId {
    fn key(&self) -> (Domain, [u64; 3]) {
        match self.particle {
            Particle::Planted => (Domain::PlantedWalk, [self.replicate, self.vertex as u64, 0]),
            Particle::Ambient(i) => (
                Domain::AmbientWalk,
                [self.replicate, self.vertex as u64, i as u64],
            ),
        }
    }
}

/// Position plus RNG state of one walk; yields one step at a time without
/// storing the trajectory.
#[derive(Clone, Debug)]
pub struct WalkCursor {
    rng: StreamRng,
    pos: Vertex,
    kernel: Kernel,
}

impl WalkCursor {
    pub fn new(master_seed: u64, id: StreamId, kernel: Kernel) -> WalkCursor {
        let (domain, parts) = id.key();
        WalkCursor {
            rng: stream_rng(master_seed, domain, &parts),
            pos: id.vertex,
            kernel,
        }
    }

    /// Cursor driven by an arbitrary stream, for walks that are not frog
    /// particles.
    pub fn from_rng(rng: StreamRng, start: Vertex, kernel: Kernel) -> WalkCursor {
        WalkCursor { rng, pos: start, kernel }
    }

    pub fn position(&self) -> Vertex {
        self.pos
    }

    #[inline]
    pub fn step(&mut self, graph: &Graph) -> Vertex {
        let nbrs = graph.neighbors(self.pos);
        let deg = nbrs.len() as u32;
        if deg == 0 {
            return self.pos;
        }
        match self.kernel {
            Kernel::Srw => self.pos = nbrs[self.rng.random_range(0..deg) as usize],
            Kernel::Lazy => {
                let r = self.rng.random_range(0..2 * deg);
                if r < deg {
                    self.pos = nbrs[r as usize];
                }
            }
        }
        self.pos
    }
}

/// A trajectory that can be extended without changing its prefix.
#[derive(Clone, Debug)]
pub struct WalkStream {
    pub id: StreamId,
    pub kernel: Kernel,
    cursor: WalkCursor,
    trajectory: Vec<Vertex>,
}

impl WalkStream {
    pub fn new(graph: &Graph, master_seed: u64, id: StreamId, kernel: Kernel) -> WalkStream {
        assert!((id.vertex as usize) < graph.vertex_count(), "start vertex out of range");
        WalkStream {
            id,
            kernel,
            cursor: WalkCursor::new(master_seed, id, kernel),
            trajectory: vec![id.vertex],
        }
    }

    pub fn start(&self) -> Vertex {
        self.trajectory[0]
    }

    pub fn horizon(&self) -> usize {
        self.trajectory.len() - 1
    }

    /// `S_0, ..., S_horizon`.
    pub fn trajectory(&self) -> &[Vertex] {
        &self.trajectory
    }

    pub fn extend(&mut self, graph: &Graph, new_horizon: usize) {
        while self.horizon() < new_horizon {
            let next = self.cursor.step(graph);
            self.trajectory.push(next);
        }
    }
}

/// Earliest step `j ≥ 1` at which some particle from `source` stands on each
/// target, restricted to `j ≤ horizon`. The source itself is never recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstHitMap {
    pub source: Vertex,
    pub horizon: u32,
    /// `(target, step)` sorted by step, then target.
    hits: Vec<(Vertex, u32)>,
}

impl FirstHitMap {
    pub fn empty(source: Vertex, horizon: u32) -> FirstHitMap {
        FirstHitMap { source, horizon, hits: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    pub fn get(&self, target: Vertex) -> Option<u32> {
        self.hits.iter().find(|&&(v, _)| v == target).map(|&(_, j)| j)
    }

    /// Entries with step `≤ tau`, in increasing step order.
    pub fn within(&self, tau: u64) -> impl Iterator<Item = (Vertex, u32)> + '_ {
        self.hits.iter().copied().take_while(move |&(_, j)| u64::from(j) <= tau)
    }

    pub fn entries(&self) -> &[(Vertex, u32)] {
        &self.hits
    }

    pub fn threshold(&self, tau: u32) -> FirstHitMap {
        FirstHitMap {
            source: self.source,
            horizon: self.horizon.min(tau),
            hits: self.within(tau as u64).collect(),
        }
    }

    /// Pointwise minimum of two maps from the same source.
    pub fn merge(&self, other: &FirstHitMap) -> FirstHitMap {
        assert_eq!(self.source, other.source, "merging maps of different sources");
        let mut all: Vec<(Vertex, u32)> = self.hits.iter().chain(&other.hits).copied().collect();
        all.sort_unstable();
        all.dedup_by_key(|e| e.0);
        FirstHitMap::from_unsorted(self.source, self.horizon.max(other.horizon), all)
    }

    fn from_unsorted(source: Vertex, horizon: u32, mut hits: Vec<(Vertex, u32)>) -> FirstHitMap {
        hits.sort_unstable_by_key(|&(v, j)| (j, v));
        FirstHitMap { source, horizon, hits }
    }
}

/// Reusable per-target buffer for building first-hit maps.
#[derive(Clone, Debug)]
pub struct HitScratch {
    best: Vec<u32>,
    touched: Vec<Vertex>,
}

impl HitScratch {
    pub fn new(vertex_count: usize) -> HitScratch {
        HitScratch { best: vec![u32::MAX; vertex_count], touched: Vec::new() }
    }
}

/// Walks every cursor `horizon` steps from `source` and records first hits.
pub fn first_hit_map(
    graph: &Graph,
    source: Vertex,
    walks: impl IntoIterator<Item = WalkCursor>,
    horizon: u32,
    scratch: &mut HitScratch,
) -> FirstHitMap {
    for mut walk in walks {
        debug_assert_eq!(walk.position(), source);
        for j in 1..=horizon {
            let v = walk.step(graph);
            let slot = &mut scratch.best[v as usize];
            if *slot == u32::MAX {
                scratch.touched.push(v);
                *slot = j;
            } else if j < *slot {
                *slot = j;
            }
        }
    }
    let mut hits = Vec::with_capacity(scratch.touched.len());
    for v in scratch.touched.drain(..) {
        let j = std::mem::replace(&mut scratch.best[v as usize], u32::MAX);
        if v != source {
            hits.push((v, j));
        }
    }
    FirstHitMap::from_unsorted(source, horizon, hits)
}

/// Poisson arrival marks on `[0, λ_max]` at every vertex.
#[derive(Clone, Debug)]
pub struct ParticleField {
    master_seed: u64,
    replicate: u64,
    origin: Vertex,
    lambda_max: f64,
    lambda: f64,
    offsets: Vec<usize>,
    marks: Vec<f64>,
    counts: Vec<u32>,
}

impl ParticleField {
    /// Samples marks once up to `lambda_max`; the field starts thresholded
    /// at `lambda_max`.
    pub fn sample(
        graph: &Graph,
        lambda_max: f64,
        origin: Vertex,
        master_seed: u64,
        replicate: u64,
    ) -> ParticleField {
        assert!(lambda_max >= 0.0 && lambda_max.is_finite(), "lambda_max must be finite and >= 0");
        assert!((origin as usize) < graph.vertex_count(), "origin out of range");
        let n = graph.vertex_count();
        let poisson = (lambda_max > 0.0).then(|| Poisson::new(lambda_max).unwrap());
        let mut offsets = Vec::with_capacity(n + 1);
        let mut marks = Vec::new();
        offsets.push(0);
        for v in 0..n {
            if let Some(p) = &poisson {
                let mut rng = stream_rng(master_seed, Domain::Field, &[replicate, v as u64]);
                let count = p.sample(&mut rng) as usize;
                let start = marks.len();
                marks.extend((0..count).map(|_| rng.random::<f64>() * lambda_max));
                marks[start..].sort_by(f64::total_cmp);
            }
            offsets.push(marks.len());
        }
        let counts = (0..n).map(|v| (offsets[v + 1] - offsets[v]) as u32).collect();
        ParticleField {
            master_seed,
            replicate,
            origin,
            lambda_max,
            lambda: lambda_max,
            offsets,
            marks,
            counts,
        }
    }

    /// The same realization seen at density `lambda ≤ lambda_max`.
    pub fn at_lambda(&self, lambda: f64) -> ParticleField {
        assert!(
            (0.0..=self.lambda_max).contains(&lambda),
            "lambda {lambda} outside [0, {}]",
            self.lambda_max
        );
        let counts = (0..self.counts.len())
            .map(|v| self.marks_at(v as Vertex).partition_point(|&m| m <= lambda) as u32)
            .collect();
        ParticleField { lambda, counts, ..self.clone() }
    }

    pub fn marks_at(&self, v: Vertex) -> &[f64] {
        &self.marks[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn origin(&self) -> Vertex {
        self.origin
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn replicate(&self) -> u64 {
        self.replicate
    }

    /// Ambient particles at `v`, excluding the planted one.
    pub fn count(&self, v: Vertex) -> u32 {
        self.counts[v as usize]
    }

    /// Total particles at `v`, counting the planted one at the origin.
    pub fn occupancy(&self, v: Vertex) -> u32 {
        self.counts[v as usize] + u32::from(v == self.origin)
    }

    pub fn ambient_total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Expected particle count `λ·|V| + 1`, for memory budgeting.
    pub fn expected_particles(&self) -> f64 {
        self.lambda * self.counts.len() as f64 + 1.0
    }

    pub fn ambient_ids(&self, v: Vertex) -> impl Iterator<Item = StreamId> + '_ {
        let replicate = self.replicate;
        (0..self.count(v)).map(move |i| StreamId {
            replicate,
            vertex: v,
            particle: Particle::Ambient(i),
        })
    }

    pub fn planted_id(&self) -> StreamId {
        StreamId {
            replicate: self.replicate,
            vertex: self.origin,
            particle: Particle::Planted,
        }
    }

    pub fn cursor(&self, id: StreamId, kernel: Kernel) -> WalkCursor {
        WalkCursor::new(self.master_seed, id, kernel)
    }

    pub fn stream(&self, graph: &Graph, id: StreamId, kernel: Kernel) -> WalkStream {
        WalkStream::new(graph, self.master_seed, id, kernel)
    }
}

/// Uniform origin drawn from its own stream, for experiments that randomize
/// the origin.
pub fn random_origin(graph: &Graph, master_seed: u64, replicate: u64) -> Vertex {
    let mut rng = stream_rng(master_seed, Domain::Origin, &[replicate]);
    rng.random_range(0..graph.vertex_count() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_graph, Family};
    use crate::stats::Summary;

    fn g(f: Family) -> Graph {
        generate_graph(&f).unwrap()
    }

    #[test]
    fn empty_field_has_only_planted() {
        let c = g(Family::Cycle { n: 10 });
        let f = ParticleField::sample(&c, 0.0, 3, 1, 0);
        assert!((0..10).all(|v| f.count(v) == 0));
        assert_eq!(f.occupancy(3), 1);
        assert_eq!(f.occupancy(4), 0);
        assert_eq!(f.ambient_total(), 0);
    }

    #[test]
    fn thresholding_is_monotone() {
        let t = g(Family::Torus { d: 2, n: 8 });
        for rep in 0..50 {
            let full = ParticleField::sample(&t, 1.0, 0, 9, rep);
            let half = full.at_lambda(0.5);
            for v in 0..64 {
                assert!(half.count(v) <= full.count(v));
                assert!(full.marks_at(v).windows(2).all(|w| w[0] <= w[1]));
                assert!(full.marks_at(v).iter().all(|&m| (0.0..=1.0).contains(&m)));
            }
            assert_eq!(full.at_lambda(1.0).count(5), full.count(5));
            assert_eq!(full.at_lambda(0.0).ambient_total(), 0);
        }
    }

    #[test]
    fn poisson_mean() {
        // 10^4 replicates on 100 vertices at λ=2; 4σ band is ±0.0057
        let c = g(Family::Cycle { n: 100 });
        let means: Vec<f64> = (0..10_000)
            .map(|rep| ParticleField::sample(&c, 2.0, 0, 17, rep).ambient_total() as f64 / 100.0)
            .collect();
        let m = Summary::of(&means).mean;
        assert!((1.97..=2.03).contains(&m), "mean {m}");
    }

    #[test]
    fn field_is_deterministic() {
        let c = g(Family::Cycle { n: 30 });
        let a = ParticleField::sample(&c, 3.0, 0, 5, 2);
        let b = ParticleField::sample(&c, 3.0, 0, 5, 2);
        assert_eq!(a.marks, b.marks);
        let other = ParticleField::sample(&c, 3.0, 0, 5, 3);
        assert_ne!(a.marks, other.marks);
    }

    #[test]
    fn k2_alternates() {
        let k2 = g(Family::Complete { n: 2 });
        let id = StreamId { replicate: 0, vertex: 0, particle: Particle::Planted };
        let mut s = WalkStream::new(&k2, 1, id, Kernel::Srw);
        s.extend(&k2, 9);
        assert_eq!(s.trajectory(), &[0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn extension_preserves_prefix() {
        let t = g(Family::Torus { d: 2, n: 7 });
        for kernel in [Kernel::Srw, Kernel::Lazy] {
            let id = StreamId { replicate: 4, vertex: 11, particle: Particle::Ambient(2) };
            let mut a = WalkStream::new(&t, 3, id, kernel);
            a.extend(&t, 50);
            let prefix = a.trajectory().to_vec();
            a.extend(&t, 100);
            assert_eq!(&a.trajectory()[..51], prefix.as_slice());
            let mut b = WalkStream::new(&t, 3, id, kernel);
            b.extend(&t, 100);
            assert_eq!(a.trajectory(), b.trajectory());
            for w in a.trajectory().windows(2) {
                let adjacent = t.neighbors(w[0]).contains(&w[1]);
                match kernel {
                    Kernel::Srw => assert!(adjacent),
                    Kernel::Lazy => assert!(adjacent || w[0] == w[1]),
                }
            }
        }
    }

    #[test]
    fn one_step_frequencies_on_cycle() {
        let c = g(Family::Cycle { n: 5 });
        let mut right = 0u32;
        for i in 0..100_000u32 {
            let id = StreamId { replicate: 0, vertex: 0, particle: Particle::Ambient(i) };
            let mut w = WalkCursor::new(8, id, Kernel::Srw);
            right += u32::from(w.step(&c) == 1);
        }
        let f = right as f64 / 1e5;
        assert!((0.49..=0.51).contains(&f), "{f}");
    }

    #[test]
    fn lazy_stays_half_the_time() {
        let c = g(Family::Cycle { n: 5 });
        let mut stays = 0u32;
        let id = StreamId { replicate: 0, vertex: 0, particle: Particle::Planted };
        let mut w = WalkCursor::new(8, id, Kernel::Lazy);
        let mut pos = 0;
        for _ in 0..100_000 {
            let next = w.step(&c);
            stays += u32::from(next == pos);
            pos = next;
        }
        let f = stays as f64 / 1e5;
        assert!((0.49..=0.51).contains(&f), "{f}");
    }

    #[test]
    fn first_hit_basic() {
        let k2 = g(Family::Complete { n: 2 });
        let mut scratch = HitScratch::new(2);
        let f = ParticleField::sample(&k2, 0.0, 0, 1, 0);
        let none = first_hit_map(&k2, 1, f.ambient_ids(1).map(|id| f.cursor(id, Kernel::Srw)), 10, &mut scratch);
        assert!(none.is_empty());
        let planted = first_hit_map(&k2, 0, [f.cursor(f.planted_id(), Kernel::Srw)], 10, &mut scratch);
        assert_eq!(planted.get(1), Some(1));
        assert_eq!(planted.get(0), None);
    }

    fn brute_force_map(graph: &Graph, field: &ParticleField, v: Vertex, horizon: usize) -> Vec<Option<u32>> {
        let mut best = vec![None; graph.vertex_count()];
        for id in field.ambient_ids(v) {
            let mut s = field.stream(graph, id, Kernel::Srw);
            s.extend(graph, horizon);
            for (j, &x) in s.trajectory().iter().enumerate().skip(1) {
                if x != v && best[x as usize].is_none_or(|b: u32| (j as u32) < b) {
                    best[x as usize] = Some(j as u32);
                }
            }
        }
        best
    }

    #[test]
    fn first_hit_matches_trajectory_scan() {
        let graphs = [
            g(Family::Cycle { n: 9 }),
            g(Family::Torus { d: 2, n: 4 }),
            g(Family::Complete { n: 6 }),
            g(Family::DaryTree { d: 2, depth: 3 }),
        ];
        let mut instances = 0;
        for (gi, graph) in graphs.iter().enumerate() {
            let mut scratch = HitScratch::new(graph.vertex_count());
            for rep in 0..25 {
                let field = ParticleField::sample(graph, 1.5, 0, 100 + gi as u64, rep);
                let v = (rep as usize % graph.vertex_count()) as Vertex;
                let map = first_hit_map(
                    graph,
                    v,
                    field.ambient_ids(v).map(|id| field.cursor(id, Kernel::Srw)),
                    50,
                    &mut scratch,
                );
                let oracle = brute_force_map(graph, &field, v, 50);
                for x in 0..graph.vertex_count() as Vertex {
                    assert_eq!(map.get(x), oracle[x as usize]);
                }
                assert!(map.entries().windows(2).all(|w| w[0].1 <= w[1].1));
                instances += 1;
            }
        }
        assert_eq!(instances, 100);
    }

    #[test]
    fn merge_is_order_independent() {
        let t = g(Family::Torus { d: 2, n: 5 });
        let field = ParticleField::sample(&t, 4.0, 0, 2, 0);
        let mut scratch = HitScratch::new(25);
        let v = (0..25).find(|&v| field.count(v) >= 3).unwrap();
        let single: Vec<FirstHitMap> = field
            .ambient_ids(v)
            .map(|id| first_hit_map(&t, v, [field.cursor(id, Kernel::Srw)], 30, &mut scratch))
            .collect();
        let joint = first_hit_map(
            &t,
            v,
            field.ambient_ids(v).map(|id| field.cursor(id, Kernel::Srw)),
            30,
            &mut scratch,
        );
        let forward = single.iter().skip(1).fold(single[0].clone(), |acc, m| acc.merge(m));
        let backward = single.iter().rev().skip(1).fold(single.last().unwrap().clone(), |acc, m| m.merge(&acc));
        assert_eq!(forward, joint);
        assert_eq!(backward, joint);
        let short = joint.threshold(10);
        assert!(short.entries().iter().all(|&(_, j)| j <= 10));
        for (x, j) in short.entries() {
            assert_eq!(joint.get(*x), Some(*j));
        }
    }
}
