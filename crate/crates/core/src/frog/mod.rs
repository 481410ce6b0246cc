//! Exact per-realization frog-model computations.
//!
//! The activation time of `x` is the shortest-path distance from the origin
//! in the directed graph whose edge `x → y` has weight `ℓ(x, y)`, the first
//! step at which some particle starting at `x` stands on `y` (within its
//! lifetime). Weights are at least 1, so a label-setting search is exact.
//! Maps are built lazily, only for vertices the search actually activates.

mod density;
mod oracle;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::graph::{Graph, Vertex};
use crate::sampling::{first_hit_map, FirstHitMap, HitScratch, Kernel, ParticleField};

pub use density::{is_dense, DensityReport};
pub use oracle::{brute_force_frog, OracleOutcome, DEFAULT_ORACLE_BUDGET};

/// A step count or lifetime in `N ∪ {∞}`. Addition saturates at `∞`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Steps(u64);

impl Steps {
    pub const INFINITY: Steps = Steps(u64::MAX);
    pub const ZERO: Steps = Steps(0);

    pub const fn finite(n: u64) -> Steps {
        assert!(n != u64::MAX);
        Steps(n)
    }

    pub fn is_finite(self) -> bool {
        self.0 != u64::MAX
    }

    pub fn get(self) -> Option<u64> {
        self.is_finite().then_some(self.0)
    }

    pub fn saturating_add(self, k: u64) -> Steps {
        if !self.is_finite() {
            return self;
        }
        match self.0.checked_add(k) {
            Some(v) if v != u64::MAX => Steps(v),
            _ => Steps::INFINITY,
        }
    }
}

impl fmt::Debug for Steps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Steps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

impl Serialize for Steps {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.get() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_none(),
        }
    }
}

impl From<u64> for Steps {
    fn from(n: u64) -> Steps {
        Steps::finite(n)
    }
}

/// Lifetimes of the particles taking part in one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lifetimes {
    pub ambient: Steps,
    /// `None` removes the planted particle from the dynamics.
    pub planted: Option<Steps>,
}

impl Lifetimes {
    pub fn uniform(tau: Steps) -> Lifetimes {
        Lifetimes { ambient: tau, planted: Some(tau) }
    }

    fn max(&self) -> Steps {
        self.ambient.max(self.planted.unwrap_or(Steps::ZERO))
    }

    fn clipped(&self, horizon: u32) -> (u64, Option<u64>) {
        let clip = |s: Steps| s.get().map_or(horizon as u64, |v| v.min(horizon as u64));
        (clip(self.ambient), self.planted.map(clip))
    }
}

/// Horizon policy: start at `initial` and double up to `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HorizonConfig {
    pub initial: u32,
    pub cap: u32,
}

pub const DEFAULT_HORIZON_CAP: u32 = 1 << 24;

impl Default for HorizonConfig {
    fn default() -> Self {
        HorizonConfig { initial: 1, cap: DEFAULT_HORIZON_CAP }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ActivationResult {
    pub tau: Steps,
    /// Activation time per vertex, `∞` for unvisited vertices.
    pub at: Vec<Steps>,
    /// Horizon the first-hit maps were built to.
    pub horizon: u32,
    /// Set when the horizon cap was reached before every label could be
    /// certified; finite labels above `horizon` are then upper bounds only.
    pub censored: bool,
}

impl ActivationResult {
    pub fn visited(&self) -> Vec<Vertex> {
        (0..self.at.len() as Vertex).filter(|&v| self.at[v as usize].is_finite()).collect()
    }

    pub fn visited_count(&self) -> usize {
        self.at.iter().filter(|t| t.is_finite()).count()
    }

    pub fn covers(&self) -> bool {
        self.at.iter().all(|t| t.is_finite())
    }

    pub fn max_label(&self) -> Steps {
        self.at.iter().copied().max().unwrap_or(Steps::ZERO)
    }
}

/// One realization (graph + particle field) with lazily built first-hit maps.
pub struct Realization<'a> {
    graph: &'a Graph,
    field: &'a ParticleField,
    kernel: Kernel,
    horizon: u32,
    ambient: Vec<Option<FirstHitMap>>,
    planted: Option<FirstHitMap>,
    scratch: HitScratch,
    /// Per-vertex buffer for coverage probes.
    mark: Vec<bool>,
}

impl<'a> Realization<'a> {
    pub fn new(graph: &'a Graph, field: &'a ParticleField) -> Realization<'a> {
        let n = graph.vertex_count();
        Realization {
            graph,
            field,
            kernel: Kernel::Srw,
            horizon: 0,
            ambient: vec![None; n],
            planted: None,
            scratch: HitScratch::new(n),
            mark: vec![false; n],
        }
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Discards cached maps if the horizon changes.
    pub fn set_horizon(&mut self, horizon: u32) {
        if horizon != self.horizon {
            self.horizon = horizon;
            self.ambient.iter_mut().for_each(|m| *m = None);
            self.planted = None;
        }
    }

    fn ensure_ambient(&mut self, v: Vertex) {
        if self.ambient[v as usize].is_none() {
            let field = self.field;
            let kernel = self.kernel;
            let map = first_hit_map(
                self.graph,
                v,
                field.ambient_ids(v).map(|id| field.cursor(id, kernel)),
                self.horizon,
                &mut self.scratch,
            );
            self.ambient[v as usize] = Some(map);
        }
    }

    fn ensure_planted(&mut self) {
        if self.planted.is_none() {
            let field = self.field;
            let origin = field.origin();
            self.planted = Some(first_hit_map(
                self.graph,
                origin,
                [field.cursor(field.planted_id(), self.kernel)],
                self.horizon,
                &mut self.scratch,
            ));
        }
    }

    /// First-hit map of the ambient particles at `v` at the current horizon.
    pub fn ambient_map(&mut self, v: Vertex) -> &FirstHitMap {
        self.ensure_ambient(v);
        self.ambient[v as usize].as_ref().unwrap()
    }

    pub fn planted_map(&mut self) -> &FirstHitMap {
        self.ensure_planted();
        self.planted.as_ref().unwrap()
    }

    /// Label-setting search at the current horizon with lifetimes clipped to
    /// it.
    fn labels(&mut self, sources: &[Vertex], lifetimes: Lifetimes) -> Vec<Steps> {
        let n = self.graph.vertex_count();
        let (ambient_tau, planted_tau) = lifetimes.clipped(self.horizon);
        let origin = self.field.origin();
        let mut at = vec![Steps::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            at[s as usize] = Steps::ZERO;
            heap.push(Reverse((0u64, s)));
        }
        let mut settled = vec![false; n];
        while let Some(Reverse((label, x))) = heap.pop() {
            if settled[x as usize] {
                continue;
            }
            settled[x as usize] = true;
            let mut relax = |map: &FirstHitMap, tau: u64, heap: &mut BinaryHeap<_>| {
                for (y, j) in map.within(tau) {
                    let cand = label + j as u64;
                    if Steps::finite(cand) < at[y as usize] {
                        at[y as usize] = Steps::finite(cand);
                        heap.push(Reverse((cand, y)));
                    }
                }
            };
            if ambient_tau > 0 && self.field.count(x) > 0 {
                self.ensure_ambient(x);
                relax(self.ambient[x as usize].as_ref().unwrap(), ambient_tau, &mut heap);
            }
            if let Some(pt) = planted_tau {
                if x == origin && pt > 0 {
                    self.ensure_planted();
                    relax(self.planted.as_ref().unwrap(), pt, &mut heap);
                }
            }
        }
        at
    }

    /// Whether every vertex is reached, by plain graph search over the
    /// thresholded maps.
    fn reaches_all(&mut self, sources: &[Vertex], lifetimes: Lifetimes) -> bool {
        let n = self.graph.vertex_count();
        let (ambient_tau, planted_tau) = lifetimes.clipped(self.horizon);
        let origin = self.field.origin();
        self.mark.iter_mut().for_each(|m| *m = false);
        let mut stack: Vec<Vertex> = Vec::new();
        let mut reached = 0usize;
        for &s in sources {
            if !self.mark[s as usize] {
                self.mark[s as usize] = true;
                reached += 1;
                stack.push(s);
            }
        }
        let mut frontier = Vec::new();
        while let Some(x) = stack.pop() {
            frontier.clear();
            if ambient_tau > 0 && self.field.count(x) > 0 {
                self.ensure_ambient(x);
                frontier.extend(self.ambient[x as usize].as_ref().unwrap().within(ambient_tau).map(|e| e.0));
            }
            if let Some(pt) = planted_tau {
                if x == origin && pt > 0 {
                    self.ensure_planted();
                    frontier.extend(self.planted.as_ref().unwrap().within(pt).map(|e| e.0));
                }
            }
            for &y in &frontier {
                if !self.mark[y as usize] {
                    self.mark[y as usize] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
            if reached == n {
                return true;
            }
        }
        reached == n
    }

    /// Activation times for the given sources and lifetimes.
    ///
    /// Finite lifetimes within the cap are resolved exactly at a horizon equal
    /// to the longest lifetime. Otherwise the horizon doubles from
    /// `cfg.initial`; labels at most the horizon are exact because any chain
    /// using a longer first-hit step already exceeds them.
    pub fn resolve(&mut self, sources: &[Vertex], lifetimes: Lifetimes, cfg: HorizonConfig) -> ActivationResult {
        let longest = lifetimes.max();
        if let Some(l) = longest.get().filter(|&l| l <= cfg.cap as u64) {
            self.set_horizon(l as u32);
            let at = self.labels(sources, lifetimes);
            return ActivationResult { tau: longest, at, horizon: l as u32, censored: false };
        }
        let mut h = cfg.initial.clamp(1, cfg.cap.max(1));
        loop {
            self.set_horizon(h);
            let at = self.labels(sources, lifetimes);
            let certified = at.iter().all(|t| t.get().is_some_and(|v| v <= h as u64));
            if certified || h >= cfg.cap {
                return ActivationResult { tau: longest, at, horizon: h, censored: !certified };
            }
            h = h.saturating_mul(2).min(cfg.cap);
        }
    }
}

/// `AT_τ(x)` for every `x`, from the field's origin with every particle
/// (planted included) living `tau` steps.
pub fn activation_times(graph: &Graph, field: &ParticleField, tau: Steps, cfg: HorizonConfig) -> ActivationResult {
    Realization::new(graph, field).resolve(&[field.origin()], Lifetimes::uniform(tau), cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct SusceptibilityOutcome {
    /// Minimal lifetime covering the graph; `None` when censored.
    pub s_value: Option<u64>,
    /// Horizon cap at which the search gave up, when censored.
    pub censored_at: Option<u64>,
    pub ct_value: Option<u64>,
    pub replicate: u64,
    pub lambda: f64,
}

impl SusceptibilityOutcome {
    pub fn censored(&self) -> bool {
        self.s_value.is_none()
    }
}

/// `S(G)` for one realization: doubling on the horizon until lifetime `h`
/// covers, then binary search on `(h/2, h]` using monotonicity of the
/// visited set in the lifetime.
pub fn susceptibility(graph: &Graph, field: &ParticleField, cfg: HorizonConfig) -> SusceptibilityOutcome {
    let mut run = Realization::new(graph, field);
    let s = susceptibility_in(&mut run, cfg);
    SusceptibilityOutcome {
        censored_at: s.is_none().then_some(cfg.cap as u64),
        s_value: s,
        ct_value: None,
        replicate: field.replicate(),
        lambda: field.lambda(),
    }
}

fn susceptibility_in(run: &mut Realization<'_>, cfg: HorizonConfig) -> Option<u64> {
    let sources = [run.field.origin()];
    if run.graph.vertex_count() == 1 {
        return Some(0);
    }
    let covers = |run: &mut Realization<'_>, tau: u32| run.reaches_all(&sources, Lifetimes::uniform(Steps::finite(tau as u64)));
    // lifetime 0 never covers more than one vertex
    let mut lo = 0u32;
    let mut hi = cfg.initial.clamp(1, cfg.cap.max(1));
    loop {
        run.set_horizon(hi);
        if covers(run, hi) {
            break;
        }
        if hi >= cfg.cap {
            return None;
        }
        lo = hi;
        hi = hi.saturating_mul(2).min(cfg.cap);
    }
    // invariant: lo does not cover, hi does
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if covers(run, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi as u64)
}

/// `S(G)` and `CT(G)` from the same realization.
pub fn susceptibility_and_cover(graph: &Graph, field: &ParticleField, cfg: HorizonConfig) -> SusceptibilityOutcome {
    let mut out = susceptibility(graph, field, cfg);
    out.ct_value = cover_time_frog(graph, field, cfg).value;
    out
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoverTimeSample {
    pub value: Option<u64>,
    pub horizon: u32,
    pub censored: bool,
}

/// `CT(G) = max_v AT_∞(v)`.
pub fn cover_time_frog(graph: &Graph, field: &ParticleField, cfg: HorizonConfig) -> CoverTimeSample {
    let res = activation_times(graph, field, Steps::INFINITY, cfg);
    CoverTimeSample {
        value: (!res.censored).then(|| res.max_label().get().unwrap()),
        horizon: res.horizon,
        censored: res.censored,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// Every particle lives `τ` steps.
    Standard(Steps),
    /// The planted particle lives `t` steps, all others `m`.
    PlantedLong { t: Steps, m: Steps },
    /// The particles on `set` start active with lifetime `t`; there is no
    /// planted particle.
    SeededSet { set: Vec<Vertex>, t: Steps },
}

#[derive(Clone, Debug, Serialize)]
pub struct VisitSet {
    /// Sorted ascending.
    pub vertices: Vec<Vertex>,
    pub vertex_count: usize,
    pub variant: Variant,
    pub censored: bool,
}

impl VisitSet {
    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub fn restricted_process(
    graph: &Graph,
    field: &ParticleField,
    variant: Variant,
    cfg: HorizonConfig,
) -> crate::Result<VisitSet> {
    let (sources, lifetimes) = variant_setup(graph, field, &variant)?;
    let res = Realization::new(graph, field).resolve(&sources, lifetimes, cfg);
    Ok(VisitSet {
        vertices: res.visited(),
        vertex_count: graph.vertex_count(),
        variant,
        censored: res.censored,
    })
}

pub(crate) fn variant_setup(
    graph: &Graph,
    field: &ParticleField,
    variant: &Variant,
) -> crate::Result<(Vec<Vertex>, Lifetimes)> {
    Ok(match variant {
        Variant::Standard(tau) => (vec![field.origin()], Lifetimes::uniform(*tau)),
        Variant::PlantedLong { t, m } => (
            vec![field.origin()],
            Lifetimes { ambient: *m, planted: Some(*t) },
        ),
        Variant::SeededSet { set, t } => {
            if set.is_empty() {
                return Err(crate::Error::InvalidParams("seed set must be non-empty".into()));
            }
            if let Some(&v) = set.iter().find(|&&v| v as usize >= graph.vertex_count()) {
                return Err(crate::Error::InvalidParams(format!("seed vertex {v} out of range")));
            }
            let mut s = set.clone();
            s.sort_unstable();
            s.dedup();
            (s, Lifetimes { ambient: *t, planted: None })
        }
    })
}

/// Range `R_t(ℵ)` of the planted walk, sorted.
pub fn planted_range(graph: &Graph, field: &ParticleField, t: u32) -> Vec<Vertex> {
    let mut stream = field.stream(graph, field.planted_id(), Kernel::Srw);
    stream.extend(graph, t as usize);
    let mut r = stream.trajectory().to_vec();
    r.sort_unstable();
    r.dedup();
    r
}

#[cfg(test)]
mod tests;
