use super::*;
use crate::graph::{box_partition, generate_graph, Family};

fn g(f: Family) -> Graph {
    generate_graph(&f).unwrap()
}

const CFG: HorizonConfig = HorizonConfig { initial: 1, cap: 1 << 16 };

#[test]
fn zero_lifetime_visits_only_origin() {
    let t = g(Family::Torus { d: 2, n: 4 });
    let field = ParticleField::sample(&t, 3.0, 5, 1, 0);
    let res = activation_times(&t, &field, Steps::ZERO, CFG);
    assert_eq!(res.visited(), vec![5]);
    assert_eq!(res.at[5], Steps::ZERO);
    assert!(!res.censored);
    let oracle = brute_force_frog(&t, &field, &Variant::Standard(Steps::ZERO), 1000).unwrap();
    assert_eq!(oracle.visited(), vec![5]);
}

#[test]
fn k2_planted_only() {
    let k2 = g(Family::Complete { n: 2 });
    let field = ParticleField::sample(&k2, 0.0, 0, 1, 0);
    let res = activation_times(&k2, &field, Steps::finite(1), CFG);
    assert_eq!(res.at, vec![Steps::ZERO, Steps::finite(1)]);
    assert!(res.covers());
    let s = susceptibility(&k2, &field, CFG);
    assert_eq!(s.s_value, Some(1));
    assert_eq!(cover_time_frog(&k2, &field, CFG).value, Some(1));
    let oracle = brute_force_frog(&k2, &field, &Variant::Standard(Steps::finite(1)), 10).unwrap();
    assert_eq!(oracle.first_visit, vec![Steps::ZERO, Steps::finite(1)]);
}

#[test]
fn single_vertex_graph() {
    let k1 = g(Family::Complete { n: 1 });
    let field = ParticleField::sample(&k1, 2.0, 0, 1, 0);
    assert_eq!(susceptibility(&k1, &field, CFG).s_value, Some(0));
    assert_eq!(cover_time_frog(&k1, &field, CFG).value, Some(0));
}

#[test]
fn steps_sentinel_saturates() {
    assert_eq!(Steps::INFINITY.saturating_add(3), Steps::INFINITY);
    assert_eq!(Steps::finite(u64::MAX - 2).saturating_add(5), Steps::INFINITY);
    assert_eq!(Steps::finite(4).saturating_add(5), Steps::finite(9));
    assert!(Steps::finite(1_000_000) < Steps::INFINITY);
    assert_eq!(Steps::INFINITY.to_string(), "inf");
}

fn small_graphs() -> Vec<Graph> {
    vec![
        g(Family::Cycle { n: 8 }),
        g(Family::Torus { d: 2, n: 4 }),
        g(Family::Complete { n: 5 }),
        g(Family::DaryTree { d: 2, depth: 3 }),
    ]
}

#[test]
fn engine_matches_event_simulation() {
    for (gi, graph) in small_graphs().iter().enumerate() {
        for rep in 0..50u64 {
            let lambda = [0.3, 0.8, 1.5][rep as usize % 3];
            let origin = (rep as usize * 7 % graph.vertex_count()) as Vertex;
            let field = ParticleField::sample(graph, lambda, origin, 40 + gi as u64, rep);
            let tau = Steps::finite(rep % 21);
            let fast = activation_times(graph, &field, tau, CFG);
            let slow = brute_force_frog(graph, &field, &Variant::Standard(tau), 1 << 20).unwrap();
            assert_eq!(fast.at, slow.first_visit, "graph {gi} rep {rep}");
        }
    }
}

#[test]
fn engine_matches_event_simulation_with_mixed_lifetimes() {
    for (gi, graph) in small_graphs().iter().enumerate() {
        for rep in 0..30u64 {
            let field = ParticleField::sample(graph, 0.7, 0, 77 + gi as u64, rep);
            let variants = [
                Variant::PlantedLong { t: Steps::finite(rep % 13), m: Steps::finite(rep % 4) },
                Variant::PlantedLong { t: Steps::finite(2), m: Steps::finite(9) },
                Variant::SeededSet { set: vec![1, 3], t: Steps::finite(rep % 7) },
                Variant::Standard(Steps::INFINITY),
            ];
            for variant in variants {
                let fast = restricted_process(graph, &field, variant.clone(), CFG).unwrap();
                let slow = brute_force_frog(graph, &field, &variant, 1 << 22).unwrap();
                assert_eq!(fast.vertices, slow.visited(), "{variant:?}");
                assert!(!fast.censored);
            }
        }
    }
}

#[test]
fn planted_long_without_ambient_motion_is_planted_range() {
    let c = g(Family::Cycle { n: 30 });
    for rep in 0..20 {
        let field = ParticleField::sample(&c, 2.0, 0, 3, rep);
        let v = restricted_process(&c, &field, Variant::PlantedLong { t: Steps::finite(25), m: Steps::ZERO }, CFG)
            .unwrap();
        assert_eq!(v.vertices, planted_range(&c, &field, 25));
    }
}

#[test]
fn seeded_full_set_visits_everything() {
    let t = g(Family::Torus { d: 2, n: 5 });
    let field = ParticleField::sample(&t, 1.0, 0, 3, 0);
    let all: Vec<Vertex> = (0..25).collect();
    let v = restricted_process(&t, &field, Variant::SeededSet { set: all.clone(), t: Steps::finite(2) }, CFG).unwrap();
    assert_eq!(v.vertices, all);
    assert!(restricted_process(&t, &field, Variant::SeededSet { set: vec![], t: Steps::ZERO }, CFG).is_err());
    assert!(restricted_process(&t, &field, Variant::SeededSet { set: vec![99], t: Steps::ZERO }, CFG).is_err());
}

#[test]
fn susceptibility_is_minimal() {
    for (gi, graph) in small_graphs().iter().enumerate() {
        for rep in 0..40 {
            let field = ParticleField::sample(graph, 1.0, 0, 900 + gi as u64, rep);
            let out = susceptibility(graph, &field, CFG);
            let s = out.s_value.expect("uncensored");
            assert!(s >= 1);
            assert!(activation_times(graph, &field, Steps::finite(s), CFG).covers());
            assert!(!activation_times(graph, &field, Steps::finite(s - 1), CFG).covers());
            // exhaustive scan of lifetimes through the event simulation
            let scanned = (0..)
                .find(|&tau| {
                    let o = brute_force_frog(graph, &field, &Variant::Standard(Steps::finite(tau)), 1 << 24).unwrap();
                    o.first_visit.iter().all(|t| t.is_finite())
                })
                .unwrap();
            assert_eq!(s, scanned);
        }
    }
}

#[test]
fn cover_time_identities() {
    for (gi, graph) in small_graphs().iter().enumerate() {
        for rep in 0..40 {
            let field = ParticleField::sample(graph, 1.0, 0, 300 + gi as u64, rep);
            let both = susceptibility_and_cover(graph, &field, CFG);
            let s = both.s_value.unwrap();
            let ct = both.ct_value.unwrap();
            assert!(ct >= s);
            let oracle = brute_force_frog(graph, &field, &Variant::Standard(Steps::INFINITY), 1 << 24).unwrap();
            assert_eq!(oracle.first_visit.iter().max().unwrap().get(), Some(ct));
            // max label at τ = S equals the event-driven cover time with lifetime S
            let at_s = activation_times(graph, &field, Steps::finite(s), CFG);
            let ev = brute_force_frog(graph, &field, &Variant::Standard(Steps::finite(s)), 1 << 24).unwrap();
            assert_eq!(at_s.max_label(), *ev.first_visit.iter().max().unwrap());
        }
    }
}

#[test]
fn visited_set_monotone_in_lifetime() {
    let t = g(Family::Torus { d: 2, n: 8 });
    for rep in 0..20 {
        let field = ParticleField::sample(&t, 0.5, 0, 12, rep);
        let mut prev: Vec<Vertex> = vec![];
        for tau in 0..30 {
            let cur = activation_times(&t, &field, Steps::finite(tau), CFG).visited();
            assert!(prev.iter().all(|v| cur.binary_search(v).is_ok()));
            prev = cur;
        }
    }
}

#[test]
fn triangle_relaxation_holds() {
    let c = g(Family::Cycle { n: 12 });
    let field = ParticleField::sample(&c, 1.0, 0, 8, 1);
    let tau = 9;
    let res = activation_times(&c, &field, Steps::finite(tau), CFG);
    let mut run = Realization::new(&c, &field);
    run.set_horizon(tau as u32);
    for x in 0..12 {
        let Some(ax) = res.at[x as usize].get() else { continue };
        let map = run.ambient_map(x).clone();
        for (y, j) in map.entries() {
            assert!(res.at[*y as usize] <= Steps::finite(ax + *j as u64));
        }
    }
}

#[test]
fn susceptibility_decreases_with_density() {
    let c = g(Family::Cycle { n: 64 });
    for rep in 0..30 {
        let full = ParticleField::sample(&c, 2.0, 0, 21, rep);
        let low = full.at_lambda(1.0);
        let s_hi = susceptibility(&c, &full, CFG).s_value.unwrap();
        let s_lo = susceptibility(&c, &low, CFG).s_value.unwrap();
        assert!(s_hi <= s_lo, "rep {rep}: {s_hi} > {s_lo}");
    }
}

#[test]
fn censoring_is_reported() {
    let c = g(Family::Cycle { n: 200 });
    let field = ParticleField::sample(&c, 0.01, 0, 5, 0);
    let tiny = HorizonConfig { initial: 1, cap: 4 };
    let out = susceptibility(&c, &field, tiny);
    assert!(out.censored());
    assert_eq!(out.censored_at, Some(4));
    let ct = cover_time_frog(&c, &field, tiny);
    assert!(ct.censored);
    assert_eq!(ct.value, None);
    let res = activation_times(&c, &field, Steps::INFINITY, tiny);
    assert!(res.censored);
}

#[test]
fn oracle_budget_exceeded() {
    let t = g(Family::Torus { d: 2, n: 6 });
    let field = ParticleField::sample(&t, 3.0, 0, 5, 0);
    let err = brute_force_frog(&t, &field, &Variant::Standard(Steps::finite(50)), 10).unwrap_err();
    assert!(matches!(err, crate::Error::BudgetExceeded { budget: 10 }));
}

#[test]
fn density_predicate() {
    let t = g(Family::Torus { d: 2, n: 6 });
    let part = box_partition(&t, 3).unwrap();
    let all = VisitSet {
        vertices: (0..36).collect(),
        vertex_count: 36,
        variant: Variant::Standard(Steps::ZERO),
        censored: false,
    };
    assert!(is_dense(&all, &part, 1.0).unwrap().dense);
    let none = VisitSet { vertices: vec![], ..all.clone() };
    let r = is_dense(&none, &part, 1e-9).unwrap();
    assert!(!r.dense);
    assert_eq!(r.min_density, 0.0);
    // random subsets against direct per-box counting
    let mut state = 12345u64;
    for _ in 0..50 {
        let vertices: Vec<Vertex> = (0..36)
            .filter(|_| {
                state = crate::rng::mix64(state);
                state % 3 != 0
            })
            .collect();
        let set = VisitSet { vertices: vertices.clone(), ..all.clone() };
        let report = is_dense(&set, &part, 0.6).unwrap();
        let mut direct = true;
        for b in &part.boxes {
            let inside = b.iter().filter(|v| vertices.contains(v)).count();
            direct &= inside as f64 >= 0.6 * b.len() as f64;
        }
        assert_eq!(report.dense, direct);
    }
    let other = box_partition(&g(Family::Torus { d: 2, n: 7 }), 3).unwrap();
    assert!(matches!(is_dense(&all, &other, 0.5), Err(crate::Error::PartitionMismatch(_))));
}

#[test]
fn empty_planted_range_probability() {
    // P[no ambient particle on R_t(ℵ) | |R_t(ℵ)| = i] = e^{-λ i}
    let c = g(Family::Cycle { n: 50 });
    let lambda = 0.15;
    let t = 6;
    let mut by_size: std::collections::BTreeMap<usize, (u32, u32)> = Default::default();
    for rep in 0..20_000 {
        let field = ParticleField::sample(&c, lambda, 0, 31, rep);
        let range = planted_range(&c, &field, t);
        let empty = range.iter().all(|&v| field.count(v) == 0);
        let e = by_size.entry(range.len()).or_default();
        e.0 += 1;
        e.1 += u32::from(empty);
    }
    for (&i, &(total, empty)) in &by_size {
        if total < 1000 {
            continue;
        }
        let p = (-lambda * i as f64).exp();
        let freq = empty as f64 / total as f64;
        let sd = (p * (1.0 - p) / total as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * sd, "i={i}: {freq} vs {p}");
    }
}
