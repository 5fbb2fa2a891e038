use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::verify::{depth_at, oracle_ply};

fn drawing(points: &[(f64, f64)]) -> Drawing {
    points.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

fn disk(x: f64, y: f64, r: f64) -> PlyDisk {
    PlyDisk { owner: 0, center: Point::new(x, y), radius: r }
}

fn checked() -> SweepOptions {
    SweepOptions { check_invariants: true, ..SweepOptions::default() }
}

impl<'o, S: Status> Engine<'o, S> {
    /// Engine with a hand-built queue instead of the derived start/end events.
    fn with_events(disks: Vec<PlyDisk>, events: Vec<SweepEvent>, opts: &'o SweepOptions) -> Self {
        let mut e = Self::new(disks, opts);
        e.queue = events.into_iter().map(Reverse).collect();
        e
    }
}

fn start(disk: usize, x: f64) -> SweepEvent {
    SweepEvent { x, kind: EventKind::Start { disk } }
}

fn end(disk: usize, x: f64) -> SweepEvent {
    SweepEvent { x, kind: EventKind::End { disk } }
}

fn cross(upper: ArcId, lower: ArcId, x: f64) -> SweepEvent {
    SweepEvent { x, kind: EventKind::Intersection { upper, lower, y: 0.0, degenerate: false } }
}

fn top(d: usize) -> ArcId {
    ArcId::new(d, Side::Top)
}

fn bottom(d: usize) -> ArcId {
    ArcId::new(d, Side::Bottom)
}

#[test]
fn equilateral_triangle_has_ply_one() {
    let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    let d = drawing(&[(0.0, 0.0), (2.0, 0.0), (1.0, 3f64.sqrt())]);
    let r = compute_ply_with(&g, &d, &checked()).unwrap();
    assert_eq!(r.ply, 1);
    assert_eq!(r.regions.len(), 3);
    assert_eq!(r.counters.postponed, 0);
    assert_eq!(r.invariant_violations, 0);
}

#[test]
fn unequal_edges_force_overlap() {
    // u(2,0) - v(0,0) - w(-1,0): D_v radius 1 overlaps D_w radius 0.5
    let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    let d = drawing(&[(2.0, 0.0), (0.0, 0.0), (-1.0, 0.0)]);
    assert_eq!(compute_ply(&g, &d).unwrap().ply, 2);
}

#[test]
fn hexagonal_star_matches_oracle() {
    let mut pts = vec![(0.0, 0.0)];
    for i in 0..6 {
        let a = std::f64::consts::TAU * i as f64 / 6.0;
        pts.push((2.0 * a.cos(), 2.0 * a.sin()));
    }
    let g = Graph::new(7, (1..7).map(|v| (0, v))).unwrap();
    let d = drawing(&pts);
    let report = compute_ply_with(&g, &d, &checked()).unwrap();
    assert_eq!(report.ply, oracle_ply(&g, &d).unwrap().0);
    assert_eq!(report.ply, 1);
}

#[test]
fn edgeless_graph_has_ply_one() {
    let g = Graph::new(3, []).unwrap();
    let r = compute_ply(&g, &drawing(&[(0.0, 0.0), (3.0, 1.0), (-2.0, 5.0)])).unwrap();
    assert_eq!(r.ply, 1);
    assert_eq!(r.regions.len(), 3);
    assert_eq!(r.counters.events, 0);
}

#[test]
fn empty_graph_has_ply_zero() {
    let r = compute_ply(&Graph::empty(), &Drawing::default()).unwrap();
    assert_eq!(r.ply, 0);
    assert!(r.regions.is_empty());
}

#[test]
fn non_finite_coordinates_rejected() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let err = compute_ply(&g, &drawing(&[(0.0, f64::INFINITY), (1.0, 0.0)])).unwrap_err();
    assert_eq!(err, GraphError::NonFinite(0));
}

#[test]
fn two_unit_disks_lens() {
    let r = ply_of_disks(&[disk(0.0, 0.0, 1.0), disk(1.0, 0.0, 1.0)], &checked());
    assert_eq!(r.ply, 2);
    assert_eq!(r.counters.intersection, 2);
    assert_eq!(r.regions.len(), 1);
    let p = r.regions[0].point;
    assert!(p.dist(Point::new(0.0, 0.0)) < 1.0 && p.dist(Point::new(1.0, 0.0)) < 1.0);
    assert_eq!(r.regions[0].x_min, 0.0);
    assert_eq!(r.regions[0].x_max, 1.0);
}

#[test]
fn disjoint_disks_one_region_each() {
    let r = ply_of_disks(&[disk(0.0, 0.0, 1.0), disk(5.0, 0.0, 1.0), disk(0.0, 7.0, 2.0)], &checked());
    assert_eq!(r.ply, 1);
    assert_eq!(r.regions.len(), 3);
    assert_eq!(r.counters.start + r.counters.end, 6);
}

#[test]
fn tangent_disks_do_not_overlap() {
    let r = ply_of_disks(&[disk(0.0, 0.0, 1.0), disk(2.0, 0.0, 1.0)], &checked());
    assert_eq!(r.ply, 1);
    assert_eq!(r.counters.intersection, 0);
}

#[test]
fn coincident_disks_stack() {
    let r = ply_of_disks(&[disk(1.0, 1.0, 2.0), disk(1.0, 1.0, 2.0), disk(1.0, 1.0, 2.0)], &checked());
    assert_eq!(r.ply, 3);
    assert_eq!(r.counters.dropped, 0);
}

#[test]
fn nested_disk_adds_ply() {
    let r = ply_of_disks(&[disk(0.0, 0.0, 3.0), disk(0.5, 0.2, 1.0)], &checked());
    assert_eq!(r.ply, 2);
    assert_eq!(r.invariant_violations, 0);
}

#[test]
fn backends_agree_on_trace() {
    let disks = [disk(0.0, 0.0, 1.0), disk(1.0, 0.2, 1.1), disk(0.4, -0.7, 0.8), disk(3.0, 0.0, 0.5)];
    let lin = SweepOptions { backend: StatusBackend::Linear, trace: true, ..checked() };
    let tree = SweepOptions { backend: StatusBackend::Tree, trace: true, ..checked() };
    let a = ply_of_disks(&disks, &lin);
    let b = ply_of_disks(&disks, &tree);
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.ply, 3);
    assert_eq!(a.counters, b.counters);
    assert_eq!(a.regions, b.regions);
}

#[test]
fn postponed_crossing_resolved_by_end() {
    // A above B above C, all disjoint. A fake crossing of A's bottom arc
    // over C's top arc is due before B ends; only B's removal makes the
    // two arcs adjacent.
    let disks = vec![disk(0.0, 4.0, 2.0), disk(0.0, 0.0, 1.0), disk(0.5, -4.0, 2.0)];
    let events = vec![start(0, -2.0), start(1, -1.0), start(2, -1.5), cross(bottom(0), top(2), 0.9), end(1, 1.0)];
    let opts = SweepOptions { trace: true, ..SweepOptions::default() };
    let mut engine = Engine::<LinearStatus>::with_events(disks, events, &opts);
    engine.registry.insert((0, 2));
    let r = engine.run();
    assert_eq!(r.counters.postponed, 1);
    assert_eq!(r.counters.dropped, 0);
    assert_eq!(r.counters.executed, 5);
    assert!(r.trace[3].contains("postponed"), "{:?}", r.trace);
    assert!(r.trace[4].contains("end d1"));
    assert!(r.trace[5].contains("cross b0/t2"));
}

#[test]
fn stale_crossing_is_dropped() {
    let disks = vec![disk(0.0, 4.0, 2.0), disk(0.5, -4.0, 2.0)];
    let events = vec![
        start(0, -2.0),
        start(1, -1.5),
        cross(bottom(0), top(1), 0.0),
        cross(bottom(0), top(1), 0.0),
        end(0, 2.0),
        end(1, 2.5),
    ];
    let opts = SweepOptions::default();
    let mut engine = Engine::<TreeStatus>::with_events(disks, events, &opts);
    engine.registry.insert((0, 1));
    let r = engine.run();
    // The duplicate never matches again and its arcs block both ends, so
    // all three are dropped when the queue runs dry.
    assert_eq!(r.counters.postponed, 3);
    assert_eq!(r.counters.dropped, 3);
    assert_eq!(r.counters.executed, 3);
    assert!(r.low_confidence);
}

#[test]
fn early_end_waits_for_crossing() {
    // Disk 1 pokes through the top of disk 0. Ending disk 0 at x = 0
    // leaves disk 1's bottom arc alone between disk 0's arcs.
    let disks = vec![disk(0.0, 0.0, 1.0), disk(0.2, 0.9, 0.5)];
    let events = vec![start(0, -1.0), start(1, -0.3), end(0, 0.0), end(1, 0.7)];
    let opts = SweepOptions { trace: true, ..checked() };
    let r = Engine::<LinearStatus>::with_events(disks, events, &opts).run();
    assert!(r.counters.postponed >= 1, "{:?}", r.trace);
    assert_eq!(r.counters.dropped, 0);
    assert_eq!(r.invariant_violations, 0);
}

#[test]
fn consistent_run_never_postpones() {
    let r = ply_of_disks(&[disk(0.0, 0.0, 1.0), disk(1.0, 0.3, 1.0), disk(0.5, 1.0, 0.7)], &checked());
    assert_eq!(r.counters.postponed, 0);
    assert_eq!(r.counters.dropped, 0);
}

fn random_drawing(seed: u64, n: usize, m: usize, side: f64) -> (Graph, Drawing) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let m = m.min(n * (n - 1) / 2);
    while edges.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && !edges.contains(&(u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }
    let pts = (0..n).map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side))).collect();
    (Graph::new(n, edges).unwrap(), pts)
}

#[test]
fn report_is_deterministic() {
    let (g, d) = random_drawing(3, 40, 70, 1000.0);
    let a = compute_ply(&g, &d).unwrap();
    let b = compute_ply(&g, &d).unwrap();
    assert_eq!(a.ply, b.ply);
    assert_eq!(a.counters, b.counters);
    assert_eq!(a.regions, b.regions);
}

#[test]
fn witness_points_have_reported_depth() {
    for seed in 0..40 {
        let (g, d) = random_drawing(seed, 30, 45, 1000.0);
        let disks = derive_disks(&g, &d).unwrap();
        let r = compute_ply(&g, &d).unwrap();
        assert!(!r.regions.is_empty());
        for region in &r.regions {
            assert_eq!(depth_at(&disks, region.point, EPS), r.ply, "seed {seed}");
            assert!(region.x_min <= region.point.x && region.point.x <= region.x_max);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sweep_matches_oracle(seed in any::<u64>(), n in 2usize..50, density in 0.5f64..4.0) {
        let max_m = n * (n - 1) / 2;
        let m = ((density * n as f64) as usize).min(max_m);
        let (g, d) = random_drawing(seed, n, m, 1000.0);
        let r = compute_ply_with(&g, &d, &checked()).unwrap();
        let (oracle, _) = oracle_ply(&g, &d).unwrap();
        prop_assert_eq!(r.invariant_violations, 0);
        prop_assert_eq!(r.counters.dropped, 0);
        prop_assert_eq!(r.ply, oracle);
        let positive = derive_disks(&g, &d).unwrap().iter().filter(|x| x.radius > 0.0).count() as u64;
        prop_assert_eq!(r.counters.start + r.counters.end, 2 * positive);
        prop_assert!(r.ply <= g.vertex_count());
    }

    #[test]
    fn backends_agree(seed in any::<u64>(), n in 2usize..40) {
        let (g, d) = random_drawing(seed, n, n * 3 / 2, 100.0);
        let disks = derive_disks(&g, &d).unwrap();
        let a = ply_of_disks(&disks, &SweepOptions { backend: StatusBackend::Linear, ..checked() });
        let b = ply_of_disks(&disks, &SweepOptions { backend: StatusBackend::Tree, ..checked() });
        prop_assert_eq!(a.ply, b.ply);
        prop_assert_eq!(a.counters, b.counters);
        prop_assert_eq!(a.regions, b.regions);
    }
}
