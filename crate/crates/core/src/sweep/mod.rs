//! Plane-sweep computation of the ply number.
//!
//! Each disk contributes a Top and a Bottom halfcircle to a vertical status
//! structure. Events are processed left to right: a start inserts both arcs
//! of a disk, an end removes them, and a crossing of two boundary circles
//! swaps the two arcs involved. Crossings for a pair of disks are computed
//! once, the first time any of their arcs become neighbors.
//!
//! Floating-point drift can make an event inconsistent with the status (for
//! example a swap of arcs that are not adjacent). Such an event is postponed:
//! the queue is scanned forward for the nearest consistent event, which is
//! executed, and the postponed one is retried. Events that can never become
//! consistent are dropped and counted.

mod circles;
mod event;
mod regions;
mod status;
mod tree;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::geometry::{Point, EPS};
use crate::graph::{derive_disks, Drawing, Graph, GraphError, PlyDisk};

pub use circles::{boundaries_cross, circle_pair_intersections, crossings, Crossing};
pub use event::{EventKind, SweepEvent};
pub use regions::WitnessRegion;
pub use status::{ArcId, LinearStatus, Side, Status};
pub use tree::TreeStatus;

use regions::RegionTracker;

/// Status structures with fewer disks than this use the array backend.
pub const LINEAR_STATUS_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatusBackend {
    #[default]
    Auto,
    Linear,
    Tree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    pub eps: f64,
    /// Recount every ply from scratch after each executed event.
    pub check_invariants: bool,
    /// Collect one line per processed event.
    pub trace: bool,
    pub backend: StatusBackend,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { eps: EPS, check_invariants: false, trace: false, backend: StatusBackend::Auto }
    }
}

/// Event statistics. Every dequeued event is either executed or dropped, so
/// `events == executed + dropped` and `start + end == 2 * disks`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounters {
    pub events: u64,
    pub executed: u64,
    pub start: u64,
    pub end: u64,
    pub intersection: u64,
    pub postponed: u64,
    pub dropped: u64,
    pub degenerate: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlyReport {
    pub ply: usize,
    pub regions: Vec<WitnessRegion>,
    pub counters: EventCounters,
    pub elapsed_ms: f64,
    /// Set when events had to be dropped; the ply may be underestimated.
    pub low_confidence: bool,
    /// Prefix-law recount failures (only counted with `check_invariants`).
    pub invariant_violations: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
}

pub fn compute_ply(graph: &Graph, drawing: &Drawing) -> Result<PlyReport, GraphError> {
    compute_ply_with(graph, drawing, &SweepOptions::default())
}

pub fn compute_ply_with(graph: &Graph, drawing: &Drawing, opts: &SweepOptions) -> Result<PlyReport, GraphError> {
    let disks = derive_disks(graph, drawing)?;
    Ok(ply_of_disks(&disks, opts))
}

/// Ply of an arbitrary disk set. Radius-0 disks take no part in the sweep
/// but make the ply at least 1.
pub fn ply_of_disks(disks: &[PlyDisk], opts: &SweepOptions) -> PlyReport {
    let clock = Clock::start();
    let mut active: Vec<PlyDisk> = disks.iter().copied().filter(|d| d.radius > 0.0).collect();
    active.sort_by(|a, b| a.min_x().total_cmp(&b.min_x()).then(b.radius.total_cmp(&a.radius)));
    let use_tree = match opts.backend {
        StatusBackend::Auto => active.len() >= LINEAR_STATUS_LIMIT,
        StatusBackend::Linear => false,
        StatusBackend::Tree => true,
    };
    let mut report = if use_tree {
        Engine::<TreeStatus>::new(active.clone(), opts).run()
    } else {
        Engine::<LinearStatus>::new(active.clone(), opts).run()
    };
    if !disks.is_empty() && report.ply == 0 {
        report.ply = 1;
        report.regions = disks
            .iter()
            .map(|d| WitnessRegion { x_min: d.center.x, x_max: d.center.x, point: d.center, ply: 1 })
            .collect();
    }
    report.elapsed_ms = clock.elapsed_ms();
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DiskState {
    Pending,
    Active,
    Done,
}

struct Engine<'o, S> {
    disks: Vec<PlyDisk>,
    state: Vec<DiskState>,
    status: S,
    queue: BinaryHeap<Reverse<SweepEvent>>,
    registry: HashSet<(u32, u32)>,
    sweep_x: f64,
    counters: EventCounters,
    regions: RegionTracker,
    violations: u64,
    trace: Vec<String>,
    opts: &'o SweepOptions,
}

/// Whether the leftmost point `p` of a starting disk goes below `arc`.
/// A point on the arc's circle (within `eps`) goes just below it, and the
/// crossing at that point then lifts the new Top arc. A disk sharing its
/// leftmost point with another one starts inside it (larger disks start
/// first at equal x).
fn starts_below(disk: &PlyDisk, arc: ArcId, p: Point, eps: f64) -> bool {
    let d = disk.center.dist(p);
    let on_circle = (d - disk.radius).abs() <= eps;
    if on_circle && (p.x - disk.min_x()).abs() <= eps && (p.y - disk.center.y).abs() <= eps {
        return arc.side() == Side::Top;
    }
    match arc.side() {
        Side::Top => on_circle || p.y <= disk.center.y || d < disk.radius,
        Side::Bottom => p.y < disk.center.y && (on_circle || d > disk.radius),
    }
}

impl<'o, S: Status> Engine<'o, S> {
    fn new(disks: Vec<PlyDisk>, opts: &'o SweepOptions) -> Self {
        let n = disks.len();
        let mut queue = BinaryHeap::with_capacity(2 * n);
        for (i, d) in disks.iter().enumerate() {
            queue.push(Reverse(SweepEvent { x: d.min_x(), kind: EventKind::Start { disk: i } }));
            queue.push(Reverse(SweepEvent { x: d.max_x(), kind: EventKind::End { disk: i } }));
        }
        Self {
            state: vec![DiskState::Pending; n],
            status: S::with_arc_capacity(2 * n),
            queue,
            registry: HashSet::new(),
            sweep_x: f64::NEG_INFINITY,
            counters: EventCounters::default(),
            regions: RegionTracker::default(),
            violations: 0,
            trace: Vec::new(),
            opts,
            disks,
        }
    }

    fn run(mut self) -> PlyReport {
        let mut deferred: Vec<SweepEvent> = Vec::new();
        while let Some(Reverse(ev)) = self.queue.pop() {
            if self.hopeless(&ev) {
                self.drop_event(ev);
            } else if self.consistent(&ev) {
                self.execute(ev);
                self.retry(&mut deferred);
            } else {
                self.counters.postponed += 1;
                if self.opts.trace {
                    self.trace.push(format!("{ev} postponed"));
                }
                deferred.push(ev);
            }
            if deferred.is_empty() {
                self.observe();
            }
        }
        for ev in deferred {
            self.drop_event(ev);
        }
        let ply = self.regions.best().max(0) as usize;
        let regions = std::mem::take(&mut self.regions).finish(&self.disks);
        PlyReport {
            ply,
            regions,
            low_confidence: self.counters.dropped > 0,
            counters: self.counters,
            elapsed_ms: 0.0,
            invariant_violations: self.violations,
            trace: self.trace,
        }
    }

    /// Retries postponed events, oldest first, until none can proceed.
    fn retry(&mut self, deferred: &mut Vec<SweepEvent>) {
        loop {
            let mut progressed = false;
            let mut i = 0;
            while i < deferred.len() {
                if self.hopeless(&deferred[i]) {
                    let ev = deferred.remove(i);
                    self.drop_event(ev);
                    continue;
                }
                if self.consistent(&deferred[i]) {
                    let ev = deferred.remove(i);
                    self.execute(ev);
                    progressed = true;
                    break;
                }
                i += 1;
            }
            if !progressed {
                break;
            }
        }
    }

    fn observe(&mut self) {
        let next = self.queue.peek().map(|Reverse(e)| e.x);
        if let Some(x1) = next {
            if x1 > self.sweep_x + self.opts.eps {
                self.regions.observe(&self.status, self.sweep_x, x1);
            }
        }
    }

    fn count_kind(&mut self, ev: &SweepEvent) {
        self.counters.events += 1;
        match ev.kind {
            EventKind::Start { .. } => self.counters.start += 1,
            EventKind::End { .. } => self.counters.end += 1,
            EventKind::Intersection { .. } => self.counters.intersection += 1,
        }
    }

    fn drop_event(&mut self, ev: SweepEvent) {
        self.count_kind(&ev);
        self.counters.dropped += 1;
        if self.opts.trace {
            self.trace.push(format!("{ev} dropped"));
        }
    }

    /// An event that no future state can make consistent.
    fn hopeless(&self, ev: &SweepEvent) -> bool {
        match ev.kind {
            EventKind::Start { disk } => self.state[disk] != DiskState::Pending,
            EventKind::End { disk } => self.state[disk] != DiskState::Active,
            EventKind::Intersection { upper, lower, .. } => {
                self.state[upper.disk()] != DiskState::Active || self.state[lower.disk()] != DiskState::Active
            }
        }
    }

    fn consistent(&self, ev: &SweepEvent) -> bool {
        match ev.kind {
            EventKind::Start { disk } => self.state[disk] == DiskState::Pending,
            EventKind::End { disk } => self.end_consistent(disk),
            EventKind::Intersection { upper, lower, .. } => self.status.below(upper) == Some(lower),
        }
    }

    /// The disk's Top arc must be above its Bottom arc, and any arcs left
    /// between them must come in complete pairs.
    fn end_consistent(&self, disk: usize) -> bool {
        let top = ArcId::new(disk, Side::Top);
        let bottom = ArcId::new(disk, Side::Bottom);
        let mut between: Vec<usize> = Vec::new();
        let mut cur = self.status.below(top);
        loop {
            match cur {
                None => return false,
                Some(a) if a == bottom => break,
                Some(a) => {
                    between.push(a.disk());
                    cur = self.status.below(a);
                }
            }
        }
        if between.is_empty() {
            return true;
        }
        between.sort_unstable();
        between.chunks(2).all(|c| c.len() == 2 && c[0] == c[1])
    }

    fn execute(&mut self, ev: SweepEvent) {
        self.count_kind(&ev);
        self.counters.executed += 1;
        self.sweep_x = self.sweep_x.max(ev.x);
        match ev.kind {
            EventKind::Start { disk } => self.handle_start(disk),
            EventKind::End { disk } => self.handle_end(disk),
            EventKind::Intersection { upper, lower, .. } => self.handle_intersection(upper, lower),
        }
        if self.opts.check_invariants && self.status.check_prefix_law().is_err() {
            self.violations += 1;
        }
        if self.opts.trace {
            let max = self.status.max_ply();
            self.trace.push(format!("{ev} max={max}"));
        }
    }

    fn handle_start(&mut self, disk: usize) {
        let top = ArcId::new(disk, Side::Top);
        let bottom = ArcId::new(disk, Side::Bottom);
        let d = self.disks[disk];
        let p = Point::new(d.min_x(), d.center.y);
        let eps = self.opts.eps;
        let disks = &self.disks;
        self.status.insert_pair(top, bottom, |a| starts_below(&disks[a.disk()], a, p, eps));
        self.state[disk] = DiskState::Active;
        let above = self.status.above(top);
        let below = self.status.below(bottom);
        if let Some(a) = above {
            self.on_adjacent(a, top);
        }
        if let Some(b) = below {
            self.on_adjacent(bottom, b);
        }
    }

    fn handle_end(&mut self, disk: usize) {
        let top = ArcId::new(disk, Side::Top);
        let bottom = ArcId::new(disk, Side::Bottom);
        let above = self.status.above(top);
        let below = self.status.below(bottom);
        let first = self.status.below(top).filter(|&a| a != bottom);
        let last = self.status.above(bottom).filter(|&a| a != top);
        self.status.remove_pair(top, bottom);
        self.state[disk] = DiskState::Done;
        match (first, last) {
            (Some(f), Some(l)) => {
                if let Some(a) = above {
                    self.on_adjacent(a, f);
                }
                if let Some(b) = below {
                    self.on_adjacent(l, b);
                }
            }
            _ => {
                if let (Some(a), Some(b)) = (above, below) {
                    self.on_adjacent(a, b);
                }
            }
        }
    }

    fn handle_intersection(&mut self, upper: ArcId, lower: ArcId) {
        self.status.swap_adjacent(upper, lower);
        if let Some(a) = self.status.above(lower) {
            self.on_adjacent(a, lower);
        }
        if let Some(b) = self.status.below(upper) {
            self.on_adjacent(upper, b);
        }
    }

    /// Schedules the crossings of two disks the first time any of their
    /// arcs become neighbors.
    fn on_adjacent(&mut self, upper: ArcId, lower: ArcId) {
        let (a, b) = (upper.disk(), lower.disk());
        if a == b {
            return;
        }
        let key = (a.min(b) as u32, a.max(b) as u32);
        if !self.registry.insert(key) {
            return;
        }
        let eps = self.opts.eps;
        for c in crossings(a, &self.disks[a], b, &self.disks[b], eps) {
            // A crossing at (or numerically just behind) the sweep line is
            // still pending only if the arcs have not traded places yet.
            let pending = c.point.x > self.sweep_x + eps
                || (self.status.contains(c.upper)
                    && self.status.contains(c.lower)
                    && self.status.is_above(c.upper, c.lower));
            if !pending {
                continue;
            }
            if c.degenerate {
                self.counters.degenerate += 1;
            }
            self.queue.push(Reverse(SweepEvent {
                x: c.point.x,
                kind: EventKind::Intersection {
                    upper: c.upper,
                    lower: c.lower,
                    y: c.point.y,
                    degenerate: c.degenerate,
                },
            }));
        }
    }
}

#[cfg(test)]
mod tests;
