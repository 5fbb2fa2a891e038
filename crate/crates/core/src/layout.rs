//! Drawing generators and ply-aware refinement.
//!
//! `organic` is a plain Fruchterman–Reingold embedder started from the
//! random layout with the same seed. [`Refiner`] continues from any drawing
//! with FR forces plus a repulsion between overlapping ply disks, evaluates
//! the ply every few iterations and keeps the best drawing seen.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::geometry::{Point, EPS};
use crate::graph::{derive_disks, Drawing, Graph, PlyDisk};
use crate::sweep::{ply_of_disks, PlyReport, SweepOptions};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Random,
    Circular,
    #[default]
    Organic,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "circular" => Ok(Self::Circular),
            "organic" => Ok(Self::Organic),
            _ => Err(format!("unknown layout {s:?} (random, circular, organic)")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Random => "random",
            Self::Circular => "circular",
            Self::Organic => "organic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub algorithm: Algorithm,
    pub width: f64,
    pub height: f64,
    pub seed: u64,
    /// Circle radius of the circular layout.
    pub radius: f64,
    /// Organic: number of FR iterations.
    pub iterations: u32,
    /// Organic: initial displacement cap.
    pub temperature: f64,
    /// Organic: per-iteration temperature factor.
    pub cooling: f64,
    /// Organic: ideal edge length.
    pub k: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Organic,
            width: 1000.0,
            height: 1000.0,
            seed: 0,
            radius: 400.0,
            iterations: 500,
            temperature: 100.0,
            cooling: 0.99,
            k: 50.0,
        }
    }
}

impl LayoutConfig {
    pub fn with(algorithm: Algorithm, seed: u64) -> Self {
        Self { algorithm, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be positive"))
            }
        };
        positive(self.width, "width")?;
        positive(self.height, "height")?;
        positive(self.radius, "radius")?;
        positive(self.k, "k")?;
        if !(self.temperature >= 0.0 && (0.0..=1.0).contains(&self.cooling)) {
            return Err("temperature must be >= 0 and cooling in [0, 1]".into());
        }
        Ok(())
    }
}

pub fn layout(graph: &Graph, cfg: &LayoutConfig) -> Drawing {
    match cfg.algorithm {
        Algorithm::Random => random(graph, cfg),
        Algorithm::Circular => circular(graph, cfg),
        Algorithm::Organic => organic(graph, cfg),
    }
}

/// Uniform positions in `[0, width) × [0, height)`.
pub fn random(graph: &Graph, cfg: &LayoutConfig) -> Drawing {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..graph.vertex_count())
        .map(|_| Point::new(rng.random_range(0.0..cfg.width), rng.random_range(0.0..cfg.height)))
        .collect()
}

/// Vertex `i` at angle `2πi/n` on a circle centered in the box.
pub fn circular(graph: &Graph, cfg: &LayoutConfig) -> Drawing {
    let n = graph.vertex_count();
    let c = Point::new(cfg.width / 2.0, cfg.height / 2.0);
    (0..n)
        .map(|i| {
            let a = TAU * i as f64 / n as f64;
            Point::new(c.x + cfg.radius * a.cos(), c.y + cfg.radius * a.sin())
        })
        .collect()
}

pub fn organic(graph: &Graph, cfg: &LayoutConfig) -> Drawing {
    let mut d = random(graph, cfg);
    let mut disp = vec![Point::default(); graph.vertex_count()];
    let mut t = cfg.temperature;
    for _ in 0..cfg.iterations {
        disp.iter_mut().for_each(|p| *p = Point::default());
        fr_forces(graph, d.positions(), cfg.k, 1.0, 1.0, &mut disp);
        apply(d.positions_mut(), &disp, t);
        t *= cfg.cooling;
    }
    d
}

/// Direction for coincident points, deterministic in the pair.
fn nudge(i: usize, j: usize) -> Point {
    let a = (i * 7919 + j * 104729) as f64;
    Point::new(a.cos(), a.sin())
}

/// Adds Fruchterman–Reingold forces: `k²/d` repulsion between all pairs,
/// `d²/k` attraction along edges.
fn fr_forces(graph: &Graph, pos: &[Point], k: f64, w_rep: f64, w_attr: f64, disp: &mut [Point]) {
    let n = pos.len();
    let k2 = k * k;
    let tiny = 1e-9 * k;
    if w_rep > 0.0 {
        for i in 0..n {
            for j in i + 1..n {
                let delta = pos[i] - pos[j];
                let d = delta.dist(Point::default());
                let (dir, d) = if d > tiny { (delta * (1.0 / d), d) } else { (nudge(i, j), tiny) };
                let f = dir * (w_rep * k2 / d);
                disp[i] = disp[i] + f;
                disp[j] = disp[j] - f;
            }
        }
    }
    if w_attr > 0.0 {
        for &(u, v) in graph.edges() {
            let delta = pos[u] - pos[v];
            let d = delta.dist(Point::default());
            if d > 0.0 {
                let f = delta * (w_attr * d / k);
                disp[u] = disp[u] - f;
                disp[v] = disp[v] + f;
            }
        }
    }
}

/// Moves every vertex along its displacement, capped at `t`.
fn apply(pos: &mut [Point], disp: &[Point], t: f64) {
    for (p, d) in pos.iter_mut().zip(disp) {
        let len = d.dist(Point::default());
        if len > 0.0 && len.is_finite() {
            *p = *p + *d * (len.min(t) / len);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineConfig {
    /// Wall-clock budget; ignored when `iterations` is set.
    pub budget_ms: u64,
    /// Fixed iteration budget for reproducible runs.
    pub iterations: Option<u64>,
    /// Iterations between ply evaluations.
    pub period: u64,
    pub k: f64,
    pub w_rep: f64,
    pub w_attr: f64,
    /// Disk overlap repulsion weight.
    pub w_o: f64,
    /// Overlap force factor for vertices whose disks cover a max-ply point.
    pub witness_boost: f64,
    pub temperature: f64,
    pub cooling: f64,
    pub min_temperature: f64,
    /// Evaluations without improvement before restarting from the best
    /// drawing with the max-ply vertices shaken.
    pub patience: u32,
    pub seed: u64,
    pub equal_edge: bool,
    /// Equal-edge target length; defaults to the mean edge length.
    pub target_length: Option<f64>,
    pub stiffness: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            budget_ms: 5000,
            iterations: None,
            period: 25,
            k: 50.0,
            w_rep: 1.0,
            w_attr: 1.0,
            w_o: 1.0,
            witness_boost: 2.0,
            temperature: 10.0,
            cooling: 0.98,
            min_temperature: 0.5,
            patience: 6,
            seed: 0,
            equal_edge: false,
            target_length: None,
            stiffness: 0.5,
        }
    }
}

impl RefineConfig {
    pub fn with_iterations(iterations: u64) -> Self {
        Self { iterations: Some(iterations), ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.period == 0 {
            return Err("period must be >= 1".into());
        }
        let weights = [self.w_rep, self.w_attr, self.w_o, self.witness_boost, self.stiffness, self.temperature];
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err("weights must be non-negative".into());
        }
        if !(self.k > 0.0) {
            return Err("k must be positive".into());
        }
        if self.target_length.is_some_and(|l| !(l > 0.0 && l.is_finite())) {
            return Err("target_length must be positive".into());
        }
        Ok(())
    }

    fn exhausted(&self, iteration: u64, clock: &Clock) -> bool {
        match self.iterations {
            Some(max) => iteration >= max,
            // no clock on wasm32: treat the budget as an iteration count
            None if cfg!(target_arch = "wasm32") => iteration >= self.budget_ms,
            None => clock.elapsed_ms() >= self.budget_ms as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: u64,
    pub ply: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualEdgeReport {
    pub target_length: f64,
    pub converged: bool,
    pub iterations: u64,
    /// Largest `|len - l| / l` over all edges of the result.
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub drawing: Drawing,
    pub ply: usize,
    pub report: PlyReport,
    pub trajectory: Vec<TrajectoryPoint>,
    pub fallback: bool,
    pub iterations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equal_edge: Option<EqualEdgeReport>,
}

/// One ply evaluation made by the [`Refiner`].
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub iteration: u64,
    pub ply: usize,
    pub improved: bool,
}

fn evaluate(graph: &Graph, drawing: &Drawing) -> (PlyReport, Vec<PlyDisk>) {
    let disks = derive_disks(graph, drawing).expect("drawing matches graph");
    (ply_of_disks(&disks, &SweepOptions::default()), disks)
}

/// Owners of the disks covering any max-ply witness point.
fn witness_owners(report: &PlyReport, disks: &[PlyDisk]) -> Vec<bool> {
    let mut hot = vec![false; disks.len()];
    for r in &report.regions {
        for d in disks {
            if d.strictly_contains(r.point, EPS) {
                hot[d.owner] = true;
            }
        }
    }
    hot
}

/// Objective for keep-best: ply first, then the number of max-ply regions.
fn score(report: &PlyReport) -> (usize, usize) {
    (report.ply, report.regions.len())
}

/// Stepwise ply refinement; drives [`refine_ply`] and the interactive
/// session loop.
pub struct Refiner<'g> {
    graph: &'g Graph,
    cfg: RefineConfig,
    current: Drawing,
    best: Drawing,
    best_report: PlyReport,
    hot: Vec<bool>,
    disp: Vec<Point>,
    temperature: f64,
    iteration: u64,
    stall: u32,
    rng: ChaCha8Rng,
    trajectory: Vec<TrajectoryPoint>,
}

impl<'g> Refiner<'g> {
    pub fn new(graph: &'g Graph, drawing: Drawing, cfg: RefineConfig) -> Self {
        let (report, disks) = evaluate(graph, &drawing);
        let hot = witness_owners(&report, &disks);
        let trajectory = vec![TrajectoryPoint { iteration: 0, ply: report.ply }];
        Self {
            graph,
            temperature: cfg.temperature,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            disp: vec![Point::default(); graph.vertex_count()],
            current: drawing.clone(),
            best: drawing,
            best_report: report,
            hot,
            iteration: 0,
            stall: 0,
            trajectory,
            cfg,
        }
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn current(&self) -> &Drawing {
        &self.current
    }

    pub fn best(&self) -> (&Drawing, &PlyReport) {
        (&self.best, &self.best_report)
    }

    /// One force iteration; every `period` iterations the ply is evaluated
    /// and returned.
    pub fn step(&mut self) -> Option<Evaluation> {
        let pos = self.current.positions();
        self.disp.iter_mut().for_each(|p| *p = Point::default());
        fr_forces(self.graph, pos, self.cfg.k, self.cfg.w_rep, self.cfg.w_attr, &mut self.disp);
        if self.cfg.w_o > 0.0 {
            let disks = derive_disks(self.graph, &self.current).expect("drawing matches graph");
            overlap_forces(&disks, &self.hot, self.cfg.w_o, self.cfg.witness_boost, &mut self.disp);
        }
        apply(self.current.positions_mut(), &self.disp, self.temperature);
        self.temperature = (self.temperature * self.cfg.cooling).max(self.cfg.min_temperature);
        self.iteration += 1;
        if !self.iteration.is_multiple_of(self.cfg.period) {
            return None;
        }
        Some(self.evaluate_current())
    }

    fn evaluate_current(&mut self) -> Evaluation {
        let (report, disks) = evaluate(self.graph, &self.current);
        self.trajectory.push(TrajectoryPoint { iteration: self.iteration, ply: report.ply });
        let ply = report.ply;
        let improved = score(&report) < score(&self.best_report);
        if improved {
            self.best = self.current.clone();
            self.best_report = report;
            self.stall = 0;
            self.hot = witness_owners(&self.best_report, &disks);
        } else {
            self.hot = witness_owners(&report, &disks);
            self.stall += 1;
            if self.stall >= self.cfg.patience {
                self.restart();
            }
        }
        Evaluation { iteration: self.iteration, ply, improved }
    }

    /// Back to the best drawing, with the vertices around max-ply points
    /// moved by up to half an ideal edge length.
    fn restart(&mut self) {
        self.stall = 0;
        self.current = self.best.clone();
        let disks = derive_disks(self.graph, &self.current).expect("drawing matches graph");
        self.hot = witness_owners(&self.best_report, &disks);
        let reach = 0.5 * self.cfg.k;
        for v in 0..self.current.len() {
            if self.hot[v] {
                let a = self.rng.random_range(0.0..TAU);
                let r = self.rng.random_range(0.0..reach);
                let p = self.current.position(v);
                self.current.set_position(v, Point::new(p.x + r * a.cos(), p.y + r * a.sin()));
            }
        }
        self.temperature = self.cfg.temperature;
    }

    pub fn finish(self) -> MinimizeResult {
        MinimizeResult {
            ply: self.best_report.ply,
            drawing: self.best,
            report: self.best_report,
            trajectory: self.trajectory,
            fallback: false,
            iterations: self.iteration,
            equal_edge: None,
        }
    }
}

/// `w_o·(r_u + r_v − d)` pushing the centers of overlapping disks apart,
/// scaled by `boost` on the side of a hot vertex.
fn overlap_forces(disks: &[PlyDisk], hot: &[bool], w_o: f64, boost: f64, disp: &mut [Point]) {
    let mut order: Vec<usize> = (0..disks.len()).filter(|&i| disks[i].radius > 0.0).collect();
    order.sort_by(|&a, &b| disks[a].min_x().total_cmp(&disks[b].min_x()));
    for (i, &a) in order.iter().enumerate() {
        let da = disks[a];
        for &b in &order[i + 1..] {
            let db = disks[b];
            if db.min_x() >= da.max_x() {
                break;
            }
            let delta = da.center - db.center;
            let d = delta.dist(Point::default());
            let overlap = da.radius + db.radius - d;
            if overlap <= EPS {
                continue;
            }
            let dir = if d > 0.0 { delta * (1.0 / d) } else { nudge(da.owner, db.owner) };
            let f = dir * (w_o * overlap);
            let (ka, kb) = (if hot[da.owner] { boost } else { 1.0 }, if hot[db.owner] { boost } else { 1.0 });
            disp[da.owner] = disp[da.owner] + f * ka;
            disp[db.owner] = disp[db.owner] - f * kb;
        }
    }
}

/// Ply-aware spring refinement with keep-best evaluation. A zero budget
/// returns the input drawing.
pub fn refine_ply(graph: &Graph, drawing: &Drawing, cfg: &RefineConfig) -> MinimizeResult {
    if cfg.equal_edge {
        return equal_edge_mode(graph, drawing, cfg);
    }
    let clock = Clock::start();
    let mut r = Refiner::new(graph, drawing.clone(), cfg.clone());
    if graph.vertex_count() > 1 {
        while !cfg.exhausted(r.iteration(), &clock) {
            r.step();
        }
    }
    r.finish()
}

fn mean_edge_length(graph: &Graph, pos: &[Point]) -> f64 {
    if graph.edge_count() == 0 {
        return 0.0;
    }
    graph.edges().iter().map(|&(u, v)| pos[u].dist(pos[v])).sum::<f64>() / graph.edge_count() as f64
}

fn max_deviation(graph: &Graph, pos: &[Point], l: f64) -> f64 {
    graph.edges().iter().map(|&(u, v)| (pos[u].dist(pos[v]) - l).abs() / l).fold(0.0, f64::max)
}

/// Every edge a stiff spring of length `l`, every non-adjacent pair pushed
/// to distance at least `l`. Converged means the largest move stayed below
/// `1e-6·l` for 50 consecutive iterations; after that the iteration keeps
/// polishing until moves stall, so an exactly realizable drawing reaches
/// equal lengths to rounding precision.
pub fn equal_edge_mode(graph: &Graph, drawing: &Drawing, cfg: &RefineConfig) -> MinimizeResult {
    let clock = Clock::start();
    let mut d = drawing.clone();
    let n = graph.vertex_count();
    let l = cfg.target_length.unwrap_or_else(|| mean_edge_length(graph, d.positions())).max(f64::MIN_POSITIVE);
    let s = cfg.stiffness.clamp(0.0, 1.0);
    let mut quiet = 0u32;
    let mut converged = false;
    let mut iteration = 0u64;
    let mut trajectory = Vec::new();
    let mut disp = vec![Point::default(); n];
    let mut weight = vec![0.0f64; n];
    let mut last_max = f64::INFINITY;
    let mut flat = 0u32;
    while n > 1 && graph.edge_count() > 0 && !cfg.exhausted(iteration, &clock) {
        disp.iter_mut().for_each(|p| *p = Point::default());
        weight.iter_mut().for_each(|w| *w = 1.0);
        let pos = d.positions();
        for u in 0..n {
            for v in u + 1..n {
                let adjacent = graph.has_edge(u, v);
                let delta = pos[v] - pos[u];
                let dist = delta.dist(Point::default());
                if !adjacent && dist >= l {
                    continue;
                }
                let dir = if dist > 0.0 { delta * (1.0 / dist) } else { nudge(u, v) };
                // positive pulls together
                let f = dir * (0.5 * (dist - l));
                disp[u] = disp[u] + f;
                disp[v] = disp[v] - f;
                weight[u] += 1.0;
                weight[v] += 1.0;
            }
        }
        let mut max_move = 0.0f64;
        for (v, p) in d.positions_mut().iter_mut().enumerate() {
            let m = disp[v] * (s * 2.0 / weight[v]);
            max_move = max_move.max(m.dist(Point::default()));
            *p = *p + m;
        }
        iteration += 1;
        if iteration.is_multiple_of(cfg.period) {
            let (report, _) = evaluate(graph, &d);
            trajectory.push(TrajectoryPoint { iteration, ply: report.ply });
        }
        if max_move < 1e-6 * l {
            quiet += 1;
            if quiet >= 50 {
                converged = true;
            }
        } else {
            quiet = 0;
        }
        if converged {
            if max_move >= last_max {
                flat += 1;
            } else {
                flat = 0;
            }
            if max_move <= 1e-14 * l || flat >= 50 {
                break;
            }
        }
        last_max = max_move;
    }
    let (report, _) = evaluate(graph, &d);
    trajectory.push(TrajectoryPoint { iteration, ply: report.ply });
    let equal_edge = Some(EqualEdgeReport {
        target_length: l,
        converged: converged || graph.edge_count() == 0 || n <= 1,
        iterations: iteration,
        max_deviation: if graph.edge_count() > 0 { max_deviation(graph, d.positions(), l) } else { 0.0 },
    });
    MinimizeResult {
        ply: report.ply,
        drawing: d,
        report,
        trajectory,
        fallback: false,
        iterations: iteration,
        equal_edge,
    }
}

/// Start layout, refinement, and a circular fallback whenever the best
/// ply exceeds `⌈n/2⌉`.
pub fn minimize(graph: &Graph, start: &LayoutConfig, refine: &RefineConfig) -> MinimizeResult {
    let n = graph.vertex_count();
    if n == 0 {
        let (report, _) = evaluate(graph, &Drawing::default());
        return MinimizeResult {
            drawing: Drawing::default(),
            ply: 0,
            report,
            trajectory: vec![TrajectoryPoint { iteration: 0, ply: 0 }],
            fallback: false,
            iterations: 0,
            equal_edge: None,
        };
    }
    let initial = layout(graph, start);
    let mut result = refine_ply(graph, &initial, refine);
    circular_fallback(graph, start, &mut result);
    result
}

/// Swaps in the circular layout when `result` is above `⌈n/2⌉` and the
/// circle does better. Returns whether it did.
pub fn circular_fallback(graph: &Graph, cfg: &LayoutConfig, result: &mut MinimizeResult) -> bool {
    if result.ply <= graph.vertex_count().div_ceil(2) {
        return false;
    }
    let circ = circular(graph, cfg);
    let (report, _) = evaluate(graph, &circ);
    result.iterations += 1;
    result.trajectory.push(TrajectoryPoint { iteration: result.iterations, ply: report.ply });
    if report.ply < result.ply {
        result.ply = report.ply;
        result.drawing = circ;
        result.report = report;
        result.fallback = true;
    }
    result.fallback
}
