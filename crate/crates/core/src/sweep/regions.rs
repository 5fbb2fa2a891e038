//! Bookkeeping for the places where the maximum ply is attained.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::graph::PlyDisk;

use super::status::{ArcId, Side, Status};

/// A stretch of the sweep over which one face of the disk arrangement
/// carried the maximum ply, with a point inside that face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRegion {
    pub x_min: f64,
    pub x_max: f64,
    pub point: Point,
    pub ply: usize,
}

#[derive(Clone, Copy, Debug)]
struct Slab {
    x0: f64,
    x1: f64,
    upper: ArcId,
    lower: ArcId,
}

#[derive(Clone, Debug)]
struct OpenRegion {
    x_min: f64,
    x_max: f64,
    last_seq: u64,
    widest: Slab,
}

/// Faces are told apart by the set of disks covering them (a XOR
/// fingerprint), so one lens stays one region even when the arcs bounding
/// it swap.
#[derive(Debug, Default)]
pub(crate) struct RegionTracker {
    best: i32,
    seq: u64,
    open: HashMap<u64, OpenRegion>,
    done: Vec<OpenRegion>,
    scratch: Vec<ArcId>,
}

impl RegionTracker {
    pub fn best(&self) -> i32 {
        self.best
    }

    /// Records the status as it stands over the open slab `(x0, x1)`.
    pub fn observe<S: Status>(&mut self, status: &S, x0: f64, x1: f64) {
        self.seq += 1;
        let m = status.max_ply();
        if m <= 0 || m < self.best {
            return;
        }
        if m > self.best {
            self.best = m;
            self.open.clear();
            self.done.clear();
        }
        self.scratch.clear();
        let scratch = &mut self.scratch;
        status.for_each_gap_with_ply(m, |a| scratch.push(a));
        for i in 0..self.scratch.len() {
            let upper = self.scratch[i];
            let Some(lower) = status.below(upper) else {
                continue;
            };
            let key = status.coverage_key(upper);
            let slab = Slab { x0, x1, upper, lower };
            let seq = self.seq;
            match self.open.get_mut(&key) {
                Some(r) if r.last_seq + 1 >= seq => {
                    r.x_max = r.x_max.max(x1);
                    r.last_seq = seq;
                    if x1 - x0 > r.widest.x1 - r.widest.x0 {
                        r.widest = slab;
                    }
                }
                Some(r) => {
                    let old = std::mem::replace(r, OpenRegion { x_min: x0, x_max: x1, last_seq: seq, widest: slab });
                    self.done.push(old);
                }
                None => {
                    self.open.insert(key, OpenRegion { x_min: x0, x_max: x1, last_seq: seq, widest: slab });
                }
            }
        }
    }

    pub fn finish(self, disks: &[PlyDisk]) -> Vec<WitnessRegion> {
        let ply = self.best.max(0) as usize;
        let mut out: Vec<WitnessRegion> = self
            .done
            .into_iter()
            .chain(self.open.into_values())
            .map(|r| {
                let s = r.widest;
                let xm = 0.5 * (s.x0 + s.x1);
                let yu = arc_y(&disks[s.upper.disk()], s.upper.side(), xm);
                let yl = arc_y(&disks[s.lower.disk()], s.lower.side(), xm);
                WitnessRegion { x_min: r.x_min, x_max: r.x_max, point: Point::new(xm, 0.5 * (yu + yl)), ply }
            })
            .collect();
        out.sort_by(|a, b| a.x_min.total_cmp(&b.x_min).then(a.point.y.total_cmp(&b.point.y)));
        out
    }
}

/// Height of an arc at abscissa `x`, clamped to the disk's x-range.
pub(crate) fn arc_y(disk: &PlyDisk, side: Side, x: f64) -> f64 {
    let dx = x - disk.center.x;
    let h = (disk.radius * disk.radius - dx * dx).max(0.0).sqrt();
    match side {
        Side::Top => disk.center.y + h,
        Side::Bottom => disk.center.y - h,
    }
}
