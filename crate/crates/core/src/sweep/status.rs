//! Vertical status structure of the sweep: the halfcircle arcs crossing the
//! sweep line, ordered from top to bottom.
//!
//! Every arc carries the ply of the open gap directly below it. Both backends
//! maintain the prefix-sum law: the ply below an arc equals the number of Top
//! arcs at or above it minus the number of Bottom arcs at or above it.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Bottom,
}

/// Halfcircle id: `2 * disk` for the Top arc, `2 * disk + 1` for the Bottom.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub u32);

impl ArcId {
    pub fn new(disk: usize, side: Side) -> Self {
        let base = (disk as u32) << 1;
        match side {
            Side::Top => ArcId(base),
            Side::Bottom => ArcId(base | 1),
        }
    }

    pub fn disk(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn side(self) -> Side {
        if self.0 & 1 == 0 {
            Side::Top
        } else {
            Side::Bottom
        }
    }

    /// +1 when crossing the arc downwards enters its disk, -1 when it leaves.
    pub fn sign(self) -> i32 {
        match self.side() {
            Side::Top => 1,
            Side::Bottom => -1,
        }
    }

    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side() {
            Side::Top => 't',
            Side::Bottom => 'b',
        };
        write!(f, "{}{}", s, self.disk())
    }
}

/// Per-disk key used to fingerprint the set of disks covering a gap.
pub(crate) fn disk_key(disk: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = (disk as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub trait Status {
    fn with_arc_capacity(arcs: usize) -> Self;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn contains(&self, arc: ArcId) -> bool;

    /// Inserts the two arcs of a starting disk next to each other (`top`
    /// directly above `bottom`). They go below every arc `a` for which
    /// `goes_below(a)` holds; the predicate must be monotone along the order.
    fn insert_pair(&mut self, top: ArcId, bottom: ArcId, goes_below: impl FnMut(ArcId) -> bool);

    /// Removes both arcs of an ending disk. `top` must be above `bottom`;
    /// arcs strictly between them lose one unit of ply.
    fn remove_pair(&mut self, top: ArcId, bottom: ArcId);

    /// Exchanges two adjacent arcs; `upper` must sit directly above `lower`.
    fn swap_adjacent(&mut self, upper: ArcId, lower: ArcId);

    fn above(&self, arc: ArcId) -> Option<ArcId>;

    fn below(&self, arc: ArcId) -> Option<ArcId>;

    /// True when `a` is strictly higher than `b` in the current order.
    fn is_above(&self, a: ArcId, b: ArcId) -> bool;

    /// Ply of the gap directly below `arc`.
    fn ply(&self, arc: ArcId) -> i32;

    /// Largest gap ply, 0 when empty.
    fn max_ply(&self) -> i32;

    /// Calls `f` for each arc whose gap below carries exactly `target` ply.
    fn for_each_gap_with_ply(&self, target: i32, f: impl FnMut(ArcId));

    /// XOR of the disk keys of the disks covering the gap below `arc`.
    fn coverage_key(&self, arc: ArcId) -> u64;

    /// Arcs from top to bottom.
    fn order(&self) -> Vec<ArcId>;

    /// Recounts every ply from scratch and compares with the stored value.
    fn check_prefix_law(&self) -> Result<(), String> {
        let mut running = 0;
        for arc in self.order() {
            running += arc.sign();
            let stored = self.ply(arc);
            if stored != running {
                return Err(format!("arc {arc:?}: stored ply {stored}, recount {running}"));
            }
        }
        Ok(())
    }
}

const ABSENT: u32 = u32::MAX;

/// Array-backed status. Insertion and removal shift the tail, so it is meant
/// for small instances; it stores ply values explicitly and updates them the
/// way the textbook procedure describes.
#[derive(Clone, Debug, Default)]
pub struct LinearStatus {
    arcs: Vec<ArcId>,
    ply: Vec<i32>,
    pos: Vec<u32>,
}

impl LinearStatus {
    fn pos(&self, arc: ArcId) -> usize {
        let p = self.pos.get(arc.index()).copied().unwrap_or(ABSENT);
        assert!(p != ABSENT, "arc {arc:?} not in status");
        p as usize
    }

    fn reindex_from(&mut self, start: usize) {
        for i in start..self.arcs.len() {
            self.pos[self.arcs[i].index()] = i as u32;
        }
    }

    fn ensure(&mut self, arc: ArcId) {
        if self.pos.len() <= arc.index() {
            self.pos.resize(arc.index() + 1, ABSENT);
        }
    }
}

impl Status for LinearStatus {
    fn with_arc_capacity(arcs: usize) -> Self {
        Self { arcs: Vec::with_capacity(arcs), ply: Vec::with_capacity(arcs), pos: vec![ABSENT; arcs] }
    }

    fn len(&self) -> usize {
        self.arcs.len()
    }

    fn contains(&self, arc: ArcId) -> bool {
        self.pos.get(arc.index()).is_some_and(|&p| p != ABSENT)
    }

    fn insert_pair(&mut self, top: ArcId, bottom: ArcId, mut goes_below: impl FnMut(ArcId) -> bool) {
        self.ensure(top);
        self.ensure(bottom);
        let at = self.arcs.partition_point(|&a| goes_below(a));
        let above = if at > 0 { self.ply[at - 1] } else { 0 };
        self.arcs.splice(at..at, [top, bottom]);
        self.ply.splice(at..at, [above + 1, above]);
        self.reindex_from(at);
    }

    fn remove_pair(&mut self, top: ArcId, bottom: ArcId) {
        let t = self.pos(top);
        let b = self.pos(bottom);
        assert!(t < b, "top arc must be above bottom arc");
        for p in &mut self.ply[t + 1..b] {
            *p -= 1;
        }
        self.arcs.remove(b);
        self.ply.remove(b);
        self.arcs.remove(t);
        self.ply.remove(t);
        self.pos[top.index()] = ABSENT;
        self.pos[bottom.index()] = ABSENT;
        self.reindex_from(t);
    }

    fn swap_adjacent(&mut self, upper: ArcId, lower: ArcId) {
        let u = self.pos(upper);
        assert_eq!(self.pos(lower), u + 1, "arcs must be adjacent");
        let above = if u > 0 { self.ply[u - 1] } else { 0 };
        self.arcs.swap(u, u + 1);
        self.ply[u] = above + lower.sign();
        self.ply[u + 1] = self.ply[u] + upper.sign();
        self.pos[lower.index()] = u as u32;
        self.pos[upper.index()] = (u + 1) as u32;
    }

    fn above(&self, arc: ArcId) -> Option<ArcId> {
        let p = self.pos(arc);
        (p > 0).then(|| self.arcs[p - 1])
    }

    fn below(&self, arc: ArcId) -> Option<ArcId> {
        self.arcs.get(self.pos(arc) + 1).copied()
    }

    fn is_above(&self, a: ArcId, b: ArcId) -> bool {
        self.pos(a) < self.pos(b)
    }

    fn ply(&self, arc: ArcId) -> i32 {
        self.ply[self.pos(arc)]
    }

    fn max_ply(&self) -> i32 {
        self.ply.iter().copied().max().unwrap_or(0).max(0)
    }

    fn for_each_gap_with_ply(&self, target: i32, mut f: impl FnMut(ArcId)) {
        for (i, &p) in self.ply.iter().enumerate() {
            if p == target {
                f(self.arcs[i]);
            }
        }
    }

    fn coverage_key(&self, arc: ArcId) -> u64 {
        self.arcs[..=self.pos(arc)].iter().fold(0, |acc, a| acc ^ disk_key(a.disk()))
    }

    fn order(&self) -> Vec<ArcId> {
        self.arcs.clone()
    }
}
