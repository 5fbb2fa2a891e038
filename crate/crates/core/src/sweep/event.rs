use std::cmp::Ordering;
use std::fmt;

use super::status::ArcId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventKind {
    /// Rightmost point of a disk.
    End { disk: usize },
    /// Two arcs expected adjacent (`upper` over `lower`) trade places at `y`.
    Intersection { upper: ArcId, lower: ArcId, y: f64, degenerate: bool },
    /// Leftmost point of a disk.
    Start { disk: usize },
}

impl EventKind {
    /// Tie-break rank at equal x: ends, then intersections, then starts.
    pub fn rank(&self) -> u8 {
        match self {
            EventKind::End { .. } => 0,
            EventKind::Intersection { .. } => 1,
            EventKind::Start { .. } => 2,
        }
    }

    fn payload(&self) -> (u32, u32, f64) {
        match *self {
            EventKind::End { disk } | EventKind::Start { disk } => (disk as u32, 0, 0.0),
            EventKind::Intersection { upper, lower, y, .. } => (upper.0, lower.0, y),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepEvent {
    pub x: f64,
    pub kind: EventKind,
}

impl Eq for SweepEvent {}

impl Ord for SweepEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a0, a1, ay) = self.kind.payload();
        let (b0, b1, by) = other.kind.payload();
        self.x
            .total_cmp(&other.x)
            .then(self.kind.rank().cmp(&other.kind.rank()))
            .then(a0.cmp(&b0))
            .then(a1.cmp(&b1))
            .then(ay.total_cmp(&by))
    }
}

impl PartialOrd for SweepEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SweepEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EventKind::End { disk } => write!(f, "{:.17e} end d{}", self.x, disk),
            EventKind::Start { disk } => write!(f, "{:.17e} start d{}", self.x, disk),
            EventKind::Intersection { upper, lower, y, degenerate } => write!(
                f,
                "{:.17e} cross {:?}/{:?} y={:.17e}{}",
                self.x,
                upper,
                lower,
                y,
                if degenerate { " degenerate" } else { "" }
            ),
        }
    }
}
