//! Boundary crossings of two ply disks and their classification onto arcs.

use crate::geometry::{cross, Point};
use crate::graph::PlyDisk;

use super::status::{ArcId, Side};

/// One point where the boundaries of two disks cross, expressed as the swap
/// it causes in the status: just left of `point`, `upper` lies directly
/// above `lower`; just right of it they have traded places.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub point: Point,
    pub upper: ArcId,
    pub lower: ArcId,
    /// The point sits within tolerance of a disk's horizontal diameter, so
    /// the Top/Bottom assignment for that disk is a guess.
    pub degenerate: bool,
}

/// True when two open disks properly overlap: neither tangent (inside or
/// outside) nor nested without boundary contact.
pub fn boundaries_cross(a: &PlyDisk, b: &PlyDisk, eps: f64) -> bool {
    let d = a.center.dist(b.center);
    (a.radius - b.radius).abs() + eps < d && d < a.radius + b.radius - eps
}

/// Every crossing of the two boundary circles, sorted by x then y.
/// `a` and `b` are sweep-local disk ids used to name the arcs.
pub fn crossings(a: usize, da: &PlyDisk, b: usize, db: &PlyDisk, eps: f64) -> Vec<Crossing> {
    if da.radius <= 0.0 || db.radius <= 0.0 || !boundaries_cross(da, db, eps) {
        return Vec::new();
    }
    let delta = db.center - da.center;
    let d2 = delta.x * delta.x + delta.y * delta.y;
    let d = d2.sqrt();
    let along = (da.radius * da.radius - db.radius * db.radius + d2) / (2.0 * d);
    let h = (da.radius * da.radius - along * along).max(0.0).sqrt();
    let base = da.center + delta * (along / d);
    let perp = Point::new(-delta.y, delta.x) * (h / d);
    let mut out: Vec<Crossing> =
        [base + perp, base - perp].into_iter().map(|p| classify(a, da, b, db, p, eps)).collect();
    out.sort_by(|p, q| p.point.x.total_cmp(&q.point.x).then(p.point.y.total_cmp(&q.point.y)));
    out
}

/// Crossings strictly to the right of the sweep position.
pub fn circle_pair_intersections(
    a: usize,
    da: &PlyDisk,
    b: usize,
    db: &PlyDisk,
    x_now: f64,
    eps: f64,
) -> Vec<Crossing> {
    crossings(a, da, b, db, eps).into_iter().filter(|c| c.point.x > x_now + eps).collect()
}

fn side_at(disk: &PlyDisk, p: Point, eps: f64) -> (Side, bool) {
    let dy = p.y - disk.center.y;
    if dy > eps {
        (Side::Top, false)
    } else if dy < -eps {
        (Side::Bottom, false)
    } else {
        (Side::Top, true)
    }
}

fn classify(a: usize, da: &PlyDisk, b: usize, db: &PlyDisk, p: Point, eps: f64) -> Crossing {
    let (side_a, deg_a) = side_at(da, p, eps);
    let (side_b, deg_b) = side_at(db, p, eps);
    let arc_a = ArcId::new(a, side_a);
    let arc_b = ArcId::new(b, side_b);
    // Both arcs have slope -n.x/n.y at p (n = outward normal); the one with
    // the smaller slope is higher just left of p.
    let na = p - da.center;
    let nb = p - db.center;
    let sa = if side_a == Side::Top { 1.0 } else { -1.0 };
    let sb = if side_b == Side::Top { 1.0 } else { -1.0 };
    let a_first = cross(na, nb) * sa * sb > 0.0;
    let (upper, lower) = if a_first { (arc_a, arc_b) } else { (arc_b, arc_a) };
    Crossing { point: p, upper, lower, degenerate: deg_a || deg_b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(x: f64, y: f64, r: f64) -> PlyDisk {
        PlyDisk { owner: 0, center: Point::new(x, y), radius: r }
    }

    /// y of an arc at abscissa x, for brute-force orientation checks.
    fn arc_y(d: &PlyDisk, side: Side, x: f64) -> f64 {
        let h = (d.radius * d.radius - (x - d.center.x).powi(2)).max(0.0).sqrt();
        match side {
            Side::Top => d.center.y + h,
            Side::Bottom => d.center.y - h,
        }
    }

    #[test]
    fn tangent_disks_do_not_cross() {
        assert!(crossings(0, &disk(0.0, 0.0, 1.0), 1, &disk(2.0, 0.0, 1.0), 1e-9).is_empty());
    }

    #[test]
    fn contained_disk_does_not_cross() {
        assert!(crossings(0, &disk(0.0, 0.0, 1.0), 1, &disk(0.1, 0.0, 0.5), 1e-9).is_empty());
    }

    #[test]
    fn unit_disks_cross_on_bisector() {
        let c = crossings(0, &disk(0.0, 0.0, 1.0), 1, &disk(1.0, 0.0, 1.0), 1e-9);
        assert_eq!(c.len(), 2);
        let h = 3f64.sqrt() / 2.0;
        assert!((c[0].point.x - 0.5).abs() < 1e-15 && (c[0].point.y + h).abs() < 1e-15);
        assert!((c[1].point.x - 0.5).abs() < 1e-15 && (c[1].point.y - h).abs() < 1e-15);
        // lower crossing: bottom arcs; disk 1 is higher to the left
        assert_eq!(c[0].upper, ArcId::new(1, Side::Bottom));
        assert_eq!(c[0].lower, ArcId::new(0, Side::Bottom));
        // upper crossing: top arcs; disk 0 is higher to the left
        assert_eq!(c[1].upper, ArcId::new(0, Side::Top));
        assert_eq!(c[1].lower, ArcId::new(1, Side::Top));
        assert!(!c[0].degenerate && !c[1].degenerate);
    }

    #[test]
    fn filter_keeps_only_future_points() {
        let a = disk(0.0, 0.0, 1.0);
        let b = disk(1.0, 0.0, 1.0);
        assert_eq!(circle_pair_intersections(0, &a, 1, &b, 0.0, 1e-9).len(), 2);
        assert!(circle_pair_intersections(0, &a, 1, &b, 0.5, 1e-9).is_empty());
    }

    #[test]
    fn orientation_matches_sampled_heights() {
        // Deterministic sweep of configurations, checked by evaluating both
        // arcs slightly left and right of each crossing.
        let mut seed = 12345u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut checked = 0;
        for _ in 0..2000 {
            let a = disk(rnd() * 10.0, rnd() * 10.0, 0.5 + rnd() * 4.0);
            let b = disk(rnd() * 10.0, rnd() * 10.0, 0.5 + rnd() * 4.0);
            for c in crossings(0, &a, 1, &b, 1e-9) {
                if c.degenerate {
                    continue;
                }
                let da = if c.upper.disk() == 0 { &a } else { &b };
                let db = if c.lower.disk() == 0 { &a } else { &b };
                let dx = 1e-6;
                let x = c.point.x;
                // skip crossings too close to a disk's extreme x
                if x - dx < da.min_x().max(db.min_x()) || x + dx > da.max_x().min(db.max_x()) {
                    continue;
                }
                assert!(arc_y(da, c.upper.side(), x - dx) > arc_y(db, c.lower.side(), x - dx));
                assert!(arc_y(da, c.upper.side(), x + dx) < arc_y(db, c.lower.side(), x + dx));
                checked += 1;
            }
        }
        assert!(checked > 500);
    }
}
