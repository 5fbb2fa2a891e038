//! Brute-force references for the sweep: an arrangement-vertex depth oracle,
//! a grid probe, and the empty-ply predicate.
//!
//! None of this shares code with the sweep beyond the disk derivation and
//! the tolerance constant.

use serde::{Deserialize, Serialize};

use crate::geometry::{dot, Point, EPS};
use crate::graph::{derive_disks, Drawing, Graph, GraphError, PlyDisk};

pub const DEFAULT_ORACLE_CAP: usize = 200;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum VerifyError {
    #[error("oracle refuses {n} vertices (cap {cap}); it is cubic in the vertex count")]
    CapExceeded { n: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthProbe {
    pub point: Point,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub ply: usize,
    pub witness: Point,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmptyPlyVerdict {
    pub empty: bool,
    /// `(container, contained)` vertex pairs.
    pub violations: Vec<(usize, usize)>,
}

/// Number of disks holding `p` more than `eps` inside their boundary.
pub fn depth_at(disks: &[PlyDisk], p: Point, eps: f64) -> usize {
    disks.iter().filter(|d| d.strictly_contains(p, eps)).count()
}

pub fn oracle_ply(graph: &Graph, drawing: &Drawing) -> Result<(usize, DepthProbe), VerifyError> {
    oracle_ply_capped(graph, drawing, DEFAULT_ORACLE_CAP)
}

pub fn oracle_ply_capped(graph: &Graph, drawing: &Drawing, cap: usize) -> Result<(usize, DepthProbe), VerifyError> {
    if graph.vertex_count() > cap {
        return Err(VerifyError::CapExceeded { n: graph.vertex_count(), cap });
    }
    let disks = derive_disks(graph, drawing)?;
    let probe = max_depth(&disks, EPS);
    let ply = if disks.is_empty() { 0 } else { probe.depth.max(1) };
    Ok((ply, probe))
}

/// Maximum depth of an open-disk arrangement.
///
/// A deepest face is either a whole disk free of other boundaries (its
/// center attains the depth) or has an arrangement vertex on its boundary,
/// where it is the wedge lying inside both circles. Vertices are evaluated
/// symbolically: disks strictly containing the vertex plus the best wedge
/// among all circles passing through it. Lens midpoints are added as plain
/// sample points.
pub fn max_depth(disks: &[PlyDisk], eps: f64) -> DepthProbe {
    let live: Vec<&PlyDisk> = disks.iter().filter(|d| d.radius > 0.0).collect();
    let mut best = DepthProbe { point: disks.first().map_or(Point::default(), |d| d.center), depth: 0 };
    let mut consider = |p: Point, depth: usize| {
        if depth > best.depth {
            best = DepthProbe { point: p, depth };
        }
    };
    for d in &live {
        consider(d.center, depth_at(disks, d.center, eps));
    }
    for i in 0..live.len() {
        for j in i + 1..live.len() {
            let (a, b) = (live[i], live[j]);
            let dist = a.center.dist(b.center);
            if !((a.radius - b.radius).abs() + eps < dist && dist < a.radius + b.radius - eps) {
                continue;
            }
            let u = (b.center - a.center) * (1.0 / dist);
            let t = 0.5 * ((dist - b.radius) + a.radius);
            let mid = a.center + u * t;
            consider(mid, depth_at(disks, mid, eps));
            for v in circle_points(a, b) {
                let (depth, witness) = vertex_depth(&live, v, eps);
                consider(witness, depth);
            }
        }
    }
    best
}

fn circle_points(a: &PlyDisk, b: &PlyDisk) -> [Point; 2] {
    let dx = b.center.x - a.center.x;
    let dy = b.center.y - a.center.y;
    let d = (dx * dx + dy * dy).sqrt();
    let l = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
    let h = (a.radius * a.radius - l * l).max(0.0).sqrt();
    let mx = a.center.x + l * dx / d;
    let my = a.center.y + l * dy / d;
    [Point::new(mx + h * dy / d, my - h * dx / d), Point::new(mx - h * dy / d, my + h * dx / d)]
}

/// Depth just beside an arrangement vertex: disks strictly containing it,
/// plus the largest number of through-passing disks sharing one wedge.
fn vertex_depth(disks: &[&PlyDisk], v: Point, eps: f64) -> (usize, Point) {
    let mut inside = 0;
    let mut normals: Vec<Point> = Vec::new();
    let mut min_r = f64::INFINITY;
    for d in disks {
        let dist = d.center.dist(v);
        if dist < d.radius - eps {
            inside += 1;
        } else if (dist - d.radius).abs() <= eps {
            normals.push(d.center - v);
            min_r = min_r.min(d.radius);
        }
    }
    let mut angles: Vec<f64> = Vec::with_capacity(2 * normals.len());
    for n in &normals {
        let a = n.y.atan2(n.x);
        angles.push(a + std::f64::consts::FRAC_PI_2);
        angles.push(a - std::f64::consts::FRAC_PI_2);
    }
    let tau = std::f64::consts::TAU;
    for a in &mut angles {
        *a = a.rem_euclid(tau);
    }
    angles.sort_by(f64::total_cmp);
    let mut best = (0, Point::new(1.0, 0.0));
    for k in 0..angles.len() {
        let lo = angles[k];
        let hi = if k + 1 < angles.len() { angles[k + 1] } else { angles[0] + tau };
        if hi - lo < 1e-12 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let u = Point::new(mid.cos(), mid.sin());
        let count = normals.iter().filter(|n| dot(u, **n) > 0.0).count();
        if count > best.0 {
            best = (count, u);
        }
    }
    let step = if min_r.is_finite() { (min_r * 1e-6).max(10.0 * eps) } else { 0.0 };
    (inside + best.0, v + best.1 * step)
}

/// Maximum plain depth over a `resolution x resolution` grid spanning the
/// bounding box of the positive-radius disks. Undercounts thin regions.
pub fn grid_probe(graph: &Graph, drawing: &Drawing, resolution: usize) -> Result<DepthProbe, VerifyError> {
    let disks = derive_disks(graph, drawing)?;
    Ok(grid_probe_disks(&disks, resolution, EPS))
}

pub fn grid_probe_disks(disks: &[PlyDisk], resolution: usize, eps: f64) -> DepthProbe {
    assert!(resolution >= 2, "grid needs at least 2 samples per axis");
    let live: Vec<&PlyDisk> = disks.iter().filter(|d| d.radius > 0.0).collect();
    let mut best = DepthProbe { point: Point::default(), depth: 0 };
    if live.is_empty() {
        return best;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for d in &live {
        x0 = x0.min(d.center.x - d.radius);
        x1 = x1.max(d.center.x + d.radius);
        y0 = y0.min(d.center.y - d.radius);
        y1 = y1.max(d.center.y + d.radius);
    }
    let steps = (resolution - 1) as f64;
    let mut row: Vec<&PlyDisk> = Vec::with_capacity(live.len());
    for j in 0..resolution {
        let y = y0 + (y1 - y0) * j as f64 / steps;
        row.clear();
        row.extend(live.iter().copied().filter(|d| (y - d.center.y).abs() < d.radius));
        if row.len() <= best.depth {
            continue;
        }
        for i in 0..resolution {
            let p = Point::new(x0 + (x1 - x0) * i as f64 / steps, y);
            let depth = row.iter().filter(|d| d.strictly_contains(p, eps)).count();
            if depth > best.depth {
                best = DepthProbe { point: p, depth };
            }
        }
    }
    best
}

/// A drawing is empty-ply when no vertex lies strictly inside another
/// vertex's disk; boundary placement does not count.
pub fn empty_ply(graph: &Graph, drawing: &Drawing) -> Result<EmptyPlyVerdict, GraphError> {
    let disks = derive_disks(graph, drawing)?;
    let mut violations = Vec::new();
    for container in &disks {
        if container.radius <= 0.0 {
            continue;
        }
        for other in &disks {
            if other.owner != container.owner && container.strictly_contains(other.center, EPS) {
                violations.push((container.owner, other.owner));
            }
        }
    }
    Ok(EmptyPlyVerdict { empty: violations.is_empty(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(owner: usize, x: f64, y: f64, r: f64) -> PlyDisk {
        PlyDisk { owner, center: Point::new(x, y), radius: r }
    }

    fn drawing(points: &[(f64, f64)]) -> Drawing {
        points.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn disjoint_unit_disks() {
        let probe = max_depth(&[disk(0, 0.0, 0.0, 1.0), disk(1, 5.0, 0.0, 1.0)], EPS);
        assert_eq!(probe.depth, 1);
        assert_eq!(probe.point, Point::new(0.0, 0.0));
    }

    #[test]
    fn three_disks_share_centroid() {
        let h = 3f64.sqrt() / 2.0;
        let disks = [disk(0, 0.0, 0.0, 1.0), disk(1, 1.0, 0.0, 1.0), disk(2, 0.5, h, 1.0)];
        let centroid = Point::new(0.5, h / 3.0);
        assert_eq!(depth_at(&disks, centroid, EPS), 3);
        assert_eq!(max_depth(&disks, EPS).depth, 3);
    }

    #[test]
    fn lens_found_by_oracle_and_grid() {
        let disks = [disk(0, 0.0, 0.0, 1.0), disk(1, 1.0, 0.0, 1.0)];
        assert_eq!(max_depth(&disks, EPS).depth, 2);
        assert_eq!(grid_probe_disks(&disks, 100, EPS).depth, 2);
    }

    #[test]
    fn coarse_grid_may_miss_thin_lens() {
        // lens of width 0.01 between two disks; a 2x2 grid only sees corners
        let disks = [disk(0, 0.0, 0.0, 1.0), disk(1, 1.99, 0.0, 1.0)];
        assert_eq!(max_depth(&disks, EPS).depth, 2);
        assert!(grid_probe_disks(&disks, 2, EPS).depth <= 1);
    }

    #[test]
    fn wedge_counts_circles_through_a_common_point() {
        // four disks on a square around the origin, every circle through it
        let disks = [disk(0, 1.0, 0.0, 1.0), disk(1, 0.0, 1.0, 1.0), disk(2, -1.0, 0.0, 1.0), disk(3, 0.0, -1.0, 1.0)];
        assert_eq!(max_depth(&disks, EPS).depth, 2);
    }

    #[test]
    fn tangent_disks_stay_ply_one() {
        let h = 3f64.sqrt();
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = drawing(&[(0.0, 0.0), (2.0, 0.0), (1.0, h)]);
        assert_eq!(oracle_ply(&g, &d).unwrap().0, 1);
    }

    #[test]
    fn oracle_refuses_large_inputs() {
        let g = Graph::new(5, []).unwrap();
        let d = drawing(&[(0.0, 0.0); 5]);
        assert_eq!(oracle_ply_capped(&g, &d, 4), Err(VerifyError::CapExceeded { n: 5, cap: 4 }));
    }

    #[test]
    fn empty_graph_and_edgeless() {
        assert_eq!(oracle_ply(&Graph::empty(), &Drawing::default()).unwrap().0, 0);
        let g = Graph::new(3, []).unwrap();
        let d = drawing(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(oracle_ply(&g, &d).unwrap().0, 1);
        assert!(empty_ply(&g, &d).unwrap().empty);
    }

    #[test]
    fn empty_ply_single_edge() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let v = empty_ply(&g, &drawing(&[(0.0, 0.0), (10.0, 0.0)])).unwrap();
        assert!(v.empty);
        assert!(v.violations.is_empty());
    }

    #[test]
    fn empty_ply_boundary_is_not_containment() {
        // u(2,0) - v(0,0) - w(1,0): r_v = 1 = dist(v, w)
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let v = empty_ply(&g, &drawing(&[(2.0, 0.0), (0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(v.empty);
    }

    #[test]
    fn empty_ply_violation_pair() {
        // u(4,0) - v(0,0) - w(1,0): r_v = 2 > dist(v, w) = 1
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let v = empty_ply(&g, &drawing(&[(4.0, 0.0), (0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(!v.empty);
        // r_u = 2 and dist(u, w) = 3; r_w = 0.5
        assert_eq!(v.violations, vec![(1, 2)]);
    }
}
