//! Graphs, drawings, and the per-vertex ply disks derived from them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },
    #[error("drawing has {positions} positions but the graph has {vertices} vertices")]
    SizeMismatch { positions: usize, vertices: usize },
    #[error("vertex {0} has no position")]
    MissingPosition(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("density is undefined for a graph without vertices")]
    EmptyGraph,
}

/// Simple undirected graph on the dense vertex set `0..n`.
///
/// Edges are stored normalized (`u < v`), sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<Option<String>>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) collapse to one; self-loops are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EdgeOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u, v));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Self { n, edges, labels: vec![None; n], adjacency })
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Self {
        assert_eq!(labels.len(), self.n, "one label slot per vertex");
        self.labels = labels;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn density(&self) -> Result<Density, GraphError> {
        density(self)
    }
}

/// Vertex positions of a straight-line drawing, indexed by vertex id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drawing {
    positions: Vec<Point>,
}

impl Drawing {
    pub fn new(positions: Vec<Point>) -> Self {
        Self { positions }
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn positions_mut(&mut self) -> &mut [Point] {
        &mut self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, v: usize) -> Point {
        self.positions[v]
    }

    pub fn set_position(&mut self, v: usize, p: Point) {
        self.positions[v] = p;
    }

    /// Checks that the drawing covers `graph` with finite coordinates.
    pub fn validate(&self, graph: &Graph) -> Result<(), GraphError> {
        if self.positions.len() < graph.vertex_count() {
            return Err(GraphError::MissingPosition(self.positions.len()));
        }
        if self.positions.len() != graph.vertex_count() {
            return Err(GraphError::SizeMismatch { positions: self.positions.len(), vertices: graph.vertex_count() });
        }
        if let Some(v) = self.positions.iter().position(|p| !p.is_finite()) {
            return Err(GraphError::NonFinite(v));
        }
        Ok(())
    }
}

impl FromIterator<Point> for Drawing {
    fn from_iter<T: IntoIterator<Item = Point>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Open disk centered at a vertex, radius half its longest incident edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlyDisk {
    pub owner: usize,
    pub center: Point,
    pub radius: f64,
}

impl PlyDisk {
    /// Open-disk membership with tolerance: `p` counts only when it lies
    /// deeper than `eps` inside the boundary.
    pub fn strictly_contains(&self, p: Point, eps: f64) -> bool {
        self.radius > 0.0 && self.center.dist(p) < self.radius - eps
    }

    pub fn min_x(&self) -> f64 {
        self.center.x - self.radius
    }

    pub fn max_x(&self) -> f64 {
        self.center.x + self.radius
    }
}

pub fn derive_disks(graph: &Graph, drawing: &Drawing) -> Result<Vec<PlyDisk>, GraphError> {
    drawing.validate(graph)?;
    let pos = drawing.positions();
    let mut longest = vec![0.0f64; graph.vertex_count()];
    for &(u, v) in graph.edges() {
        let len = pos[u].dist(pos[v]);
        longest[u] = longest[u].max(len);
        longest[v] = longest[v].max(len);
    }
    Ok(longest
        .into_iter()
        .enumerate()
        .map(|(owner, len)| PlyDisk { owner, center: pos[owner], radius: len / 2.0 })
        .collect())
}

/// Edges per vertex, `|E| / |V|`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Density(pub f64);

pub fn density(graph: &Graph) -> Result<Density, GraphError> {
    if graph.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    Ok(Density(graph.edge_count() as f64 / graph.vertex_count() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drawing(points: &[(f64, f64)]) -> Drawing {
        points.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn single_edge_disks() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let d = derive_disks(&g, &drawing(&[(0.0, 0.0), (4.0, 0.0)])).unwrap();
        assert_eq!(d[0].radius, 2.0);
        assert_eq!(d[1].radius, 2.0);
        assert_eq!(d[1].center, Point::new(4.0, 0.0));
    }

    #[test]
    fn radius_uses_longest_incident_edge() {
        // u(2,0) - v(0,0) - w(-1,0)
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let d = derive_disks(&g, &drawing(&[(2.0, 0.0), (0.0, 0.0), (-1.0, 0.0)])).unwrap();
        assert_eq!(d[1].radius, 1.0);
        assert_eq!(d[2].radius, 0.5);
    }

    #[test]
    fn isolated_vertex_has_zero_radius() {
        let g = Graph::new(1, []).unwrap();
        let d = derive_disks(&g, &drawing(&[(5.0, 5.0)])).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].radius, 0.0);
    }

    #[test]
    fn missing_position_is_reported() {
        let g = Graph::new(3, [(0, 1)]).unwrap();
        let err = derive_disks(&g, &drawing(&[(0.0, 0.0), (1.0, 0.0)])).unwrap_err();
        assert_eq!(err, GraphError::MissingPosition(2));
    }

    #[test]
    fn non_finite_rejected() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let err = derive_disks(&g, &drawing(&[(0.0, 0.0), (f64::NAN, 0.0)])).unwrap_err();
        assert_eq!(err, GraphError::NonFinite(1));
    }

    #[test]
    fn densities() {
        let tree = Graph::new(10, (1..10).map(|v| (v - 1, v))).unwrap();
        assert_eq!(density(&tree).unwrap().0, 0.9);
        let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(density(&k4).unwrap().0, 1.5);
        let edges = (0..150).map(|i| (i % 100, (i % 100 + 1 + i / 100) % 100));
        let g = Graph::new(100, edges).unwrap();
        assert_eq!(g.edge_count(), 150);
        assert_eq!(density(&g).unwrap().0, 1.5);
        assert_eq!(density(&Graph::empty()), Err(GraphError::EmptyGraph));
        assert_eq!(density(&Graph::new(3, []).unwrap()).unwrap().0, 0.0);
    }

    #[test]
    fn duplicate_edges_collapse_and_loops_fail() {
        let g = Graph::new(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(1, 0));
        assert_eq!(Graph::new(2, [(1, 1)]), Err(GraphError::SelfLoop(1, 1)));
        assert!(matches!(Graph::new(2, [(0, 2)]), Err(GraphError::EdgeOutOfRange { .. })));
    }
}
