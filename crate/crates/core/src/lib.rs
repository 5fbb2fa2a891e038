//! Ply number computation and ply-aware layout for straight-line graph
//! drawings.
//!
//! The ply disk of a vertex is the open disk centered at it whose radius is
//! half its longest incident edge; the ply number of a drawing is the largest
//! number of ply disks sharing a point. [`sweep::compute_ply`] computes it
//! with a plane sweep over the disk boundaries, [`verify`] holds brute-force
//! references, and [`layout`] produces and improves drawings.

mod clock;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod layout;
pub mod sweep;
pub mod verify;

pub use geometry::{Point, EPS};
pub use graph::{density, derive_disks, Density, Drawing, Graph, GraphError, PlyDisk};
pub use layout::{LayoutConfig, MinimizeResult, RefineConfig};
pub use sweep::{compute_ply, compute_ply_with, PlyReport, SweepOptions};
