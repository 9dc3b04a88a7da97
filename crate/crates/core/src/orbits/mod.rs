//! Exact orbits: cycle detection, Northcott scans of `P^1(Q)` and
//! intersections of two orbits.

pub mod intersection;
pub mod northcott;
pub mod preperiodic;

pub use intersection::{gap_bound_check, orbit_intersection, orbit_intersection_with, GapBound, IntersectionReport};
pub use northcott::{northcott_scan, NorthcottReport};
pub use preperiodic::{detect_preperiodic, detect_preperiodic_with, preperiodic_by_history, OrbitRecord};
