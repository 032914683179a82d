//! Exact and stochastic analysis of intersections of Sylow 2-subgroups
//! of symmetric and alternating groups.

pub mod bounds;
pub mod census;
pub mod estimator;
pub mod forest;
pub mod intersect;
pub mod perm;
pub mod util;
