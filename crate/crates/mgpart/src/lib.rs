//! Spectral minimal partitions of compact metric graphs.
//!
//! A metric graph is a finite combinatorial graph whose edges are intervals.
//! This crate computes Laplacian eigenvalues on such graphs (natural
//! Kirchhoff conditions, optionally Dirichlet at marked vertices), builds
//! partitions into clusters by cutting edges and splitting vertices, and
//! minimises the p-mean of the cluster ground states over rigid or connected
//! k-partitions. Alongside the optimiser sit the two-sided energy bounds,
//! exact energies for equilateral stars and pairs of intervals, and tools
//! for the first-order remainder of the Weyl-type asymptotics.
//!
//! ```
//! use mgpart::graph::Family;
//! use mgpart::optimize::{minimize, OptimizeRequest, PartitionClass};
//! use mgpart::partition::{Exponent, Problem};
//!
//! let g = Family::Loop(1.0.into()).build().unwrap();
//! let req = OptimizeRequest::new(g, 3, Exponent::Infinity, Problem::Natural, PartitionClass::Rigid);
//! let res = minimize(&req).unwrap();
//! let pi2 = std::f64::consts::PI.powi(2);
//! assert!((res.energy - 9.0 * pi2).abs() < 1e-9 * pi2);
//! ```

pub mod asymptotics;
pub mod bounds;
pub mod graph;
pub mod optimize;
pub mod partition;
pub mod scalar;
pub mod spectral;

pub use graph::{GraphStats, MetricGraph};
pub use partition::{CutConfig, Exponent, Partition, Problem};

pub use scalar::Scalar;
