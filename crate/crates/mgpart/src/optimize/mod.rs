//! Minimal partition energies over rigid or connected k-partitions.
//!
//! [`minimize`] enumerates cut topologies (cuts per edge and vertex splits),
//! bounds each one from below by a length-allocation relaxation, and
//! refines cut positions of the promising ones by golden-section
//! coordinate descent, processing topologies in order of their lower bound
//! and stopping once no remaining bound can beat the incumbent.
//! Constructive partitions seed the incumbent. The result is heuristic;
//! only [`grid_oracle`] certifies its (discretised) optimum.

mod construct;
mod enumerate;
mod flow;
mod oracle;
mod topology;

pub use construct::{
    eulerian_equipartition, merge_down, subdivision_test_partition_dirichlet, subdivision_test_partition_neumann,
};
pub use enumerate::{enumerate_topologies, Budget, Enumeration};
pub use oracle::grid_oracle;

use crate::graph::MetricGraph;
use crate::partition::{
    apply_cuts, energy, Classification, CutConfig, EnergyReport, Exponent, Partition, PartitionError, Problem,
};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;
use topology::{Refine, Topology};

/// Topologies refined concurrently between two pruning checks. Fixed so the
/// result does not depend on the number of threads.
const BATCH: usize = 32;

/// Clusters shorter than this fraction of the total length are rejected.
const MIN_CLUSTER: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartitionClass {
    /// Every cut location separates at least two clusters.
    Rigid,
    /// Connected clusters, cut locations unrestricted.
    Connected,
}

impl PartitionClass {
    /// Whether a partition belongs to the class.
    pub fn admits(self, c: Classification) -> bool {
        match self {
            PartitionClass::Rigid => c == Classification::Rigid,
            PartitionClass::Connected => c != Classification::Invalid,
        }
    }
}

impl fmt::Display for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionClass::Rigid => "rigid",
            PartitionClass::Connected => "connected",
        })
    }
}

impl FromStr for PartitionClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rigid" => Ok(PartitionClass::Rigid),
            "connected" => Ok(PartitionClass::Connected),
            other => Err(format!(
                "unknown partition class {other:?}, expected rigid or connected"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("k = {k} is below the number of components ({components})")]
    TooFewClusters { k: usize, components: usize },
    #[error("no admissible {k}-partition found within the budget{}", if *truncated { " (enumeration truncated)" } else { "" })]
    Infeasible { k: usize, truncated: bool },
    #[error("the graph has no Eulerian path")]
    NoEulerianPath,
    #[error("{0}")]
    ParameterTooSmall(String),
    #[error("grid search exceeds {limit} evaluations")]
    OracleBudget { limit: usize },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Input of [`minimize`].
#[derive(Clone, Debug)]
pub struct OptimizeRequest {
    pub graph: MetricGraph,
    pub k: usize,
    pub p: Exponent,
    pub problem: Problem,
    pub class: PartitionClass,
    pub budget: Budget,
    /// Relative energy improvement below which refinement stops.
    pub refine_tol: f64,
    /// Random restarts per refined topology.
    pub multistart: usize,
    pub seed: u64,
    /// Coordinate-descent sweeps per start.
    pub max_sweeps: usize,
    /// Enumerate topologies; when false only the constructive seeds are
    /// refined.
    pub enumerate: bool,
}

impl OptimizeRequest {
    pub fn new(graph: MetricGraph, k: usize, p: Exponent, problem: Problem, class: PartitionClass) -> Self {
        let budget = Budget::default_for(&graph, k);
        OptimizeRequest {
            graph,
            k,
            p,
            problem,
            class,
            budget,
            refine_tol: 1e-8,
            multistart: 3,
            seed: 0,
            max_sweeps: 200,
            enumerate: true,
        }
    }

    fn validate(&self) -> Result<(), OptimizeError> {
        let components = self.graph.component_count();
        if self.k == 0 || self.k < components {
            return Err(OptimizeError::TooFewClusters { k: self.k, components });
        }
        if self.budget.max_cuts_per_edge.len() != self.graph.edge_count() {
            return Err(OptimizeError::InvalidRequest("budget lists a cut cap per edge".into()));
        }
        if self.budget.max_configurations == 0 {
            return Err(OptimizeError::InvalidRequest(
                "configuration budget must be positive".into(),
            ));
        }
        if !(self.refine_tol > 0.0) {
            return Err(OptimizeError::InvalidRequest("refine_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Output of [`minimize`] and [`grid_oracle`].
#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub energy: f64,
    pub partition: Partition,
    pub cut_config: CutConfig,
    /// Set only by the grid oracle.
    pub certified: bool,
    /// Energy evaluations spent.
    pub evaluations: usize,
    pub report: EnergyReport,
    /// The enumeration hit its configuration budget.
    pub truncated: bool,
    /// Admissible topologies considered.
    pub topologies: usize,
}

impl OptimizeResult {
    /// Energy line, cut configuration and per-cluster CSV.
    pub fn to_text(&self) -> String {
        format!(
            "energy {:.17e}\n{}{}",
            self.energy,
            self.cut_config.to_text(self.partition.ambient()),
            self.report.to_csv()
        )
    }
}

/// Whether a topology, in generic position, can yield a partition of the
/// requested class and problem.
fn admissible(top: &Topology, problem: Problem, class: PartitionClass) -> bool {
    let identity: Vec<usize> = (0..top.layout.component_count).collect();
    let class_ok = class == PartitionClass::Connected || top.layout.is_rigid_under(&identity);
    class_ok && (problem.is_natural() || top.templates.iter().all(|t| t.has_boundary()))
}

struct Incumbent {
    energy: f64,
    config: CutConfig,
    partition: Partition,
    report: EnergyReport,
}

/// Accepts `config` if it is an admissible, non-degenerate partition that
/// beats the incumbent (by energy, then by configuration order).
fn offer(best: &mut Option<Incumbent>, req: &OptimizeRequest, config: CutConfig) {
    let Ok(partition) = apply_cuts(&req.graph, &config) else {
        return;
    };
    if partition.k() != req.k || !req.class.admits(partition.classification()) {
        return;
    }
    let floor = MIN_CLUSTER * req.graph.total_length();
    if partition.cluster_lengths().iter().any(|&l| l < floor) {
        return;
    }
    let Ok(report) = energy(&partition, req.problem, req.p) else {
        return;
    };
    let better = match best {
        None => true,
        Some(b) => report.energy < b.energy || (report.energy == b.energy && config.lex_cmp(&b.config).is_lt()),
    };
    if better {
        *best = Some(Incumbent {
            energy: report.energy,
            config,
            partition,
            report,
        });
    }
}

/// Best energy found over enumerated topologies and constructive seeds.
pub fn minimize(req: &OptimizeRequest) -> Result<OptimizeResult, OptimizeError> {
    req.validate()?;
    let g = &req.graph;
    let settings = Refine {
        tol: req.refine_tol,
        multistart: req.multistart,
        seed: req.seed,
        max_sweeps: req.max_sweeps,
    };
    let mut best: Option<Incumbent> = None;
    let mut evaluations = 0;

    // constructive seeds, refined from their own positions and from the
    // allocation start
    let seeds = construct::seeds(g, req.k, req.problem, req.p, req.class);
    let refined: Vec<(CutConfig, Vec<CutConfig>, usize)> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let top = Topology::new(g, c.clone(), req.problem, req.p);
            let a = top.refine_from(c.positions(), req.p, settings);
            let b = top.refine(req.p, settings, u64::MAX - i as u64);
            let n = a.evaluations + b.evaluations;
            (
                c.clone(),
                vec![c.with_positions(&a.positions), c.with_positions(&b.positions)],
                n,
            )
        })
        .collect();
    for (raw, candidates, n) in refined {
        evaluations += n + 1;
        offer(&mut best, req, raw);
        for c in candidates {
            offer(&mut best, req, c);
        }
    }

    let enumeration = if req.enumerate {
        enumerate_topologies(g, req.k, &req.budget)
    } else {
        Enumeration {
            skeletons: Vec::new(),
            truncated: false,
            examined: 0,
        }
    };
    let tops: Vec<Topology> = enumeration
        .skeletons
        .into_par_iter()
        .map(|c| Topology::new(g, c, req.problem, req.p))
        .filter(|t| admissible(t, req.problem, req.class))
        .collect();
    let mut order: Vec<usize> = (0..tops.len()).collect();
    order.sort_by(|&a, &b| tops[a].lower_bound.total_cmp(&tops[b].lower_bound).then(a.cmp(&b)));

    let beats = |lb: f64, best: &Option<Incumbent>| best.as_ref().is_none_or(|b| lb < b.energy * (1.0 - 1e-12));
    let mut at = 0;
    while at < order.len() && beats(tops[order[at]].lower_bound, &best) {
        let end = (at + BATCH).min(order.len());
        let batch: Vec<usize> = order[at..end]
            .iter()
            .copied()
            .filter(|&i| beats(tops[i].lower_bound, &best))
            .collect();
        let results: Vec<(usize, topology::Refined)> = batch
            .par_iter()
            .map(|&i| (i, tops[i].refine(req.p, settings, i as u64)))
            .collect();
        for (i, r) in results {
            evaluations += r.evaluations;
            offer(&mut best, req, tops[i].config.with_positions(&r.positions));
        }
        at = end;
    }

    let b = best.ok_or(OptimizeError::Infeasible {
        k: req.k,
        truncated: enumeration.truncated,
    })?;
    Ok(OptimizeResult {
        energy: b.energy,
        partition: b.partition,
        cut_config: b.config,
        certified: false,
        evaluations,
        report: b.report,
        truncated: enumeration.truncated,
        topologies: tops.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;

    fn run(g: MetricGraph, k: usize, problem: Problem, class: PartitionClass) -> OptimizeResult {
        minimize(&OptimizeRequest::new(g, k, Exponent::Infinity, problem, class)).unwrap()
    }

    #[test]
    fn loop_three() {
        let r = run(
            Family::Loop(1.into()).build().unwrap(),
            3,
            Problem::Natural,
            PartitionClass::Rigid,
        );
        assert!((r.energy / PI2 - 9.0).abs() < 1e-9, "{}", r.energy / PI2);
        assert_eq!(r.partition.classification(), Classification::Rigid);
    }

    #[test]
    fn star_dirichlet_eight() {
        let g = Family::Star { m: 3, total: 3.into() }.build().unwrap();
        let r = run(g, 8, Problem::Dirichlet, PartitionClass::Rigid);
        assert!((r.energy / PI2 - 6.25).abs() < 6.25e-6, "{}", r.energy / PI2);
    }

    #[test]
    fn two_intervals_four() {
        let g = Family::TwoIntervals(2.into()).build().unwrap();
        let r = run(g, 4, Problem::Natural, PartitionClass::Rigid);
        assert!((r.energy / PI2 - 2.25).abs() < 1e-9, "{}", r.energy / PI2);
    }

    #[test]
    fn interval_two() {
        let g = Family::Interval(1.into()).build().unwrap();
        let r = run(g.clone(), 2, Problem::Dirichlet, PartitionClass::Rigid);
        assert!((r.energy / PI2 - 1.0).abs() < 1e-9);
        let r = run(g, 2, Problem::Natural, PartitionClass::Rigid);
        assert!((r.energy / PI2 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_small_k() {
        let g = Family::TwoIntervals(2.into()).build().unwrap();
        let req = OptimizeRequest::new(g, 1, Exponent::Infinity, Problem::Natural, PartitionClass::Rigid);
        assert!(matches!(minimize(&req), Err(OptimizeError::TooFewClusters { .. })));
    }
}
