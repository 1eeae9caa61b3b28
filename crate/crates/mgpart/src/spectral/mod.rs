//! Laplacian eigenvalues on metric graphs with natural conditions and
//! optional Dirichlet vertices.
//!
//! The main solver bisects an exact eigenvalue counting function, so
//! multiplicities come out as jumps of the count. Every reported eigenvalue
//! carries the smallest singular value of the row-normalised vertex-condition
//! matrix `M(√λ)` as a residual certificate. A finite-difference oracle gives
//! independent values for cross-checks.

mod closed;
mod count;
mod fd;
mod reduce;
mod secular;

pub use closed::{interval_eigenvalue, loop_eigenvalue, star_eigenvalue_closed_form};
pub use count::{count_below, kth_k, spectrum_k, SpectralGraph, K_TOL};
pub use reduce::Reduced;
pub use secular::{secular_matrix, singular_values};

use crate::graph::MetricGraph;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use thiserror::Error;

/// Default ceiling on the number of requested eigenvalues.
pub const K_MAX: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("eigenvalue count must be at least 1")]
    ZeroCount,
    #[error("requested {count} eigenvalues, ceiling is {max}")]
    CountCeiling { count: usize, max: usize },
    #[error("Dirichlet set is empty")]
    EmptyDirichlet,
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("discretisation needs {nodes} nodes, ceiling is {max}")]
    MemoryCeiling { nodes: usize, max: usize },
    #[error("n_per_unit must be at least 100, got {0}")]
    Resolution(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Secular,
    ClosedForm,
    FdOracle,
}

/// Vertices carrying Dirichlet conditions; all others are natural.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryConditions {
    pub dirichlet_set: BTreeSet<usize>,
}

impl BoundaryConditions {
    pub fn natural() -> Self {
        Self::default()
    }

    pub fn dirichlet(vertices: impl IntoIterator<Item = usize>) -> Self {
        BoundaryConditions {
            dirichlet_set: vertices.into_iter().collect(),
        }
    }

    /// The marks stored on the graph.
    pub fn from_graph(g: &MetricGraph) -> Self {
        Self::dirichlet(g.dirichlet_vertices())
    }

    fn check(&self, g: &MetricGraph) -> Result<(), SpectralError> {
        match self.dirichlet_set.iter().find(|&&v| v >= g.vertex_count()) {
            Some(&v) => Err(SpectralError::UnknownVertex(v)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    /// Ascending, repeated according to multiplicity.
    pub eigenvalues: Vec<f64>,
    pub method: Method,
    /// Absolute tolerance on `k = √λ`.
    pub tolerance_used: f64,
    /// Smallest singular value of the normalised `M(√λ)` per eigenvalue.
    pub residuals: Vec<f64>,
}

impl SpectralResult {
    /// Distinct eigenvalues with their multiplicities.
    pub fn grouped(&self, rel: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &x in &self.eigenvalues {
            match out.last_mut() {
                Some((y, n)) if (x - *y).abs() <= rel * x.abs().max(1.0) => *n += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

/// Solver view of `g` under the given conditions.
pub fn spectral_graph(g: &MetricGraph, bc: &BoundaryConditions) -> SpectralGraph {
    SpectralGraph {
        vertex_count: g.vertex_count(),
        edges: g.edges().iter().map(|e| (e.tail, e.head, e.len())).collect(),
        dirichlet: (0..g.vertex_count()).map(|v| bc.dirichlet_set.contains(&v)).collect(),
    }
}

/// Lowest `count` eigenvalues of the Laplacian on a connected graph.
pub fn eigenvalues(g: &MetricGraph, bc: &BoundaryConditions, count: usize) -> Result<SpectralResult, SpectralError> {
    eigenvalues_with_ceiling(g, bc, count, K_MAX)
}

pub fn eigenvalues_with_ceiling(
    g: &MetricGraph,
    bc: &BoundaryConditions,
    count: usize,
    k_max: usize,
) -> Result<SpectralResult, SpectralError> {
    if count == 0 {
        return Err(SpectralError::ZeroCount);
    }
    if count > k_max {
        return Err(SpectralError::CountCeiling { count, max: k_max });
    }
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    bc.check(g)?;
    let sg = spectral_graph(g, bc);
    let groups = spectrum_k(&sg, count);
    let mut eigenvalues = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut k_top: f64 = 0.0;
    for &(k, mult) in &groups {
        let r = singular_values(&sg, k)[0];
        for _ in 0..mult {
            eigenvalues.push(k * k);
            residuals.push(r);
        }
        k_top = k_top.max(k);
    }
    eigenvalues.truncate(count);
    residuals.truncate(count);
    Ok(SpectralResult {
        eigenvalues,
        method: Method::Secular,
        tolerance_used: K_TOL * k_top.max(1.0),
        residuals,
    })
}

/// First nontrivial eigenvalue with natural conditions everywhere.
pub fn mu2(g: &MetricGraph) -> Result<f64, SpectralError> {
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    Ok(ground_state(&spectral_graph(g, &BoundaryConditions::natural()), true))
}

/// Lowest eigenvalue with Dirichlet conditions on `dirichlet_set`.
pub fn lambda1(g: &MetricGraph, dirichlet_set: &BTreeSet<usize>) -> Result<f64, SpectralError> {
    if dirichlet_set.is_empty() {
        return Err(SpectralError::EmptyDirichlet);
    }
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    let bc = BoundaryConditions {
        dirichlet_set: dirichlet_set.clone(),
    };
    bc.check(g)?;
    Ok(ground_state(&spectral_graph(g, &bc), false))
}

/// Eigenvalues of the finite-difference discretisation with `n_per_unit`
/// cells per unit length.
pub fn fd_oracle_eigenvalues(
    g: &MetricGraph,
    bc: &BoundaryConditions,
    count: usize,
    n_per_unit: usize,
) -> Result<SpectralResult, SpectralError> {
    if n_per_unit < 100 {
        return Err(SpectralError::Resolution(n_per_unit));
    }
    if count == 0 {
        return Err(SpectralError::ZeroCount);
    }
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    bc.check(g)?;
    let sg = spectral_graph(g, bc);
    let nodes = fd::node_count(&sg, n_per_unit);
    if nodes > fd::MAX_NODES {
        return Err(SpectralError::MemoryCeiling {
            nodes,
            max: fd::MAX_NODES,
        });
    }
    let eigenvalues = fd::fd_eigenvalues(&sg, count, n_per_unit);
    let h = 1.0 / n_per_unit as f64;
    Ok(SpectralResult {
        residuals: vec![f64::NAN; eigenvalues.len()],
        eigenvalues,
        method: Method::FdOracle,
        tolerance_used: h * h,
    })
}

/// Equal arm length if `g` is a star (one centre of degree ≥ 3, all other
/// vertices leaves) with identical arms and the given leaf condition.
fn equilateral_star_arm(g: &SpectralGraph, leaves_dirichlet: bool) -> Option<f64> {
    let deg = g.degree();
    let centre = (0..g.vertex_count).find(|&x| deg[x] >= 3)?;
    if g.dirichlet[centre] || deg[centre] != g.edges.len() {
        return None;
    }
    let arm = g.edges[0].2;
    for &(u, v, l) in &g.edges {
        let leaf = if u == centre { v } else { u };
        if l != arm || leaf == centre || deg[leaf] != 1 || g.dirichlet[leaf] != leaves_dirichlet {
            return None;
        }
    }
    Some(arm)
}

/// `μ₂` (natural) or `λ₁` (Dirichlet) of a connected cluster, using closed
/// forms for intervals, loops and equilateral stars.
pub fn ground_state(g: &SpectralGraph, natural: bool) -> f64 {
    ground_state_with_method(g, natural).0
}

pub fn ground_state_with_method(g: &SpectralGraph, natural: bool) -> (f64, Method) {
    if natural {
        let mut plain = g.clone();
        plain.dirichlet.iter_mut().for_each(|d| *d = false);
        return reduced_ground_state(&plain.normalized(), true);
    }
    let mut best = f64::INFINITY;
    let mut method = Method::ClosedForm;
    for part in g.split_dirichlet() {
        let (value, m) = reduced_ground_state(&part.normalized(), false);
        if m == Method::Secular {
            method = m;
        }
        best = best.min(value);
    }
    (best, method)
}

/// Ground state of one already reduced part: a normalised connected graph
/// for the natural problem, or a normalised piece of a Dirichlet split
/// (every Dirichlet vertex a leaf) for the Dirichlet problem.
pub fn reduced_ground_state(n: &SpectralGraph, natural: bool) -> (f64, Method) {
    if n.edges.len() == 1 {
        let (u, v, l) = n.edges[0];
        if u == v {
            if natural {
                return (4.0 * PI * PI / (l * l), Method::ClosedForm);
            }
        } else {
            let ends = if natural {
                0
            } else {
                u8::from(n.dirichlet[u]) + u8::from(n.dirichlet[v])
            };
            return (
                interval_eigenvalue(l, ends, if natural { 2 } else { 1 }),
                Method::ClosedForm,
            );
        }
    }
    if let Some(arm) = equilateral_star_arm(n, !natural) {
        return (PI * PI / (4.0 * arm * arm), Method::ClosedForm);
    }
    let k = kth_k(n, if natural { 2 } else { 1 });
    (k * k, Method::Secular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;

    const PI2: f64 = PI * PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn interval_spectra() {
        let g = Family::Interval(1.into()).build().unwrap();
        let r = eigenvalues(&g, &BoundaryConditions::natural(), 3).unwrap();
        assert_eq!(r.eigenvalues[0], 0.0);
        assert!(rel(r.eigenvalues[1], PI2) < 1e-12);
        assert!(rel(r.eigenvalues[2], 4.0 * PI2) < 1e-12);
        assert!(r.residuals.iter().all(|&x| x < 1e-6));
        let l = lambda1(&g, &[0].into_iter().collect()).unwrap();
        assert!(rel(l, PI2 / 4.0) < 1e-12);
        let l = lambda1(&g, &[0, 1].into_iter().collect()).unwrap();
        assert!(rel(l, PI2) < 1e-12);
    }

    #[test]
    fn star_double_eigenvalue() {
        let g = Family::Star { m: 3, total: 3.into() }.build().unwrap();
        let r = eigenvalues(&g, &BoundaryConditions::natural(), 4).unwrap();
        let groups = r.grouped(1e-10);
        assert_eq!(groups[1].1, 2);
        assert!(rel(groups[1].0, PI2 / 4.0) < 1e-12);
        assert!(rel(r.eigenvalues[3], PI2) < 1e-12);
        let sg = spectral_graph(&g, &BoundaryConditions::natural());
        let sv = singular_values(&sg, groups[1].0.sqrt());
        assert_eq!(sv.iter().filter(|&&s| s < 1e-8).count(), 2);
    }

    #[test]
    fn loop_and_pumpkin() {
        let g = Family::Loop(1.into()).build().unwrap();
        assert!(rel(mu2(&g).unwrap(), 4.0 * PI2) < 1e-12);
        let p = Family::PumpkinChain(vec![(2, 0.75.into())]).build().unwrap();
        let r = eigenvalues(&p, &BoundaryConditions::natural(), 3).unwrap();
        let target = 4.0 * PI2 / (1.5 * 1.5);
        assert!(rel(r.eigenvalues[1], target) < 1e-12);
        assert!(rel(r.eigenvalues[2], target) < 1e-12);
    }

    #[test]
    fn lambda1_requires_dirichlet() {
        let g = Family::Loop(1.into()).build().unwrap();
        assert_eq!(lambda1(&g, &BTreeSet::new()), Err(SpectralError::EmptyDirichlet));
        let two = Family::TwoIntervals(1.into()).build().unwrap();
        assert_eq!(mu2(&two), Err(SpectralError::Disconnected));
    }

    #[test]
    fn closed_forms_agree_with_solver() {
        let star = SpectralGraph {
            vertex_count: 5,
            edges: vec![(0, 1, 0.7), (0, 2, 0.7), (0, 3, 0.7), (0, 4, 0.7)],
            dirichlet: vec![false, true, true, true, true],
        };
        let (fast, m) = ground_state_with_method(&star, false);
        assert_eq!(m, Method::ClosedForm);
        let slow = kth_k(&star, 1).powi(2);
        assert!(rel(fast, slow) < 1e-12);
        let mut nat = star.clone();
        nat.dirichlet = vec![false; 5];
        let (fast, _) = ground_state_with_method(&nat, true);
        assert!(rel(fast, kth_k(&nat, 2).powi(2)) < 1e-12);
    }

    #[test]
    fn fd_matches_lasso() {
        let g = Family::Lasso {
            stick: 1.into(),
            ring: 1.into(),
        }
        .build()
        .unwrap();
        let bc = BoundaryConditions::natural();
        let s = eigenvalues(&g, &bc, 5).unwrap();
        let f = fd_oracle_eigenvalues(&g, &bc, 5, 2000).unwrap();
        for i in 1..5 {
            assert!(
                rel(s.eigenvalues[i], f.eigenvalues[i]) < 1e-4,
                "{i}: {} {}",
                s.eigenvalues[i],
                f.eigenvalues[i]
            );
        }
    }
}
