//! Strategies and property checks shared by the property suite and the
//! acceptance target.

#![allow(dead_code)]

use mgpart::asymptotics::rotation_orbit;
use mgpart::graph::MetricGraph;
use mgpart::optimize::{minimize, OptimizeRequest, PartitionClass};
use mgpart::partition::{apply_cuts, energy, CutConfig, Exponent, Problem};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Edge list of a connected multigraph on `vertices` vertices.
#[derive(Clone, Debug)]
pub struct GraphShape {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphShape {
    pub fn build(&self) -> MetricGraph {
        let mut b = MetricGraph::builder("random");
        for v in 0..self.vertices {
            b.vertex(&format!("v{v}"));
        }
        for (i, &(u, v, l)) in self.edges.iter().enumerate() {
            b.edge(&format!("e{i}"), &format!("v{u}"), &format!("v{v}"), l);
        }
        b.build().expect("shape builds")
    }

    /// Same graph with a degree-two vertex inserted at fraction `t` of
    /// edge `e`.
    pub fn subdivided(&self, e: usize, t: f64) -> GraphShape {
        let mut s = self.clone();
        let (u, v, l) = s.edges[e];
        let w = s.vertices;
        s.vertices += 1;
        s.edges[e] = (u, w, t * l);
        s.edges.push((w, v, (1.0 - t) * l));
        s
    }
}

/// Connected graphs: a random spanning tree on up to `max_vertices`
/// vertices plus up to `max_extra` further edges (loops and parallel edges
/// allowed), lengths in `[1/4, 2]`.
pub fn graph_shape(max_vertices: usize, max_extra: usize) -> impl Strategy<Value = GraphShape> {
    (1..=max_vertices)
        .prop_flat_map(move |n| {
            let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|v| (0..v).boxed()).collect();
            let extra_min = usize::from(n == 1);
            let extra = prop::collection::vec((0..n, 0..n), extra_min..=max_extra.max(extra_min));
            (Just(n), parents, extra)
        })
        .prop_flat_map(|(n, parents, extra)| {
            let mut ends: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            ends.extend(extra);
            let lengths = prop::collection::vec(0.25f64..2.0, ends.len());
            (Just(n), Just(ends), lengths)
        })
        .prop_map(|(n, ends, lengths)| GraphShape {
            vertices: n,
            edges: ends.into_iter().zip(lengths).map(|((u, v), l)| (u, v, l)).collect(),
        })
}

/// Up to two interior cuts per edge at well separated positions.
pub fn cuts_for(edges: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        prop::collection::vec(0.05f64..0.95, 0..=2).prop_map(|mut ts| {
            ts.sort_by(f64::total_cmp);
            ts.dedup_by(|a, b| (*a - *b).abs() < 0.05);
            ts
        }),
        edges,
    )
}

pub fn config(cuts: &[Vec<f64>]) -> CutConfig {
    let mut c = CutConfig::new();
    for (e, ts) in cuts.iter().enumerate() {
        for &t in ts {
            c.add_cut(e, t);
        }
    }
    c
}

pub fn problem() -> impl Strategy<Value = Problem> {
    prop_oneof![Just(Problem::Dirichlet), Just(Problem::Natural)]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `Λ_p` of a fixed partition is nondecreasing in `p`.
pub fn check_monotone_in_p(shape: &GraphShape, cuts: &[Vec<f64>], problem: Problem) -> Result<(), TestCaseError> {
    let g = shape.build();
    let Ok(part) = apply_cuts(&g, &config(cuts)) else {
        return Ok(());
    };
    let ps = [
        Exponent::Finite(1.0),
        Exponent::Finite(1.5),
        Exponent::Finite(2.0),
        Exponent::Finite(4.0),
        Exponent::Finite(16.0),
        Exponent::Infinity,
    ];
    let mut values = Vec::new();
    for p in ps {
        match energy(&part, problem, p) {
            Ok(r) => values.push(r.energy),
            Err(_) => return Ok(()),
        }
    }
    for w in values.windows(2) {
        prop_assert!(w[0] <= w[1] * (1.0 + 1e-12), "not monotone: {values:?}");
    }
    Ok(())
}

fn optimum(g: &MetricGraph, k: usize, problem: Problem, class: PartitionClass) -> Result<f64, TestCaseError> {
    let req = OptimizeRequest::new(g.clone(), k, Exponent::Infinity, problem, class);
    minimize(&req)
        .map(|r| r.energy)
        .map_err(|e| TestCaseError::fail(format!("minimize failed: {e}")))
}

/// Natural problem: the rigid optimum is never below the connected one.
pub fn check_rigid_above_connected(shape: &GraphShape, k: usize) -> Result<(), TestCaseError> {
    let g = shape.build();
    let rigid = optimum(&g, k, Problem::Natural, PartitionClass::Rigid)?;
    let connected = optimum(&g, k, Problem::Natural, PartitionClass::Connected)?;
    prop_assert!(
        rigid >= connected * (1.0 - 1e-9),
        "rigid {rigid} < connected {connected}"
    );
    Ok(())
}

/// Dirichlet problem: both classes reach the same optimum.
pub fn check_dirichlet_classes_agree(shape: &GraphShape, k: usize) -> Result<(), TestCaseError> {
    let g = shape.build();
    let rigid = optimum(&g, k, Problem::Dirichlet, PartitionClass::Rigid)?;
    let connected = optimum(&g, k, Problem::Dirichlet, PartitionClass::Connected)?;
    prop_assert!(rel(rigid, connected) <= 1e-6, "rigid {rigid} vs connected {connected}");
    Ok(())
}

/// Scaling every length by `t` divides a partition energy by `t²`.
pub fn check_scaling(shape: &GraphShape, cuts: &[Vec<f64>], problem: Problem, t: f64) -> Result<(), TestCaseError> {
    let g = shape.build();
    let c = config(cuts);
    let (Ok(a), Ok(b)) = (apply_cuts(&g, &c), apply_cuts(&g.scaled(t), &c)) else {
        return Ok(());
    };
    let (Ok(ea), Ok(eb)) = (
        energy(&a, problem, Exponent::Infinity),
        energy(&b, problem, Exponent::Infinity),
    ) else {
        return Ok(());
    };
    prop_assert!(
        rel(eb.energy * t * t, ea.energy) <= 1e-10,
        "{} vs {}",
        eb.energy * t * t,
        ea.energy
    );
    Ok(())
}

/// `T_{1/(a+1)}^k(0) + T_{a/(a+1)}^k(0) = 1` whenever neither term is 0.
pub fn check_rotation_identity(a: f64, k: u64) -> Result<(), TestCaseError> {
    let x = rotation_orbit(1.0 / (a + 1.0), k);
    let y = rotation_orbit(a / (a + 1.0), k);
    prop_assert!((x + y - 1.0).abs() <= 1e-10, "a={a} k={k}: {x} + {y}");
    Ok(())
}
