//! Randomised invariants across the modules.

mod common;

use common::*;
use mgpart::asymptotics::{ck_sequence, two_interval_neumann_energy};
use mgpart::bounds::bound_report;
use mgpart::graph::{stats, Family};
use mgpart::partition::{apply_cuts, energy, CutConfig, Exponent, Problem};
use mgpart::spectral::{eigenvalues, lambda1, mu2, BoundaryConditions};
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::f64::consts::PI;

const PI2: f64 = PI * PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_is_monotone_in_p((shape, cuts) in graph_shape(4, 2).prop_flat_map(|s| {
        let n = s.edges.len();
        (Just(s), cuts_for(n))
    }), problem in problem()) {
        check_monotone_in_p(&shape, &cuts, problem)?;
    }

    #[test]
    fn partition_energy_scales((shape, cuts) in graph_shape(4, 2).prop_flat_map(|s| {
        let n = s.edges.len();
        (Just(s), cuts_for(n))
    }), problem in problem(), t in 0.1f64..10.0) {
        check_scaling(&shape, &cuts, problem, t)?;
    }

    #[test]
    fn rotation_identity(a in 0.01f64..100.0, k in 1u64..=100_000) {
        check_rotation_identity(a, k)?;
    }

    #[test]
    fn cluster_lengths_sum_to_total((shape, cuts) in graph_shape(5, 2).prop_flat_map(|s| {
        let n = s.edges.len();
        (Just(s), cuts_for(n))
    })) {
        let g = shape.build();
        if let Ok(part) = apply_cuts(&g, &config(&cuts)) {
            let sum: f64 = part.cluster_lengths().iter().sum();
            prop_assert!((sum - g.total_length()).abs() <= 1e-12 * g.total_length());
        }
    }

    #[test]
    fn cluster_ground_states_respect_isoperimetry((shape, cuts) in graph_shape(4, 2).prop_flat_map(|s| {
        let n = s.edges.len();
        (Just(s), cuts_for(n))
    }), problem in problem()) {
        let g = shape.build();
        if let Ok(part) = apply_cuts(&g, &config(&cuts)) {
            if let Ok(report) = energy(&part, problem, Exponent::Infinity) {
                prop_assert!(report.cluster_bounds_hold(1e-9), "{:?}", report.per_cluster);
            }
        }
    }

    #[test]
    fn cut_config_round_trips((shape, cuts) in graph_shape(4, 2).prop_flat_map(|s| {
        let n = s.edges.len();
        (Just(s), cuts_for(n))
    })) {
        let g = shape.build();
        let c = config(&cuts);
        let back = CutConfig::parse(&g, &c.to_text(&g)).unwrap();
        if let (Ok(a), Ok(b)) = (apply_cuts(&g, &c), apply_cuts(&g, &back)) {
            let sa: Vec<_> = a.clusters().iter().map(|c| c.support.clone()).collect();
            let sb: Vec<_> = b.clusters().iter().map(|c| c.support.clone()).collect();
            prop_assert_eq!(sa, sb);
        }
    }

    #[test]
    fn betti_survives_subdivision(shape in graph_shape(5, 3), t in 0.1f64..0.9, pick in any::<prop::sample::Index>()) {
        let e = pick.index(shape.edges.len());
        let s0 = stats(&shape.build());
        let sub = shape.subdivided(e, t);
        let g1 = sub.build();
        let s1 = stats(&g1);
        prop_assert_eq!(s0.betti, s1.betti);
        prop_assert_eq!(s1.betti + g1.vertex_count(), g1.edge_count() + s1.num_components);
    }

    #[test]
    fn stats_are_normalisation_invariant(shape in graph_shape(5, 3)) {
        let g = shape.build();
        let (a, b) = (stats(&g), stats(&g.normalize()));
        prop_assert!((a.total_length - b.total_length).abs() <= 1e-12 * a.total_length);
        prop_assert_eq!(a.betti, b.betti);
        prop_assert!(a.girth == b.girth || (a.girth - b.girth).abs() <= 1e-12 * a.girth);
        prop_assert_eq!(a.degree_one_count, b.degree_one_count);
        prop_assert_eq!(a.pendant2_count, b.pendant2_count);
        prop_assert_eq!(a.has_eulerian_path, b.has_eulerian_path);
        prop_assert_eq!(a.eulerian_cover_number, b.eulerian_cover_number);
    }

    #[test]
    fn pendants_and_trails(shape in graph_shape(6, 3)) {
        let s = stats(&shape.build());
        prop_assert!(s.pendant2_count <= s.betti);
        prop_assert_eq!(s.eulerian_cover_number == 1, s.has_eulerian_path);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ground_states_respect_isoperimetry(shape in graph_shape(4, 2), mark in any::<prop::sample::Index>()) {
        let g = shape.build();
        let l = g.total_length();
        prop_assert!(mu2(&g).unwrap() >= PI2 / (l * l) * (1.0 - 1e-9));
        let v = mark.index(g.vertex_count());
        let d = BTreeSet::from([v]);
        prop_assert!(lambda1(&g, &d).unwrap() >= PI2 / (4.0 * l * l) * (1.0 - 1e-9));
    }

    #[test]
    fn extra_dirichlet_mark_never_lowers(shape in graph_shape(4, 2), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let g = shape.build();
        let (u, v) = (a.index(g.vertex_count()), b.index(g.vertex_count()));
        let one = lambda1(&g, &BTreeSet::from([u])).unwrap();
        let two = lambda1(&g, &BTreeSet::from([u, v])).unwrap();
        prop_assert!(two >= one * (1.0 - 1e-9), "{two} < {one}");
    }

    #[test]
    fn eigenvalues_scale_and_have_small_residuals(shape in graph_shape(4, 2), t in 0.2f64..5.0) {
        let g = shape.build();
        let a = eigenvalues(&g, &BoundaryConditions::natural(), 5).unwrap();
        let b = eigenvalues(&g.scaled(t), &BoundaryConditions::natural(), 5).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((y * t * t - x).abs() <= 1e-9 * x.max(1.0), "{x} vs {}", y * t * t);
        }
        prop_assert!(a.residuals.iter().all(|&r| r < 1e-6), "{:?}", a.residuals);
    }

    #[test]
    fn valid_bounds_are_consistent(which in 0usize..8, k in 1usize..=60, problem in problem()) {
        let g = catalog()[which].build().unwrap();
        // one Dirichlet cluster has no boundary
        if k == 1 && problem == Problem::Dirichlet {
            prop_assert!(bound_report(&g, k, problem).is_err());
            return Ok(());
        }
        let report = bound_report(&g, k, problem).unwrap();
        prop_assert!(report.is_consistent(), "{}", report.to_csv());
    }

    #[test]
    fn two_interval_remainder_is_bounded(a in 0.1f64..5.0) {
        // the energy is at most π²(k+1)²/L² once both intervals can take
        // whole clusters of length L/(k+1), i.e. k ≥ 1 + 2·max(a, 1/a)
        let l = 1.0 + a;
        let start = (1.0 + 2.0 * a.max(1.0 / a)).ceil() as usize;
        for p in ck_sequence(|k| two_interval_neumann_energy(a, k), l, start.max(2)..=400) {
            let upper = PI2 * (2.0 * p.k as f64 + 1.0) / (p.k as f64 * l * l);
            prop_assert!(p.c_k >= -1e-9 && p.c_k <= upper * (1.0 + 1e-12), "k={} c_k={}", p.k, p.c_k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rigid_is_never_below_connected(shape in graph_shape(3, 1), k in 2usize..=3) {
        check_rigid_above_connected(&shape, k)?;
    }

    #[test]
    fn dirichlet_classes_agree(shape in graph_shape(3, 1), k in 2usize..=3) {
        check_dirichlet_classes_agree(&shape, k)?;
    }
}

fn catalog() -> Vec<Family> {
    use mgpart::graph::Length;
    vec![
        Family::Interval(1.into()),
        Family::Loop(1.into()),
        Family::Star { m: 3, total: 3.into() },
        Family::Star { m: 4, total: 4.into() },
        Family::Lasso {
            stick: 1.into(),
            ring: 1.into(),
        },
        Family::Dumbbell {
            left: 1.into(),
            handle: 1.into(),
            right: 1.into(),
        },
        Family::Necklace(vec![(2, 1.into()), (1, 1.into()), (2, 1.into()), (1, 1.into())]),
        Family::Windmill {
            loops: 2,
            leaves: 4,
            arm: 1.into(),
            ring: Length::exact(1, 4),
        },
    ]
}

#[test]
fn rotation_identity_sweep() {
    let a = 2f64.sqrt();
    for k in 1..=100_000u64 {
        check_rotation_identity(a, k).unwrap();
    }
}

#[test]
fn optimum_scales_with_the_graph() {
    let g = Family::Lasso {
        stick: 1.into(),
        ring: 1.into(),
    }
    .build()
    .unwrap();
    for problem in [Problem::Dirichlet, Problem::Natural] {
        for t in [0.5, 3.0] {
            let run = |g| {
                let req = mgpart::optimize::OptimizeRequest::new(
                    g,
                    3,
                    Exponent::Infinity,
                    problem,
                    mgpart::optimize::PartitionClass::Rigid,
                );
                mgpart::optimize::minimize(&req).unwrap().energy
            };
            let (a, b) = (run(g.clone()), run(g.scaled(t)));
            assert!(
                (b * t * t - a).abs() <= 1e-8 * a,
                "{problem} t={t}: {a} vs {}",
                b * t * t
            );
        }
    }
}
