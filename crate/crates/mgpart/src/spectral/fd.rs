//! Finite-difference oracle.
//!
//! Each edge is cut into `⌈ℓ·n⌉` equal cells; the stiffness matrix is the
//! standard three-point Laplacian and the mass matrix is lumped, so the
//! vertex rows read `Σ (u_v − u_nb)/h_e = λ u_v Σ h_e/2`. Eigenvalues are found
//! by bisection on the Sturm count of `K − σM`, obtained by eliminating the
//! interior chain of every edge and taking the inertia of the small vertex
//! Schur complement.

use super::count::SpectralGraph;
use nalgebra::DMatrix;

/// Ceiling on the total number of grid nodes.
pub const MAX_NODES: usize = 50_000_000;

struct Chain {
    u: usize,
    v: usize,
    cells: usize,
    h: f64,
}

fn chains(g: &SpectralGraph, n_per_unit: usize) -> Vec<Chain> {
    g.edges
        .iter()
        .map(|&(u, v, l)| {
            let cells = ((l * n_per_unit as f64).ceil() as usize).max(2);
            Chain {
                u,
                v,
                cells,
                h: l / cells as f64,
            }
        })
        .collect()
}

pub(crate) fn node_count(g: &SpectralGraph, n_per_unit: usize) -> usize {
    chains(g, n_per_unit).iter().map(|c| c.cells - 1).sum::<usize>() + g.vertex_count
}

fn nonzero(p: f64) -> f64 {
    if p == 0.0 {
        -f64::MIN_POSITIVE
    } else {
        p
    }
}

/// Number of discrete eigenvalues below `sigma`.
fn sturm_count(g: &SpectralGraph, chains: &[Chain], sigma: f64) -> usize {
    let mut index = vec![usize::MAX; g.vertex_count];
    let mut n = 0;
    for x in 0..g.vertex_count {
        if !g.dirichlet[x] {
            index[x] = n;
            n += 1;
        }
    }
    let mut schur = DMatrix::<f64>::zeros(n, n);
    let mut negatives = 0;
    for ch in chains {
        let m = ch.cells - 1;
        let d = 2.0 / ch.h - sigma * ch.h;
        let c = -1.0 / ch.h;
        let vertex_diag = 1.0 / ch.h - 0.5 * sigma * ch.h;
        // forward pivots, and the product giving (T⁻¹)_{1m}
        let mut p = nonzero(d);
        if p < 0.0 {
            negatives += 1;
        }
        let mut prod = 1.0;
        for _ in 1..m {
            prod *= -c / p;
            p = nonzero(d - c * c / p);
            if p < 0.0 {
                negatives += 1;
            }
        }
        let t_mm = 1.0 / p;
        let t_1m = prod / p;
        let mut q = nonzero(d);
        for _ in 1..m {
            q = nonzero(d - c * c / q);
        }
        let t_11 = 1.0 / q;
        let (iu, iv) = (index[ch.u], index[ch.v]);
        let c2 = c * c;
        if iu != usize::MAX && iu == iv {
            schur[(iu, iu)] += 2.0 * vertex_diag - c2 * (t_11 + t_mm + 2.0 * t_1m);
            continue;
        }
        if iu != usize::MAX {
            schur[(iu, iu)] += vertex_diag - c2 * t_11;
        }
        if iv != usize::MAX {
            schur[(iv, iv)] += vertex_diag - c2 * t_mm;
        }
        if iu != usize::MAX && iv != usize::MAX {
            schur[(iu, iv)] -= c2 * t_1m;
            schur[(iv, iu)] -= c2 * t_1m;
        }
    }
    let vertex_negatives = if n == 0 {
        0
    } else {
        schur.symmetric_eigenvalues().iter().filter(|&&x| x < 0.0).count()
    };
    negatives + vertex_negatives
}

/// Lowest `count` discrete eigenvalues (with multiplicity).
pub(crate) fn fd_eigenvalues(g: &SpectralGraph, count: usize, n_per_unit: usize) -> Vec<f64> {
    let ch = chains(g, n_per_unit);
    let mut out = Vec::with_capacity(count);
    let mut lo = -1.0;
    let mut hi = 1.0;
    while sturm_count(g, &ch, hi) < count {
        hi *= 2.0;
    }
    for j in 1..=count {
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-13 * b.abs().max(1.0) {
            let mid = 0.5 * (a + b);
            if sturm_count(g, &ch, mid) >= j {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        out.push(if value.abs() < 1e-9 { 0.0 } else { value });
        lo = a;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_second_order() {
        let g = SpectralGraph {
            vertex_count: 2,
            edges: vec![(0, 1, 1.0)],
            dirichlet: vec![false, false],
        };
        let ev = fd_eigenvalues(&g, 3, 2000);
        assert!(ev[0].abs() < 1e-9);
        assert!((ev[1] - PI * PI).abs() < 1e-5);
        assert!((ev[2] - 4.0 * PI * PI).abs() / (4.0 * PI * PI) < 1e-5);
    }

    #[test]
    fn loop_is_double() {
        let g = SpectralGraph {
            vertex_count: 1,
            edges: vec![(0, 0, 1.0)],
            dirichlet: vec![false],
        };
        let ev = fd_eigenvalues(&g, 3, 500);
        let target = 4.0 * PI * PI;
        assert!((ev[1] - target).abs() / target < 1e-4);
        assert!((ev[2] - ev[1]).abs() < 1e-5 * target, "{ev:?}");
    }
}
