//! The `2|E| × 2|E|` vertex-condition matrix `M(k)`.
//!
//! On edge `e` a solution is `a cos(kx) + b sin(kx)` (`a + b x` at `k = 0`),
//! `x` measured from the tail. Each natural vertex of degree `d` contributes
//! `d − 1` continuity rows and one Kirchhoff row, each Dirichlet vertex `d`
//! vanishing rows. `M(k)` is singular exactly at eigenvalues.

use super::count::SpectralGraph;
use nalgebra::DMatrix;

/// Value and outward-derivative coefficients of `(a, b)` at one stub.
/// Derivatives are divided by `k` for `k > 0`.
fn stub_rows(k: f64, l: f64, at_tail: bool) -> ([f64; 2], [f64; 2]) {
    if k == 0.0 {
        if at_tail {
            ([1.0, 0.0], [0.0, 1.0])
        } else {
            ([1.0, l], [0.0, -1.0])
        }
    } else if at_tail {
        ([1.0, 0.0], [0.0, 1.0])
    } else {
        let (s, c) = (k * l).sin_cos();
        ([c, s], [s, -c])
    }
}

/// Row-normalised `M(k)`. Each row is scaled by the norm of the stub
/// coefficients entering it, not by its own norm: on a loop the two stubs
/// of one edge cancel at eigenvalues, and rescaling the rounding residue
/// would hide the singularity.
pub fn secular_matrix(g: &SpectralGraph, k: f64) -> DMatrix<f64> {
    let m = g.edges.len();
    let mut stubs: Vec<Vec<(usize, bool)>> = vec![Vec::new(); g.vertex_count];
    for (i, &(u, v, _)) in g.edges.iter().enumerate() {
        stubs[u].push((i, true));
        stubs[v].push((i, false));
    }
    let mut mat = DMatrix::<f64>::zeros(2 * m, 2 * m);
    let mut mass = vec![0.0; 2 * m];
    let mut row = 0;
    let mut put = |mat: &mut DMatrix<f64>, row: usize, e: usize, coef: [f64; 2], sign: f64| {
        mat[(row, 2 * e)] += sign * coef[0];
        mat[(row, 2 * e + 1)] += sign * coef[1];
        mass[row] += coef[0] * coef[0] + coef[1] * coef[1];
    };
    for (x, list) in stubs.iter().enumerate() {
        let rows: Vec<_> = list
            .iter()
            .map(|&(e, tail)| (e, stub_rows(k, g.edges[e].2, tail)))
            .collect();
        if g.dirichlet[x] {
            for &(e, (val, _)) in &rows {
                put(&mut mat, row, e, val, 1.0);
                row += 1;
            }
            continue;
        }
        for i in 1..rows.len() {
            put(&mut mat, row, rows[0].0, rows[0].1 .0, 1.0);
            put(&mut mat, row, rows[i].0, rows[i].1 .0, -1.0);
            row += 1;
        }
        for &(e, (_, der)) in &rows {
            put(&mut mat, row, e, der, 1.0);
        }
        row += 1;
    }
    for (mut r, &w) in mat.row_iter_mut().zip(&mass) {
        if w > 0.0 {
            r /= w.sqrt();
        }
    }
    mat
}

/// Singular values of the row-normalised `M(k)`, ascending.
pub fn singular_values(g: &SpectralGraph, k: f64) -> Vec<f64> {
    let mut s: Vec<f64> = secular_matrix(g, k).singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn singular_at_eigenvalues_only() {
        let g = SpectralGraph {
            vertex_count: 4,
            edges: vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
            dirichlet: vec![false; 4],
        };
        // equilateral 3-star with unit arms: k = π/2 is double
        let s = singular_values(&g, PI / 2.0);
        assert!(s[0] < 1e-12 && s[1] < 1e-12 && s[2] > 1e-3);
        assert!(singular_values(&g, 1.3)[0] > 1e-3);
        // k = 0: constants
        let s = singular_values(&g, 0.0);
        assert!(s[0] < 1e-12 && s[1] > 1e-3);
    }
}
