//! Exact optimal energies (`p = ∞`) of equilateral stars and of the
//! disjoint union of two intervals.

use crate::scalar::Scalar;
use crate::spectral::star_eigenvalue_closed_form;

/// `k = jm + r` with `r ∈ 1..=m`.
fn split(m: usize, k: usize) -> (usize, usize) {
    let j = (k - 1) / m;
    (j, k - j * m)
}

fn star_value<T: Scalar>(m: usize, total: T, n: T) -> T {
    let mm = T::of_count(m as u64);
    T::pi2() * mm * mm * n * n / (total * total)
}

/// Optimal Dirichlet energy of the equilateral `m`-star, equal to its
/// natural eigenvalue `μ_k`: `π²m²j²/L²` for `r = 1`, else `π²m²(j+½)²/L²`.
pub fn star_dirichlet_energy<T: Scalar>(m: usize, total: T, k: usize) -> T {
    assert!(m >= 3 && k >= 1, "star energy needs m >= 3 and k >= 1");
    star_eigenvalue_closed_form(m, total, k)
}

/// Optimal rigid natural energy of the equilateral `m`-star:
/// `π²m²(j+½)²/L²` for `r ≤ ⌊m/2⌋`, else `π²m²(j+1)²/L²`.
pub fn star_neumann_energy<T: Scalar>(m: usize, total: T, k: usize) -> T {
    assert!(m >= 3 && k >= 1, "star energy needs m >= 3 and k >= 1");
    let (j, r) = split(m, k);
    let j = T::of_count(j as u64);
    let n = if r <= m / 2 { j + T::of(0.5) } else { j + T::one() };
    star_value(m, total, n)
}

/// `μ₂` of an interval of length `len` cut into `n` equal pieces, written
/// as `π²(n/len)²` so that equal pieces on both intervals give bitwise
/// equal values.
fn pieces<T: Scalar>(n: usize, len: T) -> T {
    let q = T::of_count(n as u64) / len;
    T::pi2() * q * q
}

/// `⌈x⌉`, snapping values within a few ulps of an integer onto it.
fn ceil_snapped<T: Scalar>(x: T) -> usize {
    let r = x.round();
    let n = if (x - r).abs() <= T::of(8.0) * T::epsilon() * x.abs().max(T::one()) {
        r
    } else {
        x.ceil()
    };
    n.to_usize().expect("nonnegative count")
}

/// Optimal natural energy of `[0,1] ⊔ [0,a]`:
/// `min{π²⌈ak/(a+1)⌉²/a², π²⌈k/(a+1)⌉²}`.
pub fn two_interval_neumann_energy<T: Scalar>(a: T, k: usize) -> T {
    assert!(a > T::zero() && k >= 2, "two intervals need a > 0 and k >= 2");
    let kk = T::of_count(k as u64);
    let on_a = ceil_snapped(a * kk / (a + T::one()));
    let on_one = ceil_snapped(kk / (a + T::one()));
    pieces(on_a, a).min(pieces(on_one, T::one()))
}

/// The same energy by brute force over the number `i` of clusters on
/// `[0,1]`: `min_i max{π²i², π²(k−i)²/a²}`.
pub fn two_interval_neumann_brute<T: Scalar>(a: T, k: usize) -> T {
    assert!(a > T::zero() && k >= 2, "two intervals need a > 0 and k >= 2");
    (1..k)
        .map(|i| pieces(i, T::one()).max(pieces(k - i, a)))
        .fold(T::infinity(), T::min)
}

/// Optimal Dirichlet energy of `[0,1] ⊔ [0,a]`, which equals the natural
/// energy with two clusters fewer. `None` for `k < 4`.
pub fn two_interval_dirichlet_energy<T: Scalar>(a: T, k: usize) -> Option<T> {
    (k >= 4).then(|| two_interval_neumann_energy(a, k - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn star_examples() {
        assert!(close(star_dirichlet_energy(3, 3.0, 7), 4.0 * PI2));
        assert!(close(star_dirichlet_energy(3, 3.0, 8), 6.25 * PI2));
        assert!(close(star_dirichlet_energy(4, 4.0, 4), PI2 / 4.0));
        assert!(close(star_neumann_energy(3, 3.0, 7), 6.25 * PI2));
        assert!(close(star_neumann_energy(3, 3.0, 8), 9.0 * PI2));
        assert!(close(star_neumann_energy(3, 3.0, 3), PI2));
    }

    #[test]
    fn two_interval_examples() {
        assert!(close(two_interval_neumann_energy(2.0, 4), 2.25 * PI2));
        assert!(close(two_interval_neumann_energy(1.0, 2), PI2));
        assert!(close(two_interval_dirichlet_energy(2.0, 6).unwrap(), 2.25 * PI2));
        assert!(close(two_interval_dirichlet_energy(1.0, 4).unwrap(), PI2));
        assert!(close(two_interval_dirichlet_energy(1.0, 6).unwrap(), 4.0 * PI2));
        assert_eq!(two_interval_dirichlet_energy(1.0, 3), None);
    }

    #[test]
    fn formula_matches_brute_force() {
        for a in [0.5, 1.0, 1.5, 2.0, 2f64.sqrt()] {
            for k in 2..=2000 {
                assert_eq!(
                    two_interval_neumann_energy(a, k),
                    two_interval_neumann_brute(a, k),
                    "a={a} k={k}"
                );
            }
        }
    }
}
