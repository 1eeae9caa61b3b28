//! Closed-form spectra of catalog graphs.

use crate::scalar::Scalar;

/// `j`-th eigenvalue (1-based, zero included) of an interval of length `l`
/// with `dirichlet_ends ∈ {0, 1, 2}` Dirichlet endpoints.
pub fn interval_eigenvalue<T: Scalar>(l: T, dirichlet_ends: u8, j: usize) -> T {
    let j = T::of_count(j as u64);
    let n = match dirichlet_ends {
        0 => j - T::one(),
        1 => j - T::of(0.5),
        _ => j,
    };
    T::pi2() * n * n / (l * l)
}

/// `j`-th eigenvalue (1-based) of a natural loop of length `l`:
/// `0, (2π/l)², (2π/l)², (4π/l)², …`.
pub fn loop_eigenvalue<T: Scalar>(l: T, j: usize) -> T {
    let n = T::of_count((j / 2) as u64);
    T::of(4.0) * T::pi2() * n * n / (l * l)
}

/// Ordered eigenvalue `μ_k` of the natural equilateral star with `m` arms
/// and total length `total`: with `k = jm + r`, `r ∈ 1..=m`, it is
/// `π²m²j²/L²` for `r = 1` and `π²m²(j+½)²/L²` otherwise.
pub fn star_eigenvalue_closed_form<T: Scalar>(m: usize, total: T, k: usize) -> T {
    assert!(m >= 1 && k >= 1, "star index needs m >= 1 and k >= 1");
    let j = (k - 1) / m;
    let r = k - j * m;
    let jj = T::of_count(j as u64);
    let n = if r == 1 { jj } else { jj + T::of(0.5) };
    let mm = T::of_count(m as u64);
    T::pi2() * mm * mm * n * n / (total * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn star_values() {
        let pi2 = PI * PI;
        assert!((star_eigenvalue_closed_form(3, 3.0, 7) - 4.0 * pi2).abs() < 1e-12);
        assert!((star_eigenvalue_closed_form(3, 3.0, 8) - 6.25 * pi2).abs() < 1e-12);
        assert_eq!(star_eigenvalue_closed_form(4, 4.0, 1), 0.0);
        assert!((star_eigenvalue_closed_form(3, 3.0_f32, 2) - 0.25 * pi2 as f32).abs() < 1e-5);
    }

    #[test]
    fn interval_and_loop() {
        let pi2 = PI * PI;
        assert_eq!(interval_eigenvalue(1.0, 0, 1), 0.0);
        assert!((interval_eigenvalue(1.0, 1, 1) - pi2 / 4.0).abs() < 1e-12);
        assert!((interval_eigenvalue(1.0, 2, 1) - pi2).abs() < 1e-12);
        assert_eq!(loop_eigenvalue(1.0, 1), 0.0);
        assert_eq!(loop_eigenvalue(1.0, 2), loop_eigenvalue(1.0, 3));
    }
}
