//! Special-function kernels evaluated in closed finite form.

/// Binomial coefficient `C(n, k)` as a float. Exact for the sizes used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Gamma(N - v + 1 + a) / Gamma(N + 1 + a)`, computed as
/// `1 / prod_{j = N-v+1}^{N} (j + a)`.
///
/// `v` ranges over `0..=N`; `v = 0` gives the empty product.
pub fn gamma_ratio(n: usize, v: usize, a: f64) -> f64 {
    assert!(v <= n, "order {v} exceeds {n}");
    1.0 / (n - v + 1..=n).map(|j| j as f64 + a).product::<f64>()
}

/// `N! Gamma(N - v + 1 + a) / ((N - v)! Gamma(N + 1 + a))`, the Laplace
/// transform at `a / mu` of the `v`-th order statistic of `N` i.i.d.
/// exponential gains with mean `mu`. Equals 1 at `a = 0`.
pub fn order_statistic_factor(n: usize, v: usize, a: f64) -> f64 {
    assert!(v <= n, "order {v} exceeds {n}");
    (n - v + 1..=n)
        .map(|j| j as f64 / (j as f64 + a))
        .product()
}

/// Gauss hypergeometric `2F1(a, -m, c; z)` for a non-negative integer `m`.
///
/// The series terminates after `m + 1` terms, so this is a polynomial in
/// `z` valid for every `z`.
pub fn hyp2f1_terminating(a: f64, m: usize, c: f64, z: f64) -> f64 {
    let b = -(m as f64);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..m {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
    }
    sum
}
