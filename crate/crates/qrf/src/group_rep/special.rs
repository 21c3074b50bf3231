//! Characters, Legendre polynomials and quadrature rules.

use std::f64::consts::{PI, TAU};

use super::spin::Spin;

/// `χ_j(ω) = sin((2j+1)ω/2) / sin(ω/2)`, summed as `Σ_m cos(mω)` so that
/// the identity class needs no limit.
pub fn su2_character(j: Spin, omega: f64) -> f64 {
    j.twice_ms().map(|tm| (tm as f64 * omega / 2.0).cos()).sum()
}

/// `P_l(x)` by the three-term recurrence.
pub fn legendre(l: usize, x: f64) -> f64 {
    legendre_pair(l, x).0
}

/// `(P_l(x), P_{l-1}(x))`.
fn legendre_pair(l: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return (1.0, 0.0);
    }
    for k in 1..l {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Largest zero of `P_l` (`l >= 1`) by bisection, bracketed between the
/// largest zero of `P_{l-1}` and 1 (interlacing).
pub fn legendre_largest_zero(l: usize) -> Option<f64> {
    if l == 0 {
        return None;
    }
    let mut lower = -1.0;
    for k in 1..=l {
        let (mut a, mut b) = (lower, 1.0);
        // P_k(1) = 1 > 0, and P_k changes sign once on (lower, 1)
        while b - a > 1e-15 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if legendre(k, mid) > 0.0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        lower = 0.5 * (a + b);
    }
    Some(lower)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            let dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        let _ = p;
        let dp = n as f64 * (x * legendre(n, x) - pm1) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (h, m) = ((b - a) / 2.0, (b + a) / 2.0);
    x.iter().zip(&w).map(|(&xi, &wi)| (m + h * xi, h * wi)).collect()
}

pub const CLASS_NODES: usize = 256;

/// Quadrature for class functions of SU(2): nodes `ω ∈ [0, 2π)` with weights
/// that already include the Weyl density `sin²(ω/2)/π`.
pub fn su2_class_quadrature(n: usize) -> Vec<(f64, f64)> {
    gauss_legendre_interval(n, 0.0, TAU)
        .into_iter()
        .map(|(w, wt)| (w, wt * (w / 2.0).sin().powi(2) / PI))
        .collect()
}

/// `∫ dg f(ω(g))` over Haar measure.
pub fn integrate_class_function(f: impl Fn(f64) -> f64) -> f64 {
    su2_class_quadrature(CLASS_NODES).iter().map(|&(w, wt)| wt * f(w)).sum()
}

/// Weyl density of the SU(2) class angle on `[0, 2π)`.
pub fn weyl_density(omega: f64) -> f64 {
    (omega / 2.0).sin().powi(2) / PI
}

/// Product rule over Euler angles that integrates every matrix element of
/// `D^j` (for `j <= j_max`) against Haar measure exactly. Returns
/// `(α, β, γ, weight)` with weights summing to 1.
pub fn euler_quadrature(j_max: Spin) -> Vec<(f64, f64, f64, f64)> {
    let tj = j_max.twice() as usize;
    // phases e^{-i m α} with |2m| <= 2 tj need more than 2 tj + 1 points
    let na = 2 * tj + 2;
    let nb = tj + 2;
    let mut out = Vec::with_capacity(na * na * nb);
    for (x, wb) in gauss_legendre(nb).0.into_iter().zip(gauss_legendre(nb).1) {
        let beta = x.clamp(-1.0, 1.0).acos();
        for ia in 0..na {
            for ig in 0..na {
                let (a, g) = (TAU * 2.0 * ia as f64 / na as f64, TAU * 2.0 * ig as f64 / na as f64);
                out.push((a, beta, g, wb / 2.0 / (na * na) as f64));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characters() {
        for tj in 0..8 {
            assert!((su2_character(Spin(tj), 0.0) - (tj + 1) as f64).abs() < 1e-14);
        }
        for &w in &[0.3, 1.7, 4.0] {
            assert!((su2_character(Spin(2), w) - (1.0 + 2.0 * f64::cos(w))).abs() < 1e-14);
            let closed = ((5.0 * w / 2.0).sin()) / (w / 2.0).sin();
            assert!((su2_character(Spin(4), w) - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn legendre_values_and_zeros() {
        assert!((legendre(2, 0.5) - (-0.125)).abs() < 1e-15);
        assert!((legendre(3, 0.3) - (0.5 * (5.0 * 0.027 - 0.9))).abs() < 1e-15);
        assert!(legendre_largest_zero(0).is_none());
        assert!(legendre_largest_zero(1).unwrap().abs() < 1e-15);
        assert!((legendre_largest_zero(2).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        // P_3 = (5x^3 - 3x)/2
        assert!((legendre_largest_zero(3).unwrap() - (0.6f64).sqrt()).abs() < 1e-12);
        for l in 1..40 {
            let x = legendre_largest_zero(l).unwrap();
            assert!(legendre(l, x).abs() < 1e-10);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let (x, w) = gauss_legendre(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m12: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((m12 - 2.0 / 13.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(256);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(40)).sum();
        assert!((m - 2.0 / 41.0).abs() < 1e-13);
    }

    #[test]
    fn character_orthogonality() {
        for a in 0..=6 {
            for b in 0..=6 {
                let v = integrate_class_function(|w| su2_character(Spin(a), w) * su2_character(Spin(b), w));
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-8, "{a} {b}: {v}");
            }
        }
    }

    #[test]
    fn euler_rule_integrates_irreps_to_zero() {
        let rule = euler_quadrature(Spin(4));
        assert!((rule.iter().map(|p| p.3).sum::<f64>() - 1.0).abs() < 1e-13);
        for tj in 1..=4 {
            let mut acc = crate::quantum_core::CMat::zeros(tj + 1, tj + 1);
            for &(a, b, g, wt) in &rule {
                acc += crate::group_rep::wigner::wigner_big_d(Spin(tj as u32), a, b, g) * crate::quantum_core::linalg::r(wt);
            }
            assert!(crate::quantum_core::linalg::max_abs(&acc) < 1e-12, "j={tj}/2");
        }
    }
}
