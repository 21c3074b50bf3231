//! Wigner rotation matrices in the descending-`m` basis, `D(α,β,γ) = e^{-iαJz} e^{-iβJy} e^{-iγJz}`.

use nalgebra::DMatrix;

use super::cg::ln_factorial;
use super::spin::Spin;
use crate::quantum_core::linalg::*;

/// Element `d^j_{m'm}(β)` with doubled labels.
pub fn small_d_element(j: Spin, tmp: i32, tm: i32, beta: f64) -> f64 {
    let tj = j.twice() as i64;
    let (tmp, tm) = (tmp as i64, tm as i64);
    if tmp.abs() > tj || tm.abs() > tj || (tj + tm) % 2 != 0 || (tj + tmp) % 2 != 0 {
        return 0.0;
    }
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    // integer labels: j+m', j-m', j+m, j-m and the shift m'-m
    let (jpmp, jmmp, jpm, jmm) = ((tj + tmp) / 2, (tj - tmp) / 2, (tj + tm) / 2, (tj - tm) / 2);
    let shift = (tmp - tm) / 2;
    let lnpre = 0.5 * (ln_factorial(jpmp) + ln_factorial(jmmp) + ln_factorial(jpm) + ln_factorial(jmm));
    let smin = 0.max(-shift);
    let smax = jpm.min(jmmp);
    let mut sum = 0.0;
    for s in smin..=smax {
        let den = ln_factorial(jpm - s) + ln_factorial(s) + ln_factorial(shift + s) + ln_factorial(jmmp - s);
        let sign = if (shift + s).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let pc = (tj - shift - 2 * s) as i32;
        let ps = (shift + 2 * s) as i32;
        sum += sign * (lnpre - den).exp() * cb.powi(pc) * sb.powi(ps);
    }
    sum
}

/// Reduced matrix `d^j(β)`, rows/columns ordered `m = j, j-1, ..., -j`.
pub fn wigner_d(j: Spin, beta: f64) -> DMatrix<f64> {
    let ms: Vec<i32> = j.twice_ms().collect();
    DMatrix::from_fn(j.dim(), j.dim(), |a, b| small_d_element(j, ms[a], ms[b], beta))
}

/// Full matrix `D^j(α,β,γ)`.
pub fn wigner_big_d(j: Spin, alpha: f64, beta: f64, gamma: f64) -> CMat {
    let ms: Vec<i32> = j.twice_ms().collect();
    let d = wigner_d(j, beta);
    CMat::from_fn(j.dim(), j.dim(), |a, b| {
        let phase = -(ms[a] as f64 * alpha + ms[b] as f64 * gamma) / 2.0;
        cis(phase) * r(d[(a, b)])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_rep::special::legendre;

    #[test]
    fn spin_half_is_half_angle_rotation() {
        let b = 0.7;
        let d = wigner_d(Spin::HALF, b);
        let want = [[(b / 2.0).cos(), -(b / 2.0).sin()], [(b / 2.0).sin(), (b / 2.0).cos()]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((d[(i, k)] - want[i][k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn spin_one_closed_form() {
        let b: f64 = 1.1;
        let d = wigner_d(Spin(2), b);
        let (cb, sb) = (b.cos(), b.sin());
        let s2 = std::f64::consts::SQRT_2;
        let want = [
            [(1.0 + cb) / 2.0, -sb / s2, (1.0 - cb) / 2.0],
            [sb / s2, cb, -sb / s2],
            [(1.0 - cb) / 2.0, sb / s2, (1.0 + cb) / 2.0],
        ];
        for i in 0..3 {
            for k in 0..3 {
                assert!((d[(i, k)] - want[i][k]).abs() < 1e-14, "({i},{k})");
            }
        }
    }

    #[test]
    fn central_element_is_legendre() {
        for l in 0..8u32 {
            for &b in &[0.0, 0.4, 1.3, 2.9, std::f64::consts::PI] {
                let d = small_d_element(Spin(2 * l), 0, 0, b);
                assert!((d - legendre(l as usize, b.cos())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unitarity_for_random_angles() {
        for tj in 0..=8 {
            for &(a, b, g) in &[(0.3, 1.2, -2.0), (5.0, 2.9, 0.1), (-1.0, 0.05, 3.3)] {
                let d = wigner_big_d(Spin(tj), a, b, g);
                assert!(is_unitary(&d, 1e-12), "j={tj}/2");
            }
        }
    }
}
