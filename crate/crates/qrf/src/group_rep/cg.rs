//! Clebsch-Gordan coefficients (Condon-Shortley phase) by the Racah formula.

use std::sync::OnceLock;

use super::spin::twice_of;
use crate::error::Result;

const TABLE: usize = 1024;

fn ln_factorial_table() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = vec![0.0; TABLE];
        for k in 1..TABLE {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// `ln(n!)` for `n < 1024`.
pub fn ln_factorial(n: i64) -> f64 {
    assert!((0..TABLE as i64).contains(&n), "factorial argument {n} out of range");
    ln_factorial_table()[n as usize]
}

/// `(a/2)!` in log form for an even doubled argument.
fn lf2(twice: i64) -> f64 {
    debug_assert!(twice % 2 == 0);
    ln_factorial(twice / 2)
}

/// `<j1 m1; j2 m2 | j m>` with every argument doubled. Returns 0 outside the
/// selection rules.
pub fn cg_twice(j1: i64, j2: i64, j: i64, m1: i64, m2: i64, m: i64) -> f64 {
    if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j || (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j + m) % 2 != 0 {
        return 0.0;
    }
    let pre = 0.5
        * (((j + 1) as f64).ln() + lf2(j + j1 - j2) + lf2(j - j1 + j2) + lf2(j1 + j2 - j) - lf2(j1 + j2 + j + 2)
            + lf2(j + m)
            + lf2(j - m)
            + lf2(j1 - m1)
            + lf2(j1 + m1)
            + lf2(j2 - m2)
            + lf2(j2 + m2));
    // k runs over integers; doubled quantities below are all even.
    let kmin = 0.max((j2 - j - m1) / 2).max((j1 - j + m2) / 2);
    let kmax = ((j1 + j2 - j) / 2).min((j1 - m1) / 2).min((j2 + m2) / 2);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = ln_factorial(k)
            + lf2(j1 + j2 - j - 2 * k)
            + lf2(j1 - m1 - 2 * k)
            + lf2(j2 + m2 - 2 * k)
            + lf2(j - j2 + m1 + 2 * k)
            + lf2(j - j1 - m2 + 2 * k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (pre - den).exp();
    }
    sum
}

/// `<j1 m1; j2 m2 | j m>` for half-integer arguments.
pub fn clebsch_gordan(j1: f64, j2: f64, j: f64, m1: f64, m2: f64, m: f64) -> Result<f64> {
    let t = |x: f64| twice_of(x).map(i64::from);
    Ok(cg_twice(t(j1)?, t(j2)?, t(j)?, t(m1)?, t(m2)?, t(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn singlet_and_stretched() {
        assert!((clebsch_gordan(0.5, 0.5, 0.0, 0.5, -0.5, 0.0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((clebsch_gordan(0.5, 0.5, 0.0, -0.5, 0.5, 0.0).unwrap() + FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((clebsch_gordan(0.5, 0.5, 1.0, 0.5, 0.5, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(clebsch_gordan(0.5, 0.3, 1.0, 0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn spin_one_half_coupling_closed_forms() {
        // <j, m-1/2; 1/2, 1/2 | j+1/2, m> = sqrt((j+m+1/2)/(2j+1))
        for tj in 1..12i64 {
            let j = tj as f64 / 2.0;
            for tm in (-(tj + 1)..=(tj + 1)).step_by(2) {
                let m = tm as f64 / 2.0;
                let got = cg_twice(tj, 1, tj + 1, tm - 1, 1, tm);
                let want = if (tm - 1).abs() <= tj { ((j + m + 0.5) / (2.0 * j + 1.0)).sqrt() } else { 0.0 };
                assert!((got - want).abs() < 1e-13, "j={j} m={m}");
                // <j, m+1/2; 1/2, -1/2 | j-1/2, m> = sqrt((j+m+1/2)/(2j+1))
                if tm.abs() < tj {
                    let got = cg_twice(tj, 1, tj - 1, tm + 1, -1, tm);
                    assert!((got - ((j + m + 0.5) / (2.0 * j + 1.0)).sqrt()).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn orthonormality_for_one_and_a_half() {
        // sum over m1, m2 of CG^2 for fixed (j, m) is 1
        for tm in [3i64, 1, -1, -3] {
            let mut s = 0.0;
            for m1 in [-2i64, 0, 2] {
                s += cg_twice(2, 1, 3, m1, tm - m1, tm).powi(2);
            }
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn selection_rules_give_zero() {
        assert_eq!(cg_twice(2, 2, 6, 0, 0, 0), 0.0);
        assert_eq!(cg_twice(2, 2, 2, 2, 2, 2), 0.0);
        assert_eq!(cg_twice(2, 2, 2, 2, 0, 0), 0.0);
    }
}
