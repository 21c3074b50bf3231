use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::spin::Spin;
use super::wigner::wigner_big_d;
use crate::error::{QrfError, Result};
use crate::quantum_core::linalg::*;
use crate::rng::{self, Rng};

/// Element of SU(2) as a unit quaternion `(w, x, y, z)`, acting on spin-1/2 as
/// `w I - i (x σx + y σy + z σz)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Su2Element {
    pub q: [f64; 4],
}

impl Su2Element {
    pub const IDENTITY: Su2Element = Su2Element { q: [1.0, 0.0, 0.0, 0.0] };

    pub fn new(q: [f64; 4]) -> Result<Self> {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(QrfError::InvalidArgument(format!("quaternion norm {n} is not 1")));
        }
        Ok(Self { q })
    }

    pub(crate) fn normalized(q: [f64; 4]) -> Self {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self { q: q.map(|v| v / n) }
    }

    /// Rotation by `angle` about the unit `axis`.
    pub fn axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = (angle / 2.0).sin() / n;
        Self::normalized([(angle / 2.0).cos(), axis[0] * s, axis[1] * s, axis[2] * s])
    }

    /// `R_z(α) R_y(β) R_z(γ)`.
    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let rz = |t: f64| Self::axis_angle([0.0, 0.0, 1.0], t);
        rz(alpha).mul(&Self::axis_angle([0.0, 1.0, 0.0], beta)).mul(&rz(gamma))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a1, b1, c1, d1] = self.q;
        let [a2, b2, c2, d2] = o.q;
        Self::normalized([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    pub fn inverse(&self) -> Self {
        let [w, x, y, z] = self.q;
        Self { q: [w, -x, -y, -z] }
    }

    /// Spin-1/2 matrix.
    pub fn matrix(&self) -> CMat {
        let [w, x, y, z] = self.q;
        CMat::from_row_slice(2, 2, &[c(w, -z), c(-y, -x), c(y, -x), c(w, z)])
    }

    /// Euler angles `(α, β, γ)` consistent with [`Su2Element::from_euler`] on the
    /// double cover (half-integer representations included).
    pub fn euler(&self) -> (f64, f64, f64) {
        let u = self.matrix();
        let (a, cc) = (u[(0, 0)], u[(1, 0)]);
        let beta = 2.0 * cc.norm().atan2(a.norm());
        let arg = |z: C64| if z.norm() > 1e-300 { z.arg() } else { 0.0 };
        let sum = -2.0 * arg(a); // α + γ
        let diff = 2.0 * arg(cc); // α - γ
        ((sum + diff) / 2.0, beta, (sum - diff) / 2.0)
    }

    /// Class angle `ω ∈ [0, 2π]` with `w = cos(ω/2)`.
    pub fn class_angle(&self) -> f64 {
        2.0 * self.q[0].clamp(-1.0, 1.0).acos()
    }

    /// Irrep matrix `D^j(g)`.
    pub fn irrep(&self, j: Spin) -> CMat {
        let (a, b, g) = self.euler();
        wigner_big_d(j, a, b, g)
    }

    /// Collective action `U(g)^{⊗n}` on `n` qubits.
    pub fn collective(&self, n: usize) -> CMat {
        let u = self.matrix();
        (0..n).fold(CMat::identity(1, 1), |acc, _| acc.kronecker(&u))
    }

    /// Rotated unit vector `R(g) v`.
    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        let p = Su2Element { q: [0.0, v[0], v[1], v[2]] };
        let out = self.mul(&p.mul_raw(&self.inverse()));
        [out.q[1], out.q[2], out.q[3]]
    }

    fn mul_raw(&self, o: &Self) -> Self {
        let [a1, b1, c1, d1] = self.q;
        let [a2, b2, c2, d2] = o.q;
        Self {
            q: [
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            ],
        }
    }

    pub fn haar(rng: &mut Rng) -> Self {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
            let n2: f64 = q.iter().map(|v| v * v).sum();
            if n2 > 1e-20 {
                return Self::normalized(q);
            }
        }
    }
}

/// Haar-uniform element from a seed.
pub fn haar_sample_su2(seed: u64) -> Su2Element {
    Su2Element::haar(&mut rng::from_seed(seed))
}

/// Spin operators `(Jx, Jy, Jz)` for spin `j` in the descending-`m` basis.
pub fn spin_operators(j: Spin) -> [CMat; 3] {
    let d = j.dim();
    let ms: Vec<f64> = j.twice_ms().map(|t| t as f64 / 2.0).collect();
    let jv = j.value();
    let mut jp = CMat::zeros(d, d);
    for k in 1..d {
        // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, with |m+1> one row up
        let m = ms[k];
        jp[(k - 1, k)] = r((jv * (jv + 1.0) - m * (m + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * r(0.5);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    let jz = diag_real(&ms);
    [jx, jy, jz]
}

/// Collective spin operators `Σ_k σ_a^{(k)}/2` on `n` qubits.
pub fn collective_spin(n: usize) -> [CMat; 3] {
    let single = spin_operators(Spin::HALF);
    single.map(|s| {
        let mut total = CMat::zeros(1 << n, 1 << n);
        for k in 0..n {
            let mut factors = vec![identity(2); n];
            factors[k] = s.clone();
            total += kron_all(&factors);
        }
        total
    })
}
