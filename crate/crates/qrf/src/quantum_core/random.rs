//! Random states, unitaries and channels (test inputs and demos).

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::channel::QuantumChannel;
use super::linalg::*;
use super::state::{DensityOperator, StateVector};
use crate::rng::Rng;

fn gaussian(rng: &mut Rng) -> C64 {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    c(a, b) * r(std::f64::consts::FRAC_1_SQRT_2)
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn random_state(dims: Vec<usize>, rng: &mut Rng) -> StateVector {
    let d = dims.iter().product();
    StateVector::normalized(CVec::from_fn(d, |_, _| gaussian(rng)), dims).expect("nonzero Gaussian vector")
}

/// Full-rank mixed state from the Hilbert-Schmidt ensemble.
pub fn random_density(dims: Vec<usize>, rng: &mut Rng) -> DensityOperator {
    let d = dims.iter().product();
    let g = ginibre(d, d, rng);
    DensityOperator::from_unnormalized(&g * g.adjoint(), dims).expect("positive definite")
}

/// Haar-random unitary via QR with phase correction.
pub fn random_unitary(d: usize, rng: &mut Rng) -> CMat {
    let qr = ginibre(d, d, rng).qr();
    let (q, rm) = (qr.q(), qr.r());
    let phases = CMat::from_diagonal(&CVec::from_fn(d, |i, _| {
        let z = rm[(i, i)];
        if z.norm() > 0.0 { z / r(z.norm()) } else { ONE }
    }));
    q * phases
}

/// Random channel with `n_kraus` operators from a Haar isometry.
pub fn random_channel(d: usize, n_kraus: usize, rng: &mut Rng) -> QuantumChannel {
    let u = random_unitary(d * n_kraus, rng);
    let kraus = (0..n_kraus)
        .map(|k| u.view((k * d, 0), (d, d)).into_owned())
        .collect();
    QuantumChannel::new(kraus, "random").expect("isometry columns give a CPTP map")
}

/// Random effect `0 <= E <= I`.
pub fn random_effect(d: usize, rng: &mut Rng) -> CMat {
    let u = random_unitary(d, rng);
    let vals: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    &u * diag_real(&vals) * u.adjoint()
}

/// Random operator with Gaussian entries.
pub fn random_operator(d: usize, rng: &mut Rng) -> CMat {
    ginibre(d, d, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn generated_objects_are_valid() {
        let mut g = rng::from_seed(5);
        let u = random_unitary(6, &mut g);
        assert!(is_unitary(&u, 1e-12));
        let ch = random_channel(4, 3, &mut g);
        assert!(ch.completeness_defect() < 1e-12);
        let e = random_effect(3, &mut g);
        let v = eigvalsh(&e);
        assert!(v[0] > -1e-12 && v[2] < 1.0 + 1e-12);
        let rho = random_density(vec![2, 2], &mut g);
        assert!(rho.eigenvalues()[0] > 0.0);
    }
}
