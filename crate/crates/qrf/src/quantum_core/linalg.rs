//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{iθ}`
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

pub fn kron_all(ms: &[CMat]) -> CMat {
    ms.iter()
        .fold(CMat::identity(1, 1), |acc, m| acc.kronecker(m))
}

pub fn diag(values: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(values))
}

pub fn diag_real(values: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&v| r(v))))
}

pub fn outer(a: &CVec, b: &CVec) -> CMat {
    a * b.adjoint()
}

pub fn projector(v: &CVec) -> CMat {
    outer(v, v)
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Symmetrize numerically: `(M + M†)/2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * r(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vecs)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = diag_real(&vals.iter().map(|&v| f(v)).collect::<Vec<_>>());
    &vecs * d * vecs.adjoint()
}

/// Square root of a PSD matrix; eigenvalues below zero are clipped.
pub fn sqrt_psd(m: &CMat) -> CMat {
    hermitian_fn(m, |v| v.max(0.0).sqrt())
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn unitary_evolution(h: &CMat, t: f64) -> CMat {
    let (vals, vecs) = eigh(h);
    let d = diag(&vals.iter().map(|&v| cis(-v * t)).collect::<Vec<_>>());
    &vecs * d * vecs.adjoint()
}

/// Number of eigenvalues above `threshold`.
pub fn numerical_rank(m: &CMat, threshold: f64) -> usize {
    eigvalsh(m).into_iter().filter(|&v| v > threshold).count()
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.is_square() && max_abs(&(u.adjoint() * u - identity(u.nrows()))) <= tol
}

pub fn basis_vector(d: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[k] = ONE;
    v
}

pub fn from_real(d: usize, entries: &[f64]) -> CVec {
    assert_eq!(entries.len(), d);
    CVec::from_iterator(d, entries.iter().map(|&x| r(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = CMat::from_row_slice(2, 2, &[r(2.0), c(0.0, -1.0), c(0.0, 1.0), r(2.0)]);
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let back = &vecs * diag_real(&vals) * vecs.adjoint();
        assert!(max_abs(&(back - m)) < 1e-12);
    }

    #[test]
    fn evolution_of_pauli_x() {
        let x = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let u = unitary_evolution(&x, std::f64::consts::FRAC_PI_2);
        // exp(-i pi/2 X) = -i X
        assert!(max_abs(&(u - x * c(0.0, -1.0))) < 1e-12);
    }
}
