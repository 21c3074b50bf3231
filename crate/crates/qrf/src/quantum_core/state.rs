use serde::{Deserialize, Serialize};

use super::linalg::*;
use crate::error::{QrfError, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(QrfError::InvalidState(format!("bad subsystem dims {dims:?}")));
    }
    if product(dims) != len {
        return Err(QrfError::DimensionMismatch(format!(
            "dims {dims:?} multiply to {} but data has dimension {len}",
            product(dims)
        )));
    }
    Ok(())
}

/// Normalized pure state over an explicit tensor factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: CVec,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amps: CVec, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(QrfError::InvalidState(format!("squared norm {n2} differs from 1")));
        }
        Ok(Self { amps, dims })
    }

    /// Rescale to unit norm before validating.
    pub fn normalized(amps: CVec, dims: Vec<usize>) -> Result<Self> {
        let n = amps.norm();
        if n < 1e-300 {
            return Err(QrfError::InvalidState("zero vector".into()));
        }
        Self::new(amps / r(n), dims)
    }

    pub fn from_real(entries: &[f64], dims: Vec<usize>) -> Result<Self> {
        Self::normalized(from_real(entries.len(), entries), dims)
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Self {
        let d = product(&dims);
        Self { amps: basis_vector(d, index), dims }
    }

    pub fn qubits(n: usize, index: usize) -> Self {
        Self::basis(vec![2; n], index)
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { amps: kron_vec(&self.amps, &other.amps), dims }
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator { mat: projector(&self.amps), dims: self.dims.clone() }
    }

    pub fn apply(&self, u: &CMat) -> Result<Self> {
        if u.ncols() != self.dim() || u.nrows() != self.dim() {
            return Err(QrfError::DimensionMismatch(format!(
                "operator {}x{} on state of dimension {}",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        Self::normalized(u * &self.amps, self.dims.clone())
    }

    /// Amplitudes reshaped into a `d_A x d_B` matrix for the cut `keep | rest`.
    pub fn coefficient_matrix(&self, keep: &[usize]) -> Result<CMat> {
        let split = IndexSplit::new(&self.dims, keep)?;
        let mut m = CMat::zeros(split.kept_dim, split.traced_dim);
        for (i, a) in self.amps.iter().enumerate() {
            let (k, t) = split.split(i);
            m[(k, t)] = *a;
        }
        Ok(m)
    }

    /// Reduced state on the subsystems in `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        let m = self.coefficient_matrix(keep)?;
        let dims = keep_dims(&self.dims, keep);
        Ok(DensityOperator { mat: &m * m.adjoint(), dims })
    }
}

/// Trace-one positive Hermitian matrix over an explicit tensor factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    mat: CMat,
    dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(mat: CMat, dims: Vec<usize>) -> Result<Self> {
        if !mat.is_square() {
            return Err(QrfError::InvalidState("matrix not square".into()));
        }
        check_dims(&dims, mat.nrows())?;
        let herm = hermitian_defect(&mat);
        if herm > HERMITIAN_TOL {
            return Err(QrfError::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QrfError::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eigvalsh(&mat).first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(QrfError::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { mat, dims })
    }

    /// Construct from a matrix produced by trusted internal arithmetic;
    /// Hermiticity is restored and only a loose trace check is applied.
    pub(crate) fn from_computed(mat: CMat, dims: Vec<usize>) -> Result<Self> {
        let mat = hermitize(&mat);
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > 1e-8 {
            return Err(QrfError::InvalidState(format!("computed trace {tr} differs from 1")));
        }
        check_dims(&dims, mat.nrows())?;
        Ok(Self { mat, dims })
    }

    /// Normalize a nonzero PSD matrix to unit trace.
    pub fn from_unnormalized(mat: CMat, dims: Vec<usize>) -> Result<Self> {
        let tr = mat.trace().re;
        if tr <= 1e-300 {
            return Err(QrfError::InvalidState("zero trace".into()));
        }
        Self::new(hermitize(&(mat / r(tr))), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d = product(&dims);
        Self { mat: identity(d) / r(d as f64), dims }
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { mat: kron(&self.mat, &other.mat), dims }
    }

    pub fn expectation(&self, op: &CMat) -> C64 {
        (&self.mat * op).trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.mat)
    }

    pub fn conjugate_by(&self, u: &CMat) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(QrfError::DimensionMismatch("unitary does not match state".into()));
        }
        Self::from_computed(u * &self.mat * u.adjoint(), self.dims.clone())
    }

    /// Reduced state on the subsystems in `keep` (returned in ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let split = IndexSplit::new(&self.dims, keep)?;
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); split.traced_dim];
        for i in 0..self.dim() {
            let (k, t) = split.split(i);
            groups[t].push((i, k));
        }
        let mut out = CMat::zeros(split.kept_dim, split.kept_dim);
        for g in &groups {
            for &(i, ki) in g {
                for &(j, kj) in g {
                    out[(ki, kj)] += self.mat[(i, j)];
                }
            }
        }
        Ok(Self { mat: out, dims: keep_dims(&self.dims, keep) })
    }
}

fn keep_dims(dims: &[usize], keep: &[usize]) -> Vec<usize> {
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    k.iter().map(|&i| dims[i]).collect()
}

/// Splits a flat index into (kept, traced) multi-indices for a subsystem cut.
struct IndexSplit {
    dims: Vec<usize>,
    kept: Vec<bool>,
    kept_dim: usize,
    traced_dim: usize,
}

impl IndexSplit {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(QrfError::InvalidArgument("empty keep set".into()));
        }
        let mut kept = vec![false; dims.len()];
        for &k in keep {
            if k >= dims.len() {
                return Err(QrfError::InvalidArgument(format!(
                    "subsystem {k} out of range for {} factors",
                    dims.len()
                )));
            }
            kept[k] = true;
        }
        let kept_dim = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();
        let traced_dim = dims.iter().zip(&kept).filter(|(_, &k)| !k).map(|(d, _)| d).product();
        Ok(Self { dims: dims.to_vec(), kept, kept_dim, traced_dim })
    }

    fn split(&self, mut i: usize) -> (usize, usize) {
        let (mut k, mut t) = (0, 0);
        let (mut kstride, mut tstride) = (1, 1);
        for (d, &is_kept) in self.dims.iter().zip(&self.kept).rev() {
            let digit = i % d;
            i /= d;
            if is_kept {
                k += digit * kstride;
                kstride *= d;
            } else {
                t += digit * tstride;
                tstride *= d;
            }
        }
        (k, t)
    }
}

/// Either kind of state, for operations that accept both.
#[derive(Clone, Debug, PartialEq)]
pub enum QState {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl QState {
    pub fn dims(&self) -> &[usize] {
        match self {
            QState::Pure(s) => s.dims(),
            QState::Mixed(s) => s.dims(),
        }
    }

    pub fn to_density(&self) -> DensityOperator {
        match self {
            QState::Pure(s) => s.to_density(),
            QState::Mixed(s) => s.clone(),
        }
    }
}

/// Kronecker composite of two states of the same kind.
pub fn tensor(a: &QState, b: &QState) -> Result<QState> {
    match (a, b) {
        (QState::Pure(x), QState::Pure(y)) => Ok(QState::Pure(x.tensor(y))),
        (QState::Mixed(x), QState::Mixed(y)) => Ok(QState::Mixed(x.tensor(y))),
        _ => Err(QrfError::InvalidArgument("cannot tensor a pure state with a density operator".into())),
    }
}

pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(QrfError::DimensionMismatch(format!(
            "fidelity between dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let s = sqrt_psd(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let root: f64 = eigvalsh(&inner).into_iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    spectrum_entropy(&rho.eigenvalues())
}

pub(crate) fn spectrum_entropy(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&v| v > 1e-15)
        .map(|&v| -v * v.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Entropy of the reduced state on `part_a`, in bits.
pub fn entanglement_entropy(psi: &StateVector, part_a: &[usize]) -> Result<f64> {
    if part_a.len() >= psi.dims().len() {
        return Err(QrfError::InvalidArgument("cut must leave a nonempty complement".into()));
    }
    let m = psi.coefficient_matrix(part_a)?;
    let rho = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
    Ok(spectrum_entropy(&eigvalsh(&rho)))
}

/// On-disk form: `{dims, re, im}` with row-major flattening for matrices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateFile {
    pub fn from_vector(s: &StateVector) -> Self {
        Self {
            dims: s.dims.clone(),
            re: s.amps.iter().map(|z| z.re).collect(),
            im: s.amps.iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        let d = rho.dim();
        let mut re = Vec::with_capacity(d * d);
        let mut im = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                re.push(rho.mat[(i, j)].re);
                im.push(rho.mat[(i, j)].im);
            }
        }
        Self { dims: rho.dims.clone(), re, im }
    }

    pub fn from_state(s: &QState) -> Self {
        match s {
            QState::Pure(v) => Self::from_vector(v),
            QState::Mixed(m) => Self::from_density(m),
        }
    }

    /// Interpret as a vector when the length is `prod(dims)`, as a matrix when
    /// it is the square of that.
    pub fn to_state(&self) -> Result<QState> {
        if self.re.len() != self.im.len() {
            return Err(QrfError::InvalidState("re and im lengths differ".into()));
        }
        let d = product(&self.dims);
        let data: Vec<C64> = self.re.iter().zip(&self.im).map(|(&a, &b)| c(a, b)).collect();
        if data.len() == d {
            Ok(QState::Pure(StateVector::new(CVec::from_vec(data), self.dims.clone())?))
        } else if data.len() == d * d {
            Ok(QState::Mixed(DensityOperator::new(CMat::from_row_slice(d, d, &data), self.dims.clone())?))
        } else {
            Err(QrfError::DimensionMismatch(format!(
                "{} entries fit neither a vector nor a matrix over dims {:?}",
                data.len(),
                self.dims
            )))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn singlet() -> StateVector {
        StateVector::from_real(&[0.0, 1.0, -1.0, 0.0], vec![2, 2]).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = StateVector::basis(vec![2], 0).tensor(&StateVector::basis(vec![2], 1));
        assert_eq!(s.dims(), &[2, 2]);
        let expect = [0.0, 1.0, 0.0, 0.0];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!((a - r(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_of_plus_states_is_uniform() {
        let plus = StateVector::from_real(&[1.0, 1.0], vec![2]).unwrap();
        let s = plus.tensor(&plus);
        assert!(s.amplitudes().iter().all(|a| (a - r(0.5)).norm() < 1e-15));
    }

    #[test]
    fn tensor_of_mixed_states() {
        let m = DensityOperator::maximally_mixed(vec![2]);
        let t = m.tensor(&m);
        assert_eq!(t.dims(), &[2, 2]);
        assert!(max_abs(&(t.matrix() - identity(4) / r(4.0))) < 1e-15);
    }

    #[test]
    fn tensor_rejects_mixed_kinds() {
        let p = QState::Pure(StateVector::basis(vec![2], 0));
        let m = QState::Mixed(DensityOperator::maximally_mixed(vec![2]));
        assert!(tensor(&p, &m).is_err());
        assert!(tensor(&p, &p).is_ok());
    }

    #[test]
    fn singlet_reduces_to_maximally_mixed() {
        let rho = singlet().to_density();
        let red = partial_trace(&rho, &[0]).unwrap();
        assert!(max_abs(&(red.matrix() - identity(2) * r(0.5))) < 1e-15);
    }

    #[test]
    fn tracing_the_fourth_qubit_of_two_singlets() {
        let psi = singlet().tensor(&singlet());
        let red = partial_trace(&psi.to_density(), &[0, 1, 2]).unwrap();
        let expect = singlet().to_density().tensor(&DensityOperator::maximally_mixed(vec![2]));
        assert!(max_abs(&(red.matrix() - expect.matrix())) < 1e-15);
        assert_eq!(red.dims(), &[2, 2, 2]);
    }

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let a = StateVector::from_real(&[0.6, 0.8], vec![2]).unwrap().to_density();
        let b = DensityOperator::maximally_mixed(vec![3]);
        let ab = a.tensor(&b);
        assert!(max_abs(&(ab.partial_trace(&[0]).unwrap().matrix() - a.matrix())) < 1e-15);
        assert!(max_abs(&(ab.partial_trace(&[1]).unwrap().matrix() - b.matrix())) < 1e-15);
        assert!(ab.partial_trace(&[]).is_err());
        assert!(ab.partial_trace(&[2]).is_err());
    }

    #[test]
    fn partial_trace_of_middle_factor() {
        // |0>|+>|1>: keeping factors 0 and 2 gives |01><01|.
        let plus = StateVector::from_real(&[1.0, 1.0], vec![2]).unwrap();
        let psi = StateVector::basis(vec![2], 0).tensor(&plus).tensor(&StateVector::basis(vec![2], 1));
        let red = psi.to_density().partial_trace(&[0, 2]).unwrap();
        assert!((red.matrix()[(1, 1)] - ONE).norm() < 1e-15);
        assert!((red.matrix().trace() - ONE).norm() < 1e-15);
    }

    #[test]
    fn fidelity_conventions() {
        let rho = StateVector::from_real(&[0.6, 0.8], vec![2]).unwrap().to_density();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(vec![2]);
        let zero = StateVector::basis(vec![2], 0).to_density();
        assert!((fidelity(&mixed, &zero).unwrap() - 0.5).abs() < 1e-12);
        // diag(p) vs diag(q): (sum sqrt(p q))^2
        let p = DensityOperator::new(diag_real(&[0.3, 0.7]), vec![2]).unwrap();
        let q = DensityOperator::new(diag_real(&[0.6, 0.4]), vec![2]).unwrap();
        let expect = ((0.3f64 * 0.6).sqrt() + (0.7f64 * 0.4).sqrt()).powi(2);
        assert!((fidelity(&p, &q).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn bell_state_has_one_ebit() {
        assert!((entanglement_entropy(&singlet(), &[0]).unwrap() - 1.0).abs() < 1e-12);
        let prod = StateVector::basis(vec![2, 2], 1);
        assert!(entanglement_entropy(&prod, &[1]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::new(diag_real(&[0.5, 0.6]), vec![2]).is_err());
        assert!(DensityOperator::new(diag_real(&[1.2, -0.2]), vec![2]).is_err());
        let nonherm = CMat::from_row_slice(2, 2, &[r(0.5), r(0.1), r(0.0), r(0.5)]);
        assert!(DensityOperator::new(nonherm, vec![2]).is_err());
        assert!(DensityOperator::new(diag_real(&[0.5, 0.5]), vec![3]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let psi = StateVector::new(
            CVec::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]),
            vec![2],
        )
        .unwrap();
        let text = StateFile::from_vector(&psi).to_json().unwrap();
        match StateFile::from_json(&text).unwrap().to_state().unwrap() {
            QState::Pure(p) => assert_eq!(p, psi),
            _ => panic!("expected a vector"),
        }
        let rho = psi.to_density();
        let f = StateFile::from_density(&rho);
        assert_eq!(f.re.len(), 4);
        // row-major: element (0,1) = <0|rho|1> = (1/sqrt2)(conj(i/sqrt2)) = -i/2
        assert!((f.im[1] + 0.5).abs() < 1e-15);
        match f.to_state().unwrap() {
            QState::Mixed(m) => assert!(max_abs(&(m.matrix() - rho.matrix())) < 1e-15),
            _ => panic!("expected a matrix"),
        }
    }
}
