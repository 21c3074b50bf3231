//! Nonlocal resources under a local superselection rule.
//!
//! Local number operators are diagonal in the computational basis of each
//! wing. For Fock modes the occupation index is the photon number.

use std::collections::BTreeMap;

use crate::error::{QrfError, Result};
use crate::quantum_core::linalg::{eigvalsh, r, CMat, CVec};
use crate::quantum_core::state::spectrum_entropy;
use crate::quantum_core::{fidelity, DensityOperator, QState, StateVector};
use crate::twirl::total_occupation;

const EIGEN_TOL: f64 = 1e-10;
const PURITY_TOL: f64 = 1e-10;
const LEVEL_TOL: f64 = 1e-9;

/// Bipartite cut with a diagonal number operator on each wing.
///
/// `n_a[i]` is the eigenvalue on the i-th basis vector of wing A, whose
/// factors are the subsystems in `part_a` taken in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalNumbers {
    pub part_a: Vec<usize>,
    pub n_a: Vec<f64>,
    pub n_b: Vec<f64>,
}

impl LocalNumbers {
    /// Photon number on each wing, treating every factor as a Fock mode.
    pub fn occupation(dims: &[usize], part_a: &[usize]) -> Result<Self> {
        let mut a = part_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.is_empty() || a.len() >= dims.len() || a.iter().any(|&k| k >= dims.len()) {
            return Err(QrfError::InvalidArgument(format!("bad cut {part_a:?} of {} factors", dims.len())));
        }
        let da: Vec<usize> = a.iter().map(|&k| dims[k]).collect();
        let db: Vec<usize> = (0..dims.len()).filter(|k| !a.contains(k)).map(|k| dims[k]).collect();
        Ok(Self { n_a: total_occupation(&da), n_b: total_occupation(&db), part_a: a })
    }

    fn coefficients(&self, psi: &StateVector) -> Result<CMat> {
        let m = psi.coefficient_matrix(&self.part_a)?;
        if m.nrows() != self.n_a.len() || m.ncols() != self.n_b.len() {
            return Err(QrfError::DimensionMismatch(format!(
                "number operators of size {}x{} for a {}x{} cut",
                self.n_a.len(),
                self.n_b.len(),
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    }
}

fn level_key(x: f64) -> i64 {
    (x / LEVEL_TOL).round() as i64
}

fn levels(values: &[f64]) -> BTreeMap<i64, Vec<usize>> {
    let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &v) in values.iter().enumerate() {
        out.entry(level_key(v)).or_default().push(i);
    }
    out
}

/// One joint local-number block of a pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberBlock {
    pub n_a: f64,
    pub n_b: f64,
    pub probability: f64,
    pub entropy: f64,
}

fn pure_input(state: &QState) -> Result<StateVector> {
    match state {
        QState::Pure(s) => Ok(s.clone()),
        QState::Mixed(rho) => {
            let p = rho.purity();
            if (p - 1.0).abs() > PURITY_TOL {
                return Err(QrfError::InvalidState(format!("state has purity {p}, expected a pure state")));
            }
            let (vals, vecs) = crate::quantum_core::linalg::eigh(rho.matrix());
            let top = (0..vals.len()).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0);
            StateVector::normalized(vecs.column(top).into_owned(), rho.dims().to_vec())
        }
    }
}

/// Decomposition of `psi` into blocks of definite `(N_A, N_B)`.
pub fn number_blocks(psi: &StateVector, numbers: &LocalNumbers) -> Result<Vec<NumberBlock>> {
    let m = numbers.coefficients(psi)?;
    let la = levels(&numbers.n_a);
    let lb = levels(&numbers.n_b);
    let mut out = Vec::new();
    for rows in la.values() {
        for cols in lb.values() {
            let block = CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
            let p = block.norm_squared();
            if p < 1e-28 {
                continue;
            }
            let rho = if block.nrows() <= block.ncols() {
                &block * block.adjoint()
            } else {
                block.adjoint() * &block
            };
            let spectrum: Vec<f64> = eigvalsh(&rho).into_iter().map(|v| v / p).collect();
            out.push(NumberBlock {
                n_a: numbers.n_a[rows[0]],
                n_b: numbers.n_b[cols[0]],
                probability: p,
                entropy: spectrum_entropy(&spectrum),
            });
        }
    }
    Ok(out)
}

/// Entanglement accessible under local number superselection, in ebits.
///
/// The locally twirled pure state is a flagged mixture of its number blocks,
/// so the accessible entanglement is the block-weighted entropy.
pub fn e_ssr_pure(state: &QState, numbers: &LocalNumbers) -> Result<f64> {
    let psi = pure_input(state)?;
    Ok(number_blocks(&psi, numbers)?.iter().map(|b| b.probability * b.entropy).sum())
}

fn moments(psi: &StateVector, numbers: &LocalNumbers) -> Result<([f64; 2], [f64; 2])> {
    let m = numbers.coefficients(psi)?;
    let (mut a1, mut a2, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let p = m[(i, j)].norm_sqr();
            let (na, nt) = (numbers.n_a[i], numbers.n_a[i] + numbers.n_b[j]);
            a1 += p * na;
            a2 += p * na * na;
            t1 += p * nt;
            t2 += p * nt * nt;
        }
    }
    Ok(([a1, a2], [t1, t2]))
}

/// Superselection-induced variance `4 Var(N_A)` of a total-number eigenstate.
pub fn siv(psi: &StateVector, numbers: &LocalNumbers) -> Result<f64> {
    let ([a1, a2], [t1, t2]) = moments(psi, numbers)?;
    let spread = (t2 - t1 * t1).max(0.0);
    if spread > EIGEN_TOL {
        return Err(QrfError::InvalidState(format!(
            "not an eigenstate of the total number (variance {spread:e})"
        )));
    }
    Ok(4.0 * (a2 - a1 * a1).max(0.0))
}

/// Outcome of a local-number post-selection.
#[derive(Clone, Debug)]
pub struct PostSelection {
    pub success_probability: f64,
    pub post_state: StateVector,
    pub numbers: LocalNumbers,
}

/// Project both wings onto local number `(n_a, n_b)` and renormalize.
pub fn postselect_numbers(psi: &StateVector, numbers: &LocalNumbers, n_a: f64, n_b: f64) -> Result<PostSelection> {
    let mut m = numbers.coefficients(psi)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if level_key(numbers.n_a[i]) != level_key(n_a) || level_key(numbers.n_b[j]) != level_key(n_b) {
                m[(i, j)] = r(0.0);
            }
        }
    }
    let p = m.norm_squared();
    if p < 1e-28 {
        return Err(QrfError::InvalidArgument(format!("outcome ({n_a}, {n_b}) has zero probability")));
    }
    // Reassemble in the original factor order.
    let dims = psi.dims().to_vec();
    let mut amps = CVec::zeros(psi.dim());
    for idx in 0..psi.dim() {
        let (k, t) = split_index(&dims, &numbers.part_a, idx);
        amps[idx] = m[(k, t)];
    }
    Ok(PostSelection {
        success_probability: p,
        post_state: StateVector::normalized(amps, dims)?,
        numbers: numbers.clone(),
    })
}

fn split_index(dims: &[usize], part_a: &[usize], mut i: usize) -> (usize, usize) {
    let (mut k, mut t, mut ks, mut ts) = (0, 0, 1, 1);
    for (pos, d) in dims.iter().enumerate().rev() {
        let digit = i % d;
        i /= d;
        if part_a.contains(&pos) {
            k += digit * ks;
            ks *= d;
        } else {
            t += digit * ts;
            ts *= d;
        }
    }
    (k, t)
}

/// `(|0>_A|1>_B + |1>_A|0>_B)/sqrt 2` on two single-rail modes.
pub fn single_photon_pair() -> StateVector {
    StateVector::from_real(&[0.0, 1.0, 1.0, 0.0], vec![2, 2]).expect("valid")
}

/// The shared phase reference `|+>_A|+>_B`.
pub fn refbit() -> StateVector {
    StateVector::from_real(&[1.0; 4], vec![2, 2]).expect("valid")
}

/// Permute the factors of `psi`: output factor `k` is input factor `order[k]`.
fn permute(psi: &StateVector, order: &[usize]) -> Result<StateVector> {
    let dims_in = psi.dims();
    let dims_out: Vec<usize> = order.iter().map(|&k| dims_in[k]).collect();
    let mut amps = CVec::zeros(psi.dim());
    for (idx, a) in psi.amplitudes().iter().enumerate() {
        let mut digits = vec![0; dims_in.len()];
        let mut rem = idx;
        for pos in (0..dims_in.len()).rev() {
            digits[pos] = rem % dims_in[pos];
            rem /= dims_in[pos];
        }
        let mut out = 0;
        for (k, &src) in order.iter().enumerate() {
            out = out * dims_out[k] + digits[src];
        }
        amps[out] = *a;
    }
    StateVector::new(amps, dims_out)
}

/// Four modes ordered `(A1, A2, B1, B2)` with A holding the first two.
fn two_wing_numbers() -> LocalNumbers {
    LocalNumbers::occupation(&[2, 2, 2, 2], &[0, 1]).expect("valid cut")
}

/// Activate the single-photon pair with a refbit.
///
/// Modes are ordered `(A_ent, A_ref, B_ent, B_ref)`; both wings post-select
/// a local photon number of one.
pub fn activate_refbit() -> PostSelection {
    let joint = single_photon_pair().tensor(&refbit());
    // joint order is (A_ent, B_ent, A_ref, B_ref)
    let psi = permute(&joint, &[0, 2, 1, 3]).expect("valid permutation");
    postselect_numbers(&psi, &two_wing_numbers(), 1.0, 1.0).expect("nonzero outcome")
}

/// Two copies of the single-photon pair, post-selected on one photon per wing.
///
/// Modes are ordered `(A1, A2, B1, B2)`.
pub fn two_copy_distill() -> PostSelection {
    let joint = single_photon_pair().tensor(&single_photon_pair());
    let psi = permute(&joint, &[0, 2, 1, 3]).expect("valid permutation");
    postselect_numbers(&psi, &two_wing_numbers(), 1.0, 1.0).expect("nonzero outcome")
}

/// Label `(j, m)` of the nine-dimensional token basis, `j` ascending then `m` descending.
pub fn token_labels() -> Vec<(u32, i32)> {
    let mut out = Vec::new();
    for j in 0..=2u32 {
        for m in (-(j as i32)..=j as i32).rev() {
            out.push((j, m));
        }
    }
    out
}

fn token_index(j: u32, m: i32) -> usize {
    token_labels().iter().position(|&l| l == (j, m)).expect("label in range")
}

fn token_vector(entries: &[((u32, i32), f64)]) -> CVec {
    let mut v = CVec::zeros(9);
    for &((j, m), a) in entries {
        v[token_index(j, m)] = r(a);
    }
    v
}

/// Token components `phi_m^b` for `m = 0, 1, 2` paired with the proof weights.
pub fn token_components(b: bool) -> [(f64, CVec); 3] {
    let s = if b { -1.0 } else { 1.0 };
    [
        (
            0.5,
            token_vector(&[
                ((0, 0), 2.0 / 3.0),
                ((1, 0), s / 2f64.sqrt()),
                ((2, 0), 2f64.sqrt() / 6.0),
            ]),
        ),
        (1.0 / 3.0, token_vector(&[((1, 1), s * 3f64.sqrt() / 2.0), ((2, 1), -0.5)])),
        (1.0 / 6.0, token_vector(&[((2, 2), 1.0)])),
    ]
}

/// Reduced token state: the proof states are orthogonal so the token is a mixture.
pub fn token_state(b: bool) -> DensityOperator {
    let mut m = CMat::zeros(9, 9);
    for (p, v) in token_components(b) {
        m += (&v * v.adjoint()) * r(p);
    }
    DensityOperator::new(m, vec![9]).expect("valid token state")
}

#[derive(Clone, Debug)]
pub struct BitCommitment {
    pub rho0: DensityOperator,
    pub rho1: DensityOperator,
    pub fidelity: f64,
    pub pinch_difference: f64,
    pub ssr_distinguishable: bool,
}

/// Dephase in the `(j, m)` token basis.
pub fn pinch(rho: &DensityOperator) -> CMat {
    CMat::from_fn(rho.dim(), rho.dim(), |i, j| if i == j { rho.matrix()[(i, i)] } else { r(0.0) })
}

pub fn bit_commitment_tokens() -> BitCommitment {
    let rho0 = token_state(false);
    let rho1 = token_state(true);
    let pinch_difference = crate::quantum_core::linalg::max_abs(&(pinch(&rho0) - pinch(&rho1)));
    let f = fidelity(&rho0, &rho1).expect("equal dimensions");
    BitCommitment { fidelity: f, pinch_difference, ssr_distinguishable: pinch_difference > 1e-10, rho0, rho1 }
}
