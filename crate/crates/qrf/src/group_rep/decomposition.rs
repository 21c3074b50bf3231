//! Collective-SU(2) decomposition of `N` qubits, `(C²)^{⊗N} = ⊕_j M_j ⊗ N_j`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::cg::cg_twice;
use super::spin::Spin;
use crate::error::{QrfError, Result};
use crate::quantum_core::linalg::*;

pub const MAX_COUPLED_QUBITS: usize = 10;

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `c_j^{(N)} = binom(N, N/2-j) (2j+1) / (N/2+j+1)`.
pub fn multiplicity(n: usize, j: Spin) -> Result<u128> {
    let (n, tj) = (n as u64, j.twice() as u64);
    if tj > n || (n - tj) % 2 != 0 {
        return Err(QrfError::InvalidArgument(format!("no spin {j} in {n} qubits (parity or range)")));
    }
    let num = binomial(n, (n - tj) / 2) * (tj as u128 + 1);
    Ok(num / ((n + tj) as u128 / 2 + 1))
}

/// Spins present in `N` qubits, largest first.
pub fn spins_in(n: usize) -> Vec<Spin> {
    (0..=n as u32).rev().step_by(2).map(Spin).collect()
}

/// `C^{(N)} = binom(N, ⌊N/2⌋)`, the number of classical messages that survive
/// the collective twirl.
pub fn classical_message_count(n: usize) -> u128 {
    binomial(n as u64, n as u64 / 2)
}

/// One total-spin block of the coupled basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrrepBlock {
    pub j: Spin,
    pub gauge_dim: usize,
    pub multiplicity: usize,
    /// First row of the block in the coupled ordering.
    pub offset: usize,
    /// Intermediate-spin paths (doubled) labelling the multiplicity index λ.
    pub paths: Vec<Vec<u32>>,
}

impl IrrepBlock {
    pub fn len(&self) -> usize {
        self.gauge_dim * self.multiplicity
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coupled-basis row of `(λ, m)`.
    pub fn row(&self, lambda: usize, twice_m: i32) -> usize {
        self.offset + lambda * self.gauge_dim + self.j.index_of(twice_m)
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Coupled basis of `N` qubits. Columns of `isometry` are the coupled vectors
/// `|j, λ, m⟩` in the computational basis (qubit 1 most significant,
/// `|0⟩ = m=+1/2`), ordered by `j` descending, then `λ`, then `m` descending.
#[derive(Clone, Debug)]
pub struct IrrepDecomposition {
    pub n_qubits: usize,
    pub blocks: Vec<IrrepBlock>,
    pub isometry: CMat,
}

type PathKey = (Vec<u32>, i32);

impl IrrepDecomposition {
    pub fn dim(&self) -> usize {
        self.isometry.nrows()
    }

    pub fn block(&self, j: Spin) -> Option<&IrrepBlock> {
        self.blocks.iter().find(|b| b.j == j)
    }

    /// Coupled vector `|j, λ, m⟩` in the computational basis.
    pub fn vector(&self, j: Spin, lambda: usize, twice_m: i32) -> CVec {
        let b = self.block(j).expect("spin present");
        self.isometry.column(b.row(lambda, twice_m)).into_owned()
    }

    pub fn to_coupled(&self, op: &CMat) -> CMat {
        self.isometry.adjoint() * op * &self.isometry
    }

    pub fn from_coupled(&self, op: &CMat) -> CMat {
        &self.isometry * op * self.isometry.adjoint()
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Export<'a> {
            n_qubits: usize,
            blocks: &'a [IrrepBlock],
            isometry_dims: [usize; 2],
            isometry_re: Vec<f64>,
            isometry_im: Vec<f64>,
        }
        let d = self.dim();
        let mut re = Vec::with_capacity(d * d);
        let mut im = Vec::with_capacity(d * d);
        for i in 0..d {
            for k in 0..d {
                re.push(self.isometry[(i, k)].re);
                im.push(self.isometry[(i, k)].im);
            }
        }
        Ok(serde_json::to_string(&Export {
            n_qubits: self.n_qubits,
            blocks: &self.blocks,
            isometry_dims: [d, d],
            isometry_re: re,
            isometry_im: im,
        })?)
    }
}

/// Sequential Clebsch-Gordan coupling of `n` qubits.
pub fn couple_qubits(n: usize) -> Result<IrrepDecomposition> {
    if n == 0 {
        return Err(QrfError::InvalidArgument("need at least one qubit".into()));
    }
    if n > MAX_COUPLED_QUBITS {
        return Err(QrfError::InvalidArgument(format!(
            "{n} qubits exceeds the cap of {MAX_COUPLED_QUBITS}"
        )));
    }
    let mut level: BTreeMap<PathKey, CVec> = BTreeMap::new();
    level.insert((vec![1], 1), basis_vector(2, 0));
    level.insert((vec![1], -1), basis_vector(2, 1));
    let up = basis_vector(2, 0);
    let down = basis_vector(2, 1);
    for _ in 1..n {
        let mut next = BTreeMap::new();
        let paths: Vec<Vec<u32>> = {
            let mut p: Vec<Vec<u32>> = level.keys().map(|(p, _)| p.clone()).collect();
            p.dedup();
            p
        };
        for path in paths {
            let tj = *path.last().unwrap() as i64;
            let mut targets = vec![tj + 1];
            if tj >= 1 {
                targets.push(tj - 1);
            }
            for tjn in targets {
                let mut new_path = path.clone();
                new_path.push(tjn as u32);
                for tm in (-tjn..=tjn).rev().step_by(2) {
                    let mut v: Option<CVec> = None;
                    for (ts, spin_vec) in [(1i64, &up), (-1, &down)] {
                        let c = cg_twice(tj, 1, tjn, tm - ts, ts, tm);
                        if c == 0.0 {
                            continue;
                        }
                        let prev = &level[&(path.clone(), (tm - ts) as i32)];
                        let term = kron_vec(prev, spin_vec) * r(c);
                        v = Some(match v {
                            Some(acc) => acc + term,
                            None => term,
                        });
                    }
                    next.insert((new_path.clone(), tm as i32), v.expect("at least one CG term"));
                }
            }
        }
        level = next;
    }

    let dim = 1usize << n;
    let mut isometry = CMat::zeros(dim, dim);
    let mut blocks = Vec::new();
    let mut offset = 0;
    for j in spins_in(n) {
        let mut paths: Vec<Vec<u32>> = level
            .keys()
            .filter(|(p, _)| *p.last().unwrap() == j.twice())
            .map(|(p, _)| p.clone())
            .collect();
        paths.sort();
        paths.dedup();
        let block = IrrepBlock { j, gauge_dim: j.dim(), multiplicity: paths.len(), offset, paths };
        for (lambda, path) in block.paths.iter().enumerate() {
            for tm in j.twice_ms() {
                isometry.set_column(block.row(lambda, tm), &level[&(path.clone(), tm)]);
            }
        }
        offset += block.len();
        blocks.push(block);
    }
    Ok(IrrepDecomposition { n_qubits: n, blocks, isometry })
}

/// Shared, lazily built decomposition for `n <= MAX_COUPLED_QUBITS`.
pub fn decomposition(n: usize) -> Result<&'static IrrepDecomposition> {
    static CACHE: [OnceLock<IrrepDecomposition>; MAX_COUPLED_QUBITS + 1] = [const { OnceLock::new() }; MAX_COUPLED_QUBITS + 1];
    if n == 0 || n > MAX_COUPLED_QUBITS {
        return couple_qubits(n).map(|_| unreachable!());
    }
    if let Some(d) = CACHE[n].get() {
        return Ok(d);
    }
    let built = couple_qubits(n)?;
    Ok(CACHE[n].get_or_init(|| built))
}
