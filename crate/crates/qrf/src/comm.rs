//! Communication without a shared frame: decoherence-free encodings and
//! private (frame-keyed) state families.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::error::{QrfError, Result};
use crate::group_rep::decomposition::{classical_message_count, decomposition, multiplicity, spins_in};
use crate::group_rep::Spin;
use crate::quantum_core::linalg::*;
use crate::quantum_core::{DensityOperator, Povm, StateVector};
use crate::twirl::{multiplicity_blocks, su2_twirl_qubits, Sector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DfsRow {
    pub j: f64,
    pub gauge_dim: usize,
    pub multiplicity: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DfsReport {
    pub n_qubits: usize,
    pub rows: Vec<DfsRow>,
    /// Number of perfectly distinguishable messages, one per `j` block.
    pub classical_count: u128,
    /// Spin whose multiplicity space is largest (smaller `j` on ties).
    pub best_j: f64,
    pub best_multiplicity: u128,
}

pub fn dfs_report(n: usize) -> Result<DfsReport> {
    if n == 0 {
        return Err(QrfError::InvalidArgument("need at least one qubit".into()));
    }
    let mut rows = Vec::new();
    for j in spins_in(n) {
        rows.push(DfsRow { j: j.value(), gauge_dim: j.dim(), multiplicity: multiplicity(n, j)? });
    }
    // spins_in is descending, so keep the last maximum
    let best = rows
        .iter()
        .fold(None::<&DfsRow>, |acc, r| match acc {
            Some(b) if b.multiplicity > r.multiplicity => Some(b),
            _ => Some(r),
        })
        .expect("at least one block");
    Ok(DfsReport {
        n_qubits: n,
        classical_count: classical_message_count(n),
        best_j: best.j,
        best_multiplicity: best.multiplicity,
        rows,
    })
}

fn singlet_amplitudes() -> [f64; 4] {
    [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]
}

pub fn singlet() -> StateVector {
    StateVector::from_real(&singlet_amplitudes(), vec![2, 2]).expect("normalized")
}

/// `b = 0` → singlet, `b = 1` → `|00⟩`.
pub fn encode_singlet_triplet_bit(b: bool) -> StateVector {
    if b {
        StateVector::qubits(2, 0)
    } else {
        singlet()
    }
}

/// Singlet/symmetric-subspace measurement with labels "0" and "1".
pub fn singlet_triplet_povm() -> Povm {
    let ps = singlet().to_density().into_matrix();
    Povm::new(vec![ps.clone(), identity(4) - ps], vec!["0".into(), "1".into()]).expect("projective")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BitDecode {
    pub bit: bool,
    /// Probabilities of reading 0 and 1.
    pub probabilities: [f64; 2],
}

pub fn decode_singlet_triplet_bit(rho: &DensityOperator) -> Result<BitDecode> {
    let p = singlet_triplet_povm().probabilities(rho)?;
    Ok(BitDecode { bit: p[1] > p[0], probabilities: [p[0], p[1]] })
}

/// Gauge factor used when placing a logical qubit on `N_{1/2}` of three qubits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Gauge {
    /// `I/2` on the gauge space.
    #[default]
    Mixed,
    /// Gauge ket `|m⟩` with index 0 for `m = +1/2`.
    Pure(usize),
}

fn half_block_sector() -> Result<Sector> {
    let b = decomposition(3)?.block(Spin::HALF).expect("j=1/2 present");
    Ok(Sector { offset: b.offset, gauge_dim: b.gauge_dim, mult_dim: b.multiplicity })
}

pub fn encode_logical_qubit_3(psi: &StateVector, gauge: Gauge) -> Result<DensityOperator> {
    if psi.dim() != 2 {
        return Err(QrfError::DimensionMismatch(format!("logical input has dimension {}, not 2", psi.dim())));
    }
    let dec = decomposition(3)?;
    let s = half_block_sector()?;
    let gauge_weights: Vec<f64> = match gauge {
        Gauge::Mixed => vec![0.5, 0.5],
        Gauge::Pure(k) if k < 2 => (0..2).map(|m| if m == k { 1.0 } else { 0.0 }).collect(),
        Gauge::Pure(k) => return Err(QrfError::InvalidArgument(format!("gauge index {k} out of range"))),
    };
    let a = psi.amplitudes();
    let mut coupled = CMat::zeros(8, 8);
    for l1 in 0..2 {
        for l2 in 0..2 {
            for (m, &w) in gauge_weights.iter().enumerate() {
                coupled[(s.row(l1, m), s.row(l2, m))] = a[l1] * a[l2].conj() * r(w);
            }
        }
    }
    DensityOperator::from_computed(dec.from_coupled(&coupled), vec![2, 2, 2])
}

/// Reads the logical qubit from `N_{1/2}`; fails if the input has weight
/// outside the `j = 1/2` subspace.
pub fn decode_logical_qubit_3(rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != 8 {
        return Err(QrfError::DimensionMismatch(format!("expected three qubits, got dimension {}", rho.dim())));
    }
    let dec = decomposition(3)?;
    let s = half_block_sector()?;
    let coupled = dec.to_coupled(rho.matrix());
    let inside: f64 = (s.offset..s.offset + s.len()).map(|k| coupled[(k, k)].re).sum();
    let outside = 1.0 - inside;
    if outside > 1e-10 {
        return Err(QrfError::OutsideCodeSpace(outside));
    }
    let block = multiplicity_blocks(&coupled, &[s]).remove(0);
    DensityOperator::from_computed(block, vec![2])
}

/// Bloch-sphere directions used for the tetrahedral two-qubit family.
pub fn tetrahedron_directions() -> [StateVector; 4] {
    let s = 1.0 / 3f64.sqrt();
    let t = 2f64.sqrt();
    let w = cis(2.0 * PI / 3.0);
    let mk = |pre: C64, b: C64| StateVector::new(CVec::from_vec(vec![pre * s, pre * s * b]), vec![2]).expect("unit");
    [
        StateVector::qubits(1, 0),
        mk(I, r(t)),
        mk(-I, w * t),
        mk(I, w.conj() * t),
    ]
}

/// `|i⟩ = ½|ψ⁻⟩ + (√3/2)|n_i⟩|n_i⟩`.
pub fn tetrahedron_states() -> Vec<StateVector> {
    let psi = singlet();
    tetrahedron_directions()
        .iter()
        .map(|n| {
            let v = psi.amplitudes() * r(0.5) + n.tensor(n).amplitudes() * r(3f64.sqrt() / 2.0);
            StateVector::normalized(v, vec![2, 2]).expect("nonzero")
        })
        .collect()
}

/// Four maximally entangled states on `M_{1/2} ⊗ N_{1/2}` of three qubits.
pub fn half_block_bell_states() -> Result<Vec<CVec>> {
    let dec = decomposition(3)?;
    let v = |lambda: usize, tm: i32| dec.vector(Spin::HALF, lambda, tm);
    let h = r(FRAC_1_SQRT_2);
    Ok(vec![
        (v(0, 1) + v(1, -1)) * h,
        (v(0, 1) - v(1, -1)) * h,
        (v(1, 1) + v(0, -1)) * h,
        (v(1, 1) - v(0, -1)) * h,
    ])
}

/// `|b,μ⟩ = (|3/2,μ⟩ + (-1)^b |1/2,μ⟩) / √2`, ordered `b`-major.
pub fn eight_states_3qubits() -> Result<Vec<StateVector>> {
    let dec = decomposition(3)?;
    let bell = half_block_bell_states()?;
    let quartet: Vec<CVec> = Spin(3).twice_ms().map(|tm| dec.vector(Spin(3), 0, tm)).collect();
    let mut out = Vec::with_capacity(8);
    for b in 0..2 {
        let sign = if b == 0 { 1.0 } else { -1.0 };
        for mu in 0..4 {
            let v = (&quartet[mu] + &bell[mu] * r(sign)) * r(FRAC_1_SQRT_2);
            out.push(StateVector::new(v, vec![2, 2, 2])?);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrivateCapacities {
    /// Qubits carried by the largest decoherence-full subsystem.
    pub quantum: f64,
    /// Leading-order classical rate, in bits.
    pub classical: f64,
}

pub fn private_capacities(n: usize) -> Result<PrivateCapacities> {
    if n == 0 {
        return Err(QrfError::InvalidArgument("need at least one qubit".into()));
    }
    let n = n as f64;
    Ok(PrivateCapacities { quantum: (n + 1.0).log2(), classical: 3.0 * n.log2() })
}

/// Largest Frobenius distance between collective-twirl images of a state
/// family; zero means the family is private against a frameless observer.
pub fn twirled_spread(states: &[StateVector]) -> Result<f64> {
    let mut images = Vec::with_capacity(states.len());
    for s in states {
        let n = s.dims().len();
        images.push(su2_twirl_qubits(&s.to_density(), n)?);
    }
    let mut worst: f64 = 0.0;
    for a in &images {
        for b in &images {
            worst = worst.max(frobenius(&(a.matrix() - b.matrix())));
        }
    }
    Ok(worst)
}

fn singlet_pairs(pairs: [(usize, usize); 2]) -> StateVector {
    let amps = (0..16)
        .map(|idx| {
            let bit = |q: usize| (idx >> (3 - q)) & 1;
            pairs
                .iter()
                .map(|&(a, b)| singlet_amplitudes()[2 * bit(a) + bit(b)])
                .product::<f64>()
        })
        .collect::<Vec<_>>();
    StateVector::from_real(&amps, vec![2; 4]).expect("product of unit vectors")
}

#[derive(Clone, Debug)]
pub struct QkdStates {
    /// Products of singlets on pairs (12)(34), (13)(24), (14)(23).
    pub four_qubit: Vec<StateVector>,
    /// The same states with the last qubit discarded.
    pub three_qubit: Vec<DensityOperator>,
}

pub fn qkd_states() -> Result<QkdStates> {
    let four_qubit = vec![
        singlet_pairs([(0, 1), (2, 3)]),
        singlet_pairs([(0, 2), (1, 3)]),
        singlet_pairs([(0, 3), (1, 2)]),
    ];
    let three_qubit = four_qubit.iter().map(|s| s.reduced(&[0, 1, 2])).collect::<Result<_>>()?;
    Ok(QkdStates { four_qubit, three_qubit })
}
