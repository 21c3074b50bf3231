//! Reference-frame alignment as an estimation problem.
//!
//! Signals and fiducial effects are stored per charge sector as
//! `gauge × multiplicity` coefficient matrices, so that the group acts by
//! left multiplication with the irrep. All figures of merit considered here
//! are invariant, so covariant measurements are optimal and only the fiducial
//! effect has to be chosen.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QrfError, Result};
use crate::group_rep::decomposition::decomposition;
use crate::group_rep::special::{euler_quadrature, gauss_legendre, legendre_largest_zero, weyl_density};
use crate::group_rep::wigner::small_d_element;
use crate::group_rep::{Spin, Su2Element};
use crate::quantum_core::linalg::*;
use crate::quantum_core::StateVector;
use crate::rng::{self, Rng};
use crate::twirl::{sector_twirl, Sector};

/// Label of a charge sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Charge {
    /// U(1) charge `n`, acted on by `e^{-iφn}`.
    Number(i64),
    Spin(Spin),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SectorSpec {
    pub charge: Charge,
    pub gauge_dim: usize,
    pub mult_dim: usize,
}

/// Which group acts on a [`SectorDecomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GroupKind {
    U1,
    Su2,
}

/// Element of U(1) (an angle) or SU(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupElement {
    Phase(f64),
    Su2(Su2Element),
}

impl GroupElement {
    pub fn compose(&self, o: &Self) -> Self {
        match (self, o) {
            (GroupElement::Phase(a), GroupElement::Phase(b)) => GroupElement::Phase((a + b).rem_euclid(TAU)),
            (GroupElement::Su2(a), GroupElement::Su2(b)) => GroupElement::Su2(a.mul(b)),
            _ => panic!("mixed group elements"),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::Phase(a) => GroupElement::Phase((-a).rem_euclid(TAU)),
            GroupElement::Su2(g) => GroupElement::Su2(g.inverse()),
        }
    }
}

/// Charge sectors of a signal space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorDecomposition {
    pub group: GroupKind,
    pub sectors: Vec<SectorSpec>,
    /// Set when the sectors are the coupled blocks of this many qubits.
    pub qubits: Option<usize>,
}

impl SectorDecomposition {
    /// Photon numbers `0..=n_max`, one state each.
    pub fn phase(n_max: usize) -> Self {
        let sectors = (0..=n_max as i64)
            .map(|n| SectorSpec { charge: Charge::Number(n), gauge_dim: 1, mult_dim: 1 })
            .collect();
        Self { group: GroupKind::U1, sectors, qubits: None }
    }

    pub fn u1(charges: &[(i64, usize)]) -> Result<Self> {
        let sectors: Vec<_> = charges
            .iter()
            .map(|&(n, mult)| SectorSpec { charge: Charge::Number(n), gauge_dim: 1, mult_dim: mult })
            .collect();
        Self::validated(GroupKind::U1, sectors, None)
    }

    /// Abstract SU(2) space `⊕_j M_j ⊗ C^{mult_j}`.
    pub fn su2(spins: &[(Spin, usize)]) -> Result<Self> {
        let sectors: Vec<_> = spins
            .iter()
            .map(|&(j, mult)| SectorSpec { charge: Charge::Spin(j), gauge_dim: j.dim(), mult_dim: mult })
            .collect();
        Self::validated(GroupKind::Su2, sectors, None)
    }

    /// Coupled blocks of `n` qubits under collective rotations.
    pub fn qubits(n: usize) -> Result<Self> {
        let dec = decomposition(n)?;
        let sectors = dec
            .blocks
            .iter()
            .map(|b| SectorSpec { charge: Charge::Spin(b.j), gauge_dim: b.gauge_dim, mult_dim: b.multiplicity })
            .collect();
        Ok(Self { group: GroupKind::Su2, sectors, qubits: Some(n) })
    }

    fn validated(group: GroupKind, sectors: Vec<SectorSpec>, qubits: Option<usize>) -> Result<Self> {
        if sectors.is_empty() || sectors.iter().any(|s| s.mult_dim == 0) {
            return Err(QrfError::InvalidArgument("sectors must be nonempty with positive multiplicity".into()));
        }
        for (i, a) in sectors.iter().enumerate() {
            if sectors[..i].iter().any(|b| b.charge == a.charge) {
                return Err(QrfError::InvalidArgument(format!("charge {:?} listed twice", a.charge)));
            }
        }
        Ok(Self { group, sectors, qubits })
    }

    pub fn dim(&self) -> usize {
        self.sectors.iter().map(|s| s.gauge_dim * s.mult_dim).sum()
    }

    /// Layout in the coupled ordering (multiplicity-major within a sector).
    pub fn layout(&self) -> Vec<Sector> {
        let mut offset = 0;
        self.sectors
            .iter()
            .map(|s| {
                let out = Sector { offset, gauge_dim: s.gauge_dim, mult_dim: s.mult_dim };
                offset += out.len();
                out
            })
            .collect()
    }

    /// Irrep matrix of `g` on the gauge factor of sector `q`.
    pub fn gauge_matrix(&self, q: usize, g: &GroupElement) -> CMat {
        match (self.sectors[q].charge, g) {
            (Charge::Number(n), GroupElement::Phase(phi)) => CMat::from_element(1, 1, cis(-phi * n as f64)),
            (Charge::Spin(j), GroupElement::Su2(h)) => h.irrep(j),
            _ => panic!("group element does not match the decomposition"),
        }
    }

    fn max_charge(&self) -> u32 {
        self.sectors
            .iter()
            .map(|s| match s.charge {
                Charge::Number(n) => n.unsigned_abs() as u32,
                Charge::Spin(j) => j.twice(),
            })
            .max()
            .unwrap_or(0)
    }

    /// Zero coefficients with the right shapes.
    pub fn zeros(&self) -> SectorState {
        SectorState { blocks: self.sectors.iter().map(|s| CMat::zeros(s.gauge_dim, s.mult_dim)).collect() }
    }

    pub fn state(&self, blocks: Vec<CMat>) -> Result<SectorState> {
        if blocks.len() != self.sectors.len()
            || blocks.iter().zip(&self.sectors).any(|(b, s)| b.nrows() != s.gauge_dim || b.ncols() != s.mult_dim)
        {
            return Err(QrfError::DimensionMismatch("coefficient blocks do not match the sectors".into()));
        }
        let out = SectorState { blocks };
        if (out.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(QrfError::InvalidState(format!("norm² {} is not 1", out.norm_sqr())));
        }
        Ok(out)
    }

    /// Coefficients as one vector in the coupled ordering.
    pub fn coupled_vector(&self, s: &SectorState) -> CVec {
        let mut v = CVec::zeros(self.dim());
        for (lay, b) in self.layout().iter().zip(&s.blocks) {
            for l in 0..lay.mult_dim {
                for m in 0..lay.gauge_dim {
                    v[lay.row(l, m)] = b[(m, l)];
                }
            }
        }
        v
    }

    pub fn from_coupled_vector(&self, v: &CVec) -> SectorState {
        let blocks = self
            .layout()
            .iter()
            .map(|lay| CMat::from_fn(lay.gauge_dim, lay.mult_dim, |m, l| v[lay.row(l, m)]))
            .collect();
        SectorState { blocks }
    }

    /// Computational-basis state for a qubit decomposition.
    pub fn to_qubit_state(&self, s: &SectorState) -> Result<StateVector> {
        let n = self.qubit_count()?;
        StateVector::normalized(&decomposition(n)?.isometry * self.coupled_vector(s), vec![2; n])
    }

    pub fn from_qubit_state(&self, psi: &StateVector) -> Result<SectorState> {
        let n = self.qubit_count()?;
        if psi.dim() != 1 << n {
            return Err(QrfError::DimensionMismatch("state is not on the decomposed qubits".into()));
        }
        Ok(self.from_coupled_vector(&(decomposition(n)?.isometry.adjoint() * psi.amplitudes())))
    }

    fn qubit_count(&self) -> Result<usize> {
        self.qubits
            .ok_or_else(|| QrfError::InvalidArgument("decomposition is not attached to qubits".into()))
    }

    /// Numerical rank (threshold 1e-8) of the twirled projector onto `ψ`,
    /// computed on the full space.
    pub fn twirl_rank(&self, psi: &SectorState) -> Result<usize> {
        let v = self.coupled_vector(psi);
        let rho = outer(&v, &v);
        let tw = match (self.group, self.qubits) {
            (GroupKind::Su2, Some(n)) => {
                let dec = decomposition(n)?;
                let full = dec.from_coupled(&rho);
                let state = crate::quantum_core::DensityOperator::new(hermitize(&full), vec![2; n])?;
                crate::twirl::su2_twirl_qubits(&state, n)?.into_matrix()
            }
            (GroupKind::U1, _) => {
                let number: Vec<f64> = self
                    .sectors
                    .iter()
                    .flat_map(|s| {
                        let n = match s.charge {
                            Charge::Number(n) => n as f64,
                            Charge::Spin(_) => unreachable!(),
                        };
                        std::iter::repeat_n(n, s.mult_dim)
                    })
                    .collect();
                let state = crate::quantum_core::DensityOperator::new(hermitize(&rho), vec![self.dim()])?;
                crate::twirl::u1_twirl(&state, &number)?.into_matrix()
            }
            (GroupKind::Su2, None) => sector_twirl(&rho, &self.layout()),
        };
        Ok(numerical_rank(&tw, 1e-8))
    }
}

/// Per-sector coefficient matrices (`gauge × multiplicity`).
#[derive(Clone, Debug, PartialEq)]
pub struct SectorState {
    pub blocks: Vec<CMat>,
}

impl SectorState {
    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b * r(s)).collect() }
    }
}

/// How much of each multiplicity space the fiducial effect should cover.
pub enum Support<'a> {
    /// Rank `min(dim M_q, dim N_q)` in every sector.
    Full,
    /// Explicit Schmidt ranks per sector.
    Ranks(Vec<usize>),
    /// Schmidt bases of a given signal, phased so that `⟨e|ψ⟩ ≥ 0` per sector.
    MatchState(&'a SectorState),
}

/// Covariant POVM `{U(g)|e⟩⟨e|U(g)† dg}` on the support `H̃`.
#[derive(Clone, Debug)]
pub struct CovariantMeasurement {
    pub decomposition: SectorDecomposition,
    /// Unnormalized fiducial effect vector.
    pub fiducial: SectorState,
    pub ranks: Vec<usize>,
}

pub fn fiducial_povm(dec: &SectorDecomposition, support: Support<'_>) -> Result<CovariantMeasurement> {
    let mut blocks = Vec::with_capacity(dec.sectors.len());
    let mut ranks = Vec::with_capacity(dec.sectors.len());
    match support {
        Support::Full | Support::Ranks(_) => {
            let wanted: Vec<usize> = match support {
                Support::Ranks(r) => r,
                _ => dec.sectors.iter().map(|s| s.gauge_dim.min(s.mult_dim)).collect(),
            };
            if wanted.len() != dec.sectors.len() {
                return Err(QrfError::InvalidArgument("one rank per sector is required".into()));
            }
            for (s, &d) in dec.sectors.iter().zip(&wanted) {
                if d > s.gauge_dim.min(s.mult_dim) {
                    return Err(QrfError::InvalidArgument(format!(
                        "rank {d} exceeds min(dim M, dim N) = {}",
                        s.gauge_dim.min(s.mult_dim)
                    )));
                }
                let scale = (s.gauge_dim as f64).sqrt();
                blocks.push(CMat::from_fn(s.gauge_dim, s.mult_dim, |m, l| if m == l && m < d { r(scale) } else { ZERO }));
                ranks.push(d);
            }
        }
        Support::MatchState(psi) => {
            if psi.blocks.len() != dec.sectors.len() {
                return Err(QrfError::DimensionMismatch("signal does not match the sectors".into()));
            }
            for (s, b) in dec.sectors.iter().zip(&psi.blocks) {
                let svd = b.clone().svd(true, true);
                let (u, vt) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
                let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > 1e-12).collect();
                let mut e = CMat::zeros(s.gauge_dim, s.mult_dim);
                for &k in &keep {
                    e += u.column(k) * vt.row(k);
                }
                blocks.push(e * r((s.gauge_dim as f64).sqrt()));
                ranks.push(keep.len());
            }
        }
    }
    let m = CovariantMeasurement { decomposition: dec.clone(), fiducial: SectorState { blocks }, ranks };
    let defect = m.completeness_defect();
    if defect > 1e-9 {
        return Err(QrfError::InvalidMeasurement(format!("twirled fiducial misses a projector by {defect:.3e}")));
    }
    Ok(m)
}

impl CovariantMeasurement {
    /// Distance of `𝒢[|e⟩⟨e|]` from a projector of the declared ranks,
    /// evaluated with the block-form twirl on the coupled space.
    pub fn completeness_defect(&self) -> f64 {
        let dec = &self.decomposition;
        let e = dec.coupled_vector(&self.fiducial);
        let tw = sector_twirl(&outer(&e, &e), &dec.layout());
        let idempotent = max_abs(&(&tw * &tw - &tw));
        let want: usize = dec.sectors.iter().zip(&self.ranks).map(|(s, d)| s.gauge_dim * d).sum();
        idempotent.max((trace(&tw).re - want as f64).abs())
    }

    /// `⟨e|U(h)|ψ⟩`.
    pub fn amplitude(&self, psi: &SectorState, h: &GroupElement) -> C64 {
        let dec = &self.decomposition;
        let su2 = match h {
            GroupElement::Su2(g) => Some(g.euler()),
            _ => None,
        };
        let mut acc = ZERO;
        for (q, (e, p)) in self.fiducial.blocks.iter().zip(&psi.blocks).enumerate() {
            let d = match (su2, dec.sectors[q].charge) {
                (Some((a, b, c)), Charge::Spin(j)) => crate::group_rep::wigner_big_d(j, a, b, c),
                _ => dec.gauge_matrix(q, h),
            };
            acc += (e.adjoint() * d * p).trace();
        }
        acc
    }

    /// Density `|⟨e|U(h)|ψ⟩|²` of the relative guess `h = g'^{-1} g` with
    /// respect to normalized Haar measure.
    pub fn density(&self, psi: &SectorState, h: &GroupElement) -> f64 {
        self.amplitude(psi, h).norm_sqr()
    }
}

/// Figure of merit `f̃(g'^{-1} g)`, normalized so that `f̃(e) = 1`.
#[derive(Clone)]
pub struct Payoff {
    pub name: String,
    /// Depends only on the conjugacy class.
    pub class_function: bool,
    /// Band limit: Fourier order for U(1), doubled spin for SU(2).
    pub degree: u32,
    f: Arc<dyn Fn(&GroupElement) -> f64 + Send + Sync>,
}

impl fmt::Debug for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Payoff").field("name", &self.name).field("class_function", &self.class_function).finish()
    }
}

fn quaternion(g: &GroupElement) -> [f64; 4] {
    match g {
        GroupElement::Su2(h) => h.q,
        GroupElement::Phase(_) => panic!("SU(2) payoff evaluated on a phase"),
    }
}

impl Payoff {
    pub fn custom(
        name: impl Into<String>,
        class_function: bool,
        degree: u32,
        f: impl Fn(&GroupElement) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), class_function, degree, f: Arc::new(f) }
    }

    /// `cos²(φ/2)`.
    pub fn phase() -> Self {
        Self::custom("phase", true, 1, |g| match g {
            GroupElement::Phase(phi) => (phi / 2.0).cos().powi(2),
            GroupElement::Su2(_) => panic!("phase payoff evaluated on SU(2)"),
        })
    }

    /// Cartesian-frame fidelity `¼ + ¼ χ₁(ω) = cos²(ω/2)`.
    pub fn cartesian() -> Self {
        Self::custom("cartesian", true, 2, |g| quaternion(g)[0].powi(2))
    }

    /// Direction fidelity `(1 + ẑ·R ẑ)/2`.
    pub fn direction() -> Self {
        Self::custom("direction", false, 2, |g| {
            let q = quaternion(g);
            q[0] * q[0] + q[3] * q[3]
        })
    }

    pub fn constant(v: f64) -> Self {
        Self::custom("constant", true, 0, move |_| v)
    }

    pub fn eval(&self, g: &GroupElement) -> f64 {
        (self.f)(g)
    }
}

/// Exact average payoff `∫ dh |⟨e|U(h)|ψ⟩|² f̃(h)` by a quadrature rule that
/// is exact for the band-limited integrand.
pub fn expected_payoff(m: &CovariantMeasurement, psi: &SectorState, payoff: &Payoff) -> f64 {
    let dec = &m.decomposition;
    match dec.group {
        GroupKind::U1 => {
            let k = 4 * dec.max_charge() as usize + 2 * payoff.degree as usize + 8;
            (0..k)
                .map(|i| {
                    let h = GroupElement::Phase(TAU * i as f64 / k as f64);
                    m.density(psi, &h) * payoff.eval(&h)
                })
                .sum::<f64>()
                / k as f64
        }
        GroupKind::Su2 => {
            let band = 2 * dec.max_charge() + payoff.degree;
            euler_quadrature(Spin(band))
                .into_iter()
                .map(|(a, b, c, w)| {
                    let h = GroupElement::Su2(Su2Element::from_euler(a, b, c));
                    w * m.density(psi, &h) * payoff.eval(&h)
                })
                .sum()
        }
    }
}

/// Largest eigenpair of a real symmetric matrix; the eigenvector is signed
/// so that its first nonzero coefficient is positive.
pub fn top_eigenpair(m: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = m.clone().symmetric_eigen();
    let k = eig.eigenvalues.imax();
    let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    if v.iter().find(|x| x.abs() > 1e-12).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (eig.eigenvalues[k], v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityOptimum {
    /// Sector labels of the coefficients (photon number or `j`; the last
    /// Cartesian entry is the stretched `j = N/2` sector).
    pub labels: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct MlOptimum {
    pub state: SectorState,
    pub mu_max: f64,
    pub measurement: CovariantMeasurement,
}

/// Maximum-likelihood signal: `ψ = e/‖e‖` with the full-rank fiducial.
pub fn max_likelihood_optimum(dec: &SectorDecomposition) -> Result<MlOptimum> {
    let measurement = fiducial_povm(dec, Support::Full)?;
    let mu_max = measurement.fiducial.norm_sqr();
    let state = measurement.fiducial.scaled(1.0 / mu_max.sqrt());
    Ok(MlOptimum { state, mu_max, measurement })
}

/// Phase alignment with at most `n` photons.
pub fn phase_fidelity_optimum(n: usize) -> Result<FidelityOptimum> {
    if n == 0 {
        return Err(QrfError::InvalidArgument("need at least one photon".into()));
    }
    let m = DMatrix::from_fn(n + 1, n + 1, |a, b| match a.abs_diff(b) {
        0 => 0.5,
        1 => 0.25,
        _ => 0.0,
    });
    let (fidelity, coefficients) = top_eigenpair(&m);
    Ok(FidelityOptimum { labels: (0..=n).map(|k| k as f64).collect(), coefficients, fidelity })
}

/// Direction alignment with `n` spins (even), using `m = 0` in each
/// integer-spin sector `j = 0..=n/2`.
pub fn direction_fidelity_optimum(n: usize) -> Result<FidelityOptimum> {
    if n == 0 || n % 2 == 1 {
        return Err(QrfError::InvalidArgument(format!("direction optimum needs an even positive N, got {n}")));
    }
    let size = n / 2 + 1;
    // Jacobi matrix of the Legendre recurrence
    let m = DMatrix::from_fn(size, size, |a, b| {
        if a == b {
            0.5
        } else if a.abs_diff(b) == 1 {
            let k = a.max(b) as f64;
            0.5 * k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let (fidelity, coefficients) = top_eigenpair(&m);
    Ok(FidelityOptimum { labels: (0..size).map(|k| k as f64).collect(), coefficients, fidelity })
}

/// Closed form `(1 + x_{N/2+1})/2` with `x_l` the largest zero of `P_l`.
pub fn direction_fidelity_closed_form(n: usize) -> f64 {
    (1.0 + legendre_largest_zero(n / 2 + 1).expect("l >= 1")) / 2.0
}

/// Direction fidelity matrix for signals `Σ_j b_j |j, m⟩` over the listed
/// spins, by Gauss-Legendre quadrature in `cos β`.
pub fn direction_matrix(spins: &[Spin], twice_m: i32) -> Result<DMatrix<f64>> {
    if spins.iter().any(|j| (twice_m.unsigned_abs()) > j.twice() || (j.twice() as i32 - twice_m) % 2 != 0) {
        return Err(QrfError::InvalidArgument("m is not a weight of every listed spin".into()));
    }
    let band = spins.iter().map(|j| j.twice() as usize).max().unwrap_or(0) + 4;
    let (x, w) = gauss_legendre(band);
    Ok(DMatrix::from_fn(spins.len(), spins.len(), |a, b| {
        let (ja, jb) = (spins[a], spins[b]);
        let scale = ((ja.dim() * jb.dim()) as f64).sqrt();
        x.iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let beta = xi.clamp(-1.0, 1.0).acos();
                wi / 2.0 * small_d_element(ja, twice_m, twice_m, beta) * small_d_element(jb, twice_m, twice_m, beta) * (1.0 + xi) / 2.0
            })
            .sum::<f64>()
            * scale
    }))
}

pub fn direction_fidelity_restricted(spins: &[Spin], twice_m: i32) -> Result<FidelityOptimum> {
    let (fidelity, coefficients) = top_eigenpair(&direction_matrix(spins, twice_m)?);
    Ok(FidelityOptimum { labels: spins.iter().map(|j| j.value()).collect(), coefficients, fidelity })
}

/// Finite-N Cartesian fidelity matrix: maximally entangled `|j⟩⟩` for
/// `j < N/2` and the stretched ket `|N/2, N/2⟩` for the last sector.
pub fn cartesian_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n < 4 || n % 2 == 1 {
        return Err(QrfError::InvalidArgument(format!("Cartesian optimum needs an even N >= 4, got {n}")));
    }
    let big_j = n / 2;
    let jf = big_j as f64;
    let mut m = DMatrix::zeros(big_j + 1, big_j + 1);
    for j in 0..big_j {
        m[(j, j)] = if j == 0 { 0.25 } else { 0.5 };
        if j + 1 < big_j {
            m[(j, j + 1)] = 0.25;
            m[(j + 1, j)] = 0.25;
        }
    }
    m[(big_j - 1, big_j)] = 0.25 / ((n + 1) as f64).sqrt();
    m[(big_j, big_j - 1)] = m[(big_j - 1, big_j)];
    m[(big_j, big_j)] = 0.25 * (1.0 + jf / (jf + 1.0));
    Ok(m)
}

pub fn cartesian_fidelity_optimum(n: usize) -> Result<FidelityOptimum> {
    let (fidelity, coefficients) = top_eigenpair(&cartesian_matrix(n)?);
    let mut labels: Vec<f64> = (0..n / 2).map(|j| j as f64).collect();
    labels.push(n as f64 / 2.0);
    Ok(FidelityOptimum { labels, coefficients, fidelity })
}

/// Signal and decomposition realizing a phase optimum.
pub fn phase_signal(opt: &FidelityOptimum) -> Result<(SectorDecomposition, SectorState)> {
    let dec = SectorDecomposition::phase(opt.coefficients.len() - 1);
    let blocks = opt.coefficients.iter().map(|&c| CMat::from_element(1, 1, r(c))).collect();
    let s = dec.state(blocks)?;
    Ok((dec, s))
}

/// Signal `Σ_j b_j |j, 0⟩` on an abstract multiplicity-free space.
pub fn direction_signal(opt: &FidelityOptimum) -> Result<(SectorDecomposition, SectorState)> {
    let spins: Vec<(Spin, usize)> = (0..opt.coefficients.len()).map(|j| (Spin(2 * j as u32), 1)).collect();
    let dec = SectorDecomposition::su2(&spins)?;
    let blocks = spins
        .iter()
        .zip(&opt.coefficients)
        .map(|(&(j, _), &b)| CMat::from_fn(j.dim(), 1, |m, _| if m == j.dim() / 2 { r(b) } else { ZERO }))
        .collect();
    let s = dec.state(blocks)?;
    Ok((dec, s))
}

/// Signal for a Cartesian optimum; sectors `j < N/2` carry `2j+1`
/// multiplicity copies and the stretched sector one.
pub fn cartesian_signal(opt: &FidelityOptimum) -> Result<(SectorDecomposition, SectorState)> {
    let big_j = opt.coefficients.len() - 1;
    let mut spins: Vec<(Spin, usize)> = (0..big_j).map(|j| (Spin(2 * j as u32), 2 * j + 1)).collect();
    spins.push((Spin(2 * big_j as u32), 1));
    let dec = SectorDecomposition::su2(&spins)?;
    let blocks = spins
        .iter()
        .zip(&opt.coefficients)
        .enumerate()
        .map(|(q, (&(j, mult), &b))| {
            if q < big_j {
                identity(j.dim()) * r(b / (j.dim() as f64).sqrt())
            } else {
                CMat::from_fn(j.dim(), mult, |m, _| if m == 0 { r(b) } else { ZERO })
            }
        })
        .collect();
    let s = dec.state(blocks)?;
    Ok((dec, s))
}

/// How guesses are drawn from the covariant POVM.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GuessSampler {
    /// Class-angle tables when the guess density is a class function,
    /// rejection sampling otherwise.
    #[default]
    Auto,
    ClassAngle,
    Rejection,
}

const TABLE_NODES: usize = 4096;

/// Inverse-CDF table for a density sampled at cell midpoints of `[0, 2π)`.
struct AngleTable {
    cdf: Vec<f64>,
}

impl AngleTable {
    fn new(density: impl Fn(f64) -> f64) -> Self {
        let h = TAU / TABLE_NODES as f64;
        let mut cdf = Vec::with_capacity(TABLE_NODES + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for k in 0..TABLE_NODES {
            acc += density((k as f64 + 0.5) * h).max(0.0) * h;
            cdf.push(acc);
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Self { cdf }
    }

    fn sample(&self, rng: &mut Rng) -> f64 {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, TABLE_NODES) - 1;
        let (lo, hi) = (self.cdf[k], self.cdf[k + 1]);
        let frac = if hi > lo { (u - lo) / (hi - lo) } else { 0.5 };
        (k as f64 + frac) * TAU / TABLE_NODES as f64
    }
}

/// Largest relative change of the guess density under conjugation.
pub fn class_function_defect(m: &CovariantMeasurement, psi: &SectorState) -> f64 {
    let mut g = rng::from_seed(0x5eed);
    let scale = m.fiducial.norm_sqr().max(1.0);
    (0..16)
        .map(|_| {
            let h = Su2Element::haar(&mut g);
            let k = Su2Element::haar(&mut g);
            let a = m.density(psi, &GroupElement::Su2(h));
            let b = m.density(psi, &GroupElement::Su2(k.mul(&h).mul(&k.inverse())));
            (a - b).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Monte Carlo record of an alignment experiment.
#[derive(Clone, Debug, Serialize)]
pub struct EstimationRun {
    pub trials: usize,
    pub seed: u64,
    pub payoffs: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
}

impl EstimationRun {
    pub fn from_payoffs(payoffs: Vec<f64>, seed: u64) -> Self {
        let n = payoffs.len() as f64;
        let mean = payoffs.iter().sum::<f64>() / n;
        let var = if payoffs.len() > 1 {
            payoffs.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self { trials: payoffs.len(), seed, mean, stderr: (var / n).sqrt(), payoffs }
    }
}

enum Drawer {
    Phase(AngleTable),
    ClassAngle(AngleTable),
    Rejection(f64),
}

/// Per trial: a Haar-random true frame `g`, a guess `g'` drawn from
/// `p(g'|g) = |⟨e|U(g'^{-1}g)|ψ⟩|²`, and the score `f̃(g'^{-1}g)`.
pub fn simulate_alignment(
    m: &CovariantMeasurement,
    psi: &SectorState,
    payoff: &Payoff,
    trials: usize,
    seed: u64,
    sampler: GuessSampler,
) -> Result<EstimationRun> {
    if trials == 0 {
        return Err(QrfError::InvalidArgument("need at least one trial".into()));
    }
    if psi.blocks.len() != m.fiducial.blocks.len()
        || psi.blocks.iter().zip(&m.fiducial.blocks).any(|(a, b)| a.shape() != b.shape())
    {
        return Err(QrfError::DimensionMismatch("signal does not match the measurement".into()));
    }
    let group = m.decomposition.group;
    let drawer = match group {
        GroupKind::U1 => Drawer::Phase(AngleTable::new(|phi| m.density(psi, &GroupElement::Phase(phi)) / TAU)),
        GroupKind::Su2 => {
            let defect = class_function_defect(m, psi);
            let class = defect < 1e-9;
            match (sampler, class) {
                (GuessSampler::ClassAngle, false) => return Err(QrfError::NotClassFunction(defect)),
                (GuessSampler::Rejection, _) | (GuessSampler::Auto, false) => Drawer::Rejection(m.fiducial.norm_sqr()),
                _ => Drawer::ClassAngle(AngleTable::new(|w| {
                    m.density(psi, &GroupElement::Su2(Su2Element::axis_angle([0.0, 0.0, 1.0], w))) * weyl_density(w)
                })),
            }
        }
    };
    let payoffs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut g = rng::stream(seed, t as u64);
            let (truth, h) = match &drawer {
                Drawer::Phase(table) => (GroupElement::Phase(g.random::<f64>() * TAU), GroupElement::Phase(table.sample(&mut g))),
                Drawer::ClassAngle(table) => {
                    let truth = Su2Element::haar(&mut g);
                    let w = table.sample(&mut g);
                    let k = Su2Element::haar(&mut g);
                    let h = k.mul(&Su2Element::axis_angle([0.0, 0.0, 1.0], w)).mul(&k.inverse());
                    (GroupElement::Su2(truth), GroupElement::Su2(h))
                }
                Drawer::Rejection(bound) => {
                    let truth = Su2Element::haar(&mut g);
                    let h = loop {
                        let h = GroupElement::Su2(Su2Element::haar(&mut g));
                        if g.random::<f64>() * bound <= m.density(psi, &h) {
                            break h;
                        }
                    };
                    (GroupElement::Su2(truth), h)
                }
            };
            let guess = truth.compose(&h.inverse());
            payoff.eval(&guess.inverse().compose(&truth))
        })
        .collect();
    Ok(EstimationRun::from_payoffs(payoffs, seed))
}

/// Outcome of one run of the bitwise phase protocol.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BitwiseRun {
    pub k: u32,
    pub epsilon: f64,
    pub theta: f64,
    pub theta_estimate: f64,
    /// Estimated bits `t_1..t_k` of `θ/π`.
    pub bits: Vec<u8>,
    /// Shots per round (split between the cosine and sine settings).
    pub repetitions: usize,
    pub qubit_count: u128,
    pub success: bool,
}

/// Shots per round guaranteeing overall error probability `ε`.
pub fn bitwise_repetitions(k: u32, epsilon: f64) -> usize {
    (32.0 * (2.0 * k as f64 / epsilon).ln()).ceil() as usize
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Estimates `T = θ/π` bit by bit: round `j` prepares `H (e^{iθZ})^{2^j} H|0⟩`
/// so that `⟨Z⟩ = cos(2^{j+1} θ)`, plus a phase-shifted copy giving the sine.
pub fn bitwise_phase_protocol(k: u32, epsilon: f64, theta: f64, seed: u64) -> Result<BitwiseRun> {
    if k == 0 || k >= 20 {
        return Err(QrfError::InvalidArgument(format!("k = {k} must lie in 1..20")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(QrfError::InvalidArgument(format!("ε = {epsilon} must lie in (0, 1)")));
    }
    if !(0.0..PI).contains(&theta) {
        return Err(QrfError::InvalidArgument(format!("θ = {theta} must lie in [0, π)")));
    }
    let n = bitwise_repetitions(k, epsilon);
    let (n_cos, n_sin) = (n.div_ceil(2), n / 2);
    let mut g = rng::from_seed(seed);
    let h = CMat::from_row_slice(2, 2, &[ONE, ONE, ONE, -ONE]) * r(std::f64::consts::FRAC_1_SQRT_2);
    let s_gate = diag(&[ONE, I]);
    let z = diag_real(&[1.0, -1.0]);
    let step = diag(&[cis(theta), cis(-theta)]);
    let mut estimates = Vec::with_capacity(k as usize);
    let mut power = identity(2);
    let shots = |expect: f64, count: usize, g: &mut Rng| -> f64 {
        let p = ((1.0 + expect) / 2.0).clamp(0.0, 1.0);
        let ups = Binomial::new(count as u64, p).expect("valid binomial").sample(g) as f64;
        2.0 * ups / count as f64 - 1.0
    };
    for j in 0..k {
        power = if j == 0 { step.clone() } else { &power * &power };
        let mut ket = CVec::zeros(2);
        ket[0] = ONE;
        let prepared = &power * (&h * ket);
        let cos_state = &h * &prepared;
        let sin_state = &h * (&s_gate * &prepared);
        let c = shots((cos_state.adjoint() * &z * &cos_state)[(0, 0)].re, n_cos, &mut g);
        let s = shots((sin_state.adjoint() * &z * &sin_state)[(0, 0)].re, n_sin.max(1), &mut g);
        estimates.push((s.atan2(c) / TAU).rem_euclid(1.0));
    }
    let mut y = estimates[k as usize - 1];
    for j in (0..k as usize - 1).rev() {
        let (a, b) = (y / 2.0, y / 2.0 + 0.5);
        y = if circular_distance(a, estimates[j]) <= circular_distance(b, estimates[j]) { a } else { b };
    }
    let scale = 1u64 << k;
    let index = (y * scale as f64).round() as u64 % scale;
    let bits = (0..k).map(|i| ((index >> (k - 1 - i)) & 1) as u8).collect();
    let truth = theta / PI;
    Ok(BitwiseRun {
        k,
        epsilon,
        theta,
        theta_estimate: y * PI,
        bits,
        repetitions: n,
        qubit_count: n as u128 * (scale as u128 - 1),
        success: circular_distance(y, truth) < 1.0 / (2 * scale) as f64,
    })
}

/// Failure rate over `runs` protocol executions with uniformly random `θ`.
pub fn bitwise_failure_rate(k: u32, epsilon: f64, runs: usize, seed: u64) -> Result<f64> {
    let failures: Result<Vec<bool>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut g = rng::stream(seed, i as u64);
            let theta = g.random::<f64>() * PI;
            Ok(!bitwise_phase_protocol(k, epsilon, theta, g.random())?.success)
        })
        .collect();
    Ok(failures?.iter().filter(|&&f| f).count() as f64 / runs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_rep::special::{integrate_class_function, su2_character};

    #[test]
    fn fiducial_examples() {
        // two spins, only the symmetric subspace
        let dec = SectorDecomposition::qubits(2).unwrap();
        let psi = dec.from_qubit_state(&StateVector::qubits(2, 0)).unwrap();
        let m = fiducial_povm(&dec, Support::MatchState(&psi)).unwrap();
        let e = decomposition(2).unwrap().isometry.clone() * dec.coupled_vector(&m.fiducial);
        let want = from_real(4, &[3f64.sqrt(), 0.0, 0.0, 0.0]);
        assert!((e - want).norm() < 1e-12);

        // |01⟩ gives √3 ψ⁺ + ψ⁻
        let psi = dec.from_qubit_state(&StateVector::qubits(2, 1)).unwrap();
        let m = fiducial_povm(&dec, Support::MatchState(&psi)).unwrap();
        let e = decomposition(2).unwrap().isometry.clone() * dec.coupled_vector(&m.fiducial);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = from_real(4, &[0.0, (3f64.sqrt() + 1.0) * s, (3f64.sqrt() - 1.0) * s, 0.0]);
        assert!((e - want).norm() < 1e-12);

        let dec = SectorDecomposition::phase(2);
        let m = fiducial_povm(&dec, Support::Full).unwrap();
        let e = dec.coupled_vector(&m.fiducial);
        assert!((&e - from_real(3, &[1.0, 1.0, 1.0])).norm() < 1e-15);
        let pinched = CMat::from_fn(3, 3, |a, b| if a == b { e[a] * e[b].conj() } else { ZERO });
        assert!(max_abs(&(pinched - identity(3))) < 1e-15);
        assert!(fiducial_povm(&dec, Support::Ranks(vec![1, 2, 1])).is_err());
        assert!(fiducial_povm(&dec, Support::Ranks(vec![1, 1])).is_err());
    }

    #[test]
    fn fiducial_completeness_matches_full_twirl() {
        for n in 1..=5 {
            let dec = SectorDecomposition::qubits(n).unwrap();
            let m = fiducial_povm(&dec, Support::Full).unwrap();
            assert!(m.completeness_defect() < 1e-9);
            let full = decomposition(n).unwrap();
            let e = &full.isometry * dec.coupled_vector(&m.fiducial);
            let norm = e.norm_squared();
            let rho = crate::quantum_core::DensityOperator::new(hermitize(&(outer(&e, &e) / r(norm))), vec![2; n]).unwrap();
            let tw = crate::twirl::su2_twirl_qubits(&rho, n).unwrap().into_matrix() * r(norm);
            assert!(max_abs(&(&tw * &tw - &tw)) < 1e-9, "n={n}");
        }
    }

    #[test]
    fn maximum_likelihood_counts() {
        for n_max in 1..=8 {
            let dec = SectorDecomposition::phase(n_max);
            let ml = max_likelihood_optimum(&dec).unwrap();
            assert!((ml.mu_max - (n_max + 1) as f64).abs() < 1e-12);
            assert_eq!(dec.twirl_rank(&ml.state).unwrap(), n_max + 1);
        }
        let ml = max_likelihood_optimum(&SectorDecomposition::qubits(2).unwrap()).unwrap();
        assert!((ml.mu_max - 4.0).abs() < 1e-12);
        let dec = SectorDecomposition::qubits(4).unwrap();
        let ml = max_likelihood_optimum(&dec).unwrap();
        assert!((ml.mu_max - 15.0).abs() < 1e-12);
        assert_eq!(dec.twirl_rank(&ml.state).unwrap(), 15);
        // the likelihood of the correct guess is μ_max
        let p = ml.measurement.density(&ml.state, &GroupElement::Su2(Su2Element::IDENTITY));
        assert!((p - 15.0).abs() < 1e-10);
    }

    #[test]
    fn phase_optimum_closed_form() {
        for n in 1..=64 {
            let opt = phase_fidelity_optimum(n).unwrap();
            let want = 0.5 * (1.0 + (PI / (n as f64 + 2.0)).cos());
            assert!((opt.fidelity - want).abs() < 1e-10);
            let norm: f64 = (0..=n).map(|k| ((k as f64 + 1.0) * PI / (n as f64 + 2.0)).sin().powi(2)).sum::<f64>().sqrt();
            for (k, &c) in opt.coefficients.iter().enumerate() {
                let s = ((k as f64 + 1.0) * PI / (n as f64 + 2.0)).sin() / norm;
                assert!((c - s).abs() < 1e-8, "n={n} k={k}");
            }
        }
        let opt = phase_fidelity_optimum(1).unwrap();
        assert!((opt.fidelity - 0.75).abs() < 1e-12);
    }

    #[test]
    fn phase_optimum_agrees_with_exact_average() {
        let opt = phase_fidelity_optimum(5).unwrap();
        let (dec, psi) = phase_signal(&opt).unwrap();
        let m = fiducial_povm(&dec, Support::Full).unwrap();
        assert!((expected_payoff(&m, &psi, &Payoff::phase()) - opt.fidelity).abs() < 1e-12);
    }

    #[test]
    fn direction_optimum() {
        let two = direction_fidelity_optimum(2).unwrap();
        let want = (1.0 + 3f64.sqrt()) / (2.0 * 3f64.sqrt());
        assert!((two.fidelity - want).abs() < 1e-12);
        for n in (2..=12).step_by(2) {
            let opt = direction_fidelity_optimum(n).unwrap();
            assert!((opt.fidelity - direction_fidelity_closed_form(n)).abs() < 1e-12);
            let spins: Vec<Spin> = (0..=n / 2).map(|j| Spin(2 * j as u32)).collect();
            let quad = direction_fidelity_restricted(&spins, 0).unwrap();
            assert!((quad.fidelity - opt.fidelity).abs() < 1e-12);
        }
        let par = direction_fidelity_restricted(&[Spin(2)], 2).unwrap();
        assert!((par.fidelity - 0.75).abs() < 1e-12);
        assert!(direction_fidelity_optimum(3).is_err());
        assert!(direction_fidelity_restricted(&[Spin(1)], 0).is_err());
    }

    #[test]
    fn two_spin_exact_averages() {
        let dec = SectorDecomposition::qubits(2).unwrap();
        let anti = dec.from_qubit_state(&StateVector::qubits(2, 1)).unwrap();
        let m = fiducial_povm(&dec, Support::MatchState(&anti)).unwrap();
        let want = (1.0 + 3f64.sqrt()) / (2.0 * 3f64.sqrt());
        assert!((expected_payoff(&m, &anti, &Payoff::direction()) - want).abs() < 1e-12);
        let par = dec.from_qubit_state(&StateVector::qubits(2, 0)).unwrap();
        let m = fiducial_povm(&dec, Support::MatchState(&par)).unwrap();
        assert!((expected_payoff(&m, &par, &Payoff::direction()) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn cartesian_matrix_matches_quadrature() {
        let n = 6;
        let big_j = n / 2;
        let m = cartesian_matrix(n).unwrap();
        let payoff = |w: f64| 0.25 + 0.25 * su2_character(Spin(2), w);
        for a in 0..big_j {
            for b in 0..big_j {
                let q = integrate_class_function(|w| {
                    su2_character(Spin(2 * a as u32), w) * su2_character(Spin(2 * b as u32), w) * payoff(w)
                });
                assert!((q - m[(a, b)]).abs() < 1e-8, "({a},{b})");
            }
        }
        // stretched row and corner via exact Euler quadrature
        let js = Spin(2 * big_j as u32);
        let rule = euler_quadrature(Spin(2 * js.twice() + 2));
        let scale = (js.dim() as f64).sqrt();
        let mut cross = vec![0.0; big_j];
        let mut corner = 0.0;
        for (al, be, ga, w) in rule {
            let h = Su2Element::from_euler(al, be, ga);
            let dss = h.irrep(js)[(0, 0)];
            let f = h.q[0].powi(2);
            for (jj, c) in cross.iter_mut().enumerate() {
                let chi: C64 = h.irrep(Spin(2 * jj as u32)).trace();
                *c += w * f * (chi * dss.conj()).re * scale;
            }
            corner += w * f * dss.norm_sqr() * js.dim() as f64;
        }
        for (jj, c) in cross.iter().enumerate() {
            assert!((c - m[(jj, big_j)]).abs() < 1e-8, "cross {jj}");
        }
        assert!((corner - m[(big_j, big_j)]).abs() < 1e-8);
        // payoff expansion
        for w in [0.0, 0.7, 2.5, 5.9] {
            assert!((payoff(w) - (w / 2.0).cos().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn cartesian_optimum_realized_by_signal() {
        let opt = cartesian_fidelity_optimum(4).unwrap();
        let (dec, psi) = cartesian_signal(&opt).unwrap();
        let m = fiducial_povm(&dec, Support::MatchState(&psi)).unwrap();
        assert!((expected_payoff(&m, &psi, &Payoff::cartesian()) - opt.fidelity).abs() < 1e-10);
        assert!(cartesian_fidelity_optimum(5).is_err());
    }

    #[test]
    fn simulation_matches_exact_values() {
        let opt = phase_fidelity_optimum(8).unwrap();
        let (dec, psi) = phase_signal(&opt).unwrap();
        let m = fiducial_povm(&dec, Support::Full).unwrap();
        let run = simulate_alignment(&m, &psi, &Payoff::phase(), 20_000, 3, GuessSampler::Auto).unwrap();
        assert!((run.mean - opt.fidelity).abs() < 3.0 * run.stderr);

        let run = simulate_alignment(&m, &psi, &Payoff::constant(1.0), 100, 3, GuessSampler::Auto).unwrap();
        assert_eq!(run.mean, 1.0);

        let opt = cartesian_fidelity_optimum(4).unwrap();
        let (dec, psi) = cartesian_signal(&opt).unwrap();
        let m = fiducial_povm(&dec, Support::MatchState(&psi)).unwrap();
        // the stretched sector breaks conjugation invariance
        assert!(matches!(
            simulate_alignment(&m, &psi, &Payoff::cartesian(), 10, 0, GuessSampler::ClassAngle),
            Err(QrfError::NotClassFunction(_))
        ));
        let run = simulate_alignment(&m, &psi, &Payoff::cartesian(), 20_000, 4, GuessSampler::Auto).unwrap();
        assert!((run.mean - opt.fidelity).abs() < 3.0 * run.stderr);
    }

    #[test]
    fn class_angle_sampler_on_class_signal() {
        // only maximally entangled sectors: the guess density is a class function
        let dec = SectorDecomposition::su2(&[(Spin(0), 1), (Spin(2), 3)]).unwrap();
        let b = [0.6f64, 0.8];
        let blocks = vec![CMat::from_element(1, 1, r(b[0])), identity(3) * r(b[1] / 3f64.sqrt())];
        let psi = dec.state(blocks).unwrap();
        let m = fiducial_povm(&dec, Support::MatchState(&psi)).unwrap();
        assert!(class_function_defect(&m, &psi) < 1e-12);
        let exact = expected_payoff(&m, &psi, &Payoff::cartesian());
        let class = simulate_alignment(&m, &psi, &Payoff::cartesian(), 20_000, 5, GuessSampler::ClassAngle).unwrap();
        let rej = simulate_alignment(&m, &psi, &Payoff::cartesian(), 20_000, 6, GuessSampler::Rejection).unwrap();
        assert!((class.mean - exact).abs() < 3.0 * class.stderr);
        assert!((rej.mean - exact).abs() < 3.0 * rej.stderr);
    }

    #[test]
    fn simulation_is_reproducible() {
        let (dec, psi) = phase_signal(&phase_fidelity_optimum(3).unwrap()).unwrap();
        let m = fiducial_povm(&dec, Support::Full).unwrap();
        let a = simulate_alignment(&m, &psi, &Payoff::phase(), 500, 11, GuessSampler::Auto).unwrap();
        let b = simulate_alignment(&m, &psi, &Payoff::phase(), 500, 11, GuessSampler::Auto).unwrap();
        assert_eq!(a.payoffs, b.payoffs);
    }

    #[test]
    fn bitwise_protocol() {
        let run = bitwise_phase_protocol(3, 0.1, 1.0, 0).unwrap();
        assert_eq!(run.qubit_count, 7 * run.repetitions as u128);
        assert_eq!(run.repetitions, (32.0 * 60f64.ln()).ceil() as usize);
        for seed in 0..50 {
            let run = bitwise_phase_protocol(4, 0.1, 0.0, seed).unwrap();
            assert!(run.success && run.bits.iter().all(|&b| b == 0));
        }
        // θ/π = 0.1011 in binary
        let run = bitwise_phase_protocol(4, 0.01, PI * 11.0 / 16.0, 1).unwrap();
        assert_eq!(run.bits, vec![1, 0, 1, 1]);
        assert!(bitwise_failure_rate(4, 0.1, 200, 2).unwrap() <= 0.1);
        assert!(bitwise_phase_protocol(20, 0.1, 0.5, 0).is_err());
        assert!(bitwise_phase_protocol(4, 0.0, 0.5, 0).is_err());
        assert!(bitwise_phase_protocol(4, 0.1, PI, 0).is_err());
    }
}
