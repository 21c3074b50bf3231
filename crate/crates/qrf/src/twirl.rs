//! Group twirls: the decoherence induced by lacking a reference frame.
//!
//! For a representation `T(g) = ⊕_q U_q(g) ⊗ I_{N_q}` the twirl acts on each
//! charge sector by depolarizing the gauge factor `M_q` and leaving the
//! multiplicity factor `N_q` untouched, and removes all coherence between
//! sectors. That block form is used for every exact computation here; dense
//! Monte Carlo averaging is provided as an independent cross-check.

use std::f64::consts::TAU;

use rand::Rng as _;

use crate::error::{QrfError, Result};
use crate::group_rep::decomposition::decomposition;
use crate::group_rep::su2::{collective_spin, Su2Element};
use crate::quantum_core::linalg::*;
use crate::quantum_core::{DensityOperator, QuantumChannel};
use crate::rng::{self, Rng};

/// Placement of one charge sector in a coupled basis: rows
/// `offset + λ·gauge_dim + m` for `λ < mult_dim`, `m < gauge_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sector {
    pub offset: usize,
    pub gauge_dim: usize,
    pub mult_dim: usize,
}

impl Sector {
    pub fn len(&self) -> usize {
        self.gauge_dim * self.mult_dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, lambda: usize, m: usize) -> usize {
        self.offset + lambda * self.gauge_dim + m
    }
}

/// Block-form twirl on a matrix expressed in the coupled basis:
/// `Σ_q (D_{M_q} ⊗ id_{N_q}) ∘ P_q`.
pub fn sector_twirl(rho: &CMat, sectors: &[Sector]) -> CMat {
    let d = rho.nrows();
    let mut out = CMat::zeros(d, d);
    for s in sectors {
        let scale = r(1.0 / s.gauge_dim as f64);
        for l1 in 0..s.mult_dim {
            for l2 in 0..s.mult_dim {
                let tr: C64 = (0..s.gauge_dim).map(|m| rho[(s.row(l1, m), s.row(l2, m))]).sum();
                for m in 0..s.gauge_dim {
                    out[(s.row(l1, m), s.row(l2, m))] = tr * scale;
                }
            }
        }
    }
    out
}

/// Projection `Σ_q P_q ρ P_q` onto charge sectors followed by the partial
/// trace over each gauge factor; returns the multiplicity-space matrices.
pub fn multiplicity_blocks(rho: &CMat, sectors: &[Sector]) -> Vec<CMat> {
    sectors
        .iter()
        .map(|s| {
            CMat::from_fn(s.mult_dim, s.mult_dim, |l1, l2| {
                (0..s.gauge_dim).map(|m| rho[(s.row(l1, m), s.row(l2, m))]).sum()
            })
        })
        .collect()
}

fn integer_spectrum(number: &[f64]) -> Result<Vec<i64>> {
    number
        .iter()
        .map(|&n| {
            if (n - n.round()).abs() > 1e-12 {
                Err(QrfError::InvalidArgument(format!("number spectrum value {n} is not an integer")))
            } else {
                Ok(n.round() as i64)
            }
        })
        .collect()
}

fn check_len(rho: &DensityOperator, len: usize) -> Result<()> {
    if rho.dim() != len {
        return Err(QrfError::DimensionMismatch(format!(
            "operator data of length {len} for a state of dimension {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Total excitation `Σ_k n_k` of each basis vector, treating every factor
/// as a truncated Fock mode (qubits count their `|1⟩`s).
pub fn total_occupation(dims: &[usize]) -> Vec<f64> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut i| {
            let mut n = 0;
            for d in dims.iter().rev() {
                n += i % d;
                i /= d;
            }
            n as f64
        })
        .collect()
}

/// Photon-number twirl `Σ_n Π_n ρ Π_n` for a number operator diagonal in the
/// given basis.
pub fn u1_twirl(rho: &DensityOperator, number: &[f64]) -> Result<DensityOperator> {
    check_len(rho, number.len())?;
    let q = integer_spectrum(number)?;
    let m = rho.matrix();
    let out = CMat::from_fn(m.nrows(), m.ncols(), |a, b| if q[a] == q[b] { m[(a, b)] } else { ZERO });
    DensityOperator::from_computed(out, rho.dims().to_vec())
}

/// Collective SU(2) twirl of `n` qubits through the coupled basis.
pub fn su2_twirl_qubits(rho: &DensityOperator, n: usize) -> Result<DensityOperator> {
    if rho.dim() != 1 << n {
        return Err(QrfError::DimensionMismatch(format!(
            "state of dimension {} is not on {n} qubits",
            rho.dim()
        )));
    }
    let dec = decomposition(n)?;
    let sectors: Vec<Sector> = dec
        .blocks
        .iter()
        .map(|b| Sector { offset: b.offset, gauge_dim: b.gauge_dim, mult_dim: b.multiplicity })
        .collect();
    let coupled = dec.to_coupled(rho.matrix());
    DensityOperator::from_computed(dec.from_coupled(&sector_twirl(&coupled, &sectors)), rho.dims().to_vec())
}

/// Cyclic group `Z_d` acting as `U(k) = diag(e^{2πi k q / d})`.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicGroup {
    pub order: usize,
    pub charges: Vec<i64>,
}

impl CyclicGroup {
    pub fn new(order: usize, charges: Vec<i64>) -> Result<Self> {
        if order == 0 || charges.is_empty() {
            return Err(QrfError::InvalidArgument("cyclic group needs order >= 1 and a nonempty space".into()));
        }
        Ok(Self { order, charges })
    }

    pub fn unitary(&self, k: usize) -> CMat {
        let w = TAU * k as f64 / self.order as f64;
        diag(&self.charges.iter().map(|&q| cis(w * q as f64)).collect::<Vec<_>>())
    }
}

/// Representations understood by the sampling and invariance routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    /// `U(φ) = e^{-iφN}` with `N = diag(charges)`.
    U1 { charges: Vec<i64> },
    /// `R(g)^{⊗n}` on `n` qubits.
    Su2Qubits { n: usize },
    Cyclic(CyclicGroup),
}

/// A matrix whose commutant characterizes invariance: a Lie-algebra
/// generator or a group element.
pub enum Witness {
    Generator(CMat),
    Element(CMat),
}

impl Representation {
    pub fn u1(charges: Vec<i64>) -> Self {
        Representation::U1 { charges }
    }

    pub fn dim(&self) -> usize {
        match self {
            Representation::U1 { charges } => charges.len(),
            Representation::Su2Qubits { n } => 1 << n,
            Representation::Cyclic(g) => g.charges.len(),
        }
    }

    pub fn u1_unitary(charges: &[i64], phi: f64) -> CMat {
        diag(&charges.iter().map(|&q| cis(-phi * q as f64)).collect::<Vec<_>>())
    }

    /// One Haar-distributed group element.
    pub fn sample(&self, rng: &mut Rng) -> CMat {
        match self {
            Representation::U1 { charges } => Self::u1_unitary(charges, rng.random::<f64>() * TAU),
            Representation::Su2Qubits { n } => Su2Element::haar(rng).collective(*n),
            Representation::Cyclic(g) => g.unitary(rng.random_range(0..g.order)),
        }
    }

    pub fn witnesses(&self) -> Vec<Witness> {
        match self {
            Representation::U1 { charges } => {
                vec![Witness::Generator(diag_real(&charges.iter().map(|&q| q as f64).collect::<Vec<_>>()))]
            }
            Representation::Su2Qubits { n } => collective_spin(*n).into_iter().map(Witness::Generator).collect(),
            Representation::Cyclic(g) => vec![Witness::Element(g.unitary(1))],
        }
    }
}

/// Monte Carlo estimate of a twirl.
#[derive(Clone, Debug)]
pub struct SampledTwirl {
    pub state: DensityOperator,
    /// Frobenius-norm standard error of the mean.
    pub stderr: f64,
    pub samples: usize,
}

/// `(1/n) Σ_k U(g_k) ρ U(g_k)†` over Haar samples.
pub fn dense_twirl_via_sampling(
    rho: &DensityOperator,
    rep: &Representation,
    n_samples: usize,
    seed: u64,
) -> Result<SampledTwirl> {
    if n_samples < 100 {
        return Err(QrfError::InvalidArgument(format!("{n_samples} samples is below the minimum of 100")));
    }
    if rep.dim() != rho.dim() {
        return Err(QrfError::DimensionMismatch("representation and state dimensions differ".into()));
    }
    let d = rho.dim();
    let mut g = rng::from_seed(seed);
    let mut mean = CMat::zeros(d, d);
    let mut m2 = vec![0.0; d * d];
    for k in 0..n_samples {
        let u = rep.sample(&mut g);
        let x = &u * rho.matrix() * u.adjoint();
        let delta = &x - &mean;
        mean += &delta / r((k + 1) as f64);
        for (acc, (a, b)) in m2.iter_mut().zip(delta.iter().zip((&x - &mean).iter())) {
            *acc += (a.conj() * b).re;
        }
    }
    let n = n_samples as f64;
    let stderr = (m2.iter().sum::<f64>() / (n - 1.0) / n).sqrt();
    Ok(SampledTwirl { state: DensityOperator::from_computed(mean, rho.dims().to_vec())?, stderr, samples: n_samples })
}

/// Density on `[0, 2π)` describing partial knowledge of a phase.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseDistribution {
    Uniform,
    /// Point mass at the given phase.
    Point(f64),
    /// Density values on the uniform grid `φ_k = 2πk/K`.
    Tabulated(Vec<f64>),
}

impl PhaseDistribution {
    pub fn tabulate(k: usize, f: impl Fn(f64) -> f64) -> Self {
        PhaseDistribution::Tabulated((0..k).map(|i| f(TAU * i as f64 / k as f64)).collect())
    }

    fn validate(&self) -> Result<()> {
        if let PhaseDistribution::Tabulated(p) = self {
            if p.is_empty() || p.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                return Err(QrfError::InvalidArgument("density must be finite and non-negative".into()));
            }
            let total = p.iter().sum::<f64>() * TAU / p.len() as f64;
            if (total - 1.0).abs() > 1e-8 {
                return Err(QrfError::InvalidArgument(format!("density integrates to {total}, not 1")));
            }
        }
        Ok(())
    }

    /// `∫ p(φ) e^{-ikφ} dφ`.
    pub fn fourier(&self, k: i64) -> C64 {
        match self {
            PhaseDistribution::Uniform => if k == 0 { ONE } else { ZERO },
            PhaseDistribution::Point(phi) => cis(-(k as f64) * phi),
            PhaseDistribution::Tabulated(p) => {
                let h = TAU / p.len() as f64;
                p.iter().enumerate().map(|(i, &v)| cis(-(k as f64) * h * i as f64) * r(v * h)).sum()
            }
        }
    }
}

/// `∫ p(φ) U(φ) ρ U(φ)† dφ` with `U(φ) = e^{-iφN}`.
pub fn weighted_u1_twirl(rho: &DensityOperator, number: &[f64], dist: &PhaseDistribution) -> Result<DensityOperator> {
    check_len(rho, number.len())?;
    dist.validate()?;
    let q = integer_spectrum(number)?;
    let m = rho.matrix();
    let out = CMat::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)] * dist.fourier(q[a] - q[b]));
    DensityOperator::from_computed(out, rho.dims().to_vec())
}

/// Super-twirl `∫ dg T(g) ∘ E ∘ T(g)^{-1}` of a channel. For U(1) every Kraus
/// operator splits into its charge-shifting components; for a finite group
/// the average is an exact finite sum.
pub fn super_twirl(ch: &QuantumChannel, rep: &Representation) -> Result<QuantumChannel> {
    if rep.dim() != ch.dim() {
        return Err(QrfError::DimensionMismatch("channel and representation dimensions differ".into()));
    }
    let kraus = match rep {
        Representation::U1 { charges } => {
            let mut shifts: Vec<i64> = charges
                .iter()
                .flat_map(|a| charges.iter().map(move |b| a - b))
                .collect();
            shifts.sort_unstable();
            shifts.dedup();
            let mut out = Vec::new();
            for k in ch.kraus() {
                for &delta in &shifts {
                    let part = CMat::from_fn(k.nrows(), k.ncols(), |a, b| {
                        if charges[a] - charges[b] == delta { k[(a, b)] } else { ZERO }
                    });
                    if max_abs(&part) > 0.0 {
                        out.push(part);
                    }
                }
            }
            out
        }
        Representation::Cyclic(g) => {
            let norm = r(1.0 / (g.order as f64).sqrt());
            let mut out = Vec::new();
            for e in 0..g.order {
                let u = g.unitary(e);
                for k in ch.kraus() {
                    out.push(&u * k * u.adjoint() * norm);
                }
            }
            out
        }
        Representation::Su2Qubits { .. } => {
            return Err(QrfError::UnsupportedGroup("super-twirl is available for U(1) and finite groups".into()))
        }
    };
    QuantumChannel::new(kraus, format!("super-twirled {}", ch.label()))
}

/// What to test for G-invariance.
pub enum InvarianceTarget<'a> {
    Operator(&'a CMat),
    Channel(&'a QuantumChannel),
}

/// Largest commutator norm against the representation's witnesses. For
/// channels the commutator is taken at the superoperator level.
pub fn invariance_defect(target: &InvarianceTarget<'_>, rep: &Representation) -> Result<f64> {
    let d = rep.dim();
    let mut worst: f64 = 0.0;
    match target {
        InvarianceTarget::Operator(a) => {
            if a.nrows() != d || a.ncols() != d {
                return Err(QrfError::DimensionMismatch("operator and representation dimensions differ".into()));
            }
            for w in rep.witnesses() {
                let x = match w {
                    Witness::Generator(x) | Witness::Element(x) => x,
                };
                worst = worst.max(frobenius(&commutator(a, &x)));
            }
        }
        InvarianceTarget::Channel(ch) => {
            if ch.dim() != d {
                return Err(QrfError::DimensionMismatch("channel and representation dimensions differ".into()));
            }
            let s = ch.superoperator();
            for w in rep.witnesses() {
                let lifted = match w {
                    Witness::Generator(x) => kron(&x, &identity(d)) - kron(&identity(d), &x.transpose()),
                    Witness::Element(u) => kron(&u, &u.map(|z| z.conj())),
                };
                worst = worst.max(frobenius(&commutator(&s, &lifted)));
            }
        }
    }
    Ok(worst)
}

pub fn is_g_invariant(target: &InvarianceTarget<'_>, rep: &Representation, tol: f64) -> Result<bool> {
    Ok(invariance_defect(target, rep)? <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_rep::special::euler_quadrature;
    use crate::group_rep::Spin;
    use crate::quantum_core::random::{random_channel, random_density};
    use crate::quantum_core::StateVector;

    fn plus() -> DensityOperator {
        StateVector::from_real(&[1.0, 1.0], vec![2]).unwrap().to_density()
    }

    #[test]
    fn u1_pinch_examples() {
        let out = u1_twirl(&plus(), &[0.0, 1.0]).unwrap();
        assert!(max_abs(&(out.matrix() - diag_real(&[0.5, 0.5]))) < 1e-15);
        // (|01> + |10>)/sqrt2 on two modes: total number 1 throughout
        let psi = StateVector::from_real(&[0.0, 1.0, 1.0, 0.0], vec![2, 2]).unwrap().to_density();
        let out = u1_twirl(&psi, &[0.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(max_abs(&(out.matrix() - psi.matrix())) < 1e-15);
        assert!(u1_twirl(&plus(), &[0.0, 0.5]).is_err());
        assert!(u1_twirl(&plus(), &[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn su2_twirl_examples() {
        let mut g = rng::from_seed(2);
        let rho = random_density(vec![2], &mut g);
        let out = su2_twirl_qubits(&rho, 1).unwrap();
        assert!(max_abs(&(out.matrix() - identity(2) * r(0.5))) < 1e-12);

        let singlet = StateVector::from_real(&[0.0, 1.0, -1.0, 0.0], vec![2, 2]).unwrap().to_density();
        let out = su2_twirl_qubits(&singlet, 2).unwrap();
        assert!(max_abs(&(out.matrix() - singlet.matrix())) < 1e-12);

        let sym = StateVector::from_real(&[0.3, 0.5, 0.5, -0.4], vec![2, 2]).unwrap().to_density();
        let out = su2_twirl_qubits(&sym, 2).unwrap();
        let proj_sym = identity(4) - singlet.matrix();
        assert!(max_abs(&(out.matrix() - proj_sym / r(3.0))) < 1e-12);
        assert!(su2_twirl_qubits(&sym, 3).is_err());
    }

    #[test]
    fn three_qubit_subsystem_is_preserved() {
        // σ on M_{1/2} ⊗ ρ on N_{1/2} maps to (I/2) ⊗ ρ
        let dec = decomposition(3).unwrap();
        let b = dec.block(Spin(1)).unwrap();
        let mut g = rng::from_seed(8);
        let sigma = random_density(vec![2], &mut g);
        let rho_n = random_density(vec![2], &mut g);
        let embed = |mult: &CMat, gauge: &CMat| {
            let mut coupled = CMat::zeros(8, 8);
            let local = kron(mult, gauge); // (λ, m) ordering
            coupled.view_mut((b.offset, b.offset), (4, 4)).copy_from(&local);
            dec.from_coupled(&coupled)
        };
        let input = DensityOperator::new(hermitize(&embed(rho_n.matrix(), sigma.matrix())), vec![2, 2, 2]).unwrap();
        let out = su2_twirl_qubits(&input, 3).unwrap();
        let expect = embed(rho_n.matrix(), &(identity(2) * r(0.5)));
        assert!(max_abs(&(out.matrix() - expect)) < 1e-12);
    }

    #[test]
    fn block_form_matches_exact_euler_quadrature() {
        let mut g = rng::from_seed(4);
        for n in 1..=4 {
            let rho = random_density(vec![2; n], &mut g);
            let rule = euler_quadrature(Spin(n as u32));
            let d = 1 << n;
            let mut acc = CMat::zeros(d, d);
            for &(a, b, c, w) in &rule {
                let u = Su2Element::from_euler(a, b, c).collective(n);
                acc += &u * rho.matrix() * u.adjoint() * r(w);
            }
            let exact = su2_twirl_qubits(&rho, n).unwrap();
            assert!(max_abs(&(exact.matrix() - acc)) < 1e-6, "n={n}");
        }
    }

    #[test]
    fn sampling_converges_to_block_form() {
        let mut g = rng::from_seed(5);
        let rho = random_density(vec![2; 3], &mut g);
        let rep = Representation::Su2Qubits { n: 3 };
        let mc = dense_twirl_via_sampling(&rho, &rep, 100_000, 1).unwrap();
        let exact = su2_twirl_qubits(&rho, 3).unwrap();
        assert!(frobenius(&(mc.state.matrix() - exact.matrix())) < 5e-3);
        assert!(mc.stderr > 0.0 && mc.stderr < 5e-3);

        let rho = random_density(vec![3], &mut g);
        let rep = Representation::u1(vec![0, 1, 2]);
        let mc = dense_twirl_via_sampling(&rho, &rep, 100_000, 2).unwrap();
        let exact = u1_twirl(&rho, &[0.0, 1.0, 2.0]).unwrap();
        assert!(frobenius(&(mc.state.matrix() - exact.matrix())) < 5e-3);

        let inv = exact;
        let mc = dense_twirl_via_sampling(&inv, &rep, 100, 3).unwrap();
        assert!(max_abs(&(mc.state.matrix() - inv.matrix())) < 1e-12);
        assert!(dense_twirl_via_sampling(&inv, &rep, 99, 3).is_err());
    }

    #[test]
    fn weighted_twirl_limits() {
        let mut g = rng::from_seed(6);
        let rho = random_density(vec![3], &mut g);
        let n = [0.0, 1.0, 2.0];
        let uni = weighted_u1_twirl(&rho, &n, &PhaseDistribution::Uniform).unwrap();
        assert!(max_abs(&(uni.matrix() - u1_twirl(&rho, &n).unwrap().matrix())) < 1e-15);
        let flat = PhaseDistribution::tabulate(64, |_| 1.0 / TAU);
        let tab = weighted_u1_twirl(&rho, &n, &flat).unwrap();
        assert!(max_abs(&(tab.matrix() - uni.matrix())) < 1e-13);
        let phi0 = 0.9;
        let pt = weighted_u1_twirl(&rho, &n, &PhaseDistribution::Point(phi0)).unwrap();
        let u = Representation::u1_unitary(&[0, 1, 2], phi0);
        assert!(max_abs(&(pt.matrix() - &u * rho.matrix() * u.adjoint())) < 1e-14);
        let bad = PhaseDistribution::tabulate(64, |_| 1.0);
        assert!(weighted_u1_twirl(&rho, &n, &bad).is_err());
    }

    #[test]
    fn von_mises_weighting_matches_direct_quadrature() {
        // p(φ) = e^{κ cos φ} / (2π I0(κ)); oracle: Gauss-Legendre average of U ρ U†
        let kappa = 3.0;
        let i0: f64 = crate::group_rep::special::gauss_legendre_interval(200, 0.0, TAU)
            .iter()
            .map(|&(x, w)| w * (kappa * x.cos()).exp())
            .sum::<f64>()
            / TAU;
        let density = move |phi: f64| (kappa * phi.cos()).exp() / (TAU * i0);
        let dist = PhaseDistribution::tabulate(512, density);
        let mut g = rng::from_seed(7);
        let rho = random_density(vec![4], &mut g);
        let charges = [0i64, 1, 2, 3];
        let n: Vec<f64> = charges.iter().map(|&q| q as f64).collect();
        let out = weighted_u1_twirl(&rho, &n, &dist).unwrap();
        let mut oracle = CMat::zeros(4, 4);
        for (phi, w) in crate::group_rep::special::gauss_legendre_interval(200, 0.0, TAU) {
            let u = Representation::u1_unitary(&charges, phi);
            oracle += &u * rho.matrix() * u.adjoint() * r(w * density(phi));
        }
        assert!(max_abs(&(out.matrix() - oracle)) < 1e-10);
        // coherences shrink
        assert!(out.matrix()[(0, 1)].norm() < rho.matrix()[(0, 1)].norm());
    }

    #[test]
    fn super_twirl_examples() {
        let charges = vec![0i64, 1];
        let rep = Representation::u1(charges.clone());
        let phase = Representation::u1_unitary(&charges, 0.4);
        let inv = QuantumChannel::unitary(phase.clone(), "phase").unwrap();
        let tw = super_twirl(&inv, &rep).unwrap();
        let mut g = rng::from_seed(9);
        let rho = random_density(vec![2], &mut g);
        assert!(max_abs(&(tw.apply_matrix(rho.matrix()) - inv.apply_matrix(rho.matrix()))) < 1e-14);

        let theta = 0.7f64;
        let x_rot = CMat::from_row_slice(
            2,
            2,
            &[r((theta / 2.0).cos()), c(0.0, -(theta / 2.0).sin()), c(0.0, -(theta / 2.0).sin()), r((theta / 2.0).cos())],
        );
        let ch = QuantumChannel::unitary(x_rot, "x rotation").unwrap();
        assert!(!is_g_invariant(&InvarianceTarget::Channel(&ch), &rep, 1e-10).unwrap());
        let tw = super_twirl(&ch, &rep).unwrap();
        assert!(is_g_invariant(&InvarianceTarget::Channel(&tw), &rep, 1e-10).unwrap());
        // phase covariance checked directly
        for phi in [0.3, 1.9] {
            let u = Representation::u1_unitary(&charges, phi);
            let lhs = tw.apply_matrix(&(&u * rho.matrix() * u.adjoint()));
            let rhs = &u * tw.apply_matrix(rho.matrix()) * u.adjoint();
            assert!(max_abs(&(lhs - rhs)) < 1e-12);
        }
        assert!(super_twirl(&ch, &Representation::Su2Qubits { n: 1 }).is_err());
    }

    #[test]
    fn finite_super_twirl_matches_group_average() {
        let group = CyclicGroup::new(4, vec![0, 1, 3]).unwrap();
        let rep = Representation::Cyclic(group.clone());
        let mut g = rng::from_seed(10);
        let ch = random_channel(3, 2, &mut g);
        let tw = super_twirl(&ch, &rep).unwrap();
        assert!(is_g_invariant(&InvarianceTarget::Channel(&tw), &rep, 1e-10).unwrap());
        let rho = random_density(vec![3], &mut g);
        let mut avg = CMat::zeros(3, 3);
        for k in 0..4 {
            let u = group.unitary(k);
            avg += &u * ch.apply_matrix(&(u.adjoint() * rho.matrix() * &u)) * u.adjoint() / r(4.0);
        }
        assert!(max_abs(&(tw.apply_matrix(rho.matrix()) - avg)) < 1e-12);
    }

    #[test]
    fn twirled_states_are_invariant() {
        let out = u1_twirl(&plus(), &[0.0, 1.0]).unwrap();
        let rep = Representation::u1(vec![0, 1]);
        assert!(is_g_invariant(&InvarianceTarget::Operator(out.matrix()), &rep, 1e-12).unwrap());
        assert!(!is_g_invariant(&InvarianceTarget::Operator(plus().matrix()), &rep, 1e-12).unwrap());
    }
}
