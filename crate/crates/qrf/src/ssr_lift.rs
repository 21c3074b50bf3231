//! Lifting a superselection rule by adjoining a quantum reference frame.
//!
//! For a finite group the `$`-map sends an arbitrary system operator to an
//! invariant operator on frame ⊗ system that reproduces every Born-rule
//! probability. For U(1) the quantization map embeds system states into
//! total-number eigenstates, and dequantization undoes it by relabelling
//! `|r⟩_R|m⟩_S → |r+m⟩_gl|m⟩_rel` and discarding the global label.

use crate::error::{QrfError, Result};
use crate::quantum_core::linalg::*;
use crate::quantum_core::{DensityOperator, QState, QuantumChannel, StateVector};
use crate::twirl::CyclicGroup;

/// Finite group with a unitary action on the system.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    fn inv(&self, a: usize) -> usize;
    fn system_dim(&self) -> usize;
    fn system_unitary(&self, g: usize) -> CMat;
}

impl FiniteGroup for CyclicGroup {
    fn order(&self) -> usize {
        self.order
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        (a + b) % self.order
    }

    fn inv(&self, a: usize) -> usize {
        (self.order - a % self.order) % self.order
    }

    fn system_dim(&self) -> usize {
        self.charges.len()
    }

    fn system_unitary(&self, g: usize) -> CMat {
        self.unitary(g)
    }
}

pub const MAX_CYCLIC_ORDER: usize = 64;

/// `$(A) = Σ_g |g⟩⟨g| ⊗ U(g) A U(g)†` with frame states `|g⟩` given as
/// orthonormal columns of `rf_basis`.
pub struct DollarMap<G: FiniteGroup> {
    group: G,
    rf_basis: CMat,
}

impl<G: FiniteGroup> DollarMap<G> {
    /// Frame in the regular representation with `|g⟩` the standard basis.
    pub fn regular(group: G) -> Result<Self> {
        let n = group.order();
        Self::with_basis(group, identity(n))
    }

    pub fn with_basis(group: G, rf_basis: CMat) -> Result<Self> {
        if group.order() == 0 || group.order() > MAX_CYCLIC_ORDER {
            return Err(QrfError::InvalidArgument(format!(
                "group order {} outside 1..={MAX_CYCLIC_ORDER}",
                group.order()
            )));
        }
        if rf_basis.ncols() != group.order() {
            return Err(QrfError::DimensionMismatch("need one frame state per group element".into()));
        }
        let gram = rf_basis.adjoint() * &rf_basis;
        let defect = max_abs(&(gram - identity(group.order())));
        if defect > 1e-12 {
            return Err(QrfError::InvalidArgument(format!("frame basis is not orthonormal (defect {defect:.3e})")));
        }
        Ok(Self { group, rf_basis })
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn rf_dim(&self) -> usize {
        self.rf_basis.nrows()
    }

    pub fn joint_dim(&self) -> usize {
        self.rf_dim() * self.group.system_dim()
    }

    fn frame_projector(&self, g: usize) -> CMat {
        let v = self.rf_basis.column(g).into_owned();
        outer(&v, &v)
    }

    pub fn apply(&self, a: &CMat) -> Result<CMat> {
        let ds = self.group.system_dim();
        if a.nrows() != ds || a.ncols() != ds {
            return Err(QrfError::DimensionMismatch("operator does not act on the system".into()));
        }
        let mut out = CMat::zeros(self.joint_dim(), self.joint_dim());
        for g in 0..self.group.order() {
            let u = self.group.system_unitary(g);
            out += kron(&self.frame_projector(g), &(&u * a * u.adjoint()));
        }
        Ok(out)
    }

    /// Frame action `|h⟩ → |gh⟩`, identity off the frame orbit.
    pub fn rf_unitary(&self, g: usize) -> CMat {
        let n = self.group.order();
        let d = self.rf_dim();
        let orbit: CMat = (0..n).map(|h| self.frame_projector(h)).fold(CMat::zeros(d, d), |a, b| a + b);
        let mut u = identity(d) - orbit;
        for h in 0..n {
            let to = self.rf_basis.column(self.group.mul(g, h)).into_owned();
            let from = self.rf_basis.column(h).into_owned();
            u += outer(&to, &from);
        }
        u
    }

    /// Collective action `U_R(g) ⊗ U_S(g)`.
    pub fn joint_unitary(&self, g: usize) -> CMat {
        kron(&self.rf_unitary(g), &self.group.system_unitary(g))
    }

    /// `ρ^inv = $(ρ)/|G|`.
    pub fn invariant_state(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let m = self.apply(rho.matrix())? / r(self.group.order() as f64);
        DensityOperator::from_computed(m, vec![self.rf_dim(), self.group.system_dim()])
    }

    /// Largest commutator with the collective action over all elements.
    pub fn invariance_defect(&self, a: &CMat) -> f64 {
        (0..self.group.order())
            .map(|g| {
                let u = self.joint_unitary(g);
                max_abs(&(&u * a - a * &u))
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BornCheck {
    /// `Tr[ℰ^inv(ρ^inv) $(E)]` on frame ⊗ system.
    pub lhs: f64,
    /// `Tr[ℰ(ρ) E]` on the system alone.
    pub rhs: f64,
}

/// Compares invariant and ordinary Born-rule probabilities. The lifted
/// channel has Kraus operators `$(K_μ)`.
pub fn invariant_born_check<G: FiniteGroup>(
    map: &DollarMap<G>,
    rho: &DensityOperator,
    effect: &CMat,
    channel: Option<&QuantumChannel>,
) -> Result<BornCheck> {
    let ds = map.group().system_dim();
    if rho.dim() != ds {
        return Err(QrfError::DimensionMismatch("state does not live on the system".into()));
    }
    let rho_inv = map.apply(rho.matrix())? / r(map.group().order() as f64);
    let e_inv = map.apply(effect)?;
    let (evolved_inv, evolved) = match channel {
        Some(ch) => {
            if ch.dim() != ds {
                return Err(QrfError::DimensionMismatch("channel does not act on the system".into()));
            }
            let mut acc = CMat::zeros(rho_inv.nrows(), rho_inv.ncols());
            for k in ch.kraus() {
                let lifted = map.apply(k)?;
                acc += &lifted * &rho_inv * lifted.adjoint();
            }
            (acc, ch.apply_matrix(rho.matrix()))
        }
        None => (rho_inv, rho.matrix().clone()),
    };
    Ok(BornCheck { lhs: trace(&(evolved_inv * e_inv)).re, rhs: trace(&(evolved * effect)).re })
}

fn support_max(amps: &CVec) -> Option<usize> {
    (0..amps.len()).rev().find(|&m| amps[m].norm() > 0.0)
}

/// `Σ_m c_m |n−m⟩_R |m⟩_S`, with frame dimension `n+1`.
pub fn quantize_phase_state(psi: &StateVector, n_rf: usize) -> Result<StateVector> {
    if psi.dims().len() != 1 {
        return Err(QrfError::InvalidArgument("system must be a single mode".into()));
    }
    let m_max = support_max(psi.amplitudes()).unwrap_or(0);
    if n_rf < m_max {
        return Err(QrfError::InvalidArgument(format!("frame number {n_rf} is below the system's {m_max}")));
    }
    let ds = psi.dim();
    let mut out = CVec::zeros((n_rf + 1) * ds);
    for (m, &c) in psi.amplitudes().iter().enumerate().take(m_max + 1) {
        out[(n_rf - m) * ds + m] = c;
    }
    StateVector::new(out, vec![n_rf + 1, ds])
}

/// Relational state of a frame ⊗ system state whose support obeys
/// `N_tot ≥ m_max` (the frame holds at least as many quanta as the system).
pub fn dequantize_u1(state: &QState) -> Result<DensityOperator> {
    let dims = state.dims().to_vec();
    if dims.len() != 2 {
        return Err(QrfError::InvalidArgument("expected frame ⊗ system dimensions".into()));
    }
    let (dr, ds) = (dims[0], dims[1]);
    let rho = state.to_density();
    let m = rho.matrix();
    let tol = 1e-14;
    let supported: Vec<(usize, usize)> = (0..dr)
        .flat_map(|rr| (0..ds).map(move |mm| (rr, mm)))
        .filter(|&(rr, mm)| m[(rr * ds + mm, rr * ds + mm)].re > tol)
        .collect();
    let m_max = supported.iter().map(|p| p.1).max().unwrap_or(0);
    let n_min = supported.iter().map(|p| p.0 + p.1).min().unwrap_or(0);
    if n_min < m_max {
        return Err(QrfError::OutsideWedge(format!(
            "total number {n_min} is below the largest system number {m_max}"
        )));
    }
    let mut rel = CMat::zeros(ds, ds);
    for a in 0..ds {
        for b in 0..ds {
            // Σ_N ⟨N−a, a| ρ |N−b, b⟩
            let mut acc = ZERO;
            for total in a.max(b)..(dr + a.min(b)) {
                let (ra, rb) = (total - a, total - b);
                if ra < dr && rb < dr {
                    acc += m[(ra * ds + a, rb * ds + b)];
                }
            }
            rel[(a, b)] = acc;
        }
    }
    DensityOperator::from_computed(rel, vec![ds])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::random::{random_channel, random_density, random_effect, random_operator, random_unitary};
    use crate::rng;

    fn z(d: usize) -> CyclicGroup {
        CyclicGroup::new(d, vec![0, 1]).unwrap()
    }

    #[test]
    fn dollar_map_identity_and_invariance() {
        let map = DollarMap::regular(z(8)).unwrap();
        assert!(max_abs(&(map.apply(&identity(2)).unwrap() - identity(16))) < 1e-15);
        let mut g = rng::from_seed(31);
        let a = random_operator(2, &mut g);
        let lifted = map.apply(&a).unwrap();
        assert!(map.invariance_defect(&lifted) < 1e-12);
        assert!(map.invariance_defect(&kron(&identity(8), &a)) > 1e-3);
    }

    #[test]
    fn dollar_map_is_a_star_homomorphism() {
        let map = DollarMap::regular(z(8)).unwrap();
        let mut g = rng::from_seed(32);
        for _ in 0..100 {
            let a = random_operator(2, &mut g);
            let b = random_operator(2, &mut g);
            let lhs = map.apply(&(&a * &b)).unwrap();
            let rhs = map.apply(&a).unwrap() * map.apply(&b).unwrap();
            assert!(max_abs(&(lhs - rhs)) < 1e-12);
            let adj = map.apply(&a.adjoint()).unwrap() - map.apply(&a).unwrap().adjoint();
            assert!(max_abs(&adj) < 1e-14);
            let lin = map.apply(&(&a * c(0.3, 1.0) + &b)).unwrap()
                - (map.apply(&a).unwrap() * c(0.3, 1.0) + map.apply(&b).unwrap());
            assert!(max_abs(&lin) < 1e-12);
        }
    }

    #[test]
    fn born_rule_is_reproduced() {
        let mut g = rng::from_seed(33);
        for d in [2, 8, 32] {
            let map = DollarMap::regular(z(d)).unwrap();
            for _ in 0..20 {
                let rho = random_density(vec![2], &mut g);
                let e = random_effect(2, &mut g);
                let ch = random_channel(2, 2, &mut g);
                let b = invariant_born_check(&map, &rho, &e, Some(&ch)).unwrap();
                assert!((b.lhs - b.rhs).abs() < 1e-12, "d={d}");
                let b = invariant_born_check(&map, &rho, &identity(2), None).unwrap();
                assert!((b.lhs - 1.0).abs() < 1e-12 && (b.rhs - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn custom_frame_basis() {
        let mut g = rng::from_seed(34);
        let u = random_unitary(6, &mut g);
        let basis = u.columns(0, 4).into_owned();
        let map = DollarMap::with_basis(z(4), basis.clone()).unwrap();
        let a = random_operator(2, &mut g);
        assert!(map.invariance_defect(&map.apply(&a).unwrap()) < 1e-12);
        let rho = random_density(vec![2], &mut g);
        let e = random_effect(2, &mut g);
        let b = invariant_born_check(&map, &rho, &e, None).unwrap();
        assert!((b.lhs - b.rhs).abs() < 1e-12);
        let mut bad = basis;
        bad.set_column(1, &bad.column(0).into_owned());
        assert!(DollarMap::with_basis(z(4), bad).is_err());
        assert!(DollarMap::regular(z(65)).is_err());
    }

    #[test]
    fn quantize_examples() {
        let plus = StateVector::from_real(&[1.0, 1.0], vec![2]).unwrap();
        let q = quantize_phase_state(&plus, 1).unwrap();
        let want = StateVector::from_real(&[0.0, 1.0, 1.0, 0.0], vec![2, 2]).unwrap();
        assert!((q.inner(&want).norm() - 1.0).abs() < 1e-15);
        let sys = q.reduced(&[1]).unwrap();
        assert!(max_abs(&(sys.matrix() - identity(2) * r(0.5))) < 1e-15);
        // total number is sharp
        let ds = 2;
        let total = diag_real(&(0..4).map(|k| (k / ds + k % ds) as f64).collect::<Vec<_>>());
        let rho = q.to_density();
        let mean = rho.expectation(&total).re;
        let var = rho.expectation(&(&total * &total)).re - mean * mean;
        assert!(var.abs() < 1e-15);
        let two = StateVector::from_real(&[0.0, 0.0, 1.0], vec![3]).unwrap();
        assert!(quantize_phase_state(&two, 1).is_err());
    }

    #[test]
    fn dequantize_inverts_quantize() {
        let mut g = rng::from_seed(35);
        for n in 3..8 {
            let psi = crate::quantum_core::random::random_state(vec![4], &mut g);
            let q = quantize_phase_state(&psi, n).unwrap();
            let back = dequantize_u1(&QState::Pure(q)).unwrap();
            assert!(max_abs(&(back.matrix() - psi.to_density().matrix())) < 1e-12);
        }
        let plus = StateVector::from_real(&[1.0, 1.0], vec![2]).unwrap();
        let back = dequantize_u1(&QState::Pure(quantize_phase_state(&plus, 5).unwrap())).unwrap();
        assert!(max_abs(&(back.matrix() - plus.to_density().matrix())) < 1e-12);
    }

    #[test]
    fn dequantize_mixed_totals_and_wedge() {
        let plus = StateVector::from_real(&[1.0, 1.0], vec![2]).unwrap();
        let a = quantize_phase_state(&plus, 3).unwrap();
        let b = quantize_phase_state(&plus, 4).unwrap();
        let pad = |s: &StateVector| {
            let mut v = CVec::zeros(12);
            v.rows_mut(0, s.dim()).copy_from(s.amplitudes());
            StateVector::new(v, vec![6, 2]).unwrap().to_density().into_matrix()
        };
        let mix = DensityOperator::new(hermitize(&((pad(&a) + pad(&b)) * r(0.5))), vec![6, 2]).unwrap();
        let rel = dequantize_u1(&QState::Mixed(mix)).unwrap();
        assert!(max_abs(&(rel.matrix() - plus.to_density().matrix())) < 1e-12);
        // |0⟩_R|2⟩_S sits on the wedge edge; adding |1⟩_R|0⟩_S (total 1) leaves it
        let edge = StateVector::basis(vec![3, 3], 2);
        assert!(dequantize_u1(&QState::Pure(edge.clone())).is_ok());
        let edge = StateVector::from_real(&[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0], vec![3, 3]).unwrap();
        assert!(matches!(dequantize_u1(&QState::Pure(edge)), Err(QrfError::OutsideWedge(_))));
    }
}
