//! Reference frames of bounded size: relational discrimination against a
//! spin-j frame, frame degradation under repeated use, and a Jaynes-Cummings
//! gate driven by a finite coherent field.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{QrfError, Result};
use crate::group_rep::cg::cg_twice;
use crate::group_rep::Spin;
use crate::quantum_core::linalg::*;
use crate::quantum_core::{DensityOperator, Povm, QState, QuantumChannel, StateVector};
use crate::ssr_lift::dequantize_u1;

/// Projectors onto total spin `j + 1/2` and `j − 1/2` in `H_j ⊗ H_{1/2}`
/// (frame first, both in descending-`m` order).
pub fn coupling_projectors(j: Spin) -> Result<(CMat, CMat)> {
    if j.twice() == 0 {
        return Err(QrfError::InvalidArgument("frame spin must be at least 1/2".into()));
    }
    let tj = j.twice() as i64;
    let d = 2 * j.dim();
    let ms: Vec<i64> = j.twice_ms().map(i64::from).collect();
    let build = |tbig: i64| {
        let mut p = CMat::zeros(d, d);
        for tm_big in (-tbig..=tbig).rev().step_by(2) {
            let mut v = CVec::zeros(d);
            for (a, &tm) in ms.iter().enumerate() {
                for (s, ts) in [1i64, -1].into_iter().enumerate() {
                    v[2 * a + s] = r(cg_twice(tj, 1, tbig, tm, ts, tm_big));
                }
            }
            p += outer(&v, &v);
        }
        p
    };
    Ok((build(tj + 1), build(tj - 1)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrimination {
    pub j: f64,
    pub p_plus_given_plus: f64,
    pub p_minus_given_plus: f64,
    pub p_plus_given_minus: f64,
    pub p_minus_given_minus: f64,
    pub p_success: f64,
    /// `1 − 1/(4(j+1))`, the commonly quoted value for this task.
    pub quoted_formula: f64,
    #[serde(skip)]
    pub povm: Povm,
}

/// Decides whether a spin-1/2 along `±z` is aligned with a frame in `|j, j⟩`
/// using the rotation-invariant measurement `{Π_{j+1/2}, Π_{j−1/2}}`.
pub fn discriminate_aligned(j: Spin) -> Result<Discrimination> {
    let (plus, minus) = coupling_projectors(j)?;
    let povm = Povm::new(vec![plus, minus], vec!["aligned".into(), "anti-aligned".into()])?;
    let frame = StateVector::basis(vec![j.dim()], 0);
    let probs = |s: usize| povm.probabilities(&frame.tensor(&StateVector::basis(vec![2], s)).to_density());
    let (up, down) = (probs(0)?, probs(1)?);
    let jv = j.value();
    Ok(Discrimination {
        j: jv,
        p_plus_given_plus: up[0],
        p_minus_given_plus: up[1],
        p_plus_given_minus: down[0],
        p_minus_given_minus: down[1],
        p_success: 0.5 * (up[0] + down[1]),
        quoted_formula: 1.0 - 1.0 / (4.0 * (jv + 1.0)),
        povm,
    })
}

/// `1 − 1/(4j+2)`, the success probability of the invariant measurement.
pub fn discrimination_closed_form(j: Spin) -> f64 {
    1.0 - 1.0 / (2.0 * j.twice() as f64 + 2.0)
}

/// Spin-j frame state.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinJFrame {
    pub j: Spin,
    pub state: DensityOperator,
}

impl SpinJFrame {
    pub fn new(j: Spin, state: DensityOperator) -> Result<Self> {
        if j.twice() == 0 {
            return Err(QrfError::InvalidArgument("frame spin must be at least 1/2".into()));
        }
        if state.dim() != j.dim() {
            return Err(QrfError::DimensionMismatch(format!("spin {j} needs dimension {}", j.dim())));
        }
        Ok(Self { j, state })
    }

    /// SU(2)-coherent state `|j, j⟩`.
    pub fn coherent(j: Spin) -> Result<Self> {
        Self::new(j, StateVector::basis(vec![j.dim()], 0).to_density())
    }
}

/// `E^c_{ab} = ⟨a|Π_c|b⟩` as frame operators, indexed `[c][a][b]`.
fn kraus_blocks(j: Spin) -> Result<[[[CMat; 2]; 2]; 2]> {
    let (plus, minus) = coupling_projectors(j)?;
    let d = j.dim();
    let block = |p: &CMat, a: usize, b: usize| CMat::from_fn(d, d, |x, y| p[(2 * x + a, 2 * y + b)]);
    let per = |p: &CMat| [[block(p, 0, 0), block(p, 0, 1)], [block(p, 1, 0), block(p, 1, 1)]];
    Ok([per(&plus), per(&minus)])
}

/// Lüders update of the frame after one invariant measurement on a maximally
/// mixed spin-1/2: `ℰ(ρ) = ½ Σ_c Σ_{ab} E^c_{ab} ρ E^c_{ab}†`.
pub fn degradation_channel(j: Spin) -> Result<QuantumChannel> {
    let blocks = kraus_blocks(j)?;
    let kraus = blocks
        .iter()
        .flat_map(|c| c.iter().flat_map(|row| row.iter().map(|e| e * r(std::f64::consts::FRAC_1_SQRT_2))))
        .collect();
    QuantumChannel::new(kraus, format!("degradation j={j}"))
}

pub fn degradation_step(frame: &SpinJFrame) -> Result<SpinJFrame> {
    let state = degradation_channel(frame.j)?.apply(&frame.state)?;
    SpinJFrame::new(frame.j, state)
}

/// `½ Tr(ρ (E⁺₀₀ + E⁻₁₁))`.
pub fn success_probability(frame: &SpinJFrame) -> Result<f64> {
    let b = kraus_blocks(frame.j)?;
    Ok(0.5 * frame.state.expectation(&(&b[0][0][0] + &b[1][1][1])).re)
}

/// `½ + j/(2j+1) (1 − 2/(2j+1)²)^n`.
pub fn degradation_closed_form(j: Spin, n: u32) -> f64 {
    let d = j.twice() as f64 + 1.0;
    0.5 + j.value() / d * (1.0 - 2.0 / (d * d)).powi(n as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct DegradationCurve {
    pub j: f64,
    pub simulated: Vec<f64>,
    pub closed_form: Vec<f64>,
}

impl DegradationCurve {
    pub fn max_deviation(&self) -> f64 {
        self.simulated.iter().zip(&self.closed_form).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Success probability after `0..=n_steps` uses of a frame starting in `|j, j⟩`.
pub fn degradation_curve(j: Spin, n_steps: u32) -> Result<DegradationCurve> {
    let ch = degradation_channel(j)?;
    let mut frame = SpinJFrame::coherent(j)?;
    let mut simulated = Vec::with_capacity(n_steps as usize + 1);
    simulated.push(success_probability(&frame)?);
    for _ in 0..n_steps {
        frame = SpinJFrame::new(j, ch.apply(&frame.state)?)?;
        simulated.push(success_probability(&frame)?);
    }
    Ok(DegradationCurve {
        j: j.value(),
        simulated,
        closed_form: (0..=n_steps).map(|n| degradation_closed_form(j, n)).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Longevity {
    pub j: f64,
    pub epsilon: f64,
    /// Initial slope `R = P̄_s(1) − P̄_s(0) = −2j/(2j+1)³`.
    pub rate: f64,
    /// `floor(−ε/R)`, from the linear bound `1 + nR`.
    pub linearized: u64,
    /// Largest `n` with `P̄_s(0) − P̄_s(n) ≤ ε`; `None` when the drop never
    /// exceeds `ε`.
    pub exact: Option<u64>,
    /// `linearized / (ε j²)`.
    pub ratio_to_eps_j2: f64,
}

pub fn longevity(j: Spin, epsilon: f64) -> Result<Longevity> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(QrfError::InvalidArgument(format!("ε = {epsilon} must lie in (0, 1/2)")));
    }
    if j.twice() == 0 {
        return Err(QrfError::InvalidArgument("frame spin must be at least 1/2".into()));
    }
    let jv = j.value();
    let d = 2.0 * jv + 1.0;
    let rate = -2.0 * jv / d.powi(3);
    let linearized = (-epsilon / rate).floor() as u64;
    // j/(2j+1) (1 − q^n) ≤ ε
    let floor = 1.0 - epsilon * d / jv;
    let exact = (floor > 0.0).then(|| (floor.ln() / (1.0 - 2.0 / (d * d)).ln()).floor() as u64);
    Ok(Longevity { j: jv, epsilon, rate, linearized, exact, ratio_to_eps_j2: linearized as f64 / (epsilon * jv * jv) })
}

/// Truncated bosonic mode.
#[derive(Clone, Debug, PartialEq)]
pub struct BosonicMode {
    pub n_cut: usize,
    pub state: DensityOperator,
}

impl BosonicMode {
    /// Coherent state `|α⟩` on levels `0..=n_cut`, renormalized after
    /// truncation; fails if the discarded tail or the top two levels carry
    /// more than 1e-8.
    pub fn coherent(alpha: C64, n_cut: usize) -> Result<StateVector> {
        let mut amps = CVec::zeros(n_cut + 1);
        let mut term = r((-alpha.norm_sqr() / 2.0).exp());
        for n in 0..=n_cut {
            amps[n] = term;
            term = term * alpha / r(((n + 1) as f64).sqrt());
        }
        let kept = amps.norm_squared();
        let edge: f64 = (n_cut.saturating_sub(1)..=n_cut).map(|n| amps[n].norm_sqr()).sum();
        let leak = (1.0 - kept).max(0.0) + edge;
        if leak > 1e-8 {
            return Err(QrfError::TruncationLeak(leak));
        }
        StateVector::normalized(amps, vec![n_cut + 1])
    }
}

pub fn default_cutoff(alpha2: f64) -> usize {
    (alpha2 + 10.0 * alpha2.sqrt()).ceil() as usize
}

#[derive(Clone, Debug, Serialize)]
pub struct JcResult {
    pub alpha2: f64,
    pub g: f64,
    pub n_cut: usize,
    /// Gate time `π/(2|α|g)`.
    pub time: f64,
    /// Fidelity of the dequantized atom with the externally driven solution.
    pub f_quantized: f64,
    /// Poisson-sum evaluation of the same quantity.
    pub f_series: f64,
    /// `½(1 − cos(π√(1+|α|²)/|α|) e^{−π²/(8(|α|²+1))})`.
    pub f_approx: f64,
    /// Population on the two highest Fock levels after evolution.
    pub leak: f64,
}

pub fn jc_fidelity_approx(alpha2: f64) -> f64 {
    let a = alpha2.sqrt();
    0.5 * (1.0 - (PI * (1.0 + alpha2).sqrt() / a).cos() * (-PI * PI / (8.0 * (alpha2 + 1.0))).exp())
}

/// `Σ_n p(n−1) cos²(τ(√n − |α|))` with Poisson weights and `τ = g t`.
pub fn jc_fidelity_series(alpha2: f64, tau: f64) -> f64 {
    let a = alpha2.sqrt();
    let n_max = default_cutoff(alpha2) + 50;
    let mut log_p = -alpha2;
    let mut acc = 0.0;
    for k in 0..n_max {
        if k > 0 {
            log_p += alpha2.ln() - (k as f64).ln();
        }
        let n = (k + 1) as f64;
        acc += log_p.exp() * (tau * (n.sqrt() - a)).cos().powi(2);
    }
    acc
}

/// Atom (index 1 = excited) driven by a field mode under
/// `H = i g (S⁺ a − a† S⁻)`, ordered field ⊗ atom. The relational atom
/// state comes from dequantizing the field; the comparison state evolves
/// under the same Hamiltonian with `a → |α|`, the field phase serving as
/// the reference.
pub fn jc_gate_fidelity(alpha: C64, g: f64, n_cut: Option<usize>) -> Result<JcResult> {
    let alpha2 = alpha.norm_sqr();
    if alpha2 <= 0.0 || g <= 0.0 {
        return Err(QrfError::InvalidArgument("need a nonzero field and positive coupling".into()));
    }
    let min_cut = alpha2 + 10.0 * alpha2.sqrt();
    let n_cut = n_cut.unwrap_or_else(|| default_cutoff(alpha2));
    if (n_cut as f64) < min_cut {
        return Err(QrfError::InvalidArgument(format!("cutoff {n_cut} is below |α|² + 10|α| = {min_cut:.2}")));
    }
    let nf = n_cut + 1;
    let a = CMat::from_fn(nf, nf, |x, y| if y == x + 1 { r((y as f64).sqrt()) } else { ZERO });
    let s_plus = CMat::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
    let h = (kron(&a, &s_plus) - kron(&a.adjoint(), &s_plus.adjoint())) * c(0.0, g);
    let time = PI / (2.0 * alpha2.sqrt() * g);
    let field = BosonicMode::coherent(alpha, n_cut)?;
    let excited = StateVector::basis(vec![2], 1);
    let psi = field.tensor(&excited).apply(&unitary_evolution(&h, time))?;
    let leak: f64 = (0..2)
        .flat_map(|atom| (n_cut.saturating_sub(1)..=n_cut).map(move |n| 2 * n + atom))
        .map(|k| psi.amplitudes()[k].norm_sqr())
        .sum();
    if leak > 1e-8 {
        return Err(QrfError::TruncationLeak(leak));
    }
    let rel = dequantize_u1(&QState::Pure(psi))?;
    let h_c = (&s_plus - s_plus.adjoint()) * c(0.0, g * alpha2.sqrt());
    let psi_c = unitary_evolution(&h_c, time) * excited.amplitudes();
    let f_quantized = (psi_c.adjoint() * rel.matrix() * &psi_c)[(0, 0)].re;
    Ok(JcResult {
        alpha2,
        g,
        n_cut,
        time,
        f_quantized,
        f_series: jc_fidelity_series(alpha2, g * time),
        f_approx: jc_fidelity_approx(alpha2),
        leak,
    })
}
