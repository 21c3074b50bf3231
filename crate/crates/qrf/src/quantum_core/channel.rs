use rand::Rng as _;

use super::linalg::*;
use super::state::DensityOperator;
use crate::error::{QrfError, Result};
use crate::rng;

pub const CPTP_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    kraus: Vec<CMat>,
    label: String,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMat>, label: impl Into<String>) -> Result<Self> {
        let ch = Self::unchecked(kraus, label)?;
        let defect = ch.completeness_defect();
        if defect > CPTP_TOL {
            return Err(QrfError::InvalidChannel(format!(
                "sum of K^dag K differs from identity by {defect:.3e}"
            )));
        }
        Ok(ch)
    }

    /// Shape checks only; completeness is left to the caller.
    pub(crate) fn unchecked(kraus: Vec<CMat>, label: impl Into<String>) -> Result<Self> {
        let d = kraus
            .first()
            .ok_or_else(|| QrfError::InvalidChannel("no Kraus operators".into()))?
            .nrows();
        if kraus.iter().any(|k| k.nrows() != d || k.ncols() != d) {
            return Err(QrfError::InvalidChannel("Kraus operators must be square and equal-sized".into()));
        }
        Ok(Self { kraus, label: label.into() })
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus: vec![identity(d)], label: "identity".into() }
    }

    pub fn unitary(u: CMat, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![u], label)
    }

    /// Completely depolarizing channel built from the `d^2` generalized Paulis.
    pub fn completely_depolarizing(d: usize) -> Self {
        let omega = std::f64::consts::TAU / d as f64;
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let mut k = CMat::zeros(d, d);
                for i in 0..d {
                    k[((i + a) % d, i)] = cis(omega * (b * i) as f64) / r(d as f64);
                }
                kraus.push(k);
            }
        }
        Self { kraus, label: "completely depolarizing".into() }
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn completeness_defect(&self) -> f64 {
        let d = self.dim();
        let sum = self.kraus.iter().fold(CMat::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        max_abs(&(sum - identity(d)))
    }

    /// `sum_k K rho K^dag` on a raw matrix.
    pub fn apply_matrix(&self, rho: &CMat) -> CMat {
        let d = self.dim();
        self.kraus.iter().fold(CMat::zeros(d, d), |acc, k| acc + k * rho * k.adjoint())
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim() {
            return Err(QrfError::DimensionMismatch(format!(
                "channel on dimension {} applied to state of dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        DensityOperator::from_computed(self.apply_matrix(rho.matrix()), rho.dims().to_vec())
    }

    /// Heisenberg-picture action on an observable.
    pub fn adjoint_apply(&self, op: &CMat) -> CMat {
        let d = self.dim();
        self.kraus.iter().fold(CMat::zeros(d, d), |acc, k| acc + k.adjoint() * op * k)
    }

    /// Superoperator acting on row-major vectorized matrices:
    /// `vec(K rho K^dag) = (K (x) conj K) vec(rho)`.
    pub fn superoperator(&self) -> CMat {
        let d = self.dim();
        self.kraus
            .iter()
            .fold(CMat::zeros(d * d, d * d), |acc, k| acc + kron(k, &k.map(|z| z.conj())))
    }

    pub fn compose(&self, after: &Self) -> Result<Self> {
        if self.dim() != after.dim() {
            return Err(QrfError::DimensionMismatch("cannot compose channels of different size".into()));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * after.kraus.len());
        for b in &after.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Ok(Self { kraus, label: format!("{} then {}", self.label, after.label) })
    }
}

pub fn apply_channel(ch: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.apply(rho)
}

/// Positive operator-valued measure with labelled outcomes.
#[derive(Clone, Debug)]
pub struct Povm {
    effects: Vec<CMat>,
    labels: Vec<String>,
}

impl Povm {
    /// Effects must be PSD and sum to the identity.
    pub fn new(effects: Vec<CMat>, labels: Vec<String>) -> Result<Self> {
        let d = effects.first().map(|e| e.nrows()).unwrap_or(0);
        Self::with_support(effects, labels, identity(d))
    }

    /// Effects must be PSD and sum to the projector `support`.
    pub fn with_support(effects: Vec<CMat>, labels: Vec<String>, support: CMat) -> Result<Self> {
        if effects.is_empty() || effects.len() != labels.len() {
            return Err(QrfError::InvalidMeasurement("need one label per effect".into()));
        }
        let d = support.nrows();
        for (e, l) in effects.iter().zip(&labels) {
            if e.nrows() != d || e.ncols() != d {
                return Err(QrfError::InvalidMeasurement(format!("effect '{l}' has the wrong shape")));
            }
            if hermitian_defect(e) > CPTP_TOL {
                return Err(QrfError::InvalidMeasurement(format!("effect '{l}' is not Hermitian")));
            }
            if eigvalsh(e)[0] < -CPTP_TOL {
                return Err(QrfError::InvalidMeasurement(format!("effect '{l}' is not positive")));
            }
        }
        let sum = effects.iter().fold(CMat::zeros(d, d), |acc, e| acc + e);
        let defect = max_abs(&(sum - &support));
        if defect > CPTP_TOL {
            return Err(QrfError::InvalidMeasurement(format!(
                "effects miss the support resolution by {defect:.3e}"
            )));
        }
        Ok(Self { effects, labels })
    }

    /// Projective measurement in the computational basis, labelled "0", "1", ...
    pub fn computational(d: usize) -> Self {
        let effects = (0..d).map(|k| projector(&basis_vector(d, k))).collect();
        Self { effects, labels: (0..d).map(|k| k.to_string()).collect() }
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Born probabilities `Tr(E_k rho)`.
    pub fn probabilities(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        if rho.dim() != self.effects[0].nrows() {
            return Err(QrfError::DimensionMismatch("POVM and state dimensions differ".into()));
        }
        Ok(self.effects.iter().map(|e| rho.expectation(e).re).collect())
    }

    fn sampling_table(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        let probs = self.probabilities(rho)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(QrfError::InvalidMeasurement(format!("probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        Ok(probs
            .iter()
            .map(|p| {
                acc += p.max(0.0);
                acc
            })
            .collect())
    }

    /// Outcome indices for `trials` independent shots.
    pub fn sample_indices(&self, rho: &DensityOperator, trials: usize, seed: u64) -> Result<Vec<usize>> {
        let cdf = self.sampling_table(rho)?;
        let top = *cdf.last().unwrap();
        let mut g = rng::from_seed(seed);
        Ok((0..trials)
            .map(|_| {
                let u = g.random::<f64>() * top;
                cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
            })
            .collect())
    }
}

/// One Born-rule draw; deterministic in `seed`.
pub fn sample_measurement(p: &Povm, rho: &DensityOperator, seed: u64) -> Result<String> {
    let k = p.sample_indices(rho, 1, seed)?[0];
    Ok(p.labels[k].clone())
}
