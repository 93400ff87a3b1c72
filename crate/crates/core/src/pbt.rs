//! Analytic port-based teleportation (PBT) with a Pauli-noisy resource.
//!
//! Ideal `N`-port PBT with the square-root measurement acts as a depolarizing
//! channel `ρ -> q_N ρ + (1 - q_N) I/2` with `q_N = 2f - 1`. Local Pauli noise
//! on every resource pair turns each pair into a Bell-diagonal state, and
//! the overall map stays a Pauli channel described by `(q_N, q_p, q^(j))`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::pauli::PauliChannel;
use crate::states::DensityMatrix;

/// Above this port count binomials are evaluated through log-gamma.
const EXACT_BINOMIAL_MAX: usize = 50;

/// Tolerance for the `q^(j) = 1 - α_j/4` cross-check.
pub const EFFECTIVE_PARAMS_TOL: f64 = 1e-10;

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.correction += (self.sum - t) + x;
        } else {
            self.correction += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

/// `C(n, k) / 2^(n+3)`.
fn weighted_binomial(n: usize, k: usize) -> f64 {
    if n <= EXACT_BINOMIAL_MAX {
        let mut c: u64 = 1;
        for i in 0..k as u64 {
            c = c * (n as u64 - i) / (i + 1);
        }
        c as f64 / 2f64.powi(n as i32 + 3)
    } else {
        let ln_c = ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
        (ln_c - (n as f64 + 3.0) * std::f64::consts::LN_2).exp()
    }
}

fn check_ports(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("PBT needs at least one port".into()));
    }
    Ok(())
}

/// Exact entanglement fidelity `F` of ideal `N`-port PBT with the
/// square-root measurement.
pub fn entanglement_fidelity(n: usize) -> Result<f64> {
    check_ports(n)?;
    let nf = n as f64;
    let mut acc = CompensatedSum::default();
    for k in 0..=n {
        let kf = k as f64;
        let a = (nf - 2.0 * kf - 1.0) / (kf + 1.0).sqrt();
        let b = (nf - 2.0 * kf + 1.0) / (nf - kf + 1.0).sqrt();
        acc.add((a + b).powi(2) * weighted_binomial(n, k));
    }
    Ok(acc.value())
}

/// Teleportation fidelity `f = (2F + 1)/3` for a qubit.
pub fn teleportation_fidelity(n: usize) -> Result<f64> {
    Ok((2.0 * entanglement_fidelity(n)? + 1.0) / 3.0)
}

/// Depolarizing survival parameter `q_N = 2f - 1`.
pub fn q_n(n: usize) -> Result<f64> {
    Ok(2.0 * teleportation_fidelity(n)? - 1.0)
}

/// Large-`N` reference `1 - 3/(4N)`; tests only.
pub fn asymptotic_entanglement_fidelity(n: usize) -> f64 {
    1.0 - 3.0 / (4.0 * n as f64)
}

/// Large-`N` reference `1 - 1/(2N)`; tests only.
pub fn asymptotic_teleportation_fidelity(n: usize) -> f64 {
    1.0 - 1.0 / (2.0 * n as f64)
}

/// Bell-diagonal state `Σ_k w_k |Ψ^k><Ψ^k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellMixture {
    pub weights: [f64; 4],
}

impl BellMixture {
    /// `α_k = 16 w_k`.
    pub fn alphas(&self) -> [f64; 4] {
        self.weights.map(|w| 16.0 * w)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let mut m = crate::linalg::ComplexMatrix::zeros(4, 4);
        for (k, &w) in self.weights.iter().enumerate() {
            let b = crate::states::bell_state(k).expect("valid Bell index");
            m.add_scaled(num_complex::Complex64::new(w, 0.0), b.matrix());
        }
        DensityMatrix::from_matrix_unchecked(m)
    }
}

/// `(E_p ⊗ E_p)|Ψ^0><Ψ^0|` in the Bell basis.
pub fn noisy_resource_state(p: &PauliChannel) -> BellMixture {
    let p0 = p.p0();
    let [p1, p2, p3] = p.probabilities();
    let alphas = [
        p0 * p0 + p1 * p1 + p2 * p2 + p3 * p3,
        2.0 * (p0 * p1 + p2 * p3),
        2.0 * (p0 * p2 + p3 * p1),
        2.0 * (p0 * p3 + p1 * p2),
    ];
    BellMixture {
        weights: alphas.map(|a| a / 16.0),
    }
}

/// Effective environment parameters of the noisy PBT channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    /// Mean of `q`.
    pub q_p: f64,
    /// `(q^(1), q^(2), q^(3))`.
    pub q: [f64; 3],
}

/// `q_p` and `q^(j)` from the `Δ_ij = |p_i - p_j|` expressions, cross-checked
/// against `q^(j) = 1 - α_j/4`. A mismatch is a hard error.
pub fn effective_params(p: &PauliChannel) -> Result<EffectiveParams> {
    let [p1, p2, p3] = p.probabilities();
    let d12 = (p1 - p2).abs().powi(2);
    let d23 = (p2 - p3).abs().powi(2);
    let d31 = (p3 - p1).abs().powi(2);
    let q_p = ((1.0 - p1).powi(2) + (1.0 - p2).powi(2) + (1.0 - p3).powi(2)) / 3.0 - (d12 + d23 + d31) / 12.0;
    let q = [
        (1.0 - p1).powi(2) - (d12 - d23 + d31) / 4.0,
        (1.0 - p2).powi(2) - (d12 + d23 - d31) / 4.0,
        (1.0 - p3).powi(2) - (-d12 + d23 + d31) / 4.0,
    ];

    let alphas = noisy_resource_state(p).alphas();
    for j in 0..3 {
        let oracle = 1.0 - alphas[j + 1] / 4.0;
        if (q[j] - oracle).abs() > EFFECTIVE_PARAMS_TOL {
            return Err(Error::Consistency(format!(
                "q^({}) = {} but 1 - alpha_{}/4 = {oracle}",
                j + 1,
                q[j],
                j + 1
            )));
        }
    }
    let mean = q.iter().sum::<f64>() / 3.0;
    if (mean - q_p).abs() > EFFECTIVE_PARAMS_TOL {
        return Err(Error::Consistency(format!("q_p = {q_p} but mean of q^(j) is {mean}")));
    }
    Ok(EffectiveParams { q_p, q })
}

/// Noisy `N`-port PBT as a single-qubit Pauli channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbtChannel {
    /// `None` when `q_N` was injected directly.
    ports: Option<usize>,
    noise: PauliChannel,
    q_n: f64,
    params: EffectiveParams,
}

impl PbtChannel {
    pub fn new(ports: usize, noise: PauliChannel) -> Result<Self> {
        let q_n = q_n(ports)?;
        Ok(Self {
            ports: Some(ports),
            noise,
            q_n,
            params: effective_params(&noise)?,
        })
    }

    /// Channel with a given `q_N`, e.g. `1.0` for the infinite-port limit.
    pub fn with_q_n(q_n: f64, noise: PauliChannel) -> Result<Self> {
        if !(0.0..=1.0).contains(&q_n) {
            return Err(Error::OutOfRange(format!("q_N = {q_n} outside [0, 1]")));
        }
        Ok(Self {
            ports: None,
            noise,
            q_n,
            params: effective_params(&noise)?,
        })
    }

    pub fn ports(&self) -> Option<usize> {
        self.ports
    }

    pub fn noise(&self) -> &PauliChannel {
        &self.noise
    }

    pub fn q_n(&self) -> f64 {
        self.q_n
    }

    pub fn q_p(&self) -> f64 {
        self.params.q_p
    }

    pub fn q(&self) -> [f64; 3] {
        self.params.q
    }

    pub fn params(&self) -> EffectiveParams {
        self.params
    }

    /// Kraus weights: `(1 + 3 q_N q_p)/4` on the identity and
    /// `(1 - q_N q^(j))/4` on `σ_j`.
    pub fn coefficients(&self) -> [f64; 4] {
        let [q1, q2, q3] = self.params.q;
        [
            (1.0 + 3.0 * self.q_n * self.params.q_p) / 4.0,
            (1.0 - self.q_n * q1) / 4.0,
            (1.0 - self.q_n * q2) / 4.0,
            (1.0 - self.q_n * q3) / 4.0,
        ]
    }

    pub fn as_pauli(&self) -> Result<PauliChannel> {
        PauliChannel::from_weights(self.coefficients())
    }

    pub fn teleportation_fidelity(&self) -> f64 {
        0.5 + 0.5 * self.q_n * self.params.q_p
    }

    pub fn entanglement_fidelity(&self) -> f64 {
        0.25 + 0.75 * self.q_n * self.params.q_p
    }

    /// `E^dep_{1 - q_N}` and `E_{1 - q}` such that their composition is this channel.
    pub fn chain_decomposition(&self) -> Result<(PauliChannel, PauliChannel)> {
        let dep = PauliChannel::depolarizing(1.0 - self.q_n)?;
        let [q1, q2, q3] = self.params.q;
        let env = PauliChannel::from_probabilities(1.0 - q1, 1.0 - q2, 1.0 - q3)
            .map_err(|e| Error::InvalidChannel(format!("environment part: {e}")))?;
        Ok((dep, env))
    }

    /// Apply to a single-qubit state, or to `qubit` of a larger register.
    pub fn apply(&self, rho: &DensityMatrix, qubit: usize) -> Result<DensityMatrix> {
        self.as_pauli()?.apply(rho, qubit)
    }
}

pub fn noisy_pbt_channel(ports: usize, p: &PauliChannel) -> Result<PbtChannel> {
    PbtChannel::new(ports, *p)
}

pub fn apply_noisy_pbt(ch: &PbtChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.qubits() != 1 {
        return Err(Error::Dimension(format!(
            "expected a single qubit, got {}",
            rho.qubits()
        )));
    }
    ch.apply(rho, 0)
}
