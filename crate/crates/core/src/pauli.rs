//! Single-qubit Pauli channels.
//!
//! A Pauli channel is stored as its four Kraus weights `(w0, w1, w2, w3)`
//! summing to one, so that `E(ρ) = Σ_k w_k σ_k ρ σ_k`. The probability
//! convention `p_k = 4 w_k` (with `p0 + p1 + p2 + p3 = 4`) is exposed through
//! [`PauliChannel::from_probabilities`] and [`PauliChannel::probabilities`].

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I, ONE, ZERO};
use crate::states::{DensityMatrix, TwoQubitState};

/// Weights in `[-WEIGHT_TOL, 0)` are clamped to zero; anything lower is rejected.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Pauli matrix `σ_k`, with `σ_0 = I`.
pub fn sigma(k: usize) -> ComplexMatrix {
    let data = match k {
        0 => vec![ONE, ZERO, ZERO, ONE],
        1 => vec![ZERO, ONE, ONE, ZERO],
        2 => vec![ZERO, -I, I, ZERO],
        3 => vec![ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {k} not in 0..=3"),
    };
    ComplexMatrix::from_vec(2, 2, data).expect("2x2")
}

/// `σ_k ρ σ_k` with `σ_k` acting on `qubit` of an `n`-qubit operator.
///
/// Works on basis indices directly: `σ_k|b> = phase_k(b) |b ⊕ flip_k>`.
pub fn conjugate_by_pauli(m: &ComplexMatrix, k: usize, qubit: usize, n: usize) -> ComplexMatrix {
    debug_assert!(qubit < n && m.rows() == 1 << n);
    if k == 0 {
        return m.clone();
    }
    let mask = 1usize << (n - 1 - qubit);
    let flips = k == 1 || k == 2;
    let phase = |b: usize| -> Complex64 {
        let bit = b & mask != 0;
        match k {
            1 => ONE,
            // σ_y|0> = i|1>, σ_y|1> = -i|0>; phase indexed by the output bit.
            2 => {
                if bit {
                    I
                } else {
                    -I
                }
            }
            3 => {
                if bit {
                    -ONE
                } else {
                    ONE
                }
            }
            _ => unreachable!(),
        }
    };
    let dim = m.rows();
    ComplexMatrix::from_fn(dim, dim, |r, c| {
        let (sr, sc) = if flips { (r ^ mask, c ^ mask) } else { (r, c) };
        phase(r) * m[(sr, sc)] * phase(c).conj()
    })
}

/// Kraus-weight representation of a Pauli channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannel {
    weights: [f64; 4],
}

/// Eigenvalues of the Pauli transfer matrix on `σ1, σ2, σ3`.
///
/// In the probability convention these are `q23, q31, q12` with
/// `q_ij = 1 - (p_i + p_j)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTransfer(pub [f64; 3]);

impl PauliTransfer {
    pub fn lambda23(&self) -> f64 {
        self.0[0]
    }

    pub fn lambda31(&self) -> f64 {
        self.0[1]
    }

    pub fn lambda12(&self) -> f64 {
        self.0[2]
    }

    /// Inverse Walsh-Hadamard transform back to Kraus weights (unvalidated).
    pub fn weights(&self) -> [f64; 4] {
        let [l1, l2, l3] = self.0;
        [
            (1.0 + l1 + l2 + l3) / 4.0,
            (1.0 + l1 - l2 - l3) / 4.0,
            (1.0 - l1 + l2 - l3) / 4.0,
            (1.0 - l1 - l2 + l3) / 4.0,
        ]
    }

    pub fn to_channel(&self) -> Result<PauliChannel> {
        PauliChannel::from_weights(self.weights())
    }
}

fn clean_weight(w: f64, label: usize) -> Result<f64> {
    if !w.is_finite() || w < -WEIGHT_TOL {
        return Err(Error::InvalidChannel(format!("weight w{label} = {w:e} is negative")));
    }
    Ok(w.max(0.0))
}

impl PauliChannel {
    pub const IDENTITY: PauliChannel = PauliChannel {
        weights: [1.0, 0.0, 0.0, 0.0],
    };

    /// Kraus weights `(w0, w1, w2, w3)`; must be nonnegative and sum to one.
    pub fn from_weights(weights: [f64; 4]) -> Result<Self> {
        let mut w = [0.0; 4];
        for (k, (&x, slot)) in weights.iter().zip(w.iter_mut()).enumerate() {
            *slot = clean_weight(x, k)?;
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidChannel(format!("weights sum to {sum}")));
        }
        Ok(Self { weights: w })
    }

    /// Channel probabilities `(p1, p2, p3)` with `σ_i` applied at weight `p_i/4`.
    pub fn from_probabilities(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let total = p1 + p2 + p3;
        if total > 4.0 + 4.0 * WEIGHT_TOL {
            return Err(Error::InvalidChannel(format!("p1 + p2 + p3 = {total} exceeds 4")));
        }
        Self::from_weights([1.0 - total / 4.0, p1 / 4.0, p2 / 4.0, p3 / 4.0])
    }

    /// `(p, p, p)`: maps `ρ` to `(1 - p) ρ + p I/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=4.0 / 3.0).contains(&p) {
            return Err(Error::OutOfRange(format!(
                "depolarizing parameter {p} outside [0, 4/3]"
            )));
        }
        Self::from_probabilities(p, p, p)
    }

    /// Bit flip (axis 1), bit-phase flip (axis 2) or phase flip (axis 3):
    /// probability `3p` on the chosen axis, Kraus weights `1 - 3p/4` and `3p/4`.
    pub fn flip(axis: usize, p: f64) -> Result<Self> {
        if !(1..=3).contains(&axis) {
            return Err(Error::OutOfRange(format!("flip axis {axis} not in 1..=3")));
        }
        if !(0.0..=4.0 / 3.0).contains(&p) {
            return Err(Error::OutOfRange(format!("flip parameter {p} outside [0, 4/3]")));
        }
        let mut probs = [0.0; 3];
        probs[axis - 1] = 3.0 * p;
        Self::from_probabilities(probs[0], probs[1], probs[2])
    }

    /// Uniform over the weight simplex, then mixed with the identity so the
    /// total error probability `1 - w0` is at most `max_error`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_error: f64) -> Self {
        let e: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln());
        let total: f64 = e.iter().sum();
        let scale = max_error.clamp(0.0, 1.0);
        let w1 = scale * e[1] / total;
        let w2 = scale * e[2] / total;
        let w3 = scale * e[3] / total;
        Self {
            weights: [1.0 - w1 - w2 - w3, w1, w2, w3],
        }
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    /// `(p1, p2, p3)`.
    pub fn probabilities(&self) -> [f64; 3] {
        [4.0 * self.weights[1], 4.0 * self.weights[2], 4.0 * self.weights[3]]
    }

    /// `p0 = 4 - p1 - p2 - p3`.
    pub fn p0(&self) -> f64 {
        4.0 * self.weights[0]
    }

    /// Average channel probability `Ω = (p1 + p2 + p3)/3`.
    pub fn omega(&self) -> f64 {
        self.probabilities().iter().sum::<f64>() / 3.0
    }

    pub fn eigenvalues(&self) -> PauliTransfer {
        let [w0, w1, w2, w3] = self.weights;
        PauliTransfer([w0 + w1 - w2 - w3, w0 - w1 + w2 - w3, w0 - w1 - w2 + w3])
    }

    /// Pauli transfer matrix `diag(1, q23, q31, q12)` in the `σ` basis.
    pub fn superoperator(&self) -> ComplexMatrix {
        let [l1, l2, l3] = self.eigenvalues().0;
        ComplexMatrix::diagonal(&[1.0, l1, l2, l3])
    }

    /// Apply to `qubit` of an `n`-qubit state.
    pub fn apply(&self, rho: &DensityMatrix, qubit: usize) -> Result<DensityMatrix> {
        let n = rho.qubits();
        if qubit >= n {
            return Err(Error::OutOfRange(format!("qubit {qubit} out of range for {n} qubits")));
        }
        Ok(DensityMatrix::from_matrix_unchecked(self.apply_matrix(
            rho.matrix(),
            qubit,
            n,
        )))
    }

    /// Apply to an arbitrary operator (no state validation).
    pub fn apply_matrix(&self, m: &ComplexMatrix, qubit: usize, n: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        for (k, &w) in self.weights.iter().enumerate() {
            if w != 0.0 {
                out.add_scaled(Complex64::new(w, 0.0), &conjugate_by_pauli(m, k, qubit, n));
            }
        }
        out
    }

    /// `self ∘ other`. Pauli channels commute, so the order does not matter.
    pub fn compose(&self, other: &PauliChannel) -> PauliChannel {
        let a = self.weights;
        let b = other.weights;
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[pauli_product_index(i, j)] += a[i] * b[j];
            }
        }
        PauliChannel { weights: out }
    }

    /// `self` composed with itself `times` times (identity for zero).
    pub fn power(&self, times: usize) -> PauliChannel {
        (0..times).fold(PauliChannel::IDENTITY, |acc, _| acc.compose(self))
    }

    /// The channel `ε` with `ε^L = self`, built from principal real `L`-th
    /// roots of the transfer eigenvalues.
    pub fn root(&self, l: usize) -> Result<PauliChannel> {
        if l == 0 {
            return Err(Error::OutOfRange("root order must be positive".into()));
        }
        let lambdas = self.eigenvalues().0;
        if let Some(bad) = lambdas.iter().find(|&&x| x <= 0.0) {
            return Err(Error::InvalidChannel(format!(
                "transfer eigenvalue {bad} is not positive; no real root"
            )));
        }
        let inv = 1.0 / l as f64;
        PauliTransfer(lambdas.map(|x| x.powf(inv))).to_channel()
    }

    /// The channel `r` with `r ∘ divisor = self`, by eigenvalue division.
    pub fn quotient(&self, divisor: &PauliChannel) -> Result<PauliChannel> {
        let num = self.eigenvalues().0;
        let den = divisor.eigenvalues().0;
        if den.iter().any(|x| x.abs() < 1e-14) {
            return Err(Error::Singular(format!("divisor has transfer eigenvalues {den:?}")));
        }
        PauliTransfer([num[0] / den[0], num[1] / den[1], num[2] / den[2]]).to_channel()
    }

    /// Same quotient through the linear system `r = 4 Q^{-1}(p - q)` in the
    /// probability convention.
    pub fn quotient_via_q_matrix(&self, divisor: &PauliChannel) -> Result<PauliChannel> {
        let [q1, q2, q3] = divisor.probabilities();
        let det_factor = (q1 + q2 - 2.0) * (q2 + q3 - 2.0) * (q3 + q1 - 2.0);
        if det_factor.abs() < 1e-14 {
            return Err(Error::Singular(format!(
                "Q matrix is singular for divisor probabilities ({q1}, {q2}, {q3})"
            )));
        }
        let q0 = 4.0 - (q1 + q2 + q3);
        let q = [
            [q0 - q1, -(q1 - q3), -(q1 - q2)],
            [-(q2 - q3), q0 - q2, -(-q1 + q2)],
            [-(-q2 + q3), -(-q1 + q3), q0 - q3],
        ];
        let p = self.probabilities();
        let rhs = [4.0 * (p[0] - q1), 4.0 * (p[1] - q2), 4.0 * (p[2] - q3)];
        let r = solve3(q, rhs)?;
        PauliChannel::from_probabilities(r[0], r[1], r[2])
    }

    /// Apply `self` on qubit 0 and `other` on qubit 1 of a two-qubit state.
    pub fn apply_local(&self, other: &PauliChannel, rho: &TwoQubitState) -> Result<TwoQubitState> {
        if rho.qubits() != 2 {
            return Err(Error::Dimension(format!("expected 2 qubits, got {}", rho.qubits())));
        }
        let first = self.apply_matrix(rho.matrix(), 0, 2);
        Ok(DensityMatrix::from_matrix_unchecked(other.apply_matrix(&first, 1, 2)))
    }

    /// Euclidean distance between transfer eigenvalue triples.
    pub fn transfer_distance(&self, other: &PauliChannel) -> f64 {
        self.superoperator().max_abs_diff(&other.superoperator())
    }
}

/// Index `k` with `σ_i σ_j ∝ σ_k`.
fn pauli_product_index(i: usize, j: usize) -> usize {
    // Encode X=1 -> 01, Y=2 -> 11, Z=3 -> 10 (x-bit, z-bit); product is xor.
    const CODE: [usize; 4] = [0b00, 0b01, 0b11, 0b10];
    const DECODE: [usize; 4] = [0, 1, 3, 2];
    DECODE[CODE[i] ^ CODE[j]]
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Result<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&a);
    if d.abs() < 1e-14 {
        return Err(Error::Singular(format!("determinant {d:e}")));
    }
    // Cramer's rule.
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *slot = det(&m) / d;
    }
    Ok(out)
}
