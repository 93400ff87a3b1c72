//! Density matrices and the two-qubit states used throughout: Bell states,
//! Schmidt and Euler-rotated pure states, the two boundary states, and the
//! PPT negativity.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, kron, kron_vec, ComplexMatrix, HERMITIAN_TOL, ONE, ZERO};

const TRACE_TOL: f64 = 1e-12;
const ANGLE_SLACK: f64 = 1e-12;

/// Trace-one Hermitian PSD matrix over `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    qubits: usize,
}

/// Two-qubit density matrix.
pub type TwoQubitState = DensityMatrix;

impl DensityMatrix {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let qubits = qubit_count(&matrix)?;
        let trace = matrix.trace();
        if (trace - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}")));
        }
        let herr = matrix.hermiticity_error();
        if herr >= HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herr:e})")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)?[0];
        if min < -HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, qubits })
    }

    /// Skips validation; for images of valid states under channels.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let qubits = matrix.rows().trailing_zeros() as usize;
        Self { matrix, qubits }
    }

    /// Pure state `|v><v|` for a normalized vector.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("state vector has norm^2 {norm}")));
        }
        let matrix = ComplexMatrix::outer(v);
        qubit_count(&matrix)?;
        Ok(Self::from_matrix_unchecked(matrix))
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1 << qubits;
        Self::from_matrix_unchecked(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(linalg::hermitian_eigenvalues(&self.matrix)?[0])
    }

    /// `U ρ U^dagger` for a unitary on the full space.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        Ok(Self::from_matrix_unchecked(self.matrix.conjugate_by(u)?))
    }

    /// `<v|ρ|v>`.
    pub fn expectation(&self, v: &[Complex64]) -> Result<f64> {
        let rv = self.matrix.apply(v)?;
        Ok(v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_matrix_unchecked(kron(&self.matrix, &other.matrix))
    }

    fn require_qubits(&self, n: usize) -> Result<()> {
        if self.qubits != n {
            return Err(Error::Dimension(format!(
                "expected a {n}-qubit state, got {} qubits",
                self.qubits
            )));
        }
        Ok(())
    }
}

fn qubit_count(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() || !m.rows().is_power_of_two() {
        return Err(Error::Dimension(format!(
            "{}x{} is not a multi-qubit operator",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.rows().trailing_zeros() as usize)
}

fn check_theta(theta: f64) -> Result<()> {
    if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&theta) {
        return Err(Error::OutOfRange(format!("theta = {theta} outside [0, pi/2]")));
    }
    Ok(())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// State vector of the Bell state `|Ψ^k>`.
///
/// `Ψ^0 = (|00>+|11>)/√2`, `Ψ^1 = (|01>+|10>)/√2`,
/// `Ψ^2 = (|01>-|10>)/(√2 i)`, `Ψ^3 = (|00>-|11>)/√2`, so that
/// `|Ψ^k> = (σ_k ⊗ σ_0)|Ψ^0>`.
pub fn bell_vector(k: usize) -> Result<[Complex64; 4]> {
    let s = FRAC_1_SQRT_2;
    Ok(match k {
        0 => [re(s), ZERO, ZERO, re(s)],
        1 => [ZERO, re(s), re(s), ZERO],
        2 => [ZERO, Complex64::new(0.0, -s), Complex64::new(0.0, s), ZERO],
        3 => [re(s), ZERO, ZERO, re(-s)],
        _ => return Err(Error::OutOfRange(format!("Bell index {k} not in 0..=3"))),
    })
}

pub fn bell_state(k: usize) -> Result<TwoQubitState> {
    Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(
        &bell_vector(k)?,
    )))
}

/// `q Ψ^0 + (1 - q) I/4`.
pub fn werner_state(q: f64) -> Result<TwoQubitState> {
    if !(-1.0 / 3.0..=1.0).contains(&q) {
        return Err(Error::OutOfRange(format!("Werner parameter {q} outside [-1/3, 1]")));
    }
    let mut m = ComplexMatrix::identity(4).scale_real((1.0 - q) / 4.0);
    m.add_scaled(re(q), bell_state(0)?.matrix());
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// `cos(θ/2)|00> + sin(θ/2)|11>`.
pub fn schmidt_vector(theta: f64) -> Result<[Complex64; 4]> {
    check_theta(theta)?;
    let (s, c) = (theta / 2.0).sin_cos();
    Ok([re(c), ZERO, ZERO, re(s)])
}

pub fn schmidt_state(theta: f64) -> Result<TwoQubitState> {
    Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(
        &schmidt_vector(theta)?,
    )))
}

/// `Rz(a1) Ry(a2) Rz(a3)` with `Rz(a) = diag(e^{-ia/2}, e^{ia/2})` and
/// `Ry(a) = [[cos a/2, -sin a/2], [sin a/2, cos a/2]]`.
pub fn euler_rotation(a1: f64, a2: f64, a3: f64) -> ComplexMatrix {
    let (s, c) = (a2 / 2.0).sin_cos();
    let phase = |a: f64| Complex64::from_polar(1.0, a / 2.0);
    let (p1, p3) = (phase(a1), phase(a3));
    // Rz(a1) Ry(a2) Rz(a3), multiplied out.
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            (p1 * p3).conj() * c,
            -(p1.conj() * p3) * s,
            (p1 * p3.conj()) * s,
            p1 * p3 * c,
        ],
    )
    .expect("2x2")
}

/// Local Euler angles for a two-qubit pure state. The first qubit carries all
/// three Z-Y-Z angles; the second qubit's third angle is fixed to zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Reduced into `[0, 2π)` by [`EulerAngles::new`].
    pub gamma: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl EulerAngles {
    pub fn new(alpha1: f64, alpha2: f64, gamma: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            alpha1,
            alpha2,
            gamma: gamma.rem_euclid(2.0 * PI),
            beta1,
            beta2,
        }
    }

    /// Maps `|00>, |11>` to `|++>, i|-->` up to a global phase, turning the
    /// Schmidt state into the lower-bound boundary state.
    pub fn x_basis_with_phase() -> Self {
        Self::new(0.0, FRAC_PI_2, FRAC_PI_2, 0.0, FRAC_PI_2)
    }

    pub fn first_qubit(&self) -> ComplexMatrix {
        euler_rotation(self.alpha1, self.alpha2, self.gamma)
    }

    pub fn second_qubit(&self) -> ComplexMatrix {
        euler_rotation(self.beta1, self.beta2, 0.0)
    }

    pub fn local_unitary(&self) -> ComplexMatrix {
        kron(&self.first_qubit(), &self.second_qubit())
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.alpha1, self.alpha2, self.gamma, self.beta1, self.beta2]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }
}

/// `(U(α) ⊗ V(β)) |φ_z(θ)>` as a density matrix.
pub fn general_pure_state(theta: f64, angles: &EulerAngles) -> Result<TwoQubitState> {
    let v = angles.local_unitary().apply(&schmidt_vector(theta)?)?;
    Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&v)))
}

/// `cos(θ/2)|++> + i sin(θ/2)|-->`, the state attaining the lower bound
/// under identical phase-flip noise.
pub fn boundary_state_low(theta: f64) -> Result<TwoQubitState> {
    check_theta(theta)?;
    let (s, c) = (theta / 2.0).sin_cos();
    let plus = [re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)];
    let minus = [re(FRAC_1_SQRT_2), re(-FRAC_1_SQRT_2)];
    let pp = kron_vec(&plus, &plus);
    let mm = kron_vec(&minus, &minus);
    let v: Vec<Complex64> = pp
        .iter()
        .zip(&mm)
        .map(|(a, b)| a * c + Complex64::new(0.0, s) * b)
        .collect();
    Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&v)))
}

/// The state attaining the upper bound; identical to [`schmidt_state`].
pub fn boundary_state_up(theta: f64) -> Result<TwoQubitState> {
    schmidt_state(theta)
}

/// PPT negativity `max(0, -2 λ_min(ρ^{T_1}))`.
pub fn negativity(rho: &TwoQubitState) -> Result<f64> {
    rho.require_qubits(2)?;
    let pt = linalg::partial_transpose(rho.matrix(), [2, 2], 0)?;
    let min = linalg::hermitian_eigenvalues(&pt)?[0];
    Ok((-2.0 * min).max(0.0))
}

/// Haar-random unitary via QR of a complex Gaussian matrix (Gram-Schmidt with
/// phase fixing).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        for u in &cols {
            let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= overlap * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random pure state on `qubits` qubits.
pub fn random_pure_state<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1 << qubits;
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&v))
}

/// Random mixed state `G G^† / tr(G G^†)` with `G` a `dim x rank` Ginibre matrix.
pub fn random_mixed_state<R: Rng + ?Sized>(qubits: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1 << qubits;
    let g = ComplexMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m.scale_real(1.0 / tr).symmetrized())
}
