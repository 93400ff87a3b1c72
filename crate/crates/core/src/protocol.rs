//! Exact simulation of `N`-port teleportation for small `N`.
//!
//! Wires are ordered `(B_1..B_N, A_1..A_N, C)`: Bob's ports, Alice's ports,
//! then the input qubit. The square-root measurement acts on `(A_1..A_N, C)`
//! with `C` as the last (least significant) qubit.
//!
//! The induced channel is recovered as a Choi matrix by teleporting half of
//! a maximally entangled pair `(R, C)`. For each outcome `j` the unmeasured
//! ports `B_i, i != j` are traced out before contracting with the POVM
//! element; since the resource is a product over pairs this leaves
//! `ρ_{B_j A_j} ⊗ (⊗_{i≠j} ρ_{A_i}) ⊗ Φ_{RC}`, which keeps the working
//! dimension at `2^(N+3)` instead of `2^(2N+2)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    self, embed, kron_all, partial_trace, permute_qubits, ComplexMatrix, HERMITIAN_TOL, SUPPORT_TOL, ZERO,
};
use crate::pauli::PauliChannel;
use crate::pbt::PbtChannel;
use crate::states::{bell_state, DensityMatrix};

/// Largest supported port count.
pub const MAX_PORTS: usize = 7;

/// Largest port count for which [`ResourceState::to_dense`] is allowed.
pub const MAX_DENSE_PORTS: usize = 5;

/// Tolerance on `Σ_i Π^(i) = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Port count and resource noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortConfig {
    ports: usize,
    noise: PauliChannel,
}

impl PortConfig {
    pub fn new(ports: usize, noise: PauliChannel) -> Result<Self> {
        check_ports(ports)?;
        Ok(Self { ports, noise })
    }

    pub fn noiseless(ports: usize) -> Result<Self> {
        Self::new(ports, PauliChannel::IDENTITY)
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn noise(&self) -> &PauliChannel {
        &self.noise
    }
}

fn check_ports(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PORTS {
        return Err(Error::OutOfRange(format!("port count {n} outside 1..={MAX_PORTS}")));
    }
    Ok(())
}

/// `N` identical pairs `(E_p ⊗ E_p) Ψ⁺_{B_i A_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceState {
    ports: usize,
    pair: DensityMatrix,
}

impl ResourceState {
    pub fn ports(&self) -> usize {
        self.ports
    }

    /// The two-qubit state of one port pair, ordered `(B_i, A_i)`.
    pub fn pair(&self) -> &DensityMatrix {
        &self.pair
    }

    /// Full `2N`-qubit density matrix ordered `(B_1..B_N, A_1..A_N)`.
    pub fn to_dense(&self) -> Result<DensityMatrix> {
        if self.ports > MAX_DENSE_PORTS {
            return Err(Error::OutOfRange(format!(
                "dense resource state limited to {MAX_DENSE_PORTS} ports, got {}",
                self.ports
            )));
        }
        let n = self.ports;
        let pairs = vec![self.pair.matrix(); n];
        // kron gives (B_1, A_1, B_2, A_2, ...); move B_i to slot i and A_i to slot N + i.
        let interleaved = kron_all(pairs);
        let perm: Vec<usize> = (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect();
        Ok(DensityMatrix::from_matrix_unchecked(permute_qubits(
            &interleaved,
            &perm,
        )?))
    }
}

pub fn resource_state(cfg: &PortConfig) -> Result<ResourceState> {
    let pair = cfg.noise.apply_local(&cfg.noise, &bell_state(0)?)?;
    Ok(ResourceState { ports: cfg.ports, pair })
}

/// `τ^(i) = Ψ⁺_{C A_i} ⊗ I_{rest} / 2^(N-1)` on `(A_1..A_N, C)`; `port` is 1-based.
pub fn signal_state(ports: usize, port: usize) -> Result<ComplexMatrix> {
    check_ports(ports)?;
    if port == 0 || port > ports {
        return Err(Error::OutOfRange(format!("port {port} outside 1..={ports}")));
    }
    let bell = bell_state(0)?;
    let op = embed(bell.matrix(), &[ports, port - 1], ports + 1)?;
    Ok(op.scale_real(1.0 / f64::powi(2.0, ports as i32 - 1)))
}

/// `T = Σ_i τ^(i)`.
pub fn signal_sum(ports: usize) -> Result<ComplexMatrix> {
    let mut t = ComplexMatrix::zeros(1 << (ports + 1), 1 << (ports + 1));
    for i in 1..=ports {
        t = &t + &signal_state(ports, i)?;
    }
    Ok(t)
}

/// Square-root measurement `Π^(i) = T^{-1/2} τ^(i) T^{-1/2} + Δ` with the
/// completion `Δ = (I - Σ_j T^{-1/2} τ^(j) T^{-1/2}) / N` shared equally.
pub fn srm_povm(ports: usize) -> Result<Vec<ComplexMatrix>> {
    check_ports(ports)?;
    let t = signal_sum(ports)?;
    let t_inv_sqrt = linalg::psd_inv_sqrt(&t, SUPPORT_TOL)?;
    let dim = t.rows();
    let mut elements = Vec::with_capacity(ports);
    let mut total = ComplexMatrix::zeros(dim, dim);
    for i in 1..=ports {
        let tau = signal_state(ports, i)?;
        let e = (&(&t_inv_sqrt * &tau) * &t_inv_sqrt).symmetrized();
        total = &total + &e;
        elements.push(e);
    }
    let mut delta = ComplexMatrix::identity(dim);
    delta.add_scaled(Complex64::new(-1.0, 0.0), &total);
    let delta = delta.scale_real(1.0 / ports as f64);
    let elements: Vec<ComplexMatrix> = elements.iter().map(|e| e + &delta).collect();

    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in &elements {
        sum = &sum + e;
        let min = linalg::hermitian_eigenvalues(e)?[0];
        if min < -HERMITIAN_TOL {
            return Err(Error::Consistency(format!("POVM element has eigenvalue {min:e}")));
        }
    }
    let err = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if err > COMPLETENESS_TOL {
        return Err(Error::Consistency(format!("POVM completeness violated by {err:e}")));
    }
    Ok(elements)
}

/// Choi matrix `(id_R ⊗ Λ)(Φ⁺_{RC})` of the simulated protocol, ordered
/// `(R, output)`, trace one.
pub fn simulate_channel_choi(cfg: &PortConfig) -> Result<ComplexMatrix> {
    let n = cfg.ports;
    let povm = srm_povm(n)?;
    let resource = resource_state(cfg)?;
    let pair = resource.pair().matrix();
    // Alice's marginal of one pair.
    let alice = partial_trace(pair, &[2, 2], &[1])?;
    let phi = bell_state(0)?;
    let phi = phi.matrix();

    let terms: Vec<ComplexMatrix> = (0..n)
        .into_par_iter()
        .map(|j| outcome_term(&povm[j], j, n, pair, &alice, phi))
        .collect();
    let mut choi_bj_r = ComplexMatrix::zeros(4, 4);
    for t in &terms {
        choi_bj_r = &choi_bj_r + t;
    }
    // Relabel the retained port as the output wire: (B_j, R) -> (R, B_j).
    permute_qubits(&choi_bj_r, &[1, 0])
}

/// `Tr_{A C}[(Π^(j) ⊗ I_{B_j R}) (ρ_{B_j A_j} ⊗ ⊗_{i≠j} ρ_{A_i} ⊗ Φ_{RC})]`,
/// returned on `(B_j, R)`.
///
/// POVM indices `y` run over `(A_1..A_N, C)`; `y_row`/`y_col` are the row and
/// column indices of the joint operator on that register.
fn outcome_term(
    element: &ComplexMatrix,
    j: usize,
    n: usize,
    pair: &ComplexMatrix,
    alice: &ComplexMatrix,
    phi: &ComplexMatrix,
) -> ComplexMatrix {
    let bits = n + 1;
    let dim = 1usize << bits;
    let bit = |y: usize, q: usize| (y >> (bits - 1 - q)) & 1;
    let mut out = ComplexMatrix::zeros(4, 4);

    for y_col in 0..dim {
        for y_row in 0..dim {
            // Trace pairs the POVM's column index with M's row index.
            let pi = element[(y_col, y_row)];
            if pi == ZERO {
                continue;
            }
            let mut rest = Complex64::new(1.0, 0.0);
            for i in (0..n).filter(|&i| i != j) {
                rest *= alice[(bit(y_row, i), bit(y_col, i))];
                if rest == ZERO {
                    break;
                }
            }
            if rest == ZERO {
                continue;
            }
            let (aj_r, aj_c) = (bit(y_row, j), bit(y_col, j));
            let (c_r, c_c) = (bit(y_row, n), bit(y_col, n));
            for b_r in 0..2 {
                for b_c in 0..2 {
                    let p = pair[(2 * b_r + aj_r, 2 * b_c + aj_c)];
                    if p == ZERO {
                        continue;
                    }
                    for r_r in 0..2 {
                        for r_c in 0..2 {
                            let f = phi[(2 * r_r + c_r, 2 * r_c + c_c)];
                            if f == ZERO {
                                continue;
                            }
                            out[(2 * b_r + r_r, 2 * b_c + r_c)] += pi * rest * p * f;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Choi matrix of a single-qubit channel given as a Pauli channel, ordered
/// `(R, output)`.
pub fn pauli_choi(ch: &PauliChannel) -> ComplexMatrix {
    let phi = bell_state(0).expect("Bell 0");
    ch.apply_matrix(phi.matrix(), 1, 2)
}

/// Choi matrix of the analytic noisy-PBT channel.
pub fn analytic_choi(cfg: &PortConfig) -> Result<ComplexMatrix> {
    let ch = PbtChannel::new(cfg.ports, cfg.noise)?;
    Ok(pauli_choi(&ch.as_pauli()?))
}

/// Max-norm distance between simulated and analytic Choi matrices.
pub fn choi_discrepancy(cfg: &PortConfig) -> Result<f64> {
    Ok(simulate_channel_choi(cfg)?.max_abs_diff(&analytic_choi(cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbt::{noisy_resource_state, q_n};

    fn configs() -> Vec<PauliChannel> {
        vec![
            PauliChannel::IDENTITY,
            PauliChannel::depolarizing(0.2).unwrap(),
            PauliChannel::flip(3, 0.3).unwrap(),
            PauliChannel::from_probabilities(0.1, 0.2, 0.3).unwrap(),
        ]
    }

    #[test]
    fn resource_examples() {
        let one = resource_state(&PortConfig::noiseless(1).unwrap())
            .unwrap()
            .to_dense()
            .unwrap();
        assert!(one.matrix().max_abs_diff(bell_state(0).unwrap().matrix()) < 1e-15);

        let two = resource_state(&PortConfig::noiseless(2).unwrap())
            .unwrap()
            .to_dense()
            .unwrap();
        assert!((two.trace() - 1.0).abs() < 1e-14);
        let eig = linalg::hermitian_eigenvalues(two.matrix()).unwrap();
        assert!(eig[..15].iter().all(|x| x.abs() < 1e-12) && (eig[15] - 1.0).abs() < 1e-12);
        // Pair (B_1, A_1) sits on qubits (0, 2).
        let b1a1 = partial_trace(two.matrix(), &[2, 2, 2, 2], &[0, 2]).unwrap();
        assert!(b1a1.max_abs_diff(bell_state(0).unwrap().matrix()) < 1e-14);

        let p = PauliChannel::from_probabilities(0.1, 0.2, 0.3).unwrap();
        let noisy = resource_state(&PortConfig::new(1, p).unwrap()).unwrap();
        let expected = noisy_resource_state(&p).to_density();
        assert!(noisy.pair().matrix().max_abs_diff(expected.matrix()) < 1e-15);

        assert!(resource_state(&PortConfig::noiseless(6).unwrap())
            .unwrap()
            .to_dense()
            .is_err());
        assert!(PortConfig::noiseless(8).is_err());
        assert!(PortConfig::noiseless(0).is_err());
    }

    #[test]
    fn signal_state_examples() {
        let tau = signal_state(1, 1).unwrap();
        assert!(tau.max_abs_diff(bell_state(0).unwrap().matrix()) < 1e-15);
        for n in 1..=4 {
            for i in 1..=n {
                assert!((signal_state(n, i).unwrap().trace().re - 1.0).abs() < 1e-14);
            }
        }
        assert!(signal_state(3, 0).is_err());
        assert!(signal_state(3, 4).is_err());
    }

    #[test]
    fn signal_sum_has_kernel() {
        for n in 2..=4 {
            let eig = linalg::hermitian_eigenvalues(&signal_sum(n).unwrap()).unwrap();
            assert!(eig[0] > -1e-12);
            assert!(eig[0].abs() < 1e-12, "n = {n}: smallest eigenvalue {}", eig[0]);
        }
    }

    #[test]
    fn povm_examples() {
        let one = srm_povm(1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        for n in 2..=4 {
            let povm = srm_povm(n).unwrap();
            let mut sum = ComplexMatrix::zeros(1 << (n + 1), 1 << (n + 1));
            for e in &povm {
                assert!(linalg::hermitian_eigenvalues(e).unwrap()[0] > -1e-10);
                sum = &sum + e;
            }
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(1 << (n + 1))) < 1e-10);
        }
    }

    #[test]
    fn one_port_is_fully_depolarizing() {
        let choi = simulate_channel_choi(&PortConfig::noiseless(1).unwrap()).unwrap();
        assert!(choi.max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-12);
    }

    #[test]
    fn two_ports_give_depolarizing_with_q_n() {
        let choi = simulate_channel_choi(&PortConfig::noiseless(2).unwrap()).unwrap();
        let dep = PauliChannel::depolarizing(1.0 - q_n(2).unwrap()).unwrap();
        assert!(choi.max_abs_diff(&pauli_choi(&dep)) < 1e-10);
    }

    #[test]
    fn simulated_channel_matches_analytic_form() {
        for n in 1..=3 {
            for p in configs() {
                let cfg = PortConfig::new(n, p).unwrap();
                let err = choi_discrepancy(&cfg).unwrap();
                assert!(err < 1e-8, "N = {n}, p = {:?}: {err:e}", p.probabilities());
            }
        }
    }

    #[test]
    fn choi_marginals_are_maximally_mixed() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        for n in 1..=3 {
            let choi = simulate_channel_choi(&PortConfig::new(n, configs()[3]).unwrap()).unwrap();
            assert!(choi.is_hermitian());
            assert!((choi.trace().re - 1.0).abs() < 1e-12);
            assert!(partial_trace(&choi, &[2, 2], &[0]).unwrap().max_abs_diff(&half) < 1e-10);
            assert!(partial_trace(&choi, &[2, 2], &[1]).unwrap().max_abs_diff(&half) < 1e-10);
        }
    }

    #[test]
    fn ideal_channel_choi_is_bell_projector() {
        let ch = PbtChannel::with_q_n(1.0, PauliChannel::IDENTITY).unwrap();
        assert!(pauli_choi(&ch.as_pauli().unwrap()).max_abs_diff(bell_state(0).unwrap().matrix()) < 1e-15);
    }
}
