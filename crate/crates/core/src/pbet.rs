//! Port-based entanglement teleportation (PBET): each qubit of a two-qubit
//! state goes through its own, identical, noisy PBT channel.

use crate::bounds::{m_low, m_up};
use crate::error::{Error, Result};
use crate::pauli::PauliChannel;
use crate::pbt::{effective_params, q_n, PbtChannel};
use crate::states::TwoQubitState;

#[derive(Debug, Clone, PartialEq)]
pub struct PbetSetting {
    pub channel: PbtChannel,
    pub input: TwoQubitState,
}

impl PbetSetting {
    pub fn new(ports: usize, noise: PauliChannel, input: TwoQubitState) -> Result<Self> {
        Ok(Self {
            channel: PbtChannel::new(ports, noise)?,
            input,
        })
    }
}

/// `(Λ_p ⊗ Λ_p) ρ`.
pub fn apply_pbet(s: &PbetSetting) -> Result<TwoQubitState> {
    let ch = s.channel.as_pauli()?;
    ch.apply_local(&ch, &s.input)
}

fn check_m0(m0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&m0) {
        return Err(Error::OutOfRange(format!("m0 = {m0} outside [0, 1]")));
    }
    Ok(())
}

/// `max[0, -1/2 + q² (m0 + 1/2)]` for a given depolarizing survival `q`.
fn depolarized_negativity(q: f64, m0: f64) -> f64 {
    (-0.5 + q * q * (m0 + 0.5)).max(0.0)
}

/// Teleported negativity with an ideal resource, in terms of `q_N`.
pub fn m_free_with_q_n(q_n: f64, m0: f64) -> f64 {
    depolarized_negativity(q_n, m0)
}

pub fn m_free(ports: usize, m0: f64) -> Result<f64> {
    check_m0(m0)?;
    Ok(m_free_with_q_n(q_n(ports)?, m0))
}

/// Negativity of a Bell pair after depolarizing noise `p` on both qubits.
pub fn n_dep(p: f64) -> Result<f64> {
    if !(0.0..=4.0 / 3.0).contains(&p) {
        return Err(Error::OutOfRange(format!(
            "depolarizing parameter {p} outside [0, 4/3]"
        )));
    }
    Ok(((3.0 * (1.0 - p).powi(2) - 1.0) / 2.0).max(0.0))
}

/// Teleported negativity with a depolarized resource.
pub fn m_dep_pbet(ports: usize, p: f64, m0: f64) -> Result<f64> {
    check_m0(m0)?;
    let q = q_n(ports)?;
    let factor = (1.0 + 2.0 * n_dep(p)?) / 3.0;
    Ok((-0.5 + q * q * factor * factor * (m0 + 0.5)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Low,
    Up,
}

/// A bound value and whether `q_p` lies where the phase-flip boundary
/// channel is representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbetBound {
    pub value: f64,
    pub validated: bool,
}

/// `max[0, M_env q_N² - (1 - q_N²)/2]` with `M_env` the noise bound at
/// `Ω = 1 - q_p`.
pub fn m_bound_pbet_with_q_n(q_n: f64, q_p: f64, m0: f64, which: BoundKind) -> PbetBound {
    let omega = 1.0 - q_p;
    let env = match which {
        BoundKind::Low => m_low(m0, omega),
        BoundKind::Up => m_up(m0, omega),
    };
    let q2 = q_n * q_n;
    PbetBound {
        value: (env * q2 - (1.0 - q2) / 2.0).max(0.0),
        validated: phase_flip_representable(q_p),
    }
}

pub fn m_bound_pbet(ports: usize, q_p: f64, m0: f64, which: BoundKind) -> Result<PbetBound> {
    check_m0(m0)?;
    if !(0.0..=1.0).contains(&q_p) {
        return Err(Error::OutOfRange(format!("q_p = {q_p} outside [0, 1]")));
    }
    Ok(m_bound_pbet_with_q_n(q_n(ports)?, q_p, m0, which))
}

/// [`m_bound_pbet`] with `q_p` derived from the resource noise.
pub fn m_bound_pbet_for_noise(ports: usize, noise: &PauliChannel, m0: f64, which: BoundKind) -> Result<PbetBound> {
    let q_p = effective_params(noise)?.q_p;
    m_bound_pbet(ports, q_p.clamp(0.0, 1.0), m0, which)
}

/// The environment channel `E_{1-q}` can take phase-flip shape iff `2/3 <= q_p <= 1`.
pub fn phase_flip_representable(q_p: f64) -> bool {
    (2.0 / 3.0..=1.0).contains(&q_p)
}

/// Large-`N`, small-`Ω` approximations `(low, up)` using `q_p ≈ 1 - 2Ω`.
pub fn asymptotic_bounds(ports: usize, omega: f64, m0: f64) -> (f64, f64) {
    let port_loss = (2.0 * m0 + 1.0) / ports as f64;
    let low = m0 - 6.0 * omega * (m0 + 1.0) / 2.0 - port_loss;
    let up = m0 - 6.0 * omega * m0 - port_loss;
    (low.max(0.0), up.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::critical_m0;
    use crate::pauli::PauliChannel;
    use crate::pbt::q_n;
    use crate::states::{
        bell_state, boundary_state_low, boundary_state_up, general_pure_state, negativity, schmidt_state, EulerAngles,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_angles(rng: &mut ChaCha8Rng) -> EulerAngles {
        EulerAngles::new(
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..PI),
        )
    }

    #[test]
    fn perfect_channel_keeps_state() {
        let rho = general_pure_state(0.6, &EulerAngles::new(0.1, 0.2, 0.3, 0.4, 0.5)).unwrap();
        let s = PbetSetting {
            channel: PbtChannel::with_q_n(1.0, PauliChannel::IDENTITY).unwrap(),
            input: rho.clone(),
        };
        assert!(apply_pbet(&s).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn noiseless_teleportation_matches_free_formula() {
        for n in [2, 3, 10, 100] {
            let q = q_n(n).unwrap();
            let bell = PbetSetting::new(n, PauliChannel::IDENTITY, bell_state(0).unwrap()).unwrap();
            let m = negativity(&apply_pbet(&bell).unwrap()).unwrap();
            assert!((m - ((3.0 * q * q - 1.0) / 2.0).max(0.0)).abs() < 1e-12);
            assert!((m - m_free(n, 1.0).unwrap()).abs() < 1e-12);
            for &theta in &[0.2, 0.7, 1.3] {
                let s = PbetSetting::new(n, PauliChannel::IDENTITY, schmidt_state(theta).unwrap()).unwrap();
                let m = negativity(&apply_pbet(&s).unwrap()).unwrap();
                assert!((m - m_free(n, theta.sin()).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn free_formula_limits() {
        assert_eq!(m_free_with_q_n(1.0, 0.37), 0.37);
        for n in [1, 2, 50] {
            assert_eq!(m_free(n, 0.0).unwrap(), 0.0);
        }
        assert!(m_free(2, 1.5).is_err());
    }

    #[test]
    fn n_dep_examples() {
        assert_eq!(n_dep(0.0).unwrap(), 1.0);
        assert!(n_dep(1.0 - (1.0f64 / 3.0).sqrt()).unwrap().abs() < 1e-15);
        for i in 0..20 {
            let p = i as f64 * 0.05;
            let d = PauliChannel::depolarizing(p).unwrap();
            let direct = negativity(&d.apply_local(&d, &bell_state(0).unwrap()).unwrap()).unwrap();
            assert!((direct - n_dep(p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarized_pbet_matches_ppt() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for n in [2, 5, 40] {
            assert_eq!(m_dep_pbet(n, 0.0, 0.6).unwrap(), m_free(n, 0.6).unwrap());
            for i in 0..10 {
                for k in 0..10 {
                    let p = 0.6 * i as f64 / 9.0;
                    let theta = (PI / 2.0) * k as f64 / 9.0;
                    let rho = general_pure_state(theta, &random_angles(&mut rng)).unwrap();
                    let s = PbetSetting::new(n, PauliChannel::depolarizing(p).unwrap(), rho).unwrap();
                    let direct = negativity(&apply_pbet(&s).unwrap()).unwrap();
                    let formula = m_dep_pbet(n, p, theta.sin()).unwrap();
                    assert!((direct - formula).abs() < 1e-12, "n {n} p {p} theta {theta}");
                }
            }
        }
    }

    #[test]
    fn n_dep_relates_to_q_p_for_entangled_resource() {
        for i in 0..40 {
            let p = 0.42 * i as f64 / 39.0;
            let q_p = effective_params(&PauliChannel::depolarizing(p).unwrap()).unwrap().q_p;
            assert!(((1.0 + 2.0 * n_dep(p).unwrap()) / 3.0 - q_p).abs() < 1e-14);
        }
    }

    #[test]
    fn bound_reduces_to_free_without_environment_noise() {
        for n in [2, 7, 100] {
            for &m0 in &[0.1, 0.5, 1.0] {
                for which in [BoundKind::Low, BoundKind::Up] {
                    let b = m_bound_pbet(n, 1.0, m0, which).unwrap();
                    assert!((b.value - m_free(n, m0).unwrap()).abs() < 1e-15);
                    assert!(b.validated);
                }
            }
        }
    }

    #[test]
    fn boundary_states_attain_pbet_bounds() {
        for n in [2, 5, 20] {
            let q = q_n(n).unwrap();
            for &q_p in &[0.7, 0.9, 1.0] {
                let env = PauliChannel::flip(3, 1.0 - q_p).unwrap();
                let chain = PauliChannel::depolarizing(1.0 - q).unwrap().compose(&env);
                for &theta in &[0.4, 0.8, 1.2] {
                    let low =
                        negativity(&chain.apply_local(&chain, &boundary_state_low(theta).unwrap()).unwrap()).unwrap();
                    let up =
                        negativity(&chain.apply_local(&chain, &boundary_state_up(theta).unwrap()).unwrap()).unwrap();
                    let m0 = theta.sin();
                    assert!((low - m_bound_pbet(n, q_p, m0, BoundKind::Low).unwrap().value).abs() < 1e-10);
                    assert!((up - m_bound_pbet(n, q_p, m0, BoundKind::Up).unwrap().value).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn random_pbet_outputs_are_sandwiched() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        while checked < 500 {
            let n = rng.random_range(2..60);
            let max_error = rng.random_range(0.0..0.3);
            let noise = PauliChannel::random(&mut rng, max_error);
            let q_p = effective_params(&noise).unwrap().q_p;
            if !phase_flip_representable(q_p) {
                continue;
            }
            let theta = rng.random_range(0.0..PI / 2.0);
            let rho = general_pure_state(theta, &random_angles(&mut rng)).unwrap();
            let m = negativity(&apply_pbet(&PbetSetting::new(n, noise, rho).unwrap()).unwrap()).unwrap();
            let lo = m_bound_pbet(n, q_p, theta.sin(), BoundKind::Low).unwrap().value;
            let hi = m_bound_pbet(n, q_p, theta.sin(), BoundKind::Up).unwrap().value;
            assert!(lo - 1e-9 <= m && m <= hi + 1e-9, "n {n} q_p {q_p}: {lo} <= {m} <= {hi}");
            checked += 1;
        }
    }

    #[test]
    fn bounds_are_ordered_and_monotone() {
        for i in 0..=20 {
            let m0 = i as f64 / 20.0;
            for j in 0..=20 {
                let q_p = 2.0 / 3.0 + (1.0 / 3.0) * j as f64 / 20.0;
                let mut prev = (0.0, 0.0, 0.0, 0.0);
                for n in [2, 3, 5, 10, 50, 200] {
                    let lo = m_bound_pbet(n, q_p, m0, BoundKind::Low).unwrap().value;
                    let hi = m_bound_pbet(n, q_p, m0, BoundKind::Up).unwrap().value;
                    let free = m_free(n, m0).unwrap();
                    let dep = m_dep_pbet(n, 1.0 - q_p.sqrt(), m0).unwrap();
                    assert!(lo <= hi + 1e-15);
                    assert!(lo >= prev.0 - 1e-15 && hi >= prev.1 - 1e-15);
                    assert!(free >= prev.2 - 1e-15 && dep >= prev.3 - 1e-15);
                    prev = (lo, hi, free, dep);
                }
            }
        }
        for n in [2, 10] {
            let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
            for w in grid.windows(2) {
                assert!(m_free(n, w[1]).unwrap() >= m_free(n, w[0]).unwrap());
                assert!(m_dep_pbet(n, 0.1, w[1]).unwrap() >= m_dep_pbet(n, 0.1, w[0]).unwrap());
                for which in [BoundKind::Low, BoundKind::Up] {
                    assert!(
                        m_bound_pbet(n, 0.8, w[1], which).unwrap().value
                            >= m_bound_pbet(n, 0.8, w[0], which).unwrap().value
                    );
                }
            }
        }
    }

    #[test]
    fn representability_range() {
        assert!(phase_flip_representable(1.0));
        assert!(!phase_flip_representable(0.5));
        assert!(phase_flip_representable(2.0 / 3.0));
        assert!(!m_bound_pbet(4, 0.5, 0.5, BoundKind::Low).unwrap().validated);
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(asymptotic_bounds(usize::MAX, 0.0, 0.7), (0.7, 0.7));
        let (lo, up) = asymptotic_bounds(1000, 0.01, 1.0);
        assert!((lo - up).abs() < 1e-15);
        assert!((1.0 - up - 6.0 * 0.01 - 3.0 / 1000.0).abs() < 1e-15);

        let (n, omega, m0) = (1000, 0.005, 0.8);
        let (lo, up) = asymptotic_bounds(n, omega, m0);
        let q_p = 1.0 - 2.0 * omega;
        let exact_lo = m_bound_pbet(n, q_p, m0, BoundKind::Low).unwrap().value;
        let exact_up = m_bound_pbet(n, q_p, m0, BoundKind::Up).unwrap().value;
        assert!((lo - exact_lo).abs() < 5e-3 && (up - exact_up).abs() < 5e-3);
    }

    #[test]
    fn critical_value_carries_over_to_environment_channel() {
        // At the critical value the environment-only lower bound vanishes.
        let q_p = 0.8;
        let c = critical_m0(1.0 - q_p).unwrap();
        assert!(m_bound_pbet_with_q_n(1.0, q_p, c, BoundKind::Low).value.abs() < 1e-12);
    }
}
