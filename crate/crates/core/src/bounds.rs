//! Closed-form entanglement bounds for a pure two-qubit state sent through
//! the same Pauli channel on both qubits.
//!
//! All bounds are functions of the initial negativity `m0` and the average
//! channel probability `omega`. The absolute-value forms keep them defined
//! for `omega > 2/3`, but they are only validated on `[0, 2/3]`.

use crate::error::{Error, Result};
use crate::pauli::PauliChannel;
use crate::states::{negativity, TwoQubitState};

/// Initial negativity and average channel probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub m0: f64,
    pub omega: f64,
}

impl BoundInputs {
    pub fn new(m0: f64, omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m0) {
            return Err(Error::OutOfRange(format!("m0 = {m0} outside [0, 1]")));
        }
        if !(0.0..=4.0 / 3.0).contains(&omega) {
            return Err(Error::OutOfRange(format!("omega = {omega} outside [0, 4/3]")));
        }
        Ok(Self { m0, omega })
    }

    pub fn low(&self) -> f64 {
        m_low(self.m0, self.omega)
    }

    pub fn up(&self) -> f64 {
        m_up(self.m0, self.omega)
    }

    pub fn dep(&self) -> f64 {
        m_dep(self.m0, self.omega)
    }
}

/// `|1 - 3Ω/2|`, the transfer eigenvalue of a flip channel on the flipped axes.
fn flip_contraction(omega: f64) -> f64 {
    (1.0 - 1.5 * omega).abs()
}

/// Smallest initial negativity for which every state stays entangled.
pub fn critical_m0(omega: f64) -> Result<f64> {
    let x = flip_contraction(omega);
    if x == 0.0 {
        return Err(Error::OutOfRange("critical value diverges at omega = 2/3".into()));
    }
    Ok(-0.5 * (x - x.recip()))
}

pub fn m_low(m0: f64, omega: f64) -> f64 {
    let x = flip_contraction(omega);
    (m0 * x + 0.5 * x * x - 0.5).max(0.0)
}

pub fn m_up(m0: f64, omega: f64) -> f64 {
    let x = flip_contraction(omega);
    (m0 * x * x).max(0.0)
}

/// Negativity after identical depolarizing noise on both qubits.
pub fn m_dep(m0: f64, omega: f64) -> f64 {
    (m0 * (1.0 - omega).powi(2) - omega * (1.0 - omega / 2.0)).max(0.0)
}

/// Negativity of `(E_p ⊗ E_p) ρ`.
pub fn entanglement_after_local_noise(rho: &TwoQubitState, p: &PauliChannel) -> Result<f64> {
    negativity(&p.apply_local(p, rho)?)
}
