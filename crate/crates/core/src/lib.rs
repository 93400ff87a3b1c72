//! Port-based teleportation (PBT) and port-based entanglement teleportation
//! (PBET) with Pauli-noisy resource states.
//!
//! The crate provides exact channel forms, entanglement bounds under
//! identical local Pauli noise, an exact small-`N` protocol simulator, and a
//! Monte Carlo boundary search.

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod pbet;
pub mod pbt;
pub mod protocol;
pub mod search;
pub mod states;

pub use bounds::{critical_m0, entanglement_after_local_noise, m_dep, m_low, m_up, BoundInputs};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use pauli::{PauliChannel, PauliTransfer};
pub use pbet::{apply_pbet, m_bound_pbet, m_dep_pbet, m_free, n_dep, BoundKind, PbetBound, PbetSetting};
pub use pbt::{effective_params, entanglement_fidelity, q_n, teleportation_fidelity, EffectiveParams, PbtChannel};
pub use protocol::{choi_discrepancy, simulate_channel_choi, PortConfig};
pub use search::{boundary_scan, refine_extreme, BoundaryScanResult, Objective, SampleGrid, ScanPoint};
pub use states::{negativity, DensityMatrix, EulerAngles, TwoQubitState};
