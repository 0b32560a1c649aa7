//! Simulator and security-analysis toolkit for a three-party semiquantum
//! summation protocol.
//!
//! One quantum party (Alice) and two classical parties (Bob and Charlie)
//! compute the bitwise XOR of their private bit strings using single qubits
//! as the only quantum resource. This crate executes honest protocol
//! sessions end to end, implements every analyzed attack as a pluggable
//! channel tap or dishonest-role strategy, and verifies the analytic
//! detection probabilities and qubit-efficiency figures by both exact branch
//! enumeration and Monte Carlo sampling.
//!
//! Module map:
//!
//! * [`quantum`] — exact pure-state simulator for 1- and 2-qubit registers.
//! * [`channel`] — channel model and the eavesdropper tap interface.
//! * [`protocol`] — role state machines, the five protocol steps, and the
//!   session orchestrator.
//! * [`adversary`] — the attack catalogue.
//! * [`analysis`] — exact branch-enumeration oracle, Monte Carlo estimators,
//!   and qubit-efficiency formulas.
//! * [`report`] — serializable report shapes shared by the CLI and bindings.

pub mod adversary;
pub mod analysis;
pub mod channel;
pub mod protocol;
pub mod quantum;
pub mod report;
pub mod rng;

pub use adversary::{Adversary, AttackKind};
pub use channel::{Channel, ChannelTap, Wire};
pub use protocol::{
    run_session, PrivateInputs, SessionConfig, SessionOutcome, SessionStatus,
};
pub use quantum::{Basis, BellOutcome, StateVector};
pub use rng::RandomStream;
