//! The three-party summation protocol: role state machines for the quantum
//! party and the two classical parties, the five protocol steps, and the
//! session orchestrator with its three security checks.

pub mod config;
pub mod session;
pub mod steps;
pub mod transcript;
pub mod types;

pub use config::{AbortThresholds, ConfigError, SessionConfig};
pub use session::{run_session, SessionError};
pub use steps::{
    choose_actions, classical_action, compute_summation, derive_keys, honesty_violation,
    step1_prepare, step3_eve_check, step4_honesty_check, step4_measure_and_announce,
    step4_summation_rate_check, step5_select_groups, EveCheckOutcome, GroupView,
    HonestyCheckOutcome, KeyError, Retained,
};
pub use transcript::{
    AnnouncedPayload, CheckResultPayload, Event, EventKind, Role, TapPhase, Transcript,
};
pub use types::{
    announcement_of, Action, Announcement, BitString, CheckReport, HonestyCheckReport,
    KeyMaterial, Particle, ParticleGroup, PrivateInputs, RateCheckReport, SessionOutcome,
    SessionStatus,
};
