//! The ordered event log of one session.
//!
//! Every protocol-visible happening — preparations, sends, taps, actions,
//! measurements, announcements, check verdicts, abort/completion — is
//! appended as one event. The log is omniscient (it also records
//! role-private data such as action choices), which is what makes the
//! security analyses testable; the genuinely public announcements are the
//! `announced` events.
//!
//! Serialization is JSON lines: one event per line with fields
//! `{seq_no, step, role, event_type, payload}`. Bit strings serialize as
//! "0"/"1" strings and amplitudes as `[re, im]` pairs rounded to 15
//! significant digits.

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::Channel;
use crate::protocol::types::{
    Action, Announcement, BitString, CheckReport, HonestyCheckReport, RateCheckReport,
    SessionStatus,
};
use crate::quantum::{Basis, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Alice,
    Bob,
    Charlie,
    Eve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TapPhase {
    Forward,
    Return,
}

/// Amplitudes as `[re, im]` pairs, rounded to 15 significant digits.
pub fn serialize_amps(state: &StateVector) -> Vec<[f64; 2]> {
    fn round15(x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            format!("{x:.15e}").parse().unwrap_or(x)
        }
    }
    state
        .amps()
        .iter()
        .map(|a: &Complex64| [round15(a.re), round15(a.im)])
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnnouncedPayload {
    /// Alice publishes which positions the eavesdropping check consumes.
    CheckPositions {
        channel: Channel,
        positions: Vec<usize>,
    },
    /// A classical party discloses its actions and SIFT bits at the checked
    /// positions.
    CheckDisclosure {
        channel: Channel,
        actions: Vec<Action>,
        bits: Vec<Option<u8>>,
    },
    /// Alice's per-group announcements: the Bell result when it is φ⁺ or
    /// ψ⁺, the word "summation" otherwise.
    BellResults { announcements: Vec<Announcement> },
    /// The groups Bob and Charlie picked for the honesty check.
    HonestyGroups { groups: Vec<usize> },
    /// The n groups selected to carry key bits.
    SelectedGroups { groups: Vec<usize> },
    /// A party's public masked-input string (R_A, R_B or R_C).
    PublicShare { bits: BitString },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckResultPayload {
    EveCheck {
        channel: Channel,
        #[serde(flatten)]
        report: CheckReport,
    },
    SummationRate {
        #[serde(flatten)]
        report: RateCheckReport,
    },
    Honesty {
        #[serde(flatten)]
        report: HonestyCheckReport,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event_type", content = "payload", rename_all = "snake_case")]
pub enum EventKind {
    Prepared {
        channel: Channel,
        index: usize,
        state: Vec<[f64; 2]>,
    },
    Sent {
        channel: Channel,
        index: usize,
        from: Role,
        to: Role,
    },
    Tapped {
        channel: Channel,
        index: usize,
        phase: TapPhase,
    },
    ActionTaken {
        channel: Channel,
        index: usize,
        action: Action,
    },
    Measured {
        #[serde(skip_serializing_if = "Option::is_none")]
        channel: Option<Channel>,
        #[serde(skip_serializing_if = "Option::is_none")]
        particle_index: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        group_index: Option<usize>,
        basis: Basis,
        outcome: String,
    },
    Announced(AnnouncedPayload),
    CheckResult(CheckResultPayload),
    Aborted {
        status: SessionStatus,
    },
    Completed {
        sum: BitString,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Event {
    pub seq_no: u64,
    pub step: u8,
    pub role: Role,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// The full event log of one session, in order.
///
/// Event order respects the send discipline: on each channel the next
/// particle leaves Alice only after the previous one has come back.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: u8, role: Role, kind: EventKind) {
        let seq_no = self.events.len() as u64;
        self.events.push(Event {
            seq_no,
            step,
            role,
            kind,
        });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("transcript events serialize"));
            out.push('\n');
        }
        out
    }
}
