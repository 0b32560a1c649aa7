//! Quantum channels between Alice and the classical parties, and the tap
//! interface an outside eavesdropper plugs into.

use serde::{Deserialize, Serialize};

use crate::quantum::StateVector;

/// The two round-trip channels: Alice ↔ Bob and Alice ↔ Charlie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    B,
    C,
}

/// The quantum system in flight on one leg of a channel.
///
/// Normally this is the bare particle. A tap that entangles an ancilla with
/// the particle promotes the wire to a joint two-qubit register whose first
/// qubit is the flying particle; the second qubit stays with the tap and is
/// detached again on the return leg.
#[derive(Clone, Debug)]
pub enum Wire {
    /// A single qubit.
    Bare(StateVector),
    /// Particle ⊗ tap ancilla.
    WithAncilla(StateVector),
}

impl Wire {
    pub fn state(&self) -> &StateVector {
        match self {
            Wire::Bare(s) | Wire::WithAncilla(s) => s,
        }
    }

    pub fn into_bare(self) -> Option<StateVector> {
        match self {
            Wire::Bare(s) => Some(s),
            Wire::WithAncilla(_) => None,
        }
    }
}

/// An outside eavesdropper sitting on the quantum channels.
///
/// A tap sees nothing but the quantum systems crossing the channel: it is
/// handed the wire on each leg and returns the wire it forwards. It has no
/// access to any role-private classical data (action choices, SIFT records,
/// key material) — the interface simply never carries them.
///
/// `on_forward` runs on the Alice → party leg, `on_return` on the party →
/// Alice leg. The wire handed back by `on_return` must be bare: the particle
/// delivered to Alice is a single qubit again.
pub trait ChannelTap {
    /// Which channels this tap sits on. Hooks are only invoked for targeted
    /// channels.
    fn targets(&self, channel: Channel) -> bool {
        channel == Channel::B
    }

    fn on_forward(&mut self, channel: Channel, wire: Wire) -> Wire;

    fn on_return(&mut self, channel: Channel, wire: Wire) -> Wire;

    /// Final ancilla states accumulated by an entangling tap, in particle
    /// order. Non-entangling taps have none.
    fn ancillas(&self) -> &[StateVector] {
        &[]
    }
}
