//! The attack catalogue: every analyzed eavesdropping and participant
//! attack, pluggable into `run_session`.
//!
//! Outside attacks are [`ChannelTap`] implementations sitting on the B
//! channel. Participant attacks are dishonest-role strategies: a cheating
//! Alice changes how she prepares, measures or announces; a cheating Bob
//! probes the C channel at the positions where he himself took SIFT.

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ChannelTap, Wire};
use crate::quantum::{self, Basis, Outcome, StateVector};
use crate::rng::{RandomStream, StreamRole};

/// Identifies one attack; the kebab-case serialization doubles as the CLI
/// token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    MeasureResend,
    InterceptResend,
    DoubleCnot,
    AliceI,
    AliceIiSilent,
    AliceIiRandom,
    BobProbe,
}

impl AttackKind {
    pub const ALL: [AttackKind; 7] = [
        AttackKind::MeasureResend,
        AttackKind::InterceptResend,
        AttackKind::DoubleCnot,
        AttackKind::AliceI,
        AttackKind::AliceIiSilent,
        AttackKind::AliceIiRandom,
        AttackKind::BobProbe,
    ];

    pub fn token(self) -> &'static str {
        match self {
            AttackKind::MeasureResend => "measure-resend",
            AttackKind::InterceptResend => "intercept-resend",
            AttackKind::DoubleCnot => "double-cnot",
            AttackKind::AliceI => "alice-i",
            AttackKind::AliceIiSilent => "alice-ii-silent",
            AttackKind::AliceIiRandom => "alice-ii-random",
            AttackKind::BobProbe => "bob-probe",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.token() == token)
    }

    /// Instantiate this attack for a session, drawing any attack randomness
    /// from the session's adversary stream.
    pub fn for_session(self, session_seed: u64) -> Adversary {
        let rng = RandomStream::for_role(session_seed, StreamRole::Adversary);
        match self {
            AttackKind::MeasureResend => Adversary::Eavesdropper(Box::new(measure_resend_tap(rng))),
            AttackKind::InterceptResend => {
                Adversary::Eavesdropper(Box::new(intercept_resend_tap(rng)))
            }
            AttackKind::DoubleCnot => Adversary::Eavesdropper(Box::new(double_cnot_tap())),
            AttackKind::AliceI => Adversary::DishonestAlice(alice_attack_i()),
            AttackKind::AliceIiSilent => Adversary::DishonestAlice(alice_attack_ii(true)),
            AttackKind::AliceIiRandom => Adversary::DishonestAlice(alice_attack_ii(false)),
            AttackKind::BobProbe => Adversary::DishonestBob(bob_probe(rng)),
        }
    }
}

/// A dishonest-Alice strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AliceAttack {
    /// Prepare every particle in a uniformly random computational-basis
    /// state instead of |+⟩ (so that SIFT-untouched particles reveal the
    /// parties' key bits to her), but measure and announce truthfully.
    PrepareComputational,
    /// Prepare honestly, but replace the Bell measurement by computational
    /// measurements of both qubits and announce fakes: φ⁺ for equal bits,
    /// ψ⁺ for unequal ones. The silent variant never says "summation"; the
    /// randomized variant says it with probability 1/2 instead of the fake.
    MeasureComputational { silent: bool },
}

/// Dishonest Alice of attack I.
pub fn alice_attack_i() -> AliceAttack {
    AliceAttack::PrepareComputational
}

/// Dishonest Alice of attack II.
pub fn alice_attack_ii(silent: bool) -> AliceAttack {
    AliceAttack::MeasureComputational { silent }
}

/// Dishonest Bob: measures the C-channel particle in the computational
/// basis at exactly the positions where he took SIFT on his own channel.
#[derive(Debug)]
pub struct BobProbe {
    rng: RandomStream,
    /// The bits Bob skims off the probed particles, by position.
    pub observed: Vec<(usize, u8)>,
}

pub fn bob_probe(rng: RandomStream) -> BobProbe {
    BobProbe {
        rng,
        observed: Vec::new(),
    }
}

impl BobProbe {
    /// Measure a probed particle and forward the collapsed state.
    pub fn intercept(&mut self, index: usize, state: &StateVector) -> StateVector {
        let (outcome, collapsed) =
            quantum::measure(state, Basis::Computational, &mut self.rng).expect("dim-2 particle");
        if let Outcome::Bit(bit) = outcome {
            self.observed.push((index, bit));
        }
        collapsed
    }
}

/// Whatever is attacking this session.
pub enum Adversary {
    Honest,
    Eavesdropper(Box<dyn ChannelTap + Send>),
    DishonestAlice(AliceAttack),
    DishonestBob(BobProbe),
}

impl Adversary {
    pub fn alice_attack(&self) -> Option<AliceAttack> {
        match self {
            Adversary::DishonestAlice(a) => Some(*a),
            _ => None,
        }
    }
}

/// Eve measures each forwarded particle in the computational basis and
/// passes on the collapsed state; the return leg is untouched.
#[derive(Debug)]
pub struct MeasureResendTap {
    rng: RandomStream,
}

pub fn measure_resend_tap(rng: RandomStream) -> MeasureResendTap {
    MeasureResendTap { rng }
}

impl ChannelTap for MeasureResendTap {
    fn on_forward(&mut self, _channel: Channel, wire: Wire) -> Wire {
        match wire {
            Wire::Bare(state) => {
                let (_, collapsed) = quantum::measure(&state, Basis::Computational, &mut self.rng)
                    .expect("dim-2 particle");
                Wire::Bare(collapsed)
            }
            other => other,
        }
    }

    fn on_return(&mut self, _channel: Channel, wire: Wire) -> Wire {
        wire
    }
}

/// Eve keeps each genuine particle, substitutes a fresh uniformly random
/// computational-basis fake on the forward leg, and sends the held genuine
/// particle back to Alice on the return leg.
#[derive(Debug)]
pub struct InterceptResendTap {
    rng: RandomStream,
    held: Option<StateVector>,
}

pub fn intercept_resend_tap(rng: RandomStream) -> InterceptResendTap {
    InterceptResendTap { rng, held: None }
}

impl ChannelTap for InterceptResendTap {
    fn on_forward(&mut self, _channel: Channel, wire: Wire) -> Wire {
        match wire {
            Wire::Bare(state) => {
                // One particle in flight at a time, per the send discipline.
                assert!(self.held.is_none(), "previous particle not yet returned");
                self.held = Some(state);
                Wire::Bare(StateVector::computational(self.rng.bit()))
            }
            other => other,
        }
    }

    fn on_return(&mut self, _channel: Channel, wire: Wire) -> Wire {
        match wire {
            Wire::Bare(_) => Wire::Bare(self.held.take().expect("held particle for return leg")),
            other => other,
        }
    }
}

/// Eve CNOTs a fresh |0⟩ ancilla onto each forwarded particle (particle as
/// control) and undoes the CNOT on the return leg, keeping the detached
/// ancillas. The second CNOT always disentangles, so the ancillas end in
/// |0⟩ on every branch and the attack is both undetectable and useless.
#[derive(Debug, Default)]
pub struct DoubleCnotTap {
    finished: Vec<StateVector>,
}

pub fn double_cnot_tap() -> DoubleCnotTap {
    DoubleCnotTap::default()
}

impl ChannelTap for DoubleCnotTap {
    fn on_forward(&mut self, _channel: Channel, wire: Wire) -> Wire {
        match wire {
            Wire::Bare(state) => {
                let joint = quantum::tensor(&state, &StateVector::zero()).expect("two qubits");
                Wire::WithAncilla(quantum::cnot(&joint).expect("dim-4 joint"))
            }
            other => other,
        }
    }

    fn on_return(&mut self, _channel: Channel, wire: Wire) -> Wire {
        match wire {
            Wire::WithAncilla(joint) => {
                let joint = quantum::cnot(&joint).expect("dim-4 joint");
                let (particle, ancilla) = quantum::factor_pair(&joint)
                    .expect("second CNOT leaves the register in a product state");
                self.finished.push(ancilla);
                Wire::Bare(particle)
            }
            other => other,
        }
    }

    fn ancillas(&self) -> &[StateVector] {
        &self.finished
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::steps::classical_action;
    use crate::protocol::types::Action;

    fn adversary_rng(seed: u64) -> RandomStream {
        RandomStream::for_role(seed, StreamRole::Adversary)
    }

    #[test]
    fn attack_tokens_round_trip() {
        for kind in AttackKind::ALL {
            assert_eq!(AttackKind::parse(kind.token()), Some(kind));
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.token()));
        }
        assert_eq!(AttackKind::parse("trojan-horse"), None);
    }

    #[test]
    fn measure_resend_collapses_plus() {
        let mut tap = measure_resend_tap(adversary_rng(1));
        let mut seen = [false, false];
        for _ in 0..64 {
            let wire = tap.on_forward(Channel::B, Wire::Bare(StateVector::plus()));
            let state = wire.into_bare().unwrap();
            let bit = if state.approx_eq(&StateVector::zero(), 1e-12) {
                0
            } else {
                assert!(state.approx_eq(&StateVector::one(), 1e-12));
                1
            };
            seen[bit] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn intercept_resend_returns_the_genuine_particle() {
        let mut tap = intercept_resend_tap(adversary_rng(2));
        let mut rng = RandomStream::from_seed(3);
        for _ in 0..32 {
            let fake = tap.on_forward(Channel::B, Wire::Bare(StateVector::plus()));
            // Whatever happens at Bob's end, Alice gets the held |+⟩ back.
            let (returned, _) = classical_action(fake, Action::Sift, &mut rng);
            let back = tap.on_return(Channel::B, returned);
            assert!(back.into_bare().unwrap().approx_eq(&StateVector::plus(), 1e-12));
        }
    }

    #[test]
    fn double_cnot_round_trip_is_invisible() {
        let mut tap = double_cnot_tap();
        let mut rng = RandomStream::from_seed(4);
        for round in 0..64 {
            let action = if round % 2 == 0 { Action::Ctrl } else { Action::Sift };
            let wire = tap.on_forward(Channel::B, Wire::Bare(StateVector::plus()));
            let (wire, bit) = classical_action(wire, action, &mut rng);
            let back = tap.on_return(Channel::B, wire).into_bare().unwrap();
            match action {
                Action::Ctrl => assert!(back.approx_eq(&StateVector::plus(), 1e-12)),
                Action::Sift => {
                    let expected = StateVector::computational(bit.unwrap());
                    assert!(back.approx_eq(&expected, 1e-12));
                }
            }
        }
        // Every detached ancilla is |0⟩ regardless of the action taken.
        assert_eq!(tap.ancillas().len(), 64);
        for ancilla in tap.ancillas() {
            assert!(ancilla.approx_eq(&StateVector::zero(), 1e-9));
        }
    }

    #[test]
    fn bob_probe_records_collapsed_bits() {
        let mut probe = bob_probe(adversary_rng(5));
        for index in 0..32 {
            let collapsed = probe.intercept(index, &StateVector::plus());
            let (_, bit) = *probe.observed.last().unwrap();
            assert!(collapsed.approx_eq(&StateVector::computational(bit), 0.0));
        }
        assert_eq!(probe.observed.len(), 32);
    }
}
