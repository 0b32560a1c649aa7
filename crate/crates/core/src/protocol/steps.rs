//! The five protocol steps as standalone operations.
//!
//! `run_session` in [`super::session`] wires these together; keeping them
//! free functions makes each step's contract testable on its own.

use crate::channel::{Channel, Wire};
use crate::protocol::config::{ConfigError, SessionConfig};
use crate::protocol::types::{
    Action, Announcement, BitString, CheckReport, HonestyCheckReport, KeyMaterial, Particle,
    ParticleGroup, PrivateInputs, RateCheckReport,
};
use crate::quantum::{self, Basis, BellOutcome, Outcome, StateVector};
use crate::rng::RandomStream;

/// Step 1: produce the two all-|+⟩ particle sequences, one per channel.
pub fn step1_prepare(config: &SessionConfig) -> Result<(Vec<Particle>, Vec<Particle>), ConfigError> {
    config.validate()?;
    let len = config.sequence_length();
    let make = |channel: Channel| {
        (0..len)
            .map(|index| Particle {
                channel,
                index,
                state: StateVector::plus(),
            })
            .collect()
    };
    Ok((make(Channel::B), make(Channel::C)))
}

/// Step 2: one party's independent uniform CTRL/SIFT choices, one per
/// incoming particle.
pub fn choose_actions(config: &SessionConfig, rng: &mut RandomStream) -> Vec<Action> {
    (0..config.sequence_length())
        .map(|_| {
            if rng.bit() == 0 {
                Action::Ctrl
            } else {
                Action::Sift
            }
        })
        .collect()
}

/// Step 2: apply one action to the particle on the wire.
///
/// CTRL returns the wire untouched. SIFT measures the flying qubit in the
/// computational basis and sends on a particle in the observed state; if a
/// tap has entangled an ancilla with the particle, the measurement acts on
/// the particle's half of the joint register.
pub fn classical_action(
    wire: Wire,
    action: Action,
    rng: &mut RandomStream,
) -> (Wire, Option<u8>) {
    match action {
        Action::Ctrl => (wire, None),
        Action::Sift => match wire {
            Wire::Bare(state) => {
                let (outcome, collapsed) =
                    quantum::measure(&state, Basis::Computational, rng).expect("dim-2 particle");
                let bit = match outcome {
                    Outcome::Bit(b) => b,
                    Outcome::Bell(_) => unreachable!("computational measurement"),
                };
                (Wire::Bare(collapsed), Some(bit))
            }
            Wire::WithAncilla(joint) => {
                let (bit, collapsed) =
                    quantum::measure_qubit(&joint, 0, rng).expect("dim-4 wire register");
                (Wire::WithAncilla(collapsed), Some(bit))
            }
        },
    }
}

/// Outcome of one channel's eavesdropping check.
#[derive(Clone, Debug)]
pub struct EveCheckOutcome {
    pub report: CheckReport,
    /// The checked positions, ascending.
    pub chosen: Vec<usize>,
    /// Alice's measurement record per chosen position: (basis, outcome).
    pub measurements: Vec<(Basis, Outcome)>,
}

/// Step 3: check one channel for an eavesdropper.
///
/// Alice draws nλ positions without replacement, measures the returned
/// CTRL particles in the Hadamard basis (error unless |+⟩) and the returned
/// SIFT particles in the computational basis (error unless the party's
/// reported bit), and passes iff the total error count stays within
/// `max_check_errors`.
pub fn step3_eve_check(
    returned: &[StateVector],
    actions: &[Action],
    sift_records: &[Option<u8>],
    config: &SessionConfig,
    rng: &mut RandomStream,
) -> Result<EveCheckOutcome, ConfigError> {
    let need = config.eve_check_count();
    if returned.len() < need {
        return Err(ConfigError::NotEnoughParticles {
            need,
            have: returned.len(),
        });
    }
    let chosen = rng.sample_indices(returned.len(), need);
    let mut report = CheckReport::default();
    let mut measurements = Vec::with_capacity(need);
    for &i in &chosen {
        match actions[i] {
            Action::Ctrl => {
                let (outcome, _) = quantum::measure(&returned[i], Basis::Hadamard, rng)
                    .expect("dim-2 particle");
                report.ctrl_total += 1;
                if outcome != Outcome::Bit(0) {
                    report.ctrl_errors += 1;
                }
                measurements.push((Basis::Hadamard, outcome));
            }
            Action::Sift => {
                let (outcome, _) = quantum::measure(&returned[i], Basis::Computational, rng)
                    .expect("dim-2 particle");
                let reported = sift_records[i].expect("SIFT action recorded a bit");
                report.sift_total += 1;
                if outcome != Outcome::Bit(reported) {
                    report.sift_errors += 1;
                }
                measurements.push((Basis::Computational, outcome));
            }
        }
    }
    report.pass = report.errors() <= config.thresholds.max_check_errors;
    Ok(EveCheckOutcome {
        report,
        chosen,
        measurements,
    })
}

/// Step 4: Bell-measure every particle group and derive the public
/// announcements. Alice keeps the full outcomes; only `announcement_of`
/// each is public.
pub fn step4_measure_and_announce(
    groups: &[ParticleGroup],
    rng: &mut RandomStream,
) -> (Vec<Announcement>, Vec<BellOutcome>) {
    let mut announcements = Vec::with_capacity(groups.len());
    let mut retained = Vec::with_capacity(groups.len());
    for group in groups {
        let joint = quantum::tensor(&group.bob_particle.state, &group.charlie_particle.state)
            .expect("group particles are single qubits");
        let (outcome, _) = quantum::measure(&joint, Basis::Bell, rng).expect("dim-4 state");
        let bell = match outcome {
            Outcome::Bell(b) => b,
            Outcome::Bit(_) => unreachable!("Bell measurement"),
        };
        announcements.push(super::types::announcement_of(bell));
        retained.push(bell);
    }
    (announcements, retained)
}

/// Step 4: abort if the number of "summation" announcements is abnormally
/// low. The honest rate is 3/8 per group; the cutoff sits
/// `summation_rate_sigma` binomial standard deviations below that.
pub fn step4_summation_rate_check(
    announcements: &[Announcement],
    config: &SessionConfig,
) -> RateCheckReport {
    let group_count = announcements.len();
    let summation_count = announcements
        .iter()
        .filter(|a| **a == Announcement::Summation)
        .count();
    let rate = 3.0 / 8.0;
    let expected = rate * group_count as f64;
    let sd = (group_count as f64 * rate * (1.0 - rate)).sqrt();
    let threshold = expected - config.thresholds.summation_rate_sigma * sd;
    RateCheckReport {
        summation_count,
        group_count,
        expected,
        threshold,
        pass: (summation_count as f64) >= threshold,
    }
}

/// Everything Bob and Charlie jointly know about one group when they check
/// Alice's honesty and select key groups.
#[derive(Clone, Copy, Debug)]
pub struct GroupView {
    /// Group index, 0-based.
    pub index: usize,
    pub bob_action: Action,
    pub charlie_action: Action,
    pub bob_bit: Option<u8>,
    pub charlie_bit: Option<u8>,
    pub announcement: Announcement,
}

impl GroupView {
    fn both(&self, action: Action) -> bool {
        self.bob_action == action && self.charlie_action == action
    }
}

/// The compliance rule of the honesty check: does this group's announcement
/// contradict what the classical parties know?
///
/// A "summation" announcement for a both-CTRL group is impossible for an
/// honest Alice; for both-SIFT groups, φ⁺ requires equal SIFT bits and ψ⁺
/// unequal ones. Groups with mixed actions, and both-SIFT groups announced
/// as "summation", are not checkable.
pub fn honesty_violation(group: &GroupView) -> bool {
    match group.announcement {
        Announcement::Summation => group.both(Action::Ctrl),
        Announcement::PhiPlus => group.both(Action::Sift) && group.bob_bit != group.charlie_bit,
        Announcement::PsiPlus => group.both(Action::Sift) && group.bob_bit == group.charlie_bit,
    }
}

/// Outcome of the honesty check toward Alice.
#[derive(Clone, Debug)]
pub struct HonestyCheckOutcome {
    pub report: HonestyCheckReport,
    /// The checked group indices, ascending.
    pub chosen: Vec<usize>,
}

/// Step 4: Bob and Charlie pick nε groups without replacement and flag
/// every compliance violation.
pub fn step4_honesty_check(
    groups: &[GroupView],
    config: &SessionConfig,
    rng: &mut RandomStream,
) -> Result<HonestyCheckOutcome, ConfigError> {
    let need = config.honesty_check_count();
    if groups.len() < need {
        return Err(ConfigError::NotEnoughGroups {
            need,
            have: groups.len(),
        });
    }
    let chosen = rng.sample_indices(groups.len(), need);
    let errors = chosen
        .iter()
        .filter(|&&i| honesty_violation(&groups[i]))
        .count();
    Ok(HonestyCheckOutcome {
        report: HonestyCheckReport {
            errors,
            checked: need,
            pass: errors <= config.thresholds.max_check_errors,
        },
        chosen,
    })
}

/// Step 5: among the remaining groups, the first n (ascending group index)
/// where both parties took SIFT and Alice announced "summation".
///
/// Returns the group indices, or `None` if fewer than n groups qualify.
pub fn step5_select_groups(remaining: &[GroupView], n: usize) -> Option<Vec<usize>> {
    let selected: Vec<usize> = remaining
        .iter()
        .filter(|g| {
            g.bob_action == Action::Sift
                && g.charlie_action == Action::Sift
                && g.announcement == Announcement::Summation
        })
        .map(|g| g.index)
        .take(n)
        .collect();
    (selected.len() == n).then_some(selected)
}

/// What Alice privately retains about a group for key derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retained {
    /// The honest (or truthfully announced) Bell outcome.
    Bell(BellOutcome),
    /// Computational results from a dishonest Alice who measured each qubit
    /// separately instead of using the Bell basis.
    BitPair { bob: u8, charlie: u8 },
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum KeyError {
    #[error("selected group {group} is missing a SIFT record")]
    MissingSiftRecord { group: usize },
}

/// Step 5: per-party key bits for the selected groups.
///
/// Alice's bit is 0 for a retained φ⁻ and 1 otherwise; Bob's and Charlie's
/// bits are their SIFT measurement results.
pub fn derive_keys(
    selected: &[GroupView],
    retained: impl Fn(usize) -> Retained,
) -> Result<(BitString, BitString, BitString), KeyError> {
    let mut k_a = Vec::with_capacity(selected.len());
    let mut k_b = Vec::with_capacity(selected.len());
    let mut k_c = Vec::with_capacity(selected.len());
    for group in selected {
        let a = match retained(group.index) {
            Retained::Bell(BellOutcome::PhiMinus) => 0,
            Retained::Bell(_) => 1,
            Retained::BitPair { bob, charlie } => bob ^ charlie,
        };
        let b = group
            .bob_bit
            .ok_or(KeyError::MissingSiftRecord { group: group.index })?;
        let c = group
            .charlie_bit
            .ok_or(KeyError::MissingSiftRecord { group: group.index })?;
        k_a.push(a);
        k_b.push(b);
        k_c.push(c);
    }
    Ok((
        BitString::from_bits(k_a),
        BitString::from_bits(k_b),
        BitString::from_bits(k_c),
    ))
}

/// Step 5: mask the key bits with the private inputs, publish the shares,
/// and XOR them into the summation result.
pub fn compute_summation(
    k_a: &BitString,
    k_b: &BitString,
    k_c: &BitString,
    inputs: &PrivateInputs,
) -> Result<(KeyMaterial, BitString), ConfigError> {
    let n = k_a.len();
    inputs.validate(n)?;
    if k_b.len() != n || k_c.len() != n {
        return Err(ConfigError::InputLength {
            expected: n,
            got: k_b.len().max(k_c.len()),
        });
    }
    let r_a = k_a.xor(&inputs.x);
    let r_b = k_b.xor(&inputs.y);
    let r_c = k_c.xor(&inputs.z);
    let sum = r_a.xor(&r_b).xor(&r_c);
    Ok((
        KeyMaterial {
            k_a: k_a.clone(),
            k_b: k_b.clone(),
            k_c: k_c.clone(),
            r_a,
            r_b,
            r_c,
        },
        sum,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::probabilities;

    #[test]
    fn step1_lengths_and_states() {
        let cfg = SessionConfig::new(1, 1, 1, 2.0, 0);
        let (pb, pc) = step1_prepare(&cfg).unwrap();
        assert_eq!(pb.len(), 12);
        assert_eq!(pc.len(), 12);
        for p in pb.iter().chain(&pc) {
            let probs = probabilities(&p.state, Basis::Hadamard).unwrap();
            assert!((probs[0] - 1.0).abs() < 1e-12);
            assert!(probs[1].abs() < 1e-12);
        }
    }

    #[test]
    fn ctrl_returns_wire_untouched() {
        let mut rng = RandomStream::from_seed(0);
        let (wire, bit) = classical_action(Wire::Bare(StateVector::plus()), Action::Ctrl, &mut rng);
        assert!(bit.is_none());
        assert!(wire.state().approx_eq(&StateVector::plus(), 0.0));
    }

    #[test]
    fn sift_collapses_and_records() {
        let mut rng = RandomStream::from_seed(1);
        let mut seen = [false, false];
        for _ in 0..64 {
            let (wire, bit) =
                classical_action(Wire::Bare(StateVector::plus()), Action::Sift, &mut rng);
            let bit = bit.unwrap();
            seen[bit as usize] = true;
            let expected = StateVector::computational(bit);
            assert!(wire.state().approx_eq(&expected, 0.0));
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn sift_on_eigenstate_is_deterministic() {
        let mut rng = RandomStream::from_seed(2);
        for _ in 0..16 {
            let (wire, bit) =
                classical_action(Wire::Bare(StateVector::zero()), Action::Sift, &mut rng);
            assert_eq!(bit, Some(0));
            assert!(wire.state().approx_eq(&StateVector::zero(), 0.0));
        }
    }

    #[test]
    fn action_choices_are_deterministic_per_seed() {
        let cfg = SessionConfig::new(8, 2, 2, 8.0, 3);
        let a = choose_actions(&cfg, &mut RandomStream::from_seed(9));
        let b = choose_actions(&cfg, &mut RandomStream::from_seed(9));
        assert_eq!(a, b);
    }

    #[test]
    fn rate_check_passes_at_expectation() {
        let cfg = SessionConfig::new(1, 1, 1, 8.0, 0);
        // 16 announcements, exactly 6 = 3/8 of them "summation".
        let mut announcements = vec![Announcement::PhiPlus; 10];
        announcements.extend(vec![Announcement::Summation; 6]);
        let report = step4_summation_rate_check(&announcements, &cfg);
        assert!(report.pass);
        assert_eq!(report.summation_count, 6);
    }

    #[test]
    fn rate_check_aborts_on_zero_summations() {
        let cfg = SessionConfig::new(8, 2, 2, 8.0, 0);
        let announcements = vec![Announcement::PhiPlus; cfg.group_count()];
        let report = step4_summation_rate_check(&announcements, &cfg);
        assert!(!report.pass);
    }

    #[test]
    fn honesty_rule_matches_check_table() {
        let view = |ba, ca, bb, cb, ann| GroupView {
            index: 0,
            bob_action: ba,
            charlie_action: ca,
            bob_bit: bb,
            charlie_bit: cb,
            announcement: ann,
        };
        use Action::*;
        use Announcement::*;
        assert!(honesty_violation(&view(Ctrl, Ctrl, None, None, Summation)));
        assert!(!honesty_violation(&view(Ctrl, Ctrl, None, None, PhiPlus)));
        assert!(honesty_violation(&view(Sift, Sift, Some(0), Some(1), PhiPlus)));
        assert!(!honesty_violation(&view(Sift, Sift, Some(1), Some(1), PhiPlus)));
        assert!(honesty_violation(&view(Sift, Sift, Some(0), Some(0), PsiPlus)));
        assert!(!honesty_violation(&view(Sift, Sift, Some(0), Some(1), PsiPlus)));
        // Mixed actions and both-SIFT summations are never checkable.
        assert!(!honesty_violation(&view(Ctrl, Sift, None, Some(0), Summation)));
        assert!(!honesty_violation(&view(Sift, Sift, Some(0), Some(0), Summation)));
    }

    #[test]
    fn select_groups_takes_first_n_qualifying() {
        let qualifying = [3usize, 7, 9, 12, 20];
        let groups: Vec<GroupView> = (0..24)
            .map(|index| {
                let q = qualifying.contains(&index);
                GroupView {
                    index,
                    bob_action: if q { Action::Sift } else { Action::Ctrl },
                    charlie_action: Action::Sift,
                    bob_bit: q.then_some(0),
                    charlie_bit: Some(1),
                    announcement: if q {
                        Announcement::Summation
                    } else {
                        Announcement::PsiPlus
                    },
                }
            })
            .collect();
        assert_eq!(step5_select_groups(&groups, 3), Some(vec![3, 7, 9]));
    }

    #[test]
    fn select_groups_fails_without_summations() {
        let groups: Vec<GroupView> = (0..8)
            .map(|index| GroupView {
                index,
                bob_action: Action::Sift,
                charlie_action: Action::Sift,
                bob_bit: Some(0),
                charlie_bit: Some(0),
                announcement: Announcement::PhiPlus,
            })
            .collect();
        assert_eq!(step5_select_groups(&groups, 1), None);
    }

    #[test]
    fn key_derivation_examples() {
        let view = |index, bb, cb| GroupView {
            index,
            bob_action: Action::Sift,
            charlie_action: Action::Sift,
            bob_bit: Some(bb),
            charlie_bit: Some(cb),
            announcement: Announcement::Summation,
        };
        let groups = [view(0, 0, 0), view(1, 0, 1), view(2, 1, 0)];
        let retained = [
            Retained::Bell(BellOutcome::PhiMinus),
            Retained::Bell(BellOutcome::PsiMinus),
            Retained::Bell(BellOutcome::PsiMinus),
        ];
        let (k_a, k_b, k_c) = derive_keys(&groups, |i| retained[i]).unwrap();
        assert_eq!(k_a.to_string(), "011");
        assert_eq!(k_b.to_string(), "001");
        assert_eq!(k_c.to_string(), "010");
    }

    #[test]
    fn key_derivation_requires_sift_records() {
        let group = GroupView {
            index: 5,
            bob_action: Action::Sift,
            charlie_action: Action::Sift,
            bob_bit: None,
            charlie_bit: Some(0),
            announcement: Announcement::Summation,
        };
        let err = derive_keys(&[group], |_| Retained::Bell(BellOutcome::PhiMinus)).unwrap_err();
        assert_eq!(err, KeyError::MissingSiftRecord { group: 5 });
    }

    #[test]
    fn summation_examples() {
        let bits = |s: &str| s.parse::<BitString>().unwrap();
        let inputs = PrivateInputs::new(bits("1"), bits("0"), bits("1"));
        let (keys, sum) = compute_summation(&bits("0"), &bits("0"), &bits("0"), &inputs).unwrap();
        assert_eq!(keys.r_a.to_string(), "1");
        assert_eq!(keys.r_b.to_string(), "0");
        assert_eq!(keys.r_c.to_string(), "1");
        assert_eq!(sum.to_string(), "0");

        let zeros = PrivateInputs::new(bits("0"), bits("0"), bits("0"));
        let (_, sum) = compute_summation(&bits("1"), &bits("0"), &bits("1"), &zeros).unwrap();
        assert_eq!(sum.to_string(), "0");

        // A single key bit violating k_a ⊕ k_b ⊕ k_c = 0 flips that
        // position of the output.
        let (_, bad) = compute_summation(&bits("1"), &bits("0"), &bits("0"), &zeros).unwrap();
        assert_eq!(bad.to_string(), "1");
    }
}
