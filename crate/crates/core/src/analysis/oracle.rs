//! Exact branch-enumeration oracle for per-event detection probabilities.
//!
//! Each attack's detection probability at its relevant check is computed by
//! exhaustively expanding the branch tree — party actions, the attack's own
//! randomness, and every measurement outcome — with each branch weighted by
//! exact Born probabilities. The Born weights come from
//! [`quantum::probabilities`] with each value snapped to the nearest
//! multiple of 1/4; every state reachable in this protocol has outcome
//! probabilities in {0, 1/4, 1/2, 3/4, 1}, so the snap is exact.
//!
//! This path never samples and is independent of the session machinery the
//! Monte Carlo estimators exercise.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::adversary::AttackKind;
use crate::analysis::exact::ExactProbability;
use crate::protocol::types::{announcement_of, Action, Announcement};
use crate::quantum::{self, Basis, BellOutcome, StateVector};

/// The check a per-event detection probability refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckEvent {
    /// One position chosen by the eavesdropping check on the attacked
    /// B channel.
    Step3ChosenParticle,
    /// One group chosen by the honesty check toward Alice.
    Step4ChosenGroup,
    /// One position chosen by the eavesdropping check on the C channel
    /// (the channel a dishonest Bob probes).
    Step3ChosenPositionC,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum OracleError {
    #[error("attack {attack:?} is not detected at {event:?}")]
    UnknownCombination {
        attack: AttackKind,
        event: CheckEvent,
    },
}

/// The check event at which each attack is detectable.
pub fn event_for(attack: AttackKind) -> CheckEvent {
    match attack {
        AttackKind::MeasureResend | AttackKind::InterceptResend | AttackKind::DoubleCnot => {
            CheckEvent::Step3ChosenParticle
        }
        AttackKind::AliceI | AttackKind::AliceIiSilent | AttackKind::AliceIiRandom => {
            CheckEvent::Step4ChosenGroup
        }
        AttackKind::BobProbe => CheckEvent::Step3ChosenPositionC,
    }
}

/// Exact per-event detection probability of `attack` at `event`.
pub fn enumerate_event_probability(
    attack: AttackKind,
    event: CheckEvent,
) -> Result<ExactProbability, OracleError> {
    if event != event_for(attack) {
        return Err(OracleError::UnknownCombination { attack, event });
    }
    Ok(match attack {
        AttackKind::MeasureResend => measure_resend_detection(),
        AttackKind::InterceptResend => intercept_resend_detection(),
        AttackKind::DoubleCnot => audit_double_cnot().detection,
        AttackKind::AliceI => alice_i_detection(),
        AttackKind::AliceIiSilent => alice_ii_detection(true),
        AttackKind::AliceIiRandom => alice_ii_detection(false),
        AttackKind::BobProbe => bob_probe_detection(),
    })
}

/// Snap a Born probability to the nearest multiple of 1/4. Exact for every
/// state this protocol produces (enforced here).
fn snap_quarter(p: f64) -> ExactProbability {
    let k = (p * 4.0).round();
    assert!(
        (p - k / 4.0).abs() < 1e-9,
        "probability {p} is not a multiple of 1/4"
    );
    ExactProbability::new(k as u64, 4)
}

/// Born distribution of `state` in `basis` as exact rationals.
pub fn exact_probabilities(state: &StateVector, basis: Basis) -> Vec<ExactProbability> {
    quantum::probabilities(state, basis)
        .expect("oracle states match their bases")
        .into_iter()
        .map(snap_quarter)
        .collect()
}

/// Nonzero measurement branches: (weight, outcome index, collapsed state).
fn branches(state: &StateVector, basis: Basis) -> Vec<(ExactProbability, usize, StateVector)> {
    exact_probabilities(state, basis)
        .into_iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(k, w)| (w, k, quantum::basis_state(basis, k)))
        .collect()
}

/// Nonzero branches of measuring one qubit of a pair in the computational
/// basis: (weight, bit, collapsed joint state).
fn qubit_branches(joint: &StateVector, qubit: usize) -> Vec<(ExactProbability, u8, StateVector)> {
    let mut out = Vec::new();
    for bit in 0..2u8 {
        if let Some((p, collapsed)) =
            quantum::project_qubit(joint, qubit, bit).expect("dim-4 register")
        {
            out.push((snap_quarter(p), bit, collapsed));
        }
    }
    out
}

const HALF: fn() -> ExactProbability = || ExactProbability::new(1, 2);

/// A classical party's branches on one incoming particle:
/// (weight, action, state sent back, SIFT bit).
fn party_branches(
    incoming: &StateVector,
) -> Vec<(ExactProbability, Action, StateVector, Option<u8>)> {
    let mut out = vec![(HALF(), Action::Ctrl, incoming.clone(), None)];
    for (w, bit, collapsed) in branches(incoming, Basis::Computational) {
        out.push((
            HALF().mul(&w),
            Action::Sift,
            collapsed,
            Some(bit as u8),
        ));
    }
    out
}

/// Probability that Alice's step-3 measurement of a chosen position flags
/// an error, given the returned state, the disclosed action and (for SIFT)
/// the disclosed bit.
fn step3_error_probability(
    returned: &StateVector,
    action: Action,
    bit: Option<u8>,
) -> ExactProbability {
    match action {
        // CTRL: Hadamard measurement, error unless |+⟩.
        Action::Ctrl => exact_probabilities(returned, Basis::Hadamard)[1].clone(),
        // SIFT: computational measurement, error unless the disclosed bit.
        Action::Sift => {
            let other = 1 - bit.expect("SIFT discloses a bit") as usize;
            exact_probabilities(returned, Basis::Computational)[other].clone()
        }
    }
}

/// Eve measures each forwarded particle in the computational basis. A SIFT
/// check position always agrees with Bob; a CTRL position fails the
/// Hadamard check half the time.
fn measure_resend_detection() -> ExactProbability {
    let mut detect = ExactProbability::zero();
    for (w_eve, _, collapsed) in branches(&StateVector::plus(), Basis::Computational) {
        for (w_party, action, returned, bit) in party_branches(&collapsed) {
            let p_err = step3_error_probability(&returned, action, bit);
            detect = detect.add(&w_eve.mul(&w_party).mul(&p_err));
        }
    }
    detect
}

/// Eve substitutes a random computational fake on the way in and returns
/// the untouched genuine |+⟩ on the way out. CTRL positions always pass;
/// a SIFT position compares Bob's fake-derived bit against a fresh
/// measurement of |+⟩ and fails half the time.
fn intercept_resend_detection() -> ExactProbability {
    let genuine = StateVector::plus();
    let mut detect = ExactProbability::zero();
    for fake_bit in 0..2u8 {
        let w_fake = HALF();
        let fake = StateVector::computational(fake_bit);
        for (w_party, action, _returned_fake, bit) in party_branches(&fake) {
            // Alice always measures the held genuine particle.
            let p_err = step3_error_probability(&genuine, action, bit);
            detect = detect.add(&w_fake.mul(&w_party).mul(&p_err));
        }
    }
    detect
}

/// One enumerated branch of the double CNOT attack.
#[derive(Clone, Debug)]
pub struct AncillaBranch {
    pub weight: ExactProbability,
    pub action: Action,
    pub ancilla: StateVector,
    pub detection: ExactProbability,
}

/// Full enumeration of the double CNOT attack on one chosen particle.
#[derive(Clone, Debug)]
pub struct DoubleCnotAudit {
    pub branches: Vec<AncillaBranch>,
    pub detection: ExactProbability,
    /// Total variation distance between the final-ancilla distributions
    /// conditioned on CTRL vs SIFT.
    pub tvd_ctrl_vs_sift: ExactProbability,
}

/// Expand every branch of the double CNOT attack: entangle, let the party
/// act, disentangle, and record the detached ancilla plus the detection
/// weight of the step-3 check.
pub fn audit_double_cnot() -> DoubleCnotAudit {
    let entangled = quantum::cnot(
        &quantum::tensor(&StateVector::plus(), &StateVector::zero()).expect("two qubits"),
    )
    .expect("dim-4 joint");

    let mut audit_branches = Vec::new();

    // CTRL: the joint register comes back unchanged.
    {
        let undone = quantum::cnot(&entangled).expect("dim-4 joint");
        let (particle, ancilla) =
            quantum::factor_pair(&undone).expect("second CNOT restores a product state");
        audit_branches.push(AncillaBranch {
            weight: HALF(),
            action: Action::Ctrl,
            detection: step3_error_probability(&particle, Action::Ctrl, None),
            ancilla,
        });
    }

    // SIFT: Bob measures the particle half of the joint register.
    for (w, bit, collapsed) in qubit_branches(&entangled, 0) {
        let undone = quantum::cnot(&collapsed).expect("dim-4 joint");
        let (particle, ancilla) =
            quantum::factor_pair(&undone).expect("second CNOT restores a product state");
        audit_branches.push(AncillaBranch {
            weight: HALF().mul(&w),
            action: Action::Sift,
            detection: step3_error_probability(&particle, Action::Sift, Some(bit)),
            ancilla,
        });
    }

    let detection = audit_branches
        .iter()
        .fold(ExactProbability::zero(), |acc, b| {
            acc.add(&b.weight.mul(&b.detection))
        });

    // Distribution of ancilla states conditioned on the party's action,
    // keyed by the ancilla's exact computational-basis distribution.
    let conditional = |action: Action| -> BTreeMap<String, ExactProbability> {
        let mut dist: BTreeMap<String, ExactProbability> = BTreeMap::new();
        let total = audit_branches
            .iter()
            .filter(|b| b.action == action)
            .fold(ExactProbability::zero(), |acc, b| acc.add(&b.weight));
        for branch in audit_branches.iter().filter(|b| b.action == action) {
            let key = exact_probabilities(&branch.ancilla, Basis::Computational)
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",");
            // Conditional weight: branch weight over the action's total.
            let numer = branch.weight.numerator() * total.denominator();
            let denom = branch.weight.denominator() * total.numerator();
            let w = ExactProbability::new(
                u64::try_from(numer).expect("small rationals"),
                u64::try_from(denom).expect("small rationals"),
            );
            dist.entry(key)
                .and_modify(|e| *e = e.add(&w))
                .or_insert(w);
        }
        dist
    };
    let ctrl = conditional(Action::Ctrl);
    let sift = conditional(Action::Sift);
    let mut tvd_twice = ExactProbability::zero();
    let keys: std::collections::BTreeSet<_> = ctrl.keys().chain(sift.keys()).collect();
    for key in keys {
        let a = ctrl.get(key).cloned().unwrap_or_else(ExactProbability::zero);
        let b = sift.get(key).cloned().unwrap_or_else(ExactProbability::zero);
        tvd_twice = tvd_twice.add(&a.abs_diff(&b));
    }
    let tvd = tvd_twice.mul(&HALF());

    DoubleCnotAudit {
        branches: audit_branches,
        detection,
        tvd_ctrl_vs_sift: tvd,
    }
}

/// Attack-I Alice prepares computational states but announces truthfully.
/// Only both-CTRL check groups can flag her, when the computational product
/// Bell-measures to φ⁻ or ψ⁻.
fn alice_i_detection() -> ExactProbability {
    let mut detect = ExactProbability::zero();
    for prepared_b in 0..2u8 {
        for prepared_c in 0..2u8 {
            let w_prep = HALF().mul(&HALF());
            for (w_b, a_b, state_b, bit_b) in
                party_branches(&StateVector::computational(prepared_b))
            {
                for (w_c, a_c, state_c, bit_c) in
                    party_branches(&StateVector::computational(prepared_c))
                {
                    let joint = quantum::tensor(&state_b, &state_c).expect("two qubits");
                    for (w_bell, k, _) in branches(&joint, Basis::Bell) {
                        let announcement = announcement_of(BellOutcome::from_index(k));
                        if check_group_violation(a_b, a_c, bit_b, bit_c, announcement) {
                            let w = w_prep
                                .mul(&w_b)
                                .mul(&w_c)
                                .mul(&w_bell);
                            detect = detect.add(&w);
                        }
                    }
                }
            }
        }
    }
    detect
}

/// Attack-II Alice replaces the Bell measurement by per-qubit computational
/// measurements and announces fakes; the randomized variant swaps the fake
/// for "summation" half the time, which both-CTRL check groups flag.
fn alice_ii_detection(silent: bool) -> ExactProbability {
    let mut detect = ExactProbability::zero();
    for (w_b, a_b, state_b, bit_b) in party_branches(&StateVector::plus()) {
        for (w_c, a_c, state_c, bit_c) in party_branches(&StateVector::plus()) {
            for (w_mb, m_b, _) in branches(&state_b, Basis::Computational) {
                for (w_mc, m_c, _) in branches(&state_c, Basis::Computational) {
                    let fake = if m_b == m_c {
                        Announcement::PhiPlus
                    } else {
                        Announcement::PsiPlus
                    };
                    let options: Vec<(ExactProbability, Announcement)> = if silent {
                        vec![(ExactProbability::one(), fake)]
                    } else {
                        vec![(HALF(), fake), (HALF(), Announcement::Summation)]
                    };
                    for (w_a, announcement) in options {
                        if check_group_violation(a_b, a_c, bit_b, bit_c, announcement) {
                            let w = w_b
                                .mul(&w_c)
                                .mul(&w_mb)
                                .mul(&w_mc)
                                .mul(&w_a);
                            detect = detect.add(&w);
                        }
                    }
                }
            }
        }
    }
    detect
}

/// Dishonest Bob measures the C particle whenever his own action at the
/// matching index was SIFT; Charlie's CTRL particles then fail Alice's
/// Hadamard check half the time.
fn bob_probe_detection() -> ExactProbability {
    let mut detect = ExactProbability::zero();

    // Bob took CTRL at the matching index: no tap, honest branch.
    for (w_c, a_c, returned, bit_c) in party_branches(&StateVector::plus()) {
        let p_err = step3_error_probability(&returned, a_c, bit_c);
        detect = detect.add(&HALF().mul(&w_c).mul(&p_err));
    }

    // Bob took SIFT: the probed particle collapses before Charlie acts.
    for (w_probe, _, collapsed) in branches(&StateVector::plus(), Basis::Computational) {
        for (w_c, a_c, returned, bit_c) in party_branches(&collapsed) {
            let p_err = step3_error_probability(&returned, a_c, bit_c);
            detect = detect.add(&HALF().mul(&w_probe).mul(&w_c).mul(&p_err));
        }
    }
    detect
}

/// The honesty-check compliance rule, restated here so the oracle does not
/// lean on the session implementation it is checking.
fn check_group_violation(
    bob_action: Action,
    charlie_action: Action,
    bob_bit: Option<u8>,
    charlie_bit: Option<u8>,
    announcement: Announcement,
) -> bool {
    let both_ctrl = bob_action == Action::Ctrl && charlie_action == Action::Ctrl;
    let both_sift = bob_action == Action::Sift && charlie_action == Action::Sift;
    match announcement {
        Announcement::Summation => both_ctrl,
        Announcement::PhiPlus => both_sift && bob_bit != charlie_bit,
        Announcement::PsiPlus => both_sift && bob_bit == charlie_bit,
    }
}

/// Honest per-group announcement rates.
#[derive(Clone, Debug, Serialize)]
pub struct SummationRates {
    /// P(announcement = "summation") for an honest group.
    pub marginal: ExactProbability,
    /// P(both parties SIFTed and the announcement is "summation") — the
    /// rate at which groups qualify for key bits.
    pub both_sift_and_summation: ExactProbability,
    /// P(both parties CTRLed and the announcement is "summation"); zero,
    /// which is exactly why both-CTRL summations expose a cheating Alice.
    pub both_ctrl_and_summation: ExactProbability,
}

/// Enumerate the honest protocol's announcement distribution.
pub fn honest_summation_rate() -> SummationRates {
    let mut marginal = ExactProbability::zero();
    let mut both_sift = ExactProbability::zero();
    let mut both_ctrl = ExactProbability::zero();
    for (w_b, a_b, state_b, _) in party_branches(&StateVector::plus()) {
        for (w_c, a_c, state_c, _) in party_branches(&StateVector::plus()) {
            let joint = quantum::tensor(&state_b, &state_c).expect("two qubits");
            for (w_bell, k, _) in branches(&joint, Basis::Bell) {
                if announcement_of(BellOutcome::from_index(k)) == Announcement::Summation {
                    let w = w_b.mul(&w_c).mul(&w_bell);
                    marginal = marginal.add(&w);
                    if a_b == Action::Sift && a_c == Action::Sift {
                        both_sift = both_sift.add(&w);
                    }
                    if a_b == Action::Ctrl && a_c == Action::Ctrl {
                        both_ctrl = both_ctrl.add(&w);
                    }
                }
            }
        }
    }
    SummationRates {
        marginal,
        both_sift_and_summation: both_sift,
        both_ctrl_and_summation: both_ctrl,
    }
}

/// The closed-form probability that at least one of `events` independent
/// checks detects, 1 − (1 − p)^events.
pub fn whole_run_detection(p_event: &ExactProbability, events: u64) -> f64 {
    1.0 - (1.0 - p_event.to_f64()).powi(events as i32)
}

/// Exact-rational version of [`whole_run_detection`].
pub fn whole_run_detection_exact(p_event: &ExactProbability, events: u32) -> ExactProbability {
    p_event.complement().pow(events).complement()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_detection_probabilities() {
        let cases = [
            (AttackKind::MeasureResend, ExactProbability::new(1, 4)),
            (AttackKind::InterceptResend, ExactProbability::new(1, 4)),
            (AttackKind::DoubleCnot, ExactProbability::zero()),
            (AttackKind::AliceI, ExactProbability::new(1, 8)),
            (AttackKind::AliceIiSilent, ExactProbability::zero()),
            (AttackKind::AliceIiRandom, ExactProbability::new(1, 8)),
            (AttackKind::BobProbe, ExactProbability::new(1, 8)),
        ];
        for (attack, expected) in cases {
            let p = enumerate_event_probability(attack, event_for(attack)).unwrap();
            assert_eq!(p, expected, "{attack:?}");
            assert!(p.is_dyadic(), "{attack:?} denominator must be a power of 2");
        }
    }

    #[test]
    fn unknown_combinations_are_rejected() {
        assert!(enumerate_event_probability(
            AttackKind::MeasureResend,
            CheckEvent::Step4ChosenGroup
        )
        .is_err());
        assert!(enumerate_event_probability(
            AttackKind::AliceI,
            CheckEvent::Step3ChosenParticle
        )
        .is_err());
        assert!(
            enumerate_event_probability(AttackKind::BobProbe, CheckEvent::Step3ChosenParticle)
                .is_err()
        );
    }

    #[test]
    fn honest_rates() {
        let rates = honest_summation_rate();
        assert_eq!(rates.marginal, ExactProbability::new(3, 8));
        assert_eq!(rates.both_sift_and_summation, ExactProbability::new(1, 8));
        assert!(rates.both_ctrl_and_summation.is_zero());
    }

    #[test]
    fn double_cnot_branches_all_end_in_zero_ancilla() {
        let audit = audit_double_cnot();
        assert!(!audit.branches.is_empty());
        for branch in &audit.branches {
            assert!(
                branch.ancilla.approx_eq(&StateVector::zero(), 1e-9),
                "ancilla {:?}",
                branch.ancilla
            );
            assert!(branch.detection.is_zero());
        }
        assert!(audit.detection.is_zero());
        assert!(audit.tvd_ctrl_vs_sift.is_zero());
    }

    #[test]
    fn whole_run_closed_form() {
        let quarter = ExactProbability::new(1, 4);
        let p = whole_run_detection(&quarter, 8);
        assert!((p - 0.899887084960938).abs() < 1e-12);
        assert_eq!(whole_run_detection(&ExactProbability::new(1, 8), 0), 0.0);
        assert_eq!(whole_run_detection(&ExactProbability::zero(), 1000), 0.0);

        let exact = whole_run_detection_exact(&quarter, 16);
        assert!(exact.is_dyadic());
        assert!((exact.to_f64() - (1.0 - 0.75f64.powi(16))).abs() < 1e-15);
    }

    #[test]
    fn snap_rejects_non_quarter_values() {
        let ok = std::panic::catch_unwind(|| snap_quarter(0.75)).is_ok();
        assert!(ok);
        let bad = std::panic::catch_unwind(|| snap_quarter(0.3)).is_err();
        assert!(bad);
    }
}
