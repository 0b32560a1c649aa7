//! The session orchestrator: Steps 1–5 end to end, with the one-at-a-time
//! send discipline, the three security checks, and adversary hooks at every
//! channel crossing.

use thiserror::Error;

use crate::adversary::{Adversary, AliceAttack};
use crate::channel::{Channel, Wire};
use crate::protocol::config::{ConfigError, SessionConfig};
use crate::protocol::steps::{
    choose_actions, classical_action, compute_summation, derive_keys, step1_prepare,
    step3_eve_check, step4_honesty_check, step4_measure_and_announce,
    step4_summation_rate_check, step5_select_groups, GroupView, KeyError, Retained,
};
use crate::protocol::transcript::{
    serialize_amps, AnnouncedPayload, CheckResultPayload, EventKind, Role, TapPhase, Transcript,
};
use crate::protocol::types::{
    Action, Announcement, CheckReport, Particle, ParticleGroup, PrivateInputs, SessionOutcome,
    SessionStatus,
};
use crate::quantum::{self, Basis, Outcome, StateVector};
use crate::rng::{RandomStream, StreamRole};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SessionError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Key(#[from] KeyError),
}

/// What one channel accumulated over the transmission phase.
struct ChannelLog {
    returned: Vec<StateVector>,
    actions: Vec<Action>,
    sift_bits: Vec<Option<u8>>,
}

/// Execute one full session.
///
/// The adversary, if any, is consulted at every channel crossing (taps) or
/// replaces the relevant role behavior (participant attacks). All abort
/// conditions are reported as [`SessionStatus`] values, not errors.
pub fn run_session(
    config: &SessionConfig,
    inputs: &PrivateInputs,
    adversary: &mut Adversary,
) -> Result<SessionOutcome, SessionError> {
    config.validate()?;
    inputs.validate(config.n)?;

    let mut transcript = Transcript::new();
    let mut alice_rng = RandomStream::for_role(config.seed, StreamRole::Alice);
    let mut bob_rng = RandomStream::for_role(config.seed, StreamRole::Bob);
    let mut charlie_rng = RandomStream::for_role(config.seed, StreamRole::Charlie);
    let alice_attack = adversary.alice_attack();
    let len = config.sequence_length();

    // Step 1: preparation. Honest Alice sends |+⟩ everywhere; attack-I
    // Alice substitutes uniformly random computational-basis states.
    let (p_b, p_c) = if alice_attack == Some(AliceAttack::PrepareComputational) {
        let mut make = |channel| {
            (0..len)
                .map(|index| Particle {
                    channel,
                    index,
                    state: StateVector::computational(alice_rng.bit()),
                })
                .collect::<Vec<_>>()
        };
        (make(Channel::B), make(Channel::C))
    } else {
        step1_prepare(config)?
    };
    for p in p_b.iter().chain(&p_c) {
        transcript.push(
            1,
            Role::Alice,
            EventKind::Prepared {
                channel: p.channel,
                index: p.index,
                state: serialize_amps(&p.state),
            },
        );
    }

    // Step 2: independent uniform action choices.
    let bob_actions = choose_actions(config, &mut bob_rng);
    let charlie_actions = choose_actions(config, &mut charlie_rng);

    // Transmission, one particle at a time per channel: the next particle
    // leaves Alice only after the previous one on that channel is back.
    let mut b_log = ChannelLog {
        returned: Vec::with_capacity(len),
        actions: bob_actions.clone(),
        sift_bits: vec![None; len],
    };
    let mut c_log = ChannelLog {
        returned: Vec::with_capacity(len),
        actions: charlie_actions.clone(),
        sift_bits: vec![None; len],
    };
    for index in 0..len {
        let (state, bit) = round_trip(
            Channel::B,
            index,
            p_b[index].state.clone(),
            bob_actions[index],
            bob_actions[index],
            &mut bob_rng,
            adversary,
            &mut transcript,
        );
        b_log.returned.push(state);
        b_log.sift_bits[index] = bit;

        let (state, bit) = round_trip(
            Channel::C,
            index,
            p_c[index].state.clone(),
            charlie_actions[index],
            bob_actions[index],
            &mut charlie_rng,
            adversary,
            &mut transcript,
        );
        c_log.returned.push(state);
        c_log.sift_bits[index] = bit;
    }

    let mut outcome = Draft::default();

    // Step 3: eavesdropping check, channel B then channel C. A dishonest
    // Alice is running this check against herself, so she fabricates a
    // clean verdict instead of measuring.
    let fabricate = alice_attack == Some(AliceAttack::PrepareComputational);
    let (report_b, chosen_b) =
        eve_check(Channel::B, &b_log, config, &mut alice_rng, fabricate, &mut transcript)?;
    outcome.eve_check_b = Some(report_b);
    if !report_b.pass {
        return Ok(outcome.abort(SessionStatus::AbortEveCheckB, 3, Role::Alice, transcript));
    }
    let (report_c, chosen_c) =
        eve_check(Channel::C, &c_log, config, &mut alice_rng, fabricate, &mut transcript)?;
    outcome.eve_check_c = Some(report_c);
    if !report_c.pass {
        return Ok(outcome.abort(SessionStatus::AbortEveCheckC, 3, Role::Alice, transcript));
    }

    // Step 4: pair the survivors positionally into groups.
    let b_survivors = survivors(&b_log, &chosen_b, Channel::B);
    let c_survivors = survivors(&c_log, &chosen_c, Channel::C);
    debug_assert_eq!(b_survivors.len(), c_survivors.len());
    let mut groups = Vec::with_capacity(b_survivors.len());
    let mut views = Vec::with_capacity(b_survivors.len());
    for (l, (b, c)) in b_survivors.iter().zip(&c_survivors).enumerate() {
        groups.push(ParticleGroup {
            index: l,
            bob_particle: Particle {
                channel: Channel::B,
                index: b.0,
                state: b.1.clone(),
            },
            charlie_particle: Particle {
                channel: Channel::C,
                index: c.0,
                state: c.1.clone(),
            },
        });
        views.push(GroupView {
            index: l,
            bob_action: b.2,
            charlie_action: c.2,
            bob_bit: b.3,
            charlie_bit: c.3,
            announcement: Announcement::Summation, // overwritten below
        });
    }
    outcome.group_count = groups.len();

    // Step 4: Alice measures every group and announces.
    let (announcements, retained) = match alice_attack {
        Some(AliceAttack::MeasureComputational { silent }) => {
            alice_measure_computational(&groups, silent, &mut alice_rng, &mut transcript)
        }
        _ => {
            let (anns, bells) = step4_measure_and_announce(&groups, &mut alice_rng);
            for (group, bell) in groups.iter().zip(&bells) {
                transcript.push(
                    4,
                    Role::Alice,
                    EventKind::Measured {
                        channel: None,
                        particle_index: None,
                        group_index: Some(group.index),
                        basis: Basis::Bell,
                        outcome: bell.label().to_string(),
                    },
                );
            }
            (anns, bells.into_iter().map(Retained::Bell).collect())
        }
    };
    for (view, announcement) in views.iter_mut().zip(&announcements) {
        view.announcement = *announcement;
    }
    transcript.push(
        4,
        Role::Alice,
        EventKind::Announced(AnnouncedPayload::BellResults {
            announcements: announcements.clone(),
        }),
    );

    // Step 4: Bob and Charlie terminate if "summation" came up abnormally
    // rarely.
    let rate = step4_summation_rate_check(&announcements, config);
    outcome.summation_count = rate.summation_count;
    outcome.rate_check = Some(rate);
    transcript.push(
        4,
        Role::Bob,
        EventKind::CheckResult(CheckResultPayload::SummationRate { report: rate }),
    );
    if !rate.pass {
        return Ok(outcome.abort(SessionStatus::AbortSummationRate, 4, Role::Bob, transcript));
    }

    // Step 4: honesty check toward Alice.
    let honesty = step4_honesty_check(&views, config, &mut bob_rng)?;
    transcript.push(
        4,
        Role::Bob,
        EventKind::Announced(AnnouncedPayload::HonestyGroups {
            groups: honesty.chosen.clone(),
        }),
    );
    transcript.push(
        4,
        Role::Bob,
        EventKind::CheckResult(CheckResultPayload::Honesty {
            report: honesty.report,
        }),
    );
    outcome.honesty_check = Some(honesty.report);
    if !honesty.report.pass {
        return Ok(outcome.abort(SessionStatus::AbortHonestyCheck, 4, Role::Bob, transcript));
    }

    // Step 5: the checked groups are consumed; select key groups among the
    // rest.
    let mut consumed = vec![false; views.len()];
    for &i in &honesty.chosen {
        consumed[i] = true;
    }
    let remaining: Vec<GroupView> = views
        .iter()
        .filter(|v| !consumed[v.index])
        .copied()
        .collect();
    debug_assert_eq!(remaining.len(), config.remaining_group_count());
    outcome.qualifying_count = Some(
        remaining
            .iter()
            .filter(|g| {
                g.bob_action == Action::Sift
                    && g.charlie_action == Action::Sift
                    && g.announcement == Announcement::Summation
            })
            .count(),
    );
    let selected_indices = match step5_select_groups(&remaining, config.n) {
        Some(indices) => indices,
        None => {
            return Ok(outcome.abort(
                SessionStatus::AbortInsufficientGroups,
                5,
                Role::Bob,
                transcript,
            ))
        }
    };
    transcript.push(
        5,
        Role::Bob,
        EventKind::Announced(AnnouncedPayload::SelectedGroups {
            groups: selected_indices.clone(),
        }),
    );

    let selected_views: Vec<GroupView> = selected_indices
        .iter()
        .map(|&i| views[i])
        .collect();
    let (k_a, k_b, k_c) = derive_keys(&selected_views, |i| retained[i])?;
    let (keys, sum) = compute_summation(&k_a, &k_b, &k_c, inputs)?;
    for (role, bits) in [
        (Role::Alice, keys.r_a.clone()),
        (Role::Bob, keys.r_b.clone()),
        (Role::Charlie, keys.r_c.clone()),
    ] {
        transcript.push(
            5,
            role,
            EventKind::Announced(AnnouncedPayload::PublicShare { bits }),
        );
    }
    transcript.push(5, Role::Alice, EventKind::Completed { sum: sum.clone() });

    outcome.sum = Some(sum);
    outcome.keys = Some(keys);
    Ok(outcome.finish(SessionStatus::Completed, transcript))
}

/// One particle's round trip on one channel.
#[allow(clippy::too_many_arguments)]
fn round_trip(
    channel: Channel,
    index: usize,
    state: StateVector,
    action: Action,
    bob_action_here: Action,
    party_rng: &mut RandomStream,
    adversary: &mut Adversary,
    transcript: &mut Transcript,
) -> (StateVector, Option<u8>) {
    let party = match channel {
        Channel::B => Role::Bob,
        Channel::C => Role::Charlie,
    };
    transcript.push(
        1,
        Role::Alice,
        EventKind::Sent {
            channel,
            index,
            from: Role::Alice,
            to: party,
        },
    );

    let mut wire = Wire::Bare(state);
    match adversary {
        Adversary::Eavesdropper(tap) if tap.targets(channel) => {
            wire = tap.on_forward(channel, wire);
            transcript.push(
                1,
                Role::Eve,
                EventKind::Tapped {
                    channel,
                    index,
                    phase: TapPhase::Forward,
                },
            );
        }
        Adversary::DishonestBob(probe)
            if channel == Channel::C && bob_action_here == Action::Sift =>
        {
            if let Wire::Bare(s) = &wire {
                wire = Wire::Bare(probe.intercept(index, s));
            }
            transcript.push(
                1,
                Role::Bob,
                EventKind::Tapped {
                    channel,
                    index,
                    phase: TapPhase::Forward,
                },
            );
        }
        _ => {}
    }

    let (mut wire, bit) = classical_action(wire, action, party_rng);
    transcript.push(
        2,
        party,
        EventKind::ActionTaken {
            channel,
            index,
            action,
        },
    );
    if let Some(b) = bit {
        transcript.push(
            2,
            party,
            EventKind::Measured {
                channel: Some(channel),
                particle_index: Some(index),
                group_index: None,
                basis: Basis::Computational,
                outcome: b.to_string(),
            },
        );
    }
    transcript.push(
        2,
        party,
        EventKind::Sent {
            channel,
            index,
            from: party,
            to: Role::Alice,
        },
    );

    if let Adversary::Eavesdropper(tap) = adversary {
        if tap.targets(channel) {
            wire = tap.on_return(channel, wire);
            transcript.push(
                2,
                Role::Eve,
                EventKind::Tapped {
                    channel,
                    index,
                    phase: TapPhase::Return,
                },
            );
        }
    }

    let final_state = wire
        .into_bare()
        .expect("the particle returned to Alice is a single qubit");
    (final_state, bit)
}

/// Run (or, for a dishonest Alice, fake) one channel's eavesdropping check
/// and record the protocol-visible exchange.
fn eve_check(
    channel: Channel,
    log: &ChannelLog,
    config: &SessionConfig,
    alice_rng: &mut RandomStream,
    fabricate: bool,
    transcript: &mut Transcript,
) -> Result<(CheckReport, Vec<usize>), ConfigError> {
    let party = match channel {
        Channel::B => Role::Bob,
        Channel::C => Role::Charlie,
    };
    let (report, chosen, measurements) = if fabricate {
        let chosen = alice_rng.sample_indices(log.returned.len(), config.eve_check_count());
        let ctrl_total = chosen
            .iter()
            .filter(|&&i| log.actions[i] == Action::Ctrl)
            .count();
        let report = CheckReport {
            ctrl_errors: 0,
            ctrl_total,
            sift_errors: 0,
            sift_total: chosen.len() - ctrl_total,
            pass: true,
        };
        (report, chosen, Vec::new())
    } else {
        let out = step3_eve_check(
            &log.returned,
            &log.actions,
            &log.sift_bits,
            config,
            alice_rng,
        )?;
        (out.report, out.chosen, out.measurements)
    };

    transcript.push(
        3,
        Role::Alice,
        EventKind::Announced(AnnouncedPayload::CheckPositions {
            channel,
            positions: chosen.clone(),
        }),
    );
    transcript.push(
        3,
        party,
        EventKind::Announced(AnnouncedPayload::CheckDisclosure {
            channel,
            actions: chosen.iter().map(|&i| log.actions[i]).collect(),
            bits: chosen.iter().map(|&i| log.sift_bits[i]).collect(),
        }),
    );
    for (&i, (basis, outcome)) in chosen.iter().zip(&measurements) {
        transcript.push(
            3,
            Role::Alice,
            EventKind::Measured {
                channel: Some(channel),
                particle_index: Some(i),
                group_index: None,
                basis: *basis,
                outcome: outcome.label(),
            },
        );
    }
    transcript.push(
        3,
        Role::Alice,
        EventKind::CheckResult(CheckResultPayload::EveCheck { channel, report }),
    );
    Ok((report, chosen))
}

/// The particles of one channel that survive the eavesdropping check, in
/// order: (original index, state, action, SIFT bit).
fn survivors(
    log: &ChannelLog,
    chosen: &[usize],
    _channel: Channel,
) -> Vec<(usize, StateVector, Action, Option<u8>)> {
    let mut checked = vec![false; log.returned.len()];
    for &i in chosen {
        checked[i] = true;
    }
    (0..log.returned.len())
        .filter(|&i| !checked[i])
        .map(|i| {
            (
                i,
                log.returned[i].clone(),
                log.actions[i],
                log.sift_bits[i],
            )
        })
        .collect()
}

/// Attack-II Alice: measure each group qubit in the computational basis and
/// announce fakes consistent with the observed bits.
fn alice_measure_computational(
    groups: &[ParticleGroup],
    silent: bool,
    alice_rng: &mut RandomStream,
    transcript: &mut Transcript,
) -> (Vec<Announcement>, Vec<Retained>) {
    let mut announcements = Vec::with_capacity(groups.len());
    let mut retained = Vec::with_capacity(groups.len());
    for group in groups {
        let mut read = |particle: &Particle| {
            let (outcome, _) =
                quantum::measure(&particle.state, Basis::Computational, alice_rng)
                    .expect("dim-2 particle");
            let bit = match outcome {
                Outcome::Bit(b) => b,
                Outcome::Bell(_) => unreachable!("computational measurement"),
            };
            transcript.push(
                4,
                Role::Alice,
                EventKind::Measured {
                    channel: Some(particle.channel),
                    particle_index: Some(particle.index),
                    group_index: Some(group.index),
                    basis: Basis::Computational,
                    outcome: bit.to_string(),
                },
            );
            bit
        };
        let bob = read(&group.bob_particle);
        let charlie = read(&group.charlie_particle);
        let fake = if bob == charlie {
            Announcement::PhiPlus
        } else {
            Announcement::PsiPlus
        };
        let announcement = if silent || alice_rng.bit() == 0 {
            fake
        } else {
            Announcement::Summation
        };
        announcements.push(announcement);
        retained.push(Retained::BitPair { bob, charlie });
    }
    (announcements, retained)
}

/// Accumulates the outcome fields as the session progresses.
#[derive(Default)]
struct Draft {
    sum: Option<crate::protocol::types::BitString>,
    keys: Option<crate::protocol::types::KeyMaterial>,
    eve_check_b: Option<CheckReport>,
    eve_check_c: Option<CheckReport>,
    rate_check: Option<crate::protocol::types::RateCheckReport>,
    honesty_check: Option<crate::protocol::types::HonestyCheckReport>,
    group_count: usize,
    summation_count: usize,
    qualifying_count: Option<usize>,
}

impl Draft {
    fn abort(
        self,
        status: SessionStatus,
        step: u8,
        role: Role,
        mut transcript: Transcript,
    ) -> SessionOutcome {
        transcript.push(step, role, EventKind::Aborted { status });
        self.finish(status, transcript)
    }

    fn finish(self, status: SessionStatus, transcript: Transcript) -> SessionOutcome {
        SessionOutcome {
            status,
            sum: self.sum,
            keys: self.keys,
            eve_check_b: self.eve_check_b,
            eve_check_c: self.eve_check_c,
            rate_check: self.rate_check,
            honesty_check: self.honesty_check,
            group_count: self.group_count,
            summation_count: self.summation_count,
            qualifying_count: self.qualifying_count,
            transcript,
        }
    }
}
