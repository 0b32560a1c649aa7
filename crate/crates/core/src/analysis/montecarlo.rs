//! Monte Carlo verification of the oracle's detection probabilities.
//!
//! Runs full sessions with an attack installed, pools the per-event error
//! counts at the attack's own check, and compares against the exact values
//! with Wilson-score confidence intervals. Sessions are independent, so the
//! trials fan out across threads and merge by summing counts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::AttackKind;
use crate::analysis::exact::ExactProbability;
use crate::analysis::oracle::{
    enumerate_event_probability, event_for, whole_run_detection_exact,
};
use crate::protocol::{run_session, PrivateInputs, SessionConfig, SessionOutcome, SessionStatus};
use crate::rng::{RandomStream, StreamRole};

const WILSON_Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    PerEvent,
    WholeRun,
}

/// An exact probability next to its Monte Carlo estimate.
#[derive(Clone, Debug, Serialize)]
pub struct DetectionStats {
    pub attack: AttackKind,
    pub scope: Scope,
    pub exact: ExactProbability,
    pub mc_estimate: f64,
    pub mc_trials: u64,
    pub detections: u64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl DetectionStats {
    fn from_counts(
        attack: AttackKind,
        scope: Scope,
        exact: ExactProbability,
        detections: u64,
        trials: u64,
    ) -> Self {
        let mc_estimate = if trials == 0 {
            0.0
        } else {
            detections as f64 / trials as f64
        };
        let (ci_low, ci_high) = wilson_interval(detections, trials);
        Self {
            attack,
            scope,
            exact,
            mc_estimate,
            mc_trials: trials,
            detections,
            ci_low,
            ci_high,
        }
    }

    /// The oracle/Monte-Carlo agreement invariant: the estimate sits within
    /// four binomial standard deviations of the exact value. Degenerate
    /// exact values demand exact agreement.
    pub fn agrees(&self) -> bool {
        if self.exact.is_zero() {
            return self.detections == 0;
        }
        if self.exact.is_one() {
            return self.detections == self.mc_trials && self.mc_trials > 0;
        }
        if self.mc_trials == 0 {
            return false;
        }
        let e = self.exact.to_f64();
        let sigma = (e * (1.0 - e) / self.mc_trials as f64).sqrt();
        (self.mc_estimate - e).abs() < 4.0 * sigma
    }
}

/// 95% Wilson score interval; (0, 1) when nothing was observed.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = WILSON_Z95;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let margin = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - margin).max(0.0), (center + margin).min(1.0))
}

/// A full attack campaign: exact values, pooled Monte Carlo estimates, and
/// the session-status breakdown.
#[derive(Clone, Debug, Serialize)]
pub struct AttackReport {
    pub schema_version: u32,
    pub attack: AttackKind,
    pub config: SessionConfig,
    pub trials: u64,
    pub master_seed: u64,
    pub per_event: DetectionStats,
    pub whole_run: DetectionStats,
    pub status_counts: BTreeMap<SessionStatus, u64>,
}

impl AttackReport {
    /// Both scopes satisfy the agreement invariant.
    pub fn agrees(&self) -> bool {
        self.per_event.agrees() && self.whole_run.agrees()
    }
}

/// The abort status at which each attack's detection manifests.
pub fn detection_status(attack: AttackKind) -> SessionStatus {
    match attack {
        AttackKind::MeasureResend | AttackKind::InterceptResend | AttackKind::DoubleCnot => {
            SessionStatus::AbortEveCheckB
        }
        AttackKind::BobProbe => SessionStatus::AbortEveCheckC,
        AttackKind::AliceI | AttackKind::AliceIiRandom => SessionStatus::AbortHonestyCheck,
        AttackKind::AliceIiSilent => SessionStatus::AbortSummationRate,
    }
}

/// Events and errors at the attack's own check within one session, plus
/// whether that check fired.
fn check_counts(attack: AttackKind, outcome: &SessionOutcome) -> (u64, u64) {
    match attack {
        AttackKind::MeasureResend | AttackKind::InterceptResend | AttackKind::DoubleCnot => {
            outcome
                .eve_check_b
                .map_or((0, 0), |r| (r.total() as u64, r.errors() as u64))
        }
        AttackKind::BobProbe => outcome
            .eve_check_c
            .map_or((0, 0), |r| (r.total() as u64, r.errors() as u64)),
        AttackKind::AliceI | AttackKind::AliceIiRandom | AttackKind::AliceIiSilent => outcome
            .honesty_check
            .map_or((0, 0), |r| (r.checked as u64, r.errors as u64)),
    }
}

/// Per-session check events for the whole-run closed form.
fn events_per_session(attack: AttackKind, config: &SessionConfig) -> u32 {
    match event_for(attack) {
        super::oracle::CheckEvent::Step3ChosenParticle
        | super::oracle::CheckEvent::Step3ChosenPositionC => config.eve_check_count() as u32,
        super::oracle::CheckEvent::Step4ChosenGroup => config.honesty_check_count() as u32,
    }
}

/// Run `trials` independent sessions with `attack` installed and pool the
/// detection counts at its check. Per-session seeds derive from
/// (master seed, session index), so reports are reproducible and
/// merge-order independent.
pub fn monte_carlo_detection(
    attack: AttackKind,
    config: &SessionConfig,
    trials: u64,
    master_seed: u64,
) -> Result<AttackReport, crate::protocol::SessionError> {
    config.validate()?;

    struct Tally {
        events: u64,
        detections: u64,
        fired: u64,
        statuses: BTreeMap<SessionStatus, u64>,
    }

    let fired_status = detection_status(attack);
    let tally = (0..trials)
        .into_par_iter()
        .map(|index| -> Result<Tally, crate::protocol::SessionError> {
            let seed = RandomStream::session_seed(master_seed, index);
            let mut session_config = config.clone();
            session_config.seed = seed;
            let mut inputs_rng = RandomStream::for_role(seed, StreamRole::Inputs);
            let inputs = PrivateInputs::random(config.n, &mut inputs_rng);
            let mut adversary = attack.for_session(seed);
            let outcome = run_session(&session_config, &inputs, &mut adversary)?;
            let (events, detections) = check_counts(attack, &outcome);
            let mut statuses = BTreeMap::new();
            statuses.insert(outcome.status, 1);
            Ok(Tally {
                events,
                detections,
                fired: u64::from(outcome.status == fired_status),
                statuses,
            })
        })
        .try_reduce(
            || Tally {
                events: 0,
                detections: 0,
                fired: 0,
                statuses: BTreeMap::new(),
            },
            |mut a, b| {
                a.events += b.events;
                a.detections += b.detections;
                a.fired += b.fired;
                for (status, count) in b.statuses {
                    *a.statuses.entry(status).or_insert(0) += count;
                }
                Ok(a)
            },
        )?;

    let exact_event = enumerate_event_probability(attack, event_for(attack))
        .expect("every attack has a canonical event");
    let per_event = DetectionStats::from_counts(
        attack,
        Scope::PerEvent,
        exact_event.clone(),
        tally.detections,
        tally.events,
    );

    let exact_whole_run = if attack == AttackKind::AliceIiSilent {
        // The silent variant is caught by the rate check, which fires iff
        // its cutoff is positive (it always is at practical sizes).
        let n = config.group_count() as f64;
        let expected = 0.375 * n;
        let sd = (n * 0.375 * 0.625).sqrt();
        if expected - config.thresholds.summation_rate_sigma * sd > 0.0 {
            ExactProbability::one()
        } else {
            ExactProbability::zero()
        }
    } else {
        whole_run_detection_exact(&exact_event, events_per_session(attack, config))
    };
    let whole_run = DetectionStats::from_counts(
        attack,
        Scope::WholeRun,
        exact_whole_run,
        tally.fired,
        trials,
    );

    Ok(AttackReport {
        schema_version: 1,
        attack,
        config: config.clone(),
        trials,
        master_seed,
        per_event,
        whole_run,
        status_counts: tally.statuses,
    })
}
