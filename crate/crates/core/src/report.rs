//! Serializable report shapes shared by the CLI and the Python bindings.
//! All reports carry `schema_version: 1`.

use serde::Serialize;

use crate::adversary::AttackKind;
use crate::analysis::{
    baseline_efficiency, efficiency_dominates, enumerate_event_probability, event_for,
    honest_summation_rate, qubit_efficiency, whole_run_detection, CheckEvent, Efficiency,
    ExactProbability, SummationRates,
};
use crate::protocol::{
    ConfigError, KeyMaterial, PrivateInputs, SessionConfig, SessionOutcome, SessionStatus,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Report of one protocol session.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: SessionConfig,
    pub inputs: PrivateInputs,
    pub status: SessionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_sum: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keys: Option<KeyMaterial>,
    pub group_count: usize,
    pub summation_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualifying_count: Option<usize>,
    pub transcript_events: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(
        config: &SessionConfig,
        inputs: &PrivateInputs,
        outcome: &SessionOutcome,
        warnings: Vec<String>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            inputs: inputs.clone(),
            status: outcome.status,
            sum: outcome.sum.as_ref().map(ToString::to_string),
            expected_sum: outcome
                .sum
                .is_some()
                .then(|| inputs.expected_sum().to_string()),
            keys: outcome.keys.clone(),
            group_count: outcome.group_count,
            summation_count: outcome.summation_count,
            qualifying_count: outcome.qualifying_count,
            transcript_events: outcome.transcript.len(),
            warnings,
        }
    }
}

/// One oracle entry: an attack's exact per-event detection probability.
#[derive(Clone, Debug, Serialize)]
pub struct OracleEntry {
    pub attack: AttackKind,
    pub event: CheckEvent,
    pub exact: ExactProbability,
    pub exact_float: f64,
}

/// All exact per-event probabilities plus the honest announcement rates.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub entries: Vec<OracleEntry>,
    pub honest: SummationRates,
}

impl OracleReport {
    pub fn build() -> Self {
        let entries = AttackKind::ALL
            .into_iter()
            .map(|attack| {
                let event = event_for(attack);
                let exact = enumerate_event_probability(attack, event)
                    .expect("canonical event is always valid");
                OracleEntry {
                    attack,
                    event,
                    exact_float: exact.to_f64(),
                    exact,
                }
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            entries,
            honest: honest_summation_rate(),
        }
    }
}

/// Efficiency report for one configuration, with the baseline comparison.
#[derive(Clone, Debug, Serialize)]
pub struct EfficiencyReport {
    pub schema_version: u32,
    pub n: usize,
    pub lambda: u32,
    pub epsilon: u32,
    pub gamma: f64,
    pub v: u64,
    pub q: u64,
    pub f: u64,
    pub eta: ExactProbability,
    pub eta_float: f64,
    pub baseline_r: u64,
    pub baseline_d: u64,
    pub baseline_delta: u64,
    pub eta_baseline: ExactProbability,
    pub eta_baseline_float: f64,
    /// 2(8+λ+ε+γ) < 3(32+r+d+δ), equivalent to eta > eta_baseline.
    pub dominates_baseline: bool,
}

impl EfficiencyReport {
    pub fn build(
        config: &SessionConfig,
        r: u64,
        d: u64,
        delta: u64,
    ) -> Result<Self, ConfigError> {
        let Efficiency { v, q, f, eta } = qubit_efficiency(config)?;
        let eta_baseline = baseline_efficiency(r, d, delta);
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            n: config.n,
            lambda: config.lambda,
            epsilon: config.epsilon,
            gamma: config.gamma,
            v,
            q,
            f,
            eta_float: eta.to_f64(),
            eta,
            baseline_r: r,
            baseline_d: d,
            baseline_delta: delta,
            eta_baseline_float: eta_baseline.to_f64(),
            eta_baseline,
            dominates_baseline: efficiency_dominates(config, r, d, delta),
        })
    }
}

/// One grid point of a parameter sweep: efficiency plus the closed-form
/// whole-run detection probability of every attack at that configuration.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub lambda: u32,
    pub epsilon: u32,
    pub gamma: f64,
    pub v: u64,
    pub q: u64,
    pub f: u64,
    pub eta: ExactProbability,
    pub eta_float: f64,
    pub det_measure_resend: f64,
    pub det_intercept_resend: f64,
    pub det_double_cnot: f64,
    pub det_alice_i: f64,
    pub det_alice_ii_random: f64,
    pub det_bob_probe: f64,
}

impl SweepRow {
    pub fn build(config: &SessionConfig) -> Result<Self, ConfigError> {
        let Efficiency { v, q, f, eta } = qubit_efficiency(config)?;
        let events = |attack| match event_for(attack) {
            CheckEvent::Step3ChosenParticle | CheckEvent::Step3ChosenPositionC => {
                config.eve_check_count() as u64
            }
            CheckEvent::Step4ChosenGroup => config.honesty_check_count() as u64,
        };
        let detection = |attack| {
            let p = enumerate_event_probability(attack, event_for(attack))
                .expect("canonical event is always valid");
            whole_run_detection(&p, events(attack))
        };
        Ok(Self {
            n: config.n,
            lambda: config.lambda,
            epsilon: config.epsilon,
            gamma: config.gamma,
            v,
            q,
            f,
            eta_float: eta.to_f64(),
            eta,
            det_measure_resend: detection(AttackKind::MeasureResend),
            det_intercept_resend: detection(AttackKind::InterceptResend),
            det_double_cnot: detection(AttackKind::DoubleCnot),
            det_alice_i: detection(AttackKind::AliceI),
            det_alice_ii_random: detection(AttackKind::AliceIiRandom),
            det_bob_probe: detection(AttackKind::BobProbe),
        })
    }
}

/// A whole sweep, sorted by grid key.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub rows: Vec<SweepRow>,
}
