//! Security and efficiency analysis: the exact branch-enumeration oracle,
//! Monte Carlo estimators with confidence intervals, and the
//! qubit-efficiency calculator.

pub mod efficiency;
pub mod exact;
pub mod montecarlo;
pub mod oracle;

pub use efficiency::{baseline_efficiency, efficiency_dominates, qubit_efficiency, Efficiency};
pub use exact::ExactProbability;
pub use montecarlo::{
    detection_status, monte_carlo_detection, wilson_interval, AttackReport, DetectionStats, Scope,
};
pub use oracle::{
    audit_double_cnot, enumerate_event_probability, event_for, exact_probabilities,
    honest_summation_rate, whole_run_detection, whole_run_detection_exact, AncillaBranch,
    CheckEvent, DoubleCnotAudit, OracleError, SummationRates,
};
