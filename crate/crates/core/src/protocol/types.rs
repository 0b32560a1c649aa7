//! Domain types for the protocol.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::channel::Channel;
use crate::protocol::config::ConfigError;
use crate::quantum::{BellOutcome, StateVector};
use crate::rng::RandomStream;

/// A string of bits, serialized as "0"/"1" characters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }

    pub fn random(len: usize, rng: &mut RandomStream) -> Self {
        Self((0..len).map(|_| rng.bit()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len(), other.len(), "bit string length mismatch");
        BitString(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a ^ b)
                .collect(),
        )
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(format!("invalid bit character {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// What a classical party does with an incoming particle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    /// Return the particle untouched.
    Ctrl,
    /// Measure in the computational basis and return a fresh particle in
    /// the observed state.
    Sift,
}

/// Alice's public per-group announcement. The φ⁻/ψ⁻ distinction stays
/// private with Alice; only the word "summation" is published for those.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Announcement {
    PhiPlus,
    PsiPlus,
    Summation,
}

/// Map a Bell outcome to its public announcement.
pub fn announcement_of(outcome: BellOutcome) -> Announcement {
    match outcome {
        BellOutcome::PhiPlus => Announcement::PhiPlus,
        BellOutcome::PsiPlus => Announcement::PsiPlus,
        BellOutcome::PhiMinus | BellOutcome::PsiMinus => Announcement::Summation,
    }
}

/// A tracked qubit in transit or at rest between protocol steps.
#[derive(Clone, Debug)]
pub struct Particle {
    pub channel: Channel,
    /// Position within its sequence, 0-based.
    pub index: usize,
    pub state: StateVector,
}

/// The positional pairing of one returned B-channel particle with one
/// returned C-channel particle, jointly Bell-measured by Alice.
#[derive(Clone, Debug)]
pub struct ParticleGroup {
    /// Group index, 0-based over the surviving particles.
    pub index: usize,
    pub bob_particle: Particle,
    pub charlie_particle: Particle,
}

/// The three parties' private bit strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivateInputs {
    pub x: BitString,
    pub y: BitString,
    pub z: BitString,
}

impl PrivateInputs {
    pub fn new(x: BitString, y: BitString, z: BitString) -> Self {
        Self { x, y, z }
    }

    /// Seed-derived random inputs of length `n`.
    pub fn random(n: usize, rng: &mut RandomStream) -> Self {
        Self {
            x: BitString::random(n, rng),
            y: BitString::random(n, rng),
            z: BitString::random(n, rng),
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), ConfigError> {
        for s in [&self.x, &self.y, &self.z] {
            if s.len() != n {
                return Err(ConfigError::InputLength {
                    expected: n,
                    got: s.len(),
                });
            }
        }
        Ok(())
    }

    /// X ⊕ Y ⊕ Z, the value an honest session must output.
    pub fn expected_sum(&self) -> BitString {
        self.x.xor(&self.y).xor(&self.z)
    }
}

/// Key bits and masked public shares produced in the final step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub k_a: BitString,
    pub k_b: BitString,
    pub k_c: BitString,
    pub r_a: BitString,
    pub r_b: BitString,
    pub r_c: BitString,
}

/// How a session ended.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Completed,
    AbortEveCheckB,
    AbortEveCheckC,
    AbortSummationRate,
    AbortHonestyCheck,
    AbortInsufficientGroups,
}

impl SessionStatus {
    pub fn is_abort(self) -> bool {
        self != SessionStatus::Completed
    }
}

/// Per-channel eavesdropping-check tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ctrl_errors: usize,
    pub ctrl_total: usize,
    pub sift_errors: usize,
    pub sift_total: usize,
    pub pass: bool,
}

impl CheckReport {
    pub fn errors(&self) -> usize {
        self.ctrl_errors + self.sift_errors
    }

    pub fn total(&self) -> usize {
        self.ctrl_total + self.sift_total
    }
}

/// Verdict of the summation-announcement rate check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCheckReport {
    pub summation_count: usize,
    pub group_count: usize,
    /// Honest expectation, 3/8 of the group count.
    pub expected: f64,
    /// Abort strictly below this count.
    pub threshold: f64,
    pub pass: bool,
}

/// Verdict of the honesty check toward Alice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HonestyCheckReport {
    pub errors: usize,
    pub checked: usize,
    pub pass: bool,
}

/// Everything a finished (or aborted) session exposes.
#[derive(Clone, Debug)]
pub struct SessionOutcome {
    pub status: SessionStatus,
    /// The summation result; present iff the session completed.
    pub sum: Option<BitString>,
    /// Key bits and public shares; present iff the session completed.
    pub keys: Option<KeyMaterial>,
    pub eve_check_b: Option<CheckReport>,
    pub eve_check_c: Option<CheckReport>,
    pub rate_check: Option<RateCheckReport>,
    pub honesty_check: Option<HonestyCheckReport>,
    /// Groups formed after the eavesdropping check (0 if aborted earlier).
    pub group_count: usize,
    /// "summation" announcements over all formed groups.
    pub summation_count: usize,
    /// Usable groups (both SIFT, announcement "summation") among the groups
    /// remaining after the honesty check; `None` if never reached.
    pub qualifying_count: Option<usize>,
    pub transcript: super::transcript::Transcript,
}
