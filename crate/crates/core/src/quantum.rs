//! Minimal exact pure-state simulator for one- and two-qubit registers.
//!
//! Everything the protocol touches is either a single qubit (2 complex
//! amplitudes) or a pair of qubits (4 amplitudes, ordered |00⟩, |01⟩, |10⟩,
//! |11⟩ with the first qubit as the most significant factor). Supported
//! operations: preparation in the computational and Hadamard bases, tensor
//! products, projective measurement in the computational, Hadamard and Bell
//! bases, a partial computational measurement of one qubit of a pair, the
//! CNOT gate, and factoring a product state back into its qubits.
//!
//! The Bell basis is fixed in the order φ⁺, φ⁻, ψ⁺, ψ⁻ with
//!
//! ```text
//! |φ±⟩ = (|00⟩ ± |11⟩)/√2      |ψ±⟩ = (|01⟩ ± |10⟩)/√2
//! ```
//!
//! and |±⟩ = (|0⟩ ± |1⟩)/√2, which gives the product-state decompositions
//! the protocol's checks rely on:
//!
//! ```text
//! |00⟩ = (|φ⁺⟩ + |φ⁻⟩)/√2      |01⟩ = (|ψ⁺⟩ + |ψ⁻⟩)/√2
//! |10⟩ = (|ψ⁺⟩ − |ψ⁻⟩)/√2      |11⟩ = (|φ⁺⟩ − |φ⁻⟩)/√2
//! |++⟩ = (|φ⁺⟩ + |ψ⁺⟩)/√2
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RandomStream;

/// Tolerance for normalization checks.
pub const NORM_TOLERANCE: f64 = 1e-12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum QuantumError {
    #[error("amplitude vector must have length 2 or 4, got {0}")]
    BadLength(usize),
    #[error("state vector is not normalized: |ψ|² = {0}")]
    NotNormalized(f64),
    #[error("{basis:?} basis applies to dimension {expected}, state has dimension {got}")]
    BasisDimMismatch {
        basis: Basis,
        expected: usize,
        got: usize,
    },
    #[error("cannot prepare a single qubit in the {0:?} basis")]
    InvalidPreparationBasis(Basis),
    #[error("operation requires dimension {expected}, state has dimension {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("preparation index must be 0 or 1, got {0}")]
    BadIndex(u8),
}

/// Measurement/preparation bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// {|0⟩, |1⟩}
    Computational,
    /// {|+⟩, |−⟩}
    Hadamard,
    /// {|φ⁺⟩, |φ⁻⟩, |ψ⁺⟩, |ψ⁻⟩}
    Bell,
}

impl Basis {
    pub fn dim(self) -> usize {
        match self {
            Basis::Computational | Basis::Hadamard => 2,
            Basis::Bell => 4,
        }
    }
}

/// Bell measurement outcomes, in the fixed serialization order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn index(self) -> usize {
        match self {
            BellOutcome::PhiPlus => 0,
            BellOutcome::PhiMinus => 1,
            BellOutcome::PsiPlus => 2,
            BellOutcome::PsiMinus => 3,
        }
    }

    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi_plus",
            BellOutcome::PhiMinus => "phi_minus",
            BellOutcome::PsiPlus => "psi_plus",
            BellOutcome::PsiMinus => "psi_minus",
        }
    }
}

/// Result of a projective measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Index into a two-outcome basis: 0 ↦ |0⟩ or |+⟩, 1 ↦ |1⟩ or |−⟩.
    Bit(u8),
    Bell(BellOutcome),
}

impl Outcome {
    pub fn label(self) -> String {
        match self {
            Outcome::Bit(b) => b.to_string(),
            Outcome::Bell(b) => b.label().to_string(),
        }
    }
}

/// A pure state of one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Build a state from raw amplitudes, validating shape and norm.
    pub fn new(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amps.len() != 2 && amps.len() != 4 {
            return Err(QuantumError::BadLength(amps.len()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(Self { amps })
    }

    fn from_reals(re: &[f64]) -> Self {
        Self {
            amps: re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        }
    }

    pub fn zero() -> Self {
        Self::from_reals(&[1.0, 0.0])
    }

    pub fn one() -> Self {
        Self::from_reals(&[0.0, 1.0])
    }

    pub fn plus() -> Self {
        Self::from_reals(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])
    }

    pub fn minus() -> Self {
        Self::from_reals(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
    }

    /// The computational-basis state |b⟩.
    pub fn computational(bit: u8) -> Self {
        if bit == 0 {
            Self::zero()
        } else {
            Self::one()
        }
    }

    pub fn bell(outcome: BellOutcome) -> Self {
        let r = FRAC_1_SQRT_2;
        match outcome {
            BellOutcome::PhiPlus => Self::from_reals(&[r, 0.0, 0.0, r]),
            BellOutcome::PhiMinus => Self::from_reals(&[r, 0.0, 0.0, -r]),
            BellOutcome::PsiPlus => Self::from_reals(&[0.0, r, r, 0.0]),
            BellOutcome::PsiMinus => Self::from_reals(&[0.0, r, -r, 0.0]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Elementwise comparison within `tol`.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// The `index`-th vector of `basis` (for the Bell basis, in φ⁺, φ⁻, ψ⁺, ψ⁻
/// order).
pub fn basis_state(basis: Basis, index: usize) -> StateVector {
    match basis {
        Basis::Computational => StateVector::computational(index as u8),
        Basis::Hadamard => {
            if index == 0 {
                StateVector::plus()
            } else {
                StateVector::minus()
            }
        }
        Basis::Bell => StateVector::bell(BellOutcome::from_index(index)),
    }
}

/// Prepare a single qubit as the `index`-th vector of a two-outcome basis.
pub fn prepare(basis: Basis, index: u8) -> Result<StateVector, QuantumError> {
    if basis == Basis::Bell {
        return Err(QuantumError::InvalidPreparationBasis(basis));
    }
    if index > 1 {
        return Err(QuantumError::BadIndex(index));
    }
    Ok(basis_state(basis, index as usize))
}

/// Kronecker product; `a` is the first (most significant) factor.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector, QuantumError> {
    if a.dim() != 2 {
        return Err(QuantumError::DimMismatch {
            expected: 2,
            got: a.dim(),
        });
    }
    if b.dim() != 2 {
        return Err(QuantumError::DimMismatch {
            expected: 2,
            got: b.dim(),
        });
    }
    let mut amps = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            amps.push(a.amps[i] * b.amps[j]);
        }
    }
    Ok(StateVector { amps })
}

fn check_basis_dim(state: &StateVector, basis: Basis) -> Result<(), QuantumError> {
    if state.dim() != basis.dim() {
        return Err(QuantumError::BasisDimMismatch {
            basis,
            expected: basis.dim(),
            got: state.dim(),
        });
    }
    Ok(())
}

/// The Born-rule outcome distribution of measuring `state` in `basis`,
/// indexed in the basis order. Sums to 1 within [`NORM_TOLERANCE`].
pub fn probabilities(state: &StateVector, basis: Basis) -> Result<Vec<f64>, QuantumError> {
    check_basis_dim(state, basis)?;
    let dim = state.dim();
    Ok((0..dim)
        .map(|k| {
            let b = basis_state(basis, k);
            let overlap: Complex64 = b
                .amps
                .iter()
                .zip(&state.amps)
                .map(|(bk, sk)| bk.conj() * sk)
                .sum();
            overlap.norm_sqr()
        })
        .collect())
}

/// Projective measurement of the whole register. Returns the sampled outcome
/// and the collapsed state (the corresponding basis vector), so measuring the
/// collapsed state again in the same basis reproduces the outcome.
pub fn measure(
    state: &StateVector,
    basis: Basis,
    rng: &mut RandomStream,
) -> Result<(Outcome, StateVector), QuantumError> {
    let probs = probabilities(state, basis)?;
    let k = rng.pick_weighted(&probs);
    let collapsed = basis_state(basis, k);
    let outcome = match basis {
        Basis::Computational | Basis::Hadamard => Outcome::Bit(k as u8),
        Basis::Bell => Outcome::Bell(BellOutcome::from_index(k)),
    };
    Ok((outcome, collapsed))
}

/// Project one qubit of a two-qubit register onto the computational-basis
/// value `bit` (`qubit` 0 is the first factor). Returns the outcome
/// probability and the renormalized post-measurement state, or `None` when
/// the outcome has no weight.
pub fn project_qubit(
    joint: &StateVector,
    qubit: usize,
    bit: u8,
) -> Result<Option<(f64, StateVector)>, QuantumError> {
    if joint.dim() != 4 {
        return Err(QuantumError::DimMismatch {
            expected: 4,
            got: joint.dim(),
        });
    }
    assert!(qubit < 2, "qubit index must be 0 or 1");
    let bit_of = |k: usize| -> u8 {
        if qubit == 0 {
            (k >> 1) as u8
        } else {
            (k & 1) as u8
        }
    };
    let prob: f64 = joint
        .amps
        .iter()
        .enumerate()
        .filter(|(k, _)| bit_of(*k) == bit)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if prob <= NORM_TOLERANCE {
        return Ok(None);
    }
    let scale = 1.0 / prob.sqrt();
    let amps = joint
        .amps
        .iter()
        .enumerate()
        .map(|(k, a)| {
            if bit_of(k) == bit {
                a * scale
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Some((prob, StateVector { amps })))
}

/// Computational-basis measurement of one qubit of a two-qubit register
/// (`qubit` 0 is the first factor). Returns the observed bit and the
/// collapsed, renormalized joint state.
pub fn measure_qubit(
    joint: &StateVector,
    qubit: usize,
    rng: &mut RandomStream,
) -> Result<(u8, StateVector), QuantumError> {
    let zero_branch = project_qubit(joint, qubit, 0)?;
    let p0 = zero_branch.as_ref().map_or(0.0, |(p, _)| *p);
    let observed = if rng.uniform() < p0 { 0 } else { 1 };
    let collapsed = if observed == 0 {
        zero_branch.expect("picked branch has weight").1
    } else {
        project_qubit(joint, qubit, 1)?
            .expect("picked branch has weight")
            .1
    };
    Ok((observed, collapsed))
}

/// CNOT with the first qubit as control and the second as target.
pub fn cnot(joint: &StateVector) -> Result<StateVector, QuantumError> {
    if joint.dim() != 4 {
        return Err(QuantumError::DimMismatch {
            expected: 4,
            got: joint.dim(),
        });
    }
    let a = &joint.amps;
    Ok(StateVector {
        amps: vec![a[0], a[1], a[3], a[2]],
    })
}

/// Factor a two-qubit product state into its qubits, or `None` if the state
/// is entangled. For a product input the reconstruction `first ⊗ second`
/// matches the input elementwise (any global phase is carried by `first`).
pub fn factor_pair(joint: &StateVector) -> Option<(StateVector, StateVector)> {
    if joint.dim() != 4 {
        return None;
    }
    let a = &joint.amps;
    // As a 2×2 matrix m[i][j] = ⟨ij|ψ⟩, a product state has rank 1.
    let det = a[0] * a[3] - a[1] * a[2];
    if det.norm() > 1e-9 {
        return None;
    }
    let row = [[a[0], a[1]], [a[2], a[3]]];
    let row_norm = |r: &[Complex64; 2]| r[0].norm_sqr() + r[1].norm_sqr();
    let pivot = if row_norm(&row[0]) >= row_norm(&row[1]) {
        0
    } else {
        1
    };
    let scale = 1.0 / row_norm(&row[pivot]).sqrt();
    let second = [row[pivot][0] * scale, row[pivot][1] * scale];
    let first: Vec<Complex64> = (0..2)
        .map(|i| row[i][0] * second[0].conj() + row[i][1] * second[1].conj())
        .collect();
    let first = StateVector { amps: first };
    let second = StateVector {
        amps: second.to_vec(),
    };
    let rebuilt = tensor(&first, &second).ok()?;
    if rebuilt.approx_eq(joint, 1e-9) {
        Some((first, second))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < NORM_TOLERANCE, "{a} != {b}");
    }

    #[test]
    fn prepare_computational_zero() {
        let s = prepare(Basis::Computational, 0).unwrap();
        assert_eq!(s.amps()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.amps()[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn prepare_hadamard_states() {
        let plus = prepare(Basis::Hadamard, 0).unwrap();
        assert_close(plus.amps()[0].re, FRAC_1_SQRT_2);
        assert_close(plus.amps()[1].re, FRAC_1_SQRT_2);
        let minus = prepare(Basis::Hadamard, 1).unwrap();
        assert_close(minus.amps()[0].re, FRAC_1_SQRT_2);
        assert_close(minus.amps()[1].re, -FRAC_1_SQRT_2);
    }

    #[test]
    fn prepare_rejects_bell_basis() {
        assert!(matches!(
            prepare(Basis::Bell, 0),
            Err(QuantumError::InvalidPreparationBasis(Basis::Bell))
        ));
    }

    #[test]
    fn tensor_computational_pairs() {
        let s = tensor(&StateVector::zero(), &StateVector::zero()).unwrap();
        assert!(s.approx_eq(&StateVector::from_reals(&[1.0, 0.0, 0.0, 0.0]), 0.0));
        let s = tensor(&StateVector::zero(), &StateVector::one()).unwrap();
        assert!(s.approx_eq(&StateVector::from_reals(&[0.0, 1.0, 0.0, 0.0]), 0.0));
    }

    #[test]
    fn tensor_plus_plus() {
        // Direct Kronecker product: all four amplitudes 1/2.
        let s = tensor(&StateVector::plus(), &StateVector::plus()).unwrap();
        for k in 0..4 {
            assert_close(s.amps()[k].re, 0.5);
            assert_close(s.amps()[k].im, 0.0);
        }
    }

    #[test]
    fn tensor_rejects_dim_mismatch() {
        let pair = tensor(&StateVector::zero(), &StateVector::zero()).unwrap();
        assert!(tensor(&pair, &StateVector::zero()).is_err());
    }

    #[test]
    fn bell_probabilities_of_computational_products() {
        // |00⟩ and |11⟩ split over φ±; |01⟩ and |10⟩ split over ψ±.
        let cases = [
            ((0, 0), [0.5, 0.5, 0.0, 0.0]),
            ((0, 1), [0.0, 0.0, 0.5, 0.5]),
            ((1, 0), [0.0, 0.0, 0.5, 0.5]),
            ((1, 1), [0.5, 0.5, 0.0, 0.0]),
        ];
        for ((i, j), expected) in cases {
            let s = tensor(
                &StateVector::computational(i),
                &StateVector::computational(j),
            )
            .unwrap();
            let p = probabilities(&s, Basis::Bell).unwrap();
            for k in 0..4 {
                assert_close(p[k], expected[k]);
            }
        }
    }

    #[test]
    fn bell_probabilities_of_plus_plus() {
        let s = tensor(&StateVector::plus(), &StateVector::plus()).unwrap();
        let p = probabilities(&s, Basis::Bell).unwrap();
        assert_close(p[BellOutcome::PhiPlus.index()], 0.5);
        assert_close(p[BellOutcome::PhiMinus.index()], 0.0);
        assert_close(p[BellOutcome::PsiPlus.index()], 0.5);
        assert_close(p[BellOutcome::PsiMinus.index()], 0.0);
    }

    #[test]
    fn bell_probabilities_of_zero_plus() {
        // |0⟩|+⟩ spreads uniformly over all four Bell states.
        let s = tensor(&StateVector::zero(), &StateVector::plus()).unwrap();
        let p = probabilities(&s, Basis::Bell).unwrap();
        for k in 0..4 {
            assert_close(p[k], 0.25);
        }
    }

    #[test]
    fn probabilities_reject_dim_mismatch() {
        assert!(probabilities(&StateVector::zero(), Basis::Bell).is_err());
        let pair = tensor(&StateVector::zero(), &StateVector::zero()).unwrap();
        assert!(probabilities(&pair, Basis::Computational).is_err());
        assert!(probabilities(&pair, Basis::Hadamard).is_err());
    }

    #[test]
    fn measure_eigenstate_is_deterministic() {
        let mut rng = RandomStream::from_seed(1);
        for _ in 0..20 {
            let (o, collapsed) =
                measure(&StateVector::zero(), Basis::Computational, &mut rng).unwrap();
            assert_eq!(o, Outcome::Bit(0));
            assert!(collapsed.approx_eq(&StateVector::zero(), 0.0));
        }
    }

    #[test]
    fn measure_plus_in_computational_is_uniform() {
        let mut rng = RandomStream::from_seed(2);
        let mut ones = 0usize;
        let trials = 20_000;
        for _ in 0..trials {
            let (o, _) = measure(&StateVector::plus(), Basis::Computational, &mut rng).unwrap();
            if o == Outcome::Bit(1) {
                ones += 1;
            }
        }
        let freq = ones as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.015, "freq = {freq}");
    }

    #[test]
    fn measure_plus_plus_in_bell_never_gives_minus_states() {
        let mut rng = RandomStream::from_seed(3);
        let s = tensor(&StateVector::plus(), &StateVector::plus()).unwrap();
        for _ in 0..200 {
            let (o, _) = measure(&s, Basis::Bell, &mut rng).unwrap();
            assert!(
                matches!(
                    o,
                    Outcome::Bell(BellOutcome::PhiPlus) | Outcome::Bell(BellOutcome::PsiPlus)
                ),
                "unexpected outcome {o:?}"
            );
        }
    }

    #[test]
    fn measurement_idempotence() {
        let mut rng = RandomStream::from_seed(4);
        let states = [
            (StateVector::plus(), Basis::Computational),
            (StateVector::minus(), Basis::Hadamard),
            (
                tensor(&StateVector::plus(), &StateVector::zero()).unwrap(),
                Basis::Bell,
            ),
        ];
        for (s, basis) in states {
            for _ in 0..20 {
                let (o1, c1) = measure(&s, basis, &mut rng).unwrap();
                let (o2, c2) = measure(&c1, basis, &mut rng).unwrap();
                assert_eq!(o1, o2);
                assert!(c1.approx_eq(&c2, 0.0));
            }
        }
    }

    #[test]
    fn cnot_basis_map() {
        let states = [
            ((0u8, 0u8), (0u8, 0u8)),
            ((0, 1), (0, 1)),
            ((1, 0), (1, 1)),
            ((1, 1), (1, 0)),
        ];
        for ((i, j), (x, y)) in states {
            let input = tensor(
                &StateVector::computational(i),
                &StateVector::computational(j),
            )
            .unwrap();
            let expected = tensor(
                &StateVector::computational(x),
                &StateVector::computational(y),
            )
            .unwrap();
            assert!(cnot(&input).unwrap().approx_eq(&expected, 0.0));
        }
    }

    #[test]
    fn cnot_entangles_plus_zero() {
        // |+⟩|0⟩ ↦ (|00⟩ + |11⟩)/√2 = |φ⁺⟩, by linearity of the basis map.
        let input = tensor(&StateVector::plus(), &StateVector::zero()).unwrap();
        let out = cnot(&input).unwrap();
        assert!(out.approx_eq(&StateVector::bell(BellOutcome::PhiPlus), NORM_TOLERANCE));
    }

    #[test]
    fn cnot_rejects_single_qubit() {
        assert!(cnot(&StateVector::plus()).is_err());
    }

    #[test]
    fn measure_qubit_collapses_entangled_pair() {
        let mut rng = RandomStream::from_seed(5);
        let phi_plus = StateVector::bell(BellOutcome::PhiPlus);
        for _ in 0..50 {
            let (bit, collapsed) = measure_qubit(&phi_plus, 0, &mut rng).unwrap();
            let expected = tensor(
                &StateVector::computational(bit),
                &StateVector::computational(bit),
            )
            .unwrap();
            assert!(collapsed.approx_eq(&expected, NORM_TOLERANCE));
        }
    }

    #[test]
    fn factor_pair_recovers_products() {
        let a = StateVector::minus();
        let b = StateVector::one();
        let joint = tensor(&a, &b).unwrap();
        let (fa, fb) = factor_pair(&joint).unwrap();
        assert!(tensor(&fa, &fb).unwrap().approx_eq(&joint, 1e-12));
    }

    #[test]
    fn factor_pair_rejects_entangled() {
        assert!(factor_pair(&StateVector::bell(BellOutcome::PsiMinus)).is_none());
    }

    proptest! {
        #[test]
        fn norm_preserved_by_cnot_and_probabilities_complete(
            re in proptest::collection::vec(-1.0f64..1.0, 4),
            im in proptest::collection::vec(-1.0f64..1.0, 4),
        ) {
            let raw: Vec<Complex64> = re.iter().zip(&im)
                .map(|(&r, &i)| Complex64::new(r, i)).collect();
            let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
            prop_assume!(norm > 1e-3);
            let scale = 1.0 / norm.sqrt();
            let amps: Vec<Complex64> = raw.iter().map(|a| a * scale).collect();
            let state = StateVector::new(amps).unwrap();

            let gated = cnot(&state).unwrap();
            prop_assert!((gated.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);

            // CNOT is an involution.
            let back = cnot(&gated).unwrap();
            prop_assert!(back.approx_eq(&state, NORM_TOLERANCE));

            let probs = probabilities(&state, Basis::Bell).unwrap();
            let total: f64 = probs.iter().sum();
            prop_assert!((total - 1.0).abs() < NORM_TOLERANCE);
        }

        #[test]
        fn factor_pair_roundtrips_random_products(
            a_re in -1.0f64..1.0, a_im in -1.0f64..1.0,
            b_re in -1.0f64..1.0, b_im in -1.0f64..1.0,
        ) {
            let make = |re: f64, im: f64| {
                let raw = [Complex64::new(re, im), Complex64::new(1.0 - re, im * 0.5)];
                let norm: f64 = raw.iter().map(|x| x.norm_sqr()).sum();
                prop_assume!(norm > 1e-3);
                let s = 1.0 / norm.sqrt();
                Ok(StateVector::new(raw.iter().map(|x| x * s).collect()).unwrap())
            };
            let a = make(a_re, a_im)?;
            let b = make(b_re, b_im)?;
            let joint = tensor(&a, &b).unwrap();
            let (fa, fb) = factor_pair(&joint).expect("product state must factor");
            prop_assert!(tensor(&fa, &fb).unwrap().approx_eq(&joint, 1e-9));
        }
    }
}
