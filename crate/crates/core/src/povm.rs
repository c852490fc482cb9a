//! Effects, finite-outcome POVMs, and range queries.
//!
//! Outcome sets are finite and carry the full power-set algebra, so the
//! range of a POVM is exactly the set of subset sums of its effects.
//! Outcome indices are 0-based throughout.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, HermitianMatrix, LinalgError};

/// Default tolerance for effect and POVM validation, one order looser than
/// the eigensolver accuracy.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Hard cap on outcome count for exhaustive subset-sum searches.
pub const MAX_SUBSET_OUTCOMES: usize = 25;

/// A single violated POVM invariant, with the effect index and the margin
/// by which the bound failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PovmViolation {
    NonHermitian { index: usize, residual: f64 },
    NotPositive { index: usize, min_eigenvalue: f64 },
    NotSubIdentity { index: usize, min_eigenvalue: f64 },
    SumNotIdentity { residual: f64 },
}

impl std::fmt::Display for PovmViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonHermitian { index, residual } => {
                write!(f, "effect {index} is not Hermitian (residual {residual:.3e})")
            }
            Self::NotPositive { index, min_eigenvalue } => write!(
                f,
                "effect {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})"
            ),
            Self::NotSubIdentity { index, min_eigenvalue } => write!(
                f,
                "effect {index} exceeds the identity (min eigenvalue of 1-E is {min_eigenvalue:.3e})"
            ),
            Self::SumNotIdentity { residual } => {
                write!(f, "effects do not sum to the identity (residual {residual:.3e})")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PovmError {
    #[error("invalid POVM: {}", format_violations(.0))]
    Invalid(Vec<PovmViolation>),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0} outcomes exceed the subset-sum cap of {MAX_SUBSET_OUTCOMES}")]
    TooManyOutcomes(usize),
    #[error("a single-outcome observable has no binary coarse-grainings")]
    SingleOutcome,
    #[error("padding target {target} is below the current outcome count {current}")]
    PaddingTooSmall { target: usize, current: usize },
    #[error("mixing weight {0} is outside [0, 1]")]
    MixWeightOutOfRange(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn format_violations(v: &[PovmViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, PovmError>;

/// An operator `E` with `0 ≤ E ≤ 1`, both bounds within a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Effect {
    matrix: HermitianMatrix,
}

impl Effect {
    pub fn new(matrix: HermitianMatrix, tol: f64) -> Result<Self> {
        let mut violations = Vec::new();
        check_effect_bounds(&matrix, 0, tol, &mut violations)?;
        if violations.is_empty() {
            Ok(Self { matrix })
        } else {
            Err(PovmError::Invalid(violations))
        }
    }

    /// Wrap a matrix that is already known to satisfy the effect bounds
    /// (e.g. convex mixtures of validated effects).
    pub(crate) fn trusted(matrix: HermitianMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

fn check_effect_bounds(
    m: &HermitianMatrix,
    index: usize,
    tol: f64,
    violations: &mut Vec<PovmViolation>,
) -> Result<()> {
    let lo = m.min_eigenvalue()?;
    if lo < -tol {
        violations.push(PovmViolation::NotPositive {
            index,
            min_eigenvalue: lo,
        });
    }
    let hi = HermitianMatrix::identity(m.dim()).sub(m)?.min_eigenvalue()?;
    if hi < -tol {
        violations.push(PovmViolation::NotSubIdentity {
            index,
            min_eigenvalue: hi,
        });
    }
    Ok(())
}

/// A finite-outcome observable: a list of effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<Effect>,
}

impl Povm {
    /// Validate a list of Hermitian matrices as a POVM.
    pub fn new(matrices: Vec<HermitianMatrix>, tol: f64) -> Result<Self> {
        if matrices.is_empty() {
            return Err(PovmError::Parse("a POVM needs at least one effect".into()));
        }
        let dim = matrices[0].dim();
        let mut violations = Vec::new();
        let mut sum = HermitianMatrix::zeros(dim);
        for (k, m) in matrices.iter().enumerate() {
            if m.dim() != dim {
                return Err(PovmError::DimensionMismatch(dim, m.dim()));
            }
            check_effect_bounds(m, k, tol, &mut violations)?;
            sum = sum.add(m)?;
        }
        let residual = sum.sub(&HermitianMatrix::identity(dim))?.frobenius_norm();
        if residual > tol {
            violations.push(PovmViolation::SumNotIdentity { residual });
        }
        if !violations.is_empty() {
            return Err(PovmError::Invalid(violations));
        }
        Ok(Self {
            dim,
            effects: matrices.into_iter().map(Effect::trusted).collect(),
        })
    }

    /// Validate raw complex matrices, collecting every violated invariant
    /// instead of stopping at the first.
    pub fn from_raw(matrices: &[ComplexMatrix], tol: f64) -> Result<Self> {
        if matrices.is_empty() {
            return Err(PovmError::Parse("a POVM needs at least one effect".into()));
        }
        let dim = matrices[0].dim();
        let mut violations = Vec::new();
        let mut hermitized = Vec::with_capacity(matrices.len());
        for (k, m) in matrices.iter().enumerate() {
            if m.dim() != dim {
                return Err(PovmError::DimensionMismatch(dim, m.dim()));
            }
            match HermitianMatrix::from_complex(m) {
                Ok(h) => hermitized.push(h),
                Err(_) => {
                    let anti = m.sub(&m.adjoint()).map(|d| d.frobenius_norm() / 2.0);
                    violations.push(PovmViolation::NonHermitian {
                        index: k,
                        residual: anti.unwrap_or(f64::NAN),
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(PovmError::Invalid(violations));
        }
        let mut sum = HermitianMatrix::zeros(dim);
        for (k, h) in hermitized.iter().enumerate() {
            check_effect_bounds(h, k, tol, &mut violations)?;
            sum = sum.add(h)?;
        }
        let residual = sum.sub(&HermitianMatrix::identity(dim))?.frobenius_norm();
        if residual > tol {
            violations.push(PovmViolation::SumNotIdentity { residual });
        }
        if !violations.is_empty() {
            return Err(PovmError::Invalid(violations));
        }
        Ok(Self {
            dim,
            effects: hermitized.into_iter().map(Effect::trusted).collect(),
        })
    }

    /// The k-outcome uniformly random observable (each effect `1/k`).
    pub fn trivial(outcomes: usize, dim: usize) -> Self {
        assert!(outcomes >= 1 && dim >= 1, "trivial POVM needs k,d >= 1");
        let e = HermitianMatrix::identity(dim).scale(1.0 / outcomes as f64);
        Self {
            dim,
            effects: (0..outcomes).map(|_| Effect::trusted(e.clone())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn effect(&self, outcome: usize) -> &HermitianMatrix {
        self.effects[outcome].matrix()
    }

    /// Outcome distribution `p_k = Tr[ρ A_k]` in the given state.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(PovmError::DimensionMismatch(self.dim, rho.dim()));
        }
        self.effects
            .iter()
            .map(|e| Ok(rho.matrix().frobenius_inner(e.matrix())?))
            .collect()
    }

    /// Convex mixture `λ·A_k + (1-λ)·1/n` toward the uniformly random
    /// observable with the same outcome count.
    pub fn mix_with_trivial(&self, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(PovmError::MixWeightOutOfRange(weight));
        }
        let n = self.num_outcomes() as f64;
        let noise = HermitianMatrix::identity(self.dim).scale((1.0 - weight) / n);
        let effects = self
            .effects
            .iter()
            .map(|e| Ok(Effect::trusted(e.matrix().scale(weight).add(&noise)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: self.dim,
            effects,
        })
    }

    /// All binary coarse-grainings, one canonical representative per
    /// complementary subset pair (the representative contains outcome 0).
    pub fn binary_margins(&self) -> Result<Vec<BinaryMargin>> {
        let n = self.num_outcomes();
        if n < 2 {
            return Err(PovmError::SingleOutcome);
        }
        let mut subsets: Vec<BTreeSet<usize>> = Vec::with_capacity((1usize << (n - 1)) - 1);
        // masks over outcomes 1..n, with outcome 0 always included
        for rest in 0..(1u64 << (n - 1)) {
            let mut subset = BTreeSet::new();
            subset.insert(0);
            for bit in 0..(n - 1) {
                if rest >> bit & 1 == 1 {
                    subset.insert(bit + 1);
                }
            }
            if subset.len() < n {
                subsets.push(subset);
            }
        }
        subsets.sort_by(|a, b| {
            let ka: Vec<usize> = a.iter().copied().collect();
            let kb: Vec<usize> = b.iter().copied().collect();
            ka.cmp(&kb)
        });
        subsets.into_iter().map(|s| self.margin_for(&s)).collect()
    }

    fn margin_for(&self, subset: &BTreeSet<usize>) -> Result<BinaryMargin> {
        let mut yes = HermitianMatrix::zeros(self.dim);
        for &k in subset {
            yes = yes.add(self.effect(k))?;
        }
        let no = HermitianMatrix::identity(self.dim).sub(&yes)?;
        Ok(BinaryMargin {
            subset: subset.clone(),
            povm: Povm {
                dim: self.dim,
                effects: vec![Effect::trusted(yes), Effect::trusted(no)],
            },
        })
    }

    /// Append zero effects until the outcome count reaches `target`.
    pub fn pad_with_zero(&self, target: usize) -> Result<Self> {
        let n = self.num_outcomes();
        if target < n {
            return Err(PovmError::PaddingTooSmall { target, current: n });
        }
        let mut effects = self.effects.clone();
        effects.resize(target, Effect::trusted(HermitianMatrix::zeros(self.dim)));
        Ok(Self {
            dim: self.dim,
            effects,
        })
    }

    /// Exhaustive search for a subset of outcomes whose effects sum to
    /// `target` within `tol` (Frobenius). Returns the lexicographically
    /// smallest qualifying subset, or `None`.
    ///
    /// Subsets are ordered by their sorted index sequences, so `{}` comes
    /// first, then `{0}`, `{0,1}`, `{0,1,2}`, ..., `{0,2}`, ..., `{1}`, ...
    pub fn subset_summing_to(
        &self,
        target: &HermitianMatrix,
        tol: f64,
    ) -> Result<Option<BTreeSet<usize>>> {
        let k = self.num_outcomes();
        if k > MAX_SUBSET_OUTCOMES {
            return Err(PovmError::TooManyOutcomes(k));
        }
        if target.dim() != self.dim {
            return Err(PovmError::DimensionMismatch(self.dim, target.dim()));
        }
        let target_trace = target.trace();
        let mut chosen: Vec<usize> = Vec::new();
        let mut running = HermitianMatrix::zeros(self.dim);
        self.subset_search(target, target_trace, tol, 0, &mut chosen, &mut running)
    }

    fn subset_search(
        &self,
        target: &HermitianMatrix,
        target_trace: f64,
        tol: f64,
        next: usize,
        chosen: &mut Vec<usize>,
        running: &mut HermitianMatrix,
    ) -> Result<Option<BTreeSet<usize>>> {
        if running.sub(target)?.frobenius_norm() <= tol {
            return Ok(Some(chosen.iter().copied().collect()));
        }
        for k in next..self.num_outcomes() {
            let with = running.add(self.effect(k))?;
            // effects have nonnegative trace, so supersets only grow it
            if with.trace() > target_trace + tol {
                continue;
            }
            chosen.push(k);
            let saved = std::mem::replace(running, with);
            if let Some(hit) =
                self.subset_search(target, target_trace, tol, k + 1, chosen, running)?
            {
                return Ok(Some(hit));
            }
            *running = saved;
            chosen.pop();
        }
        Ok(None)
    }

    /// Parse the POVM file format: `{"dim": d, "effects": [matrix, ...]}`
    /// with matrices in the nested `[re, im]` wire format. Trailing content
    /// and dimension mismatches are rejected.
    pub fn from_json_str(text: &str, tol: f64) -> Result<Self> {
        let file: PovmFile =
            serde_json::from_str(text).map_err(|e| PovmError::Parse(e.to_string()))?;
        if file.effects.is_empty() {
            return Err(PovmError::Parse("file contains no effects".into()));
        }
        for (k, m) in file.effects.iter().enumerate() {
            if m.dim() != file.dim {
                return Err(PovmError::Parse(format!(
                    "effect {} has dimension {} but the file declares dim {}",
                    k,
                    m.dim(),
                    file.dim
                )));
            }
        }
        Povm::from_raw(&file.effects, tol)
    }

    pub fn to_json_string(&self) -> String {
        let file = PovmFile {
            dim: self.dim,
            effects: self.effects.iter().map(|e| e.matrix().to_complex()).collect(),
        };
        serde_json::to_string_pretty(&file).expect("POVM serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PovmFile {
    dim: usize,
    effects: Vec<ComplexMatrix>,
}

/// A density matrix: positive semidefinite with unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix, tol: f64) -> Result<Self> {
        let lo = matrix.min_eigenvalue()?;
        if lo < -tol {
            return Err(PovmError::Invalid(vec![PovmViolation::NotPositive {
                index: 0,
                min_eigenvalue: lo,
            }]));
        }
        let tr = matrix.trace();
        if (tr - 1.0).abs() > tol {
            return Err(PovmError::Parse(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        Ok(Self { matrix })
    }

    /// The pure state `|ψ⟩⟨ψ|` (ψ is normalized first).
    pub fn pure(psi: &[num_complex::Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(PovmError::Parse("state vector must be nonzero".into()));
        }
        let scaled: Vec<_> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            matrix: HermitianMatrix::projector(&scaled),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: HermitianMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// A binary coarse-graining `(A(X), 1 - A(X))` of an observable, with the
/// canonical subset `X` containing outcome 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMargin {
    subset: BTreeSet<usize>,
    povm: Povm,
}

impl BinaryMargin {
    pub fn subset(&self) -> &BTreeSet<usize> {
        &self.subset
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn into_povm(self) -> Povm {
        self.povm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::counterexample;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn counterexample_povms_validate() {
        let cx = counterexample();
        let a = Povm::new(
            cx.a().effects().iter().map(|e| e.matrix().clone()).collect(),
            VALIDATION_TOL,
        );
        assert!(a.is_ok());
    }

    #[test]
    fn single_outcome_identity_is_valid() {
        let p = Povm::new(vec![HermitianMatrix::identity(2)], VALIDATION_TOL).unwrap();
        assert_eq!(p.num_outcomes(), 1);
    }

    #[test]
    fn constructed_violations_are_all_reported() {
        let e1 = HermitianMatrix::diagonal(&[1.5, 0.0]);
        let e2 = HermitianMatrix::diagonal(&[-0.5, 1.0]);
        let err = Povm::new(vec![e1, e2], VALIDATION_TOL).unwrap_err();
        match err {
            PovmError::Invalid(violations) => {
                assert!(violations
                    .iter()
                    .any(|v| matches!(v, PovmViolation::NotSubIdentity { index: 0, .. })));
                assert!(violations
                    .iter()
                    .any(|v| matches!(v, PovmViolation::NotPositive { index: 1, .. })));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn trivial_povm_shapes() {
        let t = Povm::trivial(2, 2);
        assert_eq!(t.num_outcomes(), 2);
        for e in t.effects() {
            assert!(
                e.matrix()
                    .sub(&HermitianMatrix::identity(2).scale(0.5))
                    .unwrap()
                    .frobenius_norm()
                    < 1e-15
            );
        }
        assert_eq!(Povm::trivial(1, 3).num_outcomes(), 1);
    }

    #[test]
    fn trivial_probabilities_are_uniform() {
        let rho = DensityMatrix::pure(&[c(0.3, 0.1), c(-0.7, 0.2), c(0.1, 0.6)]).unwrap();
        let p = Povm::trivial(4, 3).outcome_probabilities(&rho).unwrap();
        for x in p {
            assert_relative_eq!(x, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn counterexample_probabilities() {
        let cx = counterexample();
        let basis1 = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let p = cx.a().outcome_probabilities(&basis1).unwrap();
        assert_relative_eq!(p[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(p[1], 0.5, epsilon = 1e-12);
        assert_relative_eq!(p[2], 0.5, epsilon = 1e-12);

        let psi = DensityMatrix::pure(cx.psi()).unwrap();
        let q = cx.b().outcome_probabilities(&psi).unwrap();
        assert_relative_eq!(q[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(q[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn mixing_endpoints() {
        let cx = counterexample();
        let a = cx.a();
        let same = a.mix_with_trivial(1.0).unwrap();
        for (e, f) in a.effects().iter().zip(same.effects()) {
            assert!(e.matrix().sub(f.matrix()).unwrap().frobenius_norm() < 1e-15);
        }
        let noise = a.mix_with_trivial(0.0).unwrap();
        let trivial = Povm::trivial(3, 3);
        for (e, f) in noise.effects().iter().zip(trivial.effects()) {
            assert!(e.matrix().sub(f.matrix()).unwrap().frobenius_norm() < 1e-15);
        }
        assert!(a.mix_with_trivial(1.5).is_err());
    }

    #[test]
    fn half_mix_of_b_matches_direct_arithmetic() {
        let cx = counterexample();
        let mixed = cx.b().mix_with_trivial(0.5).unwrap();
        // ½·B_1 + ¼·1 = ¼|ψ⟩⟨ψ| + ¼·1
        let expected = HermitianMatrix::projector(cx.psi())
            .scale(0.25)
            .add(&HermitianMatrix::identity(3).scale(0.25))
            .unwrap();
        assert!(mixed.effect(0).sub(&expected).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn margin_counts_and_subsets() {
        let cx = counterexample();
        let b_margins = cx.b().binary_margins().unwrap();
        assert_eq!(b_margins.len(), 1);
        assert!(
            b_margins[0]
                .povm()
                .effect(0)
                .sub(cx.b().effect(0))
                .unwrap()
                .frobenius_norm()
                < 1e-15
        );

        let a_margins = cx.a().binary_margins().unwrap();
        let subsets: Vec<Vec<usize>> = a_margins
            .iter()
            .map(|m| m.subset().iter().copied().collect())
            .collect();
        assert_eq!(subsets, vec![vec![0], vec![0, 1], vec![0, 2]]);

        let four = Povm::trivial(4, 2).binary_margins().unwrap();
        assert_eq!(four.len(), 7);

        assert!(matches!(
            Povm::trivial(1, 2).binary_margins(),
            Err(PovmError::SingleOutcome)
        ));
    }

    #[test]
    fn margins_pass_validation() {
        let cx = counterexample();
        for m in cx.m().binary_margins().unwrap() {
            let effs = m.povm().effects().iter().map(|e| e.matrix().clone()).collect();
            assert!(Povm::new(effs, VALIDATION_TOL).is_ok());
        }
    }

    #[test]
    fn padding_behaviour() {
        let cx = counterexample();
        let padded = cx.b().pad_with_zero(3).unwrap();
        assert_eq!(padded.num_outcomes(), 3);
        assert!(padded.effect(2).frobenius_norm() == 0.0);
        let same = cx.b().pad_with_zero(2).unwrap();
        assert_eq!(same, *cx.b());
        assert!(cx.b().pad_with_zero(1).is_err());

        // margins of (B_1, B_2, 0): one of the three is the trivial (1, 0) pair
        let margins = padded.binary_margins().unwrap();
        assert_eq!(margins.len(), 3);
        let trivial_count = margins
            .iter()
            .filter(|m| {
                m.povm()
                    .effect(0)
                    .sub(&HermitianMatrix::identity(3))
                    .unwrap()
                    .frobenius_norm()
                    < 1e-12
            })
            .count();
        assert_eq!(trivial_count, 1);
    }

    #[test]
    fn subset_sums_for_counterexample_targets() {
        let cx = counterexample();
        let m = cx.m();
        let hit = m.subset_summing_to(cx.a().effect(0), 1e-9).unwrap().unwrap();
        assert_eq!(hit.into_iter().collect::<Vec<_>>(), vec![1, 2]);

        let zero = m
            .subset_summing_to(&HermitianMatrix::zeros(3), 1e-9)
            .unwrap()
            .unwrap();
        assert!(zero.is_empty());

        let full = m
            .subset_summing_to(&HermitianMatrix::identity(3), 1e-9)
            .unwrap()
            .unwrap();
        assert_eq!(full.len(), m.num_outcomes());
    }

    #[test]
    fn subset_sum_cap() {
        let p = Povm::trivial(26, 2);
        assert!(matches!(
            p.subset_summing_to(&HermitianMatrix::zeros(2), 1e-9),
            Err(PovmError::TooManyOutcomes(26))
        ));
    }

    #[test]
    fn file_format_round_trip_and_rejections() {
        let cx = counterexample();
        let text = cx.a().to_json_string();
        let back = Povm::from_json_str(&text, VALIDATION_TOL).unwrap();
        assert_eq!(*cx.a(), back);

        // trailing garbage
        let with_garbage = format!("{text} trailing");
        assert!(matches!(
            Povm::from_json_str(&with_garbage, VALIDATION_TOL),
            Err(PovmError::Parse(_))
        ));

        // mismatched dims
        let bad = r#"{"dim": 3, "effects": [[[ [1,0],[0,0] ],[ [0,0],[1,0] ]]]}"#;
        assert!(matches!(
            Povm::from_json_str(bad, VALIDATION_TOL),
            Err(PovmError::Parse(_))
        ));

        // non-square matrix
        let ragged = r#"{"dim": 2, "effects": [[[ [1,0],[0,0],[0,0] ],[ [0,0],[1,0],[0,0] ]]]}"#;
        assert!(matches!(
            Povm::from_json_str(ragged, VALIDATION_TOL),
            Err(PovmError::Parse(_))
        ));

        // effects summing to 2·identity
        let double = r#"{"dim": 2, "effects": [
            [[ [1,0],[0,0] ],[ [0,0],[1,0] ]],
            [[ [1,0],[0,0] ],[ [0,0],[1,0] ]]
        ]}"#;
        assert!(matches!(
            Povm::from_json_str(double, VALIDATION_TOL),
            Err(PovmError::Invalid(_))
        ));
    }
}
