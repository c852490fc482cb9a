//! Block-structured semidefinite feasibility.
//!
//! A problem asks for Hermitian blocks `X_1..X_v`, each positive
//! semidefinite, satisfying affine constraints. Two constraint shapes are
//! supported:
//!
//! - [`AffinePsdProblem`]: plain linear combinations `Σ_b K[c][b]·X_b = T_c`
//!   with a real coefficient matrix `K` (marginal equations of joint
//!   observables have this shape);
//! - [`PartialTraceProblem`]: weighted partial traces
//!   `Σ_b K[c][b]·Tr_2[X_b (1⊗W_c)] = T_c` (instrument constraints in the
//!   Choi representation have this shape).
//!
//! Both are solved by Dykstra's alternating projections between the product
//! of PSD cones (blockwise eigenvalue clipping) and the affine constraint
//! subspace. When the two sets are disjoint the displacement between them
//! converges to a separating functional, from which a dual witness is
//! assembled; [`verify_witness`] turns that numerical hint into a rigorous
//! infeasibility certificate.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{HermitianMatrix, LinalgError};
use crate::povm::Povm;

/// Targets must be orthogonal to the kernel of the constraint Gram matrix
/// within this bound, or the problem is rejected as inconsistent.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// Margin in the witness certification inequality `ω < -ε·v·τ - MARGIN`.
pub const WITNESS_MARGIN: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, FeasibilityError>;

/// Solver configuration. The defaults match the library-wide contracts:
/// feasible verdicts have constraint residual and eigenvalue slack within
/// `feas_tol`; infeasible verdicts carry a verified witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub max_iters: usize,
    pub feas_tol: f64,
    /// Window (in iterations) over which displacement stabilization is judged.
    pub stall_window: usize,
    /// Relative displacement change below which the iteration is declared
    /// stalled; a stalled run without a verified witness is Indeterminate.
    pub stall_rel: f64,
    /// Relative displacement change below which witness extraction is tried.
    pub witness_attempt_rel: f64,
    /// Cadence of feasibility checks and witness attempts.
    pub check_every: usize,
    /// Record per-iteration affine step norms in the diagnostics.
    pub record_history: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            feas_tol: 1e-8,
            stall_window: 200,
            stall_rel: 1e-9,
            witness_attempt_rel: 1e-6,
            check_every: 25,
            record_history: false,
        }
    }
}

/// Farkas-style dual certificate of infeasibility.
///
/// If blocks `X_b ⪰ 0` satisfying the constraints existed, then
/// `ω = Σ_c ⟨Y_c, T_c⟩ = Σ_b ⟨S_b, X_b⟩ ≥ -ε_cone·v·τ` where
/// `S_b` is the adjoint image of the duals and `ε_cone` its distance from
/// the PSD cone. A witness with `ω < -ε_cone·v·τ - 1e-9` therefore proves
/// infeasibility, up to floating-point eigenvalue bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Dual multipliers, one per constraint, normalized so the largest
    /// Frobenius norm is 1.
    pub duals: Vec<HermitianMatrix>,
    /// `ε_cone = max(0, -min_b λ_min(S_b))`.
    pub cone_slack: f64,
    /// `ω = Σ_c ⟨Y_c, T_c⟩`.
    pub objective: f64,
}

impl Witness {
    /// Normalize raw duals and precompute slack and objective against a
    /// problem. The stored numbers are for reporting; [`verify_witness`]
    /// recomputes them.
    pub fn from_duals<P: FeasibilityProblem>(mut duals: Vec<HermitianMatrix>, problem: &P) -> Self {
        let max_norm = duals
            .iter()
            .map(|y| y.frobenius_norm())
            .fold(0.0, f64::max);
        if max_norm > 0.0 {
            for y in &mut duals {
                *y = y.scale(1.0 / max_norm);
            }
        }
        let (cone_slack, objective) = witness_quantities(&duals, problem).unwrap_or((f64::INFINITY, 0.0));
        Self {
            duals,
            cone_slack,
            objective,
        }
    }
}

/// Solver diagnostics attached to every outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Constraint residual of the last cone-side iterate.
    pub constraint_residual: f64,
    /// Smallest block eigenvalue of the last affine-side iterate.
    pub min_block_eigenvalue: f64,
    /// Norm of the displacement between the affine and cone iterates.
    pub displacement_norm: f64,
    /// Distances between successive affine iterates, when history recording
    /// is enabled.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub affine_step_norms: Vec<f64>,
}

/// Result of a feasibility solve. Payloads are status-dependent: feasible
/// outcomes carry the blocks, infeasible ones a verified witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum FeasibilityOutcome {
    Feasible {
        blocks: Vec<HermitianMatrix>,
        diagnostics: Diagnostics,
    },
    Infeasible {
        witness: Witness,
        diagnostics: Diagnostics,
    },
    Indeterminate {
        diagnostics: Diagnostics,
    },
}

impl FeasibilityOutcome {
    pub fn diagnostics(&self) -> &Diagnostics {
        match self {
            Self::Feasible { diagnostics, .. }
            | Self::Infeasible { diagnostics, .. }
            | Self::Indeterminate { diagnostics } => diagnostics,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Self::Infeasible { .. })
    }
}

/// A feasibility problem over PSD-constrained Hermitian blocks with affine
/// constraints. `apply` evaluates the constraint map, `adjoint` its adjoint,
/// and `gram_pinv` the pseudoinverse of the constraint Gram operator,
/// applied coordinatewise.
pub trait FeasibilityProblem {
    fn num_blocks(&self) -> usize;
    fn block_dim(&self) -> usize;
    fn num_constraints(&self) -> usize;
    /// Dimension of the constraint-value matrices.
    fn constraint_dim(&self) -> usize;
    fn targets(&self) -> &[HermitianMatrix];
    /// Upper bound on `Tr[X_b]` valid for every feasible block.
    fn trace_bound(&self) -> f64;
    fn apply(&self, blocks: &[HermitianMatrix]) -> Vec<HermitianMatrix>;
    fn adjoint(&self, duals: &[HermitianMatrix]) -> Vec<HermitianMatrix>;
    fn gram_pinv(&self, values: &[HermitianMatrix]) -> Vec<HermitianMatrix>;

    /// Frobenius-nearest block tuple satisfying the affine constraints:
    /// `x - L*(G⁺(Φ(x) - T))`.
    fn project_affine(&self, blocks: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        let mut residuals = self.apply(blocks);
        for (r, t) in residuals.iter_mut().zip(self.targets()) {
            *r = r.sub(t).expect("constraint dims");
        }
        let duals = self.gram_pinv(&residuals);
        let correction = self.adjoint(&duals);
        blocks
            .iter()
            .zip(&correction)
            .map(|(x, c)| x.sub(c).expect("block dims"))
            .collect()
    }

    /// Least-squares dual candidate from a displacement direction:
    /// `argmin_Y ‖L*Y - z‖ = G⁺(Φ(z))`.
    fn least_squares_duals(&self, displacement: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        self.gram_pinv(&self.apply(displacement))
    }
}

/// Shared constraint-Gram machinery: pseudoinverse (applied coordinatewise
/// over constraint-value matrices) and target consistency checking through
/// the Gram kernel.
#[derive(Debug, Clone)]
struct GramCore {
    pinv: DMatrix<f64>,
}

impl GramCore {
    /// Eigendecompose the (symmetric PSD) Gram matrix, build its
    /// pseudoinverse, and reject targets with components along the kernel:
    /// any `y` with `G y = 0` must satisfy `Σ_c y_c T_c = 0` within 1e-8.
    fn new(gram: DMatrix<f64>, targets: &[HermitianMatrix]) -> Result<Self> {
        let c = gram.nrows();
        let eig = nalgebra::SymmetricEigen::new(gram);
        let max_ev = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let cut = 1e-12 * max_ev.max(1.0);
        let mut pinv = DMatrix::<f64>::zeros(c, c);
        for k in 0..c {
            let lambda = eig.eigenvalues[k];
            let vk = eig.eigenvectors.column(k);
            if lambda.abs() > cut {
                let w = 1.0 / lambda;
                for i in 0..c {
                    for j in 0..c {
                        pinv[(i, j)] += w * vk[i] * vk[j];
                    }
                }
            } else {
                // kernel direction: targets must have no component along it
                let dim = targets[0].dim();
                let mut combo = HermitianMatrix::zeros(dim);
                for (i, t) in targets.iter().enumerate() {
                    combo = combo.add(&t.scale(vk[i]))?;
                }
                let res = combo.frobenius_norm();
                if res > CONSISTENCY_TOL {
                    return Err(FeasibilityError::InvalidProblem(format!(
                        "targets are inconsistent: kernel combination has norm {res:.3e}"
                    )));
                }
            }
        }
        Ok(Self { pinv })
    }

    /// Apply the pseudoinverse to each scalar coordinate of the constraint
    /// value matrices.
    fn apply(&self, values: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        let c = values.len();
        let dim = values[0].dim();
        (0..c)
            .map(|i| {
                HermitianMatrix::from_upper(dim, |r, s| {
                    let mut z = num_complex::Complex64::ZERO;
                    for (j, v) in values.iter().enumerate() {
                        let w = self.pinv[(i, j)];
                        if w != 0.0 {
                            z += v.get(r, s) * w;
                        }
                    }
                    z
                })
            })
            .collect()
    }
}

/// Feasibility with plain linear-combination constraints
/// `Σ_b K[c][b]·X_b = T_c` over PSD blocks of a common dimension.
#[derive(Debug, Clone)]
pub struct AffinePsdProblem {
    block_dim: usize,
    coeff: Vec<Vec<f64>>,
    targets: Vec<HermitianMatrix>,
    trace_bound: f64,
    core: GramCore,
    /// Present when the constraints are exactly the row/column marginal
    /// equations of an n×m block grid, enabling the closed-form projection.
    marginal_shape: Option<(usize, usize)>,
}

impl AffinePsdProblem {
    pub fn new(
        block_dim: usize,
        coeff: Vec<Vec<f64>>,
        targets: Vec<HermitianMatrix>,
        trace_bound: f64,
    ) -> Result<Self> {
        if coeff.is_empty() || coeff[0].is_empty() {
            return Err(FeasibilityError::InvalidProblem(
                "empty coefficient matrix".into(),
            ));
        }
        let c = coeff.len();
        let v = coeff[0].len();
        for row in &coeff {
            if row.len() != v {
                return Err(FeasibilityError::InvalidProblem(
                    "ragged coefficient matrix".into(),
                ));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(FeasibilityError::InvalidProblem(
                    "non-finite coefficient".into(),
                ));
            }
        }
        if targets.len() != c {
            return Err(FeasibilityError::InvalidProblem(format!(
                "{} targets for {} constraints",
                targets.len(),
                c
            )));
        }
        for t in &targets {
            if t.dim() != block_dim {
                return Err(FeasibilityError::InvalidProblem(format!(
                    "target dimension {} does not match block dimension {}",
                    t.dim(),
                    block_dim
                )));
            }
        }
        let mut gram = DMatrix::<f64>::zeros(c, c);
        for i in 0..c {
            for j in 0..c {
                gram[(i, j)] = (0..v).map(|b| coeff[i][b] * coeff[j][b]).sum();
            }
        }
        let core = GramCore::new(gram, &targets)?;
        Ok(Self {
            block_dim,
            coeff,
            targets,
            trace_bound,
            core,
            marginal_shape: None,
        })
    }

    /// The joint-observable marginal problem for a collection of POVMs on a
    /// common Hilbert space: one PSD block per outcome tuple, and for every
    /// observable `l` and outcome `y` the constraint
    /// `Σ_{g : g_l = y} G_g = B^(l)_y`.
    ///
    /// Tuples are enumerated in row-major order (observable 0 varies
    /// slowest); constraints are ordered by observable, then outcome.
    pub fn marginal_problem(observables: &[Povm]) -> Result<Self> {
        if observables.is_empty() {
            return Err(FeasibilityError::InvalidProblem(
                "marginal problem needs at least one observable".into(),
            ));
        }
        let dim = observables[0].dim();
        if observables.iter().any(|p| p.dim() != dim) {
            return Err(FeasibilityError::InvalidProblem(
                "observables live on different Hilbert spaces".into(),
            ));
        }
        let counts: Vec<usize> = observables.iter().map(|p| p.num_outcomes()).collect();
        let v: usize = counts.iter().product();
        let c: usize = counts.iter().sum();
        let mut coeff = vec![vec![0.0; v]; c];
        let mut targets = Vec::with_capacity(c);
        let mut row = 0;
        for (l, obs) in observables.iter().enumerate() {
            // block index stride of observable l in the row-major tuple layout
            let stride: usize = counts[l + 1..].iter().product();
            for y in 0..counts[l] {
                for (g, item) in coeff[row].iter_mut().enumerate() {
                    if (g / stride) % counts[l] == y {
                        *item = 1.0;
                    }
                }
                targets.push(obs.effect(y).clone());
                row += 1;
            }
        }
        let mut problem = Self::new(dim, coeff, targets, dim as f64)?;
        if observables.len() == 2 {
            problem.marginal_shape = Some((counts[0], counts[1]));
        }
        Ok(problem)
    }

    pub fn coeff(&self) -> &[Vec<f64>] {
        &self.coeff
    }

    /// Generic least-squares projection through the Gram pseudoinverse,
    /// bypassing the closed-form marginal fast path.
    pub fn project_affine_via_pseudoinverse(
        &self,
        blocks: &[HermitianMatrix],
    ) -> Vec<HermitianMatrix> {
        let mut residuals = self.apply(blocks);
        for (r, t) in residuals.iter_mut().zip(self.targets()) {
            *r = r.sub(t).expect("constraint dims");
        }
        let duals = self.gram_pinv(&residuals);
        let correction = self.adjoint(&duals);
        blocks
            .iter()
            .zip(&correction)
            .map(|(x, c)| x.sub(c).expect("block dims"))
            .collect()
    }

    /// Closed-form projection onto the row/column marginal subspace of an
    /// n×m block grid:
    /// `x'_ij = x_ij + (a_i - r_i)/m + (b_j - c_j)/n - (s - t)/(nm)`.
    /// Target inconsistency (row totals vs column totals) is split evenly
    /// first, which makes the result match the pseudoinverse projection.
    fn project_affine_marginal(
        &self,
        blocks: &[HermitianMatrix],
        n: usize,
        m: usize,
    ) -> Vec<HermitianMatrix> {
        let d = self.block_dim;
        let zero = HermitianMatrix::zeros(d);
        let a = &self.targets[..n];
        let b = &self.targets[n..];

        let total_a = a.iter().fold(zero.clone(), |acc, t| acc.add(t).expect("dims"));
        let total_b = b.iter().fold(zero.clone(), |acc, t| acc.add(t).expect("dims"));
        let gap = total_a.sub(&total_b).expect("dims").scale(1.0 / (n + m) as f64);
        let a_eff: Vec<_> = a.iter().map(|t| t.sub(&gap).expect("dims")).collect();
        let b_eff: Vec<_> = b.iter().map(|t| t.add(&gap).expect("dims")).collect();

        let mut row_sums = vec![zero.clone(); n];
        let mut col_sums = vec![zero.clone(); m];
        for i in 0..n {
            for j in 0..m {
                let x = &blocks[i * m + j];
                row_sums[i] = row_sums[i].add(x).expect("dims");
                col_sums[j] = col_sums[j].add(x).expect("dims");
            }
        }
        let grand_total = row_sums
            .iter()
            .fold(zero.clone(), |acc, r| acc.add(r).expect("dims"));
        let s = a_eff
            .iter()
            .fold(zero, |acc, t| acc.add(t).expect("dims"));
        let uniform = s
            .sub(&grand_total)
            .expect("dims")
            .scale(1.0 / (n * m) as f64);

        let row_corr: Vec<_> = (0..n)
            .map(|i| a_eff[i].sub(&row_sums[i]).expect("dims").scale(1.0 / m as f64))
            .collect();
        let col_corr: Vec<_> = (0..m)
            .map(|j| b_eff[j].sub(&col_sums[j]).expect("dims").scale(1.0 / n as f64))
            .collect();

        (0..n * m)
            .map(|g| {
                let (i, j) = (g / m, g % m);
                blocks[g]
                    .add(&row_corr[i])
                    .expect("dims")
                    .add(&col_corr[j])
                    .expect("dims")
                    .sub(&uniform)
                    .expect("dims")
            })
            .collect()
    }
}

impl FeasibilityProblem for AffinePsdProblem {
    fn num_blocks(&self) -> usize {
        self.coeff[0].len()
    }

    fn block_dim(&self) -> usize {
        self.block_dim
    }

    fn num_constraints(&self) -> usize {
        self.coeff.len()
    }

    fn constraint_dim(&self) -> usize {
        self.block_dim
    }

    fn targets(&self) -> &[HermitianMatrix] {
        &self.targets
    }

    fn trace_bound(&self) -> f64 {
        self.trace_bound
    }

    fn apply(&self, blocks: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        self.coeff
            .iter()
            .map(|row| {
                let mut acc = HermitianMatrix::zeros(self.block_dim);
                for (k, x) in row.iter().zip(blocks) {
                    if *k != 0.0 {
                        acc = acc.add(&x.scale(*k)).expect("block dims");
                    }
                }
                acc
            })
            .collect()
    }

    fn adjoint(&self, duals: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        (0..self.num_blocks())
            .map(|b| {
                let mut acc = HermitianMatrix::zeros(self.block_dim);
                for (row, y) in self.coeff.iter().zip(duals) {
                    if row[b] != 0.0 {
                        acc = acc.add(&y.scale(row[b])).expect("block dims");
                    }
                }
                acc
            })
            .collect()
    }

    fn gram_pinv(&self, values: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        self.core.apply(values)
    }

    fn project_affine(&self, blocks: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        match self.marginal_shape {
            Some((n, m)) => self.project_affine_marginal(blocks, n, m),
            None => self.project_affine_via_pseudoinverse(blocks),
        }
    }
}

/// Feasibility with weighted partial-trace constraints
/// `Σ_b K[c][b]·Tr_2[X_b (1 ⊗ W_c)] = T_c` over PSD blocks on a bipartite
/// space of dimension `kept_dim · traced_dim`.
///
/// The constraint Gram operator factors as
/// `G[c][c'] = (K K^T)[c][c'] · Tr[W_c W_c']` acting coordinatewise, so the
/// same pseudoinverse projection applies.
#[derive(Debug, Clone)]
pub struct PartialTraceProblem {
    kept_dim: usize,
    traced_dim: usize,
    coeff: Vec<Vec<f64>>,
    weights: Vec<HermitianMatrix>,
    targets: Vec<HermitianMatrix>,
    trace_bound: f64,
    core: GramCore,
}

impl PartialTraceProblem {
    pub fn new(
        kept_dim: usize,
        traced_dim: usize,
        coeff: Vec<Vec<f64>>,
        weights: Vec<HermitianMatrix>,
        targets: Vec<HermitianMatrix>,
        trace_bound: f64,
    ) -> Result<Self> {
        if coeff.is_empty() || coeff[0].is_empty() {
            return Err(FeasibilityError::InvalidProblem(
                "empty coefficient matrix".into(),
            ));
        }
        let c = coeff.len();
        let v = coeff[0].len();
        if coeff.iter().any(|row| row.len() != v) {
            return Err(FeasibilityError::InvalidProblem(
                "ragged coefficient matrix".into(),
            ));
        }
        if weights.len() != c || targets.len() != c {
            return Err(FeasibilityError::InvalidProblem(
                "weights/targets must match the constraint count".into(),
            ));
        }
        if weights.iter().any(|w| w.dim() != traced_dim)
            || targets.iter().any(|t| t.dim() != kept_dim)
        {
            return Err(FeasibilityError::InvalidProblem(
                "weight or target dimension mismatch".into(),
            ));
        }
        let mut gram = DMatrix::<f64>::zeros(c, c);
        for i in 0..c {
            for j in 0..c {
                let kk: f64 = (0..v).map(|b| coeff[i][b] * coeff[j][b]).sum();
                let wg = weights[i]
                    .frobenius_inner(&weights[j])
                    .map_err(FeasibilityError::from)?;
                gram[(i, j)] = kk * wg;
            }
        }
        let core = GramCore::new(gram, &targets)?;
        Ok(Self {
            kept_dim,
            traced_dim,
            coeff,
            weights,
            targets,
            trace_bound,
            core,
        })
    }
}

/// `Tr_2[X (1 ⊗ W)]` for `X` on the `kept·traced`-dimensional space.
fn weighted_partial_trace(
    x: &HermitianMatrix,
    w: &HermitianMatrix,
    kept: usize,
    traced: usize,
) -> HermitianMatrix {
    HermitianMatrix::from_upper(kept, |k, kp| {
        let mut z = num_complex::Complex64::ZERO;
        for q in 0..traced {
            for qp in 0..traced {
                z += x.get(k * traced + q, kp * traced + qp) * w.get(qp, q);
            }
        }
        z
    })
}

impl FeasibilityProblem for PartialTraceProblem {
    fn num_blocks(&self) -> usize {
        self.coeff[0].len()
    }

    fn block_dim(&self) -> usize {
        self.kept_dim * self.traced_dim
    }

    fn num_constraints(&self) -> usize {
        self.coeff.len()
    }

    fn constraint_dim(&self) -> usize {
        self.kept_dim
    }

    fn targets(&self) -> &[HermitianMatrix] {
        &self.targets
    }

    fn trace_bound(&self) -> f64 {
        self.trace_bound
    }

    fn apply(&self, blocks: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        self.coeff
            .iter()
            .zip(&self.weights)
            .map(|(row, w)| {
                let mut acc = HermitianMatrix::zeros(self.kept_dim);
                for (k, x) in row.iter().zip(blocks) {
                    if *k != 0.0 {
                        let pt = weighted_partial_trace(x, w, self.kept_dim, self.traced_dim);
                        acc = acc.add(&pt.scale(*k)).expect("constraint dims");
                    }
                }
                acc
            })
            .collect()
    }

    fn adjoint(&self, duals: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        (0..self.num_blocks())
            .map(|b| {
                let mut acc = HermitianMatrix::zeros(self.block_dim());
                for ((row, w), y) in self.coeff.iter().zip(&self.weights).zip(duals) {
                    if row[b] != 0.0 {
                        acc = acc.add(&y.kron(w).scale(row[b])).expect("block dims");
                    }
                }
                acc
            })
            .collect()
    }

    fn gram_pinv(&self, values: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        self.core.apply(values)
    }
}

/// Verify an infeasibility witness: with `S_b` the adjoint image of the
/// duals, `ε_cone = max(0, -min_b λ_min(S_b))`, `v` blocks and trace bound
/// `τ`, the witness is certified iff `ω < -(ε_cone·v·τ) - 1e-9`.
///
/// Any structural or numerical failure counts as "not certified".
pub fn verify_witness<P: FeasibilityProblem>(witness: &Witness, problem: &P) -> bool {
    match witness_quantities(&witness.duals, problem) {
        Ok((cone_slack, objective)) => {
            objective
                < -(cone_slack * problem.num_blocks() as f64 * problem.trace_bound())
                    - WITNESS_MARGIN
        }
        Err(_) => false,
    }
}

fn witness_quantities<P: FeasibilityProblem>(
    duals: &[HermitianMatrix],
    problem: &P,
) -> Result<(f64, f64)> {
    if duals.len() != problem.num_constraints()
        || duals.iter().any(|y| y.dim() != problem.constraint_dim())
    {
        return Err(FeasibilityError::InvalidProblem(
            "witness shape does not match the problem".into(),
        ));
    }
    let images = problem.adjoint(duals);
    let mut min_eig = f64::INFINITY;
    for s in &images {
        min_eig = min_eig.min(s.min_eigenvalue()?);
    }
    let cone_slack = (-min_eig).max(0.0);
    let mut objective = 0.0;
    for (y, t) in duals.iter().zip(problem.targets()) {
        objective += y.frobenius_inner(t)?;
    }
    Ok((cone_slack, objective))
}

/// Decide feasibility by Dykstra's alternating projections from the all-zero
/// starting point. Returns `Feasible` with blocks satisfying both the cone
/// and constraint tolerances, `Infeasible` with a witness passing
/// [`verify_witness`], or `Indeterminate` when the iteration budget or a
/// stalled displacement is exhausted without a certificate. Deterministic
/// for identical inputs and configuration.
pub fn solve<P: FeasibilityProblem>(problem: &P, config: &SolveConfig) -> Result<FeasibilityOutcome> {
    let v = problem.num_blocks();
    let d = problem.block_dim();
    let mut cone: Vec<HermitianMatrix> = vec![HermitianMatrix::zeros(d); v];
    let mut increment = cone.clone();
    let mut history: VecDeque<f64> = VecDeque::with_capacity(config.stall_window + 1);
    let mut affine_steps: Vec<f64> = Vec::new();
    let mut prev_affine: Option<Vec<HermitianMatrix>> = None;

    let mut last_residual = f64::NAN;
    let mut last_min_eig = f64::NAN;

    for iter in 1..=config.max_iters {
        let affine = problem.project_affine(&cone);
        if config.record_history {
            if let Some(prev) = &prev_affine {
                affine_steps.push(tuple_distance(&affine, prev));
            }
        }

        // cone step with Dykstra increments; eigenvalue clipping blockwise
        let mut new_cone = Vec::with_capacity(v);
        for b in 0..v {
            let w = affine[b].add(&increment[b])?;
            let eig = w.eigendecomposition()?;
            let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
            let projected = eig.reassemble(&clipped)?;
            increment[b] = w.sub(&projected)?;
            new_cone.push(projected);
        }

        let displacement: Vec<HermitianMatrix> = new_cone
            .iter()
            .zip(&affine)
            .map(|(x, y)| x.sub(y).expect("block dims"))
            .collect();
        let disp_norm = tuple_norm(&displacement);
        history.push_back(disp_norm);
        if history.len() > config.stall_window + 1 {
            history.pop_front();
        }

        let due = iter % config.check_every == 0
            || iter == config.max_iters
            || disp_norm <= config.feas_tol;
        if due {
            let mut min_eig = f64::INFINITY;
            for y in &affine {
                min_eig = min_eig.min(y.min_eigenvalue()?);
            }
            last_min_eig = min_eig;
            last_residual = residual_norm(problem, &new_cone);
            let diagnostics = |steps: &[f64]| Diagnostics {
                iterations: iter,
                constraint_residual: last_residual,
                min_block_eigenvalue: last_min_eig,
                displacement_norm: disp_norm,
                affine_step_norms: steps.to_vec(),
            };

            if min_eig >= -config.feas_tol {
                return Ok(FeasibilityOutcome::Feasible {
                    blocks: affine,
                    diagnostics: diagnostics(&affine_steps),
                });
            }
            if last_residual <= config.feas_tol {
                return Ok(FeasibilityOutcome::Feasible {
                    blocks: new_cone,
                    diagnostics: diagnostics(&affine_steps),
                });
            }

            if disp_norm > 10.0 * config.feas_tol && history.len() > config.stall_window {
                let oldest = history.front().copied().unwrap_or(f64::INFINITY);
                let rel = (oldest - disp_norm).abs() / disp_norm.max(1e-300);
                if rel < config.witness_attempt_rel {
                    let duals = problem.least_squares_duals(&displacement);
                    let witness = Witness::from_duals(duals, problem);
                    if verify_witness(&witness, problem) {
                        return Ok(FeasibilityOutcome::Infeasible {
                            witness,
                            diagnostics: diagnostics(&affine_steps),
                        });
                    }
                    if rel < config.stall_rel {
                        // displacement has frozen but certifies nothing
                        return Ok(FeasibilityOutcome::Indeterminate {
                            diagnostics: diagnostics(&affine_steps),
                        });
                    }
                }
            }
        }

        if config.record_history {
            prev_affine = Some(affine);
        }
        cone = new_cone;
    }

    Ok(FeasibilityOutcome::Indeterminate {
        diagnostics: Diagnostics {
            iterations: config.max_iters,
            constraint_residual: last_residual,
            min_block_eigenvalue: last_min_eig,
            displacement_norm: history.back().copied().unwrap_or(f64::NAN),
            affine_step_norms: affine_steps,
        },
    })
}

/// Global Frobenius norm of the constraint residual `Φ(X) - T`.
pub fn residual_norm<P: FeasibilityProblem>(problem: &P, blocks: &[HermitianMatrix]) -> f64 {
    let values = problem.apply(blocks);
    values
        .iter()
        .zip(problem.targets())
        .map(|(v, t)| {
            let r = v.sub(t).expect("constraint dims").frobenius_norm();
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

fn tuple_norm(blocks: &[HermitianMatrix]) -> f64 {
    blocks
        .iter()
        .map(|b| {
            let n = b.frobenius_norm();
            n * n
        })
        .sum::<f64>()
        .sqrt()
}

fn tuple_distance(a: &[HermitianMatrix], b: &[HermitianMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let n = x.sub(y).expect("block dims").frobenius_norm();
            n * n
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::counterexample;
    use crate::povm::Povm;

    fn jm_problem(a: &Povm, b: &Povm) -> AffinePsdProblem {
        AffinePsdProblem::marginal_problem(&[a.clone(), b.clone()]).unwrap()
    }

    #[test]
    fn zero_input_projection_for_trivial_pair() {
        let p = jm_problem(&Povm::trivial(3, 3), &Povm::trivial(2, 3));
        let zeros = vec![HermitianMatrix::zeros(3); 6];
        let proj = p.project_affine(&zeros);
        let expected = HermitianMatrix::identity(3).scale(1.0 / 6.0);
        for block in proj {
            assert!(block.sub(&expected).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn zero_input_projection_for_counterexample_pair() {
        // closed form for the zero start: X_ij = A_i/m + B_j/n - 1/(nm)
        let cx = counterexample();
        let p = jm_problem(cx.a(), cx.b());
        let zeros = vec![HermitianMatrix::zeros(3); 6];
        let proj = p.project_affine(&zeros);
        let third = HermitianMatrix::identity(3).scale(1.0 / 6.0);
        for i in 0..3 {
            for j in 0..2 {
                let expected = cx
                    .a()
                    .effect(i)
                    .scale(0.5)
                    .add(&cx.b().effect(j).scale(1.0 / 3.0))
                    .unwrap()
                    .sub(&third)
                    .unwrap();
                let got = &proj[i * 2 + j];
                assert!(got.sub(&expected).unwrap().frobenius_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_fixes_feasible_points() {
        let cx = counterexample();
        let p = jm_problem(cx.a(), cx.b());
        let zeros = vec![HermitianMatrix::zeros(3); 6];
        let once = p.project_affine(&zeros);
        let twice = p.project_affine(&once);
        assert!(tuple_distance(&once, &twice) < 1e-12);
        assert!(residual_norm(&p, &once) < 1e-12);
    }

    #[test]
    fn marginal_fast_path_matches_pseudoinverse() {
        let cx = counterexample();
        let p = jm_problem(cx.a(), cx.b());
        assert!(p.marginal_shape.is_some());
        // a deliberately asymmetric input
        let blocks: Vec<HermitianMatrix> = (0..6)
            .map(|k| {
                HermitianMatrix::from_upper(3, |r, s| {
                    num_complex::Complex64::new(
                        ((k + r * 3 + s) as f64 * 0.37).sin(),
                        if r == s { 0.0 } else { ((k + r + 2 * s) as f64 * 0.61).cos() * 0.2 },
                    )
                })
            })
            .collect();
        let fast = p.project_affine(&blocks);
        let generic = p.project_affine_via_pseudoinverse(&blocks);
        assert!(tuple_distance(&fast, &generic) < 1e-12);
    }

    #[test]
    fn trivial_pair_is_feasible() {
        let p = jm_problem(&Povm::trivial(3, 3), &Povm::trivial(2, 3));
        let out = solve(&p, &SolveConfig::default()).unwrap();
        assert!(out.is_feasible(), "outcome: {out:?}");
    }

    #[test]
    fn observable_with_itself_is_feasible() {
        let cx = counterexample();
        let p = jm_problem(cx.a(), cx.a());
        let out = solve(&p, &SolveConfig::default()).unwrap();
        match out {
            FeasibilityOutcome::Feasible { blocks, .. } => {
                assert!(residual_norm(&p, &blocks) <= 1e-7);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
        // the diagonal assignment X_ii = A_i is one valid certificate
        let mut diagonal = vec![HermitianMatrix::zeros(3); 9];
        for i in 0..3 {
            diagonal[i * 3 + i] = cx.a().effect(i).clone();
        }
        assert!(residual_norm(&p, &diagonal) < 1e-12);
    }

    #[test]
    fn counterexample_pair_is_infeasible_with_verified_witness() {
        let cx = counterexample();
        let p = jm_problem(cx.a(), cx.b());
        let out = solve(&p, &SolveConfig::default()).unwrap();
        match out {
            FeasibilityOutcome::Infeasible { witness, .. } => {
                assert!(verify_witness(&witness, &p));
                assert!(witness.objective < 0.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn zero_duals_do_not_certify() {
        let cx = counterexample();
        let p = jm_problem(cx.a(), cx.b());
        let zero_w = Witness {
            duals: vec![HermitianMatrix::zeros(3); 5],
            cone_slack: 0.0,
            objective: 0.0,
        };
        assert!(!verify_witness(&zero_w, &p));
    }

    #[test]
    fn displacement_of_feasible_instance_does_not_certify() {
        let p = jm_problem(&Povm::trivial(2, 2), &Povm::trivial(2, 2));
        let zeros = vec![HermitianMatrix::zeros(2); 4];
        let affine = p.project_affine(&zeros);
        // near-feasible displacement: projection minus its PSD clip
        let disp: Vec<HermitianMatrix> = affine
            .iter()
            .map(|y| y.sub(&y.psd_projection().unwrap()).unwrap())
            .collect();
        let w = Witness::from_duals(p.least_squares_duals(&disp), &p);
        assert!(!verify_witness(&w, &p));
    }

    #[test]
    fn inconsistent_targets_are_rejected_at_construction() {
        // two constraints forcing X_0 to equal two different targets
        let coeff = vec![vec![1.0], vec![1.0]];
        let targets = vec![
            HermitianMatrix::diagonal(&[1.0, 0.0]),
            HermitianMatrix::diagonal(&[0.0, 1.0]),
        ];
        let err = AffinePsdProblem::new(2, coeff, targets, 2.0);
        assert!(matches!(err, Err(FeasibilityError::InvalidProblem(_))));
    }

    #[test]
    fn partial_trace_problem_smoke() {
        // one block on C² ⊗ C², constraint Tr_2[X] = 1 (kept side)
        let p = PartialTraceProblem::new(
            2,
            2,
            vec![vec![1.0]],
            vec![HermitianMatrix::identity(2)],
            vec![HermitianMatrix::identity(2)],
            2.0,
        )
        .unwrap();
        let out = solve(&p, &SolveConfig::default()).unwrap();
        match out {
            FeasibilityOutcome::Feasible { blocks, .. } => {
                let pt = weighted_partial_trace(&blocks[0], &HermitianMatrix::identity(2), 2, 2);
                assert!(
                    pt.sub(&HermitianMatrix::identity(2)).unwrap().frobenius_norm() < 1e-7
                );
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }
}
