//! Dense complex Hermitian linear algebra on small matrices.
//!
//! Everything downstream (effects, POVMs, feasibility blocks) is carried by
//! [`HermitianMatrix`]. The eigensolver embeds a d×d complex Hermitian matrix
//! into the real symmetric 2d×2d matrix `[[Re, -Im], [Im, Re]]`, runs a real
//! symmetric eigendecomposition, and recombines the doubled eigenpairs into
//! complex ones. Eigenvector bases inside degenerate eigenspaces are
//! arbitrary; callers must only rely on spectral projectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Tolerance (relative to `max(1, ‖M‖_F)`) above which an anti-Hermitian
/// part is rejected instead of averaged away.
pub const HERMITICITY_TOL: f64 = 1e-8;

/// Relative tolerance for pairing the doubled eigenvalues of the real
/// embedding back into complex eigenpairs.
const PAIRING_TOL: f64 = 1e-8;

/// Accuracy required from the eigensolver: reconstruction and unitarity
/// residuals relative to `max(1, ‖H‖_F)`.
const EIG_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// A general (not necessarily Hermitian) square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.data[k * dim + k] = Complex64::ONE;
        }
        m
    }

    /// Build from nested rows; fails on ragged or empty input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::InvalidInput("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::InvalidInput(format!(
                    "matrix is not square: {} rows but a row of length {}",
                    dim,
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            for k in 0..dim {
                m.data[j * dim + k] = f(j, k);
            }
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() || u.is_empty() {
            return Err(LinalgError::InvalidInput("outer product dims".into()));
        }
        Ok(Self::from_fn(u.len(), |j, k| u[j] * v[k].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for j in 0..d {
            for l in 0..d {
                let a = self.data[j * d + l];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..d {
                    out.data[j * d + k] += a * other.data[l * d + k];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |j, k| self.data[k * d + j].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.data[k * self.dim + k]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Kronecker product; the left factor indexes the slow (first) subsystem.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut out = Self::zeros(d);
        for j1 in 0..da {
            for k1 in 0..da {
                let a = self.data[j1 * da + k1];
                if a == Complex64::ZERO {
                    continue;
                }
                for j2 in 0..db {
                    for k2 in 0..db {
                        out.data[(j1 * db + j2) * d + (k1 * db + k2)] =
                            a * other.data[j2 * db + k2];
                    }
                }
            }
        }
        out
    }

    /// Partial trace over the second (fast) factor of a `d1*d2` square matrix.
    pub fn partial_trace_right(&self, d1: usize, d2: usize) -> Result<Self> {
        if d1 * d2 != self.dim {
            return Err(LinalgError::InvalidInput(format!(
                "partial trace: {}x{} factors do not match dim {}",
                d1, d2, self.dim
            )));
        }
        let mut out = Self::zeros(d1);
        for j in 0..d1 {
            for k in 0..d1 {
                let mut s = Complex64::ZERO;
                for q in 0..d2 {
                    s += self.get(j * d2 + q, k * d2 + q);
                }
                out.set(j, k, s);
            }
        }
        Ok(out)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(LinalgError::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

/// A validated complex Hermitian matrix.
///
/// Construction averages the input with its conjugate transpose, so the
/// stored entries satisfy `entries[j][k] == conj(entries[k][j])` exactly.
/// Inputs whose anti-Hermitian part exceeds `1e-8 * max(1, ‖M‖_F)` are
/// rejected rather than silently repaired.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Hermitize and validate a general complex matrix.
    pub fn from_complex(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(LinalgError::InvalidInput(
                "matrix has non-finite entries".into(),
            ));
        }
        let d = m.dim();
        let scale = f64::max(1.0, m.frobenius_norm());
        let mut anti_sq = 0.0;
        let mut data = vec![Complex64::ZERO; d * d];
        for j in 0..d {
            let z = m.get(j, j);
            anti_sq += z.im * z.im;
            data[j * d + j] = Complex64::new(z.re, 0.0);
            for k in (j + 1)..d {
                let a = m.get(j, k);
                let b = m.get(k, j);
                let avg = (a + b.conj()) * 0.5;
                let dev = (a - b.conj()) * 0.5;
                anti_sq += 2.0 * dev.norm_sqr();
                data[j * d + k] = avg;
                data[k * d + j] = avg.conj();
            }
        }
        let anti = anti_sq.sqrt();
        if anti > HERMITICITY_TOL * scale {
            return Err(LinalgError::InvalidInput(format!(
                "matrix is not Hermitian: anti-Hermitian norm {:.3e} exceeds {:.3e}",
                anti,
                HERMITICITY_TOL * scale
            )));
        }
        Ok(Self { dim: d, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        Self::from_complex(&ComplexMatrix::from_rows(rows)?)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.data[k * dim + k] = Complex64::ONE;
        }
        m
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let d = entries.len();
        let mut m = Self::zeros(d);
        for (k, &x) in entries.iter().enumerate() {
            m.data[k * d + k] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Build from an upper-triangle closure; the lower triangle is mirrored
    /// conjugate and diagonal imaginary parts are dropped, so the stored
    /// entries are exactly conjugate-symmetric by construction.
    pub(crate) fn from_upper(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            let z = f(j, j);
            m.data[j * dim + j] = Complex64::new(z.re, 0.0);
            for k in (j + 1)..dim {
                let z = f(j, k);
                m.data[j * dim + k] = z;
                m.data[k * dim + j] = z.conj();
            }
        }
        m
    }

    /// Kronecker product of Hermitian matrices (again Hermitian; entrywise
    /// products of exactly mirrored entries stay exactly mirrored).
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut out = Self::zeros(d);
        for j1 in 0..da {
            for k1 in 0..da {
                let a = self.data[j1 * da + k1];
                if a == Complex64::ZERO {
                    continue;
                }
                for j2 in 0..db {
                    for k2 in 0..db {
                        out.data[(j1 * db + j2) * d + (k1 * db + k2)] =
                            a * other.data[j2 * db + k2];
                    }
                }
            }
        }
        out
    }

    /// Rank-one projector `|ψ⟩⟨ψ|` (ψ need not be normalized).
    pub fn projector(psi: &[Complex64]) -> Self {
        let d = psi.len();
        let mut m = Self::zeros(d);
        for j in 0..d {
            for k in 0..d {
                m.data[j * d + k] = psi[j] * psi[k].conj();
            }
        }
        // products z*conj(z) put rounding junk on the diagonal imag part
        for j in 0..d {
            m.data[j * d + j].im = 0.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    /// Scale by a real factor (complex factors would break Hermiticity).
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|k| self.data[k * self.dim + k].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Tr[A B]`, real for a Hermitian pair. The imaginary residue must stay
    /// below `1e-12 * max(1, ‖A‖‖B‖)` and is discarded.
    pub fn frobenius_inner(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        // Tr[AB] = Σ_jk A_jk B_kj = Σ_jk A_jk conj(B_jk)
        let mut re = 0.0;
        let mut im = 0.0;
        for (a, b) in self.data.iter().zip(&other.data) {
            re += a.re * b.re + a.im * b.im;
            im += a.im * b.re - a.re * b.im;
        }
        let scale = f64::max(1.0, self.frobenius_norm() * other.frobenius_norm());
        if im.abs() > 1e-12 * scale {
            return Err(LinalgError::Numerical(format!(
                "inner product has imaginary residue {:.3e}",
                im
            )));
        }
        Ok(re)
    }

    /// `⟨ψ|H|ψ⟩` for a basis-independent scalar probe.
    pub fn expectation(&self, psi: &[Complex64]) -> Result<f64> {
        if psi.len() != self.dim {
            return Err(LinalgError::InvalidInput(
                "expectation: vector dimension mismatch".into(),
            ));
        }
        let mut s = Complex64::ZERO;
        for j in 0..self.dim {
            for k in 0..self.dim {
                s += psi[j].conj() * self.data[j * self.dim + k] * psi[k];
            }
        }
        Ok(s.re)
    }

    /// Eigendecomposition with eigenvalues sorted ascending.
    pub fn eigendecomposition(&self) -> Result<EigenDecomposition> {
        eigendecompose(self)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigendecomposition()?.eigenvalues[0])
    }

    /// Frobenius-nearest positive semidefinite matrix (eigenvalue clipping).
    pub fn psd_projection(&self) -> Result<Self> {
        let eig = self.eigendecomposition()?;
        let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        eig.reassemble(&clipped)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(LinalgError::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// a unitary matrix of eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Rebuild `V diag(values) V†` for a replacement spectrum.
    pub fn reassemble(&self, values: &[f64]) -> Result<HermitianMatrix> {
        let d = self.eigenvectors.dim();
        if values.len() != d {
            return Err(LinalgError::InvalidInput(
                "reassemble: spectrum length mismatch".into(),
            ));
        }
        let mut out = ComplexMatrix::zeros(d);
        for (c, &lambda) in values.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            for j in 0..d {
                let vj = self.eigenvectors.get(j, c);
                if vj == Complex64::ZERO {
                    continue;
                }
                for k in 0..d {
                    let add = vj * self.eigenvectors.get(k, c).conj() * lambda;
                    out.set(j, k, out.get(j, k) + add);
                }
            }
        }
        HermitianMatrix::from_complex(&out)
    }
}

/// Complex Hermitian eigendecomposition through the real symmetric
/// `[[Re, -Im], [Im, Re]]` embedding. Every eigenvalue of the embedding
/// appears twice; paired real eigenvectors are recombined into complex
/// ones by pivoted Gram-Schmidt within each eigenvalue group.
fn eigendecompose(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let d = h.dim;
    if !h.to_complex().is_finite() {
        return Err(LinalgError::InvalidInput(
            "matrix has non-finite entries".into(),
        ));
    }
    let mut emb = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for j in 0..d {
        for k in 0..d {
            let z = h.data[j * d + k];
            emb[(j, k)] = z.re;
            emb[(j, k + d)] = -z.im;
            emb[(j + d, k)] = z.im;
            emb[(j + d, k + d)] = z.re;
        }
    }
    let sym = nalgebra::SymmetricEigen::new(emb);

    // sort the 2d real eigenpairs ascending
    let mut order: Vec<usize> = (0..2 * d).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[a].total_cmp(&sym.eigenvalues[b]));
    let lam: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let spread = f64::max(lam[0].abs(), lam[2 * d - 1].abs()).max(1.0);
    let pair_tol = PAIRING_TOL * spread;

    // complex form of each real eigenvector: z = w[0..d] + i w[d..2d]
    let complex_form = |col: usize| -> Vec<Complex64> {
        (0..d)
            .map(|j| Complex64::new(sym.eigenvectors[(j, col)], sym.eigenvectors[(j + d, col)]))
            .collect()
    };

    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(d);
    let mut start = 0;
    while start < 2 * d {
        let mut end = start + 1;
        while end < 2 * d && lam[end] - lam[end - 1] <= pair_tol {
            end += 1;
        }
        let group = end - start;
        if group % 2 != 0 {
            return Err(LinalgError::Numerical(format!(
                "eigenvalue group of odd size {} in the real embedding",
                group
            )));
        }
        // pivoted Gram-Schmidt over the complex forms of the group
        let mut residuals: Vec<(f64, Vec<Complex64>)> = (start..end)
            .map(|i| (lam[i], complex_form(order[i])))
            .collect();
        for _ in 0..group / 2 {
            let (best, _) = residuals
                .iter()
                .enumerate()
                .map(|(i, (_, v))| (i, vec_norm(v)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty group");
            let (lambda, mut u) = residuals.swap_remove(best);
            let n = vec_norm(&u);
            if n < 1e-6 {
                return Err(LinalgError::Numerical(
                    "degenerate pivot while recombining eigenvectors".into(),
                ));
            }
            for z in &mut u {
                *z /= n;
            }
            for (_, r) in &mut residuals {
                let c = vec_inner(&u, r);
                for (rj, uj) in r.iter_mut().zip(&u) {
                    *rj -= c * uj;
                }
            }
            pairs.push((lambda, u));
        }
        start = end;
    }

    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues: Vec<f64> = pairs.iter().map(|(l, _)| *l).collect();
    let mut eigenvectors = ComplexMatrix::zeros(d);
    for (c, (_, v)) in pairs.iter().enumerate() {
        for j in 0..d {
            eigenvectors.set(j, c, v[j]);
        }
    }
    let decomp = EigenDecomposition {
        eigenvalues,
        eigenvectors,
    };
    verify_decomposition(h, &decomp)?;
    Ok(decomp)
}

fn verify_decomposition(h: &HermitianMatrix, decomp: &EigenDecomposition) -> Result<()> {
    let d = h.dim;
    let v = &decomp.eigenvectors;
    let gram = v.adjoint().matmul(v)?;
    let unit_res = gram.sub(&ComplexMatrix::identity(d))?.frobenius_norm();
    if unit_res > EIG_RESIDUAL_TOL {
        return Err(LinalgError::Numerical(format!(
            "eigenvector unitarity residual {:.3e}",
            unit_res
        )));
    }
    let mut rebuilt = ComplexMatrix::zeros(d);
    for (c, &lambda) in decomp.eigenvalues.iter().enumerate() {
        for j in 0..d {
            let vj = v.get(j, c);
            for k in 0..d {
                rebuilt.set(j, k, rebuilt.get(j, k) + vj * v.get(k, c).conj() * lambda);
            }
        }
    }
    let recon_res = rebuilt.sub(&h.to_complex())?.frobenius_norm();
    let bound = EIG_RESIDUAL_TOL * f64::max(1.0, h.frobenius_norm());
    if recon_res > bound {
        return Err(LinalgError::Numerical(format!(
            "eigendecomposition reconstruction residual {:.3e} exceeds {:.3e}",
            recon_res, bound
        )));
    }
    Ok(())
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn vec_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

// --- wire format -----------------------------------------------------------
//
// Matrices travel as nested row-major arrays with each entry a `[re, im]`
// pair of decimal numbers.

fn entries_to_wire(dim: usize, data: &[Complex64]) -> Vec<Vec<[f64; 2]>> {
    (0..dim)
        .map(|j| {
            (0..dim)
                .map(|k| {
                    let z = data[j * dim + k];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        entries_to_wire(self.dim, &self.data).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        entries_to_wire(self.dim, &self.data).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        HermitianMatrix::from_complex(&m).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> HermitianMatrix {
        HermitianMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let eig = HermitianMatrix::identity(3).eigendecomposition().unwrap();
        for l in eig.eigenvalues {
            assert_relative_eq!(l, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let h = HermitianMatrix::diagonal(&[2.0, -1.0]);
        let eig = h.eigendecomposition().unwrap();
        assert_relative_eq!(eig.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(eig.eigenvalues[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn two_by_two_with_imaginary_offdiagonal() {
        // [[1, i], [-i, 1]] has characteristic polynomial λ² - 2λ,
        // hence eigenvalues 0 and 2.
        let h = HermitianMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let eig = h.eigendecomposition().unwrap();
        assert_relative_eq!(eig.eigenvalues[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(eig.eigenvalues[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_projection_clips_eigenvalues() {
        let h = HermitianMatrix::diagonal(&[1.0, -1.0]);
        let p = h.psd_projection().unwrap();
        let expected = HermitianMatrix::diagonal(&[1.0, 0.0]);
        assert!(p.sub(&expected).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn psd_projection_of_sigma_x() {
        // σ_x has eigenvalues ±1; clipping -1 leaves |+⟩⟨+| = [[.5,.5],[.5,.5]].
        let p = sigma_x().psd_projection().unwrap();
        for j in 0..2 {
            for k in 0..2 {
                assert_relative_eq!(p.get(j, k).re, 0.5, epsilon = 1e-12);
                assert_relative_eq!(p.get(j, k).im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn psd_projection_fixes_psd_inputs() {
        let p = HermitianMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.3, 0.4)],
            vec![c(0.3, -0.4), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(p.min_eigenvalue().unwrap() > 0.0);
        let q = p.psd_projection().unwrap();
        assert!(q.sub(&p).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn frobenius_inner_basics() {
        let i3 = HermitianMatrix::identity(3);
        assert_relative_eq!(i3.frobenius_inner(&i3).unwrap(), 3.0, epsilon = 1e-12);
        let a = HermitianMatrix::diagonal(&[1.0, 0.0]);
        let b = HermitianMatrix::diagonal(&[0.0, 1.0]);
        assert_relative_eq!(a.frobenius_inner(&b).unwrap(), 0.0, epsilon = 1e-12);
        let sx = sigma_x();
        assert_relative_eq!(sx.frobenius_inner(&sx).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert_relative_eq!(
            HermitianMatrix::identity(3).min_eigenvalue().unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            HermitianMatrix::diagonal(&[0.3, -0.2]).min_eigenvalue().unwrap(),
            -0.2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn hermitization_rejects_gross_asymmetry() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(HermitianMatrix::from_complex(&m).is_err());
    }

    #[test]
    fn hermitization_rejects_non_finite() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(f64::NAN, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(HermitianMatrix::from_complex(&m).is_err());
    }

    #[test]
    fn stored_entries_exactly_conjugate_symmetric() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1e-12), c(0.25, 0.125)],
            vec![c(0.25, -0.125), c(2.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianMatrix::from_complex(&m).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                assert_eq!(h.get(j, k), h.get(k, j).conj());
            }
        }
    }

    #[test]
    fn degenerate_spectrum_projectors_are_recovered() {
        // diag(1, 1, 3) conjugated by a fixed unitary mixing the degenerate
        // subspace; only projector-level quantities are checked.
        let theta = 0.7_f64;
        let u = ComplexMatrix::from_rows(&[
            vec![c(theta.cos(), 0.0), c(-theta.sin(), 0.0), c(0.0, 0.0)],
            vec![c(theta.sin(), 0.0), c(theta.cos(), 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let diag = HermitianMatrix::diagonal(&[1.0, 1.0, 3.0]).to_complex();
        let h = HermitianMatrix::from_complex(&u.matmul(&diag).unwrap().matmul(&u.adjoint()).unwrap())
            .unwrap();
        let eig = h.eigendecomposition().unwrap();
        assert_relative_eq!(eig.eigenvalues[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(eig.eigenvalues[1], 1.0, epsilon = 1e-10);
        assert_relative_eq!(eig.eigenvalues[2], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn wire_format_round_trip() {
        let h = HermitianMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.1, -0.2)],
            vec![c(0.1, 0.2), c(0.5, 0.0)],
        ])
        .unwrap();
        let text = serde_json::to_string(&h).unwrap();
        let back: HermitianMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(h, back);
    }
}
