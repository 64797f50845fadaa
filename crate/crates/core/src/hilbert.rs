//! Density matrices, projectors and orthonormal frames on small complex
//! Hilbert spaces (2 ≤ dim ≤ 16).
//!
//! The state ρ is a trace-one positive Hermitian operator; events are
//! projection operators; a frame is a complete orthonormal basis viewed
//! as the finest experiment; a general experiment is a pairwise
//! orthogonal projector family resolving the identity. Probabilities
//! come from tr(ρP).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::seeding::rng_from_seed;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 16;

/// Tolerance for Hermiticity, positivity and trace checks.
pub const STATE_TOL: f64 = 1e-9;
/// Tolerance for frame orthonormality and experiment completeness.
pub const FRAME_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Error)]
pub enum HilbertError {
    #[error("matrix is not Hermitian: max |ρᵢⱼ − ρ̄ⱼᵢ| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e}")]
    NotPositive { eigenvalue: f64 },
    #[error("trace is {trace:.12} instead of 1")]
    TraceNotOne { trace: f64 },
    #[error("projector is not idempotent: ‖P² − P‖_max = {residual:.3e}")]
    NotIdempotent { residual: f64 },
    #[error("invalid frame: {reason}")]
    FrameInvalid { reason: String },
    #[error("invalid experiment: {reason}")]
    ExperimentInvalid { reason: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {got} outside supported range 2..={MAX_DIM}")]
    DimOutOfRange { got: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("eigenvalue solver did not converge")]
    ConvergenceFailure,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).scale(0.5)
}

fn check_dim(dim: usize) -> Result<(), HilbertError> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(HilbertError::DimOutOfRange { got: dim });
    }
    Ok(())
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<(), HilbertError> {
    let asym = max_abs(&(m - m.adjoint()));
    if asym > STATE_TOL {
        return Err(HilbertError::NotHermitian { max_asymmetry: asym });
    }
    Ok(())
}

/// Ginibre matrix: independent standard complex Gaussian entries.
fn ginibre(dim: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = rng_from_seed(seed);
    DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    })
}

// ----------------------------------------------------------------------
// Density matrices
// ----------------------------------------------------------------------

/// A validated state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validate a raw matrix as a state.
    ///
    /// Checks squareness and dimension, Hermiticity (max asymmetry ≤
    /// 1e-9), positivity (min eigenvalue ≥ −1e-9) and unit trace
    /// (|tr − 1| ≤ 1e-9), reporting the offending quantity on failure.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self, HilbertError> {
        let (r, c) = mat.shape();
        if r != c {
            return Err(HilbertError::DimensionMismatch { expected: r, got: c });
        }
        check_dim(r)?;
        check_hermitian(&mat)?;
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
            return Err(HilbertError::TraceNotOne { trace: trace.re });
        }
        let eig = hermitize(&mat)
            .try_symmetric_eigen(f64::EPSILON, 10_000)
            .ok_or(HilbertError::ConvergenceFailure)?;
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOL {
            return Err(HilbertError::NotPositive { eigenvalue: min });
        }
        Ok(DensityMatrix { dim: r, mat })
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self, HilbertError> {
        let dim = probs.len();
        let mat = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j { Complex64::new(probs[i], 0.0) } else { Complex64::default() }
        });
        Self::new(mat)
    }

    /// Pure state ρ = |ψ⟩⟨ψ| from an arbitrary nonzero vector.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self, HilbertError> {
        let norm = psi.norm();
        if norm < 1e-12 {
            return Err(HilbertError::TraceNotOne { trace: 0.0 });
        }
        let v = psi.unscale(norm);
        Self::new(&v * v.adjoint())
    }

    /// The maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Result<Self, HilbertError> {
        Self::diagonal(&vec![1.0 / dim as f64; dim])
    }

    /// Hilbert–Schmidt random mixed state GG†/tr(GG†), deterministic in
    /// the seed.
    pub fn random_mixed(dim: usize, seed: u64) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        let g = ginibre(dim, seed);
        let m = &g * g.adjoint();
        let t = m.trace().re;
        Self::new(m.unscale(t))
    }

    /// Haar-random pure state, deterministic in the seed.
    pub fn random_pure(dim: usize, seed: u64) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        let g = ginibre(dim, seed);
        let v: DVector<Complex64> = g.column(0).into_owned();
        Self::pure(&v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Eigen-decompose the state: eigenvalues descending, eigenvectors
    /// phase-normalized so each column's largest-magnitude component is
    /// real positive. Eigenvalues in [−1e-9, 0) are clamped to 0.
    ///
    /// The reassembled Σ λᵢ|vᵢ⟩⟨vᵢ| reproduces ρ to 1e-8 in max norm.
    pub fn spectral_decompose(&self) -> Result<SpectralDecomposition, HilbertError> {
        let eig = hermitize(&self.mat)
            .try_symmetric_eigen(f64::EPSILON, 10_000)
            .ok_or(HilbertError::ConvergenceFailure)?;
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[j]
                .partial_cmp(&eig.eigenvalues[i])
                .expect("finite eigenvalues")
        });
        let mut eigenvalues = Vec::with_capacity(self.dim);
        let mut vectors = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for (slot, &k) in order.iter().enumerate() {
            eigenvalues.push(eig.eigenvalues[k].max(0.0));
            let col = eig.eigenvectors.column(k);
            // Phase convention: largest-magnitude component real positive.
            let lead = col
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| {
                    a.norm().partial_cmp(&b.norm()).expect("finite components")
                })
                .map(|(i, _)| i)
                .expect("nonzero dimension");
            let z = col[lead];
            let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { Complex64::new(1.0, 0.0) };
            vectors.column_mut(slot).copy_from(&(col * phase));
        }
        let eigenframe = HilbertFrame::from_columns(vectors)?;
        Ok(SpectralDecomposition { eigenvalues, eigenframe })
    }
}

/// Result of [`DensityMatrix::spectral_decompose`].
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues in descending order, negatives clamped to zero.
    pub eigenvalues: Vec<f64>,
    /// Matching orthonormal eigenbasis.
    pub eigenframe: HilbertFrame,
}

// ----------------------------------------------------------------------
// Projectors and experiments
// ----------------------------------------------------------------------

/// A validated orthogonal projector: Hermitian and idempotent.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    dim: usize,
    mat: DMatrix<Complex64>,
}

impl Projector {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self, HilbertError> {
        let (r, c) = mat.shape();
        if r != c {
            return Err(HilbertError::DimensionMismatch { expected: r, got: c });
        }
        check_hermitian(&mat)?;
        let residual = max_abs(&(&mat * &mat - &mat));
        if residual > STATE_TOL {
            return Err(HilbertError::NotIdempotent { residual });
        }
        Ok(Projector { dim: r, mat })
    }

    /// Rank-one projector |v⟩⟨v| onto the line spanned by `v`.
    pub fn onto(v: &DVector<Complex64>) -> Result<Self, HilbertError> {
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(HilbertError::FrameInvalid { reason: "zero vector".into() });
        }
        let u = v.unscale(norm);
        Self::new(&u * u.adjoint())
    }

    pub fn zero(dim: usize) -> Self {
        Projector { dim, mat: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Projector { dim, mat: DMatrix::identity(dim, dim) }
    }

    /// Orthocomplement I − P.
    pub fn complement(&self) -> Self {
        Projector { dim: self.dim, mat: DMatrix::identity(self.dim, self.dim) - &self.mat }
    }

    /// Sum of pairwise-orthogonal projectors.
    pub fn sum(parts: &[Projector]) -> Result<Self, HilbertError> {
        let dim = parts
            .first()
            .map(|p| p.dim)
            .ok_or(HilbertError::ExperimentInvalid { reason: "empty projector list".into() })?;
        let mut mat = DMatrix::zeros(dim, dim);
        for p in parts {
            if p.dim != dim {
                return Err(HilbertError::DimensionMismatch { expected: dim, got: p.dim });
            }
            mat += &p.mat;
        }
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn rank(&self) -> usize {
        self.mat.trace().re.round() as usize
    }
}

/// A complete orthonormal basis, stored as the columns of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertFrame {
    dim: usize,
    columns: DMatrix<Complex64>,
}

impl HilbertFrame {
    /// Validate a matrix whose columns are the frame vectors: pairwise
    /// inner products must match δᵢⱼ within 1e-8 and the vector count
    /// must equal the dimension.
    pub fn from_columns(columns: DMatrix<Complex64>) -> Result<Self, HilbertError> {
        let (r, c) = columns.shape();
        if r != c {
            return Err(HilbertError::FrameInvalid {
                reason: format!("{c} vectors cannot be complete in dimension {r}"),
            });
        }
        check_dim(r)?;
        let gram = columns.adjoint() * &columns;
        let residual = max_abs(&(gram - DMatrix::<Complex64>::identity(r, r)));
        if residual > FRAME_TOL {
            return Err(HilbertError::FrameInvalid {
                reason: format!("Gram residual {residual:.3e} exceeds {FRAME_TOL:.0e}"),
            });
        }
        Ok(HilbertFrame { dim: r, columns })
    }

    /// The standard basis e₁..e_d.
    pub fn standard(dim: usize) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        Ok(HilbertFrame { dim, columns: DMatrix::identity(dim, dim) })
    }

    /// Haar-distributed random frame: QR of a Ginibre matrix with the
    /// R-diagonal phases folded into Q. Deterministic in the seed.
    pub fn haar(dim: usize, seed: u64) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        let qr = ginibre(dim, seed).qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d.conj() / d.norm() } else { Complex64::new(1.0, 0.0) };
            let mut col = q.column_mut(j);
            col *= phase;
        }
        Ok(HilbertFrame { dim, columns: q })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The frame vectors as the columns of a unitary matrix.
    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.columns
    }

    pub fn vector(&self, i: usize) -> DVector<Complex64> {
        self.columns.column(i).into_owned()
    }

    /// Rank-one projector onto the i-th frame vector.
    pub fn projector(&self, i: usize) -> Projector {
        let v = self.columns.column(i);
        Projector { dim: self.dim, mat: &v * v.adjoint() }
    }

    /// Apply the two-plane rotation mixing vectors i and j:
    ///
    /// vᵢ ← cosθ·vᵢ + e^{iφ}sinθ·vⱼ,  vⱼ ← −e^{−iφ}sinθ·vᵢ + cosθ·vⱼ.
    ///
    /// θ = 0 is the identity; θ = π/2, φ = 0 swaps the two vectors up to
    /// sign. Orthonormality is preserved exactly up to rounding.
    pub fn rotated(&self, i: usize, j: usize, theta: f64, phi: f64) -> Result<Self, HilbertError> {
        if i >= self.dim {
            return Err(HilbertError::IndexOutOfRange { index: i, dim: self.dim });
        }
        if j >= self.dim || i == j {
            return Err(HilbertError::IndexOutOfRange { index: j, dim: self.dim });
        }
        let (c, s) = (theta.cos(), theta.sin());
        let e = Complex64::from_polar(1.0, phi);
        let mut columns = self.columns.clone();
        let vi = self.columns.column(i);
        let vj = self.columns.column(j);
        columns.column_mut(i).copy_from(&(vi * Complex64::new(c, 0.0) + vj * (e * s)));
        columns.column_mut(j).copy_from(&(vi * (-e.conj() * s) + vj * Complex64::new(c, 0.0)));
        Ok(HilbertFrame { dim: self.dim, columns })
    }
}

/// A measurement: pairwise-orthogonal projectors resolving the identity.
#[derive(Debug, Clone)]
pub struct HilbertExperiment {
    dim: usize,
    projectors: Vec<Projector>,
}

impl HilbertExperiment {
    /// Validate an outcome family: matching dimensions, PᵢPⱼ ≈ 0 for
    /// i ≠ j and ΣPᵢ = I within 1e-8.
    pub fn new(projectors: Vec<Projector>) -> Result<Self, HilbertError> {
        let dim = projectors
            .first()
            .map(|p| p.dim)
            .ok_or(HilbertError::ExperimentInvalid { reason: "no outcomes".into() })?;
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim != dim {
                return Err(HilbertError::DimensionMismatch { expected: dim, got: p.dim });
            }
            sum += &p.mat;
            for q in &projectors[i + 1..] {
                let cross = max_abs(&(&p.mat * &q.mat));
                if cross > FRAME_TOL {
                    return Err(HilbertError::ExperimentInvalid {
                        reason: format!("outcomes are not orthogonal: ‖PᵢPⱼ‖ = {cross:.3e}"),
                    });
                }
            }
        }
        let res = max_abs(&(sum - DMatrix::<Complex64>::identity(dim, dim)));
        if res > FRAME_TOL {
            return Err(HilbertError::ExperimentInvalid {
                reason: format!("outcomes do not resolve the identity: residual {res:.3e}"),
            });
        }
        Ok(HilbertExperiment { dim, projectors })
    }

    /// The maximal experiment defined by a frame: one rank-one projector
    /// per frame vector.
    pub fn from_frame(frame: &HilbertFrame) -> Self {
        let projectors = (0..frame.dim).map(|i| frame.projector(i)).collect();
        HilbertExperiment { dim: frame.dim, projectors }
    }

    /// Coarse-grain a frame by an outcome partition: each part becomes
    /// the sum of its rank-one projectors.
    pub fn coarse_grained(
        frame: &HilbertFrame,
        partition: &[Vec<usize>],
    ) -> Result<Self, HilbertError> {
        let mut seen = vec![false; frame.dim];
        let mut projectors = Vec::with_capacity(partition.len());
        for part in partition {
            let mut mat = DMatrix::<Complex64>::zeros(frame.dim, frame.dim);
            for &i in part {
                if i >= frame.dim {
                    return Err(HilbertError::IndexOutOfRange { index: i, dim: frame.dim });
                }
                if seen[i] {
                    return Err(HilbertError::ExperimentInvalid {
                        reason: format!("outcome {i} used twice in partition"),
                    });
                }
                seen[i] = true;
                mat += frame.projector(i).mat;
            }
            projectors.push(Projector { dim: frame.dim, mat });
        }
        if !seen.iter().all(|&b| b) {
            return Err(HilbertError::ExperimentInvalid {
                reason: "partition does not cover all outcomes".into(),
            });
        }
        Self::new(projectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Projector] {
        &self.projectors
    }
}

// ----------------------------------------------------------------------
// Born rule
// ----------------------------------------------------------------------

/// Born probability p_ρ(P) = tr(ρP), clamped to [0, 1].
pub fn born_probability(rho: &DensityMatrix, p: &Projector) -> Result<f64, HilbertError> {
    if rho.dim != p.dim {
        return Err(HilbertError::DimensionMismatch { expected: rho.dim, got: p.dim });
    }
    let mut tr = Complex64::default();
    for i in 0..rho.dim {
        for j in 0..rho.dim {
            tr += rho.mat[(i, j)] * p.mat[(j, i)];
        }
    }
    Ok(tr.re.clamp(0.0, 1.0))
}

/// Outcome distribution of a frame under a state: pᵢ = ⟨vᵢ|ρ|vᵢ⟩.
///
/// Entries are clamped to [0, 1]; completeness of the frame makes them
/// sum to 1 within 1e-8.
pub fn frame_probabilities(
    rho: &DensityMatrix,
    frame: &HilbertFrame,
) -> Result<Vec<f64>, HilbertError> {
    if rho.dim != frame.dim {
        return Err(HilbertError::DimensionMismatch { expected: rho.dim, got: frame.dim });
    }
    let mut probs = Vec::with_capacity(frame.dim);
    for i in 0..frame.dim {
        let v = frame.columns.column(i);
        let w = &rho.mat * v;
        probs.push(v.dotc(&w).re.clamp(0.0, 1.0));
    }
    Ok(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_states_validate() {
        assert!(DensityMatrix::diagonal(&[1.0, 0.0]).is_ok());
        assert!(DensityMatrix::diagonal(&[0.5, 0.5]).is_ok());
        match DensityMatrix::diagonal(&[0.7, 0.7]) {
            Err(HilbertError::TraceNotOne { trace }) => assert_abs_diff_eq!(trace, 1.4),
            other => panic!("expected TraceNotOne, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_and_non_positive_are_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(m), Err(HilbertError::NotHermitian { .. })));

        let m = DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(m), Err(HilbertError::NotPositive { .. })));
    }

    #[test]
    fn spectral_decomposition_of_diagonal_state() {
        let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let dec = rho.spectral_decompose().unwrap();
        assert_abs_diff_eq!(dec.eigenvalues[0], 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.eigenvalues[1], 0.1, epsilon = 1e-12);
        let m = dec.eigenframe.as_matrix();
        assert_abs_diff_eq!(m[(0, 0)].re.abs(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(m[(1, 1)].re.abs(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn spectral_decomposition_of_rank_one_projector() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0); 4]);
        let rho = DensityMatrix::new(m).unwrap();
        let dec = rho.spectral_decompose().unwrap();
        assert_abs_diff_eq!(dec.eigenvalues[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(dec.eigenvalues[1], 0.0, epsilon = 1e-10);
        let v = dec.eigenframe.vector(0);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v[0].re, inv_sqrt2, epsilon = 1e-10);
        assert_abs_diff_eq!(v[1].re, inv_sqrt2, epsilon = 1e-10);
    }

    #[test]
    fn spectral_reassembly_is_the_identity() {
        for seed in 0..5 {
            let rho = DensityMatrix::random_mixed(4, seed).unwrap();
            let dec = rho.spectral_decompose().unwrap();
            let mut rec = DMatrix::<Complex64>::zeros(4, 4);
            for (k, &lam) in dec.eigenvalues.iter().enumerate() {
                let v = dec.eigenframe.vector(k);
                rec += (&v * v.adjoint()).scale(lam);
            }
            assert!(max_abs(&(rec - rho.matrix())) <= 1e-8);
        }
    }

    #[test]
    fn born_rule_basic_values() {
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let p0 = Projector::onto(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert_abs_diff_eq!(born_probability(&pure, &p0).unwrap(), 1.0, epsilon = 1e-12);

        let mm = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(born_probability(&mm, &p0).unwrap(), 0.5, epsilon = 1e-12);

        let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let t = std::f64::consts::FRAC_PI_4;
        let p = Projector::onto(&DVector::from_vec(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)])).unwrap();
        // 0.9·cos²θ + 0.1·sin²θ at θ = π/4
        assert_abs_diff_eq!(born_probability(&rho, &p).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn born_gleason_properties() {
        let rho = DensityMatrix::random_mixed(3, 7).unwrap();
        assert_abs_diff_eq!(born_probability(&rho, &Projector::zero(3)).unwrap(), 0.0);
        for seed in 0..20 {
            let f = HilbertFrame::haar(3, seed).unwrap();
            let p = Projector::sum(&[f.projector(0), f.projector(2)]).unwrap();
            let a = born_probability(&rho, &p).unwrap();
            let b = born_probability(&rho, &p.complement()).unwrap();
            assert_abs_diff_eq!(a + b, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn frame_probabilities_examples() {
        let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let eigen = rho.spectral_decompose().unwrap().eigenframe;
        let p = frame_probabilities(&rho, &eigen).unwrap();
        assert_abs_diff_eq!(p[0], 0.9, epsilon = 1e-10);
        assert_abs_diff_eq!(p[1], 0.1, epsilon = 1e-10);

        let mm = DensityMatrix::maximally_mixed(3).unwrap();
        let std3 = HilbertFrame::standard(3).unwrap();
        for p in frame_probabilities(&mm, &std3).unwrap() {
            assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-12);
        }

        // θ = π/6 rotated basis on diag(0.9, 0.1): 0.9·cos²θ + 0.1·sin²θ = 0.7
        let rot = HilbertFrame::standard(2).unwrap().rotated(0, 1, std::f64::consts::FRAC_PI_6, 0.0).unwrap();
        let p = frame_probabilities(&rho, &rot).unwrap();
        assert_abs_diff_eq!(p[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn frame_probabilities_sum_to_one() {
        for seed in 0..10 {
            let rho = DensityMatrix::random_mixed(4, seed).unwrap();
            let f = HilbertFrame::haar(4, seed + 100).unwrap();
            let sum: f64 = frame_probabilities(&rho, &f).unwrap().iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn frame_probabilities_ignore_per_vector_phases() {
        let rho = DensityMatrix::random_mixed(3, 11).unwrap();
        let f = HilbertFrame::haar(3, 12).unwrap();
        let mut m = f.as_matrix().clone();
        for j in 0..3 {
            let phase = Complex64::from_polar(1.0, 0.7 * (j as f64 + 1.0));
            let mut col = m.column_mut(j);
            col *= phase;
        }
        let g = HilbertFrame::from_columns(m).unwrap();
        let a = frame_probabilities(&rho, &f).unwrap();
        let b = frame_probabilities(&rho, &g).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn haar_frames_are_orthonormal_and_seeded() {
        let f = HilbertFrame::haar(2, 1).unwrap();
        let g = HilbertFrame::haar(2, 2).unwrap();
        let same = HilbertFrame::haar(2, 1).unwrap();
        assert_eq!(f.as_matrix(), same.as_matrix());
        let dist = max_abs(&(f.as_matrix() - g.as_matrix()));
        assert!(dist > 1e-6, "distinct seeds should give distinct frames");
    }

    #[test]
    fn haar_first_component_has_uniform_mean() {
        // Monte-Carlo oracle for the Haar marginal: E|⟨e₀|φ₀⟩|² = 1/2.
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|k| {
                let f = HilbertFrame::haar(2, k).unwrap();
                f.as_matrix()[(0, 0)].norm_sqr()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn rotations_preserve_orthonormality() {
        let f = HilbertFrame::haar(4, 3).unwrap();
        let same = f.rotated(1, 3, 0.0, 0.4).unwrap();
        assert!(max_abs(&(f.as_matrix() - same.as_matrix())) < 1e-15);

        let swapped = f.rotated(0, 1, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let diff_i = swapped.vector(0) - f.vector(1);
        let diff_j = swapped.vector(1) + f.vector(0);
        assert!(diff_i.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        assert!(diff_j.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);

        for (k, (theta, phi)) in [(0.3, 0.9), (1.2, -2.0), (-0.7, 0.1)].iter().enumerate() {
            let g = f.rotated(0, 2, *theta, *phi).unwrap();
            let gram = g.as_matrix().adjoint() * g.as_matrix();
            let residual = max_abs(&(gram - DMatrix::<Complex64>::identity(4, 4)));
            assert!(residual <= 1e-10, "case {k}: residual {residual}");
        }
    }

    #[test]
    fn rotation_index_errors() {
        let f = HilbertFrame::standard(3).unwrap();
        assert!(matches!(f.rotated(0, 3, 0.1, 0.0), Err(HilbertError::IndexOutOfRange { .. })));
        assert!(matches!(f.rotated(1, 1, 0.1, 0.0), Err(HilbertError::IndexOutOfRange { .. })));
    }

    #[test]
    fn experiments_validate_and_sum_to_identity() {
        let f = HilbertFrame::haar(3, 5).unwrap();
        let e = HilbertExperiment::from_frame(&f);
        let rho = DensityMatrix::random_mixed(3, 6).unwrap();
        let total: f64 = e
            .outcomes()
            .iter()
            .map(|p| born_probability(&rho, p).unwrap())
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);

        let coarse = HilbertExperiment::coarse_grained(&f, &[vec![0, 2], vec![1]]).unwrap();
        assert_eq!(coarse.outcomes().len(), 2);
        assert_eq!(coarse.outcomes()[0].rank(), 2);

        assert!(HilbertExperiment::coarse_grained(&f, &[vec![0], vec![0, 1, 2]]).is_err());
        assert!(HilbertExperiment::coarse_grained(&f, &[vec![0], vec![1]]).is_err());
    }
}
