//! Information measures: Shannon and Hartley entropy, their
//! two-parameter combination, frame entropy of a state, von Neumann
//! entropy, and measurement entropy on finite orthomodular lattices.
//!
//! All values are in nats. Entropy sums use the 0·ln 0 = 0 convention,
//! treat probabilities below [`ZERO_PROB`] as exact zeros, and add their
//! terms in sorted order so the result is independent of the input
//! permutation bit for bit.

use thiserror::Error;

use crate::hilbert::{frame_probabilities, DensityMatrix, HilbertError, HilbertFrame};
use crate::lattice::LatticeFrame;
use crate::measures::GeneralizedMeasure;

/// Probabilities below this are treated as exact zeros inside entropy
/// sums, so rounding dust can never produce −∞ terms.
pub const ZERO_PROB: f64 = 1e-15;

/// Tolerance on Σpᵢ = 1 for [`ProbVector`].
pub const PROB_SUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Error)]
pub enum EntropyError {
    #[error("probabilities sum to {sum:.12}, not 1")]
    NotNormalized { sum: f64 },
    #[error("probability {value} at index {index} outside [0, 1]")]
    EntryOutOfRange { index: usize, value: f64 },
    #[error("lattice has no frames")]
    NoFrames,
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// A finite probability distribution: entries in [0, 1] summing to 1
/// within [`PROB_SUM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, EntropyError> {
        for (index, &value) in entries.iter().enumerate() {
            if !(0.0..=1.0 + 1e-9).contains(&value) || !value.is_finite() {
                return Err(EntropyError::EntryOutOfRange { index, value });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(EntropyError::NotNormalized { sum });
        }
        Ok(ProbVector(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Tensor product of two distributions.
    pub fn product(&self, other: &ProbVector) -> ProbVector {
        let mut entries = Vec::with_capacity(self.len() * other.len());
        for &p in &self.0 {
            for &q in &other.0 {
                entries.push(p * q);
            }
        }
        ProbVector(entries)
    }
}

/// An entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue {
    nats: f64,
}

impl EntropyValue {
    pub fn from_nats(nats: f64) -> Self {
        EntropyValue { nats }
    }

    pub fn nats(&self) -> f64 {
        self.nats
    }

    /// Display conversion; nats stay canonical everywhere else.
    pub fn bits(&self) -> f64 {
        self.nats / std::f64::consts::LN_2
    }
}

/// Single entropy term −p·ln p with the 0·ln 0 = 0 convention.
#[inline]
pub(crate) fn entropy_term(p: f64) -> f64 {
    if p < ZERO_PROB {
        0.0
    } else {
        -p * p.ln()
    }
}

/// −Σ pᵢ ln pᵢ with terms added in sorted order, so permutations of the
/// input and appended zeros leave the result unchanged exactly.
pub(crate) fn shannon_nats(probs: &[f64]) -> f64 {
    let mut terms: Vec<f64> = probs.iter().map(|&p| entropy_term(p)).collect();
    terms.sort_by(|a, b| a.partial_cmp(b).expect("entropy terms are finite"));
    terms.iter().sum()
}

/// Shannon entropy H(p) = −Σ pᵢ ln pᵢ, in [0, ln n].
pub fn shannon(p: &ProbVector) -> EntropyValue {
    EntropyValue::from_nats(shannon_nats(p.as_slice()))
}

/// Hartley entropy H⁰ = ln n.
pub fn hartley(n: usize) -> EntropyValue {
    assert!(n >= 1, "Hartley entropy needs at least one outcome");
    EntropyValue::from_nats((n as f64).ln())
}

/// The admissible two-parameter family A·H(p) + B·ln n. A = 1, B = 0
/// recovers Shannon entropy.
pub fn knuth_family(p: &ProbVector, a: f64, b: f64) -> EntropyValue {
    EntropyValue::from_nats(a * shannon(p).nats() + b * hartley(p.len()).nats())
}

/// Frame entropy H_F(ρ): Shannon entropy of the outcome distribution ρ
/// induces on the frame. Minimized exactly at the eigenframe, where it
/// equals the von Neumann entropy.
pub fn frame_entropy(
    rho: &DensityMatrix,
    frame: &HilbertFrame,
) -> Result<EntropyValue, EntropyError> {
    let probs = frame_probabilities(rho, frame)?;
    Ok(EntropyValue::from_nats(shannon_nats(&probs)))
}

/// Von Neumann entropy −tr(ρ ln ρ) = −Σ λᵢ ln λᵢ over the spectrum.
pub fn vne(rho: &DensityMatrix) -> Result<EntropyValue, EntropyError> {
    let dec = rho.spectral_decompose()?;
    Ok(EntropyValue::from_nats(shannon_nats(&dec.eigenvalues)))
}

/// Measurement entropy: the minimum of frame entropies over all frames
/// of the measure's lattice, with a witnessing frame.
///
/// Ties break to the first frame in canonical enumeration order. On a
/// Boolean lattice the unique frame is the atom set, so this is exactly
/// the Shannon entropy of the atom distribution, computed along the same
/// path as [`shannon`].
pub fn measurement_entropy(
    s: &GeneralizedMeasure,
) -> Result<(EntropyValue, LatticeFrame), EntropyError> {
    let lattice = s.lattice();
    let frames = lattice.enumerate_frames();
    let mut best: Option<(f64, LatticeFrame)> = None;
    for frame in frames {
        let probs: Vec<f64> = frame.atoms.iter().map(|&a| s.value(a)).collect();
        let h = shannon_nats(&probs);
        match &best {
            Some((h_min, _)) if h >= *h_min => {}
            _ => best = Some((h, frame)),
        }
    }
    let (h, frame) = best.ok_or(EntropyError::NoFrames)?;
    Ok((EntropyValue::from_nats(h), frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteOrthoLattice;
    use crate::measures::ClassicalMeasure;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::sync::Arc;

    const LN_2: f64 = std::f64::consts::LN_2;

    fn pv(entries: &[f64]) -> ProbVector {
        ProbVector::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn shannon_reference_values() {
        assert_abs_diff_eq!(shannon(&pv(&[0.5, 0.5])).nats(), LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(shannon(&pv(&[1.0, 0.0])).nats(), 0.0);
        // −0.9 ln 0.9 − 0.1 ln 0.1
        let expected = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
        assert_abs_diff_eq!(shannon(&pv(&[0.9, 0.1])).nats(), expected);
        assert_abs_diff_eq!(expected, 0.325083, epsilon = 1e-6);
    }

    #[test]
    fn prob_vector_rejects_bad_input() {
        assert!(matches!(
            ProbVector::new(vec![0.6, 0.6]),
            Err(EntropyError::NotNormalized { .. })
        ));
        assert!(matches!(
            ProbVector::new(vec![1.2, -0.2]),
            Err(EntropyError::EntryOutOfRange { .. })
        ));
    }

    #[test]
    fn hartley_reference_values() {
        assert_abs_diff_eq!(hartley(1).nats(), 0.0);
        assert_abs_diff_eq!(hartley(3).nats(), 1.098612, epsilon = 1e-6);
        assert_abs_diff_eq!(hartley(8).nats(), 3.0 * LN_2, epsilon = 1e-12);
    }

    #[test]
    fn knuth_family_reference_values() {
        assert_abs_diff_eq!(knuth_family(&pv(&[0.5, 0.5]), 1.0, 0.0).nats(), LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(
            knuth_family(&pv(&[0.2, 0.3, 0.5]), 0.0, 1.0).nats(),
            1.098612,
            epsilon = 1e-6
        );
        // 2·H(1,0) + ln 2
        assert_abs_diff_eq!(knuth_family(&pv(&[1.0, 0.0]), 2.0, 1.0).nats(), LN_2, epsilon = 1e-12);
    }

    #[test]
    fn entropy_in_bits() {
        assert_abs_diff_eq!(shannon(&pv(&[0.5, 0.5])).bits(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn frame_entropy_reference_values() {
        let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let eigen = rho.spectral_decompose().unwrap().eigenframe;
        assert_abs_diff_eq!(
            frame_entropy(&rho, &eigen).unwrap().nats(),
            0.325083,
            epsilon = 1e-6
        );

        let mm = DensityMatrix::maximally_mixed(4).unwrap();
        let f = HilbertFrame::haar(4, 9).unwrap();
        assert_abs_diff_eq!(frame_entropy(&mm, &f).unwrap().nats(), 4f64.ln(), epsilon = 1e-10);

        let rotated = HilbertFrame::standard(2)
            .unwrap()
            .rotated(0, 1, std::f64::consts::FRAC_PI_4, 0.0)
            .unwrap();
        assert_abs_diff_eq!(frame_entropy(&rho, &rotated).unwrap().nats(), LN_2, epsilon = 1e-12);
    }

    #[test]
    fn vne_reference_values() {
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(vne(&pure).unwrap().nats(), 0.0, epsilon = 1e-12);

        let mm = DensityMatrix::maximally_mixed(4).unwrap();
        assert_abs_diff_eq!(vne(&mm).unwrap().nats(), 1.386294, epsilon = 1e-6);

        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        assert_abs_diff_eq!(vne(&rho).unwrap().nats(), 1.029653, epsilon = 1e-6);
    }

    #[test]
    fn vne_matches_eigenframe_entropy() {
        for seed in 0..20 {
            let rho = DensityMatrix::random_mixed(4, seed).unwrap();
            let eigen = rho.spectral_decompose().unwrap().eigenframe;
            let gap = (vne(&rho).unwrap().nats() - frame_entropy(&rho, &eigen).unwrap().nats()).abs();
            assert!(gap <= 1e-10, "seed {seed}: gap {gap}");
        }
    }

    #[test]
    fn vne_lower_bounds_sampled_frames() {
        let rho = DensityMatrix::random_mixed(3, 5).unwrap();
        let h_min = vne(&rho).unwrap().nats();
        for seed in 0..200 {
            let f = HilbertFrame::haar(3, seed).unwrap();
            assert!(frame_entropy(&rho, &f).unwrap().nats() >= h_min - 1e-9);
        }
    }

    #[test]
    fn measurement_entropy_on_boolean_lattices() {
        let lat = Arc::new(FiniteOrthoLattice::boolean_algebra(2).unwrap());
        let m = ClassicalMeasure::from_atom_weights(lat.clone(), &[0.9, 0.1]).unwrap();
        let (h, frame) = measurement_entropy(&m.to_generalized()).unwrap();
        assert_abs_diff_eq!(h.nats(), 0.325083, epsilon = 1e-6);
        assert_eq!(frame.atoms, lat.atoms());
        // Same computation path as `shannon` on the atom distribution.
        let direct = shannon(&pv(&m.atom_distribution()));
        assert_eq!(h.nats(), direct.nats());
    }

    #[test]
    fn measurement_entropy_on_mo2() {
        let lat = Arc::new(FiniteOrthoLattice::mo(2).unwrap());
        let s =
            crate::measures::GeneralizedMeasure::from_atom_weights(lat.clone(), &[0.5, 0.5, 0.9, 0.1])
                .unwrap();
        let (h, frame) = measurement_entropy(&s).unwrap();
        assert_abs_diff_eq!(h.nats(), 0.325083, epsilon = 1e-6);
        let labels = frame.labels(&lat);
        assert_eq!(labels, vec!["a2", "a2'"]);

        // Symmetric blocks: ln 2 with the first frame in canonical order.
        let sym = crate::measures::GeneralizedMeasure::from_atom_weights(
            lat.clone(),
            &[0.5, 0.5, 0.5, 0.5],
        )
        .unwrap();
        let (h, frame) = measurement_entropy(&sym).unwrap();
        assert_abs_diff_eq!(h.nats(), LN_2, epsilon = 1e-12);
        let frames = lat.enumerate_frames();
        assert_eq!(frame, frames[0]);
    }

    proptest! {
        #[test]
        fn shannon_is_permutation_symmetric(mut probs in proptest::collection::vec(0.0f64..1.0, 2..8)) {
            let sum: f64 = probs.iter().sum();
            prop_assume!(sum > 1e-6);
            for p in probs.iter_mut() {
                *p /= sum;
            }
            let h = shannon_nats(&probs);
            probs.reverse();
            prop_assert_eq!(shannon_nats(&probs), h);
            probs.rotate_left(1);
            prop_assert_eq!(shannon_nats(&probs), h);
        }

        #[test]
        fn shannon_is_expansible(mut probs in proptest::collection::vec(0.0f64..1.0, 2..8)) {
            let sum: f64 = probs.iter().sum();
            prop_assume!(sum > 1e-6);
            for p in probs.iter_mut() {
                *p /= sum;
            }
            let h = shannon_nats(&probs);
            probs.push(0.0);
            prop_assert_eq!(shannon_nats(&probs), h);
        }

        #[test]
        fn shannon_is_additive_on_products(
            mut p in proptest::collection::vec(0.01f64..1.0, 2..5),
            mut q in proptest::collection::vec(0.01f64..1.0, 2..5),
        ) {
            let sp: f64 = p.iter().sum();
            let sq: f64 = q.iter().sum();
            for x in p.iter_mut() { *x /= sp; }
            for x in q.iter_mut() { *x /= sq; }
            let p = ProbVector::new(p).unwrap();
            let q = ProbVector::new(q).unwrap();
            let lhs = shannon(&p.product(&q)).nats();
            let rhs = shannon(&p).nats() + shannon(&q).nats();
            prop_assert!((lhs - rhs).abs() <= 1e-12, "lhs {} rhs {}", lhs, rhs);
        }

        #[test]
        fn shannon_respects_bounds(mut probs in proptest::collection::vec(0.0f64..1.0, 1..8)) {
            let sum: f64 = probs.iter().sum();
            prop_assume!(sum > 1e-6);
            for p in probs.iter_mut() {
                *p /= sum;
            }
            let h = shannon_nats(&probs);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (probs.len() as f64).ln() + 1e-12);
        }
    }
}
