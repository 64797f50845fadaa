//! Probability measures and information measures on event lattices.
//!
//! The crate models three tiers of event structure side by side:
//!
//! * finite Boolean algebras carrying Kolmogorov measures and Shannon
//!   entropy ([`lattice`], [`measures`], [`entropy`]),
//! * projection lattices of small complex Hilbert spaces carrying
//!   Born-rule states and von Neumann entropy ([`hilbert`]),
//! * general finite atomic orthomodular lattices carrying orthoadditive
//!   measures and measurement entropy (the infimum of frame entropies).
//!
//! The [`optimize`] module minimizes frame entropy over the unitary orbit
//! of orthonormal frames numerically, cross-checking the spectral value,
//! and [`inquiry`] implements the down-set/ideal question calculus on
//! Boolean algebras together with relevance values on disjoint ideal
//! joins.

pub mod entropy;
pub mod hilbert;
pub mod inquiry;
pub mod io;
pub mod lattice;
pub mod measures;
pub mod optimize;
pub mod seeding;

pub use entropy::{
    frame_entropy, hartley, knuth_family, measurement_entropy, shannon, vne, EntropyError,
    EntropyValue, ProbVector,
};
pub use hilbert::{
    born_probability, frame_probabilities, DensityMatrix, HilbertError, HilbertExperiment,
    HilbertFrame, Projector, SpectralDecomposition,
};
pub use inquiry::{
    enumerate_downsets, enumerate_ideal_questions, is_downset, principal_ideal,
    principal_ideal_lattice, relevance_of_disjoint_join, IdealQuestion, InquiryError, Question,
    RelevanceValue,
};
pub use lattice::{Block, FiniteOrthoLattice, LatticeError, LatticeFrame};
pub use measures::{
    check_product_associativity, check_sum_rule, gleason_restrict, power_rescale,
    ClassicalMeasure, ConditionalAssignment, GeneralizedMeasure, MeasureError, PowerPlausibility,
};
pub use optimize::{
    entropy_gradient, entropy_sweep, minimize_frame_entropy, OptResult, OptimizeError,
    OptimizerConfig,
};
