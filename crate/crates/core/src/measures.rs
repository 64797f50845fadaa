//! Probability valuations on event lattices.
//!
//! [`ClassicalMeasure`] is a Kolmogorov measure on a Boolean lattice:
//! zero at bottom, complement rule, additive on disjoint joins.
//! [`GeneralizedMeasure`] is its orthomodular counterpart, additive on
//! pairwise-orthogonal families. [`gleason_restrict`] turns a state and
//! an experiment into the induced classical measure on the experiment's
//! Boolean algebra, and [`GeneralizedMeasure::restrict_to_block`]
//! restricts a lattice valuation to one classical context.
//!
//! Validation is exhaustive over the (finite) lattice and reports a
//! witness for every violated rule.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::hilbert::{born_probability, DensityMatrix, HilbertError, HilbertExperiment};
use crate::lattice::{Block, FiniteOrthoLattice, LatticeError};

/// Default absolute tolerance for measure-axiom residuals.
pub const MEASURE_TOL: f64 = 1e-9;

/// Conditioning masses at or below this threshold are rejected.
pub const NULL_MASS: f64 = 1e-12;

#[derive(Debug, Clone, Error)]
pub enum MeasureError {
    #[error("normalization fails: {what} (residual {residual:.3e})")]
    NormalizationError { what: String, residual: f64 },
    #[error("complement rule fails at `{element}`: residual {residual:.3e}")]
    ComplementRuleViolation { element: String, residual: f64 },
    #[error("additivity fails for disjoint pair (`{a}`, `{b}`): residual {residual:.3e}")]
    AdditivityViolation { a: String, b: String, residual: f64 },
    #[error("orthogonal additivity fails for family {{{family}}}: residual {residual:.3e}")]
    OrthoAdditivityViolation { family: String, residual: f64 },
    #[error("value map has {got} entries, lattice has {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("value {value} at `{element}` outside [0, 1]")]
    ValueOutOfRange { element: String, value: f64 },
    #[error("lattice is not Boolean")]
    NotBoolean,
    #[error("subset is not a block of the measure's lattice")]
    NotABlock,
    #[error("conditioning on an element of (near-)zero measure: `{element}` has mass {mass:.3e}")]
    ConditionOnNull { element: String, mass: f64 },
    #[error("values belong to different lattices")]
    MixedLattices,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

fn check_common(
    lattice: &FiniteOrthoLattice,
    values: &[f64],
    tol: f64,
) -> Result<(), MeasureError> {
    if values.len() != lattice.len() {
        return Err(MeasureError::WrongLength { expected: lattice.len(), got: values.len() });
    }
    let v0 = values[lattice.bottom() as usize];
    if v0.abs() > tol {
        return Err(MeasureError::NormalizationError {
            what: "value at bottom is not 0".into(),
            residual: v0.abs(),
        });
    }
    for (i, &v) in values.iter().enumerate() {
        if !(-tol..=1.0 + tol).contains(&v) || !v.is_finite() {
            return Err(MeasureError::ValueOutOfRange {
                element: lattice.label(i as u32).to_string(),
                value: v,
            });
        }
    }
    Ok(())
}

fn check_complement_rule(
    lattice: &FiniteOrthoLattice,
    values: &[f64],
    tol: f64,
) -> Result<(), MeasureError> {
    for a in lattice.element_indices() {
        let residual =
            (values[lattice.ortho(a) as usize] - (1.0 - values[a as usize])).abs();
        if residual > tol {
            return Err(MeasureError::ComplementRuleViolation {
                element: lattice.label(a).to_string(),
                residual,
            });
        }
    }
    Ok(())
}

/// A Kolmogorov probability measure on a Boolean lattice.
#[derive(Debug, Clone)]
pub struct ClassicalMeasure {
    lattice: Arc<FiniteOrthoLattice>,
    values: Vec<f64>,
}

impl ClassicalMeasure {
    /// Validate a total value map as a classical measure, with the
    /// default tolerance.
    pub fn new(lattice: Arc<FiniteOrthoLattice>, values: Vec<f64>) -> Result<Self, MeasureError> {
        Self::with_tolerance(lattice, values, MEASURE_TOL)
    }

    /// Validate a total value map: value range, zero at bottom,
    /// additivity on every disjoint pair, complement rule everywhere.
    pub fn with_tolerance(
        lattice: Arc<FiniteOrthoLattice>,
        values: Vec<f64>,
        tol: f64,
    ) -> Result<Self, MeasureError> {
        if !lattice.is_distributive() {
            return Err(MeasureError::NotBoolean);
        }
        check_common(&lattice, &values, tol)?;
        check_disjoint_additivity(&lattice, &values, tol)?;
        check_complement_rule(&lattice, &values, tol)?;
        Ok(ClassicalMeasure { lattice, values })
    }

    /// Extend atom weights to the whole lattice by additivity.
    ///
    /// Weights are given in the canonical atom order of the lattice and
    /// must sum to 1 within the tolerance.
    pub fn from_atom_weights(
        lattice: Arc<FiniteOrthoLattice>,
        weights: &[f64],
    ) -> Result<Self, MeasureError> {
        if !lattice.is_distributive() {
            return Err(MeasureError::NotBoolean);
        }
        let values = complete_from_atoms(&lattice, weights)?;
        Self::new(lattice, values)
    }

    pub fn lattice(&self) -> &Arc<FiniteOrthoLattice> {
        &self.lattice
    }

    pub fn value(&self, element: u32) -> f64 {
        self.values[element as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Measure values at the atoms, in canonical atom order.
    pub fn atom_distribution(&self) -> Vec<f64> {
        self.lattice.atoms().iter().map(|&a| self.value(a)).collect()
    }

    /// View this measure as a generalized (orthoadditive) measure: on a
    /// Boolean lattice orthogonality is disjointness, so no revalidation
    /// is needed.
    pub fn to_generalized(&self) -> GeneralizedMeasure {
        GeneralizedMeasure { lattice: self.lattice.clone(), values: self.values.clone() }
    }

    /// Bayes conditioning on `given`: P(a | given) = m(a ∧ given)/m(given).
    ///
    /// Rejected when the conditioning mass is below [`NULL_MASS`].
    pub fn conditional(&self, given: u32) -> Result<ConditionalAssignment, MeasureError> {
        let mass = self.value(given);
        if mass <= NULL_MASS {
            return Err(MeasureError::ConditionOnNull {
                element: self.lattice.label(given).to_string(),
                mass,
            });
        }
        let values: Vec<f64> = self
            .lattice
            .element_indices()
            .map(|a| self.value(self.lattice.meet(a, given)) / mass)
            .collect();
        // Dividing by the conditioning mass scales absolute residuals of
        // the base measure by 1/mass; widen the tolerance accordingly.
        let tol = MEASURE_TOL * (1.0 + 1.0 / mass);
        let measure = Self::with_tolerance(self.lattice.clone(), values, tol)?;
        Ok(ConditionalAssignment { measure, given, given_mass: mass })
    }
}

/// Exhaustive check of additivity on disjoint joins.
///
/// Explicit lattices check every disjoint pair directly. Power-set
/// lattices check the equivalent atom-sum form v(x) = v(x \ a) + v(a)
/// element by element, which avoids the O(4ⁿ) pair scan on 2¹⁶-element
/// algebras.
fn check_disjoint_additivity(
    lattice: &FiniteOrthoLattice,
    values: &[f64],
    tol: f64,
) -> Result<(), MeasureError> {
    let n = lattice.len() as u32;
    if lattice.len() > 4096 {
        for x in lattice.element_indices() {
            if x == lattice.bottom() {
                continue;
            }
            let low = x & x.wrapping_neg(); // lowest atom in the mask
            let rest = x ^ low;
            let residual = (values[x as usize]
                - values[rest as usize]
                - values[low as usize])
                .abs();
            if residual > tol {
                return Err(MeasureError::AdditivityViolation {
                    a: lattice.label(rest).to_string(),
                    b: lattice.label(low).to_string(),
                    residual,
                });
            }
        }
        return Ok(());
    }
    for a in 0..n {
        for b in a + 1..n {
            if lattice.meet(a, b) != lattice.bottom() {
                continue;
            }
            let residual =
                (values[lattice.join(a, b) as usize] - values[a as usize] - values[b as usize])
                    .abs();
            if residual > tol {
                return Err(MeasureError::AdditivityViolation {
                    a: lattice.label(a).to_string(),
                    b: lattice.label(b).to_string(),
                    residual,
                });
            }
        }
    }
    Ok(())
}

/// Complete a value map from atom weights: each element x is written as
/// an orthogonal join of atoms below it (greedy selection) and valued by
/// the sum of their weights. Works on Boolean algebras, MO(n) and
/// 0,1-pastings; consistency across overlapping decompositions is left
/// to the subsequent validation.
fn complete_from_atoms(
    lattice: &FiniteOrthoLattice,
    weights: &[f64],
) -> Result<Vec<f64>, MeasureError> {
    let atoms = lattice.atoms();
    if weights.len() != atoms.len() {
        return Err(MeasureError::WrongLength { expected: atoms.len(), got: weights.len() });
    }
    let mut values = vec![0.0; lattice.len()];
    for x in lattice.element_indices() {
        if x == lattice.bottom() {
            continue;
        }
        let mut kept: Vec<usize> = Vec::new();
        for i in 0..atoms.len() {
            if lattice.leq(atoms[i], x)
                && kept.iter().all(|&j| lattice.orthogonal(atoms[i], atoms[j]))
            {
                kept.push(i);
            }
        }
        let join = kept.iter().fold(lattice.bottom(), |acc, &i| lattice.join(acc, atoms[i]));
        if join != x {
            return Err(MeasureError::Parameter(format!(
                "element `{}` is not an orthogonal join of atoms below it; give a total value map instead",
                lattice.label(x)
            )));
        }
        values[x as usize] = kept.iter().map(|&i| weights[i]).sum();
    }
    Ok(values)
}

/// An orthoadditive probability measure on an orthomodular lattice.
#[derive(Debug, Clone)]
pub struct GeneralizedMeasure {
    lattice: Arc<FiniteOrthoLattice>,
    values: Vec<f64>,
}

impl GeneralizedMeasure {
    pub fn new(lattice: Arc<FiniteOrthoLattice>, values: Vec<f64>) -> Result<Self, MeasureError> {
        Self::with_tolerance(lattice, values, MEASURE_TOL)
    }

    /// Validate a total value map: value range, zero at bottom,
    /// complement rule everywhere, then additivity over every
    /// pairwise-orthogonal family up to the frame cardinality.
    pub fn with_tolerance(
        lattice: Arc<FiniteOrthoLattice>,
        values: Vec<f64>,
        tol: f64,
    ) -> Result<Self, MeasureError> {
        check_common(&lattice, &values, tol)?;
        check_complement_rule(&lattice, &values, tol)?;
        if lattice.is_distributive() {
            // Orthogonality is disjointness here and pairwise additivity
            // already implies the family condition.
            check_disjoint_additivity(&lattice, &values, tol)?;
        } else {
            check_orthogonal_families(&lattice, &values, tol)?;
        }
        Ok(GeneralizedMeasure { lattice, values })
    }

    /// Extend atom weights to the whole lattice; see
    /// [`ClassicalMeasure::from_atom_weights`]. Works on any lattice
    /// whose elements are orthogonal joins of their atoms (Boolean
    /// algebras, MO(n), horizontal sums).
    pub fn from_atom_weights(
        lattice: Arc<FiniteOrthoLattice>,
        weights: &[f64],
    ) -> Result<Self, MeasureError> {
        let values = complete_from_atoms(&lattice, weights)?;
        Self::new(lattice, values)
    }

    pub fn lattice(&self) -> &Arc<FiniteOrthoLattice> {
        &self.lattice
    }

    pub fn value(&self, element: u32) -> f64 {
        self.values[element as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Restrict the measure to one maximal Boolean subalgebra. The
    /// result is a classical measure on the block, with the original
    /// element labels.
    pub fn restrict_to_block(&self, block: &Block) -> Result<ClassicalMeasure, MeasureError> {
        let blocks = self.lattice.enumerate_blocks();
        if !blocks.iter().any(|b| b == block) {
            return Err(MeasureError::NotABlock);
        }
        if block.members.len() == self.lattice.len() {
            // The lattice is its own unique block: the restriction is the
            // measure itself.
            return ClassicalMeasure::new(self.lattice.clone(), self.values.clone());
        }
        let labels: Vec<String> =
            block.members.iter().map(|&i| self.lattice.label(i).to_string()).collect();
        let mut covers = Vec::new();
        for (ai, &a) in block.members.iter().enumerate() {
            for (bi, &b) in block.members.iter().enumerate() {
                if ai == bi || !self.lattice.leq(a, b) {
                    continue;
                }
                let between = block.members.iter().any(|&z| {
                    z != a && z != b && self.lattice.leq(a, z) && self.lattice.leq(z, b)
                });
                if !between {
                    covers.push((labels[ai].clone(), labels[bi].clone()));
                }
            }
        }
        let mut ortho = BTreeMap::new();
        for (ai, &a) in block.members.iter().enumerate() {
            let o = self.lattice.ortho(a);
            let oi = block
                .members
                .iter()
                .position(|&x| x == o)
                .expect("blocks are closed under complement");
            ortho.insert(labels[ai].clone(), labels[oi].clone());
        }
        let sub = Arc::new(FiniteOrthoLattice::from_covers(labels.clone(), &covers, &ortho)?);
        let values = block
            .members
            .iter()
            .map(|&i| {
                let idx = sub
                    .index_of(self.lattice.label(i))
                    .expect("restricted lattice keeps labels");
                (idx, self.values[i as usize])
            })
            .collect::<BTreeMap<u32, f64>>();
        let values: Vec<f64> = (0..sub.len() as u32).map(|i| values[&i]).collect();
        ClassicalMeasure::new(sub, values)
    }
}

/// Enumerate pairwise-orthogonal families of nonzero elements up to the
/// lattice's frame cardinality and check additivity on each.
fn check_orthogonal_families(
    lattice: &FiniteOrthoLattice,
    values: &[f64],
    tol: f64,
) -> Result<(), MeasureError> {
    let max_len = lattice
        .enumerate_frames()
        .iter()
        .map(|f| f.atoms.len())
        .max()
        .unwrap_or(2)
        .max(2);
    let candidates: Vec<u32> =
        lattice.element_indices().filter(|&x| x != lattice.bottom()).collect();
    let mut family: Vec<u32> = Vec::new();

    fn recurse(
        lattice: &FiniteOrthoLattice,
        values: &[f64],
        tol: f64,
        candidates: &[u32],
        start: usize,
        family: &mut Vec<u32>,
        join: u32,
        sum: f64,
        max_len: usize,
    ) -> Result<(), MeasureError> {
        if family.len() >= 2 {
            let residual = (values[join as usize] - sum).abs();
            if residual > tol {
                let names: Vec<&str> =
                    family.iter().map(|&x| lattice.label(x)).collect();
                return Err(MeasureError::OrthoAdditivityViolation {
                    family: names.join(", "),
                    residual,
                });
            }
        }
        if family.len() == max_len {
            return Ok(());
        }
        for (k, &x) in candidates.iter().enumerate().skip(start) {
            if family.iter().all(|&y| lattice.orthogonal(x, y)) {
                family.push(x);
                recurse(
                    lattice,
                    values,
                    tol,
                    candidates,
                    k + 1,
                    family,
                    lattice.join(join, x),
                    sum + values[x as usize],
                    max_len,
                )?;
                family.pop();
            }
        }
        Ok(())
    }

    recurse(lattice, values, tol, &candidates, 0, &mut family, lattice.bottom(), 0.0, max_len)
}

/// The classical measure a state induces on an experiment's Boolean
/// algebra: outcome atoms weighted by tr(ρPᵢ), extended by additivity.
pub fn gleason_restrict(
    rho: &DensityMatrix,
    experiment: &HilbertExperiment,
) -> Result<ClassicalMeasure, MeasureError> {
    if rho.dim() != experiment.dim() {
        return Err(MeasureError::Hilbert(HilbertError::DimensionMismatch {
            expected: rho.dim(),
            got: experiment.dim(),
        }));
    }
    let outcomes = experiment.outcomes();
    let weights: Vec<f64> = outcomes
        .iter()
        .map(|p| born_probability(rho, p))
        .collect::<Result<_, _>>()?;
    let algebra = Arc::new(FiniteOrthoLattice::boolean_algebra(outcomes.len())?);
    ClassicalMeasure::from_atom_weights(algebra, &weights)
}

/// A conditional probability assignment P(· | given).
#[derive(Debug, Clone)]
pub struct ConditionalAssignment {
    measure: ClassicalMeasure,
    given: u32,
    given_mass: f64,
}

impl ConditionalAssignment {
    /// P(a | given), available for every lattice element.
    pub fn probability(&self, a: u32) -> f64 {
        self.measure.value(a)
    }

    /// The conditional assignment as a classical measure in its own right.
    pub fn measure(&self) -> &ClassicalMeasure {
        &self.measure
    }

    pub fn given(&self) -> u32 {
        self.given
    }

    pub fn given_mass(&self) -> f64 {
        self.given_mass
    }

    /// Max residual of m(a ∧ given) = P(a|given)·m(given) over the base
    /// measure's elements.
    pub fn product_rule_residual(&self, base: &ClassicalMeasure) -> Result<f64, MeasureError> {
        if !base.lattice().same_as(self.measure.lattice()) {
            return Err(MeasureError::MixedLattices);
        }
        let lat = base.lattice();
        let mut max = 0.0f64;
        for a in lat.element_indices() {
            let lhs = base.value(lat.meet(a, self.given));
            let rhs = self.probability(a) * base.value(self.given);
            max = max.max((lhs - rhs).abs());
        }
        Ok(max)
    }

    /// Least-squares fit of the constant C in
    /// m(a ∧ given) = C·P(a|given)·m(given). Returns 1 for a normalized
    /// assignment.
    pub fn fitted_constant(&self, base: &ClassicalMeasure) -> Result<f64, MeasureError> {
        if !base.lattice().same_as(self.measure.lattice()) {
            return Err(MeasureError::MixedLattices);
        }
        let lat = base.lattice();
        let mut num = 0.0;
        let mut den = 0.0;
        for a in lat.element_indices() {
            let x = self.probability(a) * base.value(self.given);
            let y = base.value(lat.meet(a, self.given));
            num += x * y;
            den += x * x;
        }
        if den == 0.0 {
            return Err(MeasureError::Parameter("degenerate fit: all products vanish".into()));
        }
        Ok(num / den)
    }
}

/// Result of [`check_sum_rule`].
#[derive(Debug, Clone)]
pub struct SumRuleReport {
    pub pairs_checked: usize,
    pub max_residual: f64,
    pub worst_pair: Option<(String, String)>,
}

/// Verify inclusion–exclusion m(a∨b) = m(a) + m(b) − m(a∧b) over all
/// element pairs; reports the worst residual instead of failing.
pub fn check_sum_rule(m: &ClassicalMeasure) -> SumRuleReport {
    let lat = m.lattice();
    let n = lat.len() as u32;
    let mut report = SumRuleReport { pairs_checked: 0, max_residual: 0.0, worst_pair: None };
    for a in 0..n {
        for b in a..n {
            let residual = (m.value(lat.join(a, b)) + m.value(lat.meet(a, b))
                - m.value(a)
                - m.value(b))
            .abs();
            report.pairs_checked += 1;
            if residual > report.max_residual {
                report.max_residual = residual;
                report.worst_pair =
                    Some((lat.label(a).to_string(), lat.label(b).to_string()));
            }
        }
    }
    report
}

/// A plausibility assignment v = m^(1/r), satisfying
/// v(a)^r + v(¬a)^r = 1 for every element.
#[derive(Debug, Clone)]
pub struct PowerPlausibility {
    lattice: Arc<FiniteOrthoLattice>,
    exponent: f64,
    values: Vec<f64>,
}

impl PowerPlausibility {
    pub fn lattice(&self) -> &Arc<FiniteOrthoLattice> {
        &self.lattice
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn value(&self, element: u32) -> f64 {
        self.values[element as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Max residual of v(a)^r + v(¬a)^r = 1 over all elements.
    pub fn negation_rule_residual(&self) -> f64 {
        let lat = &self.lattice;
        let r = self.exponent;
        lat.element_indices()
            .map(|a| {
                (self.value(a).powf(r) + self.value(lat.ortho(a)).powf(r) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Recover the underlying measure values by raising to the r-th
    /// power.
    pub fn to_measure_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.powf(self.exponent)).collect()
    }
}

/// Rescale probabilities into the general plausibility family:
/// v(a) = m(a)^(1/r). With r = 1 this is the identity.
pub fn power_rescale(m: &ClassicalMeasure, r: f64) -> Result<PowerPlausibility, MeasureError> {
    if !(r > 0.0) {
        return Err(MeasureError::Parameter(format!("exponent must be positive, got {r}")));
    }
    let values = if r == 1.0 {
        m.values().to_vec()
    } else {
        m.values().iter().map(|&v| v.max(0.0).powf(1.0 / r)).collect()
    };
    Ok(PowerPlausibility { lattice: m.lattice().clone(), exponent: r, values })
}

/// Result of [`check_product_associativity`].
#[derive(Debug, Clone)]
pub struct AssociativityReport {
    pub samples_checked: usize,
    pub max_residual: f64,
}

/// Confirm that the product form g(x, y) = x·y satisfies the
/// associativity equation g(x, g(y, z)) = g(g(x, y), z) on the samples.
pub fn check_product_associativity(samples: &[(f64, f64, f64)]) -> AssociativityReport {
    let mut max_residual = 0.0f64;
    for &(x, y, z) in samples {
        let lhs = x * (y * z);
        let rhs = (x * y) * z;
        max_residual = max_residual.max((lhs - rhs).abs());
    }
    AssociativityReport { samples_checked: samples.len(), max_residual }
}
