//! The inquiry calculus on finite Boolean algebras: questions as
//! down-sets, ideal questions, principal ideals and the order
//! isomorphism between a lattice and its principal-ideal lattice, plus
//! relevance values on disjoint joins of principal ideal questions.
//!
//! Questions form a lattice under set union (disjunction) and set
//! intersection (conjunction). It is distributive but not Boolean: no
//! involution on down-sets satisfies all four complement axioms.

use std::sync::Arc;

use thiserror::Error;

use crate::entropy::shannon_nats;
use crate::lattice::FiniteOrthoLattice;
use crate::measures::ClassicalMeasure;

/// Down-set enumeration cap: 2^n candidate subsets are scanned.
pub const MAX_DOWNSET_ELEMENTS: usize = 16;

/// Cap for the exhaustive order-isomorphism verification in
/// [`principal_ideal_lattice`].
pub const MAX_IDEAL_LATTICE_ELEMENTS: usize = 4096;

#[derive(Debug, Clone, Error)]
pub enum InquiryError {
    #[error("size limit exceeded: got {got}, limit {limit}")]
    SizeLimit { limit: usize, got: usize },
    #[error("carrier is not downward closed: `{inside}` contains `{missing}` below it")]
    NotADownset { inside: String, missing: String },
    #[error("carrier is not an ideal: {reason}")]
    NotAnIdeal { reason: String },
    #[error("questions belong to different lattices")]
    MixedLattices,
    #[error("ideals are not pairwise disjoint: intersection of `{a}` and `{b}` exceeds {{0}}")]
    NotDisjoint { a: String, b: String },
    #[error("ideal is not principal")]
    NotPrincipal,
    #[error("element index {0} out of range")]
    OutOfRange(u32),
}

/// A question: a downward-closed set of lattice elements (the assertions
/// answering it).
#[derive(Debug, Clone)]
pub struct Question {
    lattice: Arc<FiniteOrthoLattice>,
    carrier: Vec<u32>,
}

impl PartialEq for Question {
    fn eq(&self, other: &Self) -> bool {
        self.lattice.same_as(&other.lattice) && self.carrier == other.carrier
    }
}

impl Eq for Question {}

impl Question {
    /// Validate a carrier as a down-set. The empty question is allowed;
    /// it is the bottom of the question lattice.
    pub fn new(lattice: Arc<FiniteOrthoLattice>, carrier: Vec<u32>) -> Result<Self, InquiryError> {
        let mut carrier = carrier;
        carrier.sort_unstable();
        carrier.dedup();
        if let Some(&bad) = carrier.iter().find(|&&x| x as usize >= lattice.len()) {
            return Err(InquiryError::OutOfRange(bad));
        }
        for &y in &carrier {
            for x in lattice.element_indices() {
                if lattice.leq(x, y) && carrier.binary_search(&x).is_err() {
                    return Err(InquiryError::NotADownset {
                        inside: lattice.label(y).to_string(),
                        missing: lattice.label(x).to_string(),
                    });
                }
            }
        }
        Ok(Question { lattice, carrier })
    }

    pub fn lattice(&self) -> &Arc<FiniteOrthoLattice> {
        &self.lattice
    }

    /// Sorted element indices of the carrier.
    pub fn carrier(&self) -> &[u32] {
        &self.carrier
    }

    pub fn contains(&self, x: u32) -> bool {
        self.carrier.binary_search(&x).is_ok()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.carrier.iter().map(|&x| self.lattice.label(x)).collect()
    }

    /// Disjunction: set union of carriers. Down-sets are closed under
    /// union.
    pub fn join(&self, other: &Question) -> Result<Question, InquiryError> {
        if !self.lattice.same_as(&other.lattice) {
            return Err(InquiryError::MixedLattices);
        }
        let mut carrier = self.carrier.clone();
        carrier.extend_from_slice(&other.carrier);
        carrier.sort_unstable();
        carrier.dedup();
        Ok(Question { lattice: self.lattice.clone(), carrier })
    }

    /// Conjunction: set intersection of carriers.
    pub fn meet(&self, other: &Question) -> Result<Question, InquiryError> {
        if !self.lattice.same_as(&other.lattice) {
            return Err(InquiryError::MixedLattices);
        }
        let carrier = self
            .carrier
            .iter()
            .copied()
            .filter(|x| other.contains(*x))
            .collect();
        Ok(Question { lattice: self.lattice.clone(), carrier })
    }

    /// A real question is answerable by a true statement: every atom
    /// must belong to it.
    pub fn is_real(&self) -> bool {
        self.lattice.atoms().iter().all(|&a| self.contains(a))
    }
}

/// A question that is also an ideal: downward closed, closed under
/// pairwise joins, and non-empty. In a finite lattice every ideal is
/// the principal ideal of its maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealQuestion(Question);

impl IdealQuestion {
    pub fn new(question: Question) -> Result<Self, InquiryError> {
        if question.carrier.is_empty() {
            return Err(InquiryError::NotAnIdeal { reason: "ideals are non-empty".into() });
        }
        let lat = &question.lattice;
        for &x in &question.carrier {
            for &y in &question.carrier {
                let j = lat.join(x, y);
                if !question.contains(j) {
                    return Err(InquiryError::NotAnIdeal {
                        reason: format!(
                            "`{}` ∨ `{}` = `{}` is missing",
                            lat.label(x),
                            lat.label(y),
                            lat.label(j)
                        ),
                    });
                }
            }
        }
        Ok(IdealQuestion(question))
    }

    pub fn question(&self) -> &Question {
        &self.0
    }

    pub fn carrier(&self) -> &[u32] {
        self.0.carrier()
    }

    pub fn lattice(&self) -> &Arc<FiniteOrthoLattice> {
        self.0.lattice()
    }

    /// The generating element: the maximum of the carrier.
    pub fn generator(&self) -> Result<u32, InquiryError> {
        let lat = self.lattice();
        let top = *self.carrier().last().expect("ideals are non-empty");
        // Sorted order does not imply lattice order; find the maximum.
        let max = self
            .carrier()
            .iter()
            .copied()
            .find(|&m| self.carrier().iter().all(|&x| lat.leq(x, m)))
            .ok_or(InquiryError::NotPrincipal)?;
        let _ = top;
        Ok(max)
    }

    /// Whether this ideal is I(a) for a single element a. Always true in
    /// a finite lattice; kept as an explicit check.
    pub fn is_principal(&self) -> bool {
        self.generator().is_ok()
    }
}

/// True iff `set` is downward closed in the lattice.
pub fn is_downset(lattice: &FiniteOrthoLattice, set: &[u32]) -> bool {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.iter().all(|&y| {
        lattice
            .element_indices()
            .all(|x| !lattice.leq(x, y) || sorted.binary_search(&x).is_ok())
    })
}

/// All down-sets of the lattice, as questions in canonical order
/// (ascending subset bitmask over element indices). The empty question
/// is included.
pub fn enumerate_downsets(
    lattice: &Arc<FiniteOrthoLattice>,
) -> Result<Vec<Question>, InquiryError> {
    let n = lattice.len();
    if n > MAX_DOWNSET_ELEMENTS {
        return Err(InquiryError::SizeLimit { limit: MAX_DOWNSET_ELEMENTS, got: n });
    }
    let below: Vec<u32> = lattice
        .element_indices()
        .map(|y| {
            lattice
                .element_indices()
                .filter(|&x| lattice.leq(x, y))
                .fold(0u32, |acc, x| acc | (1 << x))
        })
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let closed = (0..n).all(|y| mask & (1 << y) == 0 || below[y] & mask == below[y]);
        if closed {
            let carrier = (0..n as u32).filter(|&x| mask & (1 << x) != 0).collect();
            out.push(Question { lattice: lattice.clone(), carrier });
        }
    }
    Ok(out)
}

/// All ideal questions: the down-sets that are non-empty and closed
/// under pairwise joins.
pub fn enumerate_ideal_questions(
    lattice: &Arc<FiniteOrthoLattice>,
) -> Result<Vec<IdealQuestion>, InquiryError> {
    Ok(enumerate_downsets(lattice)?
        .into_iter()
        .filter_map(|q| IdealQuestion::new(q).ok())
        .collect())
}

/// The principal ideal I(a) = {x : x ≤ a}.
pub fn principal_ideal(lattice: &Arc<FiniteOrthoLattice>, a: u32) -> IdealQuestion {
    let carrier = lattice.down_set(a);
    IdealQuestion(Question { lattice: lattice.clone(), carrier })
}

/// The smallest ideal containing `elements`: the principal ideal of
/// their join.
pub fn ideal_generated_by(lattice: &Arc<FiniteOrthoLattice>, elements: &[u32]) -> IdealQuestion {
    let j = elements.iter().copied().fold(lattice.bottom(), |acc, x| lattice.join(acc, x));
    principal_ideal(lattice, j)
}

/// The lattice of principal ideals, indexed by generating element, with
/// the order isomorphism a ≤ b ⇔ I(a) ⊆ I(b) verified on all pairs.
#[derive(Debug, Clone)]
pub struct PrincipalIdealLattice {
    /// ideals[i] = I(element i).
    pub ideals: Vec<IdealQuestion>,
}

pub fn principal_ideal_lattice(
    lattice: &Arc<FiniteOrthoLattice>,
) -> Result<PrincipalIdealLattice, InquiryError> {
    let n = lattice.len();
    if n > MAX_IDEAL_LATTICE_ELEMENTS {
        return Err(InquiryError::SizeLimit { limit: MAX_IDEAL_LATTICE_ELEMENTS, got: n });
    }
    let ideals: Vec<IdealQuestion> =
        lattice.element_indices().map(|a| principal_ideal(lattice, a)).collect();
    for a in lattice.element_indices() {
        for b in lattice.element_indices() {
            let included = ideals[a as usize]
                .carrier()
                .iter()
                .all(|x| ideals[b as usize].carrier().binary_search(x).is_ok());
            debug_assert_eq!(
                lattice.leq(a, b),
                included,
                "Birkhoff isomorphism must hold on a validated lattice"
            );
            if lattice.leq(a, b) != included {
                return Err(InquiryError::NotAnIdeal {
                    reason: format!(
                        "order isomorphism fails at (`{}`, `{}`)",
                        lattice.label(a),
                        lattice.label(b)
                    ),
                });
            }
        }
    }
    Ok(PrincipalIdealLattice { ideals })
}

/// A relevance value in nats: the degree to which the top question
/// answers a disjoint join of ideal questions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RelevanceValue {
    nats: f64,
}

impl RelevanceValue {
    pub fn nats(&self) -> f64 {
        self.nats
    }
}

/// Relevance of the disjoint join ∨ᵢ I(aᵢ) to the top question:
/// −Σᵢ m(aᵢ) ln m(aᵢ).
///
/// The ideals must live on the measure's lattice, be principal, and meet
/// pairwise in the zero question {bottom}. The generator probabilities
/// need not sum to 1; appending an ideal of zero probability leaves the
/// value unchanged.
pub fn relevance_of_disjoint_join(
    ideals: &[IdealQuestion],
    m: &ClassicalMeasure,
) -> Result<RelevanceValue, InquiryError> {
    let lattice = m.lattice();
    let mut generators = Vec::with_capacity(ideals.len());
    for ideal in ideals {
        if !ideal.lattice().same_as(lattice) {
            return Err(InquiryError::MixedLattices);
        }
        generators.push(ideal.generator()?);
    }
    for (i, a) in ideals.iter().enumerate() {
        for b in &ideals[i + 1..] {
            let mut common = a
                .carrier()
                .iter()
                .filter(|x| b.carrier().binary_search(x).is_ok());
            let only_bottom = common.all(|&x| x == lattice.bottom());
            if !only_bottom {
                return Err(InquiryError::NotDisjoint {
                    a: lattice.label(generators[i]).to_string(),
                    b: lattice
                        .label(b.generator().expect("checked principal above"))
                        .to_string(),
                });
            }
        }
    }
    let probs: Vec<f64> = generators.iter().map(|&g| m.value(g)).collect();
    Ok(RelevanceValue { nats: shannon_nats(&probs) })
}
