//! Finite bounded orthocomplemented lattices.
//!
//! The central type is [`FiniteOrthoLattice`]: an immutable, fully
//! validated event lattice with meet, join and orthocomplement. Two
//! storage strategies sit behind one query surface:
//!
//! * explicit meet/join tables computed from a cover relation
//!   ([`FiniteOrthoLattice::from_covers`]), used for pastings such as
//!   [`FiniteOrthoLattice::mo`] and arbitrary user input, and
//! * an implicit power-set form ([`FiniteOrthoLattice::boolean_algebra`])
//!   where the element index *is* the atom subset bitmask, so Boolean
//!   algebras up to 16 atoms (65536 elements) need no tables at all.
//!
//! All constructors verify the lattice axioms, the orthocomplementation
//! axioms (involution, order reversal, complement laws), the orthomodular
//! law and atomicity before returning, so downstream code can rely on a
//! well-formed structure. Lattices are immutable after construction and
//! all queries are pure.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

/// Maximum element count accepted by [`FiniteOrthoLattice::from_covers`].
///
/// Explicit construction materializes n×n meet/join tables and runs
/// O(n³/64) validation, so it is capped well below the implicit
/// power-set limit of 2¹⁶ elements.
pub const MAX_EXPLICIT_ELEMENTS: usize = 2048;

/// Maximum atom count for [`FiniteOrthoLattice::boolean_algebra`].
pub const MAX_BOOLEAN_ATOMS: usize = 16;

/// Maximum block count for [`FiniteOrthoLattice::mo`].
pub const MAX_MO_BLOCKS: usize = 64;

/// Which orthocomplementation axiom a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthoAxiom {
    /// ¬(¬a) = a, including totality of the complement map.
    Involution,
    /// a ≤ b implies ¬b ≤ ¬a.
    OrderReversal,
    /// a ∧ ¬a = 0.
    MeetComplement,
    /// a ∨ ¬a = 1.
    JoinComplement,
}

impl std::fmt::Display for OrthoAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OrthoAxiom::Involution => "involution",
            OrthoAxiom::OrderReversal => "order reversal",
            OrthoAxiom::MeetComplement => "meet complement",
            OrthoAxiom::JoinComplement => "join complement",
        };
        f.write_str(s)
    }
}

/// Errors raised while constructing or querying a lattice.
#[derive(Debug, Clone, Error)]
pub enum LatticeError {
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("not a lattice: {reason}")]
    NotALattice { reason: String },
    #[error("orthocomplementation violates {axiom} at {witness}")]
    OrthoAxiomViolation { axiom: OrthoAxiom, witness: String },
    #[error("orthomodular law fails for `{a}` ≤ `{b}`: `{b}` ≠ `{a}` ∨ (¬`{a}` ∧ `{b}`)")]
    NotOrthomodular { a: String, b: String },
    #[error("lattice is not atomic: `{0}` dominates no atom")]
    NotAtomic(String),
    #[error("size limit exceeded: got {got}, limit {limit}")]
    SizeLimit { limit: usize, got: usize },
    #[error("not a subalgebra: {reason}")]
    NotASubalgebra { reason: String },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Square bit matrix; row r holds one bit per column.
#[derive(Debug, Clone, PartialEq)]
struct BitMat {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMat {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMat { n, words, data: vec![0; n * words] }
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] |= 1u64 << (c % 64);
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] & (1u64 << (c % 64)) != 0
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    /// OR row `src` into row `dst`.
    fn or_row_into(&mut self, src: usize, dst: usize) {
        let (s, d) = (src * self.words, dst * self.words);
        for w in 0..self.words {
            self.data[d + w] |= self.data[s + w];
        }
    }

    fn row_count(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn and_rows(a: &[u64], b: &[u64], out: &mut [u64]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = x & y;
    }
}

fn count_bits(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut bits = w;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

#[derive(Debug, Clone)]
struct ExplicitTables {
    /// `below.get(x, y)` holds iff y ≤ x.
    below: BitMat,
    meet: Vec<u32>,
    join: Vec<u32>,
}

#[derive(Debug, Clone)]
enum Repr {
    Explicit(Box<ExplicitTables>),
    /// Power-set lattice: the element index is the atom-subset bitmask.
    PowerSet,
}

/// A maximal Boolean subalgebra (one classical context) of a lattice.
///
/// `members` is a sorted list of element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub members: Vec<u32>,
}

impl Block {
    /// Minimal nonzero members of the block. These are the block's own
    /// atoms; they need not be atoms of the ambient lattice.
    pub fn atoms(&self, lattice: &FiniteOrthoLattice) -> Vec<u32> {
        let bottom = lattice.bottom();
        self.members
            .iter()
            .copied()
            .filter(|&x| {
                x != bottom
                    && !self
                        .members
                        .iter()
                        .any(|&y| y != bottom && y != x && lattice.leq(y, x))
            })
            .collect()
    }

    pub fn labels<'a>(&self, lattice: &'a FiniteOrthoLattice) -> Vec<&'a str> {
        self.members.iter().map(|&i| lattice.label(i)).collect()
    }
}

/// A frame: pairwise-orthogonal atoms whose join is the top element.
///
/// `atoms` is a sorted list of atom indices. A frame is an irreducible
/// experiment on the lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeFrame {
    pub atoms: Vec<u32>,
}

impl LatticeFrame {
    pub fn labels<'a>(&self, lattice: &'a FiniteOrthoLattice) -> Vec<&'a str> {
        self.atoms.iter().map(|&i| lattice.label(i)).collect()
    }
}

/// A finite bounded lattice with a validated orthocomplementation
/// satisfying the orthomodular law, atomic by construction.
#[derive(Debug, Clone)]
pub struct FiniteOrthoLattice {
    labels: Vec<String>,
    index: BTreeMap<String, u32>,
    repr: Repr,
    ortho: Vec<u32>,
    bottom: u32,
    top: u32,
    atoms: Vec<u32>,
    distributive: OnceLock<bool>,
}

impl FiniteOrthoLattice {
    // ------------------------------------------------------------------
    // Constructors
    // ------------------------------------------------------------------

    /// Build and validate a lattice from its cover relation and an
    /// orthocomplement map on labels.
    ///
    /// Each cover pair `(x, y)` states that `y` covers `x` (x ⋖ y).
    /// Meet and join tables are derived from the reflexive-transitive
    /// closure; every lattice and orthocomplementation axiom plus the
    /// orthomodular law and atomicity are checked exhaustively.
    pub fn from_covers(
        elements: Vec<String>,
        covers: &[(String, String)],
        ortho: &BTreeMap<String, String>,
    ) -> Result<Self, LatticeError> {
        let n = elements.len();
        if n == 0 {
            return Err(LatticeError::Parameter("element list is empty".into()));
        }
        if n > MAX_EXPLICIT_ELEMENTS {
            return Err(LatticeError::SizeLimit { limit: MAX_EXPLICIT_ELEMENTS, got: n });
        }

        let mut index = BTreeMap::new();
        for (i, l) in elements.iter().enumerate() {
            if index.insert(l.clone(), i as u32).is_some() {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        let resolve = |label: &String| -> Result<usize, LatticeError> {
            index
                .get(label)
                .map(|&i| i as usize)
                .ok_or_else(|| LatticeError::UnknownLabel(label.clone()))
        };

        // Cover DAG and its topological order.
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for (lo, hi) in covers {
            let (a, b) = (resolve(lo)?, resolve(hi)?);
            if a == b {
                return Err(LatticeError::NotALattice {
                    reason: format!("cover relation has a self-loop at `{lo}`"),
                });
            }
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut topo = Vec::with_capacity(n);
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        while let Some(v) = queue.pop() {
            topo.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if topo.len() != n {
            return Err(LatticeError::NotALattice { reason: "cover relation is cyclic".into() });
        }

        // Reflexive-transitive closure. below.get(x, y) ⇔ y ≤ x.
        let mut below = BitMat::new(n);
        for i in 0..n {
            below.set(i, i);
        }
        for &v in &topo {
            for &w in &succ[v].clone() {
                below.or_row_into(v, w);
            }
        }
        let mut above = BitMat::new(n);
        for x in 0..n {
            for y in 0..n {
                if below.get(y, x) {
                    above.set(x, y);
                }
            }
        }

        // Unique bottom and top.
        let bottoms: Vec<usize> = (0..n).filter(|&x| below.row_count(x) == 1).collect();
        let tops: Vec<usize> = (0..n).filter(|&x| above.row_count(x) == 1).collect();
        if bottoms.len() != 1 {
            return Err(LatticeError::NotALattice {
                reason: format!("expected a unique minimum, found {}", bottoms.len()),
            });
        }
        if tops.len() != 1 {
            return Err(LatticeError::NotALattice {
                reason: format!("expected a unique maximum, found {}", tops.len()),
            });
        }
        let (bottom, top) = (bottoms[0] as u32, tops[0] as u32);

        // Meet and join tables. The common-lower-bound set of (a, b) is
        // down-closed, so it has a greatest element m iff it equals the
        // below-row of some member m of matching cardinality.
        let words = below.words;
        let mut meet = vec![0u32; n * n];
        let mut join = vec![0u32; n * n];
        let mut buf = vec![0u64; words];
        for a in 0..n {
            for b in a..n {
                and_rows(below.row(a), below.row(b), &mut buf);
                let k = count_bits(&buf);
                let m = iter_bits(&buf)
                    .find(|&x| below.row_count(x) == k && below.row(x) == buf.as_slice());
                let m = m.ok_or_else(|| LatticeError::NotALattice {
                    reason: format!(
                        "pair (`{}`, `{}`) has no unique meet",
                        elements[a], elements[b]
                    ),
                })? as u32;
                meet[a * n + b] = m;
                meet[b * n + a] = m;

                and_rows(above.row(a), above.row(b), &mut buf);
                let k = count_bits(&buf);
                let j = iter_bits(&buf)
                    .find(|&x| above.row_count(x) == k && above.row(x) == buf.as_slice());
                let j = j.ok_or_else(|| LatticeError::NotALattice {
                    reason: format!(
                        "pair (`{}`, `{}`) has no unique join",
                        elements[a], elements[b]
                    ),
                })? as u32;
                join[a * n + b] = j;
                join[b * n + a] = j;
            }
        }

        // Orthocomplement map: total involution on labels.
        let mut ortho_vec = vec![u32::MAX; n];
        for (from, to) in ortho {
            let (a, b) = (resolve(from)?, resolve(to)?);
            ortho_vec[a] = b as u32;
        }
        for x in 0..n {
            if ortho_vec[x] == u32::MAX {
                return Err(LatticeError::OrthoAxiomViolation {
                    axiom: OrthoAxiom::Involution,
                    witness: format!("`{}` has no complement assigned", elements[x]),
                });
            }
        }
        for x in 0..n {
            let y = ortho_vec[x] as usize;
            if ortho_vec[y] as usize != x {
                return Err(LatticeError::OrthoAxiomViolation {
                    axiom: OrthoAxiom::Involution,
                    witness: format!("¬(¬`{}`) = `{}`", elements[x], elements[ortho_vec[y] as usize]),
                });
            }
        }

        let lat = FiniteOrthoLattice {
            labels: elements,
            index,
            repr: Repr::Explicit(Box::new(ExplicitTables { below, meet, join })),
            ortho: ortho_vec,
            bottom,
            top,
            atoms: Vec::new(),
            distributive: OnceLock::new(),
        };
        lat.validate_ortho_axioms()?;
        lat.validate_orthomodular()?;
        lat.finish_with_atoms()
    }

    /// The power-set lattice on `n` atoms: 2ⁿ elements, a single block.
    ///
    /// Atoms are labelled `a1..an`; interior elements join their atom
    /// labels with `|`. Meet, join, complement and order are bitmask
    /// operations on the element index, so no tables are stored.
    pub fn boolean_algebra(n: usize) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::Parameter("atom count must be at least 1".into()));
        }
        if n > MAX_BOOLEAN_ATOMS {
            return Err(LatticeError::SizeLimit { limit: MAX_BOOLEAN_ATOMS, got: n });
        }
        let size = 1usize << n;
        let full = (size - 1) as u32;
        let mut labels = Vec::with_capacity(size);
        for mask in 0..size as u32 {
            labels.push(power_set_label(mask, full));
        }
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            index.insert(l.clone(), i as u32);
        }
        let ortho = (0..size as u32).map(|m| full ^ m).collect();
        let atoms = (0..n).map(|i| 1u32 << i).collect();
        let distributive = OnceLock::new();
        let _ = distributive.set(true);
        Ok(FiniteOrthoLattice {
            labels,
            index,
            repr: Repr::PowerSet,
            ortho,
            bottom: 0,
            top: full,
            atoms,
            distributive,
        })
    }

    /// MO(n): the horizontal sum of `n` four-element Boolean blocks
    /// sharing bottom and top. 2n+2 elements, 2n atoms, n blocks, n
    /// frames; orthomodular and (for n ≥ 2) non-distributive.
    ///
    /// Atoms of block k are labelled `a{k}` and `a{k}'`.
    pub fn mo(n: usize) -> Result<Self, LatticeError> {
        if n < 2 {
            return Err(LatticeError::Parameter("MO(n) requires at least 2 blocks".into()));
        }
        if n > MAX_MO_BLOCKS {
            return Err(LatticeError::SizeLimit { limit: MAX_MO_BLOCKS, got: n });
        }
        let mut elements = vec!["0".to_string()];
        let mut covers = Vec::new();
        let mut ortho = BTreeMap::new();
        ortho.insert("0".to_string(), "1".to_string());
        ortho.insert("1".to_string(), "0".to_string());
        for k in 1..=n {
            let a = format!("a{k}");
            let ac = format!("a{k}'");
            covers.push(("0".to_string(), a.clone()));
            covers.push(("0".to_string(), ac.clone()));
            covers.push((a.clone(), "1".to_string()));
            covers.push((ac.clone(), "1".to_string()));
            ortho.insert(a.clone(), ac.clone());
            ortho.insert(ac.clone(), a.clone());
            elements.push(a);
            elements.push(ac);
        }
        elements.push("1".to_string());
        Self::from_covers(elements, &covers, &ortho)
    }

    /// Horizontal sum (0,1-pasting) of Boolean blocks with the given atom
    /// counts. Every block needs at least two atoms; `mo(n)` is the
    /// special case of n two-atom blocks.
    ///
    /// Elements of block k are labelled `b{k}:<atom-join>`.
    pub fn horizontal_sum(atoms_per_block: &[usize]) -> Result<Self, LatticeError> {
        if atoms_per_block.len() < 2 {
            return Err(LatticeError::Parameter("pasting requires at least 2 blocks".into()));
        }
        let mut total = 2usize;
        for (k, &m) in atoms_per_block.iter().enumerate() {
            if m < 2 {
                return Err(LatticeError::Parameter(format!(
                    "block {} has {} atoms; at least 2 required",
                    k + 1,
                    m
                )));
            }
            if m > MAX_BOOLEAN_ATOMS {
                return Err(LatticeError::SizeLimit { limit: MAX_BOOLEAN_ATOMS, got: m });
            }
            total += (1usize << m) - 2;
        }
        if total > MAX_EXPLICIT_ELEMENTS {
            return Err(LatticeError::SizeLimit { limit: MAX_EXPLICIT_ELEMENTS, got: total });
        }

        let mut elements = vec!["0".to_string()];
        let mut covers = Vec::new();
        let mut ortho = BTreeMap::new();
        ortho.insert("0".to_string(), "1".to_string());
        ortho.insert("1".to_string(), "0".to_string());
        for (k, &m) in atoms_per_block.iter().enumerate() {
            let full = ((1usize << m) - 1) as u32;
            let name = |mask: u32| -> String {
                if mask == 0 {
                    "0".to_string()
                } else if mask == full {
                    "1".to_string()
                } else {
                    format!("b{}:{}", k + 1, power_set_label(mask, full))
                }
            };
            for mask in 1..full {
                elements.push(name(mask));
                ortho.insert(name(mask), name(full ^ mask));
                for bit in 0..m {
                    let b = 1u32 << bit;
                    if mask & b == 0 {
                        covers.push((name(mask), name(mask | b)));
                    }
                }
            }
            for bit in 0..m {
                covers.push(("0".to_string(), name(1 << bit)));
            }
        }
        elements.push("1".to_string());
        Self::from_covers(elements, &covers, &ortho)
    }

    // ------------------------------------------------------------------
    // Queries
    // ------------------------------------------------------------------

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a validated lattice always has at least bottom = top
    }

    pub fn label(&self, i: u32) -> &str {
        &self.labels[i as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn bottom(&self) -> u32 {
        self.bottom
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn leq(&self, a: u32, b: u32) -> bool {
        match &self.repr {
            Repr::Explicit(t) => t.below.get(b as usize, a as usize),
            Repr::PowerSet => a & b == a,
        }
    }

    pub fn meet(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Explicit(t) => t.meet[a as usize * self.len() + b as usize],
            Repr::PowerSet => a & b,
        }
    }

    pub fn join(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Explicit(t) => t.join[a as usize * self.len() + b as usize],
            Repr::PowerSet => a | b,
        }
    }

    pub fn ortho(&self, a: u32) -> u32 {
        self.ortho[a as usize]
    }

    /// a ⊥ b, i.e. a ≤ ¬b.
    pub fn orthogonal(&self, a: u32, b: u32) -> bool {
        self.leq(a, self.ortho(b))
    }

    /// a commutes with b: a = (a ∧ b) ∨ (a ∧ ¬b). Pairwise-commuting
    /// subsets of an orthomodular lattice generate Boolean subalgebras.
    pub fn commutes(&self, a: u32, b: u32) -> bool {
        self.join(self.meet(a, b), self.meet(a, self.ortho(b))) == a
    }

    /// All elements covering bottom, sorted ascending by index.
    pub fn atoms(&self) -> &[u32] {
        &self.atoms
    }

    /// Elements of the lattice as indices.
    pub fn element_indices(&self) -> impl Iterator<Item = u32> {
        0..self.len() as u32
    }

    /// The set {x : x ≤ a}, sorted ascending.
    pub fn down_set(&self, a: u32) -> Vec<u32> {
        self.element_indices().filter(|&x| self.leq(x, a)).collect()
    }

    /// Covering pairs (x, y) with x ⋖ y, in index order.
    pub fn cover_pairs(&self) -> Vec<(u32, u32)> {
        let n = self.len() as u32;
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && self.leq(x, y) {
                    let strictly_between = (0..n)
                        .any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y));
                    if !strictly_between {
                        out.push((x, y));
                    }
                }
            }
        }
        out
    }

    /// True iff meet and join distribute over each other on every triple.
    pub fn is_distributive(&self) -> bool {
        *self.distributive.get_or_init(|| {
            let n = self.len() as u32;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if self.meet(a, self.join(b, c))
                            != self.join(self.meet(a, b), self.meet(a, c))
                        {
                            return false;
                        }
                    }
                }
            }
            true
        })
    }

    /// Diagnostic: x ≤ b implies x ∨ (a ∧ b) = (x ∨ a) ∧ b.
    pub fn is_modular(&self) -> bool {
        if matches!(self.repr, Repr::PowerSet) {
            return true;
        }
        let n = self.len() as u32;
        for x in 0..n {
            for b in 0..n {
                if !self.leq(x, b) {
                    continue;
                }
                for a in 0..n {
                    if self.join(x, self.meet(a, b)) != self.meet(self.join(x, a), b) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether `subset` is a Boolean subalgebra.
    ///
    /// The subset must contain bottom and top and be closed under meet,
    /// join and complement ([`LatticeError::NotASubalgebra`] otherwise);
    /// the return value reports distributivity of the induced algebra.
    pub fn is_boolean_subalgebra(&self, subset: &[u32]) -> Result<bool, LatticeError> {
        let mut members: Vec<u32> = subset.to_vec();
        members.sort_unstable();
        members.dedup();
        if members.iter().any(|&x| x as usize >= self.len()) {
            return Err(LatticeError::NotASubalgebra {
                reason: "subset contains an out-of-range index".into(),
            });
        }
        let contains = |x: u32| members.binary_search(&x).is_ok();
        if !contains(self.bottom) || !contains(self.top) {
            return Err(LatticeError::NotASubalgebra {
                reason: "subset must contain bottom and top".into(),
            });
        }
        for &a in &members {
            if !contains(self.ortho(a)) {
                return Err(LatticeError::NotASubalgebra {
                    reason: format!("not closed under complement at `{}`", self.label(a)),
                });
            }
            for &b in &members {
                if !contains(self.meet(a, b)) || !contains(self.join(a, b)) {
                    return Err(LatticeError::NotASubalgebra {
                        reason: format!(
                            "not closed under meet/join at (`{}`, `{}`)",
                            self.label(a),
                            self.label(b)
                        ),
                    });
                }
            }
        }
        for &a in &members {
            for &b in &members {
                for &c in &members {
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c))
                    {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Closure of `seed` under meet, join and complement (bottom and top
    /// included). Returns sorted indices.
    pub fn subalgebra_closure(&self, seed: &[u32]) -> Vec<u32> {
        let mut members: Vec<u32> = seed.to_vec();
        members.push(self.bottom);
        members.push(self.top);
        members.sort_unstable();
        members.dedup();
        loop {
            let mut added = Vec::new();
            for (i, &a) in members.iter().enumerate() {
                let o = self.ortho(a);
                if members.binary_search(&o).is_err() {
                    added.push(o);
                }
                for &b in &members[i..] {
                    for x in [self.meet(a, b), self.join(a, b)] {
                        if members.binary_search(&x).is_err() {
                            added.push(x);
                        }
                    }
                }
            }
            if added.is_empty() {
                return members;
            }
            members.extend(added);
            members.sort_unstable();
            members.dedup();
        }
    }

    /// All maximal Boolean subalgebras, in canonical order (sorted member
    /// lists, sorted lexicographically). Their union covers the lattice.
    ///
    /// Blocks are the maximal cliques of the commutation relation: a
    /// pairwise-commuting set is closed under the operations and its
    /// generated subalgebra is distributive, and conversely Boolean
    /// subalgebras commute pairwise.
    pub fn enumerate_blocks(&self) -> Vec<Block> {
        if let Repr::PowerSet = self.repr {
            return vec![Block { members: self.element_indices().collect() }];
        }
        let n = self.len();
        let mut adj = BitMat::new(n);
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if a != b && self.commutes(a, b) && self.commutes(b, a) {
                    adj.set(a as usize, b as usize);
                }
            }
        }
        let mut cliques = maximal_cliques(n, &adj);
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort();
        cliques.into_iter().map(|members| Block { members }).collect()
    }

    /// All frames: maximal pairwise-orthogonal atom sets joining to top,
    /// in canonical order.
    pub fn enumerate_frames(&self) -> Vec<LatticeFrame> {
        if let Repr::PowerSet = self.repr {
            return vec![LatticeFrame { atoms: self.atoms.clone() }];
        }
        let atoms = &self.atoms;
        let k = atoms.len();
        let mut adj = BitMat::new(k);
        for i in 0..k {
            for j in 0..k {
                if i != j && self.orthogonal(atoms[i], atoms[j]) {
                    adj.set(i, j);
                }
            }
        }
        let mut frames: Vec<Vec<u32>> = maximal_cliques(k, &adj)
            .into_iter()
            .map(|clique| {
                let mut set: Vec<u32> = clique.into_iter().map(|i| atoms[i as usize]).collect();
                set.sort_unstable();
                set
            })
            .filter(|set| {
                set.iter().copied().fold(self.bottom, |acc, a| self.join(acc, a)) == self.top
            })
            .collect();
        frames.sort();
        frames.into_iter().map(|atoms| LatticeFrame { atoms }).collect()
    }

    /// Structural identity check used to reject mixing values across
    /// lattices. Pointer equality short-circuits; otherwise labels,
    /// bounds and the complement map must agree.
    pub fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.bottom == other.bottom
                && self.top == other.top
                && self.labels == other.labels
                && self.ortho == other.ortho)
    }

    // ------------------------------------------------------------------
    // Validation internals
    // ------------------------------------------------------------------

    fn validate_ortho_axioms(&self) -> Result<(), LatticeError> {
        let n = self.len() as u32;
        // Complement laws first: a ∧ ¬a = 0, then a ∨ ¬a = 1.
        for a in 0..n {
            let o = self.ortho(a);
            if self.meet(a, o) != self.bottom {
                return Err(LatticeError::OrthoAxiomViolation {
                    axiom: OrthoAxiom::MeetComplement,
                    witness: format!("`{}` ∧ ¬`{}` ≠ 0", self.label(a), self.label(a)),
                });
            }
            if self.join(a, o) != self.top {
                return Err(LatticeError::OrthoAxiomViolation {
                    axiom: OrthoAxiom::JoinComplement,
                    witness: format!("`{}` ∨ ¬`{}` ≠ 1", self.label(a), self.label(a)),
                });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.leq(a, b) && !self.leq(self.ortho(b), self.ortho(a)) {
                    return Err(LatticeError::OrthoAxiomViolation {
                        axiom: OrthoAxiom::OrderReversal,
                        witness: format!("`{}` ≤ `{}`", self.label(a), self.label(b)),
                    });
                }
            }
        }
        Ok(())
    }

    fn validate_orthomodular(&self) -> Result<(), LatticeError> {
        let n = self.len() as u32;
        for a in 0..n {
            for b in 0..n {
                if self.leq(a, b) && self.join(a, self.meet(self.ortho(a), b)) != b {
                    return Err(LatticeError::NotOrthomodular {
                        a: self.label(a).to_string(),
                        b: self.label(b).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    fn finish_with_atoms(mut self) -> Result<Self, LatticeError> {
        let n = self.len() as u32;
        let bottom = self.bottom;
        // x is an atom iff the only elements ≤ x are bottom and x itself.
        let atoms: Vec<u32> = (0..n)
            .filter(|&x| {
                x != bottom && (0..n).all(|y| !self.leq(y, x) || y == x || y == bottom)
            })
            .collect();
        // Atomicity: every nonzero element dominates an atom. In a finite
        // lattice this always holds; checked to honor the contract.
        for x in 0..n {
            if x != bottom && !atoms.iter().any(|&a| self.leq(a, x)) {
                return Err(LatticeError::NotAtomic(self.label(x).to_string()));
            }
        }
        self.atoms = atoms;
        Ok(self)
    }
}

fn power_set_label(mask: u32, full: u32) -> String {
    if mask == 0 {
        "0".to_string()
    } else if mask == full {
        "1".to_string()
    } else {
        let mut parts = Vec::new();
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros();
            parts.push(format!("a{}", i + 1));
            m &= m - 1;
        }
        parts.join("|")
    }
}

/// Bron–Kerbosch with pivoting over a bit-matrix adjacency.
fn maximal_cliques(n: usize, adj: &BitMat) -> Vec<Vec<u32>> {
    if n == 0 {
        return Vec::new();
    }
    let words = n.div_ceil(64);
    let mut full = vec![u64::MAX; words];
    if n % 64 != 0 {
        full[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut out = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(adj, &mut r, full, vec![0; words], &mut out);
    out
}

fn bron_kerbosch(
    adj: &BitMat,
    r: &mut Vec<u32>,
    p: Vec<u64>,
    x: Vec<u64>,
    out: &mut Vec<Vec<u32>>,
) {
    if count_bits(&p) == 0 && count_bits(&x) == 0 {
        out.push(r.clone());
        return;
    }
    // Pivot: vertex in P ∪ X with the most neighbors in P.
    let pivot = iter_bits(&p)
        .chain(iter_bits(&x))
        .max_by_key(|&u| {
            adj.row(u).iter().zip(&p).map(|(a, b)| (a & b).count_ones() as usize).sum::<usize>()
        })
        .expect("nonempty P ∪ X");
    let mut candidates: Vec<usize> = iter_bits(&p)
        .filter(|&v| !adj.get(pivot, v))
        .collect();
    candidates.sort_unstable();
    let mut p = p;
    let mut x = x;
    for v in candidates {
        r.push(v as u32);
        let mut p2 = p.clone();
        let mut x2 = x.clone();
        for ((pw, xw), aw) in p2.iter_mut().zip(x2.iter_mut()).zip(adj.row(v)) {
            *pw &= aw;
            *xw &= aw;
        }
        bron_kerbosch(adj, r, p2, x2, out);
        r.pop();
        p[v / 64] &= !(1u64 << (v % 64));
        x[v / 64] |= 1u64 << (v % 64);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> String {
        v.to_string()
    }

    fn diamond(ortho_a: &str) -> Result<FiniteOrthoLattice, LatticeError> {
        let elements = vec![s("0"), s("a"), s("a'"), s("1")];
        let covers = vec![
            (s("0"), s("a")),
            (s("0"), s("a'")),
            (s("a"), s("1")),
            (s("a'"), s("1")),
        ];
        let mut ortho = BTreeMap::new();
        ortho.insert(s("0"), s("1"));
        ortho.insert(s("1"), s("0"));
        ortho.insert(s("a"), s(ortho_a));
        ortho.insert(s("a'"), if ortho_a == "a" { s("a'") } else { s("a") });
        FiniteOrthoLattice::from_covers(elements, &covers, &ortho)
    }

    #[test]
    fn diamond_is_a_boolean_lattice() {
        let l = diamond("a'").unwrap();
        assert_eq!(l.len(), 4);
        assert!(l.is_distributive());
        assert_eq!(l.atoms().len(), 2);
        assert_eq!(l.enumerate_blocks().len(), 1);
        let a = l.index_of("a").unwrap();
        assert_eq!(l.ortho(a), l.index_of("a'").unwrap());
    }

    #[test]
    fn diamond_with_self_complement_is_rejected() {
        match diamond("a") {
            Err(LatticeError::OrthoAxiomViolation { axiom, .. }) => {
                assert_eq!(axiom, OrthoAxiom::MeetComplement);
            }
            other => panic!("expected MeetComplement violation, got {other:?}"),
        }
    }

    #[test]
    fn mo2_from_covers_is_orthomodular_and_not_distributive() {
        let l = FiniteOrthoLattice::mo(2).unwrap();
        assert_eq!(l.len(), 6);
        assert_eq!(l.atoms().len(), 4);
        assert!(!l.is_distributive());
        assert!(l.is_modular());
        // exhaustive distributivity scan finds a witness
        let a = l.index_of("a1").unwrap();
        let b = l.index_of("a2").unwrap();
        let bc = l.index_of("a2'").unwrap();
        assert_ne!(
            l.meet(a, l.join(b, bc)),
            l.join(l.meet(a, b), l.meet(a, bc))
        );
    }

    #[test]
    fn bowtie_is_not_a_lattice() {
        // a, b share two minimal upper bounds c, d.
        let elements = vec![s("0"), s("a"), s("b"), s("c"), s("d"), s("1")];
        let covers = vec![
            (s("0"), s("a")),
            (s("0"), s("b")),
            (s("a"), s("c")),
            (s("a"), s("d")),
            (s("b"), s("c")),
            (s("b"), s("d")),
            (s("c"), s("1")),
            (s("d"), s("1")),
        ];
        let mut ortho = BTreeMap::new();
        for (x, y) in [("0", "1"), ("a", "d"), ("b", "c")] {
            ortho.insert(s(x), s(y));
            ortho.insert(s(y), s(x));
        }
        match FiniteOrthoLattice::from_covers(elements, &covers, &ortho) {
            Err(LatticeError::NotALattice { .. }) => {}
            other => panic!("expected NotALattice, got {other:?}"),
        }
    }

    #[test]
    fn benzene_ring_is_not_orthomodular() {
        // O6: 0 < x < y < 1 and 0 < y' < x' < 1 with ¬x = x', ¬y = y'.
        let elements = vec![s("0"), s("x"), s("y"), s("y'"), s("x'"), s("1")];
        let covers = vec![
            (s("0"), s("x")),
            (s("x"), s("y")),
            (s("y"), s("1")),
            (s("0"), s("y'")),
            (s("y'"), s("x'")),
            (s("x'"), s("1")),
        ];
        let mut ortho = BTreeMap::new();
        for (a, b) in [("0", "1"), ("x", "x'"), ("y", "y'")] {
            ortho.insert(s(a), s(b));
            ortho.insert(s(b), s(a));
        }
        match FiniteOrthoLattice::from_covers(elements, &covers, &ortho) {
            Err(LatticeError::NotOrthomodular { .. }) => {}
            other => panic!("expected NotOrthomodular, got {other:?}"),
        }
    }

    #[test]
    fn boolean_algebra_shapes() {
        let b2 = FiniteOrthoLattice::boolean_algebra(2).unwrap();
        assert_eq!(b2.len(), 4);
        assert_eq!(b2.atoms().len(), 2);
        assert_eq!(b2.enumerate_blocks().len(), 1);

        let b3 = FiniteOrthoLattice::boolean_algebra(3).unwrap();
        assert_eq!(b3.len(), 8);
        assert_eq!(b3.atoms().len(), 3);

        let b1 = FiniteOrthoLattice::boolean_algebra(1).unwrap();
        assert_eq!(b1.len(), 2);
        assert_eq!(b1.atoms(), &[b1.top()]);

        assert!(matches!(
            FiniteOrthoLattice::boolean_algebra(17),
            Err(LatticeError::SizeLimit { .. })
        ));
    }

    #[test]
    fn mo_shapes() {
        let m2 = FiniteOrthoLattice::mo(2).unwrap();
        assert_eq!(m2.len(), 6);
        assert_eq!(m2.atoms().len(), 4);
        assert_eq!(m2.enumerate_blocks().len(), 2);

        let m3 = FiniteOrthoLattice::mo(3).unwrap();
        assert_eq!(m3.len(), 8);
        assert_eq!(m3.atoms().len(), 6);
        assert_eq!(m3.enumerate_blocks().len(), 3);

        assert!(matches!(FiniteOrthoLattice::mo(65), Err(LatticeError::SizeLimit { .. })));
        assert!(matches!(FiniteOrthoLattice::mo(1), Err(LatticeError::Parameter(_))));
    }

    #[test]
    fn frames_of_small_lattices() {
        let b3 = FiniteOrthoLattice::boolean_algebra(3).unwrap();
        let frames = b3.enumerate_frames();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].atoms, b3.atoms());

        let m2 = FiniteOrthoLattice::mo(2).unwrap();
        let frames = m2.enumerate_frames();
        assert_eq!(frames.len(), 2);
        let l = |x: &str| m2.index_of(x).unwrap();
        assert!(frames.iter().any(|f| f.atoms == vec![l("a1").min(l("a1'")), l("a1").max(l("a1'"))]));
        assert!(frames.iter().any(|f| f.atoms == vec![l("a2").min(l("a2'")), l("a2").max(l("a2'"))]));

        let m4 = FiniteOrthoLattice::mo(4).unwrap();
        assert_eq!(m4.enumerate_frames().len(), 4);
    }

    #[test]
    fn blocks_cover_the_lattice() {
        for lat in [
            FiniteOrthoLattice::boolean_algebra(1).unwrap(),
            FiniteOrthoLattice::boolean_algebra(4).unwrap(),
            FiniteOrthoLattice::mo(2).unwrap(),
            FiniteOrthoLattice::mo(5).unwrap(),
            FiniteOrthoLattice::horizontal_sum(&[2, 3]).unwrap(),
            FiniteOrthoLattice::horizontal_sum(&[3, 3, 2]).unwrap(),
        ] {
            let mut covered: Vec<u32> = lat
                .enumerate_blocks()
                .iter()
                .flat_map(|b| b.members.iter().copied())
                .collect();
            covered.sort_unstable();
            covered.dedup();
            let all: Vec<u32> = lat.element_indices().collect();
            assert_eq!(covered, all);
        }
    }

    #[test]
    fn every_frame_generates_a_boolean_subalgebra_inside_a_block() {
        for lat in [
            FiniteOrthoLattice::mo(3).unwrap(),
            FiniteOrthoLattice::horizontal_sum(&[3, 2]).unwrap(),
        ] {
            let blocks = lat.enumerate_blocks();
            for frame in lat.enumerate_frames() {
                let closure = lat.subalgebra_closure(&frame.atoms);
                assert!(lat.is_boolean_subalgebra(&closure).unwrap());
                assert!(blocks.iter().any(|b| closure.iter().all(|x| b.members.contains(x))));
            }
        }
    }

    #[test]
    fn ortho_is_an_order_anti_isomorphism() {
        for lat in [
            FiniteOrthoLattice::boolean_algebra(3).unwrap(),
            FiniteOrthoLattice::mo(3).unwrap(),
            FiniteOrthoLattice::horizontal_sum(&[2, 4]).unwrap(),
        ] {
            let n = lat.len() as u32;
            for a in 0..n {
                assert_eq!(lat.ortho(lat.ortho(a)), a);
                for b in 0..n {
                    assert_eq!(lat.leq(a, b), lat.leq(lat.ortho(b), lat.ortho(a)));
                }
            }
        }
    }

    #[test]
    fn de_morgan_holds_in_every_constructed_lattice() {
        for lat in [
            FiniteOrthoLattice::boolean_algebra(4).unwrap(),
            FiniteOrthoLattice::mo(4).unwrap(),
            FiniteOrthoLattice::horizontal_sum(&[3, 3]).unwrap(),
        ] {
            let n = lat.len() as u32;
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(lat.ortho(lat.join(a, b)), lat.meet(lat.ortho(a), lat.ortho(b)));
                    assert_eq!(lat.ortho(lat.meet(a, b)), lat.join(lat.ortho(a), lat.ortho(b)));
                }
            }
        }
    }

    #[test]
    fn boolean_subset_checks() {
        let m2 = FiniteOrthoLattice::mo(2).unwrap();
        for block in m2.enumerate_blocks() {
            assert!(m2.is_boolean_subalgebra(&block.members).unwrap());
        }
        let all: Vec<u32> = m2.element_indices().collect();
        assert!(!m2.is_boolean_subalgebra(&all).unwrap());
        assert!(m2.is_boolean_subalgebra(&[m2.bottom(), m2.top()]).unwrap());
        // {0, a1, 1} is not closed under complement-join
        let a1 = m2.index_of("a1").unwrap();
        assert!(m2.is_boolean_subalgebra(&[m2.bottom(), a1, m2.top()]).is_err());
    }

    #[test]
    fn block_atoms_of_mo2() {
        let m2 = FiniteOrthoLattice::mo(2).unwrap();
        let blocks = m2.enumerate_blocks();
        assert_eq!(blocks.len(), 2);
        for b in &blocks {
            assert_eq!(b.members.len(), 4);
            assert_eq!(b.atoms(&m2).len(), 2);
        }
    }

    #[test]
    fn power_set_cover_pairs_match_explicit_construction() {
        let b2 = FiniteOrthoLattice::boolean_algebra(2).unwrap();
        let covers = b2.cover_pairs();
        assert_eq!(covers.len(), 4);
        for (x, y) in covers {
            assert!(b2.leq(x, y) && x != y);
        }
    }
}
