//! Relation kernel: finite universes, state sets, binary relations, and the
//! image/preimage and bracket operators used by the concept-lattice layers.
//!
//! All operators are direct dense implementations of their defining
//! quantifier formulas. Values are immutable; every operation allocates its
//! result. Mixing values from different universes is a programming error and
//! panics rather than silently reindexing.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::bits::BitVec;

#[derive(Debug, Error)]
pub enum UniverseError {
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("empty interval {0}..{1}")]
    EmptyInterval(i64, i64),
}

/// Ordered collection of distinct state labels. States are addressed by
/// index; labels exist for I/O.
#[derive(Debug, PartialEq, Eq)]
pub struct Universe {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Set when the universe was declared as a consecutive integer interval.
    interval: Option<(i64, i64)>,
}

impl Universe {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Universe>, UniverseError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(UniverseError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Arc::new(Universe { labels, index, interval: None }))
    }

    /// Universe of the consecutive integers `lo..=hi`.
    pub fn interval(lo: i64, hi: i64) -> Result<Arc<Universe>, UniverseError> {
        if hi < lo {
            return Err(UniverseError::EmptyInterval(lo, hi));
        }
        let labels: Vec<String> = (lo..=hi).map(|v| v.to_string()).collect();
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Ok(Arc::new(Universe { labels, index, interval: Some((lo, hi)) }))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(|s| s.as_str())
    }

    /// Bounds of the declaring interval, when there was one.
    pub fn interval_bounds(&self) -> Option<(i64, i64)> {
        self.interval
    }
}

fn check_same(a: &Arc<Universe>, b: &Arc<Universe>, what: &str) {
    if !Arc::ptr_eq(a, b) && a != b {
        panic!("universe mismatch in {what}: {} vs {} states", a.size(), b.size());
    }
}

/// Subset of a universe.
#[derive(Clone, PartialEq, Eq)]
pub struct StateSet {
    uni: Arc<Universe>,
    bits: BitVec,
}

impl std::hash::Hash for StateSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // Sets are only ever mixed within one universe, so the bits alone
        // keep Hash consistent with Eq.
        self.bits.hash(state);
    }
}

impl StateSet {
    pub fn empty(uni: &Arc<Universe>) -> StateSet {
        StateSet { uni: uni.clone(), bits: BitVec::new(uni.size()) }
    }

    pub fn full(uni: &Arc<Universe>) -> StateSet {
        StateSet { uni: uni.clone(), bits: BitVec::full(uni.size()) }
    }

    pub fn singleton(uni: &Arc<Universe>, i: usize) -> StateSet {
        let mut s = StateSet::empty(uni);
        s.bits.set(i, true);
        s
    }

    pub fn from_indices(uni: &Arc<Universe>, indices: impl IntoIterator<Item = usize>) -> StateSet {
        let mut s = StateSet::empty(uni);
        for i in indices {
            assert!(i < uni.size(), "state index {i} out of range");
            s.bits.set(i, true);
        }
        s
    }

    pub(crate) fn from_bits(uni: &Arc<Universe>, bits: BitVec) -> StateSet {
        debug_assert_eq!(bits.len(), uni.size());
        StateSet { uni: uni.clone(), bits }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.uni
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.uni.size(), "state index {i} out of range");
        self.bits.set(i, true);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        check_same(&self.uni, &other.uni, "union");
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        check_same(&self.uni, &other.uni, "intersect");
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn minus(&self, other: &StateSet) -> StateSet {
        check_same(&self.uni, &other.uni, "minus");
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn complement(&self) -> StateSet {
        StateSet { uni: self.uni.clone(), bits: self.bits.complement() }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        check_same(&self.uni, &other.uni, "is_subset");
        self.bits.is_subset(&other.bits)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        check_same(&self.uni, &other.uni, "intersects");
        self.bits.intersects(&other.bits)
    }

    /// Deterministic order: lexicographic on the membership sequence.
    pub fn lex_cmp(&self, other: &StateSet) -> std::cmp::Ordering {
        check_same(&self.uni, &other.uni, "lex_cmp");
        self.bits.lex_cmp(&other.bits)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.iter().map(|i| self.uni.label(i)).collect()
    }
}

impl std::fmt::Debug for StateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.uni.label(i))?;
        }
        write!(f, "}}")
    }
}

/// Binary relation between two universes, stored as successor rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Rel {
    src: Arc<Universe>,
    tgt: Arc<Universe>,
    rows: Vec<BitVec>,
}

impl Rel {
    pub fn empty(src: &Arc<Universe>, tgt: &Arc<Universe>) -> Rel {
        Rel {
            src: src.clone(),
            tgt: tgt.clone(),
            rows: vec![BitVec::new(tgt.size()); src.size()],
        }
    }

    pub fn full(src: &Arc<Universe>, tgt: &Arc<Universe>) -> Rel {
        Rel {
            src: src.clone(),
            tgt: tgt.clone(),
            rows: vec![BitVec::full(tgt.size()); src.size()],
        }
    }

    pub fn identity(uni: &Arc<Universe>) -> Rel {
        let mut r = Rel::empty(uni, uni);
        for i in 0..uni.size() {
            r.rows[i].set(i, true);
        }
        r
    }

    pub fn from_pairs(
        src: &Arc<Universe>,
        tgt: &Arc<Universe>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Rel {
        let mut r = Rel::empty(src, tgt);
        for (i, j) in pairs {
            r.set(i, j, true);
        }
        r
    }

    pub fn source(&self) -> &Arc<Universe> {
        &self.src
    }

    pub fn target(&self) -> &Arc<Universe> {
        &self.tgt
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        assert!(i < self.src.size() && j < self.tgt.size(), "pair ({i},{j}) out of range");
        self.rows[i].set(j, v);
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| row.ones().map(move |j| (i, j)))
    }

    /// Successors of one state, as a set over the target universe.
    pub fn row(&self, i: usize) -> StateSet {
        StateSet::from_bits(&self.tgt, self.rows[i].clone())
    }

    pub fn complement(&self) -> Rel {
        Rel {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            rows: self.rows.iter().map(|r| r.complement()).collect(),
        }
    }

    pub fn converse(&self) -> Rel {
        let mut out = Rel::empty(&self.tgt, &self.src);
        for (i, j) in self.pairs() {
            out.rows[j].set(i, true);
        }
        out
    }

    pub fn union(&self, other: &Rel) -> Rel {
        self.check_dims(other, "union");
        let mut out = self.clone();
        for (r, o) in out.rows.iter_mut().zip(&other.rows) {
            r.union_with(o);
        }
        out
    }

    pub fn intersect(&self, other: &Rel) -> Rel {
        self.check_dims(other, "intersect");
        let mut out = self.clone();
        for (r, o) in out.rows.iter_mut().zip(&other.rows) {
            r.intersect_with(o);
        }
        out
    }

    pub fn is_subset(&self, other: &Rel) -> bool {
        self.check_dims(other, "is_subset");
        self.rows.iter().zip(&other.rows).all(|(r, o)| r.is_subset(o))
    }

    pub fn is_reflexive(&self) -> bool {
        check_same(&self.src, &self.tgt, "is_reflexive");
        (0..self.src.size()).all(|i| self.rows[i].get(i))
    }

    /// First state without a loop, if any.
    pub fn missing_loop(&self) -> Option<usize> {
        check_same(&self.src, &self.tgt, "missing_loop");
        (0..self.src.size()).find(|&i| !self.rows[i].get(i))
    }

    pub fn reflexive_closure(&self) -> Rel {
        check_same(&self.src, &self.tgt, "reflexive_closure");
        self.union(&Rel::identity(&self.src))
    }

    /// Ordinary relational composition: `(self ; other)`.
    pub fn compose(&self, other: &Rel) -> Rel {
        check_same(&self.tgt, &other.src, "compose");
        let mut out = Rel::empty(&self.src, &other.tgt);
        for i in 0..self.src.size() {
            for j in self.rows[i].ones() {
                out.rows[i].union_with(&other.rows[j]);
            }
        }
        out
    }

    fn check_dims(&self, other: &Rel, what: &str) {
        check_same(&self.src, &other.src, what);
        check_same(&self.tgt, &other.tgt, what);
    }

    fn check_src(&self, s: &StateSet, what: &str) {
        check_same(&self.src, &s.uni, what);
    }

    fn check_tgt(&self, s: &StateSet, what: &str) {
        check_same(&self.tgt, &s.uni, what);
    }

    /// Forward image: `{ t | exists s in set with s R t }`.
    pub fn image(&self, set: &StateSet) -> StateSet {
        self.check_src(set, "image");
        let mut out = BitVec::new(self.tgt.size());
        for i in set.iter() {
            out.union_with(&self.rows[i]);
        }
        StateSet::from_bits(&self.tgt, out)
    }

    /// Preimage: `{ s | exists t in set with s R t }`.
    pub fn preimage(&self, set: &StateSet) -> StateSet {
        self.check_tgt(set, "preimage");
        let mut out = BitVec::new(self.src.size());
        for i in 0..self.src.size() {
            if self.rows[i].intersects(&set.bits) {
                out.set(i, true);
            }
        }
        StateSet::from_bits(&self.src, out)
    }

    /// Classical box: `{ s | forall t (s R t implies t in set) }`.
    pub fn box_sem(&self, set: &StateSet) -> StateSet {
        self.check_tgt(set, "box_sem");
        let mut out = BitVec::new(self.src.size());
        for i in 0..self.src.size() {
            if self.rows[i].is_subset(&set.bits) {
                out.set(i, true);
            }
        }
        StateSet::from_bits(&self.src, out)
    }

    /// Classical diamond; alias of [`Rel::preimage`].
    pub fn dia_sem(&self, set: &StateSet) -> StateSet {
        self.check_tgt(set, "dia_sem");
        self.preimage(set)
    }

    /// Round bracket, target side: `{ v | forall u in set, u R v }`.
    pub fn round1(&self, set: &StateSet) -> StateSet {
        self.check_src(set, "round1");
        let mut out = BitVec::full(self.tgt.size());
        for i in set.iter() {
            out.intersect_with(&self.rows[i]);
        }
        StateSet::from_bits(&self.tgt, out)
    }

    /// Round bracket, source side: `{ u | forall v in set, u R v }`.
    pub fn round0(&self, set: &StateSet) -> StateSet {
        self.check_tgt(set, "round0");
        let mut out = BitVec::new(self.src.size());
        for i in 0..self.src.size() {
            if set.bits.is_subset(&self.rows[i]) {
                out.set(i, true);
            }
        }
        StateSet::from_bits(&self.src, out)
    }

    /// Square bracket, target side: `{ v | forall u in set, not u R v }`.
    pub fn square1(&self, set: &StateSet) -> StateSet {
        self.check_src(set, "square1");
        let mut hit = BitVec::new(self.tgt.size());
        for i in set.iter() {
            hit.union_with(&self.rows[i]);
        }
        StateSet::from_bits(&self.tgt, hit.complement())
    }

    /// Square bracket, source side: `{ u | forall v in set, not u R v }`.
    pub fn square0(&self, set: &StateSet) -> StateSet {
        self.check_tgt(set, "square0");
        let mut out = BitVec::new(self.src.size());
        for i in 0..self.src.size() {
            if !self.rows[i].intersects(&set.bits) {
                out.set(i, true);
            }
        }
        StateSet::from_bits(&self.src, out)
    }

    /// Composition relative to `e`: `p (self o_e other) q` iff some witness
    /// `w` has `p self w` and every `e`-successor of `w` is an
    /// `other`-predecessor of `q`.
    pub fn comp_circ(&self, other: &Rel, e: &Rel) -> Rel {
        self.check_square_triple(other, e, "comp_circ");
        let other_cols = other.converse();
        let mut out = Rel::empty(&self.src, &self.src);
        let n = self.src.size();
        for p in 0..n {
            for q in 0..n {
                let ok = self.rows[p]
                    .ones()
                    .any(|w| e.rows[w].is_subset(&other_cols.rows[q]));
                if ok {
                    out.rows[p].set(q, true);
                }
            }
        }
        out
    }

    /// Dual composition relative to `e`: witness condition uses the
    /// `e`-predecessors of `w` instead of its successors.
    pub fn comp_bullet(&self, other: &Rel, e: &Rel) -> Rel {
        self.check_square_triple(other, e, "comp_bullet");
        let other_cols = other.converse();
        let e_cols = e.converse();
        let mut out = Rel::empty(&self.src, &self.src);
        let n = self.src.size();
        for p in 0..n {
            for q in 0..n {
                let ok = self.rows[p]
                    .ones()
                    .any(|w| e_cols.rows[w].is_subset(&other_cols.rows[q]));
                if ok {
                    out.rows[p].set(q, true);
                }
            }
        }
        out
    }

    fn check_square_triple(&self, other: &Rel, e: &Rel, what: &str) {
        check_same(&self.src, &self.tgt, what);
        check_same(&self.src, &other.src, what);
        check_same(&other.src, &other.tgt, what);
        check_same(&self.src, &e.src, what);
        check_same(&e.src, &e.tgt, what);
    }
}

impl std::fmt::Debug for Rel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Rel{{")?;
        for (k, (i, j)) in self.pairs().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}>{}", self.src.label(i), self.tgt.label(j))?;
        }
        write!(f, "}}")
    }
}
