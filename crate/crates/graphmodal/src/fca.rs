//! Formal contexts, concepts, and concept-lattice enumeration.
//!
//! A context is a relation between objects and attributes. `up` collects the
//! attributes shared by a set of objects, `down` the objects sharing a set
//! of attributes; a concept is a fixpoint of the induced closure. For graph
//! polarities both sides are the same universe, but nothing here assumes
//! that.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::bits::BitVec;
use crate::relcore::{Rel, StateSet, Universe};

#[derive(Debug, Error)]
pub enum FcaError {
    #[error("concept count exceeds cap of {cap}; raise the cap to enumerate this lattice")]
    TooManyConcepts { cap: usize },
}

/// Default ceiling on enumerated concepts.
pub const DEFAULT_CONCEPT_CAP: usize = 1 << 16;

/// Object universes at or below this size are enumerated by plain subset
/// scan; larger ones use lectic closure stepping.
const SUBSET_SCAN_LIMIT: usize = 20;

#[derive(Clone, Debug)]
pub struct FormalContext {
    incidence: Rel,
}

/// Galois-stable pair: `up(extent) == intent` and `down(intent) == extent`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Concept {
    pub extent: StateSet,
    pub intent: StateSet,
}

impl FormalContext {
    pub fn new(incidence: Rel) -> FormalContext {
        FormalContext { incidence }
    }

    pub fn objects(&self) -> &Arc<Universe> {
        self.incidence.source()
    }

    pub fn attributes(&self) -> &Arc<Universe> {
        self.incidence.target()
    }

    pub fn incidence(&self) -> &Rel {
        &self.incidence
    }

    /// Attributes shared by every object in `b`.
    pub fn up(&self, b: &StateSet) -> StateSet {
        self.incidence.round1(b)
    }

    /// Objects bearing every attribute in `y`.
    pub fn down(&self, y: &StateSet) -> StateSet {
        self.incidence.round0(y)
    }

    pub fn closure(&self, b: &StateSet) -> StateSet {
        self.down(&self.up(b))
    }

    pub fn closure_intent(&self, y: &StateSet) -> StateSet {
        self.up(&self.down(y))
    }

    pub fn is_stable(&self, b: &StateSet) -> bool {
        self.closure(b) == *b
    }

    pub fn is_stable_intent(&self, y: &StateSet) -> bool {
        self.closure_intent(y) == *y
    }

    /// Smallest concept whose extent contains `b`.
    pub fn concept_from_extent(&self, b: &StateSet) -> Concept {
        let intent = self.up(b);
        Concept { extent: self.down(&intent), intent }
    }

    /// Largest concept whose intent contains `y`.
    pub fn concept_from_intent(&self, y: &StateSet) -> Concept {
        let extent = self.down(y);
        Concept { extent, intent: self.up(&self.down(y)) }
    }

    pub fn is_concept(&self, c: &Concept) -> bool {
        self.up(&c.extent) == c.intent && self.down(&c.intent) == c.extent
    }

    /// All concepts, extents in lexicographic order. Hard-errors beyond
    /// `cap`.
    pub fn enumerate_concepts(&self, cap: usize) -> Result<ConceptLattice, FcaError> {
        let extents = if self.objects().size() <= SUBSET_SCAN_LIMIT {
            self.extents_by_subset_scan(cap)?
        } else {
            self.extents_by_lectic_step(cap)?
        };
        Ok(ConceptLattice::from_extents(self, extents))
    }

    fn extents_by_subset_scan(&self, cap: usize) -> Result<Vec<StateSet>, FcaError> {
        let n = self.objects().size();
        let mut seen: HashMap<StateSet, ()> = HashMap::new();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << n) {
            let b = StateSet::from_indices(
                self.objects(),
                (0..n).filter(|i| mask >> i & 1 == 1),
            );
            let closed = self.closure(&b);
            if seen.insert(closed.clone(), ()).is_none() {
                out.push(closed);
                if out.len() > cap {
                    return Err(FcaError::TooManyConcepts { cap });
                }
            }
        }
        out.sort_by(|a, b| a.lex_cmp(b));
        Ok(out)
    }

    /// Ganter's next-closure walk over extents; emits in lexicographic
    /// order without visiting non-closed candidates.
    fn extents_by_lectic_step(&self, cap: usize) -> Result<Vec<StateSet>, FcaError> {
        let n = self.objects().size();
        let mut out = Vec::new();
        let mut current = self.closure(&StateSet::empty(self.objects()));
        loop {
            out.push(current.clone());
            if out.len() > cap {
                return Err(FcaError::TooManyConcepts { cap });
            }
            match self.lectic_next(&current, n) {
                Some(next) => current = next,
                None => break,
            }
        }
        Ok(out)
    }

    fn lectic_next(&self, a: &StateSet, n: usize) -> Option<StateSet> {
        let mut a = a.clone();
        for i in (0..n).rev() {
            if a.contains(i) {
                a = a.minus(&StateSet::singleton(self.objects(), i));
            } else {
                let mut cand = a.clone();
                cand.insert(i);
                let closed = self.closure(&cand);
                let fresh = closed.minus(&a);
                if fresh.iter().all(|j| j >= i) {
                    return Some(closed);
                }
            }
        }
        None
    }
}

/// Finite lattice of all concepts of a context, ordered by extent
/// inclusion.
pub struct ConceptLattice {
    context: FormalContext,
    concepts: Vec<Concept>,
    by_extent: HashMap<StateSet, usize>,
    leq: Vec<BitVec>,
    top: usize,
    bottom: usize,
}

impl ConceptLattice {
    fn from_extents(context: &FormalContext, extents: Vec<StateSet>) -> ConceptLattice {
        let concepts: Vec<Concept> = extents
            .into_iter()
            .map(|e| {
                let intent = context.up(&e);
                Concept { extent: e, intent }
            })
            .collect();
        let by_extent = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (c.extent.clone(), i))
            .collect();
        let k = concepts.len();
        let mut leq = vec![BitVec::new(k); k];
        for i in 0..k {
            for j in 0..k {
                if concepts[i].extent.is_subset(&concepts[j].extent) {
                    leq[i].set(j, true);
                }
            }
        }
        let bottom = (0..k)
            .find(|&i| (0..k).all(|j| leq[i].get(j)))
            .expect("closure system always has a least element");
        let top = (0..k)
            .find(|&i| (0..k).all(|j| leq[j].get(i)))
            .expect("closure system always has a greatest element");
        ConceptLattice { context: context.clone(), concepts, by_extent, leq, top, bottom }
    }

    pub fn context(&self) -> &FormalContext {
        &self.context
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept(&self, i: usize) -> &Concept {
        &self.concepts[i]
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn index_of_extent(&self, extent: &StateSet) -> Option<usize> {
        self.by_extent.get(extent).copied()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i].get(j)
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// Meet: intersect extents (extents are closed under intersection).
    pub fn meet(&self, c: &Concept, d: &Concept) -> Concept {
        let extent = c.extent.intersect(&d.extent);
        let intent = self.context.up(&extent);
        Concept { extent, intent }
    }

    /// Join: intersect intents and take the objects below.
    pub fn join(&self, c: &Concept, d: &Concept) -> Concept {
        let intent = c.intent.intersect(&d.intent);
        let extent = self.context.down(&intent);
        Concept { extent, intent }
    }

    pub fn meet_index(&self, i: usize, j: usize) -> usize {
        let m = self.meet(&self.concepts[i], &self.concepts[j]);
        self.by_extent[&m.extent]
    }

    pub fn join_index(&self, i: usize, j: usize) -> usize {
        let m = self.join(&self.concepts[i], &self.concepts[j]);
        self.by_extent[&m.extent]
    }

    /// Pairs `(lower, upper)` of the covering relation, for Hasse output.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let k = self.concepts.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                let strictly_between = (0..k).any(|m| {
                    m != i && m != j && self.leq(i, m) && self.leq(m, j)
                });
                if !strictly_between {
                    out.push((i, j));
                }
            }
        }
        out
    }
}
