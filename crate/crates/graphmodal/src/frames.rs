//! Reflexive graphs carrying modal relations, the compatibility conditions
//! those relations must satisfy, and the concept algebra they induce.
//!
//! The graph's indiscernibility relation `E` must be reflexive, and each
//! modal relation must be compatible with the polarity induced by the
//! complement of `E`. The two slots need dual conditions, matching the
//! sorts their sections feed into:
//!
//! * box slot: every column section `R^[0][{y}]` is a stable extent and
//!   every row section `R^[1][{b}]` is a stable intent — the box image of
//!   a concept intersects columns, the adjoint diamond intersects rows;
//! * diamond slot: every column section is a stable intent and every row
//!   section is a stable extent — the diamond image intersects columns on
//!   the intent side, the adjoint box intersects rows on the extent side.
//!
//! Taking converses swaps the two classes, so the derived adjoint
//! relations (the converse of the box relation interprets a diamond and
//! vice versa) are compatible in their own slots for free. `E` itself is
//! always box-compatible, and its converse always diamond-compatible.

use std::sync::Arc;

use thiserror::Error;

use crate::fca::{Concept, ConceptLattice, FcaError, FormalContext};
use crate::relcore::{Rel, StateSet, Universe};

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("E is not reflexive: state `{0}` has no loop")]
    NotReflexive(String),
    #[error("relation is not a square relation on the frame's universe")]
    BadDimensions,
    #[error("{0}")]
    Incompatible(CompatReport),
    #[error("operator output for `{op}` is not a concept on this frame (the frame is not compatible enough for this operator)")]
    UnstableResult { op: &'static str },
    #[error(transparent)]
    Fca(#[from] FcaError),
}

/// Which modal relation a violation was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelSlot {
    Box,
    Dia,
}

impl std::fmt::Display for RelSlot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelSlot::Box => write!(f, "Rbox"),
            RelSlot::Dia => write!(f, "Rdia"),
        }
    }
}

/// Which singleton-section family failed: `[0]` (columns, must be stable
/// extents) or `[1]` (rows, must be stable intents).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketSide {
    Zero,
    One,
}

#[derive(Debug, Clone)]
pub struct CompatViolation {
    pub slot: RelSlot,
    pub side: BracketSide,
    pub state: usize,
    pub section: StateSet,
    pub closure: StateSet,
}

#[derive(Debug, Clone, Default)]
pub struct CompatReport {
    pub violations: Vec<CompatViolation>,
}

impl CompatReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for CompatReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return write!(f, "compatible");
        }
        write!(f, "{} compatibility violation(s):", self.violations.len())?;
        for v in &self.violations {
            let side = match v.side {
                BracketSide::Zero => "[0]",
                BracketSide::One => "[1]",
            };
            write!(
                f,
                " {}{}-section at state index {} is {:?} but closes to {:?};",
                v.slot, side, v.state, v.section, v.closure
            )?;
        }
        Ok(())
    }
}

/// Closure of `b` on the extent side of the polarity of `e`.
pub fn extent_closure(e: &Rel, b: &StateSet) -> StateSet {
    e.square0(&e.square1(b))
}

/// Closure of `y` on the intent side of the polarity of `e`.
pub fn intent_closure(e: &Rel, y: &StateSet) -> StateSet {
    e.square1(&e.square0(y))
}

/// Polarity induced by a reflexive graph: incidence is the complement of
/// `e`, objects and attributes both the state universe.
pub fn polarity_of(e: &Rel) -> FormalContext {
    FormalContext::new(e.complement())
}

/// Singleton-section compatibility conditions for one relation slot. The
/// slot decides which closure each section family must be stable under.
pub fn check_rel_compat(e: &Rel, r: &Rel, slot: RelSlot) -> Vec<CompatViolation> {
    let uni = e.source();
    let n = uni.size();
    let mut out = Vec::new();
    for z in 0..n {
        let single = StateSet::singleton(uni, z);
        let col = r.square0(&single);
        let col_closed = match slot {
            RelSlot::Box => extent_closure(e, &col),
            RelSlot::Dia => intent_closure(e, &col),
        };
        if col_closed != col {
            out.push(CompatViolation {
                slot,
                side: BracketSide::Zero,
                state: z,
                section: col,
                closure: col_closed,
            });
        }
        let row = r.square1(&single);
        let row_closed = match slot {
            RelSlot::Box => intent_closure(e, &row),
            RelSlot::Dia => extent_closure(e, &row),
        };
        if row_closed != row {
            out.push(CompatViolation {
                slot,
                side: BracketSide::One,
                state: z,
                section: row,
                closure: row_closed,
            });
        }
    }
    out
}

/// Full compatibility report for a box/diamond relation pair.
pub fn check_e_compat(e: &Rel, rbox: &Rel, rdia: &Rel) -> CompatReport {
    let mut violations = check_rel_compat(e, rbox, RelSlot::Box);
    violations.extend(check_rel_compat(e, rdia, RelSlot::Dia));
    CompatReport { violations }
}

pub fn is_box_compatible(e: &Rel, r: &Rel) -> bool {
    check_rel_compat(e, r, RelSlot::Box).is_empty()
}

pub fn is_dia_compatible(e: &Rel, r: &Rel) -> bool {
    check_rel_compat(e, r, RelSlot::Dia).is_empty()
}

const EQUIVALENTS_LIMIT: usize = 14;

fn all_subsets(uni: &Arc<Universe>) -> impl Iterator<Item = StateSet> + '_ {
    let n = uni.size();
    assert!(
        n <= EQUIVALENTS_LIMIT,
        "subset sweep is exponential; universe of {n} states is too large"
    );
    (0u64..(1u64 << n))
        .map(move |mask| StateSet::from_indices(uni, (0..n).filter(|i| mask >> i & 1 == 1)))
}

/// Three independently evaluated formulations of `[0]`-side compatibility:
/// (i) singleton column sections are stable extents, (ii) all `square0`
/// images are stable extents, (iii) `square1` does not distinguish a set
/// from its extent closure. The three are provably equivalent; this
/// evaluates each by brute force so tests can confirm that.
pub fn check_e_compat_equivalents(e: &Rel, r: &Rel) -> (bool, bool, bool) {
    let uni = e.source();
    let i = (0..uni.size()).all(|z| {
        let col = r.square0(&StateSet::singleton(uni, z));
        extent_closure(e, &col) == col
    });
    let ii = all_subsets(uni).all(|y| {
        let img = r.square0(&y);
        extent_closure(e, &img) == img
    });
    let iii = all_subsets(uni).all(|b| r.square1(&b) == r.square1(&extent_closure(e, &b)));
    (i, ii, iii)
}

/// Dual triple for the `[1]` side: rows as stable intents.
pub fn check_e_compat_equivalents_dual(e: &Rel, r: &Rel) -> (bool, bool, bool) {
    let uni = e.source();
    let i = (0..uni.size()).all(|z| {
        let row = r.square1(&StateSet::singleton(uni, z));
        intent_closure(e, &row) == row
    });
    let ii = all_subsets(uni).all(|b| {
        let img = r.square1(&b);
        intent_closure(e, &img) == img
    });
    let iii = all_subsets(uni).all(|y| r.square0(&y) == r.square0(&intent_closure(e, &y)));
    (i, ii, iii)
}

/// Largest box-compatible subrelation of `r`: grow the complement until
/// every column is a stable extent and every row a stable intent.
pub fn repair_box_compatible(e: &Rel, r: &Rel) -> Rel {
    let uni = e.source();
    let n = uni.size();
    let mut comp = r.complement();
    loop {
        let mut changed = false;
        let cols = comp.converse();
        let mut new_cols = Vec::with_capacity(n);
        for y in 0..n {
            let col = cols.row(y);
            let closed = extent_closure(e, &col);
            if closed != col {
                changed = true;
            }
            new_cols.push(closed);
        }
        comp = Rel::from_pairs(
            uni,
            uni,
            new_cols.iter().enumerate().flat_map(|(y, c)| c.iter().map(move |u| (u, y))),
        );
        for b in 0..n {
            let row = comp.row(b);
            let closed = intent_closure(e, &row);
            if closed != row {
                changed = true;
                for v in closed.iter() {
                    comp.set(b, v, true);
                }
            }
        }
        if !changed {
            return comp.complement();
        }
    }
}

/// Largest diamond-compatible subrelation of `r`. Converse swaps the two
/// compatibility classes, so this reduces to the box-slot repair.
pub fn repair_dia_compatible(e: &Rel, r: &Rel) -> Rel {
    repair_box_compatible(e, &r.converse()).converse()
}

/// Reflexive graph with compatible box and diamond relations.
#[derive(Clone, Debug)]
pub struct GraphFrame {
    uni: Arc<Universe>,
    e: Rel,
    rbox: Rel,
    rdia: Rel,
}

impl GraphFrame {
    /// Validates reflexivity of `e` and full compatibility of both modal
    /// relations.
    pub fn new(e: Rel, rbox: Rel, rdia: Rel) -> Result<GraphFrame, FrameError> {
        let frame = GraphFrame::new_unchecked(e, rbox, rdia)?;
        let report = check_e_compat(&frame.e, &frame.rbox, &frame.rdia);
        if !report.is_ok() {
            return Err(FrameError::Incompatible(report));
        }
        Ok(frame)
    }

    /// Validates reflexivity and dimensions only. Escape hatch for
    /// deliberately incompatible frames; operator outputs are then checked
    /// per call.
    pub fn new_unchecked(e: Rel, rbox: Rel, rdia: Rel) -> Result<GraphFrame, FrameError> {
        let uni = e.source().clone();
        if e.target() != &uni
            || rbox.source() != &uni
            || rbox.target() != &uni
            || rdia.source() != &uni
            || rdia.target() != &uni
        {
            return Err(FrameError::BadDimensions);
        }
        if let Some(z) = e.missing_loop() {
            return Err(FrameError::NotReflexive(uni.label(z).to_string()));
        }
        Ok(GraphFrame { uni, e, rbox, rdia })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.uni
    }

    pub fn e(&self) -> &Rel {
        &self.e
    }

    pub fn rbox(&self) -> &Rel {
        &self.rbox
    }

    pub fn rdia(&self) -> &Rel {
        &self.rdia
    }

    /// Converse of the box relation; interprets the left adjoint diamond.
    pub fn black_dia_rel(&self) -> Rel {
        self.rbox.converse()
    }

    /// Converse of the diamond relation; interprets the right adjoint box.
    pub fn black_box_rel(&self) -> Rel {
        self.rdia.converse()
    }

    pub fn polarity(&self) -> FormalContext {
        polarity_of(&self.e)
    }

    pub fn compat_report(&self) -> CompatReport {
        check_e_compat(&self.e, &self.rbox, &self.rdia)
    }

    pub fn extent_closure(&self, b: &StateSet) -> StateSet {
        extent_closure(&self.e, b)
    }

    pub fn intent_closure(&self, y: &StateSet) -> StateSet {
        intent_closure(&self.e, y)
    }

    /// Concept generated by an extent candidate.
    pub fn concept_from_extent(&self, b: &StateSet) -> Concept {
        let intent = self.e.square1(b);
        Concept { extent: self.e.square0(&intent), intent }
    }

    /// Concept generated by an intent candidate.
    pub fn concept_from_intent(&self, y: &StateSet) -> Concept {
        let extent = self.e.square0(y);
        Concept { extent: extent.clone(), intent: self.e.square1(&extent) }
    }

    pub fn top_concept(&self) -> Concept {
        self.concept_from_extent(&StateSet::full(&self.uni))
    }

    pub fn bottom_concept(&self) -> Concept {
        self.concept_from_extent(&StateSet::empty(&self.uni))
    }

    fn checked(&self, extent: StateSet, intent: StateSet, op: &'static str) -> Result<Concept, FrameError> {
        let c = Concept { extent, intent };
        if self.e.square1(&c.extent) != c.intent || self.e.square0(&c.intent) != c.extent {
            return Err(FrameError::UnstableResult { op });
        }
        Ok(c)
    }

    /// Box: states that avoid the refuting states of `c` along `rbox`.
    pub fn op_box(&self, c: &Concept) -> Result<Concept, FrameError> {
        let extent = self.rbox.square0(&c.intent);
        let intent = self.e.square1(&extent);
        self.checked(extent, intent, "box")
    }

    /// Diamond: refuted where every `rdia`-successor misses `c`.
    pub fn op_dia(&self, c: &Concept) -> Result<Concept, FrameError> {
        let intent = self.rdia.square0(&c.extent);
        let extent = self.e.square0(&intent);
        self.checked(extent, intent, "dia")
    }

    /// Right adjoint box, along the converse of `rdia`.
    pub fn op_black_box(&self, c: &Concept) -> Result<Concept, FrameError> {
        // converse(rdia).square0 coincides with rdia.square1
        let extent = self.rdia.square1(&c.intent);
        let intent = self.e.square1(&extent);
        self.checked(extent, intent, "black box")
    }

    /// Left adjoint diamond, along the converse of `rbox`.
    pub fn op_black_dia(&self, c: &Concept) -> Result<Concept, FrameError> {
        let intent = self.rbox.square1(&c.extent);
        let extent = self.e.square0(&intent);
        self.checked(extent, intent, "black dia")
    }
}

/// A frame together with its enumerated concept lattice and modal operator
/// tables.
pub struct ComplexAlgebra {
    frame: Arc<GraphFrame>,
    lattice: ConceptLattice,
    box_table: Vec<usize>,
    dia_table: Vec<usize>,
    black_box_table: Vec<usize>,
    black_dia_table: Vec<usize>,
}

impl ComplexAlgebra {
    pub fn new(frame: Arc<GraphFrame>, cap: usize) -> Result<ComplexAlgebra, FrameError> {
        let lattice = frame.polarity().enumerate_concepts(cap)?;
        let k = lattice.len();
        let mut tables = [Vec::with_capacity(k), Vec::with_capacity(k), Vec::with_capacity(k), Vec::with_capacity(k)];
        for i in 0..k {
            let c = lattice.concept(i);
            let ops = [
                frame.op_box(c)?,
                frame.op_dia(c)?,
                frame.op_black_box(c)?,
                frame.op_black_dia(c)?,
            ];
            for (t, v) in tables.iter_mut().zip(ops) {
                let ix = lattice
                    .index_of_extent(&v.extent)
                    .expect("operator output is a concept, so its extent is enumerated");
                t.push(ix);
            }
        }
        let [box_table, dia_table, black_box_table, black_dia_table] = tables;
        Ok(ComplexAlgebra { frame, lattice, box_table, dia_table, black_box_table, black_dia_table })
    }

    pub fn frame(&self) -> &Arc<GraphFrame> {
        &self.frame
    }

    pub fn lattice(&self) -> &ConceptLattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.len() == 0
    }

    pub fn box_index(&self, i: usize) -> usize {
        self.box_table[i]
    }

    pub fn dia_index(&self, i: usize) -> usize {
        self.dia_table[i]
    }

    pub fn black_box_index(&self, i: usize) -> usize {
        self.black_box_table[i]
    }

    pub fn black_dia_index(&self, i: usize) -> usize {
        self.black_dia_table[i]
    }

    /// Both residuation laws, checked over every pair of concepts.
    pub fn check_adjunction(&self) -> bool {
        let k = self.lattice.len();
        for c in 0..k {
            for d in 0..k {
                let left = self.lattice.leq(self.black_dia_table[c], d);
                let right = self.lattice.leq(c, self.box_table[d]);
                if left != right {
                    return false;
                }
                let left = self.lattice.leq(self.dia_table[c], d);
                let right = self.lattice.leq(c, self.black_box_table[d]);
                if left != right {
                    return false;
                }
            }
        }
        true
    }

    /// Box against arbitrary meets and diamond against arbitrary joins,
    /// via full subset enumeration of the lattice.
    pub fn check_complete_laws(&self) -> bool {
        let k = self.lattice.len();
        assert!(k <= 20, "complete-law sweep is exponential; lattice of {k} concepts is too large");
        let uni = self.frame.universe();
        for mask in 0u64..(1u64 << k) {
            let members = (0..k).filter(|i| mask >> i & 1 == 1);
            let mut meet_ext = StateSet::full(uni);
            let mut box_meet_ext = self.lattice.concept(self.lattice.top()).extent.clone();
            let mut join_int = StateSet::full(uni);
            let mut dia_join_int = self.lattice.concept(self.lattice.bottom()).intent.clone();
            for i in members {
                meet_ext = meet_ext.intersect(&self.lattice.concept(i).extent);
                box_meet_ext =
                    box_meet_ext.intersect(&self.lattice.concept(self.box_table[i]).extent);
                join_int = join_int.intersect(&self.lattice.concept(i).intent);
                dia_join_int =
                    dia_join_int.intersect(&self.lattice.concept(self.dia_table[i]).intent);
            }
            // Meets of extents are extents; close the top-start for empty sets.
            let meet_ix = self
                .lattice
                .index_of_extent(&self.frame.concept_from_extent(&meet_ext).extent)
                .expect("meet of extents is an extent");
            if self.lattice.concept(self.box_table[meet_ix]).extent != box_meet_ext {
                return false;
            }
            let join_c = self.frame.concept_from_intent(&join_int);
            let join_ix = self
                .lattice
                .index_of_extent(&join_c.extent)
                .expect("meet of intents is an intent");
            if self.lattice.concept(self.dia_table[join_ix]).intent != dia_join_int {
                return false;
            }
        }
        true
    }
}
