//! Models over graph frames: two-sided satisfaction and refutation,
//! sequent truth, and frame validity.
//!
//! A model pairs a frame with a valuation sending each proposition letter to
//! a concept `(⟦p⟧, (p))`.  Evaluation extends the valuation compositionally:
//! meet intersects extents, join intersects intents, and the modal cases are
//! the frame's concept operators.  A state `z` *forces* a formula when it
//! lies in the extent and *refutes* it when it lies in the intent; the
//! equivalent pointwise recursion (kept here as [`Model::naive_forces`] /
//! [`Model::naive_refutes`]) is a deliberately literal, slow reference used
//! to cross-check the algebraic evaluator.
//!
//! A sequent `φ |- ψ` is true in a model when no forcing state of `φ` is
//! `E`-related to a refuting state of `ψ`, and valid in a frame when it is
//! true under every valuation of its letters by concepts.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::fca::{Concept, FcaError, DEFAULT_CONCEPT_CAP};
use crate::frames::{FrameError, GraphFrame};
use crate::logic::{Formula, Sequent};
use crate::relcore::StateSet;

/// Default bound on the number of valuations a validity sweep may visit.
pub const DEFAULT_VALUATION_CAP: u128 = 1_000_000;

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("proposition {0:?} has no valuation")]
    UnboundProp(String),
    #[error("valuation for {0:?} is not a concept of this frame")]
    NotAConcept(String),
    #[error("validity sweep needs {needed} valuations, above the cap of {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Fca(#[from] FcaError),
}

/// A graph frame together with a valuation of proposition letters by
/// concepts.
#[derive(Debug, Clone)]
pub struct Model {
    frame: Arc<GraphFrame>,
    valuation: BTreeMap<String, Concept>,
}

impl Model {
    /// Build a model, checking that every value is a concept of `frame`.
    pub fn new(
        frame: Arc<GraphFrame>,
        valuation: BTreeMap<String, Concept>,
    ) -> Result<Model, SemanticsError> {
        let polarity = frame.polarity();
        for (name, c) in &valuation {
            if c.extent.universe() != frame.universe() || !polarity.is_concept(c) {
                return Err(SemanticsError::NotAConcept(name.clone()));
            }
        }
        Ok(Model { frame, valuation })
    }

    /// Build a model from raw extent candidates, closing each one to the
    /// concept it generates.  Returns the model together with the names
    /// whose sets were not already stable and therefore got widened.
    pub fn from_extents(
        frame: Arc<GraphFrame>,
        sets: impl IntoIterator<Item = (String, StateSet)>,
    ) -> (Model, Vec<String>) {
        let mut valuation = BTreeMap::new();
        let mut adjusted = Vec::new();
        for (name, b) in sets {
            let c = frame.concept_from_extent(&b);
            if c.extent != b {
                adjusted.push(name.clone());
            }
            valuation.insert(name, c);
        }
        (Model { frame, valuation }, adjusted)
    }

    pub fn frame(&self) -> &Arc<GraphFrame> {
        &self.frame
    }

    pub fn valuation(&self) -> &BTreeMap<String, Concept> {
        &self.valuation
    }

    fn prop_concept(&self, name: &str) -> Result<&Concept, SemanticsError> {
        self.valuation
            .get(name)
            .ok_or_else(|| SemanticsError::UnboundProp(name.to_string()))
    }

    /// The concept `(⟦φ⟧, (φ))` denoted by `f` in this model.
    pub fn eval(&self, f: &Formula) -> Result<Concept, SemanticsError> {
        self.eval_memo(f, &mut HashMap::new())
    }

    fn eval_memo(
        &self,
        f: &Formula,
        memo: &mut HashMap<Formula, Concept>,
    ) -> Result<Concept, SemanticsError> {
        if let Some(c) = memo.get(f) {
            return Ok(c.clone());
        }
        let c = match f {
            Formula::Bot => self.frame.bottom_concept(),
            Formula::Top => self.frame.top_concept(),
            Formula::Prop(name) => self.prop_concept(name)?.clone(),
            Formula::And(l, r) => {
                let cl = self.eval_memo(l, memo)?;
                let cr = self.eval_memo(r, memo)?;
                self.frame.concept_from_extent(&cl.extent.intersect(&cr.extent))
            }
            Formula::Or(l, r) => {
                let cl = self.eval_memo(l, memo)?;
                let cr = self.eval_memo(r, memo)?;
                self.frame.concept_from_intent(&cl.intent.intersect(&cr.intent))
            }
            Formula::Box(g) => self.frame.op_box(&self.eval_memo(g, memo)?)?,
            Formula::Dia(g) => self.frame.op_dia(&self.eval_memo(g, memo)?)?,
            Formula::BlackBox(g) => self.frame.op_black_box(&self.eval_memo(g, memo)?)?,
            Formula::BlackDia(g) => self.frame.op_black_dia(&self.eval_memo(g, memo)?)?,
        };
        memo.insert(f.clone(), c.clone());
        Ok(c)
    }

    /// `z` lies in the extent of `f`.
    pub fn forces(&self, z: usize, f: &Formula) -> Result<bool, SemanticsError> {
        Ok(self.eval(f)?.extent.contains(z))
    }

    /// `z` lies in the intent of `f`.
    pub fn refutes(&self, z: usize, f: &Formula) -> Result<bool, SemanticsError> {
        Ok(self.eval(f)?.intent.contains(z))
    }

    /// Literal transcription of the satisfaction half of the simultaneous
    /// recursion; exponential-time reference oracle for small models.
    pub fn naive_forces(&self, z: usize, f: &Formula) -> Result<bool, SemanticsError> {
        let n = self.frame.universe().size();
        let e = self.frame.e();
        Ok(match f {
            Formula::Bot => false,
            Formula::Top => true,
            Formula::Prop(name) => self.prop_concept(name)?.extent.contains(z),
            Formula::And(l, r) => self.naive_forces(z, l)? && self.naive_forces(z, r)?,
            // Forcing of a join, a diamond, or a black diamond is the
            // co-clause: no E-successor refutes the formula itself.
            Formula::Or(..) | Formula::Dia(..) | Formula::BlackDia(..) => {
                let mut ok = true;
                for z2 in 0..n {
                    if e.contains(z, z2) && self.naive_refutes(z2, f)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Formula::Box(g) => {
                let rbox = self.frame.rbox();
                let mut ok = true;
                for z2 in 0..n {
                    if rbox.contains(z, z2) && self.naive_refutes(z2, g)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Formula::BlackBox(g) => {
                let rbb = self.frame.black_box_rel();
                let mut ok = true;
                for z2 in 0..n {
                    if rbb.contains(z, z2) && self.naive_refutes(z2, g)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
        })
    }

    /// Refutation half of the simultaneous recursion; see
    /// [`Model::naive_forces`].
    pub fn naive_refutes(&self, z: usize, f: &Formula) -> Result<bool, SemanticsError> {
        let n = self.frame.universe().size();
        let e = self.frame.e();
        Ok(match f {
            Formula::Bot => true,
            Formula::Top => false,
            Formula::Prop(name) => {
                let extent = &self.prop_concept(name)?.extent;
                (0..n).all(|z2| !e.contains(z2, z) || !extent.contains(z2))
            }
            Formula::Or(l, r) => self.naive_refutes(z, l)? && self.naive_refutes(z, r)?,
            // Refutation of a meet, a box, or a black box is the co-clause:
            // no E-predecessor forces the formula itself.
            Formula::And(..) | Formula::Box(..) | Formula::BlackBox(..) => {
                let mut ok = true;
                for z2 in 0..n {
                    if e.contains(z2, z) && self.naive_forces(z2, f)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Formula::Dia(g) => {
                let rdia = self.frame.rdia();
                let mut ok = true;
                for z2 in 0..n {
                    if rdia.contains(z, z2) && self.naive_forces(z2, g)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Formula::BlackDia(g) => {
                let rbd = self.frame.black_dia_rel();
                let mut ok = true;
                for z2 in 0..n {
                    if rbd.contains(z, z2) && self.naive_forces(z2, g)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
        })
    }

    /// The evaluator and the literal recursion agree on `f` at every state.
    pub fn check_pointwise_vs_algebraic(&self, f: &Formula) -> Result<bool, SemanticsError> {
        let c = self.eval(f)?;
        for z in 0..self.frame.universe().size() {
            if self.naive_forces(z, f)? != c.extent.contains(z) {
                return Ok(false);
            }
            if self.naive_refutes(z, f)? != c.intent.contains(z) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// No state forcing the left side is `E`-related to a state refuting
    /// the right side.
    pub fn sequent_true(&self, s: &Sequent) -> Result<bool, SemanticsError> {
        let l = self.eval(&s.lhs)?;
        let r = self.eval(&s.rhs)?;
        let e = self.frame.e();
        for z in l.extent.iter() {
            if e.row(z).intersects(&r.intent) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Textbook Kripke satisfaction — classical two-valued clauses with `∀` for
/// the boxes and `∃` for the diamonds, the black modalities travelling along
/// the converse relations.  Independent reference for frames whose `E` is
/// the identity, where the graph semantics degenerates to the classical one.
pub fn kripke_forces(model: &Model, z: usize, f: &Formula) -> Result<bool, SemanticsError> {
    let frame = model.frame();
    let n = frame.universe().size();
    Ok(match f {
        Formula::Bot => false,
        Formula::Top => true,
        Formula::Prop(name) => {
            model
                .valuation()
                .get(name)
                .ok_or_else(|| SemanticsError::UnboundProp(name.clone()))?
                .extent
                .contains(z)
        }
        Formula::And(l, r) => kripke_forces(model, z, l)? && kripke_forces(model, z, r)?,
        Formula::Or(l, r) => kripke_forces(model, z, l)? || kripke_forces(model, z, r)?,
        Formula::Box(g) => {
            let rel = frame.rbox();
            let mut ok = true;
            for z2 in 0..n {
                if rel.contains(z, z2) && !kripke_forces(model, z2, g)? {
                    ok = false;
                    break;
                }
            }
            ok
        }
        Formula::BlackBox(g) => {
            let rel = frame.black_box_rel();
            let mut ok = true;
            for z2 in 0..n {
                if rel.contains(z, z2) && !kripke_forces(model, z2, g)? {
                    ok = false;
                    break;
                }
            }
            ok
        }
        Formula::Dia(g) => {
            let rel = frame.rdia();
            let mut found = false;
            for z2 in 0..n {
                if rel.contains(z, z2) && kripke_forces(model, z2, g)? {
                    found = true;
                    break;
                }
            }
            found
        }
        Formula::BlackDia(g) => {
            let rel = frame.black_dia_rel();
            let mut found = false;
            for z2 in 0..n {
                if rel.contains(z, z2) && kripke_forces(model, z2, g)? {
                    found = true;
                    break;
                }
            }
            found
        }
    })
}

/// Outcome of a validity sweep.
#[derive(Debug, Clone)]
pub enum Validity {
    Valid,
    /// A model based on the frame in which the sequent fails.
    Counterexample(Model),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Run `pred` over every valuation of `props` by concepts of `frame`;
/// return the first model where it comes out false.
fn sweep(
    frame: &Arc<GraphFrame>,
    props: &[String],
    cap: u128,
    mut pred: impl FnMut(&Model) -> Result<bool, SemanticsError>,
) -> Result<Option<Model>, SemanticsError> {
    let lattice = frame.polarity().enumerate_concepts(DEFAULT_CONCEPT_CAP)?;
    let m = lattice.len() as u128;
    let needed = m.saturating_pow(props.len() as u32);
    if needed > cap {
        return Err(SemanticsError::CapExceeded { needed, cap });
    }
    let k = props.len();
    let mut idx = vec![0usize; k];
    loop {
        let valuation: BTreeMap<String, Concept> = props
            .iter()
            .zip(&idx)
            .map(|(p, &i)| (p.clone(), lattice.concept(i).clone()))
            .collect();
        let model = Model { frame: frame.clone(), valuation };
        if !pred(&model)? {
            return Ok(Some(model));
        }
        let mut j = 0;
        while j < k {
            idx[j] += 1;
            if idx[j] < lattice.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == k {
            return Ok(None);
        }
    }
}

/// Is `s` true in every model based on `frame`?  `cap` bounds the number of
/// valuations visited.
pub fn frame_valid(
    frame: &Arc<GraphFrame>,
    s: &Sequent,
    cap: u128,
) -> Result<Validity, SemanticsError> {
    let props: Vec<String> = s.props_of().into_iter().collect();
    Ok(match sweep(frame, &props, cap, |m| m.sequent_true(s))? {
        None => Validity::Valid,
        Some(model) => Validity::Counterexample(model),
    })
}

/// Frame validity agrees with validity in the complex algebra, where the
/// algebra side evaluates both formulas under every valuation and compares
/// the resulting concepts by extent inclusion.
pub fn check_duality(
    frame: &Arc<GraphFrame>,
    s: &Sequent,
    cap: u128,
) -> Result<bool, SemanticsError> {
    let props: Vec<String> = s.props_of().into_iter().collect();
    let frame_side = frame_valid(frame, s, cap)?.is_valid();
    let algebra_side = sweep(frame, &props, cap, |m| {
        Ok(m.eval(&s.lhs)?.extent.is_subset(&m.eval(&s.rhs)?.extent))
    })?
    .is_none();
    Ok(frame_side == algebra_side)
}
