//! Workbench for finite graph-based models of lattice-valued modal logic.
//!
//! A model lives on a reflexive graph `(Z, E)`: the complement of `E` forms a
//! polarity whose stable sets give a (generally non-distributive) complete
//! lattice of concepts, and suitably compatible relations on `Z` interpret
//! box and diamond operators on that lattice. The crate provides the
//! relation kernel, concept-lattice enumeration, frame validation, a formula
//! language with a two-sided satisfaction relation, frame-correspondence
//! checks for the standard reflexivity/transitivity axioms, and a
//! lattice-to-frame construction with its canonical-extension check, plus a
//! small CLI for driving all of it from text files.

mod bits;

pub mod algebra;
pub mod cli;
pub mod correspondence;
pub mod fca;
pub mod frames;
pub mod logic;
pub mod relcore;
pub mod semantics;

#[cfg(test)]
pub(crate) mod testgen {
    //! Shared proptest strategies for relations over small universes.

    use std::sync::Arc;

    use proptest::prelude::*;

    use crate::frames::{repair_box_compatible, repair_dia_compatible};
    use crate::relcore::{Rel, StateSet, Universe};

    pub fn sized_universe(max: usize) -> impl Strategy<Value = Arc<Universe>> {
        (1..=max).prop_map(|n| Universe::new((0..n).map(|i| format!("s{i}"))).unwrap())
    }

    pub fn set_from_bools(u: &Arc<Universe>, bs: &[bool]) -> StateSet {
        StateSet::from_indices(u, bs.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    pub fn rel_from_bools(u: &Arc<Universe>, bs: &[bool]) -> Rel {
        let n = u.size();
        Rel::from_pairs(
            u,
            u,
            bs.iter().enumerate().filter(|(_, b)| **b).map(|(k, _)| (k / n, k % n)),
        )
    }

    pub fn rel_and_two_sets() -> impl Strategy<Value = (Rel, StateSet, StateSet)> {
        sized_universe(6)
            .prop_flat_map(|u| {
                let n = u.size();
                (
                    Just(u),
                    proptest::collection::vec(any::<bool>(), n * n),
                    proptest::collection::vec(any::<bool>(), n),
                    proptest::collection::vec(any::<bool>(), n),
                )
            })
            .prop_map(|(u, rb, ab, bb)| {
                (rel_from_bools(&u, &rb), set_from_bools(&u, &ab), set_from_bools(&u, &bb))
            })
    }

    /// Reflexive `e` plus two unconstrained relations on the same universe.
    pub fn reflexive_e_and_two_rels() -> impl Strategy<Value = (Rel, Rel, Rel)> {
        sized_universe(5)
            .prop_flat_map(|u| {
                let n = u.size();
                (
                    Just(u),
                    proptest::collection::vec(any::<bool>(), n * n),
                    proptest::collection::vec(any::<bool>(), n * n),
                    proptest::collection::vec(any::<bool>(), n * n),
                )
            })
            .prop_map(|(u, eb, rb, sb)| {
                let e = rel_from_bools(&u, &eb).reflexive_closure();
                (e, rel_from_bools(&u, &rb), rel_from_bools(&u, &sb))
            })
    }

    /// Reflexive `e` plus three relations repaired to box-slot
    /// compatibility, for the composition lemmas.
    pub fn e_and_box_compatible_triple() -> impl Strategy<Value = (Rel, Rel, Rel, Rel)> {
        reflexive_e_and_two_rels()
            .prop_flat_map(|(e, r, s)| {
                let n = e.source().size();
                (Just((e, r, s)), proptest::collection::vec(any::<bool>(), n * n))
            })
            .prop_map(|((e, r, s), tb)| {
                let t = rel_from_bools(e.source(), &tb);
                let rc = repair_box_compatible(&e, &r);
                let sc = repair_box_compatible(&e, &s);
                let tc = repair_box_compatible(&e, &t);
                (e, rc, sc, tc)
            })
    }

    /// Reflexive `e` plus a box-compatible and a dia-compatible relation:
    /// raw material for a valid frame.
    pub fn e_and_frame_rels() -> impl Strategy<Value = (Rel, Rel, Rel)> {
        reflexive_e_and_two_rels().prop_map(|(e, r, s)| {
            let rbox = repair_box_compatible(&e, &r);
            let rdia = repair_dia_compatible(&e, &s);
            (e, rbox, rdia)
        })
    }

    /// Random formula over letters `p`, `q`, `r`, `s`, at most `depth` deep.
    pub fn formula(depth: u32) -> impl Strategy<Value = crate::logic::Formula> {
        use crate::logic::Formula;
        let leaf = prop_oneof![
            Just(Formula::Bot),
            Just(Formula::Top),
            "[pqrs]".prop_map(Formula::prop),
        ];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
                inner.clone().prop_map(Formula::box_of),
                inner.clone().prop_map(Formula::dia_of),
                inner.clone().prop_map(Formula::black_box_of),
                inner.prop_map(Formula::black_dia_of),
            ]
        })
    }
}
