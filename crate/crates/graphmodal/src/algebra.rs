//! Finite modal lattices and their associated graphs and frames.
//!
//! A [`FiniteLattice`] is a bounded lattice presented by its order matrix;
//! a [`ModalAlgebra`] adds unary `box` and `dia` tables which must be
//! *normal*: `□⊤ = ⊤`, `□(a∧b) = □a ∧ □b`, `◇⊥ = ⊥`, `◇(a∨b) = ◇a ∨ ◇b`.
//! On a finite lattice normality forces both adjoints to exist, and the
//! black operators are computed from them: `◆a = ⋀{b | a ≤ □b}` and
//! `■a = ⋁{b | ◇b ≤ a}`.
//!
//! From a lattice one builds the graph `X_L` whose states are disjoint
//! filter/ideal pairs `(F, J)` with `zEz'` iff `F_z ∩ J_{z'} = ∅`; from a
//! modal algebra, the frame `F_A` on that graph with `xR_□y` iff
//! `F_x ∩ □J_y = ∅` and `xR_◇y` iff `J_x ∩ ◇F_y = ∅`.  The concept lattice
//! of `X_L` is isomorphic to `L` itself — the finite case of the canonical
//! extension — which [`check_canonical_extension`] verifies by explicit
//! isomorphism search.
//!
//! Whether a state may have an empty filter or ideal component is a real
//! design choice: [`StateMode::Strict`] (both components nonempty, hence
//! automatically proper) is the default because it is the mode under which
//! the isomorphism holds — allowing empty components turns the two-element
//! chain into a four-chain, see the unit tests.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::fca::{FcaError, DEFAULT_CONCEPT_CAP};
use crate::frames::{ComplexAlgebra, FrameError, GraphFrame};
use crate::logic::{Formula, Sequent};
use crate::relcore::{Rel, StateSet, Universe};

/// Largest carrier for which the brute-force subset scans are allowed.
pub const MAX_BRUTE_CARRIER: usize = 16;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("operator table has wrong size or out-of-range entries")]
    BadTable,
    #[error("operator is not normal: {0}")]
    NotNormal(String),
    #[error("proposition {0:?} has no assignment")]
    UnboundProp(String),
    #[error("assignment sweep needs {needed} cases, above the cap of {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("carrier of size {0} is too large for exhaustive scans")]
    TooLarge(usize),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Fca(#[from] FcaError),
}

/// A bounded lattice on a finite labelled carrier.
#[derive(Debug, Clone)]
pub struct FiniteLattice {
    uni: Arc<Universe>,
    leq: Rel,
    meet: Vec<usize>,
    join: Vec<usize>,
    top: usize,
    bottom: usize,
}

impl FiniteLattice {
    /// Validate `leq` as a bounded lattice order and tabulate meets and
    /// joins.
    pub fn from_leq(leq: Rel) -> Result<FiniteLattice, AlgebraError> {
        let uni = leq.source().clone();
        if leq.target() != &uni {
            return Err(AlgebraError::NotAPartialOrder(
                "order must relate a carrier to itself".to_string(),
            ));
        }
        let n = uni.size();
        for a in 0..n {
            if !leq.contains(a, a) {
                return Err(AlgebraError::NotAPartialOrder(format!(
                    "missing {} <= {}",
                    uni.label(a),
                    uni.label(a)
                )));
            }
            for b in 0..n {
                if a != b && leq.contains(a, b) && leq.contains(b, a) {
                    return Err(AlgebraError::NotAPartialOrder(format!(
                        "{} and {} are mutually below each other",
                        uni.label(a),
                        uni.label(b)
                    )));
                }
                for c in 0..n {
                    if leq.contains(a, b) && leq.contains(b, c) && !leq.contains(a, c) {
                        return Err(AlgebraError::NotAPartialOrder(format!(
                            "transitivity fails through {}",
                            uni.label(b)
                        )));
                    }
                }
            }
        }
        let mut meet = vec![0usize; n * n];
        let mut join = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = Self::bound(&leq, a, b, true).ok_or_else(|| {
                    AlgebraError::NotALattice(format!(
                        "{} and {} have no greatest lower bound",
                        uni.label(a),
                        uni.label(b)
                    ))
                })?;
                join[a * n + b] = Self::bound(&leq, a, b, false).ok_or_else(|| {
                    AlgebraError::NotALattice(format!(
                        "{} and {} have no least upper bound",
                        uni.label(a),
                        uni.label(b)
                    ))
                })?;
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|a| leq.contains(b, a)))
            .ok_or_else(|| AlgebraError::NotALattice("no bottom element".to_string()))?;
        let top = (0..n)
            .find(|&t| (0..n).all(|a| leq.contains(a, t)))
            .ok_or_else(|| AlgebraError::NotALattice("no top element".to_string()))?;
        Ok(FiniteLattice { uni, leq, meet, join, top, bottom })
    }

    /// Greatest lower bound (`lower = true`) or least upper bound of `a`
    /// and `b`, if it exists.
    fn bound(leq: &Rel, a: usize, b: usize, lower: bool) -> Option<usize> {
        let n = leq.source().size();
        let below = |x: usize, y: usize| if lower { leq.contains(x, y) } else { leq.contains(y, x) };
        let bounds: Vec<usize> = (0..n).filter(|&c| below(c, a) && below(c, b)).collect();
        let mut best = None;
        for &c in &bounds {
            if bounds.iter().all(|&d| below(d, c)) {
                best = Some(c);
                break;
            }
        }
        best
    }

    pub fn size(&self) -> usize {
        self.uni.size()
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.uni
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq.contains(a, b)
    }

    pub fn leq_rel(&self) -> &Rel {
        &self.leq
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size() + b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size() + b]
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// Meet of a subset, `⊤` for the empty one.
    pub fn meet_of(&self, xs: &StateSet) -> usize {
        xs.iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Join of a subset, `⊥` for the empty one.
    pub fn join_of(&self, xs: &StateSet) -> usize {
        xs.iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    fn guard_brute(&self) -> Result<(), AlgebraError> {
        if self.size() > MAX_BRUTE_CARRIER {
            return Err(AlgebraError::TooLarge(self.size()));
        }
        Ok(())
    }

    /// All (nonempty) filters: up-sets closed under meet.  The empty set is
    /// excluded — a filter always contains `⊤`.
    pub fn filters(&self) -> Result<Vec<StateSet>, AlgebraError> {
        self.guard_brute()?;
        let n = self.size();
        let mut out = Vec::new();
        'subsets: for mask in 1u32..(1u32 << n) {
            let set = StateSet::from_indices(&self.uni, (0..n).filter(|i| mask >> i & 1 == 1));
            for a in set.iter() {
                for b in 0..n {
                    if self.leq(a, b) && !set.contains(b) {
                        continue 'subsets;
                    }
                }
                for b in set.iter() {
                    if !set.contains(self.meet(a, b)) {
                        continue 'subsets;
                    }
                }
            }
            out.push(set);
        }
        Ok(out)
    }

    /// All (nonempty) ideals: down-sets closed under join.
    pub fn ideals(&self) -> Result<Vec<StateSet>, AlgebraError> {
        self.guard_brute()?;
        let n = self.size();
        let mut out = Vec::new();
        'subsets: for mask in 1u32..(1u32 << n) {
            let set = StateSet::from_indices(&self.uni, (0..n).filter(|i| mask >> i & 1 == 1));
            for a in set.iter() {
                for b in 0..n {
                    if self.leq(b, a) && !set.contains(b) {
                        continue 'subsets;
                    }
                }
                for b in set.iter() {
                    if !set.contains(self.join(a, b)) {
                        continue 'subsets;
                    }
                }
            }
            out.push(set);
        }
        Ok(out)
    }

    /// `⌊K⌋`: the filter generated by `K`, with `⌊∅⌋ = {⊤}`.
    pub fn filter_gen(&self, k: &StateSet) -> StateSet {
        let mut cur = k.clone();
        cur.insert(self.top);
        loop {
            let mut next = cur.clone();
            for a in cur.iter() {
                for b in cur.iter() {
                    next.insert(self.meet(a, b));
                }
                for b in 0..self.size() {
                    if self.leq(a, b) {
                        next.insert(b);
                    }
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// `⌈K⌉`: the ideal generated by `K`, with `⌈∅⌉ = {⊥}`.
    pub fn ideal_gen(&self, k: &StateSet) -> StateSet {
        let mut cur = k.clone();
        cur.insert(self.bottom);
        loop {
            let mut next = cur.clone();
            for a in cur.iter() {
                for b in cur.iter() {
                    next.insert(self.join(a, b));
                }
                for b in 0..self.size() {
                    if self.leq(b, a) {
                        next.insert(b);
                    }
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Join-irreducible elements: `j ≠ ⊥` with a unique way to reach it
    /// from below, i.e. `j` is strictly above the join of everything
    /// strictly below it.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&j| {
                let below = StateSet::from_indices(
                    &self.uni,
                    (0..self.size()).filter(|&x| x != j && self.leq(x, j)),
                );
                self.join_of(&below) != j
            })
            .collect()
    }

    /// Meet-irreducible elements, dually.
    pub fn meet_irreducibles(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&m| {
                let above = StateSet::from_indices(
                    &self.uni,
                    (0..self.size()).filter(|&x| x != m && self.leq(m, x)),
                );
                self.meet_of(&above) != m
            })
            .collect()
    }
}

/// Normality check for a box table.
fn box_is_normal(l: &FiniteLattice, table: &[usize]) -> Result<(), AlgebraError> {
    if table[l.top()] != l.top() {
        return Err(AlgebraError::NotNormal("box(top) != top".to_string()));
    }
    let n = l.size();
    for a in 0..n {
        for b in 0..n {
            if table[l.meet(a, b)] != l.meet(table[a], table[b]) {
                return Err(AlgebraError::NotNormal(format!(
                    "box({} meet {}) != box({}) meet box({})",
                    l.universe().label(a),
                    l.universe().label(b),
                    l.universe().label(a),
                    l.universe().label(b)
                )));
            }
        }
    }
    Ok(())
}

/// Normality check for a diamond table.
fn dia_is_normal(l: &FiniteLattice, table: &[usize]) -> Result<(), AlgebraError> {
    if table[l.bottom()] != l.bottom() {
        return Err(AlgebraError::NotNormal("dia(bot) != bot".to_string()));
    }
    let n = l.size();
    for a in 0..n {
        for b in 0..n {
            if table[l.join(a, b)] != l.join(table[a], table[b]) {
                return Err(AlgebraError::NotNormal(format!(
                    "dia({} join {}) != dia({}) join dia({})",
                    l.universe().label(a),
                    l.universe().label(b),
                    l.universe().label(a),
                    l.universe().label(b)
                )));
            }
        }
    }
    Ok(())
}

/// A finite lattice with normal box and diamond tables.
#[derive(Debug, Clone)]
pub struct ModalAlgebra {
    lattice: FiniteLattice,
    box_table: Vec<usize>,
    dia_table: Vec<usize>,
    black_box_table: Vec<usize>,
    black_dia_table: Vec<usize>,
}

impl ModalAlgebra {
    pub fn new(
        lattice: FiniteLattice,
        box_table: Vec<usize>,
        dia_table: Vec<usize>,
    ) -> Result<ModalAlgebra, AlgebraError> {
        let n = lattice.size();
        if box_table.len() != n
            || dia_table.len() != n
            || box_table.iter().chain(&dia_table).any(|&v| v >= n)
        {
            return Err(AlgebraError::BadTable);
        }
        box_is_normal(&lattice, &box_table)?;
        dia_is_normal(&lattice, &dia_table)?;
        // Finite normality gives both adjoints outright; the tables are
        // still verified below as a guard against construction bugs.
        let black_dia_table: Vec<usize> = (0..n)
            .map(|a| {
                let candidates = StateSet::from_indices(
                    lattice.universe(),
                    (0..n).filter(|&b| lattice.leq(a, box_table[b])),
                );
                lattice.meet_of(&candidates)
            })
            .collect();
        let black_box_table: Vec<usize> = (0..n)
            .map(|b| {
                let candidates = StateSet::from_indices(
                    lattice.universe(),
                    (0..n).filter(|&a| lattice.leq(dia_table[a], b)),
                );
                lattice.join_of(&candidates)
            })
            .collect();
        for a in 0..n {
            for b in 0..n {
                if lattice.leq(black_dia_table[a], b) != lattice.leq(a, box_table[b]) {
                    return Err(AlgebraError::NotNormal(
                        "black diamond fails to be left adjoint to box".to_string(),
                    ));
                }
                if lattice.leq(dia_table[a], b) != lattice.leq(a, black_box_table[b]) {
                    return Err(AlgebraError::NotNormal(
                        "diamond fails to be left adjoint to black box".to_string(),
                    ));
                }
            }
        }
        Ok(ModalAlgebra { lattice, box_table, dia_table, black_box_table, black_dia_table })
    }

    /// Both modalities interpreted as the identity map.
    pub fn with_identity_ops(lattice: FiniteLattice) -> Result<ModalAlgebra, AlgebraError> {
        let id: Vec<usize> = (0..lattice.size()).collect();
        ModalAlgebra::new(lattice, id.clone(), id)
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn box_op(&self, a: usize) -> usize {
        self.box_table[a]
    }

    pub fn dia_op(&self, a: usize) -> usize {
        self.dia_table[a]
    }

    pub fn black_box_op(&self, a: usize) -> usize {
        self.black_box_table[a]
    }

    pub fn black_dia_op(&self, a: usize) -> usize {
        self.black_dia_table[a]
    }

    /// `□K` as a set of elements.
    pub fn box_image(&self, k: &StateSet) -> StateSet {
        StateSet::from_indices(self.lattice.universe(), k.iter().map(|a| self.box_table[a]))
    }

    /// `◇K` as a set of elements.
    pub fn dia_image(&self, k: &StateSet) -> StateSet {
        StateSet::from_indices(self.lattice.universe(), k.iter().map(|a| self.dia_table[a]))
    }

    /// For every filter `F` and ideal `J`: `F ∩ □J ≠ ∅` iff
    /// `F ∩ ⌈□J⌉ ≠ ∅`, and dually `◇F ∩ J ≠ ∅` iff `⌊◇F⌋ ∩ J ≠ ∅`.
    pub fn check_filtidl_lemma(&self) -> Result<bool, AlgebraError> {
        let filters = self.lattice.filters()?;
        let ideals = self.lattice.ideals()?;
        for f in &filters {
            for j in &ideals {
                let bj = self.box_image(j);
                if f.intersects(&bj) != f.intersects(&self.lattice.ideal_gen(&bj)) {
                    return Ok(false);
                }
                let df = self.dia_image(f);
                if df.intersects(j) != self.lattice.filter_gen(&df).intersects(j) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn eval(
        &self,
        f: &Formula,
        env: &BTreeMap<String, usize>,
    ) -> Result<usize, AlgebraError> {
        Ok(match f {
            Formula::Bot => self.lattice.bottom(),
            Formula::Top => self.lattice.top(),
            Formula::Prop(name) => *env
                .get(name)
                .ok_or_else(|| AlgebraError::UnboundProp(name.clone()))?,
            Formula::And(l, r) => self.lattice.meet(self.eval(l, env)?, self.eval(r, env)?),
            Formula::Or(l, r) => self.lattice.join(self.eval(l, env)?, self.eval(r, env)?),
            Formula::Box(g) => self.box_table[self.eval(g, env)?],
            Formula::Dia(g) => self.dia_table[self.eval(g, env)?],
            Formula::BlackBox(g) => self.black_box_table[self.eval(g, env)?],
            Formula::BlackDia(g) => self.black_dia_table[self.eval(g, env)?],
        })
    }
}

/// Outcome of an exhaustive assignment sweep over an algebra.
#[derive(Debug, Clone)]
pub enum AlgebraValidity {
    Valid,
    /// An assignment of elements to letters under which the sequent fails.
    Counterexample(BTreeMap<String, usize>),
}

impl AlgebraValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, AlgebraValidity::Valid)
    }
}

/// Does `lhs ≤ rhs` hold under every assignment of lattice elements to the
/// sequent's letters?
pub fn algebra_validates(
    a: &ModalAlgebra,
    s: &Sequent,
    cap: u128,
) -> Result<AlgebraValidity, AlgebraError> {
    let props: Vec<String> = s.props_of().into_iter().collect();
    let n = a.lattice.size();
    let needed = (n as u128).saturating_pow(props.len() as u32);
    if needed > cap {
        return Err(AlgebraError::CapExceeded { needed, cap });
    }
    let k = props.len();
    let mut idx = vec![0usize; k];
    loop {
        let env: BTreeMap<String, usize> =
            props.iter().cloned().zip(idx.iter().copied()).collect();
        if !a.lattice.leq(a.eval(&s.lhs, &env)?, a.eval(&s.rhs, &env)?) {
            return Ok(AlgebraValidity::Counterexample(env));
        }
        let mut j = 0;
        while j < k {
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == k {
            return Ok(AlgebraValidity::Valid);
        }
    }
}

/// May a state's filter or ideal component be empty?
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StateMode {
    /// Both components nonempty (and hence proper).  The canonical-
    /// extension isomorphism holds in this mode.
    #[default]
    Strict,
    /// Components may be empty; nonempty ones must still be proper.
    AllowEmpty,
}

/// A state of the graph `X_L`: a filter and an ideal that do not meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FIPair {
    pub filter: StateSet,
    pub ideal: StateSet,
}

/// The graph `X_L`: disjoint filter/ideal pairs with `zEz'` iff
/// `F_z ∩ J_{z'} = ∅`.
pub fn build_graph_xl(
    l: &FiniteLattice,
    mode: StateMode,
) -> Result<(Rel, Vec<FIPair>), AlgebraError> {
    let full = StateSet::full(l.universe());
    let mut filters = l.filters()?;
    let mut ideals = l.ideals()?;
    if mode == StateMode::AllowEmpty {
        // Nonempty components must be proper; the empty component is
        // admitted as-is.
        filters.retain(|f| f != &full);
        ideals.retain(|j| j != &full);
        filters.insert(0, StateSet::empty(l.universe()));
        ideals.insert(0, StateSet::empty(l.universe()));
    }
    let mut pairs = Vec::new();
    for f in &filters {
        for j in &ideals {
            if !f.intersects(j) {
                pairs.push(FIPair { filter: f.clone(), ideal: j.clone() });
            }
        }
    }
    let zu = Universe::new((0..pairs.len()).map(|i| format!("z{i}")))
        .map_err(|_| AlgebraError::NotALattice("lattice with no disjoint pairs".to_string()))?;
    let mut e = Rel::empty(&zu, &zu);
    for (i, zi) in pairs.iter().enumerate() {
        for (k, zk) in pairs.iter().enumerate() {
            if !zi.filter.intersects(&zk.ideal) {
                e.set(i, k, true);
            }
        }
    }
    Ok((e, pairs))
}

/// The frame `F_A` on `X_L` with `xR_□y` iff `F_x ∩ □J_y = ∅` and `xR_◇y`
/// iff `J_x ∩ ◇F_y = ∅`.
pub fn build_frame_fa(
    a: &ModalAlgebra,
    mode: StateMode,
) -> Result<GraphFrame, AlgebraError> {
    let (e, pairs) = build_graph_xl(a.lattice(), mode)?;
    let zu = e.source().clone();
    let mut rbox = Rel::empty(&zu, &zu);
    let mut rdia = Rel::empty(&zu, &zu);
    for (x, zx) in pairs.iter().enumerate() {
        for (y, zy) in pairs.iter().enumerate() {
            if !zx.filter.intersects(&a.box_image(&zy.ideal)) {
                rbox.set(x, y, true);
            }
            if !zx.ideal.intersects(&a.dia_image(&zy.filter)) {
                rdia.set(x, y, true);
            }
        }
    }
    Ok(GraphFrame::new(e, rbox, rdia)?)
}

/// Order-isomorphism search between two finite lattices by backtracking.
pub fn lattice_iso(a: &FiniteLattice, b: &FiniteLattice) -> bool {
    if a.size() != b.size() {
        return false;
    }
    let n = a.size();
    // Coarse invariant: how many elements lie below / above each element.
    let sig = |l: &FiniteLattice, x: usize| {
        let down = (0..n).filter(|&y| l.leq(y, x)).count();
        let up = (0..n).filter(|&y| l.leq(x, y)).count();
        (down, up)
    };
    let sig_a: Vec<_> = (0..n).map(|x| sig(a, x)).collect();
    let sig_b: Vec<_> = (0..n).map(|x| sig(b, x)).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        n: usize,
        a: &FiniteLattice,
        b: &FiniteLattice,
        sig_a: &[(usize, usize)],
        sig_b: &[(usize, usize)],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || sig_a[i] != sig_b[j] {
                continue;
            }
            let consistent = (0..i).all(|k| {
                a.leq(i, k) == b.leq(j, map[k]) && a.leq(k, i) == b.leq(map[k], j)
            });
            if consistent {
                map[i] = j;
                used[j] = true;
                if go(i + 1, n, a, b, sig_a, sig_b, map, used) {
                    return true;
                }
                used[j] = false;
                map[i] = usize::MAX;
            }
        }
        false
    }
    go(0, n, a, b, &sig_a, &sig_b, &mut map, &mut used)
}

/// Isomorphism search preserving order and both modal tables.
pub fn modal_algebra_iso(a: &ModalAlgebra, b: &ModalAlgebra) -> bool {
    if a.lattice.size() != b.lattice.size() {
        return false;
    }
    let n = a.lattice.size();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        n: usize,
        a: &ModalAlgebra,
        b: &ModalAlgebra,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == n {
            // Orders matched along the way; check the tables commute.
            return (0..n).all(|x| {
                map[a.box_op(x)] == b.box_op(map[x]) && map[a.dia_op(x)] == b.dia_op(map[x])
            });
        }
        for j in 0..n {
            if used[j] {
                continue;
            }
            let consistent = (0..i).all(|k| {
                a.lattice.leq(i, k) == b.lattice.leq(j, map[k])
                    && a.lattice.leq(k, i) == b.lattice.leq(map[k], j)
            });
            if consistent {
                map[i] = j;
                used[j] = true;
                if go(i + 1, n, a, b, map, used) {
                    return true;
                }
                used[j] = false;
                map[i] = usize::MAX;
            }
        }
        false
    }
    go(0, n, a, b, &mut map, &mut used)
}

/// Concept lattice of the graph `X_L`, as a [`FiniteLattice`] ordered by
/// extent inclusion.
pub fn xl_concept_lattice(
    l: &FiniteLattice,
    mode: StateMode,
) -> Result<FiniteLattice, AlgebraError> {
    let (e, _) = build_graph_xl(l, mode)?;
    let polarity = crate::frames::polarity_of(&e);
    let concepts = polarity.enumerate_concepts(DEFAULT_CONCEPT_CAP)?;
    let cu = Universe::new((0..concepts.len()).map(|i| format!("c{i}")))
        .map_err(|_| AlgebraError::NotALattice("empty concept lattice".to_string()))?;
    let mut leq = Rel::empty(&cu, &cu);
    for i in 0..concepts.len() {
        for j in 0..concepts.len() {
            if concepts.leq(i, j) {
                leq.set(i, j, true);
            }
        }
    }
    FiniteLattice::from_leq(leq)
}

/// Finite canonical extension: the concept lattice of `X_L` is isomorphic
/// to `L` itself.
pub fn check_canonical_extension(
    l: &FiniteLattice,
    mode: StateMode,
) -> Result<bool, AlgebraError> {
    Ok(lattice_iso(&xl_concept_lattice(l, mode)?, l))
}

/// Reads a complex algebra back as a [`ModalAlgebra`] over labels `c0…`.
pub fn from_complex_algebra(ca: &ComplexAlgebra) -> Result<ModalAlgebra, AlgebraError> {
    let n = ca.len();
    let cu = Universe::new((0..n).map(|i| format!("c{i}")))
        .map_err(|_| AlgebraError::NotALattice("empty complex algebra".to_string()))?;
    let mut leq = Rel::empty(&cu, &cu);
    for i in 0..n {
        for j in 0..n {
            if ca.lattice().leq(i, j) {
                leq.set(i, j, true);
            }
        }
    }
    let lattice = FiniteLattice::from_leq(leq)?;
    let box_table = (0..n).map(|i| ca.box_index(i)).collect();
    let dia_table = (0..n).map(|i| ca.dia_index(i)).collect();
    ModalAlgebra::new(lattice, box_table, dia_table)
}

/// All lattices on `n` elements in natural labelling (`a ≤ b` in the order
/// implies `a ≤ b` as indices), so every isomorphism class appears.
pub fn enumerate_lattices(n: usize) -> Vec<FiniteLattice> {
    assert!(n >= 1 && n <= 6, "enumeration is meant for small carriers");
    let u = Universe::new((0..n).map(|i| format!("e{i}"))).unwrap();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let mut leq = Rel::identity(&u);
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                leq.set(i, j, true);
            }
        }
        // Transitivity must already hold; from_leq re-checks everything
        // else (antisymmetry is automatic for a triangular order).
        let mut transitive = true;
        'outer: for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    if leq.contains(a, b) && leq.contains(b, c) && !leq.contains(a, c) {
                        transitive = false;
                        break 'outer;
                    }
                }
            }
        }
        if !transitive {
            continue;
        }
        if let Ok(l) = FiniteLattice::from_leq(leq) {
            out.push(l);
        }
    }
    out
}

/// All normal box tables on `l` (exhaustive over all maps; meant for small
/// carriers).
pub fn normal_boxes(l: &FiniteLattice) -> Vec<Vec<usize>> {
    all_tables(l, |t| box_is_normal(l, t).is_ok())
}

/// All normal diamond tables on `l`.
pub fn normal_dias(l: &FiniteLattice) -> Vec<Vec<usize>> {
    all_tables(l, |t| dia_is_normal(l, t).is_ok())
}

fn all_tables(l: &FiniteLattice, keep: impl Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
    let n = l.size();
    let mut out = Vec::new();
    let mut table = vec![0usize; n];
    loop {
        if keep(&table) {
            out.push(table.clone());
        }
        let mut j = 0;
        while j < n {
            table[j] += 1;
            if table[j] < n {
                break;
            }
            table[j] = 0;
            j += 1;
        }
        if j == n {
            return out;
        }
    }
}

/// Random lattice on `n` elements with `0` as bottom and `n-1` as top.
pub fn random_lattice(rng: &mut impl Rng, n: usize) -> FiniteLattice {
    assert!(n >= 2);
    let u = Universe::new((0..n).map(|i| format!("e{i}"))).unwrap();
    loop {
        let mut leq = Rel::identity(&u);
        for i in 0..n {
            leq.set(0, i, true);
            leq.set(i, n - 1, true);
        }
        for i in 1..(n - 1) {
            for j in (i + 1)..(n - 1) {
                if rng.random_bool(0.4) {
                    leq.set(i, j, true);
                }
            }
        }
        // Transitive closure within the triangular part.
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in (a + 1)..n {
                    for c in (b + 1)..n {
                        if leq.contains(a, b) && leq.contains(b, c) && !leq.contains(a, c) {
                            leq.set(a, c, true);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if let Ok(l) = FiniteLattice::from_leq(leq) {
            return l;
        }
    }
}

/// Random normal box table: draw values on the meet-irreducibles, complete
/// by meets, and keep the result if it is normal; falls back to the
/// always-normal family `□a = u` for `a ≠ ⊤` after too many rejections.
pub fn random_normal_box(rng: &mut impl Rng, l: &FiniteLattice) -> Vec<usize> {
    let n = l.size();
    let mis = l.meet_irreducibles();
    for _ in 0..200 {
        let assign: Vec<usize> = mis.iter().map(|_| rng.random_range(0..n)).collect();
        let table: Vec<usize> = (0..n)
            .map(|a| {
                let over = StateSet::from_indices(
                    l.universe(),
                    mis.iter()
                        .enumerate()
                        .filter(|&(_, &m)| l.leq(a, m))
                        .map(|(k, _)| assign[k]),
                );
                // Re-fold through the assigned values, keeping top for the
                // empty family.
                over.iter().fold(l.top(), |acc, v| l.meet(acc, v))
            })
            .collect();
        if box_is_normal(l, &table).is_ok() {
            return table;
        }
    }
    let u = rng.random_range(0..n);
    (0..n).map(|a| if a == l.top() { l.top() } else { u }).collect()
}

/// Random normal diamond table, dually.
pub fn random_normal_dia(rng: &mut impl Rng, l: &FiniteLattice) -> Vec<usize> {
    let n = l.size();
    let jis = l.join_irreducibles();
    for _ in 0..200 {
        let assign: Vec<usize> = jis.iter().map(|_| rng.random_range(0..n)).collect();
        let table: Vec<usize> = (0..n)
            .map(|a| {
                let under = StateSet::from_indices(
                    l.universe(),
                    jis.iter()
                        .enumerate()
                        .filter(|&(_, &j)| l.leq(j, a))
                        .map(|(k, _)| assign[k]),
                );
                under.iter().fold(l.bottom(), |acc, v| l.join(acc, v))
            })
            .collect();
        if dia_is_normal(l, &table).is_ok() {
            return table;
        }
    }
    let u = rng.random_range(0..n);
    (0..n).map(|a| if a == l.bottom() { l.bottom() } else { u }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_sequent;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(n: usize) -> FiniteLattice {
        let u = Universe::new((0..n).map(|i| format!("e{i}"))).unwrap();
        let mut leq = Rel::identity(&u);
        for i in 0..n {
            for j in i..n {
                leq.set(i, j, true);
            }
        }
        FiniteLattice::from_leq(leq).unwrap()
    }

    /// Four elements: bottom, two incomparable middles, top.
    fn m2() -> FiniteLattice {
        let u = Universe::new(["bot", "a", "b", "top"]).unwrap();
        let mut leq = Rel::identity(&u);
        for i in 0..4 {
            leq.set(0, i, true);
            leq.set(i, 3, true);
        }
        FiniteLattice::from_leq(leq).unwrap()
    }

    #[test]
    fn order_validation_catches_broken_input() {
        let u = Universe::new(["x", "y"]).unwrap();
        let cyclic = Rel::full(&u, &u);
        assert!(matches!(
            FiniteLattice::from_leq(cyclic),
            Err(AlgebraError::NotAPartialOrder(_))
        ));
        // Two incomparable points: no bounds at all.
        let discrete = Rel::identity(&u);
        assert!(matches!(
            FiniteLattice::from_leq(discrete),
            Err(AlgebraError::NotALattice(_))
        ));
    }

    #[test]
    fn filters_and_ideals_of_the_small_lattices() {
        let two = chain(2);
        let fs = two.filters().unwrap();
        assert_eq!(fs.len(), 2, "the 2-chain has filters up-top and everything");
        // The diamond has the four principal filters and nothing else: the
        // empty up-set does not count as a filter.
        let m = m2();
        assert_eq!(m.filters().unwrap().len(), 4);
        assert_eq!(m.ideals().unwrap().len(), 4);
        assert_eq!(chain(1).filters().unwrap().len(), 1);
    }

    #[test]
    fn generated_filters_and_ideals() {
        let m = m2();
        let top_only = StateSet::from_indices(m.universe(), [3]);
        assert_eq!(m.filter_gen(&top_only), top_only);
        // a join b = top, so the ideal generated by {a, b} is everything.
        let ab = StateSet::from_indices(m.universe(), [1, 2]);
        assert_eq!(m.ideal_gen(&ab), StateSet::full(m.universe()));
        let empty = StateSet::empty(m.universe());
        assert_eq!(m.ideal_gen(&empty), StateSet::from_indices(m.universe(), [0]));
        assert_eq!(m.filter_gen(&empty), StateSet::from_indices(m.universe(), [3]));
    }

    #[test]
    fn image_sets_and_the_filter_ideal_lemma() {
        let m = m2();
        let a = ModalAlgebra::with_identity_ops(m).unwrap();
        assert!(a.box_image(&StateSet::empty(a.lattice().universe())).is_empty());
        let k = StateSet::from_indices(a.lattice().universe(), [1, 3]);
        assert_eq!(a.box_image(&k), k);
        assert!(a.check_filtidl_lemma().unwrap());
        // Constant-top box on the diamond is normal and still satisfies
        // the lemma.
        let m = m2();
        let n = m.size();
        let b = ModalAlgebra::new(m, vec![3; n], (0..n).collect()).unwrap();
        assert!(b.check_filtidl_lemma().unwrap());
    }

    #[test]
    fn adjoint_tables_satisfy_both_adjunctions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let l = random_lattice(&mut rng, 5);
            let bx = random_normal_box(&mut rng, &l);
            let dx = random_normal_dia(&mut rng, &l);
            // `new` already errors if the adjunctions fail, so success is
            // the assertion.
            let a = ModalAlgebra::new(l, bx, dx).unwrap();
            let n = a.lattice().size();
            for x in 0..n {
                assert!(a.lattice().leq(x, a.box_op(a.black_dia_op(x))));
                assert!(a.lattice().leq(a.dia_op(a.black_box_op(x)), x));
            }
        }
    }

    #[test]
    fn non_normal_tables_are_rejected() {
        let l = chain(3);
        // box(top) != top.
        assert!(matches!(
            ModalAlgebra::new(l, vec![0, 0, 0], vec![0, 1, 2]),
            Err(AlgebraError::NotNormal(_))
        ));
        // Sending both middles of the diamond to top breaks meet
        // preservation at the incomparable pair: box(a & b) = box(bot) =
        // bot, but box(a) & box(b) = top.
        assert!(matches!(
            ModalAlgebra::new(m2(), vec![0, 3, 3, 3], vec![0, 1, 2, 3]),
            Err(AlgebraError::NotNormal(_))
        ));
        // Swapping the middles is a lattice automorphism, hence normal.
        assert!(ModalAlgebra::new(m2(), vec![0, 2, 1, 3], vec![0, 1, 2, 3]).is_ok());
        // dia(bot) != bot.
        assert!(matches!(
            ModalAlgebra::new(chain(2), vec![0, 1], vec![1, 1]),
            Err(AlgebraError::NotNormal(_))
        ));
    }

    #[test]
    fn xl_states_for_the_two_chain() {
        let two = chain(2);
        let (e, pairs) = build_graph_xl(&two, StateMode::Strict).unwrap();
        assert_eq!(pairs.len(), 1, "only (up-top, down-bot) is disjoint");
        assert!(e.contains(0, 0));
        let (e4, pairs4) = build_graph_xl(&two, StateMode::AllowEmpty).unwrap();
        assert_eq!(pairs4.len(), 4);
        assert!(e4.is_reflexive());
    }

    #[test]
    fn canonical_extension_holds_in_both_state_modes() {
        // Empty-component states have a full E-row and column, so they are
        // invisible to the polarity: the isomorphism holds either way and
        // strict mode (the standard nonempty filters and ideals, which the
        // disjointness requirement then forces to be proper) is default.
        let two = chain(2);
        assert!(check_canonical_extension(&two, StateMode::Strict).unwrap());
        assert!(check_canonical_extension(&two, StateMode::AllowEmpty).unwrap());
        assert!(check_canonical_extension(&m2(), StateMode::Strict).unwrap());
        assert!(check_canonical_extension(&m2(), StateMode::AllowEmpty).unwrap());
        for l in enumerate_lattices(4) {
            assert!(check_canonical_extension(&l, StateMode::Strict).unwrap());
            assert!(check_canonical_extension(&l, StateMode::AllowEmpty).unwrap());
        }
    }

    #[test]
    fn identity_modalities_give_e_and_its_converse() {
        let a = ModalAlgebra::with_identity_ops(m2()).unwrap();
        let frame = build_frame_fa(&a, StateMode::Strict).unwrap();
        assert_eq!(frame.rbox(), frame.e());
        assert_eq!(&frame.rdia().converse(), frame.e());
        assert!(frame.compat_report().is_ok());
    }

    #[test]
    fn complex_algebra_of_fa_recovers_the_algebra() {
        for l in [chain(2), chain(3), m2()] {
            let a = ModalAlgebra::with_identity_ops(l).unwrap();
            let frame = Arc::new(build_frame_fa(&a, StateMode::Strict).unwrap());
            let ca = ComplexAlgebra::new(frame, DEFAULT_CONCEPT_CAP).unwrap();
            let b = from_complex_algebra(&ca).unwrap();
            assert!(modal_algebra_iso(&a, &b));
        }
    }

    #[test]
    fn lattice_enumeration_matches_the_known_counts() {
        assert_eq!(enumerate_lattices(1).len(), 1);
        assert_eq!(enumerate_lattices(2).len(), 1);
        assert_eq!(enumerate_lattices(3).len(), 1);
        assert_eq!(enumerate_lattices(4).len(), 2);
        // Five-element lattices: exactly 5 isomorphism classes.
        let all5 = enumerate_lattices(5);
        let mut classes: Vec<FiniteLattice> = Vec::new();
        for l in all5 {
            if !classes.iter().any(|c| lattice_iso(c, &l)) {
                classes.push(l);
            }
        }
        assert_eq!(classes.len(), 5);
    }

    #[test]
    fn sequent_validity_over_algebras() {
        let a = ModalAlgebra::with_identity_ops(m2()).unwrap();
        let valid = parse_sequent("p |- p").unwrap();
        assert!(algebra_validates(&a, &valid, 1 << 20).unwrap().is_valid());
        let monot = parse_sequent("[]p & []q |- [](p & q)").unwrap();
        assert!(algebra_validates(&a, &monot, 1 << 20).unwrap().is_valid());
        // box(bot) = top on the 2-chain is normal but refutes box p |- p.
        let two = chain(2);
        let b = ModalAlgebra::new(two, vec![1, 1], vec![0, 1]).unwrap();
        let t = parse_sequent("[]p |- p").unwrap();
        match algebra_validates(&b, &t, 1 << 20).unwrap() {
            AlgebraValidity::Valid => panic!("expected a counter-assignment"),
            AlgebraValidity::Counterexample(env) => assert_eq!(env["p"], 0),
        }
    }

    #[test]
    fn random_algebra_frames_stay_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..15 {
            let l = random_lattice(&mut rng, 5);
            let a = ModalAlgebra::new(
                l.clone(),
                random_normal_box(&mut rng, &l),
                random_normal_dia(&mut rng, &l),
            )
            .unwrap();
            let frame = build_frame_fa(&a, StateMode::Strict).unwrap();
            assert!(frame.compat_report().is_ok());
            assert!(a.check_filtidl_lemma().unwrap());
        }
    }
}
