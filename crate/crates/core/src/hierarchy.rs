//! Level membership `Σ(X, T)`: witness verification, an exact witness
//! search, classification against candidate trees, and non-collapse
//! witnesses for the difference-hierarchy fragment.
//!
//! The search decides whether some monotone `T`-family over the full base
//! of a model determines a given partition. It rests on two facts about the
//! finite models:
//!
//! * **Restriction.** If a subfamily rooted at node `τ` works on a level set
//!   `U`, intersecting every set below `τ` with a smaller level set
//!   `U' ⊆ U` still works. So feasibility of `(τ, U)` is closed downwards,
//!   and it suffices to try the *least* level set containing the points
//!   that `τ`'s own component must not keep, or the maximal feasible sets
//!   when `τ` has several children.
//! * **Saturation.** Every level above 0 contains all subsets, so a point
//!   can be routed through a non-base label `L` exactly when its value is a
//!   base label occurring in `L`.
//!
//! A completed search without a witness is therefore a proof of
//! non-membership; running out of budget yields an explicit unknown status.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::families::{shape_paths, FamilyError, KPartition, Path, TFamily};
use crate::spaces::{Base, PointSet, SpaceModel};
use crate::trees::{iter_level, Address, HComparator, IterTree, TreeError};

pub const DEFAULT_SEARCH_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Candidate sets examined, the quantity the budget caps.
    pub candidates: usize,
    /// Distinct `(node, set)` subproblems decided.
    pub subproblems: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipStatus {
    Member(TFamily),
    NonMemberExhaustive,
    UnknownBudgetExhausted,
}

impl MembershipStatus {
    pub fn name(&self) -> &'static str {
        match self {
            MembershipStatus::Member(_) => "member",
            MembershipStatus::NonMemberExhaustive => "non_member_exhaustive",
            MembershipStatus::UnknownBudgetExhausted => "unknown_budget_exhausted",
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, MembershipStatus::Member(_))
    }

    /// `Some(answer)` when the status is decided.
    pub fn decided(&self) -> Option<bool> {
        match self {
            MembershipStatus::Member(_) => Some(true),
            MembershipStatus::NonMemberExhaustive => Some(false),
            MembershipStatus::UnknownBudgetExhausted => None,
        }
    }

    pub fn witness(&self) -> Option<&TFamily> {
        match self {
            MembershipStatus::Member(f) => Some(f),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipResult {
    pub status: MembershipStatus,
    pub stats: SearchStats,
}

/// Whether `f` is a valid monotone `t`-family over `a`'s space that
/// determines `a`.
pub fn verify_membership(a: &KPartition, t: &IterTree, f: &TFamily) -> Result<bool, HierarchyError> {
    if f.shape() != t {
        return Err(HierarchyError::ShapeMismatch(format!(
            "family is shaped by {} but the tree is {}",
            f.shape(),
            t
        )));
    }
    if **f.space() != **a.space() || f.base() != &Base::new(a.space().clone()) {
        return Ok(false);
    }
    if f.validate().is_err() || !f.is_monotone() {
        return Ok(false);
    }
    Ok(f.determine().is_ok_and(|b| b.same_values(a)))
}

struct BudgetExhausted;

/// Exact search for one layer-0 family over the full base.
struct Search<'a> {
    base: Base,
    tree: &'a IterTree,
    /// Per node: the points its own component may keep.
    keep: HashMap<Address, PointSet>,
    /// Per `(node, U)`: the chosen child sets when feasible.
    memo: HashMap<(Address, PointSet), Option<Vec<PointSet>>>,
    budget: usize,
    candidates: usize,
}

/// Base labels occurring anywhere in `t`, including inside labels.
pub fn base_labels(t: &IterTree) -> BTreeSet<u32> {
    fn go(t: &IterTree, out: &mut BTreeSet<u32>) {
        match t {
            IterTree::Base(i) => {
                out.insert(*i);
            }
            IterTree::Node { label, children } => {
                go(label, out);
                children.iter().for_each(|c| go(c, out));
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

fn points_with_values(a: &KPartition, labels: &BTreeSet<u32>) -> PointSet {
    (0..a.values().len())
        .filter(|&p| labels.contains(&a.value(p)))
        .collect()
}

fn child(addr: &Address, i: usize) -> Address {
    let mut c = addr.clone();
    c.push(i);
    c
}

impl<'a> Search<'a> {
    fn new(base: Base, tree: &'a IterTree, a: &KPartition, budget: usize) -> Self {
        assert!(
            base.is_saturated(1),
            "the search assumes every level above 0 is saturated"
        );
        let keep = tree
            .addresses()
            .into_iter()
            .map(|addr| {
                let label = tree.subtree(&addr).unwrap().root_label();
                let ok = points_with_values(a, &base_labels(label));
                (addr, ok)
            })
            .collect();
        Search {
            base,
            tree,
            keep,
            memo: HashMap::new(),
            budget,
            candidates: 0,
        }
    }

    fn tick(&mut self) -> Result<(), BudgetExhausted> {
        self.candidates += 1;
        if self.candidates > self.budget {
            Err(BudgetExhausted)
        } else {
            Ok(())
        }
    }

    /// Least level-0 set of the base containing `r`.
    fn closure(&self, r: PointSet) -> PointSet {
        if self.base.is_saturated(0) {
            return r;
        }
        self.base.space().up_closure(r).intersection(self.base.carrier())
    }

    fn solve(&mut self, addr: &Address, u: PointSet) -> Result<bool, BudgetExhausted> {
        if let Some(r) = self.memo.get(&(addr.clone(), u)) {
            return Ok(r.is_some());
        }
        self.tick()?;
        let m = self.tree.subtree(addr).unwrap().children().len();
        let must_leave = u.difference(self.keep[addr]);
        let choice = if must_leave.is_empty() {
            Some(vec![PointSet::EMPTY; m])
        } else if m == 0 {
            None
        } else {
            self.cover(addr, m, must_leave)?
        };
        let ok = choice.is_some();
        self.memo.insert((addr.clone(), u), choice);
        Ok(ok)
    }

    /// Feasible child sets whose union contains `r`, if any.
    fn cover(&mut self, addr: &Address, m: usize, r: PointSet) -> Result<Option<Vec<PointSet>>, BudgetExhausted> {
        let cl = self.closure(r);
        for i in 0..m {
            if self.solve(&child(addr, i), cl)? {
                let mut v = vec![PointSet::EMPTY; m];
                v[i] = cl;
                return Ok(Some(v));
            }
        }
        if m == 1 {
            return Ok(None);
        }
        // Several children: collect each child's maximal feasible sets
        // inside the closure and look for a covering combination.
        let mut options: Vec<Vec<PointSet>> = Vec::with_capacity(m);
        for i in 0..m {
            let c = child(addr, i);
            let mut sets = Vec::new();
            let mut exhausted = false;
            let base = self.base.clone();
            let _ = base.for_each_level_set(0, PointSet::EMPTY, cl, &mut |v| {
                if v.is_empty() || v == cl {
                    return ControlFlow::Continue(());
                }
                match self.solve(&c, v) {
                    Ok(true) => sets.push(v),
                    Ok(false) => {}
                    Err(BudgetExhausted) => {
                        exhausted = true;
                        return ControlFlow::Break(());
                    }
                }
                ControlFlow::Continue(())
            });
            if exhausted {
                return Err(BudgetExhausted);
            }
            let maximal: Vec<PointSet> = sets
                .iter()
                .copied()
                .filter(|&v| !sets.iter().any(|&w| w != v && v.is_subset(w)))
                .collect();
            options.push(maximal);
        }
        let mut pick = Vec::with_capacity(m);
        if self.combine(&options, r, PointSet::EMPTY, &mut pick)? {
            Ok(Some(pick))
        } else {
            Ok(None)
        }
    }

    fn combine(
        &mut self,
        options: &[Vec<PointSet>],
        r: PointSet,
        acc: PointSet,
        pick: &mut Vec<PointSet>,
    ) -> Result<bool, BudgetExhausted> {
        let i = pick.len();
        if i == options.len() {
            return Ok(r.is_subset(acc));
        }
        // the remaining children can add at most the union of their options
        let reach = options[i..].iter().flatten().fold(acc, |s, &v| s.union(v));
        if !r.is_subset(reach) {
            return Ok(false);
        }
        for &v in options[i].iter().chain(std::iter::once(&PointSet::EMPTY)) {
            self.tick()?;
            pick.push(v);
            if self.combine(options, r, acc.union(v), pick)? {
                return Ok(true);
            }
            pick.pop();
        }
        Ok(false)
    }

    /// Layer-0 sets of the found family, by address.
    fn layer_sets(&self, root: PointSet) -> Vec<(Address, PointSet)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), root)];
        while let Some((addr, u)) = stack.pop() {
            let m = self.tree.subtree(&addr).unwrap().children().len();
            // empty sets are feasible without being searched
            let kids = match self.memo.get(&(addr.clone(), u)) {
                Some(choice) => choice.clone().expect("feasible node"),
                None if u.is_empty() => vec![PointSet::EMPTY; m],
                None => unreachable!("chosen sets are decided"),
            };
            for (i, v) in kids.into_iter().enumerate() {
                stack.push((child(&addr, i), v));
            }
            out.push((addr, u));
        }
        out
    }
}

/// Sets of a family over a saturated base on `carrier`, for the label tree
/// `tree`: every point is routed to the first terminating path carrying its
/// value. Paths are relative to `tree`.
fn saturated_family(tree: &IterTree, carrier: PointSet, a: &KPartition) -> BTreeMap<Path, PointSet> {
    let paths = shape_paths(tree);
    let terminal: Vec<(&Path, u32)> = paths
        .iter()
        .filter_map(|p| terminal_label(tree, p).map(|i| (p, i)))
        .collect();
    let mut sets: BTreeMap<Path, PointSet> = paths.iter().map(|p| (p.clone(), PointSet::EMPTY)).collect();
    for x in carrier.iter() {
        let (route, _) = terminal
            .iter()
            .find(|(_, i)| *i == a.value(x))
            .expect("caller checked the value occurs");
        for p in &paths {
            if passes_through(route, p) {
                sets.get_mut(p).unwrap().insert(x);
            }
        }
    }
    sets
}

fn terminal_label(tree: &IterTree, path: &[Address]) -> Option<u32> {
    let mut t = tree;
    let (last, init) = path.split_last()?;
    for a in init {
        t = t.subtree(a)?.root_label();
    }
    match t.subtree(last)?.root_label() {
        IterTree::Base(i) => Some(*i),
        _ => None,
    }
}

/// Whether the run `route` goes through the node `p`.
fn passes_through(route: &[Address], p: &[Address]) -> bool {
    let n = p.len();
    route.len() >= n && route[..n - 1] == p[..n - 1] && route[n - 1].starts_with(&p[n - 1])
}

/// Searches for a monotone `t`-family over the full base of `a`'s space
/// that determines `a`, examining at most `budget` candidate sets.
pub fn search_witness(a: &KPartition, t: &IterTree, budget: usize) -> MembershipResult {
    let start = Instant::now();
    let space = a.space().clone();
    let base = Base::new(space.clone());
    let mut search = Search::new(base.clone(), t, a, budget);
    let outcome = search.solve(&Vec::new(), space.points());
    let mut stats = SearchStats {
        candidates: search.candidates.min(budget),
        subproblems: search.memo.len(),
        elapsed: Duration::ZERO,
    };
    let status = match outcome {
        Err(BudgetExhausted) => MembershipStatus::UnknownBudgetExhausted,
        Ok(false) => MembershipStatus::NonMemberExhaustive,
        Ok(true) => {
            let layer0: BTreeMap<Address, PointSet> = search.layer_sets(space.points()).into_iter().collect();
            let mut sets: BTreeMap<Path, PointSet> = layer0.iter().map(|(addr, &u)| (vec![addr.clone()], u)).collect();
            for (addr, &u) in &layer0 {
                let node = t.subtree(addr).unwrap();
                let label = node.root_label();
                if label.is_base() {
                    continue;
                }
                let below =
                    (0..node.children().len()).fold(PointSet::EMPTY, |acc, i| acc.union(layer0[&child(addr, i)]));
                for (q, s) in saturated_family(label, u.difference(below), a) {
                    let mut full = vec![addr.clone()];
                    full.extend(q);
                    sets.insert(full, s);
                }
            }
            let k = a.k().max(t.max_base_label() + 1);
            let fam = TFamily::new(base.clone(), t.clone(), k, sets).expect("search yields a valid family");
            debug_assert!(verify_membership(a, t, &fam).unwrap());
            MembershipStatus::Member(fam)
        }
    };
    stats.elapsed = start.elapsed();
    MembershipResult { status, stats }
}

#[derive(Clone, Debug)]
pub struct ClassEntry {
    pub tree: IterTree,
    pub result: MembershipResult,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub entries: Vec<ClassEntry>,
    /// Indices of the `≤_h`-minimal members among the candidates.
    pub minimal: Vec<usize>,
    /// Pairs `(i, j)` with `T_i ≤_h T_j`, `T_i` a member and `T_j` a decided
    /// non-member: each would contradict monotonicity of the levels.
    pub violations: Vec<(usize, usize)>,
}

impl Classification {
    pub fn minimal_trees(&self) -> Vec<&IterTree> {
        self.minimal.iter().map(|&i| &self.entries[i].tree).collect()
    }
}

/// Searches every candidate and reports the `≤_h`-minimal members, with an
/// audit that membership is upward closed along `≤_h`.
pub fn classify(a: &KPartition, candidates: &[IterTree], budget: usize) -> Classification {
    let entries: Vec<ClassEntry> = candidates
        .iter()
        .map(|t| ClassEntry {
            tree: t.clone(),
            result: search_witness(a, t, budget),
        })
        .collect();
    let mut cmp = HComparator::new();
    let n = entries.len();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            leq[i][j] = cmp.leq(&entries[i].tree, &entries[j].tree);
        }
    }
    let member = |i: usize| entries[i].result.status.is_member();
    let minimal = (0..n)
        .filter(|&i| member(i))
        .filter(|&i| !(0..n).any(|j| member(j) && leq[j][i] && !leq[i][j]))
        .collect();
    let violations = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| member(i) && leq[i][j] && entries[j].result.status.decided() == Some(false))
        .collect();
    Classification {
        entries,
        minimal,
        violations,
    }
}

/// A partition on a cylinder model separating two levels.
#[derive(Clone, Debug)]
pub struct NonCollapseWitness {
    pub space: Arc<SpaceModel>,
    pub partition: KPartition,
    /// A `T`-family determining the partition.
    pub member: TFamily,
    pub member_stats: SearchStats,
    /// Statistics of the exhaustive search refuting `S`.
    pub refutation_stats: SearchStats,
}

#[derive(Clone, Debug)]
pub enum NonCollapse {
    Witness(Box<NonCollapseWitness>),
    Unavailable(String),
}

/// Node-labeled form of a tree in the difference-hierarchy fragment.
fn base_labeled(t: &IterTree) -> Option<Vec<(Address, u32)>> {
    t.addresses()
        .into_iter()
        .map(|a| {
            let label = t.subtree(&a).unwrap().root_label().as_base_label()?;
            Some((a, label))
        })
        .collect()
}

/// For `T, S` of level at most 1 with `T ≰_h S`, a partition in
/// `Σ(X, T) ∖ Σ(X, S)` on a cylinder model: the nodes of `T` are laid out
/// as strings and every string takes the label of the deepest node it
/// extends. Both sides are certified by search.
pub fn noncollapse_witness(t: &IterTree, s: &IterTree, k: u32, budget: usize) -> Result<NonCollapse, HierarchyError> {
    for (name, tree) in [("T", t), ("S", s)] {
        tree.check_arity(k)?;
        if iter_level(tree) > 1 {
            return Err(HierarchyError::Precondition(format!(
                "{name} = {tree} is not in the difference-hierarchy fragment"
            )));
        }
    }
    if HComparator::new().leq(t, s) {
        return Err(HierarchyError::Precondition(format!(
            "{t} ≤_h {s}, so no separation exists"
        )));
    }
    let nodes = base_labeled(t).expect("level checked above");
    let b = t.max_branching().max(2) as u32;
    let d = t.height().max(1) as u32;
    let space = match SpaceModel::cylinder(b, d) {
        Ok(m) => Arc::new(m),
        Err(e) => {
            return Ok(NonCollapse::Unavailable(format!(
                "a cylinder with b={b}, d={d} is outside the supported models: {e}"
            )))
        }
    };
    let addr_string = |a: &Address| a.iter().map(|&i| i as u8).collect::<Vec<u8>>();
    let labels: Vec<u32> = (0..space.len())
        .map(|p| {
            let sigma = space.string_of(p).unwrap();
            nodes
                .iter()
                .filter(|(a, _)| sigma.starts_with(&addr_string(a)))
                .max_by_key(|(a, _)| a.len())
                .map(|(_, l)| *l)
                .unwrap()
        })
        .collect();
    let partition = KPartition::new(space.clone(), k, labels)?;
    let with_t = search_witness(&partition, t, budget);
    let with_s = search_witness(&partition, s, budget);
    match (&with_t.status, &with_s.status) {
        (MembershipStatus::Member(f), MembershipStatus::NonMemberExhaustive) => {
            Ok(NonCollapse::Witness(Box::new(NonCollapseWitness {
                space,
                partition,
                member: f.clone(),
                member_stats: with_t.stats,
                refutation_stats: with_s.stats,
            })))
        }
        (ts, ss) => Ok(NonCollapse::Unavailable(format!(
            "search returned {} for T and {} for S within the budget",
            ts.name(),
            ss.name()
        ))),
    }
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} candidates, {} subproblems", self.candidates, self.subproblems)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski() -> Arc<SpaceModel> {
        Arc::new(SpaceModel::sierpinski())
    }

    #[test]
    fn constant_partition_is_in_its_singleton_level() {
        let x = sierpinski();
        let a = KPartition::constant(x, 2, 1);
        let r = search_witness(&a, &IterTree::base(1), 100);
        assert!(r.status.is_member());
        assert_eq!(
            search_witness(&a, &IterTree::base(0), 100).status,
            MembershipStatus::NonMemberExhaustive
        );
    }

    #[test]
    fn sierpinski_open_point_indicator() {
        let x = sierpinski();
        // bottom = 0, top = 1
        let a = KPartition::new(x, 2, vec![0, 1]).unwrap();
        let r = search_witness(&a, &IterTree::chain(&[0, 1]), 100);
        let f = r.status.witness().expect("member").clone();
        assert!(verify_membership(&a, &IterTree::chain(&[0, 1]), &f).unwrap());
        assert_eq!(
            search_witness(&a, &IterTree::base(0), 100).status,
            MembershipStatus::NonMemberExhaustive
        );
        assert_eq!(
            search_witness(&a, &IterTree::chain(&[1, 0]), 100).status,
            MembershipStatus::NonMemberExhaustive
        );
    }

    #[test]
    fn dual_chain_rejects_the_witness_family() {
        let x = sierpinski();
        let a = KPartition::new(x, 2, vec![0, 1]).unwrap();
        let f = search_witness(&a, &IterTree::chain(&[0, 1]), 100)
            .status
            .witness()
            .unwrap()
            .clone();
        assert!(matches!(
            verify_membership(&a, &IterTree::chain(&[1, 0]), &f),
            Err(HierarchyError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let x = sierpinski();
        let a = KPartition::new(x, 2, vec![0, 1]).unwrap();
        let r = search_witness(&a, &IterTree::chain(&[0, 1]), 0);
        assert_eq!(r.status, MembershipStatus::UnknownBudgetExhausted);
    }

    #[test]
    fn classify_open_set_on_cylinder() {
        let x = Arc::new(SpaceModel::cylinder(2, 2).unwrap());
        let u = x.cone(&[0]).unwrap();
        let a = KPartition::indicator(x, u);
        let candidates = vec![
            IterTree::base(0),
            IterTree::base(1),
            IterTree::chain(&[0, 1]),
            IterTree::chain(&[1, 0]),
            IterTree::chain(&[0, 1, 0]),
        ];
        let c = classify(&a, &candidates, DEFAULT_SEARCH_BUDGET);
        assert_eq!(c.minimal_trees(), vec![&IterTree::chain(&[0, 1])]);
        assert!(c.violations.is_empty());
    }

    #[test]
    fn two_level_shape_routes_points() {
        let x = sierpinski();
        // root labeled by the chain 1-0 (a level-1 label): everything lands
        // in the root component and is routed by value.
        let t = IterTree::node(IterTree::chain(&[1, 0]), vec![]);
        let a = KPartition::new(x, 2, vec![1, 0]).unwrap();
        let r = search_witness(&a, &t, 100);
        assert!(verify_membership(&a, &t, r.status.witness().unwrap()).unwrap());
    }

    #[test]
    fn noncollapse_chain_examples() {
        let t = IterTree::chain(&[0, 1, 0]);
        let s = IterTree::chain(&[0, 1]);
        let NonCollapse::Witness(w) = noncollapse_witness(&t, &s, 2, DEFAULT_SEARCH_BUDGET).unwrap() else {
            panic!("expected a witness");
        };
        assert!(verify_membership(&w.partition, &t, &w.member).unwrap());
        for (t, s) in [
            (IterTree::chain(&[1, 0]), IterTree::chain(&[0, 1])),
            (IterTree::chain(&[0, 1]), IterTree::chain(&[1, 0])),
        ] {
            assert!(matches!(
                noncollapse_witness(&t, &s, 2, DEFAULT_SEARCH_BUDGET).unwrap(),
                NonCollapse::Witness(_)
            ));
        }
        assert!(matches!(
            noncollapse_witness(&s, &t, 2, DEFAULT_SEARCH_BUDGET),
            Err(HierarchyError::Precondition(_))
        ));
    }
}
