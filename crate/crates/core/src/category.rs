//! Baire category on finite posets: meagre sets, the operator `f[S]`,
//! pushforward of families along open surjections, and a checker for the
//! level-preservation theorem.
//!
//! In a finite space a set is meagre iff it is a finite union of nowhere
//! dense sets iff each of its singletons is nowhere dense: subsets of
//! nowhere dense sets are nowhere dense, and the singletons of `S` cover it.
//! In a finite poset a singleton `{x}` is nowhere dense in a subspace iff
//! `x` is not maximal there, so the meagre sets are exactly those missing
//! every maximal point of the subspace.
//!
//! Cylinder models are rejected by everything here.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::families::{format_path, shape_paths, FamilyError, KPartition, Path, TFamily};
use crate::hierarchy::{search_witness, verify_membership, MembershipStatus, SearchStats};
use crate::spaces::{is_open, open_sets, Base, PointSet, SpaceMap, SpaceModel};
use crate::trees::IterTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CategoryError {
    #[error("category operations need finite poset models, not cylinders")]
    CylinderModel,
    #[error("map must be continuous, open and surjective ({0})")]
    NotOpenSurjection(&'static str),
    #[error("set is not contained in the subspace")]
    NotInSubspace,
    #[error("family must live over the full base of the map's domain")]
    WrongBase,
    #[error("component inclusion failed at {0}")]
    TildeInclusion(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// A subspace of a finite poset with the relative topology.
#[derive(Clone, Debug)]
pub struct SubspaceView {
    ambient: Arc<SpaceModel>,
    carrier: PointSet,
}

impl SubspaceView {
    pub fn new(ambient: Arc<SpaceModel>, carrier: PointSet) -> Result<Self, CategoryError> {
        if ambient.is_cylinder() {
            return Err(CategoryError::CylinderModel);
        }
        if !carrier.is_subset(ambient.points()) {
            return Err(CategoryError::NotInSubspace);
        }
        Ok(SubspaceView { ambient, carrier })
    }

    pub fn whole(ambient: Arc<SpaceModel>) -> Result<Self, CategoryError> {
        let carrier = ambient.points();
        SubspaceView::new(ambient, carrier)
    }

    pub fn carrier(&self) -> PointSet {
        self.carrier
    }

    /// Largest relatively open subset of `s`.
    pub fn interior(&self, s: PointSet) -> PointSet {
        s.iter()
            .filter(|&x| self.ambient.up_cone(x).intersection(self.carrier).is_subset(s))
            .collect()
    }

    /// Smallest relatively closed superset of `s`.
    pub fn closure(&self, s: PointSet) -> PointSet {
        self.ambient.down_closure(s).intersection(self.carrier)
    }

    fn check(&self, s: PointSet) -> Result<(), CategoryError> {
        if s.is_subset(self.carrier) {
            Ok(())
        } else {
            Err(CategoryError::NotInSubspace)
        }
    }

    pub fn is_nowhere_dense(&self, s: PointSet) -> Result<bool, CategoryError> {
        self.check(s)?;
        Ok(self.interior(self.closure(s)).is_empty())
    }

    pub fn is_meager(&self, s: PointSet) -> Result<bool, CategoryError> {
        self.check(s)?;
        Ok(s.iter()
            .all(|x| self.interior(self.closure(PointSet::singleton(x))).is_empty()))
    }
}

fn require_posets(f: &SpaceMap) -> Result<(), CategoryError> {
    if f.domain().is_cylinder() || f.codomain().is_cylinder() {
        Err(CategoryError::CylinderModel)
    } else {
        Ok(())
    }
}

fn require_open_surjection(f: &SpaceMap) -> Result<(), CategoryError> {
    require_posets(f)?;
    if !f.is_continuous() {
        return Err(CategoryError::NotOpenSurjection("not continuous"));
    }
    if !f.is_open_map() {
        return Err(CategoryError::NotOpenSurjection("not open"));
    }
    if !f.is_surjection() {
        return Err(CategoryError::NotOpenSurjection("not surjective"));
    }
    Ok(())
}

/// `f[S]`: the codomain points whose fiber meets `S` in a non-meagre set.
pub fn category_image(f: &SpaceMap, s: PointSet) -> Result<PointSet, CategoryError> {
    require_posets(f)?;
    let mut out = PointSet::EMPTY;
    for y in 0..f.codomain().len() {
        let fiber = SubspaceView::new(f.domain().clone(), f.fiber(y))?;
        if !fiber.is_meager(s.intersection(fiber.carrier()))? {
            out.insert(y);
        }
    }
    Ok(out)
}

/// How `check_baire` picks the level sets of the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Random { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BaireReport {
    pub sets_checked: usize,
    pub preimages_checked: usize,
    pub violations: Vec<String>,
}

impl BaireReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn level_sets(space: &Arc<SpaceModel>, n: usize) -> Vec<PointSet> {
    if n == 0 {
        open_sets(space)
    } else {
        all_subsets(space)
    }
}

/// Checks, for an open continuous surjection `f`, that `f[S]` is in level
/// `n` for level-`n` sets `S ⊆ X`, that `f[S] ⊆ f(S)`, and that for every
/// `A ⊆ Y` the preimage is in level `n` exactly when `A` is.
pub fn check_baire(f: &SpaceMap, n: usize, sampling: Sampling) -> Result<BaireReport, CategoryError> {
    require_open_surjection(f)?;
    let x = f.domain();
    let y = f.codomain();
    let mut sets = level_sets(x, n);
    if let Sampling::Random { samples, seed } = sampling {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sets.shuffle(&mut rng);
        sets.truncate(samples);
    }
    let member = |space: &SpaceModel, s: PointSet| n > 0 || is_open(space, s);
    let mut report = BaireReport::default();
    for s in sets {
        report.sets_checked += 1;
        let img = category_image(f, s)?;
        if !img.is_subset(f.image(s)) {
            report.violations.push(format!("f[S] ⊄ f(S) for S = {s:?}"));
        }
        if !member(y, img) {
            report
                .violations
                .push(format!("f[S] = {img:?} not in level {n} for S = {s:?}"));
        }
    }
    for a in level_sets(y, 1) {
        report.preimages_checked += 1;
        if member(x, f.preimage(a)) != member(y, a) {
            report.violations.push(format!("preimage test fails for A = {a:?}"));
        }
    }
    Ok(report)
}

/// `f[F]`: the category image of every set, each sublayer cut down to the
/// component of its parent in the image family. Asserts the component
/// inclusion `Ṽ ⊆ f[Ũ]` at every path.
pub fn pushforward(f: &SpaceMap, fam: &TFamily) -> Result<TFamily, CategoryError> {
    require_open_surjection(f)?;
    if fam.base() != &Base::new(f.domain().clone()) {
        return Err(CategoryError::WrongBase);
    }
    let mut out = TFamily::raw(Base::new(f.codomain().clone()), fam.shape().clone(), fam.k());
    for p in shape_paths(fam.shape()) {
        let mut v = category_image(f, fam.set(&p).expect("valid family"))?;
        if p.len() > 1 {
            v = v.intersection(out.component_unchecked(&p[..p.len() - 1]));
        }
        out.insert_raw(p, v);
    }
    let sets: BTreeMap<Path, PointSet> = out.sets().clone();
    let out = fam.with_base_and_sets(Base::new(f.codomain().clone()), sets)?;
    for p in out.paths() {
        let ok = out.tilde(&p)?.is_subset(category_image(f, fam.tilde(&p)?)?)
            && out.component(&p)?.is_subset(category_image(f, fam.component(&p)?)?);
        if !ok {
            return Err(CategoryError::TildeInclusion(format_path(&p)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PreservationReport {
    /// Status of `A` in `Σ(Y, T)`.
    pub codomain: MembershipStatus,
    pub codomain_stats: SearchStats,
    /// Status of `A ∘ f` in `Σ(X, T)`.
    pub domain: MembershipStatus,
    pub domain_stats: SearchStats,
    /// `Some(agree)` when both sides are decided.
    pub biconditional: Option<bool>,
    /// The pushforward of the domain witness determines `A`.
    pub pushforward_verified: Option<bool>,
    /// The pullback of the codomain witness determines `A ∘ f`.
    pub pullback_verified: Option<bool>,
}

impl PreservationReport {
    /// No check that ran has failed.
    pub fn holds(&self) -> bool {
        self.biconditional != Some(false)
            && self.pushforward_verified != Some(false)
            && self.pullback_verified != Some(false)
    }
}

/// Searches `A ∈ Σ(Y, T)` and `A ∘ f ∈ Σ(X, T)` and transports witnesses
/// both ways.
pub fn check_preservation(
    f: &SpaceMap,
    a: &KPartition,
    t: &IterTree,
    budget: usize,
) -> Result<PreservationReport, CategoryError> {
    require_open_surjection(f)?;
    let af = a.compose(f)?;
    let cod = search_witness(a, t, budget);
    let dom = search_witness(&af, t, budget);
    let biconditional = match (cod.status.decided(), dom.status.decided()) {
        (Some(p), Some(q)) => Some(p == q),
        _ => None,
    };
    let pushforward_verified = match dom.status.witness() {
        Some(w) => {
            let g = pushforward(f, w)?;
            Some(verify_membership(a, t, &g).unwrap_or(false))
        }
        None => None,
    };
    let pullback_verified = match cod.status.witness() {
        Some(w) => {
            let g = w.pullback(f)?;
            Some(verify_membership(&af, t, &g).unwrap_or(false))
        }
        None => None,
    };
    Ok(PreservationReport {
        codomain: cod.status,
        codomain_stats: cod.stats,
        domain: dom.status,
        domain_stats: dom.stats,
        biconditional,
        pushforward_verified,
        pullback_verified,
    })
}

/// Every subset of a small model, in submask order.
pub fn all_subsets(space: &SpaceModel) -> Vec<PointSet> {
    let full = space.points().bits();
    let mut out = Vec::new();
    let mut sub: u128 = 0;
    loop {
        out.push(PointSet::from_bits(sub));
        if sub == full {
            return out;
        }
        sub = sub.wrapping_sub(full) & full;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski() -> Arc<SpaceModel> {
        Arc::new(SpaceModel::sierpinski())
    }

    fn to_point(x: Arc<SpaceModel>) -> SpaceMap {
        let one = Arc::new(SpaceModel::discrete(1));
        let n = x.len();
        SpaceMap::new(x, one, vec![0; n]).unwrap()
    }

    #[test]
    fn sierpinski_meagre_sets() {
        let x = sierpinski();
        let v = SubspaceView::whole(x).unwrap();
        let bot = PointSet::singleton(0);
        let top = PointSet::singleton(1);
        assert!(v.is_nowhere_dense(bot).unwrap());
        assert!(v.is_meager(bot).unwrap());
        assert!(!v.is_meager(top).unwrap());
        assert!(v.is_meager(PointSet::EMPTY).unwrap());
    }

    #[test]
    fn category_image_examples() {
        let x = sierpinski();
        let id = SpaceMap::identity(x.clone());
        for s in all_subsets(&x) {
            assert_eq!(category_image(&id, s).unwrap(), s);
        }
        let f = to_point(x);
        assert_eq!(category_image(&f, PointSet::singleton(0)).unwrap(), PointSet::EMPTY);
        assert_eq!(
            category_image(&f, PointSet::singleton(1)).unwrap(),
            PointSet::singleton(0)
        );
    }

    #[test]
    fn cylinders_are_rejected() {
        let c = Arc::new(SpaceModel::cylinder(2, 1).unwrap());
        assert_eq!(
            category_image(&SpaceMap::identity(c.clone()), PointSet::EMPTY),
            Err(CategoryError::CylinderModel)
        );
        assert!(SubspaceView::whole(c).is_err());
    }

    #[test]
    fn baire_on_identity_and_collapse() {
        let x = sierpinski();
        for n in 0..2 {
            assert!(check_baire(&SpaceMap::identity(x.clone()), n, Sampling::Exhaustive)
                .unwrap()
                .passed());
            assert!(check_baire(&to_point(x.clone()), n, Sampling::Exhaustive)
                .unwrap()
                .passed());
        }
    }

    #[test]
    fn preservation_on_chain_collapse() {
        // 3-chain a < b < c onto bot < top, collapsing b, c
        let x = Arc::new(SpaceModel::linear(3));
        let y = sierpinski();
        let f = SpaceMap::new(x, y.clone(), vec![0, 1, 1]).unwrap();
        let a = KPartition::new(y.clone(), 2, vec![0, 1]).unwrap();
        let r = check_preservation(&f, &a, &IterTree::chain(&[0, 1]), 1000).unwrap();
        assert!(r.codomain.is_member() && r.domain.is_member());
        assert_eq!(r.biconditional, Some(true));
        assert_eq!(r.pushforward_verified, Some(true));
        assert_eq!(r.pullback_verified, Some(true));
        let r = check_preservation(&f, &a, &IterTree::base(0), 1000).unwrap();
        assert_eq!(r.codomain, MembershipStatus::NonMemberExhaustive);
        assert_eq!(r.domain, MembershipStatus::NonMemberExhaustive);
        assert!(r.holds());
    }

    #[test]
    fn pushforward_of_constant_family_is_trivial() {
        let x = Arc::new(SpaceModel::linear(3));
        let f = to_point(x.clone());
        let fam = TFamily::from_layer0(x, IterTree::base(1), 2, []).unwrap();
        let g = pushforward(&f, &fam).unwrap();
        assert_eq!(g.set(&[vec![]]), Some(PointSet::singleton(0)));
    }

    #[test]
    fn non_open_maps_are_rejected() {
        // bot < top onto a 2-point antichain is not continuous
        let f = SpaceMap::new(sierpinski(), Arc::new(SpaceModel::discrete(2)), vec![0, 1]).unwrap();
        assert!(matches!(
            check_baire(&f, 0, Sampling::Exhaustive),
            Err(CategoryError::NotOpenSurjection(_))
        ));
    }
}
