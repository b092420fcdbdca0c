//! T-families over a level base, their components, reduction and the
//! k-partitions they determine.
//!
//! A family for an iterated tree `T` assigns a set to every *path*
//! `(τ₀, τ₁, …, τ_j)`: `τ₀` is a node of `T`, `τ₁` a node of the label tree
//! of `τ₀`, and so on. The sets of layer `j` live in level `j` of the base,
//! restricted to the component of the parent path; the root set of every
//! layer is that component itself (the whole carrier for layer 0). A path
//! whose last node carries a base label `i` is *terminating*, and its
//! component is where the family answers `i`.
//!
//! Assignments are stored flat, keyed by path; the nested view of a family
//! as a layer family plus one subfamily per node is recovered on demand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::spaces::{self, Base, PointSet, SpaceError, SpaceMap, SpaceModel};
use crate::trees::{Address, IterTree, TreeError};

/// One node address per layer.
pub type Path = Vec<Address>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("path {0} does not exist in the shape")]
    InvalidPath(String),
    #[error("no set assigned to path {0}")]
    MissingSet(String),
    #[error("root set at {path} must equal the carrier of its layer")]
    RootNotCarrier { path: String },
    #[error("set at {path} is not in level {level} of its layer base (point `{point}`)")]
    NotInLevel { path: String, level: usize, point: String },
    #[error("set at {path} leaves the component of its parent (point `{point}`)")]
    NotContained { path: String, point: String },
    #[error("map is not continuous")]
    NotContinuous,
    #[error("family lives over a different space than the map")]
    SpaceMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("partition error: {0}")]
    Partition(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

// ---- k-partitions ---------------------------------------------------------

/// A total map from the points of a model to `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPartition {
    space: Arc<SpaceModel>,
    k: u32,
    values: Vec<u32>,
}

impl KPartition {
    pub fn new(space: Arc<SpaceModel>, k: u32, values: Vec<u32>) -> Result<Self, FamilyError> {
        if values.len() != space.len() {
            return Err(FamilyError::Partition(format!(
                "{} values for {} points",
                values.len(),
                space.len()
            )));
        }
        if let Some((p, v)) = values.iter().enumerate().find(|(_, &v)| v >= k) {
            return Err(FamilyError::Partition(format!(
                "value {v} at `{}` is not below k = {k}",
                space.name(p)
            )));
        }
        Ok(KPartition { space, k, values })
    }

    pub fn constant(space: Arc<SpaceModel>, k: u32, i: u32) -> Self {
        assert!(i < k, "constant value must be below k");
        let values = vec![i; space.len()];
        KPartition { space, k, values }
    }

    pub fn from_fn(space: Arc<SpaceModel>, k: u32, f: impl Fn(usize) -> u32) -> Result<Self, FamilyError> {
        let values = (0..space.len()).map(f).collect();
        KPartition::new(space, k, values)
    }

    /// Characteristic partition of `s`: 1 on `s`, 0 elsewhere.
    pub fn indicator(space: Arc<SpaceModel>, s: PointSet) -> Self {
        let values = (0..space.len()).map(|p| u32::from(s.contains(p))).collect();
        KPartition { space, k: 2, values }
    }

    pub fn space(&self) -> &Arc<SpaceModel> {
        &self.space
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, p: usize) -> u32 {
        self.values[p]
    }

    /// `A⁻¹(i)`.
    pub fn class(&self, i: u32) -> PointSet {
        (0..self.values.len()).filter(|&p| self.values[p] == i).collect()
    }

    /// `A ∘ f` for `f` into this partition's space.
    pub fn compose(&self, f: &SpaceMap) -> Result<KPartition, FamilyError> {
        if **f.codomain() != *self.space {
            return Err(FamilyError::SpaceMismatch);
        }
        let values = f.graph().iter().map(|&y| self.values[y]).collect();
        Ok(KPartition {
            space: f.domain().clone(),
            k: self.k,
            values,
        })
    }

    /// Same values, compared as maps (ignores `k`).
    pub fn same_values(&self, other: &KPartition) -> bool {
        self.values == other.values
    }
}

/// Partition file: one `point value` line per point; `k` is one more than
/// the largest value unless a `k=` line says otherwise.
pub fn parse_partition(space: Arc<SpaceModel>, text: &str) -> Result<KPartition, FamilyError> {
    let mut values: Vec<Option<u32>> = vec![None; space.len()];
    let mut k: Option<u32> = None;
    for (line, l) in spaces::content_lines(text) {
        if let Some(v) = l.strip_prefix("k=") {
            k = Some(v.trim().parse().map_err(|_| ferr(line, "bad k"))?);
            continue;
        }
        let mut it = l.split_whitespace();
        let (Some(name), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(ferr(line, format!("expected `point value`, got `{l}`")));
        };
        let p = space
            .index_of(name)
            .ok_or_else(|| ferr(line, format!("unknown point `{name}`")))?;
        let v: u32 = v.parse().map_err(|_| ferr(line, format!("bad value `{v}`")))?;
        if values[p].replace(v).is_some() {
            return Err(ferr(line, format!("`{name}` assigned twice")));
        }
    }
    let values: Vec<u32> = values
        .iter()
        .enumerate()
        .map(|(p, v)| v.ok_or_else(|| FamilyError::Partition(format!("no value for `{}`", space.name(p)))))
        .collect::<Result<_, _>>()?;
    let k = k.unwrap_or_else(|| values.iter().max().map_or(1, |m| m + 1));
    KPartition::new(space, k, values)
}

pub fn format_partition(a: &KPartition) -> String {
    let mut out = format!("k={}\n", a.k);
    for (p, v) in a.values.iter().enumerate() {
        out.push_str(&format!("{} {}\n", a.space.name(p), v));
    }
    out
}

fn ferr(line: usize, msg: impl Into<String>) -> FamilyError {
    FamilyError::Parse { line, msg: msg.into() }
}

// ---- paths ----------------------------------------------------------------

/// `e` for the root, otherwise child indices joined by `.`; layers are
/// separated by `/`.
pub fn format_path(path: &[Address]) -> String {
    path.iter()
        .map(|a| {
            if a.is_empty() {
                "e".to_string()
            } else {
                a.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
            }
        })
        .collect::<Vec<_>>()
        .join("/")
}

pub fn parse_path(text: &str) -> Option<Path> {
    text.trim()
        .split('/')
        .map(|a| {
            let a = a.trim();
            if a == "e" {
                Some(Vec::new())
            } else {
                a.split('.').map(|i| i.trim().parse().ok()).collect()
            }
        })
        .collect()
}

/// What a path's last node says: a base label, or the tree of the next layer.
fn node_label<'a>(shape: &'a IterTree, path: &[Address]) -> Option<&'a IterTree> {
    let mut tree = shape;
    let (last, init) = path.split_last()?;
    for a in init {
        tree = tree.subtree(a)?.root_label();
        if tree.is_base() {
            return None;
        }
    }
    Some(tree.subtree(last)?.root_label())
}

/// All paths of `shape`, each layer family listed in preorder before the
/// layers below it.
pub fn shape_paths(shape: &IterTree) -> Vec<Path> {
    fn layer(tree: &IterTree, prefix: &mut Path, out: &mut Vec<Path>) {
        let addrs = tree.addresses();
        for a in &addrs {
            prefix.push(a.clone());
            out.push(prefix.clone());
            prefix.pop();
        }
        for a in &addrs {
            let label = tree.subtree(a).expect("own address").root_label();
            if !label.is_base() {
                prefix.push(a.clone());
                layer(label, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    layer(shape, &mut Vec::new(), &mut out);
    out
}

fn with(prefix: &[Address], a: Address) -> Path {
    let mut p = prefix.to_vec();
    p.push(a);
    p
}

// ---- families -------------------------------------------------------------

/// A family of sets indexed by the paths of an iterated tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TFamily {
    base: Base,
    shape: IterTree,
    k: u32,
    sets: BTreeMap<Path, PointSet>,
}

/// Why a family fails to determine a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Undetermined {
    /// Two terminating components with different labels share `point`.
    Conflict {
        point: usize,
        first: (Path, u32),
        second: (Path, u32),
    },
    /// No terminating component contains `point`.
    Uncovered { point: usize },
}

/// Every admissible run of the layered mind-change procedure on one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub runs: Vec<(Path, u32)>,
}

impl Evaluation {
    pub fn labels(&self) -> BTreeSet<u32> {
        self.runs.iter().map(|(_, l)| *l).collect()
    }

    /// The answer if all runs agree.
    pub fn value(&self) -> Option<u32> {
        let ls = self.labels();
        (ls.len() == 1).then(|| *ls.iter().next().unwrap())
    }
}

impl TFamily {
    /// Builds and validates a family. Missing layer roots are filled with
    /// the carrier of their layer; every other path needs a set.
    pub fn new(base: Base, shape: IterTree, k: u32, mut sets: BTreeMap<Path, PointSet>) -> Result<Self, FamilyError> {
        shape.check_arity(k)?;
        let paths = shape_paths(&shape);
        if let Some(p) = sets.keys().find(|p| node_label(&shape, p).is_none()) {
            return Err(FamilyError::InvalidPath(format_path(p)));
        }
        let mut fam = TFamily {
            base,
            shape,
            k,
            sets: BTreeMap::new(),
        };
        // Layers are listed before their sublayers, so parent components
        // are known by the time a root needs filling.
        for p in paths {
            let s = if p.last().unwrap().is_empty() {
                let carrier = fam.layer_carrier(&p);
                *sets.entry(p.clone()).or_insert(carrier)
            } else {
                *sets.get(&p).ok_or_else(|| FamilyError::MissingSet(format_path(&p)))?
            };
            fam.sets.insert(p, s);
        }
        fam.validate()?;
        Ok(fam)
    }

    /// Family over the full base of `space` for a shape of level at most 1,
    /// given the layer-0 sets by address (the root defaults to the space).
    pub fn from_layer0(
        space: Arc<SpaceModel>,
        shape: IterTree,
        k: u32,
        sets: impl IntoIterator<Item = (Address, PointSet)>,
    ) -> Result<Self, FamilyError> {
        let sets = sets.into_iter().map(|(a, s)| (vec![a], s)).collect();
        TFamily::new(Base::new(space), shape, k, sets)
    }

    /// Unvalidated family; callers fill `sets` in [`shape_paths`] order.
    pub(crate) fn raw(base: Base, shape: IterTree, k: u32) -> Self {
        TFamily {
            base,
            shape,
            k,
            sets: BTreeMap::new(),
        }
    }

    pub(crate) fn insert_raw(&mut self, path: Path, s: PointSet) {
        self.sets.insert(path, s);
    }

    /// The family with every set equal to its layer carrier.
    pub fn full(base: Base, shape: IterTree, k: u32) -> Result<Self, FamilyError> {
        let mut fam = TFamily {
            base,
            shape,
            k,
            sets: BTreeMap::new(),
        };
        fam.shape.check_arity(k)?;
        for p in shape_paths(&fam.shape) {
            let c = fam.layer_carrier(&p);
            fam.sets.insert(p, c);
        }
        Ok(fam)
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn space(&self) -> &Arc<SpaceModel> {
        self.base.space()
    }

    pub fn shape(&self) -> &IterTree {
        &self.shape
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn sets(&self) -> &BTreeMap<Path, PointSet> {
        &self.sets
    }

    pub fn set(&self, path: &[Address]) -> Option<PointSet> {
        self.sets.get(path).copied()
    }

    pub fn paths(&self) -> Vec<Path> {
        shape_paths(&self.shape)
    }

    /// `Some(i)` when the path ends at a node labeled by the base label `i`.
    pub fn terminal_label(&self, path: &[Address]) -> Option<u32> {
        match node_label(&self.shape, path)? {
            IterTree::Base(i) => Some(*i),
            _ => None,
        }
    }

    pub fn terminating_paths(&self) -> Vec<Path> {
        self.paths()
            .into_iter()
            .filter(|p| self.terminal_label(p).is_some())
            .collect()
    }

    /// Tree indexing the layer that `path`'s last address belongs to.
    fn layer_tree(&self, path: &[Address]) -> &IterTree {
        let mut tree = &self.shape;
        for a in &path[..path.len() - 1] {
            tree = tree.subtree(a).expect("valid path").root_label();
        }
        tree
    }

    /// Carrier of the layer holding `path`: the component of the parent
    /// path, or the base carrier at layer 0.
    fn layer_carrier(&self, path: &[Address]) -> PointSet {
        match path.len() {
            0 | 1 => self.base.carrier(),
            n => self.component_unchecked(&path[..n - 1]),
        }
    }

    /// Base in which the sets of `path`'s layer live.
    pub fn layer_base(&self, path: &[Address]) -> Result<Base, FamilyError> {
        let layer = path.len().saturating_sub(1);
        let shifted = self.base.shift_base(layer);
        if layer == 0 {
            return Ok(shifted);
        }
        Ok(shifted.restrict_base(self.layer_carrier(path))?)
    }

    /// Union of the sets strictly below `path` within its layer.
    fn below(&self, path: &[Address]) -> PointSet {
        let (last, prefix) = path.split_last().expect("nonempty path");
        let node = self.layer_tree(path).subtree(last).expect("valid path");
        let mut acc = PointSet::EMPTY;
        for a in node.addresses().into_iter().skip(1) {
            let mut full = last.clone();
            full.extend(a);
            acc = acc.union(self.sets[&with(prefix, full)]);
        }
        acc
    }

    fn tilde_unchecked(&self, path: &[Address]) -> PointSet {
        self.sets[path].difference(self.below(path))
    }

    pub(crate) fn component_unchecked(&self, path: &[Address]) -> PointSet {
        (1..=path.len()).fold(self.base.carrier(), |acc, n| {
            acc.intersection(self.tilde_unchecked(&path[..n]))
        })
    }

    /// `Ũ` at `path`: its set minus every set strictly below it in the same
    /// layer.
    pub fn tilde(&self, path: &[Address]) -> Result<PointSet, FamilyError> {
        self.check_path(path)?;
        Ok(self.tilde_unchecked(path))
    }

    /// The nested component at `path`: the intersection of the tilde
    /// components of all its prefixes.
    pub fn component(&self, path: &[Address]) -> Result<PointSet, FamilyError> {
        self.check_path(path)?;
        Ok(self.component_unchecked(path))
    }

    fn check_path(&self, path: &[Address]) -> Result<(), FamilyError> {
        if self.sets.contains_key(path) {
            Ok(())
        } else {
            Err(FamilyError::InvalidPath(format_path(path)))
        }
    }

    /// Checks roots, levels and containment in parent components.
    /// Monotonicity is not required; see [`TFamily::is_monotone`].
    pub fn validate(&self) -> Result<(), FamilyError> {
        let space = self.space().clone();
        for p in self.paths() {
            let s = *self
                .sets
                .get(&p)
                .ok_or_else(|| FamilyError::MissingSet(format_path(&p)))?;
            let carrier = self.layer_carrier(&p);
            if let Some(x) = s.difference(carrier).first() {
                return Err(FamilyError::NotContained {
                    path: format_path(&p),
                    point: space.name(x).to_string(),
                });
            }
            if p.last().unwrap().is_empty() && s != carrier {
                return Err(FamilyError::RootNotCarrier { path: format_path(&p) });
            }
            let level = p.len() - 1;
            let base = self.layer_base(&p)?;
            if !base.level_member(s, 0) {
                let x = s
                    .iter()
                    .find(|&x| !space.up_cone(x).intersection(carrier).is_subset(s))
                    .unwrap_or(0);
                return Err(FamilyError::NotInLevel {
                    path: format_path(&p),
                    level,
                    point: space.name(x).to_string(),
                });
            }
        }
        Ok(())
    }

    /// Each layer family is decreasing along the tree order.
    pub fn is_monotone(&self) -> bool {
        self.paths().iter().all(|p| {
            let (last, prefix) = p.split_last().unwrap();
            last.is_empty() || {
                let parent = with(prefix, last[..last.len() - 1].to_vec());
                self.sets[p].is_subset(self.sets[&parent])
            }
        })
    }

    /// Replaces each set by the union of the sets at and below it in its
    /// layer. Tilde components are unchanged.
    pub fn monotonize(&self) -> TFamily {
        let mut out = self.clone();
        for p in self.paths() {
            let s = self.sets[&p].union(self.below(&p));
            out.sets.insert(p, s);
        }
        out
    }

    /// Monotone with pairwise disjoint siblings in every layer.
    pub fn is_reduced(&self) -> bool {
        self.is_monotone()
            && self.paths().iter().all(|p| {
                let (last, prefix) = p.split_last().unwrap();
                let node = self.layer_tree(p).subtree(last).unwrap();
                let kids: Vec<PointSet> = (0..node.children().len())
                    .map(|i| {
                        let mut a = last.clone();
                        a.push(i);
                        self.sets[&with(prefix, a)]
                    })
                    .collect();
                pairwise_disjoint(&kids)
            })
    }

    /// A reduct: monotonize, then reduce siblings top-down in every layer,
    /// shrinking descendants to their reduced parent, and restrict each
    /// sublayer to the new component of its parent before reducing it.
    pub fn reduce_family(&self) -> Result<TFamily, FamilyError> {
        let mut fam = self.monotonize();
        fam.reduce_layer(&[])?;
        Ok(fam)
    }

    fn reduce_layer(&mut self, prefix: &[Address]) -> Result<(), FamilyError> {
        let root = with(prefix, vec![]);
        let base = self.layer_base(&root)?;
        let tree = self.layer_tree(&root).clone();
        let addrs = tree.addresses();
        for a in &addrs {
            let node = tree.subtree(a).unwrap();
            let kids: Vec<Address> = (0..node.children().len())
                .map(|i| {
                    let mut c = a.clone();
                    c.push(i);
                    c
                })
                .collect();
            if kids.is_empty() {
                continue;
            }
            let parent = self.sets[&with(prefix, a.clone())];
            let cs: Vec<PointSet> = kids.iter().map(|c| self.sets[&with(prefix, c.clone())]).collect();
            let rs = base.reduce_sequence(&cs, 0)?;
            for (c, r) in kids.iter().zip(rs) {
                let r = r.intersection(parent);
                // shrink the whole subtree below c (this layer and deeper)
                let key = with(prefix, c.clone());
                for (p, s) in self.sets.iter_mut() {
                    if p.len() >= key.len() && p[..prefix.len()] == *prefix && p[prefix.len()].starts_with(c) {
                        *s = s.intersection(r);
                    }
                }
            }
        }
        for a in &addrs {
            let label = tree.subtree(a).unwrap().root_label();
            if label.is_base() {
                continue;
            }
            let here = with(prefix, a.clone());
            let comp = self.component_unchecked(&here);
            for (p, s) in self.sets.iter_mut() {
                if p.len() > here.len() && p[..here.len()] == here[..] {
                    *s = s.intersection(comp);
                }
            }
            self.reduce_layer(&here)?;
        }
        Ok(())
    }

    /// All runs of the layered search on `x`: at each layer, every node
    /// whose tilde component holds `x`, descending into non-base labels.
    pub fn evaluate(&self, x: usize) -> Evaluation {
        let mut runs = Vec::new();
        if self.base.carrier().contains(x) {
            self.eval_layer(&[], x, &mut runs);
        }
        Evaluation { runs }
    }

    fn eval_layer(&self, prefix: &[Address], x: usize, runs: &mut Vec<(Path, u32)>) {
        let root = with(prefix, vec![]);
        for a in self.layer_tree(&root).addresses() {
            let p = with(prefix, a);
            if !self.tilde_unchecked(&p).contains(x) {
                continue;
            }
            match self.terminal_label(&p) {
                Some(i) => runs.push((p, i)),
                None => self.eval_layer(&p, x, runs),
            }
        }
    }

    /// The partition determined by the family, or a witnessing point.
    pub fn determine(&self) -> Result<KPartition, Undetermined> {
        let space = self.space().clone();
        let mut values = Vec::with_capacity(space.len());
        for x in 0..space.len() {
            let ev = self.evaluate(x);
            let Some(first) = ev.runs.first().cloned() else {
                return Err(Undetermined::Uncovered { point: x });
            };
            if let Some(second) = ev.runs.iter().find(|r| r.1 != first.1) {
                return Err(Undetermined::Conflict {
                    point: x,
                    first,
                    second: second.clone(),
                });
            }
            values.push(first.1);
        }
        Ok(KPartition {
            space,
            k: self.k,
            values,
        })
    }

    /// Layer-wise preimage along a continuous `f` into this family's space.
    pub fn pullback(&self, f: &SpaceMap) -> Result<TFamily, FamilyError> {
        if **f.codomain() != **self.space() {
            return Err(FamilyError::SpaceMismatch);
        }
        if !f.is_continuous() {
            return Err(FamilyError::NotContinuous);
        }
        let base = Base::new(f.domain().clone())
            .shift_base(self.base.shift())
            .restrict_base(f.preimage(self.base.carrier()))?;
        let sets = self.sets.iter().map(|(p, &s)| (p.clone(), f.preimage(s))).collect();
        TFamily::new(base, self.shape.clone(), self.k, sets)
    }

    /// Same shape over another base with new sets; validated.
    pub fn with_base_and_sets(&self, base: Base, sets: BTreeMap<Path, PointSet>) -> Result<TFamily, FamilyError> {
        TFamily::new(base, self.shape.clone(), self.k, sets)
    }

    /// Same shape over the same base with new sets; validated.
    pub fn with_sets(&self, sets: BTreeMap<Path, PointSet>) -> Result<TFamily, FamilyError> {
        TFamily::new(self.base.clone(), self.shape.clone(), self.k, sets)
    }
}

fn pairwise_disjoint(sets: &[PointSet]) -> bool {
    let mut seen = PointSet::EMPTY;
    sets.iter().all(|&s| {
        let ok = s.is_disjoint(seen);
        seen = seen.union(s);
        ok
    })
}

impl fmt::Display for TFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.shape)?;
        for p in self.paths() {
            writeln!(
                f,
                "{} => {}",
                format_path(&p),
                spaces::format_set(self.space(), self.sets[&p])
            )?;
        }
        Ok(())
    }
}

/// Family file: the shape on the first content line, then `path => set`
/// lines. The family lives over the full base of `space`; `k` defaults to
/// one more than the largest base label.
pub fn parse_family(space: Arc<SpaceModel>, text: &str) -> Result<TFamily, FamilyError> {
    let mut lines = spaces::content_lines(text);
    let (_, first) = lines.next().ok_or_else(|| ferr(1, "empty family file"))?;
    let shape: IterTree = first.parse()?;
    let mut sets = BTreeMap::new();
    let mut k = shape.max_base_label() + 1;
    for (line, l) in lines {
        if let Some(v) = l.strip_prefix("k=") {
            k = v.trim().parse().map_err(|_| ferr(line, "bad k"))?;
            continue;
        }
        let (p, s) = l
            .split_once("=>")
            .ok_or_else(|| ferr(line, format!("expected `path => set`, got `{l}`")))?;
        let path = parse_path(p).ok_or_else(|| ferr(line, format!("bad path `{}`", p.trim())))?;
        let set = spaces::parse_set(&space, s).map_err(|e| match e {
            SpaceError::Parse { msg, .. } => ferr(line, msg),
            other => ferr(line, other.to_string()),
        })?;
        if sets.insert(path, set).is_some() {
            return Err(ferr(line, format!("path `{}` assigned twice", p.trim())));
        }
    }
    TFamily::new(Base::new(space), shape, k, sets)
}
