//! Independent oracles shared by the integration tests. Each one works from
//! the definitions by brute force and uses the library only for data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use fine_hierarchy::families::{shape_paths, KPartition, Path, TFamily};
use fine_hierarchy::ordinals::Ordinal;
use fine_hierarchy::spaces::{Base, PointSet, SpaceMap, SpaceModel};
use fine_hierarchy::trees::{Address, IterTree};
use num_traits::ToPrimitive;
use rand::Rng;

// ---- h-preorder by enumeration of maps ---------------------------------

#[derive(Clone, Debug)]
enum Lab {
    Atom(u32),
    Tree(IterTree),
}

fn lab_of(l: &IterTree) -> Lab {
    match l {
        IterTree::Base(i) => Lab::Atom(*i),
        IterTree::Node { label, children } if children.is_empty() => lab_of(label),
        t => Lab::Tree(t.clone()),
    }
}

fn lab_tree(l: &Lab) -> IterTree {
    match l {
        Lab::Atom(i) => IterTree::Base(*i),
        Lab::Tree(t) => t.clone(),
    }
}

fn lab_leq(a: &Lab, b: &Lab) -> bool {
    match (a, b) {
        (Lab::Atom(i), Lab::Atom(j)) => i == j,
        _ => brute_h_leq(&lab_tree(a), &lab_tree(b)),
    }
}

/// Nodes of the top-level tree with their labels, a single-node tree for a
/// base label.
fn brute_nodes(t: &IterTree) -> Vec<(Vec<usize>, Lab)> {
    fn go(t: &IterTree, addr: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Lab)>) {
        match t {
            IterTree::Base(i) => out.push((addr.clone(), Lab::Atom(*i))),
            IterTree::Node { label, children } => {
                out.push((addr.clone(), lab_of(label)));
                for (i, c) in children.iter().enumerate() {
                    addr.push(i);
                    go(c, addr, out);
                    addr.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// `t ≤_h s`: tries every map from the nodes of `t` to the nodes of `s` and
/// keeps those that are prefix-monotone and label-respecting.
pub fn brute_h_leq(t: &IterTree, s: &IterTree) -> bool {
    let tn = brute_nodes(t);
    let sn = brute_nodes(s);
    let total = sn.len().pow(tn.len() as u32);
    'maps: for code in 0..total {
        let mut c = code;
        let f: Vec<usize> = (0..tn.len())
            .map(|_| {
                let v = c % sn.len();
                c /= sn.len();
                v
            })
            .collect();
        for (x, (ax, lx)) in tn.iter().enumerate() {
            if !lab_leq(lx, &sn[f[x]].1) {
                continue 'maps;
            }
            for (y, (ay, _)) in tn.iter().enumerate() {
                if ay.starts_with(ax) && !sn[f[y]].0.starts_with(&sn[f[x]].0) {
                    continue 'maps;
                }
            }
        }
        return true;
    }
    false
}

/// Level-1 trees over labels `0..k` with at most `max_nodes` nodes, listed
/// as ordered trees and deduplicated up to sibling order.
pub fn brute_level1_trees(k: u32, max_nodes: usize) -> Vec<IterTree> {
    // Ordered forests by size, then canonicalized by sorting children.
    fn trees(k: u32, n: usize) -> Vec<IterTree> {
        let mut out = Vec::new();
        for l in 0..k {
            for f in forests(k, n - 1) {
                out.push(IterTree::node(IterTree::Base(l), f));
            }
        }
        out
    }
    fn forests(k: u32, n: usize) -> Vec<Vec<IterTree>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in 1..=n {
            for t in trees(k, first) {
                for rest in forests(k, n - first) {
                    let mut f = vec![t.clone()];
                    f.extend(rest);
                    out.push(f);
                }
            }
        }
        out
    }
    fn canon(t: &IterTree) -> IterTree {
        let mut cs: Vec<IterTree> = t.children().iter().map(canon).collect();
        cs.sort();
        IterTree::node(t.root_label().clone(), cs)
    }
    let set: BTreeSet<IterTree> = (1..=max_nodes).flat_map(|n| trees(k, n)).map(|t| canon(&t)).collect();
    set.into_iter().collect()
}

// ---- ordinals as ordered sums of blocks --------------------------------

/// An ordinal below ω^ω as the ordered sum `ω^b[0] + ω^b[1] + ...` of
/// blocks (not necessarily in normal form).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks(pub Vec<u32>);

impl Blocks {
    pub fn from_digits(a: u32, b: u32, c: u32) -> Self {
        let mut v = vec![2; a as usize];
        v.extend(std::iter::repeat_n(1, b as usize));
        v.extend(std::iter::repeat_n(0, c as usize));
        Blocks(v)
    }

    /// Order type of the concatenated well-order: a block is swallowed by
    /// any later block of larger exponent.
    pub fn normal(&self) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        let mut max_right = 0;
        for &e in self.0.iter().rev() {
            if e >= max_right {
                out.push(e);
                max_right = e;
            }
        }
        out.reverse();
        out
    }

    /// Disjoint ordered union.
    pub fn add(&self, o: &Blocks) -> Blocks {
        let mut v = self.0.clone();
        v.extend(&o.0);
        Blocks(v)
    }

    /// `o` copies of `self`, ordered by the `o` coordinate first. A block
    /// ω^f of `o` with f ≥ 1 indexes ω^f copies, whose supremum is
    /// ω^(deg(self) + f).
    pub fn mul(&self, o: &Blocks) -> Blocks {
        let n = self.normal();
        let Some(&deg) = n.first() else {
            return Blocks(vec![]);
        };
        let mut v = Vec::new();
        for &f in &o.0 {
            if f == 0 {
                v.extend(&self.0);
            } else {
                v.push(deg + f);
            }
        }
        Blocks(v)
    }

    /// Comparison of order types: initial-segment embedding on normal forms.
    pub fn cmp_type(&self, o: &Blocks) -> std::cmp::Ordering {
        self.normal().cmp(&o.normal())
    }
}

/// Blocks of a library ordinal with finite exponents.
pub fn blocks_of(a: &Ordinal) -> Blocks {
    let mut v = Vec::new();
    for t in a.terms() {
        let e = t.exponent.to_u64().expect("finite exponent") as u32;
        let c = t.coefficient.to_u64().expect("small coefficient");
        v.extend(std::iter::repeat_n(e, c as usize));
    }
    Blocks(v)
}

// ---- finite posets ------------------------------------------------------

/// A finite partial order as a reflexive relation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poset {
    pub n: usize,
    pub leq: Vec<Vec<bool>>,
}

impl Poset {
    pub fn model(&self) -> Arc<SpaceModel> {
        let names: Vec<String> = (0..self.n).map(|i| format!("p{i}")).collect();
        let mut less = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if a != b && self.leq[a][b] {
                    less.push((a, b));
                }
            }
        }
        Arc::new(SpaceModel::poset(&names, &less).expect("valid poset"))
    }

    fn code_under(&self, perm: &[usize]) -> u64 {
        let mut code = 0u64;
        for a in 0..self.n {
            for b in 0..self.n {
                code = code << 1 | u64::from(self.leq[perm[a]][perm[b]]);
            }
        }
        code
    }

    /// Up-sets, by checking every subset.
    pub fn up_sets(&self) -> Vec<PointSet> {
        (0u128..1 << self.n)
            .map(PointSet::from_bits)
            .filter(|s| s.iter().all(|a| (0..self.n).all(|b| !self.leq[a][b] || s.contains(b))))
            .collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// All posets on `n` points up to isomorphism.
pub fn posets(n: usize) -> Vec<Poset> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        let mut c = code;
        for &(a, b) in &pairs {
            match c % 3 {
                1 => leq[a][b] = true,
                2 => leq[b][a] = true,
                _ => {}
            }
            c /= 3;
        }
        let transitive = (0..n).all(|a| (0..n).all(|b| (0..n).all(|d| !(leq[a][b] && leq[b][d]) || leq[a][d])));
        if !transitive {
            continue;
        }
        let p = Poset { n, leq };
        let canon = perms.iter().map(|q| p.code_under(q)).min().unwrap();
        if seen.insert(canon) {
            out.push(p);
        }
    }
    out
}

/// Every poset with 1..=max points, up to isomorphism.
pub fn small_posets(max: usize) -> Vec<Poset> {
    (1..=max).flat_map(posets).collect()
}

/// Monotone open surjections `x → y`, by filtering all maps.
pub fn open_surjections(x: &Poset, y: &Poset) -> Vec<Vec<usize>> {
    let ups = x.up_sets();
    let ys = y.up_sets();
    let mut out = Vec::new();
    for code in 0..y.n.pow(x.n as u32) {
        let mut c = code;
        let g: Vec<usize> = (0..x.n)
            .map(|_| {
                let v = c % y.n;
                c /= y.n;
                v
            })
            .collect();
        let onto = (0..y.n).all(|b| g.contains(&b));
        let monotone = (0..x.n).all(|a| (0..x.n).all(|b| !x.leq[a][b] || y.leq[g[a]][g[b]]));
        let open = ups.iter().all(|u| {
            let img = u
                .iter()
                .fold(PointSet::EMPTY, |acc, a| acc.union(PointSet::singleton(g[a])));
            ys.contains(&img)
        });
        if onto && monotone && open {
            out.push(g);
        }
    }
    out
}

/// One instance of the exhaustive map suite.
pub struct MapInstance {
    pub x: Poset,
    pub y: Poset,
    pub map: SpaceMap,
}

pub fn map_instances(max_points: usize) -> Vec<MapInstance> {
    let ps = small_posets(max_points);
    let mut out = Vec::new();
    for x in &ps {
        let xm = x.model();
        for y in &ps {
            if y.n > x.n {
                continue;
            }
            let ym = y.model();
            for g in open_surjections(x, y) {
                let map = SpaceMap::new(xm.clone(), ym.clone(), g).expect("total map");
                out.push(MapInstance {
                    x: x.clone(),
                    y: y.clone(),
                    map,
                });
            }
        }
    }
    out
}

// ---- Baire category from the subspace topology -------------------------

/// Whether `t` is nowhere dense in the subspace `f` of `x`: the subspace
/// closure of `t` contains no nonempty subspace-open set.
pub fn brute_nowhere_dense(x: &Poset, f: PointSet, t: PointSet) -> bool {
    let opens: BTreeSet<PointSet> = x.up_sets().into_iter().map(|u| u.intersection(f)).collect();
    let interior = |s: PointSet| {
        opens
            .iter()
            .filter(|o| o.is_subset(s))
            .fold(PointSet::EMPTY, |acc, &o| acc.union(o))
    };
    let closure = f.difference(interior(f.difference(t)));
    interior(closure).is_empty()
}

/// `f[S]` from the definition: the codomain points whose fiber meets `s`
/// in a set that is not meagre (in a finite space, not nowhere dense).
pub fn brute_category_image(x: &Poset, y: &Poset, g: &[usize], s: PointSet) -> PointSet {
    let mut out = PointSet::EMPTY;
    for b in 0..y.n {
        let fiber = PointSet::from_bits((0..x.n).filter(|&a| g[a] == b).fold(0, |acc, a| acc | 1 << a));
        if !brute_nowhere_dense(x, fiber, s.intersection(fiber)) {
            out.insert(b);
        }
    }
    out
}

// ---- families -----------------------------------------------------------

/// Tilde components recomputed from the raw sets: the set at a path minus
/// every set strictly below it in the same layer.
pub fn oracle_tilde(sets: &BTreeMap<Path, PointSet>, path: &[Address]) -> PointSet {
    let (last, prefix) = path.split_last().unwrap();
    let mut below = PointSet::EMPTY;
    for (q, &s) in sets {
        if q.len() == path.len() && q[..q.len() - 1] == *prefix {
            let ql = q.last().unwrap();
            if ql.len() > last.len() && ql.starts_with(last) {
                below = below.union(s);
            }
        }
    }
    sets[path].difference(below)
}

/// Nested component: intersection of the tilde components of all prefixes.
pub fn oracle_component(sets: &BTreeMap<Path, PointSet>, carrier: PointSet, path: &[Address]) -> PointSet {
    (1..=path.len()).fold(carrier, |acc, n| acc.intersection(oracle_tilde(sets, &path[..n])))
}

/// Parent of a non-root path inside its layer.
pub fn layer_parent(path: &[Address]) -> Path {
    let mut p = path.to_vec();
    p.last_mut().unwrap().pop();
    p
}

/// A random monotone family: layer-0 sets are random open sets shrinking
/// down the tree, deeper layers random subsets of their parent sets.
pub fn random_monotone_family(
    rng: &mut impl Rng,
    space: &Arc<SpaceModel>,
    opens: &[PointSet],
    shape: &IterTree,
    k: u32,
) -> TFamily {
    let carrier = space.points();
    let mut sets: BTreeMap<Path, PointSet> = BTreeMap::new();
    for p in shape_paths(shape) {
        let s = if p.last().unwrap().is_empty() {
            if p.len() == 1 {
                carrier
            } else {
                oracle_component(&sets, carrier, &p[..p.len() - 1])
            }
        } else {
            let parent = sets[&layer_parent(&p)];
            match rng.gen_range(0..6) {
                0 => parent,
                1 => PointSet::EMPTY,
                _ if p.len() == 1 => opens[rng.gen_range(0..opens.len())].intersection(parent),
                _ => PointSet::from_bits(rng.gen::<u128>()).intersection(parent),
            }
        };
        sets.insert(p, s);
    }
    TFamily::new(Base::new(space.clone()), shape.clone(), k, sets).expect("generated family is valid")
}

/// Up-sets of any model, by checking every subset (at most 16 points).
pub fn brute_up_sets(space: &SpaceModel) -> Vec<PointSet> {
    let n = space.len();
    assert!(n <= 16, "too many points to enumerate subsets");
    (0u128..1 << n)
        .map(PointSet::from_bits)
        .filter(|s| s.iter().all(|a| (0..n).all(|b| !space.leq(a, b) || s.contains(b))))
        .collect()
}

/// Membership of `a` in Σ(X, T) for a level-1 `t`, by trying every monotone
/// assignment of open sets to the non-root nodes.
pub fn brute_level1_member(a: &KPartition, t: &IterTree) -> bool {
    let space = a.space().clone();
    let opens = brute_up_sets(&space);
    let addrs: Vec<Address> = t.addresses().into_iter().filter(|x| !x.is_empty()).collect();
    let total = opens.len().pow(addrs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut chosen: BTreeMap<Address, PointSet> = BTreeMap::new();
        chosen.insert(vec![], space.points());
        let mut monotone = true;
        for addr in &addrs {
            let s = opens[c % opens.len()];
            c /= opens.len();
            let parent = &addr[..addr.len() - 1];
            if !s.is_subset(chosen[parent]) {
                monotone = false;
                break;
            }
            chosen.insert(addr.clone(), s);
        }
        if !monotone {
            continue;
        }
        let fam = TFamily::from_layer0(
            space.clone(),
            t.clone(),
            a.k(),
            chosen.into_iter().filter(|(x, _)| !x.is_empty()),
        )
        .expect("valid family");
        if fam.determine().is_ok_and(|b| b == *a) {
            return true;
        }
    }
    false
}

/// The cylinder model labeled by `a`, as a level-1 tree over strings.
pub fn labeled_cylinder_tree(a: &KPartition) -> IterTree {
    let space = a.space();
    fn go(space: &SpaceModel, a: &KPartition, s: &mut Vec<u8>, b: u8) -> IterTree {
        let p = space.point_of_string(s).unwrap();
        let mut children = Vec::new();
        for sym in 0..b {
            s.push(sym);
            if space.point_of_string(s).is_some() {
                children.push(go(space, a, s, b));
            }
            s.pop();
        }
        IterTree::node(IterTree::Base(a.value(p)), children)
    }
    let b = match space.kind() {
        fine_hierarchy::spaces::ModelKind::Cylinder { alphabet, .. } => *alphabet as u8,
        _ => panic!("cylinder model expected"),
    };
    go(space, a, &mut Vec::new(), b)
}
