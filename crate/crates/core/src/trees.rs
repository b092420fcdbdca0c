//! Iterated labeled trees and the h-preorder.
//!
//! An [`IterTree`] is either a base label `i < k` or a node carrying a label
//! (itself an `IterTree`) and an ordered list of children. Viewed as a tree,
//! `Base(i)` is the one-node tree labeled `i`; this is the singleton
//! identification that makes the levels nest. Child order is syntactic only:
//! every semantic operation here is invariant under permuting children.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Node address inside a single tree: child indices from the root.
pub type Address = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IterTree {
    Base(u32),
    Node {
        label: Box<IterTree>,
        children: Vec<IterTree>,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("dual is only defined for k = 2 (got k = {0})")]
    DualArity(u32),
    #[error("base label {label} out of range for k = {k}")]
    LabelOutOfRange { label: u32, k: u32 },
    #[error("fragment is not of the dual-pair chain shape: trees {a} and {b} {reason}")]
    NotLinear { a: usize, b: usize, reason: String },
}

impl IterTree {
    pub fn base(i: u32) -> Self {
        IterTree::Base(i)
    }

    pub fn node(label: IterTree, children: Vec<IterTree>) -> Self {
        IterTree::Node {
            label: Box::new(label),
            children,
        }
    }

    /// Path tree labeled `labels[0]` at the root, `labels[1]` below, and so on.
    pub fn chain(labels: &[u32]) -> Self {
        assert!(!labels.is_empty(), "chain needs at least one label");
        let mut t = IterTree::Base(*labels.last().unwrap());
        for &l in labels.iter().rev().skip(1) {
            t = IterTree::node(IterTree::Base(l), vec![t]);
        }
        t
    }

    /// Chain of length `len` whose labels alternate between 0 and 1.
    pub fn alternating_chain(start: u32, len: usize) -> Self {
        let labels: Vec<u32> = (0..len).map(|i| (start + i as u32) % 2).collect();
        IterTree::chain(&labels)
    }

    /// Label of the root when this value is viewed as a tree.
    pub fn root_label(&self) -> &IterTree {
        match self {
            IterTree::Base(_) => self,
            IterTree::Node { label, .. } => label,
        }
    }

    pub fn children(&self) -> &[IterTree] {
        match self {
            IterTree::Base(_) => &[],
            IterTree::Node { children, .. } => children,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, IterTree::Base(_))
    }

    /// The base label this value is equivalent to under the singleton
    /// identification, if any (`Base(i)`, `node(i)`, `node(node(i))`, ...).
    pub fn as_base_label(&self) -> Option<u32> {
        match self {
            IterTree::Base(i) => Some(*i),
            IterTree::Node { label, children } if children.is_empty() => label.as_base_label(),
            _ => None,
        }
    }

    pub fn subtree(&self, addr: &[usize]) -> Option<&IterTree> {
        let mut t = self;
        for &i in addr {
            t = t.children().get(i)?;
        }
        Some(t)
    }

    /// All node addresses in preorder.
    pub fn addresses(&self) -> Vec<Address> {
        fn go(t: &IterTree, cur: &mut Address, out: &mut Vec<Address>) {
            out.push(cur.clone());
            for (i, c) in t.children().iter().enumerate() {
                cur.push(i);
                go(c, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Number of nodes of the top-level tree (labels not counted).
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(IterTree::node_count).sum::<usize>()
    }

    /// Edges on the longest root-to-leaf path of the top-level tree.
    pub fn height(&self) -> usize {
        self.children().iter().map(|c| 1 + c.height()).max().unwrap_or(0)
    }

    pub fn max_branching(&self) -> usize {
        let own = self.children().len();
        self.children()
            .iter()
            .map(IterTree::max_branching)
            .max()
            .map_or(own, |m| m.max(own))
    }

    /// Largest base label occurring anywhere, including inside labels.
    pub fn max_base_label(&self) -> u32 {
        match self {
            IterTree::Base(i) => *i,
            IterTree::Node { label, children } => children
                .iter()
                .map(IterTree::max_base_label)
                .fold(label.max_base_label(), u32::max),
        }
    }

    pub fn check_arity(&self, k: u32) -> Result<(), TreeError> {
        let m = self.max_base_label();
        if m >= k {
            return Err(TreeError::LabelOutOfRange { label: m, k });
        }
        Ok(())
    }

    /// Children sorted recursively and singleton-base nodes collapsed to
    /// `Base`. Two trees with equal canonical forms are h-equivalent.
    pub fn canonical(&self) -> IterTree {
        if let Some(i) = self.as_base_label() {
            return IterTree::Base(i);
        }
        let IterTree::Node { label, children } = self else {
            unreachable!()
        };
        let mut cs: Vec<IterTree> = children.iter().map(IterTree::canonical).collect();
        cs.sort();
        IterTree::node(label.canonical(), cs)
    }
}

/// Least `n` with `t` in level `n` under the singleton identification.
pub fn iter_level(t: &IterTree) -> usize {
    if t.as_base_label().is_some() {
        return 0;
    }
    fn max_label_level(t: &IterTree) -> usize {
        t.children()
            .iter()
            .map(max_label_level)
            .fold(iter_level(t.root_label()), usize::max)
    }
    1 + max_label_level(t)
}

/// Singleton tree labeled `t`.
pub fn s_embed(t: &IterTree) -> IterTree {
    IterTree::node(t.clone(), vec![])
}

/// Swaps base labels 0 and 1 everywhere.
pub fn dual(t: &IterTree, k: u32) -> Result<IterTree, TreeError> {
    if k != 2 {
        return Err(TreeError::DualArity(k));
    }
    t.check_arity(2)?;
    fn go(t: &IterTree) -> IterTree {
        match t {
            IterTree::Base(i) => IterTree::Base(1 - i),
            IterTree::Node { label, children } => IterTree::node(go(label), children.iter().map(go).collect()),
        }
    }
    Ok(go(t))
}

/// A monotone, label-respecting map between the top-level trees of two
/// `IterTree`s, as pairs of node addresses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HWitness {
    pub map: BTreeMap<Address, Address>,
}

/// Decision procedure for the h-preorder with a cache of label comparisons
/// keyed by canonical forms. Reuse one comparator across many queries.
#[derive(Default)]
pub struct HComparator {
    cache: HashMap<(IterTree, IterTree), bool>,
}

struct Flat<'a> {
    labels: Vec<&'a IterTree>,
    children: Vec<Vec<usize>>,
    addrs: Vec<Address>,
}

fn flatten(t: &IterTree) -> Flat<'_> {
    let mut f = Flat {
        labels: Vec::new(),
        children: Vec::new(),
        addrs: Vec::new(),
    };
    fn go<'a>(t: &'a IterTree, addr: &mut Address, f: &mut Flat<'a>) -> usize {
        let id = f.labels.len();
        f.labels.push(t.root_label());
        f.children.push(Vec::new());
        f.addrs.push(addr.clone());
        for (i, c) in t.children().iter().enumerate() {
            addr.push(i);
            let cid = go(c, addr, f);
            addr.pop();
            f.children[id].push(cid);
        }
        id
    }
    go(t, &mut Vec::new(), &mut f);
    f
}

impl HComparator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leq(&mut self, t: &IterTree, s: &IterTree) -> bool {
        if let (IterTree::Base(i), IterTree::Base(j)) = (t, s) {
            return i == j;
        }
        let key = (t.canonical(), s.canonical());
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let v = self.leq_with_witness(t, s).is_some();
        self.cache.insert(key, v);
        v
    }

    pub fn equiv(&mut self, t: &IterTree, s: &IterTree) -> bool {
        self.leq(t, s) && self.leq(s, t)
    }

    /// `Some(witness)` iff `t <=_h s`.
    pub fn leq_with_witness(&mut self, t: &IterTree, s: &IterTree) -> Option<HWitness> {
        if let (IterTree::Base(i), IterTree::Base(j)) = (t, s) {
            return (i == j).then(|| HWitness {
                map: BTreeMap::from([(vec![], vec![])]),
            });
        }
        let ft = flatten(t);
        let fs = flatten(s);
        let (nt, ns) = (ft.labels.len(), fs.labels.len());
        // Preorder ids: children have larger ids than parents, so reverse
        // order is a valid bottom-up schedule.
        let label_ok: Vec<Vec<bool>> = ft
            .labels
            .iter()
            .map(|lx| fs.labels.iter().map(|ly| self.leq(lx, ly)).collect())
            .collect();
        // at[x][y]: subtree of x maps into subtree of y with x -> y.
        // emb[x][y]: subtree of x maps somewhere into subtree of y.
        let mut at = vec![vec![false; ns]; nt];
        let mut emb = vec![vec![false; ns]; nt];
        for x in (0..nt).rev() {
            for y in (0..ns).rev() {
                at[x][y] = label_ok[x][y] && ft.children[x].iter().all(|&c| emb[c][y]);
                emb[x][y] = at[x][y] || fs.children[y].iter().any(|&y2| emb[x][y2]);
            }
        }
        if !emb[0][0] {
            return None;
        }
        let mut map = BTreeMap::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((x, mut y)) = stack.pop() {
            while !at[x][y] {
                y = *fs.children[y]
                    .iter()
                    .find(|&&y2| emb[x][y2])
                    .expect("emb implies a witnessing child");
            }
            map.insert(ft.addrs[x].clone(), fs.addrs[y].clone());
            for &c in &ft.children[x] {
                stack.push((c, y));
            }
        }
        Some(HWitness { map })
    }
}

/// `(t <=_h s, witness)` with a fresh comparator.
pub fn h_leq(t: &IterTree, s: &IterTree) -> (bool, Option<HWitness>) {
    let w = HComparator::new().leq_with_witness(t, s);
    (w.is_some(), w)
}

/// Checks a witness against the definition: total on `t`, prefix-monotone,
/// and label-respecting (labels compared with `cmp`).
pub fn check_witness(t: &IterTree, s: &IterTree, w: &HWitness, cmp: &mut HComparator) -> bool {
    let addrs = t.addresses();
    if addrs.len() != w.map.len() {
        return false;
    }
    for a in &addrs {
        let Some(fa) = w.map.get(a) else { return false };
        let (Some(ta), Some(sb)) = (t.subtree(a), s.subtree(fa)) else {
            return false;
        };
        if !cmp.leq(ta.root_label(), sb.root_label()) {
            return false;
        }
        if let Some((_, parent)) = a.split_last() {
            let fp = &w.map[parent];
            if !fa.starts_with(fp) {
                return false;
            }
        }
    }
    true
}

pub const MAX_ENUM_LEVEL: usize = 2;
pub const MAX_ENUM_NODES: usize = 6;
pub const MAX_ENUM_COUNT: usize = 2_000_000;

/// All trees of the given level with at most `max_nodes` nodes in every
/// layer, one representative per child permutation. Level-1 and level-2
/// results are in node form (no `Base` shorthand), sorted.
pub fn enumerate_trees(k: u32, level: usize, max_nodes: usize) -> Result<Vec<IterTree>, TreeError> {
    if level > MAX_ENUM_LEVEL || max_nodes > MAX_ENUM_NODES {
        return Err(TreeError::BudgetExceeded(format!(
            "level {level} / max_nodes {max_nodes} exceeds level <= {MAX_ENUM_LEVEL}, nodes <= {MAX_ENUM_NODES}"
        )));
    }
    if level == 0 {
        return Ok((0..k).map(IterTree::Base).collect());
    }
    let labels = enumerate_trees(k, level - 1, max_nodes)?;
    trees_over_labels(&labels, max_nodes, MAX_ENUM_COUNT)
}

/// Unordered trees with `1..=max_nodes` nodes labeled from `labels`.
pub fn trees_over_labels(labels: &[IterTree], max_nodes: usize, max_count: usize) -> Result<Vec<IterTree>, TreeError> {
    // by_size[n]: canonical (children sorted) trees with exactly n nodes
    let mut by_size: Vec<Vec<IterTree>> = vec![Vec::new(); max_nodes + 1];
    let mut total = 0usize;
    for n in 1..=max_nodes {
        let items: Vec<(usize, &IterTree)> = (1..n).flat_map(|s| by_size[s].iter().map(move |t| (s, t))).collect();
        let mut forests: Vec<Vec<IterTree>> = Vec::new();
        multisets(&items, n - 1, items.len(), &mut Vec::new(), &mut forests, max_count)?;
        let mut out = Vec::new();
        for l in labels {
            for f in &forests {
                let mut cs = f.clone();
                cs.sort();
                out.push(IterTree::node(l.clone(), cs));
                total += 1;
                if total > max_count {
                    return Err(TreeError::BudgetExceeded(format!("more than {max_count} trees")));
                }
            }
        }
        out.sort();
        out.dedup();
        by_size[n] = out;
    }
    let mut all: Vec<IterTree> = by_size.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

fn multisets(
    items: &[(usize, &IterTree)],
    remaining: usize,
    upto: usize,
    cur: &mut Vec<IterTree>,
    out: &mut Vec<Vec<IterTree>>,
    max_count: usize,
) -> Result<(), TreeError> {
    if remaining == 0 {
        out.push(cur.clone());
        if out.len() > max_count {
            return Err(TreeError::BudgetExceeded(format!("more than {max_count} forests")));
        }
        return Ok(());
    }
    for i in (0..upto).rev() {
        let (size, t) = items[i];
        if size <= remaining {
            cur.push(t.clone());
            multisets(items, remaining - size, i + 1, cur, out, max_count)?;
            cur.pop();
        }
    }
    Ok(())
}

/// One h-equivalence class of a linearized fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedClass {
    pub rank: usize,
    /// Indices into the input list.
    pub members: Vec<usize>,
}

/// Groups `ts` into h-equivalence classes and ranks them, checking that
/// the fragment has the shape "ascending ranks, each holding at most one
/// dual pair of mutually incomparable classes". Classes are sorted by rank,
/// then by smallest member index.
pub fn linearize(ts: &[IterTree]) -> Result<Vec<RankedClass>, TreeError> {
    for t in ts {
        t.check_arity(2)?;
    }
    let mut cmp = HComparator::new();
    let mut class_of: Vec<usize> = Vec::with_capacity(ts.len());
    let mut reps: Vec<usize> = Vec::new();
    for (i, t) in ts.iter().enumerate() {
        match reps.iter().position(|&r| cmp.equiv(&ts[r], t)) {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(reps.len());
                reps.push(i);
            }
        }
    }
    let n = reps.len();
    let mut below = vec![vec![false; n]; n]; // below[a][b]: a <_h b
    for a in 0..n {
        for b in 0..n {
            below[a][b] = a != b && cmp.leq(&ts[reps[a]], &ts[reps[b]]);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if !below[a][b] && !below[b][a] {
                let da = dual(&ts[reps[a]], 2)?;
                if !cmp.equiv(&da, &ts[reps[b]]) {
                    return Err(TreeError::NotLinear {
                        a: reps[a],
                        b: reps[b],
                        reason: "are incomparable but not dual".into(),
                    });
                }
            }
        }
    }
    // rank = length of the longest strict chain below
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&a| (0..n).filter(|&b| below[b][a]).count());
    let mut rank = vec![0usize; n];
    for &a in &order {
        rank[a] = (0..n).filter(|&b| below[b][a]).map(|b| rank[b] + 1).max().unwrap_or(0);
    }
    for a in 0..n {
        for b in a + 1..n {
            let comparable = below[a][b] || below[b][a];
            if comparable == (rank[a] == rank[b]) {
                return Err(TreeError::NotLinear {
                    a: reps[a],
                    b: reps[b],
                    reason: "break the rank structure".into(),
                });
            }
        }
    }
    let mut classes: Vec<RankedClass> = (0..n)
        .map(|c| RankedClass {
            rank: rank[c],
            members: (0..ts.len()).filter(|&i| class_of[i] == c).collect(),
        })
        .collect();
    classes.sort_by_key(|c| (c.rank, c.members[0]));
    Ok(classes)
}

impl fmt::Display for IterTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IterTree::Base(i) => write!(f, "{i}"),
            IterTree::Node { label, children } => {
                write!(f, "node({label}")?;
                if !children.is_empty() {
                    f.write_str("; ")?;
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{c}")?;
                    }
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for IterTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = TreeParser {
            src: s.as_bytes(),
            pos: 0,
        };
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

struct TreeParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TreeParser<'_> {
    fn error(&self, msg: &str) -> TreeError {
        TreeError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), TreeError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn tree(&mut self) -> Result<IterTree, TreeError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                text.parse()
                    .map(IterTree::Base)
                    .map_err(|_| self.error("label too large"))
            }
            Some(b'n') => {
                if !self.src[self.pos..].starts_with(b"node") {
                    return Err(self.error("expected `node`"));
                }
                self.pos += 4;
                self.expect(b'(')?;
                let label = self.tree()?;
                let mut children = Vec::new();
                if self.peek() == Some(b';') {
                    self.pos += 1;
                    if self.peek() != Some(b')') {
                        children.push(self.tree()?);
                        while self.peek() == Some(b',') {
                            self.pos += 1;
                            children.push(self.tree()?);
                        }
                    }
                }
                self.expect(b')')?;
                Ok(IterTree::node(label, children))
            }
            _ => Err(self.error("expected a label or `node(`")),
        }
    }
}

/// All labeled trees reachable by permuting children, deduplicated. Test
/// helper for permutation invariance.
pub fn child_permutations(t: &IterTree, limit: usize) -> Vec<IterTree> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    fn perms(t: &IterTree) -> Vec<IterTree> {
        match t {
            IterTree::Base(_) => vec![t.clone()],
            IterTree::Node { label, children } => {
                let mut acc: Vec<Vec<IterTree>> = vec![vec![]];
                for c in children {
                    let cps = perms(c);
                    let mut next = Vec::new();
                    for prefix in &acc {
                        for cp in &cps {
                            // insert cp at every position
                            for pos in 0..=prefix.len() {
                                let mut v = prefix.clone();
                                v.insert(pos, cp.clone());
                                next.push(v);
                            }
                        }
                    }
                    acc = next;
                }
                acc.into_iter()
                    .map(|cs| IterTree::node((**label).clone(), cs))
                    .collect()
            }
        }
    }
    for p in perms(t) {
        if out.len() >= limit {
            break;
        }
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}
