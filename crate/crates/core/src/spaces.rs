//! Finite space models on which every set-level question is decidable.
//!
//! Both backends are Alexandrov spaces: the open sets are exactly the
//! up-sets of a partial order on at most [`MAX_POINTS`] points.
//!
//! * `FinitePoset` is an arbitrary finite poset.
//! * `Cylinder { alphabet, depth }` is the prefix tree of all strings of
//!   length `<= depth`, ordered by prefix; the open sets are the unions of
//!   cones `[s] = { t : s is a prefix of t }`. The length-`depth` strings are
//!   the leaves. Because the order is a tree, level 0 has the reduction
//!   property here, which fails for general posets.
//!
//! Levels of the Borel base: level 0 is the opens, and from level 1 on every
//! subset is a member (each singleton is a difference of two opens).

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

pub const MAX_POINTS: usize = 128;

/// Subset of the points of a model, as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(u128);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_POINTS);
        if n == MAX_POINTS {
            PointSet(u128::MAX)
        } else {
            PointSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        PointSet(1u128 << p)
    }

    pub fn from_bits(bits: u128) -> Self {
        PointSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, p: usize) -> bool {
        p < MAX_POINTS && self.0 >> p & 1 == 1
    }

    pub fn insert(&mut self, p: usize) {
        self.0 |= 1u128 << p;
    }

    pub fn remove(&mut self, p: usize) {
        self.0 &= !(1u128 << p);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, o: PointSet) -> PointSet {
        PointSet(self.0 | o.0)
    }

    pub fn intersection(self, o: PointSet) -> PointSet {
        PointSet(self.0 & o.0)
    }

    pub fn difference(self, o: PointSet) -> PointSet {
        PointSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: PointSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: PointSet) -> bool {
        self.0 & o.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let p = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(p)
        })
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for p in iter {
            s.insert(p);
        }
        s
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("model has {0} points, the limit is {MAX_POINTS}")]
    TooManyPoints(usize),
    #[error("order is not antisymmetric: {0} and {1}")]
    NotAntisymmetric(String, String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("cylinder needs alphabet 2..=10 and depth >= 1 (got b={0}, d={1})")]
    BadCylinder(u32, u32),
    #[error("set is not open (point `{0}`)")]
    NotOpen(String),
    #[error("set {index} is not in level {level} of the base")]
    NotInLevel { index: usize, level: usize },
    #[error("no reduction at level {level}: the connected piece containing `{point}` lies in no single set")]
    NoReduction {
        level: usize,
        point: String,
        component: Vec<usize>,
    },
    #[error("map is not total: {0}")]
    NotTotal(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    FinitePoset,
    Cylinder { alphabet: u32, depth: u32 },
}

/// A finite Alexandrov space: points with names and the up/down cones of a
/// partial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceModel {
    kind: ModelKind,
    names: Vec<String>,
    up: Vec<PointSet>,
    down: Vec<PointSet>,
}

impl SpaceModel {
    /// Poset from element names and generating pairs `a < b`; the
    /// reflexive-transitive closure is taken and antisymmetry checked.
    pub fn poset<S: AsRef<str>>(names: &[S], less: &[(usize, usize)]) -> Result<Self, SpaceError> {
        let n = names.len();
        if n > MAX_POINTS {
            return Err(SpaceError::TooManyPoints(n));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(SpaceError::DuplicatePoint(a.clone()));
            }
        }
        let mut up: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        for &(a, b) in less {
            up[a].insert(b);
        }
        // transitive closure
        loop {
            let mut changed = false;
            for a in 0..n {
                let mut acc = up[a];
                for b in up[a].iter() {
                    acc = acc.union(up[b]);
                }
                if acc != up[a] {
                    up[a] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for (a, cone) in up.iter().enumerate() {
            for b in cone.iter() {
                if a != b && up[b].contains(a) {
                    return Err(SpaceError::NotAntisymmetric(names[a].clone(), names[b].clone()));
                }
            }
        }
        Ok(Self::from_cones(ModelKind::FinitePoset, names, up))
    }

    /// Sierpinski space: `bot < top`, points 0 and 1.
    pub fn sierpinski() -> Self {
        Self::poset(&["bot", "top"], &[(0, 1)]).unwrap()
    }

    /// Discrete space on `n` points.
    pub fn discrete(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        Self::poset(&names, &[]).unwrap()
    }

    /// Linear order `c0 < c1 < ... < c(n-1)`.
    pub fn linear(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let less: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::poset(&names, &less).unwrap()
    }

    /// Prefix tree of all strings of length `<= depth` over `alphabet`
    /// symbols, points ordered by length then lexicographically.
    pub fn cylinder(alphabet: u32, depth: u32) -> Result<Self, SpaceError> {
        if !(2..=10).contains(&alphabet) || depth == 0 {
            return Err(SpaceError::BadCylinder(alphabet, depth));
        }
        let mut count = 0usize;
        let mut layer = 1usize;
        for _ in 0..=depth {
            count += layer;
            if count > MAX_POINTS {
                return Err(SpaceError::TooManyPoints(count));
            }
            layer *= alphabet as usize;
        }
        let mut strings: Vec<Vec<u8>> = vec![vec![]];
        let mut start = 0;
        for _ in 0..depth {
            let end = strings.len();
            for i in start..end {
                for a in 0..alphabet as u8 {
                    let mut s = strings[i].clone();
                    s.push(a);
                    strings.push(s);
                }
            }
            start = end;
        }
        let names: Vec<String> = strings.iter().map(|s| string_name(s)).collect();
        let n = strings.len();
        let mut up = vec![PointSet::EMPTY; n];
        for (i, s) in strings.iter().enumerate() {
            for (j, t) in strings.iter().enumerate() {
                if t.starts_with(s) {
                    up[i].insert(j);
                }
            }
        }
        Ok(Self::from_cones(ModelKind::Cylinder { alphabet, depth }, names, up))
    }

    fn from_cones(kind: ModelKind, names: Vec<String>, up: Vec<PointSet>) -> Self {
        let n = names.len();
        let mut down = vec![PointSet::EMPTY; n];
        for (a, cone) in up.iter().enumerate() {
            for b in cone.iter() {
                down[b].insert(a);
            }
        }
        SpaceModel { kind, names, up, down }
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn is_cylinder(&self) -> bool {
        matches!(self.kind, ModelKind::Cylinder { .. })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn points(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn name(&self, p: usize) -> &str {
        &self.names[p]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    /// `{ y : x <= y }`
    pub fn up_cone(&self, x: usize) -> PointSet {
        self.up[x]
    }

    /// `{ y : y <= x }`
    pub fn down_cone(&self, x: usize) -> PointSet {
        self.down[x]
    }

    pub fn up_closure(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, p| acc.union(self.up[p]))
    }

    pub fn down_closure(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, p| acc.union(self.down[p]))
    }

    pub fn maximal_points(&self) -> PointSet {
        (0..self.len()).filter(|&p| self.up[p].len() == 1).collect()
    }

    /// String of a cylinder point.
    pub fn string_of(&self, p: usize) -> Option<Vec<u8>> {
        self.is_cylinder()
            .then(|| parse_string_name(&self.names[p]).expect("cylinder name"))
    }

    /// Cylinder point of a string.
    pub fn point_of_string(&self, s: &[u8]) -> Option<usize> {
        if !self.is_cylinder() {
            return None;
        }
        self.index_of(&string_name(s))
    }

    /// Leaves of a cylinder model (strings of full length); for a poset the
    /// maximal points.
    pub fn leaves(&self) -> PointSet {
        match self.kind {
            ModelKind::Cylinder { depth, .. } => (0..self.len())
                .filter(|&p| self.names[p] != "." && self.names[p].len() == depth as usize)
                .collect(),
            ModelKind::FinitePoset => self.maximal_points(),
        }
    }

    /// Up-cone of a cylinder string: all its extensions up to the depth.
    pub fn cone(&self, s: &[u8]) -> Option<PointSet> {
        self.point_of_string(s).map(|p| self.up[p])
    }
}

/// Name of a cylinder string; the empty string is `.`.
pub fn string_name(s: &[u8]) -> String {
    if s.is_empty() {
        ".".to_string()
    } else {
        s.iter().map(|&a| char::from(b'0' + a)).collect()
    }
}

pub fn parse_string_name(name: &str) -> Option<Vec<u8>> {
    if name == "." {
        return Some(vec![]);
    }
    name.bytes().map(|c| c.is_ascii_digit().then(|| c - b'0')).collect()
}

pub fn interior(space: &SpaceModel, s: PointSet) -> PointSet {
    s.iter().filter(|&p| space.up[p].is_subset(s)).collect()
}

pub fn closure(space: &SpaceModel, s: PointSet) -> PointSet {
    space.down_closure(s)
}

pub fn is_open(space: &SpaceModel, s: PointSet) -> bool {
    interior(space, s) == s
}

/// Membership of `s` in level `n` of the Borel base of `space`.
pub fn level_member(space: &SpaceModel, s: PointSet, n: usize) -> bool {
    s.is_subset(space.points()) && (n > 0 || is_open(space, s))
}

/// A level base over a model: the Borel base shifted by `shift` levels and
/// restricted to `carrier`. Level `n` is `{ carrier ∩ S : S in level n + shift }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Base {
    space: Arc<SpaceModel>,
    shift: usize,
    carrier: PointSet,
}

impl Base {
    pub fn new(space: Arc<SpaceModel>) -> Self {
        let carrier = space.points();
        Base {
            space,
            shift: 0,
            carrier,
        }
    }

    pub fn space(&self) -> &Arc<SpaceModel> {
        &self.space
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn carrier(&self) -> PointSet {
        self.carrier
    }

    /// The `m`-shift: level `n` of the result is level `n + m` here.
    pub fn shift_base(&self, m: usize) -> Base {
        Base {
            shift: self.shift + m,
            ..self.clone()
        }
    }

    /// The `u`-restriction; `u` must be in level 0 of this base.
    pub fn restrict_base(&self, u: PointSet) -> Result<Base, SpaceError> {
        if !self.level_member(u, 0) {
            let p = u
                .difference(self.carrier)
                .first()
                .or_else(|| self.relative_open_violation(u))
                .unwrap_or(0);
            return Err(SpaceError::NotOpen(self.space.name(p).to_string()));
        }
        Ok(Base {
            carrier: u,
            ..self.clone()
        })
    }

    // A point of `s` with a carrier point above it that is missing from `s`.
    fn relative_open_violation(&self, s: PointSet) -> Option<usize> {
        s.iter()
            .find(|&p| !self.space.up[p].intersection(self.carrier).is_subset(s))
    }

    /// Whether `n + shift` is a level where every subset is a member.
    pub fn is_saturated(&self, n: usize) -> bool {
        n + self.shift > 0
    }

    pub fn level_member(&self, s: PointSet, n: usize) -> bool {
        s.is_subset(self.carrier) && (self.is_saturated(n) || self.relative_open_violation(s).is_none())
    }

    pub fn reduce_pair(&self, c0: PointSet, c1: PointSet, n: usize) -> Result<(PointSet, PointSet), SpaceError> {
        let r = self.reduce_sequence(&[c0, c1], n)?;
        Ok((r[0], r[1]))
    }

    /// Pairwise disjoint `R_i ⊆ C_i` in level `n` with the same union.
    ///
    /// Saturated levels use pointwise first-index-wins. At an open level a
    /// reduct exists iff every comparability-connected piece of the union
    /// lies inside a single `C_i`; each piece goes to the first such `i`.
    pub fn reduce_sequence(&self, cs: &[PointSet], n: usize) -> Result<Vec<PointSet>, SpaceError> {
        for (index, &c) in cs.iter().enumerate() {
            if !self.level_member(c, n) {
                return Err(SpaceError::NotInLevel { index, level: n });
            }
        }
        let mut out = Vec::with_capacity(cs.len());
        if self.is_saturated(n) {
            let mut taken = PointSet::EMPTY;
            for &c in cs {
                out.push(c.difference(taken));
                taken = taken.union(c);
            }
            return Ok(out);
        }
        out.resize(cs.len(), PointSet::EMPTY);
        let union = cs.iter().fold(PointSet::EMPTY, |a, &c| a.union(c));
        let mut rest = union;
        while let Some(seed) = rest.first() {
            let piece = self.component(union, seed);
            rest = rest.difference(piece);
            match cs.iter().position(|&c| piece.is_subset(c)) {
                Some(i) => out[i] = out[i].union(piece),
                None => {
                    let contested = piece
                        .iter()
                        .find(|&p| cs.iter().filter(|c| c.contains(p)).count() > 1)
                        .unwrap_or(seed);
                    return Err(SpaceError::NoReduction {
                        level: n,
                        point: self.space.name(contested).to_string(),
                        component: piece.iter().collect(),
                    });
                }
            }
        }
        Ok(out)
    }

    // Comparability-connected piece of `within` containing `seed`.
    fn component(&self, within: PointSet, seed: usize) -> PointSet {
        let mut piece = PointSet::singleton(seed);
        let mut frontier = piece;
        while !frontier.is_empty() {
            let mut next = PointSet::EMPTY;
            for p in frontier.iter() {
                next = next.union(self.space.up[p].union(self.space.down[p]));
            }
            let next = next.intersection(within).difference(piece);
            piece = piece.union(next);
            frontier = next;
        }
        piece
    }

    /// Calls `visit` on every level-`n` set `S` with `required ⊆ S ⊆ allowed`
    /// (both intersected with the carrier) in a fixed order, smaller
    /// branches first. Stops early when `visit` breaks.
    pub fn for_each_level_set<B>(
        &self,
        n: usize,
        required: PointSet,
        allowed: PointSet,
        visit: &mut impl FnMut(PointSet) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let allowed = allowed.intersection(self.carrier);
        if !required.is_subset(allowed) {
            return ControlFlow::Continue(());
        }
        if self.is_saturated(n) {
            let free = allowed.difference(required).bits();
            let mut sub: u128 = 0;
            loop {
                visit(PointSet::from_bits(required.bits() | sub))?;
                if sub == free {
                    return ControlFlow::Continue(());
                }
                sub = (sub.wrapping_sub(free)) & free;
            }
        }
        let up_in = |p: usize| self.space.up[p].intersection(self.carrier);
        let required = required.iter().fold(PointSet::EMPTY, |acc, p| acc.union(up_in(p)));
        if !required.is_subset(allowed) {
            return ControlFlow::Continue(());
        }
        let allowed: PointSet = allowed.iter().filter(|&p| up_in(p).is_subset(allowed)).collect();
        self.upsets_rec(required, allowed, visit)
    }

    fn upsets_rec<B>(
        &self,
        chosen: PointSet,
        allowed: PointSet,
        visit: &mut impl FnMut(PointSet) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let undecided = allowed.difference(chosen);
        let Some(x) = undecided.first() else {
            return visit(chosen);
        };
        // exclude x: nothing below x may be chosen
        let below = self.space.down[x];
        self.upsets_rec(chosen, allowed.difference(below), visit)?;
        let up = self.space.up[x].intersection(self.carrier);
        self.upsets_rec(chosen.union(up), allowed, visit)
    }
}

/// Every open set of `space` (its up-sets), in enumeration order.
pub fn open_sets(space: &Arc<SpaceModel>) -> Vec<PointSet> {
    let mut out = Vec::new();
    let base = Base::new(space.clone());
    let _ = base.for_each_level_set::<()>(0, PointSet::EMPTY, space.points(), &mut |s| {
        out.push(s);
        ControlFlow::Continue(())
    });
    out
}

/// A total function between the points of two models.
#[derive(Clone, Debug)]
pub struct SpaceMap {
    domain: Arc<SpaceModel>,
    codomain: Arc<SpaceModel>,
    graph: Vec<usize>,
}

impl SpaceMap {
    pub fn new(domain: Arc<SpaceModel>, codomain: Arc<SpaceModel>, graph: Vec<usize>) -> Result<Self, SpaceError> {
        if graph.len() != domain.len() {
            return Err(SpaceError::NotTotal(format!(
                "{} images for {} points",
                graph.len(),
                domain.len()
            )));
        }
        if let Some(&y) = graph.iter().find(|&&y| y >= codomain.len()) {
            return Err(SpaceError::NotTotal(format!("image index {y} out of range")));
        }
        Ok(SpaceMap {
            domain,
            codomain,
            graph,
        })
    }

    pub fn identity(space: Arc<SpaceModel>) -> Self {
        let graph = (0..space.len()).collect();
        SpaceMap {
            domain: space.clone(),
            codomain: space,
            graph,
        }
    }

    pub fn domain(&self) -> &Arc<SpaceModel> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SpaceModel> {
        &self.codomain
    }

    pub fn graph(&self) -> &[usize] {
        &self.graph
    }

    pub fn apply(&self, x: usize) -> usize {
        self.graph[x]
    }

    pub fn image(&self, s: PointSet) -> PointSet {
        s.iter().map(|x| self.graph[x]).collect()
    }

    pub fn preimage(&self, s: PointSet) -> PointSet {
        (0..self.graph.len()).filter(|&x| s.contains(self.graph[x])).collect()
    }

    pub fn fiber(&self, y: usize) -> PointSet {
        self.preimage(PointSet::singleton(y))
    }

    /// Monotone, and for cylinder-to-cylinder maps also length-preserving
    /// (the map is induced by a prefix-respecting string map).
    pub fn is_continuous(&self) -> bool {
        let monotone = (0..self.domain.len()).all(|x| {
            self.domain
                .up_cone(x)
                .iter()
                .all(|y| self.codomain.leq(self.graph[x], self.graph[y]))
        });
        monotone && (!self.both_cylinders() || self.is_length_preserving())
    }

    fn both_cylinders(&self) -> bool {
        self.domain.is_cylinder() && self.codomain.is_cylinder()
    }

    fn is_length_preserving(&self) -> bool {
        (0..self.domain.len()).all(|x| {
            self.domain.string_of(x).map(|s| s.len()) == self.codomain.string_of(self.graph[x]).map(|s| s.len())
        })
    }

    /// Images of open sets are open; checking principal up-sets suffices.
    pub fn is_open_map(&self) -> bool {
        (0..self.domain.len()).all(|x| is_open(&self.codomain, self.image(self.domain.up_cone(x))))
    }

    pub fn is_surjection(&self) -> bool {
        self.image(self.domain.points()) == self.codomain.points()
    }
}

// ---- text formats -------------------------------------------------------

pub(crate) fn perr(line: usize, msg: impl Into<String>) -> SpaceError {
    SpaceError::Parse { line, msg: msg.into() }
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses `elements: a b c` / `order: a<b b<c` (chains `a<b<c` allowed), or
/// `cylinder: b=2 d=3`.
pub fn parse_space(text: &str) -> Result<SpaceModel, SpaceError> {
    let mut names: Option<Vec<String>> = None;
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    for (line, l) in content_lines(text) {
        if let Some(rest) = l.strip_prefix("cylinder:") {
            let mut b = None;
            let mut d = None;
            for tok in rest.split_whitespace() {
                match tok.split_once('=') {
                    Some(("b", v)) => b = v.parse().ok(),
                    Some(("d", v)) => d = v.parse().ok(),
                    _ => return Err(perr(line, format!("unexpected `{tok}`"))),
                }
            }
            let (Some(b), Some(d)) = (b, d) else {
                return Err(perr(line, "cylinder needs b= and d="));
            };
            return SpaceModel::cylinder(b, d);
        } else if let Some(rest) = l.strip_prefix("elements:") {
            names = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some(rest) = l.strip_prefix("order:") {
            for tok in rest.split_whitespace() {
                let parts: Vec<&str> = tok.split('<').collect();
                if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
                    return Err(perr(line, format!("bad relation `{tok}`")));
                }
                for w in parts.windows(2) {
                    pairs.push((line, w[0].to_string(), w[1].to_string()));
                }
            }
        } else {
            return Err(perr(line, format!("unexpected line `{l}`")));
        }
    }
    let names = names.ok_or_else(|| perr(1, "missing `elements:` line"))?;
    let idx = |line: usize, n: &str| {
        names
            .iter()
            .position(|m| m == n)
            .ok_or_else(|| perr(line, format!("unknown element `{n}`")))
    };
    let mut less = Vec::new();
    for (line, a, b) in &pairs {
        less.push((idx(*line, a)?, idx(*line, b)?));
    }
    SpaceModel::poset(&names, &less)
}

impl fmt::Display for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::Cylinder { alphabet, depth } => {
                writeln!(f, "cylinder: b={alphabet} d={depth}")
            }
            ModelKind::FinitePoset => {
                writeln!(f, "elements: {}", self.names.join(" "))?;
                let mut covers = Vec::new();
                for a in 0..self.len() {
                    for b in self.up[a].iter() {
                        if a == b {
                            continue;
                        }
                        let between = self.up[a]
                            .intersection(self.down[b])
                            .difference(PointSet::singleton(a))
                            .difference(PointSet::singleton(b));
                        if between.is_empty() {
                            covers.push(format!("{}<{}", self.names[a], self.names[b]));
                        }
                    }
                }
                if !covers.is_empty() {
                    writeln!(f, "order: {}", covers.join(" "))?;
                }
                Ok(())
            }
        }
    }
}

/// Inline set syntax: `{a, b}`; an item `[x]` stands for the up-cone of `x`
/// (for cylinders, the cone of all extensions of the string `x`).
pub fn parse_set(space: &SpaceModel, text: &str) -> Result<PointSet, SpaceError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| perr(1, format!("set must be braced: `{t}`")))?;
    let mut s = PointSet::EMPTY;
    for item in inner.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        if let Some(name) = item.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let p = space
                .index_of(name.trim())
                .ok_or_else(|| SpaceError::UnknownPoint(name.to_string()))?;
            s = s.union(space.up_cone(p));
        } else {
            let p = space
                .index_of(item)
                .ok_or_else(|| SpaceError::UnknownPoint(item.to_string()))?;
            s.insert(p);
        }
    }
    Ok(s)
}

/// Prefix-minimal generators of the largest open subset of `s`: the points
/// `g` of `s` with `[g] ⊆ s` that lie above no other such point.
pub fn cone_generators(space: &SpaceModel, s: PointSet) -> Vec<usize> {
    let inner = interior(space, s);
    inner
        .iter()
        .filter(|&p| space.down_cone(p).intersection(inner) == PointSet::singleton(p))
        .collect()
}

/// Canonical inline form. Posets list points; cylinders list cone
/// generators `[s]` first, then any leftover points.
pub fn format_set(space: &SpaceModel, s: PointSet) -> String {
    let items: Vec<String> = if space.is_cylinder() {
        let gens = cone_generators(space, s);
        let covered = space.up_closure(gens.iter().copied().collect());
        gens.iter()
            .map(|&g| format!("[{}]", space.name(g)))
            .chain(s.difference(covered).iter().map(|p| space.name(p).to_string()))
            .collect()
    } else {
        s.iter().map(|p| space.name(p).to_string()).collect()
    };
    format!("{{{}}}", items.join(", "))
}

/// Cylinder set file: one generator string per line (cone), or `=s` for the
/// single point `s`. `.` is the empty string.
pub fn parse_generator_lines(space: &SpaceModel, text: &str) -> Result<PointSet, SpaceError> {
    let mut s = PointSet::EMPTY;
    for (line, l) in content_lines(text) {
        let (single, name) = match l.strip_prefix('=') {
            Some(r) => (true, r.trim()),
            None => (false, l),
        };
        let p = space
            .index_of(name)
            .ok_or_else(|| perr(line, format!("unknown point `{name}`")))?;
        s = s.union(if single {
            PointSet::singleton(p)
        } else {
            space.up_cone(p)
        });
    }
    Ok(s)
}

pub fn format_generator_lines(space: &SpaceModel, s: PointSet) -> String {
    let gens = cone_generators(space, s);
    let covered = space.up_closure(gens.iter().copied().collect());
    let mut out = String::new();
    for g in gens {
        out.push_str(space.name(g));
        out.push('\n');
    }
    for p in s.difference(covered).iter() {
        out.push('=');
        out.push_str(space.name(p));
        out.push('\n');
    }
    out
}

/// Map file: `a->x` lines, one per domain point.
pub fn parse_map(domain: Arc<SpaceModel>, codomain: Arc<SpaceModel>, text: &str) -> Result<SpaceMap, SpaceError> {
    let mut graph: Vec<Option<usize>> = vec![None; domain.len()];
    for (line, l) in content_lines(text) {
        let (a, b) = l
            .split_once("->")
            .ok_or_else(|| perr(line, format!("expected `a->x`, got `{l}`")))?;
        let x = domain
            .index_of(a.trim())
            .ok_or_else(|| perr(line, format!("unknown domain point `{}`", a.trim())))?;
        let y = codomain
            .index_of(b.trim())
            .ok_or_else(|| perr(line, format!("unknown codomain point `{}`", b.trim())))?;
        if graph[x].replace(y).is_some() {
            return Err(perr(line, format!("`{}` mapped twice", a.trim())));
        }
    }
    let graph: Vec<usize> = graph
        .iter()
        .enumerate()
        .map(|(x, y)| y.ok_or_else(|| SpaceError::NotTotal(format!("no image for `{}`", domain.name(x)))))
        .collect::<Result<_, _>>()?;
    SpaceMap::new(domain, codomain, graph)
}

pub fn format_map(f: &SpaceMap) -> String {
    let mut out = String::new();
    for (x, &y) in f.graph.iter().enumerate() {
        out.push_str(&format!("{}->{}\n", f.domain.name(x), f.codomain.name(y)));
    }
    out
}

/// Name-to-index table, handy for callers building sets by name.
pub fn name_index(space: &SpaceModel) -> HashMap<&str, usize> {
    space.names().iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}
