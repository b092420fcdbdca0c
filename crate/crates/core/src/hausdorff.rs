//! From a mind-change machine to a tree family determining its limit.
//!
//! A machine answers queries `M^σ(i)` within a step budget. The extraction
//! builds the sequence `R₀, R₁, …` of strings where the committed value
//! changes, the labeled tree generated by them, and the family of cones
//! `U_τ = [τ]` over a cylinder model. The partition this family determines
//! is the limit of the machine's guesses.
//!
//! Two readings are fixed here. A query `M^σ(i)` may be answered once `i`
//! symbols have been read; the guess-table adapter answers it with the guess
//! made after reading `σ[..i]`. A change for `τ ∈ R_{n+1}` above
//! `σ ∈ R_n` is looked for at indices `i_σ < i ≤ |τ|`, so a change first
//! visible on the last symbol of `τ` is still caught.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::families::{FamilyError, KPartition, TFamily};
use crate::spaces::{self, ModelKind, PointSet, SpaceError, SpaceModel};
use crate::trees::{Address, IterTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HausdorffError {
    #[error("machine still changes its value beyond depth {depth} along `{string}`")]
    NotStabilized { depth: u32, string: String },
    #[error("machine is inconsistent at `{string}` for query {index}")]
    Inconsistent { string: String, index: usize },
    #[error("machine never answers along `{0}`")]
    Undefined(String),
    #[error("tree reaches depth {tree} but the model has depth {model}")]
    DepthOverflow { tree: usize, model: u32 },
    #[error("value {value} at `{string}` is not below k = {k}")]
    ValueOutOfRange { string: String, value: u32, k: u32 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// A machine computing a k-partition in the limit.
pub trait MindChangeMachine {
    fn k(&self) -> u32;
    fn alphabet(&self) -> u32;
    fn depth(&self) -> u32;
    /// Whether `M^σ(i)` stops within `steps` steps, and with which value.
    /// Once defined, the answer must persist for all extensions of `σ` and
    /// all larger budgets.
    fn query(&self, sigma: &[u8], i: usize, steps: usize) -> Option<u32>;
}

/// A guess for every string of length at most `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessTable {
    k: u32,
    space: Arc<SpaceModel>,
    values: Vec<u32>,
}

impl GuessTable {
    pub fn new(k: u32, alphabet: u32, depth: u32, g: impl Fn(&[u8]) -> u32) -> Result<Self, HausdorffError> {
        let space = Arc::new(SpaceModel::cylinder(alphabet, depth)?);
        let values: Vec<u32> = (0..space.len()).map(|p| g(&space.string_of(p).unwrap())).collect();
        if let Some(p) = (0..space.len()).find(|&p| values[p] >= k) {
            return Err(HausdorffError::ValueOutOfRange {
                string: space.name(p).to_string(),
                value: values[p],
                k,
            });
        }
        Ok(GuessTable { k, space, values })
    }

    /// Uniformly random guesses.
    pub fn random(k: u32, alphabet: u32, depth: u32, rng: &mut impl Rng) -> Result<Self, HausdorffError> {
        let space = SpaceModel::cylinder(alphabet, depth)?;
        let values: Vec<u32> = (0..space.len()).map(|_| rng.gen_range(0..k)).collect();
        GuessTable::new(k, alphabet, depth, |s| values[space.point_of_string(s).unwrap()])
    }

    pub fn space(&self) -> &Arc<SpaceModel> {
        &self.space
    }

    /// Guess after reading `s`; strings past the depth keep the last guess.
    pub fn guess(&self, s: &[u8]) -> u32 {
        let d = self.depth() as usize;
        let s = &s[..s.len().min(d)];
        self.values[self.space.point_of_string(s).expect("string over the alphabet")]
    }

    /// The guess table as a machine.
    pub fn machine(&self) -> GuessMachine<'_> {
        GuessMachine { table: self }
    }
}

fn cylinder_params(space: &SpaceModel) -> (u32, u32) {
    match space.kind() {
        ModelKind::Cylinder { alphabet, depth } => (*alphabet, *depth),
        ModelKind::FinitePoset => unreachable!("guess tables live on cylinders"),
    }
}

impl GuessTable {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn alphabet(&self) -> u32 {
        cylinder_params(&self.space).0
    }

    pub fn depth(&self) -> u32 {
        cylinder_params(&self.space).1
    }
}

/// `M^σ(i)` halts within `s` steps iff `i ≤ min(|σ|, s)`, answering the
/// guess made after `i` symbols.
#[derive(Clone, Copy, Debug)]
pub struct GuessMachine<'a> {
    table: &'a GuessTable,
}

impl MindChangeMachine for GuessMachine<'_> {
    fn k(&self) -> u32 {
        self.table.k
    }

    fn alphabet(&self) -> u32 {
        self.table.alphabet()
    }

    fn depth(&self) -> u32 {
        self.table.depth()
    }

    fn query(&self, sigma: &[u8], i: usize, steps: usize) -> Option<u32> {
        (i <= sigma.len().min(steps)).then(|| self.table.guess(&sigma[..i]))
    }
}

/// A machine given by a closure, for machines not backed by a table.
pub struct FnMachine<F> {
    pub k: u32,
    pub alphabet: u32,
    pub depth: u32,
    pub f: F,
}

impl<F: Fn(&[u8], usize, usize) -> Option<u32>> MindChangeMachine for FnMachine<F> {
    fn k(&self) -> u32 {
        self.k
    }

    fn alphabet(&self) -> u32 {
        self.alphabet
    }

    fn depth(&self) -> u32 {
        self.depth
    }

    fn query(&self, sigma: &[u8], i: usize, steps: usize) -> Option<u32> {
        (self.f)(sigma, i, steps)
    }
}

/// A string where the committed value is (re)established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commitment {
    pub string: Vec<u8>,
    /// `i_σ`: the query index that changed.
    pub index: usize,
    /// `v_σ = M^σ(i_σ)`.
    pub value: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSequence {
    pub levels: Vec<Vec<Commitment>>,
}

impl RSequence {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// The deepest commitment below `s` and its level.
    pub fn last_commitment(&self, s: &[u8]) -> Option<(usize, &Commitment)> {
        self.levels
            .iter()
            .enumerate()
            .rev()
            .find_map(|(n, level)| level.iter().find(|c| s.starts_with(&c.string)).map(|c| (n, c)))
    }
}

fn extensions(alphabet: u32, s: &[u8]) -> impl Iterator<Item = Vec<u8>> + '_ {
    (0..alphabet as u8).map(move |a| {
        let mut t = s.to_vec();
        t.push(a);
        t
    })
}

/// First index in `(after, |τ|]` where `M^τ` answers something other than
/// `value` within `|τ|` steps.
fn change_at(m: &impl MindChangeMachine, tau: &[u8], after: usize, value: u32) -> Option<(usize, u32)> {
    (after + 1..=tau.len()).find_map(|i| m.query(tau, i, tau.len()).filter(|&v| v != value).map(|v| (i, v)))
}

/// Builds `R₀, R₁, …` for a machine stabilizing within its depth.
pub fn build_r_sequence(m: &impl MindChangeMachine) -> Result<RSequence, HausdorffError> {
    let d = m.depth() as usize;
    check_consistency(m)?;
    // R₀: minimal strings where M^σ(0) answers within |σ| steps.
    let mut r0 = Vec::new();
    let mut frontier = vec![Vec::new()];
    while let Some(s) = frontier.pop() {
        match m.query(&s, 0, s.len()) {
            Some(v) => r0.push(Commitment {
                string: s,
                index: 0,
                value: v,
            }),
            None if s.len() < d => frontier.extend(extensions(m.alphabet(), &s)),
            None => return Err(HausdorffError::Undefined(spaces::string_name(&s))),
        }
    }
    r0.sort_by(|a, b| (a.string.len(), &a.string).cmp(&(b.string.len(), &b.string)));
    let mut levels = vec![r0];
    loop {
        let mut next = Vec::new();
        for c in levels.last().unwrap() {
            let mut frontier: Vec<Vec<u8>> = extensions(m.alphabet(), &c.string).collect();
            while let Some(t) = frontier.pop() {
                if t.len() > d {
                    // a change beyond the depth means the machine has not
                    // stabilized within the model
                    if change_at(m, &t, c.index, c.value).is_some() {
                        return Err(HausdorffError::NotStabilized {
                            depth: m.depth(),
                            string: spaces::string_name(&t),
                        });
                    }
                    continue;
                }
                match change_at(m, &t, c.index, c.value) {
                    Some((index, value)) => next.push(Commitment {
                        string: t,
                        index,
                        value,
                    }),
                    None => frontier.extend(extensions(m.alphabet(), &t)),
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by(|a, b| (a.string.len(), &a.string).cmp(&(b.string.len(), &b.string)));
        levels.push(next);
    }
    Ok(RSequence { levels })
}

/// Answers persist along extensions and larger budgets, and stay below `k`.
fn check_consistency(m: &impl MindChangeMachine) -> Result<(), HausdorffError> {
    let d = m.depth() as usize;
    let mut stack = vec![Vec::new()];
    while let Some(s) = stack.pop() {
        for i in 0..=s.len() {
            let Some(v) = m.query(&s, i, s.len()) else { continue };
            if v >= m.k() {
                return Err(HausdorffError::ValueOutOfRange {
                    string: spaces::string_name(&s),
                    value: v,
                    k: m.k(),
                });
            }
            let later = extensions(m.alphabet(), &s)
                .map(|t| m.query(&t, i, t.len()))
                .chain(std::iter::once(m.query(&s, i, s.len() + 1)));
            for w in later {
                if w != Some(v) {
                    return Err(HausdorffError::Inconsistent {
                        string: spaces::string_name(&s),
                        index: i,
                    });
                }
            }
        }
        if s.len() < d {
            stack.extend(extensions(m.alphabet(), &s));
        }
    }
    Ok(())
}

/// The prefix closure of `∪R_n` with its labeling: each string takes the
/// value of the deepest commitment below it, or 0 when there is none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledStringTree {
    pub labels: BTreeMap<Vec<u8>, u32>,
}

pub fn build_labeled_tree(r: &RSequence) -> LabeledStringTree {
    let mut labels = BTreeMap::new();
    for c in r.levels.iter().flatten() {
        for n in 0..=c.string.len() {
            let s = &c.string[..n];
            if !labels.contains_key(s) {
                let v = r.last_commitment(s).map_or(0, |(_, c)| c.value);
                labels.insert(s.to_vec(), v);
            }
        }
    }
    LabeledStringTree { labels }
}

impl LabeledStringTree {
    pub fn depth(&self) -> usize {
        self.labels.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// The tree as an `IterTree` with children in symbol order, plus the
    /// address of every string.
    pub fn to_iter_tree(&self) -> (IterTree, BTreeMap<Vec<u8>, Address>) {
        fn go(
            t: &LabeledStringTree,
            s: &mut Vec<u8>,
            addr: &mut Address,
            addrs: &mut BTreeMap<Vec<u8>, Address>,
        ) -> IterTree {
            addrs.insert(s.clone(), addr.clone());
            let kids: Vec<u8> = t
                .labels
                .range(s.clone()..)
                .map(|(k, _)| k)
                .take_while(|k| k.starts_with(s))
                .filter(|k| k.len() == s.len() + 1)
                .map(|k| k[s.len()])
                .collect();
            let mut children = Vec::new();
            for (i, a) in kids.into_iter().enumerate() {
                s.push(a);
                addr.push(i);
                children.push(go(t, s, addr, addrs));
                addr.pop();
                s.pop();
            }
            let label = t.labels[&s[..]];
            if children.is_empty() {
                IterTree::Base(label)
            } else {
                IterTree::node(IterTree::Base(label), children)
            }
        }
        let mut addrs = BTreeMap::new();
        let t = go(self, &mut Vec::new(), &mut Vec::new(), &mut addrs);
        (t, addrs)
    }
}

/// The family of cones `U_τ = [τ]` over the cylinder model.
pub fn build_family(tree: &LabeledStringTree, k: u32, model: Arc<SpaceModel>) -> Result<TFamily, HausdorffError> {
    let (_, depth) = match model.kind() {
        ModelKind::Cylinder { alphabet, depth } => (*alphabet, *depth),
        ModelKind::FinitePoset => {
            return Err(HausdorffError::DepthOverflow {
                tree: tree.depth(),
                model: 0,
            })
        }
    };
    if tree.depth() > depth as usize {
        return Err(HausdorffError::DepthOverflow {
            tree: tree.depth(),
            model: depth,
        });
    }
    let (shape, addrs) = tree.to_iter_tree();
    let sets: Vec<(Address, PointSet)> = addrs
        .iter()
        .map(|(s, a)| {
            let cone = model
                .cone(s)
                .ok_or_else(|| SpaceError::UnknownPoint(spaces::string_name(s)))?;
            Ok((a.clone(), cone))
        })
        .collect::<Result<_, SpaceError>>()?;
    Ok(TFamily::from_layer0(model, shape, k, sets)?)
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub r: RSequence,
    pub labeled: LabeledStringTree,
    pub tree: IterTree,
    pub family: TFamily,
    pub partition: KPartition,
}

/// The whole pipeline: R-sequence, labeled tree, cone family, and the
/// partition it determines.
pub fn hausdorff_extract(m: &impl MindChangeMachine) -> Result<Extraction, HausdorffError> {
    let r = build_r_sequence(m)?;
    let labeled = build_labeled_tree(&r);
    let model = Arc::new(SpaceModel::cylinder(m.alphabet(), m.depth())?);
    let family = build_family(&labeled, m.k(), model)?;
    let partition = family
        .determine()
        .expect("cone families over a prefix-closed tree are reduced");
    let tree = family.shape().clone();
    Ok(Extraction {
        r,
        labeled,
        tree,
        family,
        partition,
    })
}

/// `λx. lim_n M^x(n)`: the last answer each point gives within its length.
pub fn limit_partition(m: &impl MindChangeMachine) -> Result<KPartition, HausdorffError> {
    let model = Arc::new(SpaceModel::cylinder(m.alphabet(), m.depth())?);
    let values = (0..model.len())
        .map(|p| {
            let s = model.string_of(p).unwrap();
            (0..=s.len())
                .rev()
                .find_map(|i| m.query(&s, i, s.len()))
                .ok_or_else(|| HausdorffError::Undefined(spaces::string_name(&s)))
        })
        .collect::<Result<Vec<u32>, _>>()?;
    Ok(KPartition::new(model, m.k(), values)?)
}

/// Largest number of value changes along any branch of a guess table.
pub fn max_mind_changes(table: &GuessTable) -> usize {
    let space = table.space();
    space
        .leaves()
        .iter()
        .map(|p| {
            let s = space.string_of(p).unwrap();
            (1..=s.len())
                .filter(|&n| table.guess(&s[..n]) != table.guess(&s[..n - 1]))
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// Guess-table file: a `k= b= d=` header, then `σ value` lines for every
/// string of length at most `d` (`.` is the empty string).
pub fn parse_guess_table(text: &str) -> Result<GuessTable, HausdorffError> {
    let perr = |line: usize, msg: String| HausdorffError::Parse { line, msg };
    let mut lines = spaces::content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty guess table".into()))?;
    let (mut k, mut b, mut d) = (None, None, None);
    for tok in header.split_whitespace() {
        let (key, v) = tok
            .split_once('=')
            .ok_or_else(|| perr(hl, format!("unexpected `{tok}` in header")))?;
        let v: u32 = v.parse().map_err(|_| perr(hl, format!("bad number in `{tok}`")))?;
        match key {
            "k" => k = Some(v),
            "b" => b = Some(v),
            "d" => d = Some(v),
            _ => return Err(perr(hl, format!("unknown header key `{key}`"))),
        }
    }
    let (Some(k), Some(b), Some(d)) = (k, b, d) else {
        return Err(perr(hl, "header needs k=, b= and d=".into()));
    };
    let space = SpaceModel::cylinder(b, d)?;
    let mut values: Vec<Option<u32>> = vec![None; space.len()];
    for (line, l) in lines {
        let mut it = l.split_whitespace();
        let (Some(s), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(perr(line, format!("expected `string value`, got `{l}`")));
        };
        let p = space
            .index_of(s)
            .ok_or_else(|| perr(line, format!("`{s}` is not a string of the model")))?;
        let v: u32 = v.parse().map_err(|_| perr(line, format!("bad value `{v}`")))?;
        if values[p].replace(v).is_some() {
            return Err(perr(line, format!("`{s}` listed twice")));
        }
    }
    if let Some(p) = values.iter().position(Option::is_none) {
        return Err(perr(0, format!("no guess for `{}`", space.name(p))));
    }
    GuessTable::new(k, b, d, |s| values[space.point_of_string(s).unwrap()].unwrap())
}

impl fmt::Display for GuessTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k={} b={} d={}", self.k, self.alphabet(), self.depth())?;
        for (p, v) in self.values.iter().enumerate() {
            writeln!(f, "{} {}", self.space.name(p), v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_change() -> GuessTable {
        // 2 once the first symbol 0 and a second symbol are read, else 1
        GuessTable::new(3, 2, 3, |s| if s.len() >= 2 && s[0] == 0 { 2 } else { 1 }).unwrap()
    }

    #[test]
    fn constant_machine_gives_singleton() {
        let g = GuessTable::new(2, 2, 3, |_| 1).unwrap();
        let m = g.machine();
        let r = build_r_sequence(&m).unwrap();
        assert_eq!(r.levels.len(), 1);
        assert_eq!(r.levels[0][0].string, Vec::<u8>::new());
        let e = hausdorff_extract(&m).unwrap();
        assert_eq!(e.tree, IterTree::Base(1));
        assert!(e.partition.values().iter().all(|&v| v == 1));
    }

    #[test]
    fn one_change_machine() {
        let g = one_change();
        let m = g.machine();
        let r = build_r_sequence(&m).unwrap();
        assert_eq!(r.levels.len(), 2);
        let r1: Vec<&[u8]> = r.levels[1].iter().map(|c| c.string.as_slice()).collect();
        assert_eq!(r1, vec![&[0u8, 0][..], &[0, 1][..]]);
        assert!(r.levels[1].iter().all(|c| c.value == 2 && c.index == 2));
        let e = hausdorff_extract(&m).unwrap();
        assert_eq!(e.partition, limit_partition(&m).unwrap());
        assert_eq!(e.labeled.labels[&vec![0u8]], 1);
        assert_eq!(max_mind_changes(&g), 1);
    }

    #[test]
    fn inconsistent_machine_is_rejected() {
        let m = FnMachine {
            k: 2,
            alphabet: 2,
            depth: 2,
            f: |s: &[u8], i: usize, steps: usize| (i <= s.len().min(steps)).then_some((s.len() % 2) as u32),
        };
        assert!(matches!(build_r_sequence(&m), Err(HausdorffError::Inconsistent { .. })));
    }

    #[test]
    fn late_change_is_not_stabilized() {
        // the guess flips at every step, forever
        let m = FnMachine {
            k: 2,
            alphabet: 2,
            depth: 2,
            f: |s: &[u8], i: usize, steps: usize| (i <= s.len().min(steps)).then_some((i % 2) as u32),
        };
        assert!(matches!(
            build_r_sequence(&m),
            Err(HausdorffError::NotStabilized { .. })
        ));
    }

    #[test]
    fn table_format_round_trips() {
        let g = one_change();
        assert_eq!(parse_guess_table(&g.to_string()).unwrap(), g);
    }
}
