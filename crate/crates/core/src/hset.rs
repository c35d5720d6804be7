//! Hereditarily finite sets over the points of `M`.
//!
//! An [`HSet`] is always in canonical form: members are pairwise distinct and
//! sorted, atoms first (by index), then sets by the length of their canonical
//! text and then bytewise. Because of that, structural equality is
//! extensional equality, and the canonical text `A3`, `{}`, `{A0,{}}` is an
//! injective name for each value.
//!
//! Set nodes are reference counted and carry their canonical text, so clones
//! are cheap and comparisons never recurse.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gset::{GSet, HSetGSet};

/// Default bound on the number of points `power_object` may create.
pub const POWER_OBJECT_LIMIT: usize = 1 << 16;

/// The `n` of `M_n`: 0 is the atom level, `n ≥ 1` are elements of `P^n(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelTag(pub usize);

impl From<usize> for LevelTag {
    fn from(n: usize) -> Self {
        LevelTag(n)
    }
}

/// A raw, possibly non-canonical set tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HTree {
    Atom(usize),
    Set(Vec<HTree>),
}

/// A canonical hereditarily finite set over atoms `0..|M|`.
#[derive(Clone)]
pub struct HSet(Node);

#[derive(Clone)]
enum Node {
    Atom(usize),
    Set(Arc<SetNode>),
}

struct SetNode {
    members: Vec<HSet>,
    text: String,
}

impl HSet {
    pub fn atom(i: usize) -> Self {
        HSet(Node::Atom(i))
    }

    pub fn empty() -> Self {
        Self::from_sorted(Vec::new())
    }

    pub fn singleton(h: HSet) -> Self {
        Self::from_sorted(vec![h])
    }

    /// The set of the given members, deduplicated and sorted.
    pub fn from_members(members: impl IntoIterator<Item = HSet>) -> Self {
        let mut members: Vec<HSet> = members.into_iter().collect();
        members.sort();
        members.dedup();
        Self::from_sorted(members)
    }

    fn from_sorted(members: Vec<HSet>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        let mut text = String::with_capacity(2 + members.len() * 4);
        text.push('{');
        for (i, m) in members.iter().enumerate() {
            if i > 0 {
                text.push(',');
            }
            m.write_text(&mut text);
        }
        text.push('}');
        HSet(Node::Set(Arc::new(SetNode { members, text })))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.0, Node::Atom(_))
    }

    pub fn atom_index(&self) -> Option<usize> {
        match self.0 {
            Node::Atom(i) => Some(i),
            Node::Set(_) => None,
        }
    }

    /// Members in canonical order; empty for atoms.
    pub fn members(&self) -> &[HSet] {
        match &self.0 {
            Node::Atom(_) => &[],
            Node::Set(node) => &node.members,
        }
    }

    pub fn contains(&self, h: &HSet) -> bool {
        self.members().binary_search(h).is_ok()
    }

    fn write_text(&self, out: &mut String) {
        match &self.0 {
            Node::Atom(i) => {
                out.push('A');
                out.push_str(&i.to_string());
            }
            Node::Set(node) => out.push_str(&node.text),
        }
    }

    /// Canonical text: `A<i>` for atoms, `{m1,m2,...}` for sets.
    pub fn canonical_text(&self) -> Cow<'_, str> {
        match &self.0 {
            Node::Atom(i) => Cow::Owned(format!("A{i}")),
            Node::Set(node) => Cow::Borrowed(&node.text),
        }
    }

    /// Canonical text as bytes.
    pub fn canonical_serialize(&self) -> Vec<u8> {
        self.canonical_text().into_owned().into_bytes()
    }

    /// Parses canonical (or any well-formed) text and canonicalizes it.
    pub fn parse(text: &str) -> Result<HSet> {
        let mut parser = Parser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        let tree = parser.item(0)?;
        if parser.pos != parser.bytes.len() {
            return Err(Error::Input(format!(
                "trailing input at byte {} of HSet text",
                parser.pos
            )));
        }
        Ok(canonicalize(&tree))
    }

    pub fn to_tree(&self) -> HTree {
        match &self.0 {
            Node::Atom(i) => HTree::Atom(*i),
            Node::Set(node) => HTree::Set(node.members.iter().map(HSet::to_tree).collect()),
        }
    }

    /// Whether `self` is an element of `M_n` (or an atom when `n = 0`).
    pub fn has_level(&self, level: impl Into<LevelTag>) -> bool {
        let LevelTag(n) = level.into();
        match &self.0 {
            Node::Atom(_) => n == 0,
            Node::Set(node) => n >= 1 && node.members.iter().all(|m| m.has_level(n - 1)),
        }
    }

    /// True iff every atom occurring in `self` is below `m`.
    pub fn atoms_below(&self, m: usize) -> bool {
        match &self.0 {
            Node::Atom(i) => *i < m,
            Node::Set(node) => node.members.iter().all(|x| x.atoms_below(m)),
        }
    }

    /// Relabels every atom `i` as `f[i]` and renormalizes.
    ///
    /// Panics if an atom is out of range for `f`.
    pub fn apply_bijection(&self, f: &[usize]) -> HSet {
        match &self.0 {
            Node::Atom(i) => HSet::atom(f[*i]),
            Node::Set(node) => {
                HSet::from_members(node.members.iter().map(|m| m.apply_bijection(f)))
            }
        }
    }

    /// The action of group element `g` through its action on the points of `m`.
    pub fn act(&self, g: usize, m: &GSet) -> HSet {
        self.apply_bijection(m.perm(g))
    }

    /// Kuratowski pair `{{a},{a,b}}`.
    pub fn kuratowski_pair(a: &HSet, b: &HSet) -> HSet {
        HSet::from_members([
            HSet::singleton(a.clone()),
            HSet::from_members([a.clone(), b.clone()]),
        ])
    }

    /// `k`-fold singleton `{...{h}...}`.
    pub fn wrap_singletons(&self, k: usize) -> HSet {
        (0..k).fold(self.clone(), |h, _| HSet::singleton(h))
    }

    /// Number of nodes (atoms and sets) in the tree.
    pub fn node_count(&self) -> usize {
        1 + self.members().iter().map(HSet::node_count).sum::<usize>()
    }
}

impl PartialEq for HSet {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Node::Atom(a), Node::Atom(b)) => a == b,
            (Node::Set(a), Node::Set(b)) => Arc::ptr_eq(a, b) || a.text == b.text,
            _ => false,
        }
    }
}

impl Eq for HSet {}

impl Hash for HSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Node::Atom(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            Node::Set(node) => {
                1u8.hash(state);
                node.text.hash(state);
            }
        }
    }
}

impl Ord for HSet {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Node::Atom(a), Node::Atom(b)) => a.cmp(b),
            (Node::Atom(_), Node::Set(_)) => Ordering::Less,
            (Node::Set(_), Node::Atom(_)) => Ordering::Greater,
            (Node::Set(a), Node::Set(b)) => a
                .text
                .len()
                .cmp(&b.text.len())
                .then_with(|| a.text.as_bytes().cmp(b.text.as_bytes())),
        }
    }
}

impl PartialOrd for HSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

impl fmt::Debug for HSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

/// JSON form: an atom is an integer, a set is an array in canonical order.
impl Serialize for HSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.0 {
            Node::Atom(i) => serializer.serialize_u64(*i as u64),
            Node::Set(node) => serializer.collect_seq(node.members.iter()),
        }
    }
}

impl<'de> Deserialize<'de> for HSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        HTree::deserialize(deserializer).map(|t| canonicalize(&t))
    }
}

/// Extensional normal form of a raw tree. Idempotent.
pub fn canonicalize(tree: &HTree) -> HSet {
    match tree {
        HTree::Atom(i) => HSet::atom(*i),
        HTree::Set(members) => HSet::from_members(members.iter().map(canonicalize)),
    }
}

const MAX_PARSE_DEPTH: usize = 512;

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn item(&mut self, depth: usize) -> Result<HTree> {
        if depth > MAX_PARSE_DEPTH {
            return Err(Error::Input("HSet text nested too deeply".into()));
        }
        match self.bytes.get(self.pos) {
            Some(b'A') => {
                self.pos += 1;
                let start = self.pos;
                while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                let index = digits.parse::<usize>().map_err(|_| {
                    Error::Input(format!("bad atom index at byte {start} of HSet text"))
                })?;
                Ok(HTree::Atom(index))
            }
            Some(b'{') => {
                self.pos += 1;
                let mut members = Vec::new();
                if self.bytes.get(self.pos) == Some(&b'}') {
                    self.pos += 1;
                    return Ok(HTree::Set(members));
                }
                loop {
                    members.push(self.item(depth + 1)?);
                    match self.bytes.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok(HTree::Set(members));
                        }
                        _ => {
                            return Err(Error::Input(format!(
                                "expected ',' or '}}' at byte {} of HSet text",
                                self.pos
                            )))
                        }
                    }
                }
            }
            _ => Err(Error::Input(format!(
                "expected 'A' or '{{' at byte {} of HSet text",
                self.pos
            ))),
        }
    }
}

/// `P(Y)`: all subsets of `Y`'s points with the elementwise action.
///
/// Points are listed in canonical order. Fails with a capacity error when
/// `2^|Y|` exceeds `limit`.
pub fn power_object(y: &HSetGSet, limit: usize) -> Result<HSetGSet> {
    let size = y.points().len();
    if size >= 63 || (1usize << size) > limit {
        return Err(Error::capacity(
            "power_object point count",
            limit,
            format!("2^{size}"),
        ));
    }
    let count = 1usize << size;
    let subset = |mask: usize| {
        HSet::from_members(
            (0..size)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| y.points()[i].clone()),
        )
    };
    let mut by_mask: Vec<(HSet, usize)> = (0..count).map(|mask| (subset(mask), mask)).collect();
    by_mask.sort_by(|a, b| a.0.cmp(&b.0));
    let mut position = vec![0usize; count];
    for (pos, (_, mask)) in by_mask.iter().enumerate() {
        position[*mask] = pos;
    }
    let group = y.gset().group_arc();
    let action: Vec<Vec<usize>> = group
        .elements()
        .map(|g| {
            let perm = y.gset().perm(g);
            by_mask
                .iter()
                .map(|(_, mask)| {
                    let image = (0..size)
                        .filter(|&i| mask >> i & 1 == 1)
                        .fold(0usize, |acc, i| acc | 1 << perm[i]);
                    position[image]
                })
                .collect()
        })
        .collect();
    let points = by_mask.into_iter().map(|(h, _)| h).collect();
    let gset = GSet::new(group, count, action)?;
    HSetGSet::new(y.level() + 1, points, gset)
}

/// `P^times(M)` starting from `M` at level 0.
pub fn iterated_power(m: &GSet, times: usize, limit: usize) -> Result<HSetGSet> {
    let mut current = HSetGSet::atoms(m);
    for _ in 0..times {
        current = power_object(&current, limit)?;
    }
    Ok(current)
}

/// Enumerates canonical HSets of a fixed level over `m` atoms by node count,
/// each size class in canonical order. Results are memoized per (level, size).
#[derive(Debug)]
pub struct SizedEnumerator {
    atoms: usize,
    memo: HashMap<(usize, usize), Vec<HSet>>,
}

impl SizedEnumerator {
    pub fn new(atoms: usize) -> Self {
        SizedEnumerator {
            atoms,
            memo: HashMap::new(),
        }
    }

    /// All HSets with `has_level(level)` and exactly `size` nodes.
    pub fn of_size(&mut self, level: usize, size: usize) -> Vec<HSet> {
        if let Some(found) = self.memo.get(&(level, size)) {
            return found.clone();
        }
        let out = if level == 0 {
            if size == 1 {
                (0..self.atoms).map(HSet::atom).collect()
            } else {
                Vec::new()
            }
        } else if size == 0 {
            Vec::new()
        } else {
            let budget = size - 1;
            let mut candidates: Vec<(HSet, usize)> = Vec::new();
            for t in 1..=budget {
                candidates.extend(self.of_size(level - 1, t).into_iter().map(|h| (h, t)));
            }
            candidates.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Vec::new();
            let mut chosen = Vec::new();
            pick_members(&candidates, 0, budget, &mut chosen, &mut out);
            out.sort();
            out
        };
        self.memo.insert((level, size), out.clone());
        out
    }
}

fn pick_members(
    candidates: &[(HSet, usize)],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<HSet>,
    out: &mut Vec<HSet>,
) {
    if remaining == 0 {
        out.push(HSet::from_sorted(chosen.clone()));
        return;
    }
    for i in start..candidates.len() {
        let (h, t) = &candidates[i];
        if *t <= remaining {
            chosen.push(h.clone());
            pick_members(candidates, i + 1, remaining - t, chosen, out);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use std::sync::Arc;

    fn a(i: usize) -> HSet {
        HSet::atom(i)
    }

    fn set(members: Vec<HSet>) -> HSet {
        HSet::from_members(members)
    }

    fn swap_m() -> GSet {
        GSet::new(Arc::new(Group::cyclic(2)), 2, vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let t = HTree::Set(vec![HTree::Atom(0), HTree::Atom(0)]);
        assert_eq!(canonicalize(&t).to_tree(), HTree::Set(vec![HTree::Atom(0)]));

        let t = HTree::Set(vec![HTree::Set(vec![]), HTree::Atom(0)]);
        assert_eq!(canonicalize(&t).to_string(), "{A0,{}}");

        let t = HTree::Set(vec![
            HTree::Set(vec![HTree::Atom(1)]),
            HTree::Set(vec![HTree::Atom(0)]),
        ]);
        assert_eq!(canonicalize(&t).to_string(), "{{A0},{A1}}");
    }

    #[test]
    fn has_level_examples() {
        assert!(a(0).has_level(0));
        assert!(!a(0).has_level(1));
        assert!((1..10).all(|n| HSet::empty().has_level(n)));
        assert!(!HSet::empty().has_level(0));
        let h = set(vec![set(vec![a(0)]), HSet::empty()]);
        assert!(h.has_level(2));
        assert!(!h.has_level(1));
        assert!(!h.has_level(3));
    }

    #[test]
    fn apply_bijection_examples() {
        let h = set(vec![HSet::empty(), set(vec![a(0)]), set(vec![a(0), a(1)])]);
        assert_eq!(h.apply_bijection(&[0, 1]), h);
        let swapped = h.apply_bijection(&[1, 0]);
        assert_eq!(
            swapped,
            set(vec![HSet::empty(), set(vec![a(1)]), set(vec![a(0), a(1)])])
        );
        assert_eq!(swapped.apply_bijection(&[1, 0]), h);
    }

    #[test]
    fn act_examples() {
        let m = swap_m();
        let h = set(vec![a(0)]);
        assert_eq!(h.act(0, &m), h);
        assert_eq!(h.act(1, &m), set(vec![a(1)]));
    }

    #[test]
    fn kuratowski_examples() {
        let x = a(0);
        assert_eq!(
            HSet::kuratowski_pair(&x, &x),
            set(vec![set(vec![x.clone()])])
        );
        let p = HSet::kuratowski_pair(&a(0), &HSet::empty());
        assert_eq!(p.to_string(), "{{A0},{A0,{}}}");
        let b = set(vec![a(1)]);
        let c = set(vec![a(0)]);
        assert!(HSet::kuratowski_pair(&b, &c).has_level(3));
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(a(0).wrap_singletons(0), a(0));
        assert_eq!(a(0).wrap_singletons(2).to_string(), "{{A0}}");
        assert!(a(0).wrap_singletons(2).has_level(2));
    }

    #[test]
    fn serialize_examples() {
        assert_eq!(a(3).canonical_serialize(), b"A3");
        assert_eq!(HSet::empty().canonical_serialize(), b"{}");
        // "{}" is shorter than "{A0}", so the empty set sorts first.
        assert_eq!(
            set(vec![HSet::empty(), set(vec![a(0)])]).to_string(),
            "{{},{A0}}"
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(HSet::parse("{A0").is_err());
        assert!(HSet::parse("{A0}}").is_err());
        assert!(HSet::parse("B").is_err());
        assert!(HSet::parse("{,}").is_err());
        assert_eq!(HSet::parse("{A1,A0,A1}").unwrap().to_string(), "{A0,A1}");
    }

    #[test]
    fn json_form() {
        let h = set(vec![a(1), HSet::empty(), set(vec![a(0)])]);
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, "[1,[],[0]]");
        let back: HSet = serde_json::from_str("[[0],1,[],1]").unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn power_object_examples() {
        let m = swap_m();
        let base = HSetGSet::atoms(&m);
        let p1 = power_object(&base, POWER_OBJECT_LIMIT).unwrap();
        assert_eq!(p1.points().len(), 4);
        assert_eq!(p1.gset().fixed_kernel().order(), 1);
        let p2 = power_object(&p1, POWER_OBJECT_LIMIT).unwrap();
        assert_eq!(p2.points().len(), 16);
        assert!(p2.points().iter().all(|h| h.has_level(2)));

        let empty = GSet::new(Arc::new(Group::cyclic(2)), 0, vec![vec![], vec![]]).unwrap();
        let p = power_object(&HSetGSet::atoms(&empty), POWER_OBJECT_LIMIT).unwrap();
        assert_eq!(p.points(), &[HSet::empty()]);

        assert!(matches!(
            power_object(&p2, 1 << 15),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn sized_enumeration_matches_power_object() {
        let m = swap_m();
        let p2 = iterated_power(&m, 2, POWER_OBJECT_LIMIT).unwrap();
        let mut e = SizedEnumerator::new(2);
        let mut all: Vec<HSet> = (1..40).flat_map(|s| e.of_size(2, s)).collect();
        all.sort();
        let mut expected = p2.points().to_vec();
        expected.sort();
        assert_eq!(all, expected);
        assert_eq!(e.of_size(2, 1), vec![HSet::empty()]);
    }
}
