//! Finite groups stored as full Cayley tables.
//!
//! Elements are indices `0..order`. Products are read from the table,
//! inverses are cached at construction. Subgroups are sorted index sets.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element index into a [`Group`].
pub type Elem = usize;

/// A permutation of `0..len`, stored as its image list.
pub type Perm = Vec<usize>;

/// A finite group given by its multiplication table.
///
/// `table[i][j]` is the index of `g_i · g_j`. Construction checks the Latin
/// square property, the identity, and associativity on every triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    table: Vec<Vec<Elem>>,
    identity: Elem,
    inverses: Vec<Elem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

impl Group {
    pub fn from_table(table: Vec<Vec<Elem>>, names: Option<Vec<String>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup(
                "group must have at least one element".into(),
            ));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has length {}, expected {order}",
                    row.len()
                )));
            }
        }
        // Latin square: every row and every column is a permutation.
        for (i, row) in table.iter().enumerate() {
            let mut seen = vec![false; order];
            for (j, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(Error::InvalidGroup(format!(
                        "entry ({i},{j}) = {v} is out of range"
                    )));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidGroup(format!(
                        "not a Latin square: value {v} repeats in row {i} (at column {j})"
                    )));
                }
            }
        }
        for j in 0..order {
            let mut seen = vec![false; order];
            for (i, row) in table.iter().enumerate() {
                let v = row[j];
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidGroup(format!(
                        "not a Latin square: value {v} repeats in column {j} (at row {i})"
                    )));
                }
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|k| table[e][k] == k && table[k][e] == k))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity element".into()))?;
        for i in 0..order {
            for j in 0..order {
                let ij = table[i][j];
                for k in 0..order {
                    if table[ij][k] != table[i][table[j][k]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        // A Latin square row contains the identity exactly once.
        let mut inverses = vec![0; order];
        for (i, inv) in inverses.iter_mut().enumerate() {
            *inv = (0..order).find(|&j| table[i][j] == identity).unwrap();
            if table[*inv][i] != identity {
                return Err(Error::InvalidGroup(format!(
                    "element {i} has no two-sided inverse"
                )));
            }
        }
        if let Some(names) = &names {
            if names.len() != order {
                return Err(Error::InvalidGroup(format!(
                    "{} names given for a group of order {order}",
                    names.len()
                )));
            }
        }
        Ok(Group {
            table,
            identity,
            inverses,
            names,
        })
    }

    /// Builds the group whose elements are the given permutations under
    /// composition `(p·q)(i) = p(q(i))`. The list must be closed.
    pub fn from_permutations(perms: &[Perm]) -> Result<Self> {
        let index: HashMap<&Perm, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        if index.len() != perms.len() {
            return Err(Error::Input("duplicate permutations".into()));
        }
        let mut table = vec![vec![0; perms.len()]; perms.len()];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let pq = compose(p, q);
                table[i][j] = *index
                    .get(&pq)
                    .ok_or_else(|| Error::Input("permutation list is not closed".into()))?;
            }
        }
        Group::from_table(table, None)
    }

    /// Cyclic group of order `n`, element `i` being the `i`-th power of a generator.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group needs positive order");
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        Group::from_table(table, None).expect("cyclic table is a group")
    }

    /// Klein four-group `C2 × C2`, elements encoded as two-bit vectors.
    pub fn klein_four() -> Self {
        let table = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
        Group::from_table(table, None).expect("Klein table is a group")
    }

    /// Symmetric group on `n` letters, elements in lexicographic order of
    /// their image lists (so the identity is element 0).
    pub fn symmetric(n: usize) -> Self {
        let perms = all_permutations(n);
        Group::from_permutations(&perms).expect("Sym(n) is closed")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a][b]
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<Elem>] {
        &self.table
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order()
    }

    /// Display label: the given name, `e` for the identity, else `g<i>`.
    pub fn element_name(&self, g: Elem) -> String {
        match &self.names {
            Some(names) => names[g].clone(),
            None if g == self.identity => "e".to_string(),
            None => format!("g{g}"),
        }
    }

    pub fn conjugate_by(&self, g: Elem, h: Elem) -> Elem {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            members: vec![self.identity],
        }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            members: self.elements().collect(),
        }
    }

    /// Smallest subgroup containing `seeds`.
    pub fn subgroup_generated(&self, seeds: &[Elem]) -> Result<Subgroup> {
        if let Some(&bad) = seeds.iter().find(|&&s| s >= self.order()) {
            return Err(Error::Input(format!(
                "element index {bad} out of range for group of order {}",
                self.order()
            )));
        }
        let mut members = BTreeSet::from([self.identity]);
        let mut queue: VecDeque<Elem> = VecDeque::from([self.identity]);
        // In a finite group the closure under right multiplication by the
        // seeds is already closed under inverses.
        while let Some(a) = queue.pop_front() {
            for &s in seeds {
                let b = self.mul(a, s);
                if members.insert(b) {
                    queue.push_back(b);
                }
            }
        }
        Ok(Subgroup {
            members: members.into_iter().collect(),
        })
    }

    /// Left cosets `gH`, each sorted, listed by minimal member.
    pub fn left_cosets(&self, h: &Subgroup) -> Vec<Vec<Elem>> {
        let mut assigned = vec![false; self.order()];
        let mut cosets = Vec::with_capacity(self.order() / h.order());
        for g in self.elements() {
            if assigned[g] {
                continue;
            }
            let mut coset: Vec<Elem> = h.members.iter().map(|&x| self.mul(g, x)).collect();
            coset.sort_unstable();
            for &c in &coset {
                assigned[c] = true;
            }
            cosets.push(coset);
        }
        cosets
    }

    /// `g H g⁻¹`.
    pub fn conjugate_subgroup(&self, g: Elem, h: &Subgroup) -> Subgroup {
        let mut members: Vec<Elem> = h.members.iter().map(|&x| self.conjugate_by(g, x)).collect();
        members.sort_unstable();
        Subgroup { members }
    }

    /// Some `g` with `g H1 g⁻¹ = H2`, trying the identity first and then
    /// elements in index order.
    pub fn are_conjugate(&self, h1: &Subgroup, h2: &Subgroup) -> Option<Elem> {
        if h1.order() != h2.order() {
            return None;
        }
        std::iter::once(self.identity)
            .chain(self.elements().filter(|&g| g != self.identity))
            .find(|&g| self.conjugate_subgroup(g, h1) == *h2)
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.elements().all(|g| {
            h.members
                .iter()
                .all(|&x| h.contains(self.conjugate_by(g, x)))
        })
    }

    /// Every subgroup, sorted by (order, members).
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<Elem>> = BTreeSet::new();
        let mut frontier = vec![self.trivial_subgroup()];
        found.insert(frontier[0].members.clone());
        while let Some(s) = frontier.pop() {
            for g in self.elements().filter(|&g| !s.contains(g)) {
                let mut seeds = s.members.clone();
                seeds.push(g);
                let bigger = self.subgroup_generated(&seeds).expect("indices in range");
                if found.insert(bigger.members.clone()) {
                    frontier.push(bigger);
                }
            }
        }
        let mut out: Vec<Subgroup> = found
            .into_iter()
            .map(|members| Subgroup { members })
            .collect();
        out.sort_by(|a, b| {
            a.order()
                .cmp(&b.order())
                .then_with(|| a.members.cmp(&b.members))
        });
        out
    }

    /// Formats a set of elements as `{e, g1, ...}`.
    pub fn format_elements(&self, elems: &[Elem]) -> String {
        let parts: Vec<String> = elems.iter().map(|&g| self.element_name(g)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// A subgroup as a sorted list of element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subgroup {
    members: Vec<Elem>,
}

impl Subgroup {
    /// Validates that `members` is a subgroup of `group`.
    pub fn new(group: &Group, members: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let set: BTreeSet<Elem> = members.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&g| g >= group.order()) {
            return Err(Error::Input(format!("element index {bad} out of range")));
        }
        if !set.contains(&group.identity()) {
            return Err(Error::Input("subgroup must contain the identity".into()));
        }
        for &a in &set {
            if !set.contains(&group.inv(a)) {
                return Err(Error::Input(format!(
                    "subset not closed under inverse at {a}"
                )));
            }
            for &b in &set {
                if !set.contains(&group.mul(a, b)) {
                    return Err(Error::Input(format!(
                        "subset not closed under multiplication at ({a},{b})"
                    )));
                }
            }
        }
        Ok(Subgroup {
            members: set.into_iter().collect(),
        })
    }

    /// Builds a subgroup from members already known to be closed.
    pub(crate) fn from_sorted_unchecked(members: Vec<Elem>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Subgroup { members }
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: Elem) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&g| other.contains(g))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&g| other.contains(g))
                .collect(),
        }
    }
}

/// `(p∘q)(i) = p(q(i))`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

pub fn invert(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        inv[pi] = i;
    }
    inv
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&v| v < p.len() && !std::mem::replace(&mut seen[v], true))
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Perm> {
    use itertools::Itertools;
    (0..n).permutations(n).collect()
}

/// A group generated inside `Sym(M) × Sym(X)` together with its two actions.
#[derive(Debug, Clone)]
pub struct GeneratedGroup {
    pub group: Group,
    pub on_m: Vec<Perm>,
    pub on_x: Vec<Perm>,
}

/// Closes a list of `(perm on M, perm on X)` pairs under composition.
///
/// Elements are numbered in breadth-first discovery order starting from the
/// identity, so the result is deterministic for a given generator list.
pub fn closure_from_generators(
    pairs: &[(Perm, Perm)],
    m_size: usize,
    x_size: usize,
) -> Result<GeneratedGroup> {
    for (k, (pm, px)) in pairs.iter().enumerate() {
        if pm.len() != m_size || !is_permutation(pm) {
            return Err(Error::Input(format!(
                "generator {k}: M-part is not a permutation of {m_size} points"
            )));
        }
        if px.len() != x_size || !is_permutation(px) {
            return Err(Error::Input(format!(
                "generator {k}: X-part is not a permutation of {x_size} points"
            )));
        }
    }
    let joined: Vec<Perm> = pairs
        .iter()
        .map(|(pm, px)| {
            pm.iter()
                .copied()
                .chain(px.iter().map(|&v| v + m_size))
                .collect()
        })
        .collect();
    let identity: Perm = (0..m_size + x_size).collect();
    let mut elements = vec![identity.clone()];
    let mut index: HashMap<Perm, usize> = HashMap::from([(identity, 0)]);
    let mut head = 0;
    while head < elements.len() {
        for gen in &joined {
            let next = compose(&elements[head], gen);
            if !index.contains_key(&next) {
                index.insert(next.clone(), elements.len());
                elements.push(next);
            }
        }
        head += 1;
    }
    let group = Group::from_permutations(&elements)?;
    let on_m = elements.iter().map(|p| p[..m_size].to_vec()).collect();
    let on_x = elements
        .iter()
        .map(|p| p[m_size..].iter().map(|&v| v - m_size).collect())
        .collect();
    Ok(GeneratedGroup { group, on_m, on_x })
}
