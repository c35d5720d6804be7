//! Finite G-sets: validated action tables, orbits, stabilizers and
//! isomorphism by stabilizer conjugacy.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, Group, Subgroup};
use crate::hset::HSet;

/// A finite set of points `0..size` with a left action of a [`Group`].
///
/// `action[g][p]` is the image of point `p` under `g`.
#[derive(Debug, Clone)]
pub struct GSet {
    group: Arc<Group>,
    size: usize,
    action: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl PartialEq for GSet {
    fn eq(&self, other: &Self) -> bool {
        self.same_group(other) && self.size == other.size && self.action == other.action
    }
}

impl Eq for GSet {}

impl GSet {
    /// Validating constructor: dimensions, permutation rows, identity and
    /// compatibility `g·(h·p) = (gh)·p`.
    pub fn new(group: Arc<Group>, size: usize, action: Vec<Vec<usize>>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::InvalidAction(format!(
                "action has {} rows, group has order {}",
                action.len(),
                group.order()
            )));
        }
        for (g, row) in action.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidAction(format!(
                    "action row for g={g} has length {}, expected {size}",
                    row.len()
                )));
            }
            if !crate::group::is_permutation(row) {
                return Err(Error::InvalidAction(format!(
                    "action of g={g} is not a permutation of the {size} points"
                )));
            }
        }
        let e = group.identity();
        if let Some(p) = (0..size).find(|&p| action[e][p] != p) {
            return Err(Error::InvalidAction(format!(
                "identity moves point {p} (g=h=e, p={p})"
            )));
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                for p in 0..size {
                    if action[g][action[h][p]] != action[gh][p] {
                        return Err(Error::InvalidAction(format!(
                            "compatibility fails at (g={g}, h={h}, p={p})"
                        )));
                    }
                }
            }
        }
        Ok(GSet {
            group,
            size,
            action,
            labels: None,
        })
    }

    /// Every element fixes every point.
    pub fn trivial(group: Arc<Group>, size: usize) -> Self {
        let action = vec![(0..size).collect(); group.order()];
        GSet {
            group,
            size,
            action,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::Input(format!(
                "{} labels for {} points",
                labels.len(),
                self.size
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::Input("point labels must be distinct".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<Group> {
        Arc::clone(&self.group)
    }

    pub fn same_group(&self, other: &GSet) -> bool {
        Arc::ptr_eq(&self.group, &other.group) || *self.group == *other.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// The permutation of points induced by `g`.
    pub fn perm(&self, g: Elem) -> &[usize] {
        &self.action[g]
    }

    pub fn image(&self, g: Elem, p: usize) -> usize {
        self.action[g][p]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The given label, or `<prefix><p>` with the default prefix `x`.
    pub fn label(&self, p: usize) -> String {
        self.label_or(p, "x")
    }

    pub fn label_or(&self, p: usize, prefix: &str) -> String {
        match &self.labels {
            Some(labels) => labels[p].clone(),
            None => format!("{prefix}{p}"),
        }
    }

    /// Orbit partition, each orbit sorted, listed by minimal point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for p in 0..self.size {
            if seen[p] {
                continue;
            }
            let orbit = self.orbit_of(p);
            for &q in &orbit {
                seen[q] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn orbit_of(&self, p: usize) -> Vec<usize> {
        let mut orbit: Vec<usize> = self.group.elements().map(|g| self.action[g][p]).collect();
        orbit.sort_unstable();
        orbit.dedup();
        orbit
    }

    pub fn is_transitive(&self) -> bool {
        self.size > 0 && self.orbit_of(0).len() == self.size
    }

    pub fn stabilizer(&self, p: usize) -> Subgroup {
        Subgroup::from_sorted_unchecked(
            self.group
                .elements()
                .filter(|&g| self.action[g][p] == p)
                .collect(),
        )
    }

    /// `{g : g·p = p for all p}`; the whole group when there are no points.
    pub fn fixed_kernel(&self) -> Subgroup {
        Subgroup::from_sorted_unchecked(
            self.group
                .elements()
                .filter(|&g| (0..self.size).all(|p| self.action[g][p] == p))
                .collect(),
        )
    }

    /// The left-translation action on the cosets of `h`, cosets ordered as
    /// in [`Group::left_cosets`].
    pub fn coset_gset(group: Arc<Group>, h: &Subgroup) -> GSet {
        let cosets = group.left_cosets(h);
        let mut coset_of = vec![0usize; group.order()];
        for (i, c) in cosets.iter().enumerate() {
            for &g in c {
                coset_of[g] = i;
            }
        }
        let action = group
            .elements()
            .map(|g| {
                cosets
                    .iter()
                    .map(|c| coset_of[group.mul(g, c[0])])
                    .collect()
            })
            .collect();
        GSet {
            size: cosets.len(),
            group,
            action,
            labels: None,
        }
    }

    /// The sub-G-set on `points` (which must be a union of orbits), with
    /// points renumbered in the given order.
    pub fn restrict(&self, points: &[usize]) -> Result<GSet> {
        let mut position = HashMap::with_capacity(points.len());
        for (i, &p) in points.iter().enumerate() {
            if p >= self.size || position.insert(p, i).is_some() {
                return Err(Error::Input(format!("bad or repeated point {p}")));
            }
        }
        let action = self
            .action
            .iter()
            .map(|row| {
                points
                    .iter()
                    .map(|&p| {
                        position.get(&row[p]).copied().ok_or_else(|| {
                            Error::Input(format!("point set not closed under the action at {p}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GSet {
            group: self.group_arc(),
            size: points.len(),
            action,
            labels: None,
        })
    }

    /// Some `g` with `g·from = to`, smallest index first.
    pub fn transporter(&self, from: usize, to: usize) -> Option<Elem> {
        self.group.elements().find(|&g| self.action[g][from] == to)
    }
}

/// An equivariant bijection, `map[x] = y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoWitness {
    pub map: Vec<usize>,
}

/// Decides `X ≅ Y` by matching orbits whose point stabilizers are conjugate,
/// then transports each orbit through the conjugating element.
pub fn are_isomorphic(x: &GSet, y: &GSet) -> Result<Option<IsoWitness>> {
    if !x.same_group(y) {
        return Err(Error::GroupMismatch);
    }
    if x.size() != y.size() {
        return Ok(None);
    }
    let group = x.group();
    let y_orbits: Vec<(usize, Vec<usize>, Subgroup)> = y
        .orbits()
        .into_iter()
        .map(|o| {
            let base = o[0];
            (base, o, y.stabilizer(base))
        })
        .collect();
    let mut used = vec![false; y_orbits.len()];
    let mut map = vec![usize::MAX; x.size()];
    for orbit in x.orbits() {
        let base = orbit[0];
        let hx = x.stabilizer(base);
        let matched = y_orbits.iter().enumerate().find_map(|(i, (yb, yo, hy))| {
            if used[i] || yo.len() != orbit.len() {
                return None;
            }
            group.are_conjugate(&hx, hy).map(|g| (i, *yb, g))
        });
        let Some((i, y_base, g)) = matched else {
            return Ok(None);
        };
        used[i] = true;
        // g Hx g⁻¹ = Hy, so g⁻¹·y_base has stabilizer exactly Hx.
        let target = y.image(group.inv(g), y_base);
        for a in group.elements() {
            map[x.image(a, base)] = y.image(a, target);
        }
    }
    Ok(Some(IsoWitness { map }))
}

/// Outcome of checking a point map `X → Y` for being a subobject inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjectionReport {
    pub total: bool,
    pub injective: bool,
    pub equivariant: bool,
    pub subobject: bool,
}

pub fn check_equivariant_injection(f: &[usize], x: &GSet, y: &GSet) -> InjectionReport {
    let total = f.len() == x.size() && f.iter().all(|&v| v < y.size());
    if !total || !x.same_group(y) {
        return InjectionReport {
            total,
            injective: false,
            equivariant: false,
            subobject: false,
        };
    }
    let mut sorted = f.to_vec();
    sorted.sort_unstable();
    let injective = sorted.windows(2).all(|w| w[0] != w[1]);
    let equivariant = x
        .group()
        .elements()
        .all(|g| (0..x.size()).all(|p| f[x.image(g, p)] == y.image(g, f[p])));
    InjectionReport {
        total,
        injective,
        equivariant,
        subobject: injective && equivariant,
    }
}

/// A G-set whose points are distinct HSets at a common level, acting through
/// `M`. Power objects and orbits of HSets are represented this way.
#[derive(Debug, Clone)]
pub struct HSetGSet {
    level: usize,
    points: Vec<HSet>,
    gset: GSet,
    index: HashMap<HSet, usize>,
}

impl HSetGSet {
    pub fn new(level: usize, points: Vec<HSet>, gset: GSet) -> Result<Self> {
        if points.len() != gset.size() {
            return Err(Error::Input("point list and action sizes differ".into()));
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, h) in points.iter().enumerate() {
            if !h.has_level(level) {
                return Err(Error::Input(format!("{h} is not at level {level}")));
            }
            if index.insert(h.clone(), i).is_some() {
                return Err(Error::Input(format!("repeated point {h}")));
            }
        }
        Ok(HSetGSet {
            level,
            points,
            gset,
            index,
        })
    }

    /// `M` itself at level 0, point `i` being atom `i`.
    pub fn atoms(m: &GSet) -> Self {
        let points = (0..m.size()).map(HSet::atom).collect();
        HSetGSet::new(0, points, m.clone()).expect("atoms are distinct")
    }

    /// The G-set on `points` with the action induced from `m`; the points
    /// must be closed under that action.
    pub fn from_points(m: &GSet, level: usize, points: Vec<HSet>) -> Result<Self> {
        let index: HashMap<&HSet, usize> = points.iter().enumerate().map(|(i, h)| (h, i)).collect();
        let action = m
            .group()
            .elements()
            .map(|g| {
                points
                    .iter()
                    .map(|h| {
                        let image = h.act(g, m);
                        index.get(&image).copied().ok_or_else(|| {
                            Error::Input(format!("{h} is moved outside the point set"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let gset = GSet::new(m.group_arc(), points.len(), action)?;
        HSetGSet::new(level, points, gset)
    }

    /// The orbit of `seed` under the action through `m`, in the order the
    /// group elements first reach each point.
    pub fn orbit_of(m: &GSet, level: usize, seed: &HSet) -> Result<Self> {
        let mut points: Vec<HSet> = Vec::new();
        for g in m.group().elements() {
            let image = seed.act(g, m);
            if !points.contains(&image) {
                points.push(image);
            }
        }
        HSetGSet::from_points(m, level, points)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn points(&self) -> &[HSet] {
        &self.points
    }

    pub fn gset(&self) -> &GSet {
        &self.gset
    }

    pub fn index_of(&self, h: &HSet) -> Option<usize> {
        self.index.get(h).copied()
    }
}
