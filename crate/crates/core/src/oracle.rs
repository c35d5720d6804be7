//! Brute-force ground truth on tiny instances.
//!
//! Power objects are built explicitly, and every union of orbits is tested
//! for isomorphism with `X`. Levels that cannot be built or enumerated are
//! reported as inconclusive, never as a negative answer.

use std::collections::HashSet;

use serde::Serialize;

use crate::embed::{self, CardTower, TowerCard};
use crate::error::{Error, Result};
use crate::group::all_permutations;
use crate::gset::{are_isomorphic, GSet, HSetGSet, IsoWitness};
use crate::hset::{self, HSet, POWER_OBJECT_LIMIT};

/// Largest orbit count whose `2^k` orbit unions are enumerated.
pub const MAX_ORBITS: usize = 20;

/// A union of orbits of some G-set, renumbered in increasing point order.
#[derive(Debug, Clone)]
pub struct SubGSet {
    /// Inclusion map: sub-point `i` is point `points[i]` of the parent.
    pub points: Vec<usize>,
    pub gset: GSet,
}

/// All `2^k` unions of the `k` orbits of `y`, the empty one first, in
/// increasing order of the orbit bitmask.
pub fn enumerate_sub_gsets(y: &GSet) -> Result<impl Iterator<Item = SubGSet> + '_> {
    let orbits = y.orbits();
    if orbits.len() > MAX_ORBITS {
        return Err(Error::capacity(
            "orbit count for subobject enumeration",
            MAX_ORBITS,
            orbits.len(),
        ));
    }
    Ok((0u64..1 << orbits.len()).map(move |mask| {
        let mut points: Vec<usize> = orbits
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .flat_map(|(_, o)| o.iter().copied())
            .collect();
        points.sort_unstable();
        let gset = y.restrict(&points).expect("unions of orbits are closed");
        SubGSet { points, gset }
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSearch {
    pub level: usize,
    /// Every candidate at this level was examined and none matched.
    pub exhaustive: bool,
    pub candidates_examined: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inconclusive: Option<String>,
}

/// A sub-G-set of `M_level` isomorphic to `X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoundSubobject {
    pub level: usize,
    pub points: Vec<HSet>,
    /// `X`-point `i` corresponds to `points[witness.map[i]]`.
    pub witness: IsoWitness,
}

impl FoundSubobject {
    pub fn image_of(&self, x_point: usize) -> &HSet {
        &self.points[self.witness.map[x_point]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Found,
    ExhaustiveNo,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub searched_levels: Vec<usize>,
    pub levels: Vec<LevelSearch>,
    pub found: Option<FoundSubobject>,
    pub verdict: Verdict,
}

/// Searches `M_1, …, M_max_level` for a sub-G-set isomorphic to `X`.
pub fn subobject_search(x: &GSet, m: &GSet, max_level: usize) -> Result<OracleReport> {
    if !m.same_group(x) {
        return Err(Error::GroupMismatch);
    }
    let mut levels = Vec::new();
    let mut found = None;
    let mut current = Some(HSetGSet::atoms(m));
    for level in 1..=max_level {
        let power = match current
            .take()
            .map(|c| hset::power_object(&c, POWER_OBJECT_LIMIT))
        {
            Some(Ok(p)) => p,
            Some(Err(e)) => {
                levels.push(inconclusive(level, e.to_string()));
                continue;
            }
            None => {
                levels.push(inconclusive(level, "previous level not built".into()));
                continue;
            }
        };
        let orbit_count = power.gset().orbits().len();
        if orbit_count > MAX_ORBITS {
            let e = Error::capacity(
                "orbit count for subobject enumeration",
                MAX_ORBITS,
                orbit_count,
            );
            levels.push(inconclusive(level, e.to_string()));
            current = Some(power);
            continue;
        }
        let candidates = enumerate_sub_gsets(power.gset())?;
        let mut examined = 0u64;
        let mut hit = None;
        for sub in candidates {
            examined += 1;
            if sub.gset.size() != x.size() {
                continue;
            }
            if let Some(witness) = are_isomorphic(x, &sub.gset)? {
                let points = sub
                    .points
                    .iter()
                    .map(|&p| power.points()[p].clone())
                    .collect();
                hit = Some(FoundSubobject {
                    level,
                    points,
                    witness,
                });
                break;
            }
        }
        levels.push(LevelSearch {
            level,
            exhaustive: hit.is_none(),
            candidates_examined: examined,
            inconclusive: None,
        });
        if hit.is_some() {
            found = hit;
            break;
        }
        current = Some(power);
    }
    let verdict = if found.is_some() {
        Verdict::Found
    } else if levels.iter().all(|l| l.exhaustive) {
        Verdict::ExhaustiveNo
    } else {
        Verdict::Inconclusive
    };
    Ok(OracleReport {
        searched_levels: levels.iter().map(|l| l.level).collect(),
        levels,
        found,
        verdict,
    })
}

fn inconclusive(level: usize, reason: String) -> LevelSearch {
    LevelSearch {
        level,
        exhaustive: false,
        candidates_examined: 0,
        inconclusive: Some(reason),
    }
}

/// Side-by-side record of the kernel condition, the oracle, and the
/// constructive embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremCheck {
    pub cond2: bool,
    pub oracle: OracleReport,
    /// Oracle found a subobject ⟹ `G_M ⊆ G_X`.
    pub necessity_consistent: bool,
    /// When `G_M ⊆ G_X`: whether the embed certificate verified.
    pub sufficiency_verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embed_target_level: Option<usize>,
}

impl TheoremCheck {
    pub fn consistent(&self) -> bool {
        self.necessity_consistent && self.sufficiency_verified != Some(false)
    }
}

pub fn theorem_check(m: &GSet, x: &GSet, max_level: usize) -> Result<TheoremCheck> {
    let cond2 = embed::check_conditions(m, x)?.cond2;
    let oracle = subobject_search(x, m, max_level)?;
    let necessity_consistent = oracle.found.is_none() || cond2;
    let (sufficiency_verified, embed_target_level) = if cond2 {
        let cert = embed::embed(m, x)?;
        (
            Some(embed::verify_certificate(m, x, &cert).passed),
            Some(cert.target_level),
        )
    } else {
        (None, None)
    };
    Ok(TheoremCheck {
        cond2,
        oracle,
        necessity_consistent,
        sufficiency_verified,
        embed_target_level,
    })
}

/// `Sym(M)`-orbit counts on `M_level`, by two independent routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrbitCount {
    /// Distinct classes among the explicitly enumerated elements.
    pub by_enumeration: u64,
    /// Burnside: the mean over `f ∈ Sym(M)` of `|Fix(f)|`, where `f` fixes
    /// `2^(cycles of f on M_(level-1))` elements of `M_level`.
    pub by_burnside: u64,
}

impl OrbitCount {
    /// Whether the count exceeds `c_(level-1)`.
    pub fn exceeds_tower(&self, m: usize, level: usize) -> bool {
        level >= 1 && TowerCard::exact(self.by_enumeration) > CardTower::new(m).card(level - 1)
    }
}

pub fn count_sym_orbits(m: &GSet, level: usize) -> Result<OrbitCount> {
    if m.size() > embed::MAX_M_POINTS {
        return Err(Error::capacity(
            "|M| for Sym(M) enumeration",
            embed::MAX_M_POINTS,
            m.size(),
        ));
    }
    if level == 0 {
        return Err(Error::Input("orbit counting needs level ≥ 1".into()));
    }
    let perms = all_permutations(m.size());
    let below = hset::iterated_power(m, level - 1, POWER_OBJECT_LIMIT)?;
    let here = hset::power_object(&below, POWER_OBJECT_LIMIT)?;

    let classes: HashSet<HSet> = here
        .points()
        .iter()
        .map(|h| HSet::from_members(perms.iter().map(|f| h.apply_bijection(f))))
        .collect();

    let mut fixed_total: u128 = 0;
    for f in &perms {
        let induced: Vec<usize> = below
            .points()
            .iter()
            .map(|h| {
                below
                    .index_of(&h.apply_bijection(f))
                    .expect("closed under Sym(M)")
            })
            .collect();
        fixed_total += 1u128 << cycle_count(&induced);
    }
    let by_burnside = fixed_total / perms.len() as u128;
    Ok(OrbitCount {
        by_enumeration: classes.len() as u64,
        by_burnside: by_burnside as u64,
    })
}

fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            p = perm[p];
        }
    }
    cycles
}
