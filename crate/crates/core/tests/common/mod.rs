//! Desk-scale instance catalog and brute-force helpers shared by the
//! integration tests. Nothing here calls the isomorphism machinery under test.

#![allow(dead_code)]

use std::sync::Arc;

use gset_power::group::{all_permutations, Group};
use gset_power::GSet;

pub fn catalog_groups() -> Vec<(&'static str, Arc<Group>)> {
    vec![
        ("C1", Arc::new(Group::cyclic(1))),
        ("C2", Arc::new(Group::cyclic(2))),
        ("C3", Arc::new(Group::cyclic(3))),
        ("C4", Arc::new(Group::cyclic(4))),
        ("V4", Arc::new(Group::klein_four())),
        ("C5", Arc::new(Group::cyclic(5))),
        ("C6", Arc::new(Group::cyclic(6))),
        ("S3", Arc::new(Group::symmetric(3))),
    ]
}

/// Every action table of `group` on `size` points, by backtracking over
/// permutation assignments with the homomorphism law checked as soon as
/// both factors are assigned.
pub fn all_actions(group: &Group, size: usize) -> Vec<Vec<Vec<usize>>> {
    let perms = all_permutations(size);
    let order = group.order();
    let mut out = Vec::new();
    let mut assigned: Vec<Option<usize>> = vec![None; order];
    fn consistent(group: &Group, perms: &[Vec<usize>], assigned: &[Option<usize>]) -> bool {
        for g in group.elements() {
            let Some(pg) = assigned[g] else { continue };
            for h in group.elements() {
                let Some(ph) = assigned[h] else { continue };
                let Some(pgh) = assigned[group.mul(g, h)] else {
                    continue;
                };
                let (pg, ph, pgh) = (&perms[pg], &perms[ph], &perms[pgh]);
                if (0..pg.len()).any(|p| pg[ph[p]] != pgh[p]) {
                    return false;
                }
            }
        }
        true
    }
    fn go(
        group: &Group,
        perms: &[Vec<usize>],
        assigned: &mut Vec<Option<usize>>,
        next: usize,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if next == assigned.len() {
            out.push(assigned.iter().map(|a| perms[a.unwrap()].clone()).collect());
            return;
        }
        let choices: Vec<usize> = if next == group.identity() {
            vec![0]
        } else {
            (0..perms.len()).collect()
        };
        for c in choices {
            assigned[next] = Some(c);
            if consistent(group, perms, assigned) {
                go(group, perms, assigned, next + 1, out);
            }
        }
        assigned[next] = None;
    }
    go(group, &perms, &mut assigned, 0, &mut out);
    out
}

/// Equivariant bijection search over all `|X|!` bijections.
pub fn brute_isomorphic(x: &GSet, y: &GSet) -> bool {
    if x.size() != y.size() {
        return false;
    }
    all_permutations(x.size()).into_iter().any(|f| {
        x.group()
            .elements()
            .all(|g| (0..x.size()).all(|p| f[x.image(g, p)] == y.image(g, f[p])))
    })
}

/// All G-sets of size `0..=max_size` up to isomorphism, smallest first.
pub fn gsets_up_to_iso(group: &Arc<Group>, max_size: usize) -> Vec<GSet> {
    let mut reps: Vec<GSet> = Vec::new();
    for size in 0..=max_size {
        for action in all_actions(group, size) {
            let g = GSet::new(Arc::clone(group), size, action).expect("homomorphism");
            if !reps.iter().any(|r| brute_isomorphic(r, &g)) {
                reps.push(g);
            }
        }
    }
    reps
}

pub struct Instance {
    pub group_name: &'static str,
    pub group: Arc<Group>,
    pub m: GSet,
    pub x: GSet,
}

/// Every (M, X) pair with |M|, |X| ≤ 3 over every catalog group, up to
/// isomorphism in each factor, capped at 500.
pub fn catalog() -> Vec<Instance> {
    let mut out = Vec::new();
    for (name, group) in catalog_groups() {
        let sets = gsets_up_to_iso(&group, 3);
        for m in &sets {
            for x in &sets {
                if out.len() == 500 {
                    return out;
                }
                out.push(Instance {
                    group_name: name,
                    group: Arc::clone(&group),
                    m: m.clone(),
                    x: x.clone(),
                });
            }
        }
    }
    out
}

/// `G_M` computed directly from the definition.
pub fn kernel(g: &GSet) -> Vec<usize> {
    g.group()
        .elements()
        .filter(|&e| (0..g.size()).all(|p| g.image(e, p) == p))
        .collect()
}
