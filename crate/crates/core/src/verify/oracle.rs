//! Brute-force references. Nothing here calls projections, wings,
//! parallelism or ball enumeration; everything reduces to normal-form
//! arithmetic and numerical distance.

use std::collections::{HashMap, VecDeque};

use crate::chambers::{BuildingSpec, Chamber};
use crate::coxeter::{CoxeterDiagram, TypeSet};
use crate::error::{Error, Result};

/// Chambers reachable from `c` by steps of types in `j` (finite for
/// spherical `j`).
pub(crate) fn span(spec: &BuildingSpec, c: &Chamber, j: TypeSet) -> Vec<Chamber> {
    let mut seen = vec![c.clone()];
    let mut k = 0;
    while k < seen.len() {
        let x = seen[k].clone();
        for t in j.iter() {
            for e in 1..spec.thickness(t) {
                let y = spec.step(&x, t, e);
                if !seen.contains(&y) {
                    seen.push(y);
                }
            }
        }
        k += 1;
    }
    seen.sort();
    seen
}

/// The chambers of the `i`-panel of `c`.
pub(crate) fn panel(spec: &BuildingSpec, c: &Chamber, i: usize) -> Vec<Chamber> {
    (0..spec.thickness(i)).map(|k| spec.step(c, i, k)).collect()
}

/// The unique member of `set` closest to `x`, if there is one.
pub(crate) fn nearest<'s>(spec: &BuildingSpec, set: &'s [Chamber], x: &Chamber) -> Option<&'s Chamber> {
    let mut best: Option<(&Chamber, usize)> = None;
    let mut tie = false;
    for d in set {
        let k = spec.dist(x, d);
        match best {
            Some((_, b)) if k > b => {}
            Some((_, b)) if k == b => tie = true,
            _ => {
                best = Some((d, k));
                tie = false;
            }
        }
    }
    if tie {
        None
    } else {
        best.map(|(d, _)| d)
    }
}

pub(crate) fn set_dist(spec: &BuildingSpec, set: &[Chamber], x: &Chamber) -> usize {
    set.iter().map(|d| spec.dist(x, d)).min().expect("nonempty set")
}

/// `x ∈ X_i(c)`: `c` is the chamber of its `i`-panel closest to `x`.
pub(crate) fn in_wing(spec: &BuildingSpec, c: &Chamber, i: usize, x: &Chamber) -> bool {
    nearest(spec, &panel(spec, c, i), x) == Some(c)
}

/// `x` lies in the `j`-residue of `c` (any `j`).
pub(crate) fn same_residue(spec: &BuildingSpec, c: &Chamber, j: TypeSet, x: &Chamber) -> bool {
    spec.left_divide(c, x).support().is_subset(j)
}

/// Two finite chamber sets are parallel: each one's nearest-point map onto
/// the other is onto.
pub(crate) fn parallel(spec: &BuildingSpec, a: &[Chamber], b: &[Chamber]) -> bool {
    let onto = |from: &[Chamber], to: &[Chamber]| {
        let mut hit = vec![false; to.len()];
        for x in from {
            match nearest(spec, to, x) {
                Some(p) => hit[to.iter().position(|d| d == p).expect("member")] = true,
                None => return false,
            }
        }
        hit.iter().all(|&h| h)
    };
    onto(a, b) && onto(b, a)
}

/// Multi-source breadth-first search over the chamber graph.
pub(crate) fn bfs(spec: &BuildingSpec, sources: &[Chamber], depth: usize, cap: usize) -> Result<HashMap<Chamber, usize>> {
    let mut dist: HashMap<Chamber, usize> = sources.iter().map(|c| (c.clone(), 0)).collect();
    let mut queue: VecDeque<Chamber> = sources.iter().cloned().collect();
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d == depth {
            continue;
        }
        for (_, y) in spec.all_neighbours(&x) {
            if !dist.contains_key(&y) {
                if dist.len() >= cap {
                    return Err(Error::ResourceLimit { cap });
                }
                dist.insert(y.clone(), d + 1);
                queue.push_back(y);
            }
        }
    }
    Ok(dist)
}

/// Whether some clique `I0` splits the rest into nonempty `I1`, `I2` with
/// `m = inf` across, by trying every three-colouring of the generators.
pub(crate) fn partition_exists(d: &CoxeterDiagram) -> bool {
    let n = d.rank();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut parts = [TypeSet::EMPTY; 3];
        let mut k = code;
        for i in 0..n {
            parts[k % 3].insert(i);
            k /= 3;
        }
        let [i0, i1, i2] = parts;
        if i1.is_empty() || i2.is_empty() {
            continue;
        }
        let clique = i0.iter().all(|a| i0.iter().all(|b| a == b || d.commute(a, b)));
        let apart = i1.iter().all(|a| i2.iter().all(|b| !d.commute(a, b)));
        if clique && apart {
            return true;
        }
    }
    false
}
