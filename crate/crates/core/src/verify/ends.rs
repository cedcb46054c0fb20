use std::collections::{HashMap, HashSet};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle;
use super::{Check, Ctx, Verdict};
use crate::chambers::{BuildingSpec, Chamber};
use crate::coxeter::{CoxeterDiagram, EndsClass, Partition};
use crate::error::{Error, Result};
use crate::geometry::{Ball, Residue};

/// Whether every chamber at distance in `(n, big_n - 1]` from `x` lies in a
/// single gallery-connected component of `B(x, big_n) ∖ B(x, n)`.
///
/// One-sided evidence for one-endedness: a one-ended building always
/// answers true, a splitting one answers false once the annulus is wide
/// enough to see the branching.
pub fn ends_ball_heuristic(spec: &BuildingSpec, x: &Chamber, n: usize, big_n: usize) -> Result<bool> {
    if big_n <= n {
        return Err(Error::PreconditionFailed(format!("outer radius {big_n} must exceed {n}")));
    }
    if big_n == n + 1 {
        return Ok(true);
    }
    let ball = spec.ball_around(x, big_n)?;
    let mut component = vec![usize::MAX; ball.len()];
    let mut label = 0;
    let mut seen_label = None;
    for start in 0..ball.len() {
        if ball.dist_at(start) <= n || component[start] != usize::MAX {
            continue;
        }
        component[start] = label;
        let mut stack = vec![start];
        while let Some(k) = stack.pop() {
            for (_, y) in spec.all_neighbours(&ball.members()[k]) {
                if let Some(m) = ball.index_of(&y) {
                    if ball.dist_at(m) > n && component[m] == usize::MAX {
                        component[m] = label;
                        stack.push(m);
                    }
                }
            }
        }
        label += 1;
    }
    for k in 0..ball.len() {
        let d = ball.dist_at(k);
        if d > n && d < big_n {
            match seen_label {
                None => seen_label = Some(component[k]),
                Some(l) if l != component[k] => return Ok(false),
                _ => {}
            }
        }
    }
    Ok(true)
}

/// Brute-force search for a splitting partition over all three-colourings
/// of the generators.
pub fn has_partition_brute_force(d: &CoxeterDiagram) -> bool {
    oracle::partition_exists(d)
}

/// The residue graph of a partition restricted to a ball: vertices are the
/// residues of types `I0 ∪ I1` and `I0 ∪ I2` meeting the ball, one edge per
/// `I0`-residue meeting the ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeShape {
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub acyclic: bool,
}

impl TreeShape {
    pub fn is_tree(&self) -> bool {
        self.acyclic && self.components == 1
    }
}

/// Vertices and edges of the residue graph within `ball`, as residues. The
/// partition is not validated, so non-partitions can be compared.
pub fn residue_tree_edges(spec: &BuildingSpec, p: &Partition, ball: &Ball) -> (Vec<Residue>, Vec<(usize, usize)>) {
    let (t1, t2) = (p.i0.union(p.i1), p.i0.union(p.i2));
    let mut ids: HashMap<Residue, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut id_of = |r: Residue, vertices: &mut Vec<Residue>| {
        *ids.entry(r.clone()).or_insert_with(|| {
            vertices.push(r);
            vertices.len() - 1
        })
    };
    let mut seen_edges: HashSet<Residue> = HashSet::new();
    let mut edges = Vec::new();
    for x in ball.members() {
        let a = id_of(spec.res(x, t1), &mut vertices);
        let b = id_of(spec.res(x, t2), &mut vertices);
        if seen_edges.insert(spec.res(x, p.i0)) {
            edges.push((a, b));
        }
    }
    (vertices, edges)
}

pub fn residue_tree_shape(spec: &BuildingSpec, p: &Partition, ball: &Ball) -> TreeShape {
    let (vertices, edges) = residue_tree_edges(spec, p, ball);
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn root(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    let mut acyclic = true;
    let mut components = vertices.len();
    for &(a, b) in &edges {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra == rb {
            acyclic = false;
        } else {
            parent[ra] = rb;
            components -= 1;
        }
    }
    TreeShape { vertices: vertices.len(), edges: edges.len(), components, acyclic }
}

/// `(n, N)` pairs tried, in order, when looking for a disconnected annulus.
pub(crate) const HEURISTIC_GRID: [(usize, usize); 5] = [(0, 3), (0, 4), (1, 4), (1, 5), (2, 5)];

pub(crate) struct EndsConsistency;

impl Check for EndsConsistency {
    type Inst = ();

    fn instances(&self, _ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<Vec<()>> {
        Ok(vec![()])
    }

    fn eval(&self, ctx: &Ctx, _inst: &()) -> Result<Verdict> {
        let d = ctx.spec.diagram();
        let class = match d.ends_classify() {
            Ok(c) => c,
            Err(Error::NotIrreducible | Error::Spherical) => return Ok(Ok(0)),
            Err(e) => return Err(e),
        };
        let exists = oracle::partition_exists(d);
        match class {
            EndsClass::OneEnded => {
                if exists {
                    return Ok(Err("classified one-ended but a partition exists".into()));
                }
                if !ends_ball_heuristic(ctx.spec, &ctx.center, 1, 4)? {
                    return Ok(Err("one-ended diagram but the annulus (1, 4] is disconnected".into()));
                }
            }
            EndsClass::Partition(p) => {
                if !exists {
                    return Ok(Err("partition returned but the brute force finds none".into()));
                }
                let clique = p.i0.iter().all(|a| p.i0.iter().all(|b| a == b || d.commute(a, b)));
                let apart = p.i1.iter().all(|a| p.i2.iter().all(|b| !d.commute(a, b)));
                let covers = p.i0.union(p.i1).union(p.i2) == d.all_types()
                    && p.i0.intersection(p.i1).is_empty()
                    && p.i0.intersection(p.i2).is_empty()
                    && p.i1.intersection(p.i2).is_empty();
                if !(clique && apart && covers && !p.i1.is_empty() && !p.i2.is_empty()) {
                    return Ok(Err(format!("returned partition {p:?} is not a splitting")));
                }
            }
        }
        Ok(Ok(1))
    }

    fn note(&self, ctx: &Ctx) -> Result<Option<String>> {
        let d = ctx.spec.diagram();
        Ok(Some(match d.ends_classify() {
            Err(e) => format!("not applicable: {e}"),
            Ok(EndsClass::OneEnded) => "one-ended; annulus connected at (n, N) = (1, 4)".into(),
            Ok(EndsClass::Partition(p)) => {
                let mut found = None;
                for (n, big_n) in HEURISTIC_GRID {
                    if !ends_ball_heuristic(ctx.spec, &ctx.center, n, big_n)? {
                        found = Some((n, big_n));
                        break;
                    }
                }
                let parts = format!(
                    "partition I0 = {}, I1 = {}, I2 = {}",
                    d.format_types(p.i0),
                    d.format_types(p.i1),
                    d.format_types(p.i2)
                );
                match found {
                    Some((n, big_n)) => format!("{parts}; annulus disconnected at (n, N) = ({n}, {big_n})"),
                    None => format!("{parts}; no disconnected annulus up to N = 5"),
                }
            }
        }))
    }
}

pub(crate) struct TreeDecomposition;

impl Check for TreeDecomposition {
    type Inst = ();

    fn instances(&self, _ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<Vec<()>> {
        Ok(vec![()])
    }

    fn eval(&self, ctx: &Ctx, _inst: &()) -> Result<Verdict> {
        let Ok(EndsClass::Partition(p)) = ctx.spec.diagram().ends_classify() else {
            return Ok(Ok(0));
        };
        let shape = residue_tree_shape(ctx.spec, &p, &ctx.ball);
        if !shape.is_tree() {
            return Ok(Err(format!("residue graph is not a tree: {shape:?}")));
        }
        Ok(Ok(shape.edges as u64))
    }

    fn note(&self, ctx: &Ctx) -> Result<Option<String>> {
        Ok(Some(match ctx.spec.diagram().ends_classify() {
            Ok(EndsClass::Partition(p)) => {
                let s = residue_tree_shape(ctx.spec, &p, &ctx.ball);
                format!("{} residues, {} edges, {} component(s)", s.vertices, s.edges, s.components)
            }
            Ok(EndsClass::OneEnded) => "one-ended; no residue tree".into(),
            Err(e) => format!("not applicable: {e}"),
        }))
    }
}
