use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle;
use super::{Check, Ctx, Verdict};
use crate::chambers::Chamber;
use crate::coxeter::TypeSet;
use crate::error::Result;
use crate::geometry::{Residue, Wing};

fn cliques(ctx: &Ctx) -> Vec<TypeSet> {
    let d = ctx.spec.diagram();
    d.all_types().subsets().filter(|j| !j.is_empty() && d.is_clique(*j)).collect()
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("nonempty")
}

/// A random element of `Res_j(c)`, by a short walk inside it.
fn walk_in(ctx: &Ctx, rng: &mut ChaCha8Rng, c: &Chamber, j: TypeSet, steps: usize) -> Chamber {
    let types: Vec<usize> = j.iter().collect();
    let mut x = c.clone();
    if types.is_empty() {
        return x;
    }
    for _ in 0..rng.gen_range(0..=steps) {
        let t = *pick(rng, &types);
        x = ctx.spec.step(&x, t, rng.gen_range(1..ctx.spec.thickness(t)));
    }
    x
}

/// Wing base chambers: all of `B(center, 1)` with every type, plus a sample.
fn wing_bases(ctx: &Ctx, rng: &mut ChaCha8Rng, extra: usize) -> Vec<(Chamber, usize)> {
    let rank = ctx.spec.rank();
    let mut out: Vec<(Chamber, usize)> =
        ctx.near(1).iter().flat_map(|c| (0..rank).map(move |i| (c.clone(), i))).collect();
    if ctx.exhaustive() {
        out = ctx.ball.members().iter().flat_map(|c| (0..rank).map(move |i| (c.clone(), i))).collect();
    } else {
        for _ in 0..extra {
            out.push((pick(rng, ctx.ball.members()).clone(), rng.gen_range(0..rank)));
        }
    }
    out
}

fn fail<T>(msg: String) -> Result<std::result::Result<T, String>> {
    Ok(Err(msg))
}

pub(crate) struct Gate;

impl Check for Gate {
    type Inst = Residue;

    fn instances(&self, ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<Vec<Residue>> {
        Ok(ctx.residues().iter().map(|(r, _)| r.clone()).collect())
    }

    fn eval(&self, ctx: &Ctx, r: &Residue) -> Result<Verdict> {
        let spec = ctx.spec;
        let members = oracle::span(spec, r.base(), r.types());
        let mut count = 0;
        for c in ctx.ball.members() {
            let p = ctx.proj(r, c);
            if oracle::nearest(spec, &members, c) != Some(&p) {
                return fail(format!("projection of {c:?} is {p:?}, not the unique closest chamber"));
            }
            let dp = spec.dist(c, &p);
            for d in &members {
                if spec.dist(c, d) != dp + spec.dist(&p, d) {
                    return fail(format!("gate identity fails for c = {c:?}, d = {d:?}, p = {p:?}"));
                }
                count += 1;
            }
        }
        Ok(Ok(count))
    }
}

pub(crate) struct NestedProj;

#[derive(Serialize, Deserialize)]
pub(crate) struct NestedInst {
    x: Chamber,
    outer: Residue,
    inner: Residue,
}

impl Check for NestedProj {
    type Inst = NestedInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<NestedInst>> {
        let spec = ctx.spec;
        let all = spec.diagram().all_types();
        let mut out = Vec::new();
        if ctx.exhaustive() {
            for y in ctx.near(1) {
                for j in all.subsets() {
                    for j2 in j.subsets() {
                        for x in ctx.ball.members() {
                            out.push(NestedInst { x: x.clone(), outer: spec.res(y, j), inner: spec.res(y, j2) });
                        }
                    }
                }
            }
        }
        let subsets: Vec<TypeSet> = all.subsets().collect();
        for _ in 0..ctx.cfg.trials {
            let y = pick(rng, ctx.ball.members()).clone();
            let j = *pick(rng, &subsets);
            let inner_types: Vec<TypeSet> = j.subsets().collect();
            let j2 = *pick(rng, &inner_types);
            let z = walk_in(ctx, rng, &y, j, 3);
            let x = pick(rng, ctx.ball.members()).clone();
            out.push(NestedInst { x, outer: spec.res(&y, j), inner: spec.res(&z, j2) });
        }
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &NestedInst) -> Result<Verdict> {
        let direct = ctx.proj(&inst.inner, &inst.x);
        let via = ctx.proj(&inst.inner, &ctx.proj(&inst.outer, &inst.x));
        if direct != via {
            return fail(format!("direct projection {direct:?} differs from nested {via:?}"));
        }
        Ok(Ok(1))
    }
}

pub(crate) struct ProductResidue;

#[derive(Serialize, Deserialize)]
pub(crate) struct ProductInst {
    c: Chamber,
    first: TypeSet,
    second: TypeSet,
}

impl Check for ProductResidue {
    type Inst = ProductInst;

    fn instances(&self, ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<Vec<ProductInst>> {
        let d = ctx.spec.diagram();
        let mut pairs = Vec::new();
        for j1 in cliques(ctx) {
            for j2 in d.perp_unchecked(j1).subsets() {
                if d.is_clique(j2) {
                    pairs.push((j1, j2));
                }
            }
        }
        let mut out = Vec::new();
        for c in ctx.ball.members() {
            for &(first, second) in &pairs {
                out.push(ProductInst { c: c.clone(), first, second });
            }
        }
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &ProductInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let whole = oracle::span(spec, &inst.c, inst.first.union(inst.second));
        let a = oracle::span(spec, &inst.c, inst.first);
        let b = oracle::span(spec, &inst.c, inst.second);
        let (ra, rb) = (spec.res(&inst.c, inst.first), spec.res(&inst.c, inst.second));
        let mut seen = std::collections::HashSet::new();
        for x in &whole {
            let pair = (ctx.proj(&ra, x), ctx.proj(&rb, x));
            if !a.contains(&pair.0) || !b.contains(&pair.1) {
                return fail(format!("{x:?} projects outside the factors"));
            }
            if !seen.insert(pair) {
                return fail(format!("{x:?} shares its projection pair with another chamber"));
            }
        }
        if whole.len() != a.len() * b.len() {
            return fail(format!("{} chambers but {} x {} pairs", whole.len(), a.len(), b.len()));
        }
        Ok(Ok(whole.len() as u64))
    }
}

pub(crate) struct ConstantDistance;

#[derive(Serialize, Deserialize)]
pub(crate) struct PairInst {
    first: Residue,
    second: Residue,
}

impl Check for ConstantDistance {
    type Inst = PairInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<PairInst>> {
        let spec = ctx.spec;
        let d = spec.diagram();
        let types = cliques(ctx);
        let mut out = Vec::new();
        for k in 0..ctx.cfg.trials {
            let y = pick(rng, ctx.ball.members()).clone();
            let j = *pick(rng, &types);
            let z = if k % 4 == 3 {
                pick(rng, ctx.ball.members()).clone()
            } else {
                walk_in(ctx, rng, &y, j.union(d.perp_unchecked(j)), 4)
            };
            out.push(PairInst { first: spec.res(&z, j), second: spec.res(&y, j) });
        }
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &PairInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let a = oracle::span(spec, inst.first.base(), inst.first.types());
        let b = oracle::span(spec, inst.second.base(), inst.second.types());
        if !oracle::parallel(spec, &a, &b) {
            return Ok(Ok(0));
        }
        let d0 = a.iter().map(|x| oracle::set_dist(spec, &b, x)).min().expect("nonempty");
        for x in &a {
            let dx = oracle::set_dist(spec, &b, x);
            if dx != d0 {
                return fail(format!("{x:?} is at distance {dx} from the parallel residue, not {d0}"));
            }
        }
        Ok(Ok(a.len() as u64))
    }
}

pub(crate) struct ParallelCriterion;

impl Check for ParallelCriterion {
    type Inst = Residue;

    fn instances(&self, ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<Vec<Residue>> {
        Ok(ctx.residues().iter().map(|(r, _)| r.clone()).collect())
    }

    fn eval(&self, ctx: &Ctx, r: &Residue) -> Result<Verdict> {
        let spec = ctx.spec;
        let a = oracle::span(spec, r.base(), r.types());
        let mut count = 0;
        for (s, b) in ctx.residues().iter().filter(|(s, _)| s.rank() == r.rank()) {
            let fast = spec.parallel(r, s);
            let slow = oracle::parallel(spec, &a, b);
            if fast != slow {
                return fail(format!("against {s:?}: criterion says {fast}, definition says {slow}"));
            }
            if r.rank() == 1 {
                let mut images: Vec<&Chamber> = b.iter().filter_map(|x| oracle::nearest(spec, &a, x)).collect();
                images.sort();
                images.dedup();
                if images.len() >= 2 && !fast {
                    return fail(format!("{s:?} has distinct projections but is not parallel"));
                }
            }
            count += 1;
        }
        Ok(Ok(count))
    }
}

pub(crate) struct ParallelEquivalence;

impl Check for ParallelEquivalence {
    type Inst = Residue;

    fn instances(&self, ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<Vec<Residue>> {
        Ok(ctx.residues().iter().filter(|(r, _)| r.rank() == 1).map(|(r, _)| r.clone()).collect())
    }

    fn eval(&self, ctx: &Ctx, a: &Residue) -> Result<Verdict> {
        let spec = ctx.spec;
        let panels: Vec<&Residue> =
            ctx.residues().iter().filter(|(r, _)| r.types() == a.types()).map(|(r, _)| r).collect();
        if !spec.parallel(a, a) {
            return fail("not parallel to itself".into());
        }
        let row: Vec<bool> = panels.iter().map(|b| spec.parallel(a, b)).collect();
        let mut count = 1;
        for (b, &ab) in panels.iter().zip(&row) {
            if spec.parallel(b, a) != ab {
                return fail(format!("asymmetric with {b:?}"));
            }
            if ab {
                for (c, &ac) in panels.iter().zip(&row) {
                    if spec.parallel(b, c) != ac {
                        return fail(format!("parallel to {b:?} but they disagree on {c:?}"));
                    }
                    count += 1;
                }
            }
        }
        Ok(Ok(count))
    }
}

pub(crate) struct WingConvexity;

#[derive(Serialize, Deserialize)]
pub(crate) struct WingInst {
    c: Chamber,
    i: usize,
}

impl Check for WingConvexity {
    type Inst = WingInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<WingInst>> {
        Ok(wing_bases(ctx, rng, 4).into_iter().map(|(c, i)| WingInst { c, i }).collect())
    }

    fn eval(&self, ctx: &Ctx, inst: &WingInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let wing = Wing::new(inst.c.clone(), TypeSet::singleton(inst.i));
        let mut set = Vec::new();
        for x in ctx.ball.members() {
            let fast = spec.wing_contains(&wing, x)?;
            if fast != oracle::in_wing(spec, &inst.c, inst.i, x) {
                return fail(format!("membership of {x:?} disagrees with the oracle"));
            }
            if fast {
                set.push(x);
            }
        }
        // first steps of minimal galleries between members stay in the wing;
        // induction along the gallery covers every chamber on it
        let mut count = 0;
        for x in &set {
            // only neighbours outside the wing can witness a violation
            let outside: Vec<Chamber> = spec
                .all_neighbours(x)
                .map(|(_, z)| z)
                .filter(|z| !oracle::in_wing(spec, &inst.c, inst.i, z))
                .collect();
            for y in &set {
                let d = spec.dist(x, y);
                for z in &outside {
                    if spec.dist(z, y) + 1 == d {
                        return fail(format!("minimal gallery from {x:?} to {y:?} leaves the wing at {z:?}"));
                    }
                }
                count += 1;
            }
        }
        Ok(Ok(count))
    }
}

pub(crate) struct WingInclusion;

#[derive(Serialize, Deserialize)]
pub(crate) enum InclusionInst {
    Basic { c: Chamber, types: TypeSet },
    Included { c: Chamber, i: usize, c2: Chamber, i2: usize },
}

impl Check for WingInclusion {
    type Inst = InclusionInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<InclusionInst>> {
        let spec = ctx.spec;
        let d = spec.diagram();
        let mut out = Vec::new();
        for c in ctx.near(1) {
            for types in cliques(ctx) {
                out.push(InclusionInst::Basic { c: c.clone(), types });
            }
        }
        for _ in 0..ctx.cfg.trials {
            let c2 = pick(rng, ctx.near(ctx.cfg.radius.saturating_sub(1))).clone();
            let i2 = rng.gen_range(0..spec.rank());
            let c = walk_in(ctx, rng, &c2, d.all_types(), 3);
            let opts: Vec<usize> = (0..spec.rank()).filter(|&j| j == i2 || !d.commute(i2, j)).collect();
            let i = *pick(rng, &opts);
            out.push(InclusionInst::Included { c, i, c2, i2 });
        }
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &InclusionInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let d = spec.diagram();
        match inst {
            InclusionInst::Basic { c, types } => {
                let perp = d.perp_unchecked(*types);
                let res = oracle::span(spec, c, *types);
                let wing = Wing::new(c.clone(), *types);
                for x in ctx.ball.members() {
                    let fast = spec.wing_contains(&wing, x)?;
                    let direct = oracle::nearest(spec, &res, x) == Some(c);
                    let meet = types.iter().all(|i| oracle::in_wing(spec, c, i, x));
                    if fast != direct || direct != meet {
                        return fail(format!("at {x:?}: wing {fast}, closest {direct}, intersection {meet}"));
                    }
                    if oracle::same_residue(spec, c, types.union(perp), x)
                        && direct != oracle::same_residue(spec, c, perp, x)
                    {
                        return fail(format!("{x:?} breaks the wall-residue identity"));
                    }
                }
                Ok(Ok(ctx.ball.len() as u64))
            }
            InclusionInst::Included { c, i, c2, i2 } => {
                let claimed = spec.wing_included(c, *i, c2, *i2)?;
                let hyp = oracle::in_wing(spec, c2, *i2, c)
                    && !oracle::in_wing(spec, c, *i, c2)
                    && (i == i2 || !d.commute(*i, *i2));
                if claimed != hyp {
                    return fail(format!("criterion returned {claimed}, hypothesis is {hyp}"));
                }
                if !claimed {
                    return Ok(Ok(0));
                }
                for x in ctx.ball.members() {
                    if oracle::in_wing(spec, c, *i, x) && !oracle::in_wing(spec, c2, *i2, x) {
                        return fail(format!("{x:?} is in the smaller wing only"));
                    }
                }
                Ok(Ok(ctx.ball.len() as u64))
            }
        }
    }
}

pub(crate) struct ConcatGallery;

#[derive(Serialize, Deserialize)]
pub(crate) struct ConcatInst {
    c: Chamber,
    i: usize,
    x: Chamber,
    y: Chamber,
}

impl Check for ConcatGallery {
    type Inst = ConcatInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<ConcatInst>> {
        let spec = ctx.spec;
        let mut out = Vec::new();
        for i in 0..spec.rank() {
            let c = ctx.center.clone();
            let (inside, outside): (Vec<&Chamber>, Vec<&Chamber>) =
                ctx.ball.members().iter().partition(|x| oracle::in_wing(spec, &c, i, x));
            for x in &inside {
                for y in &outside {
                    out.push(ConcatInst { c: c.clone(), i, x: (*x).clone(), y: (*y).clone() });
                }
            }
        }
        let mut k = 0;
        while k < ctx.cfg.trials {
            let c = pick(rng, ctx.ball.members()).clone();
            let i = rng.gen_range(0..spec.rank());
            let x = pick(rng, ctx.ball.members()).clone();
            let y = pick(rng, ctx.ball.members()).clone();
            if oracle::in_wing(spec, &c, i, &x) && !oracle::in_wing(spec, &c, i, &y) {
                out.push(ConcatInst { c, i, x, y });
            }
            k += 1;
        }
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &ConcatInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let one = TypeSet::singleton(inst.i);
        let wall = spec.res(&inst.c, one.union(spec.diagram().perp_unchecked(one)));
        let (p, q) = (ctx.proj(&wall, &inst.x), ctx.proj(&wall, &inst.y));
        let direct = spec.dist(&inst.x, &inst.y);
        let pieces = spec.dist(&inst.x, &p) + spec.dist(&p, &q) + spec.dist(&q, &inst.y);
        if direct != pieces {
            return fail(format!("distance {direct} but the concatenation has length {pieces}"));
        }
        Ok(Ok(1))
    }
}

pub(crate) struct BallsInWings;

#[derive(Serialize, Deserialize)]
pub(crate) enum BallsInst {
    ResidueBall { r: Residue, y: Chamber, i: usize, pick: usize },
    ResidueWing { c: Chamber, types: TypeSet, i: usize },
}

impl Check for BallsInWings {
    type Inst = BallsInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<BallsInst>> {
        let spec = ctx.spec;
        let d = spec.diagram();
        let mut types = cliques(ctx);
        types.push(TypeSet::EMPTY);
        let all: Vec<TypeSet> = d.all_types().subsets().collect();
        let mut out = Vec::new();
        for _ in 0..ctx.cfg.trials {
            let x = pick(rng, ctx.near(1)).clone();
            let j = *pick(rng, &types);
            let y = pick(rng, ctx.near(ctx.cfg.radius.saturating_sub(1))).clone();
            out.push(BallsInst::ResidueBall { r: spec.res(&x, j), y, i: rng.gen_range(0..spec.rank()), pick: rng.gen() });
            let c = pick(rng, ctx.ball.members()).clone();
            let types = *pick(rng, &all);
            let outside: Vec<usize> = (0..spec.rank()).filter(|&i| !types.contains(i)).collect();
            if let Some(&i) = outside.choose(rng) {
                out.push(BallsInst::ResidueWing { c, types, i });
            }
        }
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &BallsInst) -> Result<Verdict> {
        let spec = ctx.spec;
        match inst {
            BallsInst::ResidueBall { r, y, i, pick } => {
                let one = TypeSet::singleton(*i);
                let wall = spec.res(y, one.union(spec.diagram().perp_unchecked(one)));
                let rp = spec.proj_residue(&wall, r)?;
                let rp_chambers = oracle::span(spec, rp.base(), rp.types());
                let c = &rp_chambers[pick % rp_chambers.len()];
                if !rp_chambers.iter().all(|z| oracle::in_wing(spec, c, *i, z)) {
                    return Ok(Ok(0));
                }
                let r_chambers = oracle::span(spec, r.base(), r.types());
                let n = oracle::set_dist(spec, &r_chambers, c);
                if n + 1 > ctx.cfg.radius {
                    return Ok(Ok(0));
                }
                let near = oracle::bfs(spec, &r_chambers, n + 1, ctx.cfg.limits.ball_cap)?;
                for (x, &k) in &near {
                    let inside = oracle::in_wing(spec, c, *i, x);
                    if k <= n && !inside {
                        return fail(format!("{x:?} at distance {k} from R is outside X_i({c:?})"));
                    }
                    if !inside && !rp_chambers.iter().any(|z| oracle::same_residue(spec, z, one, x)) {
                        return fail(format!("{x:?} at distance {k} is in neither the wing nor a boundary panel"));
                    }
                }
                Ok(Ok(near.len() as u64))
            }
            BallsInst::ResidueWing { c, types, i } => {
                let mut count = 0;
                for x in ctx.ball.members() {
                    if oracle::same_residue(spec, c, *types, x) {
                        if !oracle::in_wing(spec, c, *i, x) {
                            return fail(format!("{x:?} in the residue lies outside X_i(c)"));
                        }
                        count += 1;
                    }
                }
                Ok(Ok(count))
            }
        }
    }
}

pub(crate) struct PartitionIntoWings;

impl Check for PartitionIntoWings {
    type Inst = WingInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<WingInst>> {
        Ok(wing_bases(ctx, rng, ctx.cfg.trials.min(64)).into_iter().map(|(c, i)| WingInst { c, i }).collect())
    }

    fn eval(&self, ctx: &Ctx, inst: &WingInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let chambers = oracle::panel(spec, &inst.c, inst.i);
        let wings: Vec<Wing> = chambers.iter().map(|d| Wing::new(d.clone(), TypeSet::singleton(inst.i))).collect();
        for x in ctx.ball.members() {
            let mut owners = Vec::new();
            for w in &wings {
                if spec.wing_contains(w, x)? {
                    owners.push(&w.c);
                }
            }
            if owners.len() != 1 {
                return fail(format!("{x:?} lies in {} wings of the panel", owners.len()));
            }
            if oracle::nearest(spec, &chambers, x) != Some(owners[0]) {
                return fail(format!("{x:?} assigned to the wing of {:?}", owners[0]));
            }
        }
        Ok(Ok(ctx.ball.len() as u64))
    }
}
