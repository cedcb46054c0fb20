use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle;
use super::{seeds, Check, Ctx, Verdict};
use crate::autos::{Automorphism, PanelPermutation, UTarget};
use crate::chambers::Chamber;
use crate::coxeter::{EndsClass, TypeSet};
use crate::error::{Error, Result};
use crate::geometry::{Ball, Panel, Residue};

fn fail<T>(msg: String) -> Result<std::result::Result<T, String>> {
    Ok(Err(msg))
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("nonempty")
}

/// `Ok(None)` when the construction legitimately has no room (thin panels).
fn room<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NoRoom(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn valid(ctx: &Ctx, a: &Automorphism, ball: &Ball, what: &str) -> Option<String> {
    if std::ptr::eq(ball, &ctx.ball) {
        // reused across instances, so worth tabulating
        ball.pair_table(ctx.spec);
    }
    let report = ctx.spec.is_valid_on_ball(a, ball);
    if report.valid {
        None
    } else {
        Some(format!("{what} is not an automorphism on the ball: {:?}", report.violation))
    }
}

fn random_perm(ctx: &Ctx, rng: &mut ChaCha8Rng, panel: &Panel) -> Result<PanelPermutation> {
    let q = ctx.spec.thickness(panel.ty());
    let identity: Vec<u16> = (0..q).collect();
    let mut images = identity.clone();
    while images == identity {
        images.shuffle(rng);
    }
    PanelPermutation::new(ctx.spec, panel.clone(), images)
}

/// Moves `B(R, n)` must not: does `a` fix every listed chamber?
fn fixes_all(ctx: &Ctx, a: &Automorphism, chambers: &[Chamber]) -> Result<Option<Chamber>> {
    ctx.spec.first_moved(a, chambers)
}

fn random_clique(ctx: &Ctx, rng: &mut ChaCha8Rng) -> TypeSet {
    let d = ctx.spec.diagram();
    let all: Vec<TypeSet> = d.all_types().subsets().filter(|j| d.is_clique(*j)).collect();
    *pick(rng, &all)
}

#[derive(Serialize, Deserialize)]
pub(crate) enum ExtInst {
    Single { seed: u64 },
    GroupLaw { seed: u64 },
    Disjoint { seed: u64 },
}

pub(crate) struct PanelExtension;

impl Check for PanelExtension {
    type Inst = ExtInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<ExtInst>> {
        let n = ctx.cfg.trials;
        let mut out: Vec<ExtInst> = seeds(rng, n).into_iter().map(|seed| ExtInst::Single { seed }).collect();
        out.extend(seeds(rng, n.min(200)).into_iter().map(|seed| ExtInst::GroupLaw { seed }));
        out.extend(seeds(rng, n.min(200)).into_iter().map(|seed| ExtInst::Disjoint { seed }));
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &ExtInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let inner = ctx.near(ctx.cfg.radius.saturating_sub(1));
        match *inst {
            ExtInst::Single { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let c = pick(&mut rng, inner).clone();
                let i = rng.gen_range(0..spec.rank());
                let panel = spec.panel_of(&c, i)?;
                let pi = random_perm(ctx, &mut rng, &panel)?;
                let f = spec.panel_extension(&panel, pi.clone())?;
                if let Some(msg) = valid(ctx, &f, &ctx.ball, "panel extension") {
                    return fail(msg);
                }
                let chambers = oracle::panel(spec, panel.base(), i);
                for x in spec.support_in(&f, ctx.ball.members())? {
                    let d = oracle::nearest(spec, &chambers, &x).expect("panels are gated");
                    if pi.fixes(spec, d) {
                        return fail(format!("{x:?} moved although its wing base {d:?} is fixed"));
                    }
                }
                Ok(Ok(1))
            }
            ExtInst::GroupLaw { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut make = || -> Result<Automorphism> {
                    let mut parts = Vec::new();
                    for _ in 0..rng.gen_range(1..=2) {
                        let c = pick(&mut rng, inner).clone();
                        let panel = spec.panel_of(&c, rng.gen_range(0..spec.rank()))?;
                        let pi = random_perm(ctx, &mut rng, &panel)?;
                        parts.push(spec.panel_extension(&panel, pi)?);
                    }
                    Ok(Automorphism::compose(parts))
                };
                let (f, g, h) = (make()?, make()?, make()?);
                let left = f.after(&g).after(&h);
                let right = f.after(&g.after(&h));
                let balanced = f.after(&f.inverse());
                for x in ctx.ball.members() {
                    if left.apply(spec, x)? != right.apply(spec, x)? {
                        return fail(format!("composition is not associative at {x:?}"));
                    }
                    if balanced.apply(spec, x)? != *x {
                        return fail(format!("f after its inverse moves {x:?}"));
                    }
                    if f.apply_inverse(spec, &f.apply(spec, x)?)? != *x {
                        return fail(format!("apply_inverse does not undo apply at {x:?}"));
                    }
                }
                Ok(Ok(1))
            }
            ExtInst::Disjoint { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let c = pick(&mut rng, inner).clone();
                let i = rng.gen_range(0..spec.rank());
                let chambers = oracle::panel(spec, &c, i);
                let mut two: Vec<&Chamber> = chambers.iter().collect();
                two.shuffle(&mut rng);
                let (Some(a), Some(b)) = (
                    room(spec.v_i_sample(two[0], i, rng.gen()))?,
                    room(spec.v_i_sample(two[1], i, rng.gen()))?,
                ) else {
                    return Ok(Ok(0));
                };
                let sa = spec.support_in(&a, ctx.ball.members())?;
                let sb = spec.support_in(&b, ctx.ball.members())?;
                if let Some(x) = sa.iter().find(|x| sb.contains(x)) {
                    return fail(format!("supports meet at {x:?}"));
                }
                if let Some(x) = spec.first_difference(&a.after(&b), &b.after(&a), ctx.ball.members())? {
                    return fail(format!("disjointly supported elements do not commute at {x:?}"));
                }
                Ok(Ok(1))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SeedInst {
    seed: u64,
}

fn seed_instances(rng: &mut ChaCha8Rng, n: usize) -> Vec<SeedInst> {
    seeds(rng, n).into_iter().map(|seed| SeedInst { seed }).collect()
}

/// A product of panel extensions fixing every chamber of the finite or
/// infinite residue `fixed`: at each panel the permutation fixes the single
/// projection of `fixed`; panels parallel to one inside `fixed` are skipped.
fn fixing_product(
    ctx: &Ctx,
    rng: &mut ChaCha8Rng,
    fixed: &Residue,
    pool: &[Chamber],
    factors: usize,
) -> Result<Option<Automorphism>> {
    let spec = ctx.spec;
    let mut parts = Vec::new();
    let mut tries = 0;
    while parts.len() < factors && tries < 40 {
        tries += 1;
        let y = pick(rng, pool).clone();
        let panel = spec.panel_of(&y, rng.gen_range(0..spec.rank()))?;
        let image = spec.proj_residue(panel.as_residue(), fixed)?;
        if image.rank() != 0 {
            continue;
        }
        let Some(pi) = room(spec.random_perm_fixing(&panel, image.base(), rng))? else {
            return Ok(None);
        };
        parts.push(spec.panel_extension(&panel, pi)?);
    }
    Ok((!parts.is_empty()).then(|| Automorphism::compose(parts)))
}

pub(crate) struct FixDecomposition;

impl Check for FixDecomposition {
    type Inst = SeedInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<SeedInst>> {
        Ok(seed_instances(rng, ctx.cfg.trials))
    }

    fn eval(&self, ctx: &Ctx, inst: &SeedInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let c = pick(&mut rng, ctx.near(1)).clone();
        let i = rng.gen_range(0..spec.rank());
        let one = TypeSet::singleton(i);
        let wall = spec.residue_of(&c, one.union(spec.diagram().perp_unchecked(one)))?;
        let factors = rng.gen_range(1..=3);
        let Some(g) = fixing_product(ctx, &mut rng, &wall, ctx.ball.members(), factors)? else {
            return Ok(Ok(0));
        };
        let certify = ctx.cfg.radius + ctx.ball.dist(&c).unwrap_or(0) + 2;
        let mut parts = Vec::new();
        for d in oracle::panel(spec, &c, i) {
            let part = spec.wing_restrict(&g, &d, i, certify)?;
            if let Some(msg) = valid(ctx, &part, &ctx.ball, "wing restriction") {
                return fail(msg);
            }
            for x in ctx.ball.members() {
                let inside = oracle::in_wing(spec, &d, i, x);
                let want = if inside { g.apply(spec, x)? } else { x.clone() };
                if part.apply(spec, x)? != want {
                    return fail(format!("restriction to the wing of {d:?} is wrong at {x:?}"));
                }
            }
            parts.push(part);
        }
        let product = Automorphism::compose(parts);
        if let Some(x) = spec.first_difference(&product, &g, ctx.ball.members())? {
            return fail(format!("product of wing restrictions differs from g at {x:?}"));
        }
        Ok(Ok(1))
    }
}

pub(crate) struct NonAbelian;

#[derive(Serialize, Deserialize)]
pub(crate) struct NonAbInst {
    c: Chamber,
    i: usize,
    seed: u64,
}

impl NonAbelian {
    /// Two elements of `U_j(c)` that fail to commute, following the panel
    /// argument: a swap of two other chambers of the `j`-panel and a wing
    /// element at one of them.
    fn pair(ctx: &Ctx, c: &Chamber, j: usize, seed: u64) -> Result<Option<(Automorphism, Automorphism)>> {
        let spec = ctx.spec;
        let others: Vec<Chamber> = oracle::panel(spec, c, j).into_iter().filter(|d| d != c).collect();
        if others.len() < 2 {
            return Ok(None);
        }
        let panel = spec.panel_of(c, j)?;
        let u = spec.panel_extension(&panel, PanelPermutation::transposition(spec, panel.clone(), &others[0], &others[1])?)?;
        let Some(v) = room(spec.v_i_sample(&others[0], j, seed))? else {
            return Ok(None);
        };
        Ok(Some((u, v)))
    }
}

impl Check for NonAbelian {
    type Inst = NonAbInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<NonAbInst>> {
        let d = ctx.spec.diagram();
        let all = d.all_types();
        let mut out = Vec::new();
        for c in ctx.near(1) {
            for i in 0..ctx.spec.rank() {
                let one = TypeSet::singleton(i);
                if one.union(d.perp_unchecked(one)) != all {
                    out.push(NonAbInst { c: c.clone(), i, seed: rng.gen() });
                }
            }
        }
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &NonAbInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let d = spec.diagram();
        let one = TypeSet::singleton(inst.i);
        let j = (0..spec.rank())
            .find(|&j| !one.union(d.perp_unchecked(one)).contains(j))
            .expect("instances satisfy the hypothesis");
        let witness = ctx.ball_around(&inst.c, ctx.cfg.radius.max(4))?;
        // U_i(c) fixes the wing; U_j(c) ≤ V_i(c) fixes its complement
        for (ty, inside) in [(inst.i, true), (j, false)] {
            let Some((u, v)) = Self::pair(ctx, &inst.c, ty, inst.seed)? else {
                return Ok(Ok(0));
            };
            for (name, a) in [("u", &u), ("v", &v)] {
                if let Some(msg) = valid(ctx, a, &ctx.ball, name) {
                    return fail(msg);
                }
                for x in witness.members() {
                    if oracle::in_wing(spec, &inst.c, inst.i, x) == inside && a.apply(spec, x)? != *x {
                        return fail(format!("{name} for type {ty} moves {x:?}, outside its group"));
                    }
                }
            }
            if spec.first_difference(&u.after(&v), &v.after(&u), witness.members())?.is_none() {
                return fail(format!("elements for type {ty} commute on the ball"));
            }
        }
        Ok(Ok(2))
    }
}

pub(crate) struct StrongTransitivity;

#[derive(Serialize, Deserialize)]
pub(crate) enum StrongInst {
    Match { seed: u64 },
    PanelRestriction { seed: u64 },
}

impl Check for StrongTransitivity {
    type Inst = StrongInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<StrongInst>> {
        let n = ctx.cfg.trials;
        let mut out: Vec<StrongInst> = seeds(rng, n).into_iter().map(|seed| StrongInst::Match { seed }).collect();
        out.extend(seeds(rng, n).into_iter().map(|seed| StrongInst::PanelRestriction { seed }));
        Ok(out)
    }

    fn eval(&self, ctx: &Ctx, inst: &StrongInst) -> Result<Verdict> {
        let spec = ctx.spec;
        match *inst {
            StrongInst::Match { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let r = ctx.cfg.radius.min(3);
                let c = pick(&mut rng, ctx.near(1)).clone();
                let a = spec.grow_apartment(&c, r, rng.gen())?;
                let a2 = if rng.gen_bool(0.5) {
                    spec.grow_apartment(&c, r, rng.gen())?
                } else {
                    let assignment: Vec<u16> =
                        (0..spec.rank()).map(|i| rng.gen_range(1..spec.thickness(i))).collect();
                    spec.standard_apartment(&assignment, &c, r)?
                };
                let g = spec.strongtrans_match(&a, &a2, &c, r)?;
                if g.apply(spec, &c)? != c {
                    return fail("the base chamber is moved".into());
                }
                let image: std::collections::HashSet<Chamber> =
                    a.chambers().iter().map(|x| g.apply(spec, x)).collect::<Result<_>>()?;
                if let Some(x) = a2.chambers().iter().find(|x| !image.contains(*x)) {
                    return fail(format!("{x:?} of the target fragment is not covered"));
                }
                let ball = ctx.ball_around(&c, ctx.cfg.radius)?;
                if let Some(msg) = valid(ctx, &g, &ball, "strong transitivity element") {
                    return fail(msg);
                }
                Ok(Ok(1))
            }
            StrongInst::PanelRestriction { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = pick(&mut rng, ctx.near(1)).clone();
                let n = rng.gen_range(0..=ctx.cfg.radius.saturating_sub(1).min(2));
                let around = ctx.ball_around(&x, n + 1)?;
                let mut candidates = Vec::new();
                for c in around.layer(n) {
                    for i in 0..spec.rank() {
                        let one = TypeSet::singleton(i);
                        let wall = spec.res(c, one.union(spec.diagram().perp_unchecked(one)));
                        if spec.proj(&wall, &x) == *c {
                            candidates.push((c.clone(), i));
                        }
                    }
                }
                candidates.shuffle(&mut rng);
                candidates.truncate(rng.gen_range(1..=3));
                let mut targets = Vec::new();
                for (c, i) in candidates {
                    let panel = spec.panel_of(&c, i)?;
                    let Some(pi) = room(spec.random_perm_fixing(&panel, &c, &mut rng))? else {
                        return Ok(Ok(0));
                    };
                    targets.push(UTarget { c, ty: i, pi });
                }
                let g = spec.panel_restriction_element(&x, &targets)?;
                for y in around.members() {
                    let mut want = y.clone();
                    for t in &targets {
                        if oracle::same_residue(spec, &t.c, TypeSet::singleton(t.ty), y) {
                            want = t.pi.image(spec, y)?;
                        }
                    }
                    if g.apply(spec, y)? != want {
                        return fail(format!("{y:?} is not mapped as prescribed"));
                    }
                }
                let ball = ctx.ball_around(&x, ctx.cfg.radius)?;
                if let Some(msg) = valid(ctx, &g, &ball, "prescribed element") {
                    return fail(msg);
                }
                Ok(Ok(1))
            }
        }
    }
}

pub(crate) struct Commutator;

impl Check for Commutator {
    type Inst = SeedInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<SeedInst>> {
        Ok(seed_instances(rng, ctx.cfg.trials))
    }

    fn eval(&self, ctx: &Ctx, inst: &SeedInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let d = spec.diagram();
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let c = pick(&mut rng, ctx.near(1)).clone();
        let i = rng.gen_range(0..spec.rank());
        let opposite: Vec<usize> = (0..spec.rank()).filter(|&j| !d.commute(i, j) && j != i).collect();
        let Some(&j) = opposite.choose(&mut rng) else {
            return Ok(Ok(0));
        };
        let sigma = spec.panel_of(&c, i)?;
        let chambers = oracle::panel(spec, &c, i);
        let others: Vec<&Chamber> = chambers.iter().filter(|x| **x != c).collect();
        let c2 = (*pick(&mut rng, &others)).clone();
        let y = spec.step(&c2, j, rng.gen_range(1..spec.thickness(j)));
        let mut g = spec.transporter(&c, &y)?;
        if rng.gen_bool(0.5) {
            // precompose with an element fixing c
            let pool = ctx.ball_around(&c, 2)?;
            let base = spec.residue_of(&c, TypeSet::EMPTY)?;
            if let Some(s) = fixing_product(ctx, &mut rng, &base, pool.members(), 2)? {
                g = g.after(&s);
            }
        }
        let mut parts = Vec::new();
        for e in chambers.iter().filter(|x| **x != c && **x != c2) {
            if let Some(v) = room(spec.v_i_sample(e, i, rng.gen()))? {
                parts.push(v);
            }
        }
        let h = Automorphism::compose(parts);
        // x is queried at g⁻¹(z) and g x⁻¹ g⁻¹(z) for z in the ball
        let reach = ctx.cfg.radius + ctx.ball.dist(&c).unwrap_or(0);
        let radius = reach + spec.dist(&c, &y) + 2;
        let x = spec.commutator_witness(&g, &sigma, &c, &c2, &h, radius)?;
        let comm = Automorphism::commutator(&x, &g);
        if let Some(z) = spec.first_difference(&comm, &h, ctx.ball.members())? {
            return fail(format!("[x, g] differs from h at {z:?}"));
        }
        if let Some(msg) = valid(ctx, &x, &ctx.ball, "commutator witness") {
            return fail(msg);
        }
        Ok(Ok(1))
    }
}

pub(crate) struct Peeling;

impl Check for Peeling {
    type Inst = SeedInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<SeedInst>> {
        Ok(seed_instances(rng, ctx.cfg.trials))
    }

    fn eval(&self, ctx: &Ctx, inst: &SeedInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let c = pick(&mut rng, ctx.near(1)).clone();
        let r = spec.residue_of(&c, random_clique(ctx, &mut rng))?;
        let n = rng.gen_range(0..=1);
        let around = ctx.residue_ball(&r, n + 1)?;
        let mut admissible = Vec::new();
        for (x, k) in around.iter() {
            if k >= n {
                for i in 0..spec.rank() {
                    if spec.is_admissible(x, i, &r)? {
                        admissible.push((x.clone(), i));
                    }
                }
            }
        }
        admissible.shuffle(&mut rng);
        let mut parts = Vec::new();
        for (x, i) in admissible.into_iter().take(rng.gen_range(1..=3)) {
            let panel = spec.panel_of(&x, i)?;
            let Some(pi) = room(spec.random_perm_fixing(&panel, &x, &mut rng))? else {
                return Ok(Ok(0));
            };
            parts.push(spec.panel_extension(&panel, pi)?);
        }
        let h = Automorphism::compose(parts);
        let (g, certified) = spec.peel(&h, &r, n, n + 2)?;
        if !certified {
            return fail("peeling step not certified".into());
        }
        let big = ctx.residue_ball(&r, n + 2)?;
        if let Some(x) = fixes_all(ctx, &g.after(&h), big.within(n + 1))? {
            return fail(format!("g h moves {x:?} within distance {} of R", n + 1));
        }
        if let Some(msg) = valid(ctx, &g, &big, "peeled generator product") {
            return fail(msg);
        }
        if let Some(msg) = valid(ctx, &g, &ctx.ball, "peeled generator product") {
            return fail(msg);
        }
        Ok(Ok(1))
    }
}

pub(crate) struct FixGenerators;

impl Check for FixGenerators {
    type Inst = SeedInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<SeedInst>> {
        Ok(seed_instances(rng, ctx.cfg.trials))
    }

    fn eval(&self, ctx: &Ctx, inst: &SeedInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let c = pick(&mut rng, ctx.near(1)).clone();
        let r = spec.residue_of(&c, random_clique(ctx, &mut rng))?;
        let pool = ctx.residue_ball(&r, 2)?;
        let factors = rng.gen_range(1..=3);
        let Some(h) = fixing_product(ctx, &mut rng, &r, pool.members(), factors)? else {
            return Ok(Ok(0));
        };
        let big_n = ctx.cfg.radius.min(3);
        let us = spec.approximate_by_generators(&h, &r, big_n)?;
        let mut residual = h;
        for u in &us {
            if let Some(msg) = valid(ctx, u, &ctx.ball, "generator product") {
                return fail(msg);
            }
            residual = u.after(&residual);
        }
        let target = ctx.residue_ball(&r, big_n)?;
        if let Some(x) = fixes_all(ctx, &residual, target.members())? {
            return fail(format!("residual moves {x:?} within distance {big_n} of R"));
        }
        Ok(Ok(us.len() as u64))
    }
}

pub(crate) struct LocalSplitting;

impl Check for LocalSplitting {
    type Inst = SeedInst;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<SeedInst>> {
        match ctx.spec.diagram().ends_classify() {
            Ok(EndsClass::Partition(_)) => Ok(seed_instances(rng, ctx.cfg.trials)),
            _ => Ok(Vec::new()),
        }
    }

    fn eval(&self, ctx: &Ctx, inst: &SeedInst) -> Result<Verdict> {
        let spec = ctx.spec;
        let EndsClass::Partition(p) = spec.diagram().ends_classify()? else {
            return Ok(Ok(0));
        };
        let r = spec.residue_of(&ctx.center, p.i0)?;
        let Some((u1, u2)) = room(spec.local_splitting_generators(&r, &p, 3, inst.seed))? else {
            return Ok(Ok(0));
        };
        let members = ctx.ball.members();
        let mut supports = Vec::new();
        for (k, a) in u1.gens.iter().chain(&u2.gens).enumerate() {
            if let Some(msg) = valid(ctx, a, &ctx.ball, &format!("generator {k}")) {
                return fail(msg);
            }
            supports.push(spec.support_in(a, members)?);
        }
        let n1 = u1.gens.len();
        let mut count = 0;
        for (k, a) in u1.gens.iter().enumerate() {
            for (l, b) in u2.gens.iter().enumerate() {
                if let Some(x) = supports[k].iter().find(|x| supports[n1 + l].contains(x)) {
                    return fail(format!("supports of U1[{k}] and U2[{l}] meet at {x:?}"));
                }
                if let Some(x) = spec.first_difference(&a.after(b), &b.after(a), members)? {
                    return fail(format!("U1[{k}] and U2[{l}] do not commute at {x:?}"));
                }
                count += 1;
            }
        }
        Ok(Ok(count))
    }

    fn note(&self, ctx: &Ctx) -> Result<Option<String>> {
        Ok(match ctx.spec.diagram().ends_classify() {
            Ok(EndsClass::Partition(_)) => None,
            Ok(EndsClass::OneEnded) => Some("no splitting partition; nothing to check".into()),
            Err(e) => Some(format!("not applicable: {e}")),
        })
    }
}
