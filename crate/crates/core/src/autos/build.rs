//! Constructive procedures producing automorphisms.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Automorphism, Ladder, Node, PanelPermutation};
use crate::chambers::{BuildingSpec, Chamber};
use crate::coxeter::{Partition, TypeSet, WeylWord};
use crate::error::{Error, Result};
use crate::geometry::{ApartmentFragment, BallCenter, Panel, Residue, DEFAULT_BALL_CAP};

/// One prescribed restriction for [`BuildingSpec::panel_restriction_element`]: act as
/// `pi` on the `ty`-panel of `c`, which `pi` must fix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UTarget {
    pub c: Chamber,
    pub ty: usize,
    pub pi: PanelPermutation,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub label: String,
    pub gens: Vec<Automorphism>,
    pub provenance: String,
}

/// Radius around `c` on which [`BuildingSpec::commutator_witness`] checks
/// the support of `h`.
pub const SUPPORT_CHECK_RADIUS: usize = 4;

impl BuildingSpec {
    /// The extension of `pi` to the whole building.
    pub fn panel_extension(&self, sigma: &Panel, pi: PanelPermutation) -> Result<Automorphism> {
        if pi.panel() != sigma {
            return Err(Error::NotABijection("permutation acts on a different panel".into()));
        }
        Ok(Automorphism::from_node(Node::PanelExt(pi)))
    }

    /// A uniformly random non-identity permutation of the panel fixing `fixed`.
    pub(crate) fn random_perm_fixing<R: Rng>(
        &self,
        panel: &Panel,
        fixed: &Chamber,
        rng: &mut R,
    ) -> Result<PanelPermutation> {
        let q = self.thickness(panel.ty());
        let k0 = super::index_in(self, panel, fixed)
            .ok_or_else(|| Error::PreconditionFailed("fixed chamber outside the panel".into()))?;
        let others: Vec<u16> = (0..q).filter(|&k| k != k0).collect();
        if others.len() < 2 {
            return Err(Error::NoRoom(format!("panel of thickness {q} has no nontrivial permutation fixing a chamber")));
        }
        loop {
            let mut shuffled = others.clone();
            shuffled.shuffle(rng);
            if shuffled != others {
                let mut images: Vec<u16> = (0..q).collect();
                for (&from, &to) in others.iter().zip(&shuffled) {
                    images[from as usize] = to;
                }
                return PanelPermutation::new(self, panel.clone(), images);
            }
        }
    }

    /// An automorphism taking `from` to `to`: panel transpositions along a
    /// minimal gallery.
    pub fn transporter(&self, from: &Chamber, to: &Chamber) -> Result<Automorphism> {
        let galleries = self.minimal_galleries(from, to, 1)?;
        let path = &galleries.galleries[0].0;
        let mut parts = Vec::with_capacity(path.len());
        for pair in path.windows(2) {
            let t = self.delta(&pair[0], &pair[1]).to_vec()[0];
            let panel = self.panel(&pair[0], t);
            let pi = PanelPermutation::transposition(self, panel.clone(), &pair[0], &pair[1])?;
            parts.insert(0, self.panel_extension(&panel, pi)?);
        }
        Ok(Automorphism::compose(parts))
    }

    /// `g` on `X_i(d)`, the identity elsewhere. Requires `g` to fix
    /// `Res_{i ∪ i⊥}(d)`, which is checked on its chambers within
    /// `certify_radius` of `d`; the result answers only queries that close.
    pub fn wing_restrict(&self, g: &Automorphism, d: &Chamber, i: usize, certify_radius: usize) -> Result<Automorphism> {
        self.diagram().check_type(i)?;
        self.check_chamber(d)?;
        let one = TypeSet::singleton(i);
        let wall = self.res(d, one.union(self.diagram().perp_unchecked(one)));
        for x in self.residue_chambers_near(&wall, d, certify_radius, DEFAULT_BALL_CAP)? {
            if g.eval(self, x.clone(), false)? != x {
                return Err(Error::PreconditionFailed(format!(
                    "{x:?} in the wall-residue of {d:?} is moved"
                )));
            }
        }
        Ok(Automorphism::from_node(Node::WingRestrict { g: g.clone(), d: d.clone(), ty: i, radius: certify_radius }))
    }

    /// A non-identity element supported in `X_i(c)`: a panel extension at a
    /// panel `Res_j(d)`, with `j = i` or `m(i, j) = inf`, moving only chambers
    /// `e` of `X_i(c)` with `X_j(e) ⊆ X_i(c)`.
    pub fn v_i_sample(&self, c: &Chamber, i: usize, seed: u64) -> Result<Automorphism> {
        self.diagram().check_type(i)?;
        self.check_chamber(c)?;
        if !self.is_thick() {
            return Err(Error::PreconditionFailed("building is not thick".into()));
        }
        let one = TypeSet::singleton(i);
        let js: Vec<usize> =
            (0..self.rank()).filter(|&j| j == i || !self.diagram().commute(i, j)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let mut d = c.clone();
            for _ in 0..rng.gen_range(0..=2) {
                let t = rng.gen_range(0..self.rank());
                d = self.step(&d, t, rng.gen_range(1..self.thickness(t)));
            }
            if !self.in_wing(c, one, &d) {
                continue;
            }
            let j = js[rng.gen_range(0..js.len())];
            let panel = self.panel(&d, j);
            let p = self.proj(panel.as_residue(), c);
            let movable: Vec<Chamber> = self
                .chambers_of(panel.as_residue())?
                .into_iter()
                .filter(|e| e != &p && self.in_wing(c, one, e))
                .collect();
            if movable.len() < 2 || !movable.iter().all(|e| self.wing_included(e, j, c, i).unwrap_or(false)) {
                continue;
            }
            let mut shuffled = movable.clone();
            while shuffled == movable {
                shuffled.shuffle(&mut rng);
            }
            let pairs: Vec<(Chamber, Chamber)> = movable.into_iter().zip(shuffled).collect();
            let pi = PanelPermutation::from_pairs(self, panel.clone(), &pairs)?;
            return self.panel_extension(&panel, pi);
        }
        Err(Error::NoRoom(format!("no suitable panel found near {c:?}")))
    }

    /// An element acting as `pi_s` on each target panel `Res_{i_s}(c_s)` and
    /// fixing the rest of `B(x, n + 1)`, where all `c_s` are at distance `n`
    /// from `x` and project `x` onto their wall-residues to themselves.
    pub fn panel_restriction_element(&self, x: &Chamber, targets: &[UTarget]) -> Result<Automorphism> {
        self.check_chamber(x)?;
        if targets.is_empty() {
            return Ok(Automorphism::identity());
        }
        let n = self.dist(x, &targets[0].c);
        let mut seen = HashSet::new();
        let mut parts = Vec::with_capacity(targets.len());
        for t in targets {
            self.check_chamber(&t.c)?;
            self.diagram().check_type(t.ty)?;
            if !seen.insert((t.c.clone(), t.ty)) {
                return Err(Error::PreconditionFailed(format!("target ({:?}, {}) repeated", t.c, t.ty)));
            }
            if self.dist(x, &t.c) != n {
                return Err(Error::PreconditionFailed(format!("{:?} is not at distance {n}", t.c)));
            }
            let one = TypeSet::singleton(t.ty);
            let wall = self.res(&t.c, one.union(self.diagram().perp_unchecked(one)));
            if self.proj(&wall, x) != t.c {
                return Err(Error::PreconditionFailed(format!(
                    "{x:?} does not project onto {:?} in its wall-residue",
                    t.c
                )));
            }
            let panel = self.panel(&t.c, t.ty);
            if t.pi.panel() != &panel || !t.pi.fixes(self, &t.c) {
                return Err(Error::PreconditionFailed(format!("permutation for {:?} must fix it", t.c)));
            }
            parts.push(self.panel_extension(&panel, t.pi.clone())?);
        }
        let g = Automorphism::compose(parts);

        let ball = self.ball_around(x, n + 1)?;
        let mut prescribed: HashMap<Chamber, Chamber> = HashMap::new();
        for t in targets {
            for e in self.chambers_of(t.pi.panel().as_residue())? {
                let img = t.pi.image(self, &e)?;
                prescribed.insert(e, img);
            }
        }
        for y in ball.members() {
            let gy = g.eval(self, y.clone(), false)?;
            let want = prescribed.get(y).unwrap_or(y);
            if &gy != want {
                return Err(Error::PreconditionFailed(format!("result moves {y:?} to {gy:?}")));
            }
        }
        for (e, img) in &prescribed {
            if &g.eval(self, e.clone(), false)? != img {
                return Err(Error::PreconditionFailed(format!("result does not realise the permutation at {e:?}")));
            }
        }
        Ok(g)
    }

    /// Builds `g` fixing `c` with `g(A) ⊇ A2` on `B(c, radius)`, layer by
    /// layer: each step is a [`panel_restriction_element`](Self::panel_restriction_element)
    /// swapping the missing chambers of `A2` into the current image of `A`.
    pub fn strongtrans_match(
        &self,
        a: &ApartmentFragment,
        a2: &ApartmentFragment,
        c: &Chamber,
        radius: usize,
    ) -> Result<Automorphism> {
        if a.base() != c || a2.base() != c {
            return Err(Error::PreconditionFailed("fragments must be based at the chamber".into()));
        }
        if a.radius() < radius || a2.radius() < radius {
            return Err(Error::PreconditionFailed(format!("fragment radius below {radius}")));
        }
        let d = self.diagram();
        let mut steps: Vec<Automorphism> = Vec::new();
        let mut current = Automorphism::identity();
        for n in 0..radius {
            let image: HashSet<Chamber> = a
                .iter()
                .filter(|(w, _)| w.len() <= n + 1)
                .map(|(_, x)| current.eval(self, x.clone(), false))
                .collect::<Result<_>>()?;
            let mut targets = Vec::new();
            for (w, x2) in a2.iter().filter(|(w, _)| w.len() == n + 1) {
                if image.contains(x2) {
                    continue;
                }
                let s = d.right_descents(w).first().expect("nonempty word");
                let ws = d.weyl_mult(w, &WeylWord(smallvec::smallvec![s as u8]));
                let y = a2.get(&ws).expect("shorter element in fragment").clone();
                let x = current.eval(self, a.get(w).expect("same Weyl ball").clone(), false)?;
                if self.dist(&x, &y) != 1 || x == *x2 {
                    return Err(Error::MatchFailure(format!("no partner for {:?} at {:?}", x2, y)));
                }
                let panel = self.panel(&y, s);
                let pi = PanelPermutation::transposition(self, panel, &x, x2)?;
                targets.push(UTarget { c: y, ty: s, pi });
            }
            if targets.is_empty() {
                continue;
            }
            let g = self.panel_restriction_element(c, &targets).map_err(|e| Error::MatchFailure(e.to_string()))?;
            steps.insert(0, g);
            current = Automorphism::compose(steps.clone());
        }
        if current.eval(self, c.clone(), false)? != *c {
            return Err(Error::MatchFailure("result moves the base chamber".into()));
        }
        let image: HashSet<Chamber> = a
            .iter()
            .filter(|(w, _)| w.len() <= radius)
            .map(|(_, x)| current.eval(self, x.clone(), false))
            .collect::<Result<_>>()?;
        if let Some((_, x2)) = a2.iter().find(|(w, x2)| w.len() <= radius && !image.contains(*x2)) {
            return Err(Error::MatchFailure(format!("{x2:?} not covered")));
        }
        Ok(current)
    }

    /// `(c, i)` is admissible for `R` when, with `R'` the projection of `R`
    /// onto `Res_{i ∪ i⊥}(c)`, `c ∈ Ch(R')` and `Ch(R') ⊆ X_i(c)`.
    pub fn is_admissible(&self, c: &Chamber, i: usize, r: &Residue) -> Result<bool> {
        self.check_chamber(c)?;
        self.diagram().check_type(i)?;
        let one = TypeSet::singleton(i);
        let wall = self.res(c, one.union(self.diagram().perp_unchecked(one)));
        let rp = self.proj_res(&wall, r);
        // X_i(c) meets the wall-residue in Res_{i⊥}(c), so the inclusion
        // amounts to i ∉ type(R')
        Ok(self.in_residue(&rp, c) && !rp.types().contains(i))
    }

    /// One peeling step: for `h` fixing `B(R, n)`, builds `g` from panel
    /// extensions at admissible pairs at distance `n`, one per parallelism
    /// class of panels in `B(R, n + 1)` moved by `h`, such that `g ∘ h` fixes
    /// `B(R, n + 1)`. The flag reports that this was verified, together with
    /// validity of `g` on `B(R, ball_radius)`.
    pub fn peel(&self, h: &Automorphism, r: &Residue, n: usize, ball_radius: usize) -> Result<(Automorphism, bool)> {
        if !self.diagram().is_clique(r.types()) {
            return Err(Error::PreconditionFailed("residue is not spherical".into()));
        }
        if ball_radius < n + 2 {
            return Err(Error::PreconditionFailed(format!("ball radius {ball_radius} below {}", n + 2)));
        }
        let ball = self.ball(BallCenter::Residue(r.clone()), n + 1, DEFAULT_BALL_CAP)?;
        if let Some(x) = self.first_moved(h, ball.within(n))? {
            return Err(Error::PreconditionFailed(format!("{x:?} within distance {n} is moved")));
        }
        let mut moved_panels: BTreeSet<Panel> = BTreeSet::new();
        for y in ball.layer(n + 1) {
            if h.eval(self, y.clone(), false)? == *y {
                continue;
            }
            // only panels leading back to distance n; R projects onto a
            // single chamber of those
            for t in 0..self.rank() {
                let p = self.panel(y, t);
                if self.chambers_of(p.as_residue())?.iter().any(|e| ball.dist(e).is_some_and(|d| d <= n)) {
                    moved_panels.insert(p);
                }
            }
        }
        let mut classes: BTreeMap<(Residue, usize), Panel> = BTreeMap::new();
        for p in moved_panels {
            classes.entry((self.wall_residue(&p), p.ty())).or_insert(p);
        }
        let mut parts = Vec::with_capacity(classes.len());
        for panel in classes.into_values() {
            let image = self.proj_res(panel.as_residue(), r);
            if image.rank() != 0 {
                return Err(Error::NotAdmissible(format!("{r:?} projects onto all of {panel:?}")));
            }
            let c = image.base().clone();
            if self.dist_to_residue(r, &c) != n || !self.is_admissible(&c, panel.ty(), r)? {
                return Err(Error::NotAdmissible(format!("({c:?}, {}) for {panel:?}", panel.ty())));
            }
            let mut pairs = Vec::new();
            for e in self.chambers_of(panel.as_residue())? {
                let img = h.eval(self, e.clone(), true)?;
                pairs.push((e, img));
            }
            let pi = PanelPermutation::from_pairs(self, panel.clone(), &pairs)?;
            if !pi.fixes(self, &c) {
                return Err(Error::NotAdmissible(format!("{c:?} is moved")));
            }
            parts.push(self.panel_extension(&panel, pi)?);
        }
        let g = Automorphism::compose(parts);
        let gh = g.after(h);
        let mut certified = self.first_moved(&gh, ball.members())?.is_none();
        if certified && !g.is_identity_node() {
            let big = self.ball(BallCenter::Residue(r.clone()), ball_radius, DEFAULT_BALL_CAP)?;
            certified = self.is_valid_on_ball(&g, &big).valid;
        }
        Ok((g, certified))
    }

    /// Iterated peeling: `u_0, …, u_{N-1}` with `u_{N-1} ∘ … ∘ u_0 ∘ h`
    /// fixing `B(R, N)`.
    pub fn approximate_by_generators(&self, h: &Automorphism, r: &Residue, big_n: usize) -> Result<Vec<Automorphism>> {
        let chambers = self.chambers_of(r)?;
        if let Some(x) = self.first_moved(h, &chambers)? {
            return Err(Error::PreconditionFailed(format!("{x:?} in the residue is moved")));
        }
        let mut residual = h.clone();
        let mut out = Vec::with_capacity(big_n);
        for n in 0..big_n {
            let (u, certified) = self.peel(&residual, r, n, n + 2)?;
            if !certified {
                return Err(Error::NotAdmissible(format!("peeling step {n} not certified")));
            }
            residual = u.after(&residual);
            out.push(u);
        }
        Ok(out)
    }

    /// The ladder `x` with `[x, g] = h`, for `g(c)` `j`-adjacent to `c2`
    /// with `m(i, j) = inf` and `h` supported away from `X_i(c) ∪ X_i(c2)`.
    /// `x` answers queries within `radius` of `c`; the support of `h` is
    /// checked on `B(c, min(radius, SUPPORT_CHECK_RADIUS))`.
    pub fn commutator_witness(
        &self,
        g: &Automorphism,
        sigma: &Panel,
        c: &Chamber,
        c2: &Chamber,
        h: &Automorphism,
        radius: usize,
    ) -> Result<Automorphism> {
        let i = sigma.ty();
        if c == c2 || !self.in_residue(sigma.as_residue(), c) || !self.in_residue(sigma.as_residue(), c2) {
            return Err(Error::PreconditionFailed("c, c2 must be distinct chambers of the panel".into()));
        }
        let gc = g.eval(self, c.clone(), false)?;
        let step = self.delta(&gc, c2);
        match step.to_vec().as_slice() {
            [j] if *j != i && !self.diagram().commute(i, *j) => {}
            _ => {
                return Err(Error::PreconditionFailed(format!(
                    "g(c) = {gc:?} is not adjacent to {c2:?} along a type opposite to {i}"
                )))
            }
        }
        let ball = self.ball_around(c, radius.min(SUPPORT_CHECK_RADIUS))?;
        for y in ball.members() {
            let p = self.proj(sigma.as_residue(), y);
            if (&p == c || &p == c2) && h.eval(self, y.clone(), false)? != *y {
                return Err(Error::PreconditionFailed(format!("h moves {y:?}")));
            }
        }
        Ok(Automorphism::from_node(Node::Ladder(Ladder {
            g: g.clone(),
            h: h.clone(),
            panel: sigma.clone(),
            c: c.clone(),
            c2: c2.clone(),
            radius,
        })))
    }

    /// `count` generators each of `U_1`, `U_2`: panel extensions realising
    /// `U_i(c)` for `c ∈ Ch(R)` and `i` in `I_1`, resp. `I_2`.
    pub fn local_splitting_generators(
        &self,
        r: &Residue,
        partition: &Partition,
        count: usize,
        seed: u64,
    ) -> Result<(GeneratorSet, GeneratorSet)> {
        self.diagram().check_partition(partition)?;
        if r.types() != partition.i0 {
            return Err(Error::InvalidPartition("residue type differs from I0".into()));
        }
        let chambers = self.chambers_of(r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut make = |part: TypeSet, label: &str| -> Result<GeneratorSet> {
            let types: Vec<usize> = part.iter().collect();
            let mut gens = Vec::with_capacity(count);
            for _ in 0..count {
                let c = &chambers[rng.gen_range(0..chambers.len())];
                let i = types[rng.gen_range(0..types.len())];
                let panel = self.panel(c, i);
                let pi = self.random_perm_fixing(&panel, c, &mut rng)?;
                gens.push(self.panel_extension(&panel, pi)?);
            }
            Ok(GeneratorSet {
                label: format!("{label} for {}", self.diagram().format_types(part)),
                gens,
                provenance: "local_splitting_generators".into(),
            })
        };
        let u1 = make(partition.i1, "U1")?;
        let u2 = make(partition.i2, "U2")?;
        Ok((u1, u2))
    }
}
