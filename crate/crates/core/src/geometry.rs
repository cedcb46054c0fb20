//! Residues, projections, parallelism, wings, balls and apartment fragments.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chambers::{BuildingSpec, Chamber};
use crate::coxeter::{TypeSet, WeylWord};
use crate::error::{Error, Result};

/// Default member cap for ball enumeration.
pub const DEFAULT_BALL_CAP: usize = 200_000;

/// Balls larger than this never build a pairwise distance table.
const PAIR_TABLE_MAX: usize = 4096;

/// A coset `base · P_J`, with `base` its unique minimal-length element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    base: Chamber,
    types: TypeSet,
}

impl Residue {
    pub fn base(&self) -> &Chamber {
        &self.base
    }

    pub fn types(&self) -> TypeSet {
        self.types
    }

    pub fn rank(&self) -> usize {
        self.types.len()
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Res_{:?}({:?})", self.types, self.base)
    }
}

/// A rank-one residue.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Panel(Residue);

impl Panel {
    pub fn ty(&self) -> usize {
        self.0.types.first().expect("panel has one type")
    }

    pub fn base(&self) -> &Chamber {
        &self.0.base
    }

    pub fn as_residue(&self) -> &Residue {
        &self.0
    }
}

impl fmt::Debug for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<Panel> for Residue {
    fn from(p: Panel) -> Residue {
        p.0
    }
}

/// The wing `X_J(c)`: chambers whose projection onto `Res_J(c)` is `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Wing {
    pub c: Chamber,
    pub types: TypeSet,
}

impl Wing {
    pub fn new(c: Chamber, types: TypeSet) -> Self {
        Wing { c, types }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallCenter {
    Chamber(Chamber),
    Residue(Residue),
}

/// Chambers within a given gallery distance of a chamber or residue, in BFS
/// order (so sorted by distance).
#[derive(Clone, Debug)]
pub struct Ball {
    center: BallCenter,
    radius: usize,
    members: Vec<Chamber>,
    dists: Vec<u32>,
    index: HashMap<Chamber, u32>,
    pairs: OnceLock<Option<PairTable>>,
}

/// Interned Weyl distances between all members of a ball.
#[derive(Clone)]
pub struct PairTable {
    n: usize,
    ids: Vec<u32>,
    values: Vec<WeylWord>,
}

impl PairTable {
    fn build(spec: &BuildingSpec, members: &[Chamber]) -> Self {
        let n = members.len();
        let mut ids = vec![0u32; n * n];
        let mut values = vec![WeylWord::identity()];
        let mut intern: HashMap<WeylWord, u32> = HashMap::from([(WeylWord::identity(), 0)]);
        let d = spec.diagram();
        for a in 0..n {
            for b in (a + 1)..n {
                let w = spec.delta(&members[a], &members[b]);
                let inv = d.weyl_inverse(&w);
                let mut id_of = |w: WeylWord| {
                    *intern.entry(w.clone()).or_insert_with(|| {
                        values.push(w);
                        (values.len() - 1) as u32
                    })
                };
                ids[a * n + b] = id_of(w);
                ids[b * n + a] = id_of(inv);
            }
        }
        PairTable { n, ids, values }
    }

    /// `δ(members[a], members[b])`.
    pub fn get(&self, a: usize, b: usize) -> &WeylWord {
        &self.values[self.ids[a * self.n + b] as usize]
    }
}

impl fmt::Debug for PairTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PairTable({} members, {} distinct values)", self.n, self.values.len())
    }
}

impl Ball {
    /// Pairwise Weyl distances, computed on first use; `None` for balls too
    /// large to tabulate.
    pub fn pair_table(&self, spec: &BuildingSpec) -> Option<&PairTable> {
        self.pairs
            .get_or_init(|| (self.members.len() <= PAIR_TABLE_MAX).then(|| PairTable::build(spec, &self.members)))
            .as_ref()
    }

    /// The pair table if it has already been computed.
    pub fn cached_pair_table(&self) -> Option<&PairTable> {
        self.pairs.get().and_then(Option::as_ref)
    }

    /// `δ(members[a], members[b])`, from the table when there is one.
    pub fn delta_at(&self, spec: &BuildingSpec, a: usize, b: usize) -> WeylWord {
        match self.pair_table(spec) {
            Some(t) => t.get(a, b).clone(),
            None => spec.delta(&self.members[a], &self.members[b]),
        }
    }

    pub fn center(&self) -> &BallCenter {
        &self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Chamber] {
        &self.members
    }

    pub fn contains(&self, c: &Chamber) -> bool {
        self.index.contains_key(c)
    }

    pub fn index_of(&self, c: &Chamber) -> Option<usize> {
        self.index.get(c).map(|&k| k as usize)
    }

    pub fn dist(&self, c: &Chamber) -> Option<usize> {
        self.index.get(c).map(|&k| self.dists[k as usize] as usize)
    }

    pub fn dist_at(&self, k: usize) -> usize {
        self.dists[k] as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Chamber, usize)> {
        self.members.iter().zip(self.dists.iter().map(|&d| d as usize))
    }

    /// Members at distance at most `r`; a prefix of [`members`](Self::members).
    pub fn within(&self, r: usize) -> &[Chamber] {
        let end = self.dists.partition_point(|&d| d as usize <= r);
        &self.members[..end]
    }

    /// Members at exactly distance `r`.
    pub fn layer(&self, r: usize) -> &[Chamber] {
        let start = self.dists.partition_point(|&d| (d as usize) < r);
        let end = self.dists.partition_point(|&d| d as usize <= r);
        &self.members[start..end]
    }
}

/// A gallery as its chamber sequence; its length is the number of steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gallery(pub Vec<Chamber>);

impl Gallery {
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Galleries {
    pub galleries: Vec<Gallery>,
    pub truncated: bool,
}

/// An isometric embedding of a Weyl ball around the identity.
#[derive(Clone, Debug)]
pub struct ApartmentFragment {
    radius: usize,
    elements: Vec<WeylWord>,
    chambers: Vec<Chamber>,
    by_weyl: HashMap<WeylWord, usize>,
    by_chamber: HashMap<Chamber, usize>,
}

impl ApartmentFragment {
    fn new(radius: usize, pairs: Vec<(WeylWord, Chamber)>) -> Self {
        let mut by_weyl = HashMap::with_capacity(pairs.len());
        let mut by_chamber = HashMap::with_capacity(pairs.len());
        let mut elements = Vec::with_capacity(pairs.len());
        let mut chambers = Vec::with_capacity(pairs.len());
        for (k, (w, c)) in pairs.into_iter().enumerate() {
            by_weyl.insert(w.clone(), k);
            by_chamber.insert(c.clone(), k);
            elements.push(w);
            chambers.push(c);
        }
        ApartmentFragment { radius, elements, chambers, by_weyl, by_chamber }
    }

    /// Image of the identity.
    pub fn base(&self) -> &Chamber {
        &self.chambers[0]
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.chambers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chambers.is_empty()
    }

    pub fn get(&self, w: &WeylWord) -> Option<&Chamber> {
        self.by_weyl.get(w).map(|&k| &self.chambers[k])
    }

    pub fn weyl_of(&self, c: &Chamber) -> Option<&WeylWord> {
        self.by_chamber.get(c).map(|&k| &self.elements[k])
    }

    pub fn contains_chamber(&self, c: &Chamber) -> bool {
        self.by_chamber.contains_key(c)
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WeylWord, &Chamber)> {
        self.elements.iter().zip(self.chambers.iter())
    }
}

impl BuildingSpec {
    // ---- residues and projections ----------------------------------------------

    pub fn residue_of(&self, c: &Chamber, j: TypeSet) -> Result<Residue> {
        self.diagram().check_types(j)?;
        self.check_chamber(c)?;
        Ok(self.res(c, j))
    }

    pub(crate) fn res(&self, c: &Chamber, j: TypeSet) -> Residue {
        let (base, _) = self.j_suffix_unchecked(c, j);
        Residue { base, types: j }
    }

    pub fn panel_of(&self, c: &Chamber, i: usize) -> Result<Panel> {
        self.diagram().check_type(i)?;
        self.check_chamber(c)?;
        Ok(self.panel(c, i))
    }

    pub(crate) fn panel(&self, c: &Chamber, i: usize) -> Panel {
        Panel(self.res(c, TypeSet::singleton(i)))
    }

    /// Whether `x ∈ Ch(R)`.
    pub fn in_residue(&self, r: &Residue, x: &Chamber) -> bool {
        self.left_divide(&r.base, x).support().is_subset(r.types)
    }

    /// All chambers of a spherical residue, ordered by exponent vector.
    pub fn chambers_of(&self, r: &Residue) -> Result<Vec<Chamber>> {
        if !self.diagram().is_clique(r.types) {
            return Err(Error::NonSpherical(self.diagram().format_types(r.types)));
        }
        let mut out = vec![r.base.clone()];
        for j in r.types.iter() {
            let mut next = Vec::with_capacity(out.len() * self.thickness(j) as usize);
            for c in &out {
                next.push(c.clone());
                next.extend(self.neighbours(c, j));
            }
            out = next;
        }
        Ok(out)
    }

    pub fn proj_chamber(&self, r: &Residue, c: &Chamber) -> Result<Chamber> {
        self.check_chamber(r.base())?;
        self.check_chamber(c)?;
        Ok(self.proj(r, c))
    }

    /// Gate: `base · (J-prefix of base⁻¹ c)`.
    pub(crate) fn proj(&self, r: &Residue, c: &Chamber) -> Chamber {
        if r.types.is_empty() {
            return r.base.clone();
        }
        let z = self.left_divide(&r.base, c);
        let (prefix, _) = self.j_prefix_unchecked(&z, r.types);
        self.mult_unchecked(&r.base, &prefix)
    }

    /// Gallery distance from `c` to the nearest chamber of `R`.
    pub fn dist_to_residue(&self, r: &Residue, c: &Chamber) -> usize {
        let z = self.left_divide(&r.base, c);
        let (_, rest) = self.j_prefix_unchecked(&z, r.types);
        rest.len()
    }

    /// The residue of `R` formed by the projections of all chambers of `S`.
    ///
    /// Alternating projections reach a pair `p ∈ R`, `q ∈ S` projecting onto
    /// each other; the image is then the residue at `p` whose types lie in
    /// both `R` and `S` and commute with every letter of `δ(p, q)`.
    pub fn proj_residue(&self, r: &Residue, s: &Residue) -> Result<Residue> {
        self.check_chamber(r.base())?;
        self.check_chamber(s.base())?;
        Ok(self.proj_res(r, s))
    }

    pub(crate) fn proj_res(&self, r: &Residue, s: &Residue) -> Residue {
        let (p, q) = self.mutual_projections(r, s);
        let w = self.delta(&p, &q);
        let mut types = TypeSet::EMPTY;
        for j in r.types.intersection(s.types).iter() {
            if w.letters().all(|t| self.diagram().commute(j, t)) {
                types.insert(j);
            }
        }
        self.res(&p, types)
    }

    /// A pair `p ∈ R`, `q ∈ S` with `p = proj_R(q)` and `q = proj_S(p)`.
    pub(crate) fn mutual_projections(&self, r: &Residue, s: &Residue) -> (Chamber, Chamber) {
        let mut p = self.proj(r, &s.base);
        loop {
            let q = self.proj(s, &p);
            let p2 = self.proj(r, &q);
            if p2 == p {
                return (p, q);
            }
            p = p2;
        }
    }

    /// Parallel iff same type `J` and both lie in one residue of type `J ∪ J⊥`.
    pub fn is_parallel(&self, r: &Residue, s: &Residue) -> Result<bool> {
        self.check_chamber(r.base())?;
        self.check_chamber(s.base())?;
        Ok(self.parallel(r, s))
    }

    pub(crate) fn parallel(&self, r: &Residue, s: &Residue) -> bool {
        if r.types != s.types {
            return false;
        }
        let big = r.types.union(self.diagram().perp_unchecked(r.types));
        self.in_residue(&self.res(&r.base, big), &s.base)
    }

    /// The residue of type `i ∪ i⊥` containing the panel.
    pub fn wall_residue(&self, p: &Panel) -> Residue {
        let i = p.ty();
        let j = TypeSet::singleton(i).union(self.diagram().perp_unchecked(TypeSet::singleton(i)));
        self.res(p.base(), j)
    }

    // ---- wings -------------------------------------------------------------

    pub fn wing_contains(&self, w: &Wing, x: &Chamber) -> Result<bool> {
        self.diagram().check_types(w.types)?;
        self.check_chamber(&w.c)?;
        self.check_chamber(x)?;
        Ok(self.in_wing(&w.c, w.types, x))
    }

    /// `x ∈ X_J(c)` iff no `J`-syllable of `c⁻¹ x` is frontable.
    pub(crate) fn in_wing(&self, c: &Chamber, j: TypeSet, x: &Chamber) -> bool {
        let z = self.left_divide(c, x);
        self.frontable_types(&z).intersection(j).is_empty()
    }

    /// Types of the syllables of `z` that can be shuffled to the front.
    pub(crate) fn frontable_types(&self, z: &Chamber) -> TypeSet {
        let d = self.diagram();
        let mut out = TypeSet::EMPTY;
        let mut blocked = TypeSet::EMPTY;
        for s in z.syllables() {
            let t = s.ty as usize;
            if !blocked.contains(t) {
                out.insert(t);
            }
            blocked = blocked.union(d.all_types().difference(d.commuting_with(t)));
            if blocked == d.all_types() {
                break;
            }
        }
        out
    }

    /// Criterion for `X_i(c) ⊆ X_{i2}(c2)`: `c ∈ X_{i2}(c2)`, `c2 ∉ X_i(c)`,
    /// and `i = i2` or `m(i, i2) = inf`. `false` only means the criterion does
    /// not apply.
    pub fn wing_included(&self, c: &Chamber, i: usize, c2: &Chamber, i2: usize) -> Result<bool> {
        self.diagram().check_type(i)?;
        self.diagram().check_type(i2)?;
        self.check_chamber(c)?;
        self.check_chamber(c2)?;
        Ok((i == i2 || !self.diagram().commute(i, i2))
            && self.in_wing(c2, TypeSet::singleton(i2), c)
            && !self.in_wing(c, TypeSet::singleton(i), c2))
    }

    // ---- balls and galleries -------------------------------------------------

    /// Ball around a chamber with the default cap.
    pub fn ball_around(&self, c: &Chamber, n: usize) -> Result<Ball> {
        self.ball(BallCenter::Chamber(c.clone()), n, DEFAULT_BALL_CAP)
    }

    /// All chambers within distance `n` of the center.
    ///
    /// For a residue of non-spherical type the ball would be infinite; it is
    /// then restricted to chambers whose projection onto the residue lies
    /// within distance `n` of its base. Recorded distances are always the
    /// true distances to the residue.
    pub fn ball(&self, center: BallCenter, n: usize, cap: usize) -> Result<Ball> {
        let (res, sources) = match &center {
            BallCenter::Chamber(c) => {
                self.check_chamber(c)?;
                (self.res(c, TypeSet::EMPTY), vec![c.clone()])
            }
            BallCenter::Residue(r) => {
                self.check_chamber(r.base())?;
                let sources = if self.diagram().is_clique(r.types) {
                    self.chambers_of(r)?
                } else {
                    self.residue_ball(r, n, cap)?
                };
                (r.clone(), sources)
            }
        };
        let spherical = self.diagram().is_clique(res.types);
        let mut members = Vec::new();
        let mut dists = Vec::new();
        let mut index = HashMap::new();
        for s in sources {
            if index.len() >= cap {
                return Err(Error::ResourceLimit { cap });
            }
            index.insert(s.clone(), members.len() as u32);
            members.push(s);
            dists.push(0);
        }
        let mut start = 0;
        for d in 0..n {
            let end = members.len();
            for k in start..end {
                let x = members[k].clone();
                for (_, y) in self.all_neighbours(&x) {
                    if index.contains_key(&y) {
                        continue;
                    }
                    if !spherical && self.dist_to_residue(&res, &y) != d + 1 {
                        continue;
                    }
                    if members.len() >= cap {
                        return Err(Error::ResourceLimit { cap });
                    }
                    index.insert(y.clone(), members.len() as u32);
                    members.push(y);
                    dists.push(d as u32 + 1);
                }
            }
            start = end;
        }
        Ok(Ball { center, radius: n, members, dists, index, pairs: OnceLock::new() })
    }

    fn residue_ball(&self, r: &Residue, n: usize, cap: usize) -> Result<Vec<Chamber>> {
        self.residue_chambers_near(r, &r.base, n, cap)
    }

    /// `Ch(R) ∩ B(from, n)` for `from ∈ Ch(R)`, by BFS inside the residue.
    pub fn residue_chambers_near(&self, r: &Residue, from: &Chamber, n: usize, cap: usize) -> Result<Vec<Chamber>> {
        let mut seen = HashSet::from([from.clone()]);
        let mut out = vec![from.clone()];
        let mut start = 0;
        for _ in 0..n {
            let end = out.len();
            for k in start..end {
                let x = out[k].clone();
                for j in r.types.iter() {
                    for y in self.neighbours(&x, j) {
                        if seen.insert(y.clone()) {
                            if out.len() >= cap {
                                return Err(Error::ResourceLimit { cap });
                            }
                            out.push(y);
                        }
                    }
                }
            }
            start = end;
        }
        Ok(out)
    }

    /// First steps of the minimal galleries from `x` to `y`: for every type `t`
    /// that can start such a gallery, the `t`-neighbour of `x` closest to `y`.
    pub(crate) fn first_steps(&self, x: &Chamber, y: &Chamber) -> Vec<(usize, Chamber)> {
        let z = self.left_divide(x, y);
        let front = self.frontable_types(&z);
        let mut out = Vec::with_capacity(front.len());
        for t in front.iter() {
            let exp = z.syllables().iter().find(|s| s.ty as usize == t).expect("frontable").exp;
            out.push((t, self.step(x, t, exp)));
        }
        out
    }

    /// Minimal galleries from `c` to `d` in a deterministic order, at most
    /// `limit` of them.
    pub fn minimal_galleries(&self, c: &Chamber, d: &Chamber, limit: usize) -> Result<Galleries> {
        self.check_chamber(c)?;
        self.check_chamber(d)?;
        let mut out = Galleries { galleries: Vec::new(), truncated: false };
        let mut path = vec![c.clone()];
        self.galleries_rec(d, limit.max(1), &mut path, &mut out);
        Ok(out)
    }

    fn galleries_rec(&self, d: &Chamber, limit: usize, path: &mut Vec<Chamber>, out: &mut Galleries) {
        if out.truncated {
            return;
        }
        let cur = path.last().expect("nonempty").clone();
        if &cur == d {
            if out.galleries.len() == limit {
                out.truncated = true;
            } else {
                out.galleries.push(Gallery(path.clone()));
            }
            return;
        }
        for (_, next) in self.first_steps(&cur, d) {
            path.push(next);
            self.galleries_rec(d, limit, path, out);
            path.pop();
        }
    }

    /// A set is convex iff for every ordered pair every first step of a
    /// minimal gallery stays inside; by induction that covers whole galleries.
    pub fn is_convex(&self, set: &[Chamber], cap: usize) -> Result<bool> {
        if set.len() > cap {
            return Err(Error::ResourceLimit { cap });
        }
        for c in set {
            self.check_chamber(c)?;
        }
        let members: HashSet<&Chamber> = set.iter().collect();
        for x in set {
            for y in set {
                if x == y {
                    continue;
                }
                if self.first_steps(x, y).iter().any(|(_, s)| !members.contains(s)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    // ---- apartments ----------------------------------------------------------

    /// Random isometric fragment of an apartment through `c`, grown over the
    /// Weyl ball in length order. Each new chamber is drawn from the panel of
    /// an already placed neighbour among the candidates consistent with every
    /// placed chamber; in a square the candidate is forced.
    pub fn grow_apartment(&self, c: &Chamber, r: usize, seed: u64) -> Result<ApartmentFragment> {
        self.check_chamber(c)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.diagram();
        let ball = d.weyl_ball(r);
        let mut placed: Vec<(WeylWord, Chamber)> = Vec::with_capacity(ball.len());
        let mut at: HashMap<WeylWord, usize> = HashMap::with_capacity(ball.len());
        for w in ball {
            if w.is_empty() {
                at.insert(w.clone(), 0);
                placed.push((w, c.clone()));
                continue;
            }
            let s = d.right_descents(&w).first().expect("nontrivial element has a descent");
            let u = d.weyl_mult(&w, &WeylWord(smallvec::smallvec![s as u8]));
            let from = &placed[at[&u]].1;
            let w_inv = d.weyl_inverse(&w);
            let targets: Vec<WeylWord> =
                placed.iter().map(|(v, _)| d.weyl_mult(&w_inv, v)).collect();
            let survivors: Vec<Chamber> = self
                .neighbours(from, s)
                .filter(|x| placed.iter().zip(&targets).all(|((_, y), t)| &self.delta(x, y) == t))
                .collect();
            if survivors.is_empty() {
                return Err(Error::GrowthFailure(format!(
                    "no consistent chamber for {}",
                    w.display(d)
                )));
            }
            let x = survivors[rng.gen_range(0..survivors.len())].clone();
            at.insert(w.clone(), placed.len());
            placed.push((w, x));
        }
        let frag = ApartmentFragment::new(r, placed);
        if !self.is_isometric(&frag) {
            return Err(Error::GrowthFailure("fragment is not isometric".into()));
        }
        Ok(frag)
    }

    /// `w ↦ base · φ(w)`, where `φ` replaces each letter `i` of the reduced
    /// word by the syllable `(i, a_i)`.
    pub fn standard_apartment(&self, assignment: &[u16], base: &Chamber, r: usize) -> Result<ApartmentFragment> {
        self.check_chamber(base)?;
        if assignment.len() != self.rank() {
            return Err(Error::BadAssignment(format!(
                "{} exponents for {} generators",
                assignment.len(),
                self.rank()
            )));
        }
        for (i, &a) in assignment.iter().enumerate() {
            if a == 0 || a >= self.thickness(i) {
                return Err(Error::BadAssignment(format!(
                    "exponent {a} for type {} is not in 1..{}",
                    self.diagram().name(i),
                    self.thickness(i)
                )));
            }
        }
        let pairs = self
            .diagram()
            .weyl_ball(r)
            .into_iter()
            .map(|w| {
                let phi = self.phi(assignment, &w);
                let c = self.mult_unchecked(base, &phi);
                (w, c)
            })
            .collect();
        let frag = ApartmentFragment::new(r, pairs);
        if !self.is_isometric(&frag) {
            return Err(Error::BadAssignment("image is not isometric".into()));
        }
        Ok(frag)
    }

    fn phi(&self, assignment: &[u16], w: &WeylWord) -> Chamber {
        let mut c = Chamber::identity();
        for t in w.letters() {
            c = self.step(&c, t, assignment[t]);
        }
        c
    }

    /// `δ(emb u, emb v) = u⁻¹ v` for all pairs.
    pub fn is_isometric(&self, frag: &ApartmentFragment) -> bool {
        let d = self.diagram();
        let inverses: Vec<WeylWord> = frag.elements.iter().map(|u| d.weyl_inverse(u)).collect();
        for (a, x) in frag.chambers.iter().enumerate() {
            for (b, y) in frag.chambers.iter().enumerate().skip(a + 1) {
                if self.delta(x, y) != d.weyl_mult(&inverses[a], &frag.elements[b]) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chambers::fixtures::*;

    fn one(i: usize) -> TypeSet {
        TypeSet::singleton(i)
    }

    /// Projection by brute-force distance minimisation over a spherical residue.
    fn brute_proj(spec: &BuildingSpec, r: &Residue, c: &Chamber) -> Chamber {
        spec.chambers_of(r).unwrap().into_iter().min_by_key(|x| spec.dist(x, c)).unwrap()
    }

    #[test]
    fn residue_of_examples() {
        let d = dihedral();
        let id = Chamber::identity();
        assert_eq!(d.residue_of(&id, TypeSet::full(2)).unwrap().base(), &id);
        let c = ch(&d, &[(0, 1), (1, 1)]);
        let r = d.residue_of(&c, TypeSet::EMPTY).unwrap();
        assert_eq!(r.base(), &c);
        assert_eq!(d.chambers_of(&r).unwrap(), vec![c.clone()]);
        let r = d.residue_of(&c, one(1)).unwrap();
        assert_eq!(r.base(), &ch(&d, &[(0, 1)]));
        // minimal coset element by enumeration
        let members = d.chambers_of(&r).unwrap();
        assert_eq!(members.len(), 3);
        assert_eq!(members.iter().min_by_key(|x| x.len()).unwrap(), r.base());
    }

    #[test]
    fn proj_chamber_examples() {
        let p = pentagon();
        let id = Chamber::identity();
        let panel = p.residue_of(&id, one(0)).unwrap();
        let c = ch(&p, &[(2, 1)]);
        assert_eq!(p.proj_chamber(&panel, &c).unwrap(), id);
        assert_eq!(brute_proj(&p, &panel, &c), id);

        let d = dihedral();
        let panel = d.residue_of(&id, one(0)).unwrap();
        let c = ch(&d, &[(0, 2), (1, 1)]);
        assert_eq!(d.proj_chamber(&panel, &c).unwrap(), ch(&d, &[(0, 2)]));
        assert_eq!(brute_proj(&d, &panel, &c), ch(&d, &[(0, 2)]));
        for x in d.chambers_of(&panel).unwrap() {
            assert_eq!(d.proj_chamber(&panel, &x).unwrap(), x);
        }
    }

    #[test]
    fn proj_residue_examples() {
        let p = pentagon();
        let id = Chamber::identity();
        let r1 = p.residue_of(&id, one(0)).unwrap();
        let s3 = p.residue_of(&id, one(2)).unwrap();
        assert_eq!(p.proj_residue(&r1, &s3).unwrap(), p.residue_of(&id, TypeSet::EMPTY).unwrap());
        let s1 = p.residue_of(&ch(&p, &[(1, 1)]), one(0)).unwrap();
        assert_eq!(p.proj_residue(&r1, &s1).unwrap(), r1);
        let big = p.residue_of(&id, one(0).with(1)).unwrap();
        assert_eq!(p.proj_residue(&big, &r1).unwrap(), r1);
    }

    #[test]
    fn parallel_examples() {
        let p = pentagon();
        let id = Chamber::identity();
        let r1 = p.residue_of(&id, one(0)).unwrap();
        assert!(p.is_parallel(&r1, &r1).unwrap());
        let s = p.residue_of(&ch(&p, &[(1, 1)]), one(0)).unwrap();
        assert!(p.is_parallel(&r1, &s).unwrap());
        let t = p.residue_of(&ch(&p, &[(2, 1)]), one(0)).unwrap();
        assert!(!p.is_parallel(&r1, &t).unwrap());
        // definitional double projection agrees
        assert_ne!(p.proj_residue(&r1, &t).unwrap(), r1);
    }

    #[test]
    fn wall_residue_examples() {
        let d = dihedral();
        let id = Chamber::identity();
        let pa = d.panel_of(&id, 0).unwrap();
        assert_eq!(d.wall_residue(&pa), pa.as_residue().clone());
        let p = pentagon();
        let p1 = p.panel_of(&id, 0).unwrap();
        let wall = p.wall_residue(&p1);
        assert_eq!(wall.types(), [0, 1, 4].into_iter().collect());
        assert_eq!(wall.base(), &id);
        let q1 = p.panel_of(&ch(&p, &[(1, 2)]), 0).unwrap();
        assert!(p.is_parallel(p1.as_residue(), q1.as_residue()).unwrap());
        assert_eq!(p.wall_residue(&q1), wall);
    }

    #[test]
    fn wing_examples() {
        let d = dihedral();
        let id = Chamber::identity();
        let w = Wing::new(id.clone(), one(0));
        assert!(d.wing_contains(&w, &id).unwrap());
        assert!(d.wing_contains(&w, &ch(&d, &[(1, 1)])).unwrap());
        assert!(!d.wing_contains(&w, &ch(&d, &[(0, 1)])).unwrap());
        // X_J(c) = ⋂ X_i(c)
        let p = pentagon();
        let j = one(0).with(2);
        for seed in 0..500 {
            let c = p.random_chamber(4, seed);
            let x = p.random_chamber(6, seed + 10_000);
            let whole = p.wing_contains(&Wing::new(c.clone(), j), &x).unwrap();
            let parts = j.iter().all(|i| p.wing_contains(&Wing::new(c.clone(), one(i)), &x).unwrap());
            assert_eq!(whole, parts, "seed {seed}");
        }
    }

    #[test]
    fn wing_included_examples() {
        let d = dihedral();
        let a1 = ch(&d, &[(0, 1)]);
        let a1b1 = ch(&d, &[(0, 1), (1, 1)]);
        assert!(d.wing_included(&a1b1, 1, &a1, 0).unwrap());
        let ball = d.ball_around(&Chamber::identity(), 4).unwrap();
        for x in ball.members() {
            if d.in_wing(&a1b1, one(1), x) {
                assert!(d.in_wing(&a1, one(0), x));
            }
        }
        assert!(!d.wing_included(&a1, 0, &a1, 0).unwrap());
        let p = pentagon();
        let id = Chamber::identity();
        assert!(!p.wing_included(&ch(&p, &[(2, 1)]), 0, &id, 1).unwrap());
    }

    #[test]
    fn ball_examples() {
        let d = dihedral();
        let id = Chamber::identity();
        let b = d.ball_around(&id, 0).unwrap();
        assert_eq!(b.members(), &[id.clone()]);
        assert_eq!(d.ball_around(&id, 2).unwrap().len(), 13);
        assert_eq!(pentagon().ball_around(&id, 1).unwrap().len(), 11);
        assert!(matches!(
            d.ball(BallCenter::Chamber(id.clone()), 5, 20),
            Err(Error::ResourceLimit { cap: 20 })
        ));
        // residue balls: spherical panel in the tree, radius 1
        let panel = d.residue_of(&id, one(0)).unwrap();
        let rb = d.ball(BallCenter::Residue(panel), 1, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(rb.len(), 3 + 3 * 2);
        assert_eq!(rb.layer(1).len(), 6);
    }

    #[test]
    fn non_spherical_residue_ball_has_true_distances() {
        let p = pentagon();
        let id = Chamber::identity();
        let r = p.residue_of(&id, one(0).with(2)).unwrap();
        let b = p.ball(BallCenter::Residue(r.clone()), 2, DEFAULT_BALL_CAP).unwrap();
        for (x, dist) in b.iter() {
            assert_eq!(p.dist_to_residue(&r, x), dist);
            assert!(p.proj(&r, x).len() <= 2);
        }
    }

    #[test]
    fn minimal_gallery_examples() {
        let d = dihedral();
        let id = Chamber::identity();
        let g = d.minimal_galleries(&id, &id, 5).unwrap();
        assert_eq!(g.galleries.len(), 1);
        assert!(g.galleries[0].is_empty());
        let g = d.minimal_galleries(&id, &ch(&d, &[(0, 1), (1, 1)]), 10).unwrap();
        assert_eq!(g.galleries.len(), 1);
        let sq = square();
        let g = sq.minimal_galleries(&id, &ch(&sq, &[(0, 1), (1, 1)]), 10).unwrap();
        assert_eq!(g.galleries.len(), 2);
        assert!(g.galleries.iter().all(|x| x.len() == 2));
        let g = sq.minimal_galleries(&id, &ch(&sq, &[(0, 1), (1, 1)]), 1).unwrap();
        assert!(g.truncated);
        assert_eq!(g.galleries.len(), 1);
    }

    #[test]
    fn convexity_examples() {
        let d = dihedral();
        let id = Chamber::identity();
        assert!(d.is_convex(&[id.clone()], DEFAULT_BALL_CAP).unwrap());
        assert!(!d.is_convex(&[id.clone(), ch(&d, &[(0, 1), (1, 1)])], DEFAULT_BALL_CAP).unwrap());
        let ball = d.ball_around(&id, 3).unwrap();
        let wing: Vec<Chamber> =
            ball.members().iter().filter(|x| d.in_wing(&id, one(0), x)).cloned().collect();
        assert!(d.is_convex(&wing, DEFAULT_BALL_CAP).unwrap());
    }

    #[test]
    fn apartment_examples() {
        let d = dihedral();
        let id = Chamber::identity();
        let f = d.grow_apartment(&id, 0, 1).unwrap();
        assert_eq!(f.len(), 1);
        let f = d.grow_apartment(&id, 3, 1).unwrap();
        assert_eq!(f.len(), 7);
        assert!(d.is_isometric(&f));

        let p = pentagon();
        let a = p.grow_apartment(&id, 2, 1).unwrap();
        let differs = (2..40).any(|s| {
            let b = p.grow_apartment(&id, 2, s).unwrap();
            assert_eq!(b.base(), &id);
            a.iter().any(|(w, c)| b.get(w) != Some(c))
        });
        assert!(differs);
        for seed in 0..10 {
            let c = p.random_chamber(3, seed);
            let f = p.grow_apartment(&c, 3, seed).unwrap();
            assert_eq!(f.base(), &c);
            assert!(p.is_isometric(&f));
        }
    }

    #[test]
    fn standard_apartment_examples() {
        let d = dihedral();
        let id = Chamber::identity();
        let base = ch(&d, &[(1, 2)]);
        let f = d.standard_apartment(&[1, 1], &base, 0).unwrap();
        assert_eq!(f.chambers(), &[base.clone()]);
        let f = d.standard_apartment(&[1, 1], &id, 3).unwrap();
        let aba = d.diagram().weyl_normalize(&[0, 1, 0]).unwrap();
        assert_eq!(f.get(&aba).unwrap(), &ch(&d, &[(0, 1), (1, 1), (0, 1)]));
        assert!(matches!(d.standard_apartment(&[0, 1], &id, 1), Err(Error::BadAssignment(_))));
        assert!(matches!(d.standard_apartment(&[1], &id, 1), Err(Error::BadAssignment(_))));

        // φ is constant on shuffle classes
        let p = pentagon();
        let dia = p.diagram();
        for w in dia.weyl_ball(3) {
            let letters = w.to_vec();
            for k in 0..letters.len().saturating_sub(1) {
                if dia.commute(letters[k], letters[k + 1]) {
                    let mut swapped = letters.clone();
                    swapped.swap(k, k + 1);
                    let direct = |ls: &[usize]| {
                        let s: Vec<(usize, u32)> = ls.iter().map(|&t| (t, 2)).collect();
                        p.normalize(&s).unwrap()
                    };
                    assert_eq!(direct(&letters), direct(&swapped));
                }
            }
        }
        let f = p.standard_apartment(&[2, 2, 2, 2, 2], &id, 3).unwrap();
        assert!(p.is_isometric(&f));
    }
}
