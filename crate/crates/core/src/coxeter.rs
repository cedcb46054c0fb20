//! Right-angled Coxeter diagrams and arithmetic in their Weyl groups.
//!
//! Generators are identified by their index in the diagram's generator list.
//! That order is fixed at construction and defines the canonical normal form
//! of every word downstream: among all commutation-rearrangements of a reduced
//! word, the one whose letter sequence is lexicographically least.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported generating set; type sets are 32-bit masks.
pub const MAX_GENERATORS: usize = 32;

/// A subset of the generating set, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeSet(u32);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);

    pub fn from_bits(bits: u32) -> Self {
        TypeSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        TypeSet(1 << i)
    }

    /// The first `n` generators.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            TypeSet(u32::MAX)
        } else {
            TypeSet((1u32 << n) - 1)
        }
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn with(self, i: usize) -> Self {
        TypeSet(self.0 | (1 << i))
    }

    pub fn union(self, other: TypeSet) -> Self {
        TypeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: TypeSet) -> Self {
        TypeSet(self.0 & other.0)
    }

    pub fn difference(self, other: TypeSet) -> Self {
        TypeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: TypeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = TypeSet> {
        let mask = self.0 as u64;
        let mut sub: u64 = 0;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = TypeSet(sub as u32);
            // standard "next subset of mask" step
            sub = (sub.wrapping_sub(mask)) & mask;
            if sub == 0 {
                done = true;
            }
            Some(out)
        })
    }
}

impl FromIterator<usize> for TypeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = TypeSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Order of the product of two distinct generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeOrder {
    Two,
    Infinite,
}

impl fmt::Display for EdgeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeOrder::Two => f.write_str("2"),
            EdgeOrder::Infinite => f.write_str("inf"),
        }
    }
}

/// A Coxeter matrix entry as it comes from user input, before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawOrder {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEntry {
    pub i: String,
    pub j: String,
    pub m: RawOrder,
}

/// Unvalidated diagram description.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawDiagram {
    pub generators: Vec<String>,
    pub entries: Vec<RawEntry>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoxeterDiagram {
    names: Vec<String>,
    /// `commutes[i]` holds every `j != i` with `m(i, j) = 2`.
    commutes: Vec<TypeSet>,
}

impl fmt::Debug for CoxeterDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoxeterDiagram")
            .field("generators", &self.names)
            .field("commutes", &self.commutes)
            .finish()
    }
}

/// Checks a raw description and builds the diagram. Generator order is the
/// order of appearance in `raw.generators`.
pub fn validate_diagram(raw: &RawDiagram) -> Result<CoxeterDiagram> {
    let n = raw.generators.len();
    if n == 0 {
        return Err(Error::EmptyDiagram);
    }
    if n > MAX_GENERATORS {
        return Err(Error::TooManyGenerators(n));
    }
    let mut seen = HashSet::new();
    for g in &raw.generators {
        if !seen.insert(g.as_str()) {
            return Err(Error::DuplicateGenerator(g.clone()));
        }
    }
    let index = |name: &str| {
        raw.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownType(name.to_string()))
    };
    let mut order: Vec<Vec<Option<EdgeOrder>>> = vec![vec![None; n]; n];
    for e in &raw.entries {
        let (i, j) = (index(&e.i)?, index(&e.j)?);
        let m = match e.m {
            RawOrder::Finite(2) => EdgeOrder::Two,
            RawOrder::Infinite => EdgeOrder::Infinite,
            RawOrder::Finite(k) => {
                return Err(Error::BadOrder { i: e.i.clone(), j: e.j.clone(), order: k.to_string() })
            }
        };
        if i == j {
            return Err(Error::BadOrder { i: e.i.clone(), j: e.j.clone(), order: m.to_string() });
        }
        if order[i][j].is_some() {
            return Err(Error::DuplicatePair(e.i.clone(), e.j.clone()));
        }
        order[i][j] = Some(m);
        order[j][i] = Some(m);
    }
    let mut commutes = vec![TypeSet::EMPTY; n];
    for i in 0..n {
        for j in (i + 1)..n {
            match order[i][j] {
                None => {
                    return Err(Error::MissingPair(
                        raw.generators[i].clone(),
                        raw.generators[j].clone(),
                    ))
                }
                Some(EdgeOrder::Two) => {
                    commutes[i].insert(j);
                    commutes[j].insert(i);
                }
                Some(EdgeOrder::Infinite) => {}
            }
        }
    }
    Ok(CoxeterDiagram { names: raw.generators.clone(), commutes })
}

impl CoxeterDiagram {
    /// Builds a diagram directly from generator names and the list of
    /// commuting pairs; every other pair gets `m = inf`.
    pub fn from_commuting_pairs(names: &[&str], pairs: &[(usize, usize)]) -> Result<Self> {
        let mut entries = Vec::new();
        for i in 0..names.len() {
            for j in (i + 1)..names.len() {
                let m = if pairs.contains(&(i, j)) || pairs.contains(&(j, i)) {
                    RawOrder::Finite(2)
                } else {
                    RawOrder::Infinite
                };
                entries.push(RawEntry { i: names[i].into(), j: names[j].into(), m });
            }
        }
        validate_diagram(&RawDiagram {
            generators: names.iter().map(|s| s.to_string()).collect(),
            entries,
        })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownType(name.to_string()))
    }

    pub fn all_types(&self) -> TypeSet {
        TypeSet::full(self.rank())
    }

    /// `m(i, j)` for distinct generators.
    pub fn order(&self, i: usize, j: usize) -> EdgeOrder {
        if self.commutes[i].contains(j) {
            EdgeOrder::Two
        } else {
            EdgeOrder::Infinite
        }
    }

    /// True iff `i != j` and `m(i, j) = 2`.
    #[inline]
    pub fn commute(&self, i: usize, j: usize) -> bool {
        self.commutes[i].contains(j)
    }

    /// Generators commuting with `i` (excluding `i`).
    #[inline]
    pub fn commuting_with(&self, i: usize) -> TypeSet {
        self.commutes[i]
    }

    pub fn check_types(&self, j: TypeSet) -> Result<()> {
        if j.is_subset(self.all_types()) {
            Ok(())
        } else {
            let bad = j.difference(self.all_types()).first().unwrap_or(0);
            Err(Error::UnknownType(format!("#{bad}")))
        }
    }

    pub fn check_type(&self, i: usize) -> Result<()> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(Error::UnknownType(format!("#{i}")))
        }
    }

    /// True iff the non-commutation graph (edges where `m = inf`) is connected.
    pub fn is_irreducible(&self) -> bool {
        self.rank() >= 1 && self.is_connected(self.all_types(), false)
    }

    /// `W_J` is finite iff the generators in `J` pairwise commute.
    pub fn is_spherical_subset(&self, j: TypeSet) -> Result<bool> {
        self.check_types(j)?;
        Ok(self.is_clique(j))
    }

    pub fn is_spherical(&self) -> bool {
        self.is_clique(self.all_types())
    }

    pub(crate) fn is_clique(&self, j: TypeSet) -> bool {
        j.iter().all(|i| j.difference(TypeSet::singleton(i)).is_subset(self.commutes[i]))
    }

    /// `J^perp`: generators outside `J` commuting with every element of `J`.
    pub fn perp(&self, j: TypeSet) -> Result<TypeSet> {
        self.check_types(j)?;
        Ok(self.perp_unchecked(j))
    }

    pub(crate) fn perp_unchecked(&self, j: TypeSet) -> TypeSet {
        let mut out = self.all_types().difference(j);
        for i in j.iter() {
            out = out.intersection(self.commutes[i]);
        }
        out
    }

    /// Connectivity of the subgraph induced on `vertices`, using commutation
    /// edges (`commuting = true`) or non-commutation edges.
    pub(crate) fn is_connected(&self, vertices: TypeSet, commuting: bool) -> bool {
        match vertices.first() {
            None => true,
            Some(start) => self.component(vertices, start, commuting) == vertices,
        }
    }

    pub(crate) fn component(&self, vertices: TypeSet, start: usize, commuting: bool) -> TypeSet {
        let mut seen = TypeSet::singleton(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let nbrs = if commuting {
                self.commutes[v]
            } else {
                self.all_types().difference(self.commutes[v]).difference(TypeSet::singleton(v))
            };
            for w in nbrs.intersection(vertices).difference(seen).iter() {
                seen.insert(w);
                stack.push(w);
            }
        }
        seen
    }

    pub fn format_types(&self, j: TypeSet) -> String {
        let names: Vec<&str> = j.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    // ---- Weyl group arithmetic -------------------------------------------------

    /// Canonical reduced form of a product of generators.
    pub fn weyl_normalize(&self, letters: &[usize]) -> Result<WeylWord> {
        for &s in letters {
            self.check_type(s)?;
        }
        Ok(self.weyl_normalize_iter(letters.iter().map(|&s| s as u8)))
    }

    pub(crate) fn weyl_normalize_iter(&self, letters: impl IntoIterator<Item = u8>) -> WeylWord {
        let mut word: SmallVec<[u8; 16]> = SmallVec::new();
        for s in letters {
            self.weyl_push(&mut word, s);
        }
        canonical_order(&mut word, |&s| s, |a, b| self.commute(a as usize, b as usize));
        WeylWord(word)
    }

    /// Appends `s` to a reduced word, cancelling it against a terminal `s` if
    /// one can be shuffled to the end.
    fn weyl_push(&self, word: &mut SmallVec<[u8; 16]>, s: u8) {
        for k in (0..word.len()).rev() {
            let t = word[k];
            if t == s {
                word.remove(k);
                return;
            }
            if !self.commute(t as usize, s as usize) {
                break;
            }
        }
        word.push(s);
    }

    pub fn weyl_mult(&self, u: &WeylWord, v: &WeylWord) -> WeylWord {
        self.weyl_normalize_iter(u.0.iter().chain(v.0.iter()).copied())
    }

    pub fn weyl_inverse(&self, u: &WeylWord) -> WeylWord {
        let mut word: SmallVec<[u8; 16]> = u.0.iter().rev().copied().collect();
        canonical_order(&mut word, |&s| s, |a, b| self.commute(a as usize, b as usize));
        WeylWord(word)
    }

    /// Letters that can be shuffled to the front of the reduced word `w`.
    pub fn left_descents(&self, w: &WeylWord) -> TypeSet {
        let mut out = TypeSet::EMPTY;
        let mut blocked = TypeSet::EMPTY;
        for &s in &w.0 {
            let s = s as usize;
            if !blocked.contains(s) {
                out.insert(s);
            }
            // anything not commuting with s is blocked from here on
            blocked = blocked.union(self.all_types().difference(self.commutes[s]));
        }
        out
    }

    /// Letters that can be shuffled to the end of the reduced word `w`.
    pub fn right_descents(&self, w: &WeylWord) -> TypeSet {
        let mut out = TypeSet::EMPTY;
        let mut blocked = TypeSet::EMPTY;
        for &s in w.0.iter().rev() {
            let s = s as usize;
            if !blocked.contains(s) {
                out.insert(s);
            }
            blocked = blocked.union(self.all_types().difference(self.commutes[s]));
        }
        out
    }

    /// All Weyl elements of length at most `radius`, ordered by length and then
    /// lexicographically.
    pub fn weyl_ball(&self, radius: usize) -> Vec<WeylWord> {
        let mut seen: HashSet<WeylWord> = HashSet::new();
        let mut out = vec![WeylWord::identity()];
        seen.insert(WeylWord::identity());
        let mut frontier = vec![WeylWord::identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &frontier {
                let desc = self.right_descents(w);
                for s in 0..self.rank() {
                    if desc.contains(s) {
                        continue;
                    }
                    let ws = self.weyl_normalize_iter(w.0.iter().copied().chain([s as u8]));
                    if seen.insert(ws.clone()) {
                        next.push(ws);
                    }
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    // ---- ends and splittings -------------------------------------------------

    /// Decides whether the diagram admits a partition `I = I0 ∪ I1 ∪ I2` with
    /// `I1, I2` nonempty, `I0` pairwise commuting and `m = inf` across
    /// `I1 × I2`. Such a partition exists iff removing some commuting subset
    /// disconnects the commutation graph.
    ///
    /// Exhaustive over all `2^|I|` subsets. The lexicographically least `I0`
    /// (as a sorted index list) wins; `I1` is the component of the remaining
    /// commutation graph holding its least generator.
    pub fn ends_classify(&self) -> Result<EndsClass> {
        if !self.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        if self.is_spherical() {
            return Err(Error::Spherical);
        }
        let mut cliques: Vec<TypeSet> =
            self.all_types().subsets().filter(|&s| self.is_clique(s)).collect();
        cliques.sort_by_key(|s| s.iter().collect::<Vec<_>>());
        for i0 in cliques {
            let rest = self.all_types().difference(i0);
            if rest.len() < 2 {
                continue;
            }
            let first = rest.first().expect("nonempty");
            let comp = self.component(rest, first, true);
            if comp != rest {
                return Ok(EndsClass::Partition(Partition {
                    i0,
                    i1: comp,
                    i2: rest.difference(comp),
                }));
            }
        }
        Ok(EndsClass::OneEnded)
    }

    /// Checks the defining conditions of a splitting partition.
    pub fn check_partition(&self, p: &Partition) -> Result<()> {
        let all = self.all_types();
        if !p.i0.union(p.i1).union(p.i2).is_subset(all) {
            return Err(Error::InvalidPartition("unknown types".into()));
        }
        if p.i0.union(p.i1).union(p.i2) != all
            || !p.i0.intersection(p.i1).is_empty()
            || !p.i0.intersection(p.i2).is_empty()
            || !p.i1.intersection(p.i2).is_empty()
        {
            return Err(Error::InvalidPartition("parts must partition the generators".into()));
        }
        if p.i1.is_empty() || p.i2.is_empty() {
            return Err(Error::InvalidPartition("I1 and I2 must be nonempty".into()));
        }
        if !self.is_clique(p.i0) {
            return Err(Error::InvalidPartition("I0 is not pairwise commuting".into()));
        }
        for a in p.i1.iter() {
            if !self.commutes[a].intersection(p.i2).is_empty() {
                return Err(Error::InvalidPartition(format!(
                    "{} commutes with a generator of I2",
                    self.name(a)
                )));
            }
        }
        Ok(())
    }

    // ---- half-spaces ---------------------------------------------------------

    /// The reflection swapping the two sides of a half-space's wall.
    pub fn wall_reflection(&self, h: &HalfSpace) -> WeylWord {
        let s = h.crossing as u8;
        self.weyl_normalize_iter(
            h.inner.0.iter().copied().chain([s]).chain(h.inner.0.iter().rev().copied()),
        )
    }

    /// Two walls cross iff their reflections are distinct and commute: the
    /// group they generate is then finite, so it fixes a point on both walls.
    pub fn walls_cross(&self, h1: &HalfSpace, h2: &HalfSpace) -> bool {
        let r1 = self.wall_reflection(h1);
        let r2 = self.wall_reflection(h2);
        r1 != r2 && self.weyl_mult(&r1, &r2) == self.weyl_mult(&r2, &r1)
    }

    /// Searches the Weyl ball of the given radius for a half-space whose trace
    /// on the ball is properly contained in the trace of `h1 ∩ h2`.
    ///
    /// A hit is only ball-certified: containment is checked on the finite
    /// ball, not on the whole Coxeter complex.
    pub fn deep_corner_search(
        &self,
        h1: &HalfSpace,
        h2: &HalfSpace,
        radius: usize,
    ) -> Result<DeepCorner> {
        if !self.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        if self.is_spherical() {
            return Err(Error::Spherical);
        }
        if !self.walls_cross(h1, h2) {
            return Err(Error::WallsDoNotCross);
        }
        if radius == 0 {
            return Ok(DeepCorner::NotFoundWithinRadius);
        }
        let ball = self.weyl_ball(radius);
        let target: Vec<bool> =
            ball.iter().map(|w| h1.contains(self, w) && h2.contains(self, w)).collect();
        let target_count = target.iter().filter(|&&b| b).count();
        for u in ball.iter().filter(|u| u.len() < radius) {
            let desc = self.right_descents(u);
            for s in (0..self.rank()).filter(|&s| !desc.contains(s)) {
                let us = self.weyl_normalize_iter(u.0.iter().copied().chain([s as u8]));
                for cand in [HalfSpace::raw(u.clone(), us.clone(), s), HalfSpace::raw(us, u.clone(), s)]
                {
                    let mut count = 0usize;
                    let mut inside = true;
                    for (w, &t) in ball.iter().zip(&target) {
                        if cand.contains(self, w) {
                            if !t {
                                inside = false;
                                break;
                            }
                            count += 1;
                        }
                    }
                    if inside && count > 0 && count < target_count {
                        return Ok(DeepCorner::BallCertified { half_space: cand, radius });
                    }
                }
            }
        }
        Ok(DeepCorner::NotFoundWithinRadius)
    }
}

/// Lex-least linearization of the dependency order of a reduced word: at each
/// step, emit the smallest-typed letter not blocked by an earlier
/// non-commuting letter. Equal types never commute.
///
/// A word is already lex-least iff no letter is preceded, within its run of
/// commuting predecessors, by a larger one. Otherwise the word is rebuilt
/// by insertion: a new letter commutes with everything after its last
/// blocker, so it goes just before the first larger letter there.
pub(crate) fn canonical_order<T: Copy, const N: usize>(
    items: &mut SmallVec<[T; N]>,
    ty: impl Fn(&T) -> u8,
    commute: impl Fn(u8, u8) -> bool,
) where
    [T; N]: smallvec::Array<Item = T>,
{
    let blocks = |u: u8, t: u8| u == t || !commute(u, t);
    let ordered = (1..items.len()).all(|j| {
        let t = ty(&items[j]);
        items[..j].iter().rev().map(&ty).take_while(|&u| !blocks(u, t)).all(|u| u < t)
    });
    if ordered {
        return;
    }
    let mut out: SmallVec<[T; N]> = SmallVec::with_capacity(items.len());
    for &item in items.iter() {
        let t = ty(&item);
        let mut k = out.len();
        while k > 0 && !blocks(ty(&out[k - 1]), t) {
            k -= 1;
        }
        let pos = (k..out.len()).find(|&p| ty(&out[p]) > t).unwrap_or(out.len());
        out.insert(pos, item);
    }
    *items = out;
}

/// A Weyl group element as its canonical reduced word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylWord(pub(crate) SmallVec<[u8; 16]>);

impl WeylWord {
    pub fn identity() -> Self {
        WeylWord(SmallVec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&s| s as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.letters().collect()
    }

    pub fn display<'a>(&'a self, d: &'a CoxeterDiagram) -> impl fmt::Display + 'a {
        struct D<'a>(&'a WeylWord, &'a CoxeterDiagram);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_empty() {
                    return f.write_str("e");
                }
                let parts: Vec<&str> = self.0.letters().map(|s| self.1.name(s)).collect();
                f.write_str(&parts.join("·"))
            }
        }
        D(self, d)
    }
}

impl fmt::Debug for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{:?}", self.0.as_slice())
    }
}

/// The set of Weyl elements strictly closer to `inner` than to `outer`, where
/// `outer = inner · s` for the crossing generator `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfSpace {
    inner: WeylWord,
    outer: WeylWord,
    crossing: usize,
}

impl HalfSpace {
    fn raw(inner: WeylWord, outer: WeylWord, crossing: usize) -> Self {
        HalfSpace { inner, outer, crossing }
    }

    /// Half-space of the wall between `inner` and `inner · s`, on the side of
    /// `inner`.
    pub fn new(d: &CoxeterDiagram, inner: WeylWord, s: usize) -> Result<Self> {
        d.check_type(s)?;
        let outer = d.weyl_normalize_iter(inner.0.iter().copied().chain([s as u8]));
        Ok(HalfSpace { inner, outer, crossing: s })
    }

    /// Half-space from two adjacent Weyl elements.
    pub fn from_pair(d: &CoxeterDiagram, inner: WeylWord, outer: WeylWord) -> Result<Self> {
        let step = d.weyl_mult(&d.weyl_inverse(&inner), &outer);
        if step.len() != 1 {
            return Err(Error::BadHalfSpace);
        }
        let s = step.0[0] as usize;
        Ok(HalfSpace { inner, outer, crossing: s })
    }

    pub fn inner(&self) -> &WeylWord {
        &self.inner
    }

    pub fn outer(&self) -> &WeylWord {
        &self.outer
    }

    pub fn opposite(&self) -> HalfSpace {
        HalfSpace { inner: self.outer.clone(), outer: self.inner.clone(), crossing: self.crossing }
    }

    /// `w ∈ H` iff `ℓ(inner⁻¹ w) < ℓ(outer⁻¹ w)`; since `outer⁻¹ = s · inner⁻¹`,
    /// that holds iff `s` is not a left descent of `inner⁻¹ w`.
    pub fn contains(&self, d: &CoxeterDiagram, w: &WeylWord) -> bool {
        let v = d.weyl_normalize_iter(self.inner.0.iter().rev().copied().chain(w.0.iter().copied()));
        !d.left_descents(&v).contains(self.crossing)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeepCorner {
    /// Containment verified on the Weyl ball of the given radius only.
    BallCertified { half_space: HalfSpace, radius: usize },
    NotFoundWithinRadius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub i0: TypeSet,
    pub i1: TypeSet,
    pub i2: TypeSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndsClass {
    OneEnded,
    Partition(Partition),
}
