//! Type-preserving automorphisms as lazily evaluated expression trees.
//!
//! Only finitely described automorphisms exist here, and equality is only
//! ever decided on finite balls.

mod build;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chambers::{BuildingSpec, Chamber};
use crate::coxeter::{TypeSet, WeylWord};
use crate::error::{Error, Result};
use crate::geometry::{Ball, Panel};

pub use build::{GeneratorSet, UTarget, SUPPORT_CHECK_RADIUS};

/// A permutation of the chambers of a panel. Chamber `k` of the panel is
/// `base · (i, k)`, with `k = 0` the base itself.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PanelPermutation {
    panel: Panel,
    images: Vec<u16>,
}

impl PanelPermutation {
    pub fn new(spec: &BuildingSpec, panel: Panel, images: Vec<u16>) -> Result<Self> {
        spec.check_chamber(panel.base())?;
        let q = spec.thickness(panel.ty()) as usize;
        if images.len() != q {
            return Err(Error::NotABijection(format!("{} images for a panel of thickness {q}", images.len())));
        }
        let mut seen = vec![false; q];
        for &k in &images {
            if k as usize >= q || std::mem::replace(&mut seen[k as usize], true) {
                return Err(Error::NotABijection(format!("images {images:?}")));
            }
        }
        Ok(PanelPermutation { panel, images })
    }

    pub fn identity(spec: &BuildingSpec, panel: Panel) -> Self {
        let q = spec.thickness(panel.ty());
        PanelPermutation { panel, images: (0..q).collect() }
    }

    /// From explicit chamber pairs; chambers not mentioned are fixed.
    pub fn from_pairs(spec: &BuildingSpec, panel: Panel, pairs: &[(Chamber, Chamber)]) -> Result<Self> {
        let mut images: Vec<u16> = (0..spec.thickness(panel.ty())).collect();
        for (a, b) in pairs {
            let (ka, kb) = match (index_in(spec, &panel, a), index_in(spec, &panel, b)) {
                (Some(ka), Some(kb)) => (ka, kb),
                _ => return Err(Error::NotABijection("chamber outside the panel".into())),
            };
            images[ka as usize] = kb;
        }
        Self::new(spec, panel, images)
    }

    /// Swaps two chambers of the panel.
    pub fn transposition(spec: &BuildingSpec, panel: Panel, a: &Chamber, b: &Chamber) -> Result<Self> {
        Self::from_pairs(spec, panel, &[(a.clone(), b.clone()), (b.clone(), a.clone())])
    }

    pub fn panel(&self) -> &Panel {
        &self.panel
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (k, &v) in self.images.iter().enumerate() {
            inv[v as usize] = k as u16;
        }
        PanelPermutation { panel: self.panel.clone(), images: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PanelPermutation) -> Result<Self> {
        if self.panel != other.panel {
            return Err(Error::NotABijection("permutations of different panels".into()));
        }
        let images = other.images.iter().map(|&k| self.images[k as usize]).collect();
        Ok(PanelPermutation { panel: self.panel.clone(), images })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &v)| k == v as usize)
    }

    /// Image of a chamber of the panel.
    pub fn image(&self, spec: &BuildingSpec, c: &Chamber) -> Result<Chamber> {
        let k = index_in(spec, &self.panel, c)
            .ok_or_else(|| Error::NotABijection("chamber outside the panel".into()))?;
        Ok(spec.step(self.panel.base(), self.panel.ty(), self.images[k as usize]))
    }

    pub fn fixes(&self, spec: &BuildingSpec, c: &Chamber) -> bool {
        index_in(spec, &self.panel, c).is_some_and(|k| self.images[k as usize] == k)
    }
}

impl fmt::Debug for PanelPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.panel, self.images)
    }
}

/// Position of `c` in the panel, if it belongs to it.
fn index_in(spec: &BuildingSpec, panel: &Panel, c: &Chamber) -> Option<u16> {
    let z = spec.left_divide(panel.base(), c);
    match z.syllables() {
        [] => Some(0),
        [s] if s.ty as usize == panel.ty() => Some(s.exp),
        _ => None,
    }
}

/// An automorphism of the building, as an expression.
#[derive(Clone, Serialize, Deserialize)]
pub struct Automorphism(Arc<Node>);

#[derive(Clone, Serialize, Deserialize)]
pub enum Node {
    Identity,
    /// The extension of a panel permutation fixing every chamber whose
    /// projection onto the panel is fixed.
    PanelExt(PanelPermutation),
    /// `g` on the wing `X_i(d)`, the identity elsewhere. Valid because `g`
    /// fixes `Res_{i ∪ i⊥}(d)`, which was checked within `radius` of `d`.
    WingRestrict { g: Automorphism, d: Chamber, ty: usize, radius: usize },
    /// The infinite product `∏ gⁿ h g⁻ⁿ` over translates of the panel.
    Ladder(Ladder),
    /// Applied right to left.
    Compose(Vec<Automorphism>),
    Inverse(Automorphism),
}

#[derive(Clone, Serialize, Deserialize)]
pub struct Ladder {
    pub g: Automorphism,
    pub h: Automorphism,
    pub panel: Panel,
    pub c: Chamber,
    pub c2: Chamber,
    pub radius: usize,
}

impl Automorphism {
    pub fn identity() -> Self {
        Automorphism(Arc::new(Node::Identity))
    }

    pub(crate) fn from_node(node: Node) -> Self {
        Automorphism(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn is_identity_node(&self) -> bool {
        matches!(*self.0, Node::Identity)
    }

    /// `parts[0] ∘ parts[1] ∘ …`; identities are dropped.
    pub fn compose(parts: Vec<Automorphism>) -> Self {
        let mut parts: Vec<Automorphism> = parts.into_iter().filter(|a| !a.is_identity_node()).collect();
        match parts.len() {
            0 => Self::identity(),
            1 => parts.pop().expect("one part"),
            _ => Automorphism(Arc::new(Node::Compose(parts))),
        }
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &Automorphism) -> Self {
        Self::compose(vec![self.clone(), other.clone()])
    }

    pub fn inverse(&self) -> Self {
        match &*self.0 {
            Node::Identity => self.clone(),
            Node::PanelExt(p) => Automorphism(Arc::new(Node::PanelExt(p.inverse()))),
            Node::Inverse(a) => a.clone(),
            _ => Automorphism(Arc::new(Node::Inverse(self.clone()))),
        }
    }

    /// `[x, g] = x g x⁻¹ g⁻¹`.
    pub fn commutator(x: &Automorphism, g: &Automorphism) -> Self {
        Self::compose(vec![x.clone(), g.clone(), x.inverse(), g.inverse()])
    }

    pub fn apply(&self, spec: &BuildingSpec, x: &Chamber) -> Result<Chamber> {
        spec.check_chamber(x)?;
        self.eval(spec, x.clone(), false)
    }

    pub fn apply_inverse(&self, spec: &BuildingSpec, x: &Chamber) -> Result<Chamber> {
        spec.check_chamber(x)?;
        self.eval(spec, x.clone(), true)
    }

    /// Evaluates `self` (or its inverse) without re-checking the input.
    pub(crate) fn eval(&self, spec: &BuildingSpec, x: Chamber, inv: bool) -> Result<Chamber> {
        match &*self.0 {
            Node::Identity => Ok(x),
            Node::PanelExt(p) => Ok(eval_panel_ext(spec, p, x, inv)),
            Node::WingRestrict { g, d, ty, radius } => {
                if spec.dist(d, &x) > *radius {
                    return Err(Error::UncertifiedRegion { radius: *radius });
                }
                // g preserves the wing, so the same test serves the inverse
                if spec.in_wing(d, TypeSet::singleton(*ty), &x) {
                    g.eval(spec, x, inv)
                } else {
                    Ok(x)
                }
            }
            Node::Ladder(l) => eval_ladder(spec, l, x, inv),
            Node::Compose(parts) => {
                let mut y = x;
                if inv {
                    for a in parts {
                        y = a.eval(spec, y, true)?;
                    }
                } else {
                    for a in parts.iter().rev() {
                        y = a.eval(spec, y, false)?;
                    }
                }
                Ok(y)
            }
            Node::Inverse(a) => a.eval(spec, x, !inv),
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match &*self.0 {
            Node::Identity | Node::PanelExt(_) => 1,
            Node::WingRestrict { g, .. } => 1 + g.size(),
            Node::Ladder(l) => 1 + l.g.size() + l.h.size(),
            Node::Compose(parts) => 1 + parts.iter().map(|a| a.size()).sum::<usize>(),
            Node::Inverse(a) => 1 + a.size(),
        }
    }
}

/// `base · (i, k) · z ↦ base · (i, π(k)) · z`, where `(i, k)` is the
/// `i`-prefix of `base⁻¹ x`.
fn eval_panel_ext(spec: &BuildingSpec, p: &PanelPermutation, x: Chamber, inv: bool) -> Chamber {
    let i = p.panel.ty();
    let base = p.panel.base();
    let z = spec.left_divide(base, &x);
    let (prefix, rest) = spec.j_prefix_unchecked(&z, TypeSet::singleton(i));
    let k = prefix.syllables().first().map_or(0, |s| s.exp);
    let image = if inv {
        p.images.iter().position(|&v| v == k).expect("bijection") as u16
    } else {
        p.images[k as usize]
    };
    if image == k {
        return x;
    }
    let head = spec.step(base, i, image);
    spec.mult_unchecked(&head, &rest)
}

/// `y ∈ S_n = gⁿ(S_0)`, where `S_0` holds the chambers projecting onto the
/// panel outside `{c, c2}`; then `y ↦ gⁿ h g⁻ⁿ (y)`. The regions are disjoint
/// and recede from `c`, so only `n ≤ dist(c, y) + 1` can occur.
fn eval_ladder(spec: &BuildingSpec, l: &Ladder, y: Chamber, inv: bool) -> Result<Chamber> {
    let dist = spec.dist(&l.c, &y);
    if dist > l.radius {
        return Err(Error::UncertifiedRegion { radius: l.radius });
    }
    let mut z = y.clone();
    for n in 0..=dist + 1 {
        let p = spec.proj(l.panel.as_residue(), &z);
        if p != l.c && p != l.c2 {
            let mut w = l.h.eval(spec, z, inv)?;
            for _ in 0..n {
                w = l.g.eval(spec, w, false)?;
            }
            return Ok(w);
        }
        z = l.g.eval(spec, z, true)?;
    }
    Ok(y)
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Identity => f.write_str("Id"),
            Node::PanelExt(p) => write!(f, "Ext{p:?}"),
            Node::WingRestrict { g, d, ty, radius } => write!(f, "Wing[{ty}@{d:?}, r={radius}]({g:?})"),
            Node::Ladder(l) => write!(f, "Ladder[{:?}, {:?}, {:?}, r={}]({:?}; {:?})", l.panel, l.c, l.c2, l.radius, l.g, l.h),
            Node::Compose(parts) => f.debug_list().entries(parts).finish(),
            Node::Inverse(a) => write!(f, "Inv({a:?})"),
        }
    }
}

/// Outcome of a ball validity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub ball_size: usize,
    /// Ball members moved by the map.
    pub moved: usize,
    pub pairs_checked: usize,
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// `δ(f x, f y) ≠ δ(x, y)`.
    Distance { x: Chamber, y: Chamber, expected: WeylWord, found: WeylWord },
    /// Evaluation failed, e.g. outside a certified region.
    Evaluation { x: Chamber, error: String },
}

impl BuildingSpec {
    /// Whether the automorphism preserves Weyl distances between all pairs
    /// of ball members (which also makes it injective there).
    pub fn is_valid_on_ball(&self, a: &Automorphism, ball: &Ball) -> ValidityReport {
        self.is_valid_map_on_ball(ball, |x| a.eval(self, x.clone(), false))
    }

    /// As [`is_valid_on_ball`](Self::is_valid_on_ball), for an arbitrary map.
    /// Pairs of fixed chambers are skipped: their distance is unchanged.
    pub fn is_valid_map_on_ball(&self, ball: &Ball, f: impl Fn(&Chamber) -> Result<Chamber>) -> ValidityReport {
        let members = ball.members();
        let mut report = ValidityReport {
            valid: true,
            ball_size: members.len(),
            moved: 0,
            pairs_checked: 0,
            violation: None,
        };
        let mut images = Vec::with_capacity(members.len());
        for x in members {
            match f(x) {
                Ok(y) => images.push(y),
                Err(e) => {
                    report.valid = false;
                    report.violation = Some(Violation::Evaluation { x: x.clone(), error: e.to_string() });
                    return report;
                }
            }
        }
        let moved: Vec<usize> = (0..members.len()).filter(|&k| images[k] != members[k]).collect();
        report.moved = moved.len();
        if moved.is_empty() {
            return report;
        }
        let is_moved: Vec<bool> = {
            let mut v = vec![false; members.len()];
            for &k in &moved {
                v[k] = true;
            }
            v
        };
        // a fresh table costs more than checking the moved pairs directly,
        // so only an existing one is used
        let table = ball.cached_pair_table();
        for &a in &moved {
            for b in 0..members.len() {
                if b == a || (is_moved[b] && b < a) {
                    continue;
                }
                report.pairs_checked += 1;
                let found = self.delta(&images[a], &images[b]);
                let ok = match table {
                    Some(t) => &found == t.get(a, b),
                    None => found == self.delta(&members[a], &members[b]),
                };
                if !ok {
                    report.valid = false;
                    report.violation = Some(Violation::Distance {
                        x: members[a].clone(),
                        y: members[b].clone(),
                        expected: self.delta(&members[a], &members[b]),
                        found,
                    });
                    return report;
                }
            }
        }
        report
    }

    /// First chamber of `chambers` moved by `a`, if any.
    pub fn first_moved(&self, a: &Automorphism, chambers: &[Chamber]) -> Result<Option<Chamber>> {
        for x in chambers {
            if a.eval(self, x.clone(), false)? != *x {
                return Ok(Some(x.clone()));
            }
        }
        Ok(None)
    }

    /// First chamber where `a` and `b` disagree, if any.
    pub fn first_difference(&self, a: &Automorphism, b: &Automorphism, chambers: &[Chamber]) -> Result<Option<Chamber>> {
        for x in chambers {
            if a.eval(self, x.clone(), false)? != b.eval(self, x.clone(), false)? {
                return Ok(Some(x.clone()));
            }
        }
        Ok(None)
    }

    /// Chambers of `chambers` moved by `a`.
    pub fn support_in(&self, a: &Automorphism, chambers: &[Chamber]) -> Result<Vec<Chamber>> {
        let mut out = Vec::new();
        for x in chambers {
            if a.eval(self, x.clone(), false)? != *x {
                out.push(x.clone());
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
