use super::*;
use crate::chambers::fixtures::*;
use crate::coxeter::Partition;
use crate::geometry::{BallCenter, DEFAULT_BALL_CAP};

fn one(i: usize) -> TypeSet {
    TypeSet::singleton(i)
}

fn swap_a1_a2(d: &BuildingSpec) -> Automorphism {
    let id = Chamber::identity();
    let panel = d.panel_of(&id, 0).unwrap();
    let pi = PanelPermutation::transposition(d, panel.clone(), &ch(d, &[(0, 1)]), &ch(d, &[(0, 2)])).unwrap();
    d.panel_extension(&panel, pi).unwrap()
}

#[test]
fn identity_and_inverse() {
    let d = dihedral();
    let f = swap_a1_a2(&d);
    let ff = Automorphism::compose(vec![f.clone(), f.inverse()]);
    for seed in 0..500 {
        let x = d.random_chamber(6, seed);
        assert_eq!(Automorphism::identity().apply(&d, &x).unwrap(), x);
        assert_eq!(ff.apply(&d, &x).unwrap(), x);
    }
}

#[test]
fn panel_extension_examples() {
    let d = dihedral();
    let f = swap_a1_a2(&d);
    assert_eq!(f.apply(&d, &ch(&d, &[(0, 1), (1, 1)])).unwrap(), ch(&d, &[(0, 2), (1, 1)]));
    let ba = ch(&d, &[(1, 1), (0, 1)]);
    assert_eq!(f.apply(&d, &ba).unwrap(), ba);
    let ball = d.ball_around(&Chamber::identity(), 4).unwrap();
    assert!(d.is_valid_on_ball(&f, &ball).valid);

    let panel = d.panel_of(&Chamber::identity(), 0).unwrap();
    let idp = PanelPermutation::identity(&d, panel.clone());
    let id_ext = d.panel_extension(&panel, idp).unwrap();
    assert_eq!(d.first_moved(&id_ext, ball.members()).unwrap(), None);

    // extension is a homomorphism on the panel's symmetric group
    let rho = PanelPermutation::new(&d, panel.clone(), vec![1, 2, 0]).unwrap();
    let pi = PanelPermutation::new(&d, panel.clone(), vec![0, 2, 1]).unwrap();
    let lhs = d
        .panel_extension(&panel, pi.clone())
        .unwrap()
        .after(&d.panel_extension(&panel, rho.clone()).unwrap());
    let rhs = d.panel_extension(&panel, pi.compose(&rho).unwrap()).unwrap();
    assert_eq!(d.first_difference(&lhs, &rhs, ball.members()).unwrap(), None);

    let other = d.panel_of(&Chamber::identity(), 1).unwrap();
    assert!(matches!(d.panel_extension(&other, pi), Err(Error::NotABijection(_))));
    assert!(matches!(PanelPermutation::new(&d, panel, vec![0, 0, 1]), Err(Error::NotABijection(_))));
}

#[test]
fn panel_extensions_are_valid_on_pentagon() {
    let p = pentagon();
    let ball = p.ball_around(&Chamber::identity(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let c = p.random_chamber_with(&mut rng, 3);
        let i = rng.gen_range(0..5);
        let panel = p.panel(&c, i);
        let pi = p.random_perm_fixing(&panel, &c, &mut rng).unwrap();
        let f = p.panel_extension(&panel, pi).unwrap();
        let report = p.is_valid_on_ball(&f, &ball);
        assert!(report.valid, "{report:?}");
        // support lies in wings of moved chambers
        for x in p.support_in(&f, ball.members()).unwrap() {
            assert_ne!(p.proj(panel.as_residue(), &x), c);
        }
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn validity_rejects_a_swap_of_distant_chambers() {
    let d = dihedral();
    let ball = d.ball_around(&Chamber::identity(), 4).unwrap();
    let a = ch(&d, &[(0, 1), (1, 1), (0, 1)]);
    let b = ch(&d, &[(1, 2), (0, 2)]);
    let report = d.is_valid_map_on_ball(&ball, |x| {
        Ok(if *x == a {
            b.clone()
        } else if *x == b {
            a.clone()
        } else {
            x.clone()
        })
    });
    assert!(!report.valid);
    assert!(matches!(report.violation, Some(Violation::Distance { .. })));
    assert!(d.is_valid_on_ball(&Automorphism::identity(), &ball).valid);
}

#[test]
fn wing_restrict_examples() {
    let d = dihedral();
    let id = Chamber::identity();
    let g = swap_a1_a2(&d);
    let ball = d.ball_around(&id, 4).unwrap();
    let wid = d.wing_restrict(&Automorphism::identity(), &id, 0, 8).unwrap();
    assert_eq!(d.first_moved(&wid, ball.members()).unwrap(), None);

    // g moves a1 itself
    let a1 = ch(&d, &[(0, 1)]);
    assert!(matches!(d.wing_restrict(&g, &a1, 0, 8), Err(Error::PreconditionFailed(_))));

    // g fixes Res_b(e) = {e, b1, b2}; restrict to the b-wing of e
    let gd = d.wing_restrict(&g, &id, 1, 8).unwrap();
    for x in ball.members() {
        let expected = if d.in_wing(&id, one(1), x) { g.apply(&d, x).unwrap() } else { x.clone() };
        assert_eq!(gd.apply(&d, x).unwrap(), expected);
    }
    assert!(d.is_valid_on_ball(&gd, &ball).valid);
    let far = d.random_chamber(40, 3);
    if d.dist(&id, &far) > 8 {
        assert!(matches!(gd.apply(&d, &far), Err(Error::UncertifiedRegion { radius: 8 })));
    }
    // inverse evaluates structurally
    let both = gd.after(&gd.inverse());
    assert_eq!(d.first_moved(&both, ball.members()).unwrap(), None);
}

#[test]
fn fix_decomposition_on_dihedral() {
    // g fixes Res_b(e); the product of its restrictions to the three b-wings is g
    let d = dihedral();
    let id = Chamber::identity();
    let g = swap_a1_a2(&d).after(&d.v_i_sample(&ch(&d, &[(0, 1)]), 0, 4).unwrap());
    let ball = d.ball_around(&id, 4).unwrap();
    let panel = d.panel(&id, 1);
    let parts: Vec<Automorphism> = d
        .chambers_of(panel.as_residue())
        .unwrap()
        .iter()
        .map(|c| d.wing_restrict(&g, c, 1, 8).unwrap())
        .collect();
    let product = Automorphism::compose(parts);
    assert_eq!(d.first_difference(&product, &g, ball.members()).unwrap(), None);
}

#[test]
fn v_i_sample_contract() {
    for spec in [dihedral(), pentagon()] {
        let id = Chamber::identity();
        let ball = spec.ball_around(&id, 3).unwrap();
        for seed in 0..20 {
            let c = spec.random_chamber(2, seed);
            let i = (seed as usize) % spec.rank();
            let v = spec.v_i_sample(&c, i, seed).unwrap();
            let support = spec.support_in(&v, ball.members()).unwrap();
            assert!(!support.is_empty() || spec.dist(&id, &c) > 0);
            assert!(support.iter().all(|x| spec.in_wing(&c, one(i), x)));
            assert!(spec.is_valid_on_ball(&v, &ball).valid);
        }
    }
    // disjoint supports for i-adjacent base chambers
    let d = dihedral();
    let id = Chamber::identity();
    let ball = d.ball_around(&id, 4).unwrap();
    let (d1, d2) = (ch(&d, &[(0, 1)]), ch(&d, &[(0, 2)]));
    let s1 = d.support_in(&d.v_i_sample(&d1, 0, 1).unwrap(), ball.members()).unwrap();
    let s2 = d.support_in(&d.v_i_sample(&d2, 0, 2).unwrap(), ball.members()).unwrap();
    assert!(!s1.is_empty() && !s2.is_empty());
    assert!(s1.iter().all(|x| !s2.contains(x)));
    assert!(matches!(square().v_i_sample(&id, 0, 1), Err(Error::NoRoom(_))));
}

#[test]
fn panel_restriction_examples() {
    let d = dihedral();
    let id = Chamber::identity();
    assert!(d.panel_restriction_element(&id, &[]).unwrap().is_identity_node());

    // n = 0: a panel extension at x
    let panel = d.panel(&id, 1);
    let pi = PanelPermutation::transposition(&d, panel.clone(), &ch(&d, &[(1, 1)]), &ch(&d, &[(1, 2)])).unwrap();
    let g = d.panel_restriction_element(&id, &[UTarget { c: id.clone(), ty: 1, pi: pi.clone() }]).unwrap();
    let ball = d.ball_around(&id, 4).unwrap();
    let direct = d.panel_extension(&panel, pi).unwrap();
    assert_eq!(d.first_difference(&g, &direct, ball.members()).unwrap(), None);

    // n = 1: targets at a1 (type b) and b1 (type a)
    let a1 = ch(&d, &[(0, 1)]);
    let b1 = ch(&d, &[(1, 1)]);
    let t1 = UTarget {
        c: a1.clone(),
        ty: 1,
        pi: PanelPermutation::transposition(&d, d.panel(&a1, 1), &ch(&d, &[(0, 1), (1, 1)]), &ch(&d, &[(0, 1), (1, 2)]))
            .unwrap(),
    };
    let t2 = UTarget {
        c: b1.clone(),
        ty: 0,
        pi: PanelPermutation::transposition(&d, d.panel(&b1, 0), &ch(&d, &[(1, 1), (0, 1)]), &ch(&d, &[(1, 1), (0, 2)]))
            .unwrap(),
    };
    let g = d.panel_restriction_element(&id, &[t1.clone(), t2]).unwrap();
    assert!(d.is_valid_on_ball(&g, &ball).valid);
    assert_eq!(g.apply(&d, &ch(&d, &[(0, 1), (1, 1)])).unwrap(), ch(&d, &[(0, 1), (1, 2)]));
    assert_eq!(g.apply(&d, &ch(&d, &[(1, 1), (0, 2)])).unwrap(), ch(&d, &[(1, 1), (0, 1)]));
    // wrong distance / repeated pair
    let t0 = UTarget { c: id.clone(), ty: 1, pi: PanelPermutation::identity(&d, d.panel(&id, 1)) };
    assert!(matches!(d.panel_restriction_element(&id, &[t1.clone(), t0]), Err(Error::PreconditionFailed(_))));
    assert!(matches!(d.panel_restriction_element(&id, &[t1.clone(), t1]), Err(Error::PreconditionFailed(_))));
}

#[test]
fn strongtrans_examples() {
    let d = dihedral();
    let id = Chamber::identity();
    let a = d.grow_apartment(&id, 3, 5).unwrap();
    assert!(d.strongtrans_match(&a, &a, &id, 3).unwrap().is_identity_node());
    let std = d.standard_apartment(&[1, 1], &id, 3).unwrap();
    let ball = d.ball_around(&id, 3).unwrap();
    for seed in 0..10 {
        let a = d.grow_apartment(&id, 3, seed).unwrap();
        let g = d.strongtrans_match(&a, &std, &id, 3).unwrap();
        assert!(d.is_valid_on_ball(&g, &ball).valid);
        for (_, x) in a.iter() {
            assert!(std.contains_chamber(&g.apply(&d, x).unwrap()));
        }
    }
    let p = pentagon();
    let ball = p.ball_around(&id, 2).unwrap();
    for seed in 0..5 {
        let a = p.grow_apartment(&id, 2, seed).unwrap();
        let b = p.grow_apartment(&id, 2, seed + 100).unwrap();
        let g = p.strongtrans_match(&a, &b, &id, 2).unwrap();
        assert!(p.is_valid_on_ball(&g, &ball).valid);
        assert_eq!(g.apply(&p, &id).unwrap(), id);
    }
}

#[test]
fn peel_examples() {
    let d = dihedral();
    let id = Chamber::identity();
    let r = d.residue_of(&id, TypeSet::EMPTY).unwrap();
    let (g, ok) = d.peel(&Automorphism::identity(), &r, 0, 2).unwrap();
    assert!(g.is_identity_node() && ok);

    // single admissible generator at distance 1
    let a1 = ch(&d, &[(0, 1)]);
    let panel = d.panel(&a1, 1);
    let h = d
        .panel_extension(&panel, PanelPermutation::transposition(&d, panel.clone(), &ch(&d, &[(0, 1), (1, 1)]), &ch(&d, &[(0, 1), (1, 2)])).unwrap())
        .unwrap();
    assert!(d.is_admissible(&a1, 1, &r).unwrap());
    let (g, ok) = d.peel(&h, &r, 1, 3).unwrap();
    assert!(ok);
    let ball = d.ball_around(&id, 4).unwrap();
    assert_eq!(d.first_difference(&g, &h.inverse(), ball.members()).unwrap(), None);

    // product of two at distance 1
    let b1 = ch(&d, &[(1, 1)]);
    let p2 = d.panel(&b1, 0);
    let h2 = d
        .panel_extension(&p2, PanelPermutation::transposition(&d, p2.clone(), &ch(&d, &[(1, 1), (0, 1)]), &ch(&d, &[(1, 1), (0, 2)])).unwrap())
        .unwrap();
    let hh = h.after(&h2);
    let (g, ok) = d.peel(&hh, &r, 1, 4).unwrap();
    assert!(ok);
    let res = d.ball(BallCenter::Residue(r.clone()), 2, DEFAULT_BALL_CAP).unwrap();
    assert_eq!(d.first_moved(&g.after(&hh), res.members()).unwrap(), None);

    // precondition: h must fix B(R, n)
    assert!(matches!(d.peel(&hh, &r, 2, 4), Err(Error::PreconditionFailed(_))));
    assert!(matches!(d.peel(&hh, &r, 1, 2), Err(Error::PreconditionFailed(_))));
}

#[test]
fn approximate_examples() {
    let p = pentagon();
    let id = Chamber::identity();
    let r = p.residue_of(&id, one(0)).unwrap();
    let us = p.approximate_by_generators(&Automorphism::identity(), &r, 2).unwrap();
    assert!(us.iter().all(|u| u.is_identity_node()));

    // a U_i(c) generator with c in R
    let panel = p.panel(&id, 2);
    let h = p
        .panel_extension(&panel, PanelPermutation::transposition(&p, panel.clone(), &ch(&p, &[(2, 1)]), &ch(&p, &[(2, 2)])).unwrap())
        .unwrap();
    let us = p.approximate_by_generators(&h, &r, 2).unwrap();
    assert!(!us[0].is_identity_node());
    let mut residual = h.clone();
    for u in &us {
        residual = u.after(&residual);
    }
    let ball = p.ball(BallCenter::Residue(r.clone()), 2, DEFAULT_BALL_CAP).unwrap();
    assert_eq!(p.first_moved(&residual, ball.members()).unwrap(), None);
    // h must fix R
    let moving = p.panel_extension(&p.panel(&id, 0), PanelPermutation::new(&p, p.panel(&id, 0), vec![1, 0, 2]).unwrap()).unwrap();
    assert!(matches!(p.approximate_by_generators(&moving, &r, 1), Err(Error::PreconditionFailed(_))));
}

#[test]
fn commutator_example() {
    let d = dihedral();
    let id = Chamber::identity();
    let sigma = d.panel(&id, 0);
    let c2 = ch(&d, &[(0, 1)]);
    let target = ch(&d, &[(0, 1), (1, 1)]);
    let g = d.transporter(&id, &target).unwrap();
    assert_eq!(g.apply(&d, &id).unwrap(), target);
    let third = ch(&d, &[(0, 2)]);
    let h = d.v_i_sample(&third, 0, 7).unwrap();
    let radius = 4 + 2 * d.dist(&id, &target) + 2;
    let x = d.commutator_witness(&g, &sigma, &id, &c2, &h, radius).unwrap();
    let ball = d.ball_around(&id, 4).unwrap();
    let comm = Automorphism::commutator(&x, &g);
    assert_eq!(d.first_difference(&comm, &h, ball.members()).unwrap(), None);
    assert!(d.is_valid_on_ball(&x, &ball).valid);

    // region n = 1 is moved by g h g⁻¹
    let ghg = Automorphism::compose(vec![g.clone(), h.clone(), g.inverse()]);
    let moved1 = d.support_in(&ghg, ball.members()).unwrap();
    assert!(!moved1.is_empty());
    for y in &moved1 {
        assert_eq!(x.apply(&d, y).unwrap(), ghg.apply(&d, y).unwrap());
        assert_eq!(h.apply(&d, y).unwrap(), *y);
    }

    let trivial = d.commutator_witness(&g, &sigma, &id, &c2, &Automorphism::identity(), radius).unwrap();
    let comm = Automorphism::commutator(&trivial, &g);
    assert_eq!(d.first_moved(&comm, ball.members()).unwrap(), None);

    // h moving X_i(c) violates the hypothesis
    let bad = d.v_i_sample(&id, 0, 1).unwrap();
    assert!(matches!(d.commutator_witness(&g, &sigma, &id, &c2, &bad, radius), Err(Error::PreconditionFailed(_))));
}

#[test]
fn local_splitting_examples() {
    let d = dihedral();
    let id = Chamber::identity();
    let r = d.residue_of(&id, TypeSet::EMPTY).unwrap();
    let part = Partition { i0: TypeSet::EMPTY, i1: one(0), i2: one(1) };
    let (u1, u2) = d.local_splitting_generators(&r, &part, 4, 1).unwrap();
    let ball = d.ball_around(&id, 4).unwrap();
    for a in &u1.gens {
        let sa = d.support_in(a, ball.members()).unwrap();
        for b in &u2.gens {
            let sb = d.support_in(b, ball.members()).unwrap();
            assert!(sa.iter().all(|x| !sb.contains(x)));
        }
    }
    let s = splitting();
    let part = Partition { i0: TypeSet::EMPTY, i1: one(0).with(1), i2: one(2) };
    let r = s.residue_of(&id, TypeSet::EMPTY).unwrap();
    let (u1, u2) = s.local_splitting_generators(&r, &part, 4, 2).unwrap();
    let ball = s.ball_around(&id, 3).unwrap();
    for a in &u1.gens {
        for b in &u2.gens {
            let ab = a.after(b);
            let ba = b.after(a);
            assert_eq!(s.first_difference(&ab, &ba, ball.members()).unwrap(), None);
        }
    }
    let bad = Partition { i0: TypeSet::EMPTY, i1: TypeSet::EMPTY, i2: one(0).with(1) };
    assert!(matches!(d.local_splitting_generators(&r, &bad, 1, 0), Err(Error::InvalidPartition(_))));
}

#[test]
fn serde_round_trip() {
    let d = dihedral();
    let f = swap_a1_a2(&d).after(&d.v_i_sample(&Chamber::identity(), 1, 3).unwrap()).inverse();
    let json = serde_json::to_string(&f).unwrap();
    let back: Automorphism = serde_json::from_str(&json).unwrap();
    let ball = d.ball_around(&Chamber::identity(), 4).unwrap();
    assert_eq!(d.first_difference(&f, &back, ball.members()).unwrap(), None);
}
