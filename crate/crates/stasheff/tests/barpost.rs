use std::sync::Arc;
use std::time::Instant;

use stasheff::barpost::*;
use stasheff::dga::{build_truncated_polynomial_example, homology};
use stasheff::models::{augmentation_module, free_module};
use stasheff::structures::{check_module, AnMorphism, Verdict};
use stasheff::transfer::kadeishvili_transfer;

fn periodic_context(order: usize) -> BarContext {
    let a = build_truncated_polynomial_example(5, 3).unwrap();
    let hd = homology(&a.complex(), "h").unwrap();
    let (h, f) = kadeishvili_transfer(&a, &hd, order).unwrap();
    let h = Arc::new(h);
    let x = Arc::new(free_module(&h).unwrap());
    let mut f = f;
    f.source = h;
    BarContext::new(x, Arc::new(a), Arc::new(f), Arc::new(hd.proj.clone())).unwrap()
}

#[test]
fn free_module_tower() {
    let start = Instant::now();
    let ctx = periodic_context(5);
    let x = ctx.with_module(Arc::new(ctx.x.truncated(4))).unwrap();
    let b = bar_construction(&x, 3).unwrap();
    assert!(b.d_squared_zero);
    let tower = build_tower(&x, 3).unwrap();
    assert!(tower.resolution_exact);
    for s in &tower.stages {
        assert!(s.checks.all(), "stage {}: {:?}", s.k, s.checks);
    }
    eprintln!("tower in {:?}", start.elapsed());
    let rep = lift_obstruction(&x, 3).unwrap();
    assert!(rep.agree(), "{rep:?}");
    assert!(rep.chain_level_match);
    assert_eq!(rep.class_trivial, rep.extension_possible);
    eprintln!("lift in {:?}", start.elapsed());
}

#[test]
fn augmentation_module_lifting() {
    let ctx = periodic_context(4);
    let unit = ctx.unit_of_h().unwrap();
    let k = augmentation_module(&ctx.x.algebra, unit, 3).unwrap();
    assert_eq!(check_module(&k, 3).verdict, Verdict::Pass);
    let c = ctx.with_module(Arc::new(k)).unwrap();
    let tower = build_tower(&c, 2).unwrap();
    assert!(tower.resolution_exact);
    for s in &tower.stages {
        assert!(s.checks.all(), "stage {}: {:?}", s.k, s.checks);
    }
    let rep = lift_obstruction(&c, 2).unwrap();
    assert!(rep.agree(), "{rep:?}");
    assert!(rep.chain_level_match);
    assert_eq!(rep.class_trivial, rep.extension_possible);
    eprintln!("null = {} trivial = {}", rep.null, rep.class_trivial);
}

#[test]
fn identity_morphism_on_bar() {
    let ctx = periodic_context(4);
    let x = ctx.with_module(Arc::new(ctx.x.truncated(3))).unwrap();
    let id = AnMorphism::identity(&x.x, 3);
    let b = bar_of_morphism(&id, &x, &x, 2).unwrap();
    let d = x.bar_differential(2).unwrap();
    assert!(is_chain_map(&b, &d, &d));
    let sq = morphism_square_check(&id, &x, &x, 2).unwrap();
    assert!(sq.others_vanish && sq.commutes);
    assert_eq!(sq.morphism_verdict, Verdict::Pass);
}

mod common;

use common::*;
use stasheff::random::{random_map, rng, transport};
use stasheff::structures::compose_morphisms;

#[test]
fn random_bar_constructions_square_to_zero() {
    let start = Instant::now();
    let (per, ext) = (periodic(5), exterior(7));
    let mut r = rng(11);
    for i in 0..100 {
        let (s, x, n) = random_case(&mut r, &per, &ext, i, 5);
        let c = s.context(x).unwrap();
        let b = bar_construction(&c, n).unwrap();
        assert!(b.d_squared_zero, "case {i}");
    }
    eprintln!("100 bar constructions in {:?}", start.elapsed());
}

#[test]
fn random_functoriality() {
    let start = Instant::now();
    let (per, ext) = (periodic(5), exterior(7));
    let mut r = rng(12);
    for i in 0..50 {
        let (s, x, n) = random_case(&mut r, &per, &ext, i, 4);
        let order = n + 1;
        let x = arc(x);
        let (y, h) = transport(&mut r, &x, order).unwrap();
        let y = arc(y);
        let h = stasheff::structures::AnMorphism::new("h", x.clone(), y.clone(), h.comps().to_vec(), order).unwrap();
        let (z, g) = transport(&mut r, &y, order).unwrap();
        let cx = s.context((*x).clone()).unwrap();
        let cy = s.context((*y).clone()).unwrap();
        let cz = s.context(z).unwrap();
        let (dx, dy, dz) = (cx.bar_differential(n).unwrap(), cy.bar_differential(n).unwrap(), cz.bar_differential(n).unwrap());
        let bh = bar_of_morphism(&h, &cx, &cy, n).unwrap();
        let bg = bar_of_morphism(&g, &cy, &cz, n).unwrap();
        assert!(is_chain_map(&bh, &dx, &dy), "case {i}");
        assert!(is_chain_map(&bg, &dy, &dz), "case {i}");
        let gh = compose_morphisms(&g, &h).unwrap();
        let bgh = bar_of_morphism(&gh, &cx, &cz, n).unwrap();
        assert_eq!(bgh, bg.mul(&bh), "case {i}");
    }
    eprintln!("50 functoriality cases in {:?}", start.elapsed());
}

#[test]
fn random_lifting_agreement() {
    let start = Instant::now();
    let (per, ext) = (periodic(6), exterior(7));
    let mut r = rng(13);
    let mut obstructed = 0;
    for i in 0..50 {
        let (s, x, n) = random_case(&mut r, &per, &ext, i, 4);
        let c = s.context(x).unwrap();
        let rep = lift_obstruction(&c, n).unwrap();
        assert!(rep.agree(), "case {i}: {rep:?}");
        assert!(rep.chain_level_match, "case {i}");
        assert_eq!(rep.class_trivial, rep.extension_possible, "case {i}");
        obstructed += usize::from(!rep.class_trivial);
    }
    eprintln!("50 lifting cases ({obstructed} obstructed) in {:?}", start.elapsed());
}

#[test]
fn random_square_and_roundtrip() {
    let start = Instant::now();
    let (per, ext) = (periodic(5), exterior(7));
    let mut r = rng(14);
    let mut broken_detected = 0;
    for i in 0..50 {
        let (s, x, n) = random_case(&mut r, &per, &ext, i, 4);
        let k = n;
        let x = arc(x);
        let (y, g) = transport(&mut r, &x, k + 1).unwrap();
        let cx = s.context((*x).clone()).unwrap();
        let cy = s.context(y).unwrap();
        let sq = morphism_square_check(&g, &cx, &cy, k).unwrap();
        assert!(sq.others_vanish, "case {i}");
        assert_eq!(sq.commutes, sq.morphism_verdict == Verdict::Pass, "case {i}");
        let rt = tower_morphism_roundtrip(&g, &cx, &cy, k).unwrap();
        assert!(rt.corner_only && rt.matches, "case {i}");
        let mut broken = g.clone();
        let noise = random_map(&mut r, "noise", x.op_inputs(k), x.space.clone(), k as i64 - 1, 0.5).unwrap();
        broken.set_comp(k, g.comp_or_zero(k).add_scaled(&f5().one(), &noise).unwrap()).unwrap();
        let sq = morphism_square_check(&broken, &cx, &cy, k).unwrap();
        assert!(sq.others_vanish, "case {i}");
        assert_eq!(sq.commutes, sq.morphism_verdict == Verdict::Pass, "case {i}");
        broken_detected += usize::from(!sq.commutes);
    }
    assert!(broken_detected > 0);
    eprintln!("50 square cases ({broken_detected} perturbations detected) in {:?}", start.elapsed());
}

#[test]
fn changing_the_top_operation_moves_the_attaching_map() {
    let s = exterior(7);
    let mut r = rng(15);
    let mut nonzero = 0;
    for i in 0..10 {
        let n = 2 + i % 3;
        let x = stasheff::random::random_module(&mut r, &s.h, &[0, 1, 2], 1, n + 2).unwrap();
        let c = s.context(x).unwrap();
        let (got, expect) = lift_difference(&c, n).unwrap();
        let sign = f5().sign(stasheff::signs::half_floor(n as i64 + 1));
        assert_eq!(got, expect.scaled(&sign), "case {i}");
        nonzero += usize::from(!expect.is_zero());
    }
    assert!(nonzero > 0);
}
