use std::sync::Arc;

use stasheff::dga::build_square_zero_extension;
use stasheff::field::Field;
use stasheff::graded::MultiMap;
use stasheff::models::{free_module, hochschild_cocycle, quotient_module, tate_model, truncated_polynomial_algebra, y_module, YVariant};
use stasheff::obstruction::*;
use stasheff::structures::{check_algebra, check_module, Verdict};

fn f5() -> Field {
    Field::prime(5).unwrap()
}

#[test]
fn tate_model_is_a_infinity() {
    for n in 2..=5 {
        let h = tate_model(f5(), n).unwrap();
        assert_eq!(check_algebra(&h, 2 * n + 1).verdict, Verdict::Pass, "n = {n}");
    }
}

#[test]
fn quotient_module_is_obstructed() {
    for n in 3..=6 {
        let h = Arc::new(tate_model(f5(), n).unwrap());
        let x = quotient_module(&h, n).unwrap();
        assert_eq!(check_module(&x, n).verdict, Verdict::Pass);
        assert!(extension_criterion_consistent(&x).unwrap());
        match try_extend(&x).unwrap() {
            Extension::Refused(c) => {
                assert_eq!(c.ext_dim, 1);
                assert!(c.is_generator_of_line());
                let xs: Vec<usize> = std::iter::once(0).chain(std::iter::repeat_n(1, n)).collect();
                let v = c.phi.value.eval(&xs).unwrap();
                assert_eq!(v.len(), 1, "n = {n}");
            }
            other => panic!("n = {n}: expected refusal, got {other:?}"),
        }
    }
}

#[test]
fn ext_of_quotient_module() {
    let h = Arc::new(tate_model(f5(), 4).unwrap());
    let x = quotient_module(&h, 4).unwrap();
    let cells = ext(&x, &x, &[0, 1, 2, 3, 4, 5], &[0, 1]).unwrap();
    for c in cells {
        let expect = usize::from((c.t - c.s as i64).rem_euclid(2) == 0);
        assert_eq!(c.dim, Some(expect), "s = {} t = {}", c.s, c.t);
    }
}

#[test]
fn bar_differential_squares_to_zero() {
    let h = Arc::new(tate_model(f5(), 3).unwrap());
    let y = y_module(&h, 3, YVariant::Corrected, 3).unwrap();
    let bc = BaarComplex::new(&y, &y).unwrap();
    for s in 0..4 {
        for t in 0..2 {
            let (_, _, a) = bc.differential_matrix(s, t);
            let (_, _, b) = bc.differential_matrix(s + 1, t);
            for col in &a.cols {
                assert!(b.mul_vec(col).is_empty(), "s = {s} t = {t}");
            }
        }
    }
}

#[test]
fn y_module_formulas() {
    for n in 4..=7 {
        let h = Arc::new(tate_model(f5(), n).unwrap());
        let y = y_module(&h, n, YVariant::Corrected, 2 * n + 1).unwrap();
        assert_eq!(check_module(&y, 2 * n + 1).verdict, Verdict::Pass, "n = {n}");
    }
    let h = Arc::new(tate_model(f5(), 4).unwrap());
    let y = y_module(&h, 4, YVariant::Printed, 6).unwrap();
    assert_eq!(check_module(&y, 6).verdict, Verdict::Fail);
}

#[test]
fn free_module_extends() {
    let h = Arc::new(tate_model(f5(), 4).unwrap());
    let x = free_module(&h).unwrap();
    assert_eq!(check_module(&x, 9).verdict, Verdict::Pass);
    let trunc = x.truncated(3);
    match try_extend(&trunc).unwrap() {
        Extension::Extended(d) => assert_eq!(check_module(&d.module, 4).verdict, Verdict::Pass),
        other => panic!("{other:?}"),
    }
}

#[test]
fn hochschild_differential_squares_to_zero() {
    let r = truncated_polynomial_algebra(f5(), 2).unwrap();
    let h = tate_model(f5(), 3).unwrap();
    for (alg, degs) in [(&r, vec![0]), (&h, vec![0, 1])] {
        for n in 0..4 {
            for &m in &degs {
                let (_, _, a) = hochschild_matrix(alg, n, m, HochschildSign::Consistent);
                let (_, _, b) = hochschild_matrix(alg, n + 1, m, HochschildSign::Consistent);
                for col in &a.cols {
                    assert!(b.mul_vec(col).is_empty(), "n = {n} m = {m}");
                }
            }
        }
    }
}

#[test]
fn alternative_hochschild_sign_is_not_a_differential() {
    let h = tate_model(f5(), 3).unwrap();
    let mut bad = false;
    for n in 0..3 {
        for m in 0..2 {
            let (_, _, a) = hochschild_matrix(&h, n, m, HochschildSign::Alternative);
            let (_, _, b) = hochschild_matrix(&h, n + 1, m, HochschildSign::Alternative);
            bad |= a.cols.iter().any(|c| !b.mul_vec(c).is_empty());
        }
    }
    assert!(bad);
}

#[test]
fn top_operation_is_a_cocycle() {
    for n in 3..=5 {
        let h = tate_model(f5(), n).unwrap();
        let d = hochschild_differential(&h, h.op(n).unwrap()).unwrap();
        assert!(d.is_zero());
        let obs = algebra_obstruction(&h).unwrap();
        assert!(obs.cochain.is_zero());
        assert_eq!(obs.trivial, Verdict::Pass);
        assert!(obs.current_extends);
    }
}

#[test]
fn square_zero_extensions() {
    let r = truncated_polynomial_algebra(f5(), 2).unwrap();
    let (c, nontrivial) = hochschild_cocycle(&r, 4);
    assert!(nontrivial);
    let s = build_square_zero_extension(&r, 4, &c).unwrap();
    assert_eq!(check_algebra(&s, 6).verdict, Verdict::Pass);
    let k = truncated_polynomial_algebra(f5(), 1).unwrap();
    let (c, nontrivial) = hochschild_cocycle(&k, 4);
    assert!(!nontrivial && !c.is_zero());
    let s = build_square_zero_extension(&k, 4, &c).unwrap();
    assert_eq!(check_algebra(&s, 6).verdict, Verdict::Pass);
    let mut bad = MultiMap::zero("bad", vec![r.space.clone(); 4], r.space.clone(), 0);
    bad.set(vec![1, 0, 0, 0], vec![(0, f5().one())]).unwrap();
    assert!(build_square_zero_extension(&r, 4, &bad).is_err());
}
