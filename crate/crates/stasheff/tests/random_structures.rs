use std::sync::Arc;

use stasheff::dga::{build_truncated_polynomial_example, formal_dga};
use stasheff::field::Field;
use stasheff::models::exterior_algebra;
use stasheff::random::*;
use stasheff::structures::{check_module, check_morphism, Verdict};

#[test]
fn random_modules_are_valid() {
    let per = Setting::from_dga(build_truncated_polynomial_example(5, 3).unwrap(), 5).unwrap();
    let ext = Setting::from_dga(formal_dga(&exterior_algebra(Field::prime(5).unwrap(), 1).unwrap(), 0).unwrap(), 6).unwrap();
    let mut r = rng(7);
    for i in 0..10 {
        let (s, degs, order) = if i % 2 == 0 { (&per, vec![0, 1], 4) } else { (&ext, vec![0, 1, 2], 5) };
        let x = random_module(&mut r, &s.h, &degs, 1, order).unwrap();
        assert_eq!(check_module(&x, order).verdict, Verdict::Pass, "case {i}");
        let x = Arc::new(x);
        let (y, g) = transport(&mut r, &x, order).unwrap();
        assert_eq!(check_module(&y, order).verdict, Verdict::Pass, "case {i}");
        assert_eq!(check_morphism(&g, order).verdict, Verdict::Pass, "case {i}");
        let nz = (3..=order).filter(|&k| x.op(k).is_some()).count();
        eprintln!("case {i}: dim {} nonzero higher ops {nz}", x.space.dim());
    }
}
