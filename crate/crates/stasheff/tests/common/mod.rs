#![allow(dead_code)]

use std::sync::Arc;

use stasheff::dga::{build_truncated_polynomial_example, formal_dga};
use stasheff::field::Field;
use stasheff::models::exterior_algebra;
use stasheff::random::{random_module, Rand, Setting};
use stasheff::structures::AnModule;

pub fn f5() -> Field {
    Field::prime(5).unwrap()
}

/// The endomorphism model of `k[z]/z^3` over F_5 with its minimal model to `order`.
pub fn periodic(order: usize) -> Setting {
    Setting::from_dga(build_truncated_polynomial_example(5, 3).unwrap(), order).unwrap()
}

/// `Λ(e)` with `|e| = 1` viewed as a formal DGA.
pub fn exterior(order: usize) -> Setting {
    Setting::from_dga(formal_dga(&exterior_algebra(f5(), 1).unwrap(), 0).unwrap(), order).unwrap()
}

/// A random module case: the setting, the module and the bar stage `n` (module order `n+1`).
pub fn random_case(rng: &mut Rand, per: &Setting, ext: &Setting, i: usize, max_n: usize) -> (Setting, AnModule, usize) {
    use rand::Rng;
    if i.is_multiple_of(3) {
        let n = rng.gen_range(2..=max_n.min(3));
        let x = random_module(rng, &per.h, &[0, 1], 1, n + 1).unwrap();
        (per.clone(), x, n)
    } else {
        let n = rng.gen_range(2..=max_n);
        let x = random_module(rng, &ext.h, &[0, 1, 2], 1, n + 1).unwrap();
        (ext.clone(), x, n)
    }
}

pub fn arc(x: AnModule) -> Arc<AnModule> {
    Arc::new(x)
}
