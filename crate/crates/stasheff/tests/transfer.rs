use std::time::Instant;

use stasheff::dga::{build_truncated_polynomial_example, homology};
use stasheff::structures::{check_algebra, check_algebra_morphism, check_module, Verdict};
use stasheff::transfer::{kadeishvili_transfer, module_structure_on_a};

#[test]
fn transfer_on_truncated_polynomial_models() {
    for n in 3..=5 {
        let start = Instant::now();
        let a = build_truncated_polynomial_example(5, n).unwrap();
        a.validate().unwrap();
        let hd = homology(&a.complex(), "h").unwrap();
        hd.verify(&a.complex()).unwrap();
        let (h, f) = kadeishvili_transfer(&a, &hd, 6).unwrap();
        assert_eq!(check_algebra(&h, 6).verdict, Verdict::Pass, "n = {n}");
        assert_eq!(check_algebra_morphism(&f, 6).verdict, Verdict::Pass, "n = {n}");
        let left = module_structure_on_a(&a, &f.truncated(4)).unwrap();
        assert_eq!(check_module(&left, 5).verdict, Verdict::Pass, "n = {n}");
        eprintln!("n = {n}: dim H = {} in {:?}", h.space.dim(), start.elapsed());
    }
}
