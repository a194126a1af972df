//! Regenerates the structure files under `fixtures/`.

use std::path::Path;
use std::sync::Arc;

use stasheff::dga::{build_square_zero_extension, build_truncated_polynomial_example, formal_dga, homology};
use stasheff::field::Field;
use stasheff::io::{serialize, Structure};
use stasheff::models::*;
use stasheff::random::{random_module, rng, transport, Setting};
use stasheff::structures::AnMorphism;
use stasheff::transfer::kadeishvili_transfer;

fn write(dir: &Path, name: &str, s: Structure) {
    std::fs::write(dir.join(name), serialize(&s, None)).unwrap();
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let f5 = Field::prime(5).unwrap();
    for n in [4, 5] {
        let h = Arc::new(tate_model(f5, n).unwrap().truncated(8));
        let h = Arc::new({
            let mut h2 = (*h).clone();
            for k in h.order + 1..=8 {
                h2.set_op(k, h2.zero_op(k)).unwrap();
            }
            h2
        });
        write(&dir, &format!("tate{n}_algebra.json"), Structure::AnAlgebra((*h).clone()));
        write(&dir, &format!("tate{n}_free_module.json"), Structure::AnModule(free_module(&h).unwrap()));
        write(&dir, &format!("tate{n}_quotient_module.json"), Structure::AnModule(quotient_module(&h, n).unwrap()));
        write(&dir, &format!("tate{n}_y_module.json"), Structure::AnModule(y_module(&h, n, YVariant::Corrected, 8).unwrap()));
    }
    write(&dir, "dual_numbers.json", Structure::AnAlgebra(truncated_polynomial_algebra(f5, 2).unwrap()));
    let r = truncated_polynomial_algebra(f5, 2).unwrap();
    let (c, _) = hochschild_cocycle(&r, 4);
    write(&dir, "square_zero_m2_n4.json", Structure::AnAlgebra(build_square_zero_extension(&r, 4, &c).unwrap()));
    let a = build_truncated_polynomial_example(5, 3).unwrap();
    write(&dir, "trunc_poly_p5_n3_dga.json", Structure::Dga(a.clone()));
    let hd = homology(&a.complex(), "h").unwrap();
    let (h, f) = kadeishvili_transfer(&a, &hd, 5).unwrap();
    let h = Arc::new(h);
    write(&dir, "trunc_poly_p5_n3_transfer.json", Structure::AlgebraMorphism(f));
    write(&dir, "trunc_poly_p5_n3_free_module.json", Structure::AnModule(free_module(&h).unwrap()));
    let setting = Setting { h: h.clone(), ..Setting::from_dga(a, 5).unwrap() };
    let unit = setting.context(free_module(&h).unwrap()).unwrap().unit_of_h().unwrap();
    write(&dir, "trunc_poly_p5_n3_augmentation_module.json", Structure::AnModule(augmentation_module(&h, unit, 3).unwrap()));
    let lam = Arc::new(exterior_algebra(f5, 1).unwrap());
    write(&dir, "exterior_dga.json", Structure::Dga(formal_dga(&lam, 0).unwrap()));
    let mut r = rng(2024);
    let x = Arc::new(random_module(&mut r, &lam, &[0, 1, 2], 1, 4).unwrap());
    write(&dir, "exterior_random_module.json", Structure::AnModule((*x).clone()));
    let (y, g) = transport(&mut r, &x, 4).unwrap();
    let g = AnMorphism::new("g", x.clone(), Arc::new(y), g.comps().to_vec(), 4).unwrap();
    write(&dir, "exterior_random_morphism.json", Structure::AnMorphism(g));
    let q = Field::Rational;
    write(&dir, "tate3_rational_algebra.json", Structure::AnAlgebra(tate_model(q, 3).unwrap()));
}
