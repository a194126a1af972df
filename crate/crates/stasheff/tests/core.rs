use proptest::prelude::*;

use stasheff::dga::{build_truncated_polynomial_example, homology};
use stasheff::field::Field;
use stasheff::graded::MultiMap;
use stasheff::linalg::{rank, solve_linear, SparseMatrix};
use stasheff::signs::{floor_sign, homotopy_fiber, shift, square};

const P: i64 = 7;

fn dense_rank_mod_p(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(P)).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = (1..P).find(|x| x * m[r][c] % P == 1).unwrap();
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c] * inv % P;
                for j in 0..ncols {
                    m[i][j] = (m[i][j] - f * m[r][j]).rem_euclid(P);
                }
            }
        }
        r += 1;
    }
    r
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..4, c), r))
}

proptest! {
    #[test]
    fn field_axioms(a in -50i64..50, b in -50i64..50, c in -50i64..50, rational in any::<bool>()) {
        let f = if rational { Field::Rational } else { Field::prime(P as u32).unwrap() };
        let (a, b, c) = (f.from_i64(a), f.from_i64(b), f.from_i64(c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
        prop_assert_eq!(f.parse(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn rank_matches_dense_elimination(rows in matrix()) {
        let f = Field::prime(P as u32).unwrap();
        let m = SparseMatrix::from_dense(f, &rows);
        prop_assert_eq!(rank(f, &m), dense_rank_mod_p(&rows));
    }

    #[test]
    fn solutions_and_kernels(rows in matrix(), x in prop::collection::vec(-3i64..4, 6), rational in any::<bool>()) {
        let f = if rational { Field::Rational } else { Field::prime(P as u32).unwrap() };
        let m = SparseMatrix::from_dense(f, &rows);
        let x: Vec<_> = x.iter().take(m.ncols()).enumerate().map(|(i, v)| (i, f.from_i64(*v))).filter(|(_, v)| !v.is_zero()).collect();
        let b = m.mul_vec(&x);
        let sol = solve_linear(f, &m, &b);
        let p = sol.particular.expect("b is in the image");
        prop_assert_eq!(m.mul_vec(&p), b);
        for k in &sol.kernel {
            prop_assert!(m.mul_vec(k).is_empty());
        }
        prop_assert_eq!(sol.kernel.len() + rank(f, &m), m.ncols());
    }
}

#[test]
fn floor_sign_identity_on_a_grid() {
    for i in -20..=20 {
        for j in -20..=20 {
            let (l, r) = floor_sign(i, j);
            assert_eq!(l, r, "({i}, {j})");
        }
    }
}

#[test]
fn fiber_of_the_identity_is_acyclic() {
    let a = build_truncated_polynomial_example(5, 3).unwrap();
    let c = a.complex();
    let id = MultiMap::identity(&c.space);
    let (fib, pi) = homotopy_fiber(&c, &c, &id).unwrap();
    assert!(square(&fib).unwrap().is_zero());
    assert_eq!(pi.degree(), 0);
    assert_eq!(homology(&fib, "h").unwrap().h.dim(), 0);
    for n in [-1, 1, 2] {
        let s = shift(&c, n);
        assert!(square(&s).unwrap().is_zero());
        assert_eq!(homology(&s, "h").unwrap().h.dim(), homology(&c, "h").unwrap().h.dim());
    }
}

#[test]
fn fiber_rejects_non_chain_maps() {
    let a = build_truncated_polynomial_example(5, 3).unwrap();
    let c = a.complex();
    let two = MultiMap::identity(&c.space).scaled(&Field::prime(5).unwrap().from_i64(2));
    assert!(homotopy_fiber(&c, &c, &two).is_ok());
    let mut bad = MultiMap::identity(&c.space);
    let i = (0..c.space.dim())
        .find(|i| !c.d.entries().contains_key(&vec![*i]) && c.d.entries().values().any(|v| v.iter().any(|(o, _)| o == i)))
        .unwrap();
    bad.set(vec![i], vec![]).unwrap();
    assert!(homotopy_fiber(&c, &c, &bad).is_err());
}
