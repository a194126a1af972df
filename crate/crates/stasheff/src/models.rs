//! Small explicit A_infinity models: the minimal model of Tate cohomology of
//! `k[z]/z^n`, its modules `k[y^±]` and `k[y^±] ⊕ k[y^±][1]`, free modules and a
//! few associative algebras concentrated in degree 0.
//!
//! Laurent objects are stored over the even variable `y` of degree -2, so the
//! algebra `Λ(x) ⊗ k[y^±]` has basis `1` (degree 0) and `x` (degree -1) in the
//! 2-periodic grading and `m_n(x, ..., x) = 1` stands for `y`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::graded::{GradedSpace, Grading, MultiMap};
use crate::obstruction::{hochschild_cohomology, hochschild_matrix, HochschildSign};
use crate::structures::{AnAlgebra, AnModule, Side, StructureError};

const ONE: usize = 0;
const X: usize = 1;

/// `Λ(x) ⊗ k[y^±]` with `m_2` and `m_n(x, ..., x) = y` (for `n = 2`, `k[x^±]`).
pub fn tate_model(field: Field, n: usize) -> Result<AnAlgebra, StructureError> {
    let h = GradedSpace::new("H", field, Grading::Periodic(2), vec![("1".into(), 0), ("x".into(), -1)], None)?.shared();
    let m2 = MultiMap::from_fn("m2", vec![h.clone(), h.clone()], h.clone(), 0, |t| match (t[0], t[1]) {
        (ONE, b) => vec![(b, field.one())],
        (a, ONE) => vec![(a, field.one())],
        _ if n == 2 => vec![(ONE, field.one())],
        _ => vec![],
    })?;
    let mut ops = vec![MultiMap::zero("m1", vec![h.clone()], h.clone(), -1), m2];
    for k in 3..=n {
        let m = if k == n {
            MultiMap::from_fn(format!("m{k}"), vec![h.clone(); k], h.clone(), k as i64 - 2, |t| {
                if t.iter().all(|&i| i == X) {
                    vec![(ONE, field.one())]
                } else {
                    vec![]
                }
            })?
        } else {
            MultiMap::zero(format!("m{k}"), vec![h.clone(); k], h.clone(), k as i64 - 2)
        };
        ops.push(m);
    }
    AnAlgebra::new(format!("Tate{n}"), h, ops, n.max(2))
}

fn module_space(field: Field, gens: &[(&str, i64)]) -> Result<Arc<GradedSpace>, StructureError> {
    let basis = gens.iter().map(|(s, d)| (s.to_string(), *d)).collect();
    Ok(GradedSpace::new("M", field, Grading::Periodic(2), basis, None)?.shared())
}

/// `k[y^±] = H/xH` with `x` acting trivially and all higher operations zero,
/// as an `A_order`-module.
pub fn quotient_module(h: &Arc<AnAlgebra>, order: usize) -> Result<AnModule, StructureError> {
    let field = h.field();
    let x = module_space(field, &[("a", 0)])?;
    let m2 = MultiMap::from_fn("m2", vec![x.clone(), h.space.clone()], x.clone(), 0, |t| {
        if t[1] == ONE {
            vec![(t[0], field.one())]
        } else {
            vec![]
        }
    })?;
    let mut ops = vec![MultiMap::zero("m1", vec![x.clone()], x.clone(), -1), m2];
    for k in 3..=order {
        let mut inputs = vec![x.clone()];
        inputs.extend(std::iter::repeat_n(h.space.clone(), k - 1));
        ops.push(MultiMap::zero(format!("m{k}"), inputs, x.clone(), k as i64 - 2));
    }
    AnModule::new("X", h.clone(), x, Side::Right, ops, order)
}

/// Which reading of the even-height formula for the module `Y` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum YVariant {
    /// Operation in arity `n/2 - 1` as printed.
    Printed,
    /// Operation in arity `n/2 + 1`.
    Corrected,
}

/// The arities `k >= 3` in which `Y` carries a nonzero operation, and for each the
/// generator it moves: `a -> b` when the flag is true, `b -> a` otherwise.
pub fn y_operations(n: usize, variant: YVariant) -> Vec<(usize, bool, bool)> {
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        let k = match variant {
            YVariant::Printed => (n / 2).checked_sub(1),
            YVariant::Corrected => Some(n / 2 + 1),
        };
        if let Some(k) = k.filter(|&k| k >= 3) {
            out.push((k, true, true));
        }
    } else {
        for k in [n.div_ceil(2), (n + 3) / 2] {
            if k >= 3 {
                out.push((k, k % 2 == 0, k % 2 == 1));
            }
        }
    }
    out
}

/// `Y = k[y^±] ⊕ k[y^±][1]` with generators `a` (degree 0) and `b` (degree -1),
/// trivial `x`-action and the operations `m_k(-, x, ..., x)` swapping `a` and `b`.
pub fn y_module(h: &Arc<AnAlgebra>, n: usize, variant: YVariant, order: usize) -> Result<AnModule, StructureError> {
    const A: usize = 0;
    const B: usize = 1;
    let field = h.field();
    let y = module_space(field, &[("a", 0), ("b", -1)])?;
    let m2 = MultiMap::from_fn("m2", vec![y.clone(), h.space.clone()], y.clone(), 0, |t| {
        if t[1] == ONE {
            vec![(t[0], field.one())]
        } else {
            vec![]
        }
    })?;
    let special = y_operations(n, variant);
    let mut ops = vec![MultiMap::zero("m1", vec![y.clone()], y.clone(), -1), m2];
    for k in 3..=order {
        let mut inputs = vec![y.clone()];
        inputs.extend(std::iter::repeat_n(h.space.clone(), k - 1));
        let rule = special.iter().find(|s| s.0 == k).copied();
        let m = MultiMap::from_fn(format!("m{k}"), inputs, y.clone(), k as i64 - 2, |t| {
            let Some((_, a_to_b, b_to_a)) = rule else { return vec![] };
            if !t[1..].iter().all(|&i| i == X) {
                return vec![];
            }
            match t[0] {
                A if a_to_b => vec![(B, field.one())],
                B if b_to_a => vec![(A, field.one())],
                _ => vec![],
            }
        })?;
        ops.push(m);
    }
    AnModule::new("Y", h.clone(), y, Side::Right, ops, order)
}

/// An algebra as a right module over itself, with all of its operations.
pub fn free_module(h: &Arc<AnAlgebra>) -> Result<AnModule, StructureError> {
    let ops = h.ops().to_vec();
    AnModule::new(format!("{}_free", h.name), h.clone(), h.space.clone(), Side::Right, ops, h.order)
}

/// A commutative algebra `k[t]/t^m` concentrated in degree 0, as an associative algebra.
pub fn truncated_polynomial_algebra(field: Field, m: usize) -> Result<AnAlgebra, StructureError> {
    let names: Vec<(String, i64)> = (0..m).map(|k| (if k == 0 { "1".into() } else { format!("t{k}") }, 0)).collect();
    let r = GradedSpace::new(format!("k[t]/t{m}"), field, Grading::Integer, names, None)?.shared();
    let m2 = MultiMap::from_fn("m2", vec![r.clone(), r.clone()], r.clone(), 0, |t| {
        if t[0] + t[1] < m {
            vec![(t[0] + t[1], field.one())]
        } else {
            vec![]
        }
    })?;
    AnAlgebra::new(r.label().to_string(), r.clone(), vec![MultiMap::zero("m1", vec![r.clone()], r, -1), m2], 2)
}

/// A Hochschild cocycle `R^{⊗n} -> R` of degree 0. A representative of a nonzero
/// class is preferred; when `HH^{n,0}` vanishes a nonzero coboundary is returned.
/// The flag reports whether the class is nonzero.
pub fn hochschild_cocycle(r: &AnAlgebra, n: usize) -> (MultiMap, bool) {
    let (_, reps) = hochschild_cohomology(r, n, 0);
    if let Some(c) = reps.into_iter().next() {
        return (c.renamed(format!("c{n}")), true);
    }
    let (dom, cod, mat) = hochschild_matrix(r, n - 1, 0, HochschildSign::Consistent);
    let _ = dom;
    let col = mat.cols.iter().find(|c| !c.is_empty()).cloned().unwrap_or_default();
    (cod.to_map(&format!("c{n}"), &col), false)
}

/// The one-dimensional module `k` on which the unit basis vector `unit` acts as the
/// identity and every other basis vector of `H` acts by zero. All higher operations
/// vanish, so this is an A_3-module exactly when `unit` spans a complement of an ideal.
pub fn augmentation_module(h: &Arc<AnAlgebra>, unit: usize, order: usize) -> Result<AnModule, StructureError> {
    let field = h.field();
    let x = module_space(field, &[("a", 0)])?;
    let m2 = MultiMap::from_fn("m2", vec![x.clone(), h.space.clone()], x.clone(), 0, |t| {
        if t[1] == unit {
            vec![(t[0], field.one())]
        } else {
            vec![]
        }
    })?;
    let mut ops = vec![MultiMap::zero("m1", vec![x.clone()], x.clone(), -1), m2];
    for k in 3..=order {
        let mut inputs = vec![x.clone()];
        inputs.extend(std::iter::repeat_n(h.space.clone(), k - 1));
        ops.push(MultiMap::zero(format!("m{k}"), inputs, x.clone(), k as i64 - 2));
    }
    AnModule::new("k", h.clone(), x, Side::Right, ops, order)
}

/// The exterior algebra `Λ(e)` on one generator of degree `deg`, integer graded.
pub fn exterior_algebra(field: Field, deg: i64) -> Result<AnAlgebra, StructureError> {
    let s = GradedSpace::new("Λ", field, Grading::Integer, vec![("1".into(), 0), ("e".into(), deg)], None)?.shared();
    let m2 = MultiMap::from_fn("m2", vec![s.clone(), s.clone()], s.clone(), 0, |t| match (t[0], t[1]) {
        (ONE, b) => vec![(b, field.one())],
        (a, ONE) => vec![(a, field.one())],
        _ => vec![],
    })?;
    AnAlgebra::new("Λ", s.clone(), vec![MultiMap::zero("m1", vec![s.clone()], s, -1), m2], 2)
}
