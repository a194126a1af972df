//! Seeded random structures for the property suites: multilinear maps, modules built
//! from free ones by random stagewise extension, and morphisms obtained by
//! transporting a structure along a random automorphism of the underlying space.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::barpost::{BarContext, BarError};
use crate::dga::{homology, Dga};
use crate::field::{Field, Scalar};
use crate::graded::{all_tuples, GradedSpace, MultiMap};
use crate::linalg::{scale, SVec};
use crate::obstruction::{try_extend_with, Extension, ObstructionError};
use crate::structures::{morphism_terms, residual, AlgebraMorphism, AnAlgebra, AnModule, AnMorphism, Side, StructureError};
use crate::transfer::kadeishvili_transfer;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_scalar(rng: &mut Rand, field: Field) -> Scalar {
    match field.characteristic() {
        0 => field.from_i64(rng.gen_range(-3..=3)),
        p => field.from_i64(rng.gen_range(0..p as i64)),
    }
}

/// A random map of the given shape; each admissible coefficient is drawn with
/// probability `density`.
pub fn random_map(
    rng: &mut Rand,
    name: &str,
    inputs: Vec<Arc<GradedSpace>>,
    target: Arc<GradedSpace>,
    degree: i64,
    density: f64,
) -> Result<MultiMap, StructureError> {
    let field = target.field();
    let g = target.grading();
    let mut m = MultiMap::zero(name, inputs.clone(), target.clone(), degree);
    let dims: Vec<usize> = inputs.iter().map(|s| s.dim()).collect();
    for t in all_tuples(&dims) {
        let deg: i64 = t.iter().zip(&inputs).map(|(i, s)| s.degree(*i)).sum::<i64>() + degree;
        let mut v: SVec = Vec::new();
        for o in 0..target.dim() {
            if g.same(target.degree(o), deg) && rng.gen_bool(density) {
                let c = random_scalar(rng, field);
                if !c.is_zero() {
                    v.push((o, c));
                }
            }
        }
        if !v.is_empty() {
            m.set(t, v)?;
        }
    }
    Ok(m)
}

/// A DGA together with its transferred minimal model, quasi-isomorphism and projection.
#[derive(Clone)]
pub struct Setting {
    pub a: Arc<Dga>,
    pub h: Arc<AnAlgebra>,
    pub f: Arc<AlgebraMorphism>,
    pub proj: Arc<MultiMap>,
}

impl Setting {
    pub fn from_dga(a: Dga, order: usize) -> Result<Self, BarError> {
        let hd = homology(&a.complex(), "h")?;
        let (h, mut f) = kadeishvili_transfer(&a, &hd, order)?;
        let h = Arc::new(h);
        f.source = h.clone();
        Ok(Setting { a: Arc::new(a), h, f: Arc::new(f), proj: Arc::new(hd.proj) })
    }

    pub fn context(&self, x: AnModule) -> Result<BarContext, BarError> {
        if !Arc::ptr_eq(&x.algebra, &self.h) && !crate::graded::same_space(&x.algebra.space, &self.h.space) {
            return Err(BarError::Invalid("module lives over another algebra".into()));
        }
        BarContext::new(Arc::new(x), self.a.clone(), self.f.clone(), self.proj.clone())
    }
}

/// `V ⊗ H` as a right module with `m_k(v ⊗ h_1, h_2, ...) = (-1)^{(k-2)|v|} v ⊗ m_k(h_1, ...)`.
pub fn free_on(h: &Arc<AnAlgebra>, v: &Arc<GradedSpace>, order: usize) -> Result<AnModule, StructureError> {
    let field = h.field();
    let hs = &h.space;
    let basis: Vec<(String, i64)> = (0..v.dim())
        .flat_map(|i| (0..hs.dim()).map(move |j| (i, j)))
        .map(|(i, j)| (format!("{}⊗{}", v.name(i), hs.name(j)), v.degree(i) + hs.degree(j)))
        .collect();
    let x = GradedSpace::new(format!("{}⊗H", v.label()), field, hs.grading(), basis, None)?.shared();
    let nh = hs.dim();
    let mut ops = vec![MultiMap::zero("m1", vec![x.clone()], x.clone(), -1)];
    for k in 2..=order {
        let mut inputs = vec![x.clone()];
        inputs.extend(std::iter::repeat_n(hs.clone(), k - 1));
        let op = h.op_or_zero(k);
        let m = MultiMap::from_fn(format!("m{k}"), inputs, x.clone(), k as i64 - 2, |t| {
            let (vi, h1) = (t[0] / nh, t[0] % nh);
            let mut ht = vec![h1];
            ht.extend_from_slice(&t[1..]);
            let sign = field.sign((k as i64 - 2) * v.degree(vi));
            op.eval(&ht).map(|vals| vals.iter().map(|(o, c)| (vi * nh + o, &sign * c)).collect()).unwrap_or_default()
        })?;
        ops.push(m);
    }
    AnModule::new(format!("free_{}", v.label()), h.clone(), x, Side::Right, ops, order)
}

/// A random graded space with at most `max_dim` basis vectors in each degree of `degrees`.
pub fn random_space(
    rng: &mut Rand,
    field: Field,
    grading: crate::graded::Grading,
    degrees: &[i64],
    max_dim: usize,
) -> Result<Arc<GradedSpace>, StructureError> {
    let mut basis = Vec::new();
    for &d in degrees {
        for _ in 0..rng.gen_range(0..=max_dim) {
            basis.push((format!("v{}", basis.len()), d));
        }
    }
    if basis.is_empty() {
        basis.push(("v0".to_string(), degrees[0]));
    }
    Ok(GradedSpace::new("V", field, grading, basis, None)?.shared())
}

/// Extends `x` to order `order` one stage at a time, choosing random values for all
/// free parameters and for each new top operation. Returns `None` when a stage is obstructed.
pub fn random_extension(rng: &mut Rand, x: &AnModule, order: usize) -> Result<Option<AnModule>, ObstructionError> {
    let field = x.field();
    let mut cur = x.clone();
    while cur.order < order {
        let n = cur.order;
        let coeffs: Vec<Scalar> = (0..256).map(|_| random_scalar(rng, field)).collect();
        let inputs = cur.op_inputs(n + 1);
        let xi = random_map(rng, &format!("m{}", n + 1), inputs, cur.space.clone(), n as i64 - 1, 0.3)?;
        match try_extend_with(&cur, &coeffs, Some(xi))? {
            Extension::Extended(d) => cur = d.module,
            _ => return Ok(None),
        }
    }
    Ok(Some(cur))
}

/// A random module over `h` of order `order`: a free module on a random space,
/// transported along a random automorphism and then randomly re-extended from order three.
pub fn random_module(
    rng: &mut Rand,
    h: &Arc<AnAlgebra>,
    degrees: &[i64],
    max_dim: usize,
    order: usize,
) -> Result<AnModule, ObstructionError> {
    let v = random_space(rng, h.field(), h.space.grading(), degrees, max_dim)?;
    let free = free_on(h, &v, order)?;
    let (moved, _) = transport(rng, &Arc::new(free), order)?;
    for _ in 0..8 {
        if let Some(x) = random_extension(rng, &moved.truncated(3.min(order)), order)? {
            return Ok(x);
        }
    }
    Ok(moved)
}

/// A module `Y` on the same space as `x` and an A_order-morphism `g: x -> Y` with
/// `g_1 = c · id` and random higher components: the operations of `Y` are solved from
/// the morphism identities order by order.
pub fn transport(rng: &mut Rand, x: &Arc<AnModule>, order: usize) -> Result<(AnModule, AnMorphism), StructureError> {
    let field = x.field();
    let c = loop {
        let c = random_scalar(rng, field);
        if !c.is_zero() {
            break c;
        }
    };
    let cinv = c.inv().expect("nonzero scalar");
    let id = MultiMap::identity(&x.space).scaled(&c).renamed("g1");
    let mut y = AnModule::new(format!("{}'", x.name), x.algebra.clone(), x.space.clone(), Side::Right, vec![x.op_or_zero(1)], order)?;
    let mut comps = vec![id];
    for k in 2..=order {
        comps.push(random_map(rng, &format!("g{k}"), x.op_inputs(k), x.space.clone(), k as i64 - 1, 0.3)?);
    }
    for m in 2..=order {
        let target = Arc::new(y.clone());
        let g = AnMorphism::new("g", x.clone(), target, comps.clone(), order)?;
        let terms = morphism_terms(&g, m);
        let inputs = x.op_inputs(m);
        let dims: Vec<usize> = inputs.iter().map(|s| s.dim()).collect();
        let mut op = y.zero_op(m);
        for t in all_tuples(&dims) {
            let r = residual(field, &inputs, &terms, &t).map_err(|e| StructureError::Shape("transport".into(), e.to_string()))?;
            if !r.is_empty() {
                op.set(t, scale(&r, &cinv))?;
            }
        }
        y.set_op(m, op)?;
    }
    let y = Arc::new(y);
    let g = AnMorphism::new("g", x.clone(), y.clone(), comps, order)?;
    Ok(((*y).clone(), g))
}
