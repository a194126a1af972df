//! Transfer of the A_infinity structure of a DGA to its homology, together with the
//! quasi-isomorphism `f: H -> A` and the induced left module structure on `A`.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::dga::{Dga, HomologyData};
use crate::graded::{all_tuples, same_space, GradedError, MultiMap, Tensor, TensorError};
use crate::linalg::SVec;
use crate::signs::sign_of;
use crate::structures::{eval_terms, AlgebraMorphism, AnAlgebra, AnModule, Layer, Side, StructureError, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("homology data does not match the algebra")]
    Mismatch,
    #[error("stage {stage}: the correction term is not a cycle on inputs of degree {degree}")]
    NotACycle { stage: usize, degree: i64 },
}

fn apply1(m: &MultiMap, v: &SVec) -> Result<SVec, TensorError> {
    Ok(Tensor::from_vec(m.inputs()[0].clone(), v).apply_at(0, m)?.to_vec())
}

/// The A_infinity structure on `H(A)` up to order `order` and the morphism `f: H -> A`.
///
/// At stage `n` let `S = sum_{0<u+t<n-1} (-1)^{u+t(n-u-t)} f_{u+t+1}(1^u ⊗ m_{n-u-t} ⊗ 1^t)
/// + sum_{i=1}^{n-1} (-1)^i mu(f_i ⊗ f_{n-i})`. It is a cycle; `m_n = -p(S)` and
/// `f_n = h(S)` give `d f_n = f_1 m_n + S`.
pub fn kadeishvili_transfer(a: &Dga, hd: &HomologyData, order: usize) -> Result<(AnAlgebra, AlgebraMorphism), TransferError> {
    if !same_space(hd.incl.target(), &a.space) || !same_space(&hd.proj.inputs()[0], &a.space) {
        return Err(TransferError::Mismatch);
    }
    let hs = hd.h.clone();
    let field = a.field();
    let target = Arc::new(a.as_algebra());
    let mut alg =
        AnAlgebra::new(format!("H({})", a.name), hs.clone(), vec![MultiMap::zero("m1", vec![hs.clone()], hs.clone(), -1)], order.max(1))?;
    let mut comps: Vec<MultiMap> = vec![hd.incl.clone().renamed("f1")];
    for n in 2..=order {
        let mut terms: Vec<Term<'_>> = Vec::new();
        for s in 2..n {
            for u in 0..=(n - s) {
                let t = n - s - u;
                if let Some(inner) = alg.op(s) {
                    let outer = &comps[u + t];
                    if !outer.is_zero() {
                        terms.push(Term::insert(sign_of((u + t * s) as i64), outer, u, inner));
                    }
                }
            }
        }
        for i in 1..n {
            let (l, r) = (&comps[i - 1], &comps[n - i - 1]);
            if !l.is_zero() && !r.is_zero() {
                terms.push(Term { sign: sign_of(i as i64), layers: vec![Layer::Word(vec![l, r]), Layer::At(0, &a.mu)] });
            }
        }
        let inputs = vec![hs.clone(); n];
        let tuples = all_tuples(&vec![hs.dim(); n]);
        let values: Vec<Result<(SVec, SVec), TransferError>> = tuples
            .par_iter()
            .map(|t| {
                let s = eval_terms(field, &terms, &Tensor::basis(inputs.clone(), t.clone()))?;
                let s = if s.slots().is_empty() { Vec::new() } else { s.to_vec() };
                if !apply1(&a.d, &s)?.is_empty() {
                    let degree = t.iter().map(|&i| hs.degree(i)).sum();
                    return Err(TransferError::NotACycle { stage: n, degree });
                }
                let m = crate::linalg::scale(&apply1(&hd.proj, &s)?, &-field.one());
                Ok((m, apply1(&hd.htpy, &s)?))
            })
            .collect();
        let mut mn = MultiMap::zero(format!("m{n}"), inputs.clone(), hs.clone(), n as i64 - 2);
        let mut fnn = MultiMap::zero(format!("f{n}"), inputs, a.space.clone(), n as i64 - 1);
        for (t, v) in tuples.into_iter().zip(values) {
            let (m, f) = v?;
            if !m.is_empty() {
                mn.set(t.clone(), m)?;
            }
            if !f.is_empty() {
                fnn.set(t, f)?;
            }
        }
        alg.set_op(n, mn)?;
        comps.push(fnn);
    }
    let src = Arc::new(alg.clone());
    let f = AlgebraMorphism::new("f", src, target, comps, order)?;
    Ok((alg, f))
}

/// `A` as a left module over the transferred structure: `m_1 = d` and
/// `m_n = (-1)^n mu ∘ (f_{n-1} ⊗ 1)` for `n >= 2`.
pub fn module_structure_on_a(a: &Dga, f: &AlgebraMorphism) -> Result<AnModule, TransferError> {
    let hs = f.source.space.clone();
    let field = a.field();
    let mut ops = vec![a.d.clone().renamed("m1")];
    for n in 2..=f.order + 1 {
        let fk = f.comp_or_zero(n - 1);
        let mut inputs = vec![hs.clone(); n - 1];
        inputs.push(a.space.clone());
        let sign = field.sign(n as i64);
        let ins = inputs.clone();
        let m = MultiMap::from_fn(format!("m{n}"), inputs, a.space.clone(), n as i64 - 2, |t| {
            Tensor::basis(ins.clone(), t.to_vec())
                .apply_at(0, &fk)
                .and_then(|x| x.apply_at(0, &a.mu))
                .map(|x| crate::linalg::scale(&x.to_vec(), &sign))
                .unwrap_or_default()
        })?;
        ops.push(m);
    }
    Ok(AnModule::new(format!("{}_left", a.name), f.source.clone(), a.space.clone(), Side::Left, ops, f.order + 1)?)
}
