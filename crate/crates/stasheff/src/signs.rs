//! Sign and shift conventions: Koszul composition, desuspension, homotopy fibers
//! and the floor-parity identity used throughout the bar construction.

use std::sync::Arc;

use thiserror::Error;

use crate::graded::{all_tuples, same_space, ChainComplex, GradedError, GradedSpace, MultiMap, Tensor, TensorError};
use crate::linalg::SVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("not a chain map: d f - f d is nonzero on `{0}`")]
    NotChainMap(String),
}

/// `floor(x / 2)` for any integer.
pub fn half_floor(x: i64) -> i64 {
    x.div_euclid(2)
}

/// `(-1)^e` as `+1` or `-1`.
pub fn sign_of(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Both sides of `floor((i+1)/2) + floor(j/2) = floor((j-i)/2) + ij (mod 2)` as signs.
pub fn floor_sign(i: i64, j: i64) -> (i64, i64) {
    let lhs = half_floor(i + 1) + half_floor(j);
    let rhs = half_floor(j - i) + i * j;
    (sign_of(lhs), sign_of(rhs))
}

/// `f ∘ (1^{pos} ⊗ g ⊗ 1^{rest})` as a multilinear map, with Koszul signs from the
/// identity slots in front of `g`.
pub fn compose_at(f: &MultiMap, pos: usize, g: &MultiMap) -> Result<MultiMap, SignError> {
    if pos >= f.arity() || !same_space(g.target(), &f.inputs()[pos]) {
        return Err(GradedError::Shape(format!("cannot insert {} into slot {pos} of {}", g.name(), f.name())).into());
    }
    let mut inputs: Vec<Arc<GradedSpace>> = f.inputs()[..pos].to_vec();
    inputs.extend_from_slice(g.inputs());
    inputs.extend_from_slice(&f.inputs()[pos + 1..]);
    let name = format!("{}∘{}", f.name(), g.name());
    let mut out = MultiMap::zero(name, inputs.clone(), f.target().clone(), f.degree() + g.degree());
    let dims: Vec<usize> = inputs.iter().map(|s| s.dim()).collect();
    for t in all_tuples(&dims) {
        let v = Tensor::basis(inputs.clone(), t.clone()).apply_at(pos, g)?.apply_at(0, f)?;
        if !v.is_zero() {
            out.set(t, v.to_vec())?;
        }
    }
    Ok(out)
}

/// Plain composition of maps `g: V^{⊗k} -> W` and `f: W -> U`.
pub fn compose(f: &MultiMap, g: &MultiMap) -> Result<MultiMap, SignError> {
    compose_at(f, 0, g)
}

/// Tensor product `f_1 ⊗ ... ⊗ f_u` of multilinear maps as one map into the tensor
/// product of the targets, returned as a function on tensors.
pub fn tensor_word_eval(word: &[&MultiMap], x: &Tensor) -> Result<Tensor, SignError> {
    Ok(x.apply_word(word)?)
}

/// Factorwise composition of tensor words:
/// `(f_1 ⊗ ... ⊗ f_u) ∘ (h_1 ⊗ ... ⊗ h_u) = ε (f_1 h_1) ⊗ ... ⊗ (f_u h_u)`
/// where every `f_j` has arity one and `ε = prod_{i<j} (-1)^{|f_j||h_i|}`.
/// Returns the sign together with the composed factors.
pub fn koszul_compose(outer: &[&MultiMap], inner: &[&MultiMap]) -> Result<(i64, Vec<MultiMap>), SignError> {
    if outer.len() != inner.len() {
        return Err(GradedError::Shape("tensor words of different lengths".into()).into());
    }
    let mut e = 0i64;
    for j in 0..outer.len() {
        for h in &inner[..j] {
            e += outer[j].degree() * h.degree();
        }
    }
    let mut parts = Vec::with_capacity(outer.len());
    for (f, h) in outer.iter().zip(inner) {
        if f.arity() != 1 {
            return Err(GradedError::Shape(format!("outer factor {} must have arity one", f.name())).into());
        }
        parts.push(compose(f, h)?);
    }
    Ok((sign_of(e), parts))
}

/// `C[n]` with differential `(-1)^n d`.
pub fn shift(c: &ChainComplex, n: i64) -> ChainComplex {
    let space = c.space.shifted(format!("{}[{n}]", c.space.label()), n).shared();
    let s = c.space.field().sign(n);
    let mut d = MultiMap::zero(format!("{}[{n}]", c.d.name()), vec![space.clone()], space.clone(), -1);
    for (t, v) in c.d.entries() {
        d.set(t.clone(), crate::linalg::scale(v, &s)).expect("shift preserves degrees");
    }
    d.set_valid(c.d.valid().map(|(lo, hi)| (lo - n, hi - n)));
    ChainComplex { space, d }
}

/// The standard homotopy fiber `F_k = D_{k+1} ⊕ C_k` of a chain map `f: C -> D`,
/// with differential `[[-d, f], [0, d]]` and the projection onto `C`.
pub fn homotopy_fiber(c: &ChainComplex, dd: &ChainComplex, f: &MultiMap) -> Result<(ChainComplex, MultiMap), SignError> {
    if f.arity() != 1 || f.degree() != 0 || !same_space(&f.inputs()[0], &c.space) || !same_space(f.target(), &dd.space) {
        return Err(GradedError::Shape("homotopy fiber needs a degree zero map C -> D".into()).into());
    }
    let df = compose(&dd.d, f)?;
    let fd = compose(f, &c.d)?;
    if df != fd {
        let diff = df.add_scaled(&-c.space.field().one(), &fd)?;
        let first = diff.entries().keys().next().map(|t| c.space.name(t[0]).to_string()).unwrap_or_default();
        return Err(SignError::NotChainMap(first));
    }
    let fs = GradedSpace::direct_sum(format!("Fib({})", f.name()), &[(&dd.space, "d:", 1), (&c.space, "c:", 0)])?.shared();
    let off = dd.space.dim();
    let field = c.space.field();
    let mut d = MultiMap::zero("d_F", vec![fs.clone()], fs.clone(), -1);
    for (t, v) in dd.d.entries() {
        d.set(vec![t[0]], crate::linalg::scale(v, &-field.one()))?;
    }
    for i in 0..c.space.dim() {
        let mut val: SVec = f.entries().get(&vec![i]).cloned().unwrap_or_default();
        if let Some(w) = c.d.entries().get(&vec![i]) {
            val.extend(w.iter().map(|(o, s)| (o + off, s.clone())));
        }
        d.set(vec![i + off], val)?;
    }
    let mut pi = MultiMap::zero("pi", vec![fs.clone()], c.space.clone(), 0);
    for i in 0..c.space.dim() {
        pi.set(vec![i + off], vec![(i, field.one())])?;
    }
    Ok((ChainComplex { space: fs, d }, pi))
}

/// `d^2` as a map; zero exactly when the differential squares to zero.
pub fn square(c: &ChainComplex) -> Result<MultiMap, SignError> {
    compose(&c.d, &c.d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_sign_small_cases() {
        assert_eq!(floor_sign(0, 0), (1, 1));
        assert_eq!(floor_sign(3, 5), (1, 1));
        for i in -6..=6 {
            for j in -6..=6 {
                let (a, b) = floor_sign(i, j);
                assert_eq!(a, b, "({i},{j})");
            }
        }
    }
}
