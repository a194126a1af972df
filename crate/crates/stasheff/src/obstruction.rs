//! The bar cochain complex and Ext, obstruction cocycles for extending module
//! structures, the extension solver, and the Hochschild complex of an algebra.
//!
//! Cochains on the bar resolution are stored by their restriction to module
//! generators: a cochain in `Baar^{s,t}(X, Y)` is a map `X ⊗ R^{⊗s} -> Y` of degree `t`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::graded::{all_tuples, GradedError, GradedSpace, MultiMap, TensorError};
use crate::linalg::{axpy, from_pairs, ColumnReducer, SVec, SparseMatrix};
use crate::signs::sign_of;
use crate::structures::{check_module, eval_terms, module_terms, AnAlgebra, AnModule, RelationReport, Side, StructureError, Term, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("module fails its defining identities at order {0}")]
    NotAModule(usize),
}

/// A finite basis of multilinear maps `V_1 ⊗ ... ⊗ V_k -> W` of a fixed degree:
/// one basis map per input tuple and compatible output basis vector.
#[derive(Clone, Debug)]
pub struct CochainSpace {
    pub inputs: Vec<Arc<GradedSpace>>,
    pub target: Arc<GradedSpace>,
    pub degree: i64,
    basis: Vec<(Vec<usize>, usize)>,
    index: HashMap<(Vec<usize>, usize), usize>,
}

impl CochainSpace {
    pub fn new(inputs: Vec<Arc<GradedSpace>>, target: Arc<GradedSpace>, degree: i64) -> Self {
        let dims: Vec<usize> = inputs.iter().map(|s| s.dim()).collect();
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for t in all_tuples(&dims) {
            let d: i64 = t.iter().zip(&inputs).map(|(i, s)| s.degree(*i)).sum::<i64>() + degree;
            for &o in target.basis_in(d) {
                index.insert((t.clone(), o), basis.len());
                basis.push((t.clone(), o));
            }
        }
        CochainSpace { inputs, target, degree, basis, index }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_complete(&self) -> bool {
        self.inputs.iter().all(|s| s.is_complete()) && self.target.is_complete()
    }

    pub fn basis_element(&self, i: usize) -> &(Vec<usize>, usize) {
        &self.basis[i]
    }

    pub fn index_of(&self, tuple: &[usize], out: usize) -> Option<usize> {
        self.index.get(&(tuple.to_vec(), out)).copied()
    }

    pub fn to_vec(&self, m: &MultiMap) -> SVec {
        let mut v = Vec::new();
        for (t, val) in m.entries() {
            for (o, c) in val {
                if let Some(i) = self.index_of(t, *o) {
                    v.push((i, c.clone()));
                }
            }
        }
        from_pairs(v)
    }

    pub fn to_map(&self, name: &str, v: &SVec) -> MultiMap {
        let mut m = MultiMap::zero(name, self.inputs.clone(), self.target.clone(), self.degree);
        let mut acc: HashMap<Vec<usize>, SVec> = HashMap::new();
        for (i, c) in v {
            let (t, o) = &self.basis[*i];
            let e = acc.entry(t.clone()).or_default();
            *e = axpy(e, c, &vec![(*o, self.target.field().one())]);
        }
        let mut keys: Vec<_> = acc.into_iter().collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0));
        for (t, val) in keys {
            m.set(t, val).expect("basis maps have consistent degrees");
        }
        m
    }
}

/// How a codomain entry of a coboundary depends on the cochain.
enum Contribution {
    /// `c * c(T')`.
    Same(Vec<usize>, Scalar),
    /// `c * left(T_0, c(rest))`, with the Koszul sign of moving the cochain past `T_0`.
    Left(Scalar, usize, Vec<usize>),
    /// `c * right(c(prefix), T_last)`.
    Right(Scalar, Vec<usize>, usize),
}

fn product_terms(m: &MultiMap, a: usize, b: usize) -> SVec {
    m.eval(&[a, b]).map(|v| v.to_vec()).unwrap_or_default()
}

/// Assembles the matrix of a coboundary operator from per-tuple contributions.
fn assemble(
    dom: &CochainSpace,
    cod: &CochainSpace,
    contributions: impl Fn(&[usize]) -> Vec<Contribution> + Sync,
    left: Option<&MultiMap>,
    right: &MultiMap,
) -> SparseMatrix {
    let field = cod.target.field();
    let dims: Vec<usize> = cod.inputs.iter().map(|s| s.dim()).collect();
    let tuples = all_tuples(&dims);
    let ydim = cod.target.dim();
    let entries: Vec<Vec<(usize, usize, Scalar)>> = tuples
        .par_iter()
        .map(|t| {
            let mut out = Vec::new();
            for c in contributions(t) {
                match c {
                    Contribution::Same(tp, coef) => {
                        for o in 0..ydim {
                            if let (Some(col), Some(row)) = (dom.index_of(&tp, o), cod.index_of(t, o)) {
                                out.push((col, row, coef.clone()));
                            }
                        }
                    }
                    Contribution::Left(coef, t0, rest) => {
                        let l = left.expect("left action required");
                        for o in 0..ydim {
                            let Some(col) = dom.index_of(&rest, o) else { continue };
                            let s = field.sign(dom.degree * cod.inputs[0].degree(t0));
                            for (o2, v) in product_terms(l, t0, o) {
                                if let Some(row) = cod.index_of(t, o2) {
                                    out.push((col, row, &(&coef * &s) * &v));
                                }
                            }
                        }
                    }
                    Contribution::Right(coef, prefix, last) => {
                        for o in 0..ydim {
                            let Some(col) = dom.index_of(&prefix, o) else { continue };
                            for (o2, v) in product_terms(right, o, last) {
                                if let Some(row) = cod.index_of(t, o2) {
                                    out.push((col, row, &coef * &v));
                                }
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); dom.dim()];
    for list in entries {
        for (c, r, v) in list {
            cols[c].push((r, v));
        }
    }
    SparseMatrix { nrows: cod.dim(), cols: cols.into_iter().map(from_pairs).collect() }
}

/// A cochain of the bar complex, stored on module generators.
#[derive(Clone, Debug)]
pub struct BarCochain {
    pub s: usize,
    pub t: i64,
    pub value: MultiMap,
}

/// The complex `Baar^{*,*}(X, Y)` for right modules over a minimal algebra; only the
/// associative parts `m_2` enter.
#[derive(Clone)]
pub struct BaarComplex {
    pub algebra: Arc<AnAlgebra>,
    pub x: Arc<GradedSpace>,
    pub y: Arc<GradedSpace>,
    x_action: MultiMap,
    y_action: MultiMap,
    r_product: MultiMap,
}

fn product_or_zero(m: Option<&MultiMap>, a: &Arc<GradedSpace>, b: &Arc<GradedSpace>, t: &Arc<GradedSpace>) -> MultiMap {
    m.cloned().unwrap_or_else(|| MultiMap::zero("m2", vec![a.clone(), b.clone()], t.clone(), 0))
}

impl BaarComplex {
    pub fn new(x: &AnModule, y: &AnModule) -> Result<Self, ObstructionError> {
        if x.side != Side::Right || y.side != Side::Right || !crate::graded::same_space(&x.algebra.space, &y.algebra.space) {
            return Err(ObstructionError::Invalid("bar cochains need right modules over one algebra".into()));
        }
        let r = x.algebra.space.clone();
        Ok(BaarComplex {
            algebra: x.algebra.clone(),
            x: x.space.clone(),
            y: y.space.clone(),
            x_action: product_or_zero(x.op(2), &x.space, &r, &x.space),
            y_action: product_or_zero(y.op(2), &y.space, &r, &y.space),
            r_product: product_or_zero(x.algebra.op(2), &r, &r, &r),
        })
    }

    pub fn field(&self) -> Field {
        self.x.field()
    }

    /// Cochains `X ⊗ R^{⊗s} -> Y` of degree `t`.
    pub fn cochains(&self, s: usize, t: i64) -> CochainSpace {
        let mut inputs = vec![self.x.clone()];
        inputs.extend(std::iter::repeat_n(self.algebra.space.clone(), s));
        CochainSpace::new(inputs, self.y.clone(), t)
    }

    /// Matrix of `∂: Baar^{s,t} -> Baar^{s+1,t}`:
    /// `∂c = sum_{i=0}^{s} (-1)^i c(1^i ⊗ m_2 ⊗ 1^{s-i}) + (-1)^{s+1} m_2(c ⊗ 1)`.
    pub fn differential_matrix(&self, s: usize, t: i64) -> (CochainSpace, CochainSpace, SparseMatrix) {
        let dom = self.cochains(s, t);
        let cod = self.cochains(s + 1, t);
        let field = self.field();
        let a = s + 1;
        let contributions = |tt: &[usize]| {
            let mut out = Vec::new();
            for i in 0..a {
                let m = if i == 0 { &self.x_action } else { &self.r_product };
                for (u, lam) in product_terms(m, tt[i], tt[i + 1]) {
                    let mut tp = Vec::with_capacity(a);
                    tp.extend_from_slice(&tt[..i]);
                    tp.push(u);
                    tp.extend_from_slice(&tt[i + 2..]);
                    out.push(Contribution::Same(tp, &field.sign(i as i64) * &lam));
                }
            }
            out.push(Contribution::Right(field.sign(a as i64), tt[..a].to_vec(), tt[a]));
            out
        };
        let m = assemble(&dom, &cod, contributions, None, &self.y_action);
        (dom, cod, m)
    }

    pub fn differential(&self, c: &BarCochain) -> BarCochain {
        let (dom, cod, m) = self.differential_matrix(c.s, c.t);
        let v = m.mul_vec(&dom.to_vec(&c.value));
        BarCochain { s: c.s + 1, t: c.t, value: cod.to_map("∂c", &v) }
    }
}

/// `∂` on a bar cochain of the complex `Baar(X, Y)`.
pub fn bar_differential(x: &AnModule, y: &AnModule, c: &BarCochain) -> Result<BarCochain, ObstructionError> {
    Ok(BaarComplex::new(x, y)?.differential(c))
}

/// One cell of an Ext table.
#[derive(Clone, Debug)]
pub struct ExtCell {
    pub s: usize,
    pub t: i64,
    /// `None` when the cell is not determined by the stored data.
    pub dim: Option<usize>,
    pub representatives: Vec<BarCochain>,
}

/// Cohomology of a cochain complex at the middle of `prev -> here -> next`.
pub struct CohomologyCell {
    pub kernel: ColumnReducer,
    pub image: ColumnReducer,
    pub representatives: Vec<SVec>,
}

fn cohomology_cell(field: Field, prev: Option<&SparseMatrix>, next: &SparseMatrix, dim: usize) -> CohomologyCell {
    let kernel = ColumnReducer::from_matrix(field, next);
    let mut image = ColumnReducer::new(field);
    if let Some(p) = prev {
        for c in &p.cols {
            image.push_column(c.clone());
        }
    }
    let mut span = image.clone();
    let mut reps = Vec::new();
    for k in kernel.kernel() {
        if span.push_column(k.clone()).is_some() {
            reps.push(k.clone());
        }
    }
    let _ = dim;
    CohomologyCell { kernel, image, representatives: reps }
}

/// Ext of right modules over the associative part of a minimal algebra, computed
/// on the bar complex. Cells over incomplete spaces are reported as unknown.
pub fn ext(x: &AnModule, y: &AnModule, s_values: &[usize], t_values: &[i64]) -> Result<Vec<ExtCell>, ObstructionError> {
    let bc = BaarComplex::new(x, y)?;
    let complete = x.space.is_complete() && y.space.is_complete() && x.algebra.space.is_complete();
    let field = bc.field();
    let cells: Vec<(usize, i64)> = s_values.iter().flat_map(|&s| t_values.iter().map(move |&t| (s, t))).collect();
    let out = cells
        .par_iter()
        .map(|&(s, t)| {
            if !complete {
                return ExtCell { s, t, dim: None, representatives: Vec::new() };
            }
            let prev = if s > 0 { Some(bc.differential_matrix(s - 1, t).2) } else { None };
            let (dom, _, next) = bc.differential_matrix(s, t);
            let cell = cohomology_cell(field, prev.as_ref(), &next, dom.dim());
            let reps = cell
                .representatives
                .iter()
                .enumerate()
                .map(|(j, v)| BarCochain { s, t, value: dom.to_map(&format!("ext{s}_{t}_{j}"), v) })
                .collect::<Vec<_>>();
            ExtCell { s, t, dim: Some(reps.len()), representatives: reps }
        })
        .collect();
    Ok(out)
}

/// Terms of the obstruction expression, with `(include_top, include_boundary)`
/// selecting the pieces beyond the middle sum.
fn obstruction_terms(x: &AnModule, n: usize, full: bool) -> Vec<Term<'_>> {
    let m = n + 1;
    let mut terms = Vec::new();
    for s in 1..=m {
        for r in 0..=(m - s) {
            let t = m - s - r;
            let outer_ar = r + t + 1;
            let keep = if full { true } else { (2 < outer_ar && outer_ar < n) || (r == 1 && s == n && t == 0) };
            if !keep {
                continue;
            }
            let inner = if r == 0 { x.op(s) } else { x.algebra.op(s) };
            if let (Some(outer), Some(inner)) = (x.op(outer_ar), inner) {
                terms.push(Term::insert(sign_of((r + s * t) as i64), outer, r, inner));
            }
        }
    }
    terms
}

fn terms_to_map(x: &AnModule, name: &str, arity: usize, degree: i64, terms: &[Term<'_>]) -> Result<MultiMap, ObstructionError> {
    let inputs = x.op_inputs(arity);
    let field = x.field();
    let dims: Vec<usize> = inputs.iter().map(|s| s.dim()).collect();
    let tuples = all_tuples(&dims);
    let values: Vec<Result<SVec, TensorError>> = tuples
        .par_iter()
        .map(|t| {
            let v = eval_terms(field, terms, &crate::graded::Tensor::basis(inputs.clone(), t.clone()))?;
            Ok(if v.slots().is_empty() { Vec::new() } else { v.to_vec() })
        })
        .collect();
    let mut m = MultiMap::zero(name, inputs, x.space.clone(), degree);
    for (t, v) in tuples.into_iter().zip(values) {
        let v = v?;
        if !v.is_empty() {
            m.set(t, v)?;
        }
    }
    Ok(m)
}

/// `φ_n = -m_2(1 ⊗ m_n) + sum_{2 < r+t+1 < n, r+s+t = n+1} (-1)^{r+st} m_{r+t+1}(1^r ⊗ m_s ⊗ 1^t)`
/// as a cochain in `Baar^{n, n-2}(X, X)`.
pub fn phi_n(x: &AnModule, n: usize) -> Result<BarCochain, ObstructionError> {
    let terms = obstruction_terms(x, n, false);
    let value = terms_to_map(x, &format!("phi{n}"), n + 1, n as i64 - 2, &terms)?;
    Ok(BarCochain { s: n, t: n as i64 - 2, value })
}

/// The full identity of order `n+1` with the current operations and `m_{n+1} = 0`.
pub fn phi_tilde(x: &AnModule, n: usize) -> Result<BarCochain, ObstructionError> {
    let terms = obstruction_terms(x, n, true);
    let value = terms_to_map(x, &format!("phitilde{n}"), n + 1, n as i64 - 2, &terms)?;
    Ok(BarCochain { s: n, t: n as i64 - 2, value })
}

/// Result of an extension attempt.
#[derive(Clone, Debug)]
pub enum Extension {
    /// The obstruction vanishes; `module` is an A_{n+1}-structure.
    Extended(ExtensionData),
    /// The obstruction class is nonzero.
    Refused(ObstructionClass),
    /// The stored data cannot decide.
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct ExtensionData {
    /// A solution of `∂ψ = φ_n`.
    pub psi: BarCochain,
    pub xi: MultiMap,
    pub module: AnModule,
    /// Cocycles in `Baar^{n-1, n-2}`: adding any combination to `-ψ` gives another extension.
    pub free_parameters: Vec<BarCochain>,
}

#[derive(Clone, Debug)]
pub struct ObstructionClass {
    pub phi: BarCochain,
    /// Dimension of `Ext^{n, n-2}(X, X)`.
    pub ext_dim: usize,
    /// Coordinates of `[φ_n]` in the chosen basis of that Ext group.
    pub coordinates: SVec,
}

impl ObstructionClass {
    pub fn is_generator_of_line(&self) -> bool {
        self.ext_dim == 1 && self.coordinates.len() == 1
    }
}

/// Decides whether the A_n-structure of `x` (order `n = x.order`) extends one step,
/// possibly after changing `m_n`. On success `m_n` is replaced by
/// `-ψ + sum_j kernel[j] * K_j` and `m_{n+1} = ξ`.
pub fn try_extend(x: &AnModule) -> Result<Extension, ObstructionError> {
    try_extend_with(x, &[], None)
}

pub fn try_extend_with(x: &AnModule, kernel_coeffs: &[Scalar], xi: Option<MultiMap>) -> Result<Extension, ObstructionError> {
    let n = x.order;
    if n < 3 {
        return Err(ObstructionError::Invalid("extension starts at order 3; m_2 is the fixed module structure".into()));
    }
    if !x.is_minimal() || !x.algebra.is_minimal() {
        return Err(ObstructionError::Invalid("extension theory needs minimal structures".into()));
    }
    let rep = check_module(x, n);
    match rep.verdict {
        Verdict::Fail => return Err(ObstructionError::NotAModule(rep.first_failure.map_or(0, |f| f.order))),
        Verdict::Unknown => return Ok(Extension::Unknown(format!("module identities undetermined up to order {n}"))),
        Verdict::Pass => {}
    }
    let bc = BaarComplex::new(x, x)?;
    let t = n as i64 - 2;
    let phi = phi_n(x, n)?;
    let (dom, cod, dmat) = bc.differential_matrix(n - 1, t);
    if !dom.is_complete() || !cod.is_complete() {
        return Ok(Extension::Unknown("bar cochains over incomplete spaces".into()));
    }
    let field = x.field();
    let red = ColumnReducer::from_matrix(field, &dmat);
    let phi_vec = cod.to_vec(&phi.value);
    match red.preimage(&phi_vec) {
        Some(psi_vec) => {
            let prev = if n >= 2 { Some(bc.differential_matrix(n - 2, t).2) } else { None };
            let cell = cohomology_cell(field, prev.as_ref(), &dmat, dom.dim());
            let params: Vec<SVec> = cell.kernel.kernel().to_vec();
            let mut mn = crate::linalg::scale(&psi_vec, &-field.one());
            for (c, k) in kernel_coeffs.iter().zip(&params) {
                mn = axpy(&mn, c, k);
            }
            let mut module = x.clone();
            module.set_op(n, dom.to_map(&format!("m{n}_{}", x.name), &mn))?;
            let xi = xi.unwrap_or_else(|| module.zero_op(n + 1));
            module.set_op(n + 1, xi.clone())?;
            let psi = BarCochain { s: n - 1, t, value: dom.to_map("psi", &psi_vec) };
            let free_parameters =
                params.iter().enumerate().map(|(j, v)| BarCochain { s: n - 1, t, value: dom.to_map(&format!("kappa{j}"), v) }).collect();
            Ok(Extension::Extended(ExtensionData { psi, xi, module, free_parameters }))
        }
        None => {
            let (_, _, next) = bc.differential_matrix(n, t);
            let cell = cohomology_cell(field, Some(&dmat), &next, cod.dim());
            let mut span = cell.image.clone();
            let base = span.ncols();
            for r in &cell.representatives {
                span.push_column(r.clone());
            }
            let coords = span
                .preimage(&phi_vec)
                .map(|c| c.into_iter().filter(|(i, _)| *i >= base).map(|(i, v)| (i - base, v)).collect())
                .unwrap_or_default();
            Ok(Extension::Refused(ObstructionClass { phi, ext_dim: cell.representatives.len(), coordinates: coords }))
        }
    }
}

/// Both readings of the extension criterion: the identity of order `n+1` evaluated
/// directly, and `∂(m_n * 1) + φ_n * 1`. They must coincide as cochains.
pub fn extension_criterion_consistent(x: &AnModule) -> Result<bool, ObstructionError> {
    let n = x.order;
    let direct = terms_to_map(x, "rel", n + 1, n as i64 - 2, &module_terms(x, n + 1, false))?;
    let bc = BaarComplex::new(x, x)?;
    let mn = BarCochain { s: n - 1, t: n as i64 - 2, value: x.op_or_zero(n) };
    let dmn = bc.differential(&mn);
    let phi = phi_n(x, n)?;
    let sum = dmn.value.add_scaled(&x.field().one(), &phi.value)?;
    Ok(sum == direct)
}

/// Sign convention for the last term of the Hochschild differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HochschildSign {
    /// `(-1)^{n+1} m_2(f ⊗ 1)`: the sign making the differential square to zero and
    /// matching the A_infinity identities.
    Consistent,
    /// `(-1)^n m_2(f ⊗ 1)`, kept for comparison.
    Alternative,
}

/// Hochschild cochains `S^{⊗n} -> S` of degree `m`.
pub fn hochschild_cochains(s: &AnAlgebra, n: usize, m: i64) -> CochainSpace {
    CochainSpace::new(vec![s.space.clone(); n], s.space.clone(), m)
}

/// Matrix of `∂_H: C^{n,m} -> C^{n+1,m}`.
pub fn hochschild_matrix(s: &AnAlgebra, n: usize, m: i64, sign: HochschildSign) -> (CochainSpace, CochainSpace, SparseMatrix) {
    let dom = hochschild_cochains(s, n, m);
    let cod = hochschild_cochains(s, n + 1, m);
    let field = s.field();
    let m2 = product_or_zero(s.op(2), &s.space, &s.space, &s.space);
    let last = match sign {
        HochschildSign::Consistent => field.sign(n as i64 + 1),
        HochschildSign::Alternative => field.sign(n as i64),
    };
    let contributions = |tt: &[usize]| {
        let mut out = vec![Contribution::Left(field.one(), tt[0], tt[1..].to_vec())];
        for j in 0..n {
            for (u, lam) in product_terms(&m2, tt[j], tt[j + 1]) {
                let mut tp = Vec::with_capacity(n);
                tp.extend_from_slice(&tt[..j]);
                tp.push(u);
                tp.extend_from_slice(&tt[j + 2..]);
                out.push(Contribution::Same(tp, &-field.sign(j as i64) * &lam));
            }
        }
        out.push(Contribution::Right(last.clone(), tt[..n].to_vec(), tt[n]));
        out
    };
    let mat = assemble(&dom, &cod, contributions, Some(&m2), &m2);
    (dom, cod, mat)
}

/// `∂_H f = m_2(1 ⊗ f) - sum_j (-1)^j f(1^j ⊗ m_2 ⊗ 1^{n-j-1}) + (-1)^{n+1} m_2(f ⊗ 1)`.
pub fn hochschild_differential(s: &AnAlgebra, f: &MultiMap) -> Result<MultiMap, ObstructionError> {
    hochschild_differential_with(s, f, HochschildSign::Consistent)
}

pub fn hochschild_differential_with(s: &AnAlgebra, f: &MultiMap, sign: HochschildSign) -> Result<MultiMap, ObstructionError> {
    if f.inputs().iter().any(|i| !crate::graded::same_space(i, &s.space)) || !crate::graded::same_space(f.target(), &s.space) {
        return Err(ObstructionError::Invalid("Hochschild cochain on the wrong space".into()));
    }
    let (dom, cod, mat) = hochschild_matrix(s, f.arity(), f.degree(), sign);
    Ok(cod.to_map(&format!("∂{}", f.name()), &mat.mul_vec(&dom.to_vec(f))))
}

/// Obstruction for algebras and its verdict.
#[derive(Clone, Debug)]
pub struct AlgebraObstruction {
    /// `sum_{2 < r+t+1 < n, r+s+t = n+1} (-1)^{r+st} m_{r+t+1}(1^r ⊗ m_s ⊗ 1^t)`.
    pub cochain: MultiMap,
    pub is_cocycle: bool,
    /// Whether the cochain is a Hochschild coboundary (the extension criterion).
    pub trivial: Verdict,
    /// A cochain `c` with `∂_H c` equal to the obstruction, when trivial.
    pub solution: Option<MultiMap>,
    /// Whether the current `m_n` already satisfies `∂_H m_n = obstruction`.
    pub current_extends: bool,
}

pub fn algebra_obstruction(s: &AnAlgebra) -> Result<AlgebraObstruction, ObstructionError> {
    let n = s.order;
    if !s.is_minimal() {
        return Err(ObstructionError::Invalid("obstruction theory needs a minimal algebra".into()));
    }
    let m = n + 1;
    let mut terms = Vec::new();
    for sz in 1..=m {
        for r in 0..=(m - sz) {
            let t = m - sz - r;
            let outer_ar = r + t + 1;
            if !(2 < outer_ar && outer_ar < n) {
                continue;
            }
            if let (Some(outer), Some(inner)) = (s.op(outer_ar), s.op(sz)) {
                terms.push(Term::insert(sign_of((r + sz * t) as i64), outer, r, inner));
            }
        }
    }
    let inputs = vec![s.space.clone(); m];
    let field = s.field();
    let degree = n as i64 - 2;
    let mut cochain = MultiMap::zero(format!("obs{n}"), inputs.clone(), s.space.clone(), degree);
    for t in all_tuples(&vec![s.space.dim(); m]) {
        let v = eval_terms(field, &terms, &crate::graded::Tensor::basis(inputs.clone(), t.clone()))?;
        if !v.slots().is_empty() && !v.is_zero() {
            cochain.set(t, v.to_vec())?;
        }
    }
    let is_cocycle = hochschild_differential(s, &cochain)?.is_zero();
    let (dom, cod, mat) = hochschild_matrix(s, n, degree, HochschildSign::Consistent);
    let complete = dom.is_complete() && cod.is_complete();
    let red = ColumnReducer::from_matrix(field, &mat);
    let target = cod.to_vec(&cochain);
    let pre = red.preimage(&target);
    let current = mat.mul_vec(&dom.to_vec(&s.op_or_zero(n))) == target;
    let trivial = if !complete {
        Verdict::Unknown
    } else if pre.is_some() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(AlgebraObstruction {
        cochain,
        is_cocycle,
        trivial,
        solution: pre.map(|v| dom.to_map(&format!("m{n}"), &v)),
        current_extends: current,
    })
}

/// Hochschild cohomology `HH^{n,m}`: its dimension and representatives.
pub fn hochschild_cohomology(s: &AnAlgebra, n: usize, m: i64) -> (usize, Vec<MultiMap>) {
    let field = s.field();
    let prev = if n > 0 { Some(hochschild_matrix(s, n - 1, m, HochschildSign::Consistent).2) } else { None };
    let (dom, _, next) = hochschild_matrix(s, n, m, HochschildSign::Consistent);
    let cell = cohomology_cell(field, prev.as_ref(), &next, dom.dim());
    let reps: Vec<MultiMap> = cell.representatives.iter().enumerate().map(|(j, v)| dom.to_map(&format!("hh{n}_{j}"), v)).collect();
    (reps.len(), reps)
}

/// Convenience: the module identities report at the order following `x.order`.
pub fn next_order_report(x: &AnModule) -> RelationReport {
    check_module(x, x.order + 1)
}
