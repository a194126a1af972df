//! A_n-algebras, A_n-modules and their morphisms, together with relation checkers
//! that evaluate the defining identities on every basis tuple.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::graded::{all_tuples, same_space, GradedError, GradedSpace, MultiMap, Tensor, TensorError};
use crate::linalg::SVec;
use crate::signs::{compose_at, half_floor, sign_of, SignError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("operation {0} has the wrong shape: {1}")]
    Shape(String, String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Sign(#[from] SignError),
    #[error("inverse requested but the first component is not invertible")]
    NotInvertible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unknown => 2,
        }
    }

    /// Combines two verdicts: any failure wins, then any unknown.
    pub fn and(self, o: Verdict) -> Verdict {
        match (self, o) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Pass,
        }
    }
}

fn check_op_shape(op: &MultiMap, inputs: &[Arc<GradedSpace>], target: &Arc<GradedSpace>, degree: i64) -> Result<(), StructureError> {
    let ok = op.arity() == inputs.len()
        && op.inputs().iter().zip(inputs).all(|(a, b)| same_space(a, b))
        && same_space(op.target(), target)
        && op.degree() == degree;
    if ok {
        Ok(())
    } else {
        Err(StructureError::Shape(op.name().to_string(), format!("expected arity {} and degree {degree}", inputs.len())))
    }
}

fn nonzero(op: Option<&MultiMap>) -> Option<&MultiMap> {
    op.filter(|m| !m.is_zero())
}

/// An A_n-algebra: operations `m_k: R^{⊗k} -> R` of degree `k-2` for `k <= order`.
#[derive(Clone, Debug)]
pub struct AnAlgebra {
    pub name: String,
    pub space: Arc<GradedSpace>,
    ops: Vec<MultiMap>,
    pub order: usize,
}

impl AnAlgebra {
    /// `ops[k-1]` is `m_k`; missing operations up to `order` are zero.
    pub fn new(name: impl Into<String>, space: Arc<GradedSpace>, ops: Vec<MultiMap>, order: usize) -> Result<Self, StructureError> {
        let mut a = AnAlgebra { name: name.into(), space, ops: Vec::new(), order };
        for (k, m) in ops.into_iter().enumerate() {
            a.set_op(k + 1, m)?;
        }
        while a.ops.len() < order {
            let k = a.ops.len() + 1;
            a.ops.push(a.zero_op(k));
        }
        Ok(a)
    }

    pub fn field(&self) -> Field {
        self.space.field()
    }

    pub fn zero_op(&self, k: usize) -> MultiMap {
        MultiMap::zero(format!("m{k}"), vec![self.space.clone(); k], self.space.clone(), k as i64 - 2)
    }

    pub fn set_op(&mut self, k: usize, m: MultiMap) -> Result<(), StructureError> {
        check_op_shape(&m, &vec![self.space.clone(); k], &self.space, k as i64 - 2)?;
        while self.ops.len() < k {
            let j = self.ops.len() + 1;
            self.ops.push(self.zero_op(j));
        }
        self.ops[k - 1] = m;
        self.order = self.order.max(k);
        Ok(())
    }

    /// `m_k`, or `None` when it is zero or beyond the stored operations.
    pub fn op(&self, k: usize) -> Option<&MultiMap> {
        nonzero(self.ops.get(k.wrapping_sub(1)))
    }

    /// `m_k` as a map, zero when absent.
    pub fn op_or_zero(&self, k: usize) -> MultiMap {
        self.ops.get(k.wrapping_sub(1)).cloned().unwrap_or_else(|| self.zero_op(k))
    }

    pub fn ops(&self) -> &[MultiMap] {
        &self.ops
    }

    pub fn is_minimal(&self) -> bool {
        self.op(1).is_none()
    }

    pub fn truncated(&self, order: usize) -> AnAlgebra {
        let mut a = self.clone();
        a.ops.truncate(order);
        a.order = order;
        a
    }
}

/// An A_l-module over an A_n-algebra. Right modules use `m_k: X ⊗ R^{⊗k-1} -> X`,
/// left modules `m_k: R^{⊗k-1} ⊗ X -> X`.
#[derive(Clone, Debug)]
pub struct AnModule {
    pub name: String,
    pub algebra: Arc<AnAlgebra>,
    pub space: Arc<GradedSpace>,
    pub side: Side,
    ops: Vec<MultiMap>,
    pub order: usize,
}

impl AnModule {
    pub fn new(
        name: impl Into<String>,
        algebra: Arc<AnAlgebra>,
        space: Arc<GradedSpace>,
        side: Side,
        ops: Vec<MultiMap>,
        order: usize,
    ) -> Result<Self, StructureError> {
        let mut x = AnModule { name: name.into(), algebra, space, side, ops: Vec::new(), order };
        for (k, m) in ops.into_iter().enumerate() {
            x.set_op(k + 1, m)?;
        }
        while x.ops.len() < order {
            let k = x.ops.len() + 1;
            x.ops.push(x.zero_op(k));
        }
        Ok(x)
    }

    pub fn field(&self) -> Field {
        self.space.field()
    }

    pub fn op_inputs(&self, k: usize) -> Vec<Arc<GradedSpace>> {
        let r = self.algebra.space.clone();
        let mut v = vec![r; k - 1];
        match self.side {
            Side::Right => v.insert(0, self.space.clone()),
            Side::Left => v.push(self.space.clone()),
        }
        v
    }

    pub fn zero_op(&self, k: usize) -> MultiMap {
        MultiMap::zero(format!("m{k}_{}", self.name), self.op_inputs(k), self.space.clone(), k as i64 - 2)
    }

    pub fn set_op(&mut self, k: usize, m: MultiMap) -> Result<(), StructureError> {
        check_op_shape(&m, &self.op_inputs(k), &self.space, k as i64 - 2)?;
        while self.ops.len() < k {
            let j = self.ops.len() + 1;
            self.ops.push(self.zero_op(j));
        }
        self.ops[k - 1] = m;
        self.order = self.order.max(k);
        Ok(())
    }

    pub fn op(&self, k: usize) -> Option<&MultiMap> {
        nonzero(self.ops.get(k.wrapping_sub(1)))
    }

    pub fn op_or_zero(&self, k: usize) -> MultiMap {
        self.ops.get(k.wrapping_sub(1)).cloned().unwrap_or_else(|| self.zero_op(k))
    }

    pub fn ops(&self) -> &[MultiMap] {
        &self.ops
    }

    pub fn is_minimal(&self) -> bool {
        self.op(1).is_none()
    }

    pub fn truncated(&self, order: usize) -> AnModule {
        let mut x = self.clone();
        x.ops.truncate(order);
        x.order = order;
        x
    }
}

/// A morphism of right A_l-modules: `f_k: X ⊗ R^{⊗k-1} -> Y` of degree `k-1`.
#[derive(Clone, Debug)]
pub struct AnMorphism {
    pub name: String,
    pub source: Arc<AnModule>,
    pub target: Arc<AnModule>,
    comps: Vec<MultiMap>,
    pub order: usize,
}

impl AnMorphism {
    pub fn new(
        name: impl Into<String>,
        source: Arc<AnModule>,
        target: Arc<AnModule>,
        comps: Vec<MultiMap>,
        order: usize,
    ) -> Result<Self, StructureError> {
        if source.side != Side::Right || target.side != Side::Right || !same_space(&source.algebra.space, &target.algebra.space) {
            return Err(StructureError::Shape(name.into(), "morphisms are between right modules over one algebra".into()));
        }
        let mut g = AnMorphism { name: name.into(), source, target, comps: Vec::new(), order };
        for (k, m) in comps.into_iter().enumerate() {
            g.set_comp(k + 1, m)?;
        }
        while g.comps.len() < order {
            let k = g.comps.len() + 1;
            g.comps.push(g.zero_comp(k));
        }
        Ok(g)
    }

    pub fn field(&self) -> Field {
        self.source.field()
    }

    pub fn zero_comp(&self, k: usize) -> MultiMap {
        MultiMap::zero(format!("g{k}"), self.source.op_inputs(k), self.target.space.clone(), k as i64 - 1)
    }

    pub fn set_comp(&mut self, k: usize, m: MultiMap) -> Result<(), StructureError> {
        check_op_shape(&m, &self.source.op_inputs(k), &self.target.space, k as i64 - 1)?;
        while self.comps.len() < k {
            let j = self.comps.len() + 1;
            self.comps.push(self.zero_comp(j));
        }
        self.comps[k - 1] = m;
        self.order = self.order.max(k);
        Ok(())
    }

    pub fn comp(&self, k: usize) -> Option<&MultiMap> {
        nonzero(self.comps.get(k.wrapping_sub(1)))
    }

    pub fn comp_or_zero(&self, k: usize) -> MultiMap {
        self.comps.get(k.wrapping_sub(1)).cloned().unwrap_or_else(|| self.zero_comp(k))
    }

    pub fn comps(&self) -> &[MultiMap] {
        &self.comps
    }

    pub fn identity(x: &Arc<AnModule>, order: usize) -> AnMorphism {
        let id = MultiMap::identity(&x.space).renamed("g1");
        AnMorphism::new("id", x.clone(), x.clone(), vec![id], order).expect("identity has the right shape")
    }

    pub fn truncated(&self, order: usize) -> AnMorphism {
        let mut g = self.clone();
        g.comps.truncate(order);
        g.order = order;
        g
    }
}

/// A morphism of A_n-algebras `f_k: A^{⊗k} -> B` of degree `k-1`.
#[derive(Clone, Debug)]
pub struct AlgebraMorphism {
    pub name: String,
    pub source: Arc<AnAlgebra>,
    pub target: Arc<AnAlgebra>,
    comps: Vec<MultiMap>,
    pub order: usize,
}

impl AlgebraMorphism {
    pub fn new(
        name: impl Into<String>,
        source: Arc<AnAlgebra>,
        target: Arc<AnAlgebra>,
        comps: Vec<MultiMap>,
        order: usize,
    ) -> Result<Self, StructureError> {
        let mut f = AlgebraMorphism { name: name.into(), source, target, comps: Vec::new(), order };
        for (k, m) in comps.into_iter().enumerate() {
            f.set_comp(k + 1, m)?;
        }
        while f.comps.len() < order {
            let k = f.comps.len() + 1;
            f.comps.push(f.zero_comp(k));
        }
        Ok(f)
    }

    pub fn zero_comp(&self, k: usize) -> MultiMap {
        MultiMap::zero(format!("f{k}"), vec![self.source.space.clone(); k], self.target.space.clone(), k as i64 - 1)
    }

    pub fn truncated(&self, order: usize) -> AlgebraMorphism {
        let mut f = self.clone();
        f.comps.truncate(order);
        f.order = order;
        f
    }

    pub fn set_comp(&mut self, k: usize, m: MultiMap) -> Result<(), StructureError> {
        check_op_shape(&m, &vec![self.source.space.clone(); k], &self.target.space, k as i64 - 1)?;
        while self.comps.len() < k {
            let j = self.comps.len() + 1;
            self.comps.push(self.zero_comp(j));
        }
        self.comps[k - 1] = m;
        self.order = self.order.max(k);
        Ok(())
    }

    pub fn comp(&self, k: usize) -> Option<&MultiMap> {
        nonzero(self.comps.get(k.wrapping_sub(1)))
    }

    pub fn comp_or_zero(&self, k: usize) -> MultiMap {
        self.comps.get(k.wrapping_sub(1)).cloned().unwrap_or_else(|| self.zero_comp(k))
    }

    pub fn comps(&self) -> &[MultiMap] {
        &self.comps
    }
}

/// One step in evaluating a term: insert a map at a slot, or apply a whole tensor word.
#[derive(Clone)]
pub enum Layer<'a> {
    At(usize, &'a MultiMap),
    Word(Vec<&'a MultiMap>),
}

/// A signed composite of layers, applied first to last.
#[derive(Clone)]
pub struct Term<'a> {
    pub sign: i64,
    pub layers: Vec<Layer<'a>>,
}

impl<'a> Term<'a> {
    /// `outer ∘ (1^{pos} ⊗ inner ⊗ 1^{rest})`.
    pub fn insert(sign: i64, outer: &'a MultiMap, pos: usize, inner: &'a MultiMap) -> Self {
        Term { sign, layers: vec![Layer::At(pos, inner), Layer::At(0, outer)] }
    }
}

/// Sum of the terms applied to `x`; the result lives in a single slot.
pub fn eval_terms(field: Field, terms: &[Term<'_>], x: &Tensor) -> Result<Tensor, TensorError> {
    let mut acc: Option<Tensor> = None;
    for t in terms {
        let mut cur = x.clone();
        for l in &t.layers {
            cur = match l {
                Layer::At(p, m) => cur.apply_at(*p, m)?,
                Layer::Word(w) => cur.apply_word(w)?,
            };
        }
        let c = field.from_i64(t.sign);
        match &mut acc {
            None => acc = Some(cur.scaled(&c)),
            Some(a) => a.add_scaled(&c, &cur),
        }
    }
    Ok(acc.unwrap_or_else(|| Tensor::zero(field, Vec::new())))
}

/// Residual of a sum of terms on one basis tuple.
pub fn residual(field: Field, inputs: &[Arc<GradedSpace>], terms: &[Term<'_>], tuple: &[usize]) -> Result<SVec, TensorError> {
    let t = eval_terms(field, terms, &Tensor::basis(inputs.to_vec(), tuple.to_vec()))?;
    if t.slots().is_empty() {
        return Ok(Vec::new());
    }
    Ok(t.to_vec())
}

/// Witness of a failed relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub order: usize,
    pub tuple: Vec<String>,
    pub indices: Vec<usize>,
    pub residual: Vec<(String, String)>,
}

/// Degrees on which a report is certified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certified {
    All,
    Window(i64, i64),
    Nothing,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationReport {
    pub verdict: Verdict,
    pub orders: Vec<usize>,
    pub tuples_checked: usize,
    pub tuples_unknown: usize,
    pub first_failure: Option<Failure>,
    pub failures: Vec<Failure>,
    pub certified: Certified,
    /// Set when two independent evaluations of the same identity disagreed.
    pub cross_check_mismatch: Option<Failure>,
}

impl RelationReport {
    pub fn empty() -> Self {
        RelationReport {
            verdict: Verdict::Pass,
            orders: Vec::new(),
            tuples_checked: 0,
            tuples_unknown: 0,
            first_failure: None,
            failures: Vec::new(),
            certified: Certified::All,
            cross_check_mismatch: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn finish(&mut self, unknown_degrees: &BTreeSet<i64>, known_degrees: &BTreeSet<i64>) {
        if self.cross_check_mismatch.is_some() || self.first_failure.is_some() {
            self.verdict = Verdict::Fail;
        } else if self.tuples_unknown > 0 || self.tuples_checked == 0 {
            self.verdict = Verdict::Unknown;
        }
        self.certified = if unknown_degrees.is_empty() {
            Certified::All
        } else {
            match (known_degrees.iter().next(), known_degrees.iter().next_back()) {
                (Some(lo), Some(hi)) => Certified::Window(*lo, *hi),
                _ => Certified::Nothing,
            }
        };
    }
}

/// Options for relation checking.
#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    pub all_failures: bool,
}

enum Outcome {
    Zero,
    Unknown,
    Nonzero(SVec),
}

fn describe(inputs: &[Arc<GradedSpace>], tuple: &[usize]) -> Vec<String> {
    tuple.iter().zip(inputs).map(|(i, s)| s.name(*i).to_string()).collect()
}

fn describe_vec(target: &GradedSpace, v: &SVec) -> Vec<(String, String)> {
    v.iter().map(|(i, c)| (c.to_text(), target.name(*i).to_string())).collect()
}

/// Runs one order of a relation over all basis tuples, and optionally a second
/// evaluation (`alt`, scaled by `alt_scale`) that must agree tuple by tuple.
#[allow(clippy::too_many_arguments)]
fn run_order(
    report: &mut RelationReport,
    order: usize,
    inputs: &[Arc<GradedSpace>],
    target: &GradedSpace,
    terms: &[Term<'_>],
    alt: Option<(&[Term<'_>], Scalar)>,
    opts: CheckOptions,
    unknown_degrees: &mut BTreeSet<i64>,
    known_degrees: &mut BTreeSet<i64>,
) {
    let field = target.field();
    let dims: Vec<usize> = inputs.iter().map(|s| s.dim()).collect();
    let tuples = all_tuples(&dims);
    let outcomes: Vec<(Outcome, bool)> = tuples
        .par_iter()
        .map(|t| {
            let r = residual(field, inputs, terms, t);
            let mut agree = true;
            if let (Some((alt_terms, s)), Ok(v)) = (&alt, &r) {
                if let Ok(w) = residual(field, inputs, alt_terms, t) {
                    agree = crate::linalg::scale(&w, s) == *v;
                }
            }
            let o = match r {
                Ok(v) if v.is_empty() => Outcome::Zero,
                Ok(v) => Outcome::Nonzero(v),
                Err(_) => Outcome::Unknown,
            };
            (o, agree)
        })
        .collect();
    report.orders.push(order);
    for (t, (o, agree)) in tuples.iter().zip(outcomes) {
        let deg: i64 = t.iter().zip(inputs).map(|(i, s)| s.degree(*i)).sum();
        match o {
            Outcome::Unknown => {
                report.tuples_unknown += 1;
                unknown_degrees.insert(deg);
            }
            Outcome::Zero | Outcome::Nonzero(_) => {
                report.tuples_checked += 1;
                known_degrees.insert(deg);
            }
        }
        if !agree && report.cross_check_mismatch.is_none() {
            report.cross_check_mismatch = Some(Failure { order, tuple: describe(inputs, t), indices: t.clone(), residual: Vec::new() });
        }
        if let Outcome::Nonzero(v) = o {
            let f = Failure { order, tuple: describe(inputs, t), indices: t.clone(), residual: describe_vec(target, &v) };
            if report.first_failure.is_none() {
                report.first_failure = Some(f.clone());
            }
            if opts.all_failures {
                report.failures.push(f);
            }
        }
    }
    for d in unknown_degrees.iter() {
        known_degrees.remove(d);
    }
}

/// Terms of the Stasheff identity of order `m` for an algebra.
pub fn algebra_terms(r: &AnAlgebra, m: usize) -> Vec<Term<'_>> {
    let mut terms = Vec::new();
    for s in 1..=m {
        for rr in 0..=(m - s) {
            let t = m - s - rr;
            if let (Some(outer), Some(inner)) = (r.op(rr + t + 1), r.op(s)) {
                terms.push(Term::insert(sign_of((rr + s * t) as i64), outer, rr, inner));
            }
        }
    }
    terms
}

/// Terms of the module identity of order `m`. With `skip_differentials`, terms
/// involving `m_1` are omitted; `extra_sign` multiplies every term.
pub fn module_terms(x: &AnModule, m: usize, skip_differentials: bool) -> Vec<Term<'_>> {
    let mut terms = Vec::new();
    for s in 1..=m {
        for rr in 0..=(m - s) {
            let t = m - s - rr;
            if skip_differentials && (s == 1 || rr + t + 1 == 1) {
                continue;
            }
            let inner_is_module = match x.side {
                Side::Right => rr == 0,
                Side::Left => t == 0,
            };
            let inner = if inner_is_module { x.op(s) } else { x.algebra.op(s) };
            if let (Some(outer), Some(inner)) = (x.op(rr + t + 1), inner) {
                terms.push(Term::insert(sign_of((rr + s * t) as i64), outer, rr, inner));
            }
        }
    }
    terms
}

/// Checks the Stasheff identities of orders `1..=upto`.
pub fn check_algebra(r: &AnAlgebra, upto: usize) -> RelationReport {
    check_algebra_with(r, upto, CheckOptions::default())
}

pub fn check_algebra_with(r: &AnAlgebra, upto: usize, opts: CheckOptions) -> RelationReport {
    let mut rep = RelationReport::empty();
    let (mut unk, mut kn) = (BTreeSet::new(), BTreeSet::new());
    for m in 1..=upto {
        let terms = algebra_terms(r, m);
        let inputs = vec![r.space.clone(); m];
        run_order(&mut rep, m, &inputs, &r.space, &terms, None, opts, &mut unk, &mut kn);
    }
    rep.finish(&unk, &kn);
    rep
}

/// Checks the module identities of orders `1..=upto`. For minimal modules over a
/// minimal algebra the reduced identities (without `m_1` terms, opposite sign) are
/// evaluated independently and compared tuple by tuple.
pub fn check_module(x: &AnModule, upto: usize) -> RelationReport {
    check_module_with(x, upto, CheckOptions::default())
}

pub fn check_module_with(x: &AnModule, upto: usize, opts: CheckOptions) -> RelationReport {
    let mut rep = RelationReport::empty();
    let (mut unk, mut kn) = (BTreeSet::new(), BTreeSet::new());
    let minimal = x.is_minimal() && x.algebra.is_minimal();
    let minus = -x.field().one();
    for m in 1..=upto {
        let terms = module_terms(x, m, false);
        let reduced = if minimal && m >= 3 { Some(reduced_module_terms(x, m)) } else { None };
        let inputs = x.op_inputs(m);
        let alt = reduced.as_ref().map(|r| (r.as_slice(), minus.clone()));
        run_order(&mut rep, m, &inputs, &x.space, &terms, alt, opts, &mut unk, &mut kn);
    }
    rep.finish(&unk, &kn);
    rep
}

/// Reduced form for minimal modules at order `k+1`:
/// `sum_{2 <= r+t+1 <= k, r+s+t = k+1} (-1)^{r+st+1} m_{r+t+1}(1^r ⊗ m_s ⊗ 1^t)`.
pub fn reduced_module_terms(x: &AnModule, order: usize) -> Vec<Term<'_>> {
    let k = order - 1;
    let mut terms = Vec::new();
    for rr in 0..=k {
        for t in 0..=k {
            let outer_ar = rr + t + 1;
            if outer_ar < 2 || outer_ar > k || rr + t > k {
                continue;
            }
            let s = k + 1 - rr - t;
            let inner_is_module = match x.side {
                Side::Right => rr == 0,
                Side::Left => t == 0,
            };
            let inner = if inner_is_module { x.op(s) } else { x.algebra.op(s) };
            if let (Some(outer), Some(inner)) = (x.op(outer_ar), inner) {
                terms.push(Term::insert(sign_of((rr + s * t + 1) as i64), outer, rr, inner));
            }
        }
    }
    terms
}

/// Terms of the module-morphism identity of order `m` (left side minus right side).
pub fn morphism_terms(g: &AnMorphism, m: usize) -> Vec<Term<'_>> {
    let x = &g.source;
    let y = &g.target;
    let mut terms = Vec::new();
    for s in 1..=m {
        for rr in 0..=(m - s) {
            let t = m - s - rr;
            let inner = if rr == 0 { x.op(s) } else { x.algebra.op(s) };
            if let (Some(outer), Some(inner)) = (g.comp(rr + t + 1), inner) {
                terms.push(Term::insert(sign_of((rr + s * t) as i64), outer, rr, inner));
            }
        }
    }
    for i in 1..=m {
        let j = m - i;
        if let (Some(outer), Some(inner)) = (y.op(j + 1), g.comp(i)) {
            terms.push(Term::insert(-sign_of(((i + 1) * j) as i64), outer, 0, inner));
        }
    }
    terms
}

pub fn check_morphism(g: &AnMorphism, upto: usize) -> RelationReport {
    check_morphism_with(g, upto, CheckOptions::default())
}

pub fn check_morphism_with(g: &AnMorphism, upto: usize, opts: CheckOptions) -> RelationReport {
    let mut rep = RelationReport::empty();
    let (mut unk, mut kn) = (BTreeSet::new(), BTreeSet::new());
    for m in 1..=upto {
        let terms = morphism_terms(g, m);
        let inputs = g.source.op_inputs(m);
        run_order(&mut rep, m, &inputs, &g.target.space, &terms, None, opts, &mut unk, &mut kn);
    }
    rep.finish(&unk, &kn);
    rep
}

/// All compositions `i_1 + ... + i_u = m` with positive parts.
pub fn compositions(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=m {
        for mut rest in compositions(m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Terms of the algebra-morphism identity of order `m` (left side minus right side),
/// with the right-hand sign `v = sum_j (u-j)(i_j - 1)`.
pub fn algebra_morphism_terms(f: &AlgebraMorphism, m: usize) -> Vec<Term<'_>> {
    let mut terms = Vec::new();
    for s in 1..=m {
        for rr in 0..=(m - s) {
            let t = m - s - rr;
            if let (Some(outer), Some(inner)) = (f.comp(rr + t + 1), f.source.op(s)) {
                terms.push(Term::insert(sign_of((rr + s * t) as i64), outer, rr, inner));
            }
        }
    }
    for parts in compositions(m) {
        let u = parts.len();
        let Some(outer) = f.target.op(u) else { continue };
        let word: Option<Vec<&MultiMap>> = parts.iter().map(|&i| f.comp(i)).collect();
        let Some(word) = word else { continue };
        let v: usize = parts.iter().enumerate().take(u.saturating_sub(1)).map(|(j, &i)| (u - 1 - j) * (i - 1)).sum();
        terms.push(Term { sign: -sign_of(v as i64), layers: vec![Layer::Word(word), Layer::At(0, outer)] });
    }
    terms
}

pub fn check_algebra_morphism(f: &AlgebraMorphism, upto: usize) -> RelationReport {
    let mut rep = RelationReport::empty();
    let (mut unk, mut kn) = (BTreeSet::new(), BTreeSet::new());
    for m in 1..=upto {
        let terms = algebra_morphism_terms(f, m);
        let inputs = vec![f.source.space.clone(); m];
        run_order(&mut rep, m, &inputs, &f.target.space, &terms, None, CheckOptions::default(), &mut unk, &mut kn);
    }
    rep.finish(&unk, &kn);
    rep
}

/// Sign attached to `g_l ∘ (h_{j-l+1} ⊗ 1)` in the degree-`j` component of a composite.
fn composite_sign(j: usize, l: usize) -> i64 {
    let (j, l) = (j as i64, l as i64);
    sign_of(half_floor(l) + half_floor(j - l + 1) - half_floor(j))
}

/// `g ∘ h`, defined so that the bar-construction matrices multiply:
/// `(g h)_j = sum_l ± g_l ∘ (h_{j-l+1} ⊗ 1^{l-1})`.
pub fn compose_morphisms(g: &AnMorphism, h: &AnMorphism) -> Result<AnMorphism, StructureError> {
    if !same_space(&h.target.space, &g.source.space) {
        return Err(StructureError::Shape(g.name.clone(), "composition of non-matching morphisms".into()));
    }
    let order = g.order.min(h.order);
    let field = g.field();
    let mut comps = Vec::with_capacity(order);
    for j in 1..=order {
        let mut acc = MultiMap::zero(format!("g{j}"), h.source.op_inputs(j), g.target.space.clone(), j as i64 - 1);
        for l in 1..=j {
            if let (Some(gl), Some(hk)) = (g.comp(l), h.comp(j - l + 1)) {
                let c = compose_at(gl, 0, hk)?;
                acc = acc.add_scaled(&field.from_i64(composite_sign(j, l)), &c)?;
            }
        }
        comps.push(acc.renamed(format!("g{j}")));
    }
    AnMorphism::new(format!("{}∘{}", g.name, h.name), h.source.clone(), g.target.clone(), comps, order)
}

/// Matrix inverse of an arity-one degree-zero map, computed per degree.
fn invert_linear(m: &MultiMap) -> Result<MultiMap, StructureError> {
    let src = m.inputs()[0].clone();
    let tgt = m.target().clone();
    if src.dim() != tgt.dim() {
        return Err(StructureError::NotInvertible);
    }
    let field = src.field();
    let mut inv = MultiMap::zero(format!("{}^-1", m.name()), vec![tgt.clone()], src.clone(), 0);
    for cls in tgt.classes() {
        let block = crate::graded::linear_block(m, cls);
        let red = crate::linalg::ColumnReducer::from_matrix(field, &block);
        if red.rank() != src.dim_in(cls) || red.rank() != tgt.dim_in(cls) {
            return Err(StructureError::NotInvertible);
        }
        for (loc, &o) in tgt.basis_in(cls).iter().enumerate() {
            let pre = red.preimage(&vec![(loc, field.one())]).ok_or(StructureError::NotInvertible)?;
            let v: SVec = pre.iter().map(|(i, c)| (src.basis_in(cls)[*i], c.clone())).collect();
            inv.set(vec![o], crate::linalg::from_pairs(v))?;
        }
    }
    Ok(inv)
}

/// A left inverse `h` with `h ∘ g = id`, built order by order; requires `g_1` invertible.
pub fn inverse_morphism(g: &AnMorphism) -> Result<AnMorphism, StructureError> {
    let g1 = g.comp(1).ok_or(StructureError::NotInvertible)?;
    let g1inv = invert_linear(g1)?;
    let field = g.field();
    let mut h = AnMorphism::new(format!("{}^-1", g.name), g.target.clone(), g.source.clone(), vec![g1inv.clone().renamed("g1")], g.order)?;
    for j in 2..=g.order {
        // (h g)_j = sum_{l<j} c_l h_l(g_{j-l+1} ⊗ 1) + c_j h_j(g_1 ⊗ 1) must vanish.
        let mut rest = MultiMap::zero("rest", g.source.op_inputs(j), g.source.space.clone(), j as i64 - 1);
        for l in 1..j {
            if let (Some(hl), Some(gk)) = (h.comp(l), g.comp(j - l + 1)) {
                rest = rest.add_scaled(&field.from_i64(composite_sign(j, l)), &compose_at(hl, 0, gk)?)?;
            }
        }
        let corrected = compose_at(&rest, 0, &g1inv)?;
        let c = field.from_i64(-composite_sign(j, j));
        h.set_comp(j, corrected.scaled(&c).renamed(format!("g{j}")))?;
    }
    Ok(h)
}

/// Whether two morphisms have identical components up to `order`.
pub fn same_components(a: &AnMorphism, b: &AnMorphism, order: usize) -> bool {
    (1..=order).all(|k| a.comp_or_zero(k) == b.comp_or_zero(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::Grading;

    fn dual_numbers() -> AnAlgebra {
        let f = Field::prime(5).unwrap();
        let s = GradedSpace::new("S", f, Grading::Integer, vec![("1".into(), 0), ("e".into(), 1)], None).unwrap().shared();
        let m2 = MultiMap::from_fn("m2", vec![s.clone(), s.clone()], s.clone(), 0, |t| match (t[0], t[1]) {
            (0, 0) => vec![(0, f.one())],
            (0, 1) | (1, 0) => vec![(1, f.one())],
            _ => vec![],
        })
        .unwrap();
        AnAlgebra::new("S", s.clone(), vec![MultiMap::zero("m1", vec![s.clone()], s, -1), m2], 2).unwrap()
    }

    #[test]
    fn associative_algebra_passes() {
        let a = dual_numbers();
        let rep = check_algebra(&a, 5);
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4).len(), 8);
    }
}
