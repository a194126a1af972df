//! Graded vector spaces, multilinear maps and tensors with Koszul-signed evaluation.
//!
//! A space is either integer graded with finitely many basis vectors, or periodic:
//! a finite set of generators over a central even Laurent variable of degree `-P`.
//! In the periodic case every map is assumed linear over that variable, so only
//! degrees modulo `P` matter and the power of the variable is implied by degrees.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::linalg::SVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("duplicate basis name `{0}` in space `{1}`")]
    DuplicateName(String, String),
    #[error("basis element `{0}` of degree {1} lies outside the window [{2}, {3}]")]
    OutsideWindow(String, i64, i64, i64),
    #[error("period must be a positive even integer, got {0}")]
    BadPeriod(i64),
    #[error("periodic spaces are complete; a window is not allowed on `{0}`")]
    WindowOnPeriodic(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("entry of `{0}` has the wrong degree: {1}")]
    Degree(String, String),
    #[error("unknown basis name `{0}` in space `{1}`")]
    UnknownName(String, String),
}

/// Evaluation left the window on which a value is determined.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("value of `{map}` on input of total degree {degree} is outside the known window")]
pub struct Unknown {
    pub map: String,
    pub degree: i64,
}

/// How degrees are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Grading {
    Integer,
    Periodic(i64),
}

impl Grading {
    pub fn class(&self, d: i64) -> i64 {
        match self {
            Grading::Integer => d,
            Grading::Periodic(p) => d.rem_euclid(*p),
        }
    }

    pub fn same(&self, a: i64, b: i64) -> bool {
        self.class(a) == self.class(b)
    }

    /// Representatives of the degree classes meeting `[lo, hi]`.
    pub fn classes_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        match self {
            Grading::Integer => (lo..=hi).collect(),
            Grading::Periodic(p) => {
                let mut v: Vec<i64> = (lo..=hi).map(|d| d.rem_euclid(*p)).collect();
                v.sort();
                v.dedup();
                v
            }
        }
    }
}

/// A graded vector space with a named, ordered basis.
#[derive(Clone)]
pub struct GradedSpace {
    label: String,
    field: Field,
    grading: Grading,
    window: Option<(i64, i64)>,
    names: Vec<String>,
    degrees: Vec<i64>,
    index: HashMap<String, usize>,
    by_class: BTreeMap<i64, Vec<usize>>,
    local: Vec<usize>,
}

impl PartialEq for GradedSpace {
    fn eq(&self, o: &Self) -> bool {
        self.label == o.label
            && self.field == o.field
            && self.grading == o.grading
            && self.window == o.window
            && self.names == o.names
            && self.degrees == o.degrees
    }
}
impl Eq for GradedSpace {}

impl fmt::Debug for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedSpace({}, dim {})", self.label, self.dim())
    }
}

impl GradedSpace {
    /// `window = None` means the space is complete: nothing outside the basis exists.
    pub fn new(
        label: impl Into<String>,
        field: Field,
        grading: Grading,
        basis: Vec<(String, i64)>,
        window: Option<(i64, i64)>,
    ) -> Result<Self, GradedError> {
        let label = label.into();
        if let Grading::Periodic(p) = grading {
            if p <= 0 || p % 2 != 0 {
                return Err(GradedError::BadPeriod(p));
            }
            if window.is_some() {
                return Err(GradedError::WindowOnPeriodic(label));
            }
        }
        let mut index = HashMap::new();
        let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let mut local = Vec::with_capacity(basis.len());
        let mut names = Vec::with_capacity(basis.len());
        let mut degrees = Vec::with_capacity(basis.len());
        for (i, (n, d)) in basis.into_iter().enumerate() {
            if let Some((lo, hi)) = window {
                if d < lo || d > hi {
                    return Err(GradedError::OutsideWindow(n, d, lo, hi));
                }
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(GradedError::DuplicateName(n, label));
            }
            let cls = by_class.entry(grading.class(d)).or_default();
            local.push(cls.len());
            cls.push(i);
            names.push(n);
            degrees.push(d);
        }
        Ok(GradedSpace { label, field, grading, window, names, degrees, index, by_class, local })
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn field(&self) -> Field {
        self.field
    }
    pub fn grading(&self) -> Grading {
        self.grading
    }
    pub fn window(&self) -> Option<(i64, i64)> {
        self.window
    }
    pub fn dim(&self) -> usize {
        self.names.len()
    }
    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }
    pub fn parity(&self, i: usize) -> i64 {
        self.degrees[i].rem_euclid(2)
    }
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn find(&self, name: &str) -> Result<usize, GradedError> {
        self.index.get(name).copied().ok_or_else(|| GradedError::UnknownName(name.to_string(), self.label.clone()))
    }
    pub fn class(&self, d: i64) -> i64 {
        self.grading.class(d)
    }
    /// Basis indices in degree `d` (its class, for periodic spaces).
    pub fn basis_in(&self, d: i64) -> &[usize] {
        self.by_class.get(&self.class(d)).map_or(&[], |v| v.as_slice())
    }
    pub fn dim_in(&self, d: i64) -> usize {
        self.basis_in(d).len()
    }
    /// Position of basis vector `i` within its degree.
    pub fn local_index(&self, i: usize) -> usize {
        self.local[i]
    }
    pub fn classes(&self) -> Vec<i64> {
        self.by_class.keys().copied().collect()
    }
    /// Whether degree `d` is fully determined by this space.
    pub fn is_known(&self, d: i64) -> bool {
        match self.window {
            None => true,
            Some((lo, hi)) => lo <= d && d <= hi,
        }
    }
    pub fn is_complete(&self) -> bool {
        self.window.is_none()
    }

    /// Same basis under a new label and degree shift `C[n]_k = C_{k+n}`.
    pub fn shifted(&self, label: impl Into<String>, n: i64) -> GradedSpace {
        let basis = self.names.iter().cloned().zip(self.degrees.iter().map(|d| d - n)).collect();
        let window = self.window.map(|(lo, hi)| (lo - n, hi - n));
        GradedSpace::new(label, self.field, self.grading, basis, window).expect("shift preserves validity")
    }

    /// Direct sum with prefixed names; degrees of the second summand are shifted by `-n2`.
    pub fn direct_sum(label: impl Into<String>, parts: &[(&GradedSpace, &str, i64)]) -> Result<GradedSpace, GradedError> {
        let first = parts.first().ok_or_else(|| GradedError::Shape("empty direct sum".into()))?.0;
        let mut basis = Vec::new();
        let mut window: Option<(i64, i64)> = None;
        let mut complete = true;
        for (sp, prefix, n) in parts {
            if sp.field != first.field || sp.grading != first.grading {
                return Err(GradedError::Shape("direct sum of incompatible spaces".into()));
            }
            for i in 0..sp.dim() {
                basis.push((format!("{prefix}{}", sp.name(i)), sp.degree(i) - n));
            }
            if let Some((lo, hi)) = sp.window {
                complete = false;
                window = Some(match window {
                    None => (lo - n, hi - n),
                    Some((a, b)) => (a.max(lo - n), b.min(hi - n)),
                });
            }
        }
        let window = if complete { None } else { window };
        GradedSpace::new(label, first.field, first.grading, basis, window)
    }
}

pub fn same_space(a: &Arc<GradedSpace>, b: &Arc<GradedSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A degree-homogeneous multilinear map `V_1 ⊗ ... ⊗ V_k -> W`, stored sparsely.
#[derive(Clone)]
pub struct MultiMap {
    name: String,
    inputs: Vec<Arc<GradedSpace>>,
    target: Arc<GradedSpace>,
    degree: i64,
    entries: BTreeMap<Vec<usize>, SVec>,
    valid: Option<(i64, i64)>,
}

impl fmt::Debug for MultiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiMap({}, arity {}, degree {}, {} entries)", self.name, self.arity(), self.degree, self.entries.len())
    }
}

impl PartialEq for MultiMap {
    fn eq(&self, o: &Self) -> bool {
        self.degree == o.degree
            && self.inputs.len() == o.inputs.len()
            && self.inputs.iter().zip(&o.inputs).all(|(a, b)| same_space(a, b))
            && same_space(&self.target, &o.target)
            && self.entries == o.entries
            && self.valid == o.valid
    }
}

impl MultiMap {
    pub fn zero(name: impl Into<String>, inputs: Vec<Arc<GradedSpace>>, target: Arc<GradedSpace>, degree: i64) -> Self {
        MultiMap { name: name.into(), inputs, target, degree, entries: BTreeMap::new(), valid: None }
    }

    pub fn identity(space: &Arc<GradedSpace>) -> Self {
        let mut m = MultiMap::zero(format!("id_{}", space.label()), vec![space.clone()], space.clone(), 0);
        let one = space.field().one();
        for i in 0..space.dim() {
            m.entries.insert(vec![i], vec![(i, one.clone())]);
        }
        m
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn inputs(&self) -> &[Arc<GradedSpace>] {
        &self.inputs
    }
    pub fn target(&self) -> &Arc<GradedSpace> {
        &self.target
    }
    pub fn field(&self) -> Field {
        self.target.field()
    }
    pub fn valid(&self) -> Option<(i64, i64)> {
        self.valid
    }
    pub fn set_valid(&mut self, w: Option<(i64, i64)>) {
        self.valid = w;
    }
    pub fn entries(&self) -> &BTreeMap<Vec<usize>, SVec> {
        &self.entries
    }
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn input_degree(&self, tuple: &[usize]) -> i64 {
        tuple.iter().zip(&self.inputs).map(|(i, s)| s.degree(*i)).sum()
    }

    /// Sets the value on a basis tuple, checking degrees. Zero coefficients are dropped.
    pub fn set(&mut self, tuple: Vec<usize>, value: SVec) -> Result<(), GradedError> {
        if tuple.len() != self.arity() {
            return Err(GradedError::Shape(format!("{}: tuple of length {} for arity {}", self.name, tuple.len(), self.arity())));
        }
        for (i, s) in tuple.iter().zip(&self.inputs) {
            if *i >= s.dim() {
                return Err(GradedError::Shape(format!("{}: index {i} out of range", self.name)));
            }
        }
        let d = self.input_degree(&tuple) + self.degree;
        let value: SVec = value.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        for (o, _) in &value {
            if *o >= self.target.dim() || !self.target.grading().same(self.target.degree(*o), d) {
                return Err(GradedError::Degree(self.name.clone(), format!("output index {o} in degree {d}")));
            }
        }
        if value.is_empty() {
            self.entries.remove(&tuple);
        } else {
            self.entries.insert(tuple, value);
        }
        Ok(())
    }

    /// Adds `c * e_out` to the value on `tuple`.
    pub fn add_entry(&mut self, tuple: Vec<usize>, out: usize, c: Scalar) -> Result<(), GradedError> {
        let cur = self.entries.get(&tuple).cloned().unwrap_or_default();
        let v = crate::linalg::axpy(&cur, &c, &vec![(out, self.field().one())]);
        self.set(tuple, v)
    }

    /// Value on a basis tuple; an error if the value is not determined by the stored window.
    pub fn eval(&self, tuple: &[usize]) -> Result<&[(usize, Scalar)], Unknown> {
        let din = self.input_degree(tuple);
        let dout = din + self.degree;
        let known_in = self.valid.is_none_or(|(lo, hi)| lo <= din && din <= hi);
        if !known_in || !self.target.is_known(dout) {
            return Err(Unknown { map: self.name.clone(), degree: din });
        }
        Ok(self.entries.get(tuple).map_or(&[][..], |v| v.as_slice()))
    }

    pub fn scaled(&self, a: &Scalar) -> MultiMap {
        let mut m = self.clone();
        if a.is_zero() {
            m.entries.clear();
        } else {
            for v in m.entries.values_mut() {
                *v = crate::linalg::scale(v, a);
            }
        }
        m
    }

    /// `self + a * other` (same shape).
    pub fn add_scaled(&self, a: &Scalar, other: &MultiMap) -> Result<MultiMap, GradedError> {
        self.check_same_shape(other)?;
        let mut m = self.clone();
        for (k, v) in &other.entries {
            let cur = m.entries.get(k).cloned().unwrap_or_default();
            let nv = crate::linalg::axpy(&cur, a, v);
            if nv.is_empty() {
                m.entries.remove(k);
            } else {
                m.entries.insert(k.clone(), nv);
            }
        }
        m.valid = intersect(self.valid, other.valid);
        Ok(m)
    }

    pub fn check_same_shape(&self, o: &MultiMap) -> Result<(), GradedError> {
        if self.degree != o.degree
            || self.arity() != o.arity()
            || !self.inputs.iter().zip(&o.inputs).all(|(a, b)| same_space(a, b))
            || !same_space(&self.target, &o.target)
        {
            return Err(GradedError::Shape(format!("{} vs {}", self.name, o.name)));
        }
        Ok(())
    }

    /// Builds a map from a function on basis tuples over all tuples of the input spaces.
    pub fn from_fn(
        name: impl Into<String>,
        inputs: Vec<Arc<GradedSpace>>,
        target: Arc<GradedSpace>,
        degree: i64,
        mut f: impl FnMut(&[usize]) -> SVec,
    ) -> Result<MultiMap, GradedError> {
        let mut m = MultiMap::zero(name, inputs, target, degree);
        let dims: Vec<usize> = m.inputs.iter().map(|s| s.dim()).collect();
        for t in all_tuples(&dims) {
            let v = f(&t);
            if !v.is_empty() {
                m.set(t, v)?;
            }
        }
        Ok(m)
    }
}

pub fn intersect(a: Option<(i64, i64)>, b: Option<(i64, i64)>) -> Option<(i64, i64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.max(b0), a1.min(b1))),
    }
}

/// All tuples `(i_1, .., i_k)` with `0 <= i_j < dims[j]`, in lexicographic order.
pub fn all_tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(dims.len())];
    for &d in dims {
        let mut next = Vec::with_capacity(out.len() * d);
        for t in &out {
            for i in 0..d {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// A linear combination of basis tuples of `slots[0] ⊗ ... ⊗ slots[k-1]`.
#[derive(Clone, PartialEq, Eq)]
pub struct Tensor {
    field: Field,
    slots: Vec<Arc<GradedSpace>>,
    terms: BTreeMap<Vec<usize>, Scalar>,
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let names: Vec<&str> = t.iter().zip(&self.slots).map(|(i, s)| s.name(*i)).collect();
            write!(f, "{c}*({})", names.join(","))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Tensor {
    pub fn zero(field: Field, slots: Vec<Arc<GradedSpace>>) -> Self {
        Tensor { field, slots, terms: BTreeMap::new() }
    }

    pub fn basis(slots: Vec<Arc<GradedSpace>>, tuple: Vec<usize>) -> Self {
        let field = slots.first().map(|s| s.field()).unwrap_or(Field::Rational);
        let mut t = Tensor::zero(field, slots);
        t.add_term(tuple, &field.one());
        t
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn slots(&self) -> &[Arc<GradedSpace>] {
        &self.slots
    }
    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Scalar> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, tuple: Vec<usize>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&tuple) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&tuple);
                }
            }
            None => {
                self.terms.insert(tuple, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, o: &Tensor) {
        for (t, v) in &o.terms {
            self.add_term(t.clone(), &(c * v));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Tensor {
        let mut t = Tensor::zero(self.field, self.slots.clone());
        t.add_scaled(c, self);
        t
    }

    /// Degree of a basis tuple.
    pub fn tuple_degree(&self, tuple: &[usize]) -> i64 {
        tuple.iter().zip(&self.slots).map(|(i, s)| s.degree(*i)).sum()
    }

    /// Applies `1^{pos} ⊗ f ⊗ 1^{rest}` with the Koszul sign `(-1)^{|f| (|x_1|+...+|x_pos|)}`.
    pub fn apply_at(&self, pos: usize, f: &MultiMap) -> Result<Tensor, TensorError> {
        let ar = f.arity();
        if pos + ar > self.slots.len() {
            return Err(TensorError::Shape(format!("{} at slot {pos} of a {}-fold tensor", f.name(), self.slots.len())));
        }
        for (k, s) in f.inputs().iter().enumerate() {
            if !same_space(s, &self.slots[pos + k]) {
                return Err(TensorError::Shape(format!(
                    "{} expects {} in slot {}, found {}",
                    f.name(),
                    s.label(),
                    pos + k,
                    self.slots[pos + k].label()
                )));
            }
        }
        let mut slots = Vec::with_capacity(self.slots.len() + 1 - ar);
        slots.extend_from_slice(&self.slots[..pos]);
        slots.push(f.target().clone());
        slots.extend_from_slice(&self.slots[pos + ar..]);
        let mut out = Tensor::zero(self.field, slots);
        let fodd = f.degree().rem_euclid(2) == 1;
        for (t, c) in &self.terms {
            let val = f.eval(&t[pos..pos + ar])?;
            if val.is_empty() {
                continue;
            }
            let mut c = c.clone();
            if fodd {
                let pre: i64 = t[..pos].iter().zip(&self.slots[..pos]).map(|(i, s)| s.degree(*i)).sum();
                if pre.rem_euclid(2) == 1 {
                    c = -c;
                }
            }
            for (o, v) in val {
                let mut u = Vec::with_capacity(t.len() + 1 - ar);
                u.extend_from_slice(&t[..pos]);
                u.push(*o);
                u.extend_from_slice(&t[pos + ar..]);
                out.add_term(u, &(&c * v));
            }
        }
        Ok(out)
    }

    /// Applies `f_1 ⊗ ... ⊗ f_u` (consuming the slots left to right), evaluating the
    /// factors right to left so that each picks up the Koszul sign of the inputs before it.
    pub fn apply_word(&self, word: &[&MultiMap]) -> Result<Tensor, TensorError> {
        let total: usize = word.iter().map(|m| m.arity()).sum();
        if total != self.slots.len() {
            return Err(TensorError::Shape(format!("word of total arity {total} on {}-fold tensor", self.slots.len())));
        }
        let mut starts = Vec::with_capacity(word.len());
        let mut s = 0;
        for m in word {
            starts.push(s);
            s += m.arity();
        }
        let mut cur = self.clone();
        for (k, m) in word.iter().enumerate().rev() {
            cur = cur.apply_at(starts[k], m)?;
        }
        Ok(cur)
    }

    /// For a one-slot tensor: the coefficient vector.
    pub fn to_vec(&self) -> SVec {
        assert_eq!(self.slots.len(), 1, "to_vec on a multi-slot tensor");
        self.terms.iter().map(|(t, c)| (t[0], c.clone())).collect()
    }

    pub fn from_vec(space: Arc<GradedSpace>, v: &SVec) -> Tensor {
        let mut t = Tensor::zero(space.field(), vec![space]);
        for (i, c) in v {
            t.add_term(vec![*i], c);
        }
        t
    }

    /// Concatenates tensors factorwise: `(x ⊗ y)` with no signs.
    pub fn concat(&self, o: &Tensor) -> Tensor {
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&o.slots);
        let mut out = Tensor::zero(self.field, slots);
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                let mut u = a.clone();
                u.extend_from_slice(b);
                out.add_term(u, &(c * d));
            }
        }
        out
    }

    pub fn describe(&self) -> Vec<(String, Vec<String>)> {
        self.terms.iter().map(|(t, c)| (c.to_text(), t.iter().zip(&self.slots).map(|(i, s)| s.name(*i).to_string()).collect())).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Unknown(#[from] Unknown),
}

/// A chain complex: a graded space with a degree `-1` differential.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub space: Arc<GradedSpace>,
    pub d: MultiMap,
}

impl ChainComplex {
    pub fn new(space: Arc<GradedSpace>, d: MultiMap) -> Result<Self, GradedError> {
        if d.arity() != 1 || d.degree() != -1 || !same_space(&d.inputs()[0], &space) || !same_space(d.target(), &space) {
            return Err(GradedError::Shape("differential must be an endomorphism of degree -1".into()));
        }
        Ok(ChainComplex { space, d })
    }

    /// Matrix of `d` from degree `k` to degree `k-1`, in local coordinates.
    pub fn block(&self, k: i64) -> crate::linalg::SparseMatrix {
        linear_block(&self.d, k)
    }
}

/// Matrix of an arity-one map restricted to source degree `k`, in local coordinates.
pub fn linear_block(f: &MultiMap, k: i64) -> crate::linalg::SparseMatrix {
    let src = &f.inputs()[0];
    let tgt = f.target();
    let cols = src
        .basis_in(k)
        .iter()
        .map(|&i| {
            let v: SVec =
                f.entries().get(&vec![i]).map_or(Vec::new(), |v| v.iter().map(|(o, c)| (tgt.local_index(*o), c.clone())).collect());
            crate::linalg::from_pairs(v)
        })
        .collect();
    crate::linalg::SparseMatrix { nrows: tgt.dim_in(k + f.degree()), cols }
}
