//! Differential graded algebras and modules, homology with a fixed contraction,
//! and builders for endomorphism algebras of complexes over `k[z]/z^n`.

use std::sync::Arc;

use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::graded::{same_space, ChainComplex, GradedError, GradedSpace, Grading, MultiMap, Tensor};
use crate::linalg::{axpy, from_pairs, ColumnReducer, SVec};
use crate::signs::{compose, SignError};
use crate::structures::{check_algebra, AnAlgebra, StructureError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgaError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Sign(#[from] SignError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
}

/// A unital differential graded algebra.
#[derive(Clone, Debug)]
pub struct Dga {
    pub name: String,
    pub space: Arc<GradedSpace>,
    pub d: MultiMap,
    pub mu: MultiMap,
    pub unit: SVec,
}

impl Dga {
    pub fn new(name: impl Into<String>, space: Arc<GradedSpace>, d: MultiMap, mu: MultiMap, unit: SVec) -> Result<Self, DgaError> {
        let a = Dga { name: name.into(), space, d, mu, unit };
        let shape_ok = a.d.arity() == 1
            && a.d.degree() == -1
            && same_space(&a.d.inputs()[0], &a.space)
            && same_space(a.d.target(), &a.space)
            && a.mu.arity() == 2
            && a.mu.degree() == 0
            && a.mu.inputs().iter().all(|s| same_space(s, &a.space))
            && same_space(a.mu.target(), &a.space);
        if !shape_ok {
            return Err(DgaError::Invalid("differential or product has the wrong shape".into()));
        }
        Ok(a)
    }

    pub fn field(&self) -> Field {
        self.space.field()
    }

    pub fn complex(&self) -> ChainComplex {
        ChainComplex { space: self.space.clone(), d: self.d.clone() }
    }

    /// The DGA as an A_infinity algebra with `m_1 = d`, `m_2 = mu`.
    pub fn as_algebra(&self) -> AnAlgebra {
        AnAlgebra::new(self.name.clone(), self.space.clone(), vec![self.d.clone().renamed("m1"), self.mu.clone().renamed("m2")], 2)
            .expect("DGA operations have A_infinity shapes")
    }

    /// Checks `d^2 = 0`, the Leibniz rule, associativity and two-sided unitality.
    pub fn validate(&self) -> Result<(), DgaError> {
        let rep = check_algebra(&self.as_algebra(), 3);
        if !rep.passed() {
            return Err(DgaError::Invalid(format!("{}: DGA identities fail: {:?}", self.name, rep.first_failure)));
        }
        let field = self.field();
        for i in 0..self.space.dim() {
            let e = vec![(i, field.one())];
            if self.left_mul(&self.unit, &e) != e || self.left_mul(&e, &self.unit) != e {
                return Err(DgaError::Invalid(format!("{}: unit law fails on {}", self.name, self.space.name(i))));
            }
        }
        Ok(())
    }

    /// Product of two elements given as coefficient vectors.
    pub fn left_mul(&self, a: &SVec, b: &SVec) -> SVec {
        let mut out: SVec = Vec::new();
        for (i, c) in a {
            for (j, e) in b {
                if let Ok(v) = self.mu.eval(&[*i, *j]) {
                    out = axpy(&out, &(c * e), &v.to_vec());
                }
            }
        }
        out
    }
}

/// A right differential graded module over a DGA.
#[derive(Clone, Debug)]
pub struct DgModule {
    pub name: String,
    pub space: Arc<GradedSpace>,
    pub d: MultiMap,
    pub action: MultiMap,
    pub algebra: Arc<Dga>,
}

impl DgModule {
    pub fn complex(&self) -> ChainComplex {
        ChainComplex { space: self.space.clone(), d: self.d.clone() }
    }

    /// Checks `d^2 = 0`, Leibniz, associativity of the action and unitality.
    pub fn validate(&self) -> Result<(), DgaError> {
        let a = Arc::new(self.algebra.as_algebra());
        let x = crate::structures::AnModule::new(
            self.name.clone(),
            a,
            self.space.clone(),
            crate::structures::Side::Right,
            vec![self.d.clone().renamed("m1"), self.action.clone().renamed("m2")],
            2,
        )?;
        let rep = crate::structures::check_module(&x, 3);
        if !rep.passed() {
            return Err(DgaError::Invalid(format!("{}: module identities fail: {:?}", self.name, rep.first_failure)));
        }
        for i in 0..self.space.dim() {
            let t =
                Tensor::basis(vec![self.space.clone()], vec![i]).concat(&Tensor::from_vec(self.algebra.space.clone(), &self.algebra.unit));
            let v = t.apply_at(0, &self.action).map_err(|e| DgaError::Invalid(e.to_string()))?;
            if v.to_vec() != vec![(i, self.space.field().one())] {
                return Err(DgaError::Invalid(format!("{}: unit acts nontrivially on {}", self.name, self.space.name(i))));
            }
        }
        Ok(())
    }
}

/// Homology of a complex with the data needed for transfer: the projection `p`,
/// a section `i` landing in cycles, and a contraction `h` of degree `+1` with
/// `dh + hd = 1 - ip`, `hi = 0`, `ph = 0`, `hh = 0`.
#[derive(Clone, Debug)]
pub struct HomologyData {
    pub h: Arc<GradedSpace>,
    pub proj: MultiMap,
    pub incl: MultiMap,
    pub htpy: MultiMap,
    /// Degrees of the source complex on which the data is fully determined.
    pub certified: Option<(i64, i64)>,
}

/// Degrees (or degree classes) carrying basis vectors, plus their neighbours, in order.
fn degrees_to_visit(space: &GradedSpace) -> Vec<i64> {
    match space.grading() {
        Grading::Periodic(p) => (0..p).collect(),
        Grading::Integer => {
            let mut v: Vec<i64> = space.classes();
            v.sort();
            v
        }
    }
}

fn lift_local(space: &GradedSpace, deg: i64, v: &SVec) -> SVec {
    let basis = space.basis_in(deg);
    from_pairs(v.iter().map(|(i, c)| (basis[*i], c.clone())).collect())
}

/// Computes homology with deterministic bases and a contraction satisfying the
/// side conditions. Basis vectors of `H` are named `{prefix}{degree}_{j}`.
pub fn homology(c: &ChainComplex, prefix: &str) -> Result<HomologyData, DgaError> {
    let a = &c.space;
    let field = a.field();
    struct PerDegree {
        deg: i64,
        b_pre: Vec<SVec>,
        z: Vec<SVec>,
        coords: Vec<SVec>,
        nb: usize,
        nh: usize,
    }
    let mut per = Vec::new();
    for deg in degrees_to_visit(a) {
        let dim = a.dim_in(deg);
        let next = ColumnReducer::from_matrix(field, &c.block(deg + 1));
        let here = ColumnReducer::from_matrix(field, &c.block(deg));
        let mut cols: Vec<SVec> = Vec::with_capacity(dim);
        let mut b_pre = Vec::new();
        let mut bspan = ColumnReducer::new(field);
        for (_, img, pre) in next.pivots() {
            cols.push(img.clone());
            b_pre.push(pre.clone());
            bspan.push_column(img.clone());
        }
        let nb = cols.len();
        let mut z = Vec::new();
        for k in here.kernel() {
            let k = from_pairs(k.clone());
            if bspan.push_column(k.clone()).is_some() {
                cols.push(k.clone());
                z.push(k);
            }
        }
        let nh = z.len();
        for (_, _, pre) in here.pivots() {
            cols.push(pre.clone());
        }
        if cols.len() != dim {
            return Err(DgaError::Invalid(format!(
                "splitting in degree {deg} has {} vectors for dimension {dim}; is d^2 = 0?",
                cols.len()
            )));
        }
        let q = ColumnReducer::from_matrix(field, &crate::linalg::SparseMatrix { nrows: dim, cols });
        let mut coords = Vec::with_capacity(dim);
        for i in 0..dim {
            coords.push(
                q.preimage(&vec![(i, field.one())]).ok_or_else(|| DgaError::Invalid(format!("degenerate splitting in degree {deg}")))?,
            );
        }
        per.push(PerDegree { deg, b_pre, z, coords, nb, nh });
    }
    let mut basis = Vec::new();
    for p in &per {
        for j in 0..p.nh {
            basis.push((format!("{prefix}{}_{j}", p.deg), p.deg));
        }
    }
    let window = a.window().map(|(lo, hi)| (lo + 1, hi - 1));
    let hspace = GradedSpace::new(format!("H({})", a.label()), field, a.grading(), basis, a.window())?.shared();
    let mut proj = MultiMap::zero("p", vec![a.clone()], hspace.clone(), 0);
    let mut incl = MultiMap::zero("f1", vec![hspace.clone()], a.clone(), 0);
    let mut htpy = MultiMap::zero("h", vec![a.clone()], a.clone(), 1);
    let mut hoff = 0;
    for p in &per {
        for (j, z) in p.z.iter().enumerate() {
            incl.set(vec![hoff + j], lift_local(a, p.deg, z))?;
        }
        for (li, &gi) in a.basis_in(p.deg).iter().enumerate() {
            let mut pv: SVec = Vec::new();
            let mut hv: SVec = Vec::new();
            for (idx, coef) in &p.coords[li] {
                if *idx < p.nb {
                    hv = axpy(&hv, coef, &lift_local(a, p.deg + 1, &p.b_pre[*idx]));
                } else if *idx < p.nb + p.nh {
                    pv.push((hoff + idx - p.nb, coef.clone()));
                }
            }
            proj.set(vec![gi], pv)?;
            htpy.set(vec![gi], hv)?;
        }
        hoff += p.nh;
    }
    Ok(HomologyData { h: hspace, proj, incl, htpy, certified: window })
}

impl HomologyData {
    pub fn dim_in(&self, deg: i64) -> usize {
        self.h.dim_in(deg)
    }

    /// Verifies all contraction identities entrywise.
    pub fn verify(&self, c: &ChainComplex) -> Result<(), DgaError> {
        let field = c.space.field();
        let minus = -field.one();
        let check = |what: &str, m: MultiMap| -> Result<(), DgaError> {
            if m.is_zero() {
                Ok(())
            } else {
                Err(DgaError::Invalid(format!("contraction identity `{what}` fails")))
            }
        };
        check("d i = 0", compose(&c.d, &self.incl)?)?;
        check("p d = 0", compose(&self.proj, &c.d)?)?;
        let pi = compose(&self.proj, &self.incl)?;
        check("p i = 1", pi.add_scaled(&minus, &MultiMap::identity(&self.h))?)?;
        let dh = compose(&c.d, &self.htpy)?;
        let hd = compose(&self.htpy, &c.d)?;
        let ip = compose(&self.incl, &self.proj)?;
        let lhs = dh.add_scaled(&field.one(), &hd)?.add_scaled(&field.one(), &ip)?;
        check("dh + hd = 1 - ip", lhs.add_scaled(&minus, &MultiMap::identity(&c.space))?)?;
        check("h i = 0", compose(&self.htpy, &self.incl)?)?;
        check("p h = 0", compose(&self.proj, &self.htpy)?)?;
        check("h h = 0", compose(&self.htpy, &self.htpy)?)?;
        Ok(())
    }
}

/// The truncated polynomial algebra `L = k[z]/z^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncPoly {
    pub field: Field,
    pub n: usize,
}

/// A complex of `L`-modules: a graded space with commuting `z` (degree 0) and `d`.
/// Free complexes also record their `L`-basis: basis vector `z^k g` sits at `free[g][k]`.
#[derive(Clone, Debug)]
pub struct LComplex {
    pub name: String,
    pub ring: TruncPoly,
    pub space: Arc<GradedSpace>,
    pub z: MultiMap,
    pub d: MultiMap,
    free: Option<Vec<Vec<usize>>>,
}

impl LComplex {
    /// A general complex from explicit `z` and `d`.
    pub fn new(name: impl Into<String>, ring: TruncPoly, space: Arc<GradedSpace>, z: MultiMap, d: MultiMap) -> Result<Self, DgaError> {
        let c = LComplex { name: name.into(), ring, space, z, d, free: None };
        c.validate()?;
        Ok(c)
    }

    /// A free complex on generators `(name, degree)`, with `d(g) = sum c z^k g'`
    /// given as `(g', k, c)` triples.
    pub fn free(
        name: impl Into<String>,
        ring: TruncPoly,
        grading: Grading,
        gens: &[(String, i64)],
        dgen: &[Vec<(usize, usize, Scalar)>],
    ) -> Result<Self, DgaError> {
        let name = name.into();
        let n = ring.n;
        let mut basis = Vec::new();
        let mut free = Vec::new();
        for (g, deg) in gens {
            let mut row = Vec::new();
            for k in 0..n {
                row.push(basis.len());
                basis.push((if k == 0 { g.clone() } else { format!("z{k}{g}") }, *deg));
            }
            free.push(row);
        }
        let space = GradedSpace::new(name.clone(), ring.field, grading, basis, None)?.shared();
        let mut z = MultiMap::zero("z", vec![space.clone()], space.clone(), 0);
        let mut d = MultiMap::zero("d", vec![space.clone()], space.clone(), -1);
        for (gi, row) in free.iter().enumerate() {
            for k in 0..n {
                if k + 1 < n {
                    z.set(vec![row[k]], vec![(row[k + 1], ring.field.one())])?;
                }
                let mut v: SVec = Vec::new();
                for (g2, p, c) in &dgen[gi] {
                    if k + p < n {
                        v.push((free[*g2][k + p], c.clone()));
                    }
                }
                d.set(vec![row[k]], from_pairs(v))?;
            }
        }
        let c = LComplex { name, ring, space, z, d, free: Some(free) };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), DgaError> {
        if !compose(&self.d, &self.d)?.is_zero() {
            return Err(DgaError::Invalid(format!("{}: d^2 != 0", self.name)));
        }
        if compose(&self.d, &self.z)? != compose(&self.z, &self.d)? {
            return Err(DgaError::Invalid(format!("{}: d is not L-linear", self.name)));
        }
        let mut zn = MultiMap::identity(&self.space);
        for _ in 0..self.ring.n {
            zn = compose(&self.z, &zn)?;
        }
        if !zn.is_zero() {
            return Err(DgaError::Invalid(format!("{}: z^n acts nontrivially", self.name)));
        }
        Ok(())
    }

    pub fn complex(&self) -> ChainComplex {
        ChainComplex { space: self.space.clone(), d: self.d.clone() }
    }

    pub fn generators(&self) -> Option<Vec<usize>> {
        self.free.as_ref().map(|f| f.iter().map(|r| r[0]).collect())
    }

    /// Writes an element of a free complex as `sum_g p_g(z) g`: entries `(g, k, c)`.
    fn expand(&self, v: &SVec) -> Vec<(usize, usize, Scalar)> {
        let free = self.free.as_ref().expect("expand on a free complex");
        let mut out = Vec::new();
        for (i, c) in v {
            for (g, row) in free.iter().enumerate() {
                if let Some(k) = row.iter().position(|x| x == i) {
                    out.push((g, k, c.clone()));
                }
            }
        }
        out
    }

    fn z_power(&self, k: usize, v: &SVec) -> SVec {
        let mut cur = v.clone();
        for _ in 0..k {
            let t = Tensor::from_vec(self.space.clone(), &cur).apply_at(0, &self.z).expect("z is total");
            cur = t.to_vec();
        }
        cur
    }
}

/// The Hom complex `Hom_L(M, N)` from a free complex `M`. A basis map sends one
/// generator of `M` to one basis vector of `N` and the other generators to zero.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub complex: ChainComplex,
    /// For each basis map: (generator position in M, basis index in N).
    pub pairs: Vec<(usize, usize)>,
    source: LComplex,
    target: LComplex,
}

impl HomComplex {
    /// Value of a homogeneous combination of basis maps on a vector of `M`.
    pub fn apply(&self, f: &SVec, m: &SVec) -> SVec {
        let mut out: SVec = Vec::new();
        for (g, k, c) in self.source.expand(m) {
            let mut fg: SVec = Vec::new();
            for (idx, a) in f {
                let (gg, nb) = self.pairs[*idx];
                if gg == g {
                    fg = axpy(&fg, a, &vec![(nb, self.target.ring.field.one())]);
                }
            }
            out = axpy(&out, &c, &self.target.z_power(k, &fg));
        }
        out
    }

    /// Coordinates of the map determined by its values on generators.
    fn assemble(&self, values: &[(usize, SVec)]) -> SVec {
        let mut v = Vec::new();
        for (idx, (g, nb)) in self.pairs.iter().enumerate() {
            for (gg, val) in values {
                if gg == g {
                    if let Some(c) = crate::linalg::get(val, *nb) {
                        v.push((idx, c.clone()));
                    }
                }
            }
        }
        from_pairs(v)
    }
}

/// Builds `Hom_L(M, N)` with differential `d(f) = d_N f - (-1)^{|f|} f d_M`.
pub fn hom_complex(m: &LComplex, n: &LComplex) -> Result<HomComplex, DgaError> {
    let gens = m.generators().ok_or_else(|| DgaError::Parameters(format!("{} is not free", m.name)))?;
    if m.ring != n.ring || m.space.grading() != n.space.grading() {
        return Err(DgaError::Parameters("Hom between complexes over different rings".into()));
    }
    let mut basis = Vec::new();
    let mut pairs = Vec::new();
    for (gi, &g) in gens.iter().enumerate() {
        for nb in 0..n.space.dim() {
            basis.push((format!("{}>{}", m.space.name(g), n.space.name(nb)), n.space.degree(nb) - m.space.degree(g)));
            pairs.push((gi, nb));
        }
    }
    let grading = m.space.grading();
    let space = GradedSpace::new(format!("Hom({},{})", m.name, n.name), m.ring.field, grading, basis, None)?.shared();
    let field = m.ring.field;
    let mut hc = HomComplex {
        complex: ChainComplex { space: space.clone(), d: MultiMap::zero("d", vec![space.clone()], space.clone(), -1) },
        pairs,
        source: m.clone(),
        target: n.clone(),
    };
    let mut d = MultiMap::zero("d", vec![space.clone()], space.clone(), -1);
    for idx in 0..space.dim() {
        let f = vec![(idx, field.one())];
        let sign = field.sign(space.degree(idx));
        let mut values = Vec::new();
        for (gi, &g) in gens.iter().enumerate() {
            let fg = hc.apply(&f, &vec![(g, field.one())]);
            let dnf = Tensor::from_vec(n.space.clone(), &fg).apply_at(0, &n.d).expect("total").to_vec();
            let dg = Tensor::basis(vec![m.space.clone()], vec![g]).apply_at(0, &m.d).expect("total").to_vec();
            let fdg = hc.apply(&f, &dg);
            values.push((gi, axpy(&dnf, &-&sign, &fdg)));
        }
        d.set(vec![idx], hc.assemble(&values))?;
    }
    hc.complex.d = d;
    Ok(hc)
}

/// The endomorphism DGA `End_L(M)` of a free complex, with composition as product.
pub fn endomorphism_dga(m: &LComplex) -> Result<(Dga, HomComplex), DgaError> {
    let hc = hom_complex(m, m)?;
    let space = hc.complex.space.clone();
    let field = m.ring.field;
    let gens = m.generators().expect("free");
    let mut mu = MultiMap::zero("mu", vec![space.clone(), space.clone()], space.clone(), 0);
    for a in 0..space.dim() {
        for b in 0..space.dim() {
            let fa = vec![(a, field.one())];
            let fb = vec![(b, field.one())];
            let mut values = Vec::new();
            for (gi, &g) in gens.iter().enumerate() {
                let bg = hc.apply(&fb, &vec![(g, field.one())]);
                values.push((gi, hc.apply(&fa, &bg)));
            }
            mu.set(vec![a, b], hc.assemble(&values))?;
        }
    }
    let unit_vals: Vec<(usize, SVec)> = gens.iter().enumerate().map(|(gi, &g)| (gi, vec![(g, field.one())])).collect();
    let unit = hc.assemble(&unit_vals);
    let dga = Dga::new(format!("End({})", m.name), space, hc.complex.d.clone(), mu, unit)?;
    Ok((dga, hc))
}

/// Right action of `End_L(M)` on `Hom_L(M, N)` by precomposition.
pub fn hom_module(end: &(Dga, HomComplex), n: &LComplex) -> Result<(DgModule, HomComplex), DgaError> {
    let (a, ehc) = end;
    let hc = hom_complex(&ehc.source, n)?;
    let space = hc.complex.space.clone();
    let field = n.ring.field;
    let gens = ehc.source.generators().expect("free");
    let mut action = MultiMap::zero("act", vec![space.clone(), a.space.clone()], space.clone(), 0);
    for f in 0..space.dim() {
        for e in 0..a.space.dim() {
            let mut values = Vec::new();
            for (gi, &g) in gens.iter().enumerate() {
                let eg = ehc.apply(&vec![(e, field.one())], &vec![(g, field.one())]);
                values.push((gi, hc.apply(&vec![(f, field.one())], &eg)));
            }
            action.set(vec![f, e], hc.assemble(&values))?;
        }
    }
    let m = DgModule {
        name: format!("Hom({},{})", ehc.source.name, n.name),
        space,
        d: hc.complex.d.clone(),
        action,
        algebra: Arc::new(a.clone()),
    };
    Ok((m, hc))
}

/// The 2-periodic complete resolution of `k` over `k[z]/z^n`, encoded over the
/// even Laurent variable: generators `g0` (degree 0) and `g1` (degree 1), with
/// `d(g0) = -z^{n-1} g1` and `d(g1) = z g0`.
pub fn complete_resolution(field: Field, n: usize) -> Result<LComplex, DgaError> {
    if n < 2 {
        return Err(DgaError::Parameters(format!("height must be at least 2, got {n}")));
    }
    let ring = TruncPoly { field, n };
    let gens = vec![("g0".to_string(), 0), ("g1".to_string(), 1)];
    let dgen = vec![vec![(1, n - 1, -field.one())], vec![(0, 1, field.one())]];
    LComplex::free("P", ring, Grading::Periodic(2), &gens, &dgen)
}

/// The periodic endomorphism DGA of the complete resolution of `k` over `F_p[z]/z^n`.
pub fn build_truncated_polynomial_example(p: u32, n: usize) -> Result<Dga, DgaError> {
    let field = Field::prime(p).map_err(|e| DgaError::Parameters(e.to_string()))?;
    build_truncated_polynomial_example_over(field, n)
}

/// The same endomorphism DGA over an arbitrary field.
pub fn build_truncated_polynomial_example_over(field: Field, n: usize) -> Result<Dga, DgaError> {
    let pr = complete_resolution(field, n)?;
    Ok(endomorphism_dga(&pr)?.0)
}

/// A module over `k[z]/z^n` concentrated in degree 0 with basis `1, z, ..., z^{m-1}`
/// (`m <= n`) and zero differential, in the grading of the resolution.
pub fn truncated_quotient(ring: TruncPoly, m: usize) -> Result<LComplex, DgaError> {
    let basis: Vec<(String, i64)> = (0..m).map(|k| (format!("z{k}"), 0)).collect();
    let space = GradedSpace::new(format!("k[z]/z{m}"), ring.field, Grading::Periodic(2), basis, None)?.shared();
    let mut z = MultiMap::zero("z", vec![space.clone()], space.clone(), 0);
    for k in 0..m.saturating_sub(1) {
        z.set(vec![k], vec![(k + 1, ring.field.one())])?;
    }
    let d = MultiMap::zero("d", vec![space.clone()], space.clone(), -1);
    LComplex::new(format!("k[z]/z{m}"), ring, space, z, d)
}

/// The square-zero extension `S = R[e]/e^2` with `|e| = n-2`, `m_2` the obvious
/// product and `m_n = e * cocycle` on inputs from `R`. The cocycle must be closed.
pub fn build_square_zero_extension(r: &AnAlgebra, n: usize, cocycle: &MultiMap) -> Result<AnAlgebra, DgaError> {
    if n < 3 {
        return Err(DgaError::Parameters("square-zero extensions need n >= 3".into()));
    }
    if r.space.grading() != Grading::Integer || (0..r.space.dim()).any(|i| r.space.degree(i) != 0) {
        return Err(DgaError::Parameters("R must be concentrated in degree 0".into()));
    }
    if cocycle.arity() != n || cocycle.degree() != 0 || !same_space(cocycle.target(), &r.space) {
        return Err(DgaError::Parameters("cocycle must be a degree 0 map R^n -> R".into()));
    }
    let dh = crate::obstruction::hochschild_differential(r, cocycle).map_err(|e| DgaError::Invalid(e.to_string()))?;
    if !dh.is_zero() {
        return Err(DgaError::Invalid("cochain is not a Hochschild cocycle".into()));
    }
    let field = r.field();
    let dr = r.space.dim();
    let mut basis: Vec<(String, i64)> = (0..dr).map(|i| (r.space.name(i).to_string(), 0)).collect();
    basis.extend((0..dr).map(|i| (format!("e{}", r.space.name(i)), n as i64 - 2)));
    let s = GradedSpace::new(format!("{}[e]", r.space.label()), field, Grading::Integer, basis, None)?.shared();
    let m2r = r.op(2).ok_or_else(|| DgaError::Parameters("R has no product".into()))?;
    let prod = |a: usize, b: usize| -> SVec { m2r.eval(&[a, b]).map(|v| v.to_vec()).unwrap_or_default() };
    let shift = |v: SVec| -> SVec { v.into_iter().map(|(i, c)| (i + dr, c)).collect() };
    let m2 = MultiMap::from_fn("m2", vec![s.clone(), s.clone()], s.clone(), 0, |t| {
        let (a, b) = (t[0], t[1]);
        match (a < dr, b < dr) {
            (true, true) => prod(a, b),
            (true, false) => shift(prod(a, b - dr)),
            (false, true) => shift(prod(a - dr, b)),
            (false, false) => Vec::new(),
        }
    })?;
    let mn = MultiMap::from_fn(format!("m{n}"), vec![s.clone(); n], s.clone(), n as i64 - 2, |t| {
        if t.iter().all(|&i| i < dr) {
            shift(cocycle.eval(t).map(|v| v.to_vec()).unwrap_or_default())
        } else {
            Vec::new()
        }
    })?;
    let mut ops = vec![MultiMap::zero("m1", vec![s.clone()], s.clone(), -1), m2];
    for k in 3..n {
        ops.push(MultiMap::zero(format!("m{k}"), vec![s.clone(); k], s.clone(), k as i64 - 2));
    }
    ops.push(mn);
    Ok(AnAlgebra::new(format!("{}[e]", r.name), s, ops, n)?)
}

/// An associative graded algebra with zero differential, as a DGA.
pub fn formal_dga(r: &AnAlgebra, unit: usize) -> Result<Dga, DgaError> {
    let mu = r.op(2).cloned().unwrap_or_else(|| r.zero_op(2)).renamed("mu");
    let d = MultiMap::zero("d", vec![r.space.clone()], r.space.clone(), -1);
    Dga::new(r.name.clone(), r.space.clone(), d, mu, vec![(unit, r.field().one())])
}
