//! Exact sparse linear algebra: column reduction with tracked preimages.
//!
//! Columns are processed in increasing index order and every reduction pivots on the
//! lowest nonzero row index, so all outputs are reproducible bit for bit.

use crate::field::{Field, Scalar};

/// A sparse vector: strictly increasing indices, no stored zeros.
pub type SVec = Vec<(usize, Scalar)>;

/// `y + a x` for sparse vectors.
pub fn axpy(y: &SVec, a: &Scalar, x: &SVec) -> SVec {
    if a.is_zero() {
        return y.clone();
    }
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        if j == x.len() || (i < y.len() && y[i].0 < x[j].0) {
            out.push(y[i].clone());
            i += 1;
        } else if i == y.len() || x[j].0 < y[i].0 {
            out.push((x[j].0, a * &x[j].1));
            j += 1;
        } else {
            let v = &y[i].1 + &(a * &x[j].1);
            if !v.is_zero() {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(x: &SVec, a: &Scalar) -> SVec {
    if a.is_zero() {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, a * v)).collect()
}

/// Builds a sparse vector from unsorted (index, value) pairs, summing duplicates.
pub fn from_pairs(mut pairs: Vec<(usize, Scalar)>) -> SVec {
    pairs.sort_by_key(|(i, _)| *i);
    let mut out: SVec = Vec::with_capacity(pairs.len());
    for (i, v) in pairs {
        match out.last_mut() {
            Some((j, w)) if *j == i => *w += &v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

pub fn get(x: &SVec, i: usize) -> Option<&Scalar> {
    x.binary_search_by_key(&i, |(j, _)| *j).ok().map(|k| &x[k].1)
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub cols: Vec<SVec>,
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, cols: vec![Vec::new(); ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn from_dense(field: Field, rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); ncols];
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                let s = field.from_i64(v);
                if !s.is_zero() {
                    cols[j].push((i, s));
                }
            }
        }
        SparseMatrix { nrows, cols }
    }

    pub fn mul_vec(&self, x: &SVec) -> SVec {
        match x.len() {
            0 => Vec::new(),
            1 => scale(&self.cols[x[0].0], &x[0].1),
            _ => from_pairs(x.iter().flat_map(|(j, a)| self.cols[*j].iter().map(move |(i, v)| (*i, a * v))).collect()),
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        use rayon::prelude::*;
        assert_eq!(self.ncols(), other.nrows, "matrix shapes do not compose");
        SparseMatrix { nrows: self.nrows, cols: other.cols.par_iter().map(|c| self.mul_vec(c)).collect() }
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: &Scalar, other: &SparseMatrix) -> SparseMatrix {
        assert!(self.nrows == other.nrows && self.ncols() == other.ncols(), "matrix shapes differ");
        SparseMatrix { nrows: self.nrows, cols: self.cols.iter().zip(&other.cols).map(|(x, y)| axpy(x, a, y)).collect() }
    }

    pub fn scaled(&self, a: &Scalar) -> SparseMatrix {
        SparseMatrix { nrows: self.nrows, cols: self.cols.iter().map(|c| scale(c, a)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }
}

#[derive(Clone, Debug)]
struct Pivot {
    image: SVec,
    preimage: SVec,
}

/// Incremental column reduction of a linear map given column by column.
///
/// For every accepted pivot the reducer remembers a preimage, which makes membership
/// tests, preimage computation and kernel extraction all exact and deterministic.
#[derive(Clone, Debug)]
pub struct ColumnReducer {
    field: Field,
    pivots: std::collections::BTreeMap<usize, Pivot>,
    kernel: Vec<SVec>,
    ncols: usize,
}

impl ColumnReducer {
    pub fn new(field: Field) -> Self {
        ColumnReducer { field, pivots: Default::default(), kernel: Vec::new(), ncols: 0 }
    }

    pub fn from_matrix(field: Field, m: &SparseMatrix) -> Self {
        let mut r = Self::new(field);
        for c in &m.cols {
            r.push_column(c.clone());
        }
        r
    }

    /// Reduces `v` against the pivots. Returns the remainder together with the
    /// combination `c` of pushed columns such that `v = T c + remainder`.
    pub fn reduce(&self, v: &SVec) -> (SVec, SVec) {
        let mut v = v.clone();
        let mut c: SVec = Vec::new();
        while let Some((lead, a)) = v.first().cloned() {
            match self.pivots.get(&lead) {
                Some(p) => {
                    let lam = &a * &p.image[0].1.inv().expect("pivot is nonzero");
                    v = axpy(&v, &-&lam, &p.image);
                    c = axpy(&c, &lam, &p.preimage);
                }
                None => break,
            }
        }
        (v, c)
    }

    /// Fully reduced remainder: eliminates every entry that has a pivot, not only the lead.
    pub fn normal_form(&self, v: &SVec) -> SVec {
        let mut v = v.clone();
        let mut pos = 0;
        while pos < v.len() {
            let (idx, a) = v[pos].clone();
            match self.pivots.get(&idx) {
                Some(p) => {
                    let lam = &a * &p.image[0].1.inv().expect("pivot is nonzero");
                    v = axpy(&v, &-&lam, &p.image);
                }
                None => pos += 1,
            }
        }
        v
    }

    /// Adds the next column; returns its pivot row if it enlarged the image.
    pub fn push_column(&mut self, col: SVec) -> Option<usize> {
        let j = self.ncols;
        self.ncols += 1;
        let (rem, c) = self.reduce(&col);
        let one = self.field.one();
        let pre = axpy(&vec![(j, one.clone())], &-one, &c);
        if rem.is_empty() {
            self.kernel.push(pre);
            None
        } else {
            let lead = rem[0].0;
            self.pivots.insert(lead, Pivot { image: rem, preimage: pre });
            Some(lead)
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn kernel(&self) -> &[SVec] {
        &self.kernel
    }

    /// A preimage of `b`, if `b` is in the image.
    pub fn preimage(&self, b: &SVec) -> Option<SVec> {
        let (rem, c) = self.reduce(b);
        if rem.is_empty() {
            Some(c)
        } else {
            None
        }
    }

    /// Pivots as (lead row, image vector, preimage combination) in lead order.
    pub fn pivots(&self) -> impl Iterator<Item = (usize, &SVec, &SVec)> {
        self.pivots.iter().map(|(k, p)| (*k, &p.image, &p.preimage))
    }
}

/// Result of [`solve_linear`].
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub particular: Option<SVec>,
    pub kernel: Vec<SVec>,
}

/// Solves `A x = b`: a particular solution when one exists and a kernel basis.
pub fn solve_linear(field: Field, a: &SparseMatrix, b: &SVec) -> LinearSolution {
    let red = ColumnReducer::from_matrix(field, a);
    LinearSolution { particular: red.preimage(b), kernel: red.kernel().to_vec() }
}

pub fn rank(field: Field, a: &SparseMatrix) -> usize {
    ColumnReducer::from_matrix(field, a).rank()
}
