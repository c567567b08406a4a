use super::field::{Field, Scalar};
use super::matrix::{Matrix, Vector};
use crate::error::{Error, Result};

type Row = Vec<(usize, Scalar)>;

/// `dst += c * src` on sorted sparse rows.
fn axpy(dst: &Row, c: &Scalar, src: &Row) -> Row {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let take_dst = j == src.len() || (i < dst.len() && dst[i].0 < src[j].0);
        let take_src = i == dst.len() || (j < src.len() && src[j].0 < dst[i].0);
        if take_dst {
            out.push(dst[i].clone());
            i += 1;
        } else if take_src {
            out.push((src[j].0, c * &src[j].1));
            j += 1;
        } else {
            let x = &dst[i].1 + &(c * &src[j].1);
            if !x.is_zero() {
                out.push((dst[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Reduced row echelon form with pivots at the smallest column of each row.
struct Rref {
    rows: Vec<Row>,
    pivots: Vec<usize>,
    /// `pivot_row[col]` is the row index owning that pivot column.
    pivot_row: Vec<Option<usize>>,
}

impl Rref {
    fn new(ncols: usize) -> Self {
        Rref { rows: Vec::new(), pivots: Vec::new(), pivot_row: vec![None; ncols] }
    }

    fn reduce(&self, mut r: Row) -> Row {
        let mut k = 0;
        while k < r.len() {
            let (col, x) = (r[k].0, r[k].1.clone());
            match self.pivot_row[col] {
                Some(pr) => {
                    r = axpy(&r, &-&x, &self.rows[pr]);
                    // the pivot column is gone; entries before k are non-pivot columns
                }
                None => k += 1,
            }
        }
        r
    }

    /// Inserts a row, returning whether the rank grew.
    fn insert(&mut self, r: Row) -> bool {
        let r = self.reduce(r);
        let Some((col, lead)) = r.first().cloned() else { return false };
        let inv = lead.inv();
        let r: Row = r.into_iter().map(|(j, x)| (j, &x * &inv)).collect();
        for row in self.rows.iter_mut() {
            if let Ok(pos) = row.binary_search_by_key(&col, |e| e.0) {
                let c = -&row[pos].1;
                *row = axpy(row, &c, &r);
            }
        }
        self.pivot_row[col] = Some(self.rows.len());
        self.pivots.push(col);
        self.rows.push(r);
        true
    }
}

fn matrix_rows(m: &Matrix) -> Vec<Row> {
    (0..m.nrows()).map(|i| m.row_entries(i)).collect()
}

pub fn rank(m: &Matrix) -> usize {
    let mut e = Rref::new(m.ncols());
    matrix_rows(m).into_iter().filter(|r| e.insert(r.clone())).count()
}

/// Solution set of `M x = b`: a particular solution plus a kernel basis.
#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Vector,
    pub kernel: Vec<Vector>,
}

/// Gaussian elimination. Returns `None` when the system is inconsistent.
///
/// The particular solution sets every free variable to zero; the kernel basis
/// has one vector per free column, in increasing column order.
pub fn gauss_solve(m: &Matrix, b: &Vector) -> Result<Option<Solution>> {
    if m.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} rows vs right-hand side of length {}", m.nrows(), b.len())));
    }
    if m.field() != b.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", m.field(), b.field())));
    }
    let f = m.field();
    let n = m.ncols();
    // augmented column n carries b
    let mut e = Rref::new(n + 1);
    for i in 0..m.nrows() {
        let mut r = m.row_entries(i);
        let bi = b.get(i);
        if !bi.is_zero() {
            r.push((n, bi));
        }
        e.insert(r);
    }
    if e.pivot_row[n].is_some() {
        return Ok(None);
    }
    let mut particular = Vector::zeros(f, n);
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        if let Some((_, x)) = row.iter().find(|(j, _)| *j == n) {
            particular.set(p, x.clone());
        }
    }
    let mut kernel = Vec::new();
    for free in (0..n).filter(|&j| e.pivot_row[j].is_none()) {
        let mut v = Vector::unit(f, n, free);
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            if let Ok(pos) = row.binary_search_by_key(&free, |t| t.0) {
                v.set(p, -&row[pos].1);
            }
        }
        kernel.push(v);
    }
    Ok(Some(Solution { particular, kernel }))
}

/// The Gram identities below need `x^T x = 0 => x = 0`, which fails in
/// positive characteristic.
fn require_rationals(m: &Matrix, op: &str) -> Result<()> {
    match m.field() {
        Field::Rationals => Ok(()),
        f => Err(Error::Unsupported(format!("{op} requires the rationals, got {f}"))),
    }
}

/// Decides whether `M x = b` is solvable using only products with the Gram
/// matrix `B = M M^T`.
///
/// `b` lies in the image of `M` iff it lies in the image of `B`, and the image
/// of `B` restricted to the cyclic subspace of `b` is spanned by the Krylov
/// vectors `B b, ..., B^(n+1) b` with `n = min(|I|, |J|)`. All `n + 1` vectors
/// are computed without early stopping.
pub fn gram_solvable(m: &Matrix, b: &Vector) -> Result<bool> {
    require_rationals(m, "gram_solvable")?;
    if m.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} rows vs right-hand side of length {}", m.nrows(), b.len())));
    }
    if b.is_zero() {
        return Ok(true);
    }
    let g = m.mul(&m.transpose())?;
    let n = m.nrows().min(m.ncols());
    let mut krylov = Vec::with_capacity(n + 1);
    let mut cur = b.clone();
    for _ in 0..=n {
        cur = g.mul_vec(&cur)?;
        krylov.push(cur.clone());
    }
    let k = Matrix::from_columns(m.field(), m.nrows(), &krylov);
    Ok(gauss_solve(&k, b)?.is_some())
}

/// Generators of `ker M` assembled from Gram-matrix solves.
///
/// With `C = M^T M`, every unit vector splits as `e_j = k_j + c_j` where
/// `C k_j = 0` and `c_j` is in the image of `C`. The `j`-th column of the
/// result is `k_j`. Since `ker C = ker M` and the image of `C` is a complement
/// of it, the columns span `ker M` and the matrix is the projection onto it.
pub fn kernel_generators(m: &Matrix) -> Result<Matrix> {
    require_rationals(m, "kernel_generators")?;
    let f = m.field();
    let c = m.transpose().mul(m)?;
    let n = m.ncols();
    // unknowns: k (0..n), z (n..2n), c (2n..3n)
    let mut sys = Matrix::zeros(f, 3 * n, 3 * n);
    for i in 0..n {
        for (j, x) in c.row_entries(i) {
            sys.set(i, j, x.clone());
            sys.set(n + i, n + j, x);
        }
        sys.set(n + i, 2 * n + i, -f.one());
        sys.set(2 * n + i, i, f.one());
        sys.set(2 * n + i, 2 * n + i, f.one());
    }
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let rhs = Vector::unit(f, 3 * n, 2 * n + j);
        let sol = gauss_solve(&sys, &rhs)?.expect("ker C and im C are complementary over Q");
        let mut k = Vector::zeros(f, n);
        for i in 0..n {
            k.set(i, sol.particular.get(i));
        }
        cols.push(k);
    }
    Ok(Matrix::from_columns(f, n, &cols))
}

/// Replaces generator columns `N` by `N N^T`, which has the same column space
/// whenever `x^T x` is anisotropic on it (always over the rationals).
pub fn compress_image(n: &Matrix) -> Result<Matrix> {
    require_rationals(n, "compress_image")?;
    n.mul(&n.transpose())
}

/// Solves `M x = b` with `x` constant on each column orbit.
///
/// `orbits` partitions the column positions of `M`. The reduced system
/// `M T y = b` uses the orbit indicator matrix `T`; the returned solution is
/// `T y`.
pub fn orbit_solve(m: &Matrix, b: &Vector, orbits: &[Vec<usize>]) -> Result<Option<Vector>> {
    let f = m.field();
    let mut seen = vec![false; m.ncols()];
    for o in orbits {
        for &j in o {
            if j >= m.ncols() || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidInput("orbits must partition the columns".into()));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidInput("orbits must partition the columns".into()));
    }
    let mut t = Matrix::zeros(f, m.ncols(), orbits.len());
    for (k, o) in orbits.iter().enumerate() {
        for &j in o {
            t.set(j, k, f.one());
        }
    }
    let reduced = m.mul(&t)?;
    match gauss_solve(&reduced, b)? {
        Some(sol) => Ok(Some(t.mul_vec(&sol.particular)?)),
        None => Ok(None),
    }
}

/// Whether `v` lies in the column space of `m`.
pub fn in_column_space(m: &Matrix, v: &Vector) -> Result<bool> {
    Ok(gauss_solve(m, v)?.is_some())
}

/// Column spaces of `a` and `b` coincide.
pub fn same_column_space(a: &Matrix, b: &Matrix) -> Result<bool> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch("different ambient dimension".into()));
    }
    for col in b.columns() {
        if !in_column_space(a, &col)? {
            return Ok(false);
        }
    }
    for col in a.columns() {
        if !in_column_space(b, &col)? {
            return Ok(false);
        }
    }
    Ok(true)
}
