use std::collections::BTreeMap;
use std::fmt;

use super::field::{Field, Scalar};
use crate::error::{Error, Result};

/// Sparse vector over a field, indexed by position `0..len`.
#[derive(Clone, PartialEq, Eq)]
pub struct Vector {
    field: Field,
    len: usize,
    entries: BTreeMap<usize, Scalar>,
}

impl Vector {
    pub fn zeros(field: Field, len: usize) -> Self {
        Vector { field, len, entries: BTreeMap::new() }
    }

    pub fn from_scalars(field: Field, xs: Vec<Scalar>) -> Self {
        let len = xs.len();
        let mut v = Vector::zeros(field, len);
        for (i, x) in xs.into_iter().enumerate() {
            v.set(i, x);
        }
        v
    }

    pub fn from_ints(field: Field, xs: &[i64]) -> Self {
        Vector::from_scalars(field, xs.iter().map(|&x| field.int(x)).collect())
    }

    pub fn unit(field: Field, len: usize, i: usize) -> Self {
        let mut v = Vector::zeros(field, len);
        v.set(i, field.one());
        v
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Scalar {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.entries.get(&i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn set(&mut self, i: usize, x: Scalar) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        if x.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, x);
        }
    }

    /// Nonzero entries in increasing position order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, x)| (*i, x))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_vec(&self) -> Vec<Scalar> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn scale(&self, c: &Scalar) -> Vector {
        let mut out = Vector::zeros(self.field, self.len);
        for (i, x) in self.nonzeros() {
            out.set(i, x * c);
        }
        out
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.len, other.len);
        let mut out = self.clone();
        for (i, x) in other.nonzeros() {
            let s = &out.get(i) + x;
            out.set(i, s);
        }
        out
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.add(&other.scale(&-self.field.one()))
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_vec())
    }
}

#[derive(Clone)]
enum Storage {
    Sparse(Vec<BTreeMap<usize, Scalar>>),
    Dense(Vec<Scalar>),
}

/// Matrix over a field with labelled rows and columns.
///
/// Storage is sparse row maps, switching to a dense array once more than half
/// of the entries are nonzero. Row and column labels are carried along for
/// callers that index by monomial or variable id; all arithmetic is
/// positional.
#[derive(Clone)]
pub struct Matrix {
    field: Field,
    rows: Vec<usize>,
    cols: Vec<usize>,
    storage: Storage,
    nnz: usize,
}

impl Matrix {
    pub fn zeros(field: Field, nrows: usize, ncols: usize) -> Self {
        Matrix::with_labels(field, (0..nrows).collect(), (0..ncols).collect())
    }

    pub fn with_labels(field: Field, rows: Vec<usize>, cols: Vec<usize>) -> Self {
        let storage = Storage::Sparse(vec![BTreeMap::new(); rows.len()]);
        Matrix { field, rows, cols, storage, nnz: 0 }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let mut m = Matrix::zeros(field, rows.len(), ncols);
        for (i, r) in rows.into_iter().enumerate() {
            for (j, x) in r.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn from_ints(field: Field, rows: &[Vec<i64>]) -> Result<Self> {
        Matrix::from_rows(field, rows.iter().map(|r| r.iter().map(|&x| field.int(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, nrows: usize, cols: &[Vector]) -> Self {
        let mut m = Matrix::zeros(field, nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, x) in c.nonzeros() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_labels(&self) -> &[usize] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[usize] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.nrows() && j < self.ncols());
        match &self.storage {
            Storage::Sparse(rows) => rows[i].get(&j).cloned().unwrap_or_else(|| self.field.zero()),
            Storage::Dense(a) => a[i * self.ncols() + j].clone(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        assert!(i < self.nrows() && j < self.ncols());
        assert_eq!(x.field(), self.field, "scalar from wrong field");
        let ncols = self.ncols();
        let was_zero = match &mut self.storage {
            Storage::Sparse(rows) => {
                if x.is_zero() {
                    rows[i].remove(&j).is_none()
                } else {
                    rows[i].insert(j, x.clone()).is_none()
                }
            }
            Storage::Dense(a) => std::mem::replace(&mut a[i * ncols + j], x.clone()).is_zero(),
        };
        match (was_zero, x.is_zero()) {
            (true, false) => self.nnz += 1,
            (false, true) => self.nnz -= 1,
            _ => {}
        }
        self.rebalance();
    }

    fn rebalance(&mut self) {
        let size = self.nrows() * self.ncols();
        let dense_wanted = size > 0 && 2 * self.nnz > size;
        match (&self.storage, dense_wanted) {
            (Storage::Sparse(rows), true) => {
                let mut a = vec![self.field.zero(); size];
                for (i, r) in rows.iter().enumerate() {
                    for (j, x) in r {
                        a[i * self.cols.len() + j] = x.clone();
                    }
                }
                self.storage = Storage::Dense(a);
            }
            (Storage::Dense(a), false) if 4 * self.nnz < size => {
                let n = self.cols.len();
                let mut rows = vec![BTreeMap::new(); self.rows.len()];
                for (k, x) in a.iter().enumerate() {
                    if !x.is_zero() {
                        rows[k / n].insert(k % n, x.clone());
                    }
                }
                self.storage = Storage::Sparse(rows);
            }
            _ => {}
        }
    }

    /// Nonzero entries of row `i` in increasing column order.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, Scalar)> {
        match &self.storage {
            Storage::Sparse(rows) => rows[i].iter().map(|(j, x)| (*j, x.clone())).collect(),
            Storage::Dense(a) => {
                let n = self.ncols();
                (0..n).filter(|&j| !a[i * n + j].is_zero()).map(|j| (j, a[i * n + j].clone())).collect()
            }
        }
    }

    pub fn column(&self, j: usize) -> Vector {
        let mut v = Vector::zeros(self.field, self.nrows());
        for i in 0..self.nrows() {
            v.set(i, self.get(i, j));
        }
        v
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.ncols()).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::with_labels(self.field, self.cols.clone(), self.rows.clone());
        for i in 0..self.nrows() {
            for (j, x) in self.row_entries(i) {
                t.set(j, i, x);
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.ncols() != other.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        let other_rows: Vec<_> = (0..other.nrows()).map(|k| other.row_entries(k)).collect();
        let mut out = Matrix::with_labels(self.field, self.rows.clone(), other.cols.clone());
        for i in 0..self.nrows() {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, a) in self.row_entries(i) {
                for (j, b) in &other_rows[k] {
                    let t = &a * b;
                    let e = acc.entry(*j).or_insert_with(|| self.field.zero());
                    *e = &*e + &t;
                }
            }
            for (j, x) in acc {
                out.set(i, j, x);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if self.ncols() != v.len() {
            return Err(Error::DimensionMismatch(format!("{} columns vs vector of length {}", self.ncols(), v.len())));
        }
        let mut out = Vector::zeros(self.field, self.nrows());
        for i in 0..self.nrows() {
            let mut s = self.field.zero();
            for (j, a) in self.row_entries(i) {
                let x = v.get(j);
                if !x.is_zero() {
                    s = &s + &(&a * &x);
                }
            }
            out.set(i, s);
        }
        Ok(out)
    }
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Matrix) -> bool {
        self.field == other.field
            && self.nrows() == other.nrows()
            && self.ncols() == other.ncols()
            && (0..self.nrows()).all(|i| self.row_entries(i) == other.row_entries(i))
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.nrows(), self.ncols(), self.field)?;
        for i in 0..self.nrows() {
            let row: Vec<String> = (0..self.ncols()).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
