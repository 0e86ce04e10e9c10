//! Exact linear algebra over a [`Field`].
//!
//! Every [`Subspace`] is stored in reduced row-echelon form, so two subspaces
//! are equal exactly when their row matrices are identical.

pub mod gf2;

use thiserror::Error;

use crate::field::{Field, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Vector<F> = Vec<<F as Field>::Elem>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<Vector<F>>,
    pivots: Vec<usize>,
}

/// Reduced row-echelon form of `rows`; returns the spanned subspace and its rank.
pub fn rref<F: Field>(field: &F, ambient: usize, rows: Vec<Vector<F>>) -> Result<(Subspace<F>, usize), LinalgError> {
    for r in &rows {
        check_len(ambient, r.len())?;
    }
    let s = Subspace::from_rows_unchecked(field.clone(), ambient, rows);
    let rank = s.dim();
    Ok((s, rank))
}

/// One solution of `A x = b`, where `a` holds the rows of `A`.
pub fn solve<F: Field>(field: &F, a: &[Vector<F>], b: &[F::Elem]) -> Result<Option<Vector<F>>, LinalgError> {
    check_len(a.len(), b.len())?;
    let ncols = a.first().map_or(0, |r| r.len());
    for r in a {
        check_len(ncols, r.len())?;
    }
    let mut m: Vec<Vector<F>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = eliminate(field, &mut m);
    if pivots.last() == Some(&ncols) {
        return Ok(None);
    }
    let mut x = vec![field.zero(); ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Ok(Some(x))
}

fn check_len(expected: usize, got: usize) -> Result<(), LinalgError> {
    if expected == got {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, got })
    }
}

/// In-place Gauss–Jordan elimination; drops zero rows and returns pivot columns.
fn eliminate<F: Field>(field: &F, m: &mut Vec<Vector<F>>) -> Vec<usize> {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..m.len()).find(|&k| !field.is_zero(&m[k][c])) else {
            continue;
        };
        m.swap(r, k);
        let inv = field.inv(&m[r][c]).expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot_row = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k == r || field.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !field.is_zero(y) {
                    *x = field.sub(x, &field.mul(&f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    pivots
}

impl<F: Field> Subspace<F> {
    pub fn zero(field: F, ambient: usize) -> Self {
        Self {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: F, ambient: usize) -> Self {
        let rows = (0..ambient).map(|i| unit(&field, ambient, i)).collect();
        Self {
            field,
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the given vectors. Panics on length mismatch; see [`rref`] for
    /// the checked variant.
    pub fn span(field: F, ambient: usize, rows: Vec<Vector<F>>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), ambient, "vector length must match ambient dimension");
        }
        Self::from_rows_unchecked(field, ambient, rows)
    }

    /// Span of the unit vectors at the given coordinates.
    pub fn coordinate(field: F, ambient: usize, coords: impl IntoIterator<Item = usize>) -> Self {
        let rows = coords.into_iter().map(|i| unit(&field, ambient, i)).collect();
        Self::from_rows_unchecked(field, ambient, rows)
    }

    fn from_rows_unchecked(field: F, ambient: usize, mut rows: Vec<Vector<F>>) -> Self {
        let pivots = eliminate(&field, &mut rows);
        Self {
            field,
            ambient,
            rows,
            pivots,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vector<F>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_compatible(&self, other: &Self) -> Result<(), LinalgError> {
        self.field.check_same(&other.field)?;
        check_len(self.ambient, other.ambient)
    }

    /// Residual of `v` after elimination against this subspace.
    pub fn reduce(&self, v: &[F::Elem]) -> Result<Vector<F>, LinalgError> {
        check_len(self.ambient, v.len())?;
        let f = &self.field;
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&out[pc]) {
                continue;
            }
            let c = out[pc].clone();
            for (x, y) in out.iter_mut().zip(row) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[F::Elem]) -> Result<bool, LinalgError> {
        Ok(self.reduce(v)?.iter().all(|x| self.field.is_zero(x)))
    }

    /// Coefficients of `v` with respect to the echelon rows, if `v` lies in the span.
    pub fn coordinates(&self, v: &[F::Elem]) -> Result<Option<Vector<F>>, LinalgError> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&pc| v[pc].clone()).collect()))
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_compatible(other)?;
        let rows = self.rows.iter().chain(&other.rows).cloned().collect();
        Ok(Self::from_rows_unchecked(self.field.clone(), self.ambient, rows))
    }

    /// Intersection by Zassenhaus: rows `(u | u)` and `(v | 0)`; the rows whose
    /// left half vanishes carry the intersection on the right.
    pub fn intersect(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_compatible(other)?;
        let n = self.ambient;
        let f = &self.field;
        let mut rows: Vec<Vector<F>> = Vec::with_capacity(self.dim() + other.dim());
        for u in &self.rows {
            let mut r = u.clone();
            r.extend(u.iter().cloned());
            rows.push(r);
        }
        for v in &other.rows {
            let mut r = v.clone();
            r.extend(std::iter::repeat_n(f.zero(), n));
            rows.push(r);
        }
        let pivots = eliminate(f, &mut rows);
        let meet = rows
            .into_iter()
            .zip(pivots)
            .filter(|(_, pc)| *pc >= n)
            .map(|(r, _)| r[n..].to_vec())
            .collect();
        Ok(Self::from_rows_unchecked(f.clone(), n, meet))
    }

    pub fn is_subspace_of(&self, other: &Self) -> Result<bool, LinalgError> {
        self.check_compatible(other)?;
        for r in &self.rows {
            if !other.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn unit<F: Field>(field: &F, n: usize, i: usize) -> Vector<F> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

pub fn add_scaled<F: Field>(field: &F, acc: &mut [F::Elem], c: &F::Elem, v: &[F::Elem]) {
    if field.is_zero(c) {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !field.is_zero(x) {
            *a = field.add(a, &field.mul(c, x));
        }
    }
}

/// An echelon basis that grows one vector at a time.
///
/// Rows are kept in insertion order; each row vanishes on the pivots of the
/// rows before it, so a single forward pass reduces a new vector.
#[derive(Debug, Clone)]
pub struct IncrementalEchelon<F: Field> {
    field: F,
    rows: Vec<(usize, Vector<F>)>,
}

impl<F: Field> IncrementalEchelon<F> {
    pub fn new(field: F) -> Self {
        Self {
            field,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[F::Elem]) -> Vector<F> {
        let f = &self.field;
        let mut out = v.to_vec();
        for (pc, row) in &self.rows {
            if !f.is_zero(&out[*pc]) {
                let c = f.neg(&out[*pc]);
                add_scaled(f, &mut out, &c, row);
            }
        }
        out
    }

    pub fn is_independent(&self, v: &[F::Elem]) -> bool {
        self.reduce(v).iter().any(|x| !self.field.is_zero(x))
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was.
    pub fn insert(&mut self, v: &[F::Elem]) -> bool {
        let r = self.reduce(v);
        let Some(pc) = r.iter().position(|x| !self.field.is_zero(x)) else {
            return false;
        };
        let inv = self.field.inv(&r[pc]).expect("nonzero pivot");
        let r = r.iter().map(|x| self.field.mul(x, &inv)).collect();
        self.rows.push((pc, r));
        true
    }
}
