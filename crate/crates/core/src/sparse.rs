//! Column-major sparse square matrices over a [`Scalar`].
//!
//! Columns are kept sorted by row with no explicit zeros, so structural
//! equality (`==`) is matrix equality in exact arithmetic.

use std::io::Write;

use crate::qcalc::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<S> {
    dim: usize,
    cols: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> SparseOperator<S> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, cols: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| S::one()).collect())
    }

    pub fn diagonal(d: Vec<S>) -> Self {
        let dim = d.len();
        let cols = d
            .into_iter()
            .enumerate()
            .map(|(i, v)| if v.is_zero() { Vec::new() } else { vec![(i, v)] })
            .collect();
        Self { dim, cols }
    }

    /// Permutation matrix with a unit entry at `(image(j), j)` for each column `j`.
    pub fn permutation(dim: usize, image: impl Fn(usize) -> usize) -> Self {
        let cols = (0..dim).map(|j| vec![(image(j), S::one())]).collect();
        Self { dim, cols }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, S)>) -> Self {
        let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); dim];
        for (r, c, v) in entries {
            assert!(r < dim && c < dim, "entry ({r},{c}) outside dimension {dim}");
            cols[c].push((r, v));
        }
        let cols = cols.into_iter().map(canonical_column).collect();
        Self { dim, cols }
    }

    /// Build column by column; `f(j)` returns the entries of column `j`.
    pub fn from_columns(dim: usize, f: impl Fn(usize) -> Vec<(usize, S)>) -> Self {
        let cols = (0..dim).map(|j| canonical_column(f(j))).collect();
        Self { dim, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, S)] {
        &self.cols[j]
    }

    pub fn get(&self, row: usize, col: usize) -> S {
        match self.cols[col].binary_search_by_key(&row, |e| e.0) {
            Ok(p) => self.cols[col][p].1.clone(),
            Err(_) => S::zero(),
        }
    }

    /// `(row, col, value)` in (col,row) order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); self.dim];
        for (r, c, v) in self.triplets() {
            cols[r].push((c, v.clone()));
        }
        // rows arrive in increasing column order, already sorted
        Self { dim: self.dim, cols }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zeros(self.dim);
        }
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().map(|(r, v)| (*r, v.clone() * s.clone())).collect())
            .collect();
        Self { dim: self.dim, cols }
    }

    fn combine(&self, other: &Self, sign: S) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let ra = a.get(i).map_or(usize::MAX, |e| e.0);
                    let rb = b.get(j).map_or(usize::MAX, |e| e.0);
                    if ra < rb {
                        out.push(a[i].clone());
                        i += 1;
                    } else if rb < ra {
                        out.push((rb, b[j].1.clone() * sign.clone()));
                        j += 1;
                    } else {
                        let v = a[i].1.clone() + b[j].1.clone() * sign.clone();
                        if !v.is_zero() {
                            out.push((ra, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        Self { dim: self.dim, cols }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -S::one())
    }

    /// Add `s` times the identity.
    pub fn shift(&self, s: &S) -> Self {
        self.add(&Self::identity(self.dim).scale(s))
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut acc: Vec<Option<S>> = vec![None; self.dim];
        let mut touched = Vec::new();
        let cols = other
            .cols
            .iter()
            .map(|bcol| {
                for (k, bv) in bcol {
                    for (r, av) in &self.cols[*k] {
                        let t = av.clone() * bv.clone();
                        match &mut acc[*r] {
                            Some(x) => *x = x.clone() + t,
                            slot @ None => {
                                *slot = Some(t);
                                touched.push(*r);
                            }
                        }
                    }
                }
                touched.sort_unstable();
                let col = touched
                    .drain(..)
                    .filter_map(|r| acc[r].take().filter(|v| !v.is_zero()).map(|v| (r, v)))
                    .collect();
                col
            })
            .collect();
        Self { dim: self.dim, cols }
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Kronecker product `self ⊗ other` with the first factor most significant.
    pub fn kron(&self, other: &Self) -> Self {
        let d = self.dim * other.dim;
        let mut trips = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                trips.push((r1 * other.dim + r2, c1 * other.dim + c2, v1.clone() * v2.clone()));
            }
        }
        Self::from_triplets(d, trips)
    }

    /// `A v` for a column vector `v`.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![S::zero(); self.dim];
        for (c, col) in self.cols.iter().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            for (r, a) in col {
                out[*r] = out[*r].clone() + a.clone() * v[c].clone();
            }
        }
        out
    }

    /// `rᵀ A` for a row vector `r`.
    pub fn apply_left(&self, r: &[S]) -> Vec<S> {
        assert_eq!(r.len(), self.dim);
        self.cols
            .iter()
            .map(|col| {
                col.iter()
                    .fold(S::zero(), |acc, (i, a)| acc + r[*i].clone() * a.clone())
            })
            .collect()
    }

    pub fn column_sums(&self) -> Vec<S> {
        self.cols
            .iter()
            .map(|col| col.iter().fold(S::zero(), |acc, (_, v)| acc + v.clone()))
            .collect()
    }

    /// Largest absolute entry, as a double.
    pub fn max_abs(&self) -> f64 {
        self.triplets().map(|(_, _, v)| v.abs().as_f64()).fold(0.0, f64::max)
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// Dense row-major copy, for small test matrices.
    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let mut m = vec![vec![S::zero(); self.dim]; self.dim];
        for (r, c, v) in self.triplets() {
            m[r][c] = v.clone();
        }
        m
    }

    /// Write `row col value` lines, 1-based, sorted by (col,row).
    pub fn dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (r, c, v) in self.triplets() {
            writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
        }
        Ok(())
    }

    /// Map entries into another scalar type.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseOperator<T> {
        SparseOperator::from_columns(self.dim, |j| {
            self.cols[j].iter().map(|(r, v)| (*r, f(v))).collect()
        })
    }
}

fn canonical_column<S: Scalar>(mut col: Vec<(usize, S)>) -> Vec<(usize, S)> {
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, S)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv = lv.clone() + v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}
