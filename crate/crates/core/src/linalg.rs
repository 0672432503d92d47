//! Exact linear algebra over prime fields.
//!
//! Every matrix and subspace carries its modulus and every binary operation
//! checks it. Subspaces are stored by their reduced row echelon basis, so two
//! subspaces are equal as sets exactly when their bases are equal entrywise;
//! this lets them serve directly as hash keys.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of vectors any enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 20;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut q = 2u64;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// `p^k` as a `u128`, saturating on overflow.
pub fn count_vectors(p: u32, k: usize) -> u128 {
    (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX)
}

pub(crate) fn check_budget(required: u128, budget: u128) -> Result<()> {
    if required > budget {
        Err(Error::BudgetExceeded { required, budget })
    } else {
        Ok(())
    }
}

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    p: u32,
}

impl Field {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        Ok(Field { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        self.pow(a, self.p as u64 - 2)
    }

    /// Reduce a signed integer into `[0, p)`.
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    pub fn check_vector(self, v: &[u32]) -> Result<()> {
        match v.iter().find(|&&x| x >= self.p) {
            Some(&value) => Err(Error::EntryOutOfRange { value, p: self.p }),
            None => Ok(()),
        }
    }

    /// `u + c*w` in place.
    pub fn axpy(self, u: &mut [u32], c: u32, w: &[u32]) {
        if c == 0 {
            return;
        }
        for (x, &y) in u.iter_mut().zip(w) {
            *x = self.add(*x, self.mul(c, y));
        }
    }

    pub fn add_vec(self, u: &[u32], w: &[u32]) -> Vec<u32> {
        u.iter().zip(w).map(|(&a, &b)| self.add(a, b)).collect()
    }

    pub fn scale_vec(self, c: u32, u: &[u32]) -> Vec<u32> {
        u.iter().map(|&a| self.mul(c, a)).collect()
    }
}

/// Dense row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix[F_{}; {}x{}]", self.field.p, self.rows, self.cols)?;
        let rows: Vec<&[u32]> = (0..self.rows).map(|r| self.row(r)).collect();
        write!(f, "{:?}", rows)
    }
}

impl FpMatrix {
    pub fn new(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        let field = Field::new(p)?;
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        field.check_vector(&data)?;
        Ok(FpMatrix { field, rows, cols, data })
    }

    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row of length {} in a matrix with {} columns",
                bad.len(),
                cols
            )));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(p, rows.len(), cols, data)
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FpMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, &x) in col.iter().enumerate() {
                m.set(r, c, x);
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.field.p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.p);
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_same_field(&self, other: &FpMatrix) {
        assert_eq!(self.field, other.field, "matrices over different prime fields");
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        self.check_same_field(other);
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let p = self.field.p as u64;
        let mut out = vec![0u32; self.rows * other.cols];
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                for (slot, &b) in acc.iter_mut().zip(orow) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (c, &a) in acc.iter().enumerate() {
                out[r * other.cols + c] = a as u32;
            }
        }
        FpMatrix { field: self.field, rows: self.rows, cols: other.cols, data: out }
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length");
        let p = self.field.p as u64;
        (0..self.rows)
            .map(|r| {
                let s = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                s as u32
            })
            .collect()
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        self.check_same_field(other);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape");
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        FpMatrix { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        self.check_same_field(other);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape");
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        FpMatrix { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.mul(c, a)).collect();
        FpMatrix { field: f, rows: self.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &FpMatrix) -> FpMatrix {
        self.check_same_field(other);
        let mut m = Self::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                m.set(self.rows + r, self.cols + c, other.get(r, c));
            }
        }
        m
    }

    pub fn hstack(&self, other: &FpMatrix) -> FpMatrix {
        self.check_same_field(other);
        assert_eq!(self.rows, other.rows, "row counts differ");
        let mut m = Self::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c));
            }
        }
        m
    }

    pub fn vstack(&self, other: &FpMatrix) -> FpMatrix {
        self.check_same_field(other);
        assert_eq!(self.cols, other.cols, "column counts differ");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FpMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// In-place Gauss-Jordan elimination; returns the pivot columns.
    fn reduce_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..self.cols {
                    self.data.swap(pr * self.cols + k, r * self.cols + k);
                }
            }
            let inv = f.inv(self.get(r, c));
            for k in c..self.cols {
                let v = f.mul(self.get(r, k), inv);
                self.set(r, k, v);
            }
            let pivot_row: Vec<u32> = self.row(r).to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor != 0 {
                    let neg = f.neg(factor);
                    let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
                    f.axpy(row, neg, &pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Canonical reduced row echelon form (same shape, zero rows last) and rank.
    pub fn rref(&self) -> (FpMatrix, usize) {
        let mut m = self.clone();
        let pivots = m.reduce_in_place();
        (m, pivots.len())
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// `{x : self * x = 0}`.
    pub fn kernel(&self) -> Subspace {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.reduce_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut vectors = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut x = vec![0u32; self.cols];
            x[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = f.neg(m.get(r, free));
            }
            vectors.push(x);
        }
        Subspace::from_vectors_unchecked(f, self.cols, vectors)
    }

    pub fn column_space(&self) -> Subspace {
        self.transpose().row_space()
    }

    pub fn row_space(&self) -> Subspace {
        let (r, rank) = self.rref();
        let data = r.data[..rank * self.cols].to_vec();
        Subspace { basis: FpMatrix { field: self.field, rows: rank, cols: self.cols, data } }
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&FpMatrix::identity(self.field, n));
        let (r, _) = aug.rref();
        for i in 0..n {
            for j in 0..n {
                if r.get(i, j) != u32::from(i == j) {
                    return None;
                }
            }
        }
        let mut inv = FpMatrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// Restriction of a square matrix to the invariant subspace spanned by the
    /// columns of `basis` (ambient x k), expressed in that basis.
    pub fn restrict_to(&self, basis: &FpMatrix) -> Option<FpMatrix> {
        let k = basis.cols;
        let image = self.mul(basis);
        // Solve basis * X = image column by column.
        let aug = basis.hstack(&image);
        let (r, rank) = aug.rref();
        if rank != k {
            return None;
        }
        for i in 0..k {
            for j in 0..k {
                if r.get(i, j) != u32::from(i == j) {
                    return None;
                }
            }
        }
        for i in k..r.rows {
            if r.row(i).iter().any(|&x| x != 0) {
                return None;
            }
        }
        let mut out = FpMatrix::zeros(self.field, k, k);
        for i in 0..k {
            for j in 0..k {
                out.set(i, j, r.get(i, k + j));
            }
        }
        Some(out)
    }
}

/// A subspace of `F_p^ambient`, stored by its canonical RREF basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    basis: FpMatrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace[F_{}^{}; dim {}]", self.p(), self.ambient(), self.dim())?;
        let rows: Vec<&[u32]> = self.basis.row_vectors().collect();
        write!(f, "{:?}", rows)
    }
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace { basis: FpMatrix::zeros(field, 0, ambient) }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace { basis: FpMatrix::identity(field, ambient) }
    }

    pub(crate) fn from_vectors_unchecked(field: Field, ambient: usize, vectors: Vec<Vec<u32>>) -> Self {
        let rows = vectors.len();
        let data: Vec<u32> = vectors.into_iter().flatten().collect();
        FpMatrix { field, rows, cols: ambient, data }.row_space()
    }

    /// Smallest subspace containing `vectors`.
    pub fn span(field: Field, ambient: usize, vectors: &[Vec<u32>]) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::Dimension(format!(
                    "vector of length {} in ambient dimension {}",
                    v.len(),
                    ambient
                )));
            }
            field.check_vector(v)?;
        }
        Ok(Self::from_vectors_unchecked(field, ambient, vectors.to_vec()))
    }

    pub fn field(&self) -> Field {
        self.basis.field
    }

    pub fn p(&self) -> u32 {
        self.basis.field.p
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rows == 0
    }

    pub fn is_full(&self) -> bool {
        self.basis.rows == self.basis.cols
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<u32>> {
        self.basis.row_vectors().map(|r| r.to_vec()).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .row_vectors()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero basis row"))
            .collect()
    }

    /// Coordinates not used as pivots; their unit vectors span a complement.
    pub fn complement_coords(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient()];
        for c in self.pivots() {
            is_pivot[c] = true;
        }
        (0..self.ambient()).filter(|&c| !is_pivot[c]).collect()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.p() != other.p() {
            return Err(Error::FieldMismatch { left: self.p(), right: other.p() });
        }
        if self.ambient() != other.ambient() {
            return Err(Error::Dimension(format!(
                "ambient {} vs {}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    /// Canonical representative of `v` modulo this subspace (pivot entries cleared).
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.ambient(), "vector length");
        let f = self.field();
        let mut x = v.to_vec();
        for (row, pc) in self.basis.row_vectors().zip(self.pivots()) {
            let c = x[pc];
            if c != 0 {
                f.axpy(&mut x, f.neg(c), row);
            }
        }
        x
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.ambient() && self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.p() == other.p()
            && self.ambient() == other.ambient()
            && self.basis.row_vectors().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(self.basis.vstack(&other.basis).row_space())
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.field(), self.ambient()));
        }
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        // (x, y) with x*U + y*W = 0 gives x*U in the intersection.
        let stacked = self.basis.vstack(&other.basis);
        let relations = stacked.transpose().kernel();
        let a = self.dim();
        let f = self.field();
        let vectors = relations
            .basis
            .row_vectors()
            .map(|rel| {
                let mut v = vec![0u32; self.ambient()];
                for (i, &c) in rel[..a].iter().enumerate() {
                    f.axpy(&mut v, c, self.basis.row(i));
                }
                v
            })
            .collect();
        Ok(Subspace::from_vectors_unchecked(f, self.ambient(), vectors))
    }

    /// Whether the intersection is nonzero, without materialising it.
    pub fn meets(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(false);
        }
        let joint = self.basis.vstack(&other.basis).rank();
        Ok(joint < self.dim() + other.dim())
    }

    /// Image under a linear map acting on column vectors.
    pub fn image(&self, map: &FpMatrix) -> Subspace {
        assert_eq!(map.cols(), self.ambient(), "map domain");
        assert_eq!(map.field(), self.field(), "map field");
        let vectors = self.basis.row_vectors().map(|r| map.mul_vec(r)).collect();
        Subspace::from_vectors_unchecked(self.field(), map.rows(), vectors)
    }

    /// Matrix with the basis vectors as columns (ambient x dim).
    pub fn basis_columns(&self) -> FpMatrix {
        self.basis.transpose()
    }

    /// All `p^dim` vectors, each exactly once.
    pub fn enumerate(&self, budget: u128) -> Result<Vec<Vec<u32>>> {
        check_budget(count_vectors(self.p(), self.dim()), budget)?;
        let f = self.field();
        let coeffs = VectorIter::new(f, self.dim());
        Ok(coeffs
            .map(|c| {
                let mut v = vec![0u32; self.ambient()];
                for (i, &ci) in c.iter().enumerate() {
                    f.axpy(&mut v, ci, self.basis.row(i));
                }
                v
            })
            .collect())
    }

    /// One normalized vector (first nonzero coefficient 1) per line of the subspace.
    pub fn projective_points(&self, budget: u128) -> Result<Vec<Vec<u32>>> {
        let k = self.dim();
        let count = (count_vectors(self.p(), k).saturating_sub(1)) / (self.p() as u128 - 1);
        check_budget(count, budget)?;
        let f = self.field();
        let mut out = Vec::with_capacity(count as usize);
        for lead in 0..k {
            let tail = k - lead - 1;
            for c in VectorIter::new(f, tail) {
                let mut v = self.basis.row(lead).to_vec();
                for (j, &cj) in c.iter().enumerate() {
                    f.axpy(&mut v, cj, self.basis.row(lead + 1 + j));
                }
                out.push(v);
            }
        }
        Ok(out)
    }
}

/// Odometer over all vectors of `F_p^len`, first coordinate fastest.
pub struct VectorIter {
    field: Field,
    current: Option<Vec<u32>>,
}

impl VectorIter {
    pub fn new(field: Field, len: usize) -> Self {
        VectorIter { field, current: Some(vec![0; len]) }
    }
}

impl Iterator for VectorIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut carried = true;
        for x in next.iter_mut() {
            *x += 1;
            if *x == self.field.p {
                *x = 0;
            } else {
                carried = false;
                break;
            }
        }
        if !carried {
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Position of a vector in `VectorIter` order.
pub fn vector_index(p: u32, v: &[u32]) -> u64 {
    v.iter().rev().fold(0u64, |acc, &x| acc * p as u64 + x as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    fn brute_span(p: u32, vectors: &[Vec<u32>], ambient: usize) -> std::collections::BTreeSet<Vec<u32>> {
        let field = f(p);
        VectorIter::new(field, vectors.len())
            .map(|c| {
                let mut v = vec![0; ambient];
                for (ci, w) in c.iter().zip(vectors) {
                    field.axpy(&mut v, *ci, w);
                }
                v
            })
            .collect()
    }

    #[test]
    fn non_prime_rejected() {
        assert_eq!(FpMatrix::new(4, 1, 1, vec![0]).unwrap_err(), Error::NonPrime(4));
        assert!(Field::new(1).is_err());
        assert!(Field::new(7).is_ok());
    }

    #[test]
    fn entries_must_be_reduced() {
        assert!(matches!(
            FpMatrix::new(3, 1, 2, vec![1, 3]),
            Err(Error::EntryOutOfRange { value: 3, p: 3 })
        ));
    }

    #[test]
    fn rref_examples() {
        let id = FpMatrix::identity(f(2), 3);
        assert_eq!(id.rref(), (id.clone(), 3));

        let m = FpMatrix::from_rows(3, 2, &[vec![2, 1], vec![1, 2]]).unwrap();
        let expected = FpMatrix::from_rows(3, 2, &[vec![1, 2], vec![0, 0]]).unwrap();
        assert_eq!(m.rref(), (expected, 1));
        // Row space {(0,0),(1,2),(2,1)} by enumeration.
        let space = brute_span(3, &[vec![2, 1], vec![1, 2]], 2);
        assert_eq!(space.len(), 3);
        assert!(space.contains(&vec![1, 2]) && space.contains(&vec![2, 1]));

        let z = FpMatrix::zeros(f(5), 2, 4);
        assert_eq!(z.rref(), (z.clone(), 0));
    }

    #[test]
    fn kernel_examples() {
        assert!(FpMatrix::identity(f(3), 3).kernel().is_zero());
        let k = FpMatrix::from_rows(2, 2, &[vec![1, 1]]).unwrap().kernel();
        assert_eq!(k, Subspace::span(f(2), 2, &[vec![1, 1]]).unwrap());
        assert_eq!(k.dim(), 1);
        assert!(FpMatrix::zeros(f(2), 2, 3).kernel().is_full());
    }

    #[test]
    fn span_examples() {
        let s = Subspace::span(f(3), 2, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(s.basis_vectors(), vec![vec![1, 1]]);
        assert!(Subspace::span(f(3), 2, &[]).unwrap().is_zero());
        assert!(Subspace::span(f(2), 2, &[vec![1, 0], vec![0, 1]]).unwrap().is_full());
        assert!(Subspace::span(f(2), 2, &[vec![1, 0], vec![0, 1, 1]]).is_err());
    }

    #[test]
    fn sum_and_intersect_examples() {
        let u = Subspace::span(f(2), 2, &[vec![1, 0]]).unwrap();
        let w = Subspace::span(f(2), 2, &[vec![0, 1]]).unwrap();
        assert!(u.sum(&w).unwrap().is_full());
        assert!(u.intersect(&w).unwrap().is_zero());
        assert_eq!(u.sum(&u).unwrap(), u);
        assert_eq!(u.intersect(&u).unwrap(), u);

        let u = Subspace::span(f(2), 3, &[vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        let w = Subspace::span(f(2), 3, &[vec![1, 1, 1]]).unwrap();
        let both: std::collections::BTreeSet<_> = brute_span(2, &u.basis_vectors(), 3)
            .intersection(&brute_span(2, &w.basis_vectors(), 3))
            .cloned()
            .collect();
        assert_eq!(both.len(), 2);
        assert_eq!(u.intersect(&w).unwrap(), w);
    }

    #[test]
    fn ambient_mismatch_rejected() {
        let u = Subspace::zero(f(2), 2);
        let w = Subspace::zero(f(2), 3);
        assert!(u.sum(&w).is_err());
        assert!(u.intersect(&w).is_err());
        let x = Subspace::zero(f(3), 2);
        assert!(matches!(u.sum(&x), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn membership_and_enumeration() {
        assert!(Subspace::zero(f(3), 2).contains(&[0, 0]));
        let s = Subspace::span(f(3), 2, &[vec![1, 2]]).unwrap();
        let mut all = s.enumerate(DEFAULT_ENUMERATION_BUDGET).unwrap();
        all.sort();
        assert_eq!(all, vec![vec![0, 0], vec![1, 2], vec![2, 1]]);
        let a = Subspace::span(f(3), 2, &[vec![1, 1]]).unwrap();
        let b = Subspace::span(f(3), 2, &[vec![2, 2]]).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            Subspace::full(f(3), 4).enumerate(10),
            Err(Error::BudgetExceeded { required: 81, budget: 10 })
        ));
    }

    #[test]
    fn projective_points_count() {
        let s = Subspace::full(f(3), 3);
        let pts = s.projective_points(1000).unwrap();
        assert_eq!(pts.len(), 13);
        let lines: std::collections::BTreeSet<_> = pts
            .iter()
            .map(|v| Subspace::span(f(3), 3, std::slice::from_ref(v)).unwrap())
            .collect();
        assert_eq!(lines.len(), 13);
    }

    #[test]
    fn inverse_and_restriction() {
        let m = FpMatrix::from_rows(5, 2, &[vec![1, 2], vec![3, 4]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), FpMatrix::identity(f(5), 2));
        let singular = FpMatrix::from_rows(5, 2, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(singular.inverse().is_none());

        // Upper triangular map preserves span{e0}.
        let t = FpMatrix::from_rows(5, 2, &[vec![2, 1], vec![0, 3]]).unwrap();
        let basis = FpMatrix::from_columns(f(5), 2, &[vec![1, 0]]);
        assert_eq!(t.restrict_to(&basis).unwrap().data(), &[2]);
        let bad = FpMatrix::from_columns(f(5), 2, &[vec![0, 1]]);
        assert!(t.restrict_to(&bad).is_none());
    }

    #[test]
    fn vector_index_matches_iteration_order() {
        for (i, v) in VectorIter::new(f(3), 3).enumerate() {
            assert_eq!(vector_index(3, &v), i as u64);
        }
    }
}
