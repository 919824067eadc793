//! Sparse integer matrices (column-major) and dense big-integer matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Column-major sparse matrix over `i64`.
///
/// Each column holds `(row, value)` pairs sorted by row with no explicit zeros.
/// Arithmetic panics on `i64` overflow; entries of boundary, cone and slant
/// matrices stay tiny, and elimination happens elsewhere in checked or
/// arbitrary precision.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(u32, i64)>>,
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix({}x{}, nnz={})", self.rows, self.cols, self.nnz())
    }
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i as u32, 1));
        }
        m
    }

    /// Builds a matrix from `(row, col, value)` triples; duplicates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        let mut data: Vec<Vec<(u32, i64)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            if v != 0 {
                data[c].push((r as u32, v));
            }
        }
        for col in data.iter_mut() {
            normalize_column(col);
        }
        SparseMatrix { rows, cols, data }
    }

    /// Builds a matrix from already sorted, zero-free columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Self {
        let cols = columns.len();
        let mut data = columns;
        for col in data.iter_mut() {
            normalize_column(col);
            if let Some(&(r, _)) = col.last() {
                assert!((r as usize) < rows, "row index {r} outside {rows}");
            }
        }
        SparseMatrix { rows, cols, data }
    }

    pub fn from_dense(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self::from_triplets(rows, cols, (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c, entries[r * cols + c]))))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[(u32, i64)] {
        &self.data[c]
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        match self.data[c].binary_search_by_key(&(r as u32), |e| e.0) {
            Ok(i) => self.data[c][i].1,
            Err(_) => 0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.data.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r as usize, c, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<Vec<(u32, i64)>> = vec![Vec::new(); self.rows];
        for (c, col) in self.data.iter().enumerate() {
            for &(r, v) in col {
                data[r as usize].push((c as u32, v));
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zeros(self.rows, self.cols);
        }
        let data =
            self.data.iter().map(|col| col.iter().map(|&(r, v)| (r, checked(v.checked_mul(k)))).collect()).collect();
        SparseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| merge_columns(a, b, 1)).collect();
        SparseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| merge_columns(a, b, -1)).collect();
        SparseMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut acc = vec![0i64; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        let mut data = Vec::with_capacity(other.cols);
        for ocol in &other.data {
            for &(k, w) in ocol {
                for &(r, v) in &self.data[k as usize] {
                    let slot = &mut acc[r as usize];
                    if *slot == 0 {
                        touched.push(r);
                    }
                    *slot = checked(slot.checked_add(checked(v.checked_mul(w))));
                }
            }
            touched.sort_unstable();
            let mut col = Vec::with_capacity(touched.len());
            for &r in &touched {
                let v = core::mem::take(&mut acc[r as usize]);
                if v != 0 {
                    col.push((r, v));
                }
            }
            touched.clear();
            data.push(col);
        }
        SparseMatrix { rows: self.rows, cols: other.cols, data }
    }

    /// Applies the matrix to a sparse vector given as sorted `(index, value)` pairs.
    pub fn apply(&self, v: &[(u32, i64)]) -> Vec<(u32, i64)> {
        let mut out: Vec<(u32, i64)> = Vec::new();
        for &(c, w) in v {
            for &(r, x) in &self.data[c as usize] {
                out.push((r, checked(x.checked_mul(w))));
            }
        }
        normalize_column(&mut out);
        out
    }

    /// Keeps the listed rows and columns, renumbered in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut row_map = vec![u32::MAX; self.rows];
        for (i, &r) in rows.iter().enumerate() {
            row_map[r] = i as u32;
        }
        let data = cols
            .iter()
            .map(|&c| {
                let mut col: Vec<(u32, i64)> = self.data[c]
                    .iter()
                    .filter_map(|&(r, v)| {
                        let nr = row_map[r as usize];
                        (nr != u32::MAX).then_some((nr, v))
                    })
                    .collect();
                col.sort_unstable_by_key(|e| e.0);
                col
            })
            .collect();
        SparseMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Stacks blocks `[[a, b], [c, d]]`; `None` blocks are zero.
    pub fn block2x2(row_sizes: (usize, usize), col_sizes: (usize, usize), blocks: [Option<&SparseMatrix>; 4]) -> Self {
        let (r0, r1) = row_sizes;
        let (c0, c1) = col_sizes;
        let mut data: Vec<Vec<(u32, i64)>> = vec![Vec::new(); c0 + c1];
        for (bi, block) in blocks.iter().enumerate() {
            let Some(m) = block else { continue };
            let (ro, co, rs, cs) = match bi {
                0 => (0, 0, r0, c0),
                1 => (0, c0, r0, c1),
                2 => (r0, 0, r1, c0),
                _ => (r0, c0, r1, c1),
            };
            assert_eq!((m.rows, m.cols), (rs, cs), "block {bi} has wrong shape");
            for (c, col) in m.data.iter().enumerate() {
                data[co + c].extend(col.iter().map(|&(r, v)| (r + ro as u32, v)));
            }
        }
        for col in data.iter_mut() {
            col.sort_unstable_by_key(|e| e.0);
        }
        SparseMatrix { rows: r0 + r1, cols: c0 + c1, data }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            d[(r, c)] = BigInt::from(v);
        }
        d
    }
}

fn checked(v: Option<i64>) -> i64 {
    v.expect("i64 overflow in sparse matrix arithmetic")
}

fn normalize_column(col: &mut Vec<(u32, i64)>) {
    col.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(col.len());
    for &(r, v) in col.iter() {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 = checked(last.1.checked_add(v)),
            _ => out.push((r, v)),
        }
    }
    out.retain(|e| e.1 != 0);
    *col = out;
}

fn merge_columns(a: &[(u32, i64)], b: &[(u32, i64)], sign: i64) -> Vec<(u32, i64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, sign * b[j].1));
            j += 1;
        } else {
            let v = checked(a[i].1.checked_add(sign * b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row-major dense matrix of big integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        DenseMatrix { rows, cols, data: entries.iter().map(|&v| BigInt::from(v)).collect() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in dense mul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += k * row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// `col[dst] += k * col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[i * self.cols + j];
            *v = -core::mem::take(v);
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = &mut self.data[i * self.cols + j];
            *v = -core::mem::take(v);
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn max_abs_bits(&self) -> u64 {
        self.data.iter().map(|v| v.abs().bits()).max().unwrap_or(0)
    }
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = BigInt;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose_agree_with_dense() {
        let a = SparseMatrix::from_dense(2, 3, &[1, 0, -2, 0, 3, 1]);
        let b = SparseMatrix::from_dense(3, 2, &[2, 1, 0, -1, 1, 0]);
        let p = a.mul(&b);
        assert_eq!(p, SparseMatrix::from_dense(2, 2, &[0, 1, 1, -3]));
        assert_eq!(p.to_dense(), a.to_dense().mul(&b.to_dense()));
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn duplicates_sum_and_cancel() {
        let m = SparseMatrix::from_triplets(2, 2, [(0, 0, 1), (0, 0, -1), (1, 1, 2), (1, 1, 3)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), 5);
    }

    #[test]
    fn bareiss_determinant() {
        let m = DenseMatrix::from_i64(3, 3, &[2, 0, 1, 1, 3, 2, 1, 1, 2]);
        assert_eq!(m.determinant(), BigInt::from(6));
        let h = DenseMatrix::from_i64(2, 2, &[0, 1, 1, 0]);
        assert_eq!(h.determinant(), BigInt::from(-1));
    }
}
