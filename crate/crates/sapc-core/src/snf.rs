//! Smith normal form.
//!
//! Large sparse matrices go through unit-pivot elimination first: pivots
//! are ±1 entries picked by a Markowitz-style cost (short column first, then
//! shortest row), which keeps fill-in low on boundary matrices. The pass
//! runs in checked `i64` and restarts in `BigInt` on overflow. Whatever
//! survives (no unit entries left) is handed to a dense big-integer Smith
//! reduction.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::{HashMap, HashSet};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::{DenseMatrix, SparseMatrix};

/// Below this size sparse matrices skip elimination and go straight to the dense path.
pub const DENSE_CUTOFF: usize = 64;

/// Rank and nontrivial invariant factors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFactors {
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
}

impl InvariantFactors {
    pub fn is_unimodular_image(&self) -> bool {
        self.torsion.is_empty()
    }
}

/// Invariant factors of a sparse integer matrix.
pub fn invariant_factors(m: &SparseMatrix) -> InvariantFactors {
    if m.is_zero() {
        return InvariantFactors { rank: 0, torsion: Vec::new() };
    }
    if m.rows() < DENSE_CUTOFF && m.cols() < DENSE_CUTOFF {
        return factors_of_diagonal(smith_diagonal(m.to_dense()));
    }
    let (rank, rest) = match eliminate::<i64>(m) {
        Some(r) => r,
        None => eliminate::<BigInt>(m).expect("big-integer elimination cannot overflow"),
    };
    let mut out = if rest.rows() == 0 || rest.cols() == 0 || rest.is_zero() {
        InvariantFactors { rank: 0, torsion: Vec::new() }
    } else {
        factors_of_diagonal(smith_diagonal(rest))
    };
    out.rank += rank;
    out
}

/// Rank of a sparse integer matrix.
pub fn rank(m: &SparseMatrix) -> usize {
    invariant_factors(m).rank
}

fn factors_of_diagonal(diag: Vec<BigInt>) -> InvariantFactors {
    let rank = diag.len();
    let torsion = diag.into_iter().filter(|d| !d.is_one()).collect();
    InvariantFactors { rank, torsion }
}

trait Coeff: Clone + PartialEq {
    fn from_i64(v: i64) -> Self;
    fn is_nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `a - f * b`, or `None` on overflow.
    fn mul_sub(a: &Self, f: &Self, b: &Self) -> Option<Self>;
    fn mul(a: &Self, b: &Self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Coeff for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn mul_sub(a: &Self, f: &Self, b: &Self) -> Option<Self> {
        a.checked_sub(f.checked_mul(*b)?)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        a.checked_mul(*b)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn mul_sub(a: &Self, f: &Self, b: &Self) -> Option<Self> {
        Some(a - f * b)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        Some(a * b)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Unit-pivot elimination. Returns the number of pivots and the residual block.
fn eliminate<R: Coeff>(m: &SparseMatrix) -> Option<(usize, DenseMatrix)> {
    let nrows = m.rows();
    let ncols = m.cols();
    let mut rows: Vec<HashMap<u32, R>> = vec![HashMap::new(); nrows];
    let mut cols: Vec<HashSet<u32>> = vec![HashSet::new(); ncols];
    for (r, c, v) in m.triplets() {
        rows[r].insert(c as u32, R::from_i64(v));
        cols[c].insert(r as u32);
    }
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> =
        (0..ncols).filter(|&c| !cols[c].is_empty()).map(|c| Reverse((cols[c].len(), c as u32))).collect();
    let mut rank = 0usize;
    let mut touched: Vec<u32> = Vec::new();

    while let Some(Reverse((count, c))) = heap.pop() {
        let cu = c as usize;
        if cols[cu].len() != count || count == 0 {
            continue;
        }
        let mut best: Option<(usize, u32)> = None;
        for &r in cols[cu].iter() {
            if rows[r as usize][&c].is_unit() {
                let len = rows[r as usize].len();
                if best.is_none_or(|(l, br)| (len, r) < (l, br)) {
                    best = Some((len, r));
                }
            }
        }
        // No unit in this column right now; it is revisited if it changes.
        let Some((_, pr)) = best else { continue };
        let pivot_row: Vec<(u32, R)> = rows[pr as usize].iter().map(|(&j, v)| (j, v.clone())).collect();
        let p = rows[pr as usize][&c].clone();
        let others: Vec<u32> = cols[cu].iter().copied().filter(|&r| r != pr).collect();
        for i in others {
            let a = rows[i as usize].get(&c).cloned().expect("column/row index out of sync");
            let f = R::mul(&a, &p)?;
            let row = &mut rows[i as usize];
            for (j, v) in &pivot_row {
                let cur = row.get(j).cloned().unwrap_or_else(|| R::from_i64(0));
                let new = R::mul_sub(&cur, &f, v)?;
                if new.is_nil() {
                    row.remove(j);
                    cols[*j as usize].remove(&i);
                } else {
                    row.insert(*j, new);
                    cols[*j as usize].insert(i);
                }
                touched.push(*j);
            }
        }
        for (j, _) in &pivot_row {
            cols[*j as usize].remove(&pr);
            touched.push(*j);
        }
        rows[pr as usize].clear();
        debug_assert!(cols[cu].is_empty());
        rank += 1;
        touched.sort_unstable();
        touched.dedup();
        for &j in &touched {
            let n = cols[j as usize].len();
            if n > 0 {
                heap.push(Reverse((n, j)));
            }
        }
        touched.clear();
    }

    let live_rows: Vec<usize> = (0..nrows).filter(|&r| !rows[r].is_empty()).collect();
    let live_cols: Vec<usize> = (0..ncols).filter(|&c| !cols[c].is_empty()).collect();
    let mut col_pos = vec![usize::MAX; ncols];
    for (i, &c) in live_cols.iter().enumerate() {
        col_pos[c] = i;
    }
    let mut rest = DenseMatrix::zeros(live_rows.len(), live_cols.len());
    for (i, &r) in live_rows.iter().enumerate() {
        for (&j, v) in rows[r].iter() {
            rest[(i, col_pos[j as usize])] = v.to_big();
        }
    }
    Some((rank, rest))
}

/// Nonzero diagonal of the Smith normal form (positive, divisibility-ordered).
pub fn smith_diagonal(mut a: DenseMatrix) -> Vec<BigInt> {
    let (m, n) = (a.rows(), a.cols());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&a, t) else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                a.add_row_multiple(i, t, &-q);
                if !a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                a.add_col_multiple(j, t, &-q);
                if !a[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = min_abs_in_cross(&a, t);
                a.swap_rows(t, pi);
                a.swap_cols(t, pj);
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[(i, j)] % &a[(t, t)]).is_zero()));
            match bad {
                Some(i) => a.add_row_multiple(t, i, &BigInt::one()),
                None => break,
            }
        }
        diag.push(a[(t, t)].abs());
        t += 1;
    }
    diag
}

fn min_abs_entry(a: &DenseMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.abs() < a[(bi, bj)].abs()) {
                best = Some((i, j));
                if v.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

fn min_abs_in_cross(a: &DenseMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    for i in t..a.rows() {
        if !a[(i, t)].is_zero() && (a[best].is_zero() || a[(i, t)].abs() < a[best].abs()) {
            best = (i, t);
        }
    }
    for j in t..a.cols() {
        if !a[(t, j)].is_zero() && (a[best].is_zero() || a[(t, j)].abs() < a[best].abs()) {
            best = (t, j);
        }
    }
    best
}

/// Smith normal form with unimodular transforms: `u * m * v = s`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub s: DenseMatrix,
    pub u: DenseMatrix,
    pub u_inv: DenseMatrix,
    pub v: DenseMatrix,
    pub v_inv: DenseMatrix,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s[(i, i)].clone()).collect()
    }

    /// Checks `u m v = s`, the inverse pairs and the diagonal shape.
    pub fn verify(&self, m: &DenseMatrix) -> bool {
        let (r, c) = (m.rows(), m.cols());
        if self.u.mul(m).mul(&self.v) != self.s {
            return false;
        }
        if self.u.mul(&self.u_inv) != DenseMatrix::identity(r) || self.v.mul(&self.v_inv) != DenseMatrix::identity(c) {
            return false;
        }
        for i in 0..r {
            for j in 0..c {
                let v = &self.s[(i, j)];
                if i != j && !v.is_zero() {
                    return false;
                }
            }
        }
        let d = self.diagonal();
        d.iter().all(|x| x.is_positive())
            && d.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
            && (self.rank..r.min(c)).all(|i| self.s[(i, i)].is_zero())
    }
}

struct Tracker {
    a: DenseMatrix,
    u: DenseMatrix,
    u_inv: DenseMatrix,
    v: DenseMatrix,
    v_inv: DenseMatrix,
}

impl Tracker {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap_rows(i, j);
            self.u.swap_rows(i, j);
            self.u_inv.swap_cols(i, j);
        }
    }
    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap_cols(i, j);
            self.v.swap_cols(i, j);
            self.v_inv.swap_rows(i, j);
        }
    }
    /// `row[dst] += k row[src]`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_row_multiple(dst, src, k);
        self.u.add_row_multiple(dst, src, k);
        self.u_inv.add_col_multiple(src, dst, &-k);
    }
    /// `col[dst] += k col[src]`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_col_multiple(dst, src, k);
        self.v.add_col_multiple(dst, src, k);
        self.v_inv.add_row_multiple(src, dst, &-k);
    }
    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

/// Smith normal form with transforms of a dense matrix.
pub fn smith_with_transforms(m: &DenseMatrix) -> Smith {
    let (rows, cols) = (m.rows(), m.cols());
    let mut tr = Tracker {
        a: m.clone(),
        u: DenseMatrix::identity(rows),
        u_inv: DenseMatrix::identity(rows),
        v: DenseMatrix::identity(cols),
        v_inv: DenseMatrix::identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&tr.a, t) else { break };
        tr.swap_rows(t, pi);
        tr.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if tr.a[(i, t)].is_zero() {
                    continue;
                }
                let q = tr.a[(i, t)].div_floor(&tr.a[(t, t)]);
                tr.add_row(i, t, &-q);
                dirty |= !tr.a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if tr.a[(t, j)].is_zero() {
                    continue;
                }
                let q = tr.a[(t, j)].div_floor(&tr.a[(t, t)]);
                tr.add_col(j, t, &-q);
                dirty |= !tr.a[(t, j)].is_zero();
            }
            if dirty {
                let (pi, pj) = min_abs_in_cross(&tr.a, t);
                tr.swap_rows(t, pi);
                tr.swap_cols(t, pj);
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&tr.a[(i, j)] % &tr.a[(t, t)]).is_zero()));
            match bad {
                Some(i) => tr.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if tr.a[(t, t)].is_negative() {
            tr.negate_row(t);
        }
        t += 1;
    }
    let smith = Smith { s: tr.a, u: tr.u, u_inv: tr.u_inv, v: tr.v, v_inv: tr.v_inv, rank: t };
    debug_assert!(smith.verify(m), "Smith transforms failed verification");
    smith
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_known_forms() {
        let m = DenseMatrix::from_i64(2, 2, &[2, 4, 6, 8]);
        assert_eq!(smith_diagonal(m.clone()), big(&[2, 4]));
        let s = smith_with_transforms(&m);
        assert!(s.verify(&m));
        let m = DenseMatrix::from_i64(3, 3, &[2, 0, 0, 0, 3, 0, 0, 0, 5]);
        assert_eq!(smith_diagonal(m), big(&[1, 1, 30]));
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        // A 70x70 banded matrix forces the sparse path.
        let n = 70;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2));
            if i + 1 < n {
                t.push((i, i + 1, 1));
            }
        }
        let m = SparseMatrix::from_triplets(n, n, t);
        let f = invariant_factors(&m);
        let d = smith_diagonal(m.to_dense());
        assert_eq!(f.rank, d.len());
        assert_eq!(f.torsion, d.into_iter().filter(|x| !x.is_one()).collect::<Vec<_>>());
    }
}
