//! Unit-pair reduction of a chain complex.
//!
//! Whenever `⟨∂x, y⟩ = ±1` the pair `x, y` spans an acyclic summand after a
//! change of basis, so both generators can be dropped, with
//! `∂x' ← ∂x' - ⟨∂x', y⟩⟨∂x, y⟩ ∂x` for the other cofaces `x'` of `y`. Each
//! step shrinks two adjacent boundary matrices at once, which makes this
//! cheaper than reducing every boundary matrix on its own.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::chain::ChainComplex;
use crate::matrix::SparseMatrix;

/// Residual boundary matrices after reduction, indexed like the input
/// (`boundaries[k]` leaves degree `lo + k`). `None` on `i64` overflow.
pub(crate) fn reduce(c: &ChainComplex) -> Option<Vec<SparseMatrix>> {
    let degrees: Vec<i32> = c.degrees().collect();
    let mut offset = Vec::with_capacity(degrees.len() + 1);
    offset.push(0usize);
    for &n in &degrees {
        offset.push(offset.last().unwrap() + c.rank(n));
    }
    let total = *offset.last().unwrap();
    // Both are short for boundary matrices, so plain vectors beat hashing.
    let mut down: Vec<Vec<(u32, i64)>> = vec![Vec::new(); total];
    let mut up: Vec<Vec<u32>> = vec![Vec::new(); total];
    for (k, &n) in degrees.iter().enumerate().skip(1) {
        let b = c.boundary_ref(n).expect("boundary inside the range");
        for j in 0..b.cols() {
            let x = (offset[k] + j) as u32;
            for &(r, v) in b.col(j) {
                let y = (offset[k - 1] + r as usize) as u32;
                down[x as usize].push((y, v));
                up[y as usize].push(x);
            }
        }
    }
    let mut alive = vec![true; total];
    // Faces with the fewest cofaces first: a face with a single coface is an
    // elementary collapse and causes no fill-in.
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> =
        (0..total).filter(|&y| !up[y].is_empty()).map(|y| Reverse((up[y].len(), y as u32))).collect();
    let mut touched: Vec<u32> = Vec::new();

    while let Some(Reverse((count, y))) = heap.pop() {
        let yu = y as usize;
        if !alive[yu] || up[yu].len() != count || count == 0 {
            continue;
        }
        let mut best: Option<(usize, u32)> = None;
        for &x in &up[yu] {
            let v = entry(&down[x as usize], y);
            if v == 1 || v == -1 {
                let cost = down[x as usize].len();
                if best.is_none_or(|(l, b)| (cost, x) < (l, b)) {
                    best = Some((cost, x));
                }
            }
        }
        let Some((_, x)) = best else { continue };
        let xu = x as usize;
        let u = entry(&down[xu], y);
        let column = core::mem::take(&mut down[xu]);
        let others: Vec<u32> = up[yu].iter().copied().filter(|&w| w != x).collect();
        for w in others {
            let f = entry(&down[w as usize], y).checked_mul(u)?;
            let col = &mut down[w as usize];
            for &(z, v) in &column {
                match col.iter().position(|&(r, _)| r == z) {
                    Some(p) => {
                        let new = col[p].1.checked_sub(f.checked_mul(v)?)?;
                        if new == 0 {
                            col.swap_remove(p);
                            remove(&mut up[z as usize], w);
                        } else {
                            col[p].1 = new;
                        }
                    }
                    None => {
                        col.push((z, f.checked_mul(v)?.checked_neg()?));
                        up[z as usize].push(w);
                    }
                }
            }
        }
        for &(z, _) in &column {
            remove(&mut up[z as usize], x);
            touched.push(z);
        }
        for w in core::mem::take(&mut up[xu]) {
            down[w as usize].retain(|&(r, _)| r != x);
        }
        for (z, _) in core::mem::take(&mut down[yu]) {
            remove(&mut up[z as usize], y);
            touched.push(z);
        }
        debug_assert!(up[yu].is_empty());
        alive[xu] = false;
        alive[yu] = false;
        touched.sort_unstable();
        touched.dedup();
        for &z in &touched {
            let n = up[z as usize].len();
            if alive[z as usize] && n > 0 {
                heap.push(Reverse((n, z)));
            }
        }
        touched.clear();
    }

    let mut position = vec![u32::MAX; total];
    let mut ranks = vec![0usize; degrees.len()];
    for k in 0..degrees.len() {
        for g in offset[k]..offset[k + 1] {
            if alive[g] {
                position[g] = ranks[k] as u32;
                ranks[k] += 1;
            }
        }
    }
    let mut out = Vec::with_capacity(degrees.len());
    for k in 0..degrees.len() {
        let rows = if k == 0 { 0 } else { ranks[k - 1] };
        let columns: Vec<Vec<(u32, i64)>> = (offset[k]..offset[k + 1])
            .filter(|&g| alive[g])
            .map(|g| {
                let mut col: Vec<(u32, i64)> = down[g].iter().map(|&(z, v)| (position[z as usize], v)).collect();
                col.sort_unstable();
                col
            })
            .collect();
        out.push(SparseMatrix::from_columns(rows, columns));
    }
    Some(out)
}

fn entry(col: &[(u32, i64)], row: u32) -> i64 {
    col.iter().find(|&&(r, _)| r == row).map_or(0, |&(_, v)| v)
}

fn remove(set: &mut Vec<u32>, x: u32) {
    if let Some(p) = set.iter().position(|&a| a == x) {
        set.swap_remove(p);
    }
}
