//! Z/2-equivariant chain machinery: the periodic resolution W, homotopy
//! fixed points and orbits in degree windows, the norm map, and Steenrod's
//! cup-i diagonals on ordered simplicial chains.
//!
//! Conventions. `T(a ⊗ b) = (-1)^{|a||b|} b ⊗ a`. `N_s = 1 + (-1)^s T`, so
//! `W_s → W_{s-1}` is `1 - T` for odd `s` and `1 + T` for even `s`. A
//! homotopy-fixed element of degree `m` is a list `φ_s ∈ D_{m+s}` with
//! `(dφ)_s = (-1)^s (∂φ_s - N_s φ_{s-1})`; it is a cycle iff
//! `∂φ_0 = 0` and `∂φ_s = φ_{s-1} + (-1)^s T φ_{s-1}`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::chain::{ChainComplex, ChainError, ChainMap, TensorLayout};
use crate::matrix::SparseMatrix;
use crate::simplicial::{OrientedManifoldComplex, SimplicialComplex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivariantError {
    /// The involution does not square to the identity.
    NotAnInvolution,
    /// Window bounds leave the requested degree without neighbours.
    UnboundedComplex,
    RelationFailed {
        s: usize,
    },
    Chain(ChainError),
}

impl fmt::Display for EquivariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivariantError::NotAnInvolution => write!(f, "involution does not square to the identity"),
            EquivariantError::UnboundedComplex => write!(f, "complex is not bounded in the needed direction"),
            EquivariantError::RelationFailed { s } => write!(f, "structure relation fails at component {s}"),
            EquivariantError::Chain(e) => write!(f, "{e}"),
        }
    }
}

impl From<ChainError> for EquivariantError {
    fn from(e: ChainError) -> Self {
        EquivariantError::Chain(e)
    }
}

/// Generator `a ⊗ b` with `a ∈ C_p`, `b ∈ D_q`.
pub type TensorKey = (i32, u32, i32, u32);

/// Sparse element of `C ⊗ D`, possibly inhomogeneous.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorChain {
    terms: BTreeMap<TensorKey, i64>,
}

impl TensorChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (TensorKey, i64)>>(it: I) -> Self {
        let mut t = Self::new();
        for (k, v) in it {
            t.add_term(k, v);
        }
        t
    }

    pub fn add_term(&mut self, key: TensorKey, v: i64) {
        if v == 0 {
            return;
        }
        let e = self.terms.entry(key).or_insert(0);
        *e = e.checked_add(v).expect("tensor chain coefficient overflow");
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TensorKey, &i64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &TensorKey) -> i64 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, &v) in &other.terms {
            out.add_term(k, v);
        }
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(&key, &v)| (key, v * k)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    /// Total degrees present.
    pub fn degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.terms.keys().map(|k| k.0 + k.2).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Part of total degree `n`.
    pub fn homogeneous(&self, n: i32) -> Self {
        Self::from_terms(self.terms.iter().filter(|(k, _)| k.0 + k.2 == n).map(|(&k, &v)| (k, v)))
    }

    /// `∂(a ⊗ b) = ∂a ⊗ b + (-1)^p a ⊗ ∂b`.
    pub fn boundary(&self, c: &ChainComplex, d: &ChainComplex) -> Self {
        let mut out = Self::new();
        for (&(p, a, q, b), &v) in &self.terms {
            if let Some(dc) = c.boundary_ref(p) {
                for &(r, x) in dc.col(a as usize) {
                    out.add_term((p - 1, r, q, b), v * x);
                }
            }
            if let Some(dd) = d.boundary_ref(q) {
                let sign = if p % 2 == 0 { 1 } else { -1 };
                for &(r, x) in dd.col(b as usize) {
                    out.add_term((p, a, q - 1, r), sign * v * x);
                }
            }
        }
        out
    }

    /// `T(a ⊗ b) = (-1)^{pq} b ⊗ a`.
    pub fn swap(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(p, a, q, b), &v)| {
            let sign = if (p * q) % 2 == 0 { 1 } else { -1 };
            ((q, b, p, a), sign * v)
        }))
    }

    /// `N_s = 1 + (-1)^s T`.
    pub fn norm_s(&self, s: usize) -> Self {
        let t = self.swap();
        if s.is_multiple_of(2) {
            self.add(&t)
        } else {
            self.sub(&t)
        }
    }

    /// `(f ⊗ g)` applied termwise (degree-0 maps).
    pub fn map(&self, f: &ChainMap, g: &ChainMap) -> Self {
        let mut out = Self::new();
        for (&(p, a, q, b), &v) in &self.terms {
            let fa = f.component(p);
            let gb = g.component(q);
            for &(r, x) in fa.col(a as usize) {
                for &(t, y) in gb.col(b as usize) {
                    out.add_term((p + f.degree(), r, q + g.degree(), t), v * x * y);
                }
            }
        }
        out
    }

    /// Keeps terms satisfying a predicate.
    pub fn filter<F: FnMut(&TensorKey) -> bool>(&self, mut keep: F) -> Self {
        Self::from_terms(self.terms.iter().filter(|(k, _)| keep(k)).map(|(&k, &v)| (k, v)))
    }

    /// Evaluates `(α ⊗ β)` where `α`, `β` are cochains given by closures.
    pub fn evaluate<A, B>(&self, mut alpha: A, mut beta: B) -> num_bigint::BigInt
    where
        A: FnMut(i32, u32) -> num_bigint::BigInt,
        B: FnMut(i32, u32) -> num_bigint::BigInt,
    {
        let mut acc = num_bigint::BigInt::from(0);
        for (&(p, a, q, b), &v) in &self.terms {
            let x = alpha(p, a);
            if x == num_bigint::BigInt::from(0) {
                continue;
            }
            acc += x * beta(q, b) * v;
        }
        acc
    }

    /// Dense vector in the materialized tensor complex.
    pub fn to_layout(&self, layout: &TensorLayout, n: i32) -> Vec<(u32, i64)> {
        let mut v: Vec<(u32, i64)> = self
            .terms
            .iter()
            .filter(|(k, _)| k.0 + k.2 == n)
            .map(|(&(p, a, q, b), &x)| (layout.index(p, a as usize, q, b as usize) as u32, x))
            .collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }
}

/// `Δ_s` of a single ordered simplex, as `(front, back, sign)` vertex lists.
///
/// Terms are indexed by `U ⊆ {0..n}` with `|U| = n - s`. Writing
/// `U = {u_1 < … < u_{n-s}}`, `U_0` collects the `u_j` with `u_j + j` even
/// and `U_1` the rest; the term is `± d_{U_0} x ⊗ d_{U_1} x`, where `d_A`
/// deletes the vertices at positions in `A`. The sign exponent is
/// `Σ U_0 + n + C(|U_0|, 2) + n |U_1|`. For `s = 0` this is the
/// Alexander–Whitney diagonal.
pub fn cup_i_terms(x: &[u32], s: usize) -> Vec<(Vec<u32>, Vec<u32>, i64)> {
    let n = x.len() - 1;
    if s > n {
        return Vec::new();
    }
    let k = n - s;
    let mut out = Vec::new();
    let mut u: Vec<usize> = (0..k).collect();
    loop {
        let mut in0 = vec![false; n + 1];
        let mut in1 = vec![false; n + 1];
        let (mut sum0, mut c0, mut c1) = (0usize, 0usize, 0usize);
        for (j, &uj) in u.iter().enumerate() {
            if (uj + j + 1) % 2 == 0 {
                in0[uj] = true;
                sum0 += uj;
                c0 += 1;
            } else {
                in1[uj] = true;
                c1 += 1;
            }
        }
        let exp = sum0 + n + c0 * c0.saturating_sub(1) / 2 + n * c1;
        let front: Vec<u32> = (0..=n).filter(|&i| !in0[i]).map(|i| x[i]).collect();
        let back: Vec<u32> = (0..=n).filter(|&i| !in1[i]).map(|i| x[i]).collect();
        out.push((front, back, if exp.is_multiple_of(2) { 1 } else { -1 }));
        // Next k-subset in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if u[i] < n + 1 - (k - i) {
                u[i] += 1;
                for j in i + 1..k {
                    u[j] = u[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return out;
        }
    }
}

/// Cup-i diagonal `Δ_s : C(X) → C(X) ⊗ C(X)` (degree `s`) on sparse chains.
#[derive(Clone, Debug)]
pub struct HigherDiagonal {
    complex: Arc<SimplicialComplex>,
    s: usize,
}

/// Steenrod's `Δ_s` for a vertex-ordered complex.
pub fn higher_diagonal(x: Arc<SimplicialComplex>, s: usize) -> HigherDiagonal {
    HigherDiagonal { complex: x, s }
}

impl HigherDiagonal {
    pub fn s(&self) -> usize {
        self.s
    }

    /// Image of the `i`-th `k`-simplex.
    pub fn on_simplex(&self, k: usize, i: usize) -> TensorChain {
        let x = &self.complex.simplices(k)[i];
        let mut out = TensorChain::new();
        for (front, back, sign) in cup_i_terms(x, self.s) {
            let p = front.len() as i32 - 1;
            let q = back.len() as i32 - 1;
            let a = self.complex.index_of(&front).expect("face of a simplex is a simplex") as u32;
            let b = self.complex.index_of(&back).expect("face of a simplex is a simplex") as u32;
            out.add_term((p, a, q, b), sign);
        }
        out
    }

    /// Image of a sparse chain in degree `k`.
    pub fn apply(&self, k: usize, chain: &[(u32, i64)]) -> TensorChain {
        let mut out = TensorChain::new();
        for &(i, v) in chain {
            for (&key, &c) in self.on_simplex(k, i as usize).terms() {
                out.add_term(key, c * v);
            }
        }
        out
    }

    /// `Δ_0` as a chain map into the materialized `C ⊗ C` (small complexes only).
    pub fn as_chain_map(&self, c: Arc<ChainComplex>, cc: Arc<ChainComplex>) -> Result<ChainMap, ChainError> {
        assert_eq!(self.s, 0, "only the s = 0 diagonal is a chain map");
        let layout = TensorLayout::new(&c, &c);
        ChainMap::from_fn(c.clone(), cc, 0, |k, i| self.on_simplex(k as usize, i).to_layout(&layout, k))
    }
}

/// `∂Δ_s(x) - (-1)^s Δ_s(∂x) - Δ_{s-1}(x) - (-1)^s TΔ_{s-1}(x)` on the
/// `i`-th `k`-simplex; zero exactly when the relation holds there.
pub fn steenrod_defect(x: &Arc<SimplicialComplex>, c: &ChainComplex, k: usize, i: usize, s: usize) -> TensorChain {
    let ds = higher_diagonal(x.clone(), s);
    let dx = c.apply_boundary(k as i32, &[(i as u32, 1)]);
    let mut rhs = if k > 0 { ds.apply(k - 1, &dx) } else { TensorChain::new() };
    if s % 2 == 1 {
        rhs = rhs.scale(-1);
    }
    let mut defect = ds.on_simplex(k, i).boundary(c, c).sub(&rhs);
    if s > 0 {
        defect = defect.sub(&higher_diagonal(x.clone(), s - 1).on_simplex(k, i).norm_s(s));
    }
    defect
}

/// Checks the cup-i relations for `s ≤ max_s` on every simplex. Returns the
/// number of checked instances, or the first failing `(k, i, s)`.
pub fn verify_steenrod(x: &Arc<SimplicialComplex>, max_s: usize) -> Result<usize, (usize, usize, usize)> {
    let c = x.chain_complex();
    let mut count = 0;
    for k in 0..=x.dim().max(0) as usize {
        for i in 0..x.count(k) {
            for s in 0..=max_s {
                if !steenrod_defect(x, &c, k, i, s).is_zero() {
                    return Err((k, i, s));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Chain complex with a degree-0 involution.
#[derive(Clone, Debug)]
pub struct InvolutiveComplex {
    complex: Arc<ChainComplex>,
    involution: ChainMap,
}

impl InvolutiveComplex {
    pub fn new(complex: Arc<ChainComplex>, involution: ChainMap) -> Result<Self, EquivariantError> {
        if involution.degree() != 0 {
            return Err(ChainError::DegreeShift { expected: 0, found: involution.degree() }.into());
        }
        for n in complex.degrees().filter(|_| !complex.is_zero()) {
            let t = involution.component(n);
            if t.mul(&t) != SparseMatrix::identity(complex.rank(n)) {
                return Err(EquivariantError::NotAnInvolution);
            }
        }
        Ok(InvolutiveComplex { complex, involution })
    }

    /// Identity involution.
    pub fn trivial(c: Arc<ChainComplex>) -> Self {
        let involution = ChainMap::identity(c.clone());
        InvolutiveComplex { complex: c, involution }
    }

    /// `-1` involution.
    pub fn sign(c: Arc<ChainComplex>) -> Self {
        let involution = ChainMap::identity(c.clone()).scale(-1);
        InvolutiveComplex { complex: c, involution }
    }

    /// `Z[Z/2]` in degree 0 with the regular action.
    pub fn free_rank_one() -> Self {
        let c = Arc::new(ChainComplex::concentrated(0, 2));
        let swap = SparseMatrix::from_dense(2, 2, &[0, 1, 1, 0]);
        let involution = ChainMap::new(c.clone(), c.clone(), 0, vec![swap]).unwrap();
        InvolutiveComplex { complex: c, involution }
    }

    /// `C ⊗ C` with `T(a ⊗ b) = (-1)^{|a||b|} b ⊗ a`.
    pub fn tensor_square(c: &ChainComplex) -> Result<Self, EquivariantError> {
        let cc = Arc::new(crate::chain::tensor_complex(c, c)?);
        let layout = TensorLayout::new(c, c);
        let involution = ChainMap::from_fn(cc.clone(), cc.clone(), 0, |n, i| {
            let (p, a, q, b) = layout.split(n, i);
            let sign = if (p * q) % 2 == 0 { 1 } else { -1 };
            vec![(layout.index(q, b, p, a) as u32, sign)]
        })?;
        Self::new(cc, involution)
    }

    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.complex
    }

    pub fn involution(&self) -> &ChainMap {
        &self.involution
    }

    /// Matrix of `N_s = 1 + (-1)^s T` on degree `n`.
    fn norm_s(&self, s: usize, n: i32) -> SparseMatrix {
        let id = SparseMatrix::identity(self.complex.rank(n));
        let t = self.involution.component(n);
        if s.is_multiple_of(2) {
            id.add(&t)
        } else {
            id.sub(&t)
        }
    }
}

/// The periodic resolution `… → W_2 → W_1 → W_0 → Z`, each `W_i = Z[Z/2]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct WResolution;

impl WResolution {
    /// Differential `W_i → W_{i-1}` as the group-ring element `a + bT`.
    pub fn differential(i: usize) -> (i64, i64) {
        assert!(i >= 1);
        if i % 2 == 1 {
            (1, -1)
        } else {
            (1, 1)
        }
    }

    /// Product in `Z[Z/2]`.
    pub fn ring_mul(x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
        (x.0 * y.0 + x.1 * y.1, x.0 * y.1 + x.1 * y.0)
    }

    /// The augmented resolution truncated at `W_top`, as a complex of free
    /// abelian groups (`Z` in degree `-1`, `Z^2` above).
    pub fn augmented_complex(top: usize) -> ChainComplex {
        let mut ranks = vec![1usize];
        let mut boundaries = Vec::new();
        ranks.push(2);
        boundaries.push(SparseMatrix::from_dense(1, 2, &[1, 1]));
        for i in 1..=top {
            ranks.push(2);
            let (a, b) = Self::differential(i);
            // Left multiplication by a + bT on the basis {1, T}.
            boundaries.push(SparseMatrix::from_dense(2, 2, &[a, b, b, a]));
        }
        ChainComplex::new(-1, ranks, boundaries, None).expect("W is a complex")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowKind {
    Fixed,
    Orbits,
}

/// Brutal truncation to degrees `[lo, hi]` of the homotopy fixed points or
/// orbits of `D`. Homology is exact in degrees `lo + 1 ..= hi - 1`.
pub fn z2_homotopy_complex(
    d: &InvolutiveComplex,
    kind: WindowKind,
    lo: i32,
    hi: i32,
) -> Result<ChainComplex, EquivariantError> {
    if hi < lo {
        return Err(EquivariantError::UnboundedComplex);
    }
    let c = d.complex();
    if c.is_zero() {
        return Ok(ChainComplex::zero());
    }
    // Component list of degree m: (s, degree of D).
    let parts = |m: i32| -> Vec<(usize, i32)> {
        match kind {
            WindowKind::Fixed => (0..)
                .map(|s: i32| (s as usize, m + s))
                .take_while(|&(_, k)| k <= c.hi())
                .filter(|&(_, k)| k >= c.lo())
                .collect(),
            WindowKind::Orbits => (0..)
                .map(|s: i32| (s as usize, m - s))
                .take_while(|&(_, k)| k >= c.lo())
                .filter(|&(_, k)| k <= c.hi())
                .collect(),
        }
    };
    let offsets = |m: i32| -> Vec<(usize, i32, usize)> {
        let mut acc = 0;
        parts(m)
            .into_iter()
            .map(|(s, k)| {
                let o = acc;
                acc += c.rank(k);
                (s, k, o)
            })
            .collect()
    };
    let rank = |m: i32| -> usize { parts(m).iter().map(|&(_, k)| c.rank(k)).sum() };
    let ranks: Vec<usize> = (lo..=hi).map(rank).collect();
    let mut boundaries = Vec::new();
    for m in lo + 1..=hi {
        let src = offsets(m);
        let dst = offsets(m - 1);
        let find = |s: usize| dst.iter().find(|e| e.0 == s).map(|e| e.2);
        let mut trip: Vec<(usize, usize, i64)> = Vec::new();
        for &(s, k, off) in &src {
            let dk = c.boundary(k);
            match kind {
                WindowKind::Fixed => {
                    let sign = if s % 2 == 0 { 1 } else { -1 };
                    // (dφ)_s gets (-1)^s ∂φ_s.
                    if let Some(o) = find(s) {
                        for (r, col, v) in dk.triplets() {
                            trip.push((o + r, off + col, sign * v));
                        }
                    }
                    // (dφ)_{s+1} gets -(-1)^{s+1} N_{s+1} φ_s = (-1)^s N_{s+1} φ_s.
                    if let Some(o) = find(s + 1) {
                        for (r, col, v) in d.norm_s(s + 1, k).triplets() {
                            trip.push((o + r, off + col, sign * v));
                        }
                    }
                }
                WindowKind::Orbits => {
                    let sign = if s % 2 == 0 { 1 } else { -1 };
                    if let Some(o) = find(s) {
                        for (r, col, v) in dk.triplets() {
                            trip.push((o + r, off + col, sign * v));
                        }
                    }
                    if s >= 1 {
                        if let Some(o) = find(s - 1) {
                            for (r, col, v) in d.norm_s(s, k).triplets() {
                                trip.push((o + r, off + col, v));
                            }
                        }
                    }
                }
            }
        }
        boundaries.push(SparseMatrix::from_triplets(rank(m - 1), rank(m), trip));
    }
    Ok(ChainComplex::new(lo, ranks, boundaries, None)?)
}

/// Three-term window `[n-1, n+1]`; only `H_n` is meaningful.
pub fn z2_homotopy_window(d: &InvolutiveComplex, kind: WindowKind, n: i32) -> Result<ChainComplex, EquivariantError> {
    z2_homotopy_complex(d, kind, n - 1, n + 1)
}

/// Norm map on the three-term window around `n`.
pub fn norm_window(d: &InvolutiveComplex, n: i32) -> Result<ChainMap, EquivariantError> {
    norm_map(d, n - 1, n + 1)
}

/// Norm map between brutal truncations `[lo, hi]`: `e_0 ⊗ x ↦ ((1 + T) x, 0, …)`.
pub fn norm_map(d: &InvolutiveComplex, lo: i32, hi: i32) -> Result<ChainMap, EquivariantError> {
    let orbits = Arc::new(z2_homotopy_complex(d, WindowKind::Orbits, lo, hi)?);
    let fixed = Arc::new(z2_homotopy_complex(d, WindowKind::Fixed, lo, hi)?);
    let c = d.complex();
    let degrees: Vec<i32> = if orbits.is_zero() { Vec::new() } else { orbits.degrees().collect() };
    let components = degrees
        .into_iter()
        .map(|m| {
            // The s = 0 summand, when present, sits first in both layouts.
            let mut trip = Vec::new();
            if m >= c.lo() && m <= c.hi() {
                trip.extend(d.norm_s(0, m).triplets());
            }
            SparseMatrix::from_triplets(fixed.rank(m), orbits.rank(m), trip)
        })
        .collect();
    Ok(ChainMap::new(orbits, fixed, 0, components)?)
}

/// `φ_s ∈ (C ⊗ C)_{n+s}` for `s = 0..=window`.
#[derive(Clone, Debug)]
pub struct SymmetricStructure {
    pub n: usize,
    pub components: Vec<TensorChain>,
}

impl SymmetricStructure {
    /// Defect `∂φ_s - N_s φ_{s-1}` (and `∂φ_0` for `s = 0`).
    pub fn defect(&self, c: &ChainComplex, s: usize) -> TensorChain {
        let d = self.components[s].boundary(c, c);
        if s == 0 {
            d
        } else {
            d.sub(&self.components[s - 1].norm_s(s))
        }
    }

    /// Checks every relation exactly.
    pub fn verify_closed(&self, c: &ChainComplex) -> Result<(), EquivariantError> {
        for s in 0..self.components.len() {
            if !self.defect(c, s).is_zero() {
                return Err(EquivariantError::RelationFailed { s });
            }
        }
        Ok(())
    }

    /// Relative version: every defect must live in `B ⊗ B` for the boundary subcomplex.
    pub fn verify_relative<F: Fn(i32, u32) -> bool>(
        &self,
        c: &ChainComplex,
        in_boundary: F,
    ) -> Result<(), EquivariantError> {
        for s in 0..self.components.len() {
            let d = self.defect(c, s);
            if d.terms().any(|(&(p, a, q, b), _)| !(in_boundary(p, a) && in_boundary(q, b))) {
                return Err(EquivariantError::RelationFailed { s });
            }
        }
        Ok(())
    }
}

/// `φ_s = Δ_s(ω)` for `s ≤ window`.
pub fn symmetric_construction(
    m: &OrientedManifoldComplex,
    window: usize,
) -> Result<SymmetricStructure, EquivariantError> {
    let omega = m.fundamental_cycle();
    let components = (0..=window).map(|s| higher_diagonal(m.base().clone(), s).apply(m.dim(), &omega)).collect();
    let structure = SymmetricStructure { n: m.dim(), components };
    let c = m.base().chain_complex();
    if m.has_boundary() {
        let b = m.boundary().clone();
        let base = m.base().clone();
        structure.verify_relative(&c, |p, a| b.contains(&base.simplices(p as usize)[a as usize]))?;
    } else {
        structure.verify_closed(&c)?;
    }
    Ok(structure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aw_on_an_edge() {
        let mut t = cup_i_terms(&[0, 1], 0);
        t.sort();
        assert_eq!(t, vec![(vec![0], vec![0, 1], 1), (vec![0, 1], vec![1], 1)]);
    }

    #[test]
    fn cup_one_on_an_edge_is_the_transposition_term() {
        // Δ_1 of an edge is ±(x ⊗ x).
        let t = cup_i_terms(&[0, 1], 1);
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].0.clone(), t[0].1.clone()), (vec![0, 1], vec![0, 1]));
    }

    #[test]
    fn w_differentials_compose_to_zero() {
        for i in 1..6 {
            let p = WResolution::ring_mul(WResolution::differential(i), WResolution::differential(i + 1));
            assert_eq!(p, (0, 0));
        }
    }
}
