//! Bounded chain complexes of finitely generated free abelian groups.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::snf::{invariant_factors, smith_diagonal, smith_with_transforms, InvariantFactors};

/// Basis label attached to a generator of a chain group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Simplex(Vec<u32>),
    Index(u32),
    Pair(Box<Label>, Box<Label>),
    ConeTarget(Box<Label>),
    ConeSource(Box<Label>),
    Dual(Box<Label>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainError {
    /// `∂_{n-1} ∂_n` is nonzero.
    NotSquareZero {
        degree: i32,
    },
    ShapeMismatch {
        degree: i32,
        expected: (usize, usize),
        found: (usize, usize),
    },
    LabelCount {
        degree: i32,
        expected: usize,
        found: usize,
    },
    NotAChainMap {
        degree: i32,
    },
    DegreeShift {
        expected: i32,
        found: i32,
    },
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainError::NotSquareZero { degree } => {
                write!(f, "boundary squares to a nonzero map at degree {degree}")
            }
            ChainError::ShapeMismatch { degree, expected, found } => write!(
                f,
                "matrix at degree {degree} has shape {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            ChainError::LabelCount { degree, expected, found } => {
                write!(f, "degree {degree} has {found} labels for rank {expected}")
            }
            ChainError::NotAChainMap { degree } => {
                write!(f, "map does not commute with boundaries at degree {degree}")
            }
            ChainError::DegreeShift { expected, found } => {
                write!(f, "chain map has degree {found}, expected {expected}")
            }
        }
    }
}

/// Above this total rank, homology goes through unit-pair reduction first.
const REDUCE_CUTOFF: usize = 128;

/// Bounded chain complex with sparse integer boundaries.
///
/// Degree `lo + k` has rank `ranks[k]`. `boundaries[k]` maps degree `lo + k`
/// to `lo + k - 1` (so `boundaries[0]` always has zero rows).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    lo: i32,
    ranks: Vec<usize>,
    boundaries: Vec<SparseMatrix>,
    labels: Option<Vec<Vec<Label>>>,
}

impl ChainComplex {
    /// `boundaries[k]` is the map out of degree `lo + k + 1`.
    pub fn new(
        lo: i32,
        ranks: Vec<usize>,
        boundaries: Vec<SparseMatrix>,
        labels: Option<Vec<Vec<Label>>>,
    ) -> Result<Self, ChainError> {
        assert_eq!(boundaries.len() + 1, ranks.len().max(1), "need one boundary matrix per degree above the lowest");
        let mut all = Vec::with_capacity(ranks.len());
        if !ranks.is_empty() {
            all.push(SparseMatrix::zeros(0, ranks[0]));
        }
        all.extend(boundaries);
        let c = ChainComplex { lo, ranks, boundaries: all, labels };
        c.validate()?;
        Ok(c.trimmed())
    }

    pub fn zero() -> Self {
        ChainComplex { lo: 0, ranks: Vec::new(), boundaries: Vec::new(), labels: None }
    }

    /// A single free group of the given rank in one degree.
    pub fn concentrated(degree: i32, rank: usize) -> Self {
        ChainComplex { lo: degree, ranks: vec![rank], boundaries: vec![SparseMatrix::zeros(0, rank)], labels: None }
    }

    fn validate(&self) -> Result<(), ChainError> {
        for (k, b) in self.boundaries.iter().enumerate() {
            let deg = self.lo + k as i32;
            let expected = (if k == 0 { 0 } else { self.ranks[k - 1] }, self.ranks[k]);
            if (b.rows(), b.cols()) != expected {
                return Err(ChainError::ShapeMismatch { degree: deg, expected, found: (b.rows(), b.cols()) });
            }
            if k >= 2 && !self.boundaries[k - 1].mul(b).is_zero() {
                return Err(ChainError::NotSquareZero { degree: deg });
            }
        }
        if let Some(labels) = &self.labels {
            for (k, l) in labels.iter().enumerate() {
                if l.len() != self.ranks[k] {
                    return Err(ChainError::LabelCount {
                        degree: self.lo + k as i32,
                        expected: self.ranks[k],
                        found: l.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Drops zero groups at both ends.
    fn trimmed(mut self) -> Self {
        let first = self.ranks.iter().position(|&r| r > 0);
        let Some(first) = first else { return Self::zero() };
        let last = self.ranks.iter().rposition(|&r| r > 0).unwrap();
        self.ranks.truncate(last + 1);
        self.boundaries.truncate(last + 1);
        if let Some(l) = self.labels.as_mut() {
            l.truncate(last + 1);
            l.drain(..first);
        }
        self.ranks.drain(..first);
        self.boundaries.drain(..first);
        self.boundaries[0] = SparseMatrix::zeros(0, self.ranks[0]);
        self.lo += first as i32;
        self
    }

    #[inline]
    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest degree; below `lo` for the zero complex.
    #[inline]
    pub fn hi(&self) -> i32 {
        self.lo + self.ranks.len() as i32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self, n: i32) -> usize {
        self.index(n).map_or(0, |k| self.ranks[k])
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    fn index(&self, n: i32) -> Option<usize> {
        let k = n - self.lo;
        (k >= 0 && (k as usize) < self.ranks.len()).then_some(k as usize)
    }

    /// Boundary out of degree `n`, of shape `rank(n-1) x rank(n)`.
    pub fn boundary(&self, n: i32) -> SparseMatrix {
        match self.index(n) {
            Some(k) if k > 0 => self.boundaries[k].clone(),
            _ => SparseMatrix::zeros(self.rank(n - 1), self.rank(n)),
        }
    }

    pub fn boundary_ref(&self, n: i32) -> Option<&SparseMatrix> {
        match self.index(n) {
            Some(k) if k > 0 => Some(&self.boundaries[k]),
            _ => None,
        }
    }

    pub fn labels(&self, n: i32) -> Option<&[Label]> {
        let k = self.index(n)?;
        self.labels.as_ref().map(|l| l[k].as_slice())
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some() || self.is_zero()
    }

    pub fn degrees(&self) -> core::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn with_labels(mut self, labels: Vec<Vec<Label>>) -> Result<Self, ChainError> {
        self.labels = Some(labels);
        self.validate()?;
        Ok(self)
    }

    /// Euler characteristic.
    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|n| if n % 2 == 0 { 1 } else { -1 } * self.rank(n) as i64).sum()
    }

    /// Applies the boundary to a sparse chain in degree `n`.
    pub fn apply_boundary(&self, n: i32, chain: &[(u32, i64)]) -> Vec<(u32, i64)> {
        match self.boundary_ref(n) {
            Some(b) => b.apply(chain),
            None => Vec::new(),
        }
    }

    /// Restriction to a subset of basis elements in each degree.
    ///
    /// `keep(n, i)` selects generators. The result is a subquotient when the
    /// kept set is locally closed for the boundary (a subcomplex of a quotient);
    /// `∂² = 0` is re-checked.
    pub fn restrict<F>(&self, mut keep: F) -> Result<(ChainComplex, Vec<Vec<usize>>), ChainError>
    where
        F: FnMut(i32, usize) -> bool,
    {
        if self.is_zero() {
            return Ok((Self::zero(), Vec::new()));
        }
        let kept: Vec<Vec<usize>> =
            self.degrees().map(|n| (0..self.rank(n)).filter(|&i| keep(n, i)).collect()).collect();
        Ok((self.restrict_to(&kept)?, kept))
    }

    /// Restriction to explicit index lists, one per degree from `lo`.
    pub fn restrict_to(&self, kept: &[Vec<usize>]) -> Result<ChainComplex, ChainError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        assert_eq!(kept.len(), self.ranks.len());
        let ranks: Vec<usize> = kept.iter().map(Vec::len).collect();
        let boundaries = (1..kept.len()).map(|k| self.boundaries[k].select(&kept[k - 1], &kept[k])).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| kept.iter().enumerate().map(|(k, idx)| idx.iter().map(|&i| l[k][i].clone()).collect()).collect());
        let c = ChainComplex {
            lo: self.lo,
            ranks,
            boundaries: {
                let mut all = vec![SparseMatrix::zeros(0, kept[0].len())];
                all.extend::<Vec<SparseMatrix>>(boundaries);
                all
            },
            labels,
        };
        c.validate()?;
        Ok(c.trimmed())
    }

    /// Homology in every degree of the complex.
    pub fn homology_all(&self) -> Vec<HomologyGroup> {
        if self.total_rank() > REDUCE_CUTOFF {
            if let Some(residual) = crate::reduce::reduce(self) {
                return self.homology_from(&residual);
            }
        }
        self.homology_by_matrices()
    }

    /// Homology from the Smith forms of the individual boundary matrices.
    pub fn homology_by_matrices(&self) -> Vec<HomologyGroup> {
        self.homology_from(&self.boundaries)
    }

    fn homology_from(&self, boundaries: &[SparseMatrix]) -> Vec<HomologyGroup> {
        let mut factors: Vec<InvariantFactors> = boundaries.iter().map(invariant_factors).collect();
        factors.push(InvariantFactors { rank: 0, torsion: Vec::new() });
        self.degrees()
            .map(|n| {
                let k = (n - self.lo) as usize;
                let size = boundaries[k].cols();
                let betti = size - factors[k].rank - factors[k + 1].rank;
                HomologyGroup::new(n, betti, factors[k + 1].torsion.clone())
            })
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology_all().iter().all(HomologyGroup::is_zero)
    }
}

/// `H_n` as betti number plus invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HomologyGroup {
    pub degree: i32,
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn new(degree: i32, betti: usize, mut torsion: Vec<BigInt>) -> Self {
        for t in torsion.iter_mut() {
            *t = t.abs();
        }
        torsion.retain(|t| !t.is_one() && !t.is_zero());
        torsion.sort();
        debug_assert!(torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
        HomologyGroup { degree, betti, torsion }
    }

    pub fn zero(degree: i32) -> Self {
        HomologyGroup { degree, betti: 0, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    /// Same abstract group, ignoring the degree.
    pub fn isomorphic(&self, other: &Self) -> bool {
        self.betti == other.betti && self.torsion == other.torsion
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion.iter().map(|t| u64::try_from(t).unwrap_or(u64::MAX)).collect()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<alloc::string::String> = Vec::new();
        if self.betti > 0 {
            parts.push(alloc::format!("Z^{}", self.betti));
        }
        for t in &self.torsion {
            parts.push(alloc::format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `H_n(C)` computed exactly; zero outside the support.
pub fn homology(c: &ChainComplex, n: i32) -> HomologyGroup {
    if c.rank(n) == 0 {
        return HomologyGroup::zero(n);
    }
    let out = c.boundary_ref(n).map(invariant_factors);
    let inc = c.boundary_ref(n + 1).map(invariant_factors);
    let r_out = out.map_or(0, |f| f.rank);
    let (r_in, torsion) = inc.map_or((0, Vec::new()), |f| (f.rank, f.torsion));
    HomologyGroup::new(n, c.rank(n) - r_out - r_in, torsion)
}

/// Chain map of a given degree; component `k` maps source degree `n` to
/// target degree `n + degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: Arc<ChainComplex>,
    target: Arc<ChainComplex>,
    degree: i32,
    components: Vec<SparseMatrix>,
}

impl ChainMap {
    /// `components` are indexed by source degree starting at `source.lo()`.
    /// Checks `∂ f = (-1)^degree f ∂`.
    pub fn new(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        degree: i32,
        components: Vec<SparseMatrix>,
    ) -> Result<Self, ChainError> {
        let f = ChainMap { source, target, degree, components };
        f.validate()?;
        Ok(f)
    }

    /// Builds a map from a per-generator image function returning sparse chains.
    pub fn from_fn<F>(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        degree: i32,
        mut image: F,
    ) -> Result<Self, ChainError>
    where
        F: FnMut(i32, usize) -> Vec<(u32, i64)>,
    {
        let components = source
            .degrees()
            .filter(|_| !source.is_zero())
            .map(|n| {
                let cols = (0..source.rank(n)).map(|i| image(n, i)).collect();
                SparseMatrix::from_columns(target.rank(n + degree), cols)
            })
            .collect();
        Self::new(source, target, degree, components)
    }

    pub fn identity(c: Arc<ChainComplex>) -> Self {
        let components = c.degrees().filter(|_| !c.is_zero()).map(|n| SparseMatrix::identity(c.rank(n))).collect();
        ChainMap { source: c.clone(), target: c, degree: 0, components }
    }

    pub fn zero(source: Arc<ChainComplex>, target: Arc<ChainComplex>, degree: i32) -> Self {
        let components = source
            .degrees()
            .filter(|_| !source.is_zero())
            .map(|n| SparseMatrix::zeros(target.rank(n + degree), source.rank(n)))
            .collect();
        ChainMap { source, target, degree, components }
    }

    fn validate(&self) -> Result<(), ChainError> {
        let s = &self.source;
        let t = &self.target;
        if s.is_zero() {
            return Ok(());
        }
        assert_eq!(self.components.len(), s.ranks.len(), "one component per source degree");
        for n in s.degrees() {
            let f = self.component(n);
            let expected = (t.rank(n + self.degree), s.rank(n));
            if (f.rows(), f.cols()) != expected {
                return Err(ChainError::ShapeMismatch { degree: n, expected, found: (f.rows(), f.cols()) });
            }
            let lhs = t.boundary(n + self.degree).mul(&f);
            let rhs = self.component(n - 1).mul(&s.boundary(n));
            let ok = if self.degree % 2 == 0 { lhs == rhs } else { lhs == rhs.neg() };
            if !ok {
                return Err(ChainError::NotAChainMap { degree: n });
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<ChainComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ChainComplex> {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    /// Component out of source degree `n` (zero outside the support).
    pub fn component(&self, n: i32) -> SparseMatrix {
        match self.source.index(n) {
            Some(k) => self.components[k].clone(),
            None => SparseMatrix::zeros(self.target.rank(n + self.degree), self.source.rank(n)),
        }
    }

    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap, ChainError> {
        assert!(Arc::ptr_eq(first.target(), &self.source) || **first.target() == *self.source);
        let components = first
            .source
            .degrees()
            .filter(|_| !first.source.is_zero())
            .map(|n| self.component(n + first.degree).mul(&first.component(n)))
            .collect();
        ChainMap::new(first.source.clone(), self.target.clone(), self.degree + first.degree, components)
    }

    pub fn scale(&self, k: i64) -> ChainMap {
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            components: self.components.iter().map(|m| m.scale(k)).collect(),
        }
    }

    /// Image of a big-integer chain in source degree `n`.
    pub fn apply_big(&self, n: i32, v: &[BigInt]) -> Vec<BigInt> {
        let f = self.component(n);
        let mut out = vec![BigInt::zero(); f.rows()];
        for (r, c, x) in f.triplets() {
            if !v[c].is_zero() {
                out[r] += &v[c] * x;
            }
        }
        out
    }
}

/// Mapping cone of a degree-0 map: `cone_n = T_n ⊕ S_{n-1}`,
/// `∂(t, s) = (∂t + f s, -∂s)`.
pub fn mapping_cone(f: &ChainMap) -> Result<ChainComplex, ChainError> {
    if f.degree != 0 {
        return Err(ChainError::DegreeShift { expected: 0, found: f.degree });
    }
    let s = &f.source;
    let t = &f.target;
    let lo = match (s.is_zero(), t.is_zero()) {
        (true, true) => return Ok(ChainComplex::zero()),
        (true, false) => t.lo,
        (false, true) => s.lo + 1,
        (false, false) => t.lo.min(s.lo + 1),
    };
    let hi = t.hi().max(s.hi() + 1);
    let ranks: Vec<usize> = (lo..=hi).map(|n| t.rank(n) + s.rank(n - 1)).collect();
    let boundaries = (lo + 1..=hi)
        .map(|n| {
            SparseMatrix::block2x2(
                (t.rank(n - 1), s.rank(n - 2)),
                (t.rank(n), s.rank(n - 1)),
                [Some(&t.boundary(n)), Some(&f.component(n - 1)), None, Some(&s.boundary(n - 1).neg())],
            )
        })
        .collect();
    let labels = (s.has_labels() && t.has_labels() && !(s.is_zero() && t.is_zero())).then(|| {
        (lo..=hi)
            .map(|n| {
                let mut l: Vec<Label> =
                    t.labels(n).unwrap_or(&[]).iter().map(|x| Label::ConeTarget(Box::new(x.clone()))).collect();
                l.extend(s.labels(n - 1).unwrap_or(&[]).iter().map(|x| Label::ConeSource(Box::new(x.clone()))));
                l
            })
            .collect()
    });
    ChainComplex::new(lo, ranks, boundaries, labels)
}

/// Offsets of the `(p, q)` blocks inside `(C ⊗ D)_n`, ordered by `p`.
#[derive(Clone, Debug)]
pub struct TensorLayout {
    pub c_lo: i32,
    pub c_hi: i32,
    pub d_lo: i32,
    pub d_hi: i32,
    c_ranks: Vec<usize>,
    d_ranks: Vec<usize>,
    /// `offsets[n - lo][p - c_lo]`.
    offsets: Vec<Vec<usize>>,
    pub lo: i32,
}

impl TensorLayout {
    pub fn new(c: &ChainComplex, d: &ChainComplex) -> Self {
        let (c_lo, c_hi, d_lo, d_hi) = (c.lo, c.hi(), d.lo, d.hi());
        let lo = c_lo + d_lo;
        let hi = c_hi + d_hi;
        let mut offsets = Vec::new();
        if !c.is_zero() && !d.is_zero() {
            for n in lo..=hi {
                let mut acc = 0;
                let mut row = Vec::new();
                for p in c_lo..=c_hi {
                    row.push(acc);
                    acc += c.rank(p) * d.rank(n - p);
                }
                row.push(acc);
                offsets.push(row);
            }
        }
        TensorLayout {
            c_lo,
            c_hi,
            d_lo,
            d_hi,
            c_ranks: c.degrees().map(|p| c.rank(p)).collect(),
            d_ranks: d.degrees().map(|q| d.rank(q)).collect(),
            offsets,
            lo,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.offsets.len() as i32 - 1
    }

    pub fn rank(&self, n: i32) -> usize {
        let k = n - self.lo;
        if k < 0 || k as usize >= self.offsets.len() {
            return 0;
        }
        *self.offsets[k as usize].last().unwrap()
    }

    fn d_rank(&self, q: i32) -> usize {
        if q < self.d_lo || q > self.d_hi {
            0
        } else {
            self.d_ranks[(q - self.d_lo) as usize]
        }
    }

    fn c_rank(&self, p: i32) -> usize {
        if p < self.c_lo || p > self.c_hi {
            0
        } else {
            self.c_ranks[(p - self.c_lo) as usize]
        }
    }

    /// Index of `a ⊗ b` with `a ∈ C_p`, `b ∈ D_q`, in degree `p + q`.
    pub fn index(&self, p: i32, a: usize, q: i32, b: usize) -> usize {
        let n = p + q;
        self.offsets[(n - self.lo) as usize][(p - self.c_lo) as usize] + a * self.d_rank(q) + b
    }

    /// Inverse of [`index`](Self::index): `(p, a, q, b)`.
    pub fn split(&self, n: i32, i: usize) -> (i32, usize, i32, usize) {
        let row = &self.offsets[(n - self.lo) as usize];
        let k = row.partition_point(|&o| o <= i) - 1;
        let p = self.c_lo + k as i32;
        let q = n - p;
        let local = i - row[k];
        let dr = self.d_rank(q);
        (p, local / dr, q, local % dr)
    }

    pub fn c_rank_at(&self, p: i32) -> usize {
        self.c_rank(p)
    }
}

/// `C ⊗ D` with `∂(a ⊗ b) = ∂a ⊗ b + (-1)^p a ⊗ ∂b`.
pub fn tensor_complex(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex, ChainError> {
    let layout = TensorLayout::new(c, d);
    if layout.is_zero() {
        return Ok(ChainComplex::zero());
    }
    let (lo, hi) = (layout.lo, layout.hi());
    let ranks: Vec<usize> = (lo..=hi).map(|n| layout.rank(n)).collect();
    let mut boundaries = Vec::new();
    for n in lo + 1..=hi {
        let mut cols: Vec<Vec<(u32, i64)>> = Vec::with_capacity(layout.rank(n));
        for p in c.lo..=c.hi() {
            let q = n - p;
            let (cp, dq) = (c.rank(p), d.rank(q));
            if cp == 0 || dq == 0 {
                continue;
            }
            let dc = c.boundary_ref(p);
            let dd = d.boundary_ref(q);
            let sign = if p % 2 == 0 { 1 } else { -1 };
            for a in 0..cp {
                for b in 0..dq {
                    let mut col = Vec::new();
                    if let Some(dc) = dc {
                        for &(r, v) in dc.col(a) {
                            col.push((layout.index(p - 1, r as usize, q, b) as u32, v));
                        }
                    }
                    if let Some(dd) = dd {
                        for &(r, v) in dd.col(b) {
                            col.push((layout.index(p, a, q - 1, r as usize) as u32, sign * v));
                        }
                    }
                    cols.push(col);
                }
            }
        }
        boundaries.push(SparseMatrix::from_columns(layout.rank(n - 1), cols));
    }
    let labels = (c.labels.is_some() && d.labels.is_some()).then(|| {
        (lo..=hi)
            .map(|n| {
                (0..layout.rank(n))
                    .map(|i| {
                        let (p, a, q, b) = layout.split(n, i);
                        Label::Pair(
                            Box::new(c.labels(p).unwrap()[a].clone()),
                            Box::new(d.labels(q).unwrap()[b].clone()),
                        )
                    })
                    .collect()
            })
            .collect()
    });
    ChainComplex::new(lo, ranks, boundaries, labels)
}

/// `Σ^n C^{-*}`: degree `k` is `hom(C_{n-k}, Z)` with boundary `(-1)^k ∂^T`.
pub fn dual_complex(c: &ChainComplex, n: i32) -> Result<ChainComplex, ChainError> {
    if c.is_zero() {
        return Ok(ChainComplex::zero());
    }
    let lo = n - c.hi();
    let hi = n - c.lo;
    let ranks: Vec<usize> = (lo..=hi).map(|k| c.rank(n - k)).collect();
    let boundaries = (lo + 1..=hi)
        .map(|k| {
            let t = c.boundary(n - k + 1).transpose();
            if k % 2 == 0 {
                t
            } else {
                t.neg()
            }
        })
        .collect();
    let labels = c.labels.as_ref().map(|_| {
        (lo..=hi).map(|k| c.labels(n - k).unwrap().iter().map(|l| Label::Dual(Box::new(l.clone()))).collect()).collect()
    });
    ChainComplex::new(lo, ranks, boundaries, labels)
}

/// Evaluation map `C → dual(dual(C, n), n)` (identity matrices up to the
/// sign that makes it a chain map).
pub fn double_dual_map(c: &Arc<ChainComplex>, n: i32) -> Result<ChainMap, ChainError> {
    let dd = Arc::new(dual_complex(&dual_complex(c, n)?, n)?);
    // ∂ on the double dual at degree m is (-1)^{n-m+1} (-1)^m ∂ = (-1)^{n+1} ∂,
    // so the identity twisted by ε_m with ε_{m-1} = (-1)^{n+1} ε_m commutes.
    let components = c
        .degrees()
        .map(|m| {
            let e = if (n + 1).rem_euclid(2) == 1 && m.rem_euclid(2) == 1 { -1 } else { 1 };
            SparseMatrix::identity(c.rank(m)).scale(e)
        })
        .collect();
    ChainMap::new(c.clone(), dd, 0, components)
}

/// True iff the mapping cone of `f` is acyclic.
pub fn is_quasi_iso(f: &ChainMap) -> Result<bool, ChainError> {
    Ok(mapping_cone(f)?.is_acyclic())
}

/// Integral basis of `H_n` for small complexes (dense arithmetic).
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub group: HomologyGroup,
    /// Torsion generators first (orders = `group.torsion`), then free generators.
    pub generators: Vec<Vec<BigInt>>,
    /// Rows of `V⁻¹` spanning cycle coordinates.
    kernel_coords: DenseMatrix,
    /// Change of basis on cycle coordinates (`U₂`, restricted to nontrivial rows).
    quotient: DenseMatrix,
    /// Index of each reported coordinate inside `quotient`'s rows.
    reported: Vec<usize>,
    torsion_len: usize,
}

impl HomologyBasis {
    pub fn compute(c: &ChainComplex, n: i32) -> HomologyBasis {
        let dim = c.rank(n);
        let dn = c.boundary(n).to_dense();
        let s1 = smith_with_transforms(&dn);
        let r1 = s1.rank;
        let z = dim - r1;
        // Cycle coordinates: last z rows of V⁻¹.
        let mut kernel_coords = DenseMatrix::zeros(z, dim);
        for i in 0..z {
            for j in 0..dim {
                kernel_coords[(i, j)] = s1.v_inv[(r1 + i, j)].clone();
            }
        }
        let up = c.boundary(n + 1).to_dense();
        let b = kernel_coords.mul(&up);
        let s2 = smith_with_transforms(&b);
        let d = s2.diagonal();
        let r2 = s2.rank;
        let mut reported = Vec::new();
        let mut torsion = Vec::new();
        for (i, di) in d.iter().enumerate() {
            if !di.is_one() {
                reported.push(i);
                torsion.push(di.clone());
            }
        }
        let torsion_len = reported.len();
        reported.extend(r2..z);
        // Generator i is K · U₂⁻¹[:, i].
        let mut generators = Vec::new();
        for &i in &reported {
            let mut g = vec![BigInt::zero(); dim];
            for k in 0..z {
                let w = &s2.u_inv[(k, i)];
                if w.is_zero() {
                    continue;
                }
                for j in 0..dim {
                    let v = &s1.v[(j, r1 + k)];
                    if !v.is_zero() {
                        g[j] += v * w;
                    }
                }
            }
            generators.push(g);
        }
        HomologyBasis {
            group: HomologyGroup::new(n, z - r2, torsion),
            generators,
            kernel_coords,
            quotient: s2.u,
            reported,
            torsion_len,
        }
    }

    /// Coordinates of a cycle: torsion entries reduced mod their orders, then free entries.
    pub fn coordinates(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        let z = self.kernel_coords.rows();
        let y: Vec<BigInt> = (0..z)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (j, x) in cycle.iter().enumerate() {
                    if !x.is_zero() {
                        acc += &self.kernel_coords[(i, j)] * x;
                    }
                }
                acc
            })
            .collect();
        self.reported
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let mut w = BigInt::zero();
                for (k, yk) in y.iter().enumerate() {
                    if !yk.is_zero() {
                        w += &self.quotient[(i, k)] * yk;
                    }
                }
                if pos < self.torsion_len {
                    w.mod_floor(&self.group.torsion[pos])
                } else {
                    w
                }
            })
            .collect()
    }

    pub fn torsion_len(&self) -> usize {
        self.torsion_len
    }
}

/// Matrix of `H_n(f)` in the bases of [`HomologyBasis`], columns = source generators.
pub fn induced_map(f: &ChainMap, n: i32, src: &HomologyBasis, dst: &HomologyBasis) -> DenseMatrix {
    let rows = dst.generators.len();
    let mut m = DenseMatrix::zeros(rows, src.generators.len());
    for (j, g) in src.generators.iter().enumerate() {
        let img = f.apply_big(n, g);
        for (i, x) in dst.coordinates(&img).into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    m
}

/// Whether a homomorphism between f.g. abelian groups, given in those bases, is bijective.
pub fn is_iso_matrix(m: &DenseMatrix, src: &HomologyGroup, dst: &HomologyGroup) -> bool {
    if !src.isomorphic(dst) {
        return false;
    }
    // Surjectivity: columns of m plus the torsion relations span the coordinate lattice.
    let t = dst.torsion.len();
    let rows = m.rows();
    let mut aug = DenseMatrix::zeros(rows, m.cols() + t);
    for i in 0..rows {
        for j in 0..m.cols() {
            aug[(i, j)] = m[(i, j)].clone();
        }
    }
    for (k, d) in dst.torsion.iter().enumerate() {
        aug[(k, m.cols() + k)] = d.clone();
    }
    let diag = smith_diagonal(aug);
    diag.len() == rows && diag.iter().all(One::is_one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point() -> ChainComplex {
        ChainComplex::concentrated(0, 1)
    }

    #[test]
    fn cone_of_two_has_order_two() {
        let z = Arc::new(point());
        let two = ChainMap::identity(z).scale(2);
        let cone = mapping_cone(&two).unwrap();
        assert_eq!(homology(&cone, 0), HomologyGroup::new(0, 0, vec![BigInt::from(2)]));
        assert!(homology(&cone, 1).is_zero());
    }

    #[test]
    fn dual_of_point_is_point() {
        let d = dual_complex(&point(), 0).unwrap();
        assert_eq!(d.lo(), 0);
        assert_eq!(d.hi(), 0);
        assert_eq!(d.rank(0), 1);
    }

    #[test]
    fn non_square_zero_is_rejected() {
        let b1 = SparseMatrix::from_dense(1, 1, &[1]);
        let b2 = SparseMatrix::from_dense(1, 1, &[1]);
        let err = ChainComplex::new(0, vec![1, 1, 1], vec![b1, b2], None).unwrap_err();
        assert_eq!(err, ChainError::NotSquareZero { degree: 2 });
    }

    #[test]
    fn tensor_split_roundtrip() {
        let c =
            ChainComplex::new(0, vec![2, 3], vec![SparseMatrix::from_dense(2, 3, &[1, 1, 0, -1, 0, 1])], None).unwrap();
        let l = TensorLayout::new(&c, &c);
        for n in l.lo..=l.hi() {
            for i in 0..l.rank(n) {
                let (p, a, q, b) = l.split(n, i);
                assert_eq!(l.index(p, a, q, b), i);
            }
        }
    }

    #[test]
    fn homology_basis_of_circle_with_torsion() {
        // Z --2--> Z in degrees 1 -> 0.
        let c = ChainComplex::new(0, vec![1, 1], vec![SparseMatrix::from_dense(1, 1, &[2])], None).unwrap();
        let b = HomologyBasis::compute(&c, 0);
        assert_eq!(b.group.torsion, vec![BigInt::from(2)]);
        assert_eq!(b.coordinates(&[BigInt::from(3)]), vec![BigInt::from(1)]);
    }
}
