//! Ordered simplicial complexes, oriented pseudomanifolds, products and subdivision.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::chain::{ChainComplex, ChainError, ChainMap, Label};
use crate::matrix::SparseMatrix;

pub type Simplex = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexError {
    NotClosedUnderFaces {
        simplex: Simplex,
        missing: Simplex,
    },
    /// An `(n-1)`-simplex lies in a number of top simplices other than 1 or 2
    /// (or in exactly 1 when no boundary is allowed).
    NonManifoldLink {
        face: Simplex,
        cofaces: usize,
    },
    InconsistentOrientation {
        face: Simplex,
    },
    InvalidSimplex {
        simplex: Vec<i64>,
        reason: &'static str,
    },
    NotPure {
        expected: usize,
        found: usize,
    },
    DuplicateSimplex {
        simplex: Simplex,
    },
    SignCount {
        expected: usize,
        found: usize,
    },
    BadSign {
        index: usize,
        value: i64,
    },
    Empty,
    NotSimplicial {
        simplex: Simplex,
    },
    Chain(ChainError),
}

impl fmt::Display for ComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexError::NotClosedUnderFaces { simplex, missing } => {
                write!(f, "simplex {simplex:?} is missing its face {missing:?}")
            }
            ComplexError::NonManifoldLink { face, cofaces } => {
                write!(f, "codimension-one face {face:?} lies in {cofaces} top simplices")
            }
            ComplexError::InconsistentOrientation { face } => {
                write!(f, "orientations do not cancel across face {face:?}")
            }
            ComplexError::InvalidSimplex { simplex, reason } => {
                write!(f, "invalid simplex {simplex:?}: {reason}")
            }
            ComplexError::NotPure { expected, found } => {
                write!(f, "top simplices have mixed sizes {expected} and {found}")
            }
            ComplexError::DuplicateSimplex { simplex } => write!(f, "simplex {simplex:?} listed twice"),
            ComplexError::SignCount { expected, found } => {
                write!(f, "{found} orientation signs for {expected} top simplices")
            }
            ComplexError::BadSign { index, value } => {
                write!(f, "orientation sign #{index} is {value}, expected +1 or -1")
            }
            ComplexError::Empty => write!(f, "no top simplices"),
            ComplexError::NotSimplicial { simplex } => {
                write!(f, "image of {simplex:?} is not a simplex of the target")
            }
            ComplexError::Chain(e) => write!(f, "{e}"),
        }
    }
}

impl From<ChainError> for ComplexError {
    fn from(e: ChainError) -> Self {
        ComplexError::Chain(e)
    }
}

/// Finite ordered simplicial complex. Simplices are strictly increasing
/// vertex tuples, stored per dimension in lexicographic order.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    vertex_count: usize,
    by_dim: Vec<Vec<Simplex>>,
    index: HashMap<Simplex, u32>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.by_dim == other.by_dim
    }
}

impl Eq for SimplicialComplex {}

impl SimplicialComplex {
    /// Takes an explicit simplex list, which must already be closed under faces.
    pub fn new(vertex_count: usize, simplices: Vec<Simplex>) -> Result<Self, ComplexError> {
        let set: BTreeSet<Simplex> = simplices.into_iter().collect();
        for s in &set {
            check_simplex(s, vertex_count)?;
            if s.len() > 1 {
                for i in 0..s.len() {
                    let face = drop_vertex(s, i);
                    if !set.contains(&face) {
                        return Err(ComplexError::NotClosedUnderFaces { simplex: s.clone(), missing: face });
                    }
                }
            }
        }
        Ok(Self::from_closed_set(vertex_count, set))
    }

    /// Face closure of a list of simplices.
    pub fn from_maximal(vertex_count: usize, tops: &[Simplex]) -> Result<Self, ComplexError> {
        let mut set: BTreeSet<Simplex> = BTreeSet::new();
        for t in tops {
            check_simplex(t, vertex_count)?;
            let k = t.len();
            for mask in 1u64..(1u64 << k) {
                let face: Simplex = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| t[i]).collect();
                set.insert(face);
            }
        }
        Ok(Self::from_closed_set(vertex_count, set))
    }

    fn from_closed_set(vertex_count: usize, set: BTreeSet<Simplex>) -> Self {
        let dim = set.iter().map(Vec::len).max().unwrap_or(0);
        let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); dim];
        for s in set {
            by_dim[s.len() - 1].push(s);
        }
        let mut index = HashMap::new();
        for list in &by_dim {
            for (i, s) in list.iter().enumerate() {
                index.insert(s.clone(), i as u32);
            }
        }
        SimplicialComplex { vertex_count, by_dim, index }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Dimension; `-1` for the empty complex.
    pub fn dim(&self) -> i32 {
        self.by_dim.len() as i32 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    /// Simplices of dimension `k`, in lexicographic order.
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn total_count(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim.iter().enumerate().map(|(k, l)| if k % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) }).sum()
    }

    /// Index of a simplex within its dimension.
    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        self.index.get(s).map(|&i| i as usize)
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        self.index.contains_key(s)
    }

    /// Global numbering: dimension first, then lexicographic.
    pub fn global_offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.by_dim.len() + 1);
        let mut acc = 0;
        for l in &self.by_dim {
            out.push(acc);
            acc += l.len();
        }
        out.push(acc);
        out
    }

    pub fn global_id(&self, s: &[u32]) -> Option<usize> {
        let k = s.len().checked_sub(1)?;
        let off: usize = self.by_dim[..k].iter().map(Vec::len).sum();
        self.index_of(s).map(|i| off + i)
    }

    /// All simplices in global order.
    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    /// Simplicial chain complex; degree-`k` basis = `k`-simplices, labelled.
    pub fn chain_complex(&self) -> ChainComplex {
        if self.is_empty() {
            return ChainComplex::zero();
        }
        let ranks: Vec<usize> = self.f_vector();
        let boundaries = (1..self.by_dim.len())
            .map(|k| {
                let cols = self.by_dim[k]
                    .iter()
                    .map(|s| {
                        let mut col: Vec<(u32, i64)> = (0..s.len())
                            .map(|i| {
                                let face = drop_vertex(s, i);
                                let r = self.index[&face];
                                (r, if i % 2 == 0 { 1 } else { -1 })
                            })
                            .collect();
                        col.sort_unstable_by_key(|e| e.0);
                        col
                    })
                    .collect();
                SparseMatrix::from_columns(self.by_dim[k - 1].len(), cols)
            })
            .collect();
        let labels = self.by_dim.iter().map(|l| l.iter().map(|s| Label::Simplex(s.clone())).collect()).collect();
        ChainComplex::new(0, ranks, boundaries, Some(labels)).expect("simplicial boundary squares to zero")
    }

    /// Subcomplex of simplices satisfying a predicate that is closed under faces.
    pub fn subcomplex<F: FnMut(&[u32]) -> bool>(&self, mut keep: F) -> Result<Self, ComplexError> {
        let list: Vec<Simplex> = self.all_simplices().filter(|s| keep(s)).cloned().collect();
        SimplicialComplex::new(self.vertex_count, list)
    }

    /// Full subcomplex on a vertex set.
    pub fn full_subcomplex(&self, vertices: &[bool]) -> Self {
        let set: BTreeSet<Simplex> =
            self.all_simplices().filter(|s| s.iter().all(|&v| vertices[v as usize])).cloned().collect();
        Self::from_closed_set(self.vertex_count, set)
    }

    /// Barycentric subdivision. Vertex `i` of the result is the simplex with
    /// global id `i` here; simplices are chains `σ0 ⊂ … ⊂ σk`.
    pub fn barycentric_subdivision(&self) -> SimplicialComplex {
        let offsets = self.global_offsets();
        let gid = |s: &Simplex| offsets[s.len() - 1] + self.index[s] as usize;
        // Immediate cofaces by global id.
        let mut up: Vec<Vec<u32>> = vec![Vec::new(); self.total_count()];
        for k in 1..self.by_dim.len() {
            for s in &self.by_dim[k] {
                let g = gid(s) as u32;
                for i in 0..s.len() {
                    up[gid(&drop_vertex(s, i))].push(g);
                }
            }
        }
        let mut set: BTreeSet<Simplex> = BTreeSet::new();
        let mut stack: Vec<Simplex> = (0..self.total_count() as u32).map(|g| vec![g]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().unwrap() as usize;
            for &c in &up[last] {
                let mut next = chain.clone();
                next.push(c);
                stack.push(next);
            }
            // Every chain is reachable from each of its prefixes; add all subchains
            // by recording chains and closing below.
            set.insert(chain);
        }
        // Chains built by extension through immediate cofaces only skip
        // dimensions never; close under faces to include chains with gaps.
        let tops: Vec<Simplex> = set.into_iter().collect();
        Self::from_maximal(self.total_count(), &tops).expect("chains are valid simplices")
    }
}

fn check_simplex(s: &[u32], vertex_count: usize) -> Result<(), ComplexError> {
    if s.is_empty() {
        return Err(ComplexError::InvalidSimplex { simplex: Vec::new(), reason: "empty simplex" });
    }
    if s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ComplexError::InvalidSimplex {
            simplex: s.iter().map(|&v| v as i64).collect(),
            reason: "vertices not strictly increasing",
        });
    }
    if s.iter().any(|&v| v as usize >= vertex_count) {
        return Err(ComplexError::InvalidSimplex {
            simplex: s.iter().map(|&v| v as i64).collect(),
            reason: "vertex out of range",
        });
    }
    if s.len() > 63 {
        return Err(ComplexError::InvalidSimplex {
            simplex: s.iter().map(|&v| v as i64).collect(),
            reason: "dimension too large",
        });
    }
    Ok(())
}

pub(crate) fn drop_vertex(s: &[u32], i: usize) -> Simplex {
    let mut f = Vec::with_capacity(s.len() - 1);
    f.extend_from_slice(&s[..i]);
    f.extend_from_slice(&s[i + 1..]);
    f
}

/// Parity of the permutation sorting `v` (all entries distinct).
fn sort_parity(v: &[u32]) -> i64 {
    let mut inv = 0usize;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Oriented pseudomanifold, possibly with boundary.
#[derive(Clone, Debug)]
pub struct OrientedManifoldComplex {
    name: String,
    base: Arc<SimplicialComplex>,
    n: usize,
    /// Orientation sign per top simplex, aligned with `base.simplices(n)`.
    signs: Vec<i8>,
    boundary: Arc<SimplicialComplex>,
}

impl OrientedManifoldComplex {
    /// Validates a triangulation given by its top simplices.
    ///
    /// Vertex tuples may be unsorted; a given sign refers to the listed vertex
    /// order and is converted to the sorted order. Without signs an
    /// orientation is propagated across shared faces.
    pub fn from_top_simplices(
        name: &str,
        vertex_count: usize,
        tops: &[Vec<i64>],
        signs: Option<&[i64]>,
        boundary_allowed: bool,
    ) -> Result<Self, ComplexError> {
        if tops.is_empty() {
            return Err(ComplexError::Empty);
        }
        if let Some(s) = signs {
            if s.len() != tops.len() {
                return Err(ComplexError::SignCount { expected: tops.len(), found: s.len() });
            }
        }
        let size = tops[0].len();
        let mut sorted: BTreeMap<Simplex, Option<i8>> = BTreeMap::new();
        for (i, t) in tops.iter().enumerate() {
            if t.len() != size {
                return Err(ComplexError::NotPure { expected: size, found: t.len() });
            }
            if t.iter().any(|&v| v < 0 || v as u64 >= vertex_count as u64) {
                return Err(ComplexError::InvalidSimplex { simplex: t.clone(), reason: "vertex out of range" });
            }
            let raw: Vec<u32> = t.iter().map(|&v| v as u32).collect();
            let mut s = raw.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(ComplexError::InvalidSimplex { simplex: t.clone(), reason: "repeated vertex" });
            }
            let sign = match signs {
                Some(list) => {
                    let v = list[i];
                    if v != 1 && v != -1 {
                        return Err(ComplexError::BadSign { index: i, value: v });
                    }
                    Some((v * sort_parity(&raw)) as i8)
                }
                None => None,
            };
            if sorted.insert(s.clone(), sign).is_some() {
                return Err(ComplexError::DuplicateSimplex { simplex: s });
            }
        }
        let top_list: Vec<Simplex> = sorted.keys().cloned().collect();
        let base = SimplicialComplex::from_maximal(vertex_count, &top_list)?;
        let n = size - 1;
        let given: Option<Vec<i8>> = signs.map(|_| sorted.values().map(|s| s.unwrap()).collect());
        Self::assemble(name, base, n, given, boundary_allowed)
    }

    fn assemble(
        name: &str,
        base: SimplicialComplex,
        n: usize,
        given: Option<Vec<i8>>,
        boundary_allowed: bool,
    ) -> Result<Self, ComplexError> {
        let tops = base.simplices(n).to_vec();
        if tops.len() != base.count(n) || base.dim() != n as i32 {
            return Err(ComplexError::NotPure { expected: n + 1, found: base.dim() as usize + 1 });
        }
        // Cofaces of each codimension-one face: (top index, position of dropped vertex).
        let mut cofaces: Vec<Vec<(usize, usize)>> = vec![Vec::new(); if n > 0 { base.count(n - 1) } else { 0 }];
        if n > 0 {
            for (t, s) in tops.iter().enumerate() {
                for i in 0..s.len() {
                    let f = base.index_of(&drop_vertex(s, i)).unwrap();
                    cofaces[f].push((t, i));
                }
            }
        }
        let mut boundary_faces = Vec::new();
        for (f, list) in cofaces.iter().enumerate() {
            match list.len() {
                2 => {}
                1 if boundary_allowed => boundary_faces.push(base.simplices(n - 1)[f].clone()),
                k => return Err(ComplexError::NonManifoldLink { face: base.simplices(n - 1)[f].clone(), cofaces: k }),
            }
        }
        let parity = |i: usize| if i.is_multiple_of(2) { 1i8 } else { -1 };
        let signs = match given {
            Some(signs) => {
                for (f, list) in cofaces.iter().enumerate() {
                    if let [(a, i), (b, j)] = list[..] {
                        if signs[a] * parity(i) + signs[b] * parity(j) != 0 {
                            return Err(ComplexError::InconsistentOrientation {
                                face: base.simplices(n - 1)[f].clone(),
                            });
                        }
                    }
                }
                signs
            }
            None => {
                let mut signs = vec![0i8; tops.len()];
                let mut adjacent: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); tops.len()];
                for (f, list) in cofaces.iter().enumerate() {
                    if let [(a, i), (b, j)] = list[..] {
                        adjacent[a].push((b, i, j));
                        adjacent[b].push((a, j, i));
                        let _ = f;
                    }
                }
                for start in 0..tops.len() {
                    if signs[start] != 0 {
                        continue;
                    }
                    signs[start] = 1;
                    let mut queue = VecDeque::from([start]);
                    while let Some(a) = queue.pop_front() {
                        for &(b, i, j) in &adjacent[a] {
                            let want = -signs[a] * parity(i) * parity(j);
                            if signs[b] == 0 {
                                signs[b] = want;
                                queue.push_back(b);
                            } else if signs[b] != want {
                                let face = drop_vertex(&tops[a], i);
                                return Err(ComplexError::InconsistentOrientation { face });
                            }
                        }
                    }
                }
                signs
            }
        };
        let boundary = SimplicialComplex::from_maximal(base.vertex_count(), &boundary_faces)?;
        Ok(OrientedManifoldComplex { name: name.into(), base: Arc::new(base), n, signs, boundary: Arc::new(boundary) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Arc<SimplicialComplex> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn boundary(&self) -> &Arc<SimplicialComplex> {
        &self.boundary
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary.is_empty()
    }

    /// Same triangulation with every orientation sign negated.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.name = alloc::format!("-{}", self.name);
        for s in out.signs.iter_mut() {
            *s = -*s;
        }
        out
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    /// `ω = Σ sign(σ) σ` as a sparse chain in degree `n`.
    pub fn fundamental_cycle(&self) -> Vec<(u32, i64)> {
        self.signs.iter().enumerate().map(|(i, &s)| (i as u32, s as i64)).collect()
    }

    /// The boundary as an oriented closed pseudomanifold with the induced orientation.
    pub fn boundary_manifold(&self) -> Result<OrientedManifoldComplex, ComplexError> {
        if !self.has_boundary() {
            return Err(ComplexError::Empty);
        }
        let c = self.base.chain_complex();
        let d = c.apply_boundary(self.n as i32, &self.fundamental_cycle());
        let faces = self.base.simplices(self.n - 1);
        let mut tops = Vec::new();
        let mut signs = Vec::new();
        for (i, v) in d {
            tops.push(faces[i as usize].iter().map(|&x| x as i64).collect::<Vec<i64>>());
            signs.push(v);
        }
        Self::from_top_simplices(
            &alloc::format!("d{}", self.name),
            self.base.vertex_count(),
            &tops,
            Some(&signs),
            false,
        )
    }

    /// Staircase triangulation of the product; vertex `(x, y)` is `x * |V(Y)| + y`.
    pub fn product(&self, other: &OrientedManifoldComplex) -> Result<OrientedManifoldComplex, ComplexError> {
        let (p, q) = (self.n, other.n);
        let ny = other.base.vertex_count();
        let mut tops: Vec<Vec<i64>> = Vec::new();
        let mut signs: Vec<i64> = Vec::new();
        let shuffles = shuffles(p, q);
        for (a, s) in self.base.simplices(p).iter().enumerate() {
            for (b, t) in other.base.simplices(q).iter().enumerate() {
                let base_sign = self.signs[a] as i64 * other.signs[b] as i64;
                for (path, sign) in &shuffles {
                    let (mut i, mut j) = (0usize, 0usize);
                    let mut verts = vec![(s[0] as usize * ny + t[0] as usize) as i64];
                    for &step_x in path {
                        if step_x {
                            i += 1;
                        } else {
                            j += 1;
                        }
                        verts.push((s[i] as usize * ny + t[j] as usize) as i64);
                    }
                    tops.push(verts);
                    signs.push(sign * base_sign);
                }
            }
        }
        let name = alloc::format!("{}x{}", self.name, other.name);
        Self::from_top_simplices(
            &name,
            self.base.vertex_count() * ny,
            &tops,
            Some(&signs),
            self.has_boundary() || other.has_boundary(),
        )
    }

    /// Barycentric subdivision oriented so that its fundamental cycle is the
    /// subdivision of this one.
    pub fn subdivided(&self) -> Result<OrientedManifoldComplex, ComplexError> {
        let sd = self.base.barycentric_subdivision();
        let offsets = self.base.global_offsets();
        let mut tops = Vec::new();
        let mut signs = Vec::new();
        for s in sd.simplices(self.n) {
            let flag: Vec<&Simplex> = s
                .iter()
                .map(|&g| {
                    let k = offsets.partition_point(|&o| o <= g as usize) - 1;
                    &self.base.simplices(k)[g as usize - offsets[k]]
                })
                .collect();
            let top = self.base.index_of(flag[self.n]).unwrap();
            tops.push(s.iter().map(|&v| v as i64).collect::<Vec<i64>>());
            signs.push(self.signs[top] as i64 * flag_sign(&flag));
        }
        Self::from_top_simplices(
            &alloc::format!("sd({})", self.name),
            sd.vertex_count(),
            &tops,
            Some(&signs),
            self.has_boundary(),
        )
    }
}

/// Coefficient of the full flag `σ0 ⊂ … ⊂ σk` in the subdivision of `σk`,
/// for `Sd(τ) = (-1)^k Sd(∂τ) * b_τ`.
fn flag_sign(flag: &[&Simplex]) -> i64 {
    let mut sign = 1i64;
    for k in 1..flag.len() {
        let (small, big) = (flag[k - 1], flag[k]);
        let pos = (0..big.len()).find(|&i| !small.contains(&big[i])).unwrap();
        if (k + pos) % 2 == 1 {
            sign = -sign;
        }
    }
    sign
}

/// Subdivision chain map `C(X) → C(sd X)`.
pub fn subdivision_chain_map(base: &SimplicialComplex, sd: &SimplicialComplex) -> Result<ChainMap, ChainError> {
    let src = Arc::new(base.chain_complex());
    let tgt = Arc::new(sd.chain_complex());
    let offsets = base.global_offsets();
    ChainMap::from_fn(src, tgt, 0, |k, i| {
        let k = k as usize;
        let mut col = Vec::new();
        for (j, s) in sd.simplices(k).iter().enumerate() {
            let g = *s.last().unwrap() as usize;
            if g != offsets[k] + i {
                continue;
            }
            let flag: Vec<&Simplex> = s
                .iter()
                .map(|&g| {
                    let d = offsets.partition_point(|&o| o <= g as usize) - 1;
                    &base.simplices(d)[g as usize - offsets[d]]
                })
                .collect();
            if flag.iter().enumerate().all(|(d, f)| f.len() == d + 1) {
                col.push((j as u32, flag_sign(&flag)));
            }
        }
        col
    })
}

/// All `(p, q)` shuffles as step sequences (`true` = step in the first
/// factor) with their permutation signs.
pub fn shuffles(p: usize, q: usize) -> Vec<(Vec<bool>, i64)> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(p + q);
    fn rec(p: usize, q: usize, path: &mut Vec<bool>, out: &mut Vec<(Vec<bool>, i64)>) {
        if p == 0 && q == 0 {
            // Inversions: each x-step passes over the y-steps before it.
            let mut ys = 0usize;
            let mut inv = 0usize;
            for &s in path.iter() {
                if s {
                    inv += ys;
                } else {
                    ys += 1;
                }
            }
            out.push((path.clone(), if inv.is_multiple_of(2) { 1 } else { -1 }));
            return;
        }
        if p > 0 {
            path.push(true);
            rec(p - 1, q, path, out);
            path.pop();
        }
        if q > 0 {
            path.push(false);
            rec(p, q - 1, path, out);
            path.pop();
        }
    }
    rec(p, q, &mut path, &mut out);
    out
}

/// Vertex map between simplicial complexes sending simplices to simplices.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    vertex_map: Vec<u32>,
}

impl SimplicialMap {
    pub fn new(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        vertex_map: Vec<u32>,
    ) -> Result<Self, ComplexError> {
        assert_eq!(vertex_map.len(), source.vertex_count(), "one image per source vertex");
        for s in source.all_simplices() {
            let img = image_vertices(&vertex_map, s);
            if !target.contains(&img) {
                return Err(ComplexError::NotSimplicial { simplex: s.clone() });
            }
        }
        Ok(SimplicialMap { source, target, vertex_map })
    }

    pub fn identity(c: Arc<SimplicialComplex>) -> Self {
        let vertex_map = (0..c.vertex_count() as u32).collect();
        SimplicialMap { source: c.clone(), target: c, vertex_map }
    }

    /// Constant map onto vertex 0 of a one-point complex.
    pub fn collapse(c: Arc<SimplicialComplex>) -> Self {
        let point = Arc::new(SimplicialComplex::from_maximal(1, &[vec![0]]).unwrap());
        SimplicialMap { vertex_map: vec![0; c.vertex_count()], source: c, target: point }
    }

    pub fn source(&self) -> &Arc<SimplicialComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SimplicialComplex> {
        &self.target
    }

    pub fn vertex_map(&self) -> &[u32] {
        &self.vertex_map
    }

    /// Sorted image simplex of `s`.
    pub fn image(&self, s: &[u32]) -> Simplex {
        image_vertices(&self.vertex_map, s)
    }

    pub fn compose(&self, first: &SimplicialMap) -> SimplicialMap {
        let vertex_map = first.vertex_map.iter().map(|&v| self.vertex_map[v as usize]).collect();
        SimplicialMap { source: first.source.clone(), target: self.target.clone(), vertex_map }
    }

    /// Whether the vertex map is weakly increasing on every simplex.
    pub fn is_order_preserving(&self) -> bool {
        self.source
            .all_simplices()
            .all(|s| s.windows(2).all(|w| self.vertex_map[w[0] as usize] <= self.vertex_map[w[1] as usize]))
    }

    /// Induced map on normalized ordered chains.
    pub fn chain_map(&self) -> Result<ChainMap, ChainError> {
        let src = Arc::new(self.source.chain_complex());
        let tgt = Arc::new(self.target.chain_complex());
        ChainMap::from_fn(src, tgt, 0, |k, i| {
            let s = &self.source.simplices(k as usize)[i];
            let raw: Vec<u32> = s.iter().map(|&v| self.vertex_map[v as usize]).collect();
            let img = image_vertices(&self.vertex_map, s);
            if img.len() < raw.len() {
                return Vec::new();
            }
            vec![(self.target.index_of(&img).unwrap() as u32, sort_parity(&raw))]
        })
    }
}

fn image_vertices(map: &[u32], s: &[u32]) -> Simplex {
    let mut img: Simplex = s.iter().map(|&v| map[v as usize]).collect();
    img.sort_unstable();
    img.dedup();
    img
}

/// Last-vertex map `sd X → X`: the barycenter of `σ` goes to `max σ`.
pub fn last_vertex_map(base: &SimplicialComplex, sd: &SimplicialComplex) -> SimplicialMap {
    let vertex_map = base.all_simplices().map(|s| *s.last().unwrap()).collect();
    SimplicialMap { source: Arc::new(sd.clone()), target: Arc::new(base.clone()), vertex_map }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_count_and_signs() {
        let s = shuffles(1, 1);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0], (vec![true, false], 1));
        assert_eq!(s[1], (vec![false, true], -1));
        assert_eq!(shuffles(2, 2).len(), 6);
    }

    #[test]
    fn subdivision_of_edge() {
        let e = SimplicialComplex::from_maximal(2, &[vec![0, 1]]).unwrap();
        let sd = e.barycentric_subdivision();
        assert_eq!(sd.f_vector(), vec![3, 2]);
    }

    #[test]
    fn not_closed_is_reported() {
        let err = SimplicialComplex::new(3, vec![vec![0], vec![1], vec![0, 1, 2]]).unwrap_err();
        assert!(matches!(err, ComplexError::NotClosedUnderFaces { .. }));
    }
}
