//! Opens of a finite cell poset: up-closed sets of cells.
//!
//! For a simplicial complex the cells are its simplices ordered by the face
//! relation, and an up-set is a union of open simplices. Products of spaces
//! use the product order on pairs of cells.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::simplicial::{drop_vertex, SimplicialComplex};

/// Bitset over cells.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Open {
    bits: Vec<u64>,
}

impl Open {
    pub fn empty(n: usize) -> Self {
        Open { bits: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut o = Self::empty(n);
        for i in 0..n {
            o.insert(i);
        }
        o
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn union(&self, other: &Self) -> Self {
        Open { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect() }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Open { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect() }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Open { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect() }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .flat_map(|(w, &b)| (0..64).filter(move |i| b >> i & 1 == 1).map(move |i| w * 64 + i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyError {
    UnknownSimplex(Vec<u32>),
    FamilyTooLarge { cap: usize },
    NotUpClosed { index: usize },
    MissingEmptyOrTotal,
    NotUnionClosed { a: usize, b: usize },
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::UnknownSimplex(s) => write!(f, "seed {s:?} is not a simplex of the complex"),
            FamilyError::FamilyTooLarge { cap } => write!(f, "open family exceeds the cap of {cap} opens"),
            FamilyError::NotUpClosed { index } => write!(f, "open #{index} is not up-closed"),
            FamilyError::MissingEmptyOrTotal => write!(f, "family must contain the empty set and the whole space"),
            FamilyError::NotUnionClosed { a, b } => write!(f, "union of opens #{a} and #{b} is not in the family"),
        }
    }
}

/// Finite poset of cells with cached up- and down-closures.
#[derive(Clone, Debug)]
pub struct CellSpace {
    names: Vec<String>,
    /// Immediate successors (cofaces) of each cell.
    up: Vec<Vec<u32>>,
    /// Immediate predecessors (faces).
    down: Vec<Vec<u32>>,
    /// Cells that are minimal ("vertices").
    minimal: Vec<u32>,
    factors: Option<(Arc<CellSpace>, Arc<CellSpace>)>,
}

impl CellSpace {
    /// Face poset of a simplicial complex, cells numbered in global order.
    pub fn face_poset(x: &SimplicialComplex) -> Self {
        let offsets = x.global_offsets();
        let n = x.total_count();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        let mut names = Vec::with_capacity(n);
        for (g, s) in x.all_simplices().enumerate() {
            names.push(simplex_name(s));
            if s.len() > 1 {
                for i in 0..s.len() {
                    let f = drop_vertex(s, i);
                    let fg = offsets[f.len() - 1] + x.index_of(&f).unwrap();
                    up[fg].push(g as u32);
                    down[g].push(fg as u32);
                }
            }
        }
        let minimal = (0..x.count(0) as u32).collect();
        CellSpace { names, up, down, minimal, factors: None }
    }

    /// Product poset; cell `(a, b)` is `a * |B| + b`.
    pub fn product(a: Arc<CellSpace>, b: Arc<CellSpace>) -> Self {
        let (na, nb) = (a.len(), b.len());
        let mut up = vec![Vec::new(); na * nb];
        let mut down = vec![Vec::new(); na * nb];
        let mut names = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                let c = i * nb + j;
                names.push(alloc::format!("{}x{}", a.names[i], b.names[j]));
                for &u in &a.up[i] {
                    up[c].push(u * nb as u32 + j as u32);
                }
                for &u in &b.up[j] {
                    up[c].push((i * nb) as u32 + u);
                }
                for &d in &a.down[i] {
                    down[c].push(d * nb as u32 + j as u32);
                }
                for &d in &b.down[j] {
                    down[c].push((i * nb) as u32 + d);
                }
            }
        }
        let minimal = a.minimal.iter().flat_map(|&i| b.minimal.iter().map(move |&j| i * nb as u32 + j)).collect();
        CellSpace { names, up, down, minimal, factors: Some((a, b)) }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, c: usize) -> &str {
        &self.names[c]
    }

    pub fn minimal_cells(&self) -> &[u32] {
        &self.minimal
    }

    pub fn factors(&self) -> Option<&(Arc<CellSpace>, Arc<CellSpace>)> {
        self.factors.as_ref()
    }

    pub fn empty_open(&self) -> Open {
        Open::empty(self.len())
    }

    pub fn total(&self) -> Open {
        Open::full(self.len())
    }

    /// Up-closure of a set of cells (open star of a closed set's cells).
    pub fn up_closure<I: IntoIterator<Item = usize>>(&self, cells: I) -> Open {
        let mut o = self.empty_open();
        let mut stack: Vec<usize> = cells.into_iter().collect();
        while let Some(c) = stack.pop() {
            if o.contains(c) {
                continue;
            }
            o.insert(c);
            stack.extend(self.up[c].iter().map(|&u| u as usize));
        }
        o
    }

    /// Down-closure (closed cell or subcomplex generated by cells).
    pub fn down_closure<I: IntoIterator<Item = usize>>(&self, cells: I) -> Open {
        let mut o = self.empty_open();
        let mut stack: Vec<usize> = cells.into_iter().collect();
        while let Some(c) = stack.pop() {
            if o.contains(c) {
                continue;
            }
            o.insert(c);
            stack.extend(self.down[c].iter().map(|&d| d as usize));
        }
        o
    }

    pub fn is_up_closed(&self, o: &Open) -> bool {
        o.iter().all(|c| self.up[c].iter().all(|&u| o.contains(u as usize)))
    }

    pub fn is_down_closed(&self, o: &Open) -> bool {
        o.iter().all(|c| self.down[c].iter().all(|&d| o.contains(d as usize)))
    }

    /// Largest down-closed set inside `u`.
    pub fn max_closed_in(&self, u: &Open) -> Open {
        let mut k = self.empty_open();
        // A cell belongs iff it and all its faces lie in u; faces come first in
        // any linear extension, so process by increasing down-closure size.
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&c| self.down_closure([c]).len());
        for c in order {
            if u.contains(c) && self.down[c].iter().all(|&d| k.contains(d as usize)) {
                k.insert(c);
            }
        }
        k
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up_closure([a]).contains(b)
    }
}

fn simplex_name(s: &[u32]) -> String {
    let parts: Vec<String> = s.iter().map(|v| alloc::format!("{v}")).collect();
    alloc::format!("[{}]", parts.join(","))
}

/// Finite family of opens containing `∅` and the whole space, closed under
/// unions. Meets are taken in the family order: the largest member contained
/// in the set-theoretic intersection.
#[derive(Clone, Debug)]
pub struct OpenFamily {
    space: Arc<CellSpace>,
    opens: Vec<Open>,
    labels: Vec<String>,
}

impl OpenFamily {
    /// Validates a family given explicitly.
    pub fn new(space: Arc<CellSpace>, opens: Vec<Open>, labels: Vec<String>) -> Result<Self, FamilyError> {
        assert_eq!(opens.len(), labels.len());
        for (i, o) in opens.iter().enumerate() {
            if !space.is_up_closed(o) {
                return Err(FamilyError::NotUpClosed { index: i });
            }
        }
        let set: BTreeSet<&Open> = opens.iter().collect();
        if !set.contains(&space.empty_open()) || !set.contains(&space.total()) {
            return Err(FamilyError::MissingEmptyOrTotal);
        }
        for a in 0..opens.len() {
            for b in a + 1..opens.len() {
                if !set.contains(&opens[a].union(&opens[b])) {
                    return Err(FamilyError::NotUnionClosed { a, b });
                }
            }
        }
        Ok(OpenFamily { space, opens, labels })
    }

    fn unchecked(space: Arc<CellSpace>, opens: Vec<Open>, labels: Vec<String>) -> Self {
        OpenFamily { space, opens, labels }
    }

    pub fn space(&self) -> &Arc<CellSpace> {
        &self.space
    }

    pub fn opens(&self) -> &[Open] {
        &self.opens
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn len(&self) -> usize {
        self.opens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opens.is_empty()
    }

    pub fn position(&self, o: &Open) -> Option<usize> {
        self.opens.iter().position(|x| x == o)
    }

    /// Whether set-theoretic intersections stay in the family.
    pub fn is_intersection_closed(&self) -> bool {
        let set: BTreeSet<&Open> = self.opens.iter().collect();
        (0..self.len()).all(|a| (a + 1..self.len()).all(|b| set.contains(&self.opens[a].intersection(&self.opens[b]))))
    }

    /// Largest member contained in `u ∩ v`.
    pub fn meet(&self, u: &Open, v: &Open) -> Open {
        let w = u.intersection(v);
        self.opens
            .iter()
            .filter(|o| o.is_subset(&w))
            .max_by_key(|o| o.len())
            .cloned()
            .unwrap_or_else(|| self.space.empty_open())
    }

    /// Smallest member containing the closed cell `c`, if there is a unique one.
    pub fn smallest_open_containing(&self, c: usize) -> Option<Open> {
        let closed = self.space.down_closure([c]);
        let containing: Vec<&Open> = self.opens.iter().filter(|o| closed.is_subset(o)).collect();
        let min = containing.iter().min_by_key(|o| o.len())?;
        containing.iter().all(|o| min.is_subset(o)).then(|| (*min).clone())
    }

    pub fn max_closed_subcomplex_in(&self, u: &Open) -> Open {
        self.space.max_closed_in(u)
    }

    /// Product family `{U × V}` on the product space.
    pub fn product(a: &OpenFamily, b: &OpenFamily) -> OpenFamily {
        let space = Arc::new(CellSpace::product(a.space.clone(), b.space.clone()));
        let nb = b.space.len();
        let mut opens = Vec::new();
        let mut labels = Vec::new();
        for (i, u) in a.opens.iter().enumerate() {
            for (j, v) in b.opens.iter().enumerate() {
                let mut o = space.empty_open();
                for x in u.iter() {
                    for y in v.iter() {
                        o.insert(x * nb + y);
                    }
                }
                opens.push(o);
                labels.push(alloc::format!("{}x{}", a.labels[i], b.labels[j]));
            }
        }
        OpenFamily::unchecked(space, opens, labels)
    }
}

/// `{St(S) : S ⊆ V}`: unions of open vertex stars, a Boolean lattice.
pub fn star_union_family(x: &SimplicialComplex, cap: usize) -> Result<OpenFamily, FamilyError> {
    let nv = x.count(0);
    if nv >= 63 || (1usize << nv) > cap {
        return Err(FamilyError::FamilyTooLarge { cap });
    }
    let space = Arc::new(CellSpace::face_poset(x));
    let stars: Vec<Open> = (0..nv).map(|v| space.up_closure([v])).collect();
    let mut opens = Vec::with_capacity(1 << nv);
    let mut labels = Vec::with_capacity(1 << nv);
    for mask in 0usize..(1 << nv) {
        let mut o = space.empty_open();
        let mut names = Vec::new();
        for (v, star) in stars.iter().enumerate() {
            if mask >> v & 1 == 1 {
                o = o.union(star);
                names.push(alloc::format!("{}", x.simplices(0)[v][0]));
            }
        }
        opens.push(o);
        labels.push(alloc::format!("St{{{}}}", names.join(",")));
    }
    Ok(OpenFamily::unchecked(space, opens, labels))
}

/// Lattice generated by the open stars of `seeds` under union and
/// intersection, plus `∅` and the whole space.
pub fn open_star_family(x: &SimplicialComplex, seeds: &[Vec<u32>], cap: usize) -> Result<OpenFamily, FamilyError> {
    let space = Arc::new(CellSpace::face_poset(x));
    let mut gens = Vec::new();
    for s in seeds {
        let g = x.global_id(s).ok_or_else(|| FamilyError::UnknownSimplex(s.clone()))?;
        gens.push(space.up_closure([g]));
    }
    let mut set: BTreeSet<Open> = BTreeSet::new();
    set.insert(space.empty_open());
    set.insert(space.total());
    let mut frontier: Vec<Open> = Vec::new();
    for g in gens {
        if set.insert(g.clone()) {
            frontier.push(g);
        }
    }
    while let Some(a) = frontier.pop() {
        let current: Vec<Open> = set.iter().cloned().collect();
        for b in current {
            for c in [a.union(&b), a.intersection(&b)] {
                if !set.contains(&c) {
                    if set.len() >= cap {
                        return Err(FamilyError::FamilyTooLarge { cap });
                    }
                    set.insert(c.clone());
                    frontier.push(c);
                }
            }
        }
    }
    // Deterministic order: by size, then bit pattern.
    let mut opens: Vec<Open> = set.into_iter().collect();
    opens.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let labels = opens.iter().map(|o| open_label(&space, o)).collect();
    Ok(OpenFamily::unchecked(space, opens, labels))
}

/// Label listing the minimal cells of an open (its generators).
pub fn open_label(space: &CellSpace, o: &Open) -> String {
    if o.is_empty() {
        return String::from("{}");
    }
    let gens: Vec<&str> =
        o.iter().filter(|&c| space.down[c].iter().all(|&d| !o.contains(d as usize))).map(|c| space.name(c)).collect();
    alloc::format!("St{{{}}}", gens.join(","))
}

/// Counts the up-sets of a small poset (brute force; used as an oracle).
pub fn count_up_sets(space: &CellSpace) -> usize {
    let n = space.len();
    assert!(n <= 24, "brute-force enumeration only for tiny posets");
    let mut count = 0;
    for mask in 0u32..(1 << n) {
        let ok = (0..n).all(|c| mask >> c & 1 == 0 || space.up[c].iter().all(|&u| mask >> u & 1 == 1));
        if ok {
            count += 1;
        }
    }
    count
}

/// Groups opens by size (handy for deterministic reports).
pub fn size_histogram(f: &OpenFamily) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for o in &f.opens {
        *h.entry(o.len()).or_insert(0) += 1;
    }
    h
}
