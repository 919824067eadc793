//! Local systems of chain complexes over a finite lattice of opens, finite
//! homotopy (co)limits over posets, and the per-open duality, descent and
//! excision verdicts.
//!
//! A local system assigns to every open `U` the subcomplex `C(U)` spanned by
//! a subset of a fixed basis. The usual source is a carrier: each basis
//! element carries a finite set of cells and lies in `C(U)` exactly when its
//! carrier does. Carriers of faces are contained in carriers of cofaces, so
//! every `C(U)` is a subcomplex and `C(U ∩ V) = C(U) ∩ C(V)` holds for all
//! up-sets, not only for members of the family.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use num_bigint::BigInt;

use crate::chain::{
    dual_complex, homology, induced_map, is_iso_matrix, mapping_cone, tensor_complex, ChainComplex, ChainError,
    ChainMap, HomologyBasis, HomologyGroup, TensorLayout,
};
use crate::equivariant::TensorChain;
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::open::{CellSpace, FamilyError, Open, OpenFamily};
use crate::simplicial::{SimplicialComplex, SimplicialMap};
use crate::snf::{rank, smith_diagonal, smith_with_transforms};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalError {
    EmptyNotZero,
    TotalMismatch,
    NotIntersectionCompatible {
        a: usize,
        b: usize,
    },
    NotSubcomplex {
        open: usize,
    },
    NotSimplicial,
    /// The carrier of a face is not inside the closure of its coface's carrier.
    CarrierNotMonotone {
        degree: i32,
        index: usize,
    },
    OpenNotInFamily,
    SpaceMismatch,
    WindowTooNarrow {
        degree: i32,
        lo: i32,
        hi: i32,
    },
    HypothesisViolated(&'static str),
    PosetTooLarge {
        size: usize,
        cap: usize,
    },
    NotACycle,
    CoverViolation,
    /// A term of the cycle has its front in the relative window but its back outside the open.
    CoordinateOutsideWindow,
    Family(FamilyError),
    Chain(ChainError),
}

impl fmt::Display for LocalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalError::EmptyNotZero => write!(f, "C(∅) is not zero"),
            LocalError::TotalMismatch => write!(f, "C(X) is not the total complex"),
            LocalError::NotIntersectionCompatible { a, b } => {
                write!(f, "C(U ∩ V) differs from C(U) ∩ C(V) for opens {a} and {b}")
            }
            LocalError::NotSubcomplex { open } => write!(f, "C(U) is not a subcomplex for open {open}"),
            LocalError::NotSimplicial => write!(f, "map is not simplicial"),
            LocalError::CarrierNotMonotone { degree, index } => {
                write!(f, "carrier of a face escapes its coface (degree {degree}, generator {index})")
            }
            LocalError::OpenNotInFamily => write!(f, "open is not a member of the family"),
            LocalError::SpaceMismatch => write!(f, "local systems live over different spaces"),
            LocalError::WindowTooNarrow { degree, lo, hi } => {
                write!(f, "degree {degree} is not certified by the window [{lo}, {hi}]")
            }
            LocalError::HypothesisViolated(what) => write!(f, "hypothesis violated: {what}"),
            LocalError::PosetTooLarge { size, cap } => write!(f, "poset has {size} elements or chains, cap is {cap}"),
            LocalError::NotACycle => write!(f, "element is not a cycle"),
            LocalError::CoverViolation => write!(f, "the two opens do not cover the space"),
            LocalError::CoordinateOutsideWindow => write!(f, "coordinate of the cycle leaves the open"),
            LocalError::Family(e) => write!(f, "{e}"),
            LocalError::Chain(e) => write!(f, "{e}"),
        }
    }
}

impl From<ChainError> for LocalError {
    fn from(e: ChainError) -> Self {
        LocalError::Chain(e)
    }
}

impl From<FamilyError> for LocalError {
    fn from(e: FamilyError) -> Self {
        LocalError::Family(e)
    }
}

/// Subset of the basis of an ambient complex, listed per ambient degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisSet {
    lo: i32,
    kept: Vec<Vec<usize>>,
}

impl BasisSet {
    pub fn from_fn<F: FnMut(i32, usize) -> bool>(ambient: &ChainComplex, mut keep: F) -> Self {
        if ambient.is_zero() {
            return BasisSet { lo: 0, kept: Vec::new() };
        }
        let kept = ambient.degrees().map(|n| (0..ambient.rank(n)).filter(|&i| keep(n, i)).collect()).collect();
        BasisSet { lo: ambient.lo(), kept }
    }

    pub fn full(ambient: &ChainComplex) -> Self {
        Self::from_fn(ambient, |_, _| true)
    }

    pub fn empty(ambient: &ChainComplex) -> Self {
        Self::from_fn(ambient, |_, _| false)
    }

    pub fn in_degree(&self, n: i32) -> &[usize] {
        let k = n - self.lo;
        if k < 0 || k as usize >= self.kept.len() {
            return &[];
        }
        &self.kept[k as usize]
    }

    pub fn position(&self, n: i32, i: usize) -> Option<usize> {
        self.in_degree(n).binary_search(&i).ok()
    }

    pub fn contains(&self, n: i32, i: usize) -> bool {
        self.position(n, i).is_some()
    }

    pub fn len(&self) -> usize {
        self.kept.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nonzero degrees as `(lowest, highest)`.
    pub fn span(&self) -> Option<(i32, i32)> {
        let first = self.kept.iter().position(|v| !v.is_empty())?;
        let last = self.kept.iter().rposition(|v| !v.is_empty())?;
        Some((self.lo + first as i32, self.lo + last as i32))
    }

    pub fn is_subset(&self, other: &BasisSet) -> bool {
        self.kept.iter().enumerate().all(|(k, v)| v.iter().all(|&i| other.contains(self.lo + k as i32, i)))
    }

    pub fn intersection(&self, other: &BasisSet) -> BasisSet {
        BasisSet {
            lo: self.lo,
            kept: self
                .kept
                .iter()
                .enumerate()
                .map(|(k, v)| v.iter().copied().filter(|&i| other.contains(self.lo + k as i32, i)).collect())
                .collect(),
        }
    }

    pub fn union(&self, other: &BasisSet) -> BasisSet {
        BasisSet {
            lo: self.lo,
            kept: self
                .kept
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let mut all: Vec<usize> = v.iter().chain(other.in_degree(self.lo + k as i32)).copied().collect();
                    all.sort_unstable();
                    all.dedup();
                    all
                })
                .collect(),
        }
    }

    /// `self ∖ other`.
    pub fn difference(&self, other: &BasisSet) -> BasisSet {
        BasisSet {
            lo: self.lo,
            kept: self
                .kept
                .iter()
                .enumerate()
                .map(|(k, v)| v.iter().copied().filter(|&i| !other.contains(self.lo + k as i32, i)).collect())
                .collect(),
        }
    }

    /// Restriction of the ambient boundary; a genuine complex when the set is
    /// a subquotient.
    pub fn complex(&self, ambient: &ChainComplex) -> Result<ChainComplex, ChainError> {
        if ambient.is_zero() {
            return Ok(ChainComplex::zero());
        }
        ambient.restrict_to(&self.kept)
    }

    /// Whether the span is closed under the ambient boundary.
    pub fn is_subcomplex(&self, ambient: &ChainComplex) -> bool {
        self.kept.iter().enumerate().all(|(k, v)| {
            let n = self.lo + k as i32;
            match ambient.boundary_ref(n) {
                Some(d) => v.iter().all(|&i| d.col(i).iter().all(|&(r, _)| self.contains(n - 1, r as usize))),
                None => true,
            }
        })
    }

    /// Basis-identity map between two restrictions (inclusion, projection or both).
    pub fn transfer(
        &self,
        to: &BasisSet,
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
    ) -> Result<ChainMap, ChainError> {
        ChainMap::from_fn(source, target, 0, |n, j| {
            let a = self.in_degree(n)[j];
            to.position(n, a).map(|t| vec![(t as u32, 1)]).unwrap_or_default()
        })
    }
}

#[derive(Clone, Debug)]
enum Membership {
    /// Carrier cells per generator, per degree of the total complex.
    Carriers(Vec<Vec<Vec<u32>>>),
    /// Explicit subcomplex per member of the family.
    Table(Vec<BasisSet>),
}

/// A chain complex filtered by the opens of a finite space.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    family: Arc<OpenFamily>,
    total: Arc<ChainComplex>,
    membership: Membership,
}

impl LocalSystem {
    /// Carrier-defined system. Carriers must be nonempty and monotone along
    /// the boundary (each face's carrier lies in the closure of the coface's).
    pub fn from_carriers(
        family: Arc<OpenFamily>,
        total: Arc<ChainComplex>,
        carriers: Vec<Vec<Vec<u32>>>,
    ) -> Result<Self, LocalError> {
        let space = family.space().clone();
        if !total.is_zero() {
            assert_eq!(carriers.len(), total.degrees().count(), "one carrier list per degree");
        }
        for (k, list) in carriers.iter().enumerate() {
            let n = total.lo() + k as i32;
            assert_eq!(list.len(), total.rank(n), "one carrier per generator");
            for (i, c) in list.iter().enumerate() {
                if c.is_empty() {
                    return Err(LocalError::EmptyNotZero);
                }
                let closure = space.up_closure(c.iter().map(|&x| x as usize));
                if let Some(d) = total.boundary_ref(n) {
                    for &(r, _) in d.col(i) {
                        if !carriers[k - 1][r as usize].iter().all(|&x| closure.contains(x as usize)) {
                            return Err(LocalError::CarrierNotMonotone { degree: n, index: i });
                        }
                    }
                }
            }
        }
        Ok(LocalSystem { family, total, membership: Membership::Carriers(carriers) })
    }

    /// Explicit table of subcomplexes, one per member of the family; all
    /// sheaf invariants are checked.
    pub fn from_table(
        family: Arc<OpenFamily>,
        total: Arc<ChainComplex>,
        table: Vec<BasisSet>,
    ) -> Result<Self, LocalError> {
        assert_eq!(table.len(), family.len());
        let space = family.space();
        for (i, (o, set)) in family.opens().iter().zip(&table).enumerate() {
            if o.is_empty() && !set.is_empty() {
                return Err(LocalError::EmptyNotZero);
            }
            if *o == space.total() && set.len() != total.total_rank() {
                return Err(LocalError::TotalMismatch);
            }
            if !set.is_subcomplex(&total) {
                return Err(LocalError::NotSubcomplex { open: i });
            }
        }
        for a in 0..family.len() {
            for b in a + 1..family.len() {
                let w = family.opens()[a].intersection(&family.opens()[b]);
                if let Some(c) = family.position(&w) {
                    if table[c] != table[a].intersection(&table[b]) {
                        return Err(LocalError::NotIntersectionCompatible { a, b });
                    }
                }
            }
        }
        Ok(LocalSystem { family, total, membership: Membership::Table(table) })
    }

    pub fn family(&self) -> &Arc<OpenFamily> {
        &self.family
    }

    pub fn space(&self) -> &Arc<CellSpace> {
        self.family.space()
    }

    pub fn total(&self) -> &Arc<ChainComplex> {
        &self.total
    }

    pub fn is_carrier_based(&self) -> bool {
        matches!(self.membership, Membership::Carriers(_))
    }

    /// Carrier of a generator, if the system is carrier based.
    pub fn carrier(&self, n: i32, i: usize) -> Option<&[u32]> {
        match &self.membership {
            Membership::Carriers(c) => Some(&c[(n - self.total.lo()) as usize][i]),
            Membership::Table(_) => None,
        }
    }

    /// Basis of `C(U)`.
    pub fn basis(&self, u: &Open) -> Result<BasisSet, LocalError> {
        match &self.membership {
            Membership::Carriers(_) => Ok(self.carrier_set(|c| c.iter().all(|&x| u.contains(x as usize)))),
            Membership::Table(t) => {
                let p = self.family.position(u).ok_or(LocalError::OpenNotInFamily)?;
                Ok(t[p].clone())
            }
        }
    }

    fn carrier_set<F: FnMut(&[u32]) -> bool>(&self, mut keep: F) -> BasisSet {
        let Membership::Carriers(c) = &self.membership else { unreachable!() };
        let lo = self.total.lo();
        BasisSet::from_fn(&self.total, |n, i| keep(&c[(n - lo) as usize][i]))
    }

    pub fn member(&self, n: i32, i: usize, u: &Open) -> Result<bool, LocalError> {
        Ok(self.basis(u)?.contains(n, i))
    }

    /// `C(U)` as a chain complex.
    pub fn complex(&self, u: &Open) -> Result<ChainComplex, LocalError> {
        Ok(self.basis(u)?.complex(&self.total)?)
    }

    /// `C(U, U ∖ K)`: generators of `C(U)` not in `C(U ∖ K)`.
    pub fn relative_basis(&self, u: &Open, k: &Open) -> Result<BasisSet, LocalError> {
        let all = self.basis(u)?;
        let rest = u.difference(k);
        Ok(all.difference(&self.basis(&rest)?))
    }

    /// Smallest open containing a generator: the up-closure of its carrier,
    /// or the intersection of all family members containing it.
    pub fn minimal_open(&self, n: i32, i: usize) -> Open {
        let space = self.space();
        match &self.membership {
            Membership::Carriers(c) => {
                space.up_closure(c[(n - self.total.lo()) as usize][i].iter().map(|&x| x as usize))
            }
            Membership::Table(t) => {
                let mut acc = space.total();
                for (o, set) in self.family.opens().iter().zip(t) {
                    if set.contains(n, i) {
                        acc = acc.intersection(o);
                    }
                }
                acc
            }
        }
    }

    /// Every generator has a minimal open `M` with `σ ∈ C(V) ⇔ M ⊆ V` over the family.
    pub fn check_free(&self) -> Result<bool, LocalError> {
        for n in self.total.degrees().filter(|_| !self.total.is_zero()) {
            for i in 0..self.total.rank(n) {
                let m = self.minimal_open(n, i);
                for o in self.family.opens() {
                    if self.member(n, i, o)? != m.is_subset(o) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Re-checks the four sheaf invariants over the family.
    pub fn check_invariants(&self) -> Result<(), LocalError> {
        let space = self.space();
        if !self.basis(&space.empty_open())?.is_empty() {
            return Err(LocalError::EmptyNotZero);
        }
        if self.basis(&space.total())?.len() != self.total.total_rank() {
            return Err(LocalError::TotalMismatch);
        }
        let opens = self.family.opens();
        let bases: Vec<BasisSet> = opens.iter().map(|o| self.basis(o)).collect::<Result<_, _>>()?;
        for (i, b) in bases.iter().enumerate() {
            if !b.is_subcomplex(&self.total) {
                return Err(LocalError::NotSubcomplex { open: i });
            }
        }
        for a in 0..opens.len() {
            for b in a + 1..opens.len() {
                let w = opens[a].intersection(&opens[b]);
                let ok = match self.basis(&w) {
                    Ok(s) => s == bases[a].intersection(&bases[b]),
                    Err(LocalError::OpenNotInFamily) => true,
                    Err(e) => return Err(e),
                };
                if !ok {
                    return Err(LocalError::NotIntersectionCompatible { a, b });
                }
            }
        }
        Ok(())
    }

    /// Same total complex and membership over another family on the same space.
    pub fn with_family(&self, family: Arc<OpenFamily>) -> Result<Self, LocalError> {
        if family.space().len() != self.space().len() {
            return Err(LocalError::SpaceMismatch);
        }
        match &self.membership {
            Membership::Carriers(c) => {
                Ok(LocalSystem { family, total: self.total.clone(), membership: Membership::Carriers(c.clone()) })
            }
            Membership::Table(_) => {
                let table = family.opens().iter().map(|o| self.basis(o)).collect::<Result<_, _>>()?;
                LocalSystem::from_table(family, self.total.clone(), table)
            }
        }
    }
}

/// Global cell id of each simplex.
fn global_ids(x: &SimplicialComplex, s: &[u32]) -> u32 {
    x.global_id(s).expect("simplex of the complex") as u32
}

/// Guide object of a simplicial map `f: Y → X`: `σ ∈ C(U)` iff every vertex
/// of `f(σ)` lies in `U`.
pub fn guide_object(f: &SimplicialMap, family: Arc<OpenFamily>) -> Result<LocalSystem, LocalError> {
    let x = f.target();
    if family.space().len() != x.total_count() {
        return Err(LocalError::SpaceMismatch);
    }
    let y = f.source();
    let total = Arc::new(y.chain_complex());
    let carriers = (0..=y.dim().max(0) as usize)
        .map(|k| {
            y.simplices(k)
                .iter()
                .map(|s| {
                    let img = f.image(s);
                    let mut c: Vec<u32> = img.iter().map(|&v| global_ids(x, &[v])).collect();
                    c.sort_unstable();
                    c
                })
                .collect()
        })
        .collect();
    LocalSystem::from_carriers(family, total, carriers)
}

/// Chains of the barycentric subdivision, each flag `σ0 < … < σp` carried by
/// its cells. `C(U)` is then the subdivided subcomplex on the barycenters in
/// `U`, a deformation retract of `U`.
pub fn subdivision_guide(
    x: &SimplicialComplex,
    family: Arc<OpenFamily>,
) -> Result<(LocalSystem, Arc<SimplicialComplex>), LocalError> {
    if family.space().len() != x.total_count() {
        return Err(LocalError::SpaceMismatch);
    }
    let sd = Arc::new(x.barycentric_subdivision());
    let total = Arc::new(sd.chain_complex());
    let carriers = (0..=sd.dim().max(0) as usize).map(|k| sd.simplices(k).to_vec()).collect();
    Ok((LocalSystem::from_carriers(family, total, carriers)?, sd))
}

/// `C ⊗ D` over the product space with product carriers.
pub fn product_system(c: &LocalSystem, d: &LocalSystem) -> Result<LocalSystem, LocalError> {
    let family = Arc::new(OpenFamily::product(c.family(), d.family()));
    let layout = TensorLayout::new(c.total(), d.total());
    let total = Arc::new(tensor_complex(c.total(), d.total())?);
    let nb = d.space().len() as u32;
    let mut carriers = Vec::new();
    for n in total.degrees().filter(|_| !total.is_zero()) {
        let mut list = Vec::with_capacity(total.rank(n));
        for i in 0..total.rank(n) {
            let (p, a, q, b) = layout.split(n, i);
            let (Some(ca), Some(cb)) = (c.carrier(p, a), d.carrier(q, b)) else {
                return Err(LocalError::HypothesisViolated("product of table-based systems"));
            };
            let mut cell: Vec<u32> = ca.iter().flat_map(|&x| cb.iter().map(move |&y| x * nb + y)).collect();
            cell.sort_unstable();
            list.push(cell);
        }
        carriers.push(list);
    }
    LocalSystem::from_carriers(family, total, carriers)
}

/// `g_* C(U) = C(g⁻¹ U)` along a simplicial map of the underlying spaces.
pub fn pushforward(g: &SimplicialMap, c: &LocalSystem, target: Arc<OpenFamily>) -> Result<LocalSystem, LocalError> {
    let x = g.source();
    let z = g.target();
    if c.space().len() != x.total_count() || target.space().len() != z.total_count() {
        return Err(LocalError::SpaceMismatch);
    }
    let cell_image: Vec<u32> = x.all_simplices().map(|s| global_ids(z, &g.image(s))).collect();
    match &c.membership {
        Membership::Carriers(cs) => {
            let carriers = cs
                .iter()
                .map(|list| {
                    list.iter()
                        .map(|car| {
                            let mut img: Vec<u32> = car.iter().map(|&x| cell_image[x as usize]).collect();
                            img.sort_unstable();
                            img.dedup();
                            img
                        })
                        .collect()
                })
                .collect();
            LocalSystem::from_carriers(target, c.total.clone(), carriers)
        }
        Membership::Table(_) => {
            let table = target
                .opens()
                .iter()
                .map(|u| {
                    let mut pre = c.space().empty_open();
                    for (cell, &img) in cell_image.iter().enumerate() {
                        if u.contains(img as usize) {
                            pre.insert(cell);
                        }
                    }
                    c.basis(&pre)
                })
                .collect::<Result<_, _>>()?;
            LocalSystem::from_table(target, c.total.clone(), table)
        }
    }
}

/// Diagram over a finite poset whose values are subquotients of one ambient
/// complex and whose maps are the basis-identity projections.
#[derive(Clone, Debug)]
pub struct PosetDiagram {
    ambient: Arc<ChainComplex>,
    values: Vec<BasisSet>,
    /// Strict successors, transitively closed and sorted.
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    Holim,
    Hocolim,
}

impl PosetDiagram {
    pub fn new<F: Fn(usize, usize) -> bool>(ambient: Arc<ChainComplex>, values: Vec<BasisSet>, less: F) -> Self {
        let n = values.len();
        let succ: Vec<Vec<u32>> =
            (0..n).map(|p| (0..n).filter(|&q| q != p && less(p, q)).map(|q| q as u32).collect()).collect();
        Self::from_successors(ambient, values, succ)
    }

    /// `succ[p]` lists every `q > p`.
    pub fn from_successors(ambient: Arc<ChainComplex>, values: Vec<BasisSet>, mut succ: Vec<Vec<u32>>) -> Self {
        let mut pred = vec![Vec::new(); values.len()];
        for (p, list) in succ.iter_mut().enumerate() {
            list.sort_unstable();
            for &q in list.iter() {
                pred[q as usize].push(p as u32);
            }
        }
        PosetDiagram { ambient, values, succ, pred }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ambient(&self) -> &Arc<ChainComplex> {
        &self.ambient
    }

    pub fn value(&self, p: usize) -> &BasisSet {
        &self.values[p]
    }

    pub fn less(&self, p: usize, q: usize) -> bool {
        self.succ[p].binary_search(&(q as u32)).is_ok()
    }

    /// Checks that values are complexes and every structure map is a chain map.
    pub fn validate(&self) -> Result<(), LocalError> {
        let complexes: Vec<Arc<ChainComplex>> =
            self.values.iter().map(|v| v.complex(&self.ambient).map(Arc::new)).collect::<Result<_, _>>()?;
        for p in 0..self.len() {
            for &q in &self.succ[p] {
                self.values[p].transfer(
                    &self.values[q as usize],
                    complexes[p].clone(),
                    complexes[q as usize].clone(),
                )?;
            }
        }
        Ok(())
    }

    /// Bousfield–Kan totalization restricted to degrees `[lo, hi]`.
    pub fn totalize(&self, kind: LimitKind, lo: i32, hi: i32, chain_cap: usize) -> Result<Totalization, LocalError> {
        Totalization::build(self, kind, lo, hi, chain_cap)
    }

    /// Degrees in which the untruncated totalization can be nonzero.
    pub fn natural_range(&self, kind: LimitKind) -> Option<(i32, i32)> {
        let spans: Vec<(i32, i32)> = self.values.iter().filter_map(BasisSet::span).collect();
        let vlo = spans.iter().map(|s| s.0).min()?;
        let vhi = spans.iter().map(|s| s.1).max()?;
        let height = self.height() as i32;
        Some(match kind {
            LimitKind::Holim => (vlo - height, vhi),
            LimitKind::Hocolim => (vlo, vhi + height),
        })
    }

    /// Length of the longest chain (number of elements minus one).
    pub fn height(&self) -> usize {
        // Longest path in a DAG; elements sorted topologically by predecessor count.
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| self.pred[p].len());
        let mut best = vec![0usize; n];
        for &p in &order {
            for &q in &self.pred[p] {
                best[p] = best[p].max(best[q as usize] + 1);
            }
        }
        best.into_iter().max().unwrap_or(0)
    }
}

/// Totalization of a [`PosetDiagram`] in a degree window.
#[derive(Clone, Debug)]
pub struct Totalization {
    pub kind: LimitKind,
    pub complex: ChainComplex,
    pub lo: i32,
    pub hi: i32,
    chains: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// `(degree, chain) → offset` of its block.
    blocks: HashMap<(i32, usize), usize>,
    full: bool,
}

impl Totalization {
    fn build(d: &PosetDiagram, kind: LimitKind, lo: i32, hi: i32, chain_cap: usize) -> Result<Self, LocalError> {
        if hi < lo {
            return Err(LocalError::WindowTooNarrow { degree: lo, lo, hi });
        }
        let full = d.natural_range(kind).map(|(a, b)| a >= lo && b <= hi).unwrap_or(true);
        // Enumerate chains whose value end is nonzero in some window degree.
        let mut chains: Vec<Vec<u32>> = Vec::new();
        for e in 0..d.len() {
            let Some((vlo, vhi)) = d.values[e].span() else { continue };
            let kmax = match kind {
                LimitKind::Holim => vhi - lo,
                LimitKind::Hocolim => hi - vlo,
            };
            if kmax < 0 {
                continue;
            }
            let mut stack: Vec<Vec<u32>> = vec![vec![e as u32]];
            while let Some(c) = stack.pop() {
                let k = c.len() as i32 - 1;
                if k < kmax {
                    match kind {
                        LimitKind::Holim => {
                            for &p in &d.pred[c[0] as usize] {
                                let mut nc = Vec::with_capacity(c.len() + 1);
                                nc.push(p);
                                nc.extend_from_slice(&c);
                                stack.push(nc);
                            }
                        }
                        LimitKind::Hocolim => {
                            for &q in &d.succ[*c.last().unwrap() as usize] {
                                let mut nc = c.clone();
                                nc.push(q);
                                stack.push(nc);
                            }
                        }
                    }
                }
                chains.push(c);
                if chains.len() > chain_cap {
                    return Err(LocalError::PosetTooLarge { size: chains.len(), cap: chain_cap });
                }
            }
        }
        chains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let index: HashMap<Vec<u32>, usize> = chains.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let end = |c: &[u32]| -> usize {
            match kind {
                LimitKind::Holim => *c.last().unwrap() as usize,
                LimitKind::Hocolim => c[0] as usize,
            }
        };
        let value_degree = |m: i32, k: i32| match kind {
            LimitKind::Holim => m + k,
            LimitKind::Hocolim => m - k,
        };
        let mut blocks = HashMap::new();
        let mut ranks = Vec::new();
        for m in lo..=hi {
            let mut off = 0;
            for (ci, c) in chains.iter().enumerate() {
                let q = value_degree(m, c.len() as i32 - 1);
                let r = d.values[end(c)].in_degree(q).len();
                if r > 0 {
                    blocks.insert((m, ci), off);
                    off += r;
                }
            }
            ranks.push(off);
        }
        let amb = &d.ambient;
        let mut boundaries = Vec::new();
        for m in lo + 1..=hi {
            let mut trip: Vec<(usize, usize, i64)> = Vec::new();
            for (ci, c) in chains.iter().enumerate() {
                let Some(&off) = blocks.get(&(m, ci)) else { continue };
                let k = c.len() - 1;
                let e = end(c);
                let q = value_degree(m, k as i32);
                let basis = d.values[e].in_degree(q);
                let sign_q: i64 = if q.rem_euclid(2) == 0 { 1 } else { -1 };
                // Internal boundary.
                if let (Some(&toff), Some(bd)) = (blocks.get(&(m - 1, ci)), amb.boundary_ref(q)) {
                    for (j, &a) in basis.iter().enumerate() {
                        for &(r, x) in bd.col(a) {
                            if let Some(t) = d.values[e].position(q - 1, r as usize) {
                                trip.push((toff + t, off + j, x));
                            }
                        }
                    }
                }
                match kind {
                    LimitKind::Holim => {
                        // Cofaces: insert one element at position i.
                        for i in 0..=k + 1 {
                            let cands: Vec<u32> = if i == 0 {
                                d.pred[c[0] as usize].clone()
                            } else if i == k + 1 {
                                d.succ[c[k] as usize].clone()
                            } else {
                                let (a, b) = (c[i - 1] as usize, c[i] as usize);
                                d.succ[a].iter().copied().filter(|&x| d.less(x as usize, b)).collect()
                            };
                            let s = sign_q * if i % 2 == 0 { 1 } else { -1 };
                            for x in cands {
                                let mut nc = c.clone();
                                nc.insert(i, x);
                                let Some(&ni) = index.get(&nc) else { continue };
                                let Some(&toff) = blocks.get(&(m - 1, ni)) else { continue };
                                if i == k + 1 {
                                    for (j, &a) in basis.iter().enumerate() {
                                        if let Some(t) = d.values[x as usize].position(q, a) {
                                            trip.push((toff + t, off + j, s));
                                        }
                                    }
                                } else {
                                    for j in 0..basis.len() {
                                        trip.push((toff + j, off + j, s));
                                    }
                                }
                            }
                        }
                    }
                    LimitKind::Hocolim => {
                        if k == 0 {
                            continue;
                        }
                        for i in 0..=k {
                            let mut nc = c.clone();
                            nc.remove(i);
                            let Some(&ni) = index.get(&nc) else { continue };
                            let Some(&toff) = blocks.get(&(m - 1, ni)) else { continue };
                            let s = sign_q * if i % 2 == 0 { 1 } else { -1 };
                            if i == 0 {
                                for (j, &a) in basis.iter().enumerate() {
                                    if let Some(t) = d.values[c[1] as usize].position(q, a) {
                                        trip.push((toff + t, off + j, s));
                                    }
                                }
                            } else {
                                for j in 0..basis.len() {
                                    trip.push((toff + j, off + j, s));
                                }
                            }
                        }
                    }
                }
            }
            let k = (m - lo) as usize;
            boundaries.push(SparseMatrix::from_triplets(ranks[k - 1], ranks[k], trip));
        }
        let complex = ChainComplex::new(lo, ranks, boundaries, None)?;
        Ok(Totalization { kind, complex, lo, hi, chains, index, blocks, full })
    }

    /// Offset of the block of `chain` in degree `m`.
    pub fn block(&self, m: i32, chain: &[u32]) -> Option<usize> {
        let ci = *self.index.get(chain)?;
        self.blocks.get(&(m, ci)).copied()
    }

    pub fn chains(&self) -> &[Vec<u32>] {
        &self.chains
    }

    /// Degrees whose homology is not affected by the truncation.
    pub fn certified(&self) -> (i32, i32) {
        if self.full {
            (i32::MIN, i32::MAX)
        } else {
            (self.lo + 1, self.hi - 1)
        }
    }

    pub fn homology(&self, n: i32) -> Result<HomologyGroup, LocalError> {
        let (a, b) = self.certified();
        if n < a || n > b {
            return Err(LocalError::WindowTooNarrow { degree: n, lo: self.lo, hi: self.hi });
        }
        Ok(homology(&self.complex, n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentMode {
    Descent,
    Codescent,
}

/// Outcome of a descent or codescent check.
#[derive(Clone, Debug)]
pub struct DescentReport {
    pub mode: DescentMode,
    pub quasi_iso: bool,
    /// Homology of `C(⋂W)` (descent) or `C(⋃W)` (codescent).
    pub value_homology: Vec<HomologyGroup>,
    pub limit_homology: Vec<HomologyGroup>,
}

/// Compares `C(⋂W) → holim_W C` (descent) or `hocolim_W C → C(⋃W)` (codescent).
pub fn descent_check(c: &LocalSystem, w: &[Open], mode: DescentMode) -> Result<DescentReport, LocalError> {
    if w.is_empty() {
        return Err(LocalError::HypothesisViolated("empty collection"));
    }
    let space = c.space();
    if w.iter().any(|o| !space.is_up_closed(o)) {
        return Err(LocalError::HypothesisViolated("member is not open"));
    }
    let set: BTreeSet<&Open> = w.iter().collect();
    for a in w {
        for b in w {
            let closed = match mode {
                DescentMode::Descent => set.contains(&a.union(b)),
                DescentMode::Codescent => set.contains(&a.intersection(b)),
            };
            if !closed {
                return Err(LocalError::HypothesisViolated(match mode {
                    DescentMode::Descent => "collection is not closed under unions",
                    DescentMode::Codescent => "collection is not closed under intersections",
                }));
            }
        }
    }
    let opens: Vec<Open> = set.into_iter().cloned().collect();
    let values: Vec<BasisSet> = opens.iter().map(|o| c.basis(o)).collect::<Result<_, _>>()?;
    let diagram = PosetDiagram::new(c.total.clone(), values.clone(), |p, q| opens[p].is_subset(&opens[q]) && p != q);
    let kind = match mode {
        DescentMode::Descent => LimitKind::Holim,
        DescentMode::Codescent => LimitKind::Hocolim,
    };
    let special = match mode {
        DescentMode::Descent => opens.iter().skip(1).fold(opens[0].clone(), |acc, o| acc.intersection(o)),
        DescentMode::Codescent => opens.iter().skip(1).fold(opens[0].clone(), |acc, o| acc.union(o)),
    };
    let sbasis = c.basis(&special)?;
    let scomplex = Arc::new(sbasis.complex(&c.total)?);
    let Some((lo, hi)) = diagram.natural_range(kind) else {
        return Ok(DescentReport {
            mode,
            quasi_iso: scomplex.is_zero(),
            value_homology: scomplex.homology_all(),
            limit_homology: Vec::new(),
        });
    };
    let (lo, hi) = (lo.min(scomplex.lo()) - 1, hi.max(scomplex.hi()) + 1);
    let tot = diagram.totalize(kind, lo, hi, usize::MAX)?;
    let tc = Arc::new(tot.complex.clone());
    let map = match mode {
        DescentMode::Descent => ChainMap::from_fn(scomplex.clone(), tc.clone(), 0, |n, j| {
            let a = sbasis.in_degree(n)[j];
            let mut col = Vec::new();
            for (p, v) in values.iter().enumerate() {
                if let (Some(t), Some(off)) = (v.position(n, a), tot.block(n, &[p as u32])) {
                    col.push(((off + t) as u32, 1));
                }
            }
            col.sort_unstable();
            col
        })?,
        DescentMode::Codescent => ChainMap::from_fn(tc.clone(), scomplex.clone(), 0, |n, j| {
            // Only length-zero chains map nontrivially.
            for (p, v) in values.iter().enumerate() {
                if let Some(off) = tot.block(n, &[p as u32]) {
                    let r = v.in_degree(n).len();
                    if j >= off && j < off + r {
                        let a = v.in_degree(n)[j - off];
                        return vec![(sbasis.position(n, a).expect("member of the union") as u32, 1)];
                    }
                }
            }
            Vec::new()
        })?,
    };
    let quasi_iso = mapping_cone(&map)?.is_acyclic();
    Ok(DescentReport { mode, quasi_iso, value_homology: scomplex.homology_all(), limit_homology: tc.homology_all() })
}

/// Choice of closed sets `K` in the box economy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedChoice {
    /// `∅`, every closed simplex, and the whole space.
    ClosedSimplices,
    /// `∅`, every closed vertex, and the whole space.
    Vertices,
    Explicit(Vec<Open>),
}

/// Homotopy limit of `C(U, U ∖ K₁) ⊗ D(U, U ∖ K₂)` over triples with
/// `K₁ ∩ K₂ ⊆ U`, in a window around degree `n`.
#[derive(Clone, Debug)]
pub struct BoxEconomy {
    pub n: i32,
    pub window: i32,
    pub triples: Vec<(usize, usize, usize)>,
    pub closed: Vec<Open>,
    pub totalization: Totalization,
    diagram: PosetDiagram,
    layout: TensorLayout,
    symmetric: bool,
    top_open: Option<usize>,
}

pub fn closed_sets(space: &CellSpace, choice: &ClosedChoice) -> Vec<Open> {
    let mut out = vec![space.empty_open()];
    match choice {
        ClosedChoice::ClosedSimplices => {
            for c in 0..space.len() {
                out.push(space.down_closure([c]));
            }
        }
        ClosedChoice::Vertices => {
            for &v in space.minimal_cells() {
                out.push(space.down_closure([v as usize]));
            }
        }
        ClosedChoice::Explicit(list) => out.extend(list.iter().cloned()),
    }
    out.push(space.total());
    let mut seen = BTreeSet::new();
    out.retain(|o| seen.insert(o.clone()));
    out
}

/// Builds the box economy. `cap` bounds the number of triples and of nerve chains.
pub fn box_economy(
    c: &LocalSystem,
    d: &LocalSystem,
    n: i32,
    window: i32,
    choice: &ClosedChoice,
    cap: usize,
) -> Result<BoxEconomy, LocalError> {
    if c.space().len() != d.space().len() || c.family().opens() != d.family().opens() {
        return Err(LocalError::SpaceMismatch);
    }
    if window < 1 {
        return Err(LocalError::WindowTooNarrow { degree: n, lo: n - window, hi: n + window });
    }
    let space = c.space().clone();
    let opens = c.family().opens();
    let closed = closed_sets(&space, choice);
    let mut triples = Vec::new();
    for (u, uo) in opens.iter().enumerate() {
        for (a, k1) in closed.iter().enumerate() {
            for (b, k2) in closed.iter().enumerate() {
                if k1.intersection(k2).is_subset(uo) {
                    triples.push((u, a, b));
                    if triples.len() > cap {
                        return Err(LocalError::PosetTooLarge { size: triples.len(), cap });
                    }
                }
            }
        }
    }
    let ambient = Arc::new(tensor_complex(c.total(), d.total())?);
    let layout = TensorLayout::new(c.total(), d.total());
    let mut rel_c: HashMap<(usize, usize), BasisSet> = HashMap::new();
    let mut rel_d: HashMap<(usize, usize), BasisSet> = HashMap::new();
    let mut values = Vec::with_capacity(triples.len());
    for &(u, a, b) in &triples {
        if !rel_c.contains_key(&(u, a)) {
            rel_c.insert((u, a), c.relative_basis(&opens[u], &closed[a])?);
        }
        if !rel_d.contains_key(&(u, b)) {
            rel_d.insert((u, b), d.relative_basis(&opens[u], &closed[b])?);
        }
        let (sc, sd) = (&rel_c[&(u, a)], &rel_d[&(u, b)]);
        values.push(BasisSet::from_fn(&ambient, |m, i| {
            let (p, x, q, y) = layout.split(m, i);
            sc.contains(p, x) && sd.contains(q, y)
        }));
    }
    let leq_open = |u: usize, v: usize| opens[u].is_subset(&opens[v]);
    let leq_closed = |a: usize, b: usize| closed[b].is_subset(&closed[a]);
    let succ: Vec<Vec<u32>> = triples
        .iter()
        .enumerate()
        .map(|(i, &(u, a, b))| {
            triples
                .iter()
                .enumerate()
                .filter(|&(j, &(v, x, y))| j != i && leq_open(u, v) && leq_closed(a, x) && leq_closed(b, y))
                .map(|(j, _)| j as u32)
                .collect()
        })
        .collect();
    let diagram = PosetDiagram::from_successors(ambient, values, succ);
    let totalization = diagram.totalize(LimitKind::Holim, n - window, n + window, cap.saturating_mul(50))?;
    let symmetric = Arc::ptr_eq(c.total(), d.total());
    let top_open = c.family().position(&space.total());
    Ok(BoxEconomy { n, window, triples, closed, totalization, diagram, layout, symmetric, top_open })
}

impl BoxEconomy {
    pub fn complex(&self) -> &ChainComplex {
        &self.totalization.complex
    }

    pub fn diagram(&self) -> &PosetDiagram {
        &self.diagram
    }

    pub fn triple_index(&self, t: (usize, usize, usize)) -> Option<usize> {
        self.triples.iter().position(|&x| x == t)
    }

    /// Value-level coordinate of a window element at the length-zero chain of a triple.
    pub fn coordinate(&self, m: i32, element: &[(u32, i64)], triple: usize) -> TensorChain {
        let mut out = TensorChain::new();
        let Some(off) = self.totalization.block(m, &[triple as u32]) else { return out };
        let basis = self.diagram.values[triple].in_degree(m);
        for &(i, v) in element {
            let i = i as usize;
            if i >= off && i < off + basis.len() {
                let (p, a, q, b) = self.layout.split(m, basis[i - off]);
                out.add_term((p, a as u32, q, b as u32), v);
            }
        }
        out
    }

    /// Swap involution `τ`, available when both factors are the same system.
    pub fn involution(&self) -> Option<Result<ChainMap, LocalError>> {
        if !self.symmetric {
            return None;
        }
        let swapped: Vec<usize> = self
            .triples
            .iter()
            .map(|&(u, a, b)| self.triple_index((u, b, a)).expect("triples are symmetric"))
            .collect();
        let tot = &self.totalization;
        let c = Arc::new(tot.complex.clone());
        let mut owner: HashMap<(i32, usize), (usize, usize)> = HashMap::new();
        for (ci, ch) in tot.chains.iter().enumerate() {
            for m in tot.lo..=tot.hi {
                if let Some(&off) = tot.blocks.get(&(m, ci)) {
                    let e = *ch.last().unwrap() as usize;
                    let q = m + ch.len() as i32 - 1;
                    for j in 0..self.diagram.values[e].in_degree(q).len() {
                        owner.insert((m, off + j), (ci, j));
                    }
                }
            }
        }
        let map = ChainMap::from_fn(c.clone(), c, 0, |m, i| {
            let (ci, j) = owner[&(m, i)];
            let ch = &tot.chains[ci];
            let e = *ch.last().unwrap() as usize;
            let q = m + ch.len() as i32 - 1;
            let (p, a, r, b) = self.layout.split(q, self.diagram.values[e].in_degree(q)[j]);
            let target_chain: Vec<u32> = ch.iter().map(|&x| swapped[x as usize] as u32).collect();
            let te = *target_chain.last().unwrap() as usize;
            let img = self.layout.index(r, b, p, a);
            let t = self.diagram.values[te].position(q, img).expect("swap preserves values");
            let off = tot.block(m, &target_chain).expect("swap preserves chains");
            let sign = if (p * r) % 2 == 0 { 1 } else { -1 };
            vec![((off + t) as u32, sign)]
        });
        Some(map.map_err(LocalError::from))
    }

    /// Projection onto the length-zero component at `(X, X, X)`, landing in
    /// the window of the global tensor product.
    pub fn specialization(&self) -> Result<ChainMap, LocalError> {
        let top_open = self.top_open.ok_or(LocalError::OpenNotInFamily)?;
        let top_closed = self.closed.len() - 1;
        let t = self.triple_index((top_open, top_closed, top_closed)).ok_or(LocalError::OpenNotInFamily)?;
        let tot = &self.totalization;
        let ambient = self.diagram.ambient.clone();
        let window = BasisSet::from_fn(&ambient, |m, _| m >= tot.lo && m <= tot.hi);
        let target = Arc::new(window.complex(&ambient)?);
        let source = Arc::new(tot.complex.clone());
        let value = &self.diagram.values[t];
        Ok(ChainMap::from_fn(source, target, 0, |m, i| {
            let Some(off) = tot.block(m, &[t as u32]) else { return Vec::new() };
            let basis = value.in_degree(m);
            if i >= off && i < off + basis.len() {
                let a = basis[i - off];
                vec![(window.position(m, a).unwrap() as u32, 1)]
            } else {
                Vec::new()
            }
        })?)
    }

    /// `H_n` of the specialization cone vanishes, so the specialization is
    /// onto `H_n(C(X) ⊗ D(X))`. Needs a window of at least 2.
    pub fn specialization_onto(&self) -> Result<bool, LocalError> {
        if self.window < 2 {
            return Err(LocalError::WindowTooNarrow {
                degree: self.n,
                lo: self.n - self.window,
                hi: self.n + self.window,
            });
        }
        let cone = mapping_cone(&self.specialization()?)?;
        Ok(homology(&cone, self.n).is_zero())
    }

    /// Constant element at the length-zero chains: the image of a global
    /// tensor chain in every value. A cycle when the images are compatible.
    pub fn constant_lift(&self, m: i32, global: &TensorChain) -> Vec<(u32, i64)> {
        let tot = &self.totalization;
        let mut out = Vec::new();
        for (p, v) in self.diagram.values.iter().enumerate() {
            let Some(off) = tot.block(m, &[p as u32]) else { continue };
            for (&(a, x, b, y), &coef) in global.terms() {
                if a + b != m {
                    continue;
                }
                let idx = self.layout.index(a, x as usize, b, y as usize);
                if let Some(t) = v.position(m, idx) {
                    out.push(((off + t) as u32, coef));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// One degree of a duality certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeVerdict {
    pub j: i32,
    pub source: HomologyGroup,
    pub target: HomologyGroup,
    pub iso: bool,
}

/// Slant-duality verdict at one open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenCertificate {
    pub open: String,
    pub degrees: Vec<DegreeVerdict>,
    pub overall: bool,
    /// False when per-degree verdicts of a failing open are conservative.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityCertificate {
    pub n: i32,
    pub per_open: Vec<OpenCertificate>,
    pub overall: bool,
}

impl DualityCertificate {
    pub fn new(n: i32, per_open: Vec<OpenCertificate>) -> Self {
        let overall = per_open.iter().all(|c| c.overall);
        DualityCertificate { n, per_open, overall }
    }
}

/// Dense per-degree comparison is used for failing opens up to this many generators.
const DENSE_DEGREE_LIMIT: usize = 400;

/// Slant products with a fixed `n`-cycle `λ` of `C ⊗ C`.
///
/// At an open `U`, `K` is the subcomplex of generators carried inside `U`
/// and the relative side is taken in excised form: `R(U)` has the
/// generators whose carrier meets `U` (the quotient `C / C(X ∖ K)`), and
/// `D(U) = C(U)`. The coordinate of `λ` keeps the terms with front in
/// `R(U)`; their backs must lie in `D(U)`. The slant
/// `Hom(R(U)_{n-k}, Z) → D(U)_k`, `α ↦ c_k Σ α(a) b` with
/// `c_k = (-(-1)^n)^k`, is a chain map out of `dual(R(U), n)`.
#[derive(Clone, Debug)]
pub struct SlantContext {
    system: LocalSystem,
    lambda: TensorChain,
    n: i32,
}

impl SlantContext {
    pub fn new(system: LocalSystem, lambda: TensorChain, n: i32) -> Result<Self, LocalError> {
        if !system.is_carrier_based() {
            return Err(LocalError::HypothesisViolated("slant duality needs carriers"));
        }
        let total = system.total();
        if !lambda.boundary(total, total).is_zero() || lambda.degrees().iter().any(|&d| d != n) {
            return Err(LocalError::NotACycle);
        }
        Ok(SlantContext { system, lambda, n })
    }

    pub fn system(&self) -> &LocalSystem {
        &self.system
    }

    pub fn dimension(&self) -> i32 {
        self.n
    }

    pub fn lambda(&self) -> &TensorChain {
        &self.lambda
    }

    /// The chain map `dual(R(U), n) → D(U)`.
    pub fn slant_map(&self, u: &Open) -> Result<ChainMap, LocalError> {
        let r = self.system.carrier_set(|c| c.iter().any(|&x| u.contains(x as usize)));
        let d = self.system.basis(u)?;
        slant_map(self.system.total(), &self.lambda, self.n, &r, &d, BackPolicy::Reject)
    }

    pub fn certify(&self, u: &Open, label: &str) -> Result<OpenCertificate, LocalError> {
        certify_map(&self.slant_map(u)?, self.n, label)
    }
}

/// What to do with a term whose front is kept but whose back is not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackPolicy {
    Reject,
    /// The back side is a quotient; such terms vanish there.
    Drop,
}

/// Slant with an `n`-chain `λ` of `C ⊗ C`: `dual(front, n) → back`,
/// `α ↦ c_k Σ α(a) b` with `c_k = (-(-1)^n)^k`. Both sides are
/// subquotients of `C`; terms with front outside `front` are dropped.
pub fn slant_map(
    total: &ChainComplex,
    lambda: &TensorChain,
    n: i32,
    front: &BasisSet,
    back: &BasisSet,
    policy: BackPolicy,
) -> Result<ChainMap, LocalError> {
    let rc = front.complex(total)?;
    let dual = Arc::new(dual_complex(&rc, n)?);
    let dc = Arc::new(back.complex(total)?);
    let mut cols: HashMap<i32, Vec<Vec<(u32, i64)>>> = HashMap::new();
    for k in dual.degrees().filter(|_| !dual.is_zero()) {
        cols.insert(k, vec![Vec::new(); dual.rank(k)]);
    }
    let unit = -(if n % 2 == 0 { 1 } else { -1 });
    for (&(p, a, q, b), &v) in lambda.terms() {
        let Some(ra) = front.position(p, a as usize) else { continue };
        let Some(db) = back.position(q, b as usize) else {
            match policy {
                BackPolicy::Reject => return Err(LocalError::CoordinateOutsideWindow),
                BackPolicy::Drop => continue,
            }
        };
        let k = n - p;
        let c_k: i64 = if k.rem_euclid(2) == 1 { unit } else { 1 };
        cols.get_mut(&k).expect("degree of the dual")[ra].push((db as u32, c_k * v));
    }
    let components = dual
        .degrees()
        .filter(|_| !dual.is_zero())
        .map(|k| SparseMatrix::from_columns(dc.rank(k), cols.remove(&k).unwrap()))
        .collect();
    Ok(ChainMap::new(dual, dc, 0, components)?)
}

/// Per-degree isomorphism verdict for a slant map, in degrees `min(0, ·)..=max(n, ·)`.
pub fn certify_map(phi: &ChainMap, n: i32, label: &str) -> Result<OpenCertificate, LocalError> {
    let source = phi.source().clone();
    let target = phi.target().clone();
    let (lo, hi) = if source.is_zero() && target.is_zero() {
        (0, n)
    } else {
        (source.lo().min(target.lo()).min(0), source.hi().max(target.hi()).max(n))
    };
    let cone = mapping_cone(phi)?;
    if cone.is_acyclic() {
        let th = target.homology_all();
        let degrees = (lo..=hi)
            .map(|j| {
                let t = th.iter().find(|h| h.degree == j).cloned().unwrap_or_else(|| HomologyGroup::zero(j));
                DegreeVerdict { j, source: t.clone(), target: t, iso: true }
            })
            .collect();
        return Ok(OpenCertificate { open: label.into(), degrees, overall: true, exact: true });
    }
    let small = source.total_rank() + target.total_rank() <= DENSE_DEGREE_LIMIT;
    let cone_h: Vec<HomologyGroup> = cone.homology_all();
    let degrees = (lo..=hi)
        .map(|j| {
            let s = homology(&source, j);
            let t = homology(&target, j);
            let iso = if small {
                let sb = HomologyBasis::compute(&source, j);
                let tb = HomologyBasis::compute(&target, j);
                is_iso_matrix(&induced_map(phi, j, &sb, &tb), &s, &t)
            } else {
                // H_j(f) is an isomorphism when the cone is acyclic at j and j + 1.
                cone_h.iter().filter(|h| h.degree == j || h.degree == j + 1).all(HomologyGroup::is_zero)
            };
            DegreeVerdict { j, source: s, target: t, iso }
        })
        .collect();
    Ok(OpenCertificate { open: label.into(), degrees, overall: false, exact: small })
}

/// Full per-degree comparison through explicit homology bases, independent
/// of the cone test.
pub fn certify_map_by_matrices(phi: &ChainMap, n: i32, label: &str) -> OpenCertificate {
    let source = phi.source();
    let target = phi.target();
    let lo = source.lo().min(target.lo()).min(0);
    let hi = if source.is_zero() && target.is_zero() { n } else { source.hi().max(target.hi()).max(n) };
    let degrees: Vec<DegreeVerdict> = (lo..=hi)
        .map(|j| {
            let s = homology(source, j);
            let t = homology(target, j);
            let sb = HomologyBasis::compute(source, j);
            let tb = HomologyBasis::compute(target, j);
            let iso = is_iso_matrix(&induced_map(phi, j, &sb, &tb), &s, &t);
            DegreeVerdict { j, source: s, target: t, iso }
        })
        .collect();
    let overall = degrees.iter().all(|d| d.iso);
    OpenCertificate { open: label.into(), degrees, overall, exact: true }
}

/// Mayer–Vietoris data in one degree; ranks are over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MayerVietorisDegree {
    pub j: i32,
    pub betti_intersection: usize,
    pub betti_u: usize,
    pub betti_v: usize,
    pub betti_union: usize,
    /// `H_j(U∩V) → H_j(U) ⊕ H_j(V)`, `H_j(U) ⊕ H_j(V) → H_j(X)`, `H_j(X) → H_{j-1}(U∩V)`.
    pub ranks: Option<(usize, usize, usize)>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcisionReport {
    pub degrees: Vec<MayerVietorisDegree>,
    pub mayer_vietoris_exact: bool,
    pub homotopy_pushout: bool,
    /// `C(U) / C(U ∩ V) → C(X) / C(V)` is a quasi-isomorphism.
    pub relative_quasi_iso: bool,
}

/// Rank data is computed densely up to this many generators.
const DENSE_RANK_LIMIT: usize = 1500;

/// Mayer–Vietoris and homotopy-pushout verdicts for a cover `U ∪ V = X`.
pub fn excision_square_check(c: &LocalSystem, u: &Open, v: &Open) -> Result<ExcisionReport, LocalError> {
    let space = c.space();
    if u.union(v) != space.total() || !space.is_up_closed(u) || !space.is_up_closed(v) {
        return Err(LocalError::CoverViolation);
    }
    let total = c.total().clone();
    let bu = c.basis(u)?;
    let bv = c.basis(v)?;
    let bw = c.basis(&u.intersection(v))?;
    let bx = BasisSet::full(&total);
    let cu = Arc::new(bu.complex(&total)?);
    let cv = Arc::new(bv.complex(&total)?);
    let cw = Arc::new(bw.complex(&total)?);
    let cx = Arc::new(total.as_ref().clone());
    // Exactness of MV is acyclicity of C(X) / (C(U) + C(V)).
    let rest = bx.difference(&bu.union(&bv)).complex(&total)?;
    let rest_h = rest.homology_all();
    let exact_at = |j: i32| rest_h.iter().filter(|h| h.degree == j).all(HomologyGroup::is_zero);
    // Homotopy pushout: cone(C(W) → C(U)) → cone(C(V) → C(X)).
    let iw = bw.transfer(&bu, cw.clone(), cu.clone())?;
    let iv = bv.transfer(&bx, cv.clone(), cx.clone())?;
    let cone1 = Arc::new(mapping_cone(&iw)?);
    let cone2 = Arc::new(mapping_cone(&iv)?);
    let induced = ChainMap::from_fn(cone1.clone(), cone2.clone(), 0, |m, i| {
        // Cone layout: target_m first, then source_{m-1}.
        let tu = cu.rank(m);
        if i < tu {
            let a = bu.in_degree(m)[i];
            vec![(a as u32, 1)]
        } else {
            let a = bw.in_degree(m - 1)[i - tu];
            let pos = bv.position(m - 1, a).expect("C(U∩V) ⊆ C(V)");
            vec![((cx.rank(m) + pos) as u32, 1)]
        }
    })?;
    let homotopy_pushout = mapping_cone(&induced)?.is_acyclic();
    // Relative map C(U)/C(W) → C(X)/C(V).
    let qu = bu.difference(&bw);
    let qx = bx.difference(&bv);
    let qa = Arc::new(qu.complex(&total)?);
    let qb = Arc::new(qx.complex(&total)?);
    let rel = qu.transfer(&qx, qa, qb)?;
    let relative_quasi_iso = mapping_cone(&rel)?.is_acyclic();

    let (hw, hu, hv, hx) = (cw.homology_all(), cu.homology_all(), cv.homology_all(), cx.homology_all());
    let betti = |hs: &[HomologyGroup], j: i32| hs.iter().find(|h| h.degree == j).map(|h| h.betti).unwrap_or(0);
    let lo = total.lo();
    let hi = total.hi();
    let dense = total.total_rank() <= DENSE_RANK_LIMIT;
    let mut degrees = Vec::new();
    for j in lo..=hi {
        let ranks = if dense {
            Some((
                rank_diagonal(&total, &bw, &bu, &bv, j),
                rank_sum(&total, &[&bu, &bv], j),
                betti(&hx, j) - rank_sum(&total, &[&bu, &bv], j),
            ))
        } else {
            None
        };
        degrees.push(MayerVietorisDegree {
            j,
            betti_intersection: betti(&hw, j),
            betti_u: betti(&hu, j),
            betti_v: betti(&hv, j),
            betti_union: betti(&hx, j),
            ranks,
            exact: exact_at(j),
        });
    }
    Ok(ExcisionReport {
        mayer_vietoris_exact: degrees.iter().all(|d| d.exact) && rest_h.iter().all(HomologyGroup::is_zero),
        degrees,
        homotopy_pushout,
        relative_quasi_iso,
    })
}

fn dense_rank(m: &DenseMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    smith_diagonal(m.clone()).len()
}

/// Columns: boundaries `∂_{j+1}` of the basis subcomplex, in ambient coordinates of degree `j`.
fn boundary_columns(total: &ChainComplex, b: &BasisSet, j: i32) -> Vec<Vec<BigInt>> {
    let dim = total.rank(j);
    let Some(d) = total.boundary_ref(j + 1) else { return Vec::new() };
    b.in_degree(j + 1)
        .iter()
        .map(|&c| {
            let mut v = vec![BigInt::from(0); dim];
            for &(r, x) in d.col(c) {
                v[r as usize] = BigInt::from(x);
            }
            v
        })
        .collect()
}

/// Integral kernel basis of `∂_j` on a basis subcomplex, in ambient coordinates.
fn cycle_columns(total: &ChainComplex, b: &BasisSet, j: i32) -> Vec<Vec<BigInt>> {
    let dim = total.rank(j);
    let cols = b.in_degree(j);
    let lower = total.rank(j - 1);
    let mut m = DenseMatrix::zeros(lower, cols.len());
    if let Some(d) = total.boundary_ref(j) {
        for (k, &c) in cols.iter().enumerate() {
            for &(r, x) in d.col(c) {
                m[(r as usize, k)] = BigInt::from(x);
            }
        }
    }
    if lower == 0 {
        return cols
            .iter()
            .map(|&c| {
                let mut v = vec![BigInt::from(0); dim];
                v[c] = BigInt::from(1);
                v
            })
            .collect();
    }
    let s = smith_with_transforms(&m);
    (s.rank..cols.len())
        .map(|k| {
            let mut v = vec![BigInt::from(0); dim];
            for (row, &c) in cols.iter().enumerate() {
                v[c] = s.v[(row, k)].clone();
            }
            v
        })
        .collect()
}

fn rank_of(vectors: &[Vec<BigInt>], dim: usize) -> usize {
    let mut m = DenseMatrix::zeros(dim, vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            m[(i, k)] = x.clone();
        }
    }
    dense_rank(&m)
}

/// Rank of `⊕ H_j(A_i) → H_j(X)`.
fn rank_sum(total: &ChainComplex, parts: &[&BasisSet], j: i32) -> usize {
    let dim = total.rank(j);
    let full = BasisSet::full(total);
    let bx = boundary_columns(total, &full, j);
    let mut all = bx.clone();
    for p in parts {
        all.extend(cycle_columns(total, p, j));
    }
    rank_of(&all, dim) - rank_of(&bx, dim)
}

/// Rank of `H_j(W) → H_j(U) ⊕ H_j(V)`: `b_j(W)` minus classes bounding in both.
fn rank_diagonal(total: &ChainComplex, w: &BasisSet, u: &BasisSet, v: &BasisSet, j: i32) -> usize {
    let dim = total.rank(j);
    let cw = w.complex(total).unwrap();
    let bw = homology(&cw, j).betti;
    let du = rank_of(&boundary_columns(total, u, j), dim);
    let dv = rank_of(&boundary_columns(total, v, j), dim);
    let mut both = boundary_columns(total, u, j);
    both.extend(boundary_columns(total, v, j));
    let duv = rank_of(&both, dim);
    let dw = rank_of(&boundary_columns(total, w, j), dim);
    // dim(B(U) ∩ B(V)) - dim B(W) classes of H_j(W) die in both.
    bw - ((du + dv - duv) - dw)
}

/// Sparse rank of a boundary restricted to a basis set (used by tests and reports).
pub fn restricted_rank(total: &ChainComplex, b: &BasisSet, j: i32) -> usize {
    match b.complex(total) {
        Ok(c) => rank(&c.boundary(j)),
        Err(_) => 0,
    }
}
