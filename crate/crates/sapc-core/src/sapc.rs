//! Symmetric algebraic Poincaré complexes and pairs: construction from
//! oriented triangulations, nondegeneracy, exact signatures and products.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::chain::{
    dual_complex, tensor_complex, ChainComplex, ChainError, ChainMap, HomologyBasis, HomologyGroup, TensorLayout,
};
use crate::equivariant::{higher_diagonal, symmetric_construction, EquivariantError, SymmetricStructure, TensorChain};
use crate::localsheaf::{
    certify_map, slant_map, subdivision_guide, BackPolicy, BasisSet, DualityCertificate, LocalError, OpenCertificate,
    SlantContext,
};
use crate::matrix::SparseMatrix;
use crate::open::OpenFamily;
use crate::simplicial::{subdivision_chain_map, ComplexError, OrientedManifoldComplex, SimplicialMap};

/// Components of the symmetric structure built for manifolds.
pub const MANIFOLD_WINDOW: usize = 2;

#[derive(Clone, Debug)]
pub enum SapcError {
    NotClosed,
    NoBoundary,
    FormNotSymmetric,
    /// `∂ψ_s - N_s ψ_{s-1} ≠ ±(f ⊗ f) φ_s`.
    BoundaryEquation {
        s: usize,
    },
    NondegenerateCheckFailed(Vec<String>),
    /// The inclusion does not send generators to generators.
    NotABasisInclusion,
    Equivariant(EquivariantError),
    Local(LocalError),
    Chain(ChainError),
    Complex(ComplexError),
}

impl fmt::Display for SapcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SapcError::NotClosed => write!(f, "manifold has boundary"),
            SapcError::NoBoundary => write!(f, "manifold has no boundary"),
            SapcError::FormNotSymmetric => write!(f, "middle form is not symmetric"),
            SapcError::BoundaryEquation { s } => write!(f, "boundary equation fails for component {s}"),
            SapcError::NondegenerateCheckFailed(opens) => write!(f, "duality fails at {}", opens.join(", ")),
            SapcError::NotABasisInclusion => write!(f, "inclusion is not a basis inclusion"),
            SapcError::Equivariant(e) => write!(f, "{e}"),
            SapcError::Local(e) => write!(f, "{e}"),
            SapcError::Chain(e) => write!(f, "{e}"),
            SapcError::Complex(e) => write!(f, "{e}"),
        }
    }
}

impl From<EquivariantError> for SapcError {
    fn from(e: EquivariantError) -> Self {
        SapcError::Equivariant(e)
    }
}

impl From<LocalError> for SapcError {
    fn from(e: LocalError) -> Self {
        SapcError::Local(e)
    }
}

impl From<ChainError> for SapcError {
    fn from(e: ChainError) -> Self {
        SapcError::Chain(e)
    }
}

impl From<ComplexError> for SapcError {
    fn from(e: ComplexError) -> Self {
        SapcError::Complex(e)
    }
}

/// Dense cochain on one degree of a complex.
pub type Cochain = Vec<BigInt>;

/// Cocycles representing a basis of `H^p / torsion`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyBasis {
    pub degree: i32,
    pub free: Vec<Cochain>,
}

/// Free part of `H^p(C)` via the Smith form of the dual complex.
pub fn free_cohomology(c: &ChainComplex, p: i32) -> Result<CohomologyBasis, ChainError> {
    if c.is_zero() || p < c.lo() || p > c.hi() {
        return Ok(CohomologyBasis { degree: p, free: Vec::new() });
    }
    let dual = dual_complex(c, 0)?;
    let basis = HomologyBasis::compute(&dual, -p);
    let t = basis.group.torsion.len();
    Ok(CohomologyBasis { degree: p, free: basis.generators[t..].to_vec() })
}

/// Cohomology of the quotient by a basis subcomplex, as cocycles of the
/// ambient complex vanishing on the subcomplex.
pub fn free_relative_cohomology(total: &ChainComplex, sub: &BasisSet, p: i32) -> Result<CohomologyBasis, ChainError> {
    let rel = BasisSet::full(total).difference(sub);
    let q = rel.complex(total)?;
    let local = free_cohomology(&q, p)?;
    let free = local
        .free
        .into_iter()
        .map(|u| {
            let mut v = vec![BigInt::zero(); total.rank(p)];
            for (k, &i) in rel.in_degree(p).iter().enumerate() {
                v[i] = u[k].clone();
            }
            v
        })
        .collect();
    Ok(CohomologyBasis { degree: p, free })
}

/// `Σ (u ⊗ v)(x ⊗ y)` over the terms of `φ` in bidegree `(p, q)`.
fn evaluate(phi: &TensorChain, p: i32, u: &Cochain, q: i32, v: &Cochain) -> BigInt {
    let mut acc = BigInt::zero();
    for (&(a, x, b, y), &c) in phi.terms() {
        if a == p && b == q {
            let ux = &u[x as usize];
            let vy = &v[y as usize];
            if !ux.is_zero() && !vy.is_zero() {
                acc += ux * vy * c;
            }
        }
    }
    acc
}

/// Matrix `(u_i ⊗ v_j)(φ)`.
pub fn pairing_matrix(phi: &TensorChain, left: &CohomologyBasis, right: &CohomologyBasis) -> Vec<Vec<BigInt>> {
    left.free
        .iter()
        .map(|u| right.free.iter().map(|v| evaluate(phi, left.degree, u, right.degree, v)).collect())
        .collect()
}

/// Cross product cocycles `α ⊗ β` in the tensor layout.
fn kunneth(
    layout: &TensorLayout,
    ranks: usize,
    m: i32,
    parts: &[(CohomologyBasis, CohomologyBasis)],
) -> CohomologyBasis {
    let mut free = Vec::new();
    for (a, b) in parts {
        for alpha in &a.free {
            for beta in &b.free {
                let mut u = vec![BigInt::zero(); ranks];
                for (i, x) in alpha.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                    for (j, y) in beta.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                        u[layout.index(a.degree, i, b.degree, j)] = x * y;
                    }
                }
                free.push(u);
            }
        }
    }
    CohomologyBasis { degree: m, free }
}

/// `φ ⊠ ψ`: `(a ⊗ a') ⊠ (b ⊗ b') = (-1)^{|a'||b|} (a ⊗ b) ⊗ (a' ⊗ b')`.
pub fn product_chain(x: &TensorChain, y: &TensorChain, lx: &TensorLayout) -> TensorChain {
    let mut out = TensorChain::new();
    for (&(p, a, q, a2), &v) in x.terms() {
        for (&(r, b, t, b2), &w) in y.terms() {
            let sign = if (q * r) % 2 == 0 { 1 } else { -1 };
            let front = lx.index(p, a as usize, r, b as usize) as u32;
            let back = lx.index(q, a2 as usize, t, b2 as usize) as u32;
            out.add_term((p + r, front, q + t, back), sign * v * w);
        }
    }
    out
}

/// Middle form, its signature and (for rank two) a hyperbolic basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureReport {
    pub signature: i64,
    /// Rank of the free middle cohomology.
    pub rank: usize,
    pub form: Vec<Vec<BigInt>>,
    /// False when the dimension is not divisible by four; the signature is then 0.
    pub applicable: bool,
    /// `P` with `Pᵀ B P = [[0, 1], [1, 0]]`, when one exists.
    pub hyperbolic: Option<[[BigInt; 2]; 2]>,
}

impl SignatureReport {
    fn not_applicable() -> Self {
        SignatureReport { signature: 0, rank: 0, form: Vec::new(), applicable: false, hyperbolic: None }
    }

    fn from_form(form: Vec<Vec<BigInt>>) -> Result<Self, SapcError> {
        let signature = congruence_signature(&form)?;
        let hyperbolic = if form.len() == 2 { hyperbolic_basis(&form) } else { None };
        Ok(SignatureReport { signature, rank: form.len(), form, applicable: true, hyperbolic })
    }
}

/// Symmetric algebraic Poincaré complex over `Z`.
#[derive(Clone, Debug)]
pub struct SymmetricComplex {
    pub name: String,
    pub n: usize,
    complex: Arc<ChainComplex>,
    structure: SymmetricStructure,
    certificate: Option<DualityCertificate>,
    factors: Option<Box<(SymmetricComplex, SymmetricComplex)>>,
}

impl SymmetricComplex {
    /// Checks the closed relations for every component given.
    pub fn new(name: &str, complex: Arc<ChainComplex>, structure: SymmetricStructure) -> Result<Self, SapcError> {
        structure.verify_closed(&complex)?;
        Ok(SymmetricComplex { name: name.into(), n: structure.n, complex, structure, certificate: None, factors: None })
    }

    /// Chains of a closed oriented manifold with `φ_s = Δ_s(ω)`, `s ≤ 2`.
    pub fn from_manifold(m: &OrientedManifoldComplex) -> Result<Self, SapcError> {
        Self::from_manifold_window(m, MANIFOLD_WINDOW)
    }

    /// As [`SymmetricComplex::from_manifold`] with `s ≤ window`.
    pub fn from_manifold_window(m: &OrientedManifoldComplex, window: usize) -> Result<Self, SapcError> {
        if m.has_boundary() {
            return Err(SapcError::NotClosed);
        }
        let structure = symmetric_construction(m, window)?;
        let complex = Arc::new(m.base().chain_complex());
        Ok(SymmetricComplex { name: m.name().into(), n: m.dim(), complex, structure, certificate: None, factors: None })
    }

    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.complex
    }

    pub fn structure(&self) -> &SymmetricStructure {
        &self.structure
    }

    pub fn phi0(&self) -> &TensorChain {
        &self.structure.components[0]
    }

    pub fn certificate(&self) -> Option<&DualityCertificate> {
        self.certificate.as_ref()
    }

    pub fn set_certificate(&mut self, c: DualityCertificate) {
        self.certificate = Some(c);
    }

    /// Negated structure (orientation reversal).
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.name = alloc::format!("-{}", self.name);
        out.structure.components = self.structure.components.iter().map(|c| c.scale(-1)).collect();
        out.certificate = None;
        if let Some(f) = &self.factors {
            out.factors = Some(Box::new((f.0.reversed(), f.1.clone())));
        }
        out
    }

    /// Slant with `φ_0`, `Hom(C_{n-j}) → C_j`, compared degree by degree.
    pub fn global_certificate(&self) -> Result<OpenCertificate, SapcError> {
        let full = BasisSet::full(&self.complex);
        let phi = slant_map(&self.complex, self.phi0(), self.n as i32, &full, &full, BackPolicy::Reject)?;
        Ok(certify_map(&phi, self.n as i32, "X")?)
    }

    pub fn is_nondegenerate(&self) -> Result<bool, SapcError> {
        Ok(match &self.certificate {
            Some(c) => c.overall,
            None => self.global_certificate()?.overall,
        })
    }

    /// `H^p / torsion`; products use cross products of the factors' bases.
    pub fn free_cohomology(&self, p: i32) -> Result<CohomologyBasis, SapcError> {
        match &self.factors {
            Some(f) => {
                let (a, b) = (&f.0, &f.1);
                let layout = TensorLayout::new(&a.complex, &b.complex);
                let mut parts = Vec::new();
                if !a.complex.is_zero() {
                    for q in a.complex.degrees() {
                        let x = a.free_cohomology(q)?;
                        let y = b.free_cohomology(p - q)?;
                        if !x.free.is_empty() && !y.free.is_empty() {
                            parts.push((x, y));
                        }
                    }
                }
                Ok(kunneth(&layout, self.complex.rank(p), p, &parts))
            }
            None => Ok(free_cohomology(&self.complex, p)?),
        }
    }

    /// `(u ⊗ v)(φ_0)` for `u ∈ H^p`, `v ∈ H^{n-p}`.
    pub fn pairing(&self, p: i32) -> Result<Vec<Vec<BigInt>>, SapcError> {
        let left = self.free_cohomology(p)?;
        let right = self.free_cohomology(self.n as i32 - p)?;
        Ok(pairing_matrix(self.phi0(), &left, &right))
    }

    pub fn signature(&self) -> Result<SignatureReport, SapcError> {
        if !self.n.is_multiple_of(4) {
            return Ok(SignatureReport::not_applicable());
        }
        SignatureReport::from_form(self.pairing(self.n as i32 / 2)?)
    }
}

/// `φ_0` of a product, assembled from the factors with the interchange sign.
/// Only the degree-zero component is formed; the certificate is recomputed
/// when `certify` is set.
pub fn product_sapc(a: &SymmetricComplex, b: &SymmetricComplex, certify: bool) -> Result<SymmetricComplex, SapcError> {
    let layout = TensorLayout::new(&a.complex, &b.complex);
    let complex = Arc::new(tensor_complex(&a.complex, &b.complex)?);
    let phi = product_chain(a.phi0(), b.phi0(), &layout);
    let structure = SymmetricStructure { n: a.n + b.n, components: vec![phi] };
    let mut out = SymmetricComplex::new(&alloc::format!("{}x{}", a.name, b.name), complex, structure)?;
    out.factors = Some(Box::new((a.clone(), b.clone())));
    if certify {
        let c = out.global_certificate()?;
        out.certificate = Some(DualityCertificate::new(out.n as i32, vec![c]));
    }
    Ok(out)
}

/// Slant context of a closed manifold over a family of opens, on its
/// barycentric subdivision.
pub fn manifold_slant_context(m: &OrientedManifoldComplex, family: Arc<OpenFamily>) -> Result<SlantContext, SapcError> {
    let (sys, sd) = subdivision_guide(m.base(), family)?;
    let sub = subdivision_chain_map(m.base(), &sd)?;
    let omega = sub.component(m.dim() as i32).apply(&m.fundamental_cycle());
    let lambda = higher_diagonal(sd, 0).apply(m.dim(), &omega);
    Ok(SlantContext::new(sys, lambda, m.dim() as i32)?)
}

/// Certificates over every open of the family, in family order.
pub fn certify_family(ctx: &SlantContext) -> Result<DualityCertificate, SapcError> {
    let family = ctx.system().family().clone();
    let per_open = family
        .opens()
        .iter()
        .enumerate()
        .map(|(i, o)| ctx.certify(o, family.label(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DualityCertificate::new(ctx.dimension(), per_open))
}

/// Closed manifold with a certificate over `family`; fails when any open fails.
pub fn sapc_from_manifold(m: &OrientedManifoldComplex, family: Arc<OpenFamily>) -> Result<SymmetricComplex, SapcError> {
    let mut sc = SymmetricComplex::from_manifold(m)?;
    let cert = certify_family(&manifold_slant_context(m, family)?)?;
    if !cert.overall {
        return Err(SapcError::NondegenerateCheckFailed(
            cert.per_open.iter().filter(|c| !c.overall).map(|c| c.open.clone()).collect(),
        ));
    }
    sc.certificate = Some(cert);
    Ok(sc)
}

/// Symmetric pair `(f: C → D, ψ, φ)` with `f` a basis inclusion.
#[derive(Clone, Debug)]
pub struct SymmetricPair {
    pub name: String,
    /// Dimension of `D`; the boundary has dimension one less.
    pub n: usize,
    boundary: SymmetricComplex,
    total: Arc<ChainComplex>,
    inclusion: ChainMap,
    sub: BasisSet,
    psi: SymmetricStructure,
    factors: Option<Box<(SymmetricPair, SymmetricComplex)>>,
}

fn basis_image(f: &ChainMap) -> Result<BasisSet, SapcError> {
    let src = f.source();
    let mut hit: Vec<(i32, usize)> = Vec::new();
    for n in src.degrees().filter(|_| !src.is_zero()) {
        let m = f.component(n);
        for i in 0..src.rank(n) {
            match m.col(i) {
                [(r, 1)] => hit.push((n, *r as usize)),
                _ => return Err(SapcError::NotABasisInclusion),
            }
        }
    }
    hit.sort_unstable();
    Ok(BasisSet::from_fn(f.target(), |n, i| hit.binary_search(&(n, i)).is_ok()))
}

impl SymmetricPair {
    /// Verifies `∂ψ_s - N_s ψ_{s-1} = (-1)^s (f ⊗ f) φ_s` for every component.
    pub fn new(
        name: &str,
        boundary: SymmetricComplex,
        inclusion: ChainMap,
        psi: SymmetricStructure,
    ) -> Result<Self, SapcError> {
        let total = inclusion.target().clone();
        let sub = basis_image(&inclusion)?;
        for s in 0..psi.components.len() {
            let lhs = psi.defect(&total, s);
            let phi = boundary.structure.components.get(s).cloned().unwrap_or_default();
            let mut rhs = phi.map(&inclusion, &inclusion);
            if s % 2 == 1 {
                rhs = rhs.scale(-1);
            }
            if lhs != rhs {
                return Err(SapcError::BoundaryEquation { s });
            }
        }
        Ok(SymmetricPair { name: name.into(), n: psi.n, boundary, total, inclusion, sub, psi, factors: None })
    }

    pub fn boundary(&self) -> &SymmetricComplex {
        &self.boundary
    }

    pub fn total(&self) -> &Arc<ChainComplex> {
        &self.total
    }

    pub fn inclusion(&self) -> &ChainMap {
        &self.inclusion
    }

    pub fn psi(&self) -> &SymmetricStructure {
        &self.psi
    }

    /// Slant with `ψ_0`: `H^{n-j}(D, C) → H_j(D)`.
    pub fn relative_certificate(&self) -> Result<OpenCertificate, SapcError> {
        let rel = BasisSet::full(&self.total).difference(&self.sub);
        let full = BasisSet::full(&self.total);
        let phi = slant_map(&self.total, &self.psi.components[0], self.n as i32, &rel, &full, BackPolicy::Reject)?;
        Ok(certify_map(&phi, self.n as i32, "(D,C)")?)
    }

    pub fn relative_cohomology(&self, p: i32) -> Result<CohomologyBasis, SapcError> {
        match &self.factors {
            Some(f) => {
                let (a, b) = (&f.0, &f.1);
                let layout = TensorLayout::new(&a.total, b.complex());
                let mut parts = Vec::new();
                for q in a.total.degrees().filter(|_| !a.total.is_zero()) {
                    let x = a.relative_cohomology(q)?;
                    let y = b.free_cohomology(p - q)?;
                    if !x.free.is_empty() && !y.free.is_empty() {
                        parts.push((x, y));
                    }
                }
                Ok(kunneth(&layout, self.total.rank(p), p, &parts))
            }
            None => Ok(free_relative_cohomology(&self.total, &self.sub, p)?),
        }
    }

    pub fn absolute_cohomology(&self, p: i32) -> Result<CohomologyBasis, SapcError> {
        match &self.factors {
            Some(f) => {
                let (a, b) = (&f.0, &f.1);
                let layout = TensorLayout::new(&a.total, b.complex());
                let mut parts = Vec::new();
                for q in a.total.degrees().filter(|_| !a.total.is_zero()) {
                    let x = a.absolute_cohomology(q)?;
                    let y = b.free_cohomology(p - q)?;
                    if !x.free.is_empty() && !y.free.is_empty() {
                        parts.push((x, y));
                    }
                }
                Ok(kunneth(&layout, self.total.rank(p), p, &parts))
            }
            None => Ok(free_cohomology(&self.total, p)?),
        }
    }

    /// `(u ⊗ v)(ψ_0)` for `u ∈ H^p(D, C)`, `v ∈ H^{n-p}(D)`.
    pub fn relative_pairing(&self, p: i32) -> Result<Vec<Vec<BigInt>>, SapcError> {
        let left = self.relative_cohomology(p)?;
        let right = self.absolute_cohomology(self.n as i32 - p)?;
        Ok(pairing_matrix(&self.psi.components[0], &left, &right))
    }

    /// Signature of the (possibly degenerate) middle form on `H^{n/2}(D, C)`.
    pub fn signature(&self) -> Result<SignatureReport, SapcError> {
        if !self.n.is_multiple_of(4) {
            return Ok(SignatureReport::not_applicable());
        }
        let rel = self.relative_cohomology(self.n as i32 / 2)?;
        SignatureReport::from_form(pairing_matrix(&self.psi.components[0], &rel, &rel))
    }
}

/// Pair of a compact manifold and its boundary, with `ψ_s = Δ_s(ω)`.
pub fn sap_pair_from_manifold(m: &OrientedManifoldComplex) -> Result<SymmetricPair, SapcError> {
    sap_pair_from_manifold_window(m, MANIFOLD_WINDOW)
}

/// As [`sap_pair_from_manifold`] with structures up to `s = window`.
pub fn sap_pair_from_manifold_window(m: &OrientedManifoldComplex, window: usize) -> Result<SymmetricPair, SapcError> {
    if !m.has_boundary() {
        return Err(SapcError::NoBoundary);
    }
    let bm = m.boundary_manifold()?;
    let boundary = SymmetricComplex::from_manifold_window(&bm, window)?;
    let ids = (0..m.base().vertex_count() as u32).collect();
    let inclusion = SimplicialMap::new(bm.base().clone(), m.base().clone(), ids)?.chain_map()?;
    let psi = symmetric_construction(m, window)?;
    SymmetricPair::new(m.name(), boundary, inclusion, psi)
}

/// `P ⊠ X` for a pair `P` and a closed complex `X`; degree-zero components only.
pub fn product_pair(p: &SymmetricPair, x: &SymmetricComplex) -> Result<SymmetricPair, SapcError> {
    let boundary = product_sapc(&p.boundary, x, false)?;
    let layout = TensorLayout::new(&p.total, x.complex());
    let psi = product_chain(&p.psi.components[0], x.phi0(), &layout);
    let target = Arc::new(tensor_complex(&p.total, x.complex())?);
    let inner = TensorLayout::new(p.boundary.complex(), x.complex());
    let f = &p.inclusion;
    let inclusion = ChainMap::from_fn(boundary.complex().clone(), target, 0, |m, i| {
        let (q, a, r, b) = inner.split(m, i);
        f.component(q).col(a).iter().map(|&(t, v)| (layout.index(q, t as usize, r, b) as u32, v)).collect()
    })?;
    let structure = SymmetricStructure { n: p.n + x.n, components: vec![psi] };
    let mut out = SymmetricPair::new(&alloc::format!("{}x{}", p.name, x.name), boundary, inclusion, structure)?;
    out.factors = Some(Box::new((p.clone(), x.clone())));
    Ok(out)
}

/// Algebraic pair bounding a hyperbolic form: `C = Z^{2r}` in degree 2 with
/// `φ₀ = Σ_k l_k ⊗ m_k + m_k ⊗ l_k`, where `l_k, m_k` are columns `k` and
/// `r + k` of the unimodular `basis`, and `D = C ∪ Z^r` in degree 3 with
/// `∂x_k = l_k`, so the Lagrangian spanned by the `l_k` is killed.
pub fn lagrangian_pair(basis: &[Vec<i64>]) -> Result<SymmetricPair, SapcError> {
    let n = basis.len();
    assert!(n.is_multiple_of(2) && basis.iter().all(|r| r.len() == n), "square matrix of even size");
    let r = n / 2;
    let col = |k: usize| -> Vec<i64> { (0..n).map(|i| basis[i][k]).collect() };
    let c = Arc::new(ChainComplex::concentrated(2, n));
    let mut phi = TensorChain::new();
    let mut psi = TensorChain::new();
    for k in 0..r {
        let (l, m) = (col(k), col(r + k));
        for i in 0..n {
            for j in 0..n {
                phi.add_term((2, i as u32, 2, j as u32), l[i] * m[j] + m[i] * l[j]);
            }
            psi.add_term((3, k as u32, 2, i as u32), m[i]);
            psi.add_term((2, i as u32, 3, k as u32), m[i]);
        }
    }
    let boundary = SymmetricComplex::new("hyperbolic", c.clone(), SymmetricStructure { n: 4, components: vec![phi] })?;
    let d3 = SparseMatrix::from_columns(
        n,
        (0..r)
            .map(|k| col(k).into_iter().enumerate().filter(|&(_, v)| v != 0).map(|(i, v)| (i as u32, v)).collect())
            .collect(),
    );
    let d = Arc::new(ChainComplex::new(2, vec![n, r], vec![d3], None)?);
    let inclusion = ChainMap::from_fn(c, d, 0, |_, i| vec![(i as u32, 1)])?;
    SymmetricPair::new("lagrangian", boundary, inclusion, SymmetricStructure { n: 5, components: vec![psi] })
}

/// Signature by symmetric Gaussian elimination over `Q`.
pub fn congruence_signature(form: &[Vec<BigInt>]) -> Result<i64, SapcError> {
    let n = form.len();
    if form.iter().any(|r| r.len() != n) {
        return Err(SapcError::FormNotSymmetric);
    }
    for i in 0..n {
        for j in 0..i {
            if form[i][j] != form[j][i] {
                return Err(SapcError::FormNotSymmetric);
            }
        }
    }
    let mut a: Vec<Vec<BigRational>> =
        form.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut sig = 0i64;
    while !active.is_empty() {
        // Prefer a nonzero diagonal pivot.
        let pivot = match active.iter().copied().find(|&i| !a[i][i].is_zero()) {
            Some(p) => p,
            None => {
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero());
                let Some((i, j)) = pair else { break };
                // e_i ← e_i + e_j gives diagonal 2 a_ij.
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        let d = a[pivot][pivot].clone();
        sig += if d.is_positive() { 1 } else { -1 };
        active.retain(|&i| i != pivot);
        for &i in &active {
            if a[i][pivot].is_zero() {
                continue;
            }
            let f = &a[i][pivot] / &d;
            for &k in &active {
                let v = &f * &a[pivot][k];
                a[i][k] -= v;
            }
        }
        for &i in &active {
            a[i][pivot] = BigRational::zero();
            a[pivot][i] = BigRational::zero();
        }
    }
    Ok(sig)
}

/// Integral basis change `P` with `Pᵀ B P = [[0, 1], [1, 0]]`, for an even
/// unimodular indefinite rank-two form.
pub fn hyperbolic_basis(b: &[Vec<BigInt>]) -> Option<[[BigInt; 2]; 2]> {
    if b.len() != 2 || b[0].len() != 2 || b[0][1] != b[1][0] {
        return None;
    }
    let (a, m, c) = (&b[0][0], &b[0][1], &b[1][1]);
    if a.is_odd() || c.is_odd() || a * c - m * m != -BigInt::one() {
        return None;
    }
    let form = |x: &[BigInt; 2], y: &[BigInt; 2]| {
        &x[0] * a * &y[0] + &x[0] * m * &y[1] + &x[1] * m * &y[0] + &x[1] * c * &y[1]
    };
    // Isotropic primitive vector: a x² + 2 m x y + c y² = 0, discriminant 1.
    let v: [BigInt; 2] = if a.is_zero() {
        [BigInt::one(), BigInt::zero()]
    } else {
        // x / y = (-m + 1) / a.
        let num = -m + BigInt::one();
        let g = num.gcd(a);
        [num / &g, a / &g]
    };
    if !form(&v, &v).is_zero() {
        return None;
    }
    // w with B(v, w) = 1: Bv = (r, s) is primitive since B is unimodular.
    let r = a * &v[0] + m * &v[1];
    let s = m * &v[0] + c * &v[1];
    let e = r.extended_gcd(&s);
    if !e.gcd.is_one() {
        return None;
    }
    let mut w = [e.x, e.y];
    let half = form(&w, &w) / 2;
    w = [&w[0] - &half * &v[0], &w[1] - &half * &v[1]];
    let p = [[v[0].clone(), w[0].clone()], [v[1].clone(), w[1].clone()]];
    let det = &p[0][0] * &p[1][1] - &p[0][1] * &p[1][0];
    (form(&v, &w).is_one() && form(&w, &w).is_zero() && det.abs().is_one()).then_some(p)
}

/// Group reported for `H^p` free rank checks.
pub fn cohomology_rank(c: &ChainComplex, p: i32) -> Result<HomologyGroup, ChainError> {
    let dual = dual_complex(c, 0)?;
    Ok(crate::chain::homology(&dual, -p))
}
