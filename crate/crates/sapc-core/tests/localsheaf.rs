mod common;

use common::*;
use proptest::prelude::*;
use sapc_core::chain::{homology, ChainComplex};
use sapc_core::equivariant::{higher_diagonal, TensorChain};
use sapc_core::localsheaf::{
    box_economy, descent_check, excision_square_check, guide_object, product_system, pushforward, subdivision_guide,
    BasisSet, ClosedChoice, DescentMode, LimitKind, LocalError, LocalSystem, PosetDiagram, SlantContext,
};
use sapc_core::open::{open_star_family, star_union_family, OpenFamily};
use sapc_core::simplicial::{subdivision_chain_map, OrientedManifoldComplex, SimplicialComplex, SimplicialMap};
use std::sync::Arc;

fn stars(x: &SimplicialComplex) -> Arc<OpenFamily> {
    Arc::new(star_union_family(x, 1 << 12).unwrap())
}

fn vertex_guide(x: &Arc<SimplicialComplex>) -> LocalSystem {
    guide_object(&SimplicialMap::identity(x.clone()), stars(x)).unwrap()
}

fn point() -> Arc<SimplicialComplex> {
    Arc::new(SimplicialComplex::from_maximal(1, &[vec![0]]).unwrap())
}

fn interval() -> Arc<SimplicialComplex> {
    Arc::new(SimplicialComplex::from_maximal(2, &[vec![0, 1]]).unwrap())
}

fn slant_context(m: &OrientedManifoldComplex) -> SlantContext {
    let family = stars(m.base());
    let (sys, sd) = subdivision_guide(m.base(), family).unwrap();
    let sub = subdivision_chain_map(m.base(), &sd).unwrap();
    let omega = sub.component(m.dim() as i32).apply(&m.fundamental_cycle());
    let lambda = higher_diagonal(sd, 0).apply(m.dim(), &omega);
    SlantContext::new(sys, lambda, m.dim() as i32).unwrap()
}

#[test]
fn guide_objects_satisfy_the_sheaf_invariants() {
    for m in closed_manifolds().into_iter().take(3) {
        let x = m.base().clone();
        let v = vertex_guide(&x);
        v.check_invariants().unwrap();
        assert!(v.check_free().unwrap());
        let (s, _) = subdivision_guide(&x, stars(&x)).unwrap();
        s.check_invariants().unwrap();
        assert!(s.check_free().unwrap());
        // C(X) is everything, C(∅) is nothing.
        let total = s.space().total();
        assert_eq!(s.basis(&total).unwrap().len(), s.total().total_rank());
    }
}

#[test]
fn broken_tables_are_rejected() {
    let x = interval();
    // Stars of both vertices and their intersection, the open edge.
    let family = Arc::new(open_star_family(&x, &[vec![0], vec![1]], 16).unwrap());
    let total = Arc::new(x.chain_complex());
    let full = BasisSet::full(&total);
    let empty = BasisSet::empty(&total);
    let guide = guide_object(&SimplicialMap::identity(x.clone()), family.clone()).unwrap();
    let good: Vec<BasisSet> = family.opens().iter().map(|o| guide.basis(o).unwrap()).collect();
    LocalSystem::from_table(family.clone(), total.clone(), good.clone()).unwrap();

    let mut t = good.clone();
    let pos_empty = family.position(&family.space().empty_open()).unwrap();
    t[pos_empty] = full.clone();
    assert_eq!(LocalSystem::from_table(family.clone(), total.clone(), t).unwrap_err(), LocalError::EmptyNotZero);

    let mut t = good.clone();
    let pos_total = family.position(&family.space().total()).unwrap();
    t[pos_total] = empty.clone();
    assert_eq!(LocalSystem::from_table(family.clone(), total.clone(), t).unwrap_err(), LocalError::TotalMismatch);

    // The edge alone is not a subcomplex.
    let mut t = good.clone();
    let edge_only = BasisSet::from_fn(&total, |n, _| n == 1);
    let some = (0..family.len()).find(|&i| family.opens()[i].len() == 2).unwrap();
    t[some] = edge_only;
    assert!(matches!(
        LocalSystem::from_table(family.clone(), total.clone(), t).unwrap_err(),
        LocalError::NotSubcomplex { .. }
    ));

    // Both stars get everything: their intersection (the open edge) must then too.
    let mut t = good;
    for (i, o) in family.opens().iter().enumerate() {
        if o.len() == 2 {
            t[i] = full.clone();
        }
    }
    assert!(matches!(
        LocalSystem::from_table(family, total, t).unwrap_err(),
        LocalError::NotIntersectionCompatible { .. }
    ));
}

#[test]
fn table_and_carrier_forms_agree() {
    let x = Arc::new((**sphere(2).base()).clone());
    let v = vertex_guide(&x);
    let table: Vec<BasisSet> = v.family().opens().iter().map(|o| v.basis(o).unwrap()).collect();
    let t = LocalSystem::from_table(v.family().clone(), v.total().clone(), table).unwrap();
    assert!(t.check_free().unwrap());
    for n in 0..=2 {
        for i in 0..v.total().rank(n) {
            assert_eq!(t.minimal_open(n, i), v.minimal_open(n, i));
        }
    }
    let triangle = x.total_count() - 1;
    assert_eq!(t.basis(&t.space().up_closure([triangle])).unwrap_err(), LocalError::OpenNotInFamily);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn intersections_are_preserved(a in any::<u64>(), b in any::<u64>(), sd in any::<bool>()) {
        let x = Arc::new(torus().base().as_ref().clone());
        let family = stars(&x);
        let sys = if sd { subdivision_guide(&x, family).unwrap().0 } else { vertex_guide(&x) };
        let space = sys.space().clone();
        let pick = |seed: u64| space.up_closure((0..space.len()).filter(|&c| seed.rotate_left(c as u32) & 7 == 0));
        let (u, v) = (pick(a), pick(b));
        let cu = sys.basis(&u).unwrap();
        let cv = sys.basis(&v).unwrap();
        prop_assert_eq!(sys.basis(&u.intersection(&v)).unwrap(), cu.intersection(&cv));
        prop_assert!(cu.is_subcomplex(sys.total()));
        prop_assert!(sys.basis(&u.union(&v)).unwrap().is_subcomplex(sys.total()));
    }
}

#[test]
fn subdivision_guide_values_have_the_homotopy_type_of_the_open() {
    // Open star of a vertex is contractible; the complement of a closed vertex in S² is a disk.
    let s2 = sphere(2);
    let x = s2.base().clone();
    let (sys, _) = subdivision_guide(&x, stars(&x)).unwrap();
    let space = sys.space().clone();
    let star = space.up_closure([0]);
    let complement = space.total().difference(&space.down_closure([0]));
    for u in [star.clone(), complement.clone()] {
        let c = sys.complex(&u).unwrap();
        assert_eq!(homology(&c, 0).betti, 1);
        assert!((1..=2).all(|j| homology(&c, j).is_zero()));
    }
    let ring = sys.complex(&star.intersection(&complement)).unwrap();
    assert_eq!((homology(&ring, 0).betti, homology(&ring, 1).betti), (1, 1));
}

#[test]
fn pushforward_keeps_the_total_complex() {
    let x = Arc::new(torus().base().as_ref().clone());
    let v = vertex_guide(&x);
    let collapse = SimplicialMap::collapse(x.clone());
    let pt = collapse.target().clone();
    let target = stars(&pt);
    let pushed = pushforward(&collapse, &v, target.clone()).unwrap();
    pushed.check_invariants().unwrap();
    assert_eq!(pushed.complex(&target.space().total()).unwrap(), **v.total());

    // Along the identity nothing changes, for carriers and for tables.
    let id = SimplicialMap::identity(x.clone());
    let same = pushforward(&id, &v, v.family().clone()).unwrap();
    let table: Vec<BasisSet> = v.family().opens().iter().map(|o| v.basis(o).unwrap()).collect();
    let tv = LocalSystem::from_table(v.family().clone(), v.total().clone(), table).unwrap();
    let same_table = pushforward(&id, &tv, v.family().clone()).unwrap();
    for o in v.family().opens() {
        assert_eq!(same.basis(o).unwrap(), v.basis(o).unwrap());
        assert_eq!(same_table.basis(o).unwrap(), v.basis(o).unwrap());
    }
}

#[test]
fn product_systems_use_product_carriers() {
    let a = interval();
    let c = vertex_guide(&a);
    let p = product_system(&c, &c).unwrap();
    p.check_invariants().unwrap();
    assert_eq!(p.total().euler_characteristic(), 1);
    // C(U × V) = C(U) ⊗ C(V) in size.
    for (i, u) in c.family().opens().iter().enumerate() {
        for (j, v) in c.family().opens().iter().enumerate() {
            let w = p.family().opens()[i * c.family().len() + j].clone();
            assert_eq!(p.basis(&w).unwrap().len(), c.basis(u).unwrap().len() * c.basis(v).unwrap().len());
        }
    }
}

#[test]
fn holim_of_a_span_is_the_homotopy_pullback() {
    // Two points over a point: holim of A → C ← B with A = B = C = point is a point.
    let ambient = Arc::new(ChainComplex::concentrated(0, 1));
    let full = BasisSet::full(&ambient);
    let d = PosetDiagram::new(ambient.clone(), vec![full.clone(), full.clone(), full.clone()], |p, q| q == 2 && p != 2);
    d.validate().unwrap();
    let (lo, hi) = d.natural_range(LimitKind::Holim).unwrap();
    let t = d.totalize(LimitKind::Holim, lo, hi, 1000).unwrap();
    assert_eq!(t.complex.euler_characteristic(), 1);
    assert_eq!(homology(&t.complex, 0).betti, 1);
    // Hocolim of the opposite span (a point glued to itself along two points) is a circle.
    let e = PosetDiagram::new(ambient, vec![full.clone(), full.clone(), full], |p, q| p == 2 && q != 2);
    let (lo, hi) = e.natural_range(LimitKind::Hocolim).unwrap();
    let t = e.totalize(LimitKind::Hocolim, lo, hi, 1000).unwrap();
    assert_eq!(homology(&t.complex, 0).betti, 1);
    assert_eq!(homology(&t.complex, 1).betti, 0);
    assert_eq!(t.complex.euler_characteristic(), 1);
}

#[test]
fn truncated_windows_refuse_uncertified_degrees() {
    let ambient = Arc::new(ChainComplex::concentrated(0, 1));
    let full = BasisSet::full(&ambient);
    let d = PosetDiagram::new(ambient, vec![full.clone(), full], |p, q| p < q);
    let t = d.totalize(LimitKind::Holim, 0, 0, 100).unwrap();
    assert!(matches!(t.homology(0), Err(LocalError::WindowTooNarrow { .. })));
    let t = d.totalize(LimitKind::Holim, -2, 2, 100).unwrap();
    assert_eq!(t.homology(0).unwrap().betti, 1);
    assert!(matches!(d.totalize(LimitKind::Holim, -50, 50, 1), Err(LocalError::PosetTooLarge { .. })));
}

#[test]
fn descent_and_codescent_for_the_subdivision_guide() {
    let x = sphere(2).base().clone();
    let (sys, _) = subdivision_guide(&x, stars(&x)).unwrap();
    let space = sys.space().clone();
    let st = |v: usize| space.up_closure([v]);
    let (a, b) = (st(0), st(1).union(&st(2)));
    let union_closed = vec![a.clone(), b.clone(), a.union(&b)];
    let r = descent_check(&sys, &union_closed, DescentMode::Descent).unwrap();
    assert!(r.quasi_iso);
    let meet_closed = vec![a.clone(), b.clone(), a.intersection(&b)];
    let r = descent_check(&sys, &meet_closed, DescentMode::Codescent).unwrap();
    assert!(r.quasi_iso);
    // Covering S² by the stars of three vertices and their intersections.
    let mut cover = vec![st(0), st(1), st(2).union(&st(3))];
    for i in 0..3 {
        for j in i + 1..3 {
            cover.push(cover[i].intersection(&cover[j]));
        }
    }
    cover.push(cover[0].intersection(&cover[1]).intersection(&cover[2]));
    let r = descent_check(&sys, &cover, DescentMode::Codescent).unwrap();
    assert!(r.quasi_iso);
    assert_eq!(r.value_homology.iter().map(|h| h.betti).collect::<Vec<_>>(), vec![1, 0, 1]);

    assert!(matches!(
        descent_check(&sys, &[a.clone(), b.clone()], DescentMode::Descent),
        Err(LocalError::HypothesisViolated(_))
    ));
    assert!(matches!(descent_check(&sys, &[a, b], DescentMode::Codescent), Err(LocalError::HypothesisViolated(_))));
}

#[test]
fn vertex_guide_fails_codescent_on_a_bad_cover() {
    // Two vertex stars meet in no vertex, yet their union carries an edge.
    let x = sphere(2).base().clone();
    let sys = vertex_guide(&x);
    let space = sys.space().clone();
    let (a, b) = (space.up_closure([0]), space.up_closure([1]));
    let r = descent_check(&sys, &[a.clone(), b.clone(), a.intersection(&b)], DescentMode::Codescent).unwrap();
    assert!(!r.quasi_iso);
    assert_eq!(r.limit_homology.iter().find(|h| h.degree == 0).unwrap().betti, 2);
}

#[test]
fn excision_on_the_two_sphere() {
    let x = sphere(2).base().clone();
    let (sys, _) = subdivision_guide(&x, stars(&x)).unwrap();
    let space = sys.space().clone();
    let u = space.total().difference(&space.down_closure([3]));
    let v = space.up_closure([3]);
    let r = excision_square_check(&sys, &u, &v).unwrap();
    assert!(r.mayer_vietoris_exact && r.homotopy_pushout && r.relative_quasi_iso);
    let top = r.degrees.iter().find(|d| d.j == 2).unwrap();
    // The connecting map sends [S²] onto the class of the equator.
    assert_eq!(top.ranks, Some((0, 0, 1)));
    let one = r.degrees.iter().find(|d| d.j == 1).unwrap();
    assert_eq!((one.betti_intersection, one.ranks), (1, Some((0, 0, 0))));
    let zero = r.degrees.iter().find(|d| d.j == 0).unwrap();
    assert_eq!(zero.ranks, Some((1, 1, 0)));

    assert_eq!(excision_square_check(&sys, &u, &u).unwrap_err(), LocalError::CoverViolation);

    // The vertex guide is not excisive for this cover.
    let vg = vertex_guide(&x);
    let r = excision_square_check(&vg, &u, &v).unwrap();
    assert!(!r.mayer_vietoris_exact);
}

#[test]
fn slant_duality_on_the_two_sphere_and_torus() {
    for m in [sphere(2), torus()] {
        let ctx = slant_context(&m);
        let family = ctx.system().family().clone();
        for (i, u) in family.opens().iter().enumerate() {
            let cert = ctx.certify(u, family.label(i)).unwrap();
            assert!(cert.overall && cert.exact, "{} at {}", m.name(), cert.open);
            for d in &cert.degrees {
                assert!(d.iso && d.source.isomorphic(&d.target));
            }
        }
    }
}

#[test]
fn slant_sign_is_forced() {
    // Flipping the fundamental class flips every slant, still a chain map; a
    // cycle in the wrong degree is rejected.
    let m = sphere(2);
    let ctx = slant_context(&m);
    let space = ctx.system().space().clone();
    let phi = ctx.slant_map(&space.total()).unwrap();
    assert_eq!(phi.degree(), 0);
    let sys = ctx.system().clone();
    let bad = TensorChain::from_terms([((0, 0, 0, 0), 1)]);
    assert!(matches!(SlantContext::new(sys, bad, 2), Err(LocalError::NotACycle)));
}

#[test]
fn box_economy_on_small_inputs() {
    for (x, n) in [(point(), 0), (interval(), 1)] {
        let c = vertex_guide(&x);
        for choice in [ClosedChoice::ClosedSimplices, ClosedChoice::Vertices] {
            let b = box_economy(&c, &c, n, 2, &choice, 20000).unwrap();
            let tau = b.involution().unwrap().unwrap();
            assert!(tau.compose(&tau).unwrap() == sapc_core::ChainMap::identity(tau.source().clone()));
            let spec = b.specialization().unwrap();
            assert_eq!(spec.degree(), 0);
        }
    }
    let x = interval();
    let c = vertex_guide(&x);
    assert!(matches!(
        box_economy(&c, &c, 1, 2, &ClosedChoice::ClosedSimplices, 3),
        Err(LocalError::PosetTooLarge { .. })
    ));
    assert!(matches!(
        box_economy(&c, &c, 1, 0, &ClosedChoice::ClosedSimplices, 100),
        Err(LocalError::WindowTooNarrow { .. })
    ));
}

#[test]
fn box_economy_matches_the_tensor_square_of_the_interval() {
    let x = interval();
    let (c, _) = subdivision_guide(&x, stars(&x)).unwrap();
    let b = box_economy(&c, &c, 1, 2, &ClosedChoice::ClosedSimplices, 20000).unwrap();
    let t = &b.totalization;
    let global = sapc_core::tensor_complex(c.total(), c.total()).unwrap();
    for j in 0..=2 {
        assert!(t.homology(j).unwrap().isomorphic(&homology(&global, j)));
    }
    assert!(b.specialization_onto().unwrap());
}

#[test]
fn box_economy_on_the_two_sphere_with_a_small_family() {
    let x = sphere(2).base().clone();
    let family = Arc::new(open_star_family(&x, &[vec![0], vec![1]], 64).unwrap());
    let (c, _) = subdivision_guide(&x, family).unwrap();
    let b = box_economy(&c, &c, 2, 2, &ClosedChoice::Vertices, 20000).unwrap();
    let tau = b.involution().unwrap().unwrap();
    assert!(tau.compose(&tau).unwrap() == sapc_core::ChainMap::identity(tau.source().clone()));
    assert!(b.specialization_onto().unwrap());
    // The global class λ restricts to a cycle of the window at the top triple.
    let top = b.triples.iter().position(|&(u, k1, k2)| {
        c.family().opens()[u] == c.space().total() && k1 == b.closed.len() - 1 && k2 == b.closed.len() - 1
    });
    assert!(top.is_some());
}

#[test]
fn pushforward_is_functorial_and_keeps_duality() {
    let x = sphere(2).base().clone();
    let (sys, sd) = subdivision_guide(&x, stars(&x)).unwrap();
    // ∂Δ³ → Δ¹ → point, against the direct collapse.
    let edge = interval();
    let fold = SimplicialMap::new(x.clone(), edge.clone(), vec![0, 0, 1, 1]).unwrap();
    let to_point = SimplicialMap::collapse(edge.clone());
    let pt = to_point.target().clone();
    let twice = pushforward(&to_point, &pushforward(&fold, &sys, stars(&edge)).unwrap(), stars(&pt)).unwrap();
    let once = pushforward(&to_point.compose(&fold), &sys, stars(&pt)).unwrap();
    for o in twice.family().opens() {
        assert_eq!(twice.basis(o).unwrap(), once.basis(o).unwrap());
    }
    // The collapsed system still passes the slant certificate.
    let m = sphere(2);
    let sub = subdivision_chain_map(m.base(), &sd).unwrap();
    let omega = sub.component(2).apply(&m.fundamental_cycle());
    let lambda = higher_diagonal(sd, 0).apply(2, &omega);
    let ctx = SlantContext::new(once.clone(), lambda, 2).unwrap();
    for (i, o) in once.family().opens().iter().enumerate() {
        assert!(ctx.certify(o, once.family().label(i)).unwrap().overall);
    }
}
