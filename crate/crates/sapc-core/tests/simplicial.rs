mod common;

use common::*;
use num_bigint::BigInt;
use sapc_core::chain::{homology, is_quasi_iso, ChainMap};
use sapc_core::simplicial::{
    last_vertex_map, subdivision_chain_map, ComplexError, OrientedManifoldComplex, SimplicialComplex,
};
use std::sync::Arc;

fn bettis(c: &SimplicialComplex) -> Vec<usize> {
    let cc = c.chain_complex();
    (0..=c.dim()).map(|n| homology(&cc, n).betti).collect()
}

#[test]
fn corpus_homology() {
    assert_eq!(bettis(sphere(2).base()), vec![1, 0, 1]);
    assert_eq!(bettis(sphere(4).base()), vec![1, 0, 0, 0, 1]);
    assert_eq!(bettis(torus().base()), vec![1, 2, 1]);
    assert_eq!(bettis(cp2().base()), vec![1, 0, 1, 0, 1]);
    let rp = rp2().chain_complex();
    assert_eq!(homology(&rp, 0).betti, 1);
    assert_eq!(homology(&rp, 1).betti, 0);
    assert_eq!(homology(&rp, 1).torsion, vec![BigInt::from(2)]);
    assert!(homology(&rp, 2).is_zero());
    for n in 0..=4 {
        assert!(homology(&cp2().base().chain_complex(), n).torsion.is_empty());
    }
}

#[test]
fn cp2_f_vectors() {
    let m = cp2();
    assert_eq!(m.base().f_vector(), vec![9, 36, 84, 90, 36]);
    assert_eq!(m.base().barycentric_subdivision().f_vector(), vec![255, 2916, 9144, 10800, 4320]);
}

#[test]
fn rp2_is_not_orientable() {
    let err = OrientedManifoldComplex::from_top_simplices("RP2", 6, &rp2_tops(), None, false).unwrap_err();
    assert!(matches!(err, ComplexError::InconsistentOrientation { .. }));
}

#[test]
fn bad_inputs_are_rejected() {
    // Three triangles on one edge.
    let tops = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]];
    let err = OrientedManifoldComplex::from_top_simplices("fan", 5, &tops, None, true).unwrap_err();
    assert!(matches!(err, ComplexError::NonManifoldLink { cofaces: 3, .. }));
    // A disk is rejected when boundary is not allowed.
    let err = OrientedManifoldComplex::from_top_simplices("d", 3, &[vec![0, 1, 2]], None, false).unwrap_err();
    assert!(matches!(err, ComplexError::NonManifoldLink { cofaces: 1, .. }));
    // Wrong explicit signs on S².
    let tops = boundary_of_simplex(2);
    let err = OrientedManifoldComplex::from_top_simplices("s", 4, &tops, Some(&[1, 1, 1, 1]), false).unwrap_err();
    assert!(matches!(err, ComplexError::InconsistentOrientation { .. }));
    let ok = OrientedManifoldComplex::from_top_simplices("s", 4, &tops, Some(&[1, -1, 1, -1]), false);
    assert!(ok.is_ok());
    let not_closed = SimplicialComplex::new(3, vec![vec![0], vec![1], vec![0, 1, 2]]);
    assert!(matches!(not_closed, Err(ComplexError::NotClosedUnderFaces { .. })));
}

#[test]
fn fundamental_cycles_are_cycles() {
    for m in closed_manifolds() {
        let c = m.base().chain_complex();
        assert!(c.apply_boundary(m.dim() as i32, &m.fundamental_cycle()).is_empty(), "{}", m.name());
    }
    let d = disk(4);
    let c = d.base().chain_complex();
    let b = c.apply_boundary(4, &d.fundamental_cycle());
    assert_eq!(b.len(), 5);
    let bm = d.boundary_manifold().unwrap();
    assert_eq!(bm.base().f_vector(), vec![5, 10, 10, 5]);
}

#[test]
fn products_are_oriented() {
    let s2 = sphere(2);
    let p = s2.product(&s2).unwrap();
    assert_eq!(p.dim(), 4);
    assert_eq!(bettis(p.base()), vec![1, 0, 2, 0, 1]);
    assert_eq!(p.base().euler_characteristic(), 4);
    let t = torus();
    let pt = t.product(&s2).unwrap();
    assert_eq!(pt.base().euler_characteristic(), 0);
    let i = disk(1);
    let cyl = s2.product(&i).unwrap();
    assert!(cyl.has_boundary());
    assert_eq!(cyl.boundary_manifold().unwrap().base().euler_characteristic(), 4);
}

#[test]
fn subdivision_is_compatible_with_the_fundamental_class() {
    for m in [sphere(2), torus(), disk(2), sphere(3)] {
        let sd = m.subdivided().unwrap();
        let sub = subdivision_chain_map(m.base(), sd.base()).unwrap();
        // Sd ω = ω_sd.
        let n = m.dim() as i32;
        let mut image = vec![0i64; sd.base().count(m.dim())];
        for (i, v) in m.fundamental_cycle() {
            for &(r, x) in sub.component(n).col(i as usize) {
                image[r as usize] += x * v;
            }
        }
        let omega_sd: Vec<i64> = sd.fundamental_cycle().iter().map(|e| e.1).collect();
        assert_eq!(image, omega_sd, "{}", m.name());
        // The last-vertex map sends ω_sd back to ω.
        let t = last_vertex_map(m.base(), sd.base());
        assert!(t.is_order_preserving());
        let tc = t.chain_map().unwrap();
        let back = tc.component(n).apply(&sd.fundamental_cycle());
        assert_eq!(back, m.fundamental_cycle());
        assert!(is_quasi_iso(&sub).unwrap());
        let comp: ChainMap = tc.compose(&sub).unwrap();
        assert_eq!(comp.component(n), ChainMap::identity(Arc::new(m.base().chain_complex())).component(n));
    }
}
