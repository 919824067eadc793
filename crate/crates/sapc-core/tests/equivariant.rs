mod common;

use common::*;
use num_bigint::BigInt;
use sapc_core::chain::{homology, induced_map, mapping_cone, ChainComplex, HomologyBasis};
use sapc_core::equivariant::{
    cup_i_terms, higher_diagonal, norm_map, symmetric_construction, z2_homotopy_complex, z2_homotopy_window,
    InvolutiveComplex, TensorChain, WResolution, WindowKind,
};
use sapc_core::simplicial::{last_vertex_map, SimplicialComplex};
use std::sync::Arc;

fn all_complexes() -> Vec<SimplicialComplex> {
    let mut v: Vec<SimplicialComplex> = closed_manifolds().iter().map(|m| (**m.base()).clone()).collect();
    v.push(rp2());
    v.push((**disk(4).base()).clone());
    v.push((**sphere(2).subdivided().unwrap().base()).clone());
    v
}

/// `∂Δ_s(x) - (-1)^s Δ_s(∂x) - Δ_{s-1}(x) - (-1)^s TΔ_{s-1}(x)` for a generator.
fn steenrod_defect(x: &SimplicialComplex, c: &ChainComplex, k: usize, i: usize, s: usize) -> TensorChain {
    let ds = higher_diagonal(Arc::new(x.clone()), s);
    let lhs = ds.on_simplex(k, i).boundary(c, c);
    let dx = c.apply_boundary(k as i32, &[(i as u32, 1)]);
    let mut rhs = if k > 0 { ds.apply(k - 1, &dx) } else { TensorChain::new() };
    if s % 2 == 1 {
        rhs = rhs.scale(-1);
    }
    let mut defect = lhs.sub(&rhs);
    if s > 0 {
        let prev = higher_diagonal(Arc::new(x.clone()), s - 1).on_simplex(k, i);
        defect = defect.sub(&prev.norm_s(s));
    }
    defect
}

#[test]
fn steenrod_relation_on_every_simplex() {
    for x in all_complexes() {
        let c = x.chain_complex();
        for k in 0..=x.dim() as usize {
            for i in 0..x.count(k) {
                for s in 0..=3 {
                    assert!(steenrod_defect(&x, &c, k, i, s).is_zero(), "k={k} i={i} s={s}");
                }
            }
        }
    }
}

#[test]
fn diagonals_are_local() {
    for x in all_complexes() {
        let xa = Arc::new(x.clone());
        for k in 0..=x.dim() as usize {
            for (i, sigma) in x.simplices(k).iter().enumerate() {
                for s in 0..=3 {
                    for (&(p, a, q, b), _) in higher_diagonal(xa.clone(), s).on_simplex(k, i).terms() {
                        let fa = &x.simplices(p as usize)[a as usize];
                        let fb = &x.simplices(q as usize)[b as usize];
                        assert!(fa.iter().chain(fb).all(|v| sigma.contains(v)));
                    }
                }
            }
        }
    }
}

/// Independent front/back diagonal.
fn alexander_whitney(x: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
    (0..x.len()).map(|i| (x[..=i].to_vec(), x[i..].to_vec())).collect()
}

#[test]
fn zeroth_diagonal_is_alexander_whitney() {
    for x in all_complexes() {
        for k in 0..=x.dim() as usize {
            for s in x.simplices(k) {
                let mut ours: Vec<(Vec<u32>, Vec<u32>, i64)> = cup_i_terms(s, 0);
                ours.sort();
                let mut theirs: Vec<(Vec<u32>, Vec<u32>, i64)> =
                    alexander_whitney(s).into_iter().map(|(a, b)| (a, b, 1)).collect();
                theirs.sort();
                assert_eq!(ours, theirs);
            }
        }
    }
}

#[test]
fn relations_on_the_tetrahedron_expansion() {
    // Every face of Δ³ for s = 1, 2.
    let x = SimplicialComplex::from_maximal(4, &[vec![0, 1, 2, 3]]).unwrap();
    let c = x.chain_complex();
    for k in 0..=3 {
        for i in 0..x.count(k) {
            for s in 1..=2 {
                assert!(steenrod_defect(&x, &c, k, i, s).is_zero());
            }
        }
    }
    // Top cup-n diagonal on Δ^n is ±x⊗x.
    let t = cup_i_terms(&[0, 1, 2, 3], 3);
    assert_eq!(t.len(), 1);
    assert_eq!(t[0].0, vec![0, 1, 2, 3]);
}

#[test]
fn symmetric_construction_closed_and_relative() {
    for m in closed_manifolds().into_iter().chain([sphere(2).subdivided().unwrap()]) {
        let phi = symmetric_construction(&m, 2).unwrap();
        assert_eq!(phi.components.len(), 3);
        let c = m.base().chain_complex();
        phi.verify_closed(&c).unwrap();
        assert_eq!(phi.components[0].degrees(), vec![m.dim() as i32]);
    }
    let d = disk(4);
    let phi = symmetric_construction(&d, 3).unwrap();
    let c = d.base().chain_complex();
    assert!(phi.verify_closed(&c).is_err());
    // The point: φ0 = pt ⊗ pt and nothing above.
    let pt =
        sapc_core::simplicial::OrientedManifoldComplex::from_top_simplices("pt", 1, &[vec![0]], None, false).unwrap();
    let phi = symmetric_construction(&pt, 2).unwrap();
    assert_eq!(phi.components[0], TensorChain::from_terms([((0, 0, 0, 0), 1)]));
    assert!(phi.components[1].is_zero() && phi.components[2].is_zero());
}

#[test]
fn tetrahedron_boundary_first_relation() {
    let m = sphere(2);
    let c = m.base().chain_complex();
    let phi = symmetric_construction(&m, 2).unwrap();
    let d1 = phi.components[1].boundary(&c, &c);
    assert_eq!(d1, phi.components[0].sub(&phi.components[0].swap()));
    let d2 = phi.components[2].boundary(&c, &c);
    assert_eq!(d2, phi.components[1].add(&phi.components[1].swap()));
}

#[test]
fn diagonals_commute_with_the_last_vertex_map() {
    for m in [sphere(2), torus()] {
        let sd = m.subdivided().unwrap();
        let t = last_vertex_map(m.base(), sd.base()).chain_map().unwrap();
        for s in 0..=2 {
            let up = higher_diagonal(sd.base().clone(), s).apply(m.dim(), &sd.fundamental_cycle());
            let down = higher_diagonal(m.base().clone(), s).apply(m.dim(), &m.fundamental_cycle());
            assert_eq!(up.map(&t, &t), down, "s={s}");
        }
    }
}

#[test]
fn cp2_phi0_gives_the_cup_product_form() {
    // Oracle: cup products of cocycles evaluated on ω, computed directly.
    let m = cp2();
    let x = m.base();
    let c = x.chain_complex();
    let phi = symmetric_construction(&m, 1).unwrap();
    let dual = sapc_core::chain::dual_complex(&c, 0).unwrap();
    let basis = HomologyBasis::compute(&dual, -2);
    assert_eq!(basis.generators.len(), 1);
    let alpha = &basis.generators[0];
    let cup: BigInt = m
        .fundamental_cycle()
        .iter()
        .map(|&(i, sgn)| {
            let s = &x.simplices(4)[i as usize];
            let front = x.index_of(&s[..3]).unwrap();
            let back = x.index_of(&s[2..]).unwrap();
            &alpha[front] * &alpha[back] * sgn
        })
        .sum();
    let via_phi = phi.components[0].evaluate(
        |p, a| if p == 2 { alpha[a as usize].clone() } else { BigInt::from(0) },
        |q, b| if q == 2 { alpha[b as usize].clone() } else { BigInt::from(0) },
    );
    assert_eq!(cup, via_phi);
    assert_eq!(cup.magnitude(), &num_bigint::BigUint::from(1u32));
}

fn z_trivial() -> InvolutiveComplex {
    InvolutiveComplex::trivial(Arc::new(ChainComplex::concentrated(0, 1)))
}

#[test]
fn group_cohomology_windows() {
    let d = z_trivial();
    let h = |n: i32| homology(&z2_homotopy_window(&d, WindowKind::Fixed, n).unwrap(), n);
    assert!(h(-1).is_zero());
    assert_eq!(h(-2).torsion, vec![BigInt::from(2)]);
    assert_eq!(h(0).betti, 1);
    assert_eq!(h(-4).torsion, vec![BigInt::from(2)]);
    let sign = InvolutiveComplex::sign(Arc::new(ChainComplex::concentrated(0, 1)));
    let w = z2_homotopy_window(&sign, WindowKind::Orbits, 0).unwrap();
    assert_eq!(homology(&w, 0).torsion, vec![BigInt::from(2)]);
    assert_eq!(homology(&w, 0).betti, 0);
    let zero = InvolutiveComplex::trivial(Arc::new(ChainComplex::zero()));
    assert!(z2_homotopy_window(&zero, WindowKind::Fixed, 3).unwrap().is_zero());
    assert!(z2_homotopy_window(&zero, WindowKind::Orbits, 3).unwrap().is_zero());
}

#[test]
fn resolution_is_exact() {
    let w = WResolution::augmented_complex(6);
    for n in -1..6 {
        assert!(homology(&w, n).is_zero(), "degree {n}");
    }
}

#[test]
fn norm_on_trivial_module_is_two() {
    let d = z_trivial();
    let f = norm_map(&d, -1, 1).unwrap();
    let src = HomologyBasis::compute(f.source(), 0);
    let dst = HomologyBasis::compute(f.target(), 0);
    let m = induced_map(&f, 0, &src, &dst);
    assert_eq!((m.rows(), m.cols()), (1, 1));
    assert_eq!(m[(0, 0)].magnitude(), &num_bigint::BigUint::from(2u32));
}

/// Every homology group of the cone in `degrees` vanishes after inverting 2.
fn cone_is_two_primary(d: &InvolutiveComplex, lo: i32, hi: i32, degrees: std::ops::RangeInclusive<i32>) -> bool {
    let f = norm_map(d, lo, hi).unwrap();
    let cone = mapping_cone(&f).unwrap();
    degrees.into_iter().all(|k| {
        let h = homology(&cone, k);
        h.betti == 0 && h.torsion.iter().all(|t| (t & (t - BigInt::from(1))) == BigInt::from(0))
    })
}

#[test]
fn norm_on_free_module_is_an_isomorphism() {
    let d = InvolutiveComplex::free_rank_one();
    let f = norm_map(&d, -4, 4).unwrap();
    let cone = mapping_cone(&f).unwrap();
    for k in -2..=3 {
        assert!(homology(&cone, k).is_zero(), "degree {k}");
    }
}

#[test]
fn norm_on_tensor_square_of_sphere_after_inverting_two() {
    let c = sphere(2).base().chain_complex();
    let d = InvolutiveComplex::tensor_square(&c).unwrap();
    assert!(cone_is_two_primary(&d, -3, 7, 0..=4));
}

#[test]
fn involution_is_checked() {
    let c = Arc::new(ChainComplex::concentrated(0, 2));
    let not = sapc_core::chain::ChainMap::new(
        c.clone(),
        c.clone(),
        0,
        vec![sapc_core::matrix::SparseMatrix::from_dense(2, 2, &[1, 1, 0, 1])],
    )
    .unwrap();
    assert!(InvolutiveComplex::new(c, not).is_err());
    let cc = InvolutiveComplex::tensor_square(&sphere(2).base().chain_complex()).unwrap();
    let t = cc.involution();
    let tt = t.compose(t).unwrap();
    for n in 0..=4 {
        assert_eq!(tt.component(n), sapc_core::matrix::SparseMatrix::identity(cc.complex().rank(n)));
    }
    let fixed = z2_homotopy_complex(&cc, WindowKind::Fixed, 1, 3).unwrap();
    assert_eq!(fixed.lo(), 1);
}
