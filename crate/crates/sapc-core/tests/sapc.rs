mod common;

use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sapc_core::chain::{homology, ChainComplex};
use sapc_core::equivariant::{SymmetricStructure, TensorChain};
use sapc_core::matrix::SparseMatrix;
use sapc_core::open::star_union_family;
use sapc_core::sapc::{
    congruence_signature, free_cohomology, hyperbolic_basis, product_pair, product_sapc, sap_pair_from_manifold,
    sapc_from_manifold, SapcError, SymmetricComplex, SymmetricPair,
};
use sapc_core::simplicial::OrientedManifoldComplex;
use sapc_core::ChainMap;
use std::sync::Arc;

fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn to_i64(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).unwrap()).collect()
}

/// `⟨α ∪ β, ω⟩` with the front/back cup product on ordered simplices.
fn cup_oracle(m: &OrientedManifoldComplex, p: usize, alpha: &[i64], beta: &[i64]) -> i64 {
    let x = m.base();
    let n = m.dim();
    let mut total = 0;
    for (i, s) in x.simplices(n).iter().enumerate() {
        let front = x.index_of(&s[..=p]).unwrap();
        let back = x.index_of(&s[p..]).unwrap();
        total += m.signs()[i] as i64 * alpha[front] * beta[back];
    }
    total
}

#[test]
fn signatures_of_the_corpus() {
    let s4 = SymmetricComplex::from_manifold(&sphere(4)).unwrap();
    let r = s4.signature().unwrap();
    assert_eq!((r.signature, r.rank, r.applicable), (0, 0, true));

    let m = cp2();
    let c = SymmetricComplex::from_manifold(&m).unwrap();
    let r = c.signature().unwrap();
    assert_eq!((r.signature, r.rank), (1, 1));
    // Independent cup-product evaluation on the same generator.
    let h2 = free_cohomology(c.complex(), 2).unwrap();
    let a = to_i64(&h2.free[0]);
    assert_eq!(BigInt::from(cup_oracle(&m, 2, &a, &a)), r.form[0][0]);

    let rev = SymmetricComplex::from_manifold(&m.reversed()).unwrap();
    assert_eq!(rev.signature().unwrap().signature, -1);
    assert_eq!(c.reversed().signature().unwrap().signature, -1);
    assert!(rev.is_nondegenerate().unwrap() && c.is_nondegenerate().unwrap());

    for m in [sphere(2), torus()] {
        let r = SymmetricComplex::from_manifold(&m).unwrap().signature().unwrap();
        assert!(!r.applicable && r.signature == 0);
    }
}

#[test]
fn global_duality_for_closed_manifolds() {
    for m in closed_manifolds() {
        let c = SymmetricComplex::from_manifold(&m).unwrap();
        let cert = c.global_certificate().unwrap();
        assert!(cert.overall, "{}", m.name());
        for d in &cert.degrees {
            assert!(d.source.isomorphic(&homology(c.complex(), d.j)));
        }
    }
    assert!(matches!(SymmetricComplex::from_manifold(&disk(2)), Err(SapcError::NotClosed)));
}

#[test]
fn certificates_over_the_star_lattice() {
    let m = sphere(2);
    let family = Arc::new(star_union_family(m.base(), 1 << 12).unwrap());
    let sc = sapc_from_manifold(&m, family.clone()).unwrap();
    let cert = sc.certificate().unwrap();
    assert!(cert.overall);
    assert_eq!(cert.per_open.len(), family.len());
    assert_eq!(cert.n, 2);
}

fn algebraic(name: &str, degree: i32, n: usize, form: &[&[i64]]) -> SymmetricComplex {
    let rank = form.len();
    let c = Arc::new(ChainComplex::concentrated(degree, rank));
    let mut phi = TensorChain::new();
    for (i, row) in form.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            phi.add_term((degree, i as u32, degree, j as u32), v);
        }
    }
    SymmetricComplex::new(name, c, SymmetricStructure { n, components: vec![phi] }).unwrap()
}

#[test]
fn algebraic_nondegeneracy() {
    assert!(algebraic("h", 1, 2, &[&[0, 1], &[1, 0]]).is_nondegenerate().unwrap());
    assert!(!algebraic("two", 1, 2, &[&[2]]).is_nondegenerate().unwrap());
    let e8ish = algebraic("h4", 2, 4, &[&[0, 1], &[1, 0]]);
    let r = e8ish.signature().unwrap();
    assert_eq!(r.signature, 0);
    assert!(r.hyperbolic.is_some());
}

#[test]
fn congruence_diagonalization() {
    assert_eq!(congruence_signature(&big(&[&[0, 1], &[1, 0]])).unwrap(), 0);
    assert_eq!(congruence_signature(&big(&[&[2, 1], &[1, 2]])).unwrap(), 2);
    assert_eq!(congruence_signature(&big(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, 0]])).unwrap(), 0);
    assert_eq!(congruence_signature(&big(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]])).unwrap(), 1);
    assert!(matches!(congruence_signature(&big(&[&[0, 1], &[2, 0]])), Err(SapcError::FormNotSymmetric)));
    let p = hyperbolic_basis(&big(&[&[2, 3], &[3, 4]])).unwrap();
    let b = big(&[&[2, 3], &[3, 4]]);
    let q = |x: usize, y: usize| -> BigInt {
        (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| &p[i][x] * &b[i][j] * &p[j][y]).sum()
    };
    assert_eq!([q(0, 0), q(0, 1), q(1, 1)], [BigInt::from(0), BigInt::from(1), BigInt::from(0)]);
    assert!(hyperbolic_basis(&big(&[&[1, 0], &[0, -1]])).is_none());
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut p: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let k = rng.gen_range(-2..=2);
            for r in 0..n {
                p[r][i] += k * p[r][j];
            }
        }
    }
    p
}

fn congruent(b: &[Vec<i64>], p: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let n = b.len();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let mut s = BigInt::from(0);
                    for i in 0..n {
                        for j in 0..n {
                            s += BigInt::from(p[i][x]) * b[i][j] * p[j][y];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn signature_is_a_congruence_invariant(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-3..=3);
                b[i][j] = v;
                b[j][i] = v;
            }
        }
        let base: Vec<Vec<BigInt>> = b.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let p = random_unimodular(&mut rng, n);
        prop_assert_eq!(congruence_signature(&base).unwrap(), congruence_signature(&congruent(&b, &p)).unwrap());
    }
}

#[test]
fn products_are_multiplicative() {
    let s2 = SymmetricComplex::from_manifold(&sphere(2)).unwrap();
    let s2s2 = product_sapc(&s2, &s2, true).unwrap();
    assert!(s2s2.certificate().unwrap().overall);
    let r = s2s2.signature().unwrap();
    assert_eq!((r.signature, r.rank), (0, 2));
    let p = r.hyperbolic.clone().expect("hyperbolic middle form");
    let q = |x: usize, y: usize| -> BigInt {
        (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| &p[i][x] * &r.form[i][j] * &p[j][y]).sum()
    };
    assert_eq!([q(0, 0), q(0, 1), q(1, 1)], [BigInt::from(0), BigInt::from(1), BigInt::from(0)]);

    // The staircase triangulation of S² × S² gives the same form up to congruence.
    let geometric = SymmetricComplex::from_manifold(&sphere(2).product(&sphere(2)).unwrap()).unwrap();
    let g = geometric.signature().unwrap();
    assert_eq!((g.signature, g.rank), (0, 2));
    assert!(g.hyperbolic.is_some());

    let s4 = SymmetricComplex::from_manifold(&sphere(4)).unwrap();
    let cp = SymmetricComplex::from_manifold(&cp2()).unwrap();
    for (a, b) in [(&s4, &s4), (&s4, &cp), (&cp, &s4), (&cp, &cp), (&cp.reversed(), &cp)] {
        let sa = a.signature().unwrap().signature;
        let sb = b.signature().unwrap().signature;
        let ab = product_sapc(a, b, false).unwrap();
        assert_eq!(ab.signature().unwrap().signature, sa * sb, "{}", ab.name);
    }
    let t = SymmetricComplex::from_manifold(&torus()).unwrap();
    let tt = product_sapc(&t, &t, false).unwrap().signature().unwrap();
    assert_eq!((tt.signature, tt.rank), (0, 6));
}

#[test]
fn pairs_from_manifolds_with_boundary() {
    let d4 = disk(4);
    let pair = sap_pair_from_manifold(&d4).unwrap();
    assert_eq!(pair.n, 4);
    // The boundary is the closed sphere with its induced orientation.
    let bm = d4.boundary_manifold().unwrap();
    let direct = SymmetricComplex::from_manifold(&bm).unwrap();
    assert_eq!(pair.boundary().phi0(), direct.phi0());
    assert!(pair.boundary().is_nondegenerate().unwrap());
    assert!(pair.relative_certificate().unwrap().overall);
    assert_eq!(pair.signature().unwrap().signature, 0);

    let interval = sap_pair_from_manifold(&disk(1)).unwrap();
    assert_eq!(interval.boundary().complex().total_rank(), 2);
    assert!(interval.relative_certificate().unwrap().overall);
    assert!(matches!(sap_pair_from_manifold(&sphere(2)), Err(SapcError::NoBoundary)));
}

#[test]
fn the_interval_times_a_manifold_bounds() {
    let interval = sap_pair_from_manifold(&disk(1)).unwrap();
    for m in [cp2(), sphere(2)] {
        let x = SymmetricComplex::from_manifold(&m).unwrap();
        let cyl = product_pair(&interval, &x).unwrap();
        // ∂(I × X) = X ⊔ -X.
        let b = cyl.boundary();
        let r = b.signature().unwrap();
        assert_eq!(r.signature, 0);
        if m.dim() == 4 {
            assert_eq!(r.rank, 2);
            assert_eq!(congruence_signature(&r.form).unwrap(), 0);
        }
        // Suspension: the relative middle pairing of I × X matches the form of X.
        let mid = (m.dim() / 2) as i32;
        let rel = cyl.relative_pairing(mid + 1).unwrap();
        let xs = x.pairing(mid).unwrap();
        assert_eq!(rel.len(), xs.len());
        if m.dim() % 4 == 0 {
            assert_eq!(congruence_signature(&rel).unwrap(), congruence_signature(&xs).unwrap());
        }
    }
}

/// `C = Z^{2r}` in degree 2 with a hyperbolic form in a random basis, bounding
/// `D = C ∪ Z^r` in degree 3 whose boundary is a Lagrangian.
fn hyperbolic_pair(rng: &mut ChaCha8Rng, r: usize) -> SymmetricPair {
    let n = 2 * r;
    let p = random_unimodular(rng, n);
    let col = |k: usize| -> Vec<i64> { (0..n).map(|i| p[i][k]).collect() };
    let c = Arc::new(ChainComplex::concentrated(2, n));
    let mut phi = TensorChain::new();
    for k in 0..r {
        let (l, m) = (col(k), col(r + k));
        for i in 0..n {
            for j in 0..n {
                phi.add_term((2, i as u32, 2, j as u32), l[i] * m[j] + m[i] * l[j]);
            }
        }
    }
    let boundary = SymmetricComplex::new("hyp", c.clone(), SymmetricStructure { n: 4, components: vec![phi] }).unwrap();
    let d3 = SparseMatrix::from_columns(
        n,
        (0..r)
            .map(|k| col(k).iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, &v)| (i as u32, v)).collect())
            .collect(),
    );
    let d = Arc::new(ChainComplex::new(2, vec![n, r], vec![d3], None).unwrap());
    let inclusion = ChainMap::from_fn(c, d, 0, |_, i| vec![(i as u32, 1)]).unwrap();
    let mut psi = TensorChain::new();
    for k in 0..r {
        let m = col(r + k);
        for (i, &v) in m.iter().enumerate() {
            psi.add_term((3, k as u32, 2, i as u32), v);
            psi.add_term((2, i as u32, 3, k as u32), v);
        }
    }
    SymmetricPair::new("hyp", boundary, inclusion, SymmetricStructure { n: 5, components: vec![psi] }).unwrap()
}

#[test]
fn random_hyperbolic_pairs_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..20 {
        let pair = hyperbolic_pair(&mut rng, 1 + trial % 3);
        let b = pair.boundary();
        assert_eq!(b.signature().unwrap().signature, 0);
        assert!(b.is_nondegenerate().unwrap());
        assert!(pair.relative_certificate().unwrap().overall);
    }
}

#[test]
fn broken_boundary_equation_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let good = hyperbolic_pair(&mut rng, 1);
    let mut psi = good.psi().clone();
    psi.components[0] = psi.components[0].scale(2);
    assert!(matches!(
        SymmetricPair::new("bad", good.boundary().clone(), good.inclusion().clone(), psi),
        Err(SapcError::BoundaryEquation { s: 0 })
    ));
}

#[test]
fn collapse_onto_a_hemisphere() {
    use sapc_core::chain::{induced_map, is_iso_matrix, HomologyBasis};
    use sapc_core::localsheaf::BasisSet;

    // Y = closed star of vertex 3 in ∂Δ³, a disk bounded by the triangle 012.
    let s2 = sphere(2);
    let x = s2.base().clone();
    let tops: Vec<Vec<i64>> =
        x.simplices(2).iter().filter(|s| s.contains(&3)).map(|s| s.iter().map(|&v| v as i64).collect()).collect();
    let signs: Vec<i64> =
        x.simplices(2).iter().zip(s2.signs()).filter(|(s, _)| s.contains(&3)).map(|(_, &e)| e as i64).collect();
    let y = OrientedManifoldComplex::from_top_simplices("hemisphere", 4, &tops, Some(&signs), true).unwrap();

    let cx = Arc::new(x.chain_complex());
    let cy = Arc::new(y.base().chain_complex());
    let rest_x = BasisSet::from_fn(&cx, |n, i| x.simplices(n as usize)[i].contains(&3));
    let rest_y = BasisSet::from_fn(&cy, |n, i| y.base().simplices(n as usize)[i].contains(&3));
    let qx = Arc::new(rest_x.complex(&cx).unwrap());
    let qy = Arc::new(rest_y.complex(&cy).unwrap());
    // X/(X ∖ open star) and Y/∂Y are the same complex.
    assert_eq!(qx, qy);

    // The collapse X → Y/∂Y is an isomorphism on H₂ and carries ω_X to ω_Y.
    let proj = BasisSet::full(&cx).transfer(&rest_x, cx.clone(), qx.clone()).unwrap();
    let hx = HomologyBasis::compute(&cx, 2);
    let hq = HomologyBasis::compute(&qx, 2);
    assert!(is_iso_matrix(&induced_map(&proj, 2, &hx, &hq), &hx.group, &hq.group));
    let omega_x: Vec<BigInt> = {
        let mut v = vec![BigInt::from(0); cx.rank(2)];
        for (i, c) in s2.fundamental_cycle() {
            v[i as usize] += c;
        }
        v
    };
    let mut omega_y = vec![BigInt::from(0); cy.rank(2)];
    for (i, c) in y.fundamental_cycle() {
        omega_y[i as usize] += c;
    }
    let pushed = proj.apply_big(2, &omega_x);
    let restricted: Vec<BigInt> = rest_y.in_degree(2).iter().map(|&i| omega_y[i].clone()).collect();
    assert_eq!(pushed, restricted);

    let pair = sap_pair_from_manifold(&y).unwrap();
    assert!(pair.relative_certificate().unwrap().overall);
    assert_eq!(homology(&qy, 2).betti, 1);
}
