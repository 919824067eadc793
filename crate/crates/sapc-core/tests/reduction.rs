mod common;

use common::*;
use proptest::prelude::*;
use sapc_core::chain::{mapping_cone, tensor_complex};
use sapc_core::simplicial::{subdivision_chain_map, SimplicialComplex};

fn random_complex(vertices: usize, tops: &[Vec<u32>]) -> SimplicialComplex {
    SimplicialComplex::from_maximal(vertices, tops).unwrap()
}

fn faces() -> impl Strategy<Value = Vec<Vec<u32>>> {
    prop::collection::vec(prop::collection::btree_set(0u32..9, 1..5), 4..24)
        .prop_map(|v| v.into_iter().map(|s| s.into_iter().collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn reduction_agrees_with_per_matrix_smith(tops in faces()) {
        let x = random_complex(9, &tops);
        let c = x.chain_complex();
        prop_assert_eq!(c.homology_all(), c.homology_by_matrices());
        // Torsion survives the reduction.
        let t = tensor_complex(&c, &rp2().chain_complex()).unwrap();
        prop_assert_eq!(t.homology_all(), t.homology_by_matrices());
        let f = subdivision_chain_map(&x, &x.barycentric_subdivision()).unwrap();
        let cone = mapping_cone(&f).unwrap();
        prop_assert!(cone.homology_all().iter().all(|h| h.is_zero()));
        prop_assert_eq!(cone.homology_all(), cone.homology_by_matrices());
    }
}

#[test]
fn corpus_complexes_reduce_exactly() {
    for c in
        [cp2().base().chain_complex(), torus().base().chain_complex(), rp2().barycentric_subdivision().chain_complex()]
    {
        assert_eq!(c.homology_all(), c.homology_by_matrices());
    }
}
