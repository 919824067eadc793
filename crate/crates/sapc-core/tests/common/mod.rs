#![allow(dead_code)]

use sapc_core::simplicial::{OrientedManifoldComplex, SimplicialComplex};
use std::sync::Arc;

pub fn boundary_of_simplex(n: usize) -> Vec<Vec<i64>> {
    // Top faces of ∂Δ^{n+1}.
    (0..=n as i64 + 1).map(|skip| (0..=n as i64 + 1).filter(|&v| v != skip).collect()).collect()
}

pub fn sphere(n: usize) -> OrientedManifoldComplex {
    OrientedManifoldComplex::from_top_simplices(&format!("S{n}"), n + 2, &boundary_of_simplex(n), None, false).unwrap()
}

pub fn disk(n: usize) -> OrientedManifoldComplex {
    let top: Vec<i64> = (0..=n as i64).collect();
    OrientedManifoldComplex::from_top_simplices(&format!("D{n}"), n + 1, &[top], None, true).unwrap()
}

pub const TORUS: [[i64; 3]; 14] = [
    [0, 1, 2],
    [1, 2, 4],
    [1, 3, 4],
    [1, 3, 6],
    [0, 1, 5],
    [1, 5, 6],
    [2, 3, 5],
    [2, 4, 5],
    [2, 3, 6],
    [0, 2, 6],
    [0, 3, 4],
    [0, 3, 5],
    [4, 5, 6],
    [0, 4, 6],
];

pub const RP2: [[i64; 3]; 10] =
    [[0, 1, 2], [0, 2, 3], [0, 1, 5], [0, 4, 5], [0, 3, 4], [1, 2, 4], [1, 3, 4], [1, 3, 5], [2, 3, 5], [2, 4, 5]];

pub const CP2: [[i64; 5]; 36] = [
    [0, 1, 2, 6, 7],
    [0, 1, 2, 6, 8],
    [0, 1, 2, 7, 8],
    [0, 1, 3, 4, 5],
    [0, 1, 3, 4, 8],
    [0, 1, 3, 5, 6],
    [0, 1, 3, 6, 8],
    [0, 1, 4, 5, 7],
    [0, 1, 4, 7, 8],
    [0, 1, 5, 6, 7],
    [0, 2, 3, 4, 5],
    [0, 2, 3, 4, 6],
    [0, 2, 3, 5, 7],
    [0, 2, 3, 6, 7],
    [0, 2, 4, 5, 8],
    [0, 2, 4, 6, 8],
    [0, 2, 5, 7, 8],
    [0, 3, 4, 6, 8],
    [0, 3, 5, 6, 7],
    [0, 4, 5, 7, 8],
    [1, 2, 3, 4, 5],
    [1, 2, 3, 4, 7],
    [1, 2, 3, 5, 8],
    [1, 2, 3, 7, 8],
    [1, 2, 4, 5, 6],
    [1, 2, 4, 6, 7],
    [1, 2, 5, 6, 8],
    [1, 3, 4, 7, 8],
    [1, 3, 5, 6, 8],
    [1, 4, 5, 6, 7],
    [2, 3, 4, 6, 7],
    [2, 3, 5, 7, 8],
    [2, 4, 5, 6, 8],
    [3, 4, 6, 7, 8],
    [3, 5, 6, 7, 8],
    [4, 5, 6, 7, 8],
];

fn rows<const K: usize>(t: &[[i64; K]]) -> Vec<Vec<i64>> {
    t.iter().map(|r| r.to_vec()).collect()
}

pub fn torus() -> OrientedManifoldComplex {
    OrientedManifoldComplex::from_top_simplices("T2_7", 7, &rows(&TORUS), None, false).unwrap()
}

/// Orientation of the corpus file, for which the signature is +1.
pub const CP2_SIGNS: [i64; 36] = [
    -1, 1, -1, -1, 1, -1, -1, 1, 1, 1, 1, -1, 1, -1, -1, 1, -1, -1, -1, 1, -1, 1, -1, 1, 1, 1, -1, 1, 1, 1, 1, -1, -1,
    -1, 1, -1,
];

pub fn cp2() -> OrientedManifoldComplex {
    OrientedManifoldComplex::from_top_simplices("CP2_9", 9, &rows(&CP2), Some(&CP2_SIGNS), false).unwrap()
}

pub fn rp2() -> SimplicialComplex {
    let tops: Vec<Vec<u32>> = RP2.iter().map(|r| r.iter().map(|&v| v as u32).collect()).collect();
    SimplicialComplex::from_maximal(6, &tops).unwrap()
}

pub fn rp2_tops() -> Vec<Vec<i64>> {
    rows(&RP2)
}

/// Every orientable closed manifold in the shipped set.
pub fn closed_manifolds() -> Vec<OrientedManifoldComplex> {
    vec![sphere(2), sphere(4), torus(), cp2()]
}

pub fn arc(c: SimplicialComplex) -> Arc<SimplicialComplex> {
    Arc::new(c)
}
