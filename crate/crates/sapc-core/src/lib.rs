//! Exact chain-level symmetric Poincaré complexes over finite triangulations.
//!
//! The crate is `no_std` with `alloc`. Everything is exact integer or
//! rational arithmetic; nothing here touches floating point.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod chain;
pub mod equivariant;
pub mod localsheaf;
pub mod matrix;
pub mod open;
mod reduce;
pub mod sapc;
pub mod simplicial;
pub mod snf;

pub use chain::{
    dual_complex, homology, is_quasi_iso, mapping_cone, tensor_complex, ChainComplex, ChainError, ChainMap,
    HomologyGroup, Label,
};
pub use open::{open_star_family, star_union_family, CellSpace, Open, OpenFamily};
pub use simplicial::{OrientedManifoldComplex, SimplicialComplex, SimplicialMap};

impl core::error::Error for chain::ChainError {}
impl core::error::Error for equivariant::EquivariantError {}
impl core::error::Error for localsheaf::LocalError {}
impl core::error::Error for open::FamilyError {}
impl core::error::Error for sapc::SapcError {}
impl core::error::Error for simplicial::ComplexError {}
