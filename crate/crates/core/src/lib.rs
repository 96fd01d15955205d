//! Exact computer algebra for minimal A-infinity algebras with one odd
//! generator, and for the quantum connections attached to a monotone
//! symplectic manifold.
//!
//! The toolkit covers, over exact coefficients (arbitrary-precision
//! rationals, Gaussian rationals, small prime fields):
//!
//! * minimal A-infinity algebras defined by a one-variable formal potential,
//!   their structure-map relations, and formal changes of variable;
//! * Hochschild chains and cochains, the cup product, the chain/cochain
//!   pairing, the Connes operator and the non-unital complex;
//! * p-fold cyclic word complexes (Hochschild chains with coefficients in a
//!   tensor power of the diagonal bimodule), rotation, collapse maps, and
//!   the cap action of tensor products of premorphisms;
//! * Z/p-equivariant (homotopy fixed point) complexes over k[[t, theta]],
//!   the p-th power operation and the equivariant cap product;
//! * a workbench for the one-relation model with a single higher product
//!   (the minimal model of a one-variable monomial potential), including the
//!   equivariant cap action matrix on its cyclic generators;
//! * Koszul and twisted de Rham models of a one-variable power potential and
//!   the induced multiplication operators;
//! * the small quantum ring of the intersection of two quadrics in P^5,
//!   t-connections with a second order pole, and the unique formal
//!   isomorphism (R-matrix) extending a given constant term;
//! * equivariant diagonal approximation chains on the infinite sphere for a
//!   cyclic group of odd prime order.

pub mod scalars;
pub mod signs;
pub mod linear;
pub mod ainfty;
pub mod hochschild;
pub mod pfold;
pub mod equivariant;
pub mod an_model;
pub mod de_rham;
pub mod connections;
pub mod diagonal;

pub use ainfty::{Gen, MinimalModel, Potential};
pub use linear::SparseVec;
pub use scalars::{Field, Fp, FpI, GaussRat, Rat, Series, ThetaSeries};
pub use signs::{Parity, Sign};
