//! Arithmetic of places and cyclic extensions of rational function fields,
//! Tsfasman–Vlăduţ invariants of towers, and the effective bounds around them.

pub mod arith;
pub mod bounds;
pub mod construct;
pub mod error;
pub mod expr;
pub mod extensions;
pub mod ffpoly;
pub mod places;
pub mod towers;

pub use error::{Error, Result};
pub use ffpoly::{factor_poly, Elem, FiniteField, Poly, RatFn};
pub use places::{Base, Place, PlaceSet};
pub use extensions::{decompose_place, decomposition_census, exact_genus, ExtensionSpec, StepKind};
pub use towers::{fundamental_and_defect, phi_counts, phi_estimates, tower_extend, zeta_partial, FieldCase, PhiVector, Tower};
pub use construct::{
    build_norm_prescribed_tower, find_Q_annihilators, find_as_generator, find_kummer_generator, v_group_basis,
    LocalPlan, SearchCaps, TowerPlan,
};
