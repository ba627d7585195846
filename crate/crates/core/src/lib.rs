//! Exact computations for Lagrangian extensions of flat nilpotent Lie
//! algebras: flat torsion-free connections, the cohomology that classifies
//! extensions, the extensions themselves with their symplectic forms, and a
//! verifier for the catalog of 4-dimensional geodesically complete flat
//! nilpotent Lie algebras.

pub mod catalog;
pub mod cli;
pub mod cohomology;
pub mod connection;
pub mod expr;
pub mod extension;
pub mod lie;
pub mod linalg;
pub mod sampling;
pub mod spec;
pub mod verify;

use linalg::{format_rational, Rational};

/// `(a, b, c)` with each entry in lowest terms.
pub fn format_vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}
