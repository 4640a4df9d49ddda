//! Exact arithmetic for deciding whether an equisingular stratum of polarized
//! K3 models with ADE singularities contains a real representative.
//!
//! The search looks for involutive skew-automorphisms of abstract homological
//! types acting as reflections on the transcendental lattice, reduced to
//! computations with finite quadratic forms.

pub mod arith;
pub mod detector;
pub mod error;
pub mod fqf;
pub mod isotropy;
pub mod lattices;
pub mod nikulin;
pub mod oracle;
pub mod zlinalg;

pub use error::{Error, Result};
pub use fqf::{Element, FiniteQuadraticForm, Rational, Subgroup};
