//! Finite pointed algebras: subuniverse and congruence generation, zero-classes
//! of spans and relations, the kernel / normal / clot / ideal hierarchy with
//! replayable certificates, and connector-based commutativity checks.

pub mod algebra;
pub mod classify;
pub mod closure;
pub mod commute;
pub mod error;
pub mod fixtures;
pub mod free;
pub mod ideal_terms;
pub mod search;
pub mod span;
pub mod term;
pub mod variety;
pub mod workspace;

pub use algebra::{
    product, quotient, AlgebraRef, Elem, ElemSet, FiniteAlgebra, Homomorphism, Product, Quotient, Signature,
    Subuniverse,
};
pub use closure::{generate_congruence, generate_subuniverse, list_congruences, list_subuniverses, Congruence};
pub use error::{Error, Result};
pub use span::{Relation, Span};
pub use term::Term;
pub use variety::{IdentityCheck, Variety};
