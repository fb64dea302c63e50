//! Exact unification, exact types and admissibility for locally finite
//! varieties given by finite generating algebras.

pub mod admissibility;
pub mod catalog;
pub mod error;
pub mod exactness;
pub mod finalg;
mod par;
pub mod preorder;
pub mod report;
pub mod term;
pub mod unify;
pub mod variety;
pub mod willard;

pub use error::{Error, Result};
pub use par::with_jobs;
