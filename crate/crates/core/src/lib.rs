//! Generalized van Kampen obstructions for almost r-embeddings of simplicial
//! complexes, and r-linking numbers of PL ornaments, in exact arithmetic.

pub mod deleted;
pub mod error;
pub mod exactlin;
pub mod gallery;
pub mod io;
pub mod lattice;
pub mod linking;
pub mod obstruction;
pub mod plmap;
mod par;
pub mod simplicial;

pub use error::{Error, Result};
