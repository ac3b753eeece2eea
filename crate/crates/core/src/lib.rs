//! Counting quasi-homomorphisms on computable models of the curve complex.
//!
//! The Farey graph stands in for the curve complex of the once-punctured
//! torus, with `PSL(2, Z)` acting by Möbius maps; the Cayley tree of a free
//! group is a locally finite control model. On top of the graph layer sit
//! the penalized path functional, the counting quasi-homomorphism `h_ω`,
//! and the experiment pipeline (Schottky pairs, families, audits).

pub mod constructions;
pub mod counting;
pub mod error;
pub mod graph;
pub mod moebius;
pub mod report;

pub use error::{Error, Result};
pub use graph::{GraphPath, Slope, TruncatedGraph, Universe, Vertex};
pub use moebius::{GeneratorSet, GroupWord, IntMatrix2, MatrixClass};
