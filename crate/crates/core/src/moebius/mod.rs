//! Exact algebra of the acting group: words, determinant-one matrices,
//! fixed points and ping-pong certificates.

pub mod fixed;
pub mod matrix;
pub mod pingpong;
pub mod proj;
pub mod word;

pub use fixed::{fixed_points, parabolic_fixed_point, FixedPointEnclosures, FixedPoints};
pub use matrix::{classify, IntMatrix2, MatrixClass};
pub use pingpong::{check_arcs, ping_pong_certify, PingPongArcs, PingPongCertificate};
pub use proj::{mobius, Arc, ProjPoint, RatInterval};
pub use word::{
    cyclic_reduce, evaluate_word, reduce, Alphabet, GenId, GeneratorSet, GroupWord, Letter,
};
