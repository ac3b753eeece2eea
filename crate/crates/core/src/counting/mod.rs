//! The penalized path functional `C_{ω,W}`, the counting quasi-homomorphism
//! `h_ω`, defect estimates and homogenization.

mod defect;
mod functional;
mod omega;
mod translates;

pub(crate) use defect::evaluate_all;
pub use defect::{
    defect_estimate, doubling_consistent, homogenize, DefectReport, Homogenized, SampledWord,
    Sampler,
};
pub use functional::{
    counting_value_in, penalized_infimum, penalized_infimum_with, Evaluator, QMValue, Shortcuts,
};
pub use omega::{parse_key_values, OmegaSegment, PenaltySpec};
pub use translates::{
    copy_positions, enumerate_translates, max_nonoverlapping_copies, Translate, TranslateSet,
};
