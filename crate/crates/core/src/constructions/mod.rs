mod audits;
mod axis;
mod experiment;
mod family;
mod growth;
mod schottky;

pub use audits::{
    avoidance_audit, cyclic_bound_audit, double_coset_audit, slope_fit, subgroup_bound_audit, AuditKind,
    AuditReport, CosetSampling, SlopeFit,
};
pub use axis::{axis_basepoint, axis_path, axis_segment, model_distance, model_geodesic, AxisSegment};
pub use experiment::{
    growth_table, DoublingCheck, Experiment, ExperimentConfig, FamilyMember, GrowthOutcome, FLAGSHIP,
};
pub use family::{build_family, cyclic_lengths, FamilySchedule};
pub use growth::{
    growth_matrix, independence_certificate, CertificateMethod, GrowthMatrix, IndependenceCertificate,
    MAX_INTERVAL_DET,
};
pub use schottky::SchottkyPair;
