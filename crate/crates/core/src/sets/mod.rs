//! Set descriptions, horizon cones and the horizon-cone conditions.

mod condition;
mod descriptor;
mod probe;
mod symbolic;

pub use condition::{
    check_condition_eq, check_condition_ineq, ConditionKind, ConditionReport, ConditionStatus, Method,
};
pub use descriptor::{ConeKind, HorizonHint, SetDescriptor, SetError};
pub use probe::{angle, horizon_probe, sample_points, DirectionSet, ProbeOptions, RadiusDiagnostic};
pub use symbolic::{horizon_symbolic, HorizonCone, Unsupported};
