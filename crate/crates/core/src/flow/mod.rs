//! Suspension flows over subshifts: entropy, intersections, maximum cycle
//! ratios and the asymmetric metric with its infinitesimal norms.

mod metric;
mod ratio;
mod suspension;

pub use metric::{
    dth_flow, finsler_norm_flow, pressure_norm_flow, projectively_equivalent, renormalized_path,
    DistanceReport, FlowTangent, PROJECTIVE_TOL, TANGENCY_TOL,
};
pub use ratio::{
    max_cycle_ratio, max_cycle_ratio_lawler, CycleRatio, RatioMethod, HOWARD_MAX_ITER,
};
pub use suspension::{
    bowen_margulis, flow_entropy, intersection, period, renormalized_intersection, SuspensionFlow,
    ENTROPY_RESIDUAL,
};
