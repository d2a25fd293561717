//! Asymmetric distance, Finsler norm and pressure norm on projective classes
//! of suspension flows over a fixed base.

use super::ratio::{max_cycle_ratio, RatioMethod};
use super::suspension::{bowen_margulis, SuspensionFlow};
use crate::error::{Error, Result};
use crate::sft::{
    integrate, livsic_reduce, pressure_derivative, Cycle, EdgePotential, RoofFunction,
};

/// Largest `|∫ g dm_BM|` accepted for a tangent direction.
pub const TANGENCY_TOL: f64 = 1e-6;
/// Threshold on `|c|` below which a Livšic constant counts as zero.
pub const PROJECTIVE_TOL: f64 = 1e-9;

/// Distance `d(flow1, flow2)` with the cycle attaining the supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    pub value: f64,
    pub cycle: Cycle,
    pub h1: f64,
    pub h2: f64,
    /// `max_a p₂(a)/p₁(a)`.
    pub period_ratio: f64,
    pub method: RatioMethod,
    pub projectively_equivalent: bool,
}

/// `log( (h₂/h₁) · max_a p₂(a)/p₁(a) )`.
///
/// Exactly `0.0` when the flows are projectively equivalent.
pub fn dth_flow(flow1: &SuspensionFlow, flow2: &SuspensionFlow) -> Result<DistanceReport> {
    let (h1, h2) = (flow1.entropy()?, flow2.entropy()?);
    let mcr = max_cycle_ratio(flow1.base(), flow2.roof().potential(), flow1.roof())?;
    let (equivalent, _) = projectively_equivalent(flow1, flow2)?;
    let value = if equivalent {
        0.0
    } else {
        (h2 / h1).ln() + mcr.value.ln()
    };
    Ok(DistanceReport {
        value,
        cycle: mcr.cycle,
        h1,
        h2,
        period_ratio: mcr.value,
        method: mcr.method,
        projectively_equivalent: equivalent,
    })
}

/// Whether `h₁·r₁` and `h₂·r₂` are cohomologous. On success also returns
/// `h₁/h₂`, the constant `c` with `r₂ ~ c·r₁`.
pub fn projectively_equivalent(
    flow1: &SuspensionFlow,
    flow2: &SuspensionFlow,
) -> Result<(bool, f64)> {
    if flow1.base().fingerprint() != flow2.base().fingerprint() {
        return Err(Error::GraphMismatch);
    }
    let (h1, h2) = (flow1.entropy()?, flow2.entropy()?);
    let diff = flow2
        .roof()
        .potential()
        .scale(h2)
        .sub(&flow1.roof().potential().scale(h1))?;
    let red = livsic_reduce(flow1.base(), &diff)?;
    let flag = red.is_coboundary(PROJECTIVE_TOL);
    Ok((flag, if flag { h1 / h2 } else { f64::NAN }))
}

/// A direction tangent to the pressure-zero level set at a flow.
#[derive(Debug, Clone)]
pub struct FlowTangent {
    direction: EdgePotential,
    residual: f64,
}

impl FlowTangent {
    /// Checks `|∫ g d m_BM| ≤ 1e-6`.
    pub fn new(flow: &SuspensionFlow, direction: EdgePotential) -> Result<Self> {
        direction.check_graph(flow.base())?;
        let residual = integrate(&bowen_margulis(flow)?, &direction)?;
        if residual.abs() > TANGENCY_TOL {
            return Err(Error::NotTangent { residual });
        }
        Ok(FlowTangent {
            direction,
            residual,
        })
    }

    /// Projects `g` onto the tangent space along the normalized roof:
    /// `g − (∫g dm / ∫ h·r dm)·h·r`.
    pub fn project(flow: &SuspensionFlow, g: &EdgePotential) -> Result<Self> {
        let m = bowen_margulis(flow)?;
        let r_hat = flow.normalized_roof()?;
        let coef = integrate(&m, g)? / integrate(&m, &r_hat)?;
        Self::new(flow, g.axpy(-coef, &r_hat)?)
    }

    pub fn direction(&self) -> &EdgePotential {
        &self.direction
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// `sup_m ∫g dm / ∫ r̂ dm` with `r̂ = h·r` the entropy-one roof: the maximum
/// cycle ratio of `g` over `r̂`.
pub fn finsler_norm_flow(flow: &SuspensionFlow, tangent: &FlowTangent) -> Result<f64> {
    let r_hat = RoofFunction::new(flow.normalized_roof()?)?;
    Ok(max_cycle_ratio(flow.base(), tangent.direction(), &r_hat)?.value)
}

/// Flow with roof `h·r + s·g`, the entropy-one representative moved along `g`.
pub fn renormalized_path(
    flow: &SuspensionFlow,
    tangent: &FlowTangent,
    s: f64,
) -> Result<SuspensionFlow> {
    let roof = RoofFunction::new(flow.normalized_roof()?.axpy(s, tangent.direction())?)?;
    SuspensionFlow::new(flow.base_arc(), roof)
}

/// Second derivative of `s ↦ P(−r̂ + s·g)` at 0, as the fourth-order central
/// difference of the exact first derivative `∫ g dm_{−r̂+sg}`.
fn pressure_curvature(flow: &SuspensionFlow, g: &EdgePotential, step: f64) -> Result<f64> {
    let base = flow.normalized_roof()?.scale(-1.0);
    let dp = |s: f64| pressure_derivative(flow.base(), &base.axpy(s, g)?, g);
    let (d2m, d1m, d1, d2) = (dp(-2.0 * step)?, dp(-step)?, dp(step)?, dp(2.0 * step)?);
    Ok((-d2 + 8.0 * d1 - 8.0 * d1m + d2m) / (12.0 * step))
}

/// `‖g‖_P = sqrt( (d²/ds² P(−r̂ + s g)) / ∫ r̂ dm_{−r̂} )`.
pub fn pressure_norm_flow(flow: &SuspensionFlow, tangent: &FlowTangent) -> Result<f64> {
    let mut curvature = pressure_curvature(flow, tangent.direction(), 1e-3)?;
    if curvature < -1e-7 {
        curvature = pressure_curvature(flow, tangent.direction(), 1e-4)?;
        if curvature < -1e-7 {
            return Err(Error::NegativeCurvature { value: curvature });
        }
    }
    let m = bowen_margulis(flow)?;
    let mean_roof = integrate(&m, &flow.normalized_roof()?)?;
    Ok((curvature.max(0.0) / mean_roof).sqrt())
}
