use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::sft::{
    equilibrium_measure, integrate, perron_data, topological_entropy, Cycle, EdgePotential,
    MarkovMeasure, RoofFunction, SubshiftGraph,
};

/// Residual accepted for `P(−h·roof) = 0`.
pub const ENTROPY_RESIDUAL: f64 = 1e-12;

/// Suspension flow over a subshift graph with an edge roof function.
#[derive(Debug, Clone)]
pub struct SuspensionFlow {
    base: Arc<SubshiftGraph>,
    roof: RoofFunction,
    entropy: OnceLock<f64>,
}

impl SuspensionFlow {
    pub fn new(base: impl Into<Arc<SubshiftGraph>>, roof: RoofFunction) -> Result<Self> {
        let base = base.into();
        roof.potential().check_graph(&base)?;
        Ok(SuspensionFlow {
            base,
            roof,
            entropy: OnceLock::new(),
        })
    }

    pub fn from_values(base: impl Into<Arc<SubshiftGraph>>, values: Vec<f64>) -> Result<Self> {
        let base = base.into();
        let roof = RoofFunction::from_values(&base, values)?;
        Self::new(base, roof)
    }

    pub fn base(&self) -> &SubshiftGraph {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<SubshiftGraph> {
        Arc::clone(&self.base)
    }

    pub fn roof(&self) -> &RoofFunction {
        &self.roof
    }

    /// Same base with roof multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.base_arc(), self.roof.scale(c)?)
    }

    /// Flow entropy, computed once.
    pub fn entropy(&self) -> Result<f64> {
        if let Some(h) = self.entropy.get() {
            return Ok(*h);
        }
        let h = flow_entropy_uncached(&self.base, &self.roof)?;
        Ok(*self.entropy.get_or_init(|| h))
    }

    /// Roof scaled to entropy one, `h·r`; its pressure `P(−h·r)` vanishes.
    pub fn normalized_roof(&self) -> Result<EdgePotential> {
        Ok(self.roof.potential().scale(self.entropy()?))
    }
}

fn flow_entropy_uncached(g: &SubshiftGraph, roof: &RoofFunction) -> Result<f64> {
    let h_top = topological_entropy(g);
    let r = roof.potential();
    if h_top <= 1e-14 {
        // a single periodic orbit: P(−h r) = −h·(mean roof), root at 0
        return Ok(0.0);
    }
    let p_at = |h: f64| -> Result<(f64, f64)> {
        let f = r.scale(-h);
        let pd = perron_data(g, &f)?;
        let p = pd.log_radius();
        let m = equilibrium_measure(g, &f)?;
        Ok((p, -integrate(&m, r)?))
    };
    // P(−h r) is convex and strictly decreasing; Newton from the left never overshoots
    let hi = h_top / r.min();
    let (mut lo_b, mut hi_b) = (0.0, hi);
    let mut h = 0.0;
    for _ in 0..200 {
        let (p, dp) = p_at(h)?;
        if p == 0.0 {
            return Ok(h);
        }
        if p > 0.0 {
            lo_b = h;
        } else {
            hi_b = h;
        }
        let newton = h - p / dp;
        let next = if newton > lo_b && newton < hi_b {
            newton
        } else {
            0.5 * (lo_b + hi_b)
        };
        if (next - h).abs() <= 4.0 * f64::EPSILON * h.abs() {
            return Ok(next);
        }
        h = next;
    }
    let (p, _) = p_at(h)?;
    if p.abs() <= ENTROPY_RESIDUAL {
        return Ok(h);
    }
    Err(Error::ConvergenceFailure(format!(
        "entropy root not bracketed within [0, {hi}]"
    )))
}

/// Unique `h ≥ 0` with `P(−h·roof) = 0`.
pub fn flow_entropy(flow: &SuspensionFlow) -> Result<f64> {
    flow.entropy()
}

/// Period of the periodic orbit over `a`: the roof sum along the cycle.
pub fn period(flow: &SuspensionFlow, a: &Cycle) -> Result<f64> {
    a.check_in(flow.base())?;
    Ok(a.sum(flow.roof().potential()))
}

fn check_same_base(f1: &SuspensionFlow, f2: &SuspensionFlow) -> Result<()> {
    if f1.base().fingerprint() != f2.base().fingerprint() {
        return Err(Error::GraphMismatch);
    }
    Ok(())
}

/// `∫ roof₂ dν / ∫ roof₁ dν` for the base measure `ν`.
pub fn intersection(
    m: &MarkovMeasure,
    flow1: &SuspensionFlow,
    flow2: &SuspensionFlow,
) -> Result<f64> {
    check_same_base(flow1, flow2)?;
    let num = integrate(m, flow2.roof().potential())?;
    let den = integrate(m, flow1.roof().potential())?;
    Ok(num / den)
}

/// Intersection multiplied by the entropy ratio `h₂/h₁`.
pub fn renormalized_intersection(
    m: &MarkovMeasure,
    flow1: &SuspensionFlow,
    flow2: &SuspensionFlow,
) -> Result<f64> {
    let i = intersection(m, flow1, flow2)?;
    Ok(flow2.entropy()? / flow1.entropy()? * i)
}

/// Measure of maximal entropy of the flow, as the base equilibrium state of `−h·roof`.
pub fn bowen_margulis(flow: &SuspensionFlow) -> Result<MarkovMeasure> {
    let h = flow.entropy()?;
    equilibrium_measure(flow.base(), &flow.roof().potential().scale(-h))
}
