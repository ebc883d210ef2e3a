//! Time-stepping schemes with a uniform contract: advance a [`WaveField`]
//! (plus per-scheme [`SchemeState`]) by one step of size tau, in place.
//! Negative tau steps backward; the reversibility checks rely on this.

pub mod cnfd;
pub mod explicit;
pub mod ops;
pub mod refd;
pub mod sifd;
pub mod splitting;

use std::sync::Arc;

use crate::linsolve::FixedPointPolicy;
use crate::model::{Grid, ModelParams, Nonlinearity, Potential, WaveField};
use crate::transforms::SpectralPlan;
use crate::{Cplx, NlseError, Result};

pub use cnfd::{cnfd_step, ssfd_step};
pub use explicit::lpfd_step;
pub use refd::refd_step;
pub use sifd::{sifd_step, stability_limit, SifdVariant};
pub use splitting::{tsfd_step, tssp_step};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Cnfd,
    Refd,
    SifdA,
    SifdB,
    Tssp,
    Tsfd,
    Ssfd,
    Lpfd,
}

impl SchemeKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "cnfd" => SchemeKind::Cnfd,
            "refd" => SchemeKind::Refd,
            "sifd-a" | "sifd_a" | "sifda" | "sifd" => SchemeKind::SifdA,
            "sifd-b" | "sifd_b" | "sifdb" => SchemeKind::SifdB,
            "tssp" => SchemeKind::Tssp,
            "tsfd" => SchemeKind::Tsfd,
            "ssfd" => SchemeKind::Ssfd,
            "lpfd" => SchemeKind::Lpfd,
            other => {
                return Err(NlseError::InvalidParameter(format!(
                    "unknown scheme '{other}' (expected one of cnfd, refd, sifd-a, \
                     sifd-b, tssp, tsfd, ssfd, lpfd)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Cnfd => "cnfd",
            SchemeKind::Refd => "refd",
            SchemeKind::SifdA => "sifd-a",
            SchemeKind::SifdB => "sifd-b",
            SchemeKind::Tssp => "tssp",
            SchemeKind::Tsfd => "tsfd",
            SchemeKind::Ssfd => "ssfd",
            SchemeKind::Lpfd => "lpfd",
        }
    }

    pub fn all() -> [SchemeKind; 8] {
        [
            SchemeKind::Cnfd,
            SchemeKind::Refd,
            SchemeKind::SifdA,
            SchemeKind::SifdB,
            SchemeKind::Tssp,
            SchemeKind::Tsfd,
            SchemeKind::Ssfd,
            SchemeKind::Lpfd,
        ]
    }

    /// Two-level schemes carry an extra history field.
    pub fn is_two_level(&self) -> bool {
        matches!(self, SchemeKind::SifdA | SchemeKind::SifdB | SchemeKind::Lpfd)
    }
}

/// Diagnostics attached to a successful step.
#[derive(Debug, Clone, Default)]
pub struct StepInfo {
    /// Fixed-point iterations used (implicit nonlinear schemes; 0 otherwise).
    pub iterations: usize,
    /// Non-fatal advisory, e.g. a stability-bound violation.
    pub warning: Option<String>,
}

/// Per-scheme mutable state: two-level history, the relaxation variable,
/// the fixed-point policy and cached spectral plans / potential samples.
pub struct SchemeState {
    pub kind: SchemeKind,
    pub policy: FixedPointPolicy,
    /// psi^{n-1} for the two-level schemes; lag is exactly one step.
    pub prev: Option<Vec<Cplx>>,
    /// ReFD relaxation variable u^{n-1/2} (nodewise).
    pub relax_u: Option<Vec<f64>>,
    /// Initial sup-norm, for blow-up detection.
    pub initial_sup: Option<f64>,
    plans: Vec<SpectralPlan>,
    /// Additive complex potential (absorbing layers install -i*sigma here).
    extra_potential: Option<Vec<Cplx>>,
    v_cache: Option<(f64, Vec<Cplx>)>,
}

impl SchemeState {
    pub fn new(kind: SchemeKind, grid: &Arc<Grid>) -> Self {
        let plans = grid.axes().iter().map(SpectralPlan::new).collect();
        SchemeState {
            kind,
            policy: FixedPointPolicy::default(),
            prev: None,
            relax_u: None,
            initial_sup: None,
            plans,
            extra_potential: None,
            v_cache: None,
        }
    }

    pub fn with_policy(mut self, policy: FixedPointPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn plan(&self, axis: usize) -> &SpectralPlan {
        &self.plans[axis]
    }

    /// Install an additive complex potential (e.g. -i*sigma for a complex
    /// absorbing potential). Invalidates the sample cache.
    pub fn set_extra_potential(&mut self, extra: Option<Vec<Cplx>>) {
        self.extra_potential = extra;
        self.v_cache = None;
    }

    pub fn extra_potential(&self) -> Option<&[Cplx]> {
        self.extra_potential.as_deref()
    }

    /// Sampled potential (real model potential plus any installed complex
    /// absorber) at time t, cached for time-independent potentials.
    pub fn potential_values(
        &mut self,
        potential: &Potential,
        grid: &Grid,
        t: f64,
    ) -> Result<Vec<Cplx>> {
        if let Some((tc, v)) = &self.v_cache {
            if !potential.is_time_dependent() || *tc == t {
                return Ok(v.clone());
            }
        }
        let real = potential.sample(grid, t)?;
        let mut v: Vec<Cplx> = real.into_iter().map(|r| Cplx::new(r, 0.0)).collect();
        if let Some(extra) = &self.extra_potential {
            for (vi, ei) in v.iter_mut().zip(extra.iter()) {
                *vi += ei;
            }
        }
        self.v_cache = Some((t, v.clone()));
        Ok(v)
    }

    /// Record the starting amplitude for blow-up detection.
    pub fn note_initial(&mut self, field: &WaveField) {
        if self.initial_sup.is_none() {
            self.initial_sup = Some(field.sup_norm().max(f64::MIN_POSITIVE));
        }
    }
}

/// Advance `field` by one step of the scheme selected in `state`.
pub fn step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    tau: f64,
) -> Result<StepInfo> {
    match state.kind {
        SchemeKind::Cnfd => cnfd_step(state, field, params, potential, nl, tau),
        SchemeKind::Refd => refd_step(state, field, params, potential, nl, tau),
        SchemeKind::SifdA => sifd_step(state, field, params, potential, nl, tau, SifdVariant::A),
        SchemeKind::SifdB => sifd_step(state, field, params, potential, nl, tau, SifdVariant::B),
        SchemeKind::Tssp => tssp_step(state, field, params, potential, nl, tau),
        SchemeKind::Tsfd => tsfd_step(state, field, params, potential, nl, tau),
        SchemeKind::Ssfd => ssfd_step(state, field, params, potential, nl, tau),
        SchemeKind::Lpfd => lpfd_step(state, field, params, potential, nl, tau),
    }
}
