use crate::{NlseError, Result};

/// Damping term g(rho) of the damped NLSE: g = delta (linear),
/// delta1 * rho (cubic) or delta2 * rho^2 (quintic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingKind {
    None,
    Linear(f64),
    Cubic(f64),
    Quintic(f64),
}

impl DampingKind {
    pub fn coefficient(&self) -> f64 {
        match *self {
            DampingKind::None => 0.0,
            DampingKind::Linear(d) | DampingKind::Cubic(d) | DampingKind::Quintic(d) => d,
        }
    }

    pub fn g(&self, rho: f64) -> f64 {
        match *self {
            DampingKind::None => 0.0,
            DampingKind::Linear(d) => d,
            DampingKind::Cubic(d) => d * rho,
            DampingKind::Quintic(d) => d * rho * rho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficient() < 0.0 {
            return Err(NlseError::InvalidParameter(format!(
                "damping coefficient must be >= 0, got {}",
                self.coefficient()
            )));
        }
        Ok(())
    }
}

/// Interaction matrix and Josephson coupling of the two-component model.
#[derive(Debug, Clone, Copy)]
pub struct CouplingParams {
    pub beta11: f64,
    pub beta12: f64,
    pub beta22: f64,
    pub lambda: f64,
}

impl Default for CouplingParams {
    fn default() -> Self {
        Self { beta11: 0.0, beta12: 0.0, beta22: 0.0, lambda: 0.0 }
    }
}

/// Physical parameters of the model.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Scaled Planck constant, 0 < epsilon <= 1.
    pub epsilon: f64,
    /// Cubic interaction strength (signed).
    pub beta: f64,
    /// Rotation speed Omega (0 when non-rotating).
    pub omega_rot: f64,
    pub damping: DampingKind,
    pub coupling: CouplingParams,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            beta: 0.0,
            omega_rot: 0.0,
            damping: DampingKind::None,
            coupling: CouplingParams::default(),
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(NlseError::InvalidParameter(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        self.damping.validate()
    }
}
