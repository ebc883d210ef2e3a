//! Strang-splitting steppers: TSSP (spectral kinetic step) and TSFD
//! (Crank-Nicolson finite-difference kinetic step). Both share the exact
//! pointwise nonlinear phase flow, which conserves the density nodewise.

use crate::model::{ModelParams, Nonlinearity, Potential, WaveField};
use crate::schemes::ops::{gather, laplacian, scatter, Operator1d};
use crate::schemes::{SchemeState, StepInfo};
use crate::transforms::{apply_multiplier_axis, kinetic_phase};
use crate::{Cplx, NlseError, Result};

/// Exact flow of i*eps*phi_t = [V + f(|phi|^2)] phi over `dt`, applied
/// nodewise. |phi| is invariant for real V, so f(|phi|^2) is constant along
/// the flow and the step is a pure phase; a complex V (absorbing layer)
/// additionally decays the amplitude.
pub(crate) fn nonlinear_phase(
    values: &mut [Cplx],
    v: &[Cplx],
    nl: &Nonlinearity,
    epsilon: f64,
    dt: f64,
) {
    let c = Cplx::new(0.0, -dt / epsilon);
    for (psi, vj) in values.iter_mut().zip(v.iter()) {
        let rho = psi.norm_sqr();
        *psi *= (c * (vj + nl.f(rho))).exp();
    }
}

/// Exact spectral free flight over `tau`: diagonal phase in the basis of
/// each axis.
pub(crate) fn spectral_kinetic(
    state: &mut SchemeState,
    values: &mut [Cplx],
    grid: &crate::model::Grid,
    tau: f64,
    eps: f64,
) -> Result<()> {
    match grid.dim() {
        1 => {
            let plan = state.plan(0);
            let m = kinetic_phase(plan, tau, eps);
            plan.apply_multiplier(values, &m)?;
        }
        2 => {
            let shape = (grid.axis(0).num_nodes(), grid.axis(1).num_nodes());
            let mx = kinetic_phase(state.plan(0), tau, eps);
            let my = kinetic_phase(state.plan(1), tau, eps);
            apply_multiplier_axis(values, shape, 1, state.plan(1), &my)?;
            apply_multiplier_axis(values, shape, 0, state.plan(0), &mx)?;
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// Time-splitting sine/cosine/Fourier pseudospectral step: half nonlinear
/// phase, spectral free flight, half nonlinear phase.
pub fn tssp_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    tau: f64,
) -> Result<StepInfo> {
    let grid = field.grid.clone();
    let v = state.potential_values(potential, &grid, field.t + tau / 2.0)?;
    let eps = params.epsilon;

    nonlinear_phase(&mut field.values, &v, nl, eps, tau / 2.0);
    spectral_kinetic(state, &mut field.values, &grid, tau, eps)?;
    nonlinear_phase(&mut field.values, &v, nl, eps, tau / 2.0);
    field.t += tau;
    Ok(StepInfo::default())
}

/// Time-splitting finite-difference step: half nonlinear phase, free flight
/// discretized by Crank-Nicolson (tridiagonal solve), half nonlinear phase.
pub fn tsfd_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    tau: f64,
) -> Result<StepInfo> {
    let grid = field.grid.clone();
    let v = state.potential_values(potential, &grid, field.t + tau / 2.0)?;
    let eps = params.epsilon;
    let shift = Cplx::new(0.0, eps / tau);
    let kin = eps * eps / 4.0;

    nonlinear_phase(&mut field.values, &v, nl, eps, tau / 2.0);
    match grid.dim() {
        1 => {
            let ax = grid.axis(0);
            let left = Operator1d::new(ax, shift, Cplx::new(kin, 0.0), &[]);
            let right = Operator1d::new(ax, shift, Cplx::new(-kin, 0.0), &[]);
            let u = gather(ax, &field.values);
            let rhs = right.apply(&u);
            field.values = scatter(ax, left.solve(&rhs)?);
        }
        2 => {
            // constant-coefficient CN free flight, diagonalized in the sine
            // basis; only Dirichlet boxes are supported in 2D
            let lap = laplacian(&grid, &field.values);
            let rhs: Vec<Cplx> = field
                .values
                .iter()
                .zip(lap.iter())
                .map(|(p, l)| shift * p - kin * l)
                .collect();
            field.values =
                crate::linsolve::fast_poisson_dst(&grid, shift, -kin, &rhs).map_err(|e| {
                    match e {
                        NlseError::InvalidGrid(_) => NlseError::InvalidGrid(
                            "2D TSFD requires Dirichlet boundaries (fast sine solve)".into(),
                        ),
                        other => other,
                    }
                })?;
        }
        _ => unreachable!(),
    }
    nonlinear_phase(&mut field.values, &v, nl, eps, tau / 2.0);
    field.t += tau;
    Ok(StepInfo::default())
}
