//! Crank-Nicolson finite-difference step (nonlinearity handled through the
//! difference quotient G of the primitive F) and the Sanz-Serna midpoint
//! variant (nonlinearity evaluated at the field average). Both are
//! nonlinearly implicit and share one fixed-point driver; both conserve the
//! discrete mass and (CNFD) the discrete energy up to the inner tolerance.

use crate::linsolve::{fast_poisson_dst, fixed_point_solve, FixedPointMode};
use crate::model::{ModelParams, Nonlinearity, Potential, WaveField};
use crate::schemes::ops::{gather, laplacian, scatter, Operator1d};
use crate::schemes::{SchemeState, StepInfo};
use crate::{Cplx, NlseError, Result};

/// How the implicit nonlinear coefficient at each node is formed from the
/// current iterate and the known level.
#[derive(Clone, Copy)]
enum NonlinCoef {
    /// G(|psi'|^2, |psi|^2), the difference quotient of F.
    DifferenceQuotient,
    /// f(|(psi' + psi)/2|^2), the midpoint density.
    Midpoint,
}

impl NonlinCoef {
    fn eval(&self, nl: &Nonlinearity, cur: Cplx, known: Cplx) -> f64 {
        match self {
            NonlinCoef::DifferenceQuotient => nl.g_unchecked(cur.norm_sqr(), known.norm_sqr()),
            NonlinCoef::Midpoint => nl.f((0.5 * (cur + known)).norm_sqr()),
        }
    }
}

pub fn cnfd_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    tau: f64,
) -> Result<StepInfo> {
    cn_implicit_step(state, field, params, potential, nl, tau, NonlinCoef::DifferenceQuotient)
}

pub fn ssfd_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    tau: f64,
) -> Result<StepInfo> {
    cn_implicit_step(state, field, params, potential, nl, tau, NonlinCoef::Midpoint)
}

/// Shared Crank-Nicolson solve for the system
///   (i eps/tau) (psi' - psi) = [-(eps^2/2) Lap_h + V + coef] (psi' + psi)/2
/// rearranged so a constant tridiagonal (1D) or sine-diagonalized (2D)
/// operator is inverted each fixed-point sweep.
fn cn_implicit_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    tau: f64,
    coef: NonlinCoef,
) -> Result<StepInfo> {
    let grid = field.grid.clone();
    let eps = params.epsilon;
    let shift = Cplx::new(0.0, eps / tau);
    let kin = eps * eps / 4.0;
    let v = state.potential_values(potential, &grid, field.t + tau / 2.0)?;
    let policy = state.policy;

    match grid.dim() {
        1 => {
            let ax = grid.axis(0);
            let v_unk = gather(ax, &v);
            let psi0 = gather(ax, &field.values);
            let half_v: Vec<Cplx> = v_unk.iter().map(|z| -0.5 * z).collect();
            let left = Operator1d::new(ax, shift, Cplx::new(kin, 0.0), &half_v);
            let plus_v: Vec<Cplx> = v_unk.iter().map(|z| 0.5 * z).collect();
            let right = Operator1d::new(ax, shift, Cplx::new(-kin, 0.0), &plus_v);
            let rhs_base = right.apply(&psi0);

            let (sol, iters) = fixed_point_solve(&psi0, &policy, |cur| {
                let g: Vec<f64> = cur
                    .iter()
                    .zip(psi0.iter())
                    .map(|(c, k)| coef.eval(nl, *c, *k))
                    .collect();
                match policy.mode {
                    FixedPointMode::Plain => {
                        let rhs: Vec<Cplx> = (0..cur.len())
                            .map(|i| rhs_base[i] + 0.5 * g[i] * (cur[i] + psi0[i]))
                            .collect();
                        left.solve(&rhs)
                    }
                    FixedPointMode::ModifiedNewton => {
                        // fold the frozen nonlinear diagonal into the
                        // implicit operator; Jacobian's off-diagonal part
                        // (derivative of g itself) stays frozen
                        let extra: Vec<Cplx> = (0..cur.len())
                            .map(|i| -0.5 * (v_unk[i] + g[i]))
                            .collect();
                        let lhs = Operator1d::new(ax, shift, Cplx::new(kin, 0.0), &extra);
                        let rhs: Vec<Cplx> = (0..cur.len())
                            .map(|i| rhs_base[i] + 0.5 * g[i] * psi0[i])
                            .collect();
                        lhs.solve(&rhs)
                    }
                }
            })?;
            field.values = scatter(ax, sol);
            field.t += tau;
            Ok(StepInfo {
                iterations: iters,
                warning: None,
            })
        }
        2 => {
            // constant-coefficient left operator; V joins the nonlinearity
            // on the right so the sine-basis fast solve applies
            let psi0 = field.values.clone();
            let lap = laplacian(&grid, &psi0);
            let rhs_base: Vec<Cplx> = psi0
                .iter()
                .zip(lap.iter())
                .map(|(p, l)| shift * p - kin * l)
                .collect();
            let (sol, iters) = fixed_point_solve(&psi0, &policy, |cur| {
                let rhs: Vec<Cplx> = (0..cur.len())
                    .map(|i| {
                        let g = coef.eval(nl, cur[i], psi0[i]);
                        rhs_base[i] + 0.5 * (v[i] + g) * (cur[i] + psi0[i])
                    })
                    .collect();
                fast_poisson_dst(&grid, shift, -kin, &rhs).map_err(|e| match e {
                    NlseError::InvalidGrid(_) => NlseError::InvalidGrid(
                        "2D implicit CN steps require Dirichlet boundaries".into(),
                    ),
                    other => other,
                })
            })?;
            field.values = sol;
            field.t += tau;
            Ok(StepInfo {
                iterations: iters,
                warning: None,
            })
        }
        _ => unreachable!(),
    }
}
