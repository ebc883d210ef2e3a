//! Leap-frog finite-difference step: fully explicit three-level update,
//! cheapest per step but only conditionally stable (tau = O(h^2/eps)).
//! Instability is detected by amplitude growth and reported as an error
//! naming the tau/h^2 ratio.

use crate::model::{ModelParams, Nonlinearity, Potential, WaveField};
use crate::schemes::ops::laplacian;
use crate::schemes::sifd::euler_first_step;
use crate::schemes::{SchemeState, StepInfo};
use crate::{Cplx, NlseError, Result};

const BLOWUP_FACTOR: f64 = 1e6;

pub fn lpfd_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    tau: f64,
) -> Result<StepInfo> {
    let grid = field.grid.clone();
    let eps = params.epsilon;
    let v = state.potential_values(potential, &grid, field.t)?;
    state.note_initial(field);

    let mut info = StepInfo::default();
    let h_min = grid.axes().iter().map(|a| a.h).fold(f64::INFINITY, f64::min);
    let max_expl = field
        .values
        .iter()
        .zip(v.iter())
        .map(|(psi, vj)| (vj + nl.f(psi.norm_sqr())).norm())
        .fold(0.0, f64::max);
    // explicit-scheme guideline: the step must resolve both the kinetic
    // symbol (~2 eps / h^2) and the potential/nonlinear frequency
    if tau.abs() * (2.0 * eps / (h_min * h_min) + max_expl / eps) > 1.0 {
        info.warning = Some(format!(
            "step size {:.3e} violates the explicit stability guideline tau = O(h^2/eps) \
             (h = {:.3e}, eps = {:.3e})",
            tau.abs(),
            h_min,
            eps
        ));
    }

    let new = match state.prev.take() {
        None => {
            let cur = field.values.clone();
            state.prev = Some(cur);
            euler_first_step(field, eps, &v, nl, tau)
        }
        Some(prev) => {
            let lap = laplacian(&grid, &field.values);
            let c = Cplx::new(0.0, -2.0 * tau / eps);
            let new: Vec<Cplx> = (0..prev.len())
                .map(|i| {
                    let psi = field.values[i];
                    let rhs = -(eps * eps / 2.0) * lap[i] + (v[i] + nl.f(psi.norm_sqr())) * psi;
                    prev[i] + c * rhs
                })
                .collect();
            state.prev = Some(field.values.clone());
            new
        }
    };
    field.values = new;
    field.t += tau;

    let sup = field.sup_norm();
    let initial = state.initial_sup.expect("recorded above");
    if !sup.is_finite() || sup > BLOWUP_FACTOR * initial {
        return Err(NlseError::BlowUp {
            growth: sup / initial,
            tau_over_h2: tau.abs() / (h_min * h_min),
        });
    }
    Ok(info)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bright_soliton, BoundaryKind, Grid};
    use crate::schemes::SchemeKind;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn linear_mode_matches_scalar_leapfrog() {
        let j = 32;
        let grid = Arc::new(Grid::build_1d(0.0, 1.0, j, BoundaryKind::Dirichlet).unwrap());
        let params = ModelParams::default();
        let nl = Nonlinearity::none();
        let mut field = WaveField::from_fn(grid.clone(), 0.0, |x| {
            Cplx::new((PI * x[0]).sin(), 0.0)
        });
        let mut state = SchemeState::new(SchemeKind::Lpfd, &grid);
        let ax = grid.axis(0);
        let tau = ax.h * ax.h / 8.0;
        let eps = params.epsilon;
        let s = (PI / (2.0 * j as f64)).sin();
        let lam = 4.0 / (ax.h * ax.h) * s * s; // -D2 eigenvalue
        let omega = eps * lam / 2.0; // rhs multiplier / eps

        let mut a_prev = Cplx::new(1.0, 0.0);
        let mut a_cur = a_prev + Cplx::new(0.0, -tau) * omega * a_prev;
        lpfd_step(&mut state, &mut field, &params, &Potential::Zero, &nl, tau).unwrap();
        for _ in 0..50 {
            lpfd_step(&mut state, &mut field, &params, &Potential::Zero, &nl, tau).unwrap();
            let a_next = a_prev + Cplx::new(0.0, -2.0 * tau) * omega * a_cur;
            a_prev = a_cur;
            a_cur = a_next;
        }
        for (k, got) in field.values.iter().enumerate() {
            let want = a_cur * (PI * ax.node(k)).sin();
            assert!((got - want).norm() < 1e-12, "node {k}");
        }
    }

    #[test]
    fn oversized_step_blows_up_with_diagnostic() {
        let j = 100;
        let grid = Arc::new(Grid::build_1d(-5.0, 5.0, j, BoundaryKind::Dirichlet).unwrap());
        let params = ModelParams::default();
        let nl = Nonlinearity::Cubic { beta: -1.0 };
        let mut field = WaveField::from_fn(grid.clone(), 0.0, |x| {
            Cplx::new(1.0 / x[0].cosh(), 0.0)
        });
        field.enforce_dirichlet();
        let mut state = SchemeState::new(SchemeKind::Lpfd, &grid);
        let h = grid.axis(0).h;
        let tau = 10.0 * h * h;
        let mut blew_up = false;
        for _ in 0..1000 {
            match lpfd_step(&mut state, &mut field, &params, &Potential::Zero, &nl, tau) {
                Ok(info) => assert!(info.warning.is_some(), "guideline violation should warn"),
                Err(NlseError::BlowUp { growth, tau_over_h2 }) => {
                    assert!(growth > 1e6);
                    assert!((tau_over_h2 - 10.0).abs() < 1e-12);
                    blew_up = true;
                    break;
                }
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        assert!(blew_up, "explicit leapfrog at tau = 10 h^2 must go unstable");
    }

    #[test]
    fn soliton_stable_at_small_step() {
        let j = 400;
        let grid = Arc::new(Grid::build_1d(-15.0, 20.0, j, BoundaryKind::Dirichlet).unwrap());
        let params = ModelParams::default();
        let nl = Nonlinearity::Cubic { beta: -1.0 };
        let mut field = WaveField::from_fn(grid.clone(), 0.0, |x| {
            bright_soliton(0.0, x[0], 2.0, 1.0, 0.0, 0.0, -1.0).unwrap()
        });
        field.enforce_dirichlet();
        let h = grid.axis(0).h;
        let tau = h * h / 4.0;
        let mut state = SchemeState::new(SchemeKind::Lpfd, &grid);
        for _ in 0..200 {
            lpfd_step(&mut state, &mut field, &params, &Potential::Zero, &nl, tau).unwrap();
        }
        // amplitude stays near the soliton's peak value 2
        assert!((field.sup_norm() - 2.0).abs() < 0.1);
    }
}
