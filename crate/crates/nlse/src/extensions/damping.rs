//! Damped evolution: i eps psi_t = [-(eps^2/2) Lap + V + f(rho) - i g(rho)] psi
//! with g = delta (linear), delta1 rho (cubic two-body loss) or
//! delta2 rho^2 (quintic three-body loss).
//!
//! The splitting sub-step integrates the nodal ODE exactly: the density
//! obeys rho_t = -2 g(rho) rho / eps, which has a closed form for every
//! damping kind, and the phase follows by integrating f along the decayed
//! density. Note that [`damped_density`] solves the density ODE from first
//! principles; a frequently quoted closed form for the quintic case fails
//! its own initial condition, so the ODE-exact expression
//! rho_n / sqrt(1 + 4 delta2 rho_n^2 s) is used and is pinned to a
//! step-doubling integrator in the tests.

use crate::model::{DampingKind, ModelParams, Nonlinearity, Potential, WaveField};
use crate::schemes::splitting::{nonlinear_phase, spectral_kinetic, tssp_step};
use crate::schemes::{SchemeState, StepInfo};
use crate::{Cplx, NlseError, Result};

/// Exact solution at time `s` of rho' = -2 g(rho) rho with rho(0) = rho_n.
pub fn damped_density(rho_n: f64, s: f64, kind: DampingKind) -> Result<f64> {
    if rho_n < 0.0 || s < 0.0 {
        return Err(NlseError::InvalidParameter(format!(
            "damped density needs rho >= 0 and s >= 0, got rho = {rho_n}, s = {s}"
        )));
    }
    kind.validate()?;
    Ok(damped_density_unchecked(rho_n, s, kind))
}

fn damped_density_unchecked(rho_n: f64, s: f64, kind: DampingKind) -> f64 {
    match kind {
        DampingKind::None => rho_n,
        DampingKind::Linear(d) => rho_n * (-2.0 * d * s).exp(),
        DampingKind::Cubic(d1) => rho_n / (1.0 + 2.0 * d1 * rho_n * s),
        DampingKind::Quintic(d2) => rho_n / (1.0 + 4.0 * d2 * rho_n * rho_n * s).sqrt(),
    }
}

/// The amplitude factor sqrt(rho(s)/rho_n) of one damped sub-step.
fn amplitude_factor(rho_n: f64, s: f64, kind: DampingKind) -> f64 {
    match kind {
        DampingKind::None => 1.0,
        DampingKind::Linear(d) => (-d * s).exp(),
        DampingKind::Cubic(d1) => 1.0 / (1.0 + 2.0 * d1 * rho_n * s).sqrt(),
        DampingKind::Quintic(d2) => {
            1.0 / (1.0 + 4.0 * d2 * rho_n * rho_n * s).powf(0.25)
        }
    }
}

/// I(s) = integral over [0, s] of f(rho(u)) du along the decayed density.
/// Closed forms for the cubic nonlinearity; composite Simpson otherwise.
pub fn damped_phase_integral(
    rho_n: f64,
    s: f64,
    nl: &Nonlinearity,
    kind: DampingKind,
) -> f64 {
    if rho_n == 0.0 || s == 0.0 {
        return nl.f(0.0) * s;
    }
    if let Nonlinearity::Cubic { beta } = *nl {
        return match kind {
            DampingKind::None => beta * rho_n * s,
            DampingKind::Linear(d) => {
                if d == 0.0 {
                    beta * rho_n * s
                } else {
                    beta * rho_n * (1.0 - (-2.0 * d * s).exp()) / (2.0 * d)
                }
            }
            DampingKind::Cubic(d1) => {
                if d1 == 0.0 {
                    beta * rho_n * s
                } else {
                    beta / (2.0 * d1) * (2.0 * d1 * rho_n * s).ln_1p()
                }
            }
            DampingKind::Quintic(d2) => {
                // beta/(2 d2 rho_n) (sqrt(1+u) - 1) with u = 4 d2 rho_n^2 s,
                // rewritten as u / (sqrt(1+u) + 1) to avoid cancellation
                let u = 4.0 * d2 * rho_n * rho_n * s;
                beta * 2.0 * rho_n * s / ((1.0 + u).sqrt() + 1.0)
            }
        };
    }
    // composite Simpson on the decayed-density integrand, doubling the
    // panel count until the value settles well below the splitting error
    let fi = |u: f64| nl.f(damped_density_unchecked(rho_n, u, kind));
    let simpson = |panels: usize| {
        let du = s / panels as f64;
        let mut acc = fi(0.0) + fi(s);
        for p in 0..panels {
            let left = p as f64 * du;
            acc += 4.0 * fi(left + du / 2.0);
            if p > 0 {
                acc += 2.0 * fi(left);
            }
        }
        acc * du / 6.0
    };
    let mut panels = 32;
    let mut coarse = simpson(panels);
    loop {
        panels *= 2;
        let fine = simpson(panels);
        if (fine - coarse).abs() <= 1e-13 * fine.abs().max(1.0) || panels >= 1 << 16 {
            return fine;
        }
        coarse = fine;
    }
}

/// One exact nodal sub-step of i eps psi_t = [V + f(rho) - i g(rho)] psi
/// over `dt`: amplitude from the density closed form, phase from the
/// f-integral along it. With no damping this is exactly the conservative
/// phase flow.
pub fn damped_phase_substep(
    values: &mut [Cplx],
    v: &[Cplx],
    nl: &Nonlinearity,
    kind: DampingKind,
    epsilon: f64,
    dt: f64,
) {
    if kind == DampingKind::None || kind.coefficient() == 0.0 {
        nonlinear_phase(values, v, nl, epsilon, dt);
        return;
    }
    // eps rescales time in the nodal ODE: psi_t = -(i/eps)(V + f) psi -
    // (g/eps) psi, so the density flows for s = dt/eps
    let s = dt / epsilon;
    for (psi, vj) in values.iter_mut().zip(v.iter()) {
        let rho = psi.norm_sqr();
        if rho == 0.0 {
            continue;
        }
        let amp = amplitude_factor(rho, s, kind);
        let phase = vj * (dt / epsilon) + damped_phase_integral(rho, s, nl, kind);
        *psi *= amp * (Cplx::new(0.0, -1.0) * phase).exp();
    }
}

/// Strang splitting for the damped equation: half damped phase sub-step,
/// spectral free flight, half damped phase sub-step. Total mass is
/// non-increasing; with no damping the step is bitwise the plain TSSP step.
pub fn damped_tssp_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    kind: DampingKind,
    tau: f64,
) -> Result<StepInfo> {
    if kind == DampingKind::None {
        return tssp_step(state, field, params, potential, nl, tau);
    }
    kind.validate()?;
    let grid = field.grid.clone();
    let v = state.potential_values(potential, &grid, field.t + tau / 2.0)?;
    let eps = params.epsilon;

    damped_phase_substep(&mut field.values, &v, nl, kind, eps, tau / 2.0);
    spectral_kinetic(state, &mut field.values, &grid, tau, eps)?;
    damped_phase_substep(&mut field.values, &v, nl, kind, eps, tau / 2.0);
    field.t += tau;
    Ok(StepInfo::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::discrete_mass;
    use crate::model::{BoundaryKind, Grid};
    use crate::schemes::SchemeKind;
    use std::sync::Arc;

    /// RK4 with step doubling on rho' = -2 g(rho) rho until the Richardson
    /// difference is below 1e-13.
    fn density_oracle(rho_n: f64, s: f64, kind: DampingKind) -> f64 {
        let rhs = |r: f64| -2.0 * kind.g(r.max(0.0)) * r;
        let rk4 = |mut r: f64, n: usize| {
            let dt = s / n as f64;
            for _ in 0..n {
                let k1 = rhs(r);
                let k2 = rhs(r + dt / 2.0 * k1);
                let k3 = rhs(r + dt / 2.0 * k2);
                let k4 = rhs(r + dt * k3);
                r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            r
        };
        let mut n = 64;
        let mut coarse = rk4(rho_n, n);
        loop {
            n *= 2;
            let fine = rk4(rho_n, n);
            if (fine - coarse).abs() < 1e-13 || n > 1 << 22 {
                return fine;
            }
            coarse = fine;
        }
    }

    #[test]
    fn zero_coefficient_keeps_density() {
        for kind in [
            DampingKind::None,
            DampingKind::Linear(0.0),
            DampingKind::Cubic(0.0),
            DampingKind::Quintic(0.0),
        ] {
            assert_eq!(damped_density(3.7, 0.9, kind).unwrap(), 3.7);
        }
    }

    #[test]
    fn linear_density_is_exponential() {
        let d = 0.8;
        let s = 0.6;
        let got = damped_density(1.0, s, DampingKind::Linear(d)).unwrap();
        assert!((got - (-2.0 * d * s).exp()).abs() < 1e-15);
    }

    #[test]
    fn quintic_quarter_second_halves_square() {
        let got = damped_density(1.0, 0.25, DampingKind::Quintic(1.0)).unwrap();
        assert!((got - 1.0 / 2.0_f64.sqrt()).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn closed_forms_match_ode_oracle() {
        for kind in [
            DampingKind::Linear(0.7),
            DampingKind::Cubic(0.4),
            DampingKind::Quintic(1.3),
        ] {
            for rho in [0.0, 0.3, 1.0, 4.5, 10.0] {
                for s in [0.05, 0.3, 1.0] {
                    let got = damped_density(rho, s, kind).unwrap();
                    let want = density_oracle(rho, s, kind);
                    assert!(
                        (got - want).abs() < 1e-12,
                        "{kind:?} rho={rho} s={s}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn negative_inputs_rejected() {
        assert!(damped_density(-1.0, 0.1, DampingKind::Linear(1.0)).is_err());
        assert!(damped_density(1.0, -0.1, DampingKind::Linear(1.0)).is_err());
    }

    /// Gauss-Legendre 5-point on 4096 subintervals: independent of the
    /// production Simpson rule and accurate to roundoff here.
    fn quadrature_oracle(rho: f64, s: f64, nl: &Nonlinearity, kind: DampingKind) -> f64 {
        let fi = |u: f64| nl.f(damped_density_unchecked(rho, u, kind));
        let nodes = [
            -0.906179845938664,
            -0.5384693101056831,
            0.0,
            0.5384693101056831,
            0.906179845938664,
        ];
        let weights = [
            0.23692688505618908,
            0.47862867049936647,
            0.5688888888888889,
            0.47862867049936647,
            0.23692688505618908,
        ];
        let n = 4096;
        let du = s / n as f64;
        let mut acc = 0.0;
        for p in 0..n {
            let mid = (p as f64 + 0.5) * du;
            for (x, w) in nodes.iter().zip(weights.iter()) {
                acc += w * fi(mid + x * du / 2.0);
            }
        }
        acc * du / 2.0
    }

    #[test]
    fn cubic_phase_integrals_match_quadrature() {
        let nl = Nonlinearity::Cubic { beta: -1.3 };
        for kind in [
            DampingKind::Linear(0.9),
            DampingKind::Cubic(0.5),
            DampingKind::Quintic(0.8),
        ] {
            for rho in [1e-8, 0.2, 2.0, 9.0] {
                let s = 0.4;
                let got = damped_phase_integral(rho, s, &nl, kind);
                let want = quadrature_oracle(rho, s, &nl, kind);
                assert!(
                    (got - want).abs() < 1e-12 * want.abs().max(1.0),
                    "{kind:?} rho={rho}: {got} vs {want}"
                );
            }
        }
        // closed form quoted for linear damping
        let (beta, d, rho, s) = (-1.3_f64, 0.9_f64, 2.0_f64, 0.4_f64);
        let want = beta * rho * (1.0 - (-2.0 * d * s).exp()) / (2.0 * d);
        let got = damped_phase_integral(rho, s, &nl, DampingKind::Linear(d));
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn general_nonlinearity_quadrature_is_accurate() {
        let nl = Nonlinearity::Saturating { beta0: 3.0, c0: 0.5 };
        let kind = DampingKind::Quintic(0.6);
        let got = damped_phase_integral(1.7, 0.5, &nl, kind);
        let want = quadrature_oracle(1.7, 0.5, &nl, kind);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn zero_damping_substep_is_identity_for_free_field() {
        let mut vals = vec![Cplx::new(0.3, -0.7), Cplx::new(1.0, 0.2)];
        let orig = vals.clone();
        let v = vec![Cplx::new(0.0, 0.0); 2];
        damped_phase_substep(
            &mut vals,
            &v,
            &Nonlinearity::none(),
            DampingKind::Linear(0.0),
            1.0,
            0.3,
        );
        assert_eq!(vals, orig);
    }

    #[test]
    fn substep_matches_nodal_complex_ode_oracle() {
        // one node, quintic damping, cubic interaction, tau = 0.1
        let kind = DampingKind::Quintic(0.9);
        let nl = Nonlinearity::Cubic { beta: -2.0 };
        let v_node = 0.7;
        let tau = 0.1;
        let psi0 = Cplx::new(1.1, -0.4);

        let mut vals = vec![psi0];
        damped_phase_substep(&mut vals, &[Cplx::new(v_node, 0.0)], &nl, kind, 1.0, tau);

        // RK4 on i psi' = [V + f(rho) - i g(rho)] psi
        let rhs = |p: Cplx| {
            let rho = p.norm_sqr();
            Cplx::new(0.0, -1.0) * (v_node + nl.f(rho)) * p - kind.g(rho) * p
        };
        let n = 200_000;
        let dt = tau / n as f64;
        let mut p = psi0;
        for _ in 0..n {
            let k1 = rhs(p);
            let k2 = rhs(p + dt / 2.0 * k1);
            let k3 = rhs(p + dt / 2.0 * k2);
            let k4 = rhs(p + dt * k3);
            p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((vals[0] - p).norm() < 1e-10, "{} vs {}", vals[0], p);
    }

    fn soliton_field(grid: &Arc<Grid>) -> WaveField {
        let mut f = WaveField::from_fn(grid.clone(), 0.0, |x| {
            let a = 2.0;
            Cplx::new(a / (a * x[0]).cosh(), 0.0) * Cplx::new(0.0, x[0]).exp()
        });
        f.enforce_dirichlet();
        f
    }

    #[test]
    fn no_damping_is_bitwise_tssp() {
        let grid = Arc::new(Grid::build_1d(-15.0, 20.0, 512, BoundaryKind::Dirichlet).unwrap());
        let mut a = soliton_field(&grid);
        let mut b = soliton_field(&grid);
        let params = ModelParams::default();
        let nl = Nonlinearity::Cubic { beta: -1.0 };
        let mut sa = SchemeState::new(SchemeKind::Tssp, &grid);
        let mut sb = SchemeState::new(SchemeKind::Tssp, &grid);
        for _ in 0..5 {
            damped_tssp_step(
                &mut sa, &mut a, &params, &Potential::Zero, &nl, DampingKind::None, 1e-2,
            )
            .unwrap();
            tssp_step(&mut sb, &mut b, &params, &Potential::Zero, &nl, 1e-2).unwrap();
        }
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn linear_damping_mass_decays_exponentially() {
        let grid = Arc::new(Grid::build_1d(-15.0, 20.0, 512, BoundaryKind::Dirichlet).unwrap());
        let mut f = soliton_field(&grid);
        let params = ModelParams::default();
        let nl = Nonlinearity::Cubic { beta: -1.0 };
        let kind = DampingKind::Linear(0.5);
        let mut state = SchemeState::new(SchemeKind::Tssp, &grid);
        let n0 = discrete_mass(&f);
        let tau = 1e-3;
        for _ in 0..1000 {
            damped_tssp_step(
                &mut state, &mut f, &params, &Potential::Zero, &nl, kind, tau,
            )
            .unwrap();
        }
        let ratio = discrete_mass(&f) / n0;
        assert!(
            (ratio - (-1.0_f64).exp()).abs() < 1e-10,
            "N(1)/N(0) = {ratio}"
        );
    }

    #[test]
    fn mass_is_nonincreasing_for_every_kind() {
        let grid = Arc::new(Grid::build_1d(-15.0, 20.0, 256, BoundaryKind::Dirichlet).unwrap());
        let params = ModelParams::default();
        let nl = Nonlinearity::Cubic { beta: -1.0 };
        for kind in [
            DampingKind::Linear(0.3),
            DampingKind::Cubic(0.7),
            DampingKind::Quintic(1.1),
        ] {
            let mut f = soliton_field(&grid);
            let mut state = SchemeState::new(SchemeKind::Tssp, &grid);
            let mut last = discrete_mass(&f);
            for _ in 0..200 {
                damped_tssp_step(
                    &mut state, &mut f, &params, &Potential::Zero, &nl, kind, 5e-3,
                )
                .unwrap();
                let m = discrete_mass(&f);
                assert!(m <= last + 1e-12 * last, "{kind:?} mass grew");
                last = m;
            }
        }
    }

    #[test]
    fn quintic_damping_bounds_focusing_run() {
        // quintic focusing data that concentrates sharply when undamped
        let grid = Arc::new(Grid::build_1d(-8.0, 8.0, 512, BoundaryKind::Dirichlet).unwrap());
        let init = |grid: &Arc<Grid>| {
            let mut f = WaveField::from_fn(grid.clone(), 0.0, |x| {
                Cplx::new(3.0 * (-2.0 * x[0] * x[0]).exp(), 0.0)
            });
            f.enforce_dirichlet();
            f
        };
        let params = ModelParams::default();
        let nl = Nonlinearity::CubicQuintic { beta1: 0.0, beta2: -10.0 };
        // score each run by its largest sup norm over the last quarter of
        // the horizon: the undamped run stays concentrated after collapse
        // while the quintic loss drains the spike
        let run = |kind: DampingKind| -> f64 {
            let mut f = init(&grid);
            let mut state = SchemeState::new(SchemeKind::Tssp, &grid);
            let s0 = f.sup_norm();
            let steps = 2000;
            let mut late = 0.0_f64;
            for n in 0..steps {
                if damped_tssp_step(
                    &mut state, &mut f, &params, &Potential::Zero, &nl, kind, 1e-4,
                )
                .is_err()
                {
                    return f64::INFINITY;
                }
                let s = f.sup_norm();
                if !s.is_finite() {
                    return f64::INFINITY;
                }
                if n >= 3 * steps / 4 {
                    late = late.max(s / s0);
                }
            }
            late
        };
        let undamped = run(DampingKind::None);
        let damped = run(DampingKind::Quintic(0.5));
        assert!(
            damped < 1.0,
            "damped run not drained: late sup growth {damped}"
        );
        assert!(
            undamped > 2.0 * damped,
            "undamped run did not stay concentrated: {undamped} vs {damped}"
        );
    }
}
