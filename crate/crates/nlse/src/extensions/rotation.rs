//! Rotating-frame GPE in 2D: i psi_t = [-(1/2) Lap + V + beta rho
//! - Omega L_z] psi with L_z = -i (x d_y - y d_x); two propagators are
//! provided.
//!
//! * [`rotation_adi_step`]: alternating-direction splitting of the
//!   kinetic+rotation flow. Each direction is constant-coefficient in its
//!   own variable, so it diagonalizes in the Fourier basis per line and
//!   integrates exactly.
//! * [`lagrangian_rotating_step`]: change coordinates to a frame co-rotating
//!   with the trap; the rotation term vanishes and the potential becomes the
//!   time-dependent W(x~, t) = V(A(t) x~), handled analytically for harmonic
//!   traps and by the midpoint rule otherwise.
//!
//! Both propagators require the unscaled equation (epsilon = 1).

use rayon::prelude::*;

use crate::model::{ModelParams, Nonlinearity, Potential, WaveField};
use crate::schemes::splitting::{nonlinear_phase, spectral_kinetic};
use crate::schemes::{SchemeState, StepInfo};
use crate::transforms::Basis;
use crate::{Cplx, NlseError, Result};

/// The orthogonal frame matrix A(t): 2D rows (cos Wt, sin Wt; -sin Wt,
/// cos Wt); 3D appends the identity z-row. A(0) = I and A^-1 = A^T.
pub fn rotation_matrix(omega: f64, t: f64, dim: usize) -> Vec<Vec<f64>> {
    let (c, s) = ((omega * t).cos(), (omega * t).sin());
    match dim {
        2 => vec![vec![c, s], vec![-s, c]],
        3 => vec![vec![c, s, 0.0], vec![-s, c, 0.0], vec![0.0, 0.0, 1.0]],
        _ => panic!("rotation matrices exist in 2D and 3D"),
    }
}

fn require_unscaled(params: &ModelParams) -> Result<()> {
    if params.epsilon != 1.0 {
        return Err(NlseError::InvalidParameter(
            "rotating propagators are built for the unscaled equation; set epsilon = 1".into(),
        ));
    }
    Ok(())
}

fn require_periodic_2d(field: &WaveField) -> Result<()> {
    let grid = &field.grid;
    if grid.dim() != 2
        || Basis::for_bc(grid.axis(0).bc) != Basis::Fourier
        || Basis::for_bc(grid.axis(1).bc) != Basis::Fourier
    {
        return Err(NlseError::InvalidGrid(
            "rotating propagators need a 2D periodic (Fourier) box".into(),
        ));
    }
    Ok(())
}

/// Warn when the field has not decayed at the box edge; the periodic
/// truncation is then unjustified.
fn boundary_warning(field: &WaveField) -> Option<String> {
    let (nx, ny) = (field.grid.axis(0).num_nodes(), field.grid.axis(1).num_nodes());
    let sup = field.sup_norm();
    if sup == 0.0 {
        return None;
    }
    let mut edge = 0.0_f64;
    for iy in 0..ny {
        edge = edge.max(field.values[iy].norm());
        edge = edge.max(field.values[(nx - 1) * ny + iy].norm());
    }
    for ix in 0..nx {
        edge = edge.max(field.values[ix * ny].norm());
        edge = edge.max(field.values[ix * ny + ny - 1].norm());
    }
    if edge > 1e-8 * sup {
        Some(format!(
            "field magnitude at the box edge is {:.2e} of its peak; enlarge the \
             computational box",
            edge / sup
        ))
    } else {
        None
    }
}

/// Exact sub-flow of i psi_t = -(1/2) psi_xx - i Omega y psi_x over `theta`:
/// Fourier in x with symbol k^2/2 + Omega y k, per y-line.
fn adi_x_substep(state: &mut SchemeState, field: &mut WaveField, omega: f64, theta: f64) -> Result<()> {
    let grid = field.grid.clone();
    let (nx, ny) = (grid.axis(0).num_nodes(), grid.axis(1).num_nodes());
    let plan = state.plan(0);
    let mu = plan.mu().to_vec();
    let ynodes: Vec<f64> = grid.axis(1).nodes().to_vec();
    let values = &mut field.values;
    let cols: Vec<Result<Vec<Cplx>>> = (0..ny)
        .into_par_iter()
        .map(|iy| {
            let y = ynodes[iy];
            let m: Vec<Cplx> = mu
                .iter()
                .map(|&k| {
                    let phase = -theta * (k * k / 2.0 + omega * y * k);
                    Cplx::new(phase.cos(), phase.sin())
                })
                .collect();
            let mut col: Vec<Cplx> = (0..nx).map(|ix| values[ix * ny + iy]).collect();
            plan.apply_multiplier(&mut col, &m)?;
            Ok(col)
        })
        .collect();
    for (iy, col) in cols.into_iter().enumerate() {
        let col = col?;
        for ix in 0..nx {
            values[ix * ny + iy] = col[ix];
        }
    }
    Ok(())
}

/// Exact sub-flow of i psi_t = -(1/2) psi_yy + i Omega x psi_y over `theta`:
/// Fourier in y with symbol l^2/2 - Omega x l, per x-line.
fn adi_y_substep(state: &mut SchemeState, field: &mut WaveField, omega: f64, theta: f64) -> Result<()> {
    let grid = field.grid.clone();
    let ny = grid.axis(1).num_nodes();
    let plan = state.plan(1);
    let mu = plan.mu().to_vec();
    let xnodes: Vec<f64> = grid.axis(0).nodes().to_vec();
    field
        .values
        .par_chunks_mut(ny)
        .enumerate()
        .try_for_each(|(ix, row)| {
            let x = xnodes[ix];
            let m: Vec<Cplx> = mu
                .iter()
                .map(|&l| {
                    let phase = -theta * (l * l / 2.0 - omega * x * l);
                    Cplx::new(phase.cos(), phase.sin())
                })
                .collect();
            plan.apply_multiplier(row, &m)
        })
}

/// One Strang step of the rotating GPE by alternating directions:
/// Phase(tau/2) X(tau/2) Y(tau) X(tau/2) Phase(tau/2). Every sub-step is a
/// diagonal phase, so mass is conserved exactly.
pub fn rotation_adi_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    tau: f64,
) -> Result<StepInfo> {
    require_unscaled(params)?;
    require_periodic_2d(field)?;
    let omega = params.omega_rot;
    let nl = Nonlinearity::Cubic { beta: params.beta };
    let grid = field.grid.clone();
    let v = state.potential_values(potential, &grid, field.t + tau / 2.0)?;

    nonlinear_phase(&mut field.values, &v, &nl, 1.0, tau / 2.0);
    adi_x_substep(state, field, omega, tau / 2.0)?;
    adi_y_substep(state, field, omega, tau)?;
    adi_x_substep(state, field, omega, tau / 2.0)?;
    nonlinear_phase(&mut field.values, &v, &nl, 1.0, tau / 2.0);
    field.t += tau;

    Ok(StepInfo {
        iterations: 0,
        warning: boundary_warning(field),
    })
}

/// Integral over [t1, t2] of W(x~, t) = V(A(t) x~) at one node: closed
/// trigonometric antiderivative for harmonic traps, midpoint rule otherwise.
pub fn potential_time_integral(
    potential: &Potential,
    omega: f64,
    xt: [f64; 2],
    t1: f64,
    t2: f64,
) -> f64 {
    match potential {
        Potential::Zero => 0.0,
        Potential::Harmonic { gamma } if gamma.len() == 2 => {
            let (gx2, gy2) = (gamma[0] * gamma[0], gamma[1] * gamma[1]);
            let dt = t2 - t1;
            if omega == 0.0 {
                return 0.5 * (gx2 * xt[0] * xt[0] + gy2 * xt[1] * xt[1]) * dt;
            }
            // x(t) = cos(Wt) x~ + sin(Wt) y~, y(t) = -sin(Wt) x~ + cos(Wt) y~
            let ic = dt / 2.0
                + ((2.0 * omega * t2).sin() - (2.0 * omega * t1).sin()) / (4.0 * omega);
            let is = dt - ic;
            let ics = ((2.0 * omega * t1).cos() - (2.0 * omega * t2).cos()) / (4.0 * omega);
            let (x2, y2, xy) = (xt[0] * xt[0], xt[1] * xt[1], xt[0] * xt[1]);
            0.5 * (gx2 * (ic * x2 + is * y2 + 2.0 * ics * xy)
                + gy2 * (is * x2 + ic * y2 - 2.0 * ics * xy))
        }
        _ => {
            let tm = 0.5 * (t1 + t2);
            let a = rotation_matrix(omega, tm, 2);
            let x = [
                a[0][0] * xt[0] + a[0][1] * xt[1],
                a[1][0] * xt[0] + a[1][1] * xt[1],
            ];
            potential.eval(&x, tm) * (t2 - t1)
        }
    }
}

/// Phase sub-flow over [t1, t2] of i phi_t = [W(x~, t) + beta rho] phi; rho
/// is invariant, the W part integrates in time per node.
fn lagrangian_phase(
    field: &mut WaveField,
    potential: &Potential,
    omega: f64,
    beta: f64,
    t1: f64,
    t2: f64,
) {
    let grid = field.grid.clone();
    let ny = grid.axis(1).num_nodes();
    let xnodes: Vec<f64> = grid.axis(0).nodes().to_vec();
    let ynodes: Vec<f64> = grid.axis(1).nodes().to_vec();
    let dt = t2 - t1;
    field
        .values
        .par_chunks_mut(ny)
        .enumerate()
        .for_each(|(ix, row)| {
            for (iy, psi) in row.iter_mut().enumerate() {
                let xt = [xnodes[ix], ynodes[iy]];
                let iw = potential_time_integral(potential, omega, xt, t1, t2);
                let rho = psi.norm_sqr();
                let phase = iw + beta * rho * dt;
                *psi *= Cplx::new(0.0, -phase).exp();
            }
        });
}

/// One Strang step in rotating Lagrangian coordinates: the field lives on a
/// fixed grid of co-rotating coordinates and sees no rotation term, only
/// the revolving potential W.
pub fn lagrangian_rotating_step(
    state: &mut SchemeState,
    field: &mut WaveField,
    params: &ModelParams,
    potential: &Potential,
    tau: f64,
) -> Result<StepInfo> {
    require_unscaled(params)?;
    require_periodic_2d(field)?;
    let omega = params.omega_rot;
    let grid = field.grid.clone();
    let t = field.t;

    lagrangian_phase(field, potential, omega, params.beta, t, t + tau / 2.0);
    spectral_kinetic(state, &mut field.values, &grid, tau, 1.0)?;
    lagrangian_phase(field, potential, omega, params.beta, t + tau / 2.0, t + tau);
    field.t += tau;

    Ok(StepInfo {
        iterations: 0,
        warning: boundary_warning(field),
    })
}

/// Resample a field stored in rotating coordinates back onto the fixed
/// Cartesian nodes at its current time: evaluate the Fourier interpolant at
/// A^-1(t) x per node. Nodes whose preimage leaves the box get value 0 and
/// produce a single warning.
pub fn lagrangian_to_eulerian(
    field: &WaveField,
    state: &mut SchemeState,
    omega: f64,
) -> Result<(WaveField, Option<String>)> {
    require_periodic_2d(field)?;
    let grid = field.grid.clone();
    let (ax, ay) = (grid.axis(0), grid.axis(1));
    let (nx, ny) = (ax.num_nodes(), ay.num_nodes());
    let t = field.t;

    // full 2D coefficient array: transform rows (y), then columns (x)
    let mut coeffs = field.values.clone();
    {
        let plan_y = state.plan(1);
        for row in coeffs.chunks_mut(ny) {
            let c = plan_y.forward(row)?;
            row.copy_from_slice(&c);
        }
    }
    {
        let plan_x = state.plan(0);
        for iy in 0..ny {
            let mut col: Vec<Cplx> = (0..nx).map(|ix| coeffs[ix * ny + iy]).collect();
            col = plan_x.forward(&col)?;
            for ix in 0..nx {
                coeffs[ix * ny + iy] = col[ix];
            }
        }
    }
    let mux = state.plan(0).mu().to_vec();
    let muy = state.plan(1).mu().to_vec();

    // A^-1(t) = A(-t): x~ = cos(Wt) x - sin(Wt) y, y~ = sin(Wt) x + cos(Wt) y
    let (c, s) = ((omega * t).cos(), (omega * t).sin());
    let clipped = std::sync::atomic::AtomicUsize::new(0);
    let values: Vec<Cplx> = (0..nx * ny)
        .into_par_iter()
        .map(|flat| {
            let (ix, iy) = (flat / ny, flat % ny);
            let (x, y) = (ax.node(ix), ay.node(iy));
            let xt = c * x - s * y;
            let yt = s * x + c * y;
            if xt < ax.a || xt > ax.b || yt < ay.a || yt > ay.b {
                clipped.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                return Cplx::new(0.0, 0.0);
            }
            let ex: Vec<Cplx> = mux
                .iter()
                .map(|&k| Cplx::new(0.0, k * (xt - ax.a)).exp())
                .collect();
            let ey: Vec<Cplx> = muy
                .iter()
                .map(|&l| Cplx::new(0.0, l * (yt - ay.a)).exp())
                .collect();
            let mut acc = Cplx::new(0.0, 0.0);
            for kx in 0..nx {
                let mut inner = Cplx::new(0.0, 0.0);
                for ly in 0..ny {
                    inner += coeffs[kx * ny + ly] * ey[ly];
                }
                acc += ex[kx] * inner;
            }
            acc
        })
        .collect();

    let n_clip = clipped.load(std::sync::atomic::Ordering::Relaxed);
    let warning = (n_clip > 0).then(|| {
        format!("{n_clip} target nodes rotate outside the computational box; set to 0")
    });
    let out = WaveField {
        grid,
        t,
        values,
    };
    Ok((out, warning))
}
