//! Conserved-quantity evaluation (discrete mass and energies), error norms
//! against analytic references, reversibility harness, and the CSV
//! conservation report.

use std::io::Write;

use crate::model::{BoundaryKind, ModelParams, Nonlinearity, Potential, WaveField};
use crate::schemes::{step, SchemeKind, SchemeState};
use crate::{Cplx, NlseError, Result};

/// Quadrature weight of one flat node index: product of per-axis weights.
/// Interior nodes weigh 1; Neumann endpoints weigh 1/2 (trapezoid, the rule
/// the ghost-reflection stencil conserves); Dirichlet endpoints carry zero
/// field values so their weight is immaterial and set to 1; periodic grids
/// have no endpoint nodes.
fn weight(field: &WaveField, flat: usize) -> f64 {
    let grid = &field.grid;
    let mut w = 1.0;
    let mut rem = flat;
    for ax in (0..grid.dim()).rev() {
        let axis = grid.axis(ax);
        let idx = rem % axis.num_nodes();
        rem /= axis.num_nodes();
        if axis.bc == BoundaryKind::Neumann && (idx == 0 || idx == axis.j) {
            w *= 0.5;
        }
    }
    w
}

/// Discrete mass N^n = h Sum_j |psi_j|^2 (interior sum for Dirichlet,
/// all nodes for periodic, trapezoid for Neumann; h is the cell volume).
pub fn discrete_mass(field: &WaveField) -> f64 {
    let vol = field.grid.cell_volume();
    field
        .values
        .iter()
        .enumerate()
        .map(|(j, z)| weight(field, j) * z.norm_sqr())
        .sum::<f64>()
        * vol
}

/// Kinetic term h Sum |D+ psi|^2 summed over forward-difference cells along
/// every axis (j = 0..J-1 per axis; periodic wraps the last cell).
fn kinetic_sum(field: &WaveField) -> f64 {
    let grid = &field.grid;
    let vol = grid.cell_volume();
    let mut total = 0.0;
    match grid.dim() {
        1 => {
            let ax = grid.axis(0);
            let v = &field.values;
            let n = ax.num_nodes();
            for j in 0..n - 1 {
                total += (v[j + 1] - v[j]).norm_sqr();
            }
            if ax.bc == BoundaryKind::Periodic {
                total += (v[0] - v[n - 1]).norm_sqr();
            }
            total /= ax.h * ax.h;
        }
        2 => {
            let (ax, ay) = (grid.axis(0), grid.axis(1));
            let (nx, ny) = (ax.num_nodes(), ay.num_nodes());
            let v = &field.values;
            let at = |ix: usize, iy: usize| v[ix * ny + iy];
            let mut sx = 0.0;
            for ix in 0..nx - 1 {
                for iy in 0..ny {
                    sx += (at(ix + 1, iy) - at(ix, iy)).norm_sqr();
                }
            }
            if ax.bc == BoundaryKind::Periodic {
                for iy in 0..ny {
                    sx += (at(0, iy) - at(nx - 1, iy)).norm_sqr();
                }
            }
            let mut sy = 0.0;
            for ix in 0..nx {
                for iy in 0..ny - 1 {
                    sy += (at(ix, iy + 1) - at(ix, iy)).norm_sqr();
                }
            }
            if ay.bc == BoundaryKind::Periodic {
                for ix in 0..nx {
                    sy += (at(ix, 0) - at(ix, ny - 1)).norm_sqr();
                }
            }
            total = sx / (ax.h * ax.h) + sy / (ay.h * ay.h);
        }
        _ => unreachable!(),
    }
    total * vol
}

/// Discrete energy
///   E^n = h Sum_j [ (eps^2/2) |D+ psi_j|^2 + V(x_j) |psi_j|^2 + F(|psi_j|^2) ],
/// the quantity the Crank-Nicolson step conserves.
pub fn discrete_energy_cnfd(
    field: &WaveField,
    potential: &Potential,
    nl: &Nonlinearity,
    params: &ModelParams,
) -> Result<f64> {
    let vol = field.grid.cell_volume();
    let v = potential.sample(&field.grid, field.t)?;
    let eps = params.epsilon;
    let mut e = eps * eps / 2.0 * kinetic_sum(field);
    for (j, psi) in field.values.iter().enumerate() {
        let rho = psi.norm_sqr();
        e += weight(field, j) * vol * (v[j] * rho + nl.big_f(rho));
    }
    Ok(e)
}

/// Relaxed discrete energy conserved by the relaxation scheme with a cubic
/// nonlinearity: the F term is replaced by the staggered cross term
/// u^{n+1/2} u^{n-1/2} / (2 beta), where u = f(rho) = beta rho is the
/// relaxation variable. `u_next`/`u_prev` are those half levels and pair
/// with the field at the integer level between them.
pub fn discrete_energy_relax(
    field: &WaveField,
    u_next: &[f64],
    u_prev: &[f64],
    potential: &Potential,
    nl: &Nonlinearity,
    params: &ModelParams,
) -> Result<f64> {
    let beta = match nl {
        Nonlinearity::Cubic { beta } => *beta,
        _ => {
            return Err(NlseError::InvalidParameter(
                "the relaxed energy is only conserved (and only defined here) for \
                 the cubic nonlinearity"
                    .into(),
            ))
        }
    };
    assert_eq!(u_next.len(), field.values.len());
    assert_eq!(u_prev.len(), field.values.len());
    let vol = field.grid.cell_volume();
    let v = potential.sample(&field.grid, field.t)?;
    let eps = params.epsilon;
    let mut e = eps * eps / 2.0 * kinetic_sum(field);
    for (j, psi) in field.values.iter().enumerate() {
        let rho = psi.norm_sqr();
        // u stores f(rho) = beta * rho, so the (beta/2) phi phi cross term of
        // the conserved functional reads u u / (2 beta) in this variable. At
        // beta = 0 the nonlinear term (and u itself) vanishes identically.
        let cross = if beta == 0.0 { 0.0 } else { u_next[j] * u_prev[j] / (2.0 * beta) };
        e += weight(field, j) * vol * (v[j] * rho + cross);
    }
    Ok(e)
}

/// Sup-norm error measures against an analytic reference evaluated at the
/// field's own time: e_p is the pointwise modulus of the difference; the
/// modulus error is reported both signed (max over the plain difference of
/// moduli, which can be negative) and as an absolute value.
#[derive(Debug, Clone, Copy, Default)]
pub struct ErrorNorms {
    pub e_p: f64,
    pub e_m_signed: f64,
    pub e_m_abs: f64,
}

pub fn error_norms(field: &WaveField, reference: impl Fn(&[f64], f64) -> Cplx) -> ErrorNorms {
    let mut e_p = 0.0_f64;
    let mut e_m_signed = f64::NEG_INFINITY;
    let mut e_m_abs = 0.0_f64;
    for (j, z) in field.values.iter().enumerate() {
        let x = field.grid.node_coords(j);
        let exact = reference(&x, field.t);
        e_p = e_p.max((exact - z).norm());
        let dm = exact.norm() - z.norm();
        e_m_signed = e_m_signed.max(dm);
        e_m_abs = e_m_abs.max(dm.abs());
    }
    ErrorNorms {
        e_p,
        e_m_signed,
        e_m_abs,
    }
}

/// Run `n_steps` forward then the same number backward and report the
/// sup-norm distance to the initial field. Two-level schemes have their
/// history reflected at the turning point, after which n-1 backward
/// leapfrog steps land exactly on the seed level.
pub fn reversibility_check(
    kind: SchemeKind,
    initial: &WaveField,
    params: &ModelParams,
    potential: &Potential,
    nl: &Nonlinearity,
    tau: f64,
    n_steps: usize,
) -> Result<f64> {
    if n_steps == 0 {
        return Ok(0.0);
    }
    let mut field = initial.clone();
    let mut state = SchemeState::new(kind, &field.grid);
    for _ in 0..n_steps {
        step(&mut state, &mut field, params, potential, nl, tau)?;
    }
    let backward_steps = if kind.is_two_level() {
        let prev = state.prev.take().expect("two-level scheme has history");
        let cur = std::mem::replace(&mut field.values, prev);
        state.prev = Some(cur);
        field.t -= tau;
        n_steps - 1
    } else {
        n_steps
    };
    for _ in 0..backward_steps {
        step(&mut state, &mut field, params, potential, nl, -tau)?;
    }
    Ok(field
        .values
        .iter()
        .zip(initial.values.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

fn drift(q: f64, q0: f64) -> f64 {
    (q - q0).abs() / q0.abs().max(1e-300)
}

#[derive(Debug, Clone, Default)]
pub struct ReportRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub relaxed_energy: Option<f64>,
    pub mass1: Option<f64>,
    pub mass2: Option<f64>,
}

/// Time series of conserved quantities with relative drifts vs the first row.
#[derive(Debug, Clone, Default)]
pub struct ConservationReport {
    pub rows: Vec<ReportRow>,
}

impl ConservationReport {
    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn mass_drift(&self) -> f64 {
        self.max_drift(|r| Some(r.mass))
    }

    pub fn energy_drift(&self) -> f64 {
        self.max_drift(|r| Some(r.energy))
    }

    pub fn relaxed_energy_drift(&self) -> f64 {
        self.max_drift(|r| r.relaxed_energy)
    }

    fn max_drift(&self, get: impl Fn(&ReportRow) -> Option<f64>) -> f64 {
        let q0 = match self.rows.first().and_then(&get) {
            Some(q) => q,
            None => return 0.0,
        };
        self.rows
            .iter()
            .filter_map(|r| get(r).map(|q| drift(q, q0)))
            .fold(0.0, f64::max)
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "t,mass,energy,relaxed_energy,mass1,mass2,mass_drift,energy_drift,relaxed_energy_drift"
        )?;
        let first = self.rows.first().cloned().unwrap_or_default();
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        let optd = |v: Option<f64>, v0: Option<f64>| match (v, v0) {
            (Some(q), Some(q0)) => format!("{:.6e}", drift(q, q0)),
            _ => String::new(),
        };
        for r in &self.rows {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{},{},{},{:.6e},{:.6e},{}",
                r.t,
                r.mass,
                r.energy,
                opt(r.relaxed_energy),
                opt(r.mass1),
                opt(r.mass2),
                drift(r.mass, first.mass),
                drift(r.energy, first.energy),
                optd(r.relaxed_energy, first.relaxed_energy),
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bright_soliton, soliton_energy, soliton_mass, Grid};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn soliton_grid(j: usize) -> Arc<Grid> {
        Arc::new(Grid::build_1d(-15.0, 20.0, j, BoundaryKind::Dirichlet).unwrap())
    }

    fn soliton_field(grid: &Arc<Grid>) -> WaveField {
        let mut f = WaveField::from_fn(grid.clone(), 0.0, |x| {
            bright_soliton(0.0, x[0], 2.0, 1.0, 0.0, 0.0, -1.0).unwrap()
        });
        f.enforce_dirichlet();
        f
    }

    #[test]
    fn zero_field_has_zero_mass_and_energy() {
        let grid = soliton_grid(16);
        let f = WaveField::new(grid.clone(), vec![Cplx::new(0.0, 0.0); 17], 0.0).unwrap();
        assert_eq!(discrete_mass(&f), 0.0);
        let e = discrete_energy_cnfd(
            &f,
            &Potential::Zero,
            &Nonlinearity::Cubic { beta: -1.0 },
            &ModelParams::default(),
        )
        .unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn soliton_mass_and_energy_match_continuum() {
        // h = 3.5e-3 on (-15, 20): quadrature error is exponentially small
        // for the mass, second order for the energy
        let grid = soliton_grid(10_000);
        let f = soliton_field(&grid);
        let m = discrete_mass(&f);
        assert!((m - soliton_mass(2.0, -1.0).unwrap()).abs() < 1e-9, "mass {m}");
        let e = discrete_energy_cnfd(
            &f,
            &Potential::Zero,
            &Nonlinearity::Cubic { beta: -1.0 },
            &ModelParams::default(),
        )
        .unwrap();
        let e_exact = soliton_energy(2.0, 1.0, -1.0).unwrap(); // 14/3
        assert!((e - e_exact).abs() < 1e-4, "energy {e} vs {e_exact}");
    }

    #[test]
    fn mass_matches_parseval_for_sine_mode() {
        let j = 64;
        let grid = Arc::new(Grid::build_1d(0.0, 1.0, j, BoundaryKind::Dirichlet).unwrap());
        let f = WaveField::from_fn(grid.clone(), 0.0, |x| {
            Cplx::new((3.0 * PI * x[0]).sin(), 0.0)
        });
        // Parseval: h * sum |psi_j|^2 = (b-a)/2 * |coeff|^2 = 1/2
        assert!((discrete_mass(&f) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn plane_phase_kinetic_energy_closed_form() {
        let j = 64;
        let grid = Arc::new(Grid::build_1d(0.0, 1.0, j, BoundaryKind::Periodic).unwrap());
        let k = 2.0 * PI * 5.0;
        let f = WaveField::from_fn(grid.clone(), 0.0, |x| Cplx::new(0.0, k * x[0]).exp());
        let e = discrete_energy_cnfd(
            &f,
            &Potential::Zero,
            &Nonlinearity::none(),
            &ModelParams::default(),
        )
        .unwrap();
        let h = grid.axis(0).h;
        // |e^{ikh} - 1|^2 = 4 sin^2(kh/2), J cells of width h
        let want = 0.5 * (j as f64) * h * 4.0 * (k * h / 2.0).sin().powi(2) / (h * h);
        assert!((e - want).abs() < 1e-10 * want);
    }

    #[test]
    fn relax_energy_rejects_non_cubic_and_reduces_at_beta_zero() {
        let grid = soliton_grid(100);
        let f = soliton_field(&grid);
        let n = f.values.len();
        let u = vec![1.0; n];
        let err = discrete_energy_relax(
            &f,
            &u,
            &u,
            &Potential::Zero,
            &Nonlinearity::CubicQuintic { beta1: 1.0, beta2: 1.0 },
            &ModelParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, NlseError::InvalidParameter(_)));

        let e_relax = discrete_energy_relax(
            &f,
            &u,
            &u,
            &Potential::Zero,
            &Nonlinearity::Cubic { beta: 0.0 },
            &ModelParams::default(),
        )
        .unwrap();
        let e_plain = discrete_energy_cnfd(
            &f,
            &Potential::Zero,
            &Nonlinearity::none(),
            &ModelParams::default(),
        )
        .unwrap();
        assert!((e_relax - e_plain).abs() <= 1e-14 * e_plain.abs());
    }

    #[test]
    fn relax_energy_constant_state_identity() {
        // constant density rho*: u pair converged to f(rho*) = beta rho*,
        // cross term u^2 / (2 beta) = (beta/2) rho*^2, the plain F term
        let grid = Arc::new(Grid::build_1d(0.0, 1.0, 8, BoundaryKind::Periodic).unwrap());
        let rho: f64 = 1.7;
        let beta = -0.8;
        let nl = Nonlinearity::Cubic { beta };
        let f = WaveField::new(grid.clone(), vec![Cplx::new(rho.sqrt(), 0.0); 8], 0.0).unwrap();
        let u = vec![nl.f(rho); 8];
        let e = discrete_energy_relax(&f, &u, &u, &Potential::Zero, &nl, &ModelParams::default())
            .unwrap();
        // constant field, periodic: kinetic term vanishes and the total node
        // weight times h is the domain length 1, so E = (beta/2) rho^2
        let want = 0.5 * beta * rho * rho;
        assert!((e - want).abs() < 1e-13, "{e} vs {want}");
    }

    #[test]
    fn error_norms_phase_geometry() {
        let grid = soliton_grid(200);
        let f = soliton_field(&grid);
        let norms = error_norms(&f, |x, t| {
            bright_soliton(t, x[0], 2.0, 1.0, 0.0, 0.0, -1.0).unwrap()
        });
        // the Dirichlet endpoints were pinned to zero, so the only residual
        // is the soliton's exponentially small tail value there
        assert!(norms.e_p < 1e-12);
        assert!(norms.e_m_abs < 1e-12);

        // global phase error: e_m = 0, e_p = 2 |sin(theta/2)| max|psi|
        let theta = 1e-3;
        let mut g = f.clone();
        let ph = Cplx::new(0.0, theta).exp();
        for z in &mut g.values {
            *z *= ph;
        }
        let norms = error_norms(&g, |x, t| {
            bright_soliton(t, x[0], 2.0, 1.0, 0.0, 0.0, -1.0).unwrap()
        });
        assert!(norms.e_m_abs < 1e-12); // endpoint tails again
        // rotating every node by theta displaces each value by
        // 2 sin(theta/2) |psi|; the max is attained at the sampled peak
        let want = 2.0 * (theta / 2.0).sin().abs() * f.sup_norm();
        assert!((norms.e_p - want).abs() < 1e-12);
    }

    #[test]
    fn reversibility_all_schemes() {
        let grid = soliton_grid(200);
        let f = soliton_field(&grid);
        let params = ModelParams::default();
        let nl = Nonlinearity::Cubic { beta: -1.0 };
        for kind in SchemeKind::all() {
            let tau = if kind == SchemeKind::Lpfd {
                // explicit scheme: respect the h^2 restriction
                grid.axis(0).h * grid.axis(0).h / 4.0
            } else {
                1e-3
            };
            let err = reversibility_check(kind, &f, &params, &Potential::Zero, &nl, tau, 20)
                .unwrap();
            assert!(err <= 1e-9, "{kind:?} round trip {err:.3e}");
        }
        let err =
            reversibility_check(SchemeKind::Tssp, &f, &params, &Potential::Zero, &nl, 1e-3, 0)
                .unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn csv_report_shape() {
        let mut rep = ConservationReport::default();
        rep.push(ReportRow {
            t: 0.0,
            mass: 4.0,
            energy: 14.0 / 3.0,
            relaxed_energy: Some(1.0),
            mass1: None,
            mass2: None,
        });
        rep.push(ReportRow {
            t: 0.1,
            mass: 4.0 + 4e-12,
            energy: 14.0 / 3.0,
            relaxed_energy: Some(1.0 + 1e-11),
            mass1: None,
            mass2: None,
        });
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,mass,energy,relaxed_energy,mass1,mass2,mass_drift,energy_drift,relaxed_energy_drift"
        );
        assert_eq!(lines.count(), 2);
        assert!((rep.mass_drift() - 1e-12).abs() < 1e-14);
        assert!(rep.energy_drift() == 0.0);
        assert!((rep.relaxed_energy_drift() - 1e-11).abs() < 1e-13);
    }
}
