//! Algebraic kernels shared by the implicit schemes: complex tridiagonal
//! solves (plain and cyclic), a sine-spectral fast solve for constant-
//! coefficient Helmholtz-type operators, and the fixed-point driver used by
//! the nonlinearly implicit steps.

use crate::model::{BoundaryKind, Grid};
use crate::transforms::SpectralPlan;
use crate::{Cplx, NlseError, Result};

/// Complex tridiagonal matrix. `lower` and `upper` have length n-1.
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub lower: Vec<Cplx>,
    pub diag: Vec<Cplx>,
    pub upper: Vec<Cplx>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        Tridiag {
            lower: vec![Cplx::new(0.0, 0.0); n - 1],
            diag: vec![Cplx::new(0.0, 0.0); n],
            upper: vec![Cplx::new(0.0, 0.0); n - 1],
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[Cplx]) -> Vec<Cplx> {
        let n = self.n();
        assert_eq!(x.len(), n);
        let mut y = vec![Cplx::new(0.0, 0.0); n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }
}

/// Thomas algorithm. O(n), no pivoting: the CN-type operators this serves
/// are diagonally dominant, and a vanishing pivot means the parameters have
/// produced a singular step operator.
pub fn thomas_solve(m: &Tridiag, rhs: &[Cplx]) -> Result<Vec<Cplx>> {
    let n = m.n();
    assert_eq!(rhs.len(), n);
    let scale = m.diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = 1e-300_f64.max(1e-16 * scale);

    let mut c = vec![Cplx::new(0.0, 0.0); n];
    let mut d = vec![Cplx::new(0.0, 0.0); n];
    let mut pivot = m.diag[0];
    if pivot.norm() <= tiny {
        return Err(NlseError::ZeroPivot { index: 0 });
    }
    if n > 1 {
        c[0] = m.upper[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = m.diag[i] - m.lower[i - 1] * c[i - 1];
        if pivot.norm() <= tiny {
            return Err(NlseError::ZeroPivot { index: i });
        }
        if i + 1 < n {
            c[i] = m.upper[i] / pivot;
        }
        d[i] = (rhs[i] - m.lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// Solve the cyclic tridiagonal system (tridiagonal plus corner entries
/// `top_right` = A[0][n-1] and `bottom_left` = A[n-1][0]) by the
/// Sherman-Morrison rank-one update around two Thomas solves.
pub fn cyclic_solve(
    m: &Tridiag,
    top_right: Cplx,
    bottom_left: Cplx,
    rhs: &[Cplx],
) -> Result<Vec<Cplx>> {
    let n = m.n();
    assert!(n >= 3, "cyclic solve needs n >= 3");
    assert_eq!(rhs.len(), n);

    // A = T' + u v^T with u = (gamma, 0, .., bottom_left) and
    // v = (1, 0, .., top_right/gamma); T' absorbs the corner entries into
    // the first and last diagonal elements.
    let gamma = if m.diag[0].norm() > 0.0 {
        -m.diag[0]
    } else {
        Cplx::new(1.0, 0.0)
    };
    let mut t = m.clone();
    t.diag[0] -= gamma;
    let last = t.n() - 1;
    t.diag[last] -= bottom_left * top_right / gamma;

    let y = thomas_solve(&t, rhs)?;
    let mut u = vec![Cplx::new(0.0, 0.0); n];
    u[0] = gamma;
    u[n - 1] = bottom_left;
    let z = thomas_solve(&t, &u)?;

    let vy = y[0] + top_right / gamma * y[n - 1];
    let vz = z[0] + top_right / gamma * z[n - 1];
    let denom = Cplx::new(1.0, 0.0) + vz;
    if denom.norm() <= 1e-300 {
        return Err(NlseError::ZeroPivot { index: 0 });
    }
    let factor = vy / denom;
    Ok((0..n).map(|i| y[i] - factor * z[i]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMode {
    Plain,
    ModifiedNewton,
}

/// Stopping policy for the nonlinearly implicit steps. The default is
/// deliberately tight: energy conservation of the Crank-Nicolson step only
/// holds when the nonlinear system is solved essentially to machine
/// precision.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointPolicy {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: FixedPointMode,
}

impl Default for FixedPointPolicy {
    fn default() -> Self {
        FixedPointPolicy {
            tol: 1e-12,
            max_iter: 100,
            mode: FixedPointMode::Plain,
        }
    }
}

impl FixedPointPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(NlseError::InvalidParameter(format!(
                "fixed-point tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(NlseError::InvalidParameter(
                "fixed-point max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Iterate `next = iterate(current)` from `initial` until the relative
/// update sup-norm drops below `policy.tol`. Returns the converged iterate
/// and the number of applications of the map.
pub fn fixed_point_solve<F>(
    initial: &[Cplx],
    policy: &FixedPointPolicy,
    mut iterate: F,
) -> Result<(Vec<Cplx>, usize)>
where
    F: FnMut(&[Cplx]) -> Result<Vec<Cplx>>,
{
    policy.validate()?;
    let mut current = initial.to_vec();
    let mut residual = f64::INFINITY;
    for k in 1..=policy.max_iter {
        let next = iterate(&current)?;
        let scale = next.iter().map(|z| z.norm()).fold(1.0, f64::max);
        residual = current
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale;
        current = next;
        if residual <= policy.tol {
            return Ok((current, k));
        }
    }
    Err(NlseError::FixedPointDiverged {
        iterations: policy.max_iter,
        residual,
        last_iterate: current,
    })
}

/// Direct solve of (shift - kin_coeff * Laplacian_h) u = rhs on a Dirichlet
/// grid (1D or 2D) by diagonalization in the sine basis. Laplacian_h is the
/// standard second-difference operator, whose sine-mode eigenvalues are
/// -(4/h^2) sin^2(l pi / 2J). rhs and the solution live on the full node
/// set with zero endpoints.
pub fn fast_poisson_dst(
    grid: &Grid,
    shift: Cplx,
    kin_coeff: f64,
    rhs: &[Cplx],
) -> Result<Vec<Cplx>> {
    for ax in 0..grid.dim() {
        if grid.axis(ax).bc != BoundaryKind::Dirichlet {
            return Err(NlseError::InvalidGrid(
                "fast sine solve requires Dirichlet boundaries".into(),
            ));
        }
    }
    assert_eq!(rhs.len(), grid.num_nodes());

    let eig = |axind: usize| -> Vec<f64> {
        let ax = grid.axis(axind);
        let j = ax.j;
        (1..j)
            .map(|l| {
                let s = (std::f64::consts::PI * l as f64 / (2.0 * j as f64)).sin();
                4.0 / (ax.h * ax.h) * s * s
            })
            .collect()
    };

    match grid.dim() {
        1 => {
            let plan = SpectralPlan::new(grid.axis(0));
            let mut c = plan.forward(rhs)?;
            let lam = eig(0);
            for (l, cl) in c.iter_mut().enumerate() {
                let denom = shift + kin_coeff * lam[l];
                if denom.norm() <= 1e-14 * (shift.norm() + kin_coeff * lam[l]).max(1e-300) {
                    return Err(NlseError::ResonantShift((l + 1, 0)));
                }
                *cl /= denom;
            }
            Ok(plan.inverse(&c))
        }
        2 => {
            let (px, py) = (
                SpectralPlan::new(grid.axis(0)),
                SpectralPlan::new(grid.axis(1)),
            );
            let (nx, ny) = (px.num_nodes(), py.num_nodes());
            let (cx, cy) = (px.num_coeffs(), py.num_coeffs());
            // forward along y (contiguous rows), then along x
            let mut rows: Vec<Vec<Cplx>> = Vec::with_capacity(nx);
            for ix in 0..nx {
                rows.push(px_row_forward(&py, &rhs[ix * ny..(ix + 1) * ny])?);
            }
            let mut coeffs = vec![Cplx::new(0.0, 0.0); cx * cy];
            let (lx, ly) = (eig(0), eig(1));
            for l in 0..cy {
                let col: Vec<Cplx> = (0..nx).map(|ix| rows[ix][l]).collect();
                let chat = px.forward(&col)?;
                for k in 0..cx {
                    let denom = shift + kin_coeff * (lx[k] + ly[l]);
                    let mag = (shift.norm() + kin_coeff * (lx[k] + ly[l])).max(1e-300);
                    if denom.norm() <= 1e-14 * mag {
                        return Err(NlseError::ResonantShift((k + 1, l + 1)));
                    }
                    coeffs[k * cy + l] = chat[k] / denom;
                }
            }
            // inverse along x, then along y
            let mut out = vec![Cplx::new(0.0, 0.0); nx * ny];
            let mut mid = vec![vec![Cplx::new(0.0, 0.0); cy]; nx];
            for l in 0..cy {
                let col: Vec<Cplx> = (0..cx).map(|k| coeffs[k * cy + l]).collect();
                let v = px.inverse(&col);
                for ix in 0..nx {
                    mid[ix][l] = v[ix];
                }
            }
            for ix in 0..nx {
                out[ix * ny..(ix + 1) * ny].copy_from_slice(&py.inverse(&mid[ix]));
            }
            Ok(out)
        }
        d => Err(NlseError::InvalidGrid(format!(
            "fast sine solve supports 1D/2D, got {d}D"
        ))),
    }
}

fn px_row_forward(plan: &SpectralPlan, row: &[Cplx]) -> Result<Vec<Cplx>> {
    plan.forward(row)
}
