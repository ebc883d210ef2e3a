//! Spatial operators shared by the finite-difference steppers: the
//! second-difference Laplacian under the three boundary conditions, and
//! Crank-Nicolson-type tridiagonal operators over the unknown vector.
//!
//! Unknown-vector layout per boundary condition:
//! * Dirichlet: interior nodes 1..J-1 (endpoints pinned to zero),
//! * Neumann: all J+1 nodes, ghost-reflection doubling the off-diagonals
//!   at the ends,
//! * periodic: nodes 0..J-1 with cyclic wrap handled by Sherman-Morrison.

use crate::linsolve::{cyclic_solve, thomas_solve, Tridiag};
use crate::model::{Axis, BoundaryKind, Grid};
use crate::{Cplx, Result};

/// Number of unknowns for one axis.
pub fn num_unknowns(axis: &Axis) -> usize {
    match axis.bc {
        BoundaryKind::Dirichlet => axis.j - 1,
        BoundaryKind::Neumann => axis.j + 1,
        BoundaryKind::Periodic => axis.j,
    }
}

/// Extract the unknown vector from full nodal values (1D).
pub fn gather(axis: &Axis, v: &[Cplx]) -> Vec<Cplx> {
    match axis.bc {
        BoundaryKind::Dirichlet => v[1..axis.j].to_vec(),
        _ => v.to_vec(),
    }
}

/// Rebuild full nodal values from the unknown vector (1D).
pub fn scatter(axis: &Axis, u: Vec<Cplx>) -> Vec<Cplx> {
    match axis.bc {
        BoundaryKind::Dirichlet => {
            let mut v = vec![Cplx::new(0.0, 0.0); axis.j + 1];
            v[1..axis.j].copy_from_slice(&u);
            v
        }
        _ => u,
    }
}

/// Second-difference Laplacian on full nodal values along one axis (1D).
pub fn laplacian_1d(axis: &Axis, v: &[Cplx]) -> Vec<Cplx> {
    let j = axis.j;
    let inv_h2 = 1.0 / (axis.h * axis.h);
    let mut out = vec![Cplx::new(0.0, 0.0); v.len()];
    match axis.bc {
        BoundaryKind::Dirichlet => {
            for k in 1..j {
                out[k] = (v[k - 1] - 2.0 * v[k] + v[k + 1]) * inv_h2;
            }
        }
        BoundaryKind::Neumann => {
            out[0] = (v[1] - v[0]) * (2.0 * inv_h2);
            for k in 1..j {
                out[k] = (v[k - 1] - 2.0 * v[k] + v[k + 1]) * inv_h2;
            }
            out[j] = (v[j - 1] - v[j]) * (2.0 * inv_h2);
        }
        BoundaryKind::Periodic => {
            for k in 0..j {
                let left = v[(k + j - 1) % j];
                let right = v[(k + 1) % j];
                out[k] = (left - 2.0 * v[k] + right) * inv_h2;
            }
        }
    }
    out
}

/// Laplacian on a 1D or 2D grid (sum of per-axis second differences).
pub fn laplacian(grid: &Grid, v: &[Cplx]) -> Vec<Cplx> {
    match grid.dim() {
        1 => laplacian_1d(grid.axis(0), v),
        2 => {
            let (ax, ay) = (grid.axis(0), grid.axis(1));
            let (nx, ny) = (ax.num_nodes(), ay.num_nodes());
            let mut out = vec![Cplx::new(0.0, 0.0); v.len()];
            for ix in 0..nx {
                let row = laplacian_1d(ay, &v[ix * ny..(ix + 1) * ny]);
                out[ix * ny..(ix + 1) * ny].copy_from_slice(&row);
            }
            let mut col = vec![Cplx::new(0.0, 0.0); nx];
            for iy in 0..ny {
                for ix in 0..nx {
                    col[ix] = v[ix * ny + iy];
                }
                let lx = laplacian_1d(ax, &col);
                for ix in 0..nx {
                    out[ix * ny + iy] += lx[ix];
                }
            }
            out
        }
        _ => unreachable!(),
    }
}

/// One-axis operator shift*I + c2*D2 + diag(extra) over the unknown vector.
/// `extra` is indexed like the unknowns; pass an empty slice for none.
pub struct Operator1d {
    tri: Tridiag,
    corners: Option<(Cplx, Cplx)>,
}

impl Operator1d {
    pub fn new(axis: &Axis, shift: Cplx, c2: Cplx, extra: &[Cplx]) -> Self {
        let n = num_unknowns(axis);
        assert!(extra.is_empty() || extra.len() == n);
        let inv_h2 = 1.0 / (axis.h * axis.h);
        let off = c2 * inv_h2;
        let mut tri = Tridiag::zeros(n);
        for i in 0..n {
            tri.diag[i] = shift - 2.0 * off;
            if !extra.is_empty() {
                tri.diag[i] += extra[i];
            }
        }
        for i in 0..n - 1 {
            tri.lower[i] = off;
            tri.upper[i] = off;
        }
        let corners = match axis.bc {
            BoundaryKind::Dirichlet => None,
            BoundaryKind::Neumann => {
                tri.upper[0] = 2.0 * off;
                tri.lower[n - 2] = 2.0 * off;
                None
            }
            BoundaryKind::Periodic => Some((off, off)),
        };
        Operator1d { tri, corners }
    }

    pub fn apply(&self, u: &[Cplx]) -> Vec<Cplx> {
        let mut y = self.tri.apply(u);
        if let Some((tr, bl)) = self.corners {
            let n = u.len();
            y[0] += tr * u[n - 1];
            y[n - 1] += bl * u[0];
        }
        y
    }

    pub fn solve(&self, rhs: &[Cplx]) -> Result<Vec<Cplx>> {
        match self.corners {
            None => thomas_solve(&self.tri, rhs),
            Some((tr, bl)) => cyclic_solve(&self.tri, tr, bl, rhs),
        }
    }
}
