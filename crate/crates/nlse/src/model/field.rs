use std::sync::Arc;

use crate::model::{BoundaryKind, Grid};
use crate::{Cplx, NlseError, Result};

/// Complex nodal values of the wave function on a grid, with the current
/// time attached. 2D values are row-major with x the slow index.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: Arc<Grid>,
    pub values: Vec<Cplx>,
    pub t: f64,
}

impl WaveField {
    pub fn new(grid: Arc<Grid>, values: Vec<Cplx>, t: f64) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(NlseError::GridMismatch(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        Ok(Self { grid, values, t })
    }

    /// Sample a function of the node coordinates at time `t`.
    pub fn from_fn(grid: Arc<Grid>, t: f64, f: impl Fn(&[f64]) -> Cplx) -> Self {
        let n = grid.num_nodes();
        let mut values = Vec::with_capacity(n);
        match grid.dim() {
            1 => {
                for &x in grid.axis(0).nodes() {
                    values.push(f(&[x]));
                }
            }
            2 => {
                for &x in grid.axis(0).nodes() {
                    for &y in grid.axis(1).nodes() {
                        values.push(f(&[x, y]));
                    }
                }
            }
            _ => unreachable!(),
        }
        let mut field = Self { grid, values, t };
        field.enforce_dirichlet();
        field
    }

    /// Zero the boundary nodes on Dirichlet axes.
    pub fn enforce_dirichlet(&mut self) {
        match self.grid.dim() {
            1 => {
                let ax = self.grid.axis(0);
                if ax.bc == BoundaryKind::Dirichlet {
                    let n = self.values.len();
                    self.values[0] = Cplx::new(0.0, 0.0);
                    self.values[n - 1] = Cplx::new(0.0, 0.0);
                }
            }
            2 => {
                let (nx, ny) = (self.grid.axis(0).num_nodes(), self.grid.axis(1).num_nodes());
                if self.grid.axis(0).bc == BoundaryKind::Dirichlet {
                    for iy in 0..ny {
                        self.values[iy] = Cplx::new(0.0, 0.0);
                        self.values[(nx - 1) * ny + iy] = Cplx::new(0.0, 0.0);
                    }
                }
                if self.grid.axis(1).bc == BoundaryKind::Dirichlet {
                    for ix in 0..nx {
                        self.values[ix * ny] = Cplx::new(0.0, 0.0);
                        self.values[ix * ny + ny - 1] = Cplx::new(0.0, 0.0);
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}
