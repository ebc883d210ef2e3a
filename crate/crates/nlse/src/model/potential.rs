use crate::model::Grid;
use crate::{NlseError, Result};

/// External trapping potential V(x[, y][, t]).
#[derive(Debug, Clone)]
pub enum Potential {
    Zero,
    /// V = sum_i gamma_i^2 x_i^2 / 2.
    Harmonic { gamma: Vec<f64> },
    /// V = -|x|^2 / 2 (nonlinear optics).
    Attractive,
    /// V = sum_i A_i cos(L_i x_i).
    OpticalLattice { amp: Vec<f64>, wavenum: Vec<f64> },
    /// Nodal values on a specific grid.
    Tabulated { values: Vec<f64> },
    /// Harmonic trap whose anisotropy jumps at `t_quench` from
    /// `gamma_before` to `gamma_after`.
    HarmonicQuench {
        gamma_before: Vec<f64>,
        gamma_after: Vec<f64>,
        t_quench: f64,
    },
    /// Base potential shifted by a real constant (gauge experiments).
    Shifted { base: Box<Potential>, alpha: f64 },
}

impl Potential {
    pub fn is_time_dependent(&self) -> bool {
        match self {
            Potential::HarmonicQuench { .. } => true,
            Potential::Shifted { base, .. } => base.is_time_dependent(),
            _ => false,
        }
    }

    /// Point evaluation. Panics for `Tabulated`, which only exists as nodal
    /// samples; use [`Potential::sample`] for stepping.
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Harmonic { gamma } => {
                0.5 * x
                    .iter()
                    .zip(gamma.iter())
                    .map(|(xi, gi)| gi * gi * xi * xi)
                    .sum::<f64>()
            }
            Potential::Attractive => {
                -0.5 * x.iter().map(|xi| xi * xi).sum::<f64>()
            }
            Potential::OpticalLattice { amp, wavenum } => x
                .iter()
                .zip(amp.iter().zip(wavenum.iter()))
                .map(|(xi, (a, l))| a * (l * xi).cos())
                .sum::<f64>(),
            Potential::Tabulated { .. } => {
                panic!("tabulated potentials are nodal; use Potential::sample")
            }
            Potential::HarmonicQuench { gamma_before, gamma_after, t_quench } => {
                let gamma = if t < *t_quench { gamma_before } else { gamma_after };
                0.5 * x
                    .iter()
                    .zip(gamma.iter())
                    .map(|(xi, gi)| gi * gi * xi * xi)
                    .sum::<f64>()
            }
            Potential::Shifted { base, alpha } => base.eval(x, t) + alpha,
        }
    }

    /// Nodal samples on `grid` at time `t` (row-major in 2D).
    pub fn sample(&self, grid: &Grid, t: f64) -> Result<Vec<f64>> {
        if let Potential::Tabulated { values } = self {
            if values.len() != grid.num_nodes() {
                return Err(NlseError::GridMismatch(format!(
                    "tabulated potential has {} values, grid has {} nodes",
                    values.len(),
                    grid.num_nodes()
                )));
            }
            return Ok(values.clone());
        }
        if let Potential::Shifted { base, alpha } = self {
            let mut v = base.sample(grid, t)?;
            for vi in &mut v {
                *vi += alpha;
            }
            return Ok(v);
        }
        let n = grid.num_nodes();
        let mut out = Vec::with_capacity(n);
        match grid.dim() {
            1 => {
                for &x in grid.axis(0).nodes() {
                    out.push(self.eval(&[x], t));
                }
            }
            2 => {
                for &x in grid.axis(0).nodes() {
                    for &y in grid.axis(1).nodes() {
                        out.push(self.eval(&[x, y], t));
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }
}
