//! Discrete sine, cosine and Fourier transforms matched to the three
//! boundary-condition variants, plus wavenumber-space kinetic propagators.
//!
//! Normalization follows the sine-pseudospectral convention: the forward
//! sine transform carries the 2/J factor and the inverse is a plain basis
//! sum, so coefficient values in tests match the analysis formulas with no
//! hidden factors. Sine/cosine transforms are executed through a complex
//! FFT of length 2J on the odd/even extension.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::model::{Axis, BoundaryKind};
use crate::{Cplx, NlseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Sine,
    Cosine,
    Fourier,
}

impl Basis {
    pub fn for_bc(bc: BoundaryKind) -> Self {
        match bc {
            BoundaryKind::Dirichlet => Basis::Sine,
            BoundaryKind::Neumann => Basis::Cosine,
            BoundaryKind::Periodic => Basis::Fourier,
        }
    }
}

/// Planned transform for one grid axis. Plans are immutable and reusable;
/// executions allocate their own scratch so concurrent use is safe.
pub struct SpectralPlan {
    pub basis: Basis,
    j: usize,
    num_nodes: usize,
    mu: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl SpectralPlan {
    pub fn new(axis: &Axis) -> Self {
        let basis = Basis::for_bc(axis.bc);
        let j = axis.j;
        let mut planner = FftPlanner::new();
        let n = match basis {
            Basis::Fourier => j,
            _ => 2 * j,
        };
        SpectralPlan {
            basis,
            j,
            num_nodes: axis.num_nodes(),
            mu: axis.wavenumbers(),
            fft: planner.plan_fft_forward(n),
            fft_inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_coeffs(&self) -> usize {
        self.mu.len()
    }

    /// Wavenumbers indexed like the coefficient array.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Forward transform of nodal values to basis coefficients.
    ///
    /// For the sine basis the endpoints must vanish (up to roundoff of the
    /// field magnitude); nonzero endpoints signal an upstream boundary-
    /// condition violation and are rejected.
    pub fn forward(&self, v: &[Cplx]) -> Result<Vec<Cplx>> {
        assert_eq!(v.len(), self.num_nodes);
        let j = self.j;
        match self.basis {
            Basis::Sine => {
                let scale = v.iter().map(|z| z.norm()).fold(1.0, f64::max);
                if v[0].norm() > 1e-14 * scale || v[j].norm() > 1e-14 * scale {
                    return Err(NlseError::BoundaryViolation(format!(
                        "sine transform input has nonzero endpoints ({:.3e}, {:.3e})",
                        v[0].norm(),
                        v[j].norm()
                    )));
                }
                let mut w = vec![Cplx::new(0.0, 0.0); 2 * j];
                for k in 1..j {
                    w[k] = v[k];
                    w[2 * j - k] = -v[k];
                }
                self.fft.process(&mut w);
                // sum_j v_j sin(pi j l / J) = (i/2) W_l; forward carries 2/J
                let c = Cplx::new(0.0, 1.0 / j as f64);
                Ok((1..j).map(|l| c * w[l]).collect())
            }
            Basis::Cosine => {
                let mut w = vec![Cplx::new(0.0, 0.0); 2 * j];
                w[..=j].copy_from_slice(&v[..=j]);
                for k in 1..j {
                    w[2 * j - k] = v[k];
                }
                self.fft.process(&mut w);
                let c = 1.0 / j as f64;
                Ok((0..=j).map(|l| c * w[l]).collect())
            }
            Basis::Fourier => {
                let mut w = v.to_vec();
                self.fft.process(&mut w);
                let c = 1.0 / j as f64;
                for z in &mut w {
                    *z *= c;
                }
                Ok(w)
            }
        }
    }

    /// Basis synthesis of coefficients back to nodal values.
    pub fn inverse(&self, coeffs: &[Cplx]) -> Vec<Cplx> {
        assert_eq!(coeffs.len(), self.num_coeffs());
        let j = self.j;
        match self.basis {
            Basis::Sine => {
                let mut w = vec![Cplx::new(0.0, 0.0); 2 * j];
                for l in 1..j {
                    w[l] = coeffs[l - 1];
                    w[2 * j - l] = -coeffs[l - 1];
                }
                self.fft.process(&mut w);
                let c = Cplx::new(0.0, 0.5);
                let mut v = vec![Cplx::new(0.0, 0.0); j + 1];
                for k in 1..j {
                    v[k] = c * w[k];
                }
                v
            }
            Basis::Cosine => {
                let mut w = vec![Cplx::new(0.0, 0.0); 2 * j];
                w[..=j].copy_from_slice(coeffs);
                for l in 1..j {
                    w[2 * j - l] = coeffs[l];
                }
                self.fft.process(&mut w);
                (0..=j).map(|k| 0.5 * w[k]).collect()
            }
            Basis::Fourier => {
                let mut w = coeffs.to_vec();
                self.fft_inv.process(&mut w);
                w
            }
        }
    }

    /// Forward transform, pointwise multiply in coefficient space, inverse.
    pub fn apply_multiplier(&self, v: &mut [Cplx], m: &[Cplx]) -> Result<()> {
        let mut c = self.forward(v)?;
        for (ci, mi) in c.iter_mut().zip(m.iter()) {
            *ci *= mi;
        }
        v.copy_from_slice(&self.inverse(&c));
        Ok(())
    }
}

/// Diagonal free-flight multiplier exp(-i tau eps mu_l^2 / 2) in the plan's
/// basis. Negative tau runs the propagation backward.
pub fn kinetic_phase(plan: &SpectralPlan, tau: f64, epsilon: f64) -> Vec<Cplx> {
    plan.mu()
        .iter()
        .map(|&mu| {
            let phase = -tau * epsilon * mu * mu / 2.0;
            Cplx::new(phase.cos(), phase.sin())
        })
        .collect()
}

/// Apply a spectral multiplier along one axis of a row-major 2D array
/// (x slow, y contiguous).
pub fn apply_multiplier_axis(
    values: &mut [Cplx],
    shape: (usize, usize),
    axis: usize,
    plan: &SpectralPlan,
    m: &[Cplx],
) -> Result<()> {
    let (nx, ny) = shape;
    assert_eq!(values.len(), nx * ny);
    match axis {
        1 => {
            use rayon::prelude::*;
            values
                .par_chunks_mut(ny)
                .try_for_each(|row| plan.apply_multiplier(row, m))?;
        }
        0 => {
            use rayon::prelude::*;
            let cols: Vec<Result<Vec<Cplx>>> = (0..ny)
                .into_par_iter()
                .map(|iy| {
                    let mut col: Vec<Cplx> =
                        (0..nx).map(|ix| values[ix * ny + iy]).collect();
                    plan.apply_multiplier(&mut col, m)?;
                    Ok(col)
                })
                .collect();
            for (iy, col) in cols.into_iter().enumerate() {
                let col = col?;
                for ix in 0..nx {
                    values[ix * ny + iy] = col[ix];
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Grid;
    use std::f64::consts::PI;

    fn sine_axis(j: usize) -> Axis {
        Grid::build_1d(0.0, 1.0, j, BoundaryKind::Dirichlet).unwrap().axis(0).clone()
    }

    /// Brute-force forward sums for all three bases.
    fn brute_forward(basis: Basis, j: usize, v: &[Cplx]) -> Vec<Cplx> {
        match basis {
            Basis::Sine => (1..j)
                .map(|l| {
                    (1..j)
                        .map(|k| v[k] * (PI * (l * k) as f64 / j as f64).sin())
                        .sum::<Cplx>()
                        * (2.0 / j as f64)
                })
                .collect(),
            Basis::Cosine => (0..=j)
                .map(|l| {
                    let mut s = 0.5 * (v[0] + v[j] * (-1f64).powi(l as i32));
                    for k in 1..j {
                        s += v[k] * (PI * (l * k) as f64 / j as f64).cos();
                    }
                    s * (2.0 / j as f64)
                })
                .collect(),
            Basis::Fourier => (0..j)
                .map(|l| {
                    (0..j)
                        .map(|k| {
                            let ph = -2.0 * PI * (l * k) as f64 / j as f64;
                            v[k] * Cplx::new(ph.cos(), ph.sin())
                        })
                        .sum::<Cplx>()
                        * (1.0 / j as f64)
                })
                .collect(),
        }
    }

    fn pseudo_random(n: usize, seed: u64) -> Vec<Cplx> {
        // splitmix64-driven deterministic values in [-1, 1]
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = s;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z = z ^ (z >> 31);
            (z as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        (0..n).map(|_| Cplx::new(next(), next())).collect()
    }

    #[test]
    fn sine_single_mode_is_unit_coefficient() {
        let j = 8;
        let plan = SpectralPlan::new(&sine_axis(j));
        let v: Vec<Cplx> = (0..=j)
            .map(|k| Cplx::new((PI * k as f64 / j as f64).sin(), 0.0))
            .collect();
        let c = plan.forward(&v).unwrap();
        assert!((c[0] - Cplx::new(1.0, 0.0)).norm() < 1e-14);
        for l in 1..c.len() {
            assert!(c[l].norm() < 1e-14);
        }
    }

    #[test]
    fn sine_zero_maps_to_zero() {
        let plan = SpectralPlan::new(&sine_axis(8));
        let c = plan.forward(&vec![Cplx::new(0.0, 0.0); 9]).unwrap();
        assert!(c.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn forward_matches_brute_force_all_bases() {
        let j = 16;
        for bc in [BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Periodic] {
            let g = Grid::build_1d(-2.0, 3.0, j, bc).unwrap();
            let plan = SpectralPlan::new(g.axis(0));
            let mut v = pseudo_random(plan.num_nodes(), 42);
            if bc == BoundaryKind::Dirichlet {
                v[0] = Cplx::new(0.0, 0.0);
                v[j] = Cplx::new(0.0, 0.0);
            }
            let fast = plan.forward(&v).unwrap();
            let slow = brute_forward(plan.basis, j, &v);
            for (a, b) in fast.iter().zip(slow.iter()) {
                assert!((a - b).norm() < 1e-13, "{bc:?}");
            }
        }
    }

    #[test]
    fn round_trip_all_bases_many_sizes() {
        for j in [8, 64, 1024] {
            for bc in [BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Periodic] {
                let g = Grid::build_1d(-1.0, 4.0, j, bc).unwrap();
                let plan = SpectralPlan::new(g.axis(0));
                let mut v = pseudo_random(plan.num_nodes(), j as u64);
                if bc == BoundaryKind::Dirichlet {
                    v[0] = Cplx::new(0.0, 0.0);
                    v[j] = Cplx::new(0.0, 0.0);
                }
                let back = plan.inverse(&plan.forward(&v).unwrap());
                let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
                for (a, b) in back.iter().zip(v.iter()) {
                    assert!((a - b).norm() <= 1e-13 * scale, "J={j} {bc:?}");
                }
            }
        }
    }

    #[test]
    fn sine_nonzero_endpoint_rejected() {
        let plan = SpectralPlan::new(&sine_axis(8));
        let mut v = vec![Cplx::new(0.0, 0.0); 9];
        v[0] = Cplx::new(1e-10, 0.0);
        assert!(plan.forward(&v).is_err());
    }

    #[test]
    fn sine_parseval() {
        let j = 16;
        let plan = SpectralPlan::new(&sine_axis(j));
        let mut v = pseudo_random(j + 1, 7);
        v[0] = Cplx::new(0.0, 0.0);
        v[j] = Cplx::new(0.0, 0.0);
        let c = plan.forward(&v).unwrap();
        let nodal: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * 2.0 / j as f64;
        let spectral: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert!((nodal - spectral).abs() < 1e-12);
    }

    #[test]
    fn kinetic_phase_properties() {
        let plan = SpectralPlan::new(&sine_axis(16));
        let m0 = kinetic_phase(&plan, 0.0, 1.0);
        assert!(m0.iter().all(|z| (z - Cplx::new(1.0, 0.0)).norm() == 0.0));
        let mf = kinetic_phase(&plan, 0.3, 0.5);
        let mb = kinetic_phase(&plan, -0.3, 0.5);
        for (f, b) in mf.iter().zip(mb.iter()) {
            assert!((f.conj() - b).norm() < 1e-16);
            assert!((f.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn free_propagation_conserves_l2() {
        let j = 64;
        let plan = SpectralPlan::new(&sine_axis(j));
        let mut v = pseudo_random(j + 1, 3);
        v[0] = Cplx::new(0.0, 0.0);
        v[j] = Cplx::new(0.0, 0.0);
        let before: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let m = kinetic_phase(&plan, 0.05, 1.0);
        plan.apply_multiplier(&mut v, &m).unwrap();
        let after: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((before - after).abs() <= 1e-13 * before);
    }
}
