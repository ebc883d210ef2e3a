//! Analytic reference solutions: the bright soliton of the focusing cubic
//! 1D NLSE and the plane-wave dispersion relation.

use crate::model::Nonlinearity;
use crate::{Cplx, NlseError, Result};

/// Bright soliton of the 1D focusing cubic NLSE (epsilon = 1, beta < 0):
///
/// psi_B(t,x) = A/sqrt(-beta) * sech(A(x - v t - x0))
///              * exp(i(v x - (v^2 - A^2) t / 2 + theta0))
pub fn bright_soliton(
    t: f64,
    x: f64,
    amp: f64,
    vel: f64,
    x0: f64,
    theta0: f64,
    beta: f64,
) -> Result<Cplx> {
    if beta >= 0.0 {
        return Err(NlseError::InvalidParameter(format!(
            "bright soliton requires beta < 0, got {beta}"
        )));
    }
    let arg = amp * (x - vel * t - x0);
    let sech = 1.0 / arg.cosh();
    let phase = vel * x - 0.5 * (vel * vel - amp * amp) * t + theta0;
    Ok(amp / (-beta).sqrt() * sech * Cplx::new(phase.cos(), phase.sin()))
}

/// Continuum mass of the bright soliton, N = -2A/beta.
pub fn soliton_mass(amp: f64, beta: f64) -> Result<f64> {
    if beta >= 0.0 {
        return Err(NlseError::InvalidParameter(format!(
            "bright soliton requires beta < 0, got {beta}"
        )));
    }
    Ok(-2.0 * amp / beta)
}

/// Continuum energy of the bright soliton,
/// E = A v^2/(-beta) + A^3/(3 beta), obtained by integrating
/// (1/2)|psi'|^2 + F(|psi|^2) exactly: the envelope's kinetic part
/// A^3/(3(-beta)) is outweighed by the interaction term -2A^3/(3(-beta)).
pub fn soliton_energy(amp: f64, vel: f64, beta: f64) -> Result<f64> {
    if beta >= 0.0 {
        return Err(NlseError::InvalidParameter(format!(
            "bright soliton requires beta < 0, got {beta}"
        )));
    }
    Ok(amp * vel * vel / (-beta) + amp.powi(3) / (3.0 * beta))
}

/// Plane-wave dispersion relation: omega = eps |k|^2 / 2 + f(|A|^2) / eps.
pub fn dispersion_omega(epsilon: f64, nl: &Nonlinearity, amp: f64, k: &[f64]) -> Result<f64> {
    if epsilon <= 0.0 {
        return Err(NlseError::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let k2: f64 = k.iter().map(|ki| ki * ki).sum();
    Ok(epsilon * k2 / 2.0 + nl.f(amp * amp) / epsilon)
}

/// The plane wave A exp(i(k.x - omega t)).
pub fn plane_wave(t: f64, x: &[f64], amp: f64, k: &[f64], omega: f64) -> Cplx {
    let phase = k.iter().zip(x.iter()).map(|(ki, xi)| ki * xi).sum::<f64>() - omega * t;
    amp * Cplx::new(phase.cos(), phase.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soliton_peak_at_origin() {
        let v = bright_soliton(0.0, 0.0, 2.0, 1.0, 0.0, 0.0, -1.0).unwrap();
        assert!((v - Cplx::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn soliton_invariants() {
        assert_eq!(soliton_mass(2.0, -1.0).unwrap(), 4.0);
        // A v^2 - A^3/3 = 2 - 8/3; cross-checked by fine-grid quadrature of
        // the energy functional in the diagnostics tests
        assert!((soliton_energy(2.0, 1.0, -1.0).unwrap() + 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn nonnegative_beta_rejected() {
        assert!(bright_soliton(0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(soliton_mass(2.0, 1.0).is_err());
    }

    #[test]
    fn dispersion_examples() {
        let cubic = Nonlinearity::Cubic { beta: 3.0 };
        assert_eq!(dispersion_omega(1.0, &cubic, 1.0, &[0.0]).unwrap(), 3.0);
        let free = Nonlinearity::none();
        assert_eq!(dispersion_omega(1.0, &free, 1.0, &[2.0]).unwrap(), 2.0);
        let cubic1 = Nonlinearity::Cubic { beta: 1.0 };
        assert!((dispersion_omega(0.5, &cubic1, 1.0, &[1.0]).unwrap() - 2.25).abs() < 1e-15);
    }

    /// Central finite differences of the soliton satisfy the 1D NLSE
    /// residual at second order.
    #[test]
    fn soliton_satisfies_nlse_at_second_order() {
        let beta = -1.0;
        let (amp, vel) = (2.0, 1.0);
        let psi = |t: f64, x: f64| bright_soliton(t, x, amp, vel, 0.0, 0.0, beta).unwrap();
        let residual = |d: f64| {
            let pts = [(0.3, 0.1), (0.7, -0.5), (1.1, 0.9)];
            let mut worst: f64 = 0.0;
            for &(t, x) in &pts {
                let dt = (psi(t + d, x) - psi(t - d, x)) / (2.0 * d);
                let dxx = (psi(t, x + d) - 2.0 * psi(t, x) + psi(t, x - d)) / (d * d);
                let p = psi(t, x);
                let r = Cplx::new(0.0, 1.0) * dt + 0.5 * dxx - beta * p.norm_sqr() * p;
                worst = worst.max(r.norm());
            }
            worst
        };
        let (r1, r2) = (residual(1e-3), residual(5e-4));
        let order = (r1 / r2).log2();
        assert!((order - 2.0).abs() < 0.2, "observed order {order}");
    }

    /// The plane wave with omega from the dispersion relation solves the
    /// NLSE analytically: residual below 1e-10.
    #[test]
    fn plane_wave_residual_vanishes() {
        let eps = 0.5;
        let nl = Nonlinearity::Cubic { beta: 2.0 };
        let (amp, k) = (1.3, 1.7);
        let omega = dispersion_omega(eps, &nl, amp, &[k]).unwrap();
        // analytic derivatives: d_t -> -i omega, d_xx -> -k^2
        for (t, x) in [(0.0, 0.0), (0.4, 1.2), (2.0, -3.0)] {
            let p = plane_wave(t, &[x], amp, &[k], omega);
            let i = Cplx::new(0.0, 1.0);
            let lhs = i * eps * (-i * omega * p);
            let rhs = -0.5 * eps * eps * (-(k * k) * p) + nl.f(amp * amp) * p;
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}
