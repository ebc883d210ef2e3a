use std::sync::Arc;

use crate::{NlseError, Result};

/// Nonlinearity f(rho) together with its primitive F and the difference
/// quotient G used by the Crank-Nicolson scheme.
#[derive(Clone)]
pub enum Nonlinearity {
    /// f(rho) = beta * rho
    Cubic { beta: f64 },
    /// f(rho) = beta1 * rho + beta2 * rho^2
    CubicQuintic { beta1: f64, beta2: f64 },
    /// f(rho) = beta0 * rho / (1 + c0 * rho)
    Saturating { beta0: f64, c0: f64 },
    /// User-supplied f; F is computed by adaptive quadrature.
    Custom { f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl std::fmt::Debug for Nonlinearity {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Cubic { beta } => write!(fm, "Cubic(beta={beta})"),
            Self::CubicQuintic { beta1, beta2 } => {
                write!(fm, "CubicQuintic(beta1={beta1}, beta2={beta2})")
            }
            Self::Saturating { beta0, c0 } => {
                write!(fm, "Saturating(beta0={beta0}, c0={c0})")
            }
            Self::Custom { .. } => write!(fm, "Custom"),
        }
    }
}

impl Nonlinearity {
    /// The linear Schrodinger case, f == 0.
    pub fn none() -> Self {
        Self::Cubic { beta: 0.0 }
    }

    pub fn f(&self, rho: f64) -> f64 {
        match self {
            Self::Cubic { beta } => beta * rho,
            Self::CubicQuintic { beta1, beta2 } => beta1 * rho + beta2 * rho * rho,
            Self::Saturating { beta0, c0 } => beta0 * rho / (1.0 + c0 * rho),
            Self::Custom { f } => f(rho),
        }
    }

    /// Primitive F(rho) = integral of f over [0, rho], F(0) = 0.
    pub fn big_f(&self, rho: f64) -> f64 {
        match self {
            Self::Cubic { beta } => 0.5 * beta * rho * rho,
            Self::CubicQuintic { beta1, beta2 } => {
                0.5 * beta1 * rho * rho + beta2 * rho * rho * rho / 3.0
            }
            Self::Saturating { beta0, c0 } => {
                if *c0 == 0.0 {
                    0.5 * beta0 * rho * rho
                } else {
                    // F = (beta0/c0) rho - (beta0/c0^2) ln(1 + c0 rho)
                    beta0 / c0 * rho - beta0 / (c0 * c0) * (c0 * rho).ln_1p()
                }
            }
            Self::Custom { f } => adaptive_simpson(f.as_ref(), 0.0, rho, 1e-12),
        }
    }

    /// Difference quotient G(rho1, rho2) = (F(rho1) - F(rho2)) / (rho1 - rho2).
    ///
    /// Near the diagonal the quotient cancels catastrophically, so for
    /// |rho1 - rho2| <= 1e-12 * max(1, rho1, rho2) the midpoint value
    /// f((rho1 + rho2) / 2) is returned instead.
    pub fn g(&self, rho1: f64, rho2: f64) -> Result<f64> {
        if rho1 < 0.0 {
            return Err(NlseError::NegativeDensity(rho1));
        }
        if rho2 < 0.0 {
            return Err(NlseError::NegativeDensity(rho2));
        }
        Ok(self.g_unchecked(rho1, rho2))
    }

    /// `g` without the sign check; used in stepping loops where densities
    /// come from |psi|^2 and cannot be negative.
    pub fn g_unchecked(&self, rho1: f64, rho2: f64) -> f64 {
        let thresh = 1e-12 * rho1.max(rho2).max(1.0);
        if (rho1 - rho2).abs() <= thresh {
            return self.f(0.5 * (rho1 + rho2));
        }
        match self {
            // Closed forms avoid the subtraction entirely.
            Self::Cubic { beta } => 0.5 * beta * (rho1 + rho2),
            Self::CubicQuintic { beta1, beta2 } => {
                0.5 * beta1 * (rho1 + rho2)
                    + beta2 * (rho1 * rho1 + rho1 * rho2 + rho2 * rho2) / 3.0
            }
            _ => (self.big_f(rho1) - self.big_f(rho2)) / (rho1 - rho2),
        }
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64 , a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    fn simpson(f: &dyn Fn(f64) -> f64 , a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64 ,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_difference_quotient() {
        // (F(2) - F(0)) / 2 = (beta*4/2) / 2 = 1 for beta = 1
        let nl = Nonlinearity::Cubic { beta: 1.0 };
        assert!((nl.g(2.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quintic_part_quotient() {
        // f = rho^2 => F = rho^3/3, G(1,0) = 1/3
        let nl = Nonlinearity::CubicQuintic { beta1: 0.0, beta2: 1.0 };
        assert!((nl.g(1.0, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_limit_equals_f() {
        let nls = [
            Nonlinearity::Cubic { beta: -1.0 },
            Nonlinearity::CubicQuintic { beta1: 2.0, beta2: 0.3 },
            Nonlinearity::Saturating { beta0: 1.5, c0: 0.7 },
        ];
        for nl in &nls {
            // log-spaced sample over [0, 1e4]
            for k in 0..40 {
                let rho = if k == 0 { 0.0 } else { 1e-4 * 10f64.powf(8.0 * k as f64 / 39.0) };
                let rho = rho.min(1e4);
                assert!(
                    (nl.g(rho, rho).unwrap() - nl.f(rho)).abs() <= 1e-12 * nl.f(rho).abs().max(1.0),
                    "{nl:?} at rho={rho}"
                );
            }
        }
    }

    #[test]
    fn g_is_symmetric() {
        let nl = Nonlinearity::Saturating { beta0: 2.0, c0: 0.5 };
        for (r1, r2) in [(0.1, 3.0), (2.0, 2.5), (0.0, 7.0)] {
            assert!((nl.g(r1, r2).unwrap() - nl.g(r2, r1).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_density_rejected() {
        let nl = Nonlinearity::Cubic { beta: 1.0 };
        assert!(nl.g(-1.0, 0.0).is_err());
        assert!(nl.g(0.0, -1e-30).is_err());
    }

    #[test]
    fn custom_f_quadrature_matches_analytic_primitive() {
        // custom copy of the cubic-quintic law; F must match the analytic form
        let nl = Nonlinearity::Custom { f: Arc::new(|rho| 2.0 * rho + 0.3 * rho * rho) };
        let reference = Nonlinearity::CubicQuintic { beta1: 2.0, beta2: 0.3 };
        for rho in [0.0, 0.5, 1.0, 4.0, 100.0] {
            assert!(
                (nl.big_f(rho) - reference.big_f(rho)).abs()
                    <= 1e-10 * reference.big_f(rho).abs().max(1.0)
            );
        }
        // G through the quadrature route agrees with the closed form
        assert!((nl.g(1.0, 0.25).unwrap() - reference.g(1.0, 0.25).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn saturating_primitive_is_consistent_with_f() {
        // F'(rho) = f(rho) checked by central differences
        let nl = Nonlinearity::Saturating { beta0: 1.3, c0: 0.9 };
        for rho in [0.2, 1.0, 5.0] {
            let d = 1e-6;
            let deriv = (nl.big_f(rho + d) - nl.big_f(rho - d)) / (2.0 * d);
            assert!((deriv - nl.f(rho)).abs() < 1e-8);
        }
    }
}
