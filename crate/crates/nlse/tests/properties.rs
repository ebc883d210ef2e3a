//! Randomized invariant checks: transform round trips, structural scheme
//! invariants on arbitrary smooth data, and serialization round trips.

use std::sync::Arc;

use num_complex::Complex64 as Cplx;
use proptest::prelude::*;

use nlse::diagnostics::discrete_mass;
use nlse::harness::{read_snapshot, write_snapshot, RunConfig, SnapshotMeta};
use nlse::model::{BoundaryKind, Grid, ModelParams, Nonlinearity, Potential, WaveField};
use nlse::schemes::{step, SchemeKind, SchemeState};
use nlse::transforms::SpectralPlan;

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Cplx>> {
    proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| Cplx::new(re, im)).collect())
}

/// A smooth random field: a handful of low Fourier modes with bounded
/// coefficients, so the schemes see well-resolved data.
fn smooth_field(
    grid: Arc<Grid>,
    coeffs: &[(f64, f64)],
) -> WaveField {
    let ax = grid.axis(0).clone();
    let len = ax.b - ax.a;
    let coeffs = coeffs.to_vec();
    WaveField::from_fn(grid, 0.0, move |x| {
        let mut z = Cplx::new(0.0, 0.0);
        for (m, (re, im)) in coeffs.iter().enumerate() {
            let phase = 2.0 * std::f64::consts::PI * m as f64 * (x[0] - ax.a) / len;
            z += Cplx::new(*re, *im) * Cplx::from_polar(1.0, phase);
        }
        z
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fourier_round_trip(values in complex_vec(64)) {
        let axis = Grid::build_1d(-3.0, 7.0, 64, BoundaryKind::Periodic)
            .unwrap()
            .axis(0)
            .clone();
        let plan = SpectralPlan::new(&axis);
        let coeffs = plan.forward(&values).unwrap();
        let back = plan.inverse(&coeffs);
        for (a, b) in values.iter().zip(back.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn sine_round_trip(mut values in complex_vec(63)) {
        // Dirichlet: interior unknowns of a J = 64 grid
        let axis = Grid::build_1d(0.0, 1.0, 64, BoundaryKind::Dirichlet)
            .unwrap()
            .axis(0)
            .clone();
        let plan = SpectralPlan::new(&axis);
        values.truncate(plan.num_nodes());
        values.resize(plan.num_nodes(), Cplx::new(0.0, 0.0));
        // homogeneous Dirichlet data: the endpoints carry no unknowns
        values[0] = Cplx::new(0.0, 0.0);
        let last = values.len() - 1;
        values[last] = Cplx::new(0.0, 0.0);
        let coeffs = plan.forward(&values).unwrap();
        let back = plan.inverse(&coeffs);
        for (a, b) in values.iter().zip(back.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn cosine_round_trip(mut values in complex_vec(65)) {
        let axis = Grid::build_1d(0.0, 1.0, 64, BoundaryKind::Neumann)
            .unwrap()
            .axis(0)
            .clone();
        let plan = SpectralPlan::new(&axis);
        values.truncate(plan.num_nodes());
        values.resize(plan.num_nodes(), Cplx::new(0.0, 0.0));
        let coeffs = plan.forward(&values).unwrap();
        let back = plan.inverse(&coeffs);
        for (a, b) in values.iter().zip(back.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn splitting_conserves_mass_on_arbitrary_smooth_data(
        coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
        beta in -5.0f64..5.0,
        tau in 1e-4f64..5e-3,
    ) {
        let grid = Arc::new(Grid::build_1d(-6.0, 6.0, 64, BoundaryKind::Periodic).unwrap());
        let mut field = smooth_field(grid.clone(), &coeffs);
        prop_assume!(field.sup_norm() > 1e-3);
        let m0 = discrete_mass(&field);
        let params = ModelParams { beta, ..ModelParams::default() };
        let nl = Nonlinearity::Cubic { beta };
        let mut state = SchemeState::new(SchemeKind::Tssp, &grid);
        state.note_initial(&field);
        for _ in 0..20 {
            step(&mut state, &mut field, &params, &Potential::Zero, &nl, tau).unwrap();
        }
        prop_assert!((discrete_mass(&field) - m0).abs() <= 1e-11 * m0);
    }

    #[test]
    fn splitting_densities_are_gauge_invariant(
        coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
        alpha in -10.0f64..10.0,
    ) {
        let grid = Arc::new(Grid::build_1d(-6.0, 6.0, 32, BoundaryKind::Periodic).unwrap());
        let initial = smooth_field(grid.clone(), &coeffs);
        prop_assume!(initial.sup_norm() > 1e-3);
        let params = ModelParams { beta: 1.0, ..ModelParams::default() };
        let nl = Nonlinearity::Cubic { beta: 1.0 };
        let base = Potential::Harmonic { gamma: vec![1.0] };
        let run = |pot: &Potential| {
            let mut f = initial.clone();
            let mut s = SchemeState::new(SchemeKind::Tssp, &grid);
            for _ in 0..10 {
                step(&mut s, &mut f, &params, pot, &nl, 1e-3).unwrap();
            }
            f
        };
        let a = run(&base);
        let b = run(&Potential::Shifted { base: Box::new(base.clone()), alpha });
        let peak = a.sup_norm().powi(2).max(1e-12);
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            prop_assert!((x.norm_sqr() - y.norm_sqr()).abs() <= 1e-13 * peak);
        }
    }

    #[test]
    fn snapshot_round_trip_is_bitwise(values in complex_vec(48), t in -10.0f64..10.0) {
        let grid = Arc::new(Grid::build_1d(-2.0, 2.0, 48, BoundaryKind::Periodic).unwrap());
        let field = WaveField::new(grid, values, t).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.nlsf");
        let meta = SnapshotMeta {
            scheme: "tssp".into(),
            config_hash: 7,
            bcs: vec![BoundaryKind::Periodic],
        };
        write_snapshot(&path, &field, &meta).unwrap();
        let back = read_snapshot(&path, BoundaryKind::Dirichlet).unwrap();
        prop_assert_eq!(back.values, field.values);
        prop_assert_eq!(back.t, field.t);
    }

    #[test]
    fn config_hash_ignores_formatting_noise(
        beta in -10.0f64..10.0,
        j in 4usize..512,
    ) {
        let j = j * 2;
        let plain = format!(
            "model.beta = {beta}\ngrid.a = -5\ngrid.b = 5\ngrid.j = {j}\ntime.tau = 0.01\n"
        );
        let noisy = format!(
            "# comment\ntime.tau   =   0.01\n\ngrid.j={j}\ngrid.b = 5\ngrid.a = -5\nmodel.beta = {beta}\n"
        );
        let a = RunConfig::parse(&plain).unwrap();
        let b = RunConfig::parse(&noisy).unwrap();
        prop_assert_eq!(a.hash, b.hash);
    }
}
