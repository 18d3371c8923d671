//! Property-based checks of invariants that hold for arbitrary admissible inputs.

use proptest::prelude::*;

use slv_core::constitutive::{ConstitutiveModel, ModelKind};
use slv_core::grid::{
    antiderivative, backward_difference, forward_difference, integral, l2_norm, laplacian_periodic,
    linf_norm, mean, sobolev_norm, Field, GridSpec,
};
use slv_core::io::decode_slvt;
use slv_core::oracle::{linear_energy, oracle_step, OracleState};
use slv_core::trajectory::xs_distance;
use slv_core::transforms::{exponential_filter, omega_to_stress, stress_to_omega};
use slv_core::tridiag::CyclicTridiagonal;
use slv_core::{SlvError, Trajectory};

fn model_kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

fn grid(points: usize) -> GridSpec {
    GridSpec::new(10.0, points).unwrap()
}

/// Mean-zero trigonometric polynomial with the given sine and cosine coefficients.
fn trig_field(g: &GridSpec, coeffs: &[(f64, f64)]) -> Field {
    let l = g.half_length();
    g.sample(|x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let xi = std::f64::consts::PI * (i + 1) as f64 / l;
                a * (xi * x).sin() + b * (xi * x).cos()
            })
            .sum()
    })
}

fn coeffs(max: f64) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-max..max, -max..max), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stress_round_trip(kind in model_kind(), s in -50.0f64..50.0) {
        let m = ConstitutiveModel::new(kind);
        let w = m.h(s);
        let back = m.g(w).unwrap();
        prop_assert!((back - s).abs() <= 1e-8 * (1.0 + s.abs()).powi(3), "{kind}: {s} -> {w} -> {back}");
    }

    #[test]
    fn h_is_increasing(kind in model_kind(), a in -20.0f64..20.0, gap in 1e-3f64..5.0) {
        let m = ConstitutiveModel::new(kind);
        prop_assert!(m.h(a + gap) > m.h(a));
        prop_assert!(m.h_prime(a) > 0.0);
    }

    #[test]
    fn g_prime_inverts_h_prime(kind in model_kind(), s in -10.0f64..10.0) {
        let m = ConstitutiveModel::new(kind);
        let w = m.h(s);
        let gp = m.g_prime(w).unwrap();
        prop_assert!((gp * m.h_prime(s) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn g_prime_bounds_enclose_samples(kind in model_kind(), frac in 0.0f64..1.0, delta in 0.05f64..0.9) {
        let m = ConstitutiveModel::new(kind);
        let w = frac * delta;
        let gp = m.g_prime(w).unwrap();
        prop_assert!(gp <= m.sup_g_prime(delta).unwrap() * (1.0 + 1e-12));
        prop_assert!(gp >= m.inf_g_prime(delta).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn rational_law_rejects_out_of_range(w in 1.0f64..10.0, sign in prop::bool::ANY) {
        let m = ConstitutiveModel::new(ModelKind::RationalSquareRoot);
        let w = if sign { w } else { -w };
        let rejected = matches!(m.g(w), Err(SlvError::Domain { .. }));
        prop_assert!(rejected);
    }

    #[test]
    fn antiderivative_matches_exact_primitive(c in coeffs(1.0)) {
        let g = grid(128);
        let f = trig_field(&g, &c);
        let big_f = antiderivative(&f, None).unwrap();
        prop_assert!(big_f.values()[0] == 0.0);
        // spectral integration is exact for band-limited data
        let l = g.half_length();
        let expected = g.sample(|x| {
            c.iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let xi = std::f64::consts::PI * (i + 1) as f64 / l;
                    (-a * (xi * x).cos() + b * (xi * x).sin()) / xi
                })
                .sum()
        });
        let shift = expected.values()[0];
        let err = linf_norm(&big_f.sub(&expected.map(|v| v - shift)));
        prop_assert!(err < 1e-11, "error {err}");
    }

    #[test]
    fn antiderivative_requires_mean_zero(c in coeffs(1.0), offset in 0.01f64..1.0) {
        let g = grid(64);
        let f = trig_field(&g, &c).map(|v| v + offset);
        let rejected = matches!(antiderivative(&f, None), Err(SlvError::MeanZeroViolation { .. }));
        prop_assert!(rejected);
    }

    #[test]
    fn difference_operators_preserve_zero_mean(values in prop::collection::vec(-5.0f64..5.0, 32)) {
        let f = Field::new(grid(32), values).unwrap();
        let scale = 1.0 + linf_norm(&f);
        prop_assert!(integral(&forward_difference(&f)).abs() < 1e-12 * scale);
        prop_assert!(integral(&backward_difference(&f)).abs() < 1e-12 * scale);
        prop_assert!(integral(&laplacian_periodic(&f)).abs() < 1e-10 * scale);
    }

    #[test]
    fn sobolev_zero_is_l2_and_monotone(values in prop::collection::vec(-3.0f64..3.0, 64), s in 0.0f64..4.0) {
        let f = Field::new(grid(64), values).unwrap();
        let l2 = l2_norm(&f);
        prop_assert!((sobolev_norm(&f, 0.0) - l2).abs() <= 1e-12 * (1.0 + l2));
        prop_assert!(sobolev_norm(&f, s) + 1e-12 >= sobolev_norm(&f, s * 0.5));
    }

    #[test]
    fn cyclic_solve_has_small_residual(
        rows in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.1f64..2.0, -1.0f64..1.0), 3..40)
    ) {
        let lower: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let upper: Vec<f64> = rows.iter().map(|r| r.1).collect();
        // strictly dominant diagonal
        let diag: Vec<f64> = rows.iter().map(|r| r.0.abs() + r.1.abs() + r.2).collect();
        let rhs: Vec<f64> = rows.iter().map(|r| r.3).collect();
        let m = CyclicTridiagonal { lower, diag, upper };
        let x = m.solve(&rhs).unwrap();
        let ax = m.matvec(&x);
        let res = ax.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(res < 1e-12, "residual {res}");
    }

    #[test]
    fn stress_data_round_trip(kind in model_kind(), c in coeffs(2.0)) {
        let m = ConstitutiveModel::new(kind);
        let g = grid(64);
        let s0 = trig_field(&g, &c);
        let (omega0, _) = stress_to_omega(&s0, &s0, &m);
        let back = omega_to_stress(&omega0, &m).unwrap();
        prop_assert!(linf_norm(&back.sub(&s0)) < 1e-9);
    }

    #[test]
    fn filter_is_exact_for_linear_forcing(
        a in -2.0f64..2.0, b in -2.0f64..2.0, y0 in -2.0f64..2.0,
        nu in 0.05f64..5.0, dt in 1e-3f64..0.5,
    ) {
        let g = grid(16);
        let steps = 20;
        let forcing: Vec<Field> = (0..=steps).map(|n| g.sample(|_| a + b * n as f64 * dt)).collect();
        let out = exponential_filter(&forcing, &g.sample(|_| y0), nu, dt).unwrap();
        for (n, y) in out.iter().enumerate() {
            let t = n as f64 * dt;
            let exact = a + b * (t - nu) + (y0 - a + b * nu) * (-t / nu).exp();
            prop_assert!((y.values()[0] - exact).abs() < 1e-12 * (1.0 + exact.abs()) * (1.0 + n as f64));
        }
    }

    #[test]
    fn xs_distance_is_a_metric(
        a in prop::collection::vec(-1.0f64..1.0, 3 * 16),
        b in prop::collection::vec(-1.0f64..1.0, 3 * 16),
        c in prop::collection::vec(-1.0f64..1.0, 3 * 16),
    ) {
        let g = grid(16);
        let traj = |v: &[f64]| {
            let levels = v.chunks(16).map(|ch| Field::new(g, ch.to_vec()).unwrap()).collect();
            Trajectory::from_values(g, 0.1, levels).unwrap()
        };
        let (ta, tb, tc) = (traj(&a), traj(&b), traj(&c));
        let dab = xs_distance(&ta, &tb, 1.0).unwrap();
        let dba = xs_distance(&tb, &ta, 1.0).unwrap();
        let dac = xs_distance(&ta, &tc, 1.0).unwrap();
        let dcb = xs_distance(&tc, &tb, 1.0).unwrap();
        prop_assert!((dab - dba).abs() <= 1e-12 * (1.0 + dab));
        prop_assert!(dab <= dac + dcb + 1e-12);
        prop_assert!(xs_distance(&ta, &ta, 1.0).unwrap() == 0.0);
    }

    #[test]
    fn slvt_round_trip(values in prop::collection::vec(-1e3f64..1e3, 2 * 16), dt in 1e-6f64..1.0) {
        let g = grid(16);
        let levels: Vec<Field> = values.chunks(16).map(|ch| Field::new(g, ch.to_vec()).unwrap()).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.slvt");
        slv_core::io::write_slvt(&path, &g, dt, &levels).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let back = decode_slvt(&bytes).unwrap();
        prop_assert!(back.grid.same_as(&g));
        prop_assert!(back.dt == dt);
        prop_assert!(back.levels == levels);
        // any truncation is detected
        prop_assert!(decode_slvt(&bytes[..bytes.len() - 1]).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_linear_energy_never_grows(c in coeffs(0.3), d in coeffs(0.3), nu in 0.0f64..2.0) {
        let m = ConstitutiveModel::new(ModelKind::Linear);
        let g = grid(64);
        let dt = 0.5 * g.dx();
        let mut state = OracleState::new(trig_field(&g, &c), trig_field(&g, &d)).unwrap();
        let mut energy = linear_energy(&state, dt);
        let mass = mean(&state.zeta);
        for _ in 0..40 {
            state = oracle_step(&state, &m, nu, dt).unwrap();
            let e = linear_energy(&state, dt);
            prop_assert!(e <= energy * (1.0 + 1e-12) + 1e-15, "{e} > {energy}");
            energy = e;
        }
        prop_assert!((mean(&state.zeta) - mass).abs() < 1e-12);
    }
}
