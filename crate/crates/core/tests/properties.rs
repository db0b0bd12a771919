use nodal_atlas::mesh::{fixed_point_set, gen_flat_torus, is_separating, validate_involution};
use nodal_atlas::restriction::{count_sign_changes, make_path, period_integral, CurveTrace, TraceKind};
use proptest::prelude::*;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn trace_of(samples: Vec<f64>, lengths: Vec<f64>) -> CurveTrace<f64> {
    let mut s = vec![0.0];
    for l in &lengths[..lengths.len() - 1] {
        s.push(s.last().unwrap() + l);
    }
    CurveTrace {
        kind: TraceKind::Dirichlet,
        samples,
        s,
        edge_lengths: lengths,
        eigen_index: 0,
        eigenvalue: 1.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn period_integral_is_linear(
        rows in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.01f64..1.0), 3..40),
        alpha in -10.0f64..10.0,
        beta in -10.0f64..10.0,
    ) {
        let phi: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let f: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let g: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let tr = trace_of(phi, rows.iter().map(|r| r.3).collect());
        let combo: Vec<f64> = f.iter().zip(&g).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = period_integral(&tr, &combo).unwrap();
        let rhs = alpha * period_integral(&tr, &f).unwrap() + beta * period_integral(&tr, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn sign_changes_on_a_loop_are_even(
        samples in prop::collection::vec(prop_oneof![Just(0.0f64), -1.0f64..1.0], 3..60),
        tol in 0.0f64..0.3,
    ) {
        let n = samples.len();
        let tr = trace_of(samples, vec![1.0; n]);
        if let Ok((flips, _)) = count_sign_changes(&tr, tol) {
            prop_assert_eq!(flips % 2, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn separation_and_genus_survive_relabeling(perm in Just((0..64).collect::<Vec<usize>>()).prop_shuffle()) {
        let (mesh, inv) = gen_flat_torus::<f64>(8, TAU, TAU).unwrap();
        let fixed = fixed_point_set(&mesh, &inv).unwrap();
        let before = is_separating(&mesh, &fixed.components, Some(&inv));

        let relabeled = mesh.relabeled(&perm).unwrap();
        let mut sigma = vec![0; 64];
        for v in 0..64 {
            sigma[perm[v]] = perm[inv.apply(v)];
        }
        let inv2 = validate_involution(&relabeled, &sigma).unwrap();
        let fixed2 = fixed_point_set(&relabeled, &inv2).unwrap();
        prop_assert_eq!(relabeled.genus(), mesh.genus());
        prop_assert_eq!(fixed2.component_count(), fixed.component_count());
        prop_assert!((fixed2.total_length() - fixed.total_length()).abs() < 1e-12);
        prop_assert_eq!(is_separating(&relabeled, &fixed2.components, Some(&inv2)), before);
        // A single loop of the path also survives.
        let path = make_path(&relabeled, &fixed2.components[0]).unwrap();
        prop_assert!((path.length() - TAU).abs() < 1e-12);
    }
}
