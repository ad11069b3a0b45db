use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use torus_breakup::frame::{complete_frame, symplectic_lift};
use torus_breakup::trigpoly::{bump, jackson, sup_error, Term, TrigPoly};
use torus_breakup::variational::{discrete_action, LagrangianModel};

fn poly_1d(max_freq: i64) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec((0..=max_freq, -1.0..1.0f64, -1.0..1.0f64), 1..6).prop_map(|raw| {
        let terms = raw
            .into_iter()
            .map(|(n, c, s)| Term {
                freq: vec![n],
                cos: c,
                sin: s,
            })
            .collect();
        TrigPoly::new(1, terms).unwrap()
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn model(g: f64, w2: f64, s: f64) -> LagrangianModel {
    let mut m = LagrangianModel::pendulum(2, g);
    m.kinetic_weights = vec![1.0, w2];
    m.overall_scale = s;
    m
}

fn path(points: &[(f64, f64)]) -> Vec<Vec<f64>> {
    points.iter().map(|&(a, b)| vec![a, b]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_evaluates_pointwise(p in poly_1d(6), q in poly_1d(6), x in -PI..PI) {
        let pq = p.mul(&q).unwrap();
        prop_assert!(close(pq.eval(&[x]), p.eval(&[x]) * q.eval(&[x]), 1e-12));
    }

    #[test]
    fn shift_moves_the_argument(p in poly_1d(8), x in -PI..PI, h in -PI..PI) {
        prop_assert!(close(p.shifted(h).eval(&[x]), p.eval(&[x - h]), 1e-12));
        prop_assert!(close(p.shifted_by_pi().eval(&[x]), p.eval(&[x - PI]), 1e-12));
    }

    #[test]
    fn derivative_matches_central_difference(p in poly_1d(5), x in -PI..PI) {
        let h = 1e-5;
        let fd = (p.eval(&[x + h]) - p.eval(&[x - h])) / (2.0 * h);
        prop_assert!(close(p.derivative(&[1]).eval(&[x]), fd, 1e-7));
    }

    #[test]
    fn polynomials_are_periodic(p in poly_1d(9), x in -PI..PI, n in -5i32..5) {
        prop_assert!(close(p.eval(&[x + TAU * n as f64]), p.eval(&[x]), 1e-11));
    }

    #[test]
    fn linear_substitution_composes(
        p in poly_1d(4),
        row in (-3i64..=3, -3i64..=3).prop_filter("nonzero", |r| *r != (0, 0)),
        x in -PI..PI,
        y in -PI..PI,
    ) {
        let composed = p.compose_linear(&[vec![row.0, row.1]]).unwrap();
        let arg = row.0 as f64 * x + row.1 as f64 * y;
        prop_assert!(close(composed.eval(&[x, y]), p.eval(&[arg]), 1e-11));
    }

    #[test]
    fn legendre_duality(
        g in 0.0..2.0f64, w2 in 0.1..5.0f64, s in 0.01..1.0f64,
        q in prop::array::uniform2(-PI..PI), v in prop::array::uniform2(-3.0..3.0f64),
    ) {
        let m = model(g, w2, s);
        let p = m.momentum(&v);
        let pairing: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!(close(m.hamiltonian(&q, &p), pairing - m.lagrangian(&q, &v), 1e-12));
    }

    #[test]
    fn action_is_invariant_under_deck_translations(
        g in 0.0..2.0f64, w2 in 0.1..5.0f64,
        pts in prop::collection::vec((-PI..PI, -PI..PI), 3..12),
        shift in (-3i32..3, -3i32..3),
        h in 0.01..1.0f64,
    ) {
        let m = model(g, w2, 1.0);
        let base = path(&pts);
        let moved: Vec<Vec<f64>> = base
            .iter()
            .map(|q| vec![q[0] + TAU * shift.0 as f64, q[1] + TAU * shift.1 as f64])
            .collect();
        prop_assert!(close(discrete_action(&m, &moved, h), discrete_action(&m, &base, h), 1e-10));
    }

    #[test]
    fn action_is_reversible_and_additive(
        g in 0.0..2.0f64,
        pts in prop::collection::vec((-PI..PI, -PI..PI), 4..12),
        h in 0.01..1.0f64,
    ) {
        let m = model(g, 1.0, 1.0);
        let base = path(&pts);
        let mut reversed = base.clone();
        reversed.reverse();
        let whole = discrete_action(&m, &base, h);
        prop_assert!(close(discrete_action(&m, &reversed, h), whole, 1e-12));
        let cut = base.len() / 2;
        let split = discrete_action(&m, &base[..=cut], h) + discrete_action(&m, &base[cut..], h);
        prop_assert!(close(split, whole, 1e-12));
    }

    #[test]
    fn planar_frames_lift_symplectically(a in -40i64..40, b in -40i64..40) {
        prop_assume!((a, b) != (0, 0));
        let k = vec![a, b];
        let frame = complete_frame(&k, &[-b, a]).unwrap();
        prop_assert!(symplectic_lift(&frame).unwrap().is_symplectic());
    }

    #[test]
    fn spatial_frames_are_orthogonal(
        k in prop::array::uniform3(-6i64..6),
        v in prop::array::uniform3(-6i64..6),
    ) {
        // k' = |k|²v − ⟨v, k⟩k is orthogonal to k; skip the parallel cases.
        let nk: i64 = k.iter().map(|x| x * x).sum();
        let dot: i64 = k.iter().zip(&v).map(|(a, b)| a * b).sum();
        let kp: Vec<i64> = k.iter().zip(&v).map(|(a, b)| nk * b - dot * a).collect();
        prop_assume!(nk > 0 && kp.iter().any(|&x| x != 0));
        let frame = complete_frame(&k, &kp).unwrap();
        prop_assert!(frame.is_orthogonal());
        prop_assert!(symplectic_lift(&frame).unwrap().is_symplectic());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn jackson_error_respects_its_bound(radius in 0.3..1.5f64, m in 8usize..40) {
        let f = bump(radius).unwrap();
        let approx = jackson(&f, m, 2).unwrap();
        let err = sup_error(&f, &approx.poly, 1 << 12);
        prop_assert!(err <= approx.error_bound, "{err} > {}", approx.error_bound);
    }
}
