mod common;

use common::{gw_instance, side_info_instance, small_opts};
use hypotest::oracle::{brute_force_frontier, GridSpec};
use hypotest::prob::axes::{U0, U1, U2, X, Y1, Y2, Z1};
use hypotest::prob::{mutual_information, Channel, HypothesisPair, JointPmf, Structure};
use hypotest::regions::{
    gw_frontier, hausdorff_distance, hb_frontier, maximize_weighted_exponents, noisy_frontier,
    support, DegradedBroadcast, Evaluation, RatePoint, SimplexLayout, SolverOptions,
};

#[test]
fn solver_matches_grid_on_symmetric_source() {
    // maximize I(U;Y) subject to I(U;X) <= 0.5 with X uniform, Y = X xor BSC(0.1)
    let p = JointPmf::bernoulli(X, 0.5)
        .unwrap()
        .extend(&Channel::bsc(X, Y1, 0.1).unwrap())
        .unwrap();
    let joint = |a: f64, b: f64| {
        let c = Channel::new(
            vec![hypotest::prob::Alphabet::new(X, 2).unwrap()],
            vec![hypotest::prob::Alphabet::new(U0, 2).unwrap()],
            vec![1.0 - a, a, 1.0 - b, b],
        )
        .unwrap();
        p.extend(&c).unwrap()
    };
    let eval = |q: &[f64]| {
        let j = joint(q[1], q[3]);
        Evaluation {
            objective: mutual_information(&j, &[U0], &[Y1], &[]).unwrap(),
            constraints: vec![mutual_information(&j, &[U0], &[X], &[]).unwrap() - 0.5],
        }
    };
    let layout = SimplexLayout::new(vec![2, 2]);
    let opts = SolverOptions {
        restarts: 8,
        ..Default::default()
    };
    let s = maximize_weighted_exponents(&layout, &eval, &opts, 5, &[]).unwrap();
    let mut grid_best: f64 = 0.0;
    let m = 400;
    for i in 0..=m {
        for k in 0..=m {
            let j = joint(i as f64 / m as f64, k as f64 / m as f64);
            if mutual_information(&j, &[U0], &[X], &[]).unwrap() <= 0.5 {
                grid_best = grid_best.max(mutual_information(&j, &[U0], &[Y1], &[]).unwrap());
            }
        }
    }
    assert!(s.evaluation.is_feasible());
    assert!(
        (s.value - grid_best).abs() < 5e-3,
        "{} vs {}",
        s.value,
        grid_best
    );
}

#[test]
fn gw_witnesses_are_feasible_and_capped() {
    let h = gw_instance(0.4, 0.1, 0.25);
    let rates = RatePoint::new(0.3, 0.1, 0.2).unwrap();
    let f = gw_frontier(&h, rates, &small_opts(4, 9)).unwrap();
    let cap1 = mutual_information(h.h0(), &[X], &[Y1], &[]).unwrap();
    let cap2 = mutual_information(h.h0(), &[X], &[Y2], &[]).unwrap();
    for p in &f.raw {
        let j = p.witness.as_ref().unwrap().joint_with(h.h0()).unwrap();
        let i0 = mutual_information(&j, &[U0], &[X], &[]).unwrap();
        let i1 = mutual_information(&j, &[U1], &[X], &[U0]).unwrap();
        let i2 = mutual_information(&j, &[U2], &[X], &[U0]).unwrap();
        assert!(i0 <= rates.r0 + 1e-9 && i1 <= rates.r1 + 1e-9 && i2 <= rates.r2 + 1e-9);
        let t1 = mutual_information(&j, &[U0, U1], &[Y1], &[]).unwrap();
        let t2 = mutual_information(&j, &[U0, U2], &[Y2], &[]).unwrap();
        assert!((t1 - p.theta1).abs() < 1e-9 && (t2 - p.theta2).abs() < 1e-9);
        assert!(p.theta1 <= cap1 + 1e-9 && p.theta2 <= cap2 + 1e-9);
        assert!(p.slacks.iter().all(|&s| s >= -1e-9));
    }
    for w in f.points.windows(2) {
        assert!(w[0].theta1 < w[1].theta1 && w[0].theta2 > w[1].theta2);
    }
}

#[test]
fn hb_witnesses_are_feasible_and_capped() {
    let h = side_info_instance(0.5, 0.2, 0.1, 0.1);
    let r = RatePoint::single(0.4).unwrap();
    let f = hb_frontier(&h, r, &small_opts(4, 9)).unwrap();
    let cap1 = mutual_information(h.h0(), &[X], &[Y1], &[Z1]).unwrap();
    let cap2 = mutual_information(h.h0(), &[X], &[Y2], &[]).unwrap();
    for p in &f.raw {
        let j = p.witness.as_ref().unwrap().joint_with(h.h0()).unwrap();
        let cost = mutual_information(&j, &[U0], &[X], &[]).unwrap()
            + mutual_information(&j, &[U1], &[X], &[U0, Z1]).unwrap();
        assert!(cost <= r.r0 + 1e-9);
        let t1 = mutual_information(&j, &[U0, U1], &[Y1], &[Z1]).unwrap();
        let t2 = mutual_information(&j, &[U0], &[Y2], &[]).unwrap();
        assert!((t1 - p.theta1).abs() < 1e-9 && (t2 - p.theta2).abs() < 1e-9);
        assert!(p.theta1 <= cap1 + 1e-9 && p.theta2 <= cap2 + 1e-9);
    }
}

#[test]
fn rate_increase_never_shrinks_region() {
    let h = gw_instance(0.5, 0.1, 0.2);
    let opts = small_opts(4, 7);
    let lo = gw_frontier(&h, RatePoint::new(0.2, 0.0, 0.1).unwrap(), &opts).unwrap();
    let hi = gw_frontier(&h, RatePoint::new(0.4, 0.0, 0.1).unwrap(), &opts).unwrap();
    for k in 0..=20 {
        let l = k as f64 / 20.0;
        assert!(
            support(&hi.points, l) >= support(&lo.points, l) - 1e-6,
            "lambda {l}"
        );
    }
}

#[test]
fn hb_chain_endpoint_matches_oracle() {
    let h = side_info_instance(0.5, 0.1, 0.1, 0.1);
    let r = RatePoint::single(1.0).unwrap();
    let f = hb_frontier(&h, r, &small_opts(4, 5)).unwrap();
    let o = brute_force_frontier(&h, r, &GridSpec::default()).unwrap();
    assert!((f.max_theta2() - o.max_theta2()).abs() < 5e-3);
}

#[test]
fn oracle_small_examples() {
    let h = gw_instance(0.5, 0.0, 0.0);
    let o = brute_force_frontier(&h, RatePoint::default(), &GridSpec::default()).unwrap();
    assert_eq!(o.points.len(), 1);
    assert!(o.points[0].theta1.abs() < 1e-12 && o.points[0].theta2.abs() < 1e-12);
    let o =
        brute_force_frontier(&h, RatePoint::single(1.0).unwrap(), &GridSpec::default()).unwrap();
    assert_eq!(o.points.len(), 1);
    assert!((o.points[0].theta1 - 1.0).abs() < 1e-12 && (o.points[0].theta2 - 1.0).abs() < 1e-12);
}

#[test]
fn oracle_points_are_dominated_by_solver() {
    let h = gw_instance(0.5, 0.1, 0.2);
    let rates = RatePoint::new(0.3, 0.1, 0.1).unwrap();
    let f = gw_frontier(&h, rates, &small_opts(4, 9)).unwrap();
    let o = brute_force_frontier(&h, rates, &GridSpec::default()).unwrap();
    for k in 0..=20 {
        let l = k as f64 / 20.0;
        assert!(
            support(&o.points, l) <= support(&f.points, l) + 1e-4,
            "lambda {l}"
        );
    }
    assert!(hausdorff_distance(&f.points, &o.points) < 5e-3 + 0.05);
}

#[test]
fn z1_constant_general_matches_gw() {
    use hypotest::regions::general_frontier;
    let gw = gw_instance(0.5, 0.1, 0.2);
    let h0 = gw
        .h0()
        .product(&JointPmf::single(Z1, &[1.0]).unwrap())
        .unwrap();
    let h = HypothesisPair::from_null(h0, Structure::AgainstConditionalIndependence).unwrap();
    let rates = RatePoint::new(0.3, 0.1, 0.1).unwrap();
    let opts = small_opts(4, 7);
    let a = gw_frontier(&gw, rates, &opts).unwrap();
    let b = general_frontier(&h, rates, &opts).unwrap();
    assert!(hausdorff_distance(&a.points, &b.points) < 5e-3);
}

#[test]
fn noiseless_broadcast_contains_binning_region() {
    // |W| = 4 = 2^R with R = 2: the separate-coding witness sends (u0, u1) as W
    let h = side_info_instance(0.5, 0.2, 0.1, 0.1);
    let opts = SolverOptions {
        restarts: 3,
        lambda_grid: 5,
        caps: [Some(2), Some(2), None],
        random_functions: 16,
        exhaustive_function_limit: 1 << 8,
        refine_functions: 2,
        ..Default::default()
    };
    let n = noisy_frontier(&h, &DegradedBroadcast::noiseless(4).unwrap(), &opts).unwrap();
    let b = hb_frontier(&h, RatePoint::single(0.6).unwrap(), &small_opts(4, 5)).unwrap();
    for k in 0..=10 {
        let l = k as f64 / 10.0;
        assert!(
            support(&n.points, l) >= support(&b.points, l) - 5e-3,
            "lambda {l}"
        );
    }
}

#[test]
fn degraded_broadcast_dominated_by_unit_rate_binning() {
    let h = side_info_instance(0.5, 0.2, 0.1, 0.1);
    let opts = SolverOptions {
        restarts: 2,
        lambda_grid: 5,
        caps: [Some(2), Some(2), None],
        refine_functions: 1,
        ..Default::default()
    };
    let n = noisy_frontier(&h, &DegradedBroadcast::bsc_pair(0.1, 0.2).unwrap(), &opts).unwrap();
    let b = hb_frontier(&h, RatePoint::single(1.0).unwrap(), &small_opts(4, 5)).unwrap();
    for k in 0..=10 {
        let l = k as f64 / 10.0;
        assert!(
            support(&n.points, l) <= support(&b.points, l) + 5e-3,
            "lambda {l}"
        );
    }
}

#[test]
fn unused_private_layers_do_not_lose_common_layer_optimum() {
    // with r1 = r2 = 0 the satellites carry nothing, so larger alphabets for
    // them must not hurt
    let h = gw_instance(0.5, 0.1, 0.2);
    let rates = RatePoint::single(0.6).unwrap();
    let best = |caps| {
        let opts = SolverOptions {
            restarts: 4,
            lambda_grid: 3,
            caps,
            ..Default::default()
        };
        gw_frontier(&h, rates, &opts)
            .unwrap()
            .points
            .iter()
            .map(|p| p.theta1)
            .fold(0.0, f64::max)
    };
    let single = best([Some(2), Some(1), Some(1)]);
    let full = best([Some(2), Some(2), Some(2)]);
    assert!(single > 0.3, "{single}");
    assert!(full > single - 5e-3, "{full} vs {single}");
}
