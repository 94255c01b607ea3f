use linkform_core::ball::{minkowski_sum, noise_radius, predict_position_range, Ball, PredictionQuery};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point_in_ball(rng: &mut ChaCha8Rng, b: &Ball) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(b.dim(), |_, _| rng.gen_range(-1.0..=1.0));
        if v.norm() <= 1.0 {
            return b.center() + v * b.radius();
        }
    }
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

#[test]
fn minkowski_sum_contains_ten_thousand_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut violations = 0;
    for _ in 0..10_000 {
        let dim = rng.gen_range(1..=3);
        let a = Ball::new(DVector::from_fn(dim, |_, _| rng.gen_range(-50.0..50.0)), rng.gen_range(0.0..5.0)).unwrap();
        let b = Ball::new(DVector::from_fn(dim, |_, _| rng.gen_range(-50.0..50.0)), rng.gen_range(0.0..5.0)).unwrap();
        let s = minkowski_sum(&a, &b).unwrap();
        let x = point_in_ball(&mut rng, &a) + point_in_ball(&mut rng, &b);
        if (&x - s.center()).norm() > s.radius() + 1e-9 {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

/// Roll the double integrator forward with every noise draw on its ball surface.
fn extreme_rollout(
    rng: &mut ChaCha8Rng,
    p: &DVector<f64>,
    v: &DVector<f64>,
    controls: &[DVector<f64>],
    rp: f64,
    rv: f64,
    h: f64,
    aligned: Option<&DVector<f64>>,
) -> DVector<f64> {
    let (mut p, mut v) = (p.clone(), v.clone());
    for u in controls {
        let dp = aligned.cloned().unwrap_or_else(|| unit(rng, p.len())) * rp;
        let dv = aligned.cloned().unwrap_or_else(|| unit(rng, p.len())) * rv;
        p = &p + &v * h + u * (0.5 * h * h) + dp;
        v = &v + u * h + dv;
    }
    p
}

#[test]
fn predicted_range_contains_extreme_noise_rollouts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let sigma = rng.gen_range(0..12);
        let h = rng.gen_range(0.01..0.2);
        let (rp, rv) = (rng.gen_range(0.0..0.6), rng.gen_range(0.0..0.6));
        let p = DVector::from_fn(2, |_, _| rng.gen_range(-10.0..10.0));
        let v = DVector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
        let controls: Vec<_> = (0..sigma)
            .map(|_| DVector::from_fn(2, |_, _| rng.gen_range(-5.0..5.0)))
            .collect();
        let q = PredictionQuery::with_exact_controls(p.clone(), v.clone(), &controls, rp, rv, h);
        let ball = predict_position_range(&q).unwrap();
        for _ in 0..20 {
            let x = extreme_rollout(&mut rng, &p, &v, &controls, rp, rv, h, None);
            assert!(ball.contains(&x) || (&x - ball.center()).norm() <= ball.radius() + 1e-9);
        }
        // Aligned noise reaches the boundary exactly.
        let dir = unit(&mut rng, 2);
        let x = extreme_rollout(&mut rng, &p, &v, &controls, rp, rv, h, Some(&dir));
        let d = (&x - ball.center()).norm();
        assert!((d - ball.radius()).abs() < 1e-9, "{d} vs {}", ball.radius());
    }
}

#[test]
fn control_ball_uncertainty_is_covered() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let sigma = rng.gen_range(1..8);
        let h = 0.05;
        let balls: Vec<Ball> = (0..sigma)
            .map(|_| Ball::new(DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0)), rng.gen_range(0.0..1.0)).unwrap())
            .collect();
        let q = PredictionQuery {
            anchor_position: DVector::zeros(2),
            anchor_velocity: DVector::from_column_slice(&[1.0, 0.0]),
            control_balls: balls.clone(),
            pos_noise_radius: 0.1,
            vel_noise_radius: 0.1,
            sigma,
            step: h,
        };
        let ball = predict_position_range(&q).unwrap();
        for _ in 0..20 {
            let us: Vec<_> = balls.iter().map(|b| point_in_ball(&mut rng, b)).collect();
            let x = extreme_rollout(&mut rng, &q.anchor_position, &q.anchor_velocity, &us, 0.1, 0.1, h, None);
            assert!((&x - ball.center()).norm() <= ball.radius() + 1e-9);
        }
    }
}

proptest! {
    #[test]
    fn minkowski_radius_and_center_add(
        c1 in prop::collection::vec(-100.0f64..100.0, 3),
        c2 in prop::collection::vec(-100.0f64..100.0, 3),
        r1 in 0.0f64..10.0,
        r2 in 0.0f64..10.0,
    ) {
        let a = Ball::from_slice(&c1, r1).unwrap();
        let b = Ball::from_slice(&c2, r2).unwrap();
        let s = minkowski_sum(&a, &b).unwrap();
        prop_assert_eq!(s.radius(), r1 + r2);
        prop_assert!((s.center() - (a.center() + b.center())).norm() < 1e-12);
    }

    #[test]
    fn noise_radius_monotone_in_sigma(
        sigma in 0usize..200,
        h in 1e-3f64..1.0,
        rp in 0.0f64..1.0,
        rv in 0.0f64..1.0,
    ) {
        prop_assert!(noise_radius(sigma + 1, h, rp, rv) >= noise_radius(sigma, h, rp, rv));
    }

    #[test]
    fn zero_noise_range_is_a_point(
        sigma in 0usize..20,
        px in -10.0f64..10.0,
        vx in -3.0f64..3.0,
        u in -2.0f64..2.0,
    ) {
        let controls = vec![DVector::from_column_slice(&[u]); sigma];
        let q = PredictionQuery::with_exact_controls(
            DVector::from_column_slice(&[px]), DVector::from_column_slice(&[vx]), &controls, 0.0, 0.0, 0.05);
        let b = predict_position_range(&q).unwrap();
        prop_assert_eq!(b.radius(), 0.0);
        let s = sigma as f64;
        let expected = px + vx * s * 0.05 + u * 0.05 * 0.05 * s * s / 2.0;
        prop_assert!((b.center()[0] - expected).abs() < 1e-9);
    }
}
