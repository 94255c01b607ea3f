//! Closed-ball arithmetic and bounded-noise position-range prediction.
//!
//! Every uncertainty set in the crate (process noise, predicted positions,
//! control ranges) is a closed ball, and the only set operation needed is the
//! Minkowski sum, which for balls reduces to adding centers and radii.

use alloc::vec::Vec;
use nalgebra::DVector;

use crate::error::{check_nonneg, check_positive, Error, Result};

/// Closed ball `{x : |x - center| <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: DVector<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: DVector<f64>, radius: f64) -> Result<Self> {
        check_nonneg("radius", radius)?;
        Ok(Ball { center, radius })
    }

    pub fn from_slice(center: &[f64], radius: f64) -> Result<Self> {
        Ball::new(DVector::from_column_slice(center), radius)
    }

    /// Degenerate ball holding a single point.
    pub fn point(center: DVector<f64>) -> Self {
        Ball {
            center,
            radius: 0.0,
        }
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        (x - &self.center).norm() <= self.radius
    }

    /// Image of the ball under `x -> scale * x`.
    pub fn scaled(&self, scale: f64) -> Ball {
        Ball {
            center: &self.center * scale,
            radius: self.radius * libm::fabs(scale),
        }
    }
}

/// Minkowski sum of two closed balls.
pub fn minkowski_sum(a: &Ball, b: &Ball) -> Result<Ball> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(Ball {
        center: &a.center + &b.center,
        radius: a.radius + b.radius,
    })
}

/// Inputs for predicting where an agent can be `sigma` steps after its last
/// exactly known state.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionQuery {
    pub anchor_position: DVector<f64>,
    pub anchor_velocity: DVector<f64>,
    /// Control ranges for the steps between the anchor and the query time, oldest first.
    pub control_balls: Vec<Ball>,
    pub pos_noise_radius: f64,
    pub vel_noise_radius: f64,
    pub sigma: usize,
    pub step: f64,
}

impl PredictionQuery {
    /// Query whose control inputs are known exactly.
    pub fn with_exact_controls(
        anchor_position: DVector<f64>,
        anchor_velocity: DVector<f64>,
        controls: &[DVector<f64>],
        pos_noise_radius: f64,
        vel_noise_radius: f64,
        step: f64,
    ) -> Self {
        PredictionQuery {
            anchor_position,
            anchor_velocity,
            control_balls: controls.iter().cloned().map(Ball::point).collect(),
            pos_noise_radius,
            vel_noise_radius,
            sigma: controls.len(),
            step,
        }
    }

    fn validate(&self) -> Result<()> {
        check_positive("step", self.step)?;
        check_nonneg("pos_noise_radius", self.pos_noise_radius)?;
        check_nonneg("vel_noise_radius", self.vel_noise_radius)?;
        if self.control_balls.len() != self.sigma {
            return Err(Error::WindowLength {
                sigma: self.sigma,
                controls: self.control_balls.len(),
            });
        }
        let n = self.anchor_position.len();
        if self.anchor_velocity.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.anchor_velocity.len(),
            });
        }
        if let Some(bad) = self.control_balls.iter().find(|b| b.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(())
    }
}

/// Radius contributed by process noise alone after `sigma` open-loop steps.
pub fn noise_radius(sigma: usize, step: f64, pos_noise: f64, vel_noise: f64) -> f64 {
    let s = sigma as f64;
    s * pos_noise + 0.5 * s * (s - 1.0) * step * vel_noise
}

/// Closed ball containing every position reachable from the anchor state
/// under the given control ranges and bounded process noise.
pub fn predict_position_range(q: &PredictionQuery) -> Result<Ball> {
    q.validate()?;
    let h = q.step;
    let sigma = q.sigma as f64;
    let mut center = &q.anchor_position + &q.anchor_velocity * (sigma * h);
    let mut control_radius = 0.0;
    for (idx, ball) in q.control_balls.iter().enumerate() {
        let weight = h * h * (sigma + 0.5 - (idx + 1) as f64);
        center += ball.center() * weight;
        control_radius += weight * ball.radius();
    }
    let radius = control_radius + noise_radius(q.sigma, h, q.pos_noise_radius, q.vel_noise_radius);
    Ok(Ball { center, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn minkowski_identity_and_sum() {
        let a = Ball::from_slice(&[0.0, 0.0], 1.0).unwrap();
        let z = Ball::from_slice(&[0.0, 0.0], 0.0).unwrap();
        assert_eq!(minkowski_sum(&a, &z).unwrap(), a);

        let a = Ball::from_slice(&[1.0, 0.0], 2.0).unwrap();
        let b = Ball::from_slice(&[0.0, 3.0], 0.5).unwrap();
        let s = minkowski_sum(&a, &b).unwrap();
        assert_eq!(s.center(), &v(&[1.0, 3.0]));
        assert_eq!(s.radius(), 2.5);
    }

    #[test]
    fn minkowski_rejects_dimension_mismatch() {
        let a = Ball::from_slice(&[0.0, 0.0], 1.0).unwrap();
        let b = Ball::from_slice(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            minkowski_sum(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn negative_radius_rejected() {
        assert!(Ball::from_slice(&[0.0], -0.1).is_err());
    }

    #[test]
    fn sigma_zero_is_the_anchor_point() {
        let q = PredictionQuery::with_exact_controls(v(&[3.0, -1.0]), v(&[5.0, 2.0]), &[], 0.5, 0.5, 0.05);
        let b = predict_position_range(&q).unwrap();
        assert_eq!(b.center(), &v(&[3.0, -1.0]));
        assert_eq!(b.radius(), 0.0);
    }

    #[test]
    fn sigma_one_example() {
        let q = PredictionQuery::with_exact_controls(
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            &[v(&[0.0, 0.0])],
            0.5,
            0.5,
            0.05,
        );
        let b = predict_position_range(&q).unwrap();
        assert!((b.center()[0] - 0.05).abs() < 1e-15);
        assert_eq!(b.center()[1], 0.0);
        assert!((b.radius() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sigma_three_radius() {
        let q = PredictionQuery::with_exact_controls(
            v(&[0.0, 0.0]),
            v(&[0.0, 0.0]),
            &[v(&[0.0, 0.0]), v(&[0.0, 0.0]), v(&[0.0, 0.0])],
            0.15,
            0.15,
            0.05,
        );
        let b = predict_position_range(&q).unwrap();
        assert!((b.radius() - 0.4725).abs() < 1e-12);
    }

    #[test]
    fn control_ball_radius_enters_with_window_weights() {
        // sigma = 2: weights h^2 * (1.5, 0.5)
        let h = 0.1;
        let q = PredictionQuery {
            anchor_position: v(&[0.0]),
            anchor_velocity: v(&[0.0]),
            control_balls: vec![
                Ball::from_slice(&[1.0], 1.0).unwrap(),
                Ball::from_slice(&[2.0], 2.0).unwrap(),
            ],
            pos_noise_radius: 0.0,
            vel_noise_radius: 0.0,
            sigma: 2,
            step: h,
        };
        let b = predict_position_range(&q).unwrap();
        assert!((b.center()[0] - h * h * (1.5 + 1.0)).abs() < 1e-15);
        assert!((b.radius() - h * h * (1.5 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn window_length_must_match_sigma() {
        let q = PredictionQuery {
            anchor_position: v(&[0.0]),
            anchor_velocity: v(&[0.0]),
            control_balls: vec![],
            pos_noise_radius: 0.0,
            vel_noise_radius: 0.0,
            sigma: 1,
            step: 0.1,
        };
        assert!(matches!(
            predict_position_range(&q),
            Err(Error::WindowLength { sigma: 1, controls: 0 })
        ));
    }
}
