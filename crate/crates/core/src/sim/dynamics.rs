use nalgebra::DVector;
use rand::Rng;

use crate::control::AgentState;
use crate::error::{Error, Result};

/// One step of process noise for one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    pub pos: DVector<f64>,
    pub vel: DVector<f64>,
}

impl NoiseDraw {
    pub fn zeros(dim: usize) -> Self {
        NoiseDraw { pos: DVector::zeros(dim), vel: DVector::zeros(dim) }
    }
}

const BOUND_SLACK: f64 = 1e-12;

fn check_bound(v: &DVector<f64>, radius: f64) -> Result<()> {
    let norm = v.norm();
    if norm > radius * (1.0 + BOUND_SLACK) + BOUND_SLACK {
        return Err(Error::NoiseOutOfBounds { norm, radius });
    }
    Ok(())
}

/// `p+ = p + h v + h^2/2 u + w_p`, `v+ = v + h u + w_v`, rejecting noise outside its ball.
pub fn step_dynamics(
    x: &AgentState,
    u: &DVector<f64>,
    noise: &NoiseDraw,
    bounds: (f64, f64),
    h: f64,
) -> Result<AgentState> {
    check_bound(&noise.pos, bounds.0)?;
    check_bound(&noise.vel, bounds.1)?;
    Ok(AgentState {
        position: &x.position + &x.velocity * h + u * (0.5 * h * h) + &noise.pos,
        velocity: &x.velocity + u * h + &noise.vel,
    })
}

/// Uniform draw from the closed ball of `radius` in `dim` dimensions.
///
/// Always consumes randomness, so the stream does not depend on the radius.
pub fn sample_noise<R: Rng + ?Sized>(rng: &mut R, radius: f64, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
        let norm2 = v.norm_squared();
        if norm2 <= 1.0 {
            return v * radius;
        }
    }
}
