//! Feasible data rates under a formation-accuracy bound.
//!
//! Two margins decide whether window length `tau` is usable. The link margin
//! asks that the guaranteed communication radius still reaches the farthest
//! out-neighbor after both position ranges are accounted for. The accuracy
//! margin asks that the combined position uncertainty fits inside the
//! position error bound.

use alloc::vec::Vec;

use crate::ball::noise_radius;
use crate::channel::{comm_radius, ChannelParams, RateConfig};
use crate::error::{check_nonneg, check_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePlanQuery {
    pub packet_bits: u32,
    pub step_s: f64,
    pub delta_p: f64,
    /// Largest desired inter-agent distance to an out-neighbor.
    pub max_offset: f64,
    pub self_pos_noise: f64,
    pub self_vel_noise: f64,
    /// Worst case over the other agents.
    pub peer_pos_noise: f64,
    pub peer_vel_noise: f64,
    pub tx_power_w: f64,
    pub channel: ChannelParams,
    pub tau_cap: usize,
}

impl RatePlanQuery {
    pub fn validate(&self) -> Result<()> {
        check_positive("delta_p", self.delta_p)?;
        check_nonneg("max_offset", self.max_offset)?;
        check_nonneg("self_pos_noise", self.self_pos_noise)?;
        check_nonneg("self_vel_noise", self.self_vel_noise)?;
        check_nonneg("peer_pos_noise", self.peer_pos_noise)?;
        check_nonneg("peer_vel_noise", self.peer_vel_noise)?;
        check_positive("tx_power_w", self.tx_power_w)?;
        if self.tau_cap < 1 {
            return Err(Error::InvalidCount {
                name: "tau_cap",
                value: self.tau_cap,
            });
        }
        RateConfig::new(self.packet_bits, self.step_s, 1).map(|_| ())
    }

    fn rate(&self, tau: usize) -> Result<RateConfig> {
        RateConfig::new(self.packet_bits, self.step_s, tau)
    }

    /// Own position-range radius at the last step of a window.
    fn self_radius(&self, tau: usize) -> f64 {
        noise_radius(tau - 1, self.step_s, self.self_pos_noise, self.self_vel_noise)
    }

    /// A peer's position-range radius, `2 tau - 1` steps after its last
    /// received state.
    fn peer_radius(&self, tau: usize) -> f64 {
        noise_radius(2 * tau - 1, self.step_s, self.peer_pos_noise, self.peer_vel_noise)
    }
}

/// Link margin: guaranteed radius minus the farthest neighbor's worst-case reach.
pub fn psi1(tau: usize, q: &RatePlanQuery) -> Result<f64> {
    let radius = comm_radius(q.tx_power_w, &q.rate(tau)?, &q.channel)?;
    Ok(radius - q.max_offset - q.peer_radius(tau) - q.self_radius(tau))
}

/// Accuracy margin: error bound minus combined position uncertainty.
pub fn psi2(tau: usize, q: &RatePlanQuery) -> Result<f64> {
    if tau == 0 {
        return Err(Error::InvalidCount {
            name: "tau",
            value: 0,
        });
    }
    Ok(q.delta_p - q.peer_radius(tau) - q.self_radius(tau))
}

/// Link margin for arbitrary position-range radii: `gcr - max_j(|offset_j| + r_j)`.
/// Each neighbor entry is `(offset_norm_m, range_radius_m)`.
pub fn psi1_general(gcr_m: f64, neighbors: &[(f64, f64)]) -> f64 {
    let worst = neighbors
        .iter()
        .map(|(d, r)| d + r)
        .fold(f64::NEG_INFINITY, f64::max);
    if neighbors.is_empty() {
        gcr_m
    } else {
        gcr_m - worst
    }
}

/// Accuracy margin for arbitrary position-range radii.
pub fn psi2_general(delta_p: f64, self_radius_m: f64, peer_radii_m: &[f64]) -> f64 {
    let worst = peer_radii_m.iter().copied().fold(0.0, f64::max);
    delta_p - self_radius_m - worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCandidate {
    pub tau: usize,
    pub rate_bps: f64,
    pub psi1: f64,
    pub psi2: f64,
}

impl RateCandidate {
    pub fn is_feasible(&self) -> bool {
        self.psi1 >= 0.0 && self.psi2 >= 0.0
    }
}

/// Both margins for every window length up to the cap.
pub fn rate_scan(q: &RatePlanQuery) -> Result<Vec<RateCandidate>> {
    q.validate()?;
    (1..=q.tau_cap)
        .map(|tau| {
            Ok(RateCandidate {
                tau,
                rate_bps: q.rate(tau)?.rate_bps(),
                psi1: psi1(tau, q)?,
                psi2: psi2(tau, q)?,
            })
        })
        .collect()
}

/// Window lengths (and their rates) where both margins are nonnegative.
/// An empty result means no rate meets the accuracy bound.
pub fn feasible_rates(q: &RatePlanQuery) -> Result<Vec<RateCandidate>> {
    Ok(rate_scan(q)?
        .into_iter()
        .filter(RateCandidate::is_feasible)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    pub(crate) fn triangle_rate_query() -> RatePlanQuery {
        RatePlanQuery {
            packet_bits: 512,
            step_s: 0.05,
            delta_p: 3.0,
            max_offset: 16.0,
            self_pos_noise: 0.5,
            self_vel_noise: 0.5,
            peer_pos_noise: 0.5,
            peer_vel_noise: 0.5,
            tx_power_w: 1.0,
            channel: ChannelParams::new(1e6, 1.0, 1.0 / (256.0 * PI * PI), 2.0, 1e-11, 2.5e-10)
                .unwrap(),
            tau_cap: 100,
        }
    }

    #[test]
    fn psi_hand_values() {
        let q = triangle_rate_query();
        // tau = 2: radius 20.6924 - 16 - 1.575 - 0.5
        let p1 = psi1(2, &q).unwrap();
        assert!((p1 - (20.692_4 - 18.075)).abs() < 1e-3, "{p1}");
        assert!((psi2(2, &q).unwrap() - 0.925).abs() < 1e-12);
        // tau = 3: peer 2.75, self 1.025
        assert!((psi2(3, &q).unwrap() + 0.775).abs() < 1e-12);
        assert!(psi1(1, &q).unwrap() < 0.0);
    }

    #[test]
    fn zero_noise_margins() {
        let mut q = triangle_rate_query();
        q.self_pos_noise = 0.0;
        q.self_vel_noise = 0.0;
        q.peer_pos_noise = 0.0;
        q.peer_vel_noise = 0.0;
        q.max_offset = 0.0;
        for tau in 1..20 {
            let r = comm_radius(1.0, &RateConfig::new(512, 0.05, tau).unwrap(), &q.channel).unwrap();
            assert_eq!(psi1(tau, &q).unwrap(), r);
            assert_eq!(psi2(tau, &q).unwrap(), q.delta_p);
        }
    }

    #[test]
    fn triangle_feasible_set() {
        let f = feasible_rates(&triangle_rate_query()).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].tau, 2);
        assert!((f[0].rate_bps - 5120.0).abs() < 1e-9);
    }

    #[test]
    fn tight_bound_is_empty() {
        let mut q = triangle_rate_query();
        q.delta_p = 0.4;
        assert!(feasible_rates(&q).unwrap().is_empty());
    }

    #[test]
    fn zero_noise_everything_feasible() {
        let mut q = triangle_rate_query();
        q.self_pos_noise = 0.0;
        q.self_vel_noise = 0.0;
        q.peer_pos_noise = 0.0;
        q.peer_vel_noise = 0.0;
        q.max_offset = 10.0;
        q.tau_cap = 30;
        assert_eq!(feasible_rates(&q).unwrap().len(), 30);
    }

    #[test]
    fn general_forms_reduce_to_closed_forms() {
        let q = triangle_rate_query();
        let tau = 2;
        let gcr = comm_radius(1.0, &RateConfig::new(512, 0.05, tau).unwrap(), &q.channel).unwrap()
            - q.self_radius(tau);
        let g1 = psi1_general(gcr, &[(16.0, q.peer_radius(tau)), (10.0, q.peer_radius(tau))]);
        assert!((g1 - psi1(tau, &q).unwrap()).abs() < 1e-12);
        let g2 = psi2_general(3.0, q.self_radius(tau), &[q.peer_radius(tau), 0.1]);
        assert!((g2 - psi2(tau, &q).unwrap()).abs() < 1e-12);
    }
}
