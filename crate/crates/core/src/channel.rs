//! Link-budget math for deterministic path-loss channels.
//!
//! Capacity follows Shannon's formula with a power-law path gain. A message
//! at rate `mu` decodes only while `mu < C` strictly, which turns into an
//! open communication ball around the transmitter. When the transmitter's
//! own position is only known to lie in a closed ball, the set of receivers
//! that are served from every possible transmitter position is again an open
//! ball whose radius shrinks by the position-range radius.

use core::f64::consts::LN_2;

use nalgebra::DVector;

use crate::ball::{noise_radius, Ball};
use crate::error::{check_nonneg, check_positive, Error, Result};

/// Physical-layer parameters shared by all links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    bandwidth_hz: f64,
    ref_distance_m: f64,
    ref_gain: f64,
    path_loss_exponent: f64,
    channel_noise_psd: f64,
    jamming_noise_psd: f64,
}

impl ChannelParams {
    pub fn new(
        bandwidth_hz: f64,
        ref_distance_m: f64,
        ref_gain: f64,
        path_loss_exponent: f64,
        channel_noise_psd: f64,
        jamming_noise_psd: f64,
    ) -> Result<Self> {
        check_positive("bandwidth_hz", bandwidth_hz)?;
        check_positive("ref_distance_m", ref_distance_m)?;
        check_positive("ref_gain", ref_gain)?;
        check_positive("path_loss_exponent", path_loss_exponent)?;
        check_nonneg("channel_noise_psd", channel_noise_psd)?;
        check_nonneg("jamming_noise_psd", jamming_noise_psd)?;
        check_positive("total_noise_psd", channel_noise_psd + jamming_noise_psd)?;
        Ok(ChannelParams {
            bandwidth_hz,
            ref_distance_m,
            ref_gain,
            path_loss_exponent,
            channel_noise_psd,
            jamming_noise_psd,
        })
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }
    pub fn ref_distance_m(&self) -> f64 {
        self.ref_distance_m
    }
    pub fn ref_gain(&self) -> f64 {
        self.ref_gain
    }
    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }
    pub fn channel_noise_psd(&self) -> f64 {
        self.channel_noise_psd
    }
    pub fn jamming_noise_psd(&self) -> f64 {
        self.jamming_noise_psd
    }

    /// Receiver noise power `W = (N0 + Njam) * Bw` in watts.
    pub fn noise_power(&self) -> f64 {
        (self.channel_noise_psd + self.jamming_noise_psd) * self.bandwidth_hz
    }

    /// Same channel with a different bandwidth.
    pub fn with_bandwidth(&self, bandwidth_hz: f64) -> Result<Self> {
        check_positive("bandwidth_hz", bandwidth_hz)?;
        Ok(ChannelParams {
            bandwidth_hz,
            ..*self
        })
    }

    /// Same channel with the jamming PSD scaled by `multiplier`.
    pub fn with_jamming_multiplier(&self, multiplier: f64) -> Result<Self> {
        check_nonneg("jamming_multiplier", multiplier)?;
        ChannelParams::new(
            self.bandwidth_hz,
            self.ref_distance_m,
            self.ref_gain,
            self.path_loss_exponent,
            self.channel_noise_psd,
            self.jamming_noise_psd * multiplier,
        )
    }

    /// SNR threshold `2^(mu/Bw) - 1` a link must strictly exceed.
    pub fn snr_threshold(&self, rate_bps: f64) -> f64 {
        libm::exp2(rate_bps / self.bandwidth_hz) - 1.0
    }
}

/// Packet length, sampling period and transmission window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConfig {
    packet_bits: u32,
    step_s: f64,
    tau: usize,
}

impl RateConfig {
    pub fn new(packet_bits: u32, step_s: f64, tau: usize) -> Result<Self> {
        if packet_bits == 0 {
            return Err(Error::InvalidCount {
                name: "packet_bits",
                value: 0,
            });
        }
        check_positive("step_s", step_s)?;
        if tau == 0 {
            return Err(Error::InvalidCount {
                name: "tau",
                value: 0,
            });
        }
        Ok(RateConfig {
            packet_bits,
            step_s,
            tau,
        })
    }

    pub fn packet_bits(&self) -> u32 {
        self.packet_bits
    }
    pub fn step_s(&self) -> f64 {
        self.step_s
    }
    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Data rate `M / (tau h)` in bits per second.
    pub fn rate_bps(&self) -> f64 {
        self.packet_bits as f64 / (self.tau as f64 * self.step_s)
    }
}

pub fn path_gain(distance_m: f64, params: &ChannelParams) -> Result<f64> {
    if distance_m == 0.0 {
        return Err(Error::ZeroDistance);
    }
    check_positive("distance_m", distance_m)?;
    Ok(params.ref_gain * libm::pow(params.ref_distance_m / distance_m, params.path_loss_exponent))
}

/// Received SNR at `distance_m` for a receiver with noise power `noise_power_w`.
pub fn snr(tx_power_w: f64, distance_m: f64, params: &ChannelParams, noise_power_w: f64) -> Result<f64> {
    check_nonneg("tx_power_w", tx_power_w)?;
    check_positive("noise_power_w", noise_power_w)?;
    Ok(tx_power_w * path_gain(distance_m, params)? / noise_power_w)
}

/// Shannon capacity in bits per second.
pub fn capacity(tx_power_w: f64, distance_m: f64, params: &ChannelParams) -> Result<f64> {
    let snr = snr(tx_power_w, distance_m, params, params.noise_power())?;
    Ok(params.bandwidth_hz * libm::log2(1.0 + snr))
}

/// Radius of the open ball of receivers that can decode a point transmitter.
pub fn comm_radius(tx_power_w: f64, rate: &RateConfig, params: &ChannelParams) -> Result<f64> {
    comm_radius_at_rate(tx_power_w, rate.rate_bps(), params, params.noise_power())
}

/// [`comm_radius`] with an explicit data rate and receiver noise power.
pub fn comm_radius_at_rate(
    tx_power_w: f64,
    rate_bps: f64,
    params: &ChannelParams,
    noise_power_w: f64,
) -> Result<f64> {
    check_nonneg("tx_power_w", tx_power_w)?;
    check_positive("rate_bps", rate_bps)?;
    check_positive("noise_power_w", noise_power_w)?;
    let ratio = params.ref_gain * tx_power_w / (params.snr_threshold(rate_bps) * noise_power_w);
    Ok(params.ref_distance_m * libm::pow(ratio, 1.0 / params.path_loss_exponent))
}

/// Open ball of receivers guaranteed to decode a transmitter whose position
/// is only known up to a closed ball. `None` means the region is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct GuaranteedRegion {
    center: DVector<f64>,
    radius: Option<f64>,
}

impl GuaranteedRegion {
    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    /// Radius of the open ball, or `None` when no receiver is guaranteed.
    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn is_empty(&self) -> bool {
        self.radius.is_none()
    }
}

pub fn guaranteed_region(pos_range: &Ball, comm_radius_m: f64) -> GuaranteedRegion {
    let r = comm_radius_m - pos_range.radius();
    GuaranteedRegion {
        center: pos_range.center().clone(),
        radius: (r > 0.0).then_some(r),
    }
}

/// Strict membership in the open guaranteed region; boundary points do not decode.
pub fn decodable(receiver_pos: &DVector<f64>, region: &GuaranteedRegion) -> bool {
    match region.radius {
        Some(r) => (receiver_pos - &region.center).norm() < r,
        None => false,
    }
}

/// Sign term of the second derivative of the communication radius in `tau`.
/// Negative values certify concavity of the guaranteed radius.
pub fn d2_sign(tau: f64, packet_bits: u32, step_s: f64, params: &ChannelParams) -> f64 {
    let m = packet_bits as f64;
    let bw = params.bandwidth_hz;
    let psi = params.path_loss_exponent;
    let x = libm::exp2(m / (tau * step_s * bw));
    2.0 * tau * step_s * bw * psi * (1.0 - x) + m * LN_2 * (psi + x)
}

/// `B_w -> infinity` limit of [`d2_sign`]: `-M ln2 (psi - 1)`.
pub fn d2_sign_wideband_limit(packet_bits: u32, path_loss_exponent: f64) -> f64 {
    -(packet_bits as f64) * LN_2 * (path_loss_exponent - 1.0)
}

/// Guaranteed radius at the worst point of a window of length `tau`
/// (`tau - 1` open-loop steps, exact control inputs).
pub fn window_gcr(
    tx_power_w: f64,
    rate: &RateConfig,
    params: &ChannelParams,
    pos_noise: f64,
    vel_noise: f64,
) -> Result<f64> {
    let radius = comm_radius(tx_power_w, rate, params)?;
    Ok(radius - noise_radius(rate.tau() - 1, rate.step_s(), pos_noise, vel_noise))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalTau {
    pub tau: usize,
    pub gcr_m: f64,
    /// `d2_sign < 0` held over the whole scan, so the profile is unimodal.
    pub certified: bool,
    /// The maximizer sits at the scan cap, so the true optimum may lie beyond it.
    pub at_cap: bool,
}

/// Window length maximizing the guaranteed radius, by exhaustive scan over
/// `1..=tau_max`. Ties resolve to the smallest `tau`.
pub fn optimal_tau(
    tx_power_w: f64,
    packet_bits: u32,
    step_s: f64,
    params: &ChannelParams,
    pos_noise: f64,
    vel_noise: f64,
    tau_max: usize,
) -> Result<OptimalTau> {
    if tau_max < 1 {
        return Err(Error::InvalidCount {
            name: "tau_max",
            value: tau_max,
        });
    }
    let mut best: Option<(usize, f64)> = None;
    let mut certified = true;
    for tau in 1..=tau_max {
        let rate = RateConfig::new(packet_bits, step_s, tau)?;
        let gcr = window_gcr(tx_power_w, &rate, params, pos_noise, vel_noise)?;
        if d2_sign(tau as f64, packet_bits, step_s, params) >= 0.0 {
            certified = false;
        }
        if best.map_or(true, |(_, g)| gcr > g) {
            best = Some((tau, gcr));
        }
    }
    let (tau, gcr_m) = best.expect("scan range is nonempty");
    Ok(OptimalTau {
        tau,
        gcr_m,
        certified,
        at_cap: tau == tau_max,
    })
}
