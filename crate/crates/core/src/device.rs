//! Phenomenological charge-trap junction simulator.
//!
//! The junction is modelled as a continuous-time Markov chain over the number
//! of trapped electrons `m ∈ {0..=M}`. Each empty site captures with rate
//! `λc` and each filled site releases with rate `λr`, both scaled by the same
//! exponential bias factor `exp(I_BIAS / I0)`. The ideal output level is
//! `V0 − m·ΔV`; it is smoothed by a first-order low-pass standing in for the
//! stray capacitance of the measurement setup, sampled at `fs`, and corrupted
//! by additive white Gaussian noise.
//!
//! For a faithful discrete low-pass the RC time constant should satisfy
//! `τ_RC ≤ 0.1 / λ_total`; larger values blur consecutive events together.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Stream ids used to split one seed into independent generators.
const OCCUPANCY_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceParams {
    /// Number of trap sites `M`.
    pub max_trapped: u32,
    /// Per-site capture rate at zero bias, events/s.
    pub capture_rate_base: f64,
    /// Per-site release rate at zero bias, events/s.
    pub release_rate_base: f64,
    /// Bias current, A.
    pub bias_current: f64,
    /// Bias scale of the exponential rate law, A.
    pub bias_scale: f64,
    /// Voltage change per trapped electron, V.
    pub level_step: f64,
    /// Output level with all sites empty, V.
    pub baseline: f64,
    /// Standard deviation of additive sample noise, V.
    pub noise_sigma: f64,
    /// Low-pass time constant, s. Zero disables the filter.
    pub rc_time_constant: f64,
    /// Samples per second.
    pub sample_rate: f64,
    /// Trace length, s.
    pub duration: f64,
    pub seed: u64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            max_trapped: 1,
            capture_rate_base: 9.0e3,
            release_rate_base: 9.0e3,
            bias_current: 20e-9,
            bias_scale: 20e-9,
            level_step: 1e-3,
            baseline: 0.0,
            noise_sigma: 5e-5,
            rc_time_constant: 0.0,
            sample_rate: 12.5e6,
            duration: 0.01,
            seed: 0,
        }
    }
}

impl DeviceParams {
    /// Number of samples the trace will hold.
    pub fn sample_count(&self) -> usize {
        // Tolerate representation error in products such as 12.5e6 * 0.01.
        let raw = self.sample_rate * self.duration;
        (raw * (1.0 + 1e-12)).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        fn finite_nonneg(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(format!(
                    "{name} must be finite and >= 0, got {v}"
                )))
            }
        }
        fn finite_pos(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(format!(
                    "{name} must be finite and > 0, got {v}"
                )))
            }
        }
        if self.max_trapped == 0 {
            return Err(Error::param("max_trapped must be >= 1"));
        }
        finite_nonneg("capture_rate_base", self.capture_rate_base)?;
        finite_nonneg("release_rate_base", self.release_rate_base)?;
        finite_nonneg("bias_current", self.bias_current)?;
        finite_pos("bias_scale", self.bias_scale)?;
        finite_pos("level_step", self.level_step)?;
        if !self.baseline.is_finite() {
            return Err(Error::param("baseline must be finite"));
        }
        finite_nonneg("noise_sigma", self.noise_sigma)?;
        finite_nonneg("rc_time_constant", self.rc_time_constant)?;
        finite_pos("sample_rate", self.sample_rate)?;
        finite_pos("duration", self.duration)?;
        if self.sample_count() < 1 {
            return Err(Error::param(format!(
                "sample_rate * duration = {} yields no samples",
                self.sample_rate * self.duration
            )));
        }
        self.capture_rate()?;
        self.release_rate()?;
        Ok(())
    }

    /// Bias-scaled per-site capture rate.
    pub fn capture_rate(&self) -> Result<f64> {
        effective_rate(self.capture_rate_base, self.bias_current, self.bias_scale)
    }

    /// Bias-scaled per-site release rate.
    pub fn release_rate(&self) -> Result<f64> {
        effective_rate(self.release_rate_base, self.bias_current, self.bias_scale)
    }

    /// Ideal output voltage at occupancy `m`.
    pub fn level_voltage(&self, m: u32) -> f64 {
        self.baseline - f64::from(m) * self.level_step
    }
}

/// Exponential rate law `base · exp(bias / scale)`.
pub fn effective_rate(base_rate: f64, bias_current: f64, bias_scale: f64) -> Result<f64> {
    if !(base_rate >= 0.0) || !(bias_scale > 0.0) {
        return Err(Error::param(format!(
            "effective_rate needs base_rate >= 0 and bias_scale > 0 (got {base_rate}, {bias_scale})"
        )));
    }
    if base_rate == 0.0 {
        return Ok(0.0);
    }
    let rate = base_rate * (bias_current / bias_scale).exp();
    if rate.is_finite() {
        Ok(rate)
    } else {
        Err(Error::Overflow(format!(
            "base_rate {base_rate:e} * exp(bias_current {bias_current:e} / bias_scale {bias_scale:e}) is not finite"
        )))
    }
}

/// Where a trace came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMeta {
    Simulated(DeviceParams),
    Imported(String),
}

/// Uniformly sampled output voltage.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageTrace {
    pub samples: Vec<f64>,
    /// Seconds per sample.
    pub dt: f64,
    pub meta: TraceMeta,
}

impl VoltageTrace {
    pub fn new(samples: Vec<f64>, dt: f64, meta: TraceMeta) -> Result<Self> {
        let trace = Self { samples, dt, meta };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param(format!(
                "trace dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.samples.is_empty() {
            return Err(Error::InsufficientData {
                what: "voltage trace",
                needed: 1,
                got: 0,
            });
        }
        if let Some(i) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("trace sample {i} is not finite")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    /// Covered time span, `len · dt`.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }
}

/// Piecewise-constant occupancy trajectory of the Markov chain.
///
/// `times[i]` is the instant the occupancy switched to `levels[i + 1]`;
/// `levels[0]` is the initial occupancy at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyPath {
    pub levels: Vec<u32>,
    pub times: Vec<f64>,
    pub end_time: f64,
}

impl OccupancyPath {
    pub fn event_count(&self) -> usize {
        self.times.len()
    }

    /// Occupancy in effect at time `t`.
    pub fn level_at(&self, t: f64) -> u32 {
        let idx = self.times.partition_point(|&e| e <= t);
        self.levels[idx]
    }
}

/// Draw the Markov trajectory over `[0, duration]` (Gillespie algorithm).
///
/// The initial occupancy is drawn from the stationary distribution,
/// `Binomial(M, λc / (λc + λr))`, or zero when both rates vanish.
pub fn simulate_occupancy(params: &DeviceParams) -> Result<OccupancyPath> {
    params.validate()?;
    let capture = params.capture_rate()?;
    let release = params.release_rate()?;
    let max = params.max_trapped;
    let end_time = params.sample_count() as f64 / params.sample_rate;

    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    rng.set_stream(OCCUPANCY_STREAM);

    let mut m = if capture + release > 0.0 {
        let p = capture / (capture + release);
        Binomial::new(u64::from(max), p)
            .map_err(|e| Error::param(format!("stationary occupancy: {e}")))?
            .sample(&mut rng) as u32
    } else {
        0
    };

    let mut levels = vec![m];
    let mut times = Vec::new();
    let mut t = 0.0;
    loop {
        let capture_total = f64::from(max - m) * capture;
        let release_total = f64::from(m) * release;
        let total = capture_total + release_total;
        if total <= 0.0 {
            break;
        }
        let wait: f64 = Exp::new(total)
            .map_err(|e| Error::param(format!("event rate: {e}")))?
            .sample(&mut rng);
        t += wait;
        if t > end_time {
            break;
        }
        let pick: f64 = rng.random::<f64>() * total;
        if pick < capture_total {
            m += 1;
        } else {
            m -= 1;
        }
        times.push(t);
        levels.push(m);
    }
    Ok(OccupancyPath {
        levels,
        times,
        end_time,
    })
}

/// Sample an occupancy path into a voltage trace: level mapping, optional
/// one-pole low-pass at the sample rate, then additive Gaussian noise.
pub fn render_trace(params: &DeviceParams, path: &OccupancyPath) -> Result<VoltageTrace> {
    params.validate()?;
    let n = params.sample_count();
    let dt = 1.0 / params.sample_rate;
    let mut noise_rng = ChaCha20Rng::seed_from_u64(params.seed);
    noise_rng.set_stream(NOISE_STREAM);

    let smoothing = if params.rc_time_constant > 0.0 {
        Some(1.0 - (-dt / params.rc_time_constant).exp())
    } else {
        None
    };

    let mut samples = Vec::with_capacity(n);
    let mut next_event = 0usize;
    let mut level = path.levels[0];
    let mut filtered = params.level_voltage(level);
    for k in 0..n {
        let t = k as f64 * dt;
        while next_event < path.times.len() && path.times[next_event] <= t {
            next_event += 1;
            level = path.levels[next_event];
        }
        let ideal = params.level_voltage(level);
        filtered = match smoothing {
            Some(a) => filtered + a * (ideal - filtered),
            None => ideal,
        };
        let noise = if params.noise_sigma > 0.0 {
            let z: f64 = noise_rng.sample(StandardNormal);
            params.noise_sigma * z
        } else {
            0.0
        };
        samples.push(filtered + noise);
    }
    VoltageTrace::new(samples, dt, TraceMeta::Simulated(params.clone()))
}

/// Simulate a complete voltage trace. Deterministic in `params` (seed included).
pub fn simulate_trace(params: &DeviceParams) -> Result<VoltageTrace> {
    let path = simulate_occupancy(params)?;
    render_trace(params, &path)
}

/// Rate of sample-to-sample jumps larger than `threshold`, per second.
pub fn edge_frequency(trace: &VoltageTrace, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::param(format!(
            "threshold must be > 0, got {threshold}"
        )));
    }
    if trace.samples.len() < 2 {
        return Err(Error::InsufficientData {
            what: "edge frequency",
            needed: 2,
            got: trace.samples.len(),
        });
    }
    trace.validate()?;
    let edges = trace
        .samples
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > threshold)
        .count();
    Ok(edges as f64 / trace.duration())
}
