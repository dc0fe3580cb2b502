//! Discrete-bath Monte Carlo oracle.
//!
//! The bath is realized as J independent oscillators with equally spaced
//! frequencies whose weights reproduce the memory kernel below the
//! recurrence time 2 pi / dw. Initial bath coordinates are sampled from
//! their thermal Wigner functions, the particle from the initial state's
//! Wigner function (Gaussian families only), the force is summed directly
//! and the fluctuating position accumulated by trapezoidal convolution.
//!
//! Sampling is reproducible under any parallel schedule: each sample uses
//! its own counter-keyed stream of one generator seeded by (seed, index),
//! and block sums are reduced by a fixed pairwise tree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::InitialState;
use crate::green::green;
use crate::model::{memory_transform_re, PhysicalConfig, TemperatureRegime};
use crate::par;
use crate::quad::coth;

#[derive(Debug, Clone, Copy)]
pub struct BathMode {
    pub mass: f64,
    pub omega: f64,
}

#[derive(Debug, Clone)]
pub struct DiscreteBath {
    pub modes: Vec<BathMode>,
    pub omega_max: f64,
    pub recurrence_time: f64,
}

/// Midpoint discretization `w_j = (j - 1/2) dw` with weights
/// `m_j w_j^2 = (2/pi) Re{mu(w_j)} dw`.
pub fn build_discrete_bath(
    config: &PhysicalConfig,
    j_modes: usize,
    omega_max: f64,
) -> Result<DiscreteBath> {
    if j_modes < 100 {
        return Err(Error::Domain {
            op: "build_discrete_bath",
            msg: format!("need at least 100 modes, got {j_modes}"),
        });
    }
    if !(omega_max > 0.0) {
        return Err(Error::Domain {
            op: "build_discrete_bath",
            msg: "omega_max must be positive".into(),
        });
    }
    let dw = omega_max / j_modes as f64;
    let modes = (0..j_modes)
        .map(|j| {
            let omega = (j as f64 + 0.5) * dw;
            let weight = 2.0 / std::f64::consts::PI * memory_transform_re(config, omega) * dw;
            BathMode {
                mass: weight / (omega * omega),
                omega,
            }
        })
        .collect();
    Ok(DiscreteBath {
        modes,
        omega_max,
        recurrence_time: 2.0 * std::f64::consts::PI / dw,
    })
}

impl DiscreteBath {
    /// Reconstructed memory kernel `sum m_j w_j^2 cos(w_j t)`.
    pub fn memory_kernel(&self, t: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| m.mass * m.omega * m.omega * (m.omega * t).cos())
            .sum()
    }

    /// `sum m_j w_j^2`, the kernel at t = 0.
    pub fn mass_sum(&self) -> f64 {
        self.modes.iter().map(|m| m.mass * m.omega * m.omega).sum()
    }
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub j_modes: usize,
    pub omega_max: f64,
    pub t_grid: Vec<f64>,
    /// bins for an x-histogram at the last grid time (0 disables it)
    pub hist_bins: usize,
    /// histogram range; defaults to mean +- 6 standard deviations of the
    /// sampled coordinate predicted by the closed forms
    pub hist_range: Option<(f64, f64)>,
}

impl McConfig {
    pub fn new(
        samples: usize,
        seed: u64,
        j_modes: usize,
        omega_max: f64,
        t_grid: Vec<f64>,
    ) -> Self {
        McConfig {
            samples,
            seed,
            j_modes,
            omega_max,
            t_grid,
            hist_bins: 0,
            hist_range: None,
        }
    }
}

/// Histogram of the sampled coordinate at the last grid time, normalized
/// to a probability density, with per-bin standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct McHistogram {
    pub t: f64,
    pub lo: f64,
    pub hi: f64,
    pub density: Vec<f64>,
    pub se: Vec<f64>,
}

impl McHistogram {
    pub fn centers(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.density.len() as f64;
        (0..self.density.len())
            .map(|i| self.lo + (i as f64 + 0.5) * w)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct McMoment {
    pub t: f64,
    /// mean and standard error of X(t)^2 over bath realizations
    pub x2_mean: f64,
    pub x2_se: f64,
    /// mean, variance and their standard errors for the full position x(t)
    pub x_mean: f64,
    pub x_mean_se: f64,
    pub x_var: f64,
    pub x_var_se: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub samples: usize,
    pub seed: u64,
    pub dt: f64,
    pub recurrence_time: f64,
    pub moments: Vec<McMoment>,
    pub histogram: Option<McHistogram>,
}

pub fn mc_estimate(
    config: &PhysicalConfig,
    state: &InitialState,
    mc: &McConfig,
) -> Result<McEstimate> {
    run_mc(config, state, mc, false)
}

/// Sequential twin of [`mc_estimate`]; bit-identical results.
pub fn mc_estimate_seq(
    config: &PhysicalConfig,
    state: &InitialState,
    mc: &McConfig,
) -> Result<McEstimate> {
    run_mc(config, state, mc, true)
}

const BLOCK: usize = 512;

// per-block accumulator, one slot per requested time
#[derive(Clone)]
struct BlockSums {
    x2: Vec<f64>,
    x4: Vec<f64>,
    x: Vec<f64>,
    xx: Vec<f64>,
    hist: Vec<f64>,
}

fn run_mc(
    config: &PhysicalConfig,
    state: &InitialState,
    mc: &McConfig,
    force_seq: bool,
) -> Result<McEstimate> {
    state.validate()?;
    if state.is_cat() {
        return Err(Error::Unsupported(
            "cat states have negative Wigner regions and cannot be sampled classically".into(),
        ));
    }
    if mc.t_grid.is_empty() || mc.samples == 0 {
        return Err(Error::Domain {
            op: "mc_estimate",
            msg: "empty time grid or zero samples".into(),
        });
    }
    let bath = build_discrete_bath(config, mc.j_modes, mc.omega_max)?;
    let t_max = mc.t_grid.iter().cloned().fold(0.0f64, f64::max);
    if t_max >= bath.recurrence_time {
        return Err(Error::RecurrenceExceeded {
            t: t_max,
            t_rec: bath.recurrence_time,
        });
    }
    let m = config.mass();
    let hbar = config.hbar();
    let kt = config.kt();

    // convolution grid resolving the kernel scale AND the fastest bath
    // mode; without the cutoff cap the trapezoid aliases the unresolved
    // oscillations into a percent-level upward bias of <X^2>
    let scale = match config.bath.kind {
        crate::model::BathKind::Ohmic => m / config.friction(),
        crate::model::BathKind::SingleRelaxationTime => {
            config.bath.relaxation_time.min(m / config.friction())
        }
    };
    let dt_raw = (scale / 50.0).min(1.5 / mc.omega_max);
    let n_steps = (t_max / dt_raw).ceil() as usize;
    let dt = t_max / n_steps as f64;
    // snap requested times onto the grid
    let t_idx: Vec<usize> = mc
        .t_grid
        .iter()
        .map(|&t| (t / dt).round() as usize)
        .collect();
    let n_t = t_idx.len();

    // trapezoidal Green-function weights per requested time:
    // X(t_r) = dt * sum_i w_r[i] G(t_r - u_i) F(u_i)
    let mut g_weights: Vec<Vec<f64>> = Vec::with_capacity(n_t);
    for &idx in &t_idx {
        let mut w = vec![0.0; idx + 1];
        for (i, wi) in w.iter_mut().enumerate() {
            let ge = green(config, (idx - i) as f64 * dt)?;
            *wi = ge.g * dt;
        }
        if idx > 0 {
            w[0] *= 0.5;
            w[idx] *= 0.5;
        }
        g_weights.push(w);
    }
    // mean propagation factors for the full coordinate
    let mut mg1 = Vec::with_capacity(n_t);
    let mut gg = Vec::with_capacity(n_t);
    for &idx in &t_idx {
        let ge = green(config, idx as f64 * dt)?;
        mg1.push(m * ge.g1);
        gg.push(ge.g);
    }

    // per-mode thermal widths and rotation steps
    let mut mode_data = Vec::with_capacity(bath.modes.len());
    for mode in &bath.modes {
        let occ = match config.thermal.regime {
            TemperatureRegime::HighTemperature => 2.0 * kt / (hbar * mode.omega),
            TemperatureRegime::ZeroTemperature => 1.0,
            TemperatureRegime::Exact => {
                if kt == 0.0 {
                    1.0
                } else {
                    coth(hbar * mode.omega / (2.0 * kt))
                }
            }
        };
        let q_sd = (hbar * occ / (2.0 * mode.mass * mode.omega)).sqrt();
        let p_sd = (mode.mass * hbar * mode.omega * occ / 2.0).sqrt();
        mode_data.push(ModeData {
            q_amp: mode.mass * mode.omega * mode.omega,
            p_amp: mode.omega,
            q_sd,
            p_sd,
            cos_dt: (mode.omega * dt).cos(),
            sin_dt: (mode.omega * dt).sin(),
        });
    }

    let sigma = state.width();
    let q0_mean = state.center();
    let q0_sd = sigma;
    let mut p0_var = hbar * hbar / (4.0 * sigma * sigma);
    if state.is_thermal() {
        p0_var += m * kt;
    }
    let p0_sd = p0_var.sqrt();

    // histogram setup for the last requested time
    let (hist_lo, hist_hi) = match (mc.hist_bins, mc.hist_range) {
        (0, _) => (0.0, 0.0),
        (_, Some((lo, hi))) => {
            if !(hi > lo) {
                return Err(Error::Domain {
                    op: "mc_estimate",
                    msg: format!("histogram range [{lo}, {hi}] is empty"),
                });
            }
            (lo, hi)
        }
        (_, None) => {
            let last = *t_idx.last().unwrap() as f64 * dt;
            let den = crate::evolution::spatial_density(state, config, last)?;
            let sd = den.variance.sqrt();
            (den.mean - 6.0 * sd, den.mean + 6.0 * sd)
        }
    };
    let hist_last = n_t - 1;

    let n_blocks = mc.samples.div_ceil(BLOCK);
    let work = |b: usize| -> BlockSums {
        let mut sums = BlockSums {
            x2: vec![0.0; n_t],
            x4: vec![0.0; n_t],
            x: vec![0.0; n_t],
            xx: vec![0.0; n_t],
            hist: vec![0.0; mc.hist_bins],
        };
        let lo = b * BLOCK;
        let hi = ((b + 1) * BLOCK).min(mc.samples);
        let mut force = vec![0.0f64; n_steps + 1];
        for sample in lo..hi {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(sample as u64 + 1);
            force.iter_mut().for_each(|f| *f = 0.0);
            for md in &mode_data {
                let q_j: f64 = md.q_sd * normal(&mut rng);
                let p_j: f64 = md.p_sd * normal(&mut rng);
                let (aq, ap) = (q_j * md.q_amp, p_j * md.p_amp);
                let mut c = 1.0f64;
                let mut s = 0.0f64;
                for f in force.iter_mut() {
                    *f += aq * c + ap * s;
                    let c1 = c * md.cos_dt - s * md.sin_dt;
                    s = s * md.cos_dt + c * md.sin_dt;
                    c = c1;
                }
            }
            let q0 = q0_mean + q0_sd * normal(&mut rng);
            let v0 = p0_sd * normal(&mut rng) / m;
            for (r, w) in g_weights.iter().enumerate() {
                let x_fluct: f64 = w.iter().zip(force.iter()).map(|(a, b)| a * b).sum();
                let x_full = mg1[r] * q0 + m * gg[r] * v0 + x_fluct;
                sums.x2[r] += x_fluct * x_fluct;
                sums.x4[r] += x_fluct * x_fluct * x_fluct * x_fluct;
                sums.x[r] += x_full;
                sums.xx[r] += x_full * x_full;
                if mc.hist_bins > 0 && r == hist_last {
                    let f = (x_full - hist_lo) / (hist_hi - hist_lo);
                    if (0.0..1.0).contains(&f) {
                        sums.hist[(f * mc.hist_bins as f64) as usize] += 1.0;
                    }
                }
            }
        }
        sums
    };
    let blocks: Vec<BlockSums> = if force_seq {
        par::map_indexed_seq(n_blocks, work)
    } else {
        par::map_indexed(n_blocks, work)
    };

    let n = mc.samples as f64;
    let mut moments = Vec::with_capacity(n_t);
    for (r, &idx) in t_idx.iter().enumerate() {
        let col = |pick: &dyn Fn(&BlockSums) -> f64| -> f64 {
            let vals: Vec<f64> = blocks.iter().map(pick).collect();
            par::tree_sum(&vals)
        };
        let sx2 = col(&|b: &BlockSums| b.x2[r]);
        let sx4 = col(&|b: &BlockSums| b.x4[r]);
        let sx = col(&|b: &BlockSums| b.x[r]);
        let sxx = col(&|b: &BlockSums| b.xx[r]);
        let x2_mean = sx2 / n;
        let x2_var = (sx4 / n - x2_mean * x2_mean).max(0.0);
        let x_mean = sx / n;
        let x_var = (sxx / n - x_mean * x_mean) * n / (n - 1.0);
        moments.push(McMoment {
            t: idx as f64 * dt,
            x2_mean,
            x2_se: (x2_var / n).sqrt(),
            x_mean,
            x_mean_se: (x_var / n).sqrt(),
            x_var,
            // Gaussian sampling distribution of the variance estimator
            x_var_se: x_var * (2.0 / (n - 1.0)).sqrt(),
        });
    }
    let histogram = if mc.hist_bins > 0 {
        let width = (hist_hi - hist_lo) / mc.hist_bins as f64;
        let mut density = Vec::with_capacity(mc.hist_bins);
        let mut se = Vec::with_capacity(mc.hist_bins);
        for b in 0..mc.hist_bins {
            let counts: Vec<f64> = blocks.iter().map(|s| s.hist[b]).collect();
            let count = par::tree_sum(&counts);
            let p = count / n;
            density.push(p / width);
            se.push((p * (1.0 - p) / n).sqrt() / width);
        }
        Some(McHistogram {
            t: *t_idx.last().unwrap() as f64 * dt,
            lo: hist_lo,
            hi: hist_hi,
            density,
            se,
        })
    } else {
        None
    };
    Ok(McEstimate {
        samples: mc.samples,
        seed: mc.seed,
        dt,
        recurrence_time: bath.recurrence_time,
        moments,
        histogram,
    })
}

struct ModeData {
    q_amp: f64,
    p_amp: f64,
    q_sd: f64,
    p_sd: f64,
    cos_dt: f64,
    sin_dt: f64,
}

// Box-Muller-free standard normal via the rand_distr machinery would pull
// per-call allocation; the polar method keeps the hot loop lean.
#[inline]
fn normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}
