//! Phase-space grid integrator for the master equation with
//! time-dependent coefficients,
//!
//!   dW/dt = -(p/m) dW/dq + m Omega^2(t) q dW/dp + 2 Gamma(t) d(pW)/dp
//!           + D_pp(t) d^2W/dp^2 + D_qp(t) d^2W/dq dp,
//!
//! restricted to the exponential-memory bath (finite coefficients) at the
//! classical thermal weight (finite diffusion). Strang splitting: half a
//! diffusion step (explicit centered differences), a full advection step
//! (semi-Lagrangian with RK4 backtracing and cubic interpolation, with the
//! exact phase-volume factor e^{2 Gamma dt}), then the second half
//! diffusion step. Coefficients are sampled mid-substep.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{spatial_density, InitialState};
use crate::fluctuations::master_equation_diffusion;
use crate::fluctuations::x_moments;
use crate::green::{green, local_coefficients};
use crate::model::{BathKind, PhysicalConfig, TemperatureRegime};
use crate::par;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseSpaceGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_q: usize,
    pub n_p: usize,
    pub dt: f64,
}

impl PhaseSpaceGrid {
    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.n_q as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.n_p as f64
    }

    /// Choose a domain covering the analytic solution out to `pad` standard
    /// deviations at both endpoints, and a stable step.
    pub fn auto(
        config: &PhysicalConfig,
        state: &InitialState,
        t_final: f64,
        n: usize,
        pad: f64,
    ) -> Result<Self> {
        let (mut q_lo, mut q_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut p_lo, mut p_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let t = t_final * frac;
            let d = spatial_density(state, config, t)?;
            let sd = d.variance.sqrt();
            q_lo = q_lo.min(d.mean - pad * sd);
            q_hi = q_hi.max(d.mean + pad * sd);
            let (pm, pv) = momentum_stats(config, state, t)?;
            let psd = pv.sqrt();
            p_lo = p_lo.min(pm - pad * psd);
            p_hi = p_hi.max(pm + pad * psd);
        }
        let mut grid = PhaseSpaceGrid {
            q_min: q_lo,
            q_max: q_hi,
            p_min: p_lo,
            p_max: p_hi,
            n_q: n,
            n_p: n,
            dt: 0.0,
        };
        grid.dt = 0.4 * stability_bound(config, &grid, t_final)?;
        Ok(grid)
    }
}

fn momentum_stats(config: &PhysicalConfig, state: &InitialState, t: f64) -> Result<(f64, f64)> {
    let m = config.mass();
    let ge = green(config, t)?;
    let xm = x_moments(config, t)?;
    let sigma = state.width();
    let mut p0_var = config.hbar() * config.hbar() / (4.0 * sigma * sigma);
    if state.is_thermal() {
        p0_var += m * config.kt();
    }
    let q0_var = sigma * sigma;
    let mean = m * m * ge.g2 * state.center();
    let var = m.powi(4) * ge.g2 * ge.g2 * q0_var + m * m * ge.g1 * ge.g1 * p0_var + m * m * xm.vv;
    Ok((mean, var))
}

// largest dt stable for the explicit diffusion substep over the whole run
fn stability_bound(config: &PhysicalConfig, grid: &PhaseSpaceGrid, t_final: f64) -> Result<f64> {
    let mut d_pp_max: f64 = 1e-300;
    let mut d_qp_max: f64 = 1e-300;
    for k in 0..=200 {
        let t = t_final * k as f64 / 200.0;
        let (d_qp, d_pp) = master_equation_diffusion(config, t)?;
        d_pp_max = d_pp_max.max(d_pp.abs());
        d_qp_max = d_qp_max.max(d_qp.abs());
    }
    let dp = grid.dp();
    let dq = grid.dq();
    let b1 = dp * dp / (2.0 * d_pp_max);
    let b2 = dq * dp / (2.0 * d_qp_max);
    Ok(b1.min(b2))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentSample {
    pub t: f64,
    pub mass: f64,
    pub x_mean: f64,
    pub x2_central: f64,
    pub p2_central: f64,
}

#[derive(Debug, Clone)]
pub struct PdeResult {
    pub grid: PhaseSpaceGrid,
    pub w: Vec<f64>,
    pub moments: Vec<MomentSample>,
}

impl PdeResult {
    /// Position density on the grid's q nodes.
    pub fn q_marginal(&self) -> Vec<f64> {
        let dp = self.grid.dp();
        (0..self.grid.n_q)
            .map(|i| {
                (0..self.grid.n_p)
                    .map(|j| self.w[i * self.grid.n_p + j])
                    .sum::<f64>()
                    * dp
            })
            .collect()
    }

    pub fn q_nodes(&self) -> Vec<f64> {
        let dq = self.grid.dq();
        (0..self.grid.n_q)
            .map(|i| self.grid.q_min + (i as f64 + 0.5) * dq)
            .collect()
    }
}

pub fn integrate_master_equation(
    config: &PhysicalConfig,
    state: &InitialState,
    grid: &PhaseSpaceGrid,
    t_final: f64,
) -> Result<PdeResult> {
    if config.bath.kind != BathKind::SingleRelaxationTime {
        return Err(Error::Unsupported(
            "the grid oracle needs finite drift coefficients; the Ohmic bath carries \
             a delta in Omega^2 at t = 0"
                .into(),
        ));
    }
    if config.thermal.regime != TemperatureRegime::HighTemperature {
        return Err(Error::Unsupported(
            "the grid oracle runs at the classical thermal weight where the diffusion \
             coefficients are finite"
                .into(),
        ));
    }
    if grid.n_q < 64 || grid.n_p < 64 {
        return Err(Error::InvalidConfig(format!(
            "grid counts must be at least 64, got {}x{}",
            grid.n_q, grid.n_p
        )));
    }
    // domain must cover the analytic spread at the final time
    {
        let d = spatial_density(state, config, t_final)?;
        let sd = d.variance.sqrt();
        let (pm, pv) = momentum_stats(config, state, t_final)?;
        let psd = pv.sqrt();
        if d.mean - 6.0 * sd < grid.q_min
            || d.mean + 6.0 * sd > grid.q_max
            || pm - 6.0 * psd < grid.p_min
            || pm + 6.0 * psd > grid.p_max
        {
            return Err(Error::InvalidConfig(
                "grid domain does not cover six standard deviations of the analytic \
                 solution at the final time"
                    .into(),
            ));
        }
    }
    let bound = stability_bound(config, grid, t_final)?;
    if grid.dt > bound {
        return Err(Error::Stability(format!(
            "dt = {} exceeds the explicit diffusion bound {bound:.3e}",
            grid.dt
        )));
    }
    let n_steps = (t_final / grid.dt).ceil() as usize;
    let dt = t_final / n_steps as f64;

    let (n_q, n_p) = (grid.n_q, grid.n_p);
    let (dq, dp) = (grid.dq(), grid.dp());
    let m = config.mass();

    // cell-centered initial data
    let wt0 = crate::evolution::initial_wigner(state, config)?;
    let mut w: Vec<f64> = {
        let vals = par::map_indexed(n_q, |i| -> Result<Vec<f64>> {
            let q = grid.q_min + (i as f64 + 0.5) * dq;
            (0..n_p)
                .map(|j| {
                    let p = grid.p_min + (j as f64 + 0.5) * dp;
                    wt0.wigner0(q, p)
                })
                .collect()
        });
        let mut flat = Vec::with_capacity(n_q * n_p);
        for row in vals {
            flat.extend(row?);
        }
        flat
    };

    let cell = dq * dp;
    let mut moments = Vec::new();
    let record_every = (n_steps / 64).max(1);
    record(&mut moments, grid, &w, 0.0, cell)?;

    let mut t = 0.0;
    for step in 0..n_steps {
        // Strang: half diffusion, full advection, half diffusion
        diffusion_substep(config, grid, &mut w, t + 0.25 * dt, 0.5 * dt)?;
        advection_substep(config, grid, &mut w, t + 0.5 * dt, dt, m)?;
        diffusion_substep(config, grid, &mut w, t + 0.75 * dt, 0.5 * dt)?;
        t += dt;
        if (step + 1) % record_every == 0 || step + 1 == n_steps {
            record(&mut moments, grid, &w, t, cell)?;
        }
    }
    Ok(PdeResult {
        grid: *grid,
        w,
        moments,
    })
}

fn record(
    moments: &mut Vec<MomentSample>,
    grid: &PhaseSpaceGrid,
    w: &[f64],
    t: f64,
    cell: f64,
) -> Result<()> {
    let (n_q, n_p) = (grid.n_q, grid.n_p);
    let (dq, dp) = (grid.dq(), grid.dp());
    let (mut mass, mut sx, mut sxx, mut sp, mut spp) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n_q {
        let q = grid.q_min + (i as f64 + 0.5) * dq;
        for j in 0..n_p {
            let p = grid.p_min + (j as f64 + 0.5) * dp;
            let v = w[i * n_p + j];
            mass += v;
            sx += v * q;
            sxx += v * q * q;
            sp += v * p;
            spp += v * p * p;
        }
    }
    mass *= cell;
    sx *= cell;
    sxx *= cell;
    sp *= cell;
    spp *= cell;
    if (mass - 1.0).abs() > 1e-4 {
        return Err(Error::MassLoss((mass - 1.0).abs()));
    }
    let x_mean = sx / mass;
    let p_mean = sp / mass;
    moments.push(MomentSample {
        t,
        mass,
        x_mean,
        x2_central: sxx / mass - x_mean * x_mean,
        p2_central: spp / mass - p_mean * p_mean,
    });
    Ok(())
}

fn diffusion_substep(
    config: &PhysicalConfig,
    grid: &PhaseSpaceGrid,
    w: &mut Vec<f64>,
    t_coeff: f64,
    dt: f64,
) -> Result<()> {
    let (d_qp, d_pp) = master_equation_diffusion(config, t_coeff)?;
    let (n_q, n_p) = (grid.n_q, grid.n_p);
    let (dq, dp) = (grid.dq(), grid.dp());
    let c_pp = d_pp * dt / (dp * dp);
    let c_qp = d_qp * dt / (4.0 * dq * dp);
    let old = std::mem::take(w);
    let rows = par::map_indexed(n_q, |i| {
        let mut row = vec![0.0f64; n_p];
        let at = |ii: isize, jj: isize| -> f64 {
            if ii < 0 || jj < 0 || ii >= n_q as isize || jj >= n_p as isize {
                0.0
            } else {
                old[ii as usize * n_p + jj as usize]
            }
        };
        let ii = i as isize;
        for (j, out) in row.iter_mut().enumerate() {
            let jj = j as isize;
            let center = at(ii, jj);
            let lap_p = at(ii, jj + 1) - 2.0 * center + at(ii, jj - 1);
            let cross =
                at(ii + 1, jj + 1) - at(ii + 1, jj - 1) - at(ii - 1, jj + 1) + at(ii - 1, jj - 1);
            *out = center + c_pp * lap_p + c_qp * cross;
        }
        row
    });
    let mut flat = Vec::with_capacity(n_q * n_p);
    for row in rows {
        flat.extend(row);
    }
    *w = flat;
    Ok(())
}

fn advection_substep(
    config: &PhysicalConfig,
    grid: &PhaseSpaceGrid,
    w: &mut Vec<f64>,
    t_coeff: f64,
    dt: f64,
    m: f64,
) -> Result<()> {
    let lc = local_coefficients(config, t_coeff)?;
    let two_gamma = lc.two_gamma;
    let omega_sq = lc.omega_sq.value;
    let (n_q, n_p) = (grid.n_q, grid.n_p);
    let (dq, dp) = (grid.dq(), grid.dp());
    let jacobian = (two_gamma * dt).exp();
    let old = std::mem::take(w);
    let rows = par::map_indexed(n_q, |i| {
        let q0 = grid.q_min + (i as f64 + 0.5) * dq;
        let mut row = vec![0.0f64; n_p];
        for (j, out) in row.iter_mut().enumerate() {
            let p0 = grid.p_min + (j as f64 + 0.5) * dp;
            // backtrace under the frozen mid-step field
            let f = |q: f64, p: f64| (p / m, -m * omega_sq * q - two_gamma * p);
            let (mut q, mut p) = (q0, p0);
            let h = -dt;
            let (k1q, k1p) = f(q, p);
            let (k2q, k2p) = f(q + 0.5 * h * k1q, p + 0.5 * h * k1p);
            let (k3q, k3p) = f(q + 0.5 * h * k2q, p + 0.5 * h * k2p);
            let (k4q, k4p) = f(q + h * k3q, p + h * k3p);
            q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            *out = jacobian * cubic_sample(&old, grid, n_q, n_p, q, p);
        }
        row
    });
    let mut flat = Vec::with_capacity(n_q * n_p);
    for row in rows {
        flat.extend(row);
    }
    *w = flat;
    Ok(())
}

// tensor-product 4-point Lagrange interpolation; zero outside the grid
fn cubic_sample(w: &[f64], grid: &PhaseSpaceGrid, n_q: usize, n_p: usize, q: f64, p: f64) -> f64 {
    let (dq, dp) = (grid.dq(), grid.dp());
    let fq = (q - grid.q_min) / dq - 0.5;
    let fp = (p - grid.p_min) / dp - 0.5;
    if fq < -1.0 || fp < -1.0 || fq > n_q as f64 || fp > n_p as f64 {
        return 0.0;
    }
    let iq = fq.floor() as isize;
    let ip = fp.floor() as isize;
    let xq = fq - iq as f64;
    let xp = fp - ip as f64;
    let lq = lagrange4(xq);
    let lp = lagrange4(xp);
    let mut acc = 0.0;
    for (a, &cq) in lq.iter().enumerate() {
        let qi = iq - 1 + a as isize;
        if qi < 0 || qi >= n_q as isize {
            continue;
        }
        let base = qi as usize * n_p;
        for (b, &cp) in lp.iter().enumerate() {
            let pj = ip - 1 + b as isize;
            if pj < 0 || pj >= n_p as isize {
                continue;
            }
            acc += cq * cp * w[base + pj as usize];
        }
    }
    acc
}

#[inline]
fn lagrange4(x: f64) -> [f64; 4] {
    // nodes at -1, 0, 1, 2 relative to the cell
    let xm1 = x + 1.0;
    let x0 = x;
    let x1 = x - 1.0;
    let x2 = x - 2.0;
    [
        -x0 * x1 * x2 / 6.0,
        xm1 * x1 * x2 / 2.0,
        -xm1 * x0 * x2 / 2.0,
        xm1 * x0 * x1 / 6.0,
    ]
}
