//! Second-moment ODE oracle: integrates the three coupled equations
//!
//!   d<x^2>/dt      = <xp+px>/m
//!   d<xp+px>/dt    = 2<p^2>/m - 2m Omega^2 <x^2> - 2 Gamma <xp+px> + P_f
//!   d<p^2>/dt      = -m Omega^2 <xp+px> - 4 Gamma <p^2> + m P_h
//!
//! with the exact time-dependent coefficients, using adaptive
//! Dormand-Prince 5(4). `P_f` and `P_h` are the diffusion products
//! `2 hbar Gamma f` and `2 hbar Gamma h`, which stay finite at t = 0.

use crate::error::{Error, Result};
use crate::fluctuations::master_equation_diffusion;
use crate::green::local_coefficients;
use crate::model::{BathKind, PhysicalConfig};

#[derive(Debug, Clone)]
pub struct MomentCurves {
    pub t: Vec<f64>,
    pub x2: Vec<f64>,
    pub xp_sym: Vec<f64>,
    pub p2: Vec<f64>,
}

const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rhs(config: &PhysicalConfig, t: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
    let m = config.mass();
    let lc = local_coefficients(config, t)?;
    let (d_qp, d_pp) = master_equation_diffusion(config, t)?;
    let two_gamma = lc.two_gamma;
    let omega_sq = lc.omega_sq.value;
    let [x2, xp, p2] = *y;
    Ok([
        xp / m,
        2.0 * p2 / m - 2.0 * m * omega_sq * x2 - two_gamma * xp + 2.0 * d_qp,
        -m * omega_sq * xp - 2.0 * two_gamma * p2 + 2.0 * d_pp,
    ])
}

/// Integrate from t = 0 with `initial = [<x^2>, <xp+px>, <p^2>]`, reporting
/// `n_out + 1` equally spaced samples including both endpoints.
pub fn integrate_moment_odes(
    config: &PhysicalConfig,
    initial: [f64; 3],
    t_final: f64,
    n_out: usize,
) -> Result<MomentCurves> {
    if config.bath.kind != BathKind::SingleRelaxationTime {
        return Err(Error::Unsupported(
            "the moment-ODE oracle needs finite local coefficients; the Ohmic bath \
             carries a delta drift at t = 0 (use a small relaxation time instead)"
                .into(),
        ));
    }
    if !(t_final > 0.0) || n_out == 0 {
        return Err(Error::Domain {
            op: "integrate_moment_odes",
            msg: "t_final must be positive and n_out nonzero".into(),
        });
    }
    let rtol = 1e-9;
    let atol = 1e-12;
    let mut out = MomentCurves {
        t: vec![0.0],
        x2: vec![initial[0]],
        xp_sym: vec![initial[1]],
        p2: vec![initial[2]],
    };
    let mut y = initial;
    let mut t = 0.0;
    let mut h = t_final / 1e4;
    let mut k1 = rhs(config, t, &y)?;
    let mut steps = 0usize;
    for i in 1..=n_out {
        let t_target = t_final * i as f64 / n_out as f64;
        while t < t_target {
            steps += 1;
            if steps > 2_000_000 {
                return Err(Error::Stiffness(format!(
                    "step budget exhausted at t = {t} (h = {h:.3e})"
                )));
            }
            h = h.min(t_target - t);
            // Dormand-Prince stages
            let mut k = [[0.0f64; 3]; 7];
            k[0] = k1;
            for stage in 0..6 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    for d in 0..3 {
                        ys[d] += h * DP_A[stage][j] * kj[d];
                    }
                }
                k[stage + 1] = rhs(config, t + DP_C[stage] * h, &ys)?;
            }
            // 5th-order solution is the last stage evaluation point
            let mut y5 = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                for d in 0..3 {
                    y5[d] += h * DP_A[5][j] * kj[d];
                }
            }
            let mut y4 = y;
            for (j, kj) in k.iter().enumerate() {
                for d in 0..3 {
                    y4[d] += h * DP_B4[j] * kj[d];
                }
            }
            let mut err: f64 = 0.0;
            for d in 0..3 {
                let sc = atol + rtol * y[d].abs().max(y5[d].abs());
                let e = (y5[d] - y4[d]) / sc;
                err += e * e;
            }
            let err = (err / 3.0).sqrt();
            if err <= 1.0 {
                t += h;
                y = y5;
                k1 = k[6]; // FSAL
            } else {
                k1 = k[0];
            }
            let factor = if err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = (h * factor).min(t_final);
            if h < 1e-15 * t_final {
                return Err(Error::Stiffness(format!("step collapsed at t = {t}")));
            }
        }
        out.t.push(t_target);
        out.x2.push(y[0]);
        out.xp_sym.push(y[1]);
        out.p2.push(y[2]);
    }
    Ok(out)
}
