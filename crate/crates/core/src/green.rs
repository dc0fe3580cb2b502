//! Green function of the damped particle, the local-in-time coefficients
//! 2*Gamma(t) and Omega^2(t) of the exact master equation, and its
//! diffusion coefficients f(t), h(t).
//!
//! Free-particle Green functions are closed-form for both baths. A bound
//! particle (K > 0) goes through numerical inversion of the response
//! function; its local coefficients are not offered because they involve a
//! thrice-differentiated oscillatory integral.

use crate::error::{Error, Result};
use crate::model::{
    gamma_pm, memory_kernel, BathKind, Distributional, PhysicalConfig, TemperatureRegime,
};
use crate::quad;
use crate::spectral::{self, MomentKind};

/// G(t) and its first three derivatives. Units: G in time/mass.
#[derive(Debug, Clone, Copy)]
pub struct GreenEval {
    pub t: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

/// Local drift coefficients of the master equation at time t.
#[derive(Debug, Clone, Copy)]
pub struct LocalCoefficients {
    pub t: f64,
    pub two_gamma: f64,
    pub omega_sq: Distributional,
}

/// Diffusion coefficients of the master equation at time t, normalized as
/// in the equation itself: the momentum diffusion term is
/// `hbar m Gamma(t) h(t) d^2W/dp^2` and the cross term
/// `hbar Gamma(t) f(t) d^2W/dqdp`.
#[derive(Debug, Clone, Copy)]
pub struct DiffusionCoefficients {
    pub t: f64,
    pub f: f64,
    pub h: f64,
}

pub fn green(config: &PhysicalConfig, t: f64) -> Result<GreenEval> {
    if t < 0.0 {
        return Err(Error::Domain {
            op: "green",
            msg: format!("t = {t} < 0"),
        });
    }
    if !config.is_free_particle() {
        return green_numeric(config, t);
    }
    let m = config.mass();
    let zeta = config.friction();
    match config.bath.kind {
        BathKind::Ohmic => {
            let a = zeta / m;
            let e = (-a * t).exp();
            Ok(GreenEval {
                t,
                g: (1.0 - e) / zeta,
                g1: e / m,
                g2: -zeta * e / (m * m),
                g3: zeta * zeta * e / (m * m * m),
            })
        }
        BathKind::SingleRelaxationTime => {
            let (gp, gm) = gamma_pm(config)?;
            let delta = gp - gm;
            let ep = (-gp * t).exp();
            let em = (-gm * t).exp();
            Ok(GreenEval {
                t,
                g: (gp * gp * (1.0 - em) - gm * gm * (1.0 - ep)) / (m * gm * gp * delta),
                g1: (gp * em - gm * ep) / (m * delta),
                g2: gp * gm * (ep - em) / (m * delta),
                g3: gp * gm * (gm * em - gp * ep) / (m * delta),
            })
        }
    }
}

// K > 0: invert the response function numerically,
//   G(t)  = (2/pi) Int_0^inf Im{alpha} sin(wt) dw
//   G'(t) = (2/pi) Int_0^inf w Im{alpha} cos(wt) dw
//   G''(t)= -(2/pi) Int_0^inf w^2 Im{alpha} sin(wt) dw
// with panels isolating the resonance and accelerated oscillatory tails.
fn green_numeric(config: &PhysicalConfig, t: f64) -> Result<GreenEval> {
    let m = config.mass();
    let zeta = config.friction();
    let k = config.spring_constant();
    if t == 0.0 {
        // initial data plus the equation of motion at 0+
        let g2 = match config.bath.kind {
            BathKind::Ohmic => -zeta / (m * m),
            BathKind::SingleRelaxationTime => 0.0,
        };
        let g3 = match config.bath.kind {
            BathKind::Ohmic => (zeta * zeta / m - k) / (m * m),
            BathKind::SingleRelaxationTime => -(memory_kernel(config, 0.0)?.value + k) / (m * m),
        };
        return Ok(GreenEval {
            t,
            g: 0.0,
            g1: 1.0 / m,
            g2,
            g3,
        });
    }
    let g = inverse_sine_transform(config, t, 0)?;
    let g1 = inverse_sine_transform(config, t, 1)?;
    let g2 = inverse_sine_transform(config, t, 2)?;
    // third derivative by a centered stencil on G''; its own transform
    // does not converge
    let h = 1e-4 * m / zeta;
    let g3 = if t > 2.0 * h {
        let a = inverse_sine_transform(config, t - 2.0 * h, 2)?;
        let b = inverse_sine_transform(config, t - h, 2)?;
        let c = inverse_sine_transform(config, t + h, 2)?;
        let d = inverse_sine_transform(config, t + 2.0 * h, 2)?;
        (a - 8.0 * b + 8.0 * c - d) / (12.0 * h)
    } else {
        let b = inverse_sine_transform(config, t + h, 2)?;
        (b - g2) / h
    };
    Ok(GreenEval { t, g, g1, g2, g3 })
}

fn inverse_sine_transform(config: &PhysicalConfig, t: f64, order: usize) -> Result<f64> {
    let f = |w: f64| {
        let ia = crate::model::im_alpha(config, w);
        let phase = w * t;
        let trig = if order == 1 { phase.cos() } else { phase.sin() };
        let sign = if order == 2 { -1.0 } else { 1.0 };
        sign * (2.0 / std::f64::consts::PI) * ia * w.powi(order as i32) * trig
    };
    let m = config.mass();
    let zeta = config.friction();
    let w0 = (config.spring_constant() / m).sqrt();
    let width = 0.5 * zeta / m;
    let w_osc = 50.0 / t;
    let mut breaks = vec![0.0];
    for b in [
        w0 - 30.0 * width,
        w0 - 3.0 * width,
        w0,
        w0 + 3.0 * width,
        w0 + 30.0 * width,
        zeta / m,
        1.0 / t,
    ] {
        if b > 0.0 && b < w_osc {
            breaks.push(b);
        }
    }
    breaks.push(w_osc);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let head = quad::adaptive_panels(&f, &breaks, 1e-10, 1e-13)?;
    let tail = quad::oscillatory_tail(&f, w_osc, t)?;
    Ok(head.value + tail)
}

/// Residual of the integro-differential equation of motion,
/// `|m G'' + Int_0^t mu(t-u) G'(u) du + K G|`.
pub fn green_ode_residual(config: &PhysicalConfig, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain {
            op: "green_ode_residual",
            msg: format!("t = {t} must be positive"),
        });
    }
    let ge = green(config, t)?;
    let m = config.mass();
    let k = config.spring_constant();
    let conv = match config.bath.kind {
        // half of the delta kernel is inside the integration range
        BathKind::Ohmic => config.friction() * ge.g1,
        BathKind::SingleRelaxationTime => {
            let zeta = config.friction();
            let tau = config.bath.relaxation_time;
            let f = |u: f64| {
                let g1 = green(config, u).map(|e| e.g1).unwrap_or(f64::NAN);
                zeta / tau * (-(t - u) / tau).exp() * g1
            };
            // resolve both the kernel scale and the Green-function scale
            let mut breaks: Vec<f64> = vec![0.0];
            let mut s = t - 10.0 * tau;
            while s > 0.0 {
                breaks.push(s);
                s -= 10.0 * tau;
                if breaks.len() > 64 {
                    break;
                }
            }
            breaks.push(t);
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            quad::adaptive_panels(&f, &breaks, 1e-12, 1e-13)?.value
        }
    };
    Ok((m * ge.g2 + conv + k * ge.g).abs())
}

/// 2*Gamma(t) and Omega^2(t) from the Green function, free particle only.
///
/// Ohmic: 2*Gamma = zeta/m for all t, Omega^2 = 0 pointwise with a delta of
/// weight 2*zeta/m at t = 0. Exponential memory: closed forms with
/// 2*Gamma(0) = 0, Omega^2(0) = gamma_+ gamma_-, 2*Gamma(inf) = gamma_-.
pub fn local_coefficients(config: &PhysicalConfig, t: f64) -> Result<LocalCoefficients> {
    if t < 0.0 {
        return Err(Error::Domain {
            op: "local_coefficients",
            msg: format!("t = {t} < 0"),
        });
    }
    if !config.is_free_particle() {
        return Err(Error::Unsupported(
            "local coefficients for a bound particle need a thrice-differentiated \
             oscillatory inversion; only the free particle is supported"
                .into(),
        ));
    }
    let m = config.mass();
    let zeta = config.friction();
    // Wronskian-type denominator of the defining ratios; positive for both
    // supported models at all t
    let ge = green(config, t)?;
    let wr = ge.g1 * ge.g1 - ge.g * ge.g2;
    if !(wr > 0.0) {
        return Err(Error::Singularity(format!(
            "Gdot^2 - G Gddot = {wr} at t = {t}"
        )));
    }
    match config.bath.kind {
        BathKind::Ohmic => {
            let omega_sq = if t == 0.0 {
                Distributional::with_delta(0.0, 2.0 * zeta / m)
            } else {
                Distributional::regular(0.0)
            };
            Ok(LocalCoefficients {
                t,
                two_gamma: zeta / m,
                omega_sq,
            })
        }
        BathKind::SingleRelaxationTime => {
            let (gp, gm) = gamma_pm(config)?;
            let delta = gp - gm;
            // forms scaled by e^{-gp t} so nothing overflows at large t
            let edm = (-delta * t).exp();
            let epm = (-gp * t).exp();
            let den = (gp + gm) * (1.0 - edm) + delta * epm;
            let num = delta * ((gp + gm) * edm - gp * epm);
            let two_gamma = gm - num / den;
            let omega_sq = gp * gm * delta * epm / den;
            Ok(LocalCoefficients {
                t,
                two_gamma,
                omega_sq: Distributional::regular(omega_sq),
            })
        }
    }
}

/// The master-equation diffusion pieces as products,
/// `(P_f, P_h) = (2 hbar Gamma f, 2 hbar Gamma h) = (<XF+FX>, <XdotF+FXdot>)`,
/// which stay finite at t -> 0 where Gamma itself vanishes.
pub fn diffusion_products(config: &PhysicalConfig, t: f64) -> Result<(f64, f64)> {
    if t < 0.0 {
        return Err(Error::Domain {
            op: "diffusion_products",
            msg: format!("t = {t} < 0"),
        });
    }
    if !config.is_free_particle() {
        return Err(Error::Unsupported(
            "diffusion coefficients are free-particle only".into(),
        ));
    }
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let m = config.mass();
    let zeta = config.friction();
    let kt = config.kt();
    match (config.thermal.regime, config.bath.kind) {
        (TemperatureRegime::HighTemperature, BathKind::Ohmic) => {
            // c_F(s) = 2 zeta kT delta(s); endpoint carries half weight
            Ok((0.0, 2.0 * zeta * kt / m))
        }
        (TemperatureRegime::HighTemperature, BathKind::SingleRelaxationTime) => {
            // classical correlation c_F(u) = kT mu(u), elementary integrals
            let tau = config.bath.relaxation_time;
            let g = spectral::green_exp_sum(config).unwrap();
            let gd = g.deriv();
            let conv = |e: &spectral::ExpSum| -> f64 {
                e.terms
                    .iter()
                    .map(|&(c, r)| c * (1.0 - (-(r + 1.0 / tau) * t).exp()) / (r + 1.0 / tau))
                    .sum()
            };
            let pf = 2.0 * kt * zeta / tau * conv(&g);
            let ph = 2.0 * kt * zeta / tau * conv(&gd);
            Ok((pf, ph))
        }
        _ => {
            // zero-point weights: single frequency integral against the
            // cosine transform of G and Gdot, cutoff-regularized
            let upper = match config.bath.kind {
                BathKind::Ohmic => Some(config.require_cutoff(
                    "the force-correlation convolution of the Ohmic bath at zero temperature",
                )?),
                BathKind::SingleRelaxationTime => config.cutoff(),
            };
            let pf = 2.0 * spectral::moment_integral(config, t, MomentKind::ReG, upper)?;
            let ph = 2.0 * spectral::moment_integral(config, t, MomentKind::ReGdot, upper)?;
            Ok((pf, ph))
        }
    }
}

/// f(t), h(t) themselves: the products above divided by `2 hbar Gamma(t)`.
pub fn diffusion_coefficients(config: &PhysicalConfig, t: f64) -> Result<DiffusionCoefficients> {
    if t <= 0.0 {
        return Err(Error::Domain {
            op: "diffusion_coefficients",
            msg: "t must be positive (Gamma(0) = 0 for the exponential-memory bath)".into(),
        });
    }
    let (pf, ph) = diffusion_products(config, t)?;
    let lc = local_coefficients(config, t)?;
    let denom = config.hbar() * lc.two_gamma;
    if denom == 0.0 {
        return Err(Error::Singularity(format!("2 hbar Gamma({t}) = 0")));
    }
    Ok(DiffusionCoefficients {
        t,
        f: pf / denom,
        h: ph / denom,
    })
}
