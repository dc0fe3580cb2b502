//! Fluctuation moments: the stationary mean-square displacement s(t), the
//! second moments of the fluctuating position X(t), the phase-space
//! covariance matrix they assemble into, equilibrium moments of the bound
//! particle, and the cutoff-divergence probe.
//!
//! Closed forms are used where they exist (Ohmic bath at the high- and
//! zero-temperature weights, exponential-memory displacement at zero
//! temperature). Everything else runs through the spectral engine in
//! [`crate::spectral`], which is exact at any temperature.

use crate::error::{Error, Result};
use crate::green::green;
use crate::model::{gamma_pm, im_alpha, BathKind, PhysicalConfig, TemperatureRegime};
use crate::quad::{self, thermal_weight};
use crate::special::{special_i, special_i_deriv, special_i_second};
use crate::spectral::{self, MomentKind};

/// A quantity that may exist only through a frequency cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularized {
    Finite(f64),
    CutoffDependent { value: f64, cutoff: f64 },
    Divergent,
}

impl Regularized {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Regularized::Finite(v) => Some(v),
            Regularized::CutoffDependent { value, .. } => Some(value),
            Regularized::Divergent => None,
        }
    }

    pub fn require(&self, what: &str) -> Result<f64> {
        self.value().ok_or_else(|| Error::Divergent {
            what: what.to_string(),
        })
    }
}

/// Mean-square displacement of the stationary process and its derivatives.
#[derive(Debug, Clone)]
pub struct DisplacementEval {
    pub t: f64,
    pub s: f64,
    pub s1: f64,
    /// s''(t); at t = 0 this equals the resolved value of `s2_at_0`
    /// (NaN when that is divergent and no cutoff is set).
    pub s2: f64,
    pub s2_at_0: Regularized,
    /// Fourth derivative at the origin; enters the exponential-memory
    /// divergence bookkeeping.
    pub s4_at_0: Option<Regularized>,
}

/// Second moments of the fluctuating position operator.
#[derive(Debug, Clone, Copy)]
pub struct XMoments {
    pub t: f64,
    pub xx: f64,
    pub vv: f64,
    pub xv_sym: f64,
    /// Cutoff used to regularize zero-point contributions, if any.
    pub cutoff: Option<f64>,
}

/// The 2x2 covariance of (p, q) fluctuations:
/// `[[m^2 <Xdot^2>, (m/2)<X Xdot + Xdot X>], [., <X^2>]]`.
#[derive(Debug, Clone, Copy)]
pub struct CovarianceMatrix {
    pub a_pp: f64,
    pub a_pq: f64,
    pub a_qq: f64,
}

impl CovarianceMatrix {
    pub fn det(&self) -> f64 {
        self.a_pp * self.a_qq - self.a_pq * self.a_pq
    }
}

/// Equilibrium position and velocity variances of the bound particle.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumMoments {
    pub x_sq: f64,
    pub v_sq: f64,
}

pub fn msd(config: &PhysicalConfig, t: f64) -> Result<DisplacementEval> {
    if t < 0.0 {
        return Err(Error::Domain {
            op: "msd",
            msg: format!("t = {t} < 0"),
        });
    }
    if !config.is_free_particle() {
        return Err(Error::Unsupported(
            "mean-square displacement is implemented for the free particle only".into(),
        ));
    }
    let m = config.mass();
    let zeta = config.friction();
    let hbar = config.hbar();
    let kt = config.kt();
    match (config.thermal.regime, config.bath.kind) {
        (TemperatureRegime::HighTemperature, _) => {
            // classical weight: s(t) = 2 kT Int_0^t G, any free-particle bath
            let g = spectral::green_exp_sum(config).unwrap();
            let ge = green(config, t)?;
            let g3_at_0 = green(config, 0.0)?.g3;
            Ok(DisplacementEval {
                t,
                s: 2.0 * kt * g.integral(t),
                s1: 2.0 * kt * ge.g,
                s2: 2.0 * kt * ge.g1,
                s2_at_0: Regularized::Finite(2.0 * kt / m),
                s4_at_0: Some(Regularized::Finite(2.0 * kt * g3_at_0)),
            })
        }
        (TemperatureRegime::ZeroTemperature, BathKind::Ohmic) => {
            let a = zeta / m;
            let pref = 2.0 * hbar / (std::f64::consts::PI * zeta);
            let s = pref * special_i(a * t);
            let s1 = pref * a * special_i_deriv(a * t);
            let s2_at_0 = match config.cutoff() {
                Some(wc) => Regularized::CutoffDependent {
                    value: hbar * zeta / (std::f64::consts::PI * m * m)
                        * ((m * m * wc * wc + zeta * zeta) / (zeta * zeta)).ln(),
                    cutoff: wc,
                },
                None => Regularized::Divergent,
            };
            let s2 = if t > 0.0 {
                pref * a * a * special_i_second(a * t)
            } else {
                s2_at_0.value().unwrap_or(f64::NAN)
            };
            // integral of (2 hbar/pi) w^4 Im alpha grows quadratically in
            // the cutoff for the Ohmic bath
            let s4_at_0 = match config.cutoff() {
                Some(wc) => {
                    let val = wc * wc / (2.0 * m * m)
                        - zeta * zeta / (2.0 * m * m * m * m)
                            * ((m * m * wc * wc + zeta * zeta) / (zeta * zeta)).ln();
                    Regularized::CutoffDependent {
                        value: -(2.0 * hbar * zeta / std::f64::consts::PI) * val,
                        cutoff: wc,
                    }
                }
                None => Regularized::Divergent,
            };
            Ok(DisplacementEval {
                t,
                s,
                s1,
                s2,
                s2_at_0,
                s4_at_0: Some(s4_at_0),
            })
        }
        (TemperatureRegime::ZeroTemperature, BathKind::SingleRelaxationTime) => {
            let (gp, gm) = gamma_pm(config)?;
            let den = gp * gp - gm * gm;
            let pref = 2.0 * hbar / (std::f64::consts::PI * zeta);
            let s = pref * (gp * gp * special_i(gm * t) - gm * gm * special_i(gp * t)) / den;
            let s1 = pref
                * (gp * gp * gm * special_i_deriv(gm * t) - gm * gm * gp * special_i_deriv(gp * t))
                / den;
            let c2 = pref * gp * gp * gm * gm / den;
            let s2_at_0 = Regularized::Finite(c2 * (gp / gm).ln());
            let s2 = if t > 0.0 {
                c2 * (special_i_second(gm * t) - special_i_second(gp * t))
            } else {
                s2_at_0.value().unwrap()
            };
            let s4_at_0 = match config.cutoff() {
                Some(wc) => Regularized::CutoffDependent {
                    value: -moment_weight_integral(config, 4, wc)?,
                    cutoff: wc,
                },
                None => Regularized::Divergent,
            };
            Ok(DisplacementEval {
                t,
                s,
                s1,
                s2,
                s2_at_0,
                s4_at_0: Some(s4_at_0),
            })
        }
        (TemperatureRegime::Exact, _) => {
            let wc = config.require_cutoff("the exact-weight displacement quadrature")?;
            let s = fd_integral(config, t, FdOrder::S, wc)?;
            let s1 = fd_integral(config, t, FdOrder::S1, wc)?;
            let s2_at_0 = Regularized::CutoffDependent {
                value: moment_weight_integral_thermal(config, 2, wc)?,
                cutoff: wc,
            };
            let s2 = if t > 0.0 {
                fd_integral(config, t, FdOrder::S2, wc)?
            } else {
                s2_at_0.value().unwrap()
            };
            let s4_at_0 = Regularized::CutoffDependent {
                value: -moment_weight_integral_thermal(config, 4, wc)?,
                cutoff: wc,
            };
            Ok(DisplacementEval {
                t,
                s,
                s1,
                s2,
                s2_at_0,
                s4_at_0: Some(s4_at_0),
            })
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum FdOrder {
    /// integrand factor (1 - cos wt)
    S,
    /// w sin wt
    S1,
    /// w^2 cos wt
    S2,
}

// (2 hbar / pi) Int_0^wc dw Im{alpha} weight(w) factor(w, t)
fn fd_integral(config: &PhysicalConfig, t: f64, order: FdOrder, wc: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let hbar = config.hbar();
    let pref = 2.0 * hbar / std::f64::consts::PI;
    let f = move |w: f64| -> f64 {
        if w == 0.0 {
            return 0.0; // integrands vanish with a power of w at the origin
        }
        let base = im_alpha(config, w) * thermal_weight(config, w);
        let factor = match order {
            FdOrder::S => one_minus_cos(w * t),
            FdOrder::S1 => w * (w * t).sin(),
            FdOrder::S2 => w * w * (w * t).cos(),
        };
        pref * base * factor
    };
    // head panels up to the oscillation-resolved bound, then split tails
    let w_osc = 50.0 / t;
    let head_end = wc.min(w_osc);
    let mut breaks = vec![0.0];
    let a = config.decay_rate();
    for b in [0.1 * a, a, 10.0 * a] {
        breaks.push(b);
    }
    if config.bath.kind == BathKind::SingleRelaxationTime {
        let (gp, gm) = gamma_pm(config)?;
        breaks.push(gm);
        breaks.push(gp);
    }
    breaks.push(1.0 / t);
    breaks.push(10.0 / t);
    let mut bs: Vec<f64> = breaks.into_iter().filter(|&b| b < head_end).collect();
    bs.push(head_end);
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    let mut value = quad::adaptive_panels(&f, &bs, 1e-9, 1e-14)?.value;
    if wc > head_end {
        // remaining range [head_end, wc]: smooth component plus pure trig
        if order == FdOrder::S {
            let smooth = |w: f64| pref * im_alpha(config, w) * thermal_weight(config, w);
            let mut lo = head_end;
            while lo < wc {
                let hi = (2.0 * lo).min(wc);
                value += quad::adaptive(&smooth, lo, hi, 1e-10, 1e-16)?.value;
                lo = hi;
            }
        }
        let trig = |w: f64| {
            let base = pref * im_alpha(config, w) * thermal_weight(config, w);
            match order {
                FdOrder::S => -base * (w * t).cos(),
                FdOrder::S1 => base * w * (w * t).sin(),
                FdOrder::S2 => base * w * w * (w * t).cos(),
            }
        };
        value += quad::oscillatory_tail(&trig, head_end, t)?;
        value -= quad::oscillatory_tail(&trig, wc, t)?;
    }
    Ok(value)
}

// (2 hbar/pi) Int_0^wc w^order Im{alpha} dw with the zero-point weight
fn moment_weight_integral(config: &PhysicalConfig, order: i32, wc: f64) -> Result<f64> {
    let pref = 2.0 * config.hbar() / std::f64::consts::PI;
    let f = |w: f64| pref * im_alpha(config, w) * w.powi(order);
    geometric_panels(config, &f, wc)
}

// same with the configured thermal weight
fn moment_weight_integral_thermal(config: &PhysicalConfig, order: i32, wc: f64) -> Result<f64> {
    let pref = 2.0 * config.hbar() / std::f64::consts::PI;
    let f = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        pref * im_alpha(config, w) * thermal_weight(config, w) * w.powi(order)
    };
    geometric_panels(config, &f, wc)
}

fn geometric_panels(config: &PhysicalConfig, f: &dyn Fn(f64) -> f64, wc: f64) -> Result<f64> {
    let mut breaks = vec![0.0, config.decay_rate().min(wc)];
    if config.bath.kind == BathKind::SingleRelaxationTime {
        let (gp, gm) = gamma_pm(config)?;
        breaks.push(gm.min(wc));
        breaks.push(gp.min(wc));
    }
    let mut b = breaks.iter().cloned().fold(1e-300f64, f64::max);
    while b < wc {
        b *= 4.0;
        breaks.push(b.min(wc));
    }
    let mut bs: Vec<f64> = breaks.into_iter().filter(|&x| x <= wc).collect();
    bs.push(wc);
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    Ok(quad::adaptive_panels(f, &bs, 1e-10, 1e-15)?.value)
}

fn one_minus_cos(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        x2 / 2.0 * (1.0 - x2 / 12.0 * (1.0 - x2 / 30.0))
    } else {
        1.0 - x.cos()
    }
}

/// Second moments of X(t), the bath-driven part of the motion.
pub fn x_moments(config: &PhysicalConfig, t: f64) -> Result<XMoments> {
    if t < 0.0 {
        return Err(Error::Domain {
            op: "x_moments",
            msg: format!("t = {t} < 0"),
        });
    }
    if !config.is_free_particle() {
        return Err(Error::Unsupported(
            "X moments are implemented for the free particle only".into(),
        ));
    }
    if t == 0.0 {
        return Ok(XMoments {
            t,
            xx: 0.0,
            vv: 0.0,
            xv_sym: 0.0,
            cutoff: None,
        });
    }
    let m = config.mass();
    let zeta = config.friction();
    let kt = config.kt();
    match (config.thermal.regime, config.bath.kind) {
        (TemperatureRegime::HighTemperature, BathKind::Ohmic) => {
            let a = zeta / m;
            let e = (-a * t).exp();
            let gf = 1.0 - e;
            let xx = kt / zeta * (2.0 * t - 2.0 * m * gf / zeta - m * gf * gf / zeta);
            let vv = kt / m * (1.0 - e * e);
            let xv = 2.0 * kt / zeta * gf * gf;
            Ok(XMoments {
                t,
                xx,
                vv,
                xv_sym: xv,
                cutoff: None,
            })
        }
        (TemperatureRegime::HighTemperature, BathKind::SingleRelaxationTime) => {
            let (xx, vv, xv) = srt_classical_moments(config, t)?;
            Ok(XMoments {
                t,
                xx,
                vv,
                xv_sym: xv,
                cutoff: None,
            })
        }
        (TemperatureRegime::ZeroTemperature, BathKind::Ohmic) => {
            let d = msd(config, t)?;
            let s2_0 = d
                .s2_at_0
                .require("the zero-temperature Ohmic moment <X^2>")?;
            let ge = green(config, t)?;
            let (g, g1) = (ge.g, ge.g1);
            let xx = d.s - m * g * d.s1 + 0.5 * m * m * g * g * s2_0;
            let vv = 0.5 * (1.0 + m * m * g1 * g1) * s2_0 - m * g1 * d.s2;
            let xv = d.s1 - m * (g1 * d.s1 + g * d.s2) + m * m * g * g1 * s2_0;
            Ok(XMoments {
                t,
                xx,
                vv,
                xv_sym: xv,
                cutoff: config.cutoff(),
            })
        }
        _ => {
            // spectral engine; the upper limit is the configured cutoff for
            // zero-point weights and infinity for the classical weight
            let upper = match config.thermal.regime {
                TemperatureRegime::HighTemperature => None,
                TemperatureRegime::Exact => {
                    Some(config.require_cutoff("the exact-weight fluctuation moments")?)
                }
                TemperatureRegime::ZeroTemperature => match config.bath.kind {
                    BathKind::Ohmic => {
                        Some(config.require_cutoff("the zero-temperature Ohmic moments")?)
                    }
                    BathKind::SingleRelaxationTime => config.cutoff(),
                },
            };
            let xx = spectral::moment_integral(config, t, MomentKind::XX, upper)?;
            let vv = spectral::moment_integral(config, t, MomentKind::VV, upper)?;
            let xv = spectral::moment_integral(config, t, MomentKind::XV, upper)?;
            Ok(XMoments {
                t,
                xx,
                vv,
                xv_sym: xv,
                cutoff: upper,
            })
        }
    }
}

// Closed-form classical-weight moments for the exponential-memory bath:
// the correlation kT (zeta/tau) e^{-|a-b|/tau} against the exponential-sum
// Green function reduces every double integral to elementary terms.
fn srt_classical_moments(config: &PhysicalConfig, t: f64) -> Result<(f64, f64, f64)> {
    let g = spectral::green_exp_sum(config)
        .ok_or_else(|| Error::Unsupported("classical moments are free-particle only".into()))?;
    let gd = g.deriv();
    let tau = config.bath.relaxation_time;
    let lambda = 1.0 / tau;
    let pref = config.kt() * config.friction() / tau;
    let pair = |e1: &spectral::ExpSum, e2: &spectral::ExpSum| -> f64 {
        let mut acc = 0.0;
        for &(c1, r1) in &e1.terms {
            for &(c2, r2) in &e2.terms {
                acc += c1 * c2 * exp_pair_integral(r1, r2, lambda, t);
            }
        }
        acc
    };
    let xx = pref * pair(&g, &g);
    let vv = pref * pair(&gd, &gd);
    let xv = 2.0 * pref * pair(&g, &gd);
    Ok((xx, vv, xv))
}

// integral over [0,t]^2 of e^{-p a - q b - lambda |a-b|}
fn exp_pair_integral(p: f64, q: f64, lambda: f64, t: f64) -> f64 {
    let half = |p: f64, q: f64| -> f64 {
        // a > b branch: [E(p+q, t) - (e^{-(p+lambda)t} - e^{-(p+q)t})/(q-lambda)] / (p+lambda)
        let e_pq = expm1_ratio(p + q, t);
        let growth = if (q - lambda).abs() < 1e-9 {
            t * (-(p + lambda) * t).exp()
        } else {
            ((-(p + lambda) * t).exp() - (-(p + q) * t).exp()) / (q - lambda)
        };
        (e_pq - growth) / (p + lambda)
    };
    half(p, q) + half(q, p)
}

// (1 - e^{-z t})/z with the z -> 0 limit
fn expm1_ratio(z: f64, t: f64) -> f64 {
    if (z * t).abs() < 1e-6 {
        t * (1.0 - 0.5 * z * t + z * z * t * t / 6.0)
    } else {
        -(-z * t).exp_m1() / z
    }
}

/// The diffusion coefficients the master equation actually needs to
/// transport the exact moments: `(D_qp, D_pp)` multiplying `d^2W/dqdp` and
/// `d^2W/dp^2`.
///
/// For the Ohmic bath these equal the force-correlation convolutions
/// `(P_f/2, m P_h/2)`. For the exponential-memory bath the convolution
/// form is not exact (the kicked Green function G(t-u) leaves the
/// two-dimensional solution space of the local equation), so the products
/// are reconstructed from the exact moment flow:
///
///   P_f = m [ d<XV>/dt - 2<VV> + 2 Omega^2 <XX> + 2 Gamma <XV> ]
///   P_h = m [ d<VV>/dt + Omega^2 <XV> + 4 Gamma <VV> ]
///
/// with the derivative boundary terms evaluated in closed form.
pub fn master_equation_diffusion(config: &PhysicalConfig, t: f64) -> Result<(f64, f64)> {
    let m = config.mass();
    match config.bath.kind {
        BathKind::Ohmic => {
            let (pf, ph) = crate::green::diffusion_products(config, t)?;
            Ok((0.5 * pf, 0.5 * m * ph))
        }
        BathKind::SingleRelaxationTime => {
            if config.thermal.regime != TemperatureRegime::HighTemperature {
                return Err(Error::Unsupported(
                    "moment-exact diffusion products are implemented at the classical \
                     thermal weight, where the grid and moment oracles run"
                        .into(),
                ));
            }
            if t == 0.0 {
                return Ok((0.0, 0.0));
            }
            let (xx, vv, xv) = srt_classical_moments(config, t)?;
            let lc = crate::green::local_coefficients(config, t)?;
            let ge = green(config, t)?;
            // K_G(t) = Int_0^t G(t-u) c_F(u) du and likewise for Gdot
            let g = spectral::green_exp_sum(config).unwrap();
            let gd = g.deriv();
            let tau = config.bath.relaxation_time;
            let cf0 = config.kt() * config.friction() / tau;
            let k_of = |e: &spectral::ExpSum| -> f64 {
                let mut acc = 0.0;
                for &(c, r) in &e.terms {
                    // Int_0^t e^{-r(t-u)} e^{-u/tau} du
                    let z = 1.0 / tau - r;
                    let v = if z.abs() < 1e-9 {
                        t * (-r * t).exp()
                    } else {
                        ((-r * t).exp() - (-t / tau).exp()) / z
                    };
                    acc += c * v;
                }
                cf0 * acc
            };
            let k_g = k_of(&g);
            let k_gd = k_of(&gd);
            let dxv = 2.0 * (ge.g * k_gd + ge.g1 * k_g);
            let dvv = 2.0 * ge.g1 * k_gd;
            let om = lc.omega_sq.value;
            let pf = m * (dxv - 2.0 * vv + 2.0 * om * xx + lc.two_gamma * xv);
            let ph = m * (dvv + om * xv + 2.0 * lc.two_gamma * vv);
            Ok((0.5 * pf, 0.5 * m * ph))
        }
    }
}

/// Assemble the covariance matrix A(t) and check positive semi-definiteness.
pub fn covariance(config: &PhysicalConfig, t: f64) -> Result<CovarianceMatrix> {
    if t <= 0.0 {
        return Err(Error::Domain {
            op: "covariance",
            msg: "t must be positive".into(),
        });
    }
    let m = config.mass();
    let xm = x_moments(config, t)?;
    let a = CovarianceMatrix {
        a_pp: m * m * xm.vv,
        a_pq: 0.5 * m * xm.xv_sym,
        a_qq: xm.xx,
    };
    let scale = (a.a_pp * a.a_qq).max(a.a_pq * a.a_pq).max(1e-300);
    if a.a_pp < 0.0 || a.a_qq < 0.0 || a.det() < -1e-10 * scale {
        return Err(Error::IndefiniteMatrix(format!(
            "a_pp={}, a_qq={}, det={}",
            a.a_pp,
            a.a_qq,
            a.det()
        )));
    }
    Ok(a)
}

/// Equilibrium variances of the bound particle from the
/// fluctuation-dissipation integrals over Im{alpha}.
pub fn equilibrium_moments(config: &PhysicalConfig) -> Result<EquilibriumMoments> {
    if config.is_free_particle() {
        return Err(Error::Unsupported(
            "a free particle has no equilibrium position variance".into(),
        ));
    }
    let hbar = config.hbar();
    let pref = hbar / std::f64::consts::PI;
    let x_f = move |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        pref * im_alpha(config, w) * thermal_weight(config, w)
    };
    let v_f = move |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        pref * w * w * im_alpha(config, w) * thermal_weight(config, w)
    };
    let x_sq = resonance_integral(config, &x_f, false)?;
    let v_sq = match config.thermal.regime {
        TemperatureRegime::HighTemperature => resonance_integral(config, &v_f, false)?,
        _ => {
            config.require_cutoff("the equilibrium velocity variance")?;
            resonance_integral(config, &v_f, true)?
        }
    };
    Ok(EquilibriumMoments { x_sq, v_sq })
}

// Integrate across the oscillator resonance with panels isolating the
// Lorentzian peak of half-width ~ zeta/2m at w0 = sqrt(K/m).
fn resonance_integral(
    config: &PhysicalConfig,
    f: &dyn Fn(f64) -> f64,
    truncate_at_cutoff: bool,
) -> Result<f64> {
    let m = config.mass();
    let w0 = (config.spring_constant() / m).sqrt();
    let width = 0.5 * config.friction() / m;
    let mut breaks = vec![0.0];
    for k in [-300.0, -30.0, -3.0, -1.0, 0.0, 1.0, 3.0, 30.0, 300.0] {
        let b = w0 + k * width;
        if b > 0.0 {
            breaks.push(b);
        }
    }
    let upper = if truncate_at_cutoff {
        config.require_cutoff("the resonance integral")?
    } else {
        // geometric extension until the integrand has died off
        let mut hi = (w0 + 300.0 * width).max(10.0 * config.decay_rate());
        let floor = 1e-16 * f(w0).abs().max(1e-300) * w0.max(1.0);
        while f(hi).abs() * hi > floor && hi < 1e12 {
            hi *= 4.0;
        }
        hi
    };
    let mut b = breaks.iter().cloned().fold(1e-300f64, f64::max).min(upper);
    while b < upper {
        b *= 4.0;
        breaks.push(b.min(upper));
    }
    let mut bs: Vec<f64> = breaks.into_iter().filter(|&x| x <= upper).collect();
    bs.push(upper);
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    Ok(quad::adaptive_panels(f, &bs, 1e-10, 1e-15)?.value)
}

/// Result of the cutoff-divergence probe: a linear fit of `<X^2(t_probe)>`
/// against log(cutoff).
#[derive(Debug, Clone)]
pub struct DivergenceProbe {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Measure d<X^2>/d log(cutoff) at zero temperature by exact-weight
/// quadrature. For the Ohmic bath the slope is hbar/(pi zeta); the
/// exponential-memory bath shows the same slope while the cutoffs stay
/// below its intrinsic 1/tau scale.
pub fn divergence_probe(
    config: &PhysicalConfig,
    t_probe: f64,
    cutoffs: &[f64],
) -> Result<DivergenceProbe> {
    if config.thermal.regime != TemperatureRegime::ZeroTemperature {
        return Err(Error::Domain {
            op: "divergence_probe",
            msg: "requires the zero-temperature regime".into(),
        });
    }
    let relax = config.mass() / config.friction();
    if t_probe < 5.0 * relax {
        return Err(Error::Domain {
            op: "divergence_probe",
            msg: format!("t_probe = {t_probe} must be well beyond the decay time {relax}"),
        });
    }
    if cutoffs.len() < 3 {
        return Err(Error::Domain {
            op: "divergence_probe",
            msg: "need at least three cutoffs".into(),
        });
    }
    let lo = cutoffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cutoffs.iter().cloned().fold(0.0f64, f64::max);
    if hi / lo < 100.0 {
        return Err(Error::Domain {
            op: "divergence_probe",
            msg: format!("cutoffs must span at least two decades, got {lo}..{hi}"),
        });
    }
    let samples: Vec<(f64, f64)> = cutoffs
        .iter()
        .map(|&wc| {
            spectral::moment_integral(config, t_probe, MomentKind::XX, Some(wc)).map(|v| (wc, v))
        })
        .collect::<Result<_>>()?;
    // least squares of xx against ln(cutoff)
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(wc, v) in &samples {
        let x = wc.ln();
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mut ss = 0.0;
    for &(wc, v) in &samples {
        let r = v - (intercept + slope * wc.ln());
        ss += r * r;
    }
    let rms = (ss / n).sqrt();
    if rms > 0.05 * slope.abs() {
        return Err(Error::Domain {
            op: "divergence_probe",
            msg: format!("fit residual {rms:.3e} too large against slope {slope:.3e}"),
        });
    }
    Ok(DivergenceProbe {
        slope,
        intercept,
        rms_residual: rms,
        samples,
    })
}
