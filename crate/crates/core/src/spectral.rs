//! Spectral representation of the fluctuating-position moments.
//!
//! With X(t) = integral_0^t G(t-u) F(u) du and the stationary force
//! correlation written through Re{mu(w)}, every second moment of (X, Xdot)
//! becomes a single frequency integral:
//!
//!   <X^2>(t)        = (hbar/pi) Int dw Re{mu} w weight(w) |g_t(w)|^2
//!   <Xdot^2>(t)     = (hbar/pi) Int dw Re{mu} w weight(w) |gdot_t(w)|^2
//!   <X Xdot + ..>   = (hbar/pi) Int dw Re{mu} w weight(w) 2 Re{g_t gdot_t*}
//!
//! where g_t(w) = integral_0^t G(v) e^{iwv} dv is closed-form for the
//! free particle with either bath (G is a sum of exponentials). This route
//! is exact at every temperature and is the workhorse wherever the paper-
//! level closed forms stop (exponential-memory bath, exact coth weight).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{gamma_pm, BathKind, PhysicalConfig, TemperatureRegime};
use crate::quad::{self, expm1_over};

/// Sum of exponentials `sum_k c_k e^{-r_k v}`.
#[derive(Debug, Clone)]
pub struct ExpSum {
    pub terms: Vec<(f64, f64)>, // (coefficient, decay rate)
}

impl ExpSum {
    pub fn eval(&self, v: f64) -> f64 {
        self.terms.iter().map(|&(c, r)| c * (-r * v).exp()).sum()
    }

    pub fn deriv(&self) -> ExpSum {
        ExpSum {
            terms: self
                .terms
                .iter()
                .filter(|&&(_, r)| r != 0.0)
                .map(|&(c, r)| (-c * r, r))
                .collect(),
        }
    }

    /// integral_0^t e^{iwv} (this)(v) dv
    pub fn fourier(&self, omega: f64, t: f64) -> Complex64 {
        let mut out = Complex64::new(0.0, 0.0);
        for &(c, r) in &self.terms {
            let z = Complex64::new(-r, omega);
            out += c * expm1_over(z, t);
        }
        out
    }

    /// integral_0^t (this)(v) dv
    pub fn integral(&self, t: f64) -> f64 {
        let mut out = 0.0;
        for &(c, r) in &self.terms {
            if r == 0.0 {
                out += c * t;
            } else {
                out += c * (1.0 - (-r * t).exp()) / r;
            }
        }
        out
    }
}

/// Closed-form Green function of the free particle as a sum of
/// exponentials; `None` for a bound particle.
pub fn green_exp_sum(config: &PhysicalConfig) -> Option<ExpSum> {
    if !config.is_free_particle() {
        return None;
    }
    let m = config.mass();
    let zeta = config.friction();
    match config.bath.kind {
        BathKind::Ohmic => Some(ExpSum {
            terms: vec![(1.0 / zeta, 0.0), (-1.0 / zeta, zeta / m)],
        }),
        BathKind::SingleRelaxationTime => {
            let (gp, gm) = gamma_pm(config).ok()?;
            let tau = config.bath.relaxation_time;
            let delta = gp - gm;
            Some(ExpSum {
                terms: vec![
                    (1.0 / zeta, 0.0),
                    (gm * gm * tau / (zeta * delta), gp),
                    (-gp * gp * tau / (zeta * delta), gm),
                ],
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// |g_t|^2 -> <X^2>
    XX,
    /// |gdot_t|^2 -> <Xdot^2>
    VV,
    /// 2 Re(g_t conj(gdot_t)) -> <X Xdot + Xdot X>
    XV,
    /// Re g_t -> convolution of G against the force correlation
    ReG,
    /// Re gdot_t -> convolution of Gdot against the force correlation
    ReGdot,
}

/// `(hbar/pi) Int_0^upper dw Re{mu(w)} w weight(w) kernel(w)`.
///
/// `upper = None` integrates to infinity, which is rejected when the
/// integrand does not decay (Ohmic bath with zero-point weight).
pub fn moment_integral(
    config: &PhysicalConfig,
    t: f64,
    kind: MomentKind,
    upper: Option<f64>,
) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain {
            op: "moment_integral",
            msg: format!("t = {t} < 0"),
        });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let g = green_exp_sum(config).ok_or_else(|| {
        Error::Unsupported("fluctuation moments are free-particle only (K = 0)".into())
    })?;
    let gd = g.deriv();
    let hbar = config.hbar();
    let zero_point = matches!(
        config.thermal.regime,
        TemperatureRegime::ZeroTemperature | TemperatureRegime::Exact
    );
    if upper.is_none() && zero_point && config.bath.kind == BathKind::Ohmic {
        return Err(Error::Divergent {
            what: format!("{kind:?} moment of the Ohmic bath with zero-point weight"),
        });
    }

    let weight = |w: f64| -> f64 {
        if w == 0.0 {
            // w * thermal_weight is finite only at high temperature; the
            // zero-point weights carry the extra factor of w themselves
            return match config.thermal.regime {
                TemperatureRegime::HighTemperature => {
                    (hbar / std::f64::consts::PI)
                        * crate::model::memory_transform_re(config, 0.0)
                        * (2.0 * config.kt() / hbar)
                }
                _ => 0.0,
            };
        }
        (hbar / std::f64::consts::PI)
            * crate::model::memory_transform_re(config, w)
            * w
            * quad::thermal_weight(config, w)
    };
    let f = |w: f64| weight(w) * kernel_value(&g, &gd, kind, w, t);

    // oscillation-free head by panels, then the tail with the kernel split
    // into smooth + cos + sin components
    let w_osc = 50.0 / t;
    let mut breaks = vec![0.0];
    let a = config.decay_rate();
    for s in [0.1 * a, a, 10.0 * a] {
        breaks.push(s);
    }
    if config.bath.kind == BathKind::SingleRelaxationTime {
        let (gp, gm) = gamma_pm(config)?;
        breaks.push(gm);
        breaks.push(gp);
    }
    breaks.push(1.0 / t);
    breaks.push(10.0 / t);

    let head_end = match upper {
        Some(u) if u <= w_osc => u,
        _ => w_osc,
    };
    let mut bs: Vec<f64> = breaks.into_iter().filter(|&b| b < head_end).collect();
    bs.push(head_end);
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    let head = quad::adaptive_panels(&f, &bs, 1e-9, 1e-14)?;

    let mut value = head.value;
    if !matches!(upper, Some(u) if u <= w_osc) {
        value += tail_integral(&g, &gd, kind, t, &weight, head_end)?;
        if let Some(u) = upper {
            value -= tail_integral(&g, &gd, kind, t, &weight, u)?;
        }
    }
    Ok(value)
}

fn kernel_value(g: &ExpSum, gd: &ExpSum, kind: MomentKind, w: f64, t: f64) -> f64 {
    match kind {
        MomentKind::XX => g.fourier(w, t).norm_sqr(),
        MomentKind::VV => gd.fourier(w, t).norm_sqr(),
        MomentKind::XV => 2.0 * (g.fourier(w, t) * gd.fourier(w, t).conj()).re,
        MomentKind::ReG => g.fourier(w, t).re,
        MomentKind::ReGdot => gd.fourier(w, t).re,
    }
}

// g_t(w) = e^{iwt} A(w) - B(w) with A = sum c e^{-rt}/(iw - r) and
// B = sum c/(iw - r); every kernel is then smooth + cos(wt)*. + sin(wt)*.,
// and the three tail pieces get the treatment each needs: geometric panels
// for the smooth part, accelerated half-period sums for the trig parts.
fn tail_integral(
    g: &ExpSum,
    gd: &ExpSum,
    kind: MomentKind,
    t: f64,
    weight: &dyn Fn(f64) -> f64,
    from: f64,
) -> Result<f64> {
    let ab = |e: &ExpSum, w: f64| -> (Complex64, Complex64) {
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for &(c, r) in &e.terms {
            let den = Complex64::new(-r, w);
            a += c * (-r * t).exp() / den;
            b += c / den;
        }
        (a, b)
    };
    // (smooth, cos coefficient, sin coefficient) at w
    let parts = move |w: f64| -> (f64, f64, f64) {
        match kind {
            MomentKind::XX | MomentKind::VV => {
                let (a, b) = ab(if kind == MomentKind::XX { g } else { gd }, w);
                let e = a * b.conj();
                (a.norm_sqr() + b.norm_sqr(), -2.0 * e.re, 2.0 * e.im)
            }
            MomentKind::XV => {
                let (a, b) = ab(g, w);
                let (ad, bd) = ab(gd, w);
                let s = 2.0 * (a * ad.conj() + b * bd.conj()).re;
                let c = -2.0 * ((a * bd.conj()).re + (b * ad.conj()).re);
                let d = 2.0 * ((a * bd.conj()).im - (b * ad.conj()).im);
                (s, c, d)
            }
            MomentKind::ReG => {
                let (a, b) = ab(g, w);
                (-b.re, a.re, -a.im)
            }
            MomentKind::ReGdot => {
                let (a, b) = ab(gd, w);
                (-b.re, a.re, -a.im)
            }
        }
    };

    // smooth component: geometric panels until the running total stops moving
    let smooth = |w: f64| weight(w) * parts(w).0;
    let mut acc = 0.0;
    let mut lo = from;
    for _ in 0..60 {
        let hi = 2.0 * lo;
        let r = quad::adaptive(&smooth, lo, hi, 1e-10, 1e-16)?;
        acc += r.value;
        lo = hi;
        if r.value.abs() <= 1e-13 * acc.abs().max(1e-300) {
            break;
        }
    }
    // estimate of the remainder beyond the last panel assuming ~1/w^p decay
    let f_last = smooth(lo).abs();
    if f_last * lo > 1e-10 * acc.abs().max(1e-300) {
        // integrand still alive: extend with an explicit 1/w substitution
        let map = |u: f64| {
            let w = 1.0 / u;
            smooth(w) * w * w
        };
        acc += quad::adaptive(&map, 0.0, 1.0 / lo, 1e-9, 1e-15)
            .map(|r| r.value)
            .unwrap_or(0.0);
    }

    let cos_part = |w: f64| weight(w) * parts(w).1 * (w * t).cos();
    let sin_part = |w: f64| weight(w) * parts(w).2 * (w * t).sin();
    let c = quad::oscillatory_tail(&cos_part, from, t)?;
    let s = quad::oscillatory_tail(&sin_part, from, t)?;
    Ok(acc + c + s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;
    use approx::assert_relative_eq;

    #[test]
    fn exp_sum_matches_closed_green_ohmic() {
        let c = testutil::ohmic(1.0, TemperatureRegime::HighTemperature);
        let g = green_exp_sum(&c).unwrap();
        for t in [0.0, 0.3, 2.0] {
            assert_relative_eq!(g.eval(t), 1.0 - (-t as f64).exp(), epsilon = 1e-15);
        }
        let gd = g.deriv();
        assert_relative_eq!(gd.eval(0.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fourier_against_simpson() {
        let c = testutil::srt(0.1, 1.0, TemperatureRegime::HighTemperature);
        let g = green_exp_sum(&c).unwrap();
        let (w, t) = (3.7, 1.3);
        let n = 200_000;
        let h = t / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let a = i as f64 * h;
            let fm = |v: f64| g.eval(v) * Complex64::new(0.0, w * v).exp();
            acc += (fm(a) + 4.0 * fm(a + 0.5 * h) + fm(a + h)) * (h / 6.0);
        }
        let direct = g.fourier(w, t);
        assert!((direct - acc).norm() < 1e-12);
    }

    #[test]
    fn high_t_ohmic_xx_matches_closed_form() {
        let c = testutil::ohmic(1.0, TemperatureRegime::HighTemperature);
        for t in [0.3, 1.0, 5.0] {
            let xx = moment_integral(&c, t, MomentKind::XX, None).unwrap();
            let e = (-t as f64).exp();
            let closed = 2.0 * t - 2.0 * (1.0 - e) - (1.0 - e) * (1.0 - e);
            assert_relative_eq!(xx, closed, max_relative = 1e-8);
        }
    }

    #[test]
    fn high_t_ohmic_vv_and_xv_match_closed_forms() {
        let c = testutil::ohmic(1.0, TemperatureRegime::HighTemperature);
        for t in [0.5, 2.0] {
            let vv = moment_integral(&c, t, MomentKind::VV, None).unwrap();
            assert_relative_eq!(vv, 1.0 - (-2.0 * t).exp(), max_relative = 1e-8);
            let xv = moment_integral(&c, t, MomentKind::XV, None).unwrap();
            let g = 1.0 - (-t as f64).exp();
            assert_relative_eq!(xv, 2.0 * g * g, max_relative = 1e-8);
        }
    }

    #[test]
    fn ohmic_zero_point_without_cutoff_is_rejected() {
        let c = testutil::ohmic(0.0, TemperatureRegime::ZeroTemperature);
        assert!(matches!(
            moment_integral(&c, 1.0, MomentKind::XX, None),
            Err(Error::Divergent { .. })
        ));
    }

    #[test]
    fn srt_zero_temperature_converges_without_cutoff() {
        // the exponential kernel is its own UV cutoff at 1/tau
        let c = testutil::srt(0.1, 0.0, TemperatureRegime::ZeroTemperature);
        let a = moment_integral(&c, 5.0, MomentKind::XX, None).unwrap();
        let b = moment_integral(&c, 5.0, MomentKind::XX, Some(1e6)).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-6);
        assert!(a > 0.0);
    }

    #[test]
    fn canonical_srt_high_t_values() {
        // frozen from two independent scipy routes (double time-domain
        // convolution and this spectral form), which agree to 1e-6
        let c = testutil::srt(0.1, 10.0, TemperatureRegime::HighTemperature);
        let xx = moment_integral(&c, 1.0, MomentKind::XX, None).unwrap();
        assert_relative_eq!(xx, 3.345677, max_relative = 3e-6);
        let vv = moment_integral(&c, 1.0, MomentKind::VV, None).unwrap();
        assert_relative_eq!(vv, 8.622708, max_relative = 3e-6);
        let xv = moment_integral(&c, 1.0, MomentKind::XV, None).unwrap();
        assert_relative_eq!(xv, 8.435698, max_relative = 3e-6);
    }

    #[test]
    fn xv_is_time_derivative_of_xx() {
        let c = testutil::srt(0.1, 10.0, TemperatureRegime::HighTemperature);
        let t = 0.8;
        let h = 1e-4;
        let xp = moment_integral(&c, t + h, MomentKind::XX, None).unwrap();
        let xm = moment_integral(&c, t - h, MomentKind::XX, None).unwrap();
        let xv = moment_integral(&c, t, MomentKind::XV, None).unwrap();
        assert_relative_eq!(xv, (xp - xm) / (2.0 * h), max_relative = 1e-6);
    }
}
