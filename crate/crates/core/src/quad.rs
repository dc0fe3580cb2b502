//! Adaptive Gauss-Kronrod quadrature, oscillatory semi-infinite tails with
//! sequence acceleration, and the thermal coth weight.
//!
//! The spectral integrands here combine a coth (or 2kT/hbar-omega) weight
//! with trigonometric factors of period 2*pi/t in omega. Naive global
//! adaptivity fails on that combination, so callers split at the physical
//! scales (zeta/m, 1/t, resonances), integrate the inner panels adaptively,
//! and hand the oscillatory remainder to [`oscillatory_tail`], which sums
//! half-period panels and accelerates the alternating sequence.

use crate::error::{Error, Result};
use crate::model::{PhysicalConfig, TemperatureRegime};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_7,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_119,
    0.417_959_183_673_469_4,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// 7-point Gauss / 15-point Kronrod pair on [a, b]: (estimate, error).
pub fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    let err = (kronrod - gauss).abs();
    (kronrod, err)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
}

/// Adaptive bisection on [a, b] driven by the largest-error interval.
pub fn adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
        });
    }
    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let (v, e) = gk15(f, a, b);
    let mut segs = vec![Seg {
        a,
        b,
        value: v,
        err: e,
    }];
    for _ in 0..4000 {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if err <= abs_tol + rel_tol * total.abs() {
            return Ok(QuadResult {
                value: total,
                abs_err: err,
            });
        }
        // split the worst interval
        let (i, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .unwrap();
        let Seg { a, b, .. } = segs[i];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break; // interval at floating-point resolution
        }
        let (v1, e1) = gk15(f, a, mid);
        let (v2, e2) = gk15(f, mid, b);
        segs[i] = Seg {
            a,
            b: mid,
            value: v1,
            err: e1,
        };
        segs.push(Seg {
            a: mid,
            b,
            value: v2,
            err: e2,
        });
    }
    let total: f64 = segs.iter().map(|s| s.value).sum();
    let err: f64 = segs.iter().map(|s| s.err).sum();
    if err <= 10.0 * (abs_tol + rel_tol * total.abs()) {
        // close enough to the request that the result is still usable
        return Ok(QuadResult {
            value: total,
            abs_err: err,
        });
    }
    Err(Error::QuadratureNonConvergence {
        achieved: err,
        requested: abs_tol + rel_tol * total.abs(),
    })
}

/// Adaptive quadrature over consecutive panels given by `breaks`.
pub fn adaptive_panels<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    let mut value = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let r = adaptive(f, w[0], w[1], rel_tol, abs_tol / (breaks.len() - 1) as f64)?;
        value += r.value;
        err += r.abs_err;
    }
    Ok(QuadResult {
        value,
        abs_err: err,
    })
}

/// Semi-infinite oscillatory integral `integral_a^inf f(w) dw` where `f`
/// oscillates with angular period `2*pi/t` in `w` (e.g. contains cos(w t)
/// or sin(w t) against a decaying envelope).
///
/// Sums half-period panels with GK15 and applies iterated Aitken
/// extrapolation to the alternating partial sums.
pub fn oscillatory_tail<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, t: f64) -> Result<f64> {
    assert!(t > 0.0, "oscillation scale must be positive");
    let half = std::f64::consts::PI / t;
    let max_panels = 160;
    let mut partials = Vec::with_capacity(max_panels);
    let mut acc = 0.0;
    let mut lo = a;
    for k in 0..max_panels {
        let hi = a + (k + 1) as f64 * half;
        let (v, _) = gk15(f, lo, hi);
        acc += v;
        partials.push(acc);
        lo = hi;
        if k >= 7 {
            let est = aitken(&partials);
            let est_prev = aitken(&partials[..partials.len() - 1]);
            let scale = est.abs().max(1e-300);
            if (est - est_prev).abs() <= 1e-12 * scale + 1e-305 {
                return Ok(est);
            }
        }
    }
    let est = aitken(&partials);
    let est_prev = aitken(&partials[..partials.len() - 1]);
    let achieved = (est - est_prev).abs();
    if achieved <= 1e-8 * est.abs().max(1e-300) {
        return Ok(est);
    }
    Err(Error::QuadratureNonConvergence {
        achieved,
        requested: 1e-12 * est.abs(),
    })
}

// Iterated Aitken delta-squared on a sequence of partial sums.
fn aitken(partials: &[f64]) -> f64 {
    let mut s: Vec<f64> = partials.to_vec();
    while s.len() >= 3 {
        let mut next = Vec::with_capacity(s.len() - 2);
        for i in 0..s.len() - 2 {
            let (s0, s1, s2) = (s[i], s[i + 1], s[i + 2]);
            let den = s2 - 2.0 * s1 + s0;
            if den.abs() < 1e-300 {
                next.push(s2);
            } else {
                let d = s2 - s1;
                next.push(s2 - d * d / den);
            }
        }
        s = next;
    }
    *s.last().unwrap()
}

/// Thermal weight of the fluctuation-dissipation integrals.
///
/// `HighTemperature` uses 2kT/(hbar w), `ZeroTemperature` uses 1, `Exact`
/// uses coth(hbar w / 2kT) with a Laurent form near w = 0 to avoid
/// cancellation.
pub fn thermal_weight(config: &PhysicalConfig, omega: f64) -> f64 {
    match config.thermal.regime {
        TemperatureRegime::ZeroTemperature => 1.0,
        TemperatureRegime::HighTemperature => 2.0 * config.kt() / (config.hbar() * omega),
        TemperatureRegime::Exact => {
            let kt = config.kt();
            if kt == 0.0 {
                return 1.0;
            }
            let x = config.hbar() * omega / (2.0 * kt);
            coth(x)
        }
    }
}

pub fn coth(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 1e-2 {
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else if x > 20.0 {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

/// `(e^{z t} - 1)/z` for complex z, stable for small |z t|.
pub fn expm1_over(z: num_complex::Complex64, t: f64) -> num_complex::Complex64 {
    let zt = z * t;
    if zt.norm() < 1e-4 {
        // t (1 + zt/2 + zt^2/6 + zt^3/24)
        num_complex::Complex64::new(t, 0.0)
            * (num_complex::Complex64::new(1.0, 0.0)
                + zt * 0.5
                + zt * zt / 6.0
                + zt * zt * zt / 24.0)
    } else {
        (zt.exp() - 1.0) / z
    }
}
