//! Exponential integrals and the zero-temperature spreading function
//!
//!   I(x) = integral_0^inf dy x^2 (1 - cos y) / (y (y^2 + x^2))
//!        = log x + gamma - (1/2) [e^{-x} Ei(x) + e^{x} Ei(-x)],
//!
//! which controls the zero-temperature mean-square displacement of the
//! free Ohmic particle. `Ei` is the principal-value exponential integral.

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Principal-value exponential integral Ei(x) for x > 0.
///
/// Power series for x <= 40 (all terms positive, no cancellation),
/// asymptotic series truncated at its smallest term beyond.
pub fn expi(x: f64) -> f64 {
    assert!(x > 0.0, "expi requires x > 0, got {x}");
    if x <= 40.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..=200 {
            let nf = n as f64;
            term *= x / nf;
            let add = term / nf;
            sum += add;
            if add <= sum.abs() * 1e-17 {
                break;
            }
        }
        EULER_GAMMA + x.ln() + sum
    } else {
        x.exp() * ei_scaled_asymptotic(x)
    }
}

/// e^{-x} Ei(x) for x > 0, computed without overflow or cancellation.
pub fn ei_scaled(x: f64) -> f64 {
    assert!(x > 0.0, "ei_scaled requires x > 0, got {x}");
    if x <= 40.0 {
        (-x).exp() * expi(x)
    } else {
        ei_scaled_asymptotic(x)
    }
}

// (1/x) sum n!/x^n, truncated at the smallest term. Good to ~1e-16 for x >= 40.
fn ei_scaled_asymptotic(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 1..=120 {
        let next = term * n as f64 / x;
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum / x
}

/// E1(x) = -Ei(-x) for x > 0: series for x <= 1, continued fraction beyond.
pub fn exp1(x: f64) -> f64 {
    assert!(x > 0.0, "exp1 requires x > 0, got {x}");
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..=40 {
            let nf = n as f64;
            term *= -x / nf;
            let add = term / nf;
            sum += add;
            if add.abs() <= sum.abs() * 1e-17 + 1e-300 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        (-x).exp() * e1_scaled_cf(x)
    }
}

/// e^{x} E1(x) for x > 1 via the modified Lentz continued fraction.
pub fn e1_scaled(x: f64) -> f64 {
    assert!(x > 0.0, "e1_scaled requires x > 0, got {x}");
    if x <= 1.0 {
        x.exp() * exp1(x)
    } else {
        e1_scaled_cf(x)
    }
}

fn e1_scaled_cf(x: f64) -> f64 {
    // e^x E1(x) = 1/(x+1-) 1/(x+3-) 4/(x+5-) 9/(x+7-) ...
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for n in 1..=200 {
        let nf = n as f64;
        let a = -nf * nf;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// The spreading function I(x) for x >= 0.
///
/// The convergent small-x rearrangement
///   I(x) = -(log x + gamma)(cosh x - 1)
///          - (1/2)[e^{-x} S(x) + e^{x} S(-x)],  S(x) = sum x^n/(n! n),
/// is used below the crossover; above it the scaled exponential integrals
/// give `log x + gamma - (ei_scaled(x) - e1_scaled(x))/2` with no
/// exponentially large intermediates. Both branches agree near the
/// crossover to well below 1e-12.
pub fn special_i(x: f64) -> f64 {
    assert!(x >= 0.0, "special_i requires x >= 0, got {x}");
    if x == 0.0 {
        return 0.0;
    }
    if x < I_CROSSOVER {
        let (sp, sm) = kin_sums(x);
        -(x.ln() + EULER_GAMMA) * (x.cosh() - 1.0) - 0.5 * ((-x).exp() * sp + x.exp() * sm)
    } else {
        x.ln() + EULER_GAMMA - 0.5 * (ei_scaled(x) - e1_scaled(x))
    }
}

/// First derivative I'(x) = (ei_scaled(x) + e1_scaled(x))/2.
pub fn special_i_deriv(x: f64) -> f64 {
    assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < I_CROSSOVER {
        // -(log x + gamma) sinh x - (1/2)[e^{x} S(-x) - e^{-x} S(x)]
        let (sp, sm) = kin_sums(x);
        -(x.ln() + EULER_GAMMA) * x.sinh() - 0.5 * (x.exp() * sm - (-x).exp() * sp)
    } else {
        0.5 * (ei_scaled(x) + e1_scaled(x))
    }
}

/// Second derivative, I''(x) = I(x) - log x - gamma.
///
/// Behaves as -log x - gamma near the origin (the source of the
/// zero-temperature divergence of the second displacement derivative)
/// and as -1/x^2 at infinity.
pub fn special_i_second(x: f64) -> f64 {
    assert!(x > 0.0, "I'' diverges at x = 0");
    if x < I_CROSSOVER {
        special_i(x) - x.ln() - EULER_GAMMA
    } else {
        // direct form avoids the log-log cancellation at large x
        -0.5 * (ei_scaled(x) - e1_scaled(x))
    }
}

const I_CROSSOVER: f64 = 1.0;

// S(x) = sum_{n>=1} x^n/(n! n) and S(-x), summed jointly.
fn kin_sums(x: f64) -> (f64, f64) {
    let mut term = 1.0;
    let mut sp = 0.0;
    let mut sm = 0.0;
    for n in 1..=80 {
        let nf = n as f64;
        term *= x / nf;
        let add = term / nf;
        sp += add;
        if n % 2 == 0 {
            sm += add;
        } else {
            sm -= add;
        }
        if add <= (sp.abs() + 1.0) * 1e-18 {
            break;
        }
    }
    (sp, sm)
}

/// Large-x asymptotic series `log x + gamma - 1/x^2 - 3!/x^4 - 5!/x^6 - ...`,
/// truncated at its smallest term. Kept as an independent check of
/// [`special_i`]; accuracy degrades below x ~ 15.
pub fn special_i_asymptotic(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut sum = x.ln() + EULER_GAMMA;
    let x2 = x * x;
    let mut term = 1.0 / x2;
    let mut n = 1usize;
    loop {
        sum -= term;
        let next = term * ((2 * n) * (2 * n + 1)) as f64 / x2;
        if next >= term || n > 60 {
            break;
        }
        term = next;
        n += 1;
    }
    sum
}
