//! Exact dynamics of a quantum Brownian particle coupled to a linear
//! passive bath: Green functions and local-in-time coefficients of the
//! exact master equation, fluctuation moments, closed-form Wigner-function
//! propagation for Gaussian and cat states, decoherence diagnostics, and
//! three independent numerical oracles (a phase-space grid integrator, a
//! discrete-bath Monte Carlo sampler, and a moment-ODE integrator).

// `!(x > 0)` guards are deliberate: they reject NaN along with the
// out-of-domain values, which `x <= 0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod fluctuations;
pub mod green;
pub mod model;
pub mod oracle;
pub mod par;
pub mod quad;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{
    BathKind, BathSpec, Distributional, OscillatorSpec, PhysicalConfig, TemperatureRegime,
    ThermalSpec, UnitsSpec,
};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::model::*;

    pub fn config(
        mass: f64,
        spring: f64,
        kind: BathKind,
        friction: f64,
        tau: f64,
        cutoff: Option<f64>,
        kt: f64,
        regime: TemperatureRegime,
    ) -> PhysicalConfig {
        PhysicalConfig::new(
            OscillatorSpec {
                mass,
                spring_constant: spring,
            },
            BathSpec {
                kind,
                friction,
                relaxation_time: tau,
                cutoff,
            },
            ThermalSpec {
                temperature: kt,
                regime,
            },
            UnitsSpec::default(),
        )
        .unwrap()
    }

    /// Free Ohmic particle, m = zeta = 1.
    pub fn ohmic(kt: f64, regime: TemperatureRegime) -> PhysicalConfig {
        config(1.0, 0.0, BathKind::Ohmic, 1.0, 0.0, None, kt, regime)
    }

    pub fn ohmic_cutoff(kt: f64, regime: TemperatureRegime, wc: f64) -> PhysicalConfig {
        config(1.0, 0.0, BathKind::Ohmic, 1.0, 0.0, Some(wc), kt, regime)
    }

    /// Free exponential-memory particle, m = zeta = 1.
    pub fn srt(tau: f64, kt: f64, regime: TemperatureRegime) -> PhysicalConfig {
        config(
            1.0,
            0.0,
            BathKind::SingleRelaxationTime,
            1.0,
            tau,
            None,
            kt,
            regime,
        )
    }

    pub fn srt_cutoff(tau: f64, kt: f64, regime: TemperatureRegime, wc: f64) -> PhysicalConfig {
        config(
            1.0,
            0.0,
            BathKind::SingleRelaxationTime,
            1.0,
            tau,
            Some(wc),
            kt,
            regime,
        )
    }
}
