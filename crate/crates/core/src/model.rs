//! Physical configuration and the bath model: memory kernel, its Fourier
//! transform, and the response function.
//!
//! Two concrete baths are supported. The Ohmic bath has a delta-function
//! memory kernel `mu(t) = 2*zeta*delta(t)` (frequency-independent friction).
//! The single-relaxation-time bath has an exponential kernel
//! `mu(t) = (zeta/tau) exp(-t/tau)`, an Ohmic model with a high-frequency
//! cutoff at `1/tau`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Particle parameters: `m` and the oscillator force constant `K`.
/// `K = 0` is the free particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    pub mass: f64,
    pub spring_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BathKind {
    #[serde(rename = "ohmic")]
    Ohmic,
    #[serde(rename = "srt")]
    SingleRelaxationTime,
}

/// Bath parameters. `cutoff` is an angular-frequency bound used by the
/// zero-temperature and exact-weight quadratures that would otherwise
/// diverge; it is not part of either bath model proper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub kind: BathKind,
    pub friction: f64,
    pub relaxation_time: f64,
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemperatureRegime {
    /// coth(hbar*w/2kT) replaced by 2kT/(hbar*w): zero-point motion dropped.
    #[serde(rename = "high")]
    HighTemperature,
    /// coth replaced by 1: zero-point motion only.
    #[serde(rename = "zero")]
    ZeroTemperature,
    /// Full coth weight; requires a bath cutoff.
    #[serde(rename = "exact")]
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    pub temperature: f64,
    pub regime: TemperatureRegime,
}

/// Unit constants. Internally every formula is written with explicit
/// `hbar` and `boltzmann` factors so the defaults (both 1) reproduce the
/// natural-unit expressions and SI-style inputs also work.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitsSpec {
    pub hbar: f64,
    pub boltzmann: f64,
}

impl Default for UnitsSpec {
    fn default() -> Self {
        UnitsSpec {
            hbar: 1.0,
            boltzmann: 1.0,
        }
    }
}

/// The single source of all physical symbols used downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConfig {
    pub oscillator: OscillatorSpec,
    pub bath: BathSpec,
    pub thermal: ThermalSpec,
    pub units: UnitsSpec,
}

// serialize in the same flat document shape the deserializer accepts, so a
// manifest echo is itself a valid input
impl Serialize for PhysicalConfig {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("PhysicalConfig", 10)?;
        s.serialize_field("mass", &self.oscillator.mass)?;
        s.serialize_field("spring_constant", &self.oscillator.spring_constant)?;
        s.serialize_field("bath_kind", &self.bath.kind)?;
        s.serialize_field("friction", &self.bath.friction)?;
        s.serialize_field("relaxation_time", &self.bath.relaxation_time)?;
        s.serialize_field("cutoff", &self.bath.cutoff)?;
        s.serialize_field("temperature", &self.thermal.temperature)?;
        s.serialize_field("regime", &self.thermal.regime)?;
        s.serialize_field("hbar", &self.units.hbar)?;
        s.serialize_field("boltzmann", &self.units.boltzmann)?;
        s.end()
    }
}

/// Flat JSON document for [`PhysicalConfig`]. Unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysicalConfig {
    mass: f64,
    spring_constant: f64,
    bath_kind: BathKind,
    friction: f64,
    #[serde(default)]
    relaxation_time: f64,
    #[serde(default)]
    cutoff: Option<f64>,
    temperature: f64,
    regime: TemperatureRegime,
    #[serde(default = "one")]
    hbar: f64,
    #[serde(default = "one")]
    boltzmann: f64,
}

fn one() -> f64 {
    1.0
}

impl<'de> Deserialize<'de> for PhysicalConfig {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = RawPhysicalConfig::deserialize(deserializer)?;
        PhysicalConfig::new(
            OscillatorSpec {
                mass: raw.mass,
                spring_constant: raw.spring_constant,
            },
            BathSpec {
                kind: raw.bath_kind,
                friction: raw.friction,
                relaxation_time: raw.relaxation_time,
                cutoff: raw.cutoff,
            },
            ThermalSpec {
                temperature: raw.temperature,
                regime: raw.regime,
            },
            UnitsSpec {
                hbar: raw.hbar,
                boltzmann: raw.boltzmann,
            },
        )
        .map_err(serde::de::Error::custom)
    }
}

impl PhysicalConfig {
    pub fn new(
        oscillator: OscillatorSpec,
        bath: BathSpec,
        thermal: ThermalSpec,
        units: UnitsSpec,
    ) -> Result<Self> {
        if !(oscillator.mass > 0.0) || !oscillator.mass.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "mass must be positive, got {}",
                oscillator.mass
            )));
        }
        if !(oscillator.spring_constant >= 0.0) || !oscillator.spring_constant.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "spring_constant must be non-negative, got {}",
                oscillator.spring_constant
            )));
        }
        if !(bath.friction > 0.0) || !bath.friction.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "friction must be positive, got {}",
                bath.friction
            )));
        }
        match bath.kind {
            BathKind::Ohmic => {
                if bath.relaxation_time != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "ohmic bath requires relaxation_time = 0, got {}",
                        bath.relaxation_time
                    )));
                }
            }
            BathKind::SingleRelaxationTime => {
                if !(bath.relaxation_time > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "srt bath requires relaxation_time > 0, got {}",
                        bath.relaxation_time
                    )));
                }
                let x = 4.0 * bath.friction * bath.relaxation_time / oscillator.mass;
                if x > 1.0 {
                    return Err(Error::ComplexRoots(x));
                }
            }
        }
        if let Some(wc) = bath.cutoff {
            if !(wc > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "cutoff must be positive when present, got {wc}"
                )));
            }
        }
        if !(thermal.temperature >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "temperature must be non-negative, got {}",
                thermal.temperature
            )));
        }
        if thermal.regime == TemperatureRegime::ZeroTemperature && thermal.temperature != 0.0 {
            return Err(Error::InvalidConfig(format!(
                "zero-temperature regime requires temperature = 0, got {}",
                thermal.temperature
            )));
        }
        if !(units.hbar > 0.0) || !(units.boltzmann > 0.0) {
            return Err(Error::InvalidConfig(
                "hbar and boltzmann must be strictly positive".into(),
            ));
        }
        Ok(PhysicalConfig {
            oscillator,
            bath,
            thermal,
            units,
        })
    }

    pub fn mass(&self) -> f64 {
        self.oscillator.mass
    }

    pub fn spring_constant(&self) -> f64 {
        self.oscillator.spring_constant
    }

    pub fn friction(&self) -> f64 {
        self.bath.friction
    }

    pub fn is_free_particle(&self) -> bool {
        self.oscillator.spring_constant == 0.0
    }

    /// k_B * T in energy units.
    pub fn kt(&self) -> f64 {
        self.units.boltzmann * self.thermal.temperature
    }

    pub fn hbar(&self) -> f64 {
        self.units.hbar
    }

    /// Ohmic decay rate zeta/m.
    pub fn decay_rate(&self) -> f64 {
        self.bath.friction / self.oscillator.mass
    }

    /// Thermal de Broglie wavelength hbar/sqrt(m kT).
    pub fn thermal_length(&self) -> Result<f64> {
        let kt = self.kt();
        if kt <= 0.0 {
            return Err(Error::Domain {
                op: "thermal_length",
                msg: "requires positive temperature".into(),
            });
        }
        Ok(self.units.hbar / (self.oscillator.mass * kt).sqrt())
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.bath.cutoff
    }

    /// The cutoff, or a divergence error naming the quantity that needs it.
    pub fn require_cutoff(&self, what: &str) -> Result<f64> {
        self.bath.cutoff.ok_or_else(|| Error::Divergent {
            what: what.to_string(),
        })
    }
}

/// A pointwise value that may carry a Dirac-delta contribution at the
/// evaluation point. Downstream code must branch on the delta explicitly;
/// it is never folded into the pointwise part as a large finite number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distributional {
    pub value: f64,
    /// Weight of a delta function centered at the evaluation point, if any.
    pub delta: Option<f64>,
}

impl Distributional {
    pub fn regular(value: f64) -> Self {
        Distributional { value, delta: None }
    }

    pub fn with_delta(value: f64, weight: f64) -> Self {
        Distributional {
            value,
            delta: Some(weight),
        }
    }
}

/// Relaxation rates gamma_+ >= gamma_- > 0 of the exponential-memory bath,
/// the roots of `tau*g^2 - g + zeta/m = 0`.
pub fn gamma_pm(config: &PhysicalConfig) -> Result<(f64, f64)> {
    if config.bath.kind != BathKind::SingleRelaxationTime {
        return Err(Error::Domain {
            op: "gamma_pm",
            msg: "defined only for the single-relaxation-time bath".into(),
        });
    }
    let tau = config.bath.relaxation_time;
    let x = 4.0 * config.bath.friction * tau / config.oscillator.mass;
    if x > 1.0 {
        return Err(Error::ComplexRoots(x));
    }
    let root = (1.0 - x).sqrt();
    let gp = (1.0 + root) / (2.0 * tau);
    // gamma_- via the product identity gp*gm = zeta/(m tau) to avoid
    // cancellation when 4*zeta*tau/m is small.
    let gm = config.bath.friction / (config.oscillator.mass * tau * gp);
    Ok((gp, gm))
}

/// Fourier transform of the memory kernel, `integral_0^inf mu(t) e^{izt} dt`,
/// analytic with non-negative real part in the upper half plane.
pub fn memory_transform(config: &PhysicalConfig, z: Complex64) -> Result<Complex64> {
    if z.im < 0.0 {
        return Err(Error::Domain {
            op: "memory_transform",
            msg: format!("Im z = {} < 0 is outside the positive-real domain", z.im),
        });
    }
    match config.bath.kind {
        BathKind::Ohmic => Ok(Complex64::new(config.bath.friction, 0.0)),
        BathKind::SingleRelaxationTime => {
            let tau = config.bath.relaxation_time;
            Ok(config.bath.friction / (Complex64::new(1.0, 0.0) - Complex64::i() * z * tau))
        }
    }
}

/// Re of the transform on the real axis; the spectral weight of the bath.
pub fn memory_transform_re(config: &PhysicalConfig, omega: f64) -> f64 {
    match config.bath.kind {
        BathKind::Ohmic => config.bath.friction,
        BathKind::SingleRelaxationTime => {
            let wt = omega * config.bath.relaxation_time;
            config.bath.friction / (1.0 + wt * wt)
        }
    }
}

/// Memory kernel at `t >= 0`. The Ohmic kernel is a delta function of
/// weight `2*zeta` at the origin and vanishes pointwise for `t > 0`.
pub fn memory_kernel(config: &PhysicalConfig, t: f64) -> Result<Distributional> {
    if t < 0.0 {
        return Err(Error::Domain {
            op: "memory_kernel",
            msg: format!("t = {t} < 0"),
        });
    }
    match config.bath.kind {
        BathKind::Ohmic => {
            if t == 0.0 {
                Ok(Distributional::with_delta(0.0, 2.0 * config.bath.friction))
            } else {
                Ok(Distributional::regular(0.0))
            }
        }
        BathKind::SingleRelaxationTime => {
            let tau = config.bath.relaxation_time;
            Ok(Distributional::regular(
                config.bath.friction / tau * (-t / tau).exp(),
            ))
        }
    }
}

/// Response function `alpha(w + i0+) = 1 / (-m w^2 - i w mu(w) + K)`.
///
/// For the free particle this has a pole at `w = 0`; callers building
/// integrands should pair `Im(alpha)` with regular factors through
/// [`im_alpha_integrand`] instead of dividing by `w` themselves.
pub fn response(config: &PhysicalConfig, omega: f64) -> Result<Complex64> {
    if omega == 0.0 && config.is_free_particle() {
        return Err(Error::FreeParticleStaticPole);
    }
    let mu = memory_transform(config, Complex64::new(omega, 0.0))?;
    let m = config.oscillator.mass;
    let k = config.oscillator.spring_constant;
    let den = Complex64::new(k - m * omega * omega, 0.0) - Complex64::i() * omega * mu;
    if den.norm() == 0.0 {
        return Err(Error::Singularity("response denominator".into()));
    }
    Ok(den.inv())
}

/// `Im alpha(w + i0+)` computed in a form stable near `w = 0`.
///
/// Writing `alpha = 1/(K - m w^2 - i w mu)`, one has
/// `Im alpha = w Re{mu} / |K - m w^2 - i w mu|^2`, which is regular for
/// `K > 0` and behaves as `Re{mu(0)} / (w |mu(0)|^2)` for the free particle.
pub fn im_alpha(config: &PhysicalConfig, omega: f64) -> f64 {
    let m = config.oscillator.mass;
    let k = config.oscillator.spring_constant;
    let mu = match config.bath.kind {
        BathKind::Ohmic => Complex64::new(config.bath.friction, 0.0),
        BathKind::SingleRelaxationTime => {
            let tau = config.bath.relaxation_time;
            config.bath.friction * (Complex64::new(1.0, 0.0) + Complex64::new(0.0, omega * tau))
                / (1.0 + omega * tau * omega * tau)
        }
    };
    let re_d = k - m * omega * omega + omega * mu.im;
    let im_d = -omega * mu.re;
    let norm2 = re_d * re_d + im_d * im_d;
    omega * mu.re / norm2
}

/// `Im alpha(w) * w`: finite at `w = 0` for every supported model, the
/// combined form callers should use for integrands that would otherwise
/// meet the free-particle static pole.
pub fn im_alpha_integrand(config: &PhysicalConfig, omega: f64) -> f64 {
    if omega == 0.0 {
        // limit of w * Im alpha: zero for K > 0, Re{mu}/|mu|^2 at K = 0
        if !config.is_free_particle() {
            return 0.0;
        }
        return match config.bath.kind {
            BathKind::Ohmic => 1.0 / config.bath.friction,
            // mu(0) = zeta, real, for the exponential kernel as well
            BathKind::SingleRelaxationTime => 1.0 / config.bath.friction,
        };
    }
    im_alpha(config, omega) * omega
}
