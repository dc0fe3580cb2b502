//! Randomized invariants over parameter space.

use proptest::prelude::*;

use qbm_core::evolution::{attenuation, initial_wigner, spatial_density, InitialState};
use qbm_core::fluctuations::covariance;
use qbm_core::model::{
    BathKind, BathSpec, OscillatorSpec, PhysicalConfig, TemperatureRegime, ThermalSpec, UnitsSpec,
};

fn srt(tau: f64, kt: f64) -> PhysicalConfig {
    PhysicalConfig::new(
        OscillatorSpec {
            mass: 1.0,
            spring_constant: 0.0,
        },
        BathSpec {
            kind: BathKind::SingleRelaxationTime,
            friction: 1.0,
            relaxation_time: tau,
            cutoff: None,
        },
        ThermalSpec {
            temperature: kt,
            regime: TemperatureRegime::HighTemperature,
        },
        UnitsSpec::default(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariance_stays_positive_semidefinite(
        tau in 0.01f64..0.24,
        kt in 0.5f64..20.0,
        t in 0.01f64..5.0,
    ) {
        let c = srt(tau, kt);
        let a = covariance(&c, t).unwrap();
        prop_assert!(a.a_pp >= 0.0 && a.a_qq >= 0.0);
        prop_assert!(a.det() >= -1e-10 * a.a_pp * a.a_qq);
        // Cauchy-Schwarz on the cross moment
        prop_assert!(a.a_pq * a.a_pq <= a.a_pp * a.a_qq * (1.0 + 1e-10));
    }

    #[test]
    fn transform_is_conjugate_symmetric_and_normalized(
        sep in 0.5f64..6.0,
        width in 0.3f64..2.0,
        q in -4.0f64..4.0,
        p in -4.0f64..4.0,
        thermal in proptest::bool::ANY,
    ) {
        let c = srt(0.1, 5.0);
        let state = if thermal {
            InitialState::ThermalCatPair { separation: sep, width }
        } else {
            InitialState::CatPair { separation: sep, width }
        };
        let wt = initial_wigner(&state, &c).unwrap();
        let at0 = wt.eval(0.0, 0.0);
        prop_assert!((at0.re - 1.0).abs() < 1e-12 && at0.im.abs() < 1e-14);
        let a = wt.eval(q, p);
        let b = wt.eval(-q, -p);
        prop_assert!((a.re - b.re).abs() <= 1e-10 * (1.0 + a.re.abs()));
        prop_assert!((a.im + b.im).abs() <= 1e-10 * (1.0 + a.im.abs()));
    }

    #[test]
    fn cat_density_never_goes_negative(
        ratio in 1.0f64..10.0,
        t in 0.0f64..10.0,
        x_frac in -1.0f64..1.0,
    ) {
        let c = srt(0.1, 10.0);
        let state = InitialState::CatPair { separation: ratio, width: 1.0 };
        let den = spatial_density(&state, &c, t).unwrap();
        let x = x_frac * (0.5 * ratio + 6.0 * den.variance.sqrt());
        prop_assert!(den.eval(x) >= -1e-12);
    }

    #[test]
    fn attenuation_stays_in_unit_interval(
        sep in 0.5f64..6.0,
        width in 0.3f64..2.0,
        t in 0.0f64..20.0,
    ) {
        let c = srt(0.1, 10.0);
        let state = InitialState::CatPair { separation: sep, width };
        let a = attenuation(&state, &c, t).unwrap().a;
        prop_assert!(a > 0.0 && a <= 1.0);
    }
}
