mod common;

use common::*;
use macroq::fock::{beam_splitter, FockPureState, TAIL_TOL};
use macroq::states::fock_builders as fb;
use macroq::states::schemes::{homodyne_conditioning, photon_subtraction};
use macroq::states::{Amplitude, BuiltState, StateSpec};
use macroq::C64;
use proptest::prelude::*;

fn check_built(b: &BuiltState) {
    match b {
        BuiltState::Fock(p) => {
            assert!((p.amplitudes().norm() - 1.0).abs() < 1e-12);
            // two-level modes hold exact qubit encodings and carry no truncation
            for (m, &c) in p.truncations().iter().enumerate() {
                assert!(c <= 2 || p.tail_mass(m) < TAIL_TOL);
            }
        }
        BuiltState::FockMixed(rho) => assert_physical(rho, 1e-9),
        BuiltState::Spin(s) => {
            assert!((s.density().trace().re - 1.0).abs() < 1e-12);
            assert!(s.min_eigenvalue() > -1e-12);
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn builders_emit_valid_states(a in 0.0f64..3.0, ph in 0.0f64..6.3, r in 0.0f64..1.5, n in 2usize..6, eps in 0.05f64..1.5) {
        let z = Amplitude::Complex([a * ph.cos(), a * ph.sin()]);
        let specs = vec![
            StateSpec::Coherent { alpha: z, cutoff: None },
            StateSpec::Scs { alpha: z, phi: ph, cutoff: None },
            StateSpec::Ecs { alpha: z, phi: ph, cutoff: None },
            StateSpec::Hybrid { alpha: z, cutoff: None },
            StateSpec::DisplacedSpe { alpha: z, both_modes: true, cutoff: None },
            StateSpec::SqueezedVacuum { r, cutoff: None },
            StateSpec::SqueezedSpe { r, cutoff: None },
            StateSpec::ZeroPlusCoherent { alpha: z, cutoff: None },
            StateSpec::Qiopa { g: r.min(1.0), order_cap: 40 },
            StateSpec::Marquardt { n, theta: eps },
            StateSpec::GeneralizedGhz { n, epsilon: eps },
            StateSpec::MixedGhz { n, gamma: eps / 1.5 },
            StateSpec::Dn { n },
            StateSpec::Cooper { n: n / 2, phi: ph },
        ];
        for s in specs {
            check_built(&s.build().unwrap());
        }
    }

    #[test]
    fn cat_amplitudes_are_truncation_stable(a in 0.1f64..3.0, ph in 0.0f64..6.3) {
        let alpha = C64::from_polar(a, ph);
        type Rebuild = Box<dyn Fn(usize) -> macroq::Result<FockPureState>>;
        let pairs: [(FockPureState, Rebuild); 3] = [
            (fb::scs(alpha, 0.0, None).unwrap(), Box::new(move |c| fb::scs(alpha, 0.0, Some(c)))),
            (fb::ecs(alpha, 0.0, None).unwrap(), Box::new(move |c| fb::ecs(alpha, 0.0, Some(c)))),
            (fb::hybrid(alpha, None).unwrap(), Box::new(move |c| fb::hybrid(alpha, Some(c)))),
        ];
        for (base, rebuild) in pairs {
            let c = *base.truncations().iter().max().unwrap();
            let wide = rebuild(2 * c).unwrap();
            let (narrowed, _) = wide.resized(base.truncations()).unwrap();
            // compare raw retained amplitudes, before renormalization
            let raw = wide.amplitudes();
            let dims_wide = wide.truncations().to_vec();
            let dims = base.truncations().to_vec();
            let mut worst: f64 = 0.0;
            for i in 0..base.dim() {
                let digits = macroq::linalg::digits(i, &dims);
                let j = digits.iter().zip(&dims_wide).fold(0, |acc, (d, w)| acc * w + d);
                worst = worst.max((raw[j] - base.amplitudes()[i]).norm());
            }
            prop_assert!(worst < 1e-10, "{}", worst);
            prop_assert!(narrowed.dim() == base.dim());
        }
    }

    #[test]
    fn scheme_probabilities_are_probabilities(r in 0.05f64..1.0, k in 1usize..3, n in 1usize..4, x0 in 0.01f64..3.0) {
        let p = photon_subtraction(r, k, 0.01).unwrap().success_probability;
        prop_assert!((0.0..=1.0).contains(&p));
        let h = homodyne_conditioning(n, x0, 0.0).unwrap().success_probability;
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn full_window_is_unconditioned(n in 1usize..4, s in 0.0f64..0.8) {
        let out = homodyne_conditioning(n, 1e3, s).unwrap();
        prop_assert!((out.success_probability - 1.0).abs() < 1e-9);
        // independent route: split, then trace out the tapped arm
        let c = out.state.dim();
        let aux = if s == 0.0 { FockPureState::vacuum(vec![c]).unwrap() } else { fb::squeezed_vacuum(s, Some(c)).unwrap() };
        let input = FockPureState::product(&[FockPureState::basis(vec![c], &[n]).unwrap(), aux]).unwrap();
        let split = input.apply(&beam_splitter(&[c, c], (0, 1), 0.5).unwrap()).unwrap();
        let reduced = split.reduced(&[0]).unwrap();
        prop_assert!((reduced.matrix() - out.state.matrix()).camax() < 1e-9);
    }
}
