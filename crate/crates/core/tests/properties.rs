use opsis_core::hs_ops::{hs_inner, kn_symbol, op_translate};
use opsis_core::sampling::{
    coefficient_frame_expansion, cross_seq, diag_channel_samples, frame_bounds, reconstruct, reconstruction_kit,
    transfer_matrix,
};
use opsis_core::si_space::GeneratorSystem;
use opsis_core::{Lattice, PhasePoint, PhaseSpace, SamplingScheme, SeededRng, WindowPair};
use proptest::prelude::*;

const MODULI: &[usize] = &[4, 5, 6, 8];

fn divisors(l: usize) -> Vec<usize> {
    (1..=l).filter(|d| l.is_multiple_of(*d)).collect()
}

prop_compose! {
    fn point_pair()(l in prop::sample::select(MODULI))
        (l in Just(l), a in (0..l, 0..l), b in (0..l, 0..l), c in (0..l, 0..l))
        -> (usize, PhasePoint, PhasePoint, PhasePoint) {
        (l, PhasePoint::new(a.0, a.1), PhasePoint::new(b.0, b.1), PhasePoint::new(c.0, c.1))
    }
}

prop_compose! {
    fn separable()(l in prop::sample::select(MODULI))
        (l in Just(l), a in prop::sample::select(divisors(l)), b in prop::sample::select(divisors(l)))
        -> (usize, usize, usize) {
        (l, a, b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symplectic_form_is_alternating_and_biadditive((l, a, b, c) in point_pair()) {
        let s = PhaseSpace::new(l).unwrap();
        let f = |p, q| s.symplectic_form(p, q).unwrap();
        prop_assert_eq!(f(a, a), 0);
        prop_assert_eq!((f(a, b) + f(b, a)) % l, 0);
        prop_assert_eq!(f(s.add(a, b), c), (f(a, c) + f(b, c)) % l);
    }

    #[test]
    fn operator_translation_is_unitary_representation((l, a, b, _) in point_pair(), seed in any::<u64>()) {
        let s = PhaseSpace::new(l).unwrap();
        let mut rng = SeededRng::new(seed);
        let (op, other) = (rng.kernel(l), rng.kernel(l));
        let twice = op_translate(a, &op_translate(b, &op));
        prop_assert!(twice.max_abs_diff(&op_translate(s.add(a, b), &op)) < 1e-12);
        let moved = hs_inner(&op_translate(a, &op), &op_translate(a, &other)).unwrap();
        prop_assert!((moved - hs_inner(&op, &other).unwrap()).norm() < 1e-11);
        let shifted = kn_symbol(&op_translate(a, &op));
        prop_assert!(shifted.max_abs_diff(&kn_symbol(&op).translate(a)) < 1e-12);
    }

    #[test]
    fn symplectic_fourier_round_trip((l, a, b) in separable(), seed in any::<u64>()) {
        let lat = Lattice::separable(PhaseSpace::new(l).unwrap(), a, b).unwrap();
        let dual = lat.dual_transversal();
        let c = SeededRng::new(seed).lattice_seq(&lat);
        let f = lat.symp_fourier(&c, &dual).unwrap();
        prop_assert!(lat.inv_symp_fourier(&f, &dual).unwrap().max_abs_diff(&c) < 1e-12);
        // Plancherel with the 1/|Lambda| normalization
        let energy: f64 = f.iter().map(|v| v.norm_sqr()).sum::<f64>() / lat.len() as f64;
        prop_assert!((energy - c.norm_sqr()).abs() < 1e-10 * (1.0 + c.norm_sqr()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampling_pipeline_round_trip(
        (l, a, b) in separable().prop_filter("small lattice", |(l, a, b)| (l / a) * (l / b) <= 16),
        n in 1usize..=2,
        extra in 0usize..=1,
        seed in any::<u64>(),
    ) {
        let lat = Lattice::separable(PhaseSpace::new(l).unwrap(), a, b).unwrap();
        let mut rng = SeededRng::new(seed);
        let sys = GeneratorSystem::new(lat.clone(), (0..n).map(|_| rng.kernel(l)).collect()).unwrap();
        let scheme = SamplingScheme::Windows(
            (0..n + extra).map(|_| WindowPair::new(rng.signal(l), rng.signal(l))).collect(),
        );
        let c = rng.coef_array(&lat, n);
        let t = sys.synthesize(&c).unwrap();
        let s = diag_channel_samples(&t, &scheme, &lat).unwrap();

        // sandwich holds whether or not the transfer matrix is injective
        let a_seq = cross_seq(&sys, &scheme).unwrap();
        let fb = frame_bounds(&transfer_matrix(&a_seq, &lat, sys.dual()).unwrap());
        let (cn, sn) = (c.norm_sqr(), s.norm_sqr());
        prop_assert!(fb.alpha * cn <= sn + 1e-9 * (1.0 + sn));
        prop_assert!(sn <= fb.beta * cn + 1e-9 * (1.0 + sn));

        if let Ok(kit) = reconstruction_kit(&sys, &scheme) {
            // a kit is only produced with a healthy lower bound, so conditioning is bounded
            prop_assume!(kit.alpha() > 1e-6 * kit.beta() && kit.riesz.lower > 1e-6 * kit.riesz.upper);
            let back = reconstruct(&s, &kit).unwrap();
            prop_assert!(back.max_abs_diff(&t) <= 1e-8 * (1.0 + t.hs_norm()));
            let coefs = coefficient_frame_expansion(&s, &kit).unwrap();
            prop_assert!(coefs.max_abs_diff(&c) <= 1e-8 * (1.0 + c.norm_sqr().sqrt()));
        }
    }
}
