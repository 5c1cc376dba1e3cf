use opsis_core::hs_ops::{op_translate, rank_one};
use opsis_core::linalg::{identity, max_abs_diff, CMatrix};
use opsis_core::sampling::{
    avg_samples, berezin, channel_matrix, cross_seq, diag_channel_samples, dual_left_inverse, frame_bounds,
    reconstruct, reconstruction_kit, reconstruction_kit_with, sublattice_inflate, transfer_matrix, KitOptions,
};
use opsis_core::si_space::GeneratorSystem;
use opsis_core::timefreq::{gaussian_window, tf_shift};
use opsis_core::{
    Complex64, Error, HsOperator, Lattice, PhasePoint, PhaseSpace, SamplingScheme, SeededRng, Signal, WindowPair,
};

fn sp(l: usize) -> PhaseSpace {
    PhaseSpace::new(l).unwrap()
}

fn random_pairs(rng: &mut SeededRng, l: usize, m: usize) -> SamplingScheme {
    SamplingScheme::Windows((0..m).map(|_| WindowPair::new(rng.signal(l), rng.signal(l))).collect())
}

fn random_system(rng: &mut SeededRng, lat: &Lattice, n: usize) -> GeneratorSystem {
    GeneratorSystem::new(lat.clone(), (0..n).map(|_| rng.kernel(lat.modulus())).collect()).unwrap()
}

#[test]
fn point_mass_on_full_lattice_is_not_a_frame() {
    let l = 4;
    let d = Signal::delta(l, 0);
    let lat = Lattice::full(sp(l));
    let sys = GeneratorSystem::new(lat.clone(), vec![rank_one(&d, &d).unwrap()]).unwrap();
    let scheme = SamplingScheme::Windows(vec![WindowPair::new(d.clone(), d)]);
    let a = cross_seq(&sys, &scheme).unwrap();
    for (lam, v) in lat.elements().iter().zip(a.get(0, 0).values()) {
        let want = if lam.x == 0 { 1.0 } else { 0.0 };
        assert!((v - Complex64::new(want, 0.0)).norm() < 1e-14);
    }
    let t = transfer_matrix(&a, &lat, sys.dual()).unwrap();
    for (xi, f) in t.points().iter().zip(t.fibers()) {
        let want = if xi.x == 0 { 4.0 } else { 0.0 };
        assert!((f[(0, 0)] - Complex64::new(want, 0.0)).norm() < 1e-13);
    }
    let fb = frame_bounds(&t);
    // zero up to the rounding of the fiber sums
    assert!(fb.alpha <= 1e-15 * fb.beta);
    assert!(!fb.is_frame());
    assert!(!sys.riesz_check(None).is_riesz);
    assert!(matches!(reconstruction_kit(&sys, &scheme), Err(Error::NotRiesz { .. })));
}

#[test]
fn sample_identity_three_ways() {
    let l = 8;
    let lat = Lattice::separable(sp(l), 2, 2).unwrap();
    let mut rng = SeededRng::new(31);
    let t = rng.kernel(l);
    let (g, gd) = (rng.signal(l), rng.signal(l));
    let scheme = SamplingScheme::Windows(vec![WindowPair::new(g.clone(), gd.clone())]);
    let diag = diag_channel_samples(&t, &scheme, &lat).unwrap();
    let avg = avg_samples(&t, &scheme, &lat).unwrap();
    for (i, lam) in lat.elements().iter().enumerate() {
        let direct = t.apply(&tf_shift(*lam, &g)).unwrap().inner(&tf_shift(*lam, &gd));
        assert!((diag.channel(0).values()[i] - direct).norm() < 1e-12);
        assert!((avg.channel(0).values()[i] - direct).norm() < 1e-12);
    }
}

#[test]
fn channel_matrix_diagonal_and_berezin_are_samples() {
    let l = 6;
    let lat = Lattice::separable(sp(l), 2, 3).unwrap();
    let mut rng = SeededRng::new(32);
    let sys = random_system(&mut rng, &lat, 2);
    let h = sys.synthesize(&rng.coef_array(&lat, 2)).unwrap();
    let (g, gd) = (rng.signal(l), rng.signal(l));
    let scheme = SamplingScheme::Windows(vec![WindowPair::new(g.clone(), gd.clone())]);
    let s = diag_channel_samples(&h, &scheme, &lat).unwrap();
    let cm = channel_matrix(&h, &g, &gd, &lat).unwrap();
    let b = berezin(&h, &g, &gd).unwrap();
    for (i, lam) in lat.elements().iter().enumerate() {
        assert!((cm[(i, i)] - s.channel(0).values()[i]).norm() < 1e-12);
        assert!((b.at(*lam) - s.channel(0).values()[i]).norm() < 1e-12);
    }
}

#[test]
fn samples_are_lattice_convolutions() {
    let lat = Lattice::separable(sp(8), 2, 4).unwrap();
    let mut rng = SeededRng::new(33);
    let sys = random_system(&mut rng, &lat, 2);
    let scheme = random_pairs(&mut rng, 8, 3);
    let c = rng.coef_array(&lat, 2);
    let s = diag_channel_samples(&sys.synthesize(&c).unwrap(), &scheme, &lat).unwrap();
    let via_conv = cross_seq(&sys, &scheme).unwrap().apply(&lat, &c).unwrap();
    assert!(s.max_abs_diff(&via_conv) < 1e-11);
}

#[test]
fn gaussian_single_channel_reconstruction() {
    let l = 8;
    let s = sp(l);
    let lat = Lattice::separable(s, 2, 2).unwrap();
    let g = gaussian_window(s);
    let sys = GeneratorSystem::new(lat.clone(), vec![rank_one(&g, &g).unwrap()]).unwrap();
    let scheme = SamplingScheme::Windows(vec![WindowPair::new(g.clone(), g)]);
    let kit = reconstruction_kit(&sys, &scheme).unwrap();
    let c = SeededRng::new(34).coef_array(&lat, 1);
    let t = sys.synthesize(&c).unwrap();
    let back = reconstruct(&diag_channel_samples(&t, &scheme, &lat).unwrap(), &kit).unwrap();
    assert!((&back - &t).hs_norm() / t.hs_norm() < 1e-9);
}

#[test]
fn square_systems_interpolate() {
    let lat = Lattice::separable(sp(6), 2, 3).unwrap();
    let mut rng = SeededRng::new(35);
    let sys = random_system(&mut rng, &lat, 2);
    let scheme = random_pairs(&mut rng, 6, 2);
    let kit = reconstruction_kit(&sys, &scheme).unwrap();
    for (m, h) in kit.recon_ops().iter().enumerate() {
        let s = diag_channel_samples(h, &scheme, &lat).unwrap();
        for (n, ch) in s.channels().iter().enumerate() {
            for (lam, v) in lat.elements().iter().zip(ch.values()) {
                let want = if m == n && *lam == PhasePoint::ORIGIN { 1.0 } else { 0.0 };
                assert!((v - Complex64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn every_left_inverse_reconstructs() {
    let lat = Lattice::separable(sp(6), 3, 2).unwrap();
    let mut rng = SeededRng::new(36);
    let sys = random_system(&mut rng, &lat, 1);
    let scheme = random_pairs(&mut rng, 6, 3);
    let c = rng.coef_array(&lat, 1);
    let t = sys.synthesize(&c).unwrap();
    let s = diag_channel_samples(&t, &scheme, &lat).unwrap();
    let canonical = reconstruction_kit(&sys, &scheme).unwrap();
    let c_fibers: Vec<CMatrix> = (0..lat.len()).map(|_| rng.matrix(1, 3)).collect();
    let opts = KitOptions {
        c_fibers: Some(c_fibers),
        ..Default::default()
    };
    let other = reconstruction_kit_with(&sys, &scheme, &opts).unwrap();
    assert!(max_abs_diff(&other.dual_fibers[0], &canonical.dual_fibers[0]) > 1e-3);
    assert!(other.left_inverse_defect() < 1e-10);
    for kit in [&canonical, &other] {
        let back = reconstruct(&s, kit).unwrap();
        assert!((&back - &t).hs_norm() / t.hs_norm() < 1e-9);
    }
}

#[test]
fn left_inverse_rejects_misshaped_c() {
    let lat = Lattice::separable(sp(4), 2, 2).unwrap();
    let mut rng = SeededRng::new(37);
    let sys = random_system(&mut rng, &lat, 1);
    let scheme = random_pairs(&mut rng, 4, 2);
    let t = transfer_matrix(&cross_seq(&sys, &scheme).unwrap(), &lat, sys.dual()).unwrap();
    let bad: Vec<CMatrix> = (0..lat.len()).map(|_| rng.matrix(2, 2)).collect();
    assert!(matches!(
        dual_left_inverse(&t, Some(&bad)),
        Err(Error::SizeMismatch { .. })
    ));
    let b = dual_left_inverse(&t, None).unwrap();
    for (bf, af) in b.iter().zip(t.fibers()) {
        assert!(max_abs_diff(&(bf * af), &identity(1)) < 1e-10);
    }
}

#[test]
fn norm_equivalence_between_operator_and_samples() {
    let lat = Lattice::separable(sp(8), 2, 2).unwrap();
    let mut rng = SeededRng::new(38);
    let sys = random_system(&mut rng, &lat, 2);
    let scheme = random_pairs(&mut rng, 8, 3);
    let kit = reconstruction_kit(&sys, &scheme).unwrap();
    for _ in 0..5 {
        let t = sys.synthesize(&rng.coef_array(&lat, 2)).unwrap();
        let sn = diag_channel_samples(&t, &scheme, &lat).unwrap().norm_sqr();
        let tn = t.norm_sqr();
        let slack = 1e-9 * sn.max(tn);
        assert!(kit.alpha() / kit.riesz.upper * tn <= sn + slack);
        assert!(sn <= kit.beta() / kit.riesz.lower * tn + slack);
    }
}

#[test]
fn sublattice_inflation_resynthesizes() {
    let s = sp(8);
    let lat = Lattice::separable(s, 2, 2).unwrap();
    let sub = Lattice::separable(s, 4, 2).unwrap();
    let mut rng = SeededRng::new(39);
    let sys = random_system(&mut rng, &lat, 1);
    let inf = sublattice_inflate(&sys, &sub).unwrap();
    assert_eq!(inf.index(), 2);
    assert_eq!(inf.system.len(), 2);
    let c = rng.coef_array(&lat, 1);
    let t = sys.synthesize(&c).unwrap();
    let again = inf.system.synthesize(&inf.inflate_coefficients(&c).unwrap()).unwrap();
    assert!(again.max_abs_diff(&t) < 1e-12);

    let scheme = random_pairs(&mut rng, 8, 2);
    let kit = reconstruction_kit(&inf.system, &scheme).unwrap();
    let back = reconstruct(&diag_channel_samples(&t, &scheme, &sub).unwrap(), &kit).unwrap();
    assert!((&back - &t).hs_norm() / t.hs_norm() < 1e-9);
}

#[test]
fn average_operator_scheme_reconstructs() {
    let lat = Lattice::separable(sp(6), 2, 2).unwrap();
    let mut rng = SeededRng::new(40);
    let sys = random_system(&mut rng, &lat, 1);
    let scheme = SamplingScheme::Average(vec![rng.kernel(6), rng.kernel(6)]);
    let kit = reconstruction_kit(&sys, &scheme).unwrap();
    let t = sys.synthesize(&rng.coef_array(&lat, 1)).unwrap();
    let back = reconstruct(&avg_samples(&t, &scheme, &lat).unwrap(), &kit).unwrap();
    assert!((&back - &t).hs_norm() / t.hs_norm() < 1e-9);
}

#[test]
fn translated_sample_operator_shifts_samples() {
    let lat = Lattice::separable(sp(6), 1, 3).unwrap();
    let mut rng = SeededRng::new(41);
    let t = rng.kernel(6);
    let scheme = random_pairs(&mut rng, 6, 1);
    let mu = PhasePoint::new(2, 3);
    let base = diag_channel_samples(&t, &scheme, &lat).unwrap();
    let moved = diag_channel_samples(&op_translate(mu, &t), &scheme, &lat).unwrap();
    let s = lat.space();
    for lam in lat.elements() {
        let a = moved.channel(0).get(&lat, *lam).unwrap();
        let b = base.channel(0).get(&lat, s.sub(*lam, mu)).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn mismatched_operator_size_is_rejected() {
    let lat = Lattice::full(sp(4));
    let scheme = SamplingScheme::Windows(vec![WindowPair::new(Signal::delta(4, 0), Signal::delta(4, 0))]);
    assert!(matches!(
        diag_channel_samples(&HsOperator::identity(5), &scheme, &lat),
        Err(Error::SizeMismatch { .. })
    ));
}
