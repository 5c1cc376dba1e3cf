//! Seeded fixtures shared by the benchmarks.

use opsis_core::{GeneratorSystem, Lattice, PhaseSpace, SamplingScheme, SeededRng, WindowPair};

/// `N` random generators on `aZ_L x bZ_L` with `M` random window pairs.
pub fn fixture(l: usize, a: usize, b: usize, n: usize, m: usize, seed: u64) -> (GeneratorSystem, SamplingScheme) {
    let mut rng = SeededRng::new(seed);
    let lattice = Lattice::separable(PhaseSpace::new(l).expect("L >= 2"), a, b).expect("a | L and b | L");
    let system = GeneratorSystem::new(lattice, (0..n).map(|_| rng.kernel(l)).collect()).expect("N >= 1");
    let scheme = SamplingScheme::Windows((0..m).map(|_| WindowPair::new(rng.signal(l), rng.signal(l))).collect());
    (system, scheme)
}
