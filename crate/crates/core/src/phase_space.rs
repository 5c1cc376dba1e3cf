//! The finite phase space `Z_L x Z_L`, its lattices (subgroups) and the
//! Fourier analysis on them.
//!
//! The pairing between phase-space points is the symplectic form
//! `sigma(z, z') = w * x' - w' * x (mod L)`; characters are
//! `exp(2 pi i sigma(., .) / L)`. Annihilators are computed by exhaustive
//! pairing tests, which is exact and cheap for `L <= 64`.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{root_table, unit_root};

/// The group `Z_L x Z_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseSpace {
    modulus: usize,
}

/// A point `(x, w)` of `Z_L x Z_L`: time shift `x`, frequency shift `w`.
///
/// Ordering is lexicographic in `(x, w)`, which is the canonical order used
/// for lattice elements and transversals throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PhasePoint {
    pub x: usize,
    pub w: usize,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0, w: 0 };

    pub const fn new(x: usize, w: usize) -> Self {
        Self { x, w }
    }
}

impl std::fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.w)
    }
}

impl PhaseSpace {
    pub fn new(modulus: usize) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(Self { modulus })
    }

    #[inline]
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// Number of points, `L^2`.
    #[inline]
    pub fn order(&self) -> usize {
        self.modulus * self.modulus
    }

    /// Builds a point from arbitrary integers, reducing both coordinates mod `L`.
    pub fn point(&self, x: i64, w: i64) -> PhasePoint {
        let l = self.modulus as i64;
        PhasePoint::new(x.rem_euclid(l) as usize, w.rem_euclid(l) as usize)
    }

    pub fn check(&self, p: PhasePoint) -> Result<PhasePoint> {
        if p.x < self.modulus && p.w < self.modulus {
            Ok(p)
        } else {
            Err(Error::PointOutOfRange {
                x: p.x,
                w: p.w,
                modulus: self.modulus,
            })
        }
    }

    #[inline]
    pub fn add(&self, a: PhasePoint, b: PhasePoint) -> PhasePoint {
        let l = self.modulus;
        PhasePoint::new((a.x + b.x) % l, (a.w + b.w) % l)
    }

    #[inline]
    pub fn neg(&self, a: PhasePoint) -> PhasePoint {
        let l = self.modulus;
        PhasePoint::new((l - a.x) % l, (l - a.w) % l)
    }

    #[inline]
    pub fn sub(&self, a: PhasePoint, b: PhasePoint) -> PhasePoint {
        self.add(a, self.neg(b))
    }

    /// All `L^2` points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = PhasePoint> {
        let l = self.modulus;
        (0..l).flat_map(move |x| (0..l).map(move |w| PhasePoint::new(x, w)))
    }

    /// Row-major position of `p` in an `L x L` table.
    #[inline]
    pub fn flat_index(&self, p: PhasePoint) -> usize {
        p.x * self.modulus + p.w
    }

    /// `sigma(z, z') = z.w * z'.x - z'.w * z.x (mod L)`.
    ///
    /// Points carrying coordinates outside `[0, L)` were built for a different
    /// modulus and are rejected.
    pub fn symplectic_form(&self, z: PhasePoint, zp: PhasePoint) -> Result<usize> {
        self.check(z)?;
        self.check(zp)?;
        Ok(self.sigma(z, zp))
    }

    #[inline]
    pub(crate) fn sigma(&self, z: PhasePoint, zp: PhasePoint) -> usize {
        let l = self.modulus;
        let a = (z.w * zp.x) % l;
        let b = (zp.w * z.x) % l;
        (a + l - b) % l
    }

    /// The symplectic character `exp(2 pi i sigma(z, z') / L)`.
    #[inline]
    pub fn character(&self, z: PhasePoint, zp: PhasePoint) -> Complex64 {
        unit_root(self.sigma(z, zp) as i64, self.modulus)
    }
}

/// How a lattice was specified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeDescriptor {
    /// `a Z_L x b Z_L`, with `a | L` and `b | L`.
    Separable { a: usize, b: usize },
    /// The subgroup generated by the listed points.
    Generators(Vec<PhasePoint>),
}

/// A subgroup of `Z_L x Z_L`, with its elements in lexicographic order.
#[derive(Debug, Clone)]
pub struct Lattice {
    space: PhaseSpace,
    descriptor: LatticeDescriptor,
    elements: Vec<PhasePoint>,
    // position of each phase-space point in `elements`, by flat index
    index: Vec<Option<usize>>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.elements == other.elements
    }
}

impl Lattice {
    pub fn build(space: PhaseSpace, descriptor: LatticeDescriptor) -> Result<Self> {
        let l = space.modulus();
        let elements = match &descriptor {
            LatticeDescriptor::Separable { a, b } => {
                for (name, v) in [("a", *a), ("b", *b)] {
                    if v == 0 || !l.is_multiple_of(v) {
                        return Err(Error::InvalidDescriptor(format!(
                            "{name} = {v} does not divide L = {l}"
                        )));
                    }
                }
                let mut out = Vec::with_capacity((l / a) * (l / b));
                for x in (0..l).step_by(*a) {
                    for w in (0..l).step_by(*b) {
                        out.push(PhasePoint::new(x, w));
                    }
                }
                out
            }
            LatticeDescriptor::Generators(gens) => {
                for g in gens {
                    space
                        .check(*g)
                        .map_err(|_| Error::InvalidDescriptor(format!("generator {g} lies outside Z_{l} x Z_{l}")))?;
                }
                closure(space, gens)
            }
        };
        Ok(Self::from_sorted(space, descriptor, elements))
    }

    pub fn separable(space: PhaseSpace, a: usize, b: usize) -> Result<Self> {
        Self::build(space, LatticeDescriptor::Separable { a, b })
    }

    pub fn generated(space: PhaseSpace, gens: Vec<PhasePoint>) -> Result<Self> {
        Self::build(space, LatticeDescriptor::Generators(gens))
    }

    pub fn full(space: PhaseSpace) -> Self {
        Self::separable(space, 1, 1).expect("1 divides every modulus")
    }

    pub fn trivial(space: PhaseSpace) -> Self {
        Self::from_sorted(
            space,
            LatticeDescriptor::Generators(Vec::new()),
            vec![PhasePoint::ORIGIN],
        )
    }

    fn from_sorted(space: PhaseSpace, descriptor: LatticeDescriptor, mut elements: Vec<PhasePoint>) -> Self {
        elements.sort_unstable();
        let mut index = vec![None; space.order()];
        for (i, p) in elements.iter().enumerate() {
            index[space.flat_index(*p)] = Some(i);
        }
        Self {
            space,
            descriptor,
            elements,
            index,
        }
    }

    #[inline]
    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    #[inline]
    pub fn modulus(&self) -> usize {
        self.space.modulus()
    }

    pub fn descriptor(&self) -> &LatticeDescriptor {
        &self.descriptor
    }

    #[inline]
    pub fn elements(&self) -> &[PhasePoint] {
        &self.elements
    }

    /// Number of elements `|Lambda|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Always false; a lattice contains the origin.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn index_of(&self, p: PhasePoint) -> Option<usize> {
        if p.x >= self.modulus() || p.w >= self.modulus() {
            return None;
        }
        self.index[self.space.flat_index(p)]
    }

    #[inline]
    pub fn contains(&self, p: PhasePoint) -> bool {
        self.index_of(p).is_some()
    }

    /// Position of `elements[i] - elements[j]`.
    #[inline]
    pub(crate) fn diff_index(&self, i: usize, j: usize) -> usize {
        let d = self.space.sub(self.elements[i], self.elements[j]);
        self.index[self.space.flat_index(d)].expect("lattice is closed under subtraction")
    }

    /// `{mu : sigma(mu, lambda) = 0 mod L for all lambda in Lambda}`, by
    /// exhaustive pairing over all `L^2` candidates.
    pub fn annihilator(&self) -> Lattice {
        let sp = self.space;
        let elements: Vec<PhasePoint> = sp
            .points()
            .filter(|mu| self.elements.iter().all(|lam| sp.sigma(*mu, *lam) == 0))
            .collect();
        Self::from_sorted(sp, LatticeDescriptor::Generators(elements.clone()), elements)
    }

    /// One representative per coset of the annihilator, the lexicographically
    /// smallest of each coset, listed in increasing order.
    pub fn dual_transversal(&self) -> DualTransversal {
        let sp = self.space;
        let ann = self.annihilator();
        let mut covered = vec![false; sp.order()];
        let mut points = Vec::with_capacity(self.len());
        for p in sp.points() {
            if covered[sp.flat_index(p)] {
                continue;
            }
            points.push(p);
            for q in ann.elements() {
                covered[sp.flat_index(sp.add(p, *q))] = true;
            }
        }
        debug_assert_eq!(points.len(), self.len());
        DualTransversal {
            modulus: sp.modulus(),
            points,
        }
    }

    pub fn is_subgroup_of(&self, other: &Lattice) -> bool {
        self.space == other.space && self.elements.iter().all(|p| other.contains(*p))
    }

    /// Canonical representatives of the cosets of `self` inside `parent`: the
    /// smallest element of each coset, in increasing order. The first
    /// representative is always the origin.
    pub fn coset_representatives_in(&self, parent: &Lattice) -> Result<Vec<PhasePoint>> {
        if !self.is_subgroup_of(parent) {
            return Err(Error::NotSubgroup(
                "sub-lattice is not contained in the parent lattice".into(),
            ));
        }
        let sp = self.space;
        let mut covered = vec![false; parent.len()];
        let mut reps = Vec::with_capacity(parent.len() / self.len());
        for (i, p) in parent.elements().iter().enumerate() {
            if covered[i] {
                continue;
            }
            reps.push(*p);
            for q in &self.elements {
                let j = parent.index_of(sp.add(*p, *q)).expect("parent is a group");
                covered[j] = true;
            }
        }
        Ok(reps)
    }

    fn check_seq(&self, c: &LatticeSeq) -> Result<()> {
        if c.len() != self.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: c.len(),
            });
        }
        Ok(())
    }

    /// Symplectic Fourier series evaluated at an arbitrary point `xi`:
    /// `sum_lambda c(lambda) exp(2 pi i sigma(lambda, xi) / L)`.
    pub fn symp_fourier_at(&self, c: &LatticeSeq, xi: PhasePoint) -> Result<Complex64> {
        self.check_seq(c)?;
        self.space.check(xi)?;
        let roots = root_table(self.modulus());
        Ok(self.fourier_at(c.values(), xi, &roots))
    }

    fn fourier_at(&self, c: &[Complex64], xi: PhasePoint, roots: &[Complex64]) -> Complex64 {
        self.elements
            .iter()
            .zip(c)
            .map(|(lam, v)| v * roots[self.space.sigma(*lam, xi)])
            .sum()
    }

    /// Symplectic Fourier series on every point of `dual`, in transversal order.
    pub fn symp_fourier(&self, c: &LatticeSeq, dual: &DualTransversal) -> Result<Vec<Complex64>> {
        self.check_seq(c)?;
        self.check_dual(dual)?;
        let roots = root_table(self.modulus());
        Ok(dual
            .points
            .iter()
            .map(|xi| self.fourier_at(c.values(), *xi, &roots))
            .collect())
    }

    /// Inverse of [`Lattice::symp_fourier`]:
    /// `c(lambda) = |Lambda|^-1 sum_xi F(xi) exp(-2 pi i sigma(lambda, xi) / L)`.
    pub fn inv_symp_fourier(&self, values: &[Complex64], dual: &DualTransversal) -> Result<LatticeSeq> {
        self.check_dual(dual)?;
        if values.len() != dual.len() {
            return Err(Error::SizeMismatch {
                expected: dual.len(),
                found: values.len(),
            });
        }
        let roots = root_table(self.modulus());
        let l = self.modulus();
        let scale = 1.0 / self.len() as f64;
        let out = self
            .elements
            .iter()
            .map(|lam| {
                let s: Complex64 = dual
                    .points
                    .iter()
                    .zip(values)
                    .map(|(xi, f)| f * roots[(l - self.space.sigma(*lam, *xi)) % l])
                    .sum();
                s * scale
            })
            .collect();
        Ok(LatticeSeq::from_vec(out))
    }

    /// Group convolution on the lattice: `(c * d)(lambda) = sum_mu c(mu) d(lambda - mu)`.
    pub fn convolve(&self, c: &LatticeSeq, d: &LatticeSeq) -> Result<LatticeSeq> {
        self.check_seq(c)?;
        self.check_seq(d)?;
        let n = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..n {
                let cj = c.values[j];
                if cj.re == 0.0 && cj.im == 0.0 {
                    continue;
                }
                *o += cj * d.values[self.diff_index(i, j)];
            }
        }
        Ok(LatticeSeq::from_vec(out))
    }

    fn check_dual(&self, dual: &DualTransversal) -> Result<()> {
        if dual.modulus != self.modulus() || dual.len() != self.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: dual.len(),
            });
        }
        Ok(())
    }
}

// Subgroup generated by `gens`, by breadth-first closure under addition.
fn closure(space: PhaseSpace, gens: &[PhasePoint]) -> Vec<PhasePoint> {
    let mut seen = vec![false; space.order()];
    let mut out = vec![PhasePoint::ORIGIN];
    seen[0] = true;
    let mut queue = VecDeque::from([PhasePoint::ORIGIN]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = space.add(p, *g);
            let k = space.flat_index(q);
            if !seen[k] {
                seen[k] = true;
                out.push(q);
                queue.push_back(q);
            }
        }
    }
    out
}

/// Coset representatives of the annihilator in `Z_L x Z_L`: a concrete copy
/// of the dual group of a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualTransversal {
    modulus: usize,
    points: Vec<PhasePoint>,
}

impl DualTransversal {
    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A complex sequence on a lattice, stored in the lattice's element order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSeq {
    values: Vec<Complex64>,
}

impl LatticeSeq {
    pub fn zeros(lattice: &Lattice) -> Self {
        Self::from_vec(vec![Complex64::new(0.0, 0.0); lattice.len()])
    }

    /// Unit impulse at `at`.
    pub fn delta(lattice: &Lattice, at: PhasePoint) -> Result<Self> {
        let i = lattice
            .index_of(at)
            .ok_or_else(|| Error::InvalidDescriptor(format!("{at} is not a lattice element")))?;
        let mut s = Self::zeros(lattice);
        s.values[i] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn constant(lattice: &Lattice, v: Complex64) -> Self {
        Self::from_vec(vec![v; lattice.len()])
    }

    pub fn from_values(lattice: &Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::SizeMismatch {
                expected: lattice.len(),
                found: values.len(),
            });
        }
        Ok(Self::from_vec(values))
    }

    pub(crate) fn from_vec(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, lattice: &Lattice, p: PhasePoint) -> Option<Complex64> {
        lattice.index_of(p).map(|i| self.values[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &LatticeSeq) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn add_assign(&mut self, other: &LatticeSeq) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }
}
