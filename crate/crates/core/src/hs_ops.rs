//! Hilbert–Schmidt operators on `C^L` as `L x L` kernels.
//!
//! An operator acts by `(S f)(t) = sum_s k(t, s) f(s)`. The HS inner product is
//! the Frobenius product of kernels. Operators are translated over phase
//! space by conjugation, `alpha_z(S) = pi(z) S pi(z)*`, and the Kohn–Nirenberg
//! and Weyl symbol maps intertwine that action with plain cyclic translation
//! of functions on `Z_L x Z_L`.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::{Lattice, LatticeSeq, PhasePoint};
use crate::root_table;
use crate::timefreq::{half_mod, tf_shift, PhaseFn, Signal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct HsOperator {
    kernel: DMatrix<Complex64>,
}

impl HsOperator {
    pub fn from_kernel(kernel: DMatrix<Complex64>) -> Result<Self> {
        if kernel.nrows() != kernel.ncols() {
            return Err(Error::SizeMismatch {
                expected: kernel.nrows(),
                found: kernel.ncols(),
            });
        }
        if kernel.nrows() < 2 {
            return Err(Error::InvalidModulus(kernel.nrows()));
        }
        Ok(Self { kernel })
    }

    pub fn identity(modulus: usize) -> Self {
        Self {
            kernel: DMatrix::identity(modulus, modulus),
        }
    }

    pub fn zeros(modulus: usize) -> Self {
        Self {
            kernel: DMatrix::zeros(modulus, modulus),
        }
    }

    /// The matrix of the time-frequency shift `pi(z)`.
    pub fn tf_shift(modulus: usize, z: PhasePoint) -> Self {
        let l = modulus;
        let roots = root_table(l);
        let mut k = DMatrix::zeros(l, l);
        for t in 0..l {
            k[(t, (t + l - z.x % l) % l)] = roots[(z.w % l * t) % l];
        }
        Self { kernel: k }
    }

    #[inline]
    pub fn modulus(&self) -> usize {
        self.kernel.nrows()
    }

    #[inline]
    pub fn kernel(&self) -> &DMatrix<Complex64> {
        &self.kernel
    }

    pub fn into_kernel(self) -> DMatrix<Complex64> {
        self.kernel
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        f.check_len(self.modulus())?;
        let l = self.modulus();
        let out = (0..l)
            .map(|t| (0..l).map(|s| self.kernel[(t, s)] * f.samples()[s]).sum())
            .collect();
        Signal::new(out)
    }

    pub fn adjoint(&self) -> HsOperator {
        Self {
            kernel: self.kernel.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.kernel.trace()
    }

    pub fn compose(&self, other: &HsOperator) -> Result<HsOperator> {
        self.check_same(other)?;
        Ok(Self {
            kernel: &self.kernel * &other.kernel,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.kernel.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: Complex64) -> HsOperator {
        Self {
            kernel: &self.kernel * k,
        }
    }

    /// `self += k * other`.
    pub fn axpy(&mut self, k: Complex64, other: &HsOperator) {
        self.kernel.zip_apply(&other.kernel, |a, b| *a += k * b);
    }

    pub fn max_abs_diff(&self, other: &HsOperator) -> f64 {
        crate::linalg::max_abs_diff(&self.kernel, &other.kernel)
    }

    pub(crate) fn check_same(&self, other: &HsOperator) -> Result<()> {
        if self.modulus() != other.modulus() {
            return Err(Error::SizeMismatch {
                expected: self.modulus(),
                found: other.modulus(),
            });
        }
        Ok(())
    }
}

impl Add for &HsOperator {
    type Output = HsOperator;
    fn add(self, rhs: &HsOperator) -> HsOperator {
        HsOperator {
            kernel: &self.kernel + &rhs.kernel,
        }
    }
}

impl Sub for &HsOperator {
    type Output = HsOperator;
    fn sub(self, rhs: &HsOperator) -> HsOperator {
        HsOperator {
            kernel: &self.kernel - &rhs.kernel,
        }
    }
}

impl Mul<Complex64> for &HsOperator {
    type Output = HsOperator;
    fn mul(self, rhs: Complex64) -> HsOperator {
        self.scale(rhs)
    }
}

/// `<S, T>_HS = tr(S T*) = sum_{t,s} k_S(t, s) conj(k_T(t, s))`.
pub fn hs_inner(s: &HsOperator, t: &HsOperator) -> Result<Complex64> {
    s.check_same(t)?;
    Ok(frobenius(s, t))
}

#[inline]
pub(crate) fn frobenius(s: &HsOperator, t: &HsOperator) -> Complex64 {
    s.kernel.iter().zip(t.kernel.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// `(phi (x) psi)(e) = <e, psi> phi`; kernel `phi(t) conj(psi(s))`.
pub fn rank_one(phi: &Signal, psi: &Signal) -> Result<HsOperator> {
    let l = phi.len();
    psi.check_len(l)?;
    let mut k = DMatrix::zeros(l, l);
    for t in 0..l {
        for s in 0..l {
            k[(t, s)] = phi.samples()[t] * psi.samples()[s].conj();
        }
    }
    Ok(HsOperator { kernel: k })
}

/// `alpha_z(S) = pi(z) S pi(z)*`, computed entrywise as
/// `k'(t, u) = exp(2 pi i z.w (t - u) / L) k(t - z.x, u - z.x)`.
pub fn op_translate(z: PhasePoint, s: &HsOperator) -> HsOperator {
    let l = s.modulus();
    let roots = root_table(l);
    let (x, w) = (z.x % l, z.w % l);
    let mut k = DMatrix::zeros(l, l);
    for u in 0..l {
        let su = (u + l - x) % l;
        for t in 0..l {
            let st = (t + l - x) % l;
            k[(t, u)] = roots[(w * ((t + l - u) % l)) % l] * s.kernel[(st, su)];
        }
    }
    HsOperator { kernel: k }
}

/// Kohn–Nirenberg symbol
/// `sigma_S(t, v) = L^{-1/2} sum_s k(t, s) exp(-2 pi i v (t - s) / L)`.
pub fn kn_symbol(s: &HsOperator) -> PhaseFn {
    let l = s.modulus();
    let roots = root_table(l);
    let scale = 1.0 / (l as f64).sqrt();
    PhaseFn::from_fn(l, |t, v| {
        let acc: Complex64 = (0..l)
            .map(|sx| s.kernel[(t, sx)] * roots[(l - (v * ((t + l - sx) % l)) % l) % l])
            .sum();
        acc * scale
    })
}

/// Inverse of [`kn_symbol`]:
/// `k(t, s) = L^{-1/2} sum_v sigma(t, v) exp(2 pi i v (t - s) / L)`.
pub fn kn_operator(sigma: &PhaseFn) -> HsOperator {
    let l = sigma.modulus();
    let roots = root_table(l);
    let scale = 1.0 / (l as f64).sqrt();
    let mut k = DMatrix::zeros(l, l);
    for t in 0..l {
        for s in 0..l {
            let d = (t + l - s) % l;
            let acc: Complex64 = (0..l).map(|v| sigma.get(t, v) * roots[(v * d) % l]).sum();
            k[(t, s)] = acc * scale;
        }
    }
    HsOperator { kernel: k }
}

/// Weyl symbol (odd `L`):
/// `a_S(x, w) = L^{-1/2} sum_t k(x + t h, x - t h) exp(-2 pi i w t / L)`, `h = 2^{-1}`.
pub fn weyl_symbol(s: &HsOperator) -> Result<PhaseFn> {
    let l = s.modulus();
    let h = half_mod(l)?;
    let roots = root_table(l);
    let scale = 1.0 / (l as f64).sqrt();
    Ok(PhaseFn::from_fn(l, |x, w| {
        let acc: Complex64 = (0..l)
            .map(|t| {
                let th = (t * h) % l;
                s.kernel[((x + th) % l, (x + l - th) % l)] * roots[(l - (w * t) % l) % l]
            })
            .sum();
        acc * scale
    }))
}

/// Inverse of [`weyl_symbol`]:
/// `k(u, v) = L^{-1/2} sum_w a(h (u + v), w) exp(2 pi i w (u - v) / L)`.
pub fn weyl_operator(a: &PhaseFn) -> Result<HsOperator> {
    let l = a.modulus();
    let h = half_mod(l)?;
    let roots = root_table(l);
    let scale = 1.0 / (l as f64).sqrt();
    let mut k = DMatrix::zeros(l, l);
    for u in 0..l {
        for v in 0..l {
            let x = (h * ((u + v) % l)) % l;
            let t = (u + l - v) % l;
            let acc: Complex64 = (0..l).map(|w| a.get(x, w) * roots[(w * t) % l]).sum();
            k[(u, v)] = acc * scale;
        }
    }
    Ok(HsOperator { kernel: k })
}

/// Raw Fourier–Wigner transform `F(z) = tr[pi(-z) S] = sum_t exp(-2 pi i w t / L) k(t + x, t)`.
///
/// The half phase `exp(-pi i x w)` of the continuous definition is omitted: it
/// has no meaning on `Z_L` for even `L`, and every use below pairs two values
/// at the same `z`, where it cancels.
pub fn fourier_wigner(s: &HsOperator) -> PhaseFn {
    let l = s.modulus();
    let roots = root_table(l);
    PhaseFn::from_fn(l, |x, w| {
        (0..l)
            .map(|t| roots[(l - (w * t) % l) % l] * s.kernel[((t + x) % l, t)])
            .sum()
    })
}

/// Gabor multiplier `sum_lambda c(lambda) alpha_lambda(phi (x) psi)`, i.e. the
/// operator `eta -> sum_lambda c(lambda) V_psi eta(lambda) pi(lambda) phi`.
pub fn gabor_multiplier(lattice: &Lattice, mask: &LatticeSeq, psi: &Signal, phi: &Signal) -> Result<HsOperator> {
    if mask.len() != lattice.len() {
        return Err(Error::SizeMismatch {
            expected: lattice.len(),
            found: mask.len(),
        });
    }
    phi.check_len(lattice.modulus())?;
    psi.check_len(lattice.modulus())?;
    let mut out = HsOperator::zeros(lattice.modulus());
    for (lam, c) in lattice.elements().iter().zip(mask.values()) {
        if *c == ZERO {
            continue;
        }
        let rank = rank_one(&tf_shift(*lam, phi), &tf_shift(*lam, psi))?;
        out.axpy(*c, &rank);
    }
    Ok(out)
}

/// Function–operator convolution `g * S = sum_z g(z) alpha_z(S)` over all of
/// `Z_L x Z_L`.
pub fn fn_op_convolve(g: &PhaseFn, s: &HsOperator) -> Result<HsOperator> {
    let l = s.modulus();
    if g.modulus() != l {
        return Err(Error::SizeMismatch {
            expected: l,
            found: g.modulus(),
        });
    }
    let mut out = HsOperator::zeros(l);
    for x in 0..l {
        for w in 0..l {
            let c = g.get(x, w);
            if c == ZERO {
                continue;
            }
            out.axpy(c, &op_translate(PhasePoint::new(x, w), s));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::SeededRng;
    use crate::timefreq::{rihaczek, stft};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_inner_is_l() {
        let i = HsOperator::identity(6);
        assert!((hs_inner(&i, &i).unwrap() - c(6.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rank_one_algebra() {
        let mut rng = SeededRng::new(3);
        let phi = rng.signal(5);
        let psi = rng.signal(5);
        let r = rank_one(&phi, &psi).unwrap();
        let applied = r.apply(&psi).unwrap();
        assert!(applied.max_abs_diff(&phi.scale(c(psi.norm_sqr(), 0.0))) < 1e-13);
        assert!((r.trace() - phi.inner(&psi)).norm() < 1e-13);
        assert!((r.hs_norm() - phi.norm() * psi.norm()).abs() < 1e-13);
    }

    #[test]
    fn translate_fixes_identity() {
        let i = HsOperator::identity(5);
        for x in 0..5 {
            for w in 0..5 {
                assert!(op_translate(PhasePoint::new(x, w), &i).max_abs_diff(&i) < 1e-14);
            }
        }
    }

    #[test]
    fn translate_matches_matrix_product() {
        let mut rng = SeededRng::new(11);
        let s = rng.kernel(6);
        for z in [PhasePoint::new(1, 0), PhasePoint::new(2, 5), PhasePoint::new(5, 3)] {
            let p = HsOperator::tf_shift(6, z);
            let want = p.compose(&s).unwrap().compose(&p.adjoint()).unwrap();
            assert!(op_translate(z, &s).max_abs_diff(&want) < 1e-13);
        }
    }

    #[test]
    fn kn_identity_symbol_is_constant() {
        let sigma = kn_symbol(&HsOperator::identity(8));
        let want = 1.0 / 8f64.sqrt();
        assert!(sigma.values().iter().all(|v| (v - c(want, 0.0)).norm() < 1e-15));
        assert!((sigma.norm_sqr() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn kn_of_rank_one_is_rihaczek() {
        let mut rng = SeededRng::new(5);
        let a = rng.signal(7);
        let b = rng.signal(7);
        let sym = kn_symbol(&rank_one(&a, &b).unwrap());
        assert!(sym.max_abs_diff(&rihaczek(&a, &b).unwrap()) < 1e-13);
    }

    #[test]
    fn weyl_requires_odd() {
        assert_eq!(weyl_symbol(&HsOperator::identity(4)), Err(Error::UnsupportedModulus(4)));
        assert!(weyl_operator(&PhaseFn::zeros(6)).is_err());
    }

    #[test]
    fn weyl_identity_symbol() {
        let a = weyl_symbol(&HsOperator::identity(5)).unwrap();
        assert!(a
            .values()
            .iter()
            .all(|v| (v - c(5f64.sqrt().recip(), 0.0)).norm() < 1e-15));
    }

    #[test]
    fn fourier_wigner_at_origin_is_trace() {
        let mut rng = SeededRng::new(2);
        let s = rng.kernel(6);
        assert!((fourier_wigner(&s).get(0, 0) - s.trace()).norm() < 1e-13);
    }

    #[test]
    fn fourier_wigner_of_rank_one() {
        let mut rng = SeededRng::new(9);
        let phi = rng.signal(6);
        let psi = rng.signal(6);
        let f = fourier_wigner(&rank_one(&phi, &psi).unwrap());
        let v = stft(&phi, &psi).unwrap();
        for x in 0..6 {
            for w in 0..6 {
                let ph = crate::unit_root((x * w) as i64, 6);
                assert!((f.get(x, w) - ph * v.get(x, w)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn multiplier_with_delta_mask() {
        let sp = crate::PhaseSpace::new(4).unwrap();
        let lat = Lattice::separable(sp, 2, 1).unwrap();
        let mut rng = SeededRng::new(4);
        let psi = rng.signal(4);
        let phi = rng.signal(4);
        let m0 = gabor_multiplier(&lat, &LatticeSeq::delta(&lat, PhasePoint::ORIGIN).unwrap(), &psi, &phi).unwrap();
        assert!(m0.max_abs_diff(&rank_one(&phi, &psi).unwrap()) < 1e-14);
        let lam = PhasePoint::new(2, 3);
        let m1 = gabor_multiplier(&lat, &LatticeSeq::delta(&lat, lam).unwrap(), &psi, &phi).unwrap();
        assert!(m1.max_abs_diff(&op_translate(lam, &rank_one(&phi, &psi).unwrap())) < 1e-13);
    }

    #[test]
    fn convolve_with_delta() {
        let mut rng = SeededRng::new(8);
        let s = rng.kernel(4);
        assert!(
            fn_op_convolve(&PhaseFn::delta(4, PhasePoint::ORIGIN), &s)
                .unwrap()
                .max_abs_diff(&s)
                < 1e-15
        );
        let z = PhasePoint::new(3, 1);
        assert!(
            fn_op_convolve(&PhaseFn::delta(4, z), &s)
                .unwrap()
                .max_abs_diff(&op_translate(z, &s))
                < 1e-14
        );
    }
}
