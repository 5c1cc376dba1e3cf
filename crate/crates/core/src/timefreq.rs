//! Signals on `Z_L` and the time-frequency machinery acting on them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::{PhasePoint, PhaseSpace};
use crate::{root_table, unit_root};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex vector indexed by `Z_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidModulus(samples.len()));
        }
        Ok(Self { samples })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            samples: vec![ZERO; len],
        }
    }

    /// Unit impulse at `t`.
    pub fn delta(len: usize, t: usize) -> Self {
        let mut s = Self::zeros(len);
        s.samples[t % len] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `<f, g> = sum_t f(t) conj(g(t))`.
    pub fn inner(&self, other: &Signal) -> Complex64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scale(&self, k: Complex64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|v| v * k).collect(),
        }
    }

    pub fn normalized(&self) -> Signal {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_len(&self, modulus: usize) -> Result<()> {
        if self.len() != modulus {
            return Err(Error::SizeMismatch {
                expected: modulus,
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// A complex function on `Z_L x Z_L`, stored row-major by `(x, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFn {
    modulus: usize,
    values: Vec<Complex64>,
}

impl PhaseFn {
    pub fn zeros(modulus: usize) -> Self {
        Self {
            modulus,
            values: vec![ZERO; modulus * modulus],
        }
    }

    pub fn from_fn(modulus: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(modulus * modulus);
        for x in 0..modulus {
            for w in 0..modulus {
                values.push(f(x, w));
            }
        }
        Self { modulus, values }
    }

    pub fn from_values(modulus: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != modulus * modulus {
            return Err(Error::SizeMismatch {
                expected: modulus * modulus,
                found: values.len(),
            });
        }
        Ok(Self { modulus, values })
    }

    /// Unit impulse at `z`.
    pub fn delta(modulus: usize, z: PhasePoint) -> Self {
        let mut f = Self::zeros(modulus);
        f.values[(z.x % modulus) * modulus + z.w % modulus] = Complex64::new(1.0, 0.0);
        f
    }

    #[inline]
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    #[inline]
    pub fn get(&self, x: usize, w: usize) -> Complex64 {
        self.values[x * self.modulus + w]
    }

    #[inline]
    pub fn at(&self, z: PhasePoint) -> Complex64 {
        self.get(z.x, z.w)
    }

    #[inline]
    pub fn set(&mut self, x: usize, w: usize, v: Complex64) {
        self.values[x * self.modulus + w] = v;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `<f, g> = sum_z f(z) conj(g(z))`.
    pub fn inner(&self, other: &PhaseFn) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Cyclic translate: `(T_z f)(x, w) = f(x - z.x, w - z.w)`.
    pub fn translate(&self, z: PhasePoint) -> PhaseFn {
        let l = self.modulus;
        Self::from_fn(l, |x, w| self.get((x + l - z.x % l) % l, (w + l - z.w % l) % l))
    }

    /// Group convolution on `Z_L x Z_L`: `(f * g)(z) = sum_y f(y) g(z - y)`.
    pub fn convolve(&self, other: &PhaseFn) -> PhaseFn {
        let l = self.modulus;
        let mut out = PhaseFn::zeros(l);
        for yx in 0..l {
            for yw in 0..l {
                let fy = self.get(yx, yw);
                if fy == ZERO {
                    continue;
                }
                for x in 0..l {
                    let dx = (x + l - yx) % l;
                    for w in 0..l {
                        let dw = (w + l - yw) % l;
                        out.values[x * l + w] += fy * other.get(dx, dw);
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &PhaseFn) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Unitary DFT: `f^(w) = L^{-1/2} sum_t f(t) exp(-2 pi i w t / L)`.
pub fn dft(f: &Signal) -> Signal {
    let l = f.len();
    let roots = root_table(l);
    let scale = 1.0 / (l as f64).sqrt();
    let samples = (0..l)
        .map(|w| {
            let s: Complex64 = f
                .samples
                .iter()
                .enumerate()
                .map(|(t, v)| v * roots[(l - (w * t) % l) % l])
                .sum();
            s * scale
        })
        .collect();
    Signal { samples }
}

/// Inverse of [`dft`].
pub fn idft(f: &Signal) -> Signal {
    let l = f.len();
    let roots = root_table(l);
    let scale = 1.0 / (l as f64).sqrt();
    let samples = (0..l)
        .map(|t| {
            let s: Complex64 = f.samples.iter().enumerate().map(|(w, v)| v * roots[(w * t) % l]).sum();
            s * scale
        })
        .collect();
    Signal { samples }
}

/// `(pi(z) f)(t) = exp(2 pi i z.w t / L) f(t - z.x)`.
pub fn tf_shift(z: PhasePoint, f: &Signal) -> Signal {
    let l = f.len();
    let roots = root_table(l);
    let (x, w) = (z.x % l, z.w % l);
    let samples = (0..l)
        .map(|t| roots[(w * t) % l] * f.samples[(t + l - x) % l])
        .collect();
    Signal { samples }
}

/// `pi(z)* f = exp(-2 pi i z.x z.w / L) pi(-z) f`.
pub fn tf_shift_adjoint(z: PhasePoint, f: &Signal) -> Signal {
    let l = f.len();
    let (x, w) = (z.x % l, z.w % l);
    let neg = PhasePoint::new((l - x) % l, (l - w) % l);
    let phase = unit_root(-((x * w) as i64), l);
    tf_shift(neg, f).scale(phase)
}

/// Phase `theta(z, z')` with `pi(z) pi(z') = exp(2 pi i theta / L) pi(z + z')`.
///
/// In this model `theta(z, z') = -z.x * z'.w (mod L)`.
pub fn composition_phase(space: PhaseSpace, z: PhasePoint, zp: PhasePoint) -> usize {
    let l = space.modulus();
    (l - (z.x * zp.w) % l) % l
}

/// Short-time Fourier transform `V_psi phi(z) = <phi, pi(z) psi>` on all of
/// `Z_L x Z_L`.
pub fn stft(phi: &Signal, psi: &Signal) -> Result<PhaseFn> {
    let l = phi.len();
    psi.check_len(l)?;
    let roots = root_table(l);
    Ok(PhaseFn::from_fn(l, |x, w| {
        // sum_t phi(t) conj(psi(t - x)) exp(-2 pi i w t / L)
        (0..l)
            .map(|t| phi.samples[t] * psi.samples[(t + l - x) % l].conj() * roots[(l - (w * t) % l) % l])
            .sum()
    }))
}

/// Rihaczek distribution `R(psi, phi)(x, w) = psi(x) conj(phi^(w)) exp(-2 pi i x w / L)`.
pub fn rihaczek(psi: &Signal, phi: &Signal) -> Result<PhaseFn> {
    let l = psi.len();
    phi.check_len(l)?;
    let phi_hat = dft(phi);
    let roots = root_table(l);
    Ok(PhaseFn::from_fn(l, |x, w| {
        psi.samples[x] * phi_hat.samples[w].conj() * roots[(l - (x * w) % l) % l]
    }))
}

/// `2^{-1} mod L` for odd `L`.
pub(crate) fn half_mod(modulus: usize) -> Result<usize> {
    if modulus.is_multiple_of(2) {
        return Err(Error::UnsupportedModulus(modulus));
    }
    Ok(modulus.div_ceil(2))
}

/// Cross-Wigner distribution
/// `W(psi, phi)(x, w) = sum_t psi(x + t h) conj(phi(x - t h)) exp(-2 pi i w t / L)`
/// with `h = 2^{-1} mod L`. Odd `L` only.
pub fn cross_wigner(psi: &Signal, phi: &Signal) -> Result<PhaseFn> {
    let l = psi.len();
    phi.check_len(l)?;
    let h = half_mod(l)?;
    let roots = root_table(l);
    Ok(PhaseFn::from_fn(l, |x, w| {
        (0..l)
            .map(|t| {
                let th = (t * h) % l;
                psi.samples[(x + th) % l] * phi.samples[(x + l - th) % l].conj() * roots[(l - (w * t) % l) % l]
            })
            .sum()
    }))
}

/// L2-normalized periodized Gaussian
/// `g(t) ~ sum_{|k| <= 3} exp(-pi ((t~ + k L) / sqrt(L))^2)`,
/// with `t~` the representative of `t` in `[-L/2, L/2)`.
pub fn gaussian_window(space: PhaseSpace) -> Signal {
    let l = space.modulus();
    let lf = l as f64;
    let half = (l / 2) as i64;
    let raw: Vec<f64> = (0..l as i64)
        .map(|t| {
            let centered = if t >= l as i64 - half { t - l as i64 } else { t };
            (-3..=3)
                .map(|k| {
                    let u = (centered as f64 + k as f64 * lf) / lf.sqrt();
                    (-PI * u * u).exp()
                })
                .sum()
        })
        .collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    Signal {
        samples: raw.iter().map(|v| Complex64::new(v / norm, 0.0)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(l: usize) -> PhaseSpace {
        PhaseSpace::new(l).unwrap()
    }

    #[test]
    fn dft_of_delta_and_constant() {
        let d = dft(&Signal::delta(8, 0));
        for v in d.samples() {
            assert!((v - Complex64::new(8f64.sqrt().recip(), 0.0)).norm() < 1e-15);
        }
        let one = Signal::from_real(&[1.0; 8]).unwrap();
        let f = dft(&one);
        assert!((f.samples()[0] - Complex64::new(8f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(f.samples()[1..].iter().all(|v| v.norm() < 1e-14));
        assert!(idft(&f).max_abs_diff(&one) < 1e-14);
    }

    #[test]
    fn shift_examples() {
        let f = Signal::delta(4, 0);
        assert_eq!(tf_shift(PhasePoint::ORIGIN, &f), f);
        assert!(tf_shift(PhasePoint::new(1, 0), &f).max_abs_diff(&Signal::delta(4, 1)) < 1e-15);
        assert!(tf_shift_adjoint(PhasePoint::ORIGIN, &f).max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn stft_of_deltas() {
        let d = Signal::delta(4, 0);
        let v = stft(&d, &d).unwrap();
        for x in 0..4 {
            for w in 0..4 {
                let want = if x == 0 { 1.0 } else { 0.0 };
                assert!((v.get(x, w) - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rihaczek_of_deltas() {
        let d = Signal::delta(4, 0);
        let r = rihaczek(&d, &d).unwrap();
        for x in 0..4 {
            for w in 0..4 {
                let want = if x == 0 { 0.5 } else { 0.0 };
                assert!((r.get(x, w) - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cross_wigner_needs_odd_modulus() {
        let d = Signal::delta(4, 0);
        assert_eq!(cross_wigner(&d, &d), Err(Error::UnsupportedModulus(4)));
    }

    #[test]
    fn cross_wigner_of_deltas_l5() {
        // psi = phi = delta_0: only x + t h = 0 and x - t h = 0, i.e. x = 0, t = 0.
        let d = Signal::delta(5, 0);
        let w = cross_wigner(&d, &d).unwrap();
        for x in 0..5 {
            for om in 0..5 {
                let want = if x == 0 { 1.0 } else { 0.0 };
                assert!((w.get(x, om) - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn gaussian_properties() {
        for l in [4, 7, 12, 33] {
            let g = gaussian_window(sp(l));
            assert!((g.norm() - 1.0).abs() < 1e-12);
            for t in 0..l {
                assert!((g.samples()[t] - g.samples()[(l - t) % l]).norm() < 1e-12);
            }
        }
        let g = gaussian_window(sp(12));
        for t in 0..6 {
            assert!(g.samples()[t].re > g.samples()[t + 1].re);
        }
    }

    #[test]
    fn phase_fn_translate_and_convolve_with_delta() {
        let f = PhaseFn::from_fn(3, |x, w| Complex64::new(x as f64, w as f64));
        let z = PhasePoint::new(1, 2);
        let d = PhaseFn::delta(3, z);
        assert_eq!(d.convolve(&f), f.translate(z));
    }
}
