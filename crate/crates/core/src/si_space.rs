//! Lattice shift-invariant operator spaces `V_S = span{alpha_lambda(S_n)}`.
//!
//! The Riesz property of the translates is decided fiber by fiber. With the
//! correlation sequences `r_{n,n'}(lambda) = <S_n, alpha_lambda(S_n')>_HS`,
//! the Gram matrix of the family is block-circulant over the lattice and the
//! characters of the lattice block-diagonalize it into the `N x N` fibers
//! `G(xi) = sum_lambda r(lambda) exp(2 pi i sigma(lambda, xi) / L)`.
//!
//! Two independent routes cross-check the fibers: the full Gram matrix
//! ([`GeneratorSystem::brute_gram`]) and the periodized outer products of the
//! Fourier–Wigner transforms over the annihilator
//! ([`GeneratorSystem::gw_matrix`]), which equal the fibers up to the factor
//! `|Lambda| / L`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hs_ops::{fourier_wigner, frobenius, op_translate, HsOperator};
use crate::linalg::{hermitian_eigenvalues, solve, CMatrix};
use crate::phase_space::{DualTransversal, Lattice, LatticeSeq, PhasePoint};
use crate::timefreq::PhaseFn;

/// Largest Gram matrix `brute_gram` will assemble.
pub const BRUTE_GRAM_LIMIT: usize = 4096;

/// Relative tolerance for the Riesz lower bound, `tol = RIESZ_REL_TOL * M`.
pub const RIESZ_REL_TOL: f64 = 1e-10;

/// Coefficients `c_1..c_N`, one lattice sequence per generator.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefArray {
    channels: Vec<LatticeSeq>,
}

impl CoefArray {
    pub fn new(channels: Vec<LatticeSeq>) -> Self {
        Self { channels }
    }

    pub fn zeros(lattice: &Lattice, n: usize) -> Self {
        Self::new(vec![LatticeSeq::zeros(lattice); n])
    }

    /// The unit coefficient `delta` at generator `n`, lattice point `at`.
    pub fn delta(lattice: &Lattice, n_total: usize, n: usize, at: PhasePoint) -> Result<Self> {
        let mut c = Self::zeros(lattice, n_total);
        c.channels[n] = LatticeSeq::delta(lattice, at)?;
        Ok(c)
    }

    pub fn channels(&self) -> &[LatticeSeq] {
        &self.channels
    }

    pub fn channel(&self, n: usize) -> &LatticeSeq {
        &self.channels[n]
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// `sum_n ||c_n||^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.channels.iter().map(LatticeSeq::norm_sqr).sum()
    }

    pub fn max_abs_diff(&self, other: &CoefArray) -> f64 {
        self.channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &CoefArray) -> CoefArray {
        let mut out = self.clone();
        for (a, b) in out.channels.iter_mut().zip(&other.channels) {
            a.add_assign(b);
        }
        out
    }
}

/// Which computation produced a [`RieszReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RieszRoute {
    /// Fiberized correlation sequences (default).
    CorrelationFibers,
    /// Periodized Fourier–Wigner outer products, rescaled by `|Lambda| / L`.
    FourierWigner,
    /// Extreme eigenvalues of the full Gram matrix.
    BruteGram,
}

impl RieszRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            RieszRoute::CorrelationFibers => "correlation_fibers",
            RieszRoute::FourierWigner => "fourier_wigner",
            RieszRoute::BruteGram => "brute_gram",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RieszReport {
    pub is_riesz: bool,
    /// Lower Riesz bound `m`.
    pub lower: f64,
    /// Upper Riesz bound `M`.
    pub upper: f64,
    pub route: RieszRoute,
    pub tolerance: f64,
    pub diagnostic: Option<String>,
}

/// Full Gram matrix of the translates together with its extreme eigenvalues.
#[derive(Debug, Clone)]
pub struct BruteGram {
    /// Entry `(i, j)` is `<v_j, v_i>_HS` with `v_{n |Lambda| + k} = alpha_{lambda_k}(S_n)`.
    pub matrix: CMatrix,
    pub eigenvalues: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

/// A lattice together with ordered generators `S_1..S_N`.
#[derive(Debug, Clone)]
pub struct GeneratorSystem {
    lattice: Lattice,
    dual: DualTransversal,
    generators: Vec<HsOperator>,
}

impl GeneratorSystem {
    pub fn new(lattice: Lattice, generators: Vec<HsOperator>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Empty("generator system needs at least one generator"));
        }
        for g in &generators {
            if g.modulus() != lattice.modulus() {
                return Err(Error::SizeMismatch {
                    expected: lattice.modulus(),
                    found: g.modulus(),
                });
            }
        }
        let dual = lattice.dual_transversal();
        Ok(Self {
            lattice,
            dual,
            generators,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dual(&self) -> &DualTransversal {
        &self.dual
    }

    pub fn generators(&self) -> &[HsOperator] {
        &self.generators
    }

    /// Number of generators `N`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn modulus(&self) -> usize {
        self.lattice.modulus()
    }

    fn check_coefs(&self, c: &CoefArray) -> Result<()> {
        if c.len() != self.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: c.len(),
            });
        }
        for ch in c.channels() {
            if ch.len() != self.lattice.len() {
                return Err(Error::SizeMismatch {
                    expected: self.lattice.len(),
                    found: ch.len(),
                });
            }
        }
        Ok(())
    }

    /// `sum_n sum_lambda c_n(lambda) alpha_lambda(S_n)`.
    pub fn synthesize(&self, c: &CoefArray) -> Result<HsOperator> {
        self.check_coefs(c)?;
        let mut out = HsOperator::zeros(self.modulus());
        for (s, cn) in self.generators.iter().zip(c.channels()) {
            for (lam, v) in self.lattice.elements().iter().zip(cn.values()) {
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                out.axpy(*v, &op_translate(*lam, s));
            }
        }
        Ok(out)
    }

    /// `r_{n,n'}(lambda) = <S_n, alpha_lambda(S_n')>_HS`, stored at `n * N + n'`.
    pub fn correlations(&self) -> Vec<LatticeSeq> {
        let n = self.len();
        let mut out = vec![LatticeSeq::zeros(&self.lattice); n * n];
        for (np, snp) in self.generators.iter().enumerate() {
            for (k, lam) in self.lattice.elements().iter().enumerate() {
                let moved = op_translate(*lam, snp);
                for (nn, sn) in self.generators.iter().enumerate() {
                    out[nn * n + np].values_mut()[k] = frobenius(sn, &moved);
                }
            }
        }
        out
    }

    /// Gram fibers `G(xi)` for every point of the dual transversal.
    pub fn gram_fibers(&self) -> Vec<CMatrix> {
        let n = self.len();
        let corr = self.correlations();
        let transforms: Vec<Vec<Complex64>> = corr
            .iter()
            .map(|r| self.lattice.symp_fourier(r, &self.dual).expect("shapes agree"))
            .collect();
        (0..self.dual.len())
            .map(|k| DMatrix::from_fn(n, n, |i, j| transforms[i * n + j][k]))
            .collect()
    }

    /// The Gram matrix of all `N |Lambda|` translates and its spectrum.
    pub fn brute_gram(&self) -> Result<BruteGram> {
        let size = self.len() * self.lattice.len();
        if size > BRUTE_GRAM_LIMIT {
            return Err(Error::TooLarge {
                size,
                limit: BRUTE_GRAM_LIMIT,
            });
        }
        let vectors: Vec<HsOperator> = self
            .generators
            .iter()
            .flat_map(|s| self.lattice.elements().iter().map(move |lam| op_translate(*lam, s)))
            .collect();
        let mut g = CMatrix::zeros(size, size);
        for i in 0..size {
            for j in 0..=i {
                let v = frobenius(&vectors[j], &vectors[i]);
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        let eigenvalues = hermitian_eigenvalues(&g);
        let min = eigenvalues.first().copied().unwrap_or(0.0);
        let max = eigenvalues.last().copied().unwrap_or(0.0);
        Ok(BruteGram {
            matrix: g,
            eigenvalues,
            min,
            max,
        })
    }

    fn fourier_wigner_all(&self) -> Vec<PhaseFn> {
        self.generators.iter().map(fourier_wigner).collect()
    }

    /// `G^W(xi) = sum_{mu in Lambda°} F(xi + mu) F(xi + mu)^*` with the raw
    /// Fourier–Wigner vector `F = (F(S_1), ..., F(S_N))`.
    pub fn gw_matrix(&self, xi: PhasePoint) -> Result<CMatrix> {
        self.lattice.space().check(xi)?;
        let fw = self.fourier_wigner_all();
        let ann = self.lattice.annihilator();
        Ok(gw_from(&fw, &ann, xi))
    }

    /// [`GeneratorSystem::gw_matrix`] on every transversal point.
    pub fn gw_fibers(&self) -> Vec<CMatrix> {
        let fw = self.fourier_wigner_all();
        let ann = self.lattice.annihilator();
        self.dual.points().iter().map(|xi| gw_from(&fw, &ann, *xi)).collect()
    }

    /// Eigenvalues of every Gram fiber, ascending within each fiber.
    pub fn fiber_spectra(&self) -> Vec<Vec<f64>> {
        self.gram_fibers().iter().map(hermitian_eigenvalues).collect()
    }

    /// Riesz test through the correlation fibers with `tol = 1e-10 * M`
    /// unless `tol` is given.
    pub fn riesz_check(&self, tol: Option<f64>) -> RieszReport {
        self.riesz_check_via(RieszRoute::CorrelationFibers, tol)
            .expect("fiber route is infallible")
    }

    pub fn riesz_check_via(&self, route: RieszRoute, tol: Option<f64>) -> Result<RieszReport> {
        let (mut lower, upper) = match route {
            RieszRoute::CorrelationFibers => extremes(self.fiber_spectra()),
            RieszRoute::FourierWigner => {
                let scale = self.lattice.len() as f64 / self.modulus() as f64;
                extremes(
                    self.gw_fibers()
                        .iter()
                        .map(|g| hermitian_eigenvalues(&(g * Complex64::new(scale, 0.0))))
                        .collect(),
                )
            }
            RieszRoute::BruteGram => {
                let bg = self.brute_gram()?;
                (bg.min, bg.max)
            }
        };
        let tolerance = tol.unwrap_or(RIESZ_REL_TOL * upper.abs());
        let dim = self.modulus() * self.modulus();
        let count = self.len() * self.lattice.len();
        let mut diagnostic = None;
        if count > dim {
            lower = 0.0;
            diagnostic = Some(format!(
                "{count} translates cannot be independent in an operator space of dimension {dim}"
            ));
        } else if lower <= tolerance {
            diagnostic = Some(format!(
                "smallest fiber eigenvalue {lower:e} is not above the tolerance {tolerance:e}"
            ));
        }
        let lower = lower.max(0.0);
        Ok(RieszReport {
            is_riesz: lower > tolerance && count <= dim,
            lower,
            upper: upper.max(lower),
            route,
            tolerance,
            diagnostic,
        })
    }

    /// Coefficients of the orthogonal projection of `t` onto `V_S`, found by
    /// solving the Gram system fiber by fiber.
    pub fn coefficients(&self, t: &HsOperator) -> Result<CoefArray> {
        if t.modulus() != self.modulus() {
            return Err(Error::SizeMismatch {
                expected: self.modulus(),
                found: t.modulus(),
            });
        }
        let report = self.riesz_check(None);
        if !report.is_riesz {
            return Err(Error::NotRiesz {
                lower: report.lower,
                upper: report.upper,
                reason: report.diagnostic.unwrap_or_default(),
            });
        }
        let n = self.len();
        // y_n(lambda) = <T, alpha_lambda(S_n)> = sum_n' (r_{n',n} * c_n')(lambda)
        let y: Vec<Vec<Complex64>> = self
            .generators
            .iter()
            .map(|s| {
                let seq = LatticeSeq::from_vec(
                    self.lattice
                        .elements()
                        .iter()
                        .map(|lam| frobenius(t, &op_translate(*lam, s)))
                        .collect(),
                );
                self.lattice.symp_fourier(&seq, &self.dual).expect("shapes agree")
            })
            .collect();
        let fibers = self.gram_fibers();
        let mut c_hat = vec![vec![Complex64::new(0.0, 0.0); self.dual.len()]; n];
        for (k, g) in fibers.iter().enumerate() {
            let rhs = CMatrix::from_fn(n, 1, |i, _| y[i][k]);
            let sol = solve(&g.transpose(), &rhs).ok_or_else(|| Error::NotRiesz {
                lower: report.lower,
                upper: report.upper,
                reason: "singular Gram fiber".into(),
            })?;
            for i in 0..n {
                c_hat[i][k] = sol[(i, 0)];
            }
        }
        let channels = c_hat
            .iter()
            .map(|v| self.lattice.inv_symp_fourier(v, &self.dual))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoefArray::new(channels))
    }
}

fn gw_from(fw: &[PhaseFn], ann: &Lattice, xi: PhasePoint) -> CMatrix {
    let n = fw.len();
    let sp = ann.space();
    let mut g = CMatrix::zeros(n, n);
    for mu in ann.elements() {
        let z = sp.add(xi, *mu);
        for i in 0..n {
            let fi = fw[i].at(z);
            for j in 0..n {
                g[(i, j)] += fi * fw[j].at(z).conj();
            }
        }
    }
    g
}

fn extremes(spectra: Vec<Vec<f64>>) -> (f64, f64) {
    let lower = spectra
        .iter()
        .filter_map(|s| s.first().copied())
        .fold(f64::INFINITY, f64::min);
    let upper = spectra
        .iter()
        .filter_map(|s| s.last().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    (lower, upper)
}
