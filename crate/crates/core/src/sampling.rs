//! Sampling of operators in `V_S` and their reconstruction.
//!
//! For `T = sum_n sum_mu c_n(mu) alpha_mu(S_n)` the diagonal channel samples
//! `s_m(lambda) = <alpha_{-lambda}(T) g_m, g~_m>` form the discrete convolution
//! system `s_m = sum_n a_{m,n} * c_n`, where `a_{m,n}` are the samples of the
//! generators themselves. After the symplectic Fourier series this becomes
//! `s^(xi) = A^(xi) c^(xi)` fiber by fiber. Whenever every `A^(xi)` has full
//! column rank, any left inverse `B^(xi)` yields operators
//! `H_m = sum_n sum_lambda b_{n,m}(lambda) alpha_lambda(S_n)` with
//! `T = sum_m sum_lambda s_m(lambda) alpha_lambda(H_m)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hs_ops::{frobenius, op_translate, rank_one, HsOperator};
use crate::linalg::{hermitian_eigenvalues, identity, pseudo_inverse, CMatrix};
use crate::phase_space::{DualTransversal, Lattice, LatticeSeq, PhasePoint};
use crate::si_space::{CoefArray, GeneratorSystem, RieszReport};
use crate::timefreq::{tf_shift, PhaseFn, Signal};

/// Relative cut-off for singular values in the pseudo-inverse.
pub const PINV_REL_TOL: f64 = 1e-10;

/// Relative tolerance for the lower frame bound, `tol = FRAME_REL_TOL * beta_A`.
pub const FRAME_REL_TOL: f64 = 1e-10;

/// A pair of windows `(g, g~)` defining one sampling channel.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPair {
    pub g: Signal,
    pub g_dual: Signal,
}

impl WindowPair {
    pub fn new(g: Signal, g_dual: Signal) -> Self {
        Self { g, g_dual }
    }

    /// The average operator `g~ (x) g` producing the same samples.
    pub fn average_operator(&self) -> Result<HsOperator> {
        rank_one(&self.g_dual, &self.g)
    }
}

/// How samples are taken.
#[derive(Debug, Clone)]
pub enum SamplingScheme {
    /// Diagonal channel samples `<alpha_{-lambda}(T) g_m, g~_m>`.
    Windows(Vec<WindowPair>),
    /// Average samples `<T, alpha_lambda(Q_m)>_HS`.
    Average(Vec<HsOperator>),
}

impl SamplingScheme {
    /// Number of channels `M`.
    pub fn len(&self) -> usize {
        match self {
            SamplingScheme::Windows(w) => w.len(),
            SamplingScheme::Average(q) => q.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The equivalent average scheme, `Q_m = g~_m (x) g_m` for window pairs.
    pub fn to_average(&self) -> Result<SamplingScheme> {
        match self {
            SamplingScheme::Windows(pairs) => Ok(SamplingScheme::Average(
                pairs.iter().map(WindowPair::average_operator).collect::<Result<_>>()?,
            )),
            SamplingScheme::Average(q) => Ok(SamplingScheme::Average(q.clone())),
        }
    }

    fn check(&self, modulus: usize) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Empty("sampling scheme needs at least one channel"));
        }
        let bad = match self {
            SamplingScheme::Windows(w) => w
                .iter()
                .flat_map(|p| [p.g.len(), p.g_dual.len()])
                .find(|&n| n != modulus),
            SamplingScheme::Average(q) => q.iter().map(HsOperator::modulus).find(|&n| n != modulus),
        };
        match bad {
            Some(found) => Err(Error::SizeMismatch {
                expected: modulus,
                found,
            }),
            None => Ok(()),
        }
    }
}

/// One lattice sequence of samples per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    channels: Vec<LatticeSeq>,
}

impl SampleSet {
    pub fn new(channels: Vec<LatticeSeq>) -> Self {
        Self { channels }
    }

    pub fn channels(&self) -> &[LatticeSeq] {
        &self.channels
    }

    pub fn channel(&self, m: usize) -> &LatticeSeq {
        &self.channels[m]
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// `||s||^2` in `l^2_M(Lambda)`.
    pub fn norm_sqr(&self) -> f64 {
        self.channels.iter().map(LatticeSeq::norm_sqr).sum()
    }

    pub fn max_abs_diff(&self, other: &SampleSet) -> f64 {
        self.channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// `s_m(lambda) = <alpha_{-lambda}(T) g_m, g~_m>` for a window-pair scheme.
pub fn diag_channel_samples(t: &HsOperator, scheme: &SamplingScheme, lattice: &Lattice) -> Result<SampleSet> {
    let SamplingScheme::Windows(pairs) = scheme else {
        return Err(Error::SchemeMismatch(
            "diagonal channel samples need window pairs; use avg_samples for average operators".into(),
        ));
    };
    scheme.check(lattice.modulus())?;
    check_op(t, lattice)?;
    let sp = lattice.space();
    // translates are shared by all channels
    let moved: Vec<HsOperator> = lattice
        .elements()
        .iter()
        .map(|lam| op_translate(sp.neg(*lam), t))
        .collect();
    let channels = pairs
        .iter()
        .map(|p| {
            let vals = moved
                .iter()
                .map(|op| Ok(op.apply(&p.g)?.inner(&p.g_dual)))
                .collect::<Result<Vec<_>>>()?;
            Ok(LatticeSeq::from_vec(vals))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet::new(channels))
}

/// `s_m(lambda) = <T, alpha_lambda(Q_m)>_HS`; window pairs are converted with
/// `Q_m = g~_m (x) g_m`.
pub fn avg_samples(t: &HsOperator, scheme: &SamplingScheme, lattice: &Lattice) -> Result<SampleSet> {
    scheme.check(lattice.modulus())?;
    check_op(t, lattice)?;
    let SamplingScheme::Average(ops) = scheme.to_average()? else {
        unreachable!("to_average always returns an average scheme")
    };
    let channels = ops
        .iter()
        .map(|q| {
            LatticeSeq::from_vec(
                lattice
                    .elements()
                    .iter()
                    .map(|lam| frobenius(t, &op_translate(*lam, q)))
                    .collect(),
            )
        })
        .collect();
    Ok(SampleSet::new(channels))
}

/// The samples native to the scheme: diagonal channel samples for window
/// pairs, average samples otherwise.
pub fn samples(t: &HsOperator, scheme: &SamplingScheme, lattice: &Lattice) -> Result<SampleSet> {
    match scheme {
        SamplingScheme::Windows(_) => diag_channel_samples(t, scheme, lattice),
        SamplingScheme::Average(_) => avg_samples(t, scheme, lattice),
    }
}

fn check_op(t: &HsOperator, lattice: &Lattice) -> Result<()> {
    if t.modulus() != lattice.modulus() {
        return Err(Error::SizeMismatch {
            expected: lattice.modulus(),
            found: t.modulus(),
        });
    }
    Ok(())
}

/// Channel matrix `a_{lambda,mu} = <H pi(mu) g, pi(lambda) g~>` over the
/// canonical lattice order.
pub fn channel_matrix(h: &HsOperator, g: &Signal, g_dual: &Signal, lattice: &Lattice) -> Result<CMatrix> {
    check_op(h, lattice)?;
    g.check_len(lattice.modulus())?;
    g_dual.check_len(lattice.modulus())?;
    let outputs: Vec<Signal> = lattice
        .elements()
        .iter()
        .map(|mu| h.apply(&tf_shift(*mu, g)))
        .collect::<Result<_>>()?;
    let probes: Vec<Signal> = lattice.elements().iter().map(|lam| tf_shift(*lam, g_dual)).collect();
    let n = lattice.len();
    Ok(CMatrix::from_fn(n, n, |i, j| outputs[j].inner(&probes[i])))
}

/// Berezin transform `B(z) = <T pi(z) g, pi(z) g~>` on all of `Z_L x Z_L`.
pub fn berezin(t: &HsOperator, g: &Signal, g_dual: &Signal) -> Result<PhaseFn> {
    let l = t.modulus();
    g.check_len(l)?;
    g_dual.check_len(l)?;
    let mut out = PhaseFn::zeros(l);
    for x in 0..l {
        for w in 0..l {
            let z = PhasePoint::new(x, w);
            out.set(x, w, t.apply(&tf_shift(z, g))?.inner(&tf_shift(z, g_dual)));
        }
    }
    Ok(out)
}

/// The `M x N` array of generator sample sequences `a_{m,n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSeq {
    rows: usize,
    cols: usize,
    entries: Vec<LatticeSeq>,
}

impl CrossSeq {
    /// Number of channels `M`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of generators `N`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, m: usize, n: usize) -> &LatticeSeq {
        &self.entries[m * self.cols + n]
    }

    /// `sum_n (a_{m,n} * c_n)` for every channel `m`.
    pub fn apply(&self, lattice: &Lattice, c: &CoefArray) -> Result<SampleSet> {
        if c.len() != self.cols {
            return Err(Error::SizeMismatch {
                expected: self.cols,
                found: c.len(),
            });
        }
        let channels = (0..self.rows)
            .map(|m| {
                let mut acc = LatticeSeq::zeros(lattice);
                for n in 0..self.cols {
                    acc.add_assign(&lattice.convolve(self.get(m, n), c.channel(n))?);
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleSet::new(channels))
    }
}

/// `a_{m,n}` = channel `m` of the samples of generator `S_n`.
pub fn cross_seq(system: &GeneratorSystem, scheme: &SamplingScheme) -> Result<CrossSeq> {
    let lattice = system.lattice();
    let per_generator = system
        .generators()
        .iter()
        .map(|s| samples(s, scheme, lattice))
        .collect::<Result<Vec<_>>>()?;
    let (rows, cols) = (scheme.len(), system.len());
    let mut entries = Vec::with_capacity(rows * cols);
    for m in 0..rows {
        for sn in &per_generator {
            entries.push(sn.channel(m).clone());
        }
    }
    Ok(CrossSeq { rows, cols, entries })
}

/// Fibers `A^(xi) = [F(a_{m,n})(xi)]` on the dual transversal.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    points: Vec<PhasePoint>,
    fibers: Vec<CMatrix>,
}

impl TransferMatrix {
    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn fibers(&self) -> &[CMatrix] {
        &self.fibers
    }

    /// `(M, N)`.
    pub fn shape(&self) -> (usize, usize) {
        self.fibers.first().map(|f| f.shape()).unwrap_or((0, 0))
    }

    /// Eigenvalues of `A^(xi)* A^(xi)` per fiber, ascending.
    pub fn fiber_spectra(&self) -> Vec<Vec<f64>> {
        self.fibers
            .iter()
            .map(|a| hermitian_eigenvalues(&(a.adjoint() * a)))
            .collect()
    }
}

pub fn transfer_matrix(a: &CrossSeq, lattice: &Lattice, dual: &DualTransversal) -> Result<TransferMatrix> {
    let transforms = a
        .entries
        .iter()
        .map(|seq| lattice.symp_fourier(seq, dual))
        .collect::<Result<Vec<_>>>()?;
    let fibers = (0..dual.len())
        .map(|k| CMatrix::from_fn(a.rows, a.cols, |m, n| transforms[m * a.cols + n][k]))
        .collect();
    Ok(TransferMatrix {
        points: dual.points().to_vec(),
        fibers,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameBounds {
    pub alpha: f64,
    pub beta: f64,
    /// `M < N`: no fiber can have full column rank.
    pub rank_deficient: bool,
    pub diagnostic: Option<String>,
}

impl FrameBounds {
    /// `alpha_A > 1e-10 * beta_A`.
    pub fn is_frame(&self) -> bool {
        self.alpha > FRAME_REL_TOL * self.beta && !self.rank_deficient
    }
}

/// `alpha_A = min_xi lambda_min(A^* A)`, `beta_A = max_xi lambda_max(A^* A)`.
pub fn frame_bounds(a_hat: &TransferMatrix) -> FrameBounds {
    let (m, n) = a_hat.shape();
    let spectra = a_hat.fiber_spectra();
    let alpha = spectra
        .iter()
        .filter_map(|s| s.first().copied())
        .fold(f64::INFINITY, f64::min);
    let beta = spectra.iter().filter_map(|s| s.last().copied()).fold(0.0, f64::max);
    let rank_deficient = m < n;
    let alpha = if rank_deficient { 0.0 } else { alpha.max(0.0) };
    let diagnostic = if rank_deficient {
        Some(format!("rank deficient: M<N ({m} channels for {n} generators)"))
    } else if alpha <= FRAME_REL_TOL * beta {
        Some(format!(
            "transfer matrix loses column rank on some fiber (alpha_A = {alpha:e})"
        ))
    } else {
        None
    };
    FrameBounds {
        alpha,
        beta,
        rank_deficient,
        diagnostic,
    }
}

/// Left inverses `B^(xi) = A^(xi)^+ + C(xi) [I_M - A^(xi) A^(xi)^+]`, with
/// `C = 0` (the Moore–Penrose dual) when `c` is `None`.
pub fn dual_left_inverse(a_hat: &TransferMatrix, c: Option<&[CMatrix]>) -> Result<Vec<CMatrix>> {
    let bounds = frame_bounds(a_hat);
    if !bounds.is_frame() {
        return Err(Error::NotAFrame {
            alpha: bounds.alpha,
            beta: bounds.beta,
            reason: bounds.diagnostic.unwrap_or_default(),
        });
    }
    let (m, n) = a_hat.shape();
    if let Some(cs) = c {
        if cs.len() != a_hat.fibers.len() {
            return Err(Error::SizeMismatch {
                expected: a_hat.fibers.len(),
                found: cs.len(),
            });
        }
        if let Some(bad) = cs.iter().find(|cm| cm.shape() != (n, m)) {
            return Err(Error::SizeMismatch {
                expected: n * m,
                found: bad.nrows() * bad.ncols(),
            });
        }
    }
    Ok(a_hat
        .fibers
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let pinv = pseudo_inverse(a, PINV_REL_TOL);
            match c {
                Some(cs) => {
                    let proj = identity(m) - a * &pinv;
                    &pinv + &cs[k] * proj
                }
                None => pinv,
            }
        })
        .collect())
}

/// Options for [`reconstruction_kit_with`].
#[derive(Debug, Clone, Default)]
pub struct KitOptions {
    /// Per-fiber `N x M` matrices selecting a non-canonical left inverse.
    pub c_fibers: Option<Vec<CMatrix>>,
    /// Absolute Riesz tolerance; defaults to `1e-10 * M`.
    pub riesz_tol: Option<f64>,
}

/// Everything needed to reconstruct operators of `V_S` from their samples.
#[derive(Debug, Clone)]
pub struct ReconstructionKit {
    lattice: Lattice,
    dual: DualTransversal,
    n: usize,
    m: usize,
    pub riesz: RieszReport,
    pub bounds: FrameBounds,
    pub transfer: TransferMatrix,
    pub dual_fibers: Vec<CMatrix>,
    // b_{n,m} stored at n * M + m
    b: Vec<LatticeSeq>,
    recon_ops: Vec<HsOperator>,
}

impl ReconstructionKit {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dual(&self) -> &DualTransversal {
        &self.dual
    }

    pub fn alpha(&self) -> f64 {
        self.bounds.alpha
    }

    pub fn beta(&self) -> f64 {
        self.bounds.beta
    }

    /// Reconstruction operators `H_1..H_M`.
    pub fn recon_ops(&self) -> &[HsOperator] {
        &self.recon_ops
    }

    /// Dual sequence `b_{n,m}`.
    pub fn b(&self, n: usize, m: usize) -> &LatticeSeq {
        &self.b[n * self.m + m]
    }

    /// Coefficients of `H_m`: column `m` of `b`.
    pub fn b_column(&self, m: usize) -> CoefArray {
        CoefArray::new((0..self.n).map(|n| self.b(n, m).clone()).collect())
    }

    pub fn generators_len(&self) -> usize {
        self.n
    }

    pub fn channels_len(&self) -> usize {
        self.m
    }

    /// Largest `||B^(xi) A^(xi) - I_N||_max` over fibers.
    pub fn left_inverse_defect(&self) -> f64 {
        self.dual_fibers
            .iter()
            .zip(self.transfer.fibers())
            .map(|(b, a)| crate::linalg::max_abs_diff(&(b * a), &identity(self.n)))
            .fold(0.0, f64::max)
    }
}

pub fn reconstruction_kit(system: &GeneratorSystem, scheme: &SamplingScheme) -> Result<ReconstructionKit> {
    reconstruction_kit_with(system, scheme, &KitOptions::default())
}

pub fn reconstruction_kit_with(
    system: &GeneratorSystem,
    scheme: &SamplingScheme,
    opts: &KitOptions,
) -> Result<ReconstructionKit> {
    let riesz = system.riesz_check(opts.riesz_tol);
    if !riesz.is_riesz {
        return Err(Error::NotRiesz {
            lower: riesz.lower,
            upper: riesz.upper,
            reason: riesz.diagnostic.clone().unwrap_or_default(),
        });
    }
    let lattice = system.lattice();
    let dual = system.dual();
    let a = cross_seq(system, scheme)?;
    let transfer = transfer_matrix(&a, lattice, dual)?;
    let bounds = frame_bounds(&transfer);
    let dual_fibers = dual_left_inverse(&transfer, opts.c_fibers.as_deref())?;
    let (n, m) = (system.len(), scheme.len());
    let mut b = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            let vals: Vec<Complex64> = dual_fibers.iter().map(|f| f[(i, j)]).collect();
            b.push(lattice.inv_symp_fourier(&vals, dual)?);
        }
    }
    let mut kit = ReconstructionKit {
        lattice: lattice.clone(),
        dual: dual.clone(),
        n,
        m,
        riesz,
        bounds,
        transfer,
        dual_fibers,
        b,
        recon_ops: Vec::new(),
    };
    kit.recon_ops = (0..m)
        .map(|j| system.synthesize(&kit.b_column(j)))
        .collect::<Result<_>>()?;
    Ok(kit)
}

/// `T = sum_m sum_lambda s_m(lambda) alpha_lambda(H_m)`.
pub fn reconstruct(samples: &SampleSet, kit: &ReconstructionKit) -> Result<HsOperator> {
    check_samples(samples, kit)?;
    let mut out = HsOperator::zeros(kit.lattice.modulus());
    for (h, s) in kit.recon_ops.iter().zip(samples.channels()) {
        for (lam, v) in kit.lattice.elements().iter().zip(s.values()) {
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            out.axpy(*v, &op_translate(*lam, h));
        }
    }
    Ok(out)
}

/// `c_n = sum_m s_m * b_{n,m}`.
pub fn coefficient_frame_expansion(samples: &SampleSet, kit: &ReconstructionKit) -> Result<CoefArray> {
    check_samples(samples, kit)?;
    let channels = (0..kit.n)
        .map(|n| {
            let mut acc = LatticeSeq::zeros(&kit.lattice);
            for m in 0..kit.m {
                acc.add_assign(&kit.lattice.convolve(samples.channel(m), kit.b(n, m))?);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefArray::new(channels))
}

fn check_samples(samples: &SampleSet, kit: &ReconstructionKit) -> Result<()> {
    if samples.len() != kit.m {
        return Err(Error::SizeMismatch {
            expected: kit.m,
            found: samples.len(),
        });
    }
    if let Some(bad) = samples.channels().iter().find(|s| s.len() != kit.lattice.len()) {
        return Err(Error::SizeMismatch {
            expected: kit.lattice.len(),
            found: bad.len(),
        });
    }
    Ok(())
}

/// A generator system re-expressed over a sub-lattice.
#[derive(Debug, Clone)]
pub struct InflatedSystem {
    pub system: GeneratorSystem,
    /// Coset representatives `lambda_1..lambda_K` of the sub-lattice in the
    /// parent lattice; `lambda_1` is the origin.
    pub representatives: Vec<PhasePoint>,
    parent: Lattice,
    parent_generators: usize,
}

impl InflatedSystem {
    /// Index `[Lambda : Lambda']`.
    pub fn index(&self) -> usize {
        self.representatives.len()
    }

    /// Maps coefficients on the parent lattice to the inflated system:
    /// `c_{nl}(mu) = c_n(lambda_l + mu)`, generator `nl` at position `n K + l`.
    pub fn inflate_coefficients(&self, c: &CoefArray) -> Result<CoefArray> {
        if c.len() != self.parent_generators {
            return Err(Error::SizeMismatch {
                expected: self.parent_generators,
                found: c.len(),
            });
        }
        let sub = self.system.lattice();
        let sp = sub.space();
        let mut out = Vec::with_capacity(c.len() * self.index());
        for cn in c.channels() {
            if cn.len() != self.parent.len() {
                return Err(Error::SizeMismatch {
                    expected: self.parent.len(),
                    found: cn.len(),
                });
            }
            for rep in &self.representatives {
                let vals = sub
                    .elements()
                    .iter()
                    .map(|mu| {
                        let i = self
                            .parent
                            .index_of(sp.add(*rep, *mu))
                            .expect("sub-lattice lies in parent");
                        cn.values()[i]
                    })
                    .collect();
                out.push(LatticeSeq::from_vec(vals));
            }
        }
        Ok(CoefArray::new(out))
    }
}

/// Generators `S_{nl} = alpha_{lambda_l}(S_n)` on the sub-lattice `sub`.
pub fn sublattice_inflate(system: &GeneratorSystem, sub: &Lattice) -> Result<InflatedSystem> {
    let representatives = sub.coset_representatives_in(system.lattice())?;
    let generators = system
        .generators()
        .iter()
        .flat_map(|s| representatives.iter().map(move |rep| op_translate(*rep, s)))
        .collect();
    Ok(InflatedSystem {
        system: GeneratorSystem::new(sub.clone(), generators)?,
        representatives,
        parent: system.lattice().clone(),
        parent_generators: system.len(),
    })
}
