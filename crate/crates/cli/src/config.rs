//! JSON experiment configuration and its translation into core objects.
//!
//! ```json
//! {
//!   "L": 8,
//!   "lattice": {"separable": [2, 2]},
//!   "generators": [{"kind": "rank_one", "left": {"kind": "gaussian"}, "right": {"kind": "gaussian"}}],
//!   "scheme": {"windows": [{"g": {"kind": "gaussian"}, "g_dual": {"kind": "gaussian"}}]},
//!   "seed": 1
//! }
//! ```
//!
//! Random windows and kernels without an explicit seed draw from a stream
//! derived from the global seed and their position in the file.

use std::path::Path;

use opsis_core::hs_ops::rank_one;
use opsis_core::linalg::CMatrix;
use opsis_core::timefreq::{gaussian_window, tf_shift};
use opsis_core::{
    Complex64, GeneratorSystem, HsOperator, Lattice, LatticeDescriptor, PhasePoint, PhaseSpace, SamplingScheme,
    SeededRng, Signal, WindowPair,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "L")]
    pub modulus: usize,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub sublattice: Option<LatticeSpec>,
    #[serde(default)]
    pub generators: Vec<OperatorSpec>,
    #[serde(default)]
    pub scheme: Option<SchemeSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Absolute Riesz tolerance; the default is relative to the upper bound.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Seed for a random non-canonical left inverse.
    #[serde(default)]
    pub c_matrix_seed: Option<u64>,
    #[serde(default)]
    pub channel: ChannelSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LatticeSpec {
    Separable([usize; 2]),
    Generators(Vec<[usize; 2]>),
}

#[derive(Debug, Clone, Deserialize)]
pub struct WindowSpec {
    #[serde(flatten)]
    pub kind: WindowKind,
    #[serde(default)]
    pub shift: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowKind {
    Gaussian,
    Delta {
        #[serde(default)]
        at: usize,
    },
    Random {
        #[serde(default)]
        seed: Option<u64>,
    },
    Explicit {
        re: Vec<f64>,
        #[serde(default)]
        im: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// `left (x) right`.
    RankOne {
        left: WindowSpec,
        right: WindowSpec,
    },
    ExplicitKernel {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
    Random {
        #[serde(default)]
        seed: Option<u64>,
    },
    Identity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeSpec {
    Windows(Vec<PairSpec>),
    Average(Vec<OperatorSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub g: WindowSpec,
    pub g_dual: WindowSpec,
}

/// Operator fed through the channel in `channel-demo`.
#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSpec {
    /// `synthesize(c)` with seeded coefficients.
    #[default]
    Synthesized,
    Identity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Numbers of channels to try, each taking a prefix of the scheme.
    #[serde(default)]
    pub m: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        cfg.space()?;
        Ok(cfg)
    }

    pub fn space(&self) -> Result<PhaseSpace, CliError> {
        PhaseSpace::new(self.modulus).map_err(invalid)
    }

    pub fn lattice(&self) -> Result<Lattice, CliError> {
        build_lattice(self.space()?, &self.lattice)
    }

    pub fn sublattice(&self) -> Result<Option<Lattice>, CliError> {
        self.sublattice
            .as_ref()
            .map(|spec| build_lattice(self.space()?, spec))
            .transpose()
    }

    /// Generators on the configured lattice.
    pub fn system(&self) -> Result<GeneratorSystem, CliError> {
        self.system_on(self.lattice()?)
    }

    pub fn system_on(&self, lattice: Lattice) -> Result<GeneratorSystem, CliError> {
        if self.generators.is_empty() {
            return Err(CliError::InvalidConfig("at least one generator is required".into()));
        }
        let ops = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| self.operator(g, Stream::Generator(i)))
            .collect::<Result<Vec<_>, _>>()?;
        GeneratorSystem::new(lattice, ops).map_err(invalid)
    }

    pub fn scheme(&self) -> Result<SamplingScheme, CliError> {
        let spec = self
            .scheme
            .as_ref()
            .ok_or_else(|| CliError::InvalidConfig("a sampling scheme is required".into()))?;
        let scheme = match spec {
            SchemeSpec::Windows(pairs) => SamplingScheme::Windows(
                pairs
                    .iter()
                    .enumerate()
                    .map(|(m, p)| {
                        Ok(WindowPair::new(
                            self.window(&p.g, Stream::Window(2 * m))?,
                            self.window(&p.g_dual, Stream::Window(2 * m + 1))?,
                        ))
                    })
                    .collect::<Result<_, CliError>>()?,
            ),
            SchemeSpec::Average(ops) => SamplingScheme::Average(
                ops.iter()
                    .enumerate()
                    .map(|(m, q)| self.operator(q, Stream::Average(m)))
                    .collect::<Result<_, _>>()?,
            ),
        };
        if scheme.is_empty() {
            return Err(CliError::InvalidConfig("the sampling scheme has no channels".into()));
        }
        Ok(scheme)
    }

    /// Generator for seeded coefficients and other run-level draws.
    pub fn rng(&self) -> SeededRng {
        SeededRng::new(self.seed)
    }

    /// Random `N x M` matrices selecting a left inverse, one per fiber.
    pub fn c_fibers(&self, fibers: usize, n: usize, m: usize) -> Option<Vec<CMatrix>> {
        self.c_matrix_seed.map(|seed| {
            let mut rng = SeededRng::new(seed);
            (0..fibers).map(|_| rng.matrix(n, m)).collect()
        })
    }

    fn derived_seed(&self, stream: Stream) -> u64 {
        let tag = match stream {
            Stream::Generator(i) => 1 + 3 * i as u64,
            Stream::Window(i) => 2 + 3 * i as u64,
            Stream::Average(i) => 3 + 3 * i as u64,
        };
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(tag)
    }

    fn operator(&self, spec: &OperatorSpec, stream: Stream) -> Result<HsOperator, CliError> {
        let l = self.modulus;
        match spec {
            OperatorSpec::RankOne { left, right } => {
                let (lw, rw) = match stream {
                    Stream::Generator(i) => (Stream::Window(1000 + 2 * i), Stream::Window(1001 + 2 * i)),
                    Stream::Average(i) => (Stream::Window(2000 + 2 * i), Stream::Window(2001 + 2 * i)),
                    Stream::Window(i) => (Stream::Window(3000 + 2 * i), Stream::Window(3001 + 2 * i)),
                };
                rank_one(&self.window(left, lw)?, &self.window(right, rw)?).map_err(invalid)
            }
            OperatorSpec::ExplicitKernel { re, im } => {
                if re.len() != l || re.iter().any(|r| r.len() != l) {
                    return Err(CliError::InvalidConfig(format!("explicit kernel must be {l} x {l}")));
                }
                let zero = vec![vec![0.0; l]; l];
                let im = im.as_ref().unwrap_or(&zero);
                if im.len() != l || im.iter().any(|r| r.len() != l) {
                    return Err(CliError::InvalidConfig(format!("explicit kernel must be {l} x {l}")));
                }
                let k = CMatrix::from_fn(l, l, |r, c| Complex64::new(re[r][c], im[r][c]));
                HsOperator::from_kernel(k).map_err(invalid)
            }
            OperatorSpec::Random { seed } => {
                Ok(SeededRng::new(seed.unwrap_or_else(|| self.derived_seed(stream))).kernel(l))
            }
            OperatorSpec::Identity => Ok(HsOperator::identity(l)),
        }
    }

    fn window(&self, spec: &WindowSpec, stream: Stream) -> Result<Signal, CliError> {
        let l = self.modulus;
        let base = match &spec.kind {
            WindowKind::Gaussian => gaussian_window(self.space()?),
            WindowKind::Delta { at } => {
                if *at >= l {
                    return Err(CliError::InvalidConfig(format!("delta position {at} outside Z_{l}")));
                }
                Signal::delta(l, *at)
            }
            WindowKind::Random { seed } => SeededRng::new(seed.unwrap_or_else(|| self.derived_seed(stream))).signal(l),
            WindowKind::Explicit { re, im } => {
                let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
                if re.len() != l || im.len() != l {
                    return Err(CliError::InvalidConfig(format!(
                        "explicit window must have {l} samples"
                    )));
                }
                Signal::new(re.iter().zip(&im).map(|(r, i)| Complex64::new(*r, *i)).collect()).map_err(invalid)?
            }
        };
        match spec.shift {
            None => Ok(base),
            Some([x, w]) => {
                let z = self.space()?.check(PhasePoint::new(x, w)).map_err(invalid)?;
                Ok(tf_shift(z, &base))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Stream {
    Generator(usize),
    Window(usize),
    Average(usize),
}

pub fn build_lattice(space: PhaseSpace, spec: &LatticeSpec) -> Result<Lattice, CliError> {
    let desc = match spec {
        LatticeSpec::Separable([a, b]) => LatticeDescriptor::Separable { a: *a, b: *b },
        LatticeSpec::Generators(g) => {
            LatticeDescriptor::Generators(g.iter().map(|[x, w]| PhasePoint::new(*x, *w)).collect())
        }
    };
    Lattice::build(space, desc).map_err(invalid)
}

fn invalid(e: opsis_core::Error) -> CliError {
    CliError::InvalidConfig(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{"L": 8, "lattice": {"separable": [2, 4]},
                "generators": [{"kind": "random", "seed": 3}, {"kind": "rank_one",
                  "left": {"kind": "gaussian", "shift": [1, 2]}, "right": {"kind": "delta", "at": 3}}],
                "scheme": {"windows": [{"g": {"kind": "random"}, "g_dual": {"kind": "explicit", "re": [1,0,0,0,0,0,0,0]}}]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.lattice().unwrap().len(), 8);
        assert_eq!(cfg.system().unwrap().len(), 2);
        assert_eq!(cfg.scheme().unwrap().len(), 1);
    }

    #[test]
    fn rejects_non_divisor() {
        let cfg = ExperimentConfig::from_json(r#"{"L": 8, "lattice": {"separable": [3, 2]}}"#).unwrap();
        let err = cfg.lattice().unwrap_err();
        assert!(err.to_string().contains("does not divide"));
    }

    #[test]
    fn rejects_unknown_field_and_small_modulus() {
        assert!(ExperimentConfig::from_json(r#"{"L": 8, "lattice": {"separable": [1, 1]}, "bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"L": 1, "lattice": {"separable": [1, 1]}}"#).is_err());
    }

    #[test]
    fn unseeded_random_draws_follow_global_seed() {
        let text = |seed: u64| {
            format!(
                r#"{{"L": 4, "lattice": {{"separable": [1, 1]}}, "generators": [{{"kind": "random"}}], "seed": {seed}}}"#
            )
        };
        let a = ExperimentConfig::from_json(&text(1)).unwrap().system().unwrap();
        let b = ExperimentConfig::from_json(&text(1)).unwrap().system().unwrap();
        let c = ExperimentConfig::from_json(&text(2)).unwrap().system().unwrap();
        assert_eq!(a.generators()[0].max_abs_diff(&b.generators()[0]), 0.0);
        assert!(a.generators()[0].max_abs_diff(&c.generators()[0]) > 0.0);
    }
}
