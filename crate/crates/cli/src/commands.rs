//! The five pipelines behind the `opsis` subcommands.

use opsis_core::hs_ops::HsOperator;
use opsis_core::sampling::{
    channel_matrix, coefficient_frame_expansion, cross_seq, diag_channel_samples, frame_bounds, reconstruct,
    reconstruction_kit_with, samples, sublattice_inflate, transfer_matrix, KitOptions,
};
use opsis_core::{
    CoefArray, Complex64, FrameBounds, GeneratorSystem, Lattice, PhasePoint, RieszReport, SamplingScheme,
    TransferMatrix,
};
use serde_json::{json, Value};

use crate::config::{ChannelSpec, ExperimentConfig};
use crate::report::{fin, Cell, Table};
use crate::CliError;

/// Result of a pipeline: exit code 0 or 2, the metrics document and tables.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub metrics: Value,
    pub tables: Vec<Table>,
}

fn riesz_json(r: &RieszReport) -> Result<Value, CliError> {
    Ok(json!({
        "m": fin("riesz.m", r.lower)?,
        "M": fin("riesz.M", r.upper)?,
        "is_riesz": r.is_riesz,
        "route": r.route.as_str(),
        "tolerance": fin("riesz.tolerance", r.tolerance)?,
        "diagnostic": r.diagnostic,
    }))
}

fn frame_json(fb: &FrameBounds, m: usize, n: usize) -> Result<Value, CliError> {
    Ok(json!({
        "alpha_A": fin("frame.alpha_A", fb.alpha)?,
        "beta_A": fin("frame.beta_A", fb.beta)?,
        "M": m,
        "N": n,
        "is_frame": fb.is_frame(),
        "diagnostic": fb.diagnostic,
    }))
}

fn point_cells(p: PhasePoint) -> [Cell; 2] {
    [p.x.into(), p.w.into()]
}

fn spectrum_table(name: &str, points: &[PhasePoint], spectra: &[Vec<f64>]) -> Result<Table, CliError> {
    let mut t = Table::new(name, vec!["xi_x", "xi_w", "k", "eigenvalue"]);
    for (xi, spec) in points.iter().zip(spectra) {
        for (k, ev) in spec.iter().enumerate() {
            let [x, w] = point_cells(*xi);
            t.push(vec![x, w, k.into(), (*ev).into()])?;
        }
    }
    Ok(t)
}

/// The system whose translates are sampled: the configured one, or its
/// inflation onto the sub-lattice when one is given.
struct Target {
    system: GeneratorSystem,
    base: GeneratorSystem,
    inflation: Option<opsis_core::sampling::InflatedSystem>,
}

impl Target {
    fn new(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let base = cfg.system()?;
        match cfg.sublattice()? {
            None => Ok(Self {
                system: base.clone(),
                base,
                inflation: None,
            }),
            Some(sub) => {
                let inf = sublattice_inflate(&base, &sub)?;
                Ok(Self {
                    system: inf.system.clone(),
                    base,
                    inflation: Some(inf),
                })
            }
        }
    }

    fn lattice(&self) -> &Lattice {
        self.system.lattice()
    }

    /// Coefficients of `T` with respect to the sampled system.
    fn coefficients(&self, c: &CoefArray) -> Result<CoefArray, CliError> {
        match &self.inflation {
            None => Ok(c.clone()),
            Some(inf) => Ok(inf.inflate_coefficients(c)?),
        }
    }

    fn json(&self) -> Value {
        json!({
            "L": self.system.modulus(),
            "lattice_size": self.base.lattice().len(),
            "N": self.base.len(),
            "sublattice": self.inflation.as_ref().map(|inf| json!({
                "size": inf.system.lattice().len(),
                "index": inf.index(),
                "N": inf.system.len(),
            })),
        })
    }
}

fn transfer(system: &GeneratorSystem, scheme: &SamplingScheme) -> Result<(TransferMatrix, FrameBounds), CliError> {
    let a = cross_seq(system, scheme)?;
    let t = transfer_matrix(&a, system.lattice(), system.dual())?;
    let fb = frame_bounds(&t);
    Ok((t, fb))
}

pub fn run_riesz_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let target = Target::new(cfg)?;
    let report = target.system.riesz_check(cfg.tolerance);
    let table = spectrum_table("fibers", target.system.dual().points(), &target.system.fiber_spectra())?;
    Ok(Outcome {
        code: 0,
        metrics: json!({
            "command": "riesz-check",
            "system": target.json(),
            "riesz": riesz_json(&report)?,
            "tables": ["fibers.csv"],
        }),
        tables: vec![table],
    })
}

pub fn run_frame_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let target = Target::new(cfg)?;
    let scheme = cfg.scheme()?;
    let riesz = target.system.riesz_check(cfg.tolerance);
    let (t, fb) = transfer(&target.system, &scheme)?;
    let table = spectrum_table("transfer", t.points(), &t.fiber_spectra())?;
    Ok(Outcome {
        code: if fb.is_frame() { 0 } else { 2 },
        metrics: json!({
            "command": "frame-check",
            "system": target.json(),
            "riesz": riesz_json(&riesz)?,
            "frame": frame_json(&fb, scheme.len(), target.system.len())?,
            "tables": ["transfer.csv"],
        }),
        tables: vec![table],
    })
}

/// Reconstruction measurements for one system and scheme.
struct Recon {
    riesz: RieszReport,
    bounds: FrameBounds,
    transfer: TransferMatrix,
    /// Present when both the Riesz and frame checks pass.
    errors: Option<ReconErrors>,
}

struct ReconErrors {
    rel_hs_error: f64,
    coef_max_dev: f64,
    left_inverse_defect: f64,
    interp_max_dev: Option<f64>,
}

fn reconstruct_pipeline(
    cfg: &ExperimentConfig,
    target: &Target,
    scheme: &SamplingScheme,
    c_fibers: bool,
) -> Result<Recon, CliError> {
    let system = &target.system;
    let riesz = system.riesz_check(cfg.tolerance);
    let (transfer, bounds) = transfer(system, scheme)?;
    if !riesz.is_riesz || !bounds.is_frame() {
        return Ok(Recon {
            riesz,
            bounds,
            transfer,
            errors: None,
        });
    }
    let c = cfg.rng().coef_array(target.base.lattice(), target.base.len());
    let t = target.base.synthesize(&c)?;
    let opts = KitOptions {
        c_fibers: if c_fibers {
            cfg.c_fibers(system.dual().len(), system.len(), scheme.len())
        } else {
            None
        },
        riesz_tol: cfg.tolerance,
    };
    let kit = reconstruction_kit_with(system, scheme, &opts)?;
    let s = samples(&t, scheme, target.lattice())?;
    let back = reconstruct(&s, &kit)?;
    let rel_hs_error = (&back - &t).hs_norm() / t.hs_norm();
    let coef_max_dev = coefficient_frame_expansion(&s, &kit)?.max_abs_diff(&target.coefficients(&c)?);
    let interp_max_dev = if scheme.len() == system.len() {
        Some(interpolation_defect(kit.recon_ops(), scheme, target.lattice())?)
    } else {
        None
    };
    Ok(Recon {
        riesz,
        bounds,
        transfer,
        errors: Some(ReconErrors {
            rel_hs_error,
            coef_max_dev,
            left_inverse_defect: kit.left_inverse_defect(),
            interp_max_dev,
        }),
    })
}

/// `max |s_{H_m, n}(lambda) - delta_{m,n} delta_{lambda,0}|`.
fn interpolation_defect(ops: &[HsOperator], scheme: &SamplingScheme, lattice: &Lattice) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for (m, h) in ops.iter().enumerate() {
        let s = samples(h, scheme, lattice)?;
        for (n, ch) in s.channels().iter().enumerate() {
            for (lam, v) in lattice.elements().iter().zip(ch.values()) {
                let want = if m == n && *lam == PhasePoint::ORIGIN { 1.0 } else { 0.0 };
                worst = worst.max((v - Complex64::new(want, 0.0)).norm());
            }
        }
    }
    Ok(worst)
}

pub fn run_reconstruct(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let target = Target::new(cfg)?;
    let scheme = cfg.scheme()?;
    let r = reconstruct_pipeline(cfg, &target, &scheme, true)?;
    let table = spectrum_table("transfer", r.transfer.points(), &r.transfer.fiber_spectra())?;
    let reconstruction = match &r.errors {
        None => Value::Null,
        Some(e) => json!({
            "rel_hs_error": fin("reconstruction.rel_hs_error", e.rel_hs_error)?,
            "interp_max_dev": e.interp_max_dev.map(|v| fin("reconstruction.interp_max_dev", v)).transpose()?,
            "coef_max_dev": fin("reconstruction.coef_max_dev", e.coef_max_dev)?,
            "left_inverse_defect": fin("reconstruction.left_inverse_defect", e.left_inverse_defect)?,
            "dual": if cfg.c_matrix_seed.is_some() { "left-inverse family" } else { "pseudo-inverse" },
        }),
    };
    let diagnostic = if !r.riesz.is_riesz {
        Some(format!("NotRiesz: {}", r.riesz.diagnostic.clone().unwrap_or_default()))
    } else if !r.bounds.is_frame() {
        Some(format!(
            "NotAFrame: {}",
            r.bounds.diagnostic.clone().unwrap_or_default()
        ))
    } else {
        None
    };
    Ok(Outcome {
        code: if r.errors.is_some() { 0 } else { 2 },
        metrics: json!({
            "command": "reconstruct",
            "seed": cfg.seed,
            "system": target.json(),
            "riesz": riesz_json(&r.riesz)?,
            "frame": frame_json(&r.bounds, scheme.len(), target.system.len())?,
            "reconstruction": reconstruction,
            "diagnostic": diagnostic,
            "tables": ["transfer.csv"],
        }),
        tables: vec![table],
    })
}

pub fn run_channel_demo(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let lattice = cfg.lattice()?;
    let SamplingScheme::Windows(pairs) = cfg.scheme()? else {
        return Err(CliError::InvalidConfig(
            "channel-demo needs a window-pair scheme".into(),
        ));
    };
    let pair = pairs[0].clone();
    let h = match cfg.channel {
        ChannelSpec::Identity => HsOperator::identity(cfg.modulus),
        ChannelSpec::Synthesized => {
            let sys = cfg.system()?;
            sys.synthesize(&cfg.rng().coef_array(&lattice, sys.len()))?
        }
    };
    let cm = channel_matrix(&h, &pair.g, &pair.g_dual, &lattice)?;
    let s = diag_channel_samples(&h, &SamplingScheme::Windows(vec![pair]), &lattice)?;

    let mut matrix = Table::new(
        "channel_matrix",
        vec!["lambda_x", "lambda_w", "mu_x", "mu_w", "re", "im"],
    );
    let mut diagonal = Table::new(
        "diagonal",
        vec!["lambda_x", "lambda_w", "re", "im", "sample_re", "sample_im"],
    );
    let mut dev: f64 = 0.0;
    let pts = lattice.elements();
    for (i, lam) in pts.iter().enumerate() {
        for (j, mu) in pts.iter().enumerate() {
            let v = cm[(i, j)];
            let [lx, lw] = point_cells(*lam);
            let [mx, mw] = point_cells(*mu);
            matrix.push(vec![lx, lw, mx, mw, v.re.into(), v.im.into()])?;
        }
        let (d, sv) = (cm[(i, i)], s.channel(0).values()[i]);
        dev = dev.max((d - sv).norm());
        let [lx, lw] = point_cells(*lam);
        diagonal.push(vec![lx, lw, d.re.into(), d.im.into(), sv.re.into(), sv.im.into()])?;
    }
    Ok(Outcome {
        code: 0,
        metrics: json!({
            "command": "channel-demo",
            "L": cfg.modulus,
            "lattice_size": lattice.len(),
            "channel": match cfg.channel {
                ChannelSpec::Identity => "identity",
                ChannelSpec::Synthesized => "synthesized",
            },
            "matrix_rows": matrix.rows.len(),
            "diag_max_dev": fin("diag_max_dev", dev)?,
            "tables": ["channel_matrix.csv", "diagonal.csv"],
        }),
        tables: vec![matrix, diagonal],
    })
}

fn scheme_prefix(scheme: &SamplingScheme, m: usize) -> Option<SamplingScheme> {
    if m == 0 || m > scheme.len() {
        return None;
    }
    Some(match scheme {
        SamplingScheme::Windows(w) => SamplingScheme::Windows(w[..m].to_vec()),
        SamplingScheme::Average(q) => SamplingScheme::Average(q[..m].to_vec()),
    })
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::InvalidConfig("sweep needs a \"sweep\" grid".into()))?;
    if spec.a.is_empty() || spec.b.is_empty() {
        return Err(CliError::InvalidConfig("sweep grid is empty".into()));
    }
    let scheme = cfg.scheme()?;
    let ms = spec.m.clone().unwrap_or_else(|| vec![scheme.len()]);
    let header = vec![
        "L", "a", "b", "N", "M", "m", "M_riesz", "alpha_A", "beta_A", "rel_err", "status",
    ];
    let mut table = Table::new("sweep", header);
    let mut failures = 0usize;
    for &a in &spec.a {
        for &b in &spec.b {
            for &m in &ms {
                let row = sweep_row(cfg, &scheme, a, b, m);
                if row.last() != Some(&Cell::from("ok")) {
                    failures += 1;
                }
                table.push(row)?;
            }
        }
    }
    Ok(Outcome {
        code: 0,
        metrics: json!({
            "command": "sweep",
            "L": cfg.modulus,
            "seed": cfg.seed,
            "rows": table.rows.len(),
            "failed_rows": failures,
            "tables": ["sweep.csv"],
        }),
        tables: vec![table],
    })
}

fn sweep_row(cfg: &ExperimentConfig, scheme: &SamplingScheme, a: usize, b: usize, m: usize) -> Vec<Cell> {
    let n = cfg.generators.len();
    let mut row = vec![cfg.modulus.into(), a.into(), b.into(), n.into(), m.into()];
    let fail = |mut row: Vec<Cell>, status: String| {
        row.resize(10, Cell::Empty);
        row.push(Cell::Text(status));
        row
    };
    let Some(prefix) = scheme_prefix(scheme, m) else {
        return fail(row, format!("error: scheme has {} channels, not {m}", scheme.len()));
    };
    let lattice = match Lattice::separable(cfg.space().expect("validated on load"), a, b) {
        Ok(l) => l,
        Err(e) => return fail(row, format!("error: {e}")),
    };
    let target = match cfg.system_on(lattice).map(|system| Target {
        base: system.clone(),
        system,
        inflation: None,
    }) {
        Ok(t) => t,
        Err(e) => return fail(row, format!("error: {e}")),
    };
    let r = match reconstruct_pipeline(cfg, &target, &prefix, false) {
        Ok(r) => r,
        Err(e) => return fail(row, format!("error: {e}")),
    };
    let rel = r.errors.as_ref().map(|e| e.rel_hs_error);
    let values = [r.riesz.lower, r.riesz.upper, r.bounds.alpha, r.bounds.beta];
    if values.iter().chain(rel.iter()).any(|v| !v.is_finite()) {
        return fail(row, "non-finite".into());
    }
    row.extend(values.map(Cell::from));
    row.push(rel.into());
    let status = if !r.riesz.is_riesz {
        "not_riesz"
    } else if !r.bounds.is_frame() {
        "not_a_frame"
    } else {
        "ok"
    };
    row.push(status.into());
    row
}
