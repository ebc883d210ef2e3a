//! Run configuration: flat `key = value` text with dotted namespaces
//! (model.beta, grid.a, scheme). Validation collects every violation before
//! failing so a bad file is fixed in one round.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::linsolve::{FixedPointMode, FixedPointPolicy};
use crate::model::{
    BoundaryKind, CouplingParams, DampingKind, ModelParams, Nonlinearity, Potential,
};
use crate::schemes::SchemeKind;
use crate::{NlseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Plain,
    Damped,
    RotatingAdi,
    RotatingLagrangian,
    Coupled,
}

#[derive(Debug, Clone)]
pub enum BoundaryTreatment {
    None,
    Pml { r0: f64, delta: f64 },
    Cap { r0: f64, delta: f64, sigma0: f64 },
}

#[derive(Debug, Clone)]
pub enum InitSpec {
    Soliton { amp: f64, vel: f64, x0: f64, theta0: f64 },
    PlaneWave { amp: f64, modes: Vec<i64> },
    Gaussian { x0: Vec<f64>, width: f64, k: Vec<f64> },
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct AxisSpec {
    pub a: f64,
    pub b: f64,
    pub j: usize,
    pub bc: BoundaryKind,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub params: ModelParams,
    pub axes: Vec<AxisSpec>,
    pub potential: Potential,
    pub nonlinearity: Nonlinearity,
    pub scheme: SchemeKind,
    pub policy: FixedPointPolicy,
    pub boundary: BoundaryTreatment,
    pub tau: f64,
    pub t_final: f64,
    /// Snapshot every this many steps; 0 means initial and final only.
    pub snapshot_every: usize,
    pub out_dir: PathBuf,
    pub init: InitSpec,
    /// Second-component center offset for coupled runs (defaults to the
    /// first component's initial data).
    pub init2_x0: Option<f64>,
    /// FNV-1a hash of the canonical key-value text, for snapshot provenance.
    pub hash: u64,
}

struct Parser {
    map: BTreeMap<String, String>,
    used: std::collections::BTreeSet<String>,
    errors: Vec<String>,
}

impl Parser {
    fn new(text: &str) -> Self {
        let mut map = BTreeMap::new();
        let mut errors = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    let k = k.trim().to_string();
                    if map.insert(k.clone(), v.trim().to_string()).is_some() {
                        errors.push(format!("line {}: duplicate key '{k}'", lineno + 1));
                    }
                }
                None => errors.push(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )),
            }
        }
        Parser {
            map,
            used: Default::default(),
            errors,
        }
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.map.get(key).cloned()
    }

    fn f64(&mut self, key: &str, default: f64) -> f64 {
        match self.raw(key) {
            None => default,
            Some(s) => s.parse().unwrap_or_else(|_| {
                self.errors.push(format!("{key}: not a number: '{s}'"));
                default
            }),
        }
    }

    fn f64_req(&mut self, key: &str) -> f64 {
        match self.raw(key) {
            None => {
                self.errors.push(format!("{key}: missing required key"));
                f64::NAN
            }
            Some(s) => s.parse().unwrap_or_else(|_| {
                self.errors.push(format!("{key}: not a number: '{s}'"));
                f64::NAN
            }),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> usize {
        match self.raw(key) {
            None => default,
            Some(s) => s.parse().unwrap_or_else(|_| {
                self.errors.push(format!("{key}: not a nonnegative integer: '{s}'"));
                default
            }),
        }
    }

    fn f64_list(&mut self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.raw(key) {
            None => default.to_vec(),
            Some(s) => {
                let mut out = Vec::new();
                for part in s.split(',') {
                    match part.trim().parse() {
                        Ok(v) => out.push(v),
                        Err(_) => {
                            self.errors
                                .push(format!("{key}: not a number list: '{s}'"));
                            return default.to_vec();
                        }
                    }
                }
                out
            }
        }
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or_else(|| default.to_string())
    }
}

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            NlseError::ConfigInvalid(vec![format!("{}: {e}", path.display())])
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser::new(text);

        let model = match p.string("model", "plain").as_str() {
            "plain" => ModelKind::Plain,
            "damped" => ModelKind::Damped,
            "rotating-adi" => ModelKind::RotatingAdi,
            "rotating-lagrangian" => ModelKind::RotatingLagrangian,
            "coupled" => ModelKind::Coupled,
            other => {
                p.errors.push(format!(
                    "model: unknown '{other}' (plain | damped | rotating-adi | \
                     rotating-lagrangian | coupled)"
                ));
                ModelKind::Plain
            }
        };

        let damping = match p.string("model.damping.kind", "none").as_str() {
            "none" => DampingKind::None,
            "linear" => DampingKind::Linear(p.f64("model.damping.coefficient", 0.0)),
            "cubic" => DampingKind::Cubic(p.f64("model.damping.coefficient", 0.0)),
            "quintic" => DampingKind::Quintic(p.f64("model.damping.coefficient", 0.0)),
            other => {
                p.errors
                    .push(format!("model.damping.kind: unknown '{other}'"));
                DampingKind::None
            }
        };
        let params = ModelParams {
            epsilon: p.f64("model.epsilon", 1.0),
            beta: p.f64("model.beta", 0.0),
            omega_rot: p.f64("model.omega", 0.0),
            damping,
            coupling: CouplingParams {
                beta11: p.f64("coupling.beta11", 0.0),
                beta12: p.f64("coupling.beta12", 0.0),
                beta22: p.f64("coupling.beta22", 0.0),
                lambda: p.f64("coupling.lambda", 0.0),
            },
        };
        if let Err(NlseError::InvalidParameter(msg)) = params.validate() {
            p.errors.push(msg);
        }

        let dim = p.usize("grid.dim", 1);
        if !(1..=2).contains(&dim) {
            p.errors.push(format!("grid.dim: must be 1 or 2, got {dim}"));
        }
        let parse_bc = |p: &mut Parser, key: &str| match p.string(key, "dirichlet").as_str() {
            "dirichlet" => BoundaryKind::Dirichlet,
            "neumann" => BoundaryKind::Neumann,
            "periodic" => BoundaryKind::Periodic,
            other => {
                p.errors.push(format!(
                    "{key}: unknown '{other}' (dirichlet | neumann | periodic)"
                ));
                BoundaryKind::Dirichlet
            }
        };
        let mut axes = Vec::new();
        for ax in 0..dim.clamp(1, 2) {
            let suffix = if ax == 0 { String::new() } else { format!("{}", ax + 1) };
            let a = p.f64_req(&format!("grid.a{suffix}"));
            let b = p.f64_req(&format!("grid.b{suffix}"));
            let j = p.usize(&format!("grid.j{suffix}"), 0);
            let bc = parse_bc(&mut p, &format!("grid.bc{suffix}"));
            if !(a < b) {
                p.errors
                    .push(format!("grid axis {ax}: need a < b, got [{a}, {b}]"));
            }
            if j < 2 {
                p.errors
                    .push(format!("grid.j{suffix}: need at least 2 cells, got {j}"));
            }
            axes.push(AxisSpec { a, b, j, bc });
        }

        let gamma_default = vec![1.0; dim.clamp(1, 2)];
        let potential = match p.string("potential.kind", "zero").as_str() {
            "zero" => Potential::Zero,
            "harmonic" => Potential::Harmonic {
                gamma: p.f64_list("potential.gamma", &gamma_default),
            },
            "attractive" => Potential::Attractive,
            "lattice" => Potential::OpticalLattice {
                amp: p.f64_list("potential.amp", &gamma_default),
                wavenum: p.f64_list("potential.wavenum", &gamma_default),
            },
            "harmonic-quench" => Potential::HarmonicQuench {
                gamma_before: p.f64_list("potential.gamma", &gamma_default),
                gamma_after: p.f64_list("potential.gamma_after", &gamma_default),
                t_quench: p.f64("potential.t_quench", 0.0),
            },
            other => {
                p.errors.push(format!("potential.kind: unknown '{other}'"));
                Potential::Zero
            }
        };

        let nonlinearity = match p.string("nonlinearity.kind", "cubic").as_str() {
            "none" => Nonlinearity::none(),
            "cubic" => Nonlinearity::Cubic {
                beta: p.f64("nonlinearity.beta", params.beta),
            },
            "cubic-quintic" => Nonlinearity::CubicQuintic {
                beta1: p.f64("nonlinearity.beta1", 0.0),
                beta2: p.f64("nonlinearity.beta2", 0.0),
            },
            "saturating" => Nonlinearity::Saturating {
                beta0: p.f64("nonlinearity.beta0", 0.0),
                c0: p.f64("nonlinearity.c0", 1.0),
            },
            other => {
                p.errors.push(format!("nonlinearity.kind: unknown '{other}'"));
                Nonlinearity::none()
            }
        };

        let scheme = match SchemeKind::parse(&p.string("scheme", "tssp")) {
            Ok(s) => s,
            Err(NlseError::InvalidParameter(msg)) => {
                p.errors.push(format!("scheme: {msg}"));
                SchemeKind::Tssp
            }
            Err(e) => {
                p.errors.push(format!("scheme: {e}"));
                SchemeKind::Tssp
            }
        };

        let mode = match p.string("solve.mode", "plain").as_str() {
            "plain" => FixedPointMode::Plain,
            "modified-newton" => FixedPointMode::ModifiedNewton,
            other => {
                p.errors.push(format!("solve.mode: unknown '{other}'"));
                FixedPointMode::Plain
            }
        };
        let policy = FixedPointPolicy {
            tol: p.f64("solve.tol", 1e-12),
            max_iter: p.usize("solve.max_iter", 100),
            mode,
        };
        if let Err(NlseError::InvalidParameter(msg)) = policy.validate() {
            p.errors.push(msg);
        }

        let boundary = match p.string("boundary.kind", "none").as_str() {
            "none" => BoundaryTreatment::None,
            "pml" => {
                let r0 = p.f64_req("boundary.r0");
                BoundaryTreatment::Pml {
                    r0,
                    delta: p.f64("boundary.delta", r0 / 4.0),
                }
            }
            "cap" => {
                let r0 = p.f64_req("boundary.r0");
                BoundaryTreatment::Cap {
                    r0,
                    delta: p.f64("boundary.delta", r0 / 4.0),
                    sigma0: p.f64("boundary.sigma0", 1.0),
                }
            }
            other => {
                p.errors.push(format!("boundary.kind: unknown '{other}'"));
                BoundaryTreatment::None
            }
        };

        let tau = p.f64_req("time.tau");
        let t_final = p.f64("time.t_final", 0.0);
        if tau.is_finite() && tau <= 0.0 {
            p.errors.push(format!("time.tau: must be positive, got {tau}"));
        }
        if t_final < 0.0 {
            p.errors
                .push(format!("time.t_final: must be >= 0, got {t_final}"));
        }
        let snapshot_every = p.usize("time.snapshot_every", 0);
        let out_dir = PathBuf::from(p.string("output.dir", "out"));

        let init = match p.string("init.kind", "gaussian").as_str() {
            "soliton" => InitSpec::Soliton {
                amp: p.f64("init.amplitude", 2.0),
                vel: p.f64("init.velocity", 1.0),
                x0: p.f64("init.x0", 0.0),
                theta0: p.f64("init.theta0", 0.0),
            },
            "plane-wave" => InitSpec::PlaneWave {
                amp: p.f64("init.amplitude", 1.0),
                modes: p
                    .f64_list("init.modes", &[1.0])
                    .iter()
                    .map(|&m| m as i64)
                    .collect(),
            },
            "gaussian" => InitSpec::Gaussian {
                x0: p.f64_list("init.x0", &vec![0.0; dim.clamp(1, 2)]),
                width: p.f64("init.width", 1.0),
                k: p.f64_list("init.k", &vec![0.0; dim.clamp(1, 2)]),
            },
            "file" => InitSpec::File(PathBuf::from(p.string("init.file", ""))),
            other => {
                p.errors.push(format!("init.kind: unknown '{other}'"));
                InitSpec::Gaussian {
                    x0: vec![0.0],
                    width: 1.0,
                    k: vec![0.0],
                }
            }
        };
        let init2_x0 = p.raw("init2.x0").map(|s| {
            s.parse().unwrap_or_else(|_| {
                p.errors.push(format!("init2.x0: not a number: '{s}'"));
                0.0
            })
        });

        // cross-field checks
        match model {
            ModelKind::RotatingAdi | ModelKind::RotatingLagrangian => {
                if dim != 2 {
                    p.errors
                        .push("rotating models need grid.dim = 2".to_string());
                }
                if axes.iter().any(|ax| ax.bc != BoundaryKind::Periodic) {
                    p.errors
                        .push("rotating models need periodic boundaries".to_string());
                }
                if scheme != SchemeKind::Tssp {
                    p.errors
                        .push("rotating models are driven by the splitting stepper; set scheme = tssp".to_string());
                }
            }
            ModelKind::Damped | ModelKind::Coupled => {
                if scheme != SchemeKind::Tssp {
                    p.errors.push(format!(
                        "{} runs use the splitting stepper; set scheme = tssp",
                        if model == ModelKind::Damped { "damped" } else { "coupled" }
                    ));
                }
            }
            ModelKind::Plain => {}
        }
        if matches!(boundary, BoundaryTreatment::Pml { .. }) {
            p.errors.push(
                "boundary.kind = pml is driven by the absorb-sweep study, not plain runs; \
                 use boundary.kind = cap here"
                    .to_string(),
            );
        }
        if matches!(boundary, BoundaryTreatment::Cap { .. }) && dim != 1 {
            p.errors
                .push("boundary.kind = cap is implemented for 1D runs".to_string());
        }

        // unknown keys are configuration typos; report them
        for key in p.map.keys() {
            if !p.used.contains(key) {
                p.errors.push(format!("{key}: unknown key"));
            }
        }

        if !p.errors.is_empty() {
            return Err(NlseError::ConfigInvalid(p.errors));
        }

        let canonical: String = p
            .map
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        Ok(RunConfig {
            model,
            params,
            axes,
            potential,
            nonlinearity,
            scheme,
            policy,
            boundary,
            tau,
            t_final,
            snapshot_every,
            out_dir,
            init,
            init2_x0,
            hash: fnv1a(&canonical),
        })
    }
}
