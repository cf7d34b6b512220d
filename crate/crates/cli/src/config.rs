//! Run configuration: a TOML file with one table per concern.
//!
//! ```toml
//! [problem]
//! dimension = 1
//! components = 1
//! masses = [1.0]
//! cells = 4096
//! r_max = 20.0
//!
//! [nonlinearity]
//! family = "power"
//! exponent = 2.0
//! beta = 0.0
//! ```
//!
//! Unknown keys are rejected. Every error carries the dotted field name and,
//! where it can be located, the line of the offending key.

use std::fmt;
use std::path::Path;

use nls_ground::energy::{PotentialSpec, ProblemInstance};
use nls_ground::minimize::{InitialGuess, SolveConfig};
use nls_ground::nonlinearity::{Family, GrowthBound, LowerBound, StepProfile};
use nls_ground::{NonlinearitySpec, RadialGrid};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {}", self.field, self.message),
            None => write!(f, "`{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: RawProblem,
    nonlinearity: RawNonlinearity,
    potential: Option<RawProfile>,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    certify: RawCertify,
    #[serde(default)]
    check: RawCheck,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    dimension: usize,
    components: usize,
    masses: Vec<f64>,
    cells: usize,
    #[serde(default = "default_r_max")]
    r_max: f64,
}

fn default_r_max() -> f64 {
    20.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    #[serde(default)]
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

/// A radial coefficient given either as a number or as a step table.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawCoefficient {
    Constant(f64),
    Steps(RawProfile),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNonlinearity {
    family: String,
    exponent: Option<f64>,
    beta: Option<f64>,
    terms: Option<Vec<Vec<f64>>>,
    a: Option<RawCoefficient>,
    b: Option<RawCoefficient>,
    sigma: Option<f64>,
    growth: Option<RawGrowth>,
    lower_bound: Option<RawLowerBound>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrowth {
    k: f64,
    ell: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLowerBound {
    r1: f64,
    s1: f64,
    a: Vec<f64>,
    t: Vec<f64>,
    sigma: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    initial_step: Option<f64>,
    backtracking: Option<f64>,
    max_iterations: Option<usize>,
    energy_tol: Option<f64>,
    residual_tol: Option<f64>,
    symmetrize_every: Option<usize>,
    seed: Option<u64>,
    initial_guess: Option<String>,
    preconditioner_shift: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertify {
    kind: Option<String>,
    alphas: Option<Vec<f64>>,
    support_radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    samples: Option<usize>,
    supermodular_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    Gaussian,
    Potential,
    Dilation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub kind: CertificateKind,
    pub alphas: Option<Vec<f64>>,
    pub support_radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub samples: usize,
    pub supermodular_samples: usize,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub instance: ProblemInstance,
    pub solver: SolveConfig,
    pub certify: CertifyOptions,
    pub check: CheckOptions,
}

/// Line of `key` inside `[section]` (or `[a.b]` for a dotted section).
fn locate(source: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    let mut header_line = None;
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header_line = Some(idx + 1);
            }
            continue;
        }
        if current != section {
            continue;
        }
        if let Some(k) = key {
            let lhs = line.split('=').next().unwrap_or("").trim();
            if lhs == k {
                return Some(idx + 1);
            }
        }
    }
    header_line
}

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: locate(self.source, section, Some(key)),
            field: format!("{section}.{key}"),
            message: message.into(),
        }
    }
}

fn step_profile(ctx: &Ctx, section: &str, key: &str, raw: &RawCoefficient) -> Result<StepProfile, ConfigError> {
    match raw {
        RawCoefficient::Constant(c) => Ok(StepProfile::constant(*c)),
        RawCoefficient::Steps(p) => {
            StepProfile::new(p.breakpoints.clone(), p.levels.clone()).map_err(|e| ctx.err(section, key, e.to_string()))
        }
    }
}

fn build_spec(ctx: &Ctx, raw: &RawNonlinearity, m: usize) -> Result<NonlinearitySpec, ConfigError> {
    const S: &str = "nonlinearity";
    let require = |v: Option<f64>, key: &str| v.ok_or_else(|| ctx.err(S, key, format!("required for family `{}`", raw.family)));
    let reject = |present: bool, key: &str| {
        if present {
            Err(ctx.err(S, key, format!("not a parameter of family `{}`", raw.family)))
        } else {
            Ok(())
        }
    };
    let family = match raw.family.as_str() {
        "power" => {
            reject(raw.terms.is_some(), "terms")?;
            reject(raw.a.is_some(), "a")?;
            reject(raw.b.is_some(), "b")?;
            reject(raw.sigma.is_some(), "sigma")?;
            Family::PowerCoupling {
                exponent: require(raw.exponent, "exponent")?,
                beta: raw.beta.unwrap_or(0.0),
            }
        }
        "family_r" => {
            reject(raw.exponent.is_some(), "exponent")?;
            reject(raw.beta.is_some(), "beta")?;
            reject(raw.sigma.is_some(), "sigma")?;
            let terms = raw.terms.clone().ok_or_else(|| ctx.err(S, "terms", "required for family `family_r`"))?;
            let a = raw.a.as_ref().ok_or_else(|| ctx.err(S, "a", "required for family `family_r`"))?;
            let b = raw.b.clone().unwrap_or(RawCoefficient::Constant(0.0));
            Family::FamilyR {
                terms,
                a: step_profile(ctx, S, "a", a)?,
                b: step_profile(ctx, S, "b", &b)?,
            }
        }
        "family_r_prime" => {
            reject(raw.exponent.is_some(), "exponent")?;
            reject(raw.beta.is_some(), "beta")?;
            let terms = raw
                .terms
                .clone()
                .ok_or_else(|| ctx.err(S, "terms", "required for family `family_r_prime`"))?;
            let a = raw.a.as_ref().ok_or_else(|| ctx.err(S, "a", "required for family `family_r_prime`"))?;
            let b = match &raw.b {
                None => 0.0,
                Some(RawCoefficient::Constant(b)) => *b,
                Some(RawCoefficient::Steps(_)) => {
                    return Err(ctx.err(S, "b", "must be a constant for family `family_r_prime`"))
                }
            };
            Family::FamilyRPrime {
                sigma: require(raw.sigma, "sigma")?,
                b,
                terms,
                a: step_profile(ctx, S, "a", a)?,
            }
        }
        "zero" => {
            for (present, key) in [
                (raw.exponent.is_some(), "exponent"),
                (raw.beta.is_some(), "beta"),
                (raw.terms.is_some(), "terms"),
                (raw.a.is_some(), "a"),
                (raw.b.is_some(), "b"),
                (raw.sigma.is_some(), "sigma"),
            ] {
                reject(present, key)?;
            }
            Family::ZeroCoupling
        }
        other => {
            return Err(ctx.err(
                S,
                "family",
                format!("unknown family `{other}`, expected one of power, family_r, family_r_prime, zero"),
            ))
        }
    };
    let mut spec = NonlinearitySpec::new(m, family).map_err(|e| ctx.err(S, "family", e.to_string()))?;
    if let Some(g) = &raw.growth {
        spec = spec
            .with_growth(GrowthBound {
                k: g.k,
                ell: g.ell.clone(),
            })
            .map_err(|e| ctx.err("nonlinearity.growth", "ell", e.to_string()))?;
    }
    if let Some(lb) = &raw.lower_bound {
        spec = spec
            .with_lower_bound(LowerBound {
                r1: lb.r1,
                s1: lb.s1,
                a: lb.a.clone(),
                t: lb.t.clone(),
                sigma: lb.sigma.clone(),
            })
            .map_err(|e| {
                let msg = e.to_string();
                let key = [("R_1", "r1"), ("A_i", "a"), ("t_i", "t"), ("σ", "sigma")]
                    .into_iter()
                    .find(|(needle, _)| msg.contains(needle))
                    .map_or("a", |(_, k)| k);
                ctx.err("nonlinearity.lower_bound", key, msg)
            })?;
    }
    Ok(spec)
}

fn build_solver(ctx: &Ctx, raw: &RawSolver) -> Result<SolveConfig, ConfigError> {
    let d = SolveConfig::default();
    let initial_guess = match raw.initial_guess.as_deref() {
        None | Some("gaussian") => InitialGuess::Gaussian,
        Some("random_positive") => InitialGuess::RandomPositive,
        Some(other) => {
            return Err(ctx.err(
                "solver",
                "initial_guess",
                format!("unknown initial guess `{other}`, expected gaussian or random_positive"),
            ))
        }
    };
    let config = SolveConfig {
        initial_step: raw.initial_step.unwrap_or(d.initial_step),
        backtracking: raw.backtracking.unwrap_or(d.backtracking),
        max_iterations: raw.max_iterations.unwrap_or(d.max_iterations),
        energy_tol: raw.energy_tol.unwrap_or(d.energy_tol),
        residual_tol: raw.residual_tol.unwrap_or(d.residual_tol),
        symmetrize_every: raw.symmetrize_every.unwrap_or(d.symmetrize_every),
        seed: raw.seed.unwrap_or(d.seed),
        initial_guess,
        preconditioner_shift: raw.preconditioner_shift,
    };
    config.validate().map_err(|e| {
        // the library message starts with the offending field name
        let msg = e.to_string();
        let key = [
            "initial_step",
            "backtracking",
            "max_iterations",
            "preconditioner_shift",
            "energy_tol",
        ]
        .into_iter()
        .find(|k| msg.contains(k))
        .unwrap_or("residual_tol");
        ctx.err("solver", key, msg)
    })?;
    Ok(config)
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            field: path.display().to_string(),
            message: format!("cannot read config: {e}"),
        })?;
        Self::parse(&source)
    }

    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(source).map_err(|e| {
            let line = e.span().map(|s| source[..s.start].matches('\n').count() + 1);
            ConfigError {
                line,
                field: "<document>".into(),
                message: e.message().trim().to_string(),
            }
        })?;
        let ctx = Ctx { source };
        let p = &raw.problem;
        if !(1..=3).contains(&p.dimension) {
            return Err(ctx.err("problem", "dimension", format!("must be 1, 2 or 3, got {}", p.dimension)));
        }
        if p.components == 0 {
            return Err(ctx.err("problem", "components", "must be ≥ 1"));
        }
        if p.masses.len() != p.components {
            return Err(ctx.err(
                "problem",
                "masses",
                format!("expected {} entries, got {}", p.components, p.masses.len()),
            ));
        }
        if let Some((i, c)) = p.masses.iter().enumerate().find(|(_, c)| !(c.is_finite() && **c > 0.0)) {
            return Err(ctx.err("problem", "masses", format!("c_{} = {c} must be > 0", i + 1)));
        }
        if p.cells < 4 {
            return Err(ctx.err("problem", "cells", "need at least 4 cells"));
        }
        if !(p.r_max.is_finite() && p.r_max > 0.0) {
            return Err(ctx.err("problem", "r_max", "must be > 0"));
        }
        let grid = RadialGrid::uniform(p.dimension, p.cells, p.r_max).map_err(|e| ctx.err("problem", "cells", e.to_string()))?;
        let spec = build_spec(&ctx, &raw.nonlinearity, p.components)?;
        let potential = raw
            .potential
            .as_ref()
            .map(|pp| PotentialSpec::new(pp.breakpoints.clone(), pp.levels.clone()))
            .transpose()
            .map_err(|e| ctx.err("potential", "levels", e.to_string()))?;
        let instance = ProblemInstance::new(grid, spec, p.masses.clone(), potential)
            .map_err(|e| ctx.err("problem", "masses", e.to_string()))?;
        let solver = build_solver(&ctx, &raw.solver)?;

        let kind = match raw.certify.kind.as_deref() {
            None | Some("gaussian") => CertificateKind::Gaussian,
            Some("potential") => CertificateKind::Potential,
            Some("dilation") => CertificateKind::Dilation,
            Some(other) => {
                return Err(ctx.err(
                    "certify",
                    "kind",
                    format!("unknown certificate `{other}`, expected gaussian, potential or dilation"),
                ))
            }
        };
        if let Some(a) = &raw.certify.alphas {
            if a.is_empty() || a.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(ctx.err("certify", "alphas", "must be a nonempty list of positive numbers"));
            }
        }
        let certify = CertifyOptions {
            kind,
            alphas: raw.certify.alphas.clone(),
            support_radii: raw.certify.support_radii.clone().unwrap_or_default(),
        };
        let check = CheckOptions {
            samples: raw.check.samples.unwrap_or(20_000),
            supermodular_samples: raw.check.supermodular_samples.unwrap_or(100_000),
        };
        if check.samples == 0 || check.supermodular_samples == 0 {
            return Err(ctx.err("check", "samples", "must be ≥ 1"));
        }
        Ok(Self {
            instance,
            solver,
            certify,
            check,
        })
    }
}
