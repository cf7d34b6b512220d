//! Command-line front end for `nls-ground`: reads a TOML run configuration,
//! runs one command and writes JSON/CSV artifacts into an output directory.

pub mod config;
pub mod profile;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nls_ground::certificates::{
    default_alphas, dilation_scan, gaussian_certificate, log_grid, potential_certificate, PotentialParams,
};
use nls_ground::minimize::{solve, verify_ground_state};
use nls_ground::symmetrize::verify_inequalities;
use serde::Serialize;
use serde_json::json;

use crate::config::{CertificateKind, ConfigError, RunConfig};
use crate::profile::{read_profile, write_profile, ProfileError};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const NOT_ATTAINED: i32 = 2;
    pub const NEGATIVE: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "nls-ground", version, about = "Ground states of coupled NLS systems by constrained minimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Run configuration (TOML).
    pub config: PathBuf,
    /// Overrides the seed used by the solver and the sampled checks.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Suppress the summary on stdout.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the energy and verify the result; writes result.json and profile.csv.
    Solve(Common),
    /// Build a negative-energy certificate or a dilation scan; writes certificate.json.
    Certify(Common),
    /// Sample the structural hypotheses on the coupling and potential; writes hypotheses.json.
    Check(Common),
    /// Rearrange a profile CSV; writes rearranged.csv and rearrangement.json.
    Rearrange {
        #[command(flatten)]
        common: Common,
        /// Profile CSV on the configured grid.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config {path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Core(#[from] nls_ground::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

struct Run {
    config: RunConfig,
    seed: u64,
    out_dir: PathBuf,
    quiet: bool,
}

impl Run {
    fn load(common: &Common) -> Result<Self, CliError> {
        let mut config = RunConfig::from_path(&common.config).map_err(|source| CliError::Config {
            path: common.config.display().to_string(),
            source,
        })?;
        if let Some(s) = common.seed {
            config.solver.seed = s;
        }
        fs::create_dir_all(&common.out_dir).map_err(io_err(&common.out_dir))?;
        Ok(Self {
            seed: config.solver.seed,
            config,
            out_dir: common.out_dir.clone(),
            quiet: common.quiet,
        })
    }

    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

/// Runs one command and returns its exit code. Errors go to stderr.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Solve(c) => Run::load(c).and_then(|r| cmd_solve(&r)),
        Command::Certify(c) => Run::load(c).and_then(|r| cmd_certify(&r)),
        Command::Check(c) => Run::load(c).and_then(|r| cmd_check(&r)),
        Command::Rearrange { common, input } => Run::load(common).and_then(|r| cmd_rearrange(&r, input)),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit::ERROR
    })
}

fn cmd_solve(run: &Run) -> Result<i32, CliError> {
    let inst = &run.config.instance;
    inst.spec().validate_for_dimension(inst.grid().dimension())?;
    let result = solve(inst, &run.config.solver)?;
    let report = verify_ground_state(inst, &result, run.config.solver.residual_tol, run.seed)?;
    let grid = inst.grid();
    let doc = json!({
        "grid": { "dimension": grid.dimension(), "cells": grid.len(), "r_max": grid.r_max() },
        "masses": inst.masses(),
        "seed": run.seed,
        "converged": result.converged,
        "diagnostic": result.diagnostic,
        "iterations": result.iterations,
        "energy": result.energy,
        "lambda": result.lambda,
        "residuals": result.residuals,
        "is_symmetric": result.is_symmetric,
        "energy_history": result.energy_history,
        "symmetrization_events": result.symmetrization_events,
        "verification": report,
    });
    write_json(&run.out_dir.join("result.json"), &doc)?;
    write_profile(&run.out_dir.join("profile.csv"), grid, &result.field)?;
    run.say(format!(
        "energy {:.10e}  λ {:?}  iterations {}  converged {}",
        result.energy.total, result.lambda, result.iterations, result.converged
    ));
    if let Some(d) = &result.diagnostic {
        run.say(format!("diagnostic: {d}"));
    }
    Ok(if result.converged { exit::SUCCESS } else { exit::NOT_ATTAINED })
}

fn cmd_certify(run: &Run) -> Result<i32, CliError> {
    let inst = &run.config.instance;
    let opts = &run.config.certify;
    let path = run.out_dir.join("certificate.json");
    let found = match opts.kind {
        CertificateKind::Gaussian => {
            let alphas = opts.alphas.clone().unwrap_or_else(default_alphas);
            let cert = gaussian_certificate(inst, &alphas)?;
            run.say(format!("gaussian: α = {}  energy {:.10e}  found {}", cert.parameter, cert.energy_value, cert.found));
            write_json(&path, &cert)?;
            cert.found
        }
        CertificateKind::Potential => {
            let params = PotentialParams {
                alphas: opts.alphas.clone().unwrap_or_default(),
                support_radii: opts.support_radii.clone(),
            };
            let cert = potential_certificate(inst, &params)?;
            run.say(format!(
                "potential: {} = {}  form {:.10e}  found {}",
                cert.parameter_name,
                cert.parameter,
                cert.quadratic_form.unwrap_or(f64::NAN),
                cert.found
            ));
            write_json(&path, &cert)?;
            cert.found
        }
        CertificateKind::Dilation => {
            let alphas = opts.alphas.clone().unwrap_or_else(|| log_grid(-2.0, 4.0, 25));
            let scan = dilation_scan(inst, &alphas)?;
            run.say(format!(
                "dilation: minimum {:.10e} at α = {}  unbounded_below {}",
                scan.minimum.energy, scan.minimum.parameter, scan.unbounded_below
            ));
            write_json(&path, &json!({ "kind": "dilation", "scan": scan }))?;
            scan.unbounded_below
        }
    };
    Ok(if found { exit::SUCCESS } else { exit::NEGATIVE })
}

fn cmd_check(run: &Run) -> Result<i32, CliError> {
    let inst = &run.config.instance;
    let n = inst.grid().dimension();
    let opts = &run.config.check;
    let spec = inst.spec();
    let hypotheses = spec.check_hypotheses(n, opts.samples, run.seed);
    let supermodular = spec.check_supermodular(opts.supermodular_samples, run.seed);
    let ranges = spec.validate_for_dimension(n);
    let potential = match inst.potential() {
        Some(p) => Some(vec![p.check_monotone(), p.check_well(n)?]),
        None => None,
    };
    let potential_ok = potential.as_ref().is_none_or(|c| c.iter().all(|c| c.holds));
    let all_pass = hypotheses.all_hold() && supermodular.holds && ranges.is_ok() && potential_ok;
    let doc = json!({
        "dimension": n,
        "seed": run.seed,
        "all_pass": all_pass,
        "hypotheses": hypotheses,
        "supermodular": supermodular,
        "dimension_ranges": { "holds": ranges.is_ok(), "note": ranges.err().map(|e| e.to_string()) },
        "potential": potential,
    });
    write_json(&run.out_dir.join("hypotheses.json"), &doc)?;
    for (name, c) in [
        ("G0", &hypotheses.g0),
        ("G1", &hypotheses.g1),
        ("G2", &hypotheses.g2),
        ("G3", &hypotheses.g3),
        ("G4", &hypotheses.g4),
        ("G5", &hypotheses.g5),
    ] {
        let status = if c.skipped { "skipped" } else if c.holds_on_samples { "holds" } else { "FAILS" };
        run.say(format!("{name}: {status}"));
    }
    run.say(format!("supermodular: {}", if supermodular.holds { "holds" } else { "FAILS" }));
    if let Some(checks) = &potential {
        for c in checks {
            run.say(format!("{}: {}  {}", c.clause, if c.holds { "holds" } else { "FAILS" }, c.note));
        }
    }
    Ok(if all_pass { exit::SUCCESS } else { exit::NEGATIVE })
}

fn cmd_rearrange(run: &Run, input: &Path) -> Result<i32, CliError> {
    let inst = &run.config.instance;
    let grid = inst.grid();
    let field = read_profile(input, grid)?;
    if field.m() != inst.components() {
        return Err(ProfileError::Shape {
            path: input.display().to_string(),
            message: format!("{} components, config declares {}", field.m(), inst.components()),
        }
        .into());
    }
    let spec = (!inst.spec().is_zero()).then(|| inst.spec());
    let (after, report) = verify_inequalities(grid, &field, spec)?;
    write_profile(&run.out_dir.join("rearranged.csv"), grid, &after)?;
    let doc = json!({
        "l2_preserved": report.l2_preserved(1e-12),
        "dirichlet_nonincreasing": report.dirichlet_nonincreasing(1e-12),
        "coupling_nondecreasing": report.coupling_nondecreasing(1e-12),
        "report": report,
    });
    write_json(&run.out_dir.join("rearrangement.json"), &doc)?;
    run.say(format!(
        "L² preserved {}  Dirichlet nonincreasing {}",
        report.l2_preserved(1e-12),
        report.dirichlet_nonincreasing(1e-12)
    ));
    Ok(exit::SUCCESS)
}
