//! Energy minimization on the product of mass spheres.
//!
//! Each step moves along a Sobolev-preconditioned gradient projected onto the
//! tangent space of the spheres, rescales every component back to its mass, and
//! backtracks until the energy drops. Every `symmetrize_every` accepted steps
//! the iterate is replaced by the rearrangement of its absolute value, if that
//! does not raise the energy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificates::{default_alphas, gaussian_certificate, gaussian_trial};
use crate::energy::{energy_unchecked, gradient_unchecked, residuals_from_gradient, EnergyBreakdown, ProblemInstance};
use crate::error::{Error, Result};
use crate::grid::{FieldVector, RadialGrid};
use crate::symmetrize::{is_schwarz_symmetric, rearrange_vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialGuess {
    /// Best gaussian over the default width scan.
    Gaussian,
    Given(FieldVector),
    /// Positive noise under a broad gaussian envelope, drawn from the seed.
    RandomPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub initial_step: f64,
    pub backtracking: f64,
    pub max_iterations: usize,
    pub energy_tol: f64,
    pub residual_tol: f64,
    /// 0 disables rearrangement steps.
    pub symmetrize_every: usize,
    pub seed: u64,
    pub initial_guess: InitialGuess,
    /// Shift `σ` of the preconditioner `(σ − Δ)⁻¹`. `None` follows the mean `|λ|` of the
    /// iterate, refactoring whenever it drifts by more than a factor of two.
    pub preconditioner_shift: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            backtracking: 0.5,
            max_iterations: 20_000,
            energy_tol: 1e-12,
            residual_tol: 1e-6,
            symmetrize_every: 10,
            seed: 0,
            initial_guess: InitialGuess::Gaussian,
            preconditioner_shift: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidProblem(msg.into()));
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) {
            return bad("initial_step must be > 0");
        }
        if !(self.backtracking > 0.0 && self.backtracking < 1.0) {
            return bad("backtracking must lie in (0, 1)");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be ≥ 1");
        }
        if !(self.energy_tol > 0.0 && self.residual_tol > 0.0) {
            return bad("tolerances must be > 0");
        }
        if let Some(s) = self.preconditioner_shift {
            if !(s.is_finite() && s > 0.0) {
                return bad("preconditioner_shift must be > 0");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationEvent {
    pub iteration: usize,
    pub energy_before: f64,
    pub energy_after: f64,
    pub scale: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub field: FieldVector,
    pub energy: EnergyBreakdown,
    /// Energy of the initial guess followed by one entry per accepted iterate.
    pub energy_history: Vec<f64>,
    pub lambda: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub is_symmetric: Vec<bool>,
    pub symmetrization_events: Vec<SymmetrizationEvent>,
    pub diagnostic: Option<String>,
}

/// Rescales every component to its target mass: `t_i = √c_i / ‖u_i‖`.
pub fn project_to_constraint(instance: &ProblemInstance, field: &FieldVector) -> Result<FieldVector> {
    field.check_shape(instance.components(), instance.grid().len())?;
    let grid = instance.grid();
    let comps = field
        .components()
        .iter()
        .zip(instance.masses())
        .enumerate()
        .map(|(i, (u, c))| {
            let norm = grid.mass(u)?.sqrt();
            if !(norm > 0.0) {
                return Err(Error::Precondition(format!("component {} has zero mass", i + 1)));
            }
            let t = c.sqrt() / norm;
            Ok(u.iter().map(|v| v * t).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldVector::from_components_unchecked(comps))
}

/// Factorized `(σ·diag(μ) + S)` on the free cells, `S` the stiffness matrix of
/// the Dirichlet energy with the outermost cell pinned to zero.
struct Preconditioner {
    measures: Vec<f64>,
    off: Vec<f64>,
    upper: Vec<f64>,
    pivots: Vec<f64>,
}

impl Preconditioner {
    fn new(grid: &RadialGrid, shift: f64) -> Self {
        let k = grid.conductance();
        let mu = grid.measures();
        let n = grid.len() - 1;
        let diag: Vec<f64> = (0..n).map(|j| shift * mu[j] + k[j] + k[j + 1]).collect();
        let off: Vec<f64> = (0..n - 1).map(|j| -k[j + 1]).collect();
        let mut upper = vec![0.0; n];
        let mut pivots = vec![0.0; n];
        pivots[0] = diag[0];
        for j in 0..n {
            if j > 0 {
                pivots[j] = diag[j] - off[j - 1] * upper[j - 1];
            }
            if j + 1 < n {
                upper[j] = off[j] / pivots[j];
            }
        }
        Self {
            measures: mu.to_vec(),
            off,
            upper,
            pivots,
        }
    }

    /// `(σμ + S)⁻¹ μ g`; the outermost cell of the result is zero.
    fn apply(&self, g: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        let mut x = vec![0.0; n + 1];
        for j in 0..n {
            let mut b = self.measures[j] * g[j];
            if j > 0 {
                b -= self.off[j - 1] * x[j - 1];
            }
            x[j] = b / self.pivots[j];
        }
        for j in (0..n - 1).rev() {
            x[j] -= self.upper[j] * x[j + 1];
        }
        x
    }
}

fn inner(grid: &RadialGrid, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(grid.measures())
        .fold(0.0, |acc, ((x, y), m)| acc + x * y * m)
}

fn zero_outer(field: &mut FieldVector) {
    for i in 0..field.m() {
        if let Some(v) = field.component_mut(i).last_mut() {
            *v = 0.0;
        }
    }
}

fn initial_field(instance: &ProblemInstance, config: &SolveConfig) -> Result<FieldVector> {
    let grid = instance.grid();
    let mut field = match &config.initial_guess {
        InitialGuess::Gaussian => gaussian_certificate(instance, &default_alphas())?.witness,
        InitialGuess::Given(f) => {
            f.check_shape(instance.components(), grid.len())?;
            f.clone()
        }
        InitialGuess::RandomPositive => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let width = 0.25 * grid.r_max();
            let comps = (0..instance.components())
                .map(|_| {
                    grid.nodes()
                        .iter()
                        .map(|r| (0.5 + rng.gen::<f64>()) * (-(r / width).powi(2)).exp())
                        .collect()
                })
                .collect();
            FieldVector::new(comps)?
        }
    };
    zero_outer(&mut field);
    project_to_constraint(instance, &field)
}

fn lambdas(grid: &RadialGrid, field: &FieldVector, grad: &FieldVector, masses: &[f64]) -> Vec<f64> {
    (0..field.m())
        .map(|i| inner(grid, grad.component(i), field.component(i)) / masses[i])
        .collect()
}

/// Fraction of the total mass beyond `r_max/2`.
fn outer_mass_fraction(grid: &RadialGrid, field: &FieldVector) -> f64 {
    let half = 0.5 * grid.r_max();
    let (mut outer, mut total) = (0.0, 0.0);
    for u in field.components() {
        for ((v, m), r) in u.iter().zip(grid.measures()).zip(grid.nodes()) {
            let w = v * v * m;
            total += w;
            if *r > half {
                outer += w;
            }
        }
    }
    outer / total
}

/// Minimizes the energy over the constraint set.
pub fn solve(instance: &ProblemInstance, config: &SolveConfig) -> Result<SolveResult> {
    config.validate()?;
    let grid = instance.grid();
    let masses = instance.masses();
    let mut u = initial_field(instance, config)?;
    let mut e = energy_unchecked(instance, &u);
    if !e.total.is_finite() {
        return Err(Error::NonFiniteEnergy {
            iteration: 0,
            iterate: Box::new(u),
        });
    }
    let mut grad = gradient_unchecked(instance, &u);
    let mut lambda = lambdas(grid, &u, &grad, masses);
    let adaptive_shift = |lambda: &[f64]| {
        let mean = lambda.iter().map(|l| l.abs()).sum::<f64>() / lambda.len() as f64;
        mean.max(1e-3)
    };
    let mut shift = config.preconditioner_shift.unwrap_or_else(|| adaptive_shift(&lambda));
    let mut precond = Preconditioner::new(grid, shift);

    let mut history = vec![e.total];
    let mut events = Vec::new();
    let mut tau = config.initial_step;
    let tau_max = 1e3 * config.initial_step;
    let mut converged = false;
    let mut diagnostic = None;
    let mut iterations = 0;
    let mut accepted = 0usize;
    let mut residuals = residuals_from_gradient(grid, &u, &grad, &lambda);

    while iterations < config.max_iterations {
        iterations += 1;
        // tangent, preconditioned descent direction per component
        let direction: Vec<Vec<f64>> = (0..u.m())
            .map(|i| {
                let ui = u.component(i);
                let pg = precond.apply(grad.component(i));
                let pu = precond.apply(ui);
                let coef = inner(grid, &pg, ui) / inner(grid, &pu, ui);
                pg.iter().zip(&pu).map(|(a, b)| a - coef * b).collect()
            })
            .collect();

        let mut step = None;
        while tau > 1e-16 * config.initial_step {
            let trial: Vec<Vec<f64>> = u
                .components()
                .iter()
                .zip(&direction)
                .map(|(ui, di)| ui.iter().zip(di).map(|(a, b)| a - tau * b).collect())
                .collect();
            let trial = FieldVector::from_components_unchecked(trial);
            if let Ok(trial) = project_to_constraint(instance, &trial) {
                let et = energy_unchecked(instance, &trial);
                if !et.total.is_finite() {
                    return Err(Error::NonFiniteEnergy {
                        iteration: iterations,
                        iterate: Box::new(trial),
                    });
                }
                if et.total < e.total {
                    step = Some((trial, et));
                    break;
                }
            }
            tau *= config.backtracking;
        }
        let Some((next, e_next)) = step else {
            // no decrease at any step size: the iterate is stationary to rounding
            converged = residuals.iter().all(|r| *r <= config.residual_tol);
            if !converged {
                diagnostic = Some("line search stalled above the residual tolerance".to_string());
            }
            break;
        };
        let delta = e.total - e_next.total;
        u = next;
        e = e_next;
        history.push(e.total);
        accepted += 1;
        tau = (tau * 1.5).min(tau_max);

        if config.symmetrize_every > 0 && accepted.is_multiple_of(config.symmetrize_every) {
            let mut candidate = rearrange_vector(grid, &u.abs())?;
            zero_outer(&mut candidate);
            if let Ok(candidate) = project_to_constraint(instance, &candidate) {
                let ec = energy_unchecked(instance, &candidate);
                let take = ec.total <= e.total;
                events.push(SymmetrizationEvent {
                    iteration: iterations,
                    energy_before: e.total,
                    energy_after: ec.total,
                    scale: e.scale(),
                    accepted: take,
                });
                if take && candidate != u {
                    u = candidate;
                    e = ec;
                    history.push(e.total);
                }
            }
        }

        grad = gradient_unchecked(instance, &u);
        lambda = lambdas(grid, &u, &grad, masses);
        residuals = residuals_from_gradient(grid, &u, &grad, &lambda);
        if config.preconditioner_shift.is_none() {
            let target = adaptive_shift(&lambda);
            if !(0.5..=2.0).contains(&(target / shift)) {
                shift = target;
                precond = Preconditioner::new(grid, shift);
            }
        }
        if delta < config.energy_tol && residuals.iter().all(|r| *r <= config.residual_tol) {
            converged = true;
            break;
        }
    }
    if !converged && diagnostic.is_none() {
        diagnostic = Some(format!("iteration cap of {} reached", config.max_iterations));
    }
    if e.total >= 0.0 && outer_mass_fraction(grid, &u) > 1e-3 {
        converged = false;
        diagnostic = Some(format!(
            "non-attainment: energy plateau at {:e} ≥ 0 with {:.1}% of the mass beyond r_max/2",
            e.total,
            100.0 * outer_mass_fraction(grid, &u)
        ));
    }
    let is_symmetric = u.components().iter().map(|c| is_schwarz_symmetric(c, 1e-8)).collect();
    Ok(SolveResult {
        field: u,
        energy: e,
        energy_history: history,
        lambda,
        residuals,
        converged,
        iterations,
        is_symmetric,
        symmetrization_events: events,
        diagnostic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateReport {
    pub symmetric: bool,
    pub symmetric_components: Vec<bool>,
    pub residual_ok: bool,
    /// Tolerance minus the largest residual.
    pub residual_margin: f64,
    pub competitors_ok: bool,
    /// Lowest competitor energy minus the candidate energy.
    pub competitor_margin: f64,
    pub competitors: usize,
    /// Present when the coupling declares lower-bound data.
    pub certificate_ok: Option<bool>,
    pub certificate_margin: Option<f64>,
    pub all_pass: bool,
}

/// Linear interpolation of `u` at radius `r`, zero beyond the last node.
fn interpolate(grid: &RadialGrid, u: &[f64], r: f64) -> f64 {
    let h = grid.spacing();
    let x = r / h - 0.5;
    if x <= 0.0 {
        return u[0];
    }
    let j = x.floor() as usize;
    if j + 1 >= u.len() {
        return 0.0;
    }
    let t = x - j as f64;
    (1.0 - t) * u[j] + t * u[j + 1]
}

/// Checks a solver result against symmetry, stationarity, and competitors.
pub fn verify_ground_state(
    instance: &ProblemInstance,
    result: &SolveResult,
    residual_tol: f64,
    seed: u64,
) -> Result<GroundStateReport> {
    const COMPETITORS: usize = 20;
    let grid = instance.grid();
    let u = &result.field;
    u.check_shape(instance.components(), grid.len())?;
    let e = energy_unchecked(instance, u).total;
    let symmetric_components: Vec<bool> = u.components().iter().map(|c| is_schwarz_symmetric(c, 1e-8)).collect();
    let symmetric = symmetric_components.iter().all(|b| *b);
    let max_residual = result.residuals.iter().copied().fold(0.0, f64::max);
    let residual_ok = max_residual <= residual_tol;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lowest = f64::INFINITY;
    for k in 0..COMPETITORS {
        let comps: Vec<Vec<f64>> = if k % 2 == 0 {
            let amp = 0.1 * rng.gen::<f64>();
            u.components()
                .iter()
                .map(|c| c.iter().map(|v| v * (1.0 + amp * (2.0 * rng.gen::<f64>() - 1.0))).collect())
                .collect()
        } else {
            let s = rng.gen_range(0.8..1.25);
            u.components()
                .iter()
                .map(|c| grid.nodes().iter().map(|r| interpolate(grid, c, r * s)).collect())
                .collect()
        };
        let mut competitor = FieldVector::new(comps)?;
        zero_outer(&mut competitor);
        if let Ok(c) = project_to_constraint(instance, &competitor) {
            lowest = lowest.min(energy_unchecked(instance, &c).total);
        }
    }
    let competitor_margin = lowest - e;
    let competitors_ok = competitor_margin >= -1e-12 * e.abs().max(f64::MIN_POSITIVE);

    let (certificate_ok, certificate_margin) = if instance.spec().lower_bound().is_some() {
        let cert = gaussian_certificate(instance, &default_alphas())?;
        let margin = cert.energy_value - e;
        (Some(margin >= 0.0), Some(margin))
    } else {
        (None, None)
    };
    let all_pass = symmetric && residual_ok && competitors_ok && certificate_ok.unwrap_or(true);
    Ok(GroundStateReport {
        symmetric,
        symmetric_components,
        residual_ok,
        residual_margin: residual_tol - max_residual,
        competitors_ok,
        competitor_margin,
        competitors: COMPETITORS,
        certificate_ok,
        certificate_margin,
        all_pass,
    })
}

/// Energy of the gaussian family member with width parameter `alpha`; convenience for callers
/// comparing a solve against a scan.
pub fn gaussian_energy(instance: &ProblemInstance, alpha: f64) -> Result<f64> {
    Ok(energy_unchecked(instance, &gaussian_trial(instance, alpha)?).total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::energy;
    use crate::nonlinearity::NonlinearitySpec;

    fn cubic(cells: usize) -> ProblemInstance {
        let grid = RadialGrid::uniform(1, cells, 20.0).unwrap();
        ProblemInstance::new(grid, NonlinearitySpec::power(1, 2.0, 0.0).unwrap(), vec![1.0], None).unwrap()
    }

    #[test]
    fn projection_examples() {
        let inst = cubic(64);
        let grid = inst.grid();
        let u = FieldVector::new(vec![vec![1.0; 64]]).unwrap();
        let p = project_to_constraint(&inst, &u).unwrap();
        assert!((grid.mass(p.component(0)).unwrap() - 1.0).abs() < 1e-12);
        let q = project_to_constraint(&inst, &p).unwrap();
        for (a, b) in p.component(0).iter().zip(q.component(0)) {
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
        let four = p.map(|v| 2.0 * v);
        let back = project_to_constraint(&inst, &four).unwrap();
        assert!((back.component(0)[3] - p.component(0)[3]).abs() < 1e-15);
        assert!(matches!(project_to_constraint(&inst, &FieldVector::zeros(1, 64)), Err(Error::Precondition(_))));
    }

    #[test]
    fn preconditioner_inverts() {
        let grid = RadialGrid::uniform(2, 50, 3.0).unwrap();
        let p = Preconditioner::new(&grid, 0.7);
        let mut g: Vec<f64> = (0..50).map(|j| (j as f64 * 0.3).sin()).collect();
        g[49] = 0.0;
        let x = p.apply(&g);
        assert_eq!(x[49], 0.0);
        // (σ − Δ)x = g on the free cells
        let lap = grid.apply_laplacian(&x).unwrap();
        for j in 0..49 {
            assert!((0.7 * x[j] - lap[j] - g[j]).abs() < 1e-10, "{j}");
        }
    }

    #[test]
    fn cubic_benchmark() {
        let inst = cubic(4096);
        let res = solve(&inst, &SolveConfig::default()).unwrap();
        assert!(res.converged, "{:?}", res.diagnostic);
        assert!((res.energy.total + 1.0 / 96.0).abs() < 1e-2 / 96.0, "{}", res.energy.total);
        assert!((res.lambda[0] + 1.0 / 16.0).abs() < 1e-2 / 16.0, "{:?}", res.lambda);
        assert!(res.energy_history.windows(2).all(|w| w[1] <= w[0]));
        let mass = inst.grid().mass(res.field.component(0)).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        let report = verify_ground_state(&inst, &res, 1e-6, 3).unwrap();
        assert!(report.all_pass, "{report:?}");
        assert_eq!(energy(&inst, &res.field).unwrap(), res.energy);
    }

    #[test]
    fn zero_coupling_not_attained() {
        let grid = RadialGrid::uniform(1, 256, 20.0).unwrap();
        let inst = ProblemInstance::new(grid, NonlinearitySpec::zero(1), vec![1.0], None).unwrap();
        let res = solve(&inst, &SolveConfig::default()).unwrap();
        assert!(!res.converged);
        assert!(res.energy_history.iter().all(|e| *e >= 0.0));
        assert!(res.diagnostic.unwrap().contains("non-attainment"));
    }

    #[test]
    fn nonsymmetric_candidate_fails_symmetry() {
        let inst = cubic(256);
        let grid = inst.grid();
        let mut u = grid.sample(|r| r * (-r).exp());
        *u.last_mut().unwrap() = 0.0;
        let field = project_to_constraint(&inst, &FieldVector::new(vec![u]).unwrap()).unwrap();
        let res = SolveResult {
            energy: energy(&inst, &field).unwrap(),
            field,
            energy_history: vec![],
            lambda: vec![0.0],
            residuals: vec![0.0],
            converged: true,
            iterations: 0,
            is_symmetric: vec![false],
            symmetrization_events: vec![],
            diagnostic: None,
        };
        let report = verify_ground_state(&inst, &res, 1e-6, 0).unwrap();
        assert!(!report.symmetric);
        assert!(!report.all_pass);
    }

    #[test]
    fn invalid_config() {
        let inst = cubic(64);
        let cfg = SolveConfig { backtracking: 1.5, ..SolveConfig::default() };
        assert!(solve(&inst, &cfg).is_err());
    }
}
