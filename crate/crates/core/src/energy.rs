//! Constrained energy, its gradient, Lagrange multipliers and residuals.
//!
//! For `U = (u_1, …, u_m)`
//!
//! ```text
//! E(U) = ½ Σ ∫|∇u_i|² − ½ ∫ p Σ u_i² − ∫ G(|x|, |u_1|, …, |u_m|)
//! ```
//!
//! where the trap potential `p` is optional. Gradients are taken with respect to
//! the L²(μ) inner product and are exact for perturbations that vanish in the
//! outermost cell, which is the Dirichlet layer of the grid.

use serde::{Deserialize, Serialize};

use crate::certificates::bessel_first_zero;
use crate::error::{Error, Result};
use crate::grid::{FieldVector, RadialGrid};
use crate::nonlinearity::{NonlinearitySpec, RadialCoefficients, StepProfile};

/// Nonnegative, nonincreasing, piecewise-constant trap potential `p(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    profile: StepProfile,
}

/// Outcome of one structural check on a potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialCheck {
    pub clause: String,
    pub holds: bool,
    pub witness_radii: Vec<f64>,
    pub note: String,
}

impl PotentialSpec {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        Ok(Self {
            profile: StepProfile::new(breakpoints, levels)?,
        })
    }

    pub fn profile(&self) -> &StepProfile {
        &self.profile
    }

    pub fn value(&self, r: f64) -> f64 {
        self.profile.value(r)
    }

    /// Nonnegative, nonincreasing, and zero on the tail.
    pub fn check_monotone(&self) -> PotentialCheck {
        let clause = "P1".to_string();
        let levels = self.profile.levels();
        let bps = self.profile.breakpoints();
        if let Some(k) = levels.iter().position(|&l| l < 0.0) {
            let r = if k == 0 { 0.0 } else { bps[k - 1] };
            return PotentialCheck {
                clause,
                holds: false,
                witness_radii: vec![r],
                note: format!("p is negative ({}) from r = {r}", levels[k]),
            };
        }
        if let Some(k) = levels.windows(2).position(|w| w[1] > w[0]) {
            let (r, before, after) = (bps[k], levels[k], levels[k + 1]);
            let left = if k == 0 { 0.5 * r } else { 0.5 * (bps[k - 1] + r) };
            return PotentialCheck {
                clause,
                holds: false,
                witness_radii: vec![left, r],
                note: format!("p increases from {before} to {after} at r = {r}"),
            };
        }
        if self.profile.tail() != 0.0 {
            return PotentialCheck {
                clause,
                holds: false,
                witness_radii: vec![*bps.last().unwrap_or(&0.0)],
                note: format!("p does not decay: tail level {}", self.profile.tail()),
            };
        }
        PotentialCheck {
            clause,
            holds: true,
            witness_radii: Vec::new(),
            note: "nonnegative, nonincreasing, vanishing tail".into(),
        }
    }

    /// Positivity near the origin (N = 1, 2) or a deep enough well (N ≥ 3).
    ///
    /// For N ≥ 3 the witness radius `R` is the outer end of the first level `L`
    /// with `L > j²/R²`, `j` the first zero of `J_{N/2−1}`.
    pub fn check_well(&self, dimension: usize) -> Result<PotentialCheck> {
        let clause = "P2".to_string();
        let levels = self.profile.levels();
        let bps = self.profile.breakpoints();
        if dimension <= 2 {
            let holds = levels[0] > 0.0;
            let a = bps.first().map_or(1.0, |b| b.min(1.0));
            return Ok(PotentialCheck {
                clause,
                holds,
                witness_radii: if holds { vec![0.5 * a] } else { Vec::new() },
                note: if holds {
                    format!("p = {} > 0 near the origin", levels[0])
                } else {
                    "p vanishes near the origin".into()
                },
            });
        }
        Ok(match self.well_radius(dimension)? {
            Some(r) => PotentialCheck {
                clause,
                holds: true,
                witness_radii: vec![r],
                note: format!("p > j²/R² on r < R = {r}"),
            },
            None => PotentialCheck {
                clause,
                holds: false,
                witness_radii: Vec::new(),
                note: "no level L on (0, R) exceeds j²/R²".into(),
            },
        })
    }

    /// Smallest breakpoint `R` with `p > j²/R²` on `(0, R)`, for N ≥ 3.
    pub fn well_radius(&self, dimension: usize) -> Result<Option<f64>> {
        let j = bessel_first_zero(dimension as f64 / 2.0 - 1.0)?;
        let levels = self.profile.levels();
        Ok(self
            .profile
            .breakpoints()
            .iter()
            .enumerate()
            .find(|(k, &b)| levels[..=*k].iter().all(|&l| l > j * j / (b * b)))
            .map(|(_, &b)| b))
    }
}

/// A grid, a coupling, target masses `c_i`, and an optional trap potential.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    grid: RadialGrid,
    spec: NonlinearitySpec,
    masses: Vec<f64>,
    potential: Option<PotentialSpec>,
    coefficients: Vec<RadialCoefficients>,
    potential_cells: Option<Vec<f64>>,
}

impl ProblemInstance {
    pub fn new(
        grid: RadialGrid,
        spec: NonlinearitySpec,
        masses: Vec<f64>,
        potential: Option<PotentialSpec>,
    ) -> Result<Self> {
        if masses.len() != spec.components() {
            return Err(Error::InvalidProblem(format!(
                "{} masses given for {} components",
                masses.len(),
                spec.components()
            )));
        }
        if let Some((i, c)) = masses.iter().enumerate().find(|(_, c)| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidProblem(format!("mass c_{} must be > 0, got {c}", i + 1)));
        }
        let coefficients = spec.cell_coefficients(&grid);
        let potential_cells = potential.as_ref().map(|p| p.profile.cell_averages(&grid));
        Ok(Self {
            grid,
            spec,
            masses,
            potential,
            coefficients,
            potential_cells,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn spec(&self) -> &NonlinearitySpec {
        &self.spec
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn components(&self) -> usize {
        self.masses.len()
    }

    pub fn potential(&self) -> Option<&PotentialSpec> {
        self.potential.as_ref()
    }

    /// Cell averages of `p`, when a potential is present.
    pub fn potential_cells(&self) -> Option<&[f64]> {
        self.potential_cells.as_deref()
    }

    pub fn coefficients(&self) -> &[RadialCoefficients] {
        &self.coefficients
    }

    fn check(&self, field: &FieldVector) -> Result<()> {
        field.check_shape(self.components(), self.grid.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `∫|∇u_i|²` per component.
    pub kinetic: Vec<f64>,
    /// `½ ∫ p Σ u_i²`, zero without a potential.
    pub potential_term: f64,
    /// `∫ G(|x|, |U|)`.
    pub coupling_term: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    /// Magnitude of the individual contributions, for relative tolerances.
    pub fn scale(&self) -> f64 {
        0.5 * self.kinetic.iter().sum::<f64>() + self.potential_term.abs() + self.coupling_term.abs()
    }
}

pub fn energy(instance: &ProblemInstance, field: &FieldVector) -> Result<EnergyBreakdown> {
    instance.check(field)?;
    Ok(energy_unchecked(instance, field))
}

pub(crate) fn energy_unchecked(instance: &ProblemInstance, field: &FieldVector) -> EnergyBreakdown {
    let grid = &instance.grid;
    let kinetic: Vec<f64> = field
        .components()
        .iter()
        .map(|u| grid.dirichlet_energy_unchecked(u))
        .collect();
    let potential_term = match &instance.potential_cells {
        Some(p) => {
            let density: Vec<f64> = (0..grid.len())
                .map(|j| p[j] * field.components().iter().map(|u| u[j] * u[j]).sum::<f64>())
                .collect();
            0.5 * grid.integrate_unchecked(&density)
        }
        None => 0.0,
    };
    let coupling_term = instance
        .spec
        .integrate_coupling(grid, &instance.coefficients, field);
    let total = 0.5 * kinetic.iter().sum::<f64>() - potential_term - coupling_term;
    EnergyBreakdown {
        kinetic,
        potential_term,
        coupling_term,
        total,
    }
}

/// `∂G/∂s_i(|U|)·sign(u_i)` at every cell, one vector per component.
fn coupling_force(instance: &ProblemInstance, field: &FieldVector) -> Vec<Vec<f64>> {
    let m = field.m();
    let cells = field.len();
    let mut out = vec![vec![0.0; cells]; m];
    if instance.spec.is_zero() {
        return out;
    }
    let mut s = vec![0.0; m];
    for j in 0..cells {
        field.at_into(j, &mut s);
        s.iter_mut().for_each(|v| *v = v.abs());
        let c = instance.coefficients[j];
        for (i, comp) in out.iter_mut().enumerate() {
            let u = field.component(i)[j];
            if u != 0.0 {
                comp[j] = instance.spec.partial_with(c, i, &s) * u.signum();
            }
        }
    }
    out
}

/// L²(μ) gradient: `−Δu_i − ∂_iG(|U|)·sign(u_i) − p·u_i`.
pub fn energy_gradient(instance: &ProblemInstance, field: &FieldVector) -> Result<FieldVector> {
    instance.check(field)?;
    Ok(gradient_unchecked(instance, field))
}

pub(crate) fn gradient_unchecked(instance: &ProblemInstance, field: &FieldVector) -> FieldVector {
    let grid = &instance.grid;
    let force = coupling_force(instance, field);
    let mut out = Vec::with_capacity(field.m());
    for (u, f) in field.components().iter().zip(force) {
        let mut g = vec![0.0; u.len()];
        grid.laplacian_into(u, &mut g);
        for j in 0..u.len() {
            g[j] = -g[j] - f[j];
            if let Some(p) = &instance.potential_cells {
                g[j] -= p[j] * u[j];
            }
        }
        out.push(g);
    }
    FieldVector::from_components_unchecked(out)
}

/// `λ_i = (∫|∇u_i|² − ∫ g_i u_i² − ∫ p u_i²) / ∫u_i²`.
pub fn lagrange_multipliers(instance: &ProblemInstance, field: &FieldVector) -> Result<Vec<f64>> {
    instance.check(field)?;
    let grid = &instance.grid;
    let force = coupling_force(instance, field);
    field
        .components()
        .iter()
        .zip(&force)
        .enumerate()
        .map(|(i, (u, f))| {
            let mass = grid.integrate_unchecked(&u.iter().map(|v| v * v).collect::<Vec<_>>());
            if !(mass > 0.0) {
                return Err(Error::Precondition(format!("component {} has zero mass", i + 1)));
            }
            let coupling = grid.integrate_unchecked(&u.iter().zip(f).map(|(a, b)| a * b).collect::<Vec<_>>());
            let trap = match &instance.potential_cells {
                Some(p) => grid.integrate_unchecked(&u.iter().zip(p).map(|(a, b)| b * a * a).collect::<Vec<_>>()),
                None => 0.0,
            };
            Ok((grid.dirichlet_energy_unchecked(u) - coupling - trap) / mass)
        })
        .collect()
}

/// `‖Δu_i + λ_i u_i + g_i u_i + p u_i‖` in L²(μ) over every cell but the
/// outermost one, where the boundary condition replaces the equation.
pub fn residual_norm(instance: &ProblemInstance, field: &FieldVector, lambda: &[f64]) -> Result<Vec<f64>> {
    instance.check(field)?;
    if lambda.len() != field.m() {
        return Err(Error::LengthMismatch {
            expected: field.m(),
            actual: lambda.len(),
        });
    }
    let grad = gradient_unchecked(instance, field);
    Ok(residuals_from_gradient(&instance.grid, field, &grad, lambda))
}

pub(crate) fn residuals_from_gradient(
    grid: &RadialGrid,
    field: &FieldVector,
    grad: &FieldVector,
    lambda: &[f64],
) -> Vec<f64> {
    let mu = grid.measures();
    let free = grid.len() - 1;
    (0..field.m())
        .map(|i| {
            let (u, g) = (field.component(i), grad.component(i));
            (0..free)
                .fold(0.0, |acc, j| {
                    let r = lambda[i] * u[j] - g[j];
                    acc + mu[j] * r * r
                })
                .sqrt()
        })
        .collect()
}

/// Gagliardo–Nirenberg constant used when none is configured. For N ≤ 3 and
/// `‖u‖_{ℓ+2} ≤ C ‖u‖₂^{1−σ} ‖∇u‖₂^σ` the value 1 is an upper bound for the sharp constant.
pub const DEFAULT_GN_CONSTANT: f64 = 1.0;

/// Explicit lower bound for `E` on the constraint set, from the declared growth
/// constants `K, ℓ_i` and a Gagliardo–Nirenberg constant.
///
/// The kinetic weight is split as `½ − w Σ (Nℓ_i/4) ε^{4/(Nℓ_i)} = ¼` with
/// `w = max(Km, 1)`, which leaves every component at least `¼` of its kinetic
/// energy after Young's inequality.
pub fn coercivity_bound(instance: &ProblemInstance, gn_constant: Option<f64>) -> Result<f64> {
    let spec = &instance.spec;
    if spec.is_zero() {
        return Ok(0.0);
    }
    if instance.potential.is_some() {
        return Err(Error::Precondition("the bound covers the energy without a trap potential".into()));
    }
    let growth = spec
        .growth()
        .ok_or_else(|| Error::Precondition("no growth constants K, ℓ_i declared".into()))?;
    let n = instance.grid.dimension() as f64;
    let critical = 4.0 / n;
    if let Some(l) = growth.ell.iter().find(|&&l| l >= critical) {
        return Err(Error::Precondition(format!(
            "ℓ = {l} ≥ 4/N = {critical}: supercritical growth, the energy is unbounded below"
        )));
    }
    let c_const = gn_constant.unwrap_or(DEFAULT_GN_CONSTANT);
    if !(c_const.is_finite() && c_const > 0.0) {
        return Err(Error::Precondition("Gagliardo–Nirenberg constant must be > 0".into()));
    }
    let k = growth.k;
    let m = instance.components() as f64;
    let w = (k * m).max(1.0);
    let exps: Vec<f64> = growth.ell.iter().map(|l| 4.0 / (n * l)).collect();
    let share = |eps: f64| w * exps.iter().map(|p| eps.powf(*p) / p).sum::<f64>();
    // share is increasing in ε with share(0) = 0
    let (mut lo, mut hi) = (0.0, 1.0);
    while share(hi) < 0.25 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if share(mid) < 0.25 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps = lo;
    let total_mass: f64 = instance.masses.iter().sum();
    let mut bound = -k * total_mass;
    for (i, &l) in growth.ell.iter().enumerate() {
        let sigma = 0.5 * n * l / (l + 2.0);
        let p = exps[i];
        let q = p / (p - 1.0);
        let a = k * c_const.powf(l + 2.0) * instance.masses[i].powf((1.0 - sigma) * (l + 2.0) / 2.0);
        bound -= (a / eps).powf(q) / q;
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::GrowthBound;

    fn cubic(cells: usize) -> ProblemInstance {
        let grid = RadialGrid::uniform(1, cells, 20.0).unwrap();
        ProblemInstance::new(grid, NonlinearitySpec::power(1, 2.0, 0.0).unwrap(), vec![1.0], None).unwrap()
    }

    fn sech(grid: &RadialGrid) -> FieldVector {
        let k: f64 = 0.25;
        // no zero Dirichlet layer here: sech(kr_max) is not negligible at r_max = 20
        let u = grid.sample_cell_averages(|r| 2f64.sqrt() * k / (k * r).cosh());
        FieldVector::new(vec![u]).unwrap()
    }

    #[test]
    fn zero_field() {
        let inst = cubic(64);
        let e = energy(&inst, &FieldVector::zeros(1, 64)).unwrap();
        assert_eq!(e.total, 0.0);
        let g = energy_gradient(&inst, &FieldVector::zeros(1, 64)).unwrap();
        assert!(g.component(0).iter().all(|v| *v == 0.0));
        let r = residual_norm(&inst, &FieldVector::zeros(1, 64), &[0.0]).unwrap();
        assert_eq!(r, vec![0.0]);
        assert!(matches!(lagrange_multipliers(&inst, &FieldVector::zeros(1, 64)), Err(Error::Precondition(_))));
    }

    #[test]
    fn sech_profile_energy_and_multiplier() {
        let inst = cubic(4096);
        let u = sech(inst.grid());
        let e = energy(&inst, &u).unwrap();
        assert!((e.total + 1.0 / 96.0).abs() < 1e-3 / 96.0, "{e:?}");
        let lambda = lagrange_multipliers(&inst, &u).unwrap()[0];
        assert!((lambda + 1.0 / 16.0).abs() < 1e-3 / 16.0, "{lambda}");
        let identity = 0.5 * e.kinetic[0] - e.potential_term - e.coupling_term;
        assert!((identity - e.total).abs() <= 1e-12 * e.scale());
    }

    #[test]
    fn zero_coupling_is_kinetic() {
        let grid = RadialGrid::uniform(2, 100, 5.0).unwrap();
        let inst = ProblemInstance::new(grid.clone(), NonlinearitySpec::zero(2), vec![1.0, 2.0], None).unwrap();
        let u = FieldVector::new(vec![grid.sample(|r| (-r).exp()), grid.sample(|r| 1.0 / (1.0 + r))]).unwrap();
        let e = energy(&inst, &u).unwrap();
        assert!(e.total >= 0.0);
        assert_eq!(e.total, 0.5 * (e.kinetic[0] + e.kinetic[1]));
    }

    #[test]
    fn masses_validated() {
        let grid = RadialGrid::uniform(1, 16, 1.0).unwrap();
        let spec = NonlinearitySpec::power(2, 2.0, 0.0).unwrap();
        assert!(ProblemInstance::new(grid.clone(), spec.clone(), vec![1.0, 0.0], None).is_err());
        assert!(ProblemInstance::new(grid, spec, vec![1.0], None).is_err());
    }

    #[test]
    fn cubic_coercivity_bound() {
        let grid = RadialGrid::uniform(1, 64, 20.0).unwrap();
        let spec = NonlinearitySpec::power(1, 2.0, 0.0)
            .unwrap()
            .with_growth(GrowthBound { k: 0.25, ell: vec![2.0] })
            .unwrap();
        let inst = ProblemInstance::new(grid, spec, vec![1.0], None).unwrap();
        let b = coercivity_bound(&inst, None).unwrap();
        assert!((b + 0.3125).abs() < 1e-12, "{b}");
        assert!(b <= -1.0 / 96.0);
    }

    #[test]
    fn coercivity_rejects_supercritical() {
        let grid = RadialGrid::uniform(3, 64, 20.0).unwrap();
        let spec = NonlinearitySpec::power(1, 2.0, 0.0)
            .unwrap()
            .with_growth(GrowthBound { k: 0.25, ell: vec![2.0] })
            .unwrap();
        let inst = ProblemInstance::new(grid, spec, vec![1.0], None).unwrap();
        assert!(matches!(coercivity_bound(&inst, None), Err(Error::Precondition(_))));
        let zero = ProblemInstance::new(RadialGrid::uniform(3, 64, 20.0).unwrap(), NonlinearitySpec::zero(1), vec![1.0], None).unwrap();
        assert_eq!(coercivity_bound(&zero, None).unwrap(), 0.0);
    }

    #[test]
    fn potential_checks() {
        let increasing = PotentialSpec::new(vec![1.0, 2.0], vec![1.0, 2.0, 0.0]).unwrap();
        let c = increasing.check_monotone();
        assert!(!c.holds);
        assert_eq!(c.witness_radii.len(), 2);
        let well = PotentialSpec::new(vec![1.0], vec![12.0, 0.0]).unwrap();
        assert!(well.check_monotone().holds);
        // π² ≈ 9.87 < 12
        assert_eq!(well.well_radius(3).unwrap(), Some(1.0));
        let shallow = PotentialSpec::new(vec![1.0], vec![9.0, 0.0]).unwrap();
        assert!(!shallow.check_well(3).unwrap().holds);
        assert!(shallow.check_well(1).unwrap().holds);
        let flat = PotentialSpec::new(vec![], vec![0.0]).unwrap();
        assert!(!flat.check_well(2).unwrap().holds);
        let no_decay = PotentialSpec::new(vec![], vec![1.0]).unwrap();
        assert!(!no_decay.check_monotone().holds);
    }
}
