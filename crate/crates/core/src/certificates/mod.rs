//! Explicit test functions with negative energy, and dilation scans.
//!
//! A certificate is a field on the constraint set together with its energy.
//! Test functions are sampled on the grid, forced to zero in the outermost cell
//! and renormalized by quadrature.

mod bessel;

pub use bessel::{bessel_first_zero, scaled_bessel_j};

use serde::Serialize;

use crate::energy::{energy_unchecked, ProblemInstance};
use crate::error::{Error, Result};
use crate::grid::FieldVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanEntry {
    pub parameter: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateResult {
    pub kind: String,
    pub found: bool,
    /// Name of the scanned parameter: `alpha`, `d` or `R`.
    pub parameter_name: String,
    pub parameter: f64,
    pub witness: FieldVector,
    /// Full energy of the witness.
    pub energy_value: f64,
    /// `½‖∇v‖² − ½∫p v²` for the unit-mass profile, for potential certificates.
    pub quadratic_form: Option<f64>,
    /// Energies for the gaussian family, quadratic forms for potential certificates.
    pub scan_table: Vec<ScanEntry>,
    pub note: Option<String>,
}

/// Log-spaced values `10^lo … 10^hi`, `count` of them.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![10f64.powf(lo)];
    }
    (0..count)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (count - 1) as f64))
        .collect()
}

/// Default gaussian widths: `α ∈ [10⁻⁴, 1]`.
pub fn default_alphas() -> Vec<f64> {
    log_grid(-4.0, 0.0, 41)
}

/// Scales one profile to every component: `u_i = √c_i · v/‖v‖`. The outermost
/// cell is set to zero first. Fails if the profile has no mass on the grid.
pub fn scaled_witness(instance: &ProblemInstance, mut profile: Vec<f64>) -> Result<FieldVector> {
    let grid = instance.grid();
    *profile.last_mut().expect("grid has cells") = 0.0;
    let norm = grid.mass(&profile)?.sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Precondition("test function has no mass on the grid".into()));
    }
    let comps = instance
        .masses()
        .iter()
        .map(|c| {
            let t = c.sqrt() / norm;
            profile.iter().map(|v| v * t).collect()
        })
        .collect();
    FieldVector::new(comps)
}

/// The gaussian `e^{−α r²}` in every component, scaled onto the constraint set.
pub fn gaussian_trial(instance: &ProblemInstance, alpha: f64) -> Result<FieldVector> {
    let profile = instance.grid().sample_cell_averages(|r| (-alpha * r * r).exp());
    scaled_witness(instance, profile)
}

fn check_alphas(alphas: &[f64], upper: Option<f64>) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::Precondition("parameter grid is empty".into()));
    }
    if let Some(a) = alphas
        .iter()
        .find(|a| !(a.is_finite() && **a > 0.0 && upper.is_none_or(|u| **a <= u)))
    {
        return Err(Error::Precondition(match upper {
            Some(u) => format!("α = {a} outside (0, {u}]"),
            None => format!("α = {a} must be positive"),
        }));
    }
    Ok(())
}

/// Lowest energy over the gaussian family `u_i = √c_i w_α/‖w_α‖`, `α ∈ (0, 1]`.
pub fn gaussian_certificate(instance: &ProblemInstance, alphas: &[f64]) -> Result<CertificateResult> {
    check_alphas(alphas, Some(1.0))?;
    let mut table = Vec::with_capacity(alphas.len());
    let mut best: Option<(f64, f64, FieldVector)> = None;
    for &alpha in alphas {
        let w = gaussian_trial(instance, alpha)?;
        let e = energy_unchecked(instance, &w).total;
        table.push(ScanEntry { parameter: alpha, energy: e });
        if best.as_ref().is_none_or(|b| e < b.1) {
            best = Some((alpha, e, w));
        }
    }
    let (alpha, e, witness) = best.expect("nonempty grid");
    Ok(CertificateResult {
        kind: "gaussian".into(),
        found: e < 0.0,
        parameter_name: "alpha".into(),
        parameter: alpha,
        witness,
        energy_value: e,
        quadratic_form: None,
        scan_table: table,
        note: None,
    })
}

/// Parameters of the potential certificate. Empty grids fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PotentialParams {
    /// Decay rates of `e^{−α r}` (N = 1), within `(0, 1]`.
    pub alphas: Vec<f64>,
    /// Support radii `1/d` of the logarithmic profile (N = 2).
    pub support_radii: Vec<f64>,
}

/// `½‖∇v‖² − ½∫p v²` for `v` normalized to unit mass, outer cell zeroed.
fn unit_quadratic_form(instance: &ProblemInstance, mut profile: Vec<f64>) -> Result<(f64, Vec<f64>)> {
    let grid = instance.grid();
    *profile.last_mut().expect("grid has cells") = 0.0;
    let norm = grid.mass(&profile)?.sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Precondition("test function has no mass on the grid".into()));
    }
    profile.iter_mut().for_each(|v| *v /= norm);
    let p = instance.potential_cells().expect("potential present");
    let trap: f64 = grid.integrate(&profile.iter().zip(p).map(|(v, q)| q * v * v).collect::<Vec<_>>())?;
    Ok((0.5 * grid.dirichlet_energy(&profile)? - 0.5 * trap, profile))
}

/// A scanned parameter value and the profile it produces.
type Candidate = (f64, Vec<f64>);

/// Dimension-specific test function for the energy with a trap potential:
/// `e^{−α r}` for N = 1, `(log 1/(d r))^{1/3}` on `r < 1/d` for N = 2, and the
/// first Dirichlet mode of the ball of radius `R` for N = 3.
pub fn potential_certificate(instance: &ProblemInstance, params: &PotentialParams) -> Result<CertificateResult> {
    let potential = instance
        .potential()
        .ok_or_else(|| Error::Precondition("no trap potential configured".into()))?;
    let p1 = potential.check_monotone();
    if !p1.holds {
        return Err(Error::Precondition(format!("P1 fails: {}", p1.note)));
    }
    let n = instance.grid().dimension();
    // p ≡ 0 gives a pure kinetic form; it is evaluated and reported as not found
    let vanishing = potential.profile().levels().iter().all(|&l| l == 0.0);
    let p2 = potential.check_well(n)?;
    if !p2.holds && !vanishing {
        return Err(Error::Precondition(format!("P2 fails: {}", p2.note)));
    }
    let grid = instance.grid();
    let h = grid.spacing();
    // N = 2: index where the capacity profiles start in the candidate list
    let mut split: Option<usize> = None;
    let (name, candidates, mut note): (&str, Vec<Candidate>, Option<String>) = match n {
        1 => {
            let alphas = if params.alphas.is_empty() { default_alphas() } else { params.alphas.clone() };
            check_alphas(&alphas, Some(1.0))?;
            let c = alphas.iter().map(|&a| (a, grid.sample_cell_averages(|r| (-a * r).exp()))).collect();
            ("alpha", c, None)
        }
        2 => {
            let top = grid.r_max() - h;
            let radii = if params.support_radii.is_empty() {
                // support radii from a few cells out to the last free cell
                log_grid((8.0 * h).log10(), top.log10(), 40)
                    .into_iter()
                    .map(|r| r.min(top))
                    .collect()
            } else {
                params.support_radii.clone()
            };
            if let Some(r) = radii.iter().find(|r| !(**r > 2.0 * h && **r <= top)) {
                return Err(Error::Precondition(format!(
                    "support radius {r} must lie in ({}, {top}]",
                    2.0 * h
                )));
            }
            // The cube-root logarithm vanishes like (ρ − r)^{1/3} at its support
            // radius, so its gradient is not square integrable there and the
            // discrete kinetic energy grows under refinement. The capacity profile
            // (1 on r < a, log(ρ/r)/log(ρ/a) out to ρ) is scanned alongside it.
            let plateau = potential.profile().breakpoints().first().copied().unwrap_or(1.0);
            let mut c: Vec<(f64, Vec<f64>)> = radii
                .iter()
                .map(|&rho| {
                    let u = grid.sample(|r| {
                        let r = r.max(h);
                        if r < rho {
                            (rho / r).ln().cbrt()
                        } else {
                            0.0
                        }
                    });
                    (1.0 / rho, u)
                })
                .collect();
            let logs = c.len();
            for &rho in &radii {
                let a = plateau.min(rho / std::f64::consts::E);
                if a <= h {
                    continue;
                }
                let u = grid.sample(|r| {
                    if r < a {
                        1.0
                    } else if r < rho {
                        (rho / r).ln() / (rho / a).ln()
                    } else {
                        0.0
                    }
                });
                c.push((1.0 / rho, u));
            }
            split = Some(logs);
            ("d", c, None)
        }
        _ => {
            let radius = match potential.well_radius(n)? {
                Some(r) => r,
                None => 0.5 * grid.r_max(),
            };
            if radius > grid.r_max() - h {
                return Err(Error::Precondition(format!(
                    "well radius R = {radius} does not fit inside r_max = {}",
                    grid.r_max()
                )));
            }
            let nu = n as f64 / 2.0 - 1.0;
            let j = bessel_first_zero(nu)?;
            let u = grid.sample(|r| if r < radius { scaled_bessel_j(nu, j * r / radius) } else { 0.0 });
            ("R", vec![(radius, u)], None)
        }
    };
    let mut table = Vec::with_capacity(candidates.len());
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for (param, profile) in candidates {
        let (q, unit) = unit_quadratic_form(instance, profile)?;
        table.push(ScanEntry { parameter: param, energy: q });
        if best.as_ref().is_none_or(|b| q < b.1) {
            best = Some((param, q, unit));
        }
    }
    let mut best_index = 0;
    for (k, e) in table.iter().enumerate() {
        if e.energy < table[best_index].energy {
            best_index = k;
        }
    }
    if let Some(split) = split {
        note = Some(if best_index < split {
            format!("cube-root logarithmic profile, clamped at the inner radius r = {h} (one cell); scan entries 0..{split}")
        } else {
            format!("capacity profile (scan entries {split}.. after the {split} cube-root logarithmic ones)")
        });
    }
    let (param, q, unit) = best.expect("nonempty scan");
    let witness = scaled_witness(instance, unit)?;
    let e = energy_unchecked(instance, &witness).total;
    Ok(CertificateResult {
        kind: "potential".into(),
        found: q < 0.0,
        parameter_name: name.into(),
        parameter: param,
        witness,
        energy_value: e,
        quadratic_form: Some(q),
        scan_table: table,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationScan {
    pub table: Vec<ScanEntry>,
    /// Heuristic: the minimum sits at the largest α and the last three energies
    /// strictly decrease. Not a proof that the energy is unbounded below.
    pub unbounded_below: bool,
    pub minimum: ScanEntry,
}

/// Energies along the mass-preserving gaussian dilation family.
pub fn dilation_scan(instance: &ProblemInstance, alphas: &[f64]) -> Result<DilationScan> {
    check_alphas(alphas, None)?;
    if alphas.len() < 3 || alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("need at least three increasing α values".into()));
    }
    let table = alphas
        .iter()
        .map(|&a| {
            let w = gaussian_trial(instance, a)?;
            Ok(ScanEntry {
                parameter: a,
                energy: energy_unchecked(instance, &w).total,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let minimum = *table
        .iter()
        .min_by(|a, b| a.energy.total_cmp(&b.energy))
        .expect("nonempty");
    let tail = &table[table.len() - 3..];
    let unbounded_below = minimum.parameter == tail[2].parameter
        && tail[0].energy > tail[1].energy
        && tail[1].energy > tail[2].energy;
    Ok(DilationScan {
        table,
        unbounded_below,
        minimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{energy, PotentialSpec};
    use crate::grid::RadialGrid;
    use crate::nonlinearity::NonlinearitySpec;

    fn instance(n: usize, cells: usize, r_max: f64, spec: NonlinearitySpec, p: Option<PotentialSpec>) -> ProblemInstance {
        let m = spec.components();
        ProblemInstance::new(RadialGrid::uniform(n, cells, r_max).unwrap(), spec, vec![1.0; m], p).unwrap()
    }

    #[test]
    fn zero_coupling_gaussian_not_found() {
        let inst = instance(2, 400, 20.0, NonlinearitySpec::zero(2), None);
        let cert = gaussian_certificate(&inst, &default_alphas()).unwrap();
        assert!(!cert.found);
        assert!(cert.scan_table.iter().all(|e| e.energy > 0.0));
    }

    #[test]
    fn cubic_gaussian_bounded_by_ground_state() {
        let inst = instance(1, 4096, 20.0, NonlinearitySpec::power(1, 2.0, 0.0).unwrap(), None);
        let cert = gaussian_certificate(&inst, &default_alphas()).unwrap();
        assert!(cert.found);
        assert!(cert.energy_value >= -1.0 / 96.0);
        let e = energy(&inst, &cert.witness).unwrap().total;
        assert_eq!(e, cert.energy_value);
        let mass = inst.grid().mass(cert.witness.component(0)).unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_alpha_range_enforced() {
        let inst = instance(1, 64, 20.0, NonlinearitySpec::zero(1), None);
        assert!(gaussian_certificate(&inst, &[]).is_err());
        assert!(gaussian_certificate(&inst, &[2.0]).is_err());
    }

    #[test]
    fn one_dimensional_step_potential() {
        let p = PotentialSpec::new(vec![1.0], vec![1.0, 0.0]).unwrap();
        let inst = instance(1, 2000, 20.0, NonlinearitySpec::zero(1), Some(p));
        let cert = potential_certificate(&inst, &PotentialParams::default()).unwrap();
        assert!(cert.found);
        assert!(cert.energy_value < 0.0);
        // closed form for the unit-mass e^{−α|x|}: ½(α² − (1 − e^{−2α})), up to discretization
        let a = cert.parameter;
        let exact = 0.5 * (a * a - (1.0 - (-2.0 * a).exp()));
        assert!((cert.quadratic_form.unwrap() - exact).abs() < 1e-3, "{a} {:?} {exact}", cert.quadratic_form);
    }

    #[test]
    fn two_dimensional_logarithmic_profile() {
        let p = PotentialSpec::new(vec![1.0], vec![1.0, 0.0]).unwrap();
        let inst = instance(2, 2000, 20.0, NonlinearitySpec::zero(1), Some(p));
        let cert = potential_certificate(&inst, &PotentialParams::default()).unwrap();
        assert!(cert.found, "{:?}", cert.scan_table);
        assert!(cert.note.is_some());
    }

    #[test]
    fn three_dimensional_well() {
        let p = PotentialSpec::new(vec![2.0], vec![3.0, 0.0]).unwrap();
        // 3 > π²/4 ≈ 2.47
        let inst = instance(3, 2000, 10.0, NonlinearitySpec::zero(1), Some(p));
        let cert = potential_certificate(&inst, &PotentialParams::default()).unwrap();
        assert!(cert.found);
        assert_eq!(cert.parameter, 2.0);
        // form ≈ ½(π²/R² − 3)
        let exact = 0.5 * (std::f64::consts::PI.powi(2) / 4.0 - 3.0);
        assert!((cert.quadratic_form.unwrap() - exact).abs() < 1e-2);
    }

    #[test]
    fn potential_preconditions() {
        let shallow = PotentialSpec::new(vec![1.0], vec![5.0, 0.0]).unwrap();
        let inst = instance(3, 500, 10.0, NonlinearitySpec::zero(1), Some(shallow));
        match potential_certificate(&inst, &PotentialParams::default()) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("P2")),
            other => panic!("{other:?}"),
        }
        let increasing = PotentialSpec::new(vec![1.0, 2.0], vec![1.0, 2.0, 0.0]).unwrap();
        let inst = instance(1, 500, 10.0, NonlinearitySpec::zero(1), Some(increasing));
        match potential_certificate(&inst, &PotentialParams::default()) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("P1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vanishing_potential_not_found() {
        for n in 1..=3 {
            let zero = PotentialSpec::new(vec![], vec![0.0]).unwrap();
            let inst = instance(n, 500, 10.0, NonlinearitySpec::zero(1), Some(zero));
            let cert = potential_certificate(&inst, &PotentialParams::default()).unwrap();
            assert!(!cert.found);
            assert!(cert.quadratic_form.unwrap() > 0.0);
        }
    }

    #[test]
    fn zero_coupling_dilation_increases() {
        let inst = instance(1, 4096, 20.0, NonlinearitySpec::zero(1), None);
        let scan = dilation_scan(&inst, &log_grid(-1.0, 1.0, 9)).unwrap();
        assert!(!scan.unbounded_below);
        assert!(scan.table.windows(2).all(|w| w[1].energy > w[0].energy));
    }
}
