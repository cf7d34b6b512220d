//! Decreasing rearrangement of radial grid functions.
//!
//! Values are treated as a multiset of (value, cell measure) pieces. The pieces
//! are laid out by decreasing value from the origin outwards and then read back
//! cell by cell. A cell covered by a single piece takes its value unchanged; a
//! cell straddling several pieces takes their root-mean-square, which keeps the
//! L² norm. On grids whose cell measures are all equal (1D) every cell is covered
//! by exactly one piece and the rearrangement is an exact permutation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{FieldVector, RadialGrid};
use crate::nonlinearity::NonlinearitySpec;

/// Overlaps smaller than this fraction of a cell are rounding noise.
const SLIVER: f64 = 1e-13;

/// Decreasing rearrangement of a nonnegative grid function.
pub fn schwarz_rearrange(grid: &RadialGrid, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: u.len(),
        });
    }
    if let Some((j, v)) = u.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::Precondition(format!(
            "rearrangement needs nonnegative values; cell {j} holds {v}"
        )));
    }
    let mu = grid.measures();
    let mut order: Vec<usize> = (0..u.len()).collect();
    // stable sort: ties keep ascending cell index
    order.sort_by(|&a, &b| u[b].total_cmp(&u[a]));

    let mut out = vec![0.0; u.len()];
    let mut piece = 0;
    let mut piece_start = 0.0;
    let mut piece_end = mu[order[0]];
    let mut cell_start = 0.0;
    for (j, &mu_j) in mu.iter().enumerate() {
        let cell_end = cell_start + mu_j;
        let mut first = None;
        let mut mixed = false;
        let mut acc = 0.0;
        loop {
            let lo = f64::max(cell_start, piece_start);
            let hi = f64::min(cell_end, piece_end);
            let overlap = hi - lo;
            if overlap > SLIVER * mu_j {
                let v = u[order[piece]];
                match first {
                    None => first = Some(v),
                    Some(f) if f != v => mixed = true,
                    _ => {}
                }
                acc += overlap * v * v;
            }
            if piece_end <= cell_end && piece + 1 < order.len() {
                piece += 1;
                piece_start = piece_end;
                piece_end += mu[order[piece]];
            } else {
                break;
            }
        }
        out[j] = match (first, mixed) {
            (Some(v), false) => v,
            (Some(_), true) => (acc / mu_j).sqrt(),
            (None, _) => u[order[piece]],
        };
        if j > 0 && out[j] > out[j - 1] {
            out[j] = out[j - 1];
        }
        cell_start = cell_end;
    }
    Ok(out)
}

/// Componentwise rearrangement.
pub fn rearrange_vector(grid: &RadialGrid, field: &FieldVector) -> Result<FieldVector> {
    let components = field
        .components()
        .iter()
        .map(|u| schwarz_rearrange(grid, u))
        .collect::<Result<Vec<_>>>()?;
    FieldVector::new(components)
}

/// `true` when `u` is nonnegative and nonincreasing in `r`, up to `tol` relative to `max |u|`.
pub fn is_schwarz_symmetric(u: &[f64], tol: f64) -> bool {
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slack = tol * scale;
    u.iter().all(|&v| v >= -slack) && u.windows(2).all(|w| w[1] <= w[0] + slack)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RearrangementReport {
    pub l2_before: Vec<f64>,
    pub l2_after: Vec<f64>,
    pub dirichlet_before: Vec<f64>,
    pub dirichlet_after: Vec<f64>,
    pub g_integral_before: Option<f64>,
    pub g_integral_after: Option<f64>,
}

impl RearrangementReport {
    pub fn l2_preserved(&self, rel_tol: f64) -> bool {
        self.l2_before
            .iter()
            .zip(&self.l2_after)
            .all(|(a, b)| (a - b).abs() <= rel_tol * a.abs().max(f64::MIN_POSITIVE))
    }

    pub fn dirichlet_nonincreasing(&self, rel_tol: f64) -> bool {
        self.dirichlet_before
            .iter()
            .zip(&self.dirichlet_after)
            .all(|(b, a)| *a <= b + rel_tol * b.abs())
    }

    pub fn coupling_nondecreasing(&self, rel_tol: f64) -> bool {
        match (self.g_integral_before, self.g_integral_after) {
            (Some(b), Some(a)) => a >= b - rel_tol * b.abs().max(a.abs()),
            _ => true,
        }
    }
}

/// Both sides of the rearrangement inequalities for `U` (signed input allowed:
/// the "after" side is computed from the rearrangement of `|U|`).
pub fn verify_inequalities(
    grid: &RadialGrid,
    field: &FieldVector,
    spec: Option<&NonlinearitySpec>,
) -> Result<(FieldVector, RearrangementReport)> {
    field.check_shape(spec.map_or(field.m(), |s| s.components()), grid.len())?;
    let after = rearrange_vector(grid, &field.abs())?;
    let l2 = |f: &FieldVector| -> Vec<f64> {
        f.components().iter().map(|u| grid.mass(u).map(f64::sqrt)).collect::<Result<_>>().unwrap()
    };
    let dirichlet = |f: &FieldVector| -> Vec<f64> {
        f.components().iter().map(|u| grid.dirichlet_energy_unchecked(u)).collect()
    };
    let (g_before, g_after) = match spec {
        Some(s) => {
            let coeffs = s.cell_coefficients(grid);
            (
                Some(s.integrate_coupling(grid, &coeffs, field)),
                Some(s.integrate_coupling(grid, &coeffs, &after)),
            )
        }
        None => (None, None),
    };
    let report = RearrangementReport {
        l2_before: l2(field),
        l2_after: l2(&after),
        dirichlet_before: dirichlet(field),
        dirichlet_after: dirichlet(&after),
        g_integral_before: g_before,
        g_integral_after: g_after,
    };
    Ok((after, report))
}
