//! Cell-centered radial discretization of R^N.
//!
//! Cell `j` is the spherical shell `[e_j, e_{j+1})` with `e_j = j·h` and
//! `h = r_max / M`. Its node is the midpoint `r_j = (j + ½)·h` and its measure is
//! the exact shell volume `μ_j = V_N·(e_{j+1}^N − e_j^N)`. A grid function stores
//! one value per cell.
//!
//! Interfaces carry the area `N·V_N·e^{N−1}`. The origin has no flux (Neumann),
//! and the outermost cell acts as the homogeneous Dirichlet layer: admissible
//! fields vanish there, and the Laplacian uses a zero ghost value beyond it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest number of cells accepted by [`RadialGrid::uniform`].
pub const MIN_CELLS: usize = 8;

/// Volume of the unit ball in R^N.
pub fn unit_ball_volume(dimension: usize) -> f64 {
    use std::f64::consts::PI;
    match dimension {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        n => {
            // V_n = 2π/n · V_{n−2}
            2.0 * PI / n as f64 * unit_ball_volume(n - 2)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    dimension: usize,
    r_max: f64,
    spacing: f64,
    edges: Vec<f64>,
    nodes: Vec<f64>,
    measures: Vec<f64>,
    /// `conductance[j]` couples cells `j − 1` and `j`: interface area over node distance.
    /// Entry 0 is the origin (always zero); entry `M` is the outer ghost interface.
    conductance: Vec<f64>,
}

impl RadialGrid {
    /// Uniform grid with `cells` shells covering the ball of radius `r_max` in R^`dimension`.
    pub fn uniform(dimension: usize, cells: usize, r_max: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1, 2 or 3, got {dimension}"
            )));
        }
        if cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells, got {cells}"
            )));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "r_max must be positive and finite, got {r_max}"
            )));
        }

        let volume = unit_ball_volume(dimension);
        let h = r_max / cells as f64;
        let n = dimension as i32;
        let edges: Vec<f64> = (0..=cells).map(|j| j as f64 * h).collect();
        let nodes = (0..cells).map(|j| (j as f64 + 0.5) * h).collect();
        // (j+1)^N − j^N is an exact integer, so equal-width 1D cells get bitwise equal measures.
        let h_pow = h.powi(n);
        let measures = (0..cells)
            .map(|j| {
                let j = j as f64;
                volume * h_pow * ((j + 1.0).powi(n) - j.powi(n))
            })
            .collect();
        let area = |r: f64| dimension as f64 * volume * r.powi(n - 1);
        let conductance = (0..=cells)
            .map(|j| if j == 0 { 0.0 } else { area(edges[j]) / h })
            .collect();

        Ok(Self {
            dimension,
            r_max,
            spacing: h,
            edges,
            nodes,
            measures,
            conductance,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of cells `M`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Cell midpoints, strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell boundaries `e_0 = 0, …, e_M = r_max`.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn unit_ball_volume(&self) -> f64 {
        unit_ball_volume(self.dimension)
    }

    /// Measure of the ball of radius `r` (clamped to the domain).
    pub fn ball_measure(&self, r: f64) -> f64 {
        self.unit_ball_volume() * r.clamp(0.0, self.r_max).powi(self.dimension as i32)
    }

    /// Interface area `N·V_N·r^{N−1}`.
    pub fn interface_area(&self, r: f64) -> f64 {
        self.dimension as f64 * self.unit_ball_volume() * r.powi(self.dimension as i32 - 1)
    }

    pub(crate) fn conductance(&self) -> &[f64] {
        &self.conductance
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: f.len(),
            });
        }
        Ok(())
    }

    /// `Σ f_j μ_j`, summed in ascending `j`.
    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        Ok(self.integrate_unchecked(f))
    }

    pub(crate) fn integrate_unchecked(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.measures).fold(0.0, |acc, (v, m)| acc + v * m)
    }

    /// `∫ u v`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(u
            .iter()
            .zip(v)
            .zip(&self.measures)
            .fold(0.0, |acc, ((a, b), m)| acc + a * b * m))
    }

    /// `∫ u²`.
    pub fn mass(&self, u: &[f64]) -> Result<f64> {
        self.inner(u, u)
    }

    /// Discrete `∫|∇u|²` over the interior interfaces `1..M−1`.
    ///
    /// Constants have zero energy; no boundary term is added at `r_max`.
    pub fn dirichlet_energy(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        if self.len() < 2 {
            return Err(Error::InvalidGrid("need at least 2 cells".into()));
        }
        Ok(self.dirichlet_energy_unchecked(u))
    }

    pub(crate) fn dirichlet_energy_unchecked(&self, u: &[f64]) -> f64 {
        (1..u.len()).fold(0.0, |acc, j| {
            let d = u[j] - u[j - 1];
            acc + self.conductance[j] * d * d
        })
    }

    /// Discrete radial Laplacian `u'' + (N−1)/r·u'` in flux form.
    ///
    /// Satisfies `∫ u·(−Δu) = dirichlet_energy(u)` whenever the outermost cell vanishes.
    pub fn apply_laplacian(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u)?;
        if self.len() < 3 {
            return Err(Error::InvalidGrid("need at least 3 cells".into()));
        }
        let mut out = vec![0.0; u.len()];
        self.laplacian_into(u, &mut out);
        Ok(out)
    }

    pub(crate) fn laplacian_into(&self, u: &[f64], out: &mut [f64]) {
        let m = u.len();
        let k = &self.conductance;
        for j in 0..m {
            let outer = if j + 1 < m {
                k[j + 1] * (u[j + 1] - u[j])
            } else {
                k[m] * (0.0 - u[j])
            };
            let inner = if j > 0 { k[j] * (u[j] - u[j - 1]) } else { 0.0 };
            out[j] = (outer - inner) / self.measures[j];
        }
    }

    /// Samples `f` at the cell midpoints.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }

    /// Measure-weighted cell averages of `f`, using 4-point Gauss–Legendre per shell.
    pub fn sample_cell_averages<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        const X: [f64; 4] = [
            -0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
        ];
        const W: [f64; 4] = [
            0.347_854_845_137_453_9,
            0.652_145_154_862_546_1,
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_9,
        ];
        let area = self.interface_area(1.0);
        let n = self.dimension as i32;
        (0..self.len())
            .map(|j| {
                let (a, b) = (self.edges[j], self.edges[j + 1]);
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                let integral: f64 = X
                    .iter()
                    .zip(W)
                    .map(|(x, w)| {
                        let r = mid + half * x;
                        w * f(r) * area * r.powi(n - 1)
                    })
                    .sum::<f64>()
                    * half;
                integral / self.measures[j]
            })
            .collect()
    }
}

/// The candidate `U = (u_1, …, u_m)`: one grid function per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldVector {
    components: Vec<Vec<f64>>,
}

impl FieldVector {
    pub fn new(components: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidField("need at least one component".into()));
        };
        let len = first.len();
        for (i, c) in components.iter().enumerate() {
            if c.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    actual: c.len(),
                });
            }
            if let Some(j) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidField(format!(
                    "component {i} has a non-finite value at cell {j}"
                )));
            }
        }
        Ok(Self { components })
    }

    /// Skips validation; callers guarantee equal lengths and at least one component.
    pub(crate) fn from_components_unchecked(components: Vec<Vec<f64>>) -> Self {
        debug_assert!(!components.is_empty());
        Self { components }
    }

    pub fn zeros(components: usize, cells: usize) -> Self {
        Self {
            components: vec![vec![0.0; cells]; components.max(1)],
        }
    }

    /// Number of components `m`.
    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// Number of cells per component.
    pub fn len(&self) -> usize {
        self.components[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.components[i]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.components
    }

    /// Values of every component at cell `j`.
    pub fn at(&self, j: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[j]).collect()
    }

    pub(crate) fn at_into(&self, j: usize, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c[j];
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|v| v.is_finite())
    }

    pub(crate) fn check_shape(&self, m: usize, cells: usize) -> Result<()> {
        if self.m() != m {
            return Err(Error::InvalidField(format!(
                "expected {m} components, got {}",
                self.m()
            )));
        }
        if self.len() != cells {
            return Err(Error::LengthMismatch {
                expected: cells,
                actual: self.len(),
            });
        }
        Ok(())
    }
}
