//! Couplings `G(r, s_1, …, s_m)` and their derivatives `g_i`.
//!
//! `G` and the `g_i` are linked by `∂G/∂s_i = g_i(r, s_1², …, s_m²)·s_i`. Every
//! built-in family depends on the radius only through two step profiles, `a(r)`
//! and `b(r)`, which enter `G` linearly. That makes cell-averaged coefficients
//! exact for piecewise-constant fields.

pub mod checks;

pub use checks::{
    check_supermodular_fn, HypothesisCheck, HypothesisReport, SupermodularReport, Witness,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FieldVector, RadialGrid};
use crate::quadrature;

/// Right-continuous step function on `(0, ∞)`.
///
/// `levels[0]` holds on `(0, breakpoints[0])`, `levels[k]` on
/// `[breakpoints[k−1], breakpoints[k])`, and the last level on the tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl StepProfile {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if levels.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidSpec(format!(
                "step profile needs {} levels for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                levels.len()
            )));
        }
        if breakpoints.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::InvalidSpec("breakpoints must be positive and finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec("breakpoints must be strictly increasing".into()));
        }
        if levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidSpec("levels must be finite".into()));
        }
        Ok(Self { breakpoints, levels })
    }

    pub fn constant(level: f64) -> Self {
        Self {
            breakpoints: Vec::new(),
            levels: vec![level],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn value(&self, r: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= r);
        self.levels[k]
    }

    /// Level on the unbounded tail.
    pub fn tail(&self) -> f64 {
        *self.levels.last().expect("at least one level")
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[0] >= w[1])
    }

    /// First place where the profile steps up, as `(radius, level before, level after)`.
    pub fn first_increase(&self) -> Option<(f64, f64, f64)> {
        self.levels
            .windows(2)
            .zip(&self.breakpoints)
            .find(|(w, _)| w[1] > w[0])
            .map(|(w, &r)| (r, w[0], w[1]))
    }

    pub fn min_level(&self) -> f64 {
        self.levels.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Measure-weighted average over each grid cell. Exact for step functions.
    pub fn cell_averages(&self, grid: &RadialGrid) -> Vec<f64> {
        let n = grid.dimension() as i32;
        let edges = grid.edges();
        (0..grid.len())
            .map(|j| {
                let (lo, hi) = (edges[j], edges[j + 1]);
                let first = self.breakpoints.partition_point(|&b| b <= lo);
                let last = self.breakpoints.partition_point(|&b| b < hi);
                if first == last {
                    return self.levels[first];
                }
                let mut acc = 0.0;
                let mut start = lo;
                for k in first..=last {
                    let end = if k < last { self.breakpoints[k] } else { hi };
                    acc += self.levels[k] * (end.powi(n) - start.powi(n));
                    start = end;
                }
                acc / (hi.powi(n) - lo.powi(n))
            })
            .collect()
    }
}

/// Radial coefficients `a(r)`, `b(r)` at one radius or averaged over one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RadialCoefficients {
    pub a: f64,
    pub b: f64,
}

/// Built-in coupling families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `G = Σ s_i^{2p}/(2p) + (β/p) Σ_{i<j} s_i^p s_j^p`.
    PowerCoupling { exponent: f64, beta: f64 },
    /// `G = b(r)|s|² + a(r) Σ_j Π_i s_i^{ℓ_{i,j}+1}`; `terms[j][i] = ℓ_{i,j}`.
    FamilyR {
        terms: Vec<Vec<f64>>,
        a: StepProfile,
        b: StepProfile,
    },
    /// `G = b|s|^{σ+2} + a(r) Σ_j Π_i s_i^{ℓ_{i,j}+1}` with constant `b`.
    FamilyRPrime {
        sigma: f64,
        b: f64,
        terms: Vec<Vec<f64>>,
        a: StepProfile,
    },
    ZeroCoupling,
}

/// Declared growth constants: `0 ≤ G ≤ K(|s|² + Σ s_i^{ℓ_i+2})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub k: f64,
    pub ell: Vec<f64>,
}

/// Declared lower bound `G ≥ Σ A_i r^{−t_i} s_i^{σ_i+2}` for `r > R_1`, `0 < s_i < S_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub r1: f64,
    pub s1: f64,
    pub a: Vec<f64>,
    pub t: Vec<f64>,
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    components: usize,
    family: Family,
    growth: Option<GrowthBound>,
    lower_bound: Option<LowerBound>,
}

fn validate_terms(terms: &[Vec<f64>], m: usize) -> Result<()> {
    if terms.is_empty() {
        return Err(Error::InvalidSpec("at least one product term is required".into()));
    }
    for (j, t) in terms.iter().enumerate() {
        if t.len() != m {
            return Err(Error::InvalidSpec(format!(
                "term {j} has {} exponents, expected {m}",
                t.len()
            )));
        }
        if t.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidSpec(format!("term {j}: exponents must be > 0")));
        }
    }
    Ok(())
}

fn validate_coefficient_a(a: &StepProfile) -> Result<()> {
    if !a.is_nonincreasing() || a.min_level() <= 0.0 {
        return Err(Error::InvalidSpec(
            "a(r) must be nonincreasing with positive levels".into(),
        ));
    }
    Ok(())
}

impl NonlinearitySpec {
    pub fn new(components: usize, family: Family) -> Result<Self> {
        if components == 0 {
            return Err(Error::InvalidSpec("need at least one component".into()));
        }
        match &family {
            Family::PowerCoupling { exponent, beta } => {
                if !(exponent.is_finite() && *exponent > 1.0) {
                    return Err(Error::InvalidSpec(format!("exponent p must exceed 1, got {exponent}")));
                }
                if !(beta.is_finite() && *beta >= 0.0) {
                    return Err(Error::InvalidSpec(format!("coupling β must be ≥ 0, got {beta}")));
                }
            }
            Family::FamilyR { terms, a, b } => {
                validate_terms(terms, components)?;
                validate_coefficient_a(a)?;
                if !b.is_nonincreasing() || b.min_level() < 0.0 {
                    return Err(Error::InvalidSpec(
                        "b(r) must be nonincreasing and nonnegative".into(),
                    ));
                }
            }
            Family::FamilyRPrime { sigma, b, terms, a } => {
                validate_terms(terms, components)?;
                validate_coefficient_a(a)?;
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidSpec(format!("σ must be > 0, got {sigma}")));
                }
                if !(b.is_finite() && *b >= 0.0) {
                    return Err(Error::InvalidSpec(format!("b must be ≥ 0, got {b}")));
                }
            }
            Family::ZeroCoupling => {}
        }
        Ok(Self {
            components,
            family,
            growth: None,
            lower_bound: None,
        })
    }

    pub fn power(components: usize, exponent: f64, beta: f64) -> Result<Self> {
        Self::new(components, Family::PowerCoupling { exponent, beta })
    }

    pub fn zero(components: usize) -> Self {
        Self::new(components, Family::ZeroCoupling).expect("zero coupling is always valid")
    }

    pub fn with_growth(mut self, growth: GrowthBound) -> Result<Self> {
        if growth.ell.len() != self.components {
            return Err(Error::InvalidSpec(format!(
                "growth bound needs {} exponents, got {}",
                self.components,
                growth.ell.len()
            )));
        }
        if !(growth.k.is_finite() && growth.k >= 0.0) {
            return Err(Error::InvalidSpec("growth constant K must be ≥ 0".into()));
        }
        if growth.ell.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidSpec("growth exponents ℓ_i must be > 0".into()));
        }
        self.growth = Some(growth);
        Ok(self)
    }

    pub fn with_lower_bound(mut self, lower: LowerBound) -> Result<Self> {
        let m = self.components;
        if lower.a.len() != m || lower.t.len() != m || lower.sigma.len() != m {
            return Err(Error::InvalidSpec(format!(
                "lower bound needs {m} values for each of A, t, σ"
            )));
        }
        if !(lower.r1 > 0.0 && lower.s1 > 0.0) {
            return Err(Error::InvalidSpec("R_1 and S_1 must be > 0".into()));
        }
        if lower.a.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::InvalidSpec("A_i must be > 0".into()));
        }
        if lower.t.iter().any(|t| !(0.0..2.0).contains(t)) {
            return Err(Error::InvalidSpec("t_i must lie in [0, 2)".into()));
        }
        if lower.sigma.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::InvalidSpec("σ_i must be ≥ 0".into()));
        }
        self.lower_bound = Some(lower);
        Ok(self)
    }

    /// Checks the dimension-dependent ranges: declared `ℓ_i < 4/N`, `σ < 4/N` for
    /// the constant-`b` family, and `σ_i ≤ 2(2 − t_i)/N` in the lower bound.
    pub fn validate_for_dimension(&self, dimension: usize) -> Result<()> {
        let critical = 4.0 / dimension as f64;
        if let Some(g) = &self.growth {
            if let Some((i, l)) = g.ell.iter().enumerate().find(|(_, l)| **l >= critical) {
                return Err(Error::InvalidSpec(format!(
                    "growth exponent ℓ_{} = {l} must be below 4/N = {critical}",
                    i + 1
                )));
            }
        }
        if let Family::FamilyRPrime { sigma, .. } = &self.family {
            if *sigma >= critical {
                return Err(Error::InvalidSpec(format!(
                    "σ = {sigma} must be below 4/N = {critical}"
                )));
            }
        }
        if let Some(lb) = &self.lower_bound {
            for i in 0..self.components {
                let cap = 2.0 * (2.0 - lb.t[i]) / dimension as f64;
                if lb.sigma[i] > cap {
                    return Err(Error::InvalidSpec(format!(
                        "lower bound σ_{} = {} exceeds 2(2 − t_i)/N = {cap}",
                        i + 1,
                        lb.sigma[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn growth(&self) -> Option<&GrowthBound> {
        self.growth.as_ref()
    }

    pub fn lower_bound(&self) -> Option<&LowerBound> {
        self.lower_bound.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.family, Family::ZeroCoupling)
    }

    /// Radii where `G` jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match &self.family {
            Family::FamilyR { a, b, .. } => [a.breakpoints(), b.breakpoints()].concat(),
            Family::FamilyRPrime { a, .. } => a.breakpoints().to_vec(),
            _ => Vec::new(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Remarks about the instance that do not make it invalid.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        let terms = match &self.family {
            Family::FamilyR { terms, .. } | Family::FamilyRPrime { terms, .. } => terms.as_slice(),
            _ => &[],
        };
        for (j, t) in terms.iter().enumerate() {
            if t.iter().any(|&l| l <= 1.0) {
                notes.push(format!(
                    "term {}: exponents {:?} are not all > 1 (accepted: only ℓ > 0 is enforced)",
                    j + 1,
                    t
                ));
            }
        }
        notes
    }

    pub fn coefficients_at(&self, r: f64) -> RadialCoefficients {
        match &self.family {
            Family::FamilyR { a, b, .. } => RadialCoefficients {
                a: a.value(r),
                b: b.value(r),
            },
            Family::FamilyRPrime { a, b, .. } => RadialCoefficients { a: a.value(r), b: *b },
            _ => RadialCoefficients::default(),
        }
    }

    /// Cell-averaged coefficients for every cell of `grid`.
    pub fn cell_coefficients(&self, grid: &RadialGrid) -> Vec<RadialCoefficients> {
        match &self.family {
            Family::FamilyR { a, b, .. } => a
                .cell_averages(grid)
                .into_iter()
                .zip(b.cell_averages(grid))
                .map(|(a, b)| RadialCoefficients { a, b })
                .collect(),
            Family::FamilyRPrime { a, b, .. } => a
                .cell_averages(grid)
                .into_iter()
                .map(|a| RadialCoefficients { a, b: *b })
                .collect(),
            _ => vec![RadialCoefficients::default(); grid.len()],
        }
    }

    /// `G` for nonnegative `s` and given radial coefficients.
    pub fn value_with(&self, c: RadialCoefficients, s: &[f64]) -> f64 {
        match &self.family {
            Family::PowerCoupling { exponent: p, beta } => {
                let mut acc = s.iter().map(|v| v.powf(2.0 * p)).sum::<f64>() / (2.0 * p);
                if *beta != 0.0 {
                    for i in 0..s.len() {
                        for j in i + 1..s.len() {
                            acc += beta / p * s[i].powf(*p) * s[j].powf(*p);
                        }
                    }
                }
                acc
            }
            Family::FamilyR { terms, .. } => {
                let sq: f64 = s.iter().map(|v| v * v).sum();
                c.b * sq + c.a * product_terms(terms, s)
            }
            Family::FamilyRPrime { sigma, terms, .. } => {
                let norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
                c.b * norm.powf(sigma + 2.0) + c.a * product_terms(terms, s)
            }
            Family::ZeroCoupling => 0.0,
        }
    }

    /// `∂G/∂s_i` for nonnegative `s`.
    pub fn partial_with(&self, c: RadialCoefficients, i: usize, s: &[f64]) -> f64 {
        match &self.family {
            Family::PowerCoupling { exponent: p, beta } => {
                let mut acc = s[i].powf(2.0 * p - 1.0);
                if *beta != 0.0 {
                    let others: f64 = (0..s.len()).filter(|&j| j != i).map(|j| s[j].powf(*p)).sum();
                    if others != 0.0 {
                        acc += beta * s[i].powf(p - 1.0) * others;
                    }
                }
                acc
            }
            Family::FamilyR { terms, .. } => 2.0 * c.b * s[i] + c.a * product_partial(terms, i, s),
            Family::FamilyRPrime { sigma, terms, .. } => {
                let sq: f64 = s.iter().map(|v| v * v).sum();
                let radial = if sq > 0.0 {
                    c.b * (sigma + 2.0) * sq.powf(sigma / 2.0) * s[i]
                } else {
                    0.0
                };
                radial + c.a * product_partial(terms, i, s)
            }
            Family::ZeroCoupling => 0.0,
        }
    }

    /// `g_i` as a function of the squared amplitudes `q = s²`. May be `+∞` at
    /// `q_i = 0` for exponents below the smooth range.
    pub fn g_with(&self, c: RadialCoefficients, i: usize, q: &[f64]) -> f64 {
        match &self.family {
            Family::PowerCoupling { exponent: p, beta } => {
                let mut acc = q[i].powf(p - 1.0);
                if *beta != 0.0 {
                    let others: f64 =
                        (0..q.len()).filter(|&j| j != i).map(|j| q[j].powf(p / 2.0)).sum();
                    if others != 0.0 {
                        acc += beta * q[i].powf((p - 2.0) / 2.0) * others;
                    }
                }
                acc
            }
            Family::FamilyR { terms, .. } => 2.0 * c.b + c.a * product_g(terms, i, q),
            Family::FamilyRPrime { sigma, terms, .. } => {
                let sq: f64 = q.iter().sum();
                c.b * (sigma + 2.0) * sq.powf(sigma / 2.0) + c.a * product_g(terms, i, q)
            }
            Family::ZeroCoupling => 0.0,
        }
    }

    fn check_point(&self, r: f64, s: &[f64]) -> Result<()> {
        if s.len() != self.components {
            return Err(Error::LengthMismatch {
                expected: self.components,
                actual: s.len(),
            });
        }
        if !r.is_finite() || s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("G evaluated at r = {r}, s = {s:?}")));
        }
        if r <= 0.0 {
            return Err(Error::Precondition(format!("radius must be > 0, got {r}")));
        }
        Ok(())
    }

    /// `G(r, s)`. Signed amplitudes are replaced by their absolute values.
    #[allow(non_snake_case)]
    pub fn eval_G(&self, r: f64, s: &[f64]) -> Result<f64> {
        self.check_point(r, s)?;
        let s: Vec<f64> = s.iter().map(|v| v.abs()).collect();
        Ok(self.value_with(self.coefficients_at(r), &s))
    }

    /// `g_i(r, s_1², …, s_m²)` with zero-based `i`.
    pub fn eval_g(&self, i: usize, r: f64, s_squared: &[f64]) -> Result<f64> {
        if i >= self.components {
            return Err(Error::InvalidSpec(format!(
                "component index {i} out of range for m = {}",
                self.components
            )));
        }
        self.check_point(r, s_squared)?;
        if s_squared.iter().any(|&q| q < 0.0) {
            return Err(Error::Precondition("squared amplitudes must be ≥ 0".into()));
        }
        Ok(self.g_with(self.coefficients_at(r), i, s_squared))
    }

    /// `G(r, s) − G(r, 0)` rebuilt from the `g_i` alone by integrating one
    /// coordinate at a time in the given order.
    pub fn build_from_g(&self, r: f64, s: &[f64], order: &[usize]) -> Result<f64> {
        self.check_point(r, s)?;
        let c = self.coefficients_at(r);
        build_from_g(self.components, |i, q| self.g_with(c, i, q), s, order)
    }

    /// `∫ G(|x|, |u_1|, …, |u_m|)` with precomputed cell coefficients.
    pub fn integrate_coupling(
        &self,
        grid: &RadialGrid,
        coefficients: &[RadialCoefficients],
        field: &FieldVector,
    ) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut s = vec![0.0; field.m()];
        let mut acc = 0.0;
        for (j, (&mu, &c)) in grid.measures().iter().zip(coefficients).enumerate() {
            field.at_into(j, &mut s);
            s.iter_mut().for_each(|v| *v = v.abs());
            acc += mu * self.value_with(c, &s);
        }
        acc
    }
}

fn product_terms(terms: &[Vec<f64>], s: &[f64]) -> f64 {
    terms
        .iter()
        .map(|t| t.iter().zip(s).map(|(l, v)| v.powf(l + 1.0)).product::<f64>())
        .sum()
}

fn product_partial(terms: &[Vec<f64>], i: usize, s: &[f64]) -> f64 {
    terms
        .iter()
        .map(|t| {
            let rest: f64 = (0..s.len())
                .filter(|&k| k != i)
                .map(|k| s[k].powf(t[k] + 1.0))
                .product();
            if rest == 0.0 {
                0.0
            } else {
                (t[i] + 1.0) * s[i].powf(t[i]) * rest
            }
        })
        .sum()
}

fn product_g(terms: &[Vec<f64>], i: usize, q: &[f64]) -> f64 {
    terms
        .iter()
        .map(|t| {
            let rest: f64 = (0..q.len())
                .filter(|&k| k != i)
                .map(|k| q[k].powf((t[k] + 1.0) / 2.0))
                .product();
            if rest == 0.0 {
                0.0
            } else {
                (t[i] + 1.0) * q[i].powf((t[i] - 1.0) / 2.0) * rest
            }
        })
        .sum()
}

/// Rebuilds `G(s) − G(0)` from `g(i, q)` (with `q` the squared amplitudes) along
/// the coordinate path `0 → s_{o_1} e_{o_1} → … → s`.
///
/// Each leg is `½∫_0^{s_k²} g_k dt`, evaluated as `∫_0^{|s_k|} g_k(τ²)·τ dτ`.
pub fn build_from_g<F>(m: usize, g: F, s: &[f64], order: &[usize]) -> Result<f64>
where
    F: Fn(usize, &[f64]) -> f64,
{
    if s.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: s.len(),
        });
    }
    let mut seen = vec![false; m];
    if order.len() != m || order.iter().any(|&k| k >= m || std::mem::replace(&mut seen[k], true)) {
        return Err(Error::Precondition(format!(
            "integration order must be a permutation of 0..{m}"
        )));
    }
    let mut q = vec![0.0; m];
    let mut total = 0.0;
    for &k in order {
        let end = s[k].abs();
        let leg = quadrature::integrate(
            |tau| {
                let mut qq = q.clone();
                qq[k] = tau * tau;
                let v = g(k, &qq);
                if tau == 0.0 {
                    0.0
                } else {
                    v * tau
                }
            },
            0.0,
            end,
            1e-15,
            1e-12,
        )?;
        total += leg;
        q[k] = end * end;
    }
    Ok(total)
}
