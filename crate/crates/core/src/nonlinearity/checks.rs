//! Sampling checks for supermodularity and the structural hypotheses on `G`.
//!
//! Every check is deterministic for a given seed. Sampled points mix random
//! draws with adversarial ones: axes, equal components, tiny and huge amplitudes,
//! radii straddling coefficient breakpoints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Family, NonlinearitySpec};

/// Relative slack below which a sampled inequality counts as violated.
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub description: String,
    pub radii: Vec<f64>,
    pub point: Vec<f64>,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupermodularReport {
    pub holds: bool,
    pub samples: usize,
    /// Most negative slack seen (raw, not normalized); the smallest slack when none is negative.
    pub worst_violation: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub holds_on_samples: bool,
    pub samples: usize,
    pub worst_slack: f64,
    pub witness: Option<Witness>,
    pub skipped: bool,
    pub note: Option<String>,
}

impl HypothesisCheck {
    fn skipped(note: impl Into<String>) -> Self {
        Self {
            holds_on_samples: true,
            samples: 0,
            worst_slack: 0.0,
            witness: None,
            skipped: true,
            note: Some(note.into()),
        }
    }

    fn failed(note: impl Into<String>) -> Self {
        Self {
            holds_on_samples: false,
            samples: 0,
            worst_slack: 0.0,
            witness: None,
            skipped: false,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub g0: HypothesisCheck,
    pub g1: HypothesisCheck,
    pub g2: HypothesisCheck,
    pub g3: HypothesisCheck,
    /// Scaling `G(t·s) ≥ t²G(s)` with a common factor `t ≥ 1`.
    pub g4: HypothesisCheck,
    /// The componentwise variant with independent `t_i` and `t_max²`. Informational:
    /// it fails for most couplings with mixed terms and does not enter `all_hold`.
    pub g4_componentwise: HypothesisCheck,
    pub g5: HypothesisCheck,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        [&self.g0, &self.g1, &self.g2, &self.g3, &self.g4, &self.g5]
            .iter()
            .all(|c| c.holds_on_samples)
    }
}

/// Tracks the sample with the most negative relative slack.
struct Tally {
    samples: usize,
    worst_rel: f64,
    worst_raw: f64,
    witness: Option<Witness>,
}

impl Tally {
    fn new() -> Self {
        Self {
            samples: 0,
            worst_rel: f64::INFINITY,
            worst_raw: f64::INFINITY,
            witness: None,
        }
    }

    fn record(&mut self, slack: f64, scale: f64, describe: impl FnOnce() -> (String, Vec<f64>, Vec<f64>)) {
        self.samples += 1;
        let rel = if slack.is_nan() {
            f64::NEG_INFINITY
        } else {
            slack / scale.max(f64::MIN_POSITIVE)
        };
        if rel < self.worst_rel {
            self.worst_rel = rel;
            self.worst_raw = slack;
            if rel < -REL_TOL {
                let (description, radii, point) = describe();
                self.witness = Some(Witness {
                    description,
                    radii,
                    point,
                    slack,
                });
            }
        }
    }

    fn holds(&self) -> bool {
        self.worst_rel >= -REL_TOL
    }

    fn worst(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.worst_raw
        }
    }

    fn into_check(self, note: Option<String>) -> HypothesisCheck {
        HypothesisCheck {
            holds_on_samples: self.holds(),
            samples: self.samples,
            worst_slack: self.worst(),
            witness: self.witness,
            skipped: false,
            note,
        }
    }
}

fn magnitude(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..10) {
        0 => 0.0,
        1 => 1e-6 * rng.gen::<f64>(),
        2 => 10f64.powf(rng.gen_range(1.0..3.0)),
        _ => 10f64.powf(rng.gen_range(-3.0..1.0)),
    }
}

fn positive_magnitude(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..8) {
        0 => 10f64.powf(rng.gen_range(-8.0..-3.0)),
        1 => 10f64.powf(rng.gen_range(1.0..2.5)),
        _ => 10f64.powf(rng.gen_range(-3.0..1.0)),
    }
}

fn radius(rng: &mut ChaCha8Rng, breakpoints: &[f64]) -> f64 {
    if !breakpoints.is_empty() && rng.gen_bool(0.25) {
        let b = breakpoints[rng.gen_range(0..breakpoints.len())];
        let offset = 10f64.powf(rng.gen_range(-9.0..-1.0)) * b;
        return if rng.gen_bool(0.5) { b + offset } else { (b - offset).max(1e-12) };
    }
    10f64.powf(rng.gen_range(-3.0..3.0))
}

/// Point in `[0, ∞)^m` drawn from a mix of random and adversarial shapes.
fn point(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    match rng.gen_range(0..6) {
        0 => {
            let mut s = vec![0.0; m];
            s[rng.gen_range(0..m)] = positive_magnitude(rng);
            s
        }
        1 => vec![positive_magnitude(rng); m],
        _ => (0..m).map(|_| magnitude(rng)).collect(),
    }
}

fn with_increment(y: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut out = y.to_vec();
    out[i] += h;
    out
}

/// Samples both supermodularity inequalities for an arbitrary `G(r, s)`:
/// the mixed second difference in `(s_i, s_j)` and the radial cross difference
/// `G(r₀, y + h e_i) + G(r₁, y) ≥ G(r₀, y) + G(r₁, y + h e_i)` for `r₀ < r₁`.
pub fn check_supermodular_fn<G>(
    m: usize,
    g: G,
    breakpoints: &[f64],
    samples: usize,
    seed: u64,
) -> SupermodularReport
where
    G: Fn(f64, &[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new();
    for n in 0..samples.max(1) {
        let y = point(&mut rng, m);
        let i = rng.gen_range(0..m);
        let h = positive_magnitude(&mut rng);
        let cross = m >= 2 && n % 2 == 0;
        if cross {
            let j = (i + rng.gen_range(1..m)) % m;
            let k = positive_magnitude(&mut rng);
            let r = radius(&mut rng, breakpoints);
            let yi = with_increment(&y, i, h);
            let yj = with_increment(&y, j, k);
            let yij = with_increment(&yi, j, k);
            let terms = [g(r, &yij), g(r, &y), g(r, &yi), g(r, &yj)];
            let slack = terms[0] + terms[1] - terms[2] - terms[3];
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>();
            tally.record(slack, scale, || {
                (
                    format!("mixed difference in components {} and {} with h = {h}, k = {k}", i + 1, j + 1),
                    vec![r],
                    y.clone(),
                )
            });
        } else {
            let (mut r0, mut r1) = (radius(&mut rng, breakpoints), radius(&mut rng, breakpoints));
            if r0 > r1 {
                std::mem::swap(&mut r0, &mut r1);
            }
            if r0 == r1 {
                r1 *= 1.5;
            }
            let yi = with_increment(&y, i, h);
            let terms = [g(r0, &yi), g(r1, &y), g(r0, &y), g(r1, &yi)];
            let slack = terms[0] + terms[1] - terms[2] - terms[3];
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>();
            tally.record(slack, scale, || {
                (
                    format!("radial difference in component {} with h = {h}", i + 1),
                    vec![r0, r1],
                    y.clone(),
                )
            });
        }
    }
    let holds = tally.holds();
    SupermodularReport {
        holds,
        samples: tally.samples,
        worst_violation: tally.worst(),
        witness: tally.witness,
    }
}

impl NonlinearitySpec {
    fn g_abs(&self, r: f64, s: &[f64]) -> f64 {
        let s: Vec<f64> = s.iter().map(|v| v.abs()).collect();
        self.value_with(self.coefficients_at(r), &s)
    }

    pub fn check_supermodular(&self, samples: usize, seed: u64) -> SupermodularReport {
        check_supermodular_fn(
            self.components,
            |r, s| self.g_abs(r, s),
            &self.breakpoints(),
            samples,
            seed,
        )
    }

    /// Samples every structural hypothesis for this coupling in dimension `dimension`.
    pub fn check_hypotheses(&self, dimension: usize, samples: usize, seed: u64) -> HypothesisReport {
        let samples = samples.max(1);
        let mut notes = self.notes();
        if let Family::PowerCoupling { exponent, .. } = &self.family {
            let ell = 2.0 * exponent - 2.0;
            let critical = 4.0 / dimension as f64;
            notes.push(format!(
                "power coupling: ℓ = 2p − 2 = {ell}, {} 4/N = {critical}",
                if ell < critical { "below" } else { "not below" }
            ));
        }
        if let Err(e) = self.validate_for_dimension(dimension) {
            notes.push(e.to_string());
        }
        let supermodular = self.check_supermodular(samples, seed ^ 0x2);
        HypothesisReport {
            g0: self.check_g0(samples, seed),
            g1: self.check_g1(dimension, samples, seed ^ 0x1),
            g2: HypothesisCheck {
                holds_on_samples: supermodular.holds,
                samples: supermodular.samples,
                worst_slack: supermodular.worst_violation,
                witness: supermodular.witness,
                skipped: false,
                note: None,
            },
            g3: self.check_g3(samples, seed ^ 0x3),
            g4: self.check_g4(samples, seed ^ 0x4, false),
            g4_componentwise: self.check_g4(samples, seed ^ 0x5, true),
            g5: self.check_g5(dimension, samples, seed ^ 0x6),
            notes,
        }
    }

    fn check_g0(&self, samples: usize, seed: u64) -> HypothesisCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bps = self.breakpoints();
        let mut tally = Tally::new();
        for _ in 0..samples {
            let r = radius(&mut rng, &bps);
            let s = point(&mut rng, self.components);
            let g = self.g_abs(r, &s);
            if !g.is_finite() {
                tally.record(f64::NAN, 1.0, || ("G is not finite".into(), vec![r], s.clone()));
                continue;
            }
            let nearby: Vec<f64> = s.iter().map(|v| v + 1e-9 * (1.0 + v)).collect();
            let jump = (self.g_abs(r, &nearby) - g).abs();
            let scale = 1.0 + g.abs();
            tally.record(1e-6 * scale - jump, scale, || {
                ("G jumps under a 1e-9 relative perturbation of s".into(), vec![r], s.clone())
            });
            let zero = self.g_abs(r, &vec![0.0; self.components]);
            tally.record(-zero.abs(), 1.0, || ("G(r, 0) ≠ 0".into(), vec![r], vec![0.0; self.components]));
        }
        tally.into_check(None)
    }

    fn check_g1(&self, dimension: usize, samples: usize, seed: u64) -> HypothesisCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bps = self.breakpoints();
        let m = self.components;
        let critical = 4.0 / dimension as f64;
        let mut tally = Tally::new();
        let growth = self.growth.clone();
        if let Some(gb) = &growth {
            if let Some((i, l)) = gb.ell.iter().enumerate().find(|(_, l)| **l >= critical) {
                return HypothesisCheck::failed(format!(
                    "declared ℓ_{} = {l} is not below 4/N = {critical}",
                    i + 1
                ));
            }
        }
        for n in 0..samples {
            let r = radius(&mut rng, &bps);
            let s: Vec<f64> = if n % 2 == 0 {
                point(&mut rng, m)
            } else {
                // dilation family: fixed direction, scale from 1e-3 to 1e6
                let lambda = 10f64.powf(rng.gen_range(-3.0..6.0));
                (0..m).map(|_| lambda * rng.gen_range(0.1..1.0)).collect()
            };
            let g = self.g_abs(r, &s);
            tally.record(g, g.abs(), || ("G < 0".into(), vec![r], s.clone()));
            if let Some(gb) = &growth {
                let sq: f64 = s.iter().map(|v| v * v).sum();
                let powers: f64 = s.iter().zip(&gb.ell).map(|(v, l)| v.powf(l + 2.0)).sum();
                let bound = gb.k * (sq + powers);
                tally.record(bound - g, bound.abs() + g.abs(), || {
                    (format!("G exceeds K(|s|² + Σ s_i^(ℓ_i+2)) with K = {}", gb.k), vec![r], s.clone())
                });
            }
            if n % 2 == 1 {
                // subcritical growth: G(λs)/(|λs|² + |λs|^(2+4/N)) must still fall at large λ
                let ratio = |t: f64| {
                    let x: Vec<f64> = s.iter().map(|v| v * t).collect();
                    let sq: f64 = x.iter().map(|v| v * v).sum();
                    self.g_abs(r, &x) / (sq + sq.powf(1.0 + critical / 2.0))
                };
                let (near, far) = (ratio(1e3), ratio(1e6));
                if near > 0.0 {
                    tally.record(near * (1.0 - 1e-9) - far, near, || {
                        (
                            format!("G grows at least like |s|^(2+4/N) = |s|^{} along s ↦ λs", 2.0 + critical),
                            vec![r],
                            s.clone(),
                        )
                    });
                }
            }
        }
        let note = growth
            .is_none()
            .then(|| "no growth constants declared; sampled G ≥ 0 and subcritical growth along dilations".to_string());
        tally.into_check(note)
    }

    fn check_g3(&self, samples: usize, seed: u64) -> HypothesisCheck {
        const EPSILONS: [f64; 4] = [1.0, 0.1, 0.01, 1e-3];
        const R0: [f64; 5] = [1.0, 10.0, 100.0, 1e3, 1e4];
        const S0: [f64; 7] = [1.0, 0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let per = (samples / (EPSILONS.len() * 4)).clamp(16, 4096);
        let m = self.components;
        let mut total = 0;
        let mut worst = f64::INFINITY;
        let mut chosen = Vec::new();
        for (e, &eps) in EPSILONS.iter().enumerate() {
            let mut found = None;
            let mut best_fail: Option<Tally> = None;
            'search: for &r0 in &R0 {
                for &s0 in &S0 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(e as u64));
                    let mut tally = Tally::new();
                    for _ in 0..per {
                        let r = r0 * 10f64.powf(rng.gen_range(0.0..3.0));
                        let s: Vec<f64> = (0..m).map(|_| s0 * rng.gen::<f64>()).collect();
                        let sq: f64 = s.iter().map(|v| v * v).sum();
                        let g = self.g_abs(r, &s);
                        tally.record(eps * sq - g, eps * sq + g, || {
                            (format!("G > ε|s|² with ε = {eps}, R₀ = {r0}, S₀ = {s0}"), vec![r], s.clone())
                        });
                    }
                    total += tally.samples;
                    if tally.holds() {
                        found = Some((r0, s0, tally.worst()));
                        break 'search;
                    }
                    if best_fail.as_ref().is_none_or(|b| tally.worst_rel > b.worst_rel) {
                        best_fail = Some(tally);
                    }
                }
            }
            match found {
                Some((r0, s0, w)) => {
                    worst = worst.min(w);
                    chosen.push(format!("ε = {eps}: R₀ = {r0}, S₀ = {s0}"));
                }
                None => {
                    let fail = best_fail.expect("at least one candidate was tried");
                    return HypothesisCheck {
                        holds_on_samples: false,
                        samples: total,
                        worst_slack: fail.worst(),
                        witness: fail.witness,
                        skipped: false,
                        note: Some(format!("no (R₀, S₀) in the search grid works for ε = {eps}")),
                    };
                }
            }
        }
        HypothesisCheck {
            holds_on_samples: true,
            samples: total,
            worst_slack: worst,
            witness: None,
            skipped: false,
            note: Some(chosen.join("; ")),
        }
    }

    fn check_g4(&self, samples: usize, seed: u64, componentwise: bool) -> HypothesisCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bps = self.breakpoints();
        let m = self.components;
        let mut tally = Tally::new();
        for _ in 0..samples {
            let r = radius(&mut rng, &bps);
            let s = point(&mut rng, m);
            let t: Vec<f64> = if componentwise {
                (0..m)
                    .map(|_| if rng.gen_bool(0.3) { 1.0 } else { 10f64.powf(rng.gen_range(0.0..1.0)) })
                    .collect()
            } else {
                vec![10f64.powf(rng.gen_range(0.0..1.0)); m]
            };
            let t_max = t.iter().copied().fold(1.0, f64::max);
            let ts: Vec<f64> = s.iter().zip(&t).map(|(a, b)| a * b).collect();
            let lhs = self.g_abs(r, &ts);
            let rhs = t_max * t_max * self.g_abs(r, &s);
            tally.record(lhs - rhs, lhs.abs() + rhs.abs(), || {
                (format!("G(t·s) < t_max² G(s) with t = {t:?}"), vec![r], s.clone())
            });
        }
        let note = componentwise.then(|| "informational: independent factors t_i, compared against t_max²".to_string());
        tally.into_check(note)
    }

    fn check_g5(&self, dimension: usize, samples: usize, seed: u64) -> HypothesisCheck {
        let Some(lb) = &self.lower_bound else {
            if self.is_zero() {
                return HypothesisCheck::failed("G vanishes identically, so no positive lower bound exists");
            }
            return HypothesisCheck::skipped("no lower-bound data declared");
        };
        for i in 0..self.components {
            let cap = 2.0 * (2.0 - lb.t[i]) / dimension as f64;
            if lb.sigma[i] > cap {
                return HypothesisCheck::failed(format!(
                    "σ_{} = {} exceeds 2(2 − t_i)/N = {cap}",
                    i + 1,
                    lb.sigma[i]
                ));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.components;
        let mut tally = Tally::new();
        for n in 0..samples {
            let r = lb.r1 * 10f64.powf(rng.gen_range(0.0..3.0)) * (1.0 + 1e-12);
            let s: Vec<f64> = if n % 3 == 0 {
                // one component near the threshold, the others tiny
                let mut s: Vec<f64> = (0..m).map(|_| lb.s1 * 1e-6 * rng.gen_range(0.01..1.0)).collect();
                s[rng.gen_range(0..m)] = lb.s1 * rng.gen_range(0.5..1.0);
                s
            } else {
                (0..m).map(|_| lb.s1 * 10f64.powf(rng.gen_range(-6.0..0.0))).collect()
            };
            let bound: f64 = (0..m)
                .map(|i| lb.a[i] * r.powf(-lb.t[i]) * s[i].powf(lb.sigma[i] + 2.0))
                .sum();
            let g = self.g_abs(r, &s);
            tally.record(g - bound, g.abs() + bound.abs(), || {
                ("G below Σ A_i r^(−t_i) s_i^(σ_i+2)".into(), vec![r], s.clone())
            });
        }
        tally.into_check(None)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{GrowthBound, LowerBound, StepProfile};
    use super::*;

    #[test]
    fn product_is_supermodular() {
        let report = check_supermodular_fn(2, |_, s| s[0] * s[1], &[], 2000, 7);
        assert!(report.holds);
        assert!(report.witness.is_none());
    }

    #[test]
    fn negative_product_rejected_with_witness() {
        let report = check_supermodular_fn(2, |_, s| -s[0] * s[1], &[], 2000, 7);
        assert!(!report.holds);
        let w = report.witness.unwrap();
        assert!(w.slack < 0.0);
        assert!(w.description.contains("mixed difference"));
    }

    #[test]
    fn radially_increasing_coefficient_rejected() {
        let report = check_supermodular_fn(1, |r, s| r.min(2.0) * s[0] * s[0], &[2.0], 2000, 3);
        assert!(!report.holds);
        assert_eq!(report.witness.unwrap().radii.len(), 2);
    }

    #[test]
    fn deterministic() {
        let spec = NonlinearitySpec::power(2, 2.0, 1.0).unwrap();
        let a = spec.check_hypotheses(1, 500, 11);
        let b = spec.check_hypotheses(1, 500, 11);
        assert_eq!(a, b);
    }

    #[test]
    fn power_coupling_passes_in_one_dimension() {
        let spec = NonlinearitySpec::power(2, 2.0, 1.0)
            .unwrap()
            .with_growth(GrowthBound { k: 1.0, ell: vec![2.0, 2.0] })
            .unwrap();
        let report = spec.check_hypotheses(1, 4000, 1);
        for (name, c) in [("g0", &report.g0), ("g1", &report.g1), ("g2", &report.g2), ("g3", &report.g3), ("g4", &report.g4)] {
            assert!(c.holds_on_samples, "{name}: {c:?}");
        }
        // the componentwise scaling variant does not hold for mixed terms
        assert!(!report.g4_componentwise.holds_on_samples);
        assert!(report.g5.skipped);
    }

    #[test]
    fn zero_coupling() {
        let report = NonlinearitySpec::zero(2).check_hypotheses(2, 500, 0);
        for c in [&report.g0, &report.g1, &report.g2, &report.g3, &report.g4] {
            assert!(c.holds_on_samples);
        }
        assert!(!report.g5.holds_on_samples);
        assert!(!report.all_hold());
    }

    #[test]
    fn supercritical_growth_flagged() {
        let spec = NonlinearitySpec::new(
            2,
            Family::FamilyR {
                terms: vec![vec![2.5, 2.5]],
                a: StepProfile::constant(1.0),
                b: StepProfile::constant(0.0),
            },
        )
        .unwrap()
        .with_growth(GrowthBound { k: 1.0, ell: vec![2.0, 2.0] })
        .unwrap();
        let report = spec.check_hypotheses(1, 2000, 5);
        assert!(!report.g1.holds_on_samples);
        assert!(report.g1.witness.is_some());
    }

    #[test]
    fn critical_growth_flagged_without_declared_constants() {
        let spec = |l: f64| {
            NonlinearitySpec::new(
                2,
                Family::FamilyR {
                    terms: vec![vec![l, l]],
                    a: StepProfile::constant(1.0),
                    b: StepProfile::constant(0.0),
                },
            )
            .unwrap()
        };
        // ℓ sum 4 = 4/N in one dimension, and 1.5 below it
        assert!(!spec(2.0).check_hypotheses(1, 2000, 5).g1.holds_on_samples);
        assert!(spec(0.75).check_hypotheses(1, 2000, 5).g1.holds_on_samples);
        let declared = spec(0.75).with_growth(GrowthBound { k: 1.0, ell: vec![4.0, 4.0] }).unwrap();
        assert!(!declared.check_hypotheses(1, 100, 5).g1.holds_on_samples);
    }

    #[test]
    fn lower_bound_checked() {
        let spec = NonlinearitySpec::new(
            1,
            Family::FamilyR {
                terms: vec![vec![1.0]],
                a: StepProfile::constant(1.0),
                b: StepProfile::constant(0.0),
            },
        )
        .unwrap();
        let ok = spec
            .clone()
            .with_lower_bound(LowerBound { r1: 1.0, s1: 1.0, a: vec![1.0], t: vec![0.0], sigma: vec![1.0] })
            .unwrap();
        assert!(ok.check_hypotheses(1, 1000, 0).g5.holds_on_samples);
        let too_strong = spec
            .with_lower_bound(LowerBound { r1: 1.0, s1: 1.0, a: vec![2.0], t: vec![0.0], sigma: vec![1.0] })
            .unwrap();
        assert!(!too_strong.check_hypotheses(1, 1000, 0).g5.holds_on_samples);
    }

    #[test]
    fn decaying_quadratic_part_needed_for_smallness() {
        let spec = NonlinearitySpec::new(
            1,
            Family::FamilyR {
                terms: vec![vec![1.0]],
                a: StepProfile::constant(1.0),
                b: StepProfile::constant(0.5),
            },
        )
        .unwrap();
        assert!(!spec.check_hypotheses(1, 500, 0).g3.holds_on_samples);
    }
}
