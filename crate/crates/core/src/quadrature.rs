//! Adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: usize = 60;

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kr = WGK[7] * fc;
    let mut ga = WG[3] * fc;
    for k in 0..7 {
        let x = h * XGK[k];
        let s = f(c - x) + f(c + x);
        kr += WGK[k] * s;
        if k % 2 == 1 {
            ga += WG[k / 2] * s;
        }
    }
    (kr * h, (kr - ga).abs() * h)
}

fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> (f64, f64) {
    let (value, err) = kronrod(f, a, b);
    if err <= tol || depth == MAX_DEPTH || !value.is_finite() {
        return (value, err);
    }
    let m = 0.5 * (a + b);
    let (l, el) = recurse(f, a, m, 0.5 * tol, depth + 1);
    let (r, er) = recurse(f, m, b, 0.5 * tol, depth + 1);
    (l + r, el + er)
}

/// `∫_a^b f` to absolute tolerance `abs_tol + rel_tol·|∫f|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (rough, _) = kronrod(&f, a, b);
    let tol = abs_tol.max(rel_tol * rough.abs());
    let (value, err) = recurse(&f, a, b, tol, 0);
    let requested = abs_tol.max(rel_tol * value.abs());
    if !value.is_finite() || err > requested {
        return Err(Error::Quadrature {
            achieved: err,
            requested,
        });
    }
    Ok(value)
}
