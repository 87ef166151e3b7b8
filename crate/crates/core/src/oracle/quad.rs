//! Adaptive Gauss-Kronrod (7/15) quadrature for complex integrands.

use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

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
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol { abs: 1e-11, rel: 1e-11 }
    }
}

/// Where the integrand lives on the line; the tan map is centred and scaled by it.
#[derive(Debug, Clone, Copy)]
pub struct DecayHint {
    pub center: f64,
    pub scale: f64,
}

impl Default for DecayHint {
    fn default() -> Self {
        DecayHint { center: 0.0, scale: 1.0 }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn kronrod(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let s = f(c - h * x) + f(c + h * x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let value = k * h;
    let error = ((k - g) * h).norm();
    Piece { a, b, value, error }
}

/// `∫_a^b f`, adaptive bisection of the worst interval.
pub fn quad_interval(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: QuadTol) -> Result<QuadResult> {
    let n0 = 8;
    let mut heap = BinaryHeap::new();
    for i in 0..n0 {
        let x0 = a + (b - a) * i as f64 / n0 as f64;
        let x1 = a + (b - a) * (i + 1) as f64 / n0 as f64;
        heap.push(kronrod(&f, x0, x1));
    }
    loop {
        let value: Complex64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature { estimate: value, error: f64::INFINITY });
        }
        if error <= tol.abs.max(tol.rel * value.norm()) {
            return Ok(QuadResult { value, error });
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { estimate: value, error });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// `∫_ℝ f` via `λ = center + scale·tan θ`.
pub fn quad_real_line(f: impl Fn(f64) -> Complex64, hint: DecayHint, tol: QuadTol) -> Result<QuadResult> {
    let g = |th: f64| {
        let c = th.cos();
        f(hint.center + hint.scale * th.tan()) * (hint.scale / (c * c))
    };
    quad_interval(g, -FRAC_PI_2, FRAC_PI_2, tol)
}

/// `∫_0^∞ f` via `λ = scale·tan θ`.
pub fn quad_half_line(f: impl Fn(f64) -> Complex64, scale: f64, tol: QuadTol) -> Result<QuadResult> {
    let g = |th: f64| {
        let c = th.cos();
        f(scale * th.tan()) * (scale / (c * c))
    };
    quad_interval(g, 0.0, FRAC_PI_2, tol)
}
