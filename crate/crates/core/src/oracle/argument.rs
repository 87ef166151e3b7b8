//! Zero counting by the argument principle on rectangles.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const MIN_CLEARANCE: f64 = 1e-6;
const MAX_DEPTH: u32 = 40;

/// Positively oriented rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contour {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub points_per_side: usize,
}

impl Contour {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::InvalidArgument(format!("empty rectangle [{x0},{x1}]x[{y0},{y1}]")));
        }
        Ok(Contour { x0, x1, y0, y1, points_per_side: 256 })
    }

    /// Same centre, sides scaled by `1 + frac`.
    pub fn inflate(&self, frac: f64) -> Self {
        let (cx, cy) = (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1));
        let (hx, hy) = (0.5 * (self.x1 - self.x0) * (1.0 + frac), 0.5 * (self.y1 - self.y0) * (1.0 + frac));
        Contour { x0: cx - hx, x1: cx + hx, y0: cy - hy, y1: cy + hy, ..*self }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.x0 && z.re < self.x1 && z.im > self.y0 && z.im < self.y1
    }

    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x0, self.y0),
            Complex64::new(self.x1, self.y0),
            Complex64::new(self.x1, self.y1),
            Complex64::new(self.x0, self.y1),
        ]
    }

    /// Smallest distance from `z` to the boundary.
    pub fn distance(&self, z: Complex64) -> f64 {
        let c = self.corners();
        (0..4)
            .map(|k| segment_distance(z, c[k], c[(k + 1) % 4]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Winding number of `f` along the contour: zeros minus poles inside.
pub fn argument_principle_count(f: impl Fn(Complex64) -> Complex64, contour: &Contour) -> Result<i64> {
    let c = contour.corners();
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        let n = contour.points_per_side.max(4);
        let mut prev_z = a;
        let mut prev_f = checked(&f, a)?;
        for j in 1..=n {
            let z = a + (b - a) * (j as f64 / n as f64);
            let fz = checked(&f, z)?;
            total += phase_change(&f, prev_z, prev_f, z, fz, 0)?;
            prev_z = z;
            prev_f = fz;
        }
    }
    let w = total / TAU;
    let r = w.round();
    if (w - r).abs() > 0.01 {
        return Err(Error::ContourTooClose(format!("winding {w} is not near an integer")));
    }
    Ok(r as i64)
}

fn checked(f: &impl Fn(Complex64) -> Complex64, z: Complex64) -> Result<Complex64> {
    let v = f(z);
    if !v.is_finite() || v.norm() == 0.0 {
        return Err(Error::ContourTooClose(format!("f({z}) = {v}")));
    }
    Ok(v)
}

/// Phase increment from `za` to `zb`, bisecting until each step is below π/4.
fn phase_change(
    f: &impl Fn(Complex64) -> Complex64,
    za: Complex64,
    fa: Complex64,
    zb: Complex64,
    fb: Complex64,
    depth: u32,
) -> Result<f64> {
    let step = (fb / fa).arg();
    if step.abs() < std::f64::consts::FRAC_PI_4 {
        return Ok(step);
    }
    if depth >= MAX_DEPTH || (zb - za).norm() < MIN_CLEARANCE {
        return Err(Error::ContourTooClose(format!("phase jumps between {za} and {zb}")));
    }
    let zm = 0.5 * (za + zb);
    let fm = checked(f, zm)?;
    Ok(phase_change(f, za, fa, zm, fm, depth + 1)? + phase_change(f, zm, fm, zb, fb, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_reciprocal() {
        let sq = Contour::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(argument_principle_count(|z| z, &sq).unwrap(), 1);
        assert_eq!(argument_principle_count(|z| 1.0 / z, &sq).unwrap(), -1);
        assert_eq!(argument_principle_count(|z| z * z * z - 0.125, &sq).unwrap(), 3);
    }

    #[test]
    fn zero_on_the_contour_is_refused() {
        let sq = Contour::new(0.0, 1.0, -1.0, 1.0).unwrap();
        assert!(matches!(argument_principle_count(|z| z, &sq), Err(Error::ContourTooClose(_))));
    }

    #[test]
    fn distance_to_boundary() {
        let sq = Contour::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert!((sq.distance(Complex64::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((sq.distance(Complex64::new(2.0, 0.0)) - 1.0).abs() < 1e-15);
    }
}
