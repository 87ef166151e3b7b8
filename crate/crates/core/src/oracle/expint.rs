//! Exponential integral `E₁` on the principal branch, scaled by `e^w`.

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^w E₁(w)`, principal branch (cut along the negative real axis).
pub fn scaled_e1(w: Complex64) -> Complex64 {
    if w.re < -4.0 && w.im.abs() <= 1e-12 * w.norm() {
        return scaled_e1_upper_cut(-w.re);
    }
    if w.norm() <= 4.0 {
        w.exp() * e1_series(w)
    } else {
        e1_continued_fraction(w)
    }
}

/// `e^{−x} E₁(−x + i0) = −e^{−x} Ei(x) − iπ e^{−x}` for `x > 0`.
fn scaled_e1_upper_cut(x: f64) -> Complex64 {
    let ei = if x < 40.0 {
        // Ei(x) = γ + ln x + Σ x^k / (k·k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..500 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add <= 1e-17 * sum {
                break;
            }
        }
        (EULER_GAMMA + x.ln() + sum) * (-x).exp()
    } else {
        // e^{−x} Ei(x) ~ (1/x) Σ k!/x^k
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            sum += term;
            let next = term * k as f64 / x;
            if next >= term || next < 1e-17 * sum {
                break;
            }
            term = next;
        }
        sum / x
    };
    Complex64::new(-ei, -std::f64::consts::PI * (-x).exp())
}

fn e1_series(w: Complex64) -> Complex64 {
    // E₁(w) = −γ − ln w − Σ_{k≥1} (−w)^k / (k·k!)
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..200 {
        term *= -w / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - w.ln() - sum
}

/// Modified Lentz on `e^w E₁(w) = 1/(w+1− 1²/(w+3− 2²/(w+5− …)))`.
fn e1_continued_fraction(w: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut b = w + 1.0;
    let mut c = Complex64::new(1.0 / 1e-300, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..20_000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / {
            let x = a * d + b;
            if x.norm() == 0.0 { tiny } else { x }
        };
        c = b + a / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h
}
