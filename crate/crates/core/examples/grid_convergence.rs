//! Convergence of the discrete Hardy projection and characteristic semigroup
//! in the half-width Λ and the point count N.
//!
//! For a Breit-Wigner amplitude φ (an H²₊ element with pole at c − iα) it prints
//!
//! * `alias`: max |f_j − φ(λ_j)| / max |φ| over |λ_j| ≤ Λ/2, the periodization error;
//! * `leak`: ‖Q₋φ‖ / ‖φ‖, which is zero in the continuum;
//! * `defect`: ‖Z(t)φ − e^{−itζ}φ‖ / ‖φ‖ at t = 1, the eigenvector relation.
//!
//! Run with `cargo run --release -p resolab-core --example grid_convergence`.

use num_complex::Complex64;
use resolab::decay::BreitWigner;
use resolab::hardy::{characteristic_semigroup, hardy_project_minus, Grid, GridFunction};

fn measure(bw: &BreitWigner, grid: Grid, t: f64) -> resolab::Result<(f64, f64, f64)> {
    let amp = [bw.amplitude()];
    let f = GridFunction::from_rational(grid, &amp)?;
    let peak = amp[0].eval(Complex64::new(bw.c, 0.0))?.norm();
    let mut alias: f64 = 0.0;
    for (j, v) in f.values()[0].iter().enumerate() {
        let x = grid.point(j);
        if x.abs() <= grid.half_width / 2.0 {
            alias = alias.max((v - amp[0].eval(Complex64::new(x, 0.0))?).norm() / peak);
        }
    }
    let leak = hardy_project_minus(&f).norm() / f.norm();
    let zt = characteristic_semigroup(t, &f)?;
    let want = GridFunction::from_rational_with_phase(grid, zt.theta(), &amp)?
        .scale((-Complex64::i() * t * bw.zeta()).exp());
    Ok((alias, leak, zt.sub(&want)?.norm() / f.norm()))
}

fn main() -> resolab::Result<()> {
    for (c, alpha) in [(1.0, 0.1), (0.0, 1.0)] {
        let bw = BreitWigner::new(c, alpha)?;
        println!("Breit-Wigner c = {c}, alpha = {alpha}, t = 1");
        println!("{:>8} {:>6} {:>10} {:>10} {:>10} {:>10}", "Lambda", "N", "step", "alias", "leak", "defect");
        for half_width in [25.0, 50.0, 100.0, 200.0, 400.0] {
            for log_n in [12, 14, 16, 18] {
                let grid = Grid::new(half_width, 1 << log_n)?;
                let (alias, leak, defect) = measure(&bw, grid, 1.0)?;
                println!(
                    "{half_width:>8} {:>6} {:>10.2e} {alias:>10.2e} {leak:>10.2e} {defect:>10.2e}",
                    format!("2^{log_n}"),
                    grid.step()
                );
            }
        }
        println!();
    }
    Ok(())
}
