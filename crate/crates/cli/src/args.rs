//! Command-line grammar and value parsers.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "resolab", version, about = "Resonances and decay in finite-rank Friedrichs models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Multiply every numerical tolerance by this factor.
    #[arg(long, global = true, env = "RESOLAB_TOL_SCALE", value_parser = positive)]
    pub tol_scale: Option<f64>,

    /// Directory for report files (and `error.json` on failure).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// `builtin:<name>` or a path to a model file.
    #[arg(long)]
    pub model: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model's invariants.
    Validate(ModelArg),
    /// Scattering matrix samples, poles and the unitarity sweep.
    Smatrix {
        #[command(flatten)]
        model: ModelArg,
        /// `a,b,n`: sample S at n points of [a, b].
        #[arg(long, default_value = "-50,50,1000", value_parser = lambda_grid, allow_hyphen_values = true)]
        lambda: (f64, f64, usize),
    },
    /// Resonances in a rectangle of the lower half-plane, with the winding-number audit.
    Poles {
        #[command(flatten)]
        model: ModelArg,
        /// `x0,x1,y0,y1`.
        #[arg(long, default_value = "-5,5,-5,-0.001", value_parser = region, allow_hyphen_values = true)]
        region: [f64; 4],
    },
    /// Kernel comparison at every lower pole of S coming from a Livšic zero.
    Lemma(ModelArg),
    /// Full-line and half-line survival of a Breit-Wigner or user state.
    Decay {
        #[command(flatten)]
        state: StateArgs,
        /// `a:b:n` (linear) or `log:a:b:n`.
        #[arg(long, default_value = "0:20:201", value_parser = t_grid)]
        t_grid: TGrid,
    },
    /// Tail analysis of the half-line survival probability.
    Nogo {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "log:1000:10000:41", value_parser = t_grid)]
        t_grid: TGrid,
    },
    /// Hypotheses, eigenvectors and resolvent constructions on the characteristic semigroup.
    Theorem2 {
        #[command(flatten)]
        model: ModelArg,
        /// Test ζ as an eigenvalue.
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        check_eigen: Option<Complex64>,
        /// Comma-separated k₀ for --check-eigen; default is a null vector found by the solver.
        #[arg(long, value_parser = complex_list, allow_hyphen_values = true, requires = "check_eigen")]
        k0: Option<ComplexList>,
        /// Build the resolvent at ζ applied to the sum of the found eigenvectors.
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        resolvent: Option<Complex64>,
        /// Basis levels n < N in the orthogonality checks.
        #[arg(long, default_value_t = 30)]
        n_max: usize,
        /// Rectangle searched for resonances.
        #[arg(long, default_value = "-5,5,-5,-0.001", value_parser = region, allow_hyphen_values = true)]
        region: [f64; 4],
    },
    /// Write a builtin model file.
    Example {
        /// paper-1d, oneD-gamma, twoK-oneE or conjugate-pair.
        name: String,
    },
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Resonance energy c in ζ = c − iα.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c: f64,
    /// Width α > 0.
    #[arg(long, default_value_t = 0.05, value_parser = positive)]
    pub alpha: f64,
    /// Rational amplitude file `{"num": [[re, im], ...], "den": [[re, im], ...]}`, replaces the Breit-Wigner state.
    #[arg(long)]
    pub phi_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TGrid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub log: bool,
}

impl TGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.log {
            return resolab::decay::log_grid(self.a, self.b, self.n);
        }
        (0..self.n)
            .map(|k| self.a + (self.b - self.a) * k as f64 / (self.n - 1).max(1) as f64)
            .collect()
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {v}"))
    }
}

fn numbers(s: &str, sep: char, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != n {
        return Err(format!("expected {n} values separated by `{sep}`, got `{s}`"));
    }
    parts.into_iter().map(number).collect()
}

pub fn region(s: &str) -> Result<[f64; 4], String> {
    let v = numbers(s, ',', 4)?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err(format!("region `{s}` must satisfy x0 < x1 and y0 < y1"));
    }
    Ok([v[0], v[1], v[2], v[3]])
}

fn lambda_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected a,b,n, got `{s}`"));
    }
    let (a, b) = (number(parts[0])?, number(parts[1])?);
    let n: usize = parts[2].trim().parse().map_err(|_| format!("`{}` is not a count", parts[2]))?;
    if !(a < b) || n < 2 {
        return Err(format!("need a < b and n ≥ 2, got `{s}`"));
    }
    Ok((a, b, n))
}

pub fn t_grid(s: &str) -> Result<TGrid, String> {
    let (log, rest) = match s.strip_prefix("log:") {
        Some(r) => (true, r),
        None => (false, s),
    };
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:n or log:a:b:n, got `{s}`"));
    }
    let (a, b) = (number(parts[0])?, number(parts[1])?);
    let n: usize = parts[2].trim().parse().map_err(|_| format!("`{}` is not a count", parts[2]))?;
    if n < 2 || !(a < b) || a < 0.0 || (log && a <= 0.0) {
        return Err(format!("need 0 ≤ a < b (a > 0 on a log grid) and n ≥ 2, got `{s}`"));
    }
    Ok(TGrid { a, b, n, log })
}

/// Parses `1.5`, `-i`, `2i`, `0.3-0.7i`, `1e-3+2e-1i`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("`{s}` is not a complex number");
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return number(&t).map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (number(&body[..k]).map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => number(other).map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexList(pub Vec<Complex64>);

fn complex_list(s: &str) -> Result<ComplexList, String> {
    s.split(',').map(complex).collect::<Result<_, _>>().map(ComplexList)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = Complex64::new;
        assert_eq!(complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(complex("2.5").unwrap(), c(2.5, 0.0));
        assert_eq!(complex("-2i").unwrap(), c(0.0, -2.0));
        assert_eq!(complex("0.3-0.7i").unwrap(), c(0.3, -0.7));
        assert_eq!(complex("1e-3+2e-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(complex("-1 - i").unwrap(), c(-1.0, -1.0));
        assert!(complex("x").is_err());
        assert!(complex("1+xi").is_err());
    }

    #[test]
    fn grids_and_regions() {
        assert_eq!(region("-2,2,-2,0").unwrap(), [-2.0, 2.0, -2.0, 0.0]);
        assert!(region("2,-2,-2,0").is_err());
        assert!(region("1,2,3").is_err());
        let g = t_grid("log:1000:10000:3").unwrap();
        assert!(g.log);
        let p = g.points();
        assert!((p[1] - 10f64.powf(3.5)).abs() < 1e-9);
        assert_eq!(t_grid("0:1:3").unwrap().points(), vec![0.0, 0.5, 1.0]);
        assert!(t_grid("log:0:1:3").is_err());
        assert!(t_grid("1:0:3").is_err());
    }

    #[test]
    fn grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
