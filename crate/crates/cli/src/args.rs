use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Reproducible batch runs over the Gentile-statistics toolkit.
#[derive(Debug, Parser)]
#[command(name = "gentile", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Maximum occupation number, or an inclusive range `A..B`.
    #[arg(long = "n", global = true, value_parser = parse_n_range)]
    pub n: Option<NRange>,
    /// Tolerance override for the subcommand's contract.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format.
    #[arg(long = "out", visible_alias = "format", global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl NRange {
    pub fn values(self) -> Vec<usize> {
        (self.lo..=self.hi).collect()
    }

    pub fn is_single(self) -> bool {
        self.lo == self.hi
    }
}

pub const DEFAULT_N: NRange = NRange { lo: 1, hi: 24 };

pub fn parse_n_range(s: &str) -> Result<NRange, String> {
    let parse = |t: &str| -> Result<usize, String> {
        let v: usize = t.trim().parse().map_err(|_| format!("`{t}` is not a non-negative integer"))?;
        if v == 0 {
            return Err("n must be at least 1".into());
        }
        Ok(v)
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(NRange { lo, hi })
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity catalog symbolically and numerically and cross-check the verdicts.
    Audit(AuditArgs),
    /// Oscillator spectrum by case formula, diagonal and eigensolver.
    Spectrum(SpectrumArgs),
    /// Coherent-state coefficients and checks.
    Coherent(CoherentArgs),
    /// Angular-momentum representation from one set of ladder operators.
    Su2(Su2Args),
    /// Normal-order an expression and evaluate it in the representation.
    Eval(EvalArgs),
    /// Reconstruct N from the arcsin of the argument matrix, state by state.
    ArcsinAudit,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Catalog file; the built-in catalog when absent.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Print the catalog text and exit.
    #[arg(long)]
    pub dump_catalog: bool,
    /// Random matrix draws per free identity and n.
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Coefficient of a†b as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<(f64, f64)>,
    /// Coefficient of b a† as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct CoherentArgs {
    /// plus, minus, alternating, or custom (with --lambda-values).
    #[arg(long, default_value = "plus")]
    pub lambda: String,
    /// Custom λ(0..n) as `re,im;re,im;…`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_values: Option<String>,
}

#[derive(Debug, Args)]
pub struct Su2Args {
    /// num, adagb, bdaga, adaga or aadag.
    #[arg(long = "A", default_value = "num")]
    pub a: String,
    /// Second diagonal operator for the two-branch construction.
    #[arg(long = "B")]
    pub b: Option<String>,
    /// Share of each ladder element carried by the A branch.
    #[arg(long)]
    pub weight: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Expression, or an equation `lhs == rhs`.
    pub expression: String,
}

pub fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').unwrap_or((s, "0"));
    let re = a.trim().parse::<f64>().map_err(|e| format!("`{a}`: {e}"))?;
    let im = b.trim().parse::<f64>().map_err(|e| format!("`{b}`: {e}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err("coefficients must be finite".into());
    }
    Ok((re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_range("5"), Ok(NRange { lo: 5, hi: 5 }));
        assert_eq!(parse_n_range("1..8"), Ok(NRange { lo: 1, hi: 8 }));
        assert_eq!(parse_n_range("2..=4"), Ok(NRange { lo: 2, hi: 4 }));
        assert!(parse_n_range("0").is_err());
        assert!(parse_n_range("4..2").is_err());
        assert!(parse_n_range("x").is_err());
    }

    #[test]
    fn complex_values() {
        assert_eq!(parse_complex("1,-0.5"), Ok((1.0, -0.5)));
        assert_eq!(parse_complex("2"), Ok((2.0, 0.0)));
        assert!(parse_complex("a,b").is_err());
    }
}
