use std::path::PathBuf;

use clap::{Args, Subcommand};
use hypertuple_core::numkit::{Field, Tolerance};
use hypertuple_core::semigroup::Scheme;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 42;

/// Everything a run depends on. Reports echo it verbatim, and
/// `hypertuple run` accepts it back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub command: Command,
    /// Required in config files; the command line falls back to
    /// [`DEFAULT_SEED`].
    pub seed: u64,
    pub tolerance: Tolerance,
    #[serde(default)]
    pub json_out: Option<PathBuf>,
    #[serde(default)]
    pub csv_out: Option<PathBuf>,
    #[serde(default)]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Close a tuple's algebra and report characters, cyclicity and commutant.
    Analyze {
        /// TupleSpec JSON (or a report whose result is one).
        tuple: PathBuf,
    },
    /// Build a minimal hypercyclic tuple.
    Construct {
        #[arg(long)]
        field: Field,
        #[arg(long)]
        dim: usize,
        /// Gallery algebra; defaults to the diagonal (C) or rotation-sum (R) family.
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long, default_value = "sqrt-primes")]
        scheme: Scheme,
    },
    /// Smallest hypercyclic tuple size on K^n.
    MinSize {
        #[arg(long)]
        field: Field,
        #[arg(long)]
        dim: usize,
    },
    /// Named algebras with known character counts.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Enumerate an orbit and measure grid coverage of a box.
    Orbit {
        #[arg(long)]
        tuple: PathBuf,
        #[command(flatten)]
        orbit: OrbitArgs,
        /// Write one row per orbit point.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Commuting check, algebra closure, predicted size and coverage verdict.
    Verify {
        #[arg(long)]
        tuple: PathBuf,
        /// Remove this operator first.
        #[arg(long)]
        drop: Option<usize>,
        #[command(flatten)]
        orbit: OrbitArgs,
    },
    /// Nonnegative integers with m[l] - m0*alpha[l] close to a target.
    Kronecker {
        /// `sqrt-primes:<d>`, `log-primes:<d>` or `user:<a1>,<a2>,…`.
        #[arg(long)]
        alpha: String,
        /// Comma-separated target.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        m0_max: u64,
    },
    /// Exponential, logarithm, kernel generators or sign group in a tuple's algebra.
    Expmap {
        #[arg(long)]
        alg: PathBuf,
        #[arg(long, value_enum)]
        op: ExpOp,
        /// Matrix JSON; required for exp and log.
        #[arg(long)]
        element: Option<PathBuf>,
        /// Branch-cut angle for log; automatic when absent.
        #[arg(long, allow_hyphen_values = true)]
        cut: Option<f64>,
    },
    /// Reproduce the named examples: A_z tuples, the half-plane triple, minimal sizes.
    PaperSuite,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GalleryAction {
    List,
    Show {
        name: String,
        #[arg(long)]
        field: Option<Field>,
        /// Ambient dimension (diag, jordan2_diag).
        #[arg(long)]
        dim: Option<usize>,
        /// Number of rotation blocks (rotation_sum, rotation_sum_odd).
        #[arg(long)]
        m: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpOp {
    Exp,
    Log,
    Ker,
    Signs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitArgs {
    /// Vector JSON: `[[re,im],…]` or `[x1,…]`. Defaults to the tuple's cyclic vector.
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub max_degree: u32,
    #[arg(long)]
    pub max_points: Option<u64>,
    /// `lo,hi` for a cube or `lo1,hi1,lo2,hi2,…` per real axis.
    #[arg(long = "box", default_value = "-2,2", allow_hyphen_values = true)]
    pub region: String,
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
    /// Comma-separated degrees; defaults to four doublings ending at max-degree.
    #[arg(long)]
    pub checkpoints: Option<String>,
}

/// `--tol name=value,…` over the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ToleranceOverrides {
    pub eq_tol: Option<f64>,
    pub rank_tol: Option<f64>,
    pub cluster_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut t: Tolerance) -> Tolerance {
        if let Some(v) = self.eq_tol {
            t.eq_tol = v;
        }
        if let Some(v) = self.rank_tol {
            t.rank_tol = v;
        }
        if let Some(v) = self.cluster_tol {
            t.cluster_tol = v;
        }
        t
    }
}

impl std::str::FromStr for ToleranceOverrides {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = ToleranceOverrides::default();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, got `{part}`"))?;
            let v: f64 = value.trim().parse().map_err(|e| format!("{key}: {e}"))?;
            match key.trim() {
                "eq_tol" => out.eq_tol = Some(v),
                "rank_tol" => out.rank_tol = Some(v),
                "cluster_tol" => out.cluster_tol = Some(v),
                other => return Err(format!("unknown tolerance `{other}`")),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides_parse() {
        let o: ToleranceOverrides = "rank_tol=1e-9, cluster_tol=2e-6".parse().unwrap();
        let t = o.apply(Tolerance::default());
        assert_eq!((t.eq_tol, t.rank_tol, t.cluster_tol), (1e-9, 1e-9, 2e-6));
        assert!("rank_tol".parse::<ToleranceOverrides>().is_err());
        assert!("speed=1".parse::<ToleranceOverrides>().is_err());
    }

    #[test]
    fn config_requires_seed() {
        let ok = r#"{"schema_version":1,"command":{"min-size":{"field":"C","dim":2}},"seed":1,
            "tolerance":{"eq_tol":1e-9,"rank_tol":1e-8,"cluster_tol":1e-6}}"#;
        let c: ExperimentConfig = serde_json::from_str(ok).unwrap();
        assert_eq!(c.command, Command::MinSize { field: Field::Complex, dim: 2 });
        let missing = ok.replace(r#""seed":1,"#, "");
        assert!(serde_json::from_str::<ExperimentConfig>(&missing).is_err());
    }
}
