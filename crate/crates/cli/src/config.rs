use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hypersteiner::algos::ScanOrder;
use hypersteiner::lp::builders::DEFAULT_BIDIRECTED_CAP;
use hypersteiner::lp::{Caps, LpKind};
use hypersteiner::partition::DEFAULT_PARTITION_CAP;
use hypersteiner::{InstanceClass, Surd};

/// Largest accepted `--max-r`; the partition LP has Bell(|R|) rows.
pub const MAX_R_LIMIT: usize = 10;
/// Largest accepted `--max-v`; the bidirected cut LP has one row per vertex set.
pub const MAX_V_LIMIT: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "hypersteiner", version, about = "Exact Steiner tree relaxations, invariant checks and LP-certified heuristics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build and solve relaxations of one instance.
    Solve(SolveArgs),
    /// Run the invariant suite on an instance file or a corpus directory.
    Verify(VerifyArgs),
    /// Run one heuristic and write its trace as JSON lines.
    Heuristic(HeuristicArgs),
    /// Write a seeded corpus as `<out>/<class>/<seed>.stp`.
    Gen(GenArgs),
    /// Integrality gaps of an instance file or a corpus directory.
    Gap(GapArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CapArgs {
    /// Largest terminal count for the partition LPs.
    #[arg(long = "max-r", default_value_t = DEFAULT_PARTITION_CAP)]
    pub max_r: usize,
    /// Largest vertex count for the bidirected cut LP.
    #[arg(long = "max-v", default_value_t = DEFAULT_BIDIRECTED_CAP)]
    pub max_v: usize,
}

impl CapArgs {
    pub fn caps(&self) -> Result<Caps> {
        if self.max_r > MAX_R_LIMIT {
            bail!(usage(format!("--max-r {} exceeds the limit {MAX_R_LIMIT}", self.max_r)));
        }
        if self.max_v > MAX_V_LIMIT {
            bail!(usage(format!("--max-v {} exceeds the limit {MAX_V_LIMIT}", self.max_v)));
        }
        Ok(Caps { partitions: self.max_r, bidirected: self.max_v })
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Instance file.
    pub input: PathBuf,
    /// Relaxations to solve: P, P2, S, D, B or all (comma separated).
    #[arg(long, default_value = "all", value_parser = parse_lp_list)]
    pub lp: LpList,
    #[command(flatten)]
    pub caps: CapArgs,
    /// Include one dump line per full component.
    #[arg(long)]
    pub components: bool,
    /// Also write each model as `<dir>/<name>.lp`.
    #[arg(long, value_name = "DIR")]
    pub dump_lp: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Instance file or corpus directory.
    pub input: PathBuf,
    #[command(flatten)]
    pub caps: CapArgs,
    /// Scan order for the one-pass heuristics; both colex and five shuffles when absent.
    #[arg(long, value_enum)]
    pub scan_order: Option<ScanOrderArg>,
    /// Shuffle seed used with `--scan-order shuffle`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Solve the bidirected cut LP once per root terminal.
    #[arg(long)]
    pub root_sweep: bool,
    /// Vertices sampled from each of P2 and S for the region comparison.
    #[arg(long, default_value_t = 2)]
    pub samples: usize,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary table path (CSV).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HeuristicArgs {
    /// Instance file.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub alg: Algorithm,
    /// Threshold of the loss-contracting heuristic, `p/q` or `sqrt3`.
    #[arg(long, default_value = "sqrt3", value_parser = parse_alpha)]
    pub alpha: Surd,
    #[arg(long, value_enum, default_value = "colex")]
    pub scan_order: ScanOrderArg,
    /// Shuffle seed used with `--scan-order shuffle`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub caps: CapArgs,
    /// Trace path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Seed of the first instance of each class.
    #[arg(long)]
    pub seed: u64,
    /// Instances per class.
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    #[arg(long, default_value_t = 8)]
    pub vertices: usize,
    #[arg(long, default_value_t = 4)]
    pub terminals: usize,
    /// Costs are drawn from `1..=cost-max`.
    #[arg(long, default_value_t = 20)]
    pub cost_max: i64,
    #[arg(long, value_enum, default_value = "all")]
    pub class: ClassArg,
    /// Corpus directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    /// Instance file or corpus directory.
    pub input: PathBuf,
    #[command(flatten)]
    pub caps: CapArgs,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary table path (CSV).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpList(pub Vec<LpKind>);

fn parse_lp_list(s: &str) -> Result<LpList, String> {
    let mut kinds = Vec::new();
    for part in s.split(',') {
        if part.eq_ignore_ascii_case("all") {
            kinds.extend(LpKind::ALL);
        } else {
            kinds.push(part.parse::<LpKind>().map_err(|e| e.to_string())?);
        }
    }
    kinds.sort();
    kinds.dedup();
    Ok(LpList(kinds))
}

fn parse_alpha(s: &str) -> Result<Surd, String> {
    s.parse::<Surd>().map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    RatioGreedy,
    OnePass,
    LossContract,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanOrderArg {
    Colex,
    Shuffle,
}

impl ScanOrderArg {
    pub fn with_seed(self, seed: u64) -> ScanOrder {
        match self {
            ScanOrderArg::Colex => ScanOrder::Colex,
            ScanOrderArg::Shuffle => ScanOrder::Shuffle(seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    General,
    Quasibipartite,
    UniformlyQuasibipartite,
    All,
}

impl ClassArg {
    pub fn classes(self) -> Vec<InstanceClass> {
        match self {
            ClassArg::General => vec![InstanceClass::General],
            ClassArg::Quasibipartite => vec![InstanceClass::Quasibipartite],
            ClassArg::UniformlyQuasibipartite => vec![InstanceClass::UniformlyQuasibipartite],
            ClassArg::All => {
                vec![InstanceClass::General, InstanceClass::Quasibipartite, InstanceClass::UniformlyQuasibipartite]
            }
        }
    }
}

/// A bad flag combination or path; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: String) -> UsageError {
    UsageError(message)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_lists() {
        assert_eq!(parse_lp_list("all").unwrap().0, LpKind::ALL.to_vec());
        assert_eq!(parse_lp_list("B,P").unwrap().0, vec![LpKind::Partition, LpKind::Bidirected]);
        assert!(parse_lp_list("Q").is_err());
    }

    #[test]
    fn alpha_forms() {
        assert_eq!(parse_alpha("sqrt3").unwrap(), Surd::sqrt(3));
        assert_eq!(parse_alpha("3/2").unwrap().to_string(), "3/2");
        assert!(parse_alpha("three").is_err());
    }

    #[test]
    fn cap_limits() {
        assert!(CapArgs { max_r: 9, max_v: 14 }.caps().is_ok());
        assert!(CapArgs { max_r: 11, max_v: 14 }.caps().is_err());
        assert!(CapArgs { max_r: 9, max_v: 20 }.caps().is_err());
    }
}
