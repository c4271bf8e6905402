use std::fmt;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cayley",
    version,
    about = "Counts and strong-regularity checks for Cay(M_n(F_q), GL_n(F_q))"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Show the field built for a designation.
    FieldInfo {
        #[command(flatten)]
        common: Common,
    },
    /// Rank-class intersection counts, by closed form and/or enumeration.
    Census {
        #[command(flatten)]
        common: Common,
        /// Matrix dimension.
        #[arg(long)]
        n: u32,
        /// A rank in [0, n] or `all`.
        #[arg(long, default_value = "all")]
        rank: RankSel,
        #[arg(long, value_enum, default_value_t = MethodSel::Both)]
        method: MethodSel,
    },
    /// Run one named check, or all of them, at (n, field).
    Verify {
        #[command(flatten)]
        common: Common,
        /// Matrix dimension.
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Check::All)]
        check: Check,
        /// Random vertex pairs for the rank-reduction check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Pair to check instead of sampling, e.g. "1,0;0,1".
        #[arg(long, requires = "matrix_b")]
        matrix_a: Option<String>,
        /// Second vertex of the pair given by --matrix-a.
        #[arg(long, requires = "matrix_a")]
        matrix_b: Option<String>,
        /// Adds this offset to every closed-form value before comparing.
        /// Exercises the failure path of the checker itself.
        #[arg(long, hide = true, default_value_t = 0, allow_negative_numbers = true)]
        perturb_formula: i64,
    },
    /// Decide strong regularity via rank classes.
    Srg {
        #[command(flatten)]
        common: Common,
        /// Matrix dimension.
        #[arg(long)]
        n: u32,
    },
    /// Materialise the graph and run the pairwise SRG test.
    GraphBuild {
        #[command(flatten)]
        common: Common,
        /// Matrix dimension.
        #[arg(long)]
        n: u32,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Field order as `q` (a prime power) or `p^k`.
    #[arg(long)]
    pub field: String,
    /// Largest enumeration any oracle may perform.
    #[arg(
        long,
        env = "CAYLEY_BUDGET",
        default_value_t = cayley_core::DEFAULT_BUDGET,
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    pub budget: u64,
    /// Seed for sampled vertex pairs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    pub output: Output,
    /// Worker threads, or `auto` for one per core.
    #[arg(long, default_value = "auto")]
    pub threads: Threads,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodSel {
    Formula,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Lemma27,
    Lemma31,
    Lemma32,
    Recurrence,
    RankReduction,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSel {
    All,
    One(u32),
}

impl FromStr for RankSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(RankSel::All);
        }
        s.parse()
            .map(RankSel::One)
            .map_err(|_| format!("expected a rank or `all`, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Fixed(usize),
}

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Threads::Auto),
            _ => match s.parse() {
                Ok(0) | Err(_) => Err(format!(
                    "expected a positive thread count or `auto`, got {s:?}"
                )),
                Ok(t) => Ok(Threads::Fixed(t)),
            },
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}
