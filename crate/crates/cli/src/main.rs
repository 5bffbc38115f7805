use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "orbitweil",
    version,
    about = "Heights, Weil functions and orbit experiments on P^n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Experiment config (JSON).
    pub config: PathBuf,
    /// Orbit depth N, overriding the config.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Output file; stdout when absent and the config names none.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Orbit cache directory.
    #[arg(long, env = "ORBITWEIL_CACHE")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Forward orbit with heights (CSV).
    Orbit(Common),
    /// Local and global Weil function values along the orbit prefix.
    Weil(Common),
    /// Arithmetic degree estimate, growth fit and ratio bound check.
    Alpha(Common),
    /// Log canonical threshold of the config's lct block.
    Lct(Common),
    /// Ramification growth e_f(D).
    Efd(Common),
    /// Multiplicity constant gamma and c_n.
    Cn(Common),
    /// Ratio series sum_S lambda_D / h_L (CSV, plus SVG when requested).
    Ratio {
        #[command(flatten)]
        common: Common,
        /// SVG chart path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Gap series eps' h_L - sum_S lambda_D - h_K.
    Gap {
        #[command(flatten)]
        common: Common,
        /// eps', overriding the config.
        #[arg(long)]
        eps_prime: Option<String>,
    },
    /// Hypothesis report for the ratio-to-zero theorem.
    Thm14(Common),
    /// Flagged orbit points of the complementary-sum set.
    Thm17 {
        #[command(flatten)]
        common: Common,
        /// eps, overriding the config.
        #[arg(long)]
        eps: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
