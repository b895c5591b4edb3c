use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use bosonic_bell_cli::{parse_config_text, run, Scenario, SweepConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "bosonic-bell",
    version,
    about = "Many-body Bell correlators for bosonic qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Numerical tolerance for solvers and series.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// key=value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ground-state correlator ratios of the double-well BEC against U.
    BecScan {
        /// Particle number N.
        #[arg(long)]
        n: Option<String>,
        /// Orders, e.g. 70,80,90,100 or 1..10.
        #[arg(long)]
        m: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        u_min: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        u_max: Option<String>,
        #[arg(long)]
        u_points: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Full four-mode SPDC state: correlator against its bound over t.
    SpdcFull {
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        t_max: Option<String>,
        #[arg(long)]
        t_points: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Post-selected fixed-N SPDC states, all orders 1..=N.
    SpdcFixedN {
        /// Per-region particle numbers, e.g. 2,3,6,12.
        #[arg(long)]
        n: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive search over local deterministic strategies.
    LhvCheck {
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Pauli-word expansion of J+^m.
    Expand {
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Local-realistic bound for one region, or two with --k.
    Bound {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        m: Option<String>,
        /// Second-region particle number (defaults to N).
        #[arg(long)]
        n_b: Option<String>,
        /// Second-region order.
        #[arg(long)]
        k: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (scenario, flags, common) = match cli.command {
        Command::BecScan {
            n,
            m,
            u_min,
            u_max,
            u_points,
            common,
        } => (
            Scenario::BecScan,
            vec![
                ("n", n),
                ("m", m),
                ("u_min", u_min),
                ("u_max", u_max),
                ("u_points", u_points),
            ],
            common,
        ),
        Command::SpdcFull {
            m,
            t_max,
            t_points,
            common,
        } => (
            Scenario::SpdcFull,
            vec![("m", m), ("t_max", t_max), ("t_points", t_points)],
            common,
        ),
        Command::SpdcFixedN { n, common } => (Scenario::SpdcFixedN, vec![("n", n)], common),
        Command::LhvCheck { m, common } => (Scenario::LhvCheck, vec![("m", m)], common),
        Command::Expand { m, common } => (Scenario::Expand, vec![("m", m)], common),
        Command::Bound {
            n,
            m,
            n_b,
            k,
            common,
        } => (
            Scenario::BoundQuery,
            vec![("n", n), ("m", m), ("n_b", n_b), ("k", k)],
            common,
        ),
    };

    let mut pairs = match &common.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config_text(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Vec::new(),
    };
    pairs.extend(
        flags
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v))),
    );
    if let Some(tol) = common.tol {
        pairs.push(("tol".into(), tol.to_string()));
    }

    let config = SweepConfig::from_pairs(scenario, &pairs)?;
    let text = run(&config)?;
    match &common.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
