mod commands;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polar_snf::predict::{Target, Typo};

#[derive(Parser, Debug)]
#[command(name = "polar-snf", version, about = "Smith and critical groups of finite classical polar graphs")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form prediction of the groups.
    Predict(InstanceArgs),
    /// Explicit Smith normal form computation on the constructed graph.
    Compute {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Refuse graphs with more vertices than this.
        #[arg(long, default_value_t = 4000)]
        v_max: u64,
    },
    /// Compare prediction with computation.
    Verify {
        #[command(flatten)]
        inst: OptionalInstance,
        /// Run the whole acceptance battery.
        #[arg(long, conflicts_with_all = ["family", "q", "m"])]
        battery: bool,
        /// Re-enable a known table misprint in the predictor.
        #[arg(long = "inject-typo", value_parser = parse_typo)]
        typos: Vec<Typo>,
        #[arg(long, default_value_t = 4000)]
        v_max: u64,
    },
    /// Write a matrix or the vertex list to a file.
    Export {
        #[arg(long)]
        family: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum)]
        what: Export,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify every instance in a range.
    Sweep {
        #[arg(long, default_value_t = 5)]
        q_max: u64,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
        #[arg(long, default_value_t = 400)]
        v_max: u64,
        #[arg(long, value_enum, default_value_t = TargetArg::Both)]
        target: TargetArg,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    m: u32,
    #[arg(long, value_enum, default_value_t = TargetArg::Both)]
    target: TargetArg,
    /// Also write the JSON output here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OptionalInstance {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, value_enum, default_value_t = TargetArg::Both)]
    target: TargetArg,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TargetArg {
    Smith,
    Critical,
    Both,
}

impl TargetArg {
    fn targets(self) -> Vec<Target> {
        match self {
            TargetArg::Smith => vec![Target::Smith],
            TargetArg::Critical => vec![Target::Critical],
            TargetArg::Both => Target::BOTH.to_vec(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Export {
    Adjacency,
    Laplacian,
    Points,
}

fn parse_typo(s: &str) -> Result<Typo, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Predict(a) => commands::predict(&a.family, a.q, a.m, &a.target.targets(), a.json.as_deref()),
        Command::Compute { inst: a, v_max } => {
            commands::compute(&a.family, a.q, a.m, &a.target.targets(), v_max, a.json.as_deref())
        }
        Command::Verify { inst, battery, typos, v_max } => {
            let targets = inst.target.targets();
            if battery {
                commands::verify_battery(&targets, &typos, inst.json.as_deref())
            } else {
                match (inst.family, inst.q, inst.m) {
                    (Some(f), Some(q), Some(m)) => {
                        commands::verify(&f, q, m, &targets, &typos, v_max, inst.json.as_deref())
                    }
                    _ => Err(commands::CliError::BadInput("verify needs --family, --q and --m, or --battery".into())),
                }
            }
        }
        Command::Export { family, q, m, what, out } => commands::export(&family, q, m, what, &out),
        Command::Sweep { q_max, m_max, v_max, target, json } => {
            commands::sweep(q_max, m_max, v_max, &target.targets(), json.as_deref())
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
