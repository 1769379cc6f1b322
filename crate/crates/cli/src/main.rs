use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use monodyn::par::Exec;
use monodyn_cli::{commands, report, CliError, MapSpec, Output, Overrides, Settings};

#[derive(Parser)]
#[command(name = "monodyn", version, about = "Classify affine monomial maps x -> gamma * x^A on a split torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Largest iterate scanned for invariant fibrations [default: 360]
    #[arg(long, global = true)]
    iterate_cap: Option<u64>,
    /// Degree bound for the hypersurface containment oracle [default: 3]
    #[arg(long, global = true)]
    degree_bound: Option<u32>,
    /// Largest torsion order used for periodic cosets [default: 50]
    #[arg(long, global = true)]
    torsion_cap: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random primes tried before an oracle answers UNDECIDED [default: 32]
    #[arg(long, global = true)]
    retries: Option<u32>,
    /// Emit machine-readable JSON
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 4 when an oracle answers UNDECIDED
    #[arg(long, global = true)]
    decisive: bool,
    /// Disable the thread pool
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full classification with certificates and oracle evidence
    Classify { spec: PathBuf },
    /// Search for an invariant fibration
    Fibration { spec: PathBuf },
    /// Wildness certificate for a degree-one automorphism
    Wild { spec: PathBuf },
    /// Split into unipotent and expanding factors
    Decompose { spec: PathBuf },
    /// Periodic torsion points of the expanding factor
    Periodic {
        spec: PathBuf,
        /// Torsion order
        #[arg(short, long, value_parser = clap::value_parser!(u64).range(1..))]
        d: u64,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// Exact orbit prefix
    Orbit {
        spec: PathBuf,
        /// Comma-separated coordinates [default: 1,...,1]
        #[arg(long)]
        point: Option<String>,
        #[arg(short, long, default_value_t = 10)]
        n: usize,
    },
    /// Hypersurface containment test on orbit or family samples
    CheckDensity {
        spec: PathBuf,
        /// Start point for degree-one maps [default: 1,...,1]
        #[arg(long)]
        point: Option<String>,
        /// Number of sample points
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
}

impl Command {
    fn spec_path(&self) -> &PathBuf {
        match self {
            Command::Classify { spec }
            | Command::Fibration { spec }
            | Command::Wild { spec }
            | Command::Decompose { spec }
            | Command::Periodic { spec, .. }
            | Command::Orbit { spec, .. }
            | Command::CheckDensity { spec, .. } => spec,
        }
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let path = cli.command.spec_path();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let spec = MapSpec::from_json(&text)?;
    let f = &cli.flags;
    let overrides = Overrides {
        iterate_cap: f.iterate_cap,
        degree_bound: f.degree_bound,
        torsion_cap: f.torsion_cap,
        seed: f.seed,
        retries: f.retries,
        exec: f.sequential.then_some(Exec::Sequential),
    };
    let s = Settings::resolve(&spec, &overrides)?;
    match &cli.command {
        Command::Classify { .. } => commands::classify(&spec, &s),
        Command::Fibration { .. } => commands::fibration(&spec, &s),
        Command::Wild { .. } => commands::wild(&spec, &s),
        Command::Decompose { .. } => commands::decompose(&spec, &s),
        Command::Periodic { d, budget, .. } => commands::periodic(&spec, &s, *d, *budget),
        Command::Orbit { point, n, .. } => commands::orbit(&spec, &s, point.as_deref(), *n),
        Command::CheckDensity { point, budget, .. } => commands::check_density(&spec, &s, point.as_deref(), *budget),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.flags.json {
                println!("{}", serde_json::to_string_pretty(&out.value).expect("serializable"));
            } else {
                print!("{}", report::to_text(&out.value));
            }
            if cli.flags.decisive && out.undecided {
                eprintln!("oracle answered UNDECIDED");
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("monodyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
