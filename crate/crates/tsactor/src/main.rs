use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tsactor::scenarios::{self, Corruption, Policy, Scenario, ScenarioConfig};
use tsactor::core::ChemicalVariant;
use tsactor::Error;

#[derive(Parser)]
#[command(version, about = "Typestate actors: scenarios, protocol documents and trace checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and print its report.
    Run(RunArgs),
    /// Load and validate a protocol document.
    Validate { spec: PathBuf },
    /// Check a trace file against a protocol document.
    Check {
        spec: PathBuf,
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = Projection::Global)]
        projection: Projection,
        /// Only check messages handled by this actor.
        #[arg(long)]
        actor: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Projection {
    /// The whole handled sequence.
    Global,
    /// Each client's messages separately.
    Client,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Stash,
    Resend,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(clap::Args)]
struct RunArgs {
    scenario: Scenario,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    producers: usize,
    #[arg(long, default_value_t = 1)]
    consumers: usize,
    /// Inserts per producer.
    #[arg(long, default_value_t = 5)]
    items: usize,
    /// Removes per consumer.
    #[arg(long)]
    removes: Option<usize>,
    #[arg(long, default_value_t = 3)]
    users: usize,
    #[arg(long)]
    policy: Option<Policy>,
    #[arg(long, value_enum, default_value_t = Variant::Stash)]
    chemical: Variant,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    affine: Switch,
    #[arg(long, default_value_t = 100_000)]
    max_steps: u64,
    /// Write the handling trace as JSON lines.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Make a client break the protocol.
    #[arg(long)]
    corrupt: Option<Corruption>,
    /// Replay only the first N untyped sends.
    #[arg(long)]
    sends: Option<usize>,
    /// Draw seeds from the OS instead of --seed.
    #[arg(long)]
    free: bool,
    /// With --free, run this many independent systems on parallel threads.
    #[arg(long, default_value_t = 1, requires = "free")]
    runs: usize,
}

impl RunArgs {
    fn config(&self) -> ScenarioConfig {
        ScenarioConfig {
            scenario: self.scenario,
            seed: self.seed,
            producers: self.producers,
            consumers: self.consumers,
            items: self.items,
            removes: self.removes,
            users: self.users,
            policy: self.policy,
            chemical: match self.chemical {
                Variant::Stash => ChemicalVariant::Stash,
                Variant::Resend => ChemicalVariant::Resend,
            },
            affine: matches!(self.affine, Switch::On),
            max_steps: self.max_steps,
            corruption: self.corrupt,
            sends: self.sends,
        }
    }
}

fn run(args: &RunArgs) -> Result<bool, Error> {
    let config = args.config();
    config.validate()?;
    if args.free {
        return Ok(run_free(&config, args.runs.max(1)));
    }
    let report = scenarios::run(&config)?;
    print!("{}", report.render());
    if let Some(path) = &args.trace_out {
        let file = File::create(path)?;
        tsactor::write_trace(std::io::BufWriter::new(file), &report.events)?;
    }
    Ok(report.is_ok())
}

/// Independent systems on parallel threads with OS-drawn seeds. Only
/// order-insensitive results are reported.
fn run_free(config: &ScenarioConfig, runs: usize) -> bool {
    let seeds: Vec<u64> = (0..runs).map(|_| rand::random()).collect();
    let results: Vec<(u64, bool)> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let config = config.clone().seed(seed);
                scope.spawn(move || {
                    let report = scenarios::run(&config).expect("validated");
                    (seed, report.is_ok())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("run panicked")).collect()
    });
    for (seed, ok) in &results {
        println!("seed {seed}: {}", if *ok { "OK" } else { "FAILED" });
    }
    results.iter().all(|(_, ok)| *ok)
}

fn check(
    spec: &PathBuf,
    trace: &PathBuf,
    projection: Projection,
    actor: Option<&str>,
) -> Result<bool, Error> {
    let spec = tsactor::load_spec(spec)?;
    let file = File::open(trace)?;
    let records = tsactor::read_trace(BufReader::new(file))?;
    let trace = tsactor::to_trace(&records, actor);
    let verdicts = match projection {
        Projection::Global => vec![("trace".to_string(), spec.check_trace(&trace))],
        Projection::Client => spec.check_per_client(&trace).into_iter().collect(),
    };
    for (name, verdict) in &verdicts {
        println!("{name}: {verdict}");
    }
    Ok(verdicts.iter().all(|(_, v)| v.is_ok()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Validate { spec } => tsactor::load_spec(spec).map(|s| {
            println!(
                "{}: OK ({} states, initial {})",
                s.name(),
                s.states().len(),
                s.initial().name()
            );
            true
        }),
        Command::Check {
            spec,
            trace,
            projection,
            actor,
        } => check(spec, trace, *projection, actor.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}: {e}", e.code());
            ExitCode::from(2)
        }
    }
}
