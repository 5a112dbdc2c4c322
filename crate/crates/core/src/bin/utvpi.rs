use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use utvpi::cli::{self, BenchConfig, CliError, GenConfig, Mode};
use utvpi::VarTable;

#[derive(Parser)]
#[command(name = "utvpi", version, about = "Incremental UTVPI constraint checking")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum CheckMode {
    Scst,
    IncLamu,
    MLamu,
    Closure,
    /// Run every solver and require identical verdicts.
    All,
}

#[derive(Copy, Clone, ValueEnum)]
enum ImpliesMode {
    Scst,
    Closure,
}

#[derive(Subcommand)]
enum Command {
    /// Assert the constraints of a file one at a time and report satisfiability.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "scst")]
        mode: CheckMode,
        /// Print the verdict after every constraint and the elapsed time.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Report the assertion step at which each query becomes implied.
    Implies {
        phi: PathBuf,
        queries: PathBuf,
        #[arg(long, value_enum, default_value = "scst")]
        mode: ImpliesMode,
    },
    /// Generate a random two-variable instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time solvers on generated instance classes.
    Bench {
        /// TOML file with [[class]] entries (name, n, m, instances, seed).
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "scst,inc-lamu,m-lamu")]
        modes: String,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn io_err(path: &PathBuf) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn run(args: Args) -> Result<i32, CliError> {
    match args.command {
        Command::Check { file, mode, verbose } => {
            let mut vars = VarTable::new();
            let cs = cli::read_constraints(&file, &mut vars)?;
            let mode = match mode {
                CheckMode::Scst => Mode::Scst,
                CheckMode::IncLamu => Mode::IncLamu,
                CheckMode::MLamu => Mode::MLamu,
                CheckMode::Closure => Mode::Closure,
                CheckMode::All => {
                    let reports = cli::run_check_all(&cs, vars.len())?;
                    for (m, r) in &reports {
                        println!("{m}: {} ({:.3} ms)", r.summary(), r.total_time().as_secs_f64() * 1e3);
                    }
                    let r = &reports[0].1;
                    println!("{}", r.summary());
                    return Ok(r.exit_code());
                }
            };
            let report = cli::run_check(&cs, vars.len(), mode);
            if verbose {
                for (i, v) in report.outcomes.iter().enumerate() {
                    println!("{} {} {}", i + 1, v, cs[i].display(&vars));
                }
                for (phase, d) in &report.phases {
                    println!("time {phase} {:.3} ms", d.as_secs_f64() * 1e3);
                }
            }
            println!("{}", report.summary());
            Ok(report.exit_code())
        }
        Command::Implies { phi, queries, mode } => {
            let mut vars = VarTable::new();
            let cs = cli::read_constraints(&phi, &mut vars)?;
            let qs = cli::read_constraints(&queries, &mut vars)?;
            let mode = match mode {
                ImpliesMode::Scst => Mode::Scst,
                ImpliesMode::Closure => Mode::Closure,
            };
            let report = cli::run_implies(&cs, &qs, vars.len(), mode);
            for (q, step) in qs.iter().zip(&report.implied_at) {
                match step {
                    Some(k) => println!("{}: implied at step {k}", q.display(&vars)),
                    None => println!("{}: not implied", q.display(&vars)),
                }
            }
            println!("{}", report.summary());
            Ok(report.exit_code())
        }
        Command::Gen { n, m, seed, out } => {
            let cfg = GenConfig::new(n, m, seed);
            let (vars, cs) = cli::generate(&cfg)?;
            cli::audit(&cfg, &cs).map_err(CliError::Gen)?;
            fs::write(&out, cli::format_constraints(&vars, &cs)).map_err(io_err(&out))?;
            Ok(0)
        }
        Command::Bench { config, modes, reps, csv } => {
            let text = fs::read_to_string(&config).map_err(io_err(&config))?;
            let cfg = BenchConfig::from_toml(&text)?;
            let modes = cli::parse_modes(&modes)?;
            let rows = cli::run_bench(&cfg, &modes, reps)?;
            print!("{}", cli::format_table(&rows));
            if let Some(path) = csv {
                let file = fs::File::create(&path).map_err(io_err(&path))?;
                cli::write_csv(&rows, file)?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e @ CliError::Disagreement(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
