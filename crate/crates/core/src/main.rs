use clap::{Parser, Subcommand};
use pdpolar::config::{load_config, ConfigError};
use pdpolar::csv_out::{emit_csv, emit_curve_csv};
use pdpolar::pipeline::{run_analyze, run_sweep, Execution, PipelineError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "pdpolar",
    version,
    about = "Polar code rates and BER bounds for PD quantum channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the pipeline once and write analyze.csv
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to the config's `output`)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep and write sweep.csv and curve.csv
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Evaluate cells one at a time
        #[arg(long)]
        serial: bool,
    },
    /// Run the built-in invariant suite
    Verify,
}

enum Failure {
    Config(ConfigError),
    Pipeline(PipelineError),
    Io(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Config(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(2)
            }
            Failure::Pipeline(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
            Failure::Io(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

fn analyze(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load_config(config).map_err(Failure::Config)?;
    let cell = run_analyze(&cfg).map_err(Failure::Pipeline)?;
    let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
    prepare_dir(&dir)?;
    let path = dir.join("analyze.csv");
    emit_csv(std::slice::from_ref(&cell.row), &path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let r = &cell.row;
    println!(
        "n={} |S_degr|={} |S_pd|={} delta={} rq_degr={} rq_pd={} ent={} ber=[{}, {}]{}",
        r.n,
        r.size_sin_degr,
        r.size_sin_pd,
        r.delta,
        r.rq_degr,
        r.rq_pd,
        r.ent_consumption,
        r.ber_lower,
        r.ber_upper,
        if cell.bounds_crossed {
            " (bounds crossed)"
        } else {
            ""
        }
    );
    println!("{}", cell.identities);
    println!("wrote {}", path.display());
    Ok(())
}

fn sweep(config: &Path, out: &Path, serial: bool) -> Result<(), Failure> {
    let cfg = load_config(config).map_err(Failure::Config)?;
    let execution = if serial {
        Execution::Serial
    } else {
        Execution::Concurrent
    };
    let result = run_sweep(&cfg, execution).map_err(Failure::Pipeline)?;
    prepare_dir(out)?;
    let rows = out.join("sweep.csv");
    emit_csv(&result.rows, &rows).map_err(|e| Failure::Io(format!("{}: {e}", rows.display())))?;
    let curve = out.join("curve.csv");
    emit_curve_csv(&result.curve, &curve)
        .map_err(|e| Failure::Io(format!("{}: {e}", curve.display())))?;
    println!(
        "wrote {} ({} rows) and {} ({} points)",
        rows.display(),
        result.rows.len(),
        curve.display(),
        result.curve.len()
    );
    Ok(())
}

fn verify() -> ExitCode {
    let outcomes = pdpolar::verify::run_all();
    let mut ok = true;
    for c in &outcomes {
        println!(
            "{} {:<16} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        ok &= c.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { config, out } => analyze(&config, out),
        Command::Sweep {
            config,
            out,
            serial,
        } => sweep(&config, &out, serial),
        Command::Verify => return verify(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
