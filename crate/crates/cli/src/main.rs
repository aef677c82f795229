use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qws_cli::{output_paths, parse_circuit, run, Backend, CliError, Report, RunConfig};

/// Simulate an odd-dimension qudit circuit in discrete phase space.
#[derive(Parser, Debug)]
#[command(name = "qws", version)]
struct Args {
    /// Circuit file (`-` reads standard input).
    circuit: PathBuf,

    #[arg(long, value_enum, default_value_t = Backend::Stabilizer)]
    backend: Backend,

    /// Report to produce; repeat for several. Defaults to `wigner`.
    #[arg(long, value_enum)]
    report: Vec<Report>,

    /// Output file. With several reports each gets `.<report>.<ext>` appended.
    /// Without it reports go to standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Cross-check the Wigner table against a second backend.
    #[arg(long)]
    verify: bool,

    /// Largest number of phase-space points or amplitudes to enumerate.
    #[arg(long, default_value_t = qws_core::DEFAULT_ENUMERATION_CAP)]
    cap: u128,

    /// Tolerance for `--verify`.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

fn configure_threads() {
    if let Some(n) = std::env::var("QWS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn execute(args: Args) -> Result<(), CliError> {
    let text = if args.circuit.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(&args.circuit)?
    };
    let circuit = parse_circuit(&text)?;
    let reports = if args.report.is_empty() { vec![Report::Wigner] } else { args.report };
    let config = RunConfig { backend: args.backend, reports, verify: args.verify, cap: args.cap, tol: args.tol };
    let output = run(&config, &circuit)?;
    if let Some(v) = output.verification {
        eprintln!("verify: {} vs {} max |dW| = {:.3e}", v.backend, v.reference, v.max_diff);
    }
    match args.out {
        Some(out) => {
            for (path, emitted) in output_paths(&out, &config.reports).iter().zip(&output.emitted) {
                std::fs::write(path, &emitted.contents)?;
            }
        }
        None => {
            for emitted in &output.emitted {
                print!("{}", emitted.contents);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    configure_threads();
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qws: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
