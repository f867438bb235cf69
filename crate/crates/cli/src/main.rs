use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use mkdv_experiments::{run_experiment, CliError, ExperimentKind, ExperimentSpec};

/// Run one experiment and write its results plus `manifest.json`.
///
/// Exit status: 0 all assertions passed, 2 invalid request, 3 an assertion
/// failed, 4 I/O error. Logging level comes from `SERIES_LOG`
/// (`error`, `info` or `debug`; default `error`).
#[derive(Debug, Parser)]
#[command(name = "mkdv-experiments", version = mkdv_experiments::VERSION)]
struct Args {
    #[arg(long, value_enum)]
    experiment: Option<ExperimentKind>,

    /// `key=value`; repeatable. See `--describe`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,

    #[arg(long, default_value = "results")]
    out: PathBuf,

    /// Cap on worker threads.
    #[arg(long)]
    jobs: Option<usize>,

    /// Shorthand for `--param seed=<u64>` on experiments that sample.
    #[arg(long)]
    seed: Option<u64>,

    /// Print the parameters of every experiment with their defaults.
    #[arg(long)]
    describe: bool,
}

fn describe() {
    for kind in ExperimentKind::ALL {
        println!("{kind}");
        for p in kind.parameters() {
            println!("  {:<14} {:<22} {}", p.key, p.default, p.help);
        }
    }
}

fn build_spec(args: &Args) -> Result<ExperimentSpec, CliError> {
    let kind = args.experiment.ok_or_else(|| CliError::Invalid("--experiment is required".into()))?;
    let mut params = args.params.clone();
    if let Some(seed) = args.seed {
        if !kind.parameters().iter().any(|p| p.key == "seed") {
            return Err(CliError::Invalid(format!("{kind} takes no seed")));
        }
        params.push(format!("seed={seed}"));
    }
    ExperimentSpec::from_pairs(kind, &params)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SERIES_LOG", "error")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if args.describe {
        describe();
        return ExitCode::SUCCESS;
    }
    let result = build_spec(&args).and_then(|spec| run_experiment(&spec, &args.out, args.jobs));
    match result {
        Ok(manifest) => {
            for a in &manifest.assertions {
                println!(
                    "{} {}: {:.6e} {} {:.6e}",
                    if a.passed { "ok  " } else { "FAIL" },
                    a.name,
                    a.measured,
                    a.relation,
                    a.tolerance
                );
            }
            println!("wrote {} files to {}", manifest.files.len() + 1, args.out.display());
            if manifest.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
