use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fsi_core::config::{parse_config, SolverConfig};
use fsi_core::driver::{run, scaling_run, write_scaling_csv};
use fsi_core::verify::{all_passed, verify_all};
use fsi_core::Error;

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "fsi-bench", version, about = "Monolithic FSI benchmark driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the time loop described by a config file and write a CSV time series.
    Run { config: PathBuf },
    /// Run the self-check suite and print one line per criterion.
    Verify,
    /// Time assembly and one preconditioned solve at several thread counts.
    Scaling {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        threads: Vec<usize>,
        /// Assembly repetitions per thread count (best time is kept).
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_) | Error::ConfigParse { .. } | Error::ConfigRange { .. } | Error::RefineLimit { .. }
    )
}

fn load(path: &Path) -> Result<SolverConfig, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_USAGE)
    })?;
    let mut cfg = parse_config(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_USAGE)
    })?;
    cfg.apply_env();
    Ok(cfg)
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if is_usage_error(e) { EXIT_USAGE } else { EXIT_RUNTIME })
}

fn cmd_run(path: &Path) -> ExitCode {
    let cfg = match load(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match run(&cfg) {
        Ok(summary) => {
            println!(
                "{} steps written to {} (min J {:.4})",
                summary.rows.len(),
                summary.csv_path.display(),
                summary.min_jacobian
            );
            ExitCode::SUCCESS
        }
        Err((e, path)) => {
            if let Some(p) = path {
                eprintln!("partial output kept in {}", p.display());
            }
            fail(&e)
        }
    }
}

fn cmd_verify() -> ExitCode {
    let reports = verify_all();
    for r in &reports {
        println!("{}", r.line());
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} checks passed", reports.len());
    if all_passed(&reports) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_RUNTIME)
    }
}

fn cmd_scaling(path: &Path, threads: &[usize], repeats: usize) -> ExitCode {
    if threads.is_empty() || threads.contains(&0) {
        eprintln!("error: thread counts must be positive");
        return ExitCode::from(EXIT_USAGE);
    }
    let cfg = match load(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let rows = match scaling_run(&cfg, threads, repeats) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Err(e) = std::fs::create_dir_all(&cfg.output_dir) {
        return fail(&e.into());
    }
    let out = cfg.output_dir.join(format!("{}_scaling.csv", cfg.prefix()));
    if let Err(e) = write_scaling_csv(&out, &rows) {
        return fail(&e);
    }
    let base = rows[0].t_assemble;
    for r in &rows {
        println!(
            "threads {:>3}  assemble {:.4}s (x{:.2})  solve {:.4}s  fluid {:.4}s  solid {:.4}s  mesh {:.4}s  gmres {}",
            r.threads,
            r.t_assemble,
            base / r.t_assemble,
            r.t_solve,
            r.t_fluid,
            r.t_solid,
            r.t_mesh,
            r.gmres_iters
        );
    }
    println!("written to {}", out.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Verify => cmd_verify(),
        Command::Scaling {
            config,
            threads,
            repeats,
        } => cmd_scaling(&config, &threads, repeats),
    }
}
