use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use micropolar_cli::report::{write_reports, RunInfo, Status, QUAD_TOL_ENV};
use micropolar_cli::{parse_config_with, run_experiment, Experiment};

/// Runs one experiment and writes its curves and reports into the output
/// directory.
#[derive(Parser, Debug)]
#[command(name = "micropolar", version)]
struct Args {
    experiment: Experiment,
    /// Flat `section.key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `out_dir`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Overrides `seed` (and `data.seed` unless the file sets it).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the data-parallel kernels.
    #[arg(long)]
    jobs: Option<usize>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(Status::ConfigError.exit_code());
            }
        },
        None => String::new(),
    };

    let mut overrides = vec![("experiment", args.experiment.to_string())];
    if let Some(s) = args.seed {
        overrides.push(("seed", s.to_string()));
    }
    if let Some(d) = &args.out_dir {
        overrides.push(("out_dir", d.display().to_string()));
    }
    let quad_tol_override = std::env::var(QUAD_TOL_ENV).ok();
    if let Some(v) = &quad_tol_override {
        overrides.push(("quad.tol", v.clone()));
    }
    let quad_tol_override = quad_tol_override.and_then(|v| v.parse().ok());

    if let Some(0) = args.jobs {
        eprintln!("error: --jobs must be >= 1");
        return ExitCode::from(Status::ConfigError.exit_code());
    }
    if let Some(k) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: cannot start {k} worker threads: {e}");
            return ExitCode::from(Status::Error.exit_code());
        }
    }

    let mut info = RunInfo {
        experiment: args.experiment.name(),
        config: None,
        wall_time_s: 0.0,
        threads: rayon::current_num_threads(),
        quad_tol_override,
    };

    let cfg = match parse_config_with(&text, &overrides) {
        Ok(c) => c,
        Err(errors) => {
            for e in &errors {
                eprintln!("config error: {e}");
            }
            if let Some(dir) = &args.out_dir {
                if let Err(e) = write_reports(dir, &info, Status::ConfigError, None, None, &errors) {
                    eprintln!("error: cannot write reports: {e}");
                }
            }
            return ExitCode::from(Status::ConfigError.exit_code());
        }
    };

    if args.print_config {
        print!("{}", cfg.to_config_string());
        return ExitCode::SUCCESS;
    }

    let dir = cfg.out_dir.clone();
    if let Err(e) = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(dir.join("effective.cfg"), cfg.to_config_string())) {
        eprintln!("error: cannot prepare {}: {e}", dir.display());
        return ExitCode::from(Status::Error.exit_code());
    }
    let start = Instant::now();
    let result = run_experiment(&cfg, &dir);
    info.wall_time_s = start.elapsed().as_secs_f64();
    info.config = Some(&cfg);

    let (status, outcome, error) = match &result {
        Ok(o) if o.passed() => (Status::Ok, Some(o), None),
        Ok(o) => (Status::CheckFailed, Some(o), None),
        Err(e) => (Status::Error, None, Some(e.to_string())),
    };
    if let Some(o) = outcome {
        for c in &o.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.rule == "holds" {
                println!("{mark} {}", c.name);
            } else {
                println!("{mark} {}: {:e} ({})", c.name, c.value, c.rule);
            }
        }
    }
    if let Some(e) = &error {
        eprintln!("error: {e}");
    }
    if let Err(e) = write_reports(&dir, &info, status, outcome, error.as_deref(), &[]) {
        eprintln!("error: cannot write reports: {e}");
        return ExitCode::from(Status::Error.exit_code());
    }
    println!("{}: {:?} -> {}", args.experiment, status, dir.display());
    ExitCode::from(status.exit_code())
}
