use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use nlse::harness::{
    absorb_sweep, convergence_csv, convergence_study, demo_vortex, epsilon_scalability_study,
    run_simulation, scalability_csv, schemes_table, schemes_table_text, sweep_csv, RunConfig,
    StudyAxis, VortexParams,
};
use nlse::schemes::SchemeKind;
use nlse::NlseError;

/// Nonlinear Schrodinger / Gross-Pitaevskii solver suite.
#[derive(Parser)]
#[command(name = "nlse", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output directory (overrides output.dir from the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed; accepted for forward compatibility, no driver draws
    /// random numbers today.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the parallel steppers (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured simulation and write snapshots plus a
    /// conservation CSV.
    Run {
        /// Path to a key = value configuration file.
        #[arg(long)]
        config: PathBuf,
    },
    /// Grid- or step-refinement study on the moving-soliton benchmark.
    Converge {
        /// Scheme tag (cnfd, refd, sifd-a, sifd-b, tssp, tsfd, ssfd, lpfd).
        #[arg(long)]
        scheme: String,
        /// Refinement axis: space or time.
        #[arg(long)]
        axis: String,
        /// Explicit ladder values (h for space, tau for time),
        /// comma-separated; a built-in ladder is used when omitted.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        /// Wall-clock budget in seconds before rungs fall back to the
        /// labeled sentinel discretization.
        #[arg(long, default_value_t = 600.0)]
        budget: f64,
    },
    /// Coarsest-resolving-mesh study over a ladder of semiclassical
    /// epsilon values.
    Scalability {
        #[arg(long)]
        scheme: String,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.125, 0.0625])]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 0.4)]
        t_final: f64,
    },
    /// Reflection of an outgoing packet vs absorbing-layer width, for both
    /// layer families.
    AbsorbSweep {
        #[arg(long, default_value = "cnfd")]
        scheme: String,
        /// Physical-region cell count.
        #[arg(long, default_value_t = 400)]
        j: usize,
        /// Layer widths in cells.
        #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32])]
        widths: Vec<usize>,
    },
    /// Rotating-condensate showcase: trap quench plus rotation on a
    /// doubly periodic box.
    DemoVortex {
        #[arg(long, default_value_t = 8.0)]
        half_width: f64,
        #[arg(long, default_value_t = 128)]
        j: usize,
        #[arg(long, default_value_t = 1e-4)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        t_final: f64,
        #[arg(long, default_value_t = 0.9)]
        omega: f64,
        #[arg(long, default_value_t = 1000.0)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        snapshot_every: usize,
        /// Start from a snapshot file instead of the built-in ansatz.
        #[arg(long)]
        init_file: Option<PathBuf>,
    },
    /// Measure the structural properties of every scheme on live probe
    /// runs and print the pass/fail table.
    SchemesTable,
}

fn report_error(err: &NlseError) {
    match err {
        NlseError::ConfigInvalid(items) => {
            eprintln!("error: configuration invalid:");
            for item in items {
                eprintln!("error: {item}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}

fn dispatch(cli: Cli) -> nlse::Result<()> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| NlseError::Other(format!("thread pool: {e}")))?;
    }
    let out_dir = |default: &str| {
        cli.global
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(default))
    };

    match cli.command {
        Command::Run { config } => {
            let mut cfg = RunConfig::from_file(&config)?;
            if let Some(out) = &cli.global.out {
                cfg.out_dir = out.clone();
            }
            let summary = run_simulation(&cfg)?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "ran {} steps to t = {:.6}; mass drift {:.3e}; {} snapshots in {}",
                summary.steps_taken,
                summary.field.t,
                summary.report.mass_drift(),
                summary.snapshot_paths.len(),
                cfg.out_dir.display()
            );
        }
        Command::Converge {
            scheme,
            axis,
            ladder,
            budget,
        } => {
            let scheme = SchemeKind::parse(&scheme)?;
            let axis = StudyAxis::parse(&axis)?;
            let rows = convergence_study(
                scheme,
                axis,
                ladder.as_deref(),
                Duration::from_secs_f64(budget),
            )?;
            let csv = convergence_csv(&rows);
            let dir = out_dir("out");
            std::fs::create_dir_all(&dir)?;
            let path = dir.join(format!("convergence_{}.csv", scheme.name()));
            std::fs::write(&path, &csv)?;
            print!("{csv}");
            println!("# written to {}", path.display());
        }
        Command::Scalability {
            scheme,
            epsilons,
            t_final,
        } => {
            let scheme = SchemeKind::parse(&scheme)?;
            let rows = epsilon_scalability_study(scheme, &epsilons, t_final)?;
            let csv = scalability_csv(&rows);
            let dir = out_dir("out");
            std::fs::create_dir_all(&dir)?;
            let path = dir.join(format!("scalability_{}.csv", scheme.name()));
            std::fs::write(&path, &csv)?;
            print!("{csv}");
            println!("# written to {}", path.display());
        }
        Command::AbsorbSweep { scheme, j, widths } => {
            let scheme = SchemeKind::parse(&scheme)?;
            let rows = absorb_sweep(scheme, j, &widths)?;
            let csv = sweep_csv(&rows);
            let dir = out_dir("out");
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("absorb_sweep.csv");
            std::fs::write(&path, &csv)?;
            print!("{csv}");
            println!("# written to {}", path.display());
        }
        Command::DemoVortex {
            half_width,
            j,
            tau,
            t_final,
            omega,
            beta,
            snapshot_every,
            init_file,
        } => {
            let dir = out_dir("out/vortex");
            let outcome = demo_vortex(
                &dir,
                &VortexParams {
                    half_width,
                    j,
                    tau,
                    t_final,
                    omega,
                    beta,
                    snapshot_every,
                    init_file,
                },
            )?;
            println!(
                "mass drift {:.3e}; {} snapshots in {}; {} boundary warnings",
                outcome.mass_drift,
                outcome.snapshot_paths.len(),
                dir.display(),
                outcome.boundary_warnings
            );
        }
        Command::SchemesTable => {
            let rows = schemes_table()?;
            print!("{}", schemes_table_text(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors before we get here
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            report_error(&err);
            ExitCode::from(1)
        }
    }
}
