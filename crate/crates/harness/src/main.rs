use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use noneuclid::Geometry;
use noneuclid_harness::generate::{generate_scene, Request, DEFAULT_DEGREE};
use noneuclid_harness::plot::{self, PlaneSpec, DEFAULT_GRID};
use noneuclid_harness::predicates::check_scene;
use noneuclid_harness::report;
use noneuclid_harness::scene::{format_num, Relation, Scene};
use noneuclid_harness::suite::{run_suite, RunSpec, Suite};
use noneuclid_harness::Tolerances;

#[derive(Parser)]
#[command(name = "noneuclid", version, about = "Check incidence theorems on the sphere, the plane and the hyperboloid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite of random trials and report deviations.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        geometry: Geometry,
        /// Defaults to `run.trials` of the tolerance file.
        #[arg(long)]
        trials: Option<u64>,
        /// Defaults to `run.seed` of the tolerance file.
        #[arg(long)]
        seed: Option<u64>,
        /// Replace every non-control tolerance of the suite.
        #[arg(long)]
        tol: Option<f64>,
        /// Curve degree for `carnot-n`.
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        degree: u32,
        /// Tolerance file; the built-in defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write a per-trial CSV report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate one scene and write it as JSON.
    Gen {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        geometry: Geometry,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        degree: u32,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the assertions embedded in a scene file.
    Check {
        scene: PathBuf,
        /// Print passing assertions too.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Write chart-coordinate points and curve polylines as CSV.
    ExportPlot {
        scene: PathBuf,
        /// `z=1`, `pole`, or a plane normal `a,b,c`.
        #[arg(long, default_value = "z=1")]
        plane: PlaneSpec,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of the command itself rather than of a checked invariant.
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn tolerances(path: &Option<PathBuf>) -> anyhow::Result<Tolerances> {
    Ok(match path {
        Some(p) => Tolerances::load(p)?,
        None => Tolerances::default(),
    })
}

fn run(cli: Cli) -> Result<bool, Usage> {
    match cli.command {
        Command::Verify { suite, geometry, trials, seed, tol, degree, config, report: path } => {
            let mut t = tolerances(&config)?;
            if let Some(x) = tol {
                if !(x >= 0.0) {
                    return Err(Usage(anyhow::anyhow!("--tol must be non-negative")));
                }
                t.override_suite(suite, x);
            }
            let spec = RunSpec::new(suite, geometry, trials.unwrap_or(t.run.trials as u64), seed.unwrap_or(t.run.seed))
                .with_degree(degree);
            let r = run_suite(&spec, &t)?;
            print!("{}", report::render(&r));
            if let Some(p) = &path {
                report::write_csv(&r, output(&Some(p.clone()))?).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(r.all_passed())
        }
        Command::Gen { suite, geometry, seed, trial, degree, config, out } => {
            if suite == Suite::CarnotN && !(1..=3).contains(&degree) {
                return Err(Usage(anyhow::anyhow!("--degree must be 1, 2 or 3")));
            }
            let t = tolerances(&config)?;
            t.validate(suite)?;
            let scene = generate_scene(&Request { suite, geometry, seed, trial, degree }, &t);
            match scene {
                Ok(scene) => {
                    let mut w = output(&out)?;
                    w.write_all(scene.to_json().as_bytes())?;
                    w.flush()?;
                    Ok(true)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(false)
                }
            }
        }
        Command::Check { scene, verbose } => {
            let s = Scene::read(&scene)?;
            let outcomes = check_scene(&s)?;
            let mut failed = 0;
            for o in &outcomes {
                if !o.pass {
                    failed += 1;
                }
                if verbose || !o.pass {
                    let cmp = match o.relation {
                        Relation::Within => "<=",
                        Relation::Beyond => ">",
                    };
                    let value = match &o.value {
                        Ok(v) => format_num(*v),
                        Err(e) => format!("error: {e}"),
                    };
                    println!(
                        "{} {} ({}): value {value}, deviation {} {cmp} {}",
                        if o.pass { "pass" } else { "FAIL" },
                        o.label,
                        o.predicate,
                        format_num(o.deviation),
                        format_num(o.tol)
                    );
                }
            }
            println!("{}: {} of {} assertions passed", scene.display(), outcomes.len() - failed, outcomes.len());
            Ok(failed == 0)
        }
        Command::ExportPlot { scene, plane, grid, out } => {
            let s = Scene::read(&scene)?;
            if grid < 2 {
                return Err(Usage(anyhow::anyhow!("--grid must be at least 2")));
            }
            let summary = plot::export(&s, plane, grid, output(&out)?)?;
            eprintln!(
                "{} points ({} at infinity skipped), {} curve polylines",
                summary.points, summary.skipped_points, summary.polylines
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
