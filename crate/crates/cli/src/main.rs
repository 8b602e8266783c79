use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use boundary_ising::commands;
use boundary_ising::config::{BranchArg, Format, GridKind, Overrides, Settings};
use boundary_ising::output::{self, RunManifest, SuiteCounts};
use boundary_ising::verify::{run_suite, SuiteOptions};
use boundary_ising::CliError;

/// Local magnetization of the massive boundary Ising model.
#[derive(Debug, Parser)]
#[command(name = "boundary-ising", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Magnetization profile sigma(t, lambda) on a grid
    Profile(Common),
    /// The transcendent phi(r) and phi'(r)
    Phi(Common),
    /// Form-factor terms and truncation bound at one point
    Ff(Common),
    /// Run the verification suite
    Verify(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Boundary coupling lambda = 4 pi h^2 / m
    #[arg(long)]
    lambda: Option<f64>,
    /// stable, metastable or highT
    #[arg(long)]
    branch: Option<BranchArg>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// log or linear
    #[arg(long)]
    grid: Option<GridKind>,
    /// Matching radius of the Bessel asymptotics
    #[arg(long)]
    r_max: Option<f64>,
    /// Seeding point of the magnetization equation
    #[arg(long)]
    t0: Option<f64>,
    /// Relative tolerance of the integrators
    #[arg(long)]
    tol: Option<f64>,
    /// Truncation order of the form-factor expansion (ff)
    #[arg(long)]
    kmax: Option<usize>,
    /// Gauss-Legendre nodes per dimension of the form-factor quadrature
    #[arg(long)]
    nodes: Option<usize>,
    /// csv or json
    #[arg(long)]
    format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Mass used to express sigma and y in absolute units
    #[arg(long)]
    mass: Option<f64>,
    /// Skip the form-factor comparisons (verify)
    #[arg(long)]
    quick: bool,
    /// Single radius to evaluate (phi)
    #[arg(long)]
    r: Option<f64>,
    /// Distance at which to evaluate the expansion (ff)
    #[arg(long)]
    t: Option<f64>,
    /// Flat key = value file; flags take precedence over it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, hide = true)]
    glaisher: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            lambda: self.lambda,
            branch: self.branch,
            t_min: self.t_min,
            t_max: self.t_max,
            points: self.points,
            grid: self.grid,
            r_max: self.r_max,
            t0: self.t0,
            tol: self.tol,
            kmax: self.kmax,
            nodes: self.nodes,
            format: self.format,
            output: self.output.clone(),
            mass: self.mass,
            quick: self.quick.then_some(true),
            r: self.r,
            t: self.t,
            glaisher: self.glaisher,
        }
    }

    fn settings(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                Overrides::parse(&text)?
            }
            None => Overrides::default(),
        };
        Settings::resolve(file, self.overrides())
    }
}

fn print(text: Option<String>) -> Result<(), CliError> {
    if let Some(text) = text {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    }
    Ok(())
}

fn finish(manifest: &mut RunManifest, start: Instant) {
    manifest.wall_clock = start.elapsed();
    eprintln!("{}: wall-clock {:.3} s", manifest.subcommand, manifest.wall_clock.as_secs_f64());
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    match cli.command {
        Command::Profile(c) => {
            let s = c.settings()?;
            let (table, mut manifest) = commands::profile(&s)?;
            finish(&mut manifest, start);
            print(output::emit(&table, &manifest, s.format, s.output.as_deref())?)
        }
        Command::Phi(c) => {
            let s = c.settings()?;
            let (table, mut manifest) = commands::phi(&s)?;
            finish(&mut manifest, start);
            print(output::emit(&table, &manifest, s.format, s.output.as_deref())?)
        }
        Command::Ff(c) => {
            let s = c.settings()?;
            let (table, mut manifest, warning) = commands::ff(&s)?;
            if warning {
                eprintln!("warning: form-factor expansion not converged here (t < 0.5 or truncation bound > 1e-3)");
            }
            finish(&mut manifest, start);
            print(output::emit(&table, &manifest, s.format, s.output.as_deref())?)
        }
        Command::Verify(c) => {
            let s = c.settings()?;
            let opts = SuiteOptions { quick: s.quick, base: s.solver_config()? };
            let report = run_suite(&opts);
            let mut manifest = RunManifest::new("verify", &s)?;
            manifest.suite = Some(SuiteCounts { passed: report.passed(), failed: report.failed(), skipped: report.skipped() });
            for (id, d) in &report.timings {
                eprintln!("check {id:>3}: {:.3} s", d.as_secs_f64());
            }
            finish(&mut manifest, start);
            print(output::emit_log(&report.render(), &manifest, s.format, s.output.as_deref())?)?;
            match report.failed() {
                0 => Ok(()),
                failed => Err(CliError::Verification { failed }),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
