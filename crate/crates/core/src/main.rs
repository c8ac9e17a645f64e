use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use liouskin::bethe::{match_levels, scan_roots, write_roots_csv, RootOptions};
use liouskin::liouvillian::{build_effective_liouvillian, build_full_liouvillian};
use liouskin::observables::{density_profile, write_profile_csv, ObservableRecord, Weighting};
use liouskin::scenario::{run_scenario, DeltaRule, ScenarioConfig};
use liouskin::spectra::{dense_spectrum, steady_state, write_steady_csv, MAX_DENSE_DIM};
use liouskin::verify::verify_suite;
use liouskin::{build_sector, Boundary, Error, ModelParams, Result};

/// Dissipative XXZ chains: operators, Bethe roots, steady states and scans.
///
/// Exit status: 0 on success, 1 for invalid input, 2 for numerical failures.
#[derive(Parser)]
#[command(name = "liouskin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the structural check suite.
    Verify {
        /// Largest chain length in the sector checks.
        #[arg(long = "max-L", default_value_t = 4)]
        max_l: usize,
    },
    /// Run a scenario config and write its artifacts.
    Run { config: PathBuf },
    /// Scan Bethe roots of one chain (M = 1 or 2) and print them as CSV.
    Bae {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Print the steady state of one chain as CSV.
    Steady {
        #[command(flatten)]
        model: ModelArgs,
        /// Print the site occupation profile instead of configuration weights.
        #[arg(long)]
        profile: bool,
    },
    /// Export a sector operator (or the full superoperator) in sparse text form.
    ExportOp {
        #[command(flatten)]
        model: ModelArgs,
        /// Export the 4^L superoperator instead of the M sector.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    bc: Boundary,
    #[arg(long = "L")]
    l: usize,
    #[arg(long = "M")]
    m: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    j: f64,
    /// Number or "c*JL" / "c*JR".
    #[arg(long = "deltaL", default_value = "0")]
    delta_l: DeltaRule,
    #[arg(long = "deltaR", default_value = "0")]
    delta_r: DeltaRule,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        let mut p = ModelParams::new(self.l, self.m, self.bc)
            .with_j(self.j)
            .with_phi(self.phi);
        if self.bc == Boundary::Generalized {
            p = p.with_deltas(
                self.delta_l.eval(self.j, self.phi),
                self.delta_r.eval(self.j, self.phi),
            );
        }
        p.validate()?;
        Ok(p)
    }
}

fn report(e: &Error) {
    let mut err = io::stderr().lock();
    match e {
        Error::Config(list) => {
            for msg in list {
                let _ = writeln!(err, "error kind=config message={msg:?}");
            }
        }
        Error::Scenario {
            operation,
            params,
            source,
        } => {
            let _ = writeln!(
                err,
                "error kind={} operation={operation} params={params:?} message={:?}",
                e.kind(),
                source.to_string()
            );
        }
        other => {
            let _ = writeln!(
                err,
                "error kind={} message={:?}",
                other.kind(),
                other.to_string()
            );
        }
    }
}

fn stdout() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify { max_l } => {
            let checks = verify_suite(max_l);
            let mut out = stdout();
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            out.flush()?;
            Ok(if checks.iter().all(|c| c.passed) {
                0
            } else {
                2
            })
        }
        Command::Run { config } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let outcome = run_scenario(&cfg)?;
            let mut out = stdout();
            for f in &outcome.manifest.files {
                writeln!(
                    out,
                    "{} rows={} sha256={}",
                    outcome.output.join(&f.name).display(),
                    f.rows,
                    f.sha256
                )?;
            }
            for c in &outcome.manifest.failed_checks {
                writeln!(out, "{c}")?;
            }
            out.flush()?;
            Ok(outcome.exit_code())
        }
        Command::Bae { model } => {
            let p = model.params()?;
            let roots = scan_roots(&p, &RootOptions::default())?;
            let mut out = stdout();
            write_roots_csv(&roots, &mut out)?;
            out.flush()?;
            let basis = build_sector(p.l, p.m)?;
            if basis.dim() <= MAX_DENSE_DIM {
                let levels =
                    dense_spectrum(&build_effective_liouvillian(&p, &basis)?, false)?.eigenvalues;
                let energies: Vec<_> = roots.iter().map(|r| r.energy).collect();
                let cov = match_levels(&energies, &levels, f64::INFINITY);
                eprintln!(
                    "{} roots, {}/{} levels matched, worst energy error {:.3e}",
                    roots.len(),
                    cov.matched,
                    cov.dim,
                    cov.max_error()
                );
            }
            Ok(0)
        }
        Command::Steady { model, profile } => {
            let p = model.params()?;
            let basis = build_sector(p.l, p.m)?;
            let state = steady_state(&build_effective_liouvillian(&p, &basis)?, &basis)?;
            let mut out = stdout();
            if profile {
                let prof = density_profile(&state.probabilities, &basis, Weighting::Probability)?;
                let rec = ObservableRecord::from_profile(&p, prof, "steady")?;
                write_profile_csv(std::slice::from_ref(&rec), &mut out)?;
                eprintln!(
                    "imbalance {:.16e}, residual {:.3e}",
                    rec.imbalance, state.residual
                );
            } else {
                write_steady_csv(&state, &basis, &mut out)?;
            }
            out.flush()?;
            Ok(0)
        }
        Command::ExportOp { model, full, out } => {
            let p = model.params()?;
            let op = if full {
                build_full_liouvillian(&p)?
            } else {
                build_effective_liouvillian(&p, &build_sector(p.l, p.m)?)?
            };
            match out {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(&path)?);
                    op.write_text(&mut w)?;
                    w.flush()?;
                }
                None => {
                    let mut w = stdout();
                    op.write_text(&mut w)?;
                    w.flush()?;
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            report(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
