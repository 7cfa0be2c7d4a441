use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hitchin_core::error::ConfigError;
use hitchin_core::flows::{FlowConfig, FlowState};
use hitchin_core::harness::{
    self, build_set, exit_code_for, CheckName, CheckStatus, RunManifest, Tolerances, VerifyReport, EXIT_CHECK_FAILURE,
    EXIT_PASS,
};
use hitchin_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "hitchin", version, about = "Genus-2 Hitchin Hamiltonians: construction and verification")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Six distinct branch values as rationals, e.g. `0,1,-1,2,3,5` or `1/2,...`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Option<Vec<String>>,
    /// Map (λ1, λ2, λ3) to (0, 1, −1) before building.
    #[arg(long, global = true)]
    normalize: bool,
    /// Global seed for all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; JSON by default, CSV by default for `kummer sample` and `flow run`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long = "tol-construction", global = true, allow_hyphen_values = true)]
    tol_construction: Option<f64>,
    #[arg(long = "tol-pencil", global = true, allow_hyphen_values = true)]
    tol_pencil: Option<f64>,
    #[arg(long = "tol-membership", global = true, allow_hyphen_values = true)]
    tol_membership: Option<f64>,
    #[arg(long = "tol-tangent", global = true, allow_hyphen_values = true)]
    tol_tangent: Option<f64>,
    #[arg(long = "tol-bitangent", global = true, allow_hyphen_values = true)]
    tol_bitangent: Option<f64>,
    #[arg(long = "tol-drift", global = true, allow_hyphen_values = true)]
    tol_drift: Option<f64>,
    #[arg(long = "tol-control", global = true, allow_hyphen_values = true)]
    tol_control: Option<f64>,
    #[arg(long = "tol-commutation", global = true, allow_hyphen_values = true)]
    tol_commutation: Option<f64>,
    #[arg(long = "tol-weierstrass", global = true, allow_hyphen_values = true)]
    tol_weierstrass: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the six Hamiltonians and emit them as JSON.
    Hamiltonians,
    /// Run verification checks; exit 0 if all pass, 1 on failure, 2 on bad configuration.
    Verify {
        /// `all`, `rank`, `flows`, `identities`, or a single check name such as `involution` or `pencil`.
        #[arg(default_value = "all")]
        suite: String,
        /// Perturb one coefficient of H1 to exercise the failure path.
        #[arg(long)]
        inject_mutation: bool,
        /// Re-run a manifest saved by an earlier run; other configuration flags are ignored.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Kummer surface tools.
    Kummer {
        #[command(subcommand)]
        action: KummerAction,
    },
    /// Hamiltonian flows.
    Flow {
        #[command(subcommand)]
        action: FlowAction,
    },
    /// Full suite plus the mutation negative control.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum KummerAction {
    /// Sample singular lines and their foci.
    Sample {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Emit the Kummer quartic.
    Quartic,
}

#[derive(Subcommand, Debug)]
enum FlowAction {
    /// Integrate the flow of one affine Hamiltonian.
    Run {
        #[arg(long = "i")]
        index: usize,
        /// Start state `x,y,z,u,v,w`.
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
    },
}

impl GlobalArgs {
    fn manifest(&self, command: &str, checks: Vec<CheckName>) -> Result<RunManifest, ConfigError> {
        let mut m = RunManifest {
            seed: self.seed,
            normalize: self.normalize,
            command: command.to_owned(),
            checks,
            ..Default::default()
        };
        if let Some(l) = &self.lambdas {
            m.lambdas = l.clone();
        }
        let tolerances: [(&str, Option<f64>); 9] = [
            ("construction", self.tol_construction),
            ("pencil", self.tol_pencil),
            ("membership", self.tol_membership),
            ("tangent", self.tol_tangent),
            ("bitangent", self.tol_bitangent),
            ("drift", self.tol_drift),
            ("control", self.tol_control),
            ("commutation", self.tol_commutation),
            ("weierstrass", self.tol_weierstrass),
        ];
        let mut tol = Tolerances::default();
        for (name, value) in tolerances {
            if let Some(v) = value {
                tol.set(name, v)?;
            }
        }
        m.tolerances = tol;
        Ok(m)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `<out>.manifest.json` next to an output file.
fn save_manifest(out: Option<&Path>, manifest: &RunManifest) -> Result<()> {
    if let Some(p) = out {
        let mut name = p.as_os_str().to_owned();
        name.push(".manifest.json");
        std::fs::write(PathBuf::from(name), serde_json::to_string_pretty(manifest)? + "\n")?;
    }
    Ok(())
}

fn config_error(msg: String) -> Error {
    ConfigError::Invalid(msg).into()
}

fn write_report(report: &VerifyReport, format: Format, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, report)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            let io_err = |e: csv::Error| Error::Io(io::Error::other(e));
            csv.write_record(["check", "status", "quantity", "value", "bound", "passed"]).map_err(io_err)?;
            for c in report.checks.values() {
                let status = serde_json::to_value(c.status)?.as_str().unwrap_or_default().to_owned();
                if c.measurements.is_empty() {
                    csv.write_record([c.name.as_str(), &status, "", "", "", ""]).map_err(io_err)?;
                }
                for m in &c.measurements {
                    let bound = serde_json::to_string(&m.bound)?;
                    csv.write_record([
                        c.name.as_str(),
                        &status,
                        &m.quantity,
                        &harness::format_float(m.value),
                        &bound,
                        &m.passed.to_string(),
                    ])
                    .map_err(io_err)?;
                }
            }
            csv.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

fn summarize(report: &VerifyReport) {
    for c in report.checks.values() {
        let tag = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        eprintln!("{tag} {}: {}", c.name, c.description);
        if c.status == CheckStatus::Fail {
            for m in c.measurements.iter().filter(|m| !m.passed) {
                eprintln!("     {} = {:e} ({:?})", m.quantity, m.value, m.bound);
            }
            if !c.details.is_null() {
                eprintln!("     {}", c.details);
            }
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let g = &cli.global;
    let out = g.out.as_deref();
    match &cli.command {
        Command::Hamiltonians => {
            if g.format == Some(Format::Csv) {
                return Err(config_error("hamiltonians are emitted as JSON only".into()));
            }
            let manifest = g.manifest("hamiltonians", Vec::new())?;
            let set = build_set(&manifest)?;
            match out {
                Some(p) => {
                    let summary = harness::emit_hamiltonians(&set, p)?;
                    eprintln!("affine term counts: {:?}", summary.affine_term_counts);
                }
                None => print!("{}", harness::hamiltonian_json(&set)?),
            }
            save_manifest(out, &manifest)?;
            Ok(EXIT_PASS)
        }
        Command::Verify {
            suite,
            inject_mutation,
            manifest,
        } => {
            let manifest = match manifest {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str::<RunManifest>(&text).map_err(|e| config_error(format!("bad manifest: {e}")))?
                }
                None => {
                    let checks = CheckName::group(suite)
                        .ok_or_else(|| config_error(format!("unknown verification suite `{suite}`")))?;
                    let mut m = g.manifest(&format!("verify {suite}"), checks)?;
                    m.inject_mutation = *inject_mutation;
                    m
                }
            };
            let report = harness::run_verify_suite(&manifest)?;
            summarize(&report);
            write_report(&report, g.format.unwrap_or(Format::Json), out)?;
            save_manifest(out, &report.manifest)?;
            Ok(report.exit_code())
        }
        Command::Kummer { action } => {
            let manifest = g.manifest(
                match action {
                    KummerAction::Sample { .. } => "kummer sample",
                    KummerAction::Quartic => "kummer quartic",
                },
                Vec::new(),
            )?;
            let curve = manifest.curve()?;
            match action {
                KummerAction::Sample { count } => {
                    let rows = harness::kummer_samples(&curve, *count, manifest.seed)?;
                    let mut w = output(out)?;
                    match g.format.unwrap_or(Format::Csv) {
                        Format::Csv => harness::write_kummer_csv(&rows, &mut w)?,
                        Format::Json => {
                            serde_json::to_writer_pretty(&mut w, &rows)?;
                            writeln!(w)?;
                        }
                    }
                    w.flush()?;
                }
                KummerAction::Quartic => {
                    if g.format == Some(Format::Csv) {
                        return Err(config_error("the quartic is emitted as JSON only".into()));
                    }
                    let mut w = output(out)?;
                    serde_json::to_writer_pretty(&mut w, &harness::kummer_document(&curve)?)?;
                    writeln!(w)?;
                    w.flush()?;
                }
            }
            save_manifest(out, &manifest)?;
            Ok(EXIT_PASS)
        }
        Command::Flow {
            action: FlowAction::Run {
                index,
                state,
                step,
                steps,
            },
        } => {
            if g.format == Some(Format::Json) {
                return Err(config_error("trajectories are emitted as CSV only".into()));
            }
            let manifest = g.manifest(&format!("flow run --i {index}"), Vec::new())?;
            let state: FlowState = state.parse()?;
            let cfg = FlowConfig::new(*step, *steps, manifest.tolerances.drift)?;
            if !manifest.curve()?.is_real() {
                return Err(config_error("flows need real branch values".into()));
            }
            let set = build_set(&manifest)?;
            let mut w = output(out)?;
            let rows = harness::run_flow(&set, *index, &state, &cfg, &mut w)?;
            w.flush()?;
            eprintln!("wrote {rows} states");
            save_manifest(out, &manifest)?;
            Ok(EXIT_PASS)
        }
        Command::Selftest => {
            let manifest = g.manifest("selftest", CheckName::ALL.to_vec())?;
            let report = harness::run_verify_suite(&manifest)?;
            summarize(&report);
            let control = harness::run_verify_suite(&RunManifest {
                inject_mutation: true,
                checks: vec![CheckName::Involution],
                command: "selftest mutation control".into(),
                ..manifest.clone()
            })?;
            let detected = !control.passed;
            eprintln!(
                "{} mutation control: injected perturbation {}",
                if detected { "PASS" } else { "FAIL" },
                if detected { "detected" } else { "NOT detected" }
            );
            write_report(&report, g.format.unwrap_or(Format::Json), out)?;
            Ok(if report.passed && detected {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
