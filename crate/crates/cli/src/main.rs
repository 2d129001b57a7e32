//! `projkit` command-line front end.
//!
//! Exit codes: 0 projector, 1 not a projector, 2 inconclusive, 64 input error.

mod problem;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use projkit::certifier::oracle::{oracle_project, DEFAULT_RESOLUTION};
use projkit::certifier::{
    firm_nonexpansiveness_check, gradient_criterion_check, identity_suite, idempotence_check,
    monotonicity_check, CheckReport, IdentityReport,
};
use projkit::fixtures::{reproduce, FixtureReport, FIXTURES};
use projkit::{decide_linear_combination, Certificate, Combination, OperatorHandle, SampleConfig, SetDescriptor};
use serde::Serialize;

use problem::{ProblemFile, Task};

const EXIT_PROJECTOR: u8 = 0;
const EXIT_NOT_PROJECTOR: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 64;

/// Points per set in `oracle-compare`; the grid oracle is slow.
const ORACLE_POINTS: usize = 64;
/// Frank-Wolfe agreement for polytopes.
const POLYTOPE_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "projkit", version, about = "Decide and certify sums of convex projectors")]
struct Cli {
    #[command(flatten)]
    config: ConfigFlags,
    /// Compact JSON output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the sampling configuration. Unset flags keep the value
/// from the problem file, or the library default.
#[derive(Args, Debug, Default)]
struct ConfigFlags {
    /// Seed for every random stream [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sampled points per check [default: 512]
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Standard deviation of sampled points [default: 1]
    #[arg(long, global = true)]
    scale: Option<f64>,
    /// Absolute tolerance [default: 1e-8]
    #[arg(long, global = true)]
    atol: Option<f64>,
    /// Relative tolerance [default: 1e-8]
    #[arg(long, global = true)]
    rtol: Option<f64>,
    /// Finite-difference step, in (0, 1e-2] [default: 1e-4]
    #[arg(long = "fd-step", global = true)]
    fd_step: Option<f64>,
}

impl ConfigFlags {
    fn apply(&self, mut cfg: SampleConfig) -> SampleConfig {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.samples {
            cfg.n_samples = v;
        }
        if let Some(v) = self.scale {
            cfg.scale = v;
        }
        if let Some(v) = self.atol {
            cfg.atol = v;
        }
        if let Some(v) = self.rtol {
            cfg.rtol = v;
        }
        if let Some(v) = self.fd_step {
            cfg.fd_step = v;
        }
        cfg
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the task named in the problem file.
    Run { file: Option<PathBuf> },
    /// Decide whether the combination is a projector.
    Decide { file: Option<PathBuf> },
    /// Decide, then run the law checks and identity suite on the operator.
    Certify { file: Option<PathBuf> },
    /// Compare each set's projector with the independent oracle.
    OracleCompare { file: Option<PathBuf> },
    /// Reproduce a named fixture, or all of them.
    Reproduce {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Print the canonical form of a problem file.
    Fmt { file: Option<PathBuf> },
}

/// Failure before any verdict could be reached.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

struct Output {
    json: serde_json::Value,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&out.json)
            } else {
                serde_json::to_string(&out.json)
            }
            .expect("reports serialize");
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(out.code)
        }
        Err(InputError(msg)) => {
            eprintln!("projkit: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, InputError> {
    match &cli.command {
        Command::Reproduce { name, list } => {
            let cfg = cli.config.apply(SampleConfig::default());
            cfg.validate()?;
            if *list {
                let names: Vec<_> = FIXTURES
                    .iter()
                    .map(|(n, d)| serde_json::json!({"name": n, "description": d}))
                    .collect();
                return Ok(Output {
                    json: names.into(),
                    code: EXIT_PROJECTOR,
                });
            }
            match name {
                Some(name) => cmd_reproduce(name, &cfg),
                None => cmd_reproduce_all(&cfg),
            }
        }
        Command::Fmt { file } => {
            let p = load(file.as_ref())?;
            Ok(Output {
                json: serde_json::to_value(&p)?,
                code: EXIT_PROJECTOR,
            })
        }
        Command::Run { file } => {
            let p = load(file.as_ref())?;
            let task = p.task;
            dispatch(task, &p, &cli.config)
        }
        Command::Decide { file } => dispatch(Task::Decide, &load(file.as_ref())?, &cli.config),
        Command::Certify { file } => dispatch(Task::Certify, &load(file.as_ref())?, &cli.config),
        Command::OracleCompare { file } => dispatch(Task::OracleCompare, &load(file.as_ref())?, &cli.config),
    }
}

fn load(path: Option<&PathBuf>) -> Result<ProblemFile, InputError> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| InputError(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(ProblemFile::parse(&text).map_err(InputError)?)
}

fn dispatch(task: Task, p: &ProblemFile, flags: &ConfigFlags) -> Result<Output, InputError> {
    let cfg = flags.apply(p.config.clone());
    cfg.validate()?;
    if task == Task::Reproduce {
        let name = p.fixture.as_deref().ok_or_else(|| InputError("no fixture named".into()))?;
        return cmd_reproduce(name, &cfg);
    }
    let comb = p
        .combination
        .as_ref()
        .ok_or_else(|| InputError(format!("task {task} needs a combination")))?;
    match task {
        Task::Decide => cmd_decide(comb, &cfg),
        Task::Certify => cmd_certify(comb, &cfg),
        Task::OracleCompare => cmd_oracle_compare(comb, &cfg),
        Task::Reproduce => unreachable!(),
    }
}

fn verdict_code(cert: &Certificate) -> u8 {
    if cert.is_projector() {
        EXIT_PROJECTOR
    } else if cert.is_not_projector() {
        EXIT_NOT_PROJECTOR
    } else {
        EXIT_INCONCLUSIVE
    }
}

fn cmd_decide(comb: &Combination, cfg: &SampleConfig) -> Result<Output, InputError> {
    let cert = decide_linear_combination(comb, cfg)?;
    Ok(Output {
        code: verdict_code(&cert),
        json: serde_json::to_value(&cert)?,
    })
}

#[derive(Serialize)]
struct CertifyReport<'a> {
    certificate: &'a Certificate,
    checks: Vec<CheckReport>,
    identities: IdentityReport,
    /// True when the sampled checks agree with the verdict.
    consistent: bool,
}

fn cmd_certify(comb: &Combination, cfg: &SampleConfig) -> Result<Output, InputError> {
    let cert = decide_linear_combination(comb, cfg)?;
    let op = OperatorHandle::combination(comb.terms())?;
    let checks = vec![
        idempotence_check(&op, cfg),
        firm_nonexpansiveness_check(&op, cfg),
        monotonicity_check(&op, cfg),
        gradient_criterion_check(&op, cfg),
    ];
    let identities = identity_suite(&cfg.fresh_points(comb.dim()), comb)?;
    let all_pass = checks.iter().all(|c| c.pass);
    let mut code = verdict_code(&cert);
    // A sampled check contradicting a projector verdict downgrades it.
    let consistent = !cert.is_projector() || (all_pass && identities.pass);
    if !consistent {
        eprintln!("projkit: sampled checks disagree with the certificate");
        code = EXIT_INCONCLUSIVE;
    }
    let report = CertifyReport {
        certificate: &cert,
        checks,
        identities,
        consistent,
    };
    Ok(Output {
        code,
        json: serde_json::to_value(&report)?,
    })
}

#[derive(Serialize)]
struct OracleEntry {
    set: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Serialize)]
struct OracleReport {
    seed: u64,
    resolution: f64,
    n_points: usize,
    sets: Vec<OracleEntry>,
    pass: bool,
}

fn cmd_oracle_compare(comb: &Combination, cfg: &SampleConfig) -> Result<Output, InputError> {
    let n = comb.dim();
    let points: Vec<_> = cfg.fresh_points(n).into_iter().take(2 * n + 1 + ORACLE_POINTS).collect();
    let mut seen: Vec<&SetDescriptor> = Vec::new();
    let mut sets = Vec::new();
    for (_, s) in comb.terms() {
        if seen.contains(&s) {
            continue;
        }
        seen.push(s);
        sets.push(compare_one(s, &points));
    }
    let mismatch = sets.iter().any(|e| e.status == "disagree");
    let unsupported = sets.iter().any(|e| e.status == "unsupported");
    let code = if mismatch {
        EXIT_NOT_PROJECTOR
    } else if unsupported {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PROJECTOR
    };
    let report = OracleReport {
        seed: cfg.seed,
        resolution: DEFAULT_RESOLUTION,
        n_points: points.len(),
        sets,
        pass: !mismatch && !unsupported,
    };
    Ok(Output {
        code,
        json: serde_json::to_value(&report)?,
    })
}

fn compare_one(s: &SetDescriptor, points: &[projkit::Vector]) -> OracleEntry {
    let n = s.dim();
    let bound = if matches!(s, SetDescriptor::Polytope { .. }) {
        POLYTOPE_TOL
    } else {
        2.0 * DEFAULT_RESOLUTION * (n as f64).sqrt()
    };
    let mut worst: f64 = 0.0;
    for x in points {
        let exact = match s.project(x) {
            Ok(p) => p,
            Err(e) => return unsupported(s, e.to_string()),
        };
        match oracle_project(s, x, DEFAULT_RESOLUTION) {
            Ok(o) => worst = worst.max(exact.dist(&o)),
            Err(e) => return unsupported(s, e.to_string()),
        }
    }
    OracleEntry {
        set: s.label(),
        status: if worst <= bound { "agree" } else { "disagree" },
        max_error: Some(worst),
        bound: Some(bound),
        reason: None,
    }
}

fn unsupported(s: &SetDescriptor, reason: String) -> OracleEntry {
    OracleEntry {
        set: s.label(),
        status: "unsupported",
        max_error: None,
        bound: None,
        reason: Some(reason),
    }
}

fn cmd_reproduce(name: &str, cfg: &SampleConfig) -> Result<Output, InputError> {
    let report = reproduce(name, cfg)?;
    Ok(Output {
        code: if report.pass { EXIT_PROJECTOR } else { EXIT_NOT_PROJECTOR },
        json: serde_json::to_value(&report)?,
    })
}

fn cmd_reproduce_all(cfg: &SampleConfig) -> Result<Output, InputError> {
    let reports = FIXTURES
        .iter()
        .map(|(name, _)| reproduce(name, cfg))
        .collect::<Result<Vec<FixtureReport>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);
    Ok(Output {
        code: if pass { EXIT_PROJECTOR } else { EXIT_NOT_PROJECTOR },
        json: serde_json::to_value(&reports)?,
    })
}
