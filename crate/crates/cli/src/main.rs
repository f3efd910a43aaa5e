mod commands;
mod error;
mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use commands::Outcome;
use error::CliError;
use scenario::Scenario;

/// Exit status for parse and validation errors.
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(
    name = "cochain-net",
    version,
    about = "Cochain key schedules on networks (toy cryptography)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArg {
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated intruder names; overrides `[attack] intruders`.
    #[arg(long)]
    intruders: Option<String>,
    /// Two comma-separated names; overrides `[attack] target`.
    #[arg(long)]
    target: Option<String>,
    /// Add wall-clock time to the report (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum AttackKind {
    Mitm(AttackArgs),
    Gerbe3(AttackArgs),
    Tower(AttackArgs),
}

#[derive(Subcommand)]
enum Command {
    VerifyCocycle(ScenarioArg),
    Trivialize(ScenarioArg),
    Send {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        path: String,
        /// Decimal or `0x` hexadecimal; defaults to the identity.
        #[arg(long)]
        header: Option<String>,
    },
    KdcSession {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    Dh {
        #[arg(long, conflicts_with_all = ["p", "alpha"])]
        scenario: Option<PathBuf>,
        #[arg(long, required_unless_present = "scenario")]
        p: Option<u64>,
        #[arg(long)]
        alpha: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    GerbeKeys(ScenarioArg),
    TowerBuild(ScenarioArg),
    #[command(subcommand)]
    Attack(AttackKind),
    SecrecyAudit {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        path: String,
    },
    EntropyReport {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        triangle: String,
    },
    Cost {
        #[arg(long)]
        users: u64,
        #[arg(long)]
        bits: u32,
        #[arg(long)]
        genus: Option<u64>,
    },
}

type AttackFn = fn(&Scenario, Option<&str>, Option<&str>, bool) -> Result<Outcome, CliError>;

/// Seed precedence: environment, then flag, then scenario.
fn seed(flag: Option<u64>, sc: Option<&Scenario>) -> Result<u64, CliError> {
    match std::env::var(scenario::SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Invalid(format!(
                "{} is not an unsigned integer: `{v}`",
                scenario::SEED_ENV
            ))
        }),
        Err(_) => Ok(flag.or(sc.and_then(|s| s.seed)).unwrap_or(0)),
    }
}

fn run(cmd: Command) -> Result<Outcome, CliError> {
    use commands::*;
    let load = |p: &PathBuf| Scenario::load(p);
    match cmd {
        Command::VerifyCocycle(a) => verify_cocycle(&load(&a.scenario)?),
        Command::Trivialize(a) => trivialize_cmd(&load(&a.scenario)?),
        Command::Send {
            scenario,
            path,
            header,
        } => send(&load(&scenario)?, &path, header.as_deref()),
        Command::KdcSession {
            scenario,
            from,
            to,
            seed: flag,
        } => {
            let sc = load(&scenario)?;
            kdc_session(&sc, &from, &to, seed(flag, Some(&sc))?)
        }
        Command::Dh {
            scenario,
            p,
            alpha,
            seed: flag,
        } => match scenario {
            Some(path) => {
                let sc = load(&path)?;
                dh_scenario(&sc, seed(flag, Some(&sc))?)
            }
            None => dh_flags(p.expect("clap requires --p"), alpha, seed(flag, None)?),
        },
        Command::GerbeKeys(a) => gerbe_keys(&load(&a.scenario)?),
        Command::TowerBuild(a) => tower_build(&load(&a.scenario)?),
        Command::Attack(kind) => {
            let (f, a): (AttackFn, AttackArgs) = match kind {
                AttackKind::Mitm(a) => (attack_mitm, a),
                AttackKind::Gerbe3(a) => (attack_gerbe3, a),
                AttackKind::Tower(a) => (attack_tower, a),
            };
            f(
                &load(&a.scenario)?,
                a.intruders.as_deref(),
                a.target.as_deref(),
                a.timing,
            )
        }
        Command::SecrecyAudit { scenario, path } => secrecy_audit(&load(&scenario)?, &path),
        Command::EntropyReport { scenario, triangle } => {
            entropy_report(&load(&scenario)?, &triangle)
        }
        Command::Cost { users, bits, genus } => cost(users, bits, genus),
    }
}

/// Rounds every non-integer number to twelve decimals.
fn fix_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let r = (x * 1e12).round() / 1e12;
            *v = serde_json::Number::from_f64(if r == 0.0 { 0.0 } else { r })
                .map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(fix_floats),
        Value::Object(o) => o.values_mut().for_each(fix_floats),
        _ => {}
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(mut out) => {
            fix_floats(&mut out.json);
            let _ = writeln!(
                std::io::stdout().lock(),
                "{}",
                serde_json::to_string_pretty(&out.json).expect("json")
            );
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            let _ = writeln!(
                std::io::stderr().lock(),
                "{}",
                serde_json::to_string_pretty(&e.to_json()).expect("json")
            );
            ExitCode::from(EXIT_INVALID)
        }
    }
}
