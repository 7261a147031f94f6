mod brute;
mod problem;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use vassep_core::commutative::{
    commutative_regular_separability, regular_sep_commutative_closures, verify_commutative, CommutativeCertificate,
};
use vassep_core::linsep::Mode;
use vassep_core::reach::{forward_search, prove_unreach, OracleAnswer, ProverOptions, ReachInstance, SearchBudget};
use vassep_core::vas::{hardness_instance, normalize_pair};
use vassep_core::vassep::{decide_separability, verify_certificate, Budgets, Certificate, VerifyOptions, WitnessLimits};

use problem::{fill_section, ProblemFile};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "vassep", version)]
#[command(about = "Decide modular and unary separability of VAS reachability sections")]
#[command(after_help = "Exit codes: 0 separable/yes, 1 not separable/no, 2 unknown within budget, 3 error")]
struct Cli {
    /// Print machine-readable JSON instead of a summary
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two sections are separable and print a certificate
    Sep {
        #[arg(long, value_enum, default_value = "modular")]
        mode: ModeArg,
        /// Problem file for the first section
        a: PathBuf,
        /// Problem file for the second section
        b: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Also write the certificate JSON to this file
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Re-check a certificate against its two problem files
    Verify {
        a: PathBuf,
        b: PathBuf,
        certificate: PathBuf,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Search for a reachable target and otherwise try to prove none is reachable
    Reach {
        file: PathBuf,
        /// Target over the kept coordinates, comma separated; repeatable. Defaults to the file's targets
        #[arg(long, value_parser = parse_vector)]
        target: Vec<Point>,
        /// Largest number of configurations explored
        #[arg(long, default_value_t = 100_000)]
        budget_states: usize,
        /// Drop configurations with an entry above this value
        #[arg(long)]
        coord_cap: Option<i64>,
    },
    /// Print the normalized pair of two sections
    Normalize { a: PathBuf, b: PathBuf },
    /// Build the two sections that are separable iff a VASS state is unreachable
    GenHardness {
        /// Problem file holding a VASS
        file: PathBuf,
        /// The state whose reachability is encoded; defaults to the file's state
        #[arg(long)]
        state: Option<String>,
        /// Write u.json and v.json into this directory instead of printing
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Brute-force reference answers
    Brute {
        #[command(subcommand)]
        command: BruteCommand,
    },
    /// Decide commutative regular separability of two labeled systems
    Comsep {
        a: PathBuf,
        b: PathBuf,
        /// Phrase the result as regular separability of the commutative closures
        #[arg(long)]
        closures: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Also write the certificate JSON to this file
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BruteCommand {
    /// Section members with all entries at most --bound
    Members {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        bound: i64,
        /// Explore only configurations with entries at most this value [default: 2 * bound]
        #[arg(long)]
        cap: Option<i64>,
    },
    /// A pair of bounded members, one per section, in the same class
    Pairs {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "modular")]
        mode: ModeArg,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 10)]
        bound: i64,
        /// Explore only configurations with entries at most this value [default: 2 * bound]
        #[arg(long)]
        cap: Option<i64>,
    },
    /// Nonnegative coefficients expressing a vector over periods
    Nonneg {
        #[arg(long, value_parser = parse_vector)]
        vector: Point,
        /// One period, comma separated; repeatable
        #[arg(long, value_parser = parse_vector)]
        period: Vec<Point>,
    },
}

/// A comma-separated vector, parsed as one argument.
type Point = Vec<i64>;

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Modular,
    Unary,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Modular => Mode::Modular,
            ModeArg::Unary => Mode::Unary,
        }
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Configurations per exploration and per exhaustion attempt
    #[arg(long, default_value_t = 10_000)]
    budget_states: usize,
    /// Longest run used to build witnesses
    #[arg(long, default_value_t = 12)]
    max_run_len: usize,
    /// Largest modulus tried
    #[arg(long, default_value_t = 12)]
    max_n: u64,
    /// Witness pairs tested in total
    #[arg(long, default_value_t = 5_000)]
    max_witness_pairs: usize,
    /// Worker threads; 2 or more run both sides concurrently
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Seed for the witness pair schedule
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BudgetArgs {
    fn budgets(&self) -> Budgets {
        Budgets {
            states_per_quantum: self.budget_states,
            max_n: self.max_n,
            max_witness_pairs: self.max_witness_pairs,
            workers: self.workers,
            seed: self.seed,
            witness: WitnessLimits { max_run_len: self.max_run_len, ..WitnessLimits::default() },
            ..Budgets::default()
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Bounded members checked against a separator
    #[arg(long, default_value_t = 12)]
    member_bound: i64,
    /// Configurations explored when enumerating bounded members
    #[arg(long, default_value_t = 200_000)]
    verify_states: usize,
}

fn parse_vector(s: &str) -> Result<Vec<i64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}"))).collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_YES });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// Writes a line to standard output; a closed pipe is not an error.
fn out(line: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{line}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit<T: Serialize>(json: bool, value: &T, summary: impl FnOnce() -> String) -> Result<()> {
    if json {
        out(&serde_json::to_string_pretty(value)?)
    } else {
        out(&summary())
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn verdict_code(c: &Certificate) -> u8 {
    match c {
        Certificate::Separable { .. } => EXIT_YES,
        Certificate::NotSeparable { .. } => EXIT_NO,
        Certificate::Unknown { .. } => EXIT_UNKNOWN,
    }
}

fn summarize(c: &Certificate) -> String {
    match c {
        Certificate::Separable { mode, n, separator, proofs } => {
            format!("separable ({mode}, n = {n}): {}\n{} class proofs", serde_json::to_string(separator).unwrap_or_default(), proofs.len())
        }
        Certificate::NotSeparable { mode, proof, .. } => format!("not separable ({mode}), proof via {:?}", proof.path),
        Certificate::Unknown { mode, report } => {
            format!("unknown ({mode}) within budget: {}", serde_json::to_string(report).unwrap_or_default())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let json = cli.json;
    match cli.command {
        Command::Sep { mode, a, b, budget, cert_out } => {
            let (a, b) = (ProblemFile::load(&a)?.sectioned()?, ProblemFile::load(&b)?.sectioned()?);
            let cert = decide_separability(&a, &b, mode.into(), &budget.budgets())?;
            if let Some(p) = cert_out {
                write_json(&p, &cert)?;
            }
            emit(json, &cert, || summarize(&cert))?;
            Ok(verdict_code(&cert))
        }
        Command::Verify { a, b, certificate, verify } => {
            let (pa, pb) = (ProblemFile::load(&a)?, ProblemFile::load(&b)?);
            let text = std::fs::read_to_string(&certificate).with_context(|| format!("reading {}", certificate.display()))?;
            let opts = VerifyOptions { member_bound: verify.member_bound, max_states: verify.verify_states };
            let valid = if pa.labeled.is_some() && pb.labeled.is_some() {
                let cert: CommutativeCertificate = serde_json::from_str(&text).context("parsing certificate")?;
                verify_commutative(pa.labeled()?, pb.labeled()?, &cert, &opts)
            } else {
                let cert: Certificate = serde_json::from_str(&text).context("parsing certificate")?;
                verify_certificate(&pa.sectioned()?, &pb.sectioned()?, &cert, &opts)
            };
            emit(json, &json!({ "valid": valid }), || if valid { "valid" } else { "invalid" }.to_string())?;
            Ok(if valid { EXIT_YES } else { EXIT_NO })
        }
        Command::Reach { file, target, budget_states, coord_cap } => {
            let p = ProblemFile::load(&file)?;
            let s = p.sectioned()?;
            let targets = if target.is_empty() {
                p.targets.iter().map(|t| t.to_i64s().context("target exceeds machine integers")).collect::<Result<Vec<_>>>()?
            } else {
                target
            };
            anyhow::ensure!(!targets.is_empty(), "no target given");
            let full = targets.iter().map(|t| fill_section(&s, t)).collect::<Result<Vec<_>>>()?;
            let inst = ReachInstance::new(s.vas().clone(), full)?;
            let mut answer = forward_search(&inst, SearchBudget { max_states: budget_states, coord_cap })?;
            if matches!(answer, OracleAnswer::Unknown { .. }) {
                let opts = ProverOptions { forward_budget: budget_states, backward_budget: budget_states, ..Default::default() };
                if let Some(proofs) = prove_unreach(&inst, &opts)?.into_iter().collect::<Option<Vec<_>>>() {
                    answer = OracleAnswer::ProvedEmpty { proofs };
                }
            }
            let code = match &answer {
                OracleAnswer::Found { .. } => EXIT_YES,
                OracleAnswer::ProvedEmpty { .. } => EXIT_NO,
                OracleAnswer::Unknown { .. } => EXIT_UNKNOWN,
            };
            emit(json, &answer, || match &answer {
                OracleAnswer::Found { run, target } => {
                    let kept = s.section().apply(target).map(|t| t.to_string()).unwrap_or_default();
                    format!("found {kept} by run {run:?}")
                }
                OracleAnswer::ProvedEmpty { proofs } => format!("unreachable ({} proofs)", proofs.len()),
                OracleAnswer::Unknown { report } => format!("unknown: {}", serde_json::to_string(report).unwrap_or_default()),
            })?;
            Ok(code)
        }
        Command::Normalize { a, b } => {
            let pair = normalize_pair(&ProblemFile::load(&a)?.sectioned()?, &ProblemFile::load(&b)?.sectioned()?)?;
            emit(json, &pair, || {
                format!("dimension {}, arity {}, gadgets {:?}/{:?}", pair.dim(), pair.arity, pair.gadget_u, pair.gadget_v)
            })?;
            Ok(EXIT_YES)
        }
        Command::GenHardness { file, state, out_dir } => {
            let mut p = ProblemFile::load(&file)?;
            if state.is_some() {
                p.state = state;
            }
            let (vass, q) = p.vass_state()?;
            let (u, v) = hardness_instance(vass, q)?;
            let (u, v) = (ProblemFile::from_sectioned(&u), ProblemFile::from_sectioned(&v));
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    write_json(&dir.join("u.json"), &u)?;
                    write_json(&dir.join("v.json"), &v)?;
                    if !json {
                        out(&format!("wrote {} and {}", dir.join("u.json").display(), dir.join("v.json").display()))?;
                    }
                }
                None => out(&serde_json::to_string_pretty(&json!({ "u": u, "v": v }))?)?,
            }
            Ok(EXIT_YES)
        }
        Command::Brute { command } => brute_command(json, command),
        Command::Comsep { a, b, closures, budget, cert_out } => {
            let (pa, pb) = (ProblemFile::load(&a)?, ProblemFile::load(&b)?);
            let decide = if closures { regular_sep_commutative_closures } else { commutative_regular_separability };
            let cert = decide(pa.labeled()?, pb.labeled()?, &budget.budgets())?;
            if let Some(p) = cert_out {
                write_json(&p, &cert)?;
            }
            emit(json, &cert, || match &cert.language_separator {
                Some(l) => format!("{}\nseparator over {:?}: {}", summarize(&cert.certificate), l.alphabet, l.description),
                None => summarize(&cert.certificate),
            })?;
            Ok(verdict_code(&cert.certificate))
        }
    }
}

fn brute_command(json: bool, command: BruteCommand) -> Result<u8> {
    match command {
        BruteCommand::Members { file, bound, cap } => {
            let s = ProblemFile::load(&file)?.sectioned()?;
            let m = brute::members(&s, bound, cap.unwrap_or(2 * bound))?;
            emit(json, &m, || m.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join("\n"))?;
            Ok(EXIT_YES)
        }
        BruteCommand::Pairs { a, b, mode, n, bound, cap } => {
            let (a, b) = (ProblemFile::load(&a)?.sectioned()?, ProblemFile::load(&b)?.sectioned()?);
            let found = brute::pair(&a, &b, mode.into(), n, bound, cap.unwrap_or(2 * bound))?;
            emit(json, &json!({ "pair": found }), || match &found {
                Some((u, v)) => format!("{u:?} ~ {v:?}"),
                None => "no pair within the bound".to_string(),
            })?;
            Ok(if found.is_some() { EXIT_YES } else { EXIT_NO })
        }
        BruteCommand::Nonneg { vector, period } => {
            let found = brute::nonneg(&vector, &period)?;
            emit(json, &json!({ "coefficients": found }), || match &found {
                Some(c) => format!("{c:?}"),
                None => "no nonnegative combination".to_string(),
            })?;
            Ok(if found.is_some() { EXIT_YES } else { EXIT_NO })
        }
    }
}
