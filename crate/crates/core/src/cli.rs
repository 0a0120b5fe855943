//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and writes the result; the return value is the process exit
//! status (0 success, 1 domain error, 2 failed verification).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::analysis::{
    certify, closure_property_run, conjecture_scan, limitation_witness, necessary_check, scan_range, scan_spec,
    ScanReport, EXTENDED_M_MAX, EXTENDED_N_MAX,
};
use crate::error::{Error, Result};
use crate::involution::{check_structural_spec, fixed_point_count, involute, verify_suite};
use crate::partitions::{signed_count, EnumBudget, OrderedSetPartition};
use crate::runtheorem::run_theorem_coeffs;
use crate::series::egf_reciprocal_coeffs;
use crate::spec::ThinnedSpec;
use crate::weights::WeightTable;

const MAX_COEFF_N: usize = 50_000;
const MAX_ENUM_N: u32 = 12;
const MAX_RUN_THEOREM_N: usize = 400;
const MAX_WEIGHT_N: usize = 50_000;
const MAX_CERTIFY_N: usize = 5_000;

#[derive(Parser, Debug)]
#[command(name = "thinned", version, about = "Reciprocals of thinned exponential series")]
struct Cli {
    /// Worker threads for parallel enumeration and scans.
    #[arg(long, global = true, env = "THINNED_WORKERS", default_value_t = 1)]
    workers: usize,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Bfile,
    Text,
}

#[derive(Args, Debug)]
struct SpecSource {
    /// Inline JSON spec document.
    #[arg(long, conflicts_with = "spec_file")]
    spec: Option<String>,

    /// Path to a JSON spec document.
    #[arg(long)]
    spec_file: Option<PathBuf>,
}

impl SpecSource {
    fn load(&self) -> Result<ThinnedSpec> {
        match (&self.spec, &self.spec_file) {
            (Some(text), None) => ThinnedSpec::from_json(text),
            (None, Some(path)) => ThinnedSpec::from_json(&std::fs::read_to_string(path)?),
            _ => Err(Error::InvalidSpec("give exactly one of --spec or --spec-file".into())),
        }
    }
}

#[derive(Args, Debug)]
struct BudgetArg {
    /// Cap on the number of partitions enumerated per n.
    #[arg(long)]
    budget: Option<u128>,
}

impl BudgetArg {
    fn get(&self) -> EnumBudget {
        self.budget.map(|max_objects| EnumBudget { max_objects }).unwrap_or_default()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reciprocal coefficients c_0..c_N.
    Coeffs {
        #[command(flatten)]
        source: SpecSource,
        #[arg(long = "N")]
        n: usize,
    },
    /// Positive and negative admissible partition counts for [n].
    SignedCount {
        #[command(flatten)]
        source: SpecSource,
        #[command(flatten)]
        budget: BudgetArg,
        #[arg(long)]
        n: u32,
    },
    /// Applies the involution to one partition and prints the trace.
    Involute {
        #[command(flatten)]
        source: SpecSource,
        /// Blocks separated by '/', elements as digits or comma separated.
        #[arg(long)]
        partition: String,
    },
    /// Exhaustive involution property suite for n <= the given bound.
    Verify {
        #[command(flatten)]
        source: SpecSource,
        #[command(flatten)]
        budget: BudgetArg,
        #[arg(long)]
        n: u32,
        /// Also run the seeded closure property sample.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Number of involution fixed points on [n].
    FixedPoints {
        #[command(flatten)]
        source: SpecSource,
        #[command(flatten)]
        budget: BudgetArg,
        #[arg(long)]
        n: u32,
    },
    /// Run-length weights w_0..w_N.
    Weights {
        #[command(flatten)]
        source: SpecSource,
        #[arg(long = "N")]
        n: usize,
    },
    /// Run weights from the ordinary reciprocal and the b_n = c_n check.
    RunTheorem {
        #[command(flatten)]
        source: SpecSource,
        #[arg(long = "N")]
        n: usize,
    },
    /// Negativity scan of the reduced family, or of one spec.
    Scan {
        #[command(flatten)]
        source: SpecSource,
        /// Scan only this member of the family.
        #[arg(long, conflicts_with = "m_max")]
        m: Option<u32>,
        /// Scan members 1..=m-max.
        #[arg(long)]
        m_max: Option<u32>,
        #[arg(long, default_value_t = 400)]
        n_max: usize,
        /// Full evidence envelope; takes hours.
        #[arg(long, conflicts_with_all = ["m", "m_max", "n_max"])]
        extended: bool,
        /// JSON-lines checkpoint, reused and appended to.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Include runtimes in the output.
        #[arg(long)]
        timings: bool,
    },
    /// Closed-form value of c_{2m+2} for A∪B = [2m].
    Necessary {
        #[arg(long)]
        m: u32,
        /// Adjoin the even tail 2m+2, 2m+4, ...
        #[arg(long)]
        tail: bool,
    },
    /// Finite certificate for the companion series.
    Certify {
        #[arg(long)]
        m: u32,
        /// Rational parameter such as 1/2.
        #[arg(long)]
        a: String,
        #[arg(long = "N", default_value_t = 200)]
        n: usize,
    },
    /// Signed tally of the identity permutation of [5] that rules out
    /// permutation-preserving involutions.
    Witness,
}

/// Output of one subcommand: the rendered text and whether a checked
/// property failed.
struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failed: false }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            write_error(err, "usage", &e.to_string());
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers.max(1)).build() {
        Ok(pool) => pool,
        Err(e) => {
            write_error(err, "precondition", &format!("cannot start worker pool: {e}"));
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(outcome) => {
            if out.write_all(outcome.text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return 1;
            }
            if outcome.failed {
                2
            } else {
                0
            }
        }
        Err(e) => {
            write_error(err, e.kind(), &e.to_string());
            if matches!(e, Error::Verification(_)) {
                2
            } else {
                1
            }
        }
    }
}

fn write_error(err: &mut dyn Write, kind: &str, message: &str) {
    let _ = writeln!(err, "{}", json!({ "error": kind, "message": message.trim_end() }));
}

fn bounded<T: PartialOrd + std::fmt::Display>(name: &str, value: T, max: T) -> Result<T> {
    if value > max {
        return Err(Error::Precondition(format!("{name} = {value} exceeds the supported maximum {max}")));
    }
    Ok(value)
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = cli.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(Error::Precondition(format!("format {f:?} is not available here").to_lowercase()));
    }
    Ok(f)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(BigInt::to_string).collect()
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    use Format::*;
    match &cli.command {
        Command::Coeffs { source, n } => {
            let spec = source.load()?;
            let n = bounded("N", *n, MAX_COEFF_N)?;
            let c = egf_reciprocal_coeffs(&spec, n);
            Ok(Outcome::ok(match format_or(cli, Bfile, &[Bfile, Csv, Json, Text])? {
                Bfile | Text => c.to_bfile(),
                Csv => c.to_csv(),
                Json => c.to_json() + "\n",
            }))
        }
        Command::SignedCount { source, budget, n } => {
            let spec = source.load()?;
            let n = bounded("n", *n, MAX_ENUM_N)?;
            let counts = signed_count(n, &spec, budget.get())?;
            let c = egf_reciprocal_coeffs(&spec, n as usize).coeff(n as usize);
            let diff = counts.difference();
            let failed = diff != c;
            let text = match format_or(cli, Text, &[Text, Json])? {
                Text => format!("positive {}\nnegative {}\ndifference {diff}\nc_{n} {c}\n", counts.pos, counts.neg),
                _ => pretty(&json!({
                    "n": n,
                    "positive": counts.pos.to_string(),
                    "negative": counts.neg.to_string(),
                    "difference": diff.to_string(),
                    "c_n": c.to_string(),
                    "agree": !failed,
                })),
            };
            Ok(Outcome { text, failed })
        }
        Command::Involute { source, partition } => {
            let spec = source.load()?;
            let p: OrderedSetPartition = partition.parse()?;
            let trace = involute(&p, &spec)?;
            Ok(Outcome::ok(match format_or(cli, Text, &[Text, Json])? {
                Text => trace.render(),
                _ => pretty(&serde_json::to_value(&trace)?),
            }))
        }
        Command::Verify { source, budget, n, seed, samples } => {
            let spec = source.load()?;
            let n = bounded("n", *n, MAX_ENUM_N)?;
            let report = verify_suite(n, &spec, budget.get())?;
            let closure = seed.map(|s| closure_property_run(s, *samples, 30)).transpose()?;
            let failed = !report.passed() || closure.as_ref().is_some_and(|c| !c.failures.is_empty());
            let text = match format_or(cli, Text, &[Text, Json])? {
                Text => {
                    let mut t = format!(
                        "partitions checked {}\nstructural check {}\nr2 cross-check {}\nfixed points {}\ncoefficients {}\n",
                        report.partitions_checked,
                        report.structural_checked,
                        report.r2_cross_checked,
                        report.fixed_points.join(" "),
                        report.coefficients.join(" "),
                    );
                    for f in &report.failures {
                        t.push_str(&format!("failure: {f}\n"));
                    }
                    if let Some(c) = &closure {
                        t.push_str(&format!("seed {}\nclosure samples {} failures {}\n", c.seed, c.samples, c.failures.len()));
                        for f in &c.failures {
                            t.push_str(&format!("failure: {f}\n"));
                        }
                    }
                    t.push_str(if failed { "FAIL\n" } else { "PASS\n" });
                    t
                }
                _ => pretty(&json!({ "suite": report, "closure": closure, "passed": !failed })),
            };
            Ok(Outcome { text, failed })
        }
        Command::FixedPoints { source, budget, n } => {
            let spec = source.load()?;
            let n = bounded("n", *n, MAX_ENUM_N)?;
            let fixed = fixed_point_count(n, &spec, budget.get())?;
            let c = egf_reciprocal_coeffs(&spec, n as usize).coeff(n as usize);
            let failed = check_structural_spec(&spec).is_ok() && fixed != c;
            let text = match format_or(cli, Text, &[Text, Json])? {
                Text => format!("{fixed}\n"),
                _ => pretty(&json!({ "n": n, "fixed_points": fixed.to_string(), "c_n": c.to_string() })),
            };
            Ok(Outcome { text, failed })
        }
        Command::Weights { source, n } => {
            let spec = source.load()?;
            let n = bounded("N", *n, MAX_WEIGHT_N)?;
            let table = WeightTable::new(&spec, n)?;
            Ok(Outcome::ok(match format_or(cli, Csv, &[Csv, Text, Json])? {
                Json => pretty(&json!({ "w": strings(table.values()) })),
                _ => table.to_csv(),
            }))
        }
        Command::RunTheorem { source, n } => {
            let spec = source.load()?;
            let n = bounded("N", *n, MAX_RUN_THEOREM_N)?;
            let report = run_theorem_coeffs(&spec, n);
            let c = egf_reciprocal_coeffs(&spec, n);
            let mismatch = (0..=n).find(|&k| report.b[k] != c.coeff(k));
            let text = match format_or(cli, Json, &[Json, Text])? {
                Json => pretty(&json!({
                    "N": n,
                    "w": strings(&report.w),
                    "b": strings(&report.b),
                    "c": strings(c.values()),
                    "w_nonnegative": report.w_nonnegative,
                    "agree": mismatch.is_none(),
                    "first_mismatch": mismatch,
                })),
                _ => {
                    let mut t = String::from("n w_n b_n c_n\n");
                    for k in 0..=n {
                        t.push_str(&format!("{k} {} {} {}\n", report.w[k], report.b[k], c.coeff(k)));
                    }
                    t
                }
            };
            Ok(Outcome { text, failed: mismatch.is_some() })
        }
        Command::Scan { source, m, m_max, n_max, extended, checkpoint, timings } => {
            let spec = if source.spec.is_some() || source.spec_file.is_some() { Some(source.load()?) } else { None };
            let (family, reports) = match spec {
                Some(spec) => {
                    if m.is_some() || m_max.is_some() || *extended || checkpoint.is_some() {
                        return Err(Error::Precondition("a spec scan takes only --n-max".into()));
                    }
                    (false, vec![scan_spec(&spec, bounded("n-max", *n_max, MAX_COEFF_N)?)])
                }
                None if *extended => {
                    (true, scan_range(1..=EXTENDED_M_MAX, EXTENDED_N_MAX, cli.workers, checkpoint.as_deref())?)
                }
                None => {
                    let n_max = bounded("n-max", *n_max, MAX_COEFF_N)?;
                    let reports = match (m, m_max) {
                        (Some(m), _) if checkpoint.is_none() => vec![conjecture_scan(*m, n_max)?],
                        (Some(m), _) => scan_range(*m..=*m, n_max, cli.workers, checkpoint.as_deref())?,
                        (None, Some(top)) => scan_range(1..=*top, n_max, cli.workers, checkpoint.as_deref())?,
                        (None, None) => return Err(Error::Precondition("give --m, --m-max, --extended or a spec".into())),
                    };
                    (true, reports)
                }
            };
            let failed = family && reports.iter().any(|r| !r.all_nonnegative());
            let text = match format_or(cli, Csv, &[Csv, Text, Json])? {
                Json => {
                    let rows: Vec<Value> = reports
                        .iter()
                        .map(|r| {
                            let mut v = serde_json::to_value(r).expect("report serializes");
                            if !timings {
                                v.as_object_mut().expect("object").remove("runtime_secs");
                            }
                            v
                        })
                        .collect();
                    pretty(&Value::Array(rows))
                }
                _ => {
                    let mut t = String::from(ScanReport::csv_header());
                    t.push_str(if *timings { ",runtime_secs\n" } else { "\n" });
                    for r in &reports {
                        t.push_str(&r.csv_row());
                        if *timings {
                            t.push_str(&format!(",{:.3}", r.runtime_secs));
                        }
                        t.push('\n');
                    }
                    t
                }
            };
            Ok(Outcome { text, failed })
        }
        Command::Necessary { m, tail } => {
            let value = necessary_check(*m, *tail)?;
            Ok(Outcome::ok(match format_or(cli, Text, &[Text, Json])? {
                Text => format!("{value}\n"),
                _ => pretty(&json!({ "m": m, "tail": tail, "n": 2 * *m as u64 + 2, "c_n": value.to_string() })),
            }))
        }
        Command::Certify { m, a, n } => {
            let a: BigRational =
                a.trim().parse().map_err(|e| Error::Precondition(format!("cannot parse a = {a:?} as a rational: {e}")))?;
            let n = bounded("N", *n, MAX_CERTIFY_N)?;
            let report = certify(*m, &a, n)?;
            let text = match format_or(cli, Json, &[Json, Text])? {
                Json => pretty(&serde_json::to_value(&report)?),
                _ => match &report.first_failure {
                    None => format!("passed through degree {n}\n"),
                    Some((d, v)) => format!("failed at degree {d}: [x^{d}] f g = {v}\n"),
                },
            };
            Ok(Outcome { text, failed: !report.passed })
        }
        Command::Witness => {
            let tally = limitation_witness()?;
            Ok(Outcome::ok(match format_or(cli, Text, &[Text, Json])? {
                Text => format!("{tally}\n"),
                _ => pretty(&json!({ "tally": tally.to_string() })),
            }))
        }
    }
}
