//! Command-line front door: parsing, solving, instance generation, and
//! campaign dispatch.
//!
//! Exit codes are a stable contract: 0 success/full, 1 verification failed,
//! 2 invalid input, 3 no full rainbow matching found, 4 campaign violations.
//! `-` means stdin/stdout for FILE positions, and every randomized
//! subcommand requires an explicit `--seed` (no wall-clock default).

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rainbow_matching::exact;
use rainbow_matching::family::{is_rainbow_matching, MatchingFamily, RainbowMatching};
use rainbow_matching::generators::{
    cycle_family, cycle_family_extended, enumerate_latin_squares, latin_square_family,
    random_family, random_latin_square,
};
use rainbow_matching::harness::{
    check_near_full, check_two_color_exhaustive, check_upper_bound, search_lower_bound,
    CampaignReport, Method, NearFullMode,
};
use rainbow_matching::solver::{find_full_rainbow_matching, greedy_rainbow_matching, SolverError};

const EXIT_OK: u8 = 0;
const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_PARTIAL: u8 = 3;
const EXIT_VIOLATIONS: u8 = 4;

#[derive(Parser)]
#[command(
    name = "rainbow",
    about = "Full rainbow matchings in families of bipartite matchings",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find a full (or maximum) rainbow matching in an instance file.
    Solve {
        /// Instance JSON ('-' for stdin).
        file: String,
        /// constructive, exact, or greedy.
        #[arg(long, default_value = "constructive")]
        method: Method,
        /// Write the rainbow matching here instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Check that an assignment is a valid rainbow matching of an instance.
    Verify {
        /// Instance JSON ('-' for stdin).
        file: String,
        /// Assignment JSON.
        assignment: String,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenCmd,
    },
    /// Campaign: random families at a given size must admit full rainbow
    /// matchings.
    CheckBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        /// Square host side (defaults to the color-class size).
        #[arg(long)]
        host: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "constructive")]
        method: Method,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Enumerate every two-color size-3 instance instead of sampling
        /// (n=2, size=3 only; no seed needed).
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Campaign: local search for a family with no full rainbow matching.
    SearchLower {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1000)]
        iterations: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Campaign: instances of the selected kind must reach size n-1.
    CheckNearFull {
        #[arg(long)]
        n: usize,
        /// latin-exhaustive, latin-random, random, or cycle.
        #[arg(long)]
        mode: NearFullMode,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Required for latin-random and random modes.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Size-n family with no full rainbow matching (classes of size n).
    Cycle {
        #[arg(long)]
        n: usize,
        /// Rotation offset, 1..n-1. Ignored with --extended.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// The 2n-2 variant: n-1 copies of each of the two matchings,
        /// still with no full rainbow matching.
        #[arg(long)]
        extended: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Family of the n rows of a Latin square (full rainbow matching =
    /// transversal).
    Latin {
        #[arg(long)]
        order: usize,
        /// Pick square #INDEX from the exhaustive enumeration (order <= 4).
        #[arg(long, conflicts_with = "seed")]
        index: Option<usize>,
        /// Generate a random square instead.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Seeded random family of n matchings of a given size.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        /// Host as UxW, e.g. 8x8 (defaults to size x size).
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct OutArg {
    /// Write the instance here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

/// A failure that maps directly to an exit code.
struct Failure(u8, String);

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure(EXIT_INVALID, msg.into())
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::invalid(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::invalid(format!("reading {path}: {e}")))
    }
}

fn write_output(out: &Option<String>, content: &str) -> Result<(), Failure> {
    match out.as_deref() {
        None | Some("-") => {
            println!("{content}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{content}\n"))
            .map_err(|e| Failure::invalid(format!("writing {path}: {e}"))),
    }
}

fn load_family(path: &str) -> Result<MatchingFamily, Failure> {
    let text = read_input(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("invalid instance in {path}: {e}")))
}

fn parse_host(spec: &str) -> Result<(usize, usize), Failure> {
    let parts: Vec<&str> = spec.split('x').collect();
    if let [u, w] = parts[..] {
        if let (Ok(u), Ok(w)) = (u.parse(), w.parse()) {
            return Ok((u, w));
        }
    }
    Err(Failure::invalid(format!("host must look like UxW, got '{spec}'")))
}

fn emit_report(report: &CampaignReport, out: &Option<String>) -> Result<u8, Failure> {
    write_output(out, &report.to_json())?;
    eprintln!(
        "{}: {} instances in {:?}, {} violations",
        report.kind, report.instances_tested, report.duration, report.violations
    );
    Ok(if report.violations > 0 { EXIT_VIOLATIONS } else { EXIT_OK })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Solve { file, method, out } => {
            let family = load_family(&file)?;
            let n = family.n();
            let result = match method {
                Method::Constructive => match find_full_rainbow_matching(&family) {
                    Ok(r) => r,
                    Err(e @ SolverError::PreconditionViolated { .. }) => {
                        return Err(Failure::invalid(e.to_string()));
                    }
                    Err(e) => return Err(Failure(EXIT_PARTIAL, e.to_string())),
                },
                Method::Greedy => greedy_rainbow_matching(&family),
                Method::Exact => exact::max_rainbow_matching(&family, Some(n)),
            };
            let json = serde_json::to_string_pretty(&result).expect("assignment serializes");
            write_output(&out, &json)?;
            Ok(if result.is_full(n) { EXIT_OK } else { EXIT_PARTIAL })
        }
        Cmd::Verify { file, assignment } => {
            let family = load_family(&file)?;
            let text = read_input(&assignment)?;
            let r: RainbowMatching = serde_json::from_str(&text)
                .map_err(|e| Failure::invalid(format!("invalid assignment: {e}")))?;
            if is_rainbow_matching(&family, &r) {
                Ok(EXIT_OK)
            } else {
                eprintln!("assignment is not a valid rainbow matching of the instance");
                Ok(EXIT_VERIFY_FAILED)
            }
        }
        Cmd::Gen { kind } => {
            let (family, out) = match kind {
                GenCmd::Cycle { n, k, extended, out } => {
                    let family = if extended {
                        cycle_family_extended(n)
                    } else {
                        cycle_family(n, k)
                    }
                    .map_err(|e| Failure::invalid(e.to_string()))?;
                    (family, out)
                }
                GenCmd::Latin { order, index, seed, out } => {
                    let square = match (index, seed) {
                        (Some(i), None) => {
                            if order > 4 {
                                return Err(Failure::invalid(
                                    "--index enumeration is limited to order <= 4",
                                ));
                            }
                            let squares = enumerate_latin_squares(order);
                            squares
                                .into_iter()
                                .nth(i)
                                .ok_or_else(|| {
                                    Failure::invalid(format!(
                                        "index {i} out of range for order {order}"
                                    ))
                                })?
                        }
                        (None, Some(s)) => random_latin_square(order, s)
                            .map_err(|e| Failure::invalid(e.to_string()))?,
                        _ => {
                            return Err(Failure::invalid(
                                "gen latin needs exactly one of --index or --seed",
                            ));
                        }
                    };
                    (latin_square_family(&square), out)
                }
                GenCmd::Random { n, size, host, seed, out } => {
                    let (u, w) = match host {
                        Some(spec) => parse_host(&spec)?,
                        None => (size, size),
                    };
                    let family = random_family(n, size, u, w, seed)
                        .map_err(|e| Failure::invalid(e.to_string()))?;
                    (family, out)
                }
            };
            let json = serde_json::to_string_pretty(&family).expect("instance serializes");
            write_output(&out.out, &json)?;
            Ok(EXIT_OK)
        }
        Cmd::CheckBound { n, size, host, trials, seed, method, jobs, exhaustive, out } => {
            let report = if exhaustive {
                if n != 2 || size != 3 {
                    return Err(Failure::invalid(
                        "--exhaustive covers the two-color size-3 case only",
                    ));
                }
                check_two_color_exhaustive()
            } else {
                let seed = seed
                    .ok_or_else(|| Failure::invalid("check-bound requires --seed"))?;
                check_upper_bound(n, size, host, trials, seed, method, jobs)
                    .map_err(|e| Failure::invalid(e.to_string()))?
            };
            emit_report(&report, &out)
        }
        Cmd::SearchLower { n, size, iterations, seed, out } => {
            let report = search_lower_bound(n, size, iterations, seed)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            emit_report(&report, &out)
        }
        Cmd::CheckNearFull { n, mode, trials, seed, jobs, out } => {
            let seed = match (mode, seed) {
                (NearFullMode::LatinRandom | NearFullMode::Random, None) => {
                    return Err(Failure::invalid(format!(
                        "mode {} requires --seed",
                        mode.name()
                    )));
                }
                (_, s) => s.unwrap_or(0),
            };
            let report = check_near_full(n, mode, trials, seed, jobs)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            emit_report(&report, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
