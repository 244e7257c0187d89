//! Command-line interface.
//!
//! Exit status: 0 on success, 1 on an internal failure (including a census
//! contradiction), 2 on invalid input, 3 on store errors. With `--json`
//! every command prints a single JSON object instead of text.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::census::{enumerate_universe, load_state, report, run_census, CensusError, Store};
use crate::intmat::{char_poly, IntMatrix};
use crate::invariants::{bmt_compare, signature, InvariantError, BF_POLYNOMIALS};
use crate::sse::{sse_search, SearchBudget, SearchOutcome, SseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_STORE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sftinv", version, about = "Conjugacy invariants and equivalence search for 2x2 shifts of finite type")]
pub struct Cli {
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the 2x2 irreducible matrices up to an entry sum, then their count.
    Enumerate {
        #[arg(long)]
        max_sum: u64,
        /// Drop the period-2 matrices [[0,b],[c,0]].
        #[arg(long)]
        primitive: bool,
    },
    /// Print the invariant signature of a matrix.
    Invariants {
        #[arg(value_parser = parse_matrix)]
        matrix: IntMatrix,
    },
    /// Compare two matrices invariant by invariant.
    Compare {
        #[arg(value_parser = parse_matrix)]
        a: IntMatrix,
        #[arg(value_parser = parse_matrix)]
        b: IntMatrix,
    },
    /// Search for a chain of elementary equivalences.
    Search {
        #[arg(value_parser = parse_matrix)]
        a: IntMatrix,
        #[arg(value_parser = parse_matrix)]
        b: IntMatrix,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Entry-sum cap for intermediate matrices [default: 3x the larger endpoint sum].
        #[arg(long)]
        bound: Option<u64>,
        /// Stop after visiting this many matrices.
        #[arg(long)]
        node_limit: Option<usize>,
        /// Also factor through 1x1 matrices.
        #[arg(long = "allow-1x1")]
        allow_1x1: bool,
    },
    /// Run or resume a census, then print its report.
    Census {
        #[arg(long, default_value_t = 25)]
        max_sum: u64,
        #[arg(long, env = "SFTINV_STORE")]
        store: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Entry-sum cap for intermediate matrices [default: 3x max-sum].
        #[arg(long)]
        bound: Option<u64>,
        /// Keep the period-2 matrices in the universe.
        #[arg(long)]
        irreducible: bool,
        #[arg(long = "allow-1x1")]
        allow_1x1: bool,
        /// Worker threads [default: all cores].
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the report of a stored census.
    Report {
        #[arg(long, env = "SFTINV_STORE")]
        store: PathBuf,
    },
}

fn parse_matrix(s: &str) -> Result<IntMatrix, String> {
    let m: IntMatrix = s.parse().map_err(|e| format!("{e}"))?;
    if !m.is_square() {
        return Err(format!("{s}: expected a square matrix"));
    }
    Ok(m)
}

/// Failure with its exit status.
struct Fail(i32, String);

impl From<InvariantError> for Fail {
    fn from(e: InvariantError) -> Self {
        Fail(EXIT_INPUT, e.to_string())
    }
}

impl From<SseError> for Fail {
    fn from(e: SseError) -> Self {
        Fail(EXIT_INPUT, e.to_string())
    }
}

impl From<CensusError> for Fail {
    fn from(e: CensusError) -> Self {
        let code = match e {
            CensusError::Store(_) => EXIT_STORE,
            CensusError::Sse(SseError::Budget(_)) => EXIT_INPUT,
            _ => EXIT_FAILURE,
        };
        Fail(code, e.to_string())
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail(EXIT_FAILURE, e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Fail> {
    match &cli.command {
        Command::Enumerate { max_sum, primitive } => {
            if *max_sum < 2 {
                return Err(Fail(EXIT_INPUT, "--max-sum must be at least 2".into()));
            }
            let u = enumerate_universe(*max_sum, *primitive);
            if cli.json {
                let ms: Vec<String> = u.members.iter().map(|m| m.to_string()).collect();
                writeln!(out, "{}", json!({"max_sum": max_sum, "primitive": primitive, "matrices": ms, "count": u.len()}))?;
            } else {
                for m in &u.members {
                    writeln!(out, "{m}")?;
                }
                writeln!(out, "{}", u.len())?;
            }
        }
        Command::Invariants { matrix } => invariants(matrix, cli.json, out)?,
        Command::Compare { a, b } => compare(a, b, cli.json, out)?,
        Command::Search {
            a,
            b,
            depth,
            bound,
            node_limit,
            allow_1x1,
        } => {
            let mut budget = match bound {
                Some(s) => SearchBudget::new(*depth, *s),
                None => SearchBudget::for_pair(a, b, *depth),
            };
            budget.node_limit = *node_limit;
            if *allow_1x1 {
                budget = budget.with_1x1();
            }
            budget.validate()?;
            let outcome = sse_search(a, b, &budget)?;
            match (&outcome, cli.json) {
                (SearchOutcome::Found(c), false) => write!(out, "{}", c.to_text(&budget))?,
                (SearchOutcome::Found(c), true) => writeln!(
                    out,
                    "{}",
                    json!({"found": true, "steps": c.len(), "certificate": c.to_text(&budget)})
                )?,
                (SearchOutcome::NotFound { reason, visited }, false) => {
                    writeln!(out, "OPEN ({reason}; {visited} matrices visited; budget {budget})")?
                }
                (SearchOutcome::NotFound { reason, visited }, true) => writeln!(
                    out,
                    "{}",
                    json!({"found": false, "reason": reason.to_string(), "visited": visited, "budget": budget.to_string()})
                )?,
            }
        }
        Command::Census {
            max_sum,
            store,
            depth,
            bound,
            irreducible,
            allow_1x1,
            jobs,
        } => {
            if *max_sum < 2 {
                return Err(Fail(EXIT_INPUT, "--max-sum must be at least 2".into()));
            }
            let mut budget = SearchBudget::new(*depth, bound.unwrap_or(3 * max_sum));
            if *allow_1x1 {
                budget = budget.with_1x1();
            }
            budget.validate()?;
            let mut store = Store::open(store).map_err(CensusError::from)?;
            let universe = enumerate_universe(*max_sum, !irreducible);
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(j) = jobs {
                pool = pool.num_threads(*j);
            }
            let pool = pool.build().map_err(|e| Fail(EXIT_FAILURE, e.to_string()))?;
            let state = pool.install(|| run_census(universe, budget, &mut store))?;
            print_report(&report(&state), cli.json, out)?;
        }
        Command::Report { store } => {
            let records = Store::read(store).map_err(CensusError::from)?;
            let state = load_state(&records)?;
            print_report(&report(&state), cli.json, out)?;
        }
    }
    Ok(())
}

fn print_report(r: &crate::census::Report, json: bool, out: &mut dyn Write) -> std::io::Result<()> {
    if json {
        writeln!(out, "{}", serde_json::to_string(&r.summary).expect("summary serializes"))
    } else {
        write!(out, "{}", r.to_text())
    }
}

fn invariants(m: &IntMatrix, json: bool, out: &mut dyn Write) -> Result<(), Fail> {
    let sig = signature(m)?;
    if json {
        let bf: serde_json::Map<String, serde_json::Value> = BF_POLYNOMIALS
            .iter()
            .zip(&sig.bf)
            .map(|(p, g)| (p.to_string(), json!(g.to_string())))
            .collect();
        writeln!(
            out,
            "{}",
            json!({
                "matrix": m.to_string(),
                "charpoly": sig.charpoly.to_string(),
                "jordan": sig.jordan.to_string(),
                "bowen_franks": bf,
                "bmt_class": sig.bmt_coset_token,
                "signature": sig.to_line(m),
            })
        )?;
        return Ok(());
    }
    writeln!(out, "matrix: {m}")?;
    writeln!(out, "charpoly: {}", sig.charpoly)?;
    writeln!(out, "jordan: {}", sig.jordan)?;
    for (p, g) in BF_POLYNOMIALS.iter().zip(&sig.bf) {
        writeln!(out, "BF[{p}]: {g}")?;
    }
    writeln!(out, "BMT class: {}", sig.bmt_coset_token.as_deref().unwrap_or("- (integer Perron root)"))?;
    writeln!(out, "signature: {}", sig.to_line(m))?;
    Ok(())
}

fn compare(a: &IntMatrix, b: &IntMatrix, json: bool, out: &mut dyn Write) -> Result<(), Fail> {
    let (sa, sb) = (signature(a)?, signature(b)?);
    let jordan = if sa.jordan == sb.jordan { "equal" } else { "DISTINCT" };
    let differing: Vec<String> = BF_POLYNOMIALS
        .iter()
        .zip(sa.bf.iter().zip(&sb.bf))
        .filter(|(_, (x, y))| x != y)
        .map(|(p, _)| format!("BF[{p}]"))
        .collect();
    let n = BF_POLYNOMIALS.len();
    let bf = if differing.is_empty() {
        format!("BF({n}/{n}): equal")
    } else {
        format!("BF({}/{n}): DISTINCT ({})", n - differing.len(), differing.join(", "))
    };
    let (bmt, verdict, route) = if char_poly(a).ok() != char_poly(b).ok() {
        ("n/a (characteristic polynomials differ)".to_string(), None, None)
    } else {
        let c = bmt_compare(a, b)?;
        (format!("{} ({})", c.verdict, c.route), Some(c.verdict.to_string()), Some(c.route.to_string()))
    };
    if json {
        writeln!(
            out,
            "{}",
            json!({
                "jordan": jordan,
                "bowen_franks_equal": n - differing.len(),
                "bowen_franks_differing": differing,
                "bmt_verdict": verdict,
                "bmt_route": route,
            })
        )?;
    } else {
        writeln!(out, "Jordan: {jordan}; {bf}; BMT: {bmt}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["sftinv"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn compare_example_pair() {
        let (code, out, _) = call(&["compare", "2:14,2,1,0", "2:13,5,3,1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "Jordan: equal; BF(19/19): equal; BMT: DISTINCT (Pic(O))");
    }

    #[test]
    fn enumerate_prints_the_count_last() {
        let (code, out, _) = call(&["enumerate", "--max-sum", "4", "--primitive"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(*lines.last().unwrap(), (lines.len() - 1).to_string());
        assert_eq!(lines.len() - 1, enumerate_universe(4, true).len());
    }

    #[test]
    fn search_through_a_one_by_one_matrix() {
        let (code, out, _) = call(&["search", "2:1,1,1,1", "1:2", "--depth", "1", "--allow-1x1"]);
        assert_eq!(code, 0);
        let (cert, _) = crate::sse::SSECertificate::parse_text(&out).unwrap();
        assert_eq!(cert.len(), 1);
        assert!(crate::sse::verify_certificate(&cert));
    }

    #[test]
    fn search_reports_open() {
        let (code, out, _) = call(&["search", "2:14,2,1,0", "2:13,5,3,1", "--depth", "1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("OPEN ("), "{out}");
    }

    #[test]
    fn malformed_matrix_is_invalid_input() {
        let (code, _, err) = call(&["invariants", "2:1,x,1,1"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("at byte 4"), "{err}");
        assert_eq!(call(&["enumerate", "--max-sum", "1"]).0, EXIT_INPUT);
        assert_eq!(call(&["search", "2:1,1,1,1", "2:1,1,1,1", "--depth", "0"]).0, EXIT_INPUT);
    }

    #[test]
    fn store_errors_exit_with_three() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("none");
        assert_eq!(call(&["report", "--store", missing.to_str().unwrap()]).0, EXIT_STORE);
        let bad = dir.path().join("bad");
        std::fs::write(&bad, "NOPE|x\n").unwrap();
        assert_eq!(call(&["census", "--max-sum", "4", "--store", bad.to_str().unwrap()]).0, EXIT_STORE);
    }

    #[test]
    fn census_then_report_agree() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log");
        let p = path.to_str().unwrap();
        let (code, first, _) = call(&["census", "--max-sum", "6", "--store", p, "--json"]);
        assert_eq!(code, 0);
        let (_, again, _) = call(&["census", "--max-sum", "6", "--store", p, "--json"]);
        let (_, stored, _) = call(&["report", "--store", p, "--json"]);
        assert_eq!(first, again);
        assert_eq!(first, stored);
        let v: serde_json::Value = serde_json::from_str(&first).unwrap();
        assert_eq!(v["matrices"], 55);
        assert_eq!(v["open"], 0);
    }

    #[test]
    fn invariants_text_ends_with_the_signature_line() {
        let (code, out, _) = call(&["invariants", "2:14,2,1,0"]);
        assert_eq!(code, 0);
        assert!(out.contains("BF[x-1]: 15\n"), "{out}");
        let last = out.lines().last().unwrap().strip_prefix("signature: ").unwrap();
        let (m, sig) = crate::invariants::InvariantSignature::parse_line(last).unwrap();
        assert_eq!(m.to_string(), "2:14,2,1,0");
        assert_eq!(sig, signature(&m).unwrap());
    }
}
