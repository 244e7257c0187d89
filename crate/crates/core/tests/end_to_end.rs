use std::collections::BTreeMap;

use sftinv::census::{enumerate_universe, report, run_census, Store};
use sftinv::cli;
use sftinv::intmat::IntMatrix;
use sftinv::invariants::{signature, Separator, Verdict};
use sftinv::sse::{verify_certificate, SSECertificate, SearchBudget};

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv: Vec<String> = std::iter::once("sftinv").chain(args.iter().copied()).map(String::from).collect();
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn example_pair_compares_as_distinct() {
    let (code, out, _) = run(&["compare", "2:14,2,1,0", "2:13,5,3,1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "Jordan: equal; BF(19/19): equal; BMT: DISTINCT (Pic(O))");
}

#[test]
fn example_pair_search_stays_open() {
    let (code, out, _) = run(&["search", "2:14,2,1,0", "2:13,5,3,1", "--depth", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("OPEN ("), "{out}");
}

#[test]
fn search_certificate_parses_and_verifies() {
    let r: IntMatrix = "2:1,1,0,1".parse().unwrap();
    let s: IntMatrix = "2:1,2,1,1".parse().unwrap();
    let a = r.mul(&s).unwrap();
    let b = s.mul(&r).unwrap();
    let (code, out, _) = run(&["search", &a.to_string(), &b.to_string()]);
    assert_eq!(code, 0, "{out}");
    let (cert, budget) = SSECertificate::parse_text(&out).unwrap();
    assert!(verify_certificate(&cert));
    assert_eq!((&cert.from, &cert.to), (&a, &b));
    assert_eq!(budget, SearchBudget::for_pair(&a, &b, 4));
}

#[test]
fn malformed_input_is_rejected() {
    let (code, _, err) = run(&["invariants", "2:1,2,3"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

/// Recounts a finished small census pair by pair.
#[test]
fn report_matches_pairwise_recount() {
    let u = enumerate_universe(9, true);
    let dir = tempfile::tempdir().unwrap();
    let mut store = Store::open(dir.path().join("log")).unwrap();
    let state = run_census(u.clone(), SearchBudget::new(2, 27), &mut store).unwrap();
    let s = report(&state).summary;

    let sigs: Vec<_> = u.members.iter().map(|m| signature(m).unwrap()).collect();
    let (mut first, mut sole) = (BTreeMap::<String, u64>::new(), BTreeMap::<String, u64>::new());
    let (mut distinct, mut equivalent, mut open) = (0u64, 0u64, 0u64);
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let mut diff = sigs[i].differences(&sigs[j]);
            if diff.is_empty() {
                if let Some(c) = state.bmt.get(&(i, j)).filter(|c| c.verdict == Verdict::Distinct) {
                    diff.push(Separator::Bmt(c.route));
                }
            }
            if let Some(sep) = diff.first() {
                distinct += 1;
                *first.entry(sep.to_string()).or_default() += 1;
                if diff.len() == 1 {
                    *sole.entry(sep.to_string()).or_default() += 1;
                }
                assert!(!state.merged(i, j), "{} ~ {} but separated", u.members[i], u.members[j]);
            } else if state.merged(i, j) {
                equivalent += 1;
            } else {
                open += 1;
            }
        }
    }
    assert_eq!(s.pairs, distinct + equivalent + open);
    assert_eq!((s.distinct, s.equivalent, s.open, s.pending), (distinct, equivalent, open, 0));
    assert_eq!(s.distinct_by, first);
    assert_eq!(s.sole_separator, sole);
}

#[test]
fn census_resumes_from_its_own_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("census.log");
    let log = log.to_str().unwrap();
    let args = ["census", "--max-sum", "7", "--store", log];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0, "{first}");
    let lines = std::fs::read_to_string(log).unwrap().lines().count();

    let (code, again, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(again, first);
    assert_eq!(std::fs::read_to_string(log).unwrap().lines().count(), lines, "a resumed run appends nothing");

    let (code, rep, _) = run(&["report", "--store", log]);
    assert_eq!(code, 0);
    assert_eq!(rep, first);
}
