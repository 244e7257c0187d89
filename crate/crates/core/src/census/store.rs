//! Append-only record log. One line per fact:
//!
//! ```text
//! SIG|v=0.1.0;u=-;b=-|2:14,2,1,0|x^2-14x-2|(14,2)|...|0:1
//! CMP|v=0.1.0;u=-;b=-|a=2:2,3,3,1;b=2:1,3,3,2;verdict=equivalent;route=Pic(O)
//! CERT|v=0.1.0;u=-;b=depth:2,sum:75,shapes:2x2+2x3+3x2+3x3,nodes:-|from=..;to=..;R=..;S=..
//! STAGE|v=0.1.0;u=25p;b=depth:2,...|signatures
//! ```
//!
//! A final line without a newline is a torn write and is discarded; any
//! other unreadable line is corruption.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::intmat::IntMatrix;
use crate::invariants::{InvariantSignature, Route, Verdict};
use crate::sse::{ElementaryStep, SSECertificate};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("store {path}, line {line}: {msg}")]
    Corrupt { path: PathBuf, line: usize, msg: String },
    #[error("stored record is invalid: {0}")]
    Invalid(String),
}

/// Code version, universe and budget a record was produced under.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stamp {
    pub version: String,
    pub universe: Option<String>,
    pub budget: Option<String>,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

impl Stamp {
    /// Version only, for facts that depend on nothing else.
    pub fn plain() -> Self {
        Stamp {
            version: VERSION.to_string(),
            universe: None,
            budget: None,
        }
    }

    pub fn full(universe: &str, budget: &str) -> Self {
        Stamp {
            version: VERSION.to_string(),
            universe: Some(universe.to_string()),
            budget: Some(budget.to_string()),
        }
    }

    fn encode(&self) -> String {
        format!(
            "v={};u={};b={}",
            self.version,
            self.universe.as_deref().unwrap_or("-"),
            self.budget.as_deref().unwrap_or("-")
        )
    }

    fn decode(s: &str) -> Result<Self, String> {
        let f = fields(s, &["v", "u", "b"])?;
        let opt = |x: &str| (x != "-").then(|| x.to_string());
        Ok(Stamp {
            version: f[0].to_string(),
            universe: opt(f[1]),
            budget: opt(f[2]),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Record {
    Sig {
        stamp: Stamp,
        matrix: IntMatrix,
        signature: InvariantSignature,
    },
    Cmp {
        stamp: Stamp,
        a: IntMatrix,
        b: IntMatrix,
        verdict: Verdict,
        route: Route,
    },
    Cert {
        stamp: Stamp,
        cert: SSECertificate,
    },
    Stage {
        stamp: Stamp,
        name: String,
    },
}

impl Record {
    pub fn stamp(&self) -> &Stamp {
        match self {
            Record::Sig { stamp, .. }
            | Record::Cmp { stamp, .. }
            | Record::Cert { stamp, .. }
            | Record::Stage { stamp, .. } => stamp,
        }
    }

    pub fn to_line(&self) -> String {
        match self {
            Record::Sig {
                stamp,
                matrix,
                signature,
            } => format!("SIG|{}|{}", stamp.encode(), signature.to_line(matrix)),
            Record::Cmp {
                stamp,
                a,
                b,
                verdict,
                route,
            } => format!(
                "CMP|{}|a={a};b={b};verdict={};route={route}",
                stamp.encode(),
                verdict_word(*verdict)
            ),
            Record::Cert { stamp, cert } => {
                let mut s = format!("CERT|{}|from={};to={}", stamp.encode(), cert.from, cert.to);
                for st in &cert.steps {
                    s.push_str(&format!(";R={};S={}", st.r, st.s));
                }
                s
            }
            Record::Stage { stamp, name } => format!("STAGE|{}|{name}", stamp.encode()),
        }
    }

    pub fn parse(line: &str) -> Result<Self, String> {
        let mut parts = line.splitn(3, '|');
        let kind = parts.next().unwrap_or_default();
        let stamp = Stamp::decode(parts.next().ok_or("missing stamp")?)?;
        let body = parts.next().ok_or("missing payload")?;
        match kind {
            "SIG" => {
                let (matrix, signature) = InvariantSignature::parse_line(body).map_err(|e| e.to_string())?;
                Ok(Record::Sig {
                    stamp,
                    matrix,
                    signature,
                })
            }
            "CMP" => {
                let f = fields(body, &["a", "b", "verdict", "route"])?;
                Ok(Record::Cmp {
                    stamp,
                    a: f[0].parse().map_err(|e| format!("{e}"))?,
                    b: f[1].parse().map_err(|e| format!("{e}"))?,
                    verdict: parse_verdict(f[2])?,
                    route: f[3].parse().map_err(|e| format!("{e}"))?,
                })
            }
            "CERT" => {
                let items: Vec<&str> = body.split(';').collect();
                if items.len() < 4 || !items.len().is_multiple_of(2) {
                    return Err("certificate needs from, to and R/S pairs".into());
                }
                let mat = |item: &str, key: &str| -> Result<IntMatrix, String> {
                    let v = fields(item, &[key])?[0];
                    v.parse().map_err(|e| format!("{e}"))
                };
                let mut steps = Vec::new();
                for pair in items[2..].chunks(2) {
                    let (r, s) = (mat(pair[0], "R")?, mat(pair[1], "S")?);
                    steps.push(ElementaryStep::new(r, s).map_err(|e| e.to_string())?);
                }
                Ok(Record::Cert {
                    stamp,
                    cert: SSECertificate {
                        from: mat(items[0], "from")?,
                        to: mat(items[1], "to")?,
                        steps,
                    },
                })
            }
            "STAGE" => Ok(Record::Stage {
                stamp,
                name: body.to_string(),
            }),
            other => Err(format!("unknown record kind {other:?}")),
        }
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Distinct => "distinct",
        Verdict::Equivalent => "equivalent",
        Verdict::NecessaryConditionHolds => "necessary",
        Verdict::NotApplicable => "na",
    }
}

fn parse_verdict(s: &str) -> Result<Verdict, String> {
    Ok(match s {
        "distinct" => Verdict::Distinct,
        "equivalent" => Verdict::Equivalent,
        "necessary" => Verdict::NecessaryConditionHolds,
        "na" => Verdict::NotApplicable,
        _ => return Err(format!("unknown verdict {s:?}")),
    })
}

/// `k1=..;k2=..` with exactly the given keys in order.
fn fields<'a>(s: &'a str, keys: &[&str]) -> Result<Vec<&'a str>, String> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != keys.len() {
        return Err(format!("expected fields {}", keys.join(",")));
    }
    parts
        .iter()
        .zip(keys)
        .map(|(p, k)| {
            p.strip_prefix(k)
                .and_then(|v| v.strip_prefix('='))
                .ok_or_else(|| format!("expected field {k}="))
        })
        .collect()
}

/// The record log, opened for appending.
pub struct Store {
    path: PathBuf,
    file: File,
    records: Vec<Record>,
}

impl Store {
    /// Opens or creates the log, replays it, and drops a torn final line.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let io = |source| StoreError::Io {
            path: path.clone(),
            source,
        };
        let file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)
            .map_err(io)?;
        let mut records = Vec::new();
        let mut reader = BufReader::new(&file);
        let mut good_len = 0u64;
        let mut buf = String::new();
        let mut line_no = 0;
        loop {
            buf.clear();
            let n = reader.read_line(&mut buf).map_err(io)?;
            if n == 0 {
                break;
            }
            line_no += 1;
            let Some(line) = buf.strip_suffix('\n') else {
                log::warn!("{}: discarding torn final line {line_no}", path.display());
                break;
            };
            if !line.trim().is_empty() {
                let rec = Record::parse(line).map_err(|msg| StoreError::Corrupt {
                    path: path.clone(),
                    line: line_no,
                    msg,
                })?;
                records.push(rec);
            }
            good_len += n as u64;
        }
        drop(reader);
        if file.metadata().map_err(io)?.len() != good_len {
            file.set_len(good_len).map_err(io)?;
        }
        Ok(Store { path, file, records })
    }

    /// Reads an existing log without modifying it.
    pub fn read(path: impl AsRef<Path>) -> Result<Vec<Record>, StoreError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let complete = match text.rfind('\n') {
            Some(k) => &text[..=k],
            None => "",
        };
        complete
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(k, l)| {
                Record::parse(l).map_err(|msg| StoreError::Corrupt {
                    path: path.to_path_buf(),
                    line: k + 1,
                    msg,
                })
            })
            .collect()
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn append(&mut self, rec: Record) -> Result<(), StoreError> {
        self.append_all(std::iter::once(rec))
    }

    /// Writes the records in one flush.
    pub fn append_all(&mut self, recs: impl IntoIterator<Item = Record>) -> Result<(), StoreError> {
        let mut text = String::new();
        let start = self.records.len();
        for r in recs {
            text.push_str(&r.to_line());
            text.push('\n');
            self.records.push(r);
        }
        if self.records.len() == start {
            return Ok(());
        }
        let res = self.file.write_all(text.as_bytes()).and_then(|_| self.file.flush());
        res.map_err(|source| StoreError::Io {
            path: self.path.clone(),
            source,
        })
    }

    pub fn has_stage(&self, stamp: &Stamp, name: &str) -> bool {
        self.records
            .iter()
            .any(|r| matches!(r, Record::Stage { stamp: s, name: n } if s == stamp && n == name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::signature;

    fn sample() -> Vec<Record> {
        let a: IntMatrix = "2:14,2,1,0".parse().unwrap();
        let b: IntMatrix = "2:13,5,3,1".parse().unwrap();
        let step = ElementaryStep::new("2:1,0,0,1".parse().unwrap(), a.clone()).unwrap();
        vec![
            Record::Sig {
                stamp: Stamp::plain(),
                matrix: a.clone(),
                signature: signature(&a).unwrap(),
            },
            Record::Cmp {
                stamp: Stamp::plain(),
                a: a.clone(),
                b,
                verdict: Verdict::Distinct,
                route: Route::Picard,
            },
            Record::Cert {
                stamp: Stamp::full("25p", "depth:2,sum:75,shapes:2x2,nodes:-"),
                cert: SSECertificate {
                    from: a.clone(),
                    to: a,
                    steps: vec![step],
                },
            },
            Record::Stage {
                stamp: Stamp::full("custom:2:1,1,1,0", "depth:1,sum:9,shapes:2x2,nodes:-"),
                name: "signatures".into(),
            },
        ]
    }

    #[test]
    fn lines_round_trip() {
        for r in sample() {
            assert_eq!(Record::parse(&r.to_line()).unwrap(), r);
        }
    }

    #[test]
    fn reopen_replays_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log");
        let mut s = Store::open(&path).unwrap();
        s.append_all(sample()).unwrap();
        drop(s);
        let s = Store::open(&path).unwrap();
        assert_eq!(s.records(), &sample()[..]);
    }

    #[test]
    fn torn_tail_is_dropped_and_overwritten() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log");
        let recs = sample();
        let mut s = Store::open(&path).unwrap();
        s.append(recs[0].clone()).unwrap();
        drop(s);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"CMP|v=0.1.0;u=-;b=-|a=2:1").unwrap();
        drop(f);
        let mut s = Store::open(&path).unwrap();
        assert_eq!(s.records().len(), 1);
        s.append(recs[3].clone()).unwrap();
        drop(s);
        let s = Store::open(&path).unwrap();
        assert_eq!(s.records(), &[recs[0].clone(), recs[3].clone()]);
    }

    #[test]
    fn malformed_line_is_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log");
        std::fs::write(&path, "STAGE|v=1;u=-;b=-|x\nBOGUS|v=1;u=-;b=-|x\n").unwrap();
        match Store::open(&path) {
            Err(StoreError::Corrupt { line: 2, .. }) => {}
            other => panic!("expected corruption, got {:?}", other.map(|s| s.records().len())),
        }
    }
}
