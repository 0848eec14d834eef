//! Argument parsing and the subcommands. Every command renders into a
//! string first so the binary and the tests see the same bytes.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use quadtower::arithmetic::{factor, kronecker_i64, sieve_primes, CongruenceClass};
use quadtower::classfield::kuroda_h2;
use quadtower::multiquad::MultiquadField;
use quadtower::quadratic::{QuadInvariants, SquarefreeRadicand};
use quadtower::store::InvariantStore;
use quadtower::tower::{hypothesis_checks, verify_theorem, TowerVerdict, TripleFields, CSV_HEADER};
use quadtower::{Error, StepBudget};
use rayon::prelude::*;

use crate::cache::CachedStore;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_HYPOTHESES: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Unit coordinates longer than this are elided in human output.
pub const ELIDE_DIGITS: usize = 80;

/// Bounding box that contains every row of the published table.
pub const TABLE1_BOUNDS: (u64, u64, u64) = (61, 83, 67);

/// Triples per cache batch during a search.
const BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
    Records,
}

#[derive(Debug, Parser)]
#[command(name = "quadtower", version, about = "2-class field towers of Q(sqrt pq, sqrt ps) and their building blocks")]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Invariant cache file.
    #[arg(long, global = true, env = "QTOWER_CACHE")]
    pub cache: Option<PathBuf>,
    /// Worker threads for `search` (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Step limit for each individual unit or unit-index computation.
    #[arg(long, global = true, default_value_t = StepBudget::DEFAULT_LIMIT)]
    pub step_budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the hypotheses for (p, q, s) and classify the tower group.
    Verify { p: u64, q: u64, s: u64 },
    /// Run `verify` on every admissible triple inside a bounding box.
    Search {
        max_p: u64,
        max_q: u64,
        max_s: u64,
        /// Stop after this many rows.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Invariants of the real quadratic field Q(sqrt d).
    Quad { d: u64 },
    /// Kuroda's formula for a biquadratic or triquadratic field.
    Field {
        #[arg(required = true, num_args = 1..)]
        generators: Vec<u64>,
    },
    /// `search 61 83 67`, the box containing the published table.
    Table1,
}

/// Result of one invocation: what goes to stdout, stderr, and the exit
/// status.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK, ..Self::default() }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Self { stderr, code, ..Self::default() }
    }
}

/// Exit status for a library error: bad input is a usage error, anything
/// else is a computational failure.
fn code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_)
        | Error::NotSquarefree(_)
        | Error::DependentGenerators(_)
        | Error::UnsupportedDegree(_)
        | Error::OutOfPrimalityRange(_) => EXIT_USAGE,
        _ => EXIT_COMPUTE,
    }
}

fn error_outcome(e: &Error) -> Outcome {
    Outcome::fail(code_for(e), format!("error: {e}"))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome::fail(EXIT_USAGE, text),
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    if cli.step_budget == 0 {
        return Outcome::fail(EXIT_USAGE, "error: --step-budget must be positive");
    }
    if cli.jobs == Some(0) {
        return Outcome::fail(EXIT_USAGE, "error: --jobs must be positive");
    }
    let store = match &cli.cache {
        Some(path) => match CachedStore::open(path, cli.step_budget) {
            Ok(s) => s,
            Err(e) => return Outcome::fail(EXIT_COMPUTE, format!("error: {e}")),
        },
        None => CachedStore::ephemeral(cli.step_budget),
    };
    let mut out = match &cli.command {
        Command::Verify { p, q, s } => cmd_verify(*p, *q, *s, cli.format, &store),
        Command::Search { max_p, max_q, max_s, limit } => {
            cmd_search((*max_p, *max_q, *max_s), *limit, cli.format, cli.jobs, &store)
        }
        Command::Table1 => cmd_search(TABLE1_BOUNDS, None, cli.format, cli.jobs, &store),
        Command::Quad { d } => cmd_quad(*d, cli.format, &store),
        Command::Field { generators } => cmd_field(generators, cli.format, &store),
    };
    if let Err(e) = store.flush() {
        out.stderr.push_str(&format!("error: {e}\n"));
        if out.code == EXIT_OK {
            out.code = EXIT_COMPUTE;
        }
    }
    out
}

const MD_HEADER: &str = "| p | q | s | (p/q) | (p/s) | h2(pqs) | h2(C(K)) | verdict |\n|---|---|---|---|---|---|---|---|\n";

fn md_row(v: &TowerVerdict) -> String {
    format!("| {} |\n", v.csv_row().replace(',', " | "))
}

fn render_verdicts(verdicts: &[TowerVerdict], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for v in verdicts {
                out.push_str(&v.csv_row());
                out.push('\n');
            }
        }
        Format::Md => {
            out.push_str(MD_HEADER);
            for v in verdicts {
                out.push_str(&md_row(v));
            }
        }
        Format::Records => {
            for (i, v) in verdicts.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&v.to_record());
            }
        }
    }
    out
}

pub fn cmd_verify(p: u64, q: u64, s: u64, format: Option<Format>, store: &CachedStore) -> Outcome {
    let v = match verify_theorem(p, q, s, store) {
        Ok(v) => v,
        Err(e) => return Outcome::fail(EXIT_COMPUTE, format!("error: {e}")),
    };
    let stdout = render_verdicts(std::slice::from_ref(&v), format.unwrap_or(Format::Records));
    let (code, stderr) = if !v.hypotheses_hold() {
        let failed: Vec<&str> = v.hypothesis_checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        (EXIT_HYPOTHESES, format!("hypotheses fail: {}\n", failed.join(", ")))
    } else if v.classification.is_none() {
        (EXIT_COMPUTE, "no classification: the computed invariants lie outside the theorem\n".to_string())
    } else {
        (EXIT_OK, String::new())
    };
    Outcome { stdout, stderr, code }
}

/// Triples inside the box satisfying the congruence and symbol
/// conditions, in lexicographic order.
pub fn admissible_triples(max_p: u64, max_q: u64, max_s: u64) -> Vec<(u64, u64, u64)> {
    let class = |r, m| CongruenceClass::new(r, m).expect("valid class");
    let ps = sieve_primes(max_p, class(5, 8));
    let qs = sieve_primes(max_q, class(3, 8));
    let ss = sieve_primes(max_s, class(3, 4));
    let residue = |a: u64, n: u64| kronecker_i64(a as i64, n as i64).ok() == Some(1);
    let mut out = Vec::new();
    for &p in &ps {
        for &q in qs.iter().filter(|&&q| residue(p, q)) {
            for &s in ss.iter().filter(|&&s| s != q && residue(p, s)) {
                debug_assert!(hypothesis_checks(p, q, s).iter().all(|c| c.pass));
                out.push((p, q, s));
            }
        }
    }
    out
}

pub fn cmd_search(
    bounds: (u64, u64, u64),
    limit: Option<usize>,
    format: Option<Format>,
    jobs: Option<usize>,
    store: &CachedStore,
) -> Outcome {
    let (max_p, max_q, max_s) = bounds;
    if max_p < 3 || max_q < 3 || max_s < 3 {
        return Outcome::fail(EXIT_USAGE, "error: search bounds must be at least 3");
    }
    let mut triples = admissible_triples(max_p, max_q, max_s);
    if let Some(n) = limit {
        triples.truncate(n);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_COMPUTE, format!("error: {e}")),
    };
    let mut verdicts = Vec::with_capacity(triples.len());
    for batch in triples.chunks(BATCH) {
        let results: Vec<_> =
            pool.install(|| batch.par_iter().map(|&(p, q, s)| verify_theorem(p, q, s, store)).collect());
        for (r, &(p, q, s)) in results.into_iter().zip(batch) {
            match r {
                Ok(v) => verdicts.push(v),
                Err(e) => {
                    let mut out = Outcome::fail(EXIT_COMPUTE, format!("error at ({p}, {q}, {s}): {e}"));
                    out.stdout = render_verdicts(&verdicts, format.unwrap_or(Format::Csv));
                    return out;
                }
            }
        }
        if let Err(e) = store.flush() {
            return error_outcome(&e);
        }
    }
    Outcome::ok(render_verdicts(&verdicts, format.unwrap_or(Format::Csv)))
}

fn unit_text(inv: &QuadInvariants, full: bool) -> String {
    let digits = inv.eps.digits();
    if full || digits <= ELIDE_DIGITS {
        inv.eps.to_string()
    } else {
        format!("<{digits} digits>")
    }
}

fn key_values(rows: &[(String, String)], format: Option<Format>) -> String {
    let mut out = String::new();
    match format {
        Some(Format::Csv) => {
            let keys: Vec<&str> = rows.iter().map(|(k, _)| k.as_str()).collect();
            let vals: Vec<String> = rows.iter().map(|(_, v)| csv_field(v)).collect();
            out.push_str(&keys.join(","));
            out.push('\n');
            out.push_str(&vals.join(","));
            out.push('\n');
        }
        Some(Format::Md) => {
            out.push_str("| key | value |\n|---|---|\n");
            for (k, v) in rows {
                out.push_str(&format!("| {k} | {v} |\n"));
            }
        }
        Some(Format::Records) => {
            for (k, v) in rows {
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
        None => {
            let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                out.push_str(&format!("{k:<w$}  {v}\n"));
            }
        }
    }
    out
}

fn csv_field(v: &str) -> String {
    if v.contains(',') || v.contains('"') {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

pub fn cmd_quad(d: u64, format: Option<Format>, store: &CachedStore) -> Outcome {
    let inv = match SquarefreeRadicand::new(d).and_then(|rad| store.quadratic(rad)) {
        Ok(inv) => inv,
        Err(e) => return error_outcome(&e),
    };
    let full = matches!(format, Some(Format::Records | Format::Csv));
    let rows = vec![
        ("d".to_string(), d.to_string()),
        ("discriminant".into(), inv.radicand.discriminant().to_string()),
        ("unit".into(), unit_text(&inv, full)),
        ("unit digits".into(), inv.eps.digits().to_string()),
        ("norm".into(), inv.unit_norm.to_string()),
        ("h".into(), inv.h.to_string()),
        ("h+".into(), inv.h_plus.to_string()),
        ("h2".into(), inv.h2.to_string()),
        ("2-rank".into(), inv.two_rank_narrow.to_string()),
    ];
    Outcome::ok(key_values(&rows, format))
}

/// Triples `(p, q, s)` built from the odd primes of the generators for
/// which `k` is one of the named fields.
fn named_shapes(k: &MultiquadField) -> Vec<String> {
    let mut primes: Vec<u64> =
        k.generators().iter().flat_map(|&g| factor(g)).map(|(p, _)| p).filter(|&p| p > 2).collect();
    primes.sort_unstable();
    primes.dedup();
    let mut out = Vec::new();
    for &p in &primes {
        for &q in &primes {
            for &s in &primes {
                if !hypothesis_checks(p, q, s).iter().all(|c| c.pass) {
                    continue;
                }
                if let Some(name) = TripleFields::new(p, q, s).ok().and_then(|t| t.name_of(k)) {
                    out.push(format!("{name} for (p, q, s) = ({p}, {q}, {s})"));
                }
            }
        }
    }
    out
}

pub fn cmd_field(generators: &[u64], format: Option<Format>, store: &CachedStore) -> Outcome {
    let k = match MultiquadField::new(generators) {
        Ok(k) => k,
        Err(e) => return error_outcome(&e),
    };
    if !(2..=3).contains(&k.rank()) {
        return Outcome::fail(EXIT_USAGE, "error: field needs 2 or 3 independent generators");
    }
    let b = match kuroda_h2(&k, store) {
        Ok(b) => b,
        Err(e) => return error_outcome(&e),
    };
    let mut rows = vec![("field".to_string(), k.to_string()), ("degree".into(), k.degree().to_string())];
    for name in named_shapes(&k) {
        rows.push(("name".into(), name));
    }
    for (d, h) in &b.subfield_h2 {
        rows.push((format!("h2({d})"), h.to_string()));
    }
    rows.push(("q".into(), b.q_index.to_string()));
    rows.push(("v".into(), b.v_exponent.to_string()));
    rows.push(("h2".into(), b.h2.to_string()));
    Outcome::ok(key_values(&rows, format))
}
