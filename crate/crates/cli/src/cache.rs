//! Persistent invariant cache.
//!
//! One entry per line, `kind|key|value|version`. The file is an append-only
//! log: a key may appear more than once, but every occurrence must carry
//! the same value. A disagreement means some computation is not
//! deterministic and is reported as a hard error.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Mutex, RwLock};

use num_bigint::BigInt;
use quadtower::multiquad::MultiquadField;
use quadtower::quadratic::{self, QuadInvariants, QuadUnit, SquarefreeRadicand};
use quadtower::store::InvariantStore;
use quadtower::{units, Error, Result, StepBudget};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    H2,
    Unit,
    QIdx,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::H2 => "h2",
            Kind::Unit => "unit",
            Kind::QIdx => "qidx",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h2" => Ok(Kind::H2),
            "unit" => Ok(Kind::Unit),
            "qidx" => Ok(Kind::QIdx),
            _ => Err(Error::InvalidInput(format!("unknown cache kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub kind: Kind,
    pub key: String,
    pub value: String,
    pub version: u32,
}

impl CacheEntry {
    pub fn new(kind: Kind, key: impl Into<String>, value: impl Into<String>) -> Self {
        Self { kind, key: key.into(), value: value.into(), version: FORMAT_VERSION }
    }

    pub fn parse(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split('|').collect();
        let [kind, key, value, version] = parts[..] else {
            return Err(Error::InvalidInput(format!("malformed cache line {line:?}")));
        };
        let version = version
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad cache version in {line:?}")))?;
        Ok(Self { kind: kind.parse()?, key: key.to_string(), value: value.to_string(), version })
    }

    pub fn line(&self) -> String {
        format!("{}|{}|{}|{}", self.kind.tag(), self.key, self.value, self.version)
    }
}

fn encode_unit(u: &QuadUnit) -> String {
    format!("{},{},{}", u.x, u.y, u8::from(u.half))
}

fn decode_unit(d: u64, value: &str) -> Result<QuadUnit> {
    let bad = || Error::Inconsistent(format!("bad cached unit {value:?} for {d}"));
    let parts: Vec<&str> = value.split(',').collect();
    let [x, y, half] = parts[..] else { return Err(bad()) };
    let x: BigInt = x.parse().map_err(|_| bad())?;
    let y: BigInt = y.parse().map_err(|_| bad())?;
    let u = match half {
        "1" => QuadUnit { d, x, y, half: true },
        "0" => QuadUnit { d, x, y, half: false },
        _ => return Err(bad()),
    };
    if !u.is_unit() {
        return Err(bad());
    }
    Ok(u)
}

fn encode_class_numbers(inv: &QuadInvariants) -> String {
    format!("h={};h+={};h2={}", inv.h, inv.h_plus, inv.h2)
}

fn decode_h_plus(value: &str) -> Result<u64> {
    value
        .split(';')
        .find_map(|kv| kv.strip_prefix("h+="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Inconsistent(format!("bad cached class numbers {value:?}")))
}

/// An [`InvariantStore`] backed by a shared in-memory map and, optionally,
/// a cache file.
///
/// Lookups take a read lock. New results are recorded under a write lock
/// and queued; only [`CachedStore::flush`] touches the file, so a single
/// caller decides when a batch is written.
#[derive(Debug)]
pub struct CachedStore {
    path: Option<PathBuf>,
    step_limit: u64,
    budget: StepBudget,
    entries: RwLock<HashMap<(Kind, String), String>>,
    pending: Mutex<Vec<CacheEntry>>,
}

impl CachedStore {
    /// In-memory only.
    pub fn ephemeral(step_limit: u64) -> Self {
        Self {
            path: None,
            step_limit,
            budget: StepBudget::new(step_limit),
            entries: RwLock::default(),
            pending: Mutex::default(),
        }
    }

    /// Loads `path` if it exists; new entries are appended to it on flush.
    pub fn open(path: &Path, step_limit: u64) -> Result<Self> {
        let store = Self { path: Some(path.to_path_buf()), ..Self::ephemeral(step_limit) };
        if path.exists() {
            let file = File::open(path).map_err(|e| io_error(path, e))?;
            for line in BufReader::new(file).lines() {
                let line = line.map_err(|e| io_error(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry = CacheEntry::parse(&line)?;
                // entries written by another format version are ignored
                if entry.version == FORMAT_VERSION {
                    store.merge(entry, false)?;
                }
            }
        }
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, kind: Kind, key: &str) -> Option<String> {
        self.entries.read().expect("cache lock").get(&(kind, key.to_string())).cloned()
    }

    /// Records a value. An existing entry with a different value is an
    /// error; an identical one is a no-op.
    pub fn insert(&self, kind: Kind, key: &str, value: String) -> Result<()> {
        self.merge(CacheEntry::new(kind, key, value), true)
    }

    fn merge(&self, entry: CacheEntry, queue: bool) -> Result<()> {
        let mut map = self.entries.write().expect("cache lock");
        let slot = (entry.kind, entry.key.clone());
        match map.get(&slot) {
            Some(old) if *old == entry.value => return Ok(()),
            Some(old) => {
                return Err(Error::Inconsistent(format!(
                    "cache conflict for {} {}: {} vs {}",
                    entry.kind.tag(),
                    entry.key,
                    old,
                    entry.value
                )))
            }
            None => {}
        }
        map.insert(slot, entry.value.clone());
        drop(map);
        if queue {
            self.pending.lock().expect("cache lock").push(entry);
        }
        Ok(())
    }

    /// Appends queued entries to the cache file and syncs it. Entries are
    /// written sorted so the file contents do not depend on thread timing.
    pub fn flush(&self) -> Result<()> {
        let mut pending = std::mem::take(&mut *self.pending.lock().expect("cache lock"));
        let Some(path) = &self.path else { return Ok(()) };
        if pending.is_empty() {
            return Ok(());
        }
        pending.sort_by(|a, b| (a.kind, &a.key).cmp(&(b.kind, &b.key)));
        let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| io_error(path, e))?;
        let mut buf = String::new();
        for e in &pending {
            buf.push_str(&e.line());
            buf.push('\n');
        }
        file.write_all(buf.as_bytes()).map_err(|e| io_error(path, e))?;
        file.sync_all().map_err(|e| io_error(path, e))
    }

    fn fresh_budget(&self) -> StepBudget {
        StepBudget::new(self.step_limit)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidInput(format!("cache file {}: {e}", path.display()))
}

/// Gives one computation its own step budget while reading and writing
/// through the shared cache.
struct Scoped<'a> {
    parent: &'a CachedStore,
    budget: StepBudget,
}

impl InvariantStore for Scoped<'_> {
    fn budget(&self) -> &StepBudget {
        &self.budget
    }

    fn quadratic(&self, rad: SquarefreeRadicand) -> Result<QuadInvariants> {
        self.parent.quadratic(rad)
    }

    fn fundamental_unit(&self, rad: SquarefreeRadicand) -> Result<QuadUnit> {
        self.parent.fundamental_unit(rad)
    }
}

impl InvariantStore for CachedStore {
    fn budget(&self) -> &StepBudget {
        &self.budget
    }

    fn fundamental_unit(&self, rad: SquarefreeRadicand) -> Result<QuadUnit> {
        let key = rad.d().to_string();
        if let Some(v) = self.get(Kind::Unit, &key) {
            return decode_unit(rad.d(), &v);
        }
        let u = quadratic::fundamental_unit(rad, &self.fresh_budget())?;
        self.insert(Kind::Unit, &key, encode_unit(&u))?;
        Ok(u)
    }

    fn quadratic(&self, rad: SquarefreeRadicand) -> Result<QuadInvariants> {
        let key = rad.d().to_string();
        let eps = self.fundamental_unit(rad)?;
        if let Some(v) = self.get(Kind::H2, &key) {
            let inv = QuadInvariants::from_parts(rad, eps, decode_h_plus(&v)?)?;
            if encode_class_numbers(&inv) != v {
                return Err(Error::Inconsistent(format!("cached class numbers {v:?} for {key} are not self-consistent")));
            }
            return Ok(inv);
        }
        let inv = QuadInvariants::from_parts(rad, eps, quadratic::narrow_class_number(rad)?)?;
        self.insert(Kind::H2, &key, encode_class_numbers(&inv))?;
        Ok(inv)
    }

    fn q_index(&self, k: &MultiquadField) -> Result<u64> {
        let key = k.descriptor();
        if let Some(v) = self.get(Kind::QIdx, &key) {
            return v.parse().map_err(|_| Error::Inconsistent(format!("bad cached unit index {v:?} for {key}")));
        }
        let scoped = Scoped { parent: self, budget: self.fresh_budget() };
        let q = units::unit_group(k, &scoped)?.q_index;
        self.insert(Kind::QIdx, &key, q.to_string())?;
        Ok(q)
    }
}
