//! Persistent memo table of invariants.
//!
//! File layout, one record per line after the header:
//!
//! ```text
//! redgw-cache v1 m=2,3
//! <key>\t<p/q>\t<computed|fixture>
//! ```
//!
//! Records are sorted by key text, so a store serializes canonically and
//! `load` followed by `save` reproduces a file byte for byte.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use once_cell::sync::OnceCell;

use crate::error::{Error, Result};
use crate::key::InvariantKey;
use crate::rat::Rat;

pub const FORMAT_VERSION: &str = "v1";
pub const CACHE_ENV: &str = "REDGW_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Computed,
    Fixture,
}

impl Provenance {
    fn name(self) -> &'static str {
        match self {
            Provenance::Computed => "computed",
            Provenance::Fixture => "fixture",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub value: Rat,
    pub provenance: Provenance,
}

type Cell = Arc<OnceCell<Record>>;

#[derive(Default, Debug)]
pub struct Store {
    cells: Mutex<HashMap<InvariantKey, Cell>>,
    producer_calls: AtomicUsize,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    fn cell(&self, key: &InvariantKey) -> Cell {
        self.cells.lock().unwrap().entry(key.clone()).or_default().clone()
    }

    pub fn get(&self, key: &InvariantKey) -> Option<Rat> {
        self.record(key).map(|r| r.value)
    }

    pub fn record(&self, key: &InvariantKey) -> Option<Record> {
        let cell = self.cells.lock().unwrap().get(key).cloned()?;
        cell.get().cloned()
    }

    /// Cached value, or the producer's value. Concurrent callers for the same
    /// key wait for a single producer run; a failing producer leaves the key
    /// empty.
    pub fn get_or_compute<F>(&self, key: &InvariantKey, producer: F) -> Result<Rat>
    where
        F: FnOnce() -> Result<Rat>,
    {
        let cell = self.cell(key);
        let rec = cell.get_or_try_init(|| {
            self.producer_calls.fetch_add(1, Ordering::SeqCst);
            producer().map(|value| Record { value, provenance: Provenance::Computed })
        })?;
        Ok(rec.value.clone())
    }

    /// Runs `producer` even when the key is cached and compares. A fixture
    /// that disagrees is a `FixtureConflict`.
    pub fn verify<F>(&self, key: &InvariantKey, producer: F) -> Result<Rat>
    where
        F: FnOnce() -> Result<Rat>,
    {
        let computed = producer()?;
        self.put(key, computed.clone(), Provenance::Computed)?;
        Ok(computed)
    }

    /// Adds a record. Fixtures are never replaced; disagreement with a
    /// fixture is an error in both directions.
    pub fn put(&self, key: &InvariantKey, value: Rat, provenance: Provenance) -> Result<()> {
        let cell = self.cell(key);
        let rec = Record { value: value.clone(), provenance };
        if cell.set(rec).is_ok() {
            return Ok(());
        }
        let old = cell.get().unwrap().clone();
        if old.value == value {
            if provenance == Provenance::Fixture && old.provenance == Provenance::Computed {
                // Promote: same value, stronger provenance.
                let fresh: Cell = Arc::new(OnceCell::new());
                let _ = fresh.set(Record { value, provenance });
                self.cells.lock().unwrap().insert(key.clone(), fresh);
            }
            return Ok(());
        }
        match (old.provenance, provenance) {
            (Provenance::Fixture, Provenance::Computed) => {
                Err(Error::FixtureConflict { key: key.to_string(), fixture: Box::new(old.value), computed: Box::new(value) })
            }
            (Provenance::Computed, Provenance::Fixture) => {
                Err(Error::FixtureConflict { key: key.to_string(), fixture: Box::new(value), computed: Box::new(old.value) })
            }
            (Provenance::Fixture, Provenance::Fixture) => Err(Error::Validation(format!(
                "two fixtures for {key}: {} and {value}",
                old.value
            ))),
            (Provenance::Computed, Provenance::Computed) => Err(Error::Internal(format!(
                "recomputation of {key} changed: {} then {value}",
                old.value
            ))),
        }
    }

    pub fn insert_fixture(&self, key: &InvariantKey, value: Rat) -> Result<()> {
        self.put(key, value, Provenance::Fixture)
    }

    /// Number of producer invocations so far.
    pub fn producer_calls(&self) -> usize {
        self.producer_calls.load(Ordering::SeqCst)
    }

    pub fn len(&self) -> usize {
        self.records().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All filled records in canonical order.
    pub fn records(&self) -> Vec<(InvariantKey, Record)> {
        let map = self.cells.lock().unwrap();
        let mut by_text: BTreeMap<String, (InvariantKey, Record)> = BTreeMap::new();
        for (k, c) in map.iter() {
            if let Some(r) = c.get() {
                by_text.insert(k.to_string(), (k.clone(), r.clone()));
            }
        }
        by_text.into_values().collect()
    }

    pub fn fixtures(&self) -> Vec<(InvariantKey, Rat)> {
        self.records()
            .into_iter()
            .filter(|(_, r)| r.provenance == Provenance::Fixture)
            .map(|(k, r)| (k, r.value))
            .collect()
    }

    /// Drops computed records, keeps fixtures.
    pub fn clear_computed(&self) {
        let mut map = self.cells.lock().unwrap();
        map.retain(|_, c| matches!(c.get(), Some(r) if r.provenance == Provenance::Fixture));
    }

    pub fn to_text(&self) -> String {
        let recs = self.records();
        let ms: BTreeSet<u32> = recs.iter().map(|(k, _)| k.m).collect();
        let ms = if ms.is_empty() {
            "-".to_string()
        } else {
            ms.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
        };
        let mut out = format!("redgw-cache {FORMAT_VERSION} m={ms}\n");
        for (k, r) in recs {
            out.push_str(&format!(
                "{}\t{}/{}\t{}\n",
                k,
                r.value.numer(),
                r.value.denom(),
                r.provenance.name()
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Store> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::CacheLine { line: 1, msg: "missing header".into() })?;
        let mut parts = header.split(' ');
        if parts.next() != Some("redgw-cache") {
            return Err(Error::CacheLine { line: 1, msg: "not a redgw cache header".into() });
        }
        let version = parts.next().unwrap_or("");
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch { found: version.to_string(), expected: FORMAT_VERSION.into() });
        }
        let declared = parts
            .next()
            .and_then(|p| p.strip_prefix("m="))
            .ok_or(Error::CacheLine { line: 1, msg: "header lacks m=".into() })?
            .to_string();
        let store = Store::new();
        for (i, line) in lines {
            let no = i + 1;
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::CacheLine { line: no, msg };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
            }
            let key: InvariantKey = fields[0].parse().map_err(|e: Error| err(e.to_string()))?;
            let value: Rat = fields[1].parse().map_err(|e: Error| err(e.to_string()))?;
            let provenance = match fields[2] {
                "computed" => Provenance::Computed,
                "fixture" => Provenance::Fixture,
                p => return Err(err(format!("unknown provenance {p:?}"))),
            };
            store.put(&key, value, provenance).map_err(|e| err(e.to_string()))?;
        }
        let ms: BTreeSet<u32> = store.records().iter().map(|(k, _)| k.m).collect();
        let found = if ms.is_empty() {
            "-".to_string()
        } else {
            ms.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
        };
        if found != declared {
            return Err(Error::CacheLine { line: 1, msg: format!("header declares m={declared}, records have m={found}") });
        }
        Ok(store)
    }

    pub fn load(path: &Path) -> Result<Store> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Store::from_text(&text)
    }

    /// Loads `path` if it exists, else starts empty.
    pub fn open(path: &Path) -> Result<Store> {
        if path.exists() {
            Store::load(path)
        } else {
            Ok(Store::new())
        }
    }

    /// Writes to a temporary sibling and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.to_text();
        let tmp = tmp_path(path);
        let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
        {
            let mut f = fs::File::create(&tmp).map_err(io)?;
            f.write_all(text.as_bytes()).map_err(io)?;
            f.sync_all().map_err(io)?;
        }
        fs::rename(&tmp, path).map_err(|e| {
            let _ = fs::remove_file(&tmp);
            io(e)
        })
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp{}", std::process::id()))
}

/// Default cache location from the environment, if set.
pub fn default_cache_path() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::key::{primary_key, Theory};

    fn key(d: u32) -> InvariantKey {
        primary_key(Theory::AbsoluteAmbient, 0, 2, d, &vec![(0, 2); 3 * d as usize - 1])
    }

    #[test]
    fn repeated_query_runs_producer_once() {
        let s = Store::new();
        for _ in 0..3 {
            assert_eq!(s.get_or_compute(&key(1), || Ok(Rat::one())).unwrap(), Rat::one());
        }
        assert_eq!(s.producer_calls(), 1);
    }

    #[test]
    fn fixture_hit_skips_producer() {
        let s = Store::new();
        s.insert_fixture(&key(3), Rat::int(12)).unwrap();
        let v = s.get_or_compute(&key(3), || panic!("producer must not run")).unwrap();
        assert_eq!(v, Rat::int(12));
    }

    #[test]
    fn conflict_reports_both_values() {
        let s = Store::new();
        s.insert_fixture(&key(3), Rat::int(12)).unwrap();
        match s.verify(&key(3), || Ok(Rat::int(13))) {
            Err(Error::FixtureConflict { fixture, computed, .. }) => {
                assert_eq!(*fixture, Rat::int(12));
                assert_eq!(*computed, Rat::int(13));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let s = Store::new();
        s.insert_fixture(&key(2), Rat::one()).unwrap();
        s.put(&key(1), Rat::new(-3, 4).unwrap(), Provenance::Computed).unwrap();
        let text = s.to_text();
        assert_eq!(Store::from_text(&text).unwrap().to_text(), text);
        let empty = "redgw-cache v1 m=-\n";
        assert!(Store::from_text(empty).unwrap().is_empty());
        let bad = text.replace("-3/4", "3/0");
        match Store::from_text(&bad) {
            Err(Error::CacheLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Store::from_text(&text.replace(" v1 ", " v9 ")),
            Err(Error::VersionMismatch { .. })
        ));
    }
}
