//! Embedded data for the cases where the Mordell curve has rank zero and
//! the Fermat cubic has only trivial solutions, plus an optional cross-check
//! against the LMFDB elliptic curve API.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::curve::{sixth_free_model, torsion_of_dk, TorsionGroup};

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error("no reference entry for d = {d}, k = {k}")]
    NoEntry { d: BigInt, k: BigInt },
    #[error("embedded entry {label} is inconsistent: {reason}")]
    Inconsistent { label: &'static str, reason: String },
    #[error("remote record for {0} not found")]
    NotFound(String),
    #[error("malformed remote record for {label}: {reason}")]
    Malformed { label: String, reason: String },
    #[error("network error: {0}")]
    Network(String),
    #[error("remote lookups are not compiled into this build")]
    OfflineBuild,
    #[error("cache error: {0}")]
    Cache(#[from] std::io::Error),
    #[error("cache file is not valid JSON: {0}")]
    CacheFormat(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReferenceEntry {
    pub d: i64,
    pub k: i64,
    /// LMFDB label of the curve `y^2 = x^3 - 432 d^3 k^2`.
    pub label: &'static str,
    /// Sixth-power-free coefficient of the minimal model.
    pub reduced_coefficient: i64,
    pub rank: u32,
    pub torsion: TorsionGroup,
    pub conclusion: &'static str,
}

const ONLY_TRIVIAL: &str = "only trivial solutions";

static TABLE: [ReferenceEntry; 3] = [
    ReferenceEntry {
        d: 1,
        k: 1,
        label: "27.a3",
        reduced_coefficient: -432,
        rank: 0,
        torsion: TorsionGroup::Z3,
        conclusion: ONLY_TRIVIAL,
    },
    ReferenceEntry {
        d: -1,
        k: 1,
        label: "432.e4",
        reduced_coefficient: 432,
        rank: 0,
        torsion: TorsionGroup::Trivial,
        conclusion: ONLY_TRIVIAL,
    },
    ReferenceEntry {
        d: -3,
        k: 1,
        label: "27.a4",
        reduced_coefficient: 16,
        rank: 0,
        torsion: TorsionGroup::Z3,
        conclusion: ONLY_TRIVIAL,
    },
];

pub fn entries() -> &'static [ReferenceEntry] {
    &TABLE
}

pub fn lookup(d: &BigInt, k: &BigInt) -> Option<&'static ReferenceEntry> {
    TABLE
        .iter()
        .find(|e| BigInt::from(e.d) == *d && BigInt::from(e.k) == *k)
}

pub fn lookup_label(label: &str) -> Option<&'static ReferenceEntry> {
    TABLE.iter().find(|e| e.label == label)
}

/// Recomputes each entry's reduced coefficient and torsion group. Callers
/// run this once at startup; a failure means the table was edited badly.
pub fn check_embedded_table() -> Result<(), ReferenceError> {
    for entry in &TABLE {
        let d = BigInt::from(entry.d);
        let k = BigInt::from(entry.k);
        let coefficient = BigInt::from(-432) * d.pow(3) * k.pow(2);
        let (reduced, _) = sixth_free_model(&coefficient).map_err(|e| ReferenceError::Inconsistent {
            label: entry.label,
            reason: e.to_string(),
        })?;
        if reduced != BigInt::from(entry.reduced_coefficient) {
            return Err(ReferenceError::Inconsistent {
                label: entry.label,
                reason: format!("reduced coefficient is {reduced}, table says {}", entry.reduced_coefficient),
            });
        }
        let torsion = torsion_of_dk(&d, &k).map_err(|e| ReferenceError::Inconsistent {
            label: entry.label,
            reason: e.to_string(),
        })?;
        if torsion != entry.torsion {
            return Err(ReferenceError::Inconsistent {
                label: entry.label,
                reason: format!("torsion is {torsion}, table says {}", entry.torsion),
            });
        }
    }
    Ok(())
}

/// Rank and torsion as reported by the remote database.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteRecord {
    pub rank: u32,
    pub torsion: TorsionGroup,
    /// Unix seconds.
    pub fetched_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub label: &'static str,
    pub embedded_rank: u32,
    pub embedded_torsion: TorsionGroup,
    pub remote: RemoteRecord,
    pub rank_matches: bool,
    pub torsion_matches: bool,
}

impl Comparison {
    pub fn new(entry: &ReferenceEntry, remote: RemoteRecord) -> Self {
        Self {
            label: entry.label,
            embedded_rank: entry.rank,
            embedded_torsion: entry.torsion,
            rank_matches: remote.rank == entry.rank,
            torsion_matches: remote.torsion == entry.torsion,
            remote,
        }
    }

    pub fn agrees(&self) -> bool {
        self.rank_matches && self.torsion_matches
    }
}

pub fn remote_url(label: &str) -> String {
    format!("https://www.lmfdb.org/api/ec_curvedata/?lmfdb_label={label}&_format=json")
}

/// Parses an `ec_curvedata` API response. Torsion comes from
/// `torsion_structure` (invariant factors) when present, else from the
/// `torsion` order.
pub fn parse_remote_response(label: &str, body: &str, fetched_at: u64) -> Result<RemoteRecord, ReferenceError> {
    let malformed = |reason: &str| ReferenceError::Malformed {
        label: label.to_string(),
        reason: reason.to_string(),
    };
    let json: Value = serde_json::from_str(body).map_err(|e| malformed(&e.to_string()))?;
    let data = json
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing data array"))?;
    let record = data.first().ok_or_else(|| ReferenceError::NotFound(label.to_string()))?;

    let rank = record
        .get("rank")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("missing rank"))?;
    let order = match record.get("torsion_structure").and_then(Value::as_array) {
        Some(factors) => factors.iter().try_fold(1u64, |acc, f| {
            f.as_u64().map(|n| acc * n).ok_or_else(|| malformed("non-integer torsion factor"))
        })?,
        None => record
            .get("torsion")
            .and_then(Value::as_u64)
            .ok_or_else(|| malformed("missing torsion"))?,
    };
    let torsion = u32::try_from(order)
        .ok()
        .and_then(TorsionGroup::from_order)
        .ok_or_else(|| malformed(&format!("torsion order {order} is not possible for y^2 = x^3 + D")))?;
    Ok(RemoteRecord {
        rank: u32::try_from(rank).map_err(|_| malformed("rank out of range"))?,
        torsion,
        fetched_at,
    })
}

/// On-disk cache of remote records, keyed by label. Writes go through a
/// temporary file in the same directory followed by a rename.
#[derive(Debug, Clone)]
pub struct RemoteCache {
    path: PathBuf,
}

impl RemoteCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn load(&self) -> Result<BTreeMap<String, RemoteRecord>, ReferenceError> {
        match fs::read_to_string(&self.path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BTreeMap::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn get(&self, label: &str) -> Result<Option<RemoteRecord>, ReferenceError> {
        Ok(self.load()?.remove(label))
    }

    pub fn insert(&self, label: &str, record: &RemoteRecord) -> Result<(), ReferenceError> {
        let mut all = self.load()?;
        all.insert(label.to_string(), record.clone());
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer_pretty(&mut tmp, &all)?;
        tmp.write_all(b"\n")?;
        tmp.as_file().sync_all()?;
        tmp.persist(&self.path).map_err(|e| e.error)?;
        Ok(())
    }
}

/// Fetches the remote record for `label`, consulting and filling `cache`.
#[cfg(feature = "online")]
pub fn fetch_remote(label: &str, cache: Option<&RemoteCache>) -> Result<RemoteRecord, ReferenceError> {
    use std::sync::Mutex;
    use std::time::{SystemTime, UNIX_EPOCH};

    static FETCH_LOCK: Mutex<()> = Mutex::new(());
    let _guard = FETCH_LOCK.lock().unwrap_or_else(|e| e.into_inner());

    if let Some(cache) = cache {
        if let Some(hit) = cache.get(label)? {
            return Ok(hit);
        }
    }
    let body = ureq::get(&remote_url(label))
        .call()
        .map_err(|e| ReferenceError::Network(e.to_string()))?
        .body_mut()
        .read_to_string()
        .map_err(|e| ReferenceError::Network(e.to_string()))?;
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let record = parse_remote_response(label, &body, now)?;
    if let Some(cache) = cache {
        cache.insert(label, &record)?;
    }
    Ok(record)
}

#[cfg(not(feature = "online"))]
pub fn fetch_remote(_label: &str, _cache: Option<&RemoteCache>) -> Result<RemoteRecord, ReferenceError> {
    Err(ReferenceError::OfflineBuild)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_is_consistent() {
        check_embedded_table().unwrap();
    }

    #[test]
    fn lookups() {
        let e = lookup(&BigInt::from(-1), &BigInt::from(1)).unwrap();
        assert_eq!(e.label, "432.e4");
        assert_eq!(e.torsion, TorsionGroup::Trivial);
        assert!(lookup(&BigInt::from(2), &BigInt::from(1)).is_none());
        assert!(lookup(&BigInt::from(1), &BigInt::from(2)).is_none());
        assert_eq!(lookup_label("27.a4").unwrap().d, -3);
    }

    #[test]
    fn parse_structure_and_order() {
        let body = r#"{"data": [{"lmfdb_label": "27.a3", "rank": 0, "torsion_structure": [3], "torsion": 3}]}"#;
        let r = parse_remote_response("27.a3", body, 7).unwrap();
        assert_eq!(r, RemoteRecord { rank: 0, torsion: TorsionGroup::Z3, fetched_at: 7 });

        let body = r#"{"data": [{"rank": 1, "torsion_structure": []}]}"#;
        assert_eq!(parse_remote_response("x", body, 0).unwrap().torsion, TorsionGroup::Trivial);

        let body = r#"{"data": [{"rank": 0, "torsion": 6}]}"#;
        assert_eq!(parse_remote_response("x", body, 0).unwrap().torsion, TorsionGroup::Z6);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_remote_response("x", r#"{"data": []}"#, 0),
            Err(ReferenceError::NotFound(_))
        ));
        assert!(matches!(
            parse_remote_response("x", "not json", 0),
            Err(ReferenceError::Malformed { .. })
        ));
        assert!(matches!(
            parse_remote_response("x", r#"{"data": [{"rank": 0, "torsion_structure": [2, 2]}]}"#, 0),
            Err(ReferenceError::Malformed { .. })
        ));
    }

    #[test]
    fn comparison_flags_mismatch() {
        let entry = lookup_label("27.a3").unwrap();
        let good = Comparison::new(entry, RemoteRecord { rank: 0, torsion: TorsionGroup::Z3, fetched_at: 0 });
        assert!(good.agrees());
        let bad = Comparison::new(entry, RemoteRecord { rank: 1, torsion: TorsionGroup::Z3, fetched_at: 0 });
        assert!(!bad.agrees());
        assert!(!bad.rank_matches);
        assert!(bad.torsion_matches);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RemoteCache::new(dir.path().join("nested").join("cache.json"));
        assert!(cache.get("27.a3").unwrap().is_none());
        let record = RemoteRecord { rank: 0, torsion: TorsionGroup::Z3, fetched_at: 1 };
        cache.insert("27.a3", &record).unwrap();
        let other = RemoteRecord { rank: 0, torsion: TorsionGroup::Trivial, fetched_at: 2 };
        cache.insert("432.e4", &other).unwrap();
        assert_eq!(cache.get("27.a3").unwrap(), Some(record));
        assert_eq!(cache.load().unwrap().len(), 2);
    }
}
