//! Line-oriented text cache of the memo table.
//!
//! ```text
//! wpvol-bracket-cache v1
//! 0 4|0 0 0 0|2/1|1
//! 0 4|1 0 0 0|12/1|0
//! #sha256:<hex digest of the record lines, each terminated by '\n'>
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use sha2::{Digest, Sha256};

use super::{canonical_order, BracketEngine, BracketKey};
use crate::exactnum::PiScalar;

pub const CACHE_HEADER: &str = "wpvol-bracket-cache v1";
const CHECKSUM_PREFIX: &str = "#sha256:";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: unsupported cache header {found:?}")]
    VersionMismatch { line: usize, found: String },
    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: checksum failure: {reason}")]
    Checksum { line: usize, reason: String },
    #[error("line {line}: record {key} conflicts with memoized value {existing}")]
    Conflict { line: usize, key: String, existing: String },
}

/// Summary of the memo table.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CacheStats {
    pub records: usize,
    pub max_weight: u32,
    pub max_genus: u32,
    pub max_points: usize,
}

fn record_line(key: &BracketKey, value: &PiScalar) -> String {
    let d: Vec<String> = key.d().iter().map(u32::to_string).collect();
    let c = value.coeff();
    format!("{} {}|{}|{}/{}|{}", key.g(), key.n(), d.join(" "), c.numer(), c.denom(), value.pi_exp())
}

fn digest(lines: &[String]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

fn parse_record(raw: &str, line: usize) -> Result<(BracketKey, PiScalar), CacheError> {
    let bad = |reason: &str| CacheError::Malformed { line, reason: reason.to_string() };
    let fields: Vec<&str> = raw.split('|').collect();
    let [gn, ds, value, piexp] = fields[..] else {
        return Err(bad("expected 4 '|'-separated fields"));
    };
    let gn: Vec<&str> = gn.split(' ').collect();
    let [g, n] = gn[..] else { return Err(bad("expected 'g n'")) };
    let g: u32 = g.parse().map_err(|_| bad("bad genus"))?;
    let n: usize = n.parse().map_err(|_| bad("bad point count"))?;
    let d: Vec<u32> = ds
        .split(' ')
        .map(|x| x.parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("bad index list"))?;
    if d.len() != n {
        return Err(bad("index count differs from n"));
    }
    if !d.windows(2).all(|w| w[0] >= w[1]) {
        return Err(bad("indices not sorted descending"));
    }
    let key = BracketKey::new(g, d).map_err(|e| bad(&e.to_string()))?;
    let Some((num, den)) = value.split_once('/') else {
        return Err(bad("value must be num/den"));
    };
    let num: BigInt = num.parse().map_err(|_| bad("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| bad("bad denominator"))?;
    if !den.is_positive() || !num.gcd(&den).is_one() {
        return Err(bad("value not reduced"));
    }
    if !num.is_positive() {
        return Err(bad("bracket values are positive"));
    }
    let piexp: u32 = piexp.parse().map_err(|_| bad("bad pi exponent"))?;
    if key.d0() != Some(piexp) {
        return Err(bad("pi exponent must equal 3g-3+n-|d|"));
    }
    Ok((key, PiScalar::new(BigRational::new(num, den), piexp)))
}

impl BracketEngine {
    /// Record lines of the memo table in canonical order.
    pub fn canonical_dump(&self) -> Vec<String> {
        self.snapshot().iter().map(|(k, v)| record_line(k, v)).collect()
    }

    /// SHA-256 of the canonical dump.
    pub fn dump_sha256(&self) -> String {
        digest(&self.canonical_dump())
    }

    /// Writes the memo table atomically; returns the number of records.
    pub fn save_cache(&self, path: &Path) -> Result<usize, CacheError> {
        let lines = self.canonical_dump();
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        {
            let mut w = std::io::BufWriter::new(tmp.as_file_mut());
            writeln!(w, "{CACHE_HEADER}")?;
            for l in &lines {
                writeln!(w, "{l}")?;
            }
            writeln!(w, "{CHECKSUM_PREFIX}{}", digest(&lines))?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| CacheError::Io(e.error))?;
        Ok(lines.len())
    }

    /// Merges a cache file into the memo table; returns the number of records read.
    ///
    /// Nothing is inserted unless the whole file validates.
    pub fn load_cache(&self, path: &Path) -> Result<usize, CacheError> {
        let text = fs::read_to_string(path)?;
        let records = parse_cache(&text)?;
        for (line, key, value) in &records {
            self.insert_loaded(key.clone(), value.clone()).map_err(|existing| CacheError::Conflict {
                line: *line,
                key: key.to_string(),
                existing: existing.to_string(),
            })?;
        }
        Ok(records.len())
    }

    pub fn cache_stats(&self) -> CacheStats {
        let snap = self.snapshot();
        CacheStats {
            records: snap.len(),
            max_weight: snap.iter().map(|(k, _)| k.weight()).max().unwrap_or(0),
            max_genus: snap.iter().map(|(k, _)| k.g()).max().unwrap_or(0),
            max_points: snap.iter().map(|(k, _)| k.n()).max().unwrap_or(0),
        }
    }
}

fn parse_cache(text: &str) -> Result<Vec<(usize, BracketKey, PiScalar)>, CacheError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h == CACHE_HEADER => {}
        Some((line, h)) => return Err(CacheError::VersionMismatch { line, found: h.to_string() }),
        None => return Err(CacheError::VersionMismatch { line: 1, found: String::new() }),
    }
    let mut records = Vec::new();
    let mut raw_lines = Vec::new();
    let mut checksum: Option<(usize, String)> = None;
    let mut last_line = 1;
    for (line, raw) in lines {
        last_line = line;
        if raw.is_empty() {
            continue;
        }
        if checksum.is_some() {
            return Err(CacheError::Malformed { line, reason: "content after checksum".into() });
        }
        if let Some(hex) = raw.strip_prefix(CHECKSUM_PREFIX) {
            checksum = Some((line, hex.to_string()));
            continue;
        }
        let (key, value) = parse_record(raw, line)?;
        records.push((line, key, value));
        raw_lines.push(raw.to_string());
    }
    match checksum {
        Some((line, hex)) => {
            if hex != digest(&raw_lines) {
                return Err(CacheError::Checksum { line, reason: "digest mismatch".into() });
            }
        }
        None if records.is_empty() => {}
        None => {
            return Err(CacheError::Checksum { line: last_line + 1, reason: "missing checksum line".into() })
        }
    }
    let mut sorted = records.iter().map(|(_, k, _)| k).collect::<Vec<_>>();
    sorted.sort_by(|a, b| canonical_order(a, b));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(CacheError::Malformed { line: last_line, reason: "duplicate record".into() });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn with_checksum(records: &[&str]) -> String {
        let lines: Vec<String> = records.iter().map(|s| s.to_string()).collect();
        let mut s = format!("{CACHE_HEADER}\n");
        for l in &lines {
            s.push_str(l);
            s.push('\n');
        }
        s.push_str(&format!("{CHECKSUM_PREFIX}{}\n", digest(&lines)));
        s
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let e = BracketEngine::new();
        e.bracket_range(5);
        let path = dir.path().join("c.txt");
        let saved = e.save_cache(&path).unwrap();
        assert_eq!(saved, e.len());
        let fresh = BracketEngine::new();
        assert_eq!(fresh.load_cache(&path).unwrap(), saved);
        assert_eq!(fresh.snapshot(), e.snapshot());
        assert_eq!(fresh.dump_sha256(), e.dump_sha256());
    }

    #[test]
    fn header_only_file_loads_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "empty", &format!("{CACHE_HEADER}\n"));
        assert_eq!(BracketEngine::new().load_cache(&p).unwrap(), 0);
    }

    #[test]
    fn single_record() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "one", &with_checksum(&["0 4|0 0 0 0|2/1|1"]));
        let e = BracketEngine::new();
        assert_eq!(e.load_cache(&p).unwrap(), 1);
        assert_eq!(e.bracket_of(0, &[0, 0, 0, 0]).unwrap(), PiScalar::frac(2, 1, 1));
    }

    #[test]
    fn rejects_bad_files_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let e = BracketEngine::new();

        let p = write(&dir, "v2", "wpvol-bracket-cache v2\n");
        assert!(matches!(e.load_cache(&p), Err(CacheError::VersionMismatch { line: 1, .. })));

        let mut body = with_checksum(&["0 4|0 0 0 0|2/1|1"]);
        body = body.replace("2/1|1", "3/1|1");
        let p = write(&dir, "tampered", &body);
        assert!(matches!(e.load_cache(&p), Err(CacheError::Checksum { line: 3, .. })));

        let p = write(&dir, "garbage", &with_checksum(&["0 4|0 0 0 0|2/1|1", "0 4|0 0 0|2/1|1"]));
        assert!(matches!(e.load_cache(&p), Err(CacheError::Malformed { line: 3, .. })));

        let p = write(&dir, "grade", &with_checksum(&["0 4|0 0 0 0|2/1|2"]));
        assert!(matches!(e.load_cache(&p), Err(CacheError::Malformed { line: 2, .. })));

        let p = write(&dir, "unreduced", &with_checksum(&["0 4|0 0 0 0|4/2|1"]));
        assert!(matches!(e.load_cache(&p), Err(CacheError::Malformed { line: 2, .. })));

        let p = write(&dir, "nosum", &format!("{CACHE_HEADER}\n0 4|0 0 0 0|2/1|1\n"));
        assert!(matches!(e.load_cache(&p), Err(CacheError::Checksum { line: 3, .. })));
        assert!(e.is_empty());
    }

    #[test]
    fn conflicting_record_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let e = BracketEngine::new();
        e.bracket_of(0, &[0, 0, 0, 0]).unwrap();
        let p = write(&dir, "bad", &with_checksum(&["0 4|0 0 0 0|3/1|1"]));
        assert!(matches!(e.load_cache(&p), Err(CacheError::Conflict { line: 2, .. })));
    }
}
