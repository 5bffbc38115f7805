//! On-disk orbit cache keyed by `(map id, seed)`.
//!
//! Records are plain text:
//!
//! ```text
//! orbitweil-orbit v1
//! map <hex id>
//! nvars <k>
//! steps <m>
//! <n> <len>:<decimal> .. (k coordinates)
//! end
//! ```
//!
//! Writers go through a temporary file and a rename, so readers see either the
//! old record or the new one. A record is trusted only after its first steps
//! are recomputed and compared.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use crate::polydyn::{iterate, Morphism, OrbitRecord, ProjPoint};
use crate::{Error, Result};

const MAGIC: &str = "orbitweil-orbit v1";
/// Steps recomputed on load before a record is trusted.
const VERIFY_STEPS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    /// A shorter record was found and extended.
    Extended {
        from: usize,
    },
    Miss,
    /// The stored record failed validation and was replaced.
    Recomputed {
        reason: String,
    },
}

#[derive(Clone, Debug)]
pub struct OrbitCache {
    dir: PathBuf,
}

impl OrbitCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(OrbitCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(map_id: &str, seed: &ProjPoint) -> String {
        let coords: Vec<String> = seed.coords().iter().map(BigInt::to_string).collect();
        let digest = Sha256::digest(coords.join(":").as_bytes());
        format!("{map_id}_{}", &hex::encode(digest)[..16])
    }

    pub fn path(&self, map_id: &str, seed: &ProjPoint) -> PathBuf {
        self.dir.join(format!("{}.orbit", Self::key(map_id, seed)))
    }

    pub fn store(&self, record: &OrbitRecord) -> Result<PathBuf> {
        let path = self.path(record.map_id(), record.seed());
        let tmp = self.dir.join(format!(
            ".{}.tmp-{}",
            Self::key(record.map_id(), record.seed()),
            std::process::id()
        ));
        fs::write(&tmp, encode(record)).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    /// `Ok(None)` on a miss; a record that fails validation is an error.
    pub fn load(&self, f: &Morphism, seed: &ProjPoint) -> Result<Option<OrbitRecord>> {
        let path = self.path(&f.id(), seed);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        decode(&text, f, seed).map(Some)
    }

    /// The orbit to `depth`, from the cache where possible; the cache is
    /// updated whenever new steps were computed.
    pub fn orbit(&self, f: &Morphism, seed: &ProjPoint, depth: usize) -> Result<(OrbitRecord, CacheOutcome)> {
        let (mut record, outcome) = match self.load(f, seed) {
            Ok(Some(r)) if r.depth() >= depth => return Ok((r.truncated(depth), CacheOutcome::Hit)),
            Ok(Some(r)) => {
                let from = r.depth();
                (r, CacheOutcome::Extended { from })
            }
            Ok(None) => (OrbitRecord::new(f, seed.clone())?, CacheOutcome::Miss),
            Err(Error::CorruptCache(reason)) => {
                (OrbitRecord::new(f, seed.clone())?, CacheOutcome::Recomputed { reason })
            }
            Err(e) => return Err(e),
        };
        record.extend(f, depth)?;
        self.store(&record)?;
        Ok((record, outcome))
    }
}

/// Orbit to `depth`, through the cache when one is configured.
pub fn obtain_orbit(
    cache: Option<&OrbitCache>,
    f: &Morphism,
    seed: &ProjPoint,
    depth: usize,
) -> Result<(OrbitRecord, Option<CacheOutcome>)> {
    match cache {
        Some(c) => c.orbit(f, seed, depth).map(|(r, o)| (r, Some(o))),
        None => iterate(f, seed, depth).map(|r| (r, None)),
    }
}

fn encode(record: &OrbitRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "map {}", record.map_id());
    let _ = writeln!(s, "nvars {}", record.seed().coords().len());
    let _ = writeln!(s, "steps {}", record.steps().len());
    for step in record.steps() {
        let _ = write!(s, "{}", step.n);
        for c in step.point.coords() {
            let d = c.to_string();
            let _ = write!(s, " {}:{d}", d.len());
        }
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

fn decode(text: &str, f: &Morphism, seed: &ProjPoint) -> Result<OrbitRecord> {
    let bad = |m: String| Error::CorruptCache(m);
    let mut lines = text.lines();
    let mut field = |name: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| bad(format!("missing {name} line")))?;
        if name == "magic" {
            return Ok(line.to_string());
        }
        line.strip_prefix(name)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(format!("expected {name} line, found {line:?}")))
    };
    if field("magic")? != MAGIC {
        return Err(bad("unknown format or version".into()));
    }
    let map_id = field("map")?;
    if map_id != f.id() {
        return Err(bad("map id does not match".into()));
    }
    let nvars: usize = field("nvars")?.parse().map_err(|_| bad("bad nvars".into()))?;
    if nvars != f.nvars() {
        return Err(bad(format!("nvars {nvars} does not match the map")));
    }
    let count: usize = field("steps")?.parse().map_err(|_| bad("bad step count".into()))?;
    if count == 0 {
        return Err(bad("empty record".into()));
    }
    let mut points = Vec::with_capacity(count);
    for n in 0..count {
        let line = lines.next().ok_or_else(|| bad(format!("missing step {n}")))?;
        let mut tokens = line.split(' ');
        if tokens.next() != Some(n.to_string().as_str()) {
            return Err(bad(format!("step index mismatch at {n}")));
        }
        let coords = tokens.map(decode_int).collect::<Result<Vec<_>>>()?;
        if coords.len() != nvars {
            return Err(bad(format!("step {n} has {} coordinates", coords.len())));
        }
        let p = ProjPoint::from_ints(coords.clone()).map_err(|e| bad(format!("step {n}: {e}")))?;
        if p.coords() != coords.as_slice() {
            return Err(bad(format!("step {n} is not in canonical form")));
        }
        points.push(p);
    }
    if lines.next() != Some("end") || lines.next().is_some() {
        return Err(bad("missing end marker or trailing data".into()));
    }
    if points[0] != *seed {
        return Err(bad("seed does not match".into()));
    }
    for n in 0..VERIFY_STEPS.min(count - 1) {
        let next = f.evaluate(&points[n]).map_err(|e| bad(format!("step {n}: {e}")))?;
        if next != points[n + 1] {
            return Err(bad(format!("step {} does not match recomputation", n + 1)));
        }
    }
    OrbitRecord::from_points(map_id, points)
}

fn decode_int(token: &str) -> Result<BigInt> {
    let bad = || Error::CorruptCache(format!("bad coordinate token {token:?}"));
    let (len, digits) = token.split_once(':').ok_or_else(bad)?;
    let len: usize = len.parse().map_err(|_| bad())?;
    if digits.len() != len {
        return Err(bad());
    }
    digits.parse().map_err(|_| bad())
}
