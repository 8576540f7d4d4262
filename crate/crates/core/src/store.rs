//! JSON witness store: one human-readable document of named witness pairs
//! and sign-closure proofs, merged by name on save and re-verified on load.

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sign::SignClosureProof;
use crate::witness::WitnessPair;

pub const STORE_ENV: &str = "WORDLAB_WITNESS_STORE";
pub const DEFAULT_STORE_FILE: &str = "witnesses.json";
const FORMAT_VERSION: u32 = 1;
const LOCK_TIMEOUT: Duration = Duration::from_secs(10);

const SEED: &str = include_str!("../data/witnesses.json");

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StoreDocument {
    pub version: u32,
    #[serde(default)]
    pub witnesses: Vec<WitnessPair>,
    #[serde(default)]
    pub sign_proofs: Vec<SignClosureProof>,
}

impl StoreDocument {
    pub fn empty() -> Self {
        StoreDocument {
            version: FORMAT_VERSION,
            ..Default::default()
        }
    }

    /// Parses and re-verifies every entry exactly.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StoreDocument = serde_json::from_str(text)?;
        if doc.version != FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported store version {}",
                doc.version
            )));
        }
        doc.verify()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn verify(&self) -> Result<()> {
        let mut names = std::collections::BTreeSet::new();
        for w in &self.witnesses {
            if !names.insert(w.name.as_str()) {
                return Err(Error::InvalidWitness {
                    name: w.name.clone(),
                    reason: "duplicate name".into(),
                });
            }
            w.verify()?;
        }
        self.sign_proofs
            .iter()
            .try_for_each(SignClosureProof::verify)
    }

    pub fn get(&self, name: &str) -> Option<&WitnessPair> {
        self.witnesses.iter().find(|w| w.name == name)
    }

    /// Verifies `w` and inserts it, replacing any entry with the same name.
    /// Entries stay sorted by name so saves are stable.
    pub fn upsert(&mut self, w: WitnessPair) -> Result<()> {
        w.verify()?;
        match self.witnesses.binary_search_by(|x| x.name.cmp(&w.name)) {
            Ok(i) => self.witnesses[i] = w,
            Err(i) => self.witnesses.insert(i, w),
        }
        Ok(())
    }

    /// Replaces a proof with the same base word and witness name, else appends.
    pub fn upsert_proof(&mut self, proof: SignClosureProof) -> Result<()> {
        proof.verify()?;
        let key = |p: &SignClosureProof| (p.base.to_string(), p.witness.name.clone());
        match self.sign_proofs.iter().position(|p| key(p) == key(&proof)) {
            Some(i) => self.sign_proofs[i] = proof,
            None => self.sign_proofs.push(proof),
        }
        Ok(())
    }

    /// Entries of `other` win on name collisions.
    pub fn merge(&mut self, other: StoreDocument) -> Result<()> {
        for w in other.witnesses {
            self.upsert(w)?;
        }
        for p in other.sign_proofs {
            self.upsert_proof(p)?;
        }
        Ok(())
    }
}

/// The store shipped with the library.
pub fn seed() -> StoreDocument {
    StoreDocument::from_json(SEED).expect("embedded witness store verifies")
}

/// `$WORDLAB_WITNESS_STORE`, falling back to `witnesses.json`.
pub fn default_path() -> PathBuf {
    std::env::var_os(STORE_ENV).map_or_else(|| PathBuf::from(DEFAULT_STORE_FILE), PathBuf::from)
}

/// A missing file reads as an empty store.
pub fn load(path: &Path) -> Result<StoreDocument> {
    match fs::read_to_string(path) {
        Ok(text) => StoreDocument::from_json(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(StoreDocument::empty()),
        Err(e) => Err(e.into()),
    }
}

/// Merges `doc` into the file at `path` under an exclusive lock file, so
/// concurrent writers serialize and neither loses entries.
pub fn save_merged(path: &Path, doc: &StoreDocument) -> Result<StoreDocument> {
    let _lock = LockFile::acquire(path)?;
    let mut current = load(path)?;
    current.merge(doc.clone())?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, current.to_json()?)?;
    fs::rename(&tmp, path)?;
    Ok(current)
}

struct LockFile(PathBuf);

impl LockFile {
    fn acquire(path: &Path) -> Result<LockFile> {
        let lock = path.with_extension("json.lock");
        let start = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&lock) {
                Ok(_) => return Ok(LockFile(lock)),
                Err(e)
                    if e.kind() == std::io::ErrorKind::AlreadyExists
                        && start.elapsed() < LOCK_TIMEOUT =>
                {
                    thread::sleep(Duration::from_millis(20));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
}

impl Drop for LockFile {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;
    use crate::sign::{catalog, prove_family};
    use crate::witness::published;

    #[test]
    fn seed_store_verifies() {
        let doc = seed();
        assert!(doc.get("A1B1").is_some());
        assert!(doc.get("A2B2").is_some());
        assert_eq!(doc.sign_proofs.len(), 4);
    }

    #[test]
    fn round_trip_is_stable() {
        let mut doc = StoreDocument::empty();
        doc.upsert(published::pair_2()).unwrap();
        doc.upsert(published::pair_1()).unwrap();
        doc.upsert_proof(prove_family(&catalog()[0], &published::pair_1()).unwrap())
            .unwrap();
        let text = doc.to_json().unwrap();
        let back = StoreDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json().unwrap(), text);
        assert_eq!(back.witnesses[0].name, "A1B1");
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let mut doc = StoreDocument::empty();
        doc.upsert(published::pair_1()).unwrap();
        let text = doc.to_json().unwrap().replace("\"-3164\"", "\"-3165\"");
        assert!(matches!(
            StoreDocument::from_json(&text),
            Err(Error::InvalidWitness { .. })
        ));
        let mut bad = published::pair_1();
        bad.trace = int(-1);
        assert!(doc.upsert(bad).is_err());
    }

    #[test]
    fn concurrent_saves_merge() {
        let dir = std::env::temp_dir().join(format!("wordlab-store-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.json");
        let _ = fs::remove_file(&path);
        let pairs = [
            published::pair_1(),
            published::pair_2(),
            published::pair_1().interchanged(),
        ];
        thread::scope(|s| {
            for p in &pairs {
                let path = &path;
                s.spawn(move || {
                    let mut doc = StoreDocument::empty();
                    doc.upsert(p.clone()).unwrap();
                    save_merged(path, &doc).unwrap();
                });
            }
        });
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.witnesses.len(), 3);
        fs::remove_dir_all(&dir).unwrap();
    }
}
