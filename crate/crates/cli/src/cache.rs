//! On-disk cache of level quotients.
//!
//! One file per `(definition hash, level)`, named `<hash>-<level>.bsgs`:
//!
//! ```text
//! arbor-quotient-cache 1
//! hash <definition hash>
//! level <n>
//! <BSGS text>
//! ```
//!
//! Entries are written to a temporary file and renamed into place. An entry
//! whose header or body does not parse, or whose header names another
//! definition or level, is reported on stderr and recomputed.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use arbor::filtration::QuotientStore;
use arbor::PermGroup;

pub const CACHE_MAGIC: &str = "arbor-quotient-cache";
pub const CACHE_VERSION: u32 = 1;

pub struct DiskCache {
    dir: PathBuf,
    writes: Mutex<()>,
    hits: AtomicUsize,
    misses: AtomicUsize,
    stores: AtomicUsize,
}

impl DiskCache {
    pub fn new(dir: &Path) -> std::io::Result<DiskCache> {
        std::fs::create_dir_all(dir)?;
        Ok(DiskCache {
            dir: dir.to_path_buf(),
            writes: Mutex::new(()),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            stores: AtomicUsize::new(0),
        })
    }

    pub fn entry_path(&self, key: &str, level: usize) -> PathBuf {
        self.dir.join(format!("{key}-{level}.bsgs"))
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn stores(&self) -> usize {
        self.stores.load(Ordering::Relaxed)
    }

    fn read(&self, key: &str, level: usize) -> Result<Option<PermGroup>, String> {
        let path = self.entry_path(key, level);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.to_string()),
        };
        let mut parts = text.splitn(4, '\n');
        let expected = [
            format!("{CACHE_MAGIC} {CACHE_VERSION}"),
            format!("hash {key}"),
            format!("level {level}"),
        ];
        for want in &expected {
            if parts.next() != Some(want.as_str()) {
                return Err(format!("header line `{want}` missing"));
            }
        }
        let body = parts.next().ok_or("empty body")?;
        PermGroup::from_bsgs_text(body).map(Some).map_err(|e| e.to_string())
    }
}

pub fn entry_text(key: &str, level: usize, group: &PermGroup) -> String {
    format!(
        "{CACHE_MAGIC} {CACHE_VERSION}\nhash {key}\nlevel {level}\n{}",
        group.to_bsgs_text()
    )
}

impl QuotientStore for DiskCache {
    fn load(&self, key: &str, level: usize) -> Option<PermGroup> {
        match self.read(key, level) {
            Ok(Some(g)) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(g)
            }
            Ok(None) => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
            Err(e) => {
                eprintln!(
                    "warning: ignoring corrupt cache entry {}: {e}",
                    self.entry_path(key, level).display()
                );
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    fn store(&self, key: &str, level: usize, group: &PermGroup) {
        let _guard = self.writes.lock().expect("cache lock");
        let write = || -> std::io::Result<()> {
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
            tmp.write_all(entry_text(key, level, group).as_bytes())?;
            tmp.persist(self.entry_path(key, level)).map_err(|e| e.error)?;
            Ok(())
        };
        match write() {
            Ok(()) => {
                self.stores.fetch_add(1, Ordering::Relaxed);
            }
            Err(e) => eprintln!("warning: cannot write cache entry: {e}"),
        }
    }
}
