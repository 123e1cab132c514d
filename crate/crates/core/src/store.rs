//! Embedded file-backed store. One writer at a time; readers take
//! immutable snapshots that stay valid while later writes commit.
//!
//! On disk a store directory holds a `MANIFEST` naming one JSON file per
//! section, plus `blobs/<sha256>` for document payloads. A commit writes
//! new section files first and then swaps the manifest by rename, so a
//! crash leaves either the old or the new state.

use std::collections::VecDeque;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archive::{Catalog, SearchIndex};
use crate::citegraph::{ReferenceDb, ReferenceSearchIndex, ResolverIndex};
use crate::editorial::{content_hash, Editorial};

const MANIFEST: &str = "MANIFEST";
const FORMAT: u32 = 1;
/// How many past snapshots stay addressable by id.
const HISTORY: usize = 32;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt store: {0}")]
    Corrupt(String),
}

/// A consistent read view. Indexes are built on first use.
pub struct Snapshot {
    pub id: u64,
    pub catalog: Arc<Catalog>,
    pub references: Arc<ReferenceDb>,
    pub editorial: Arc<Editorial>,
    search: OnceLock<SearchIndex>,
    resolver: OnceLock<ResolverIndex>,
    reference_search: OnceLock<ReferenceSearchIndex>,
}

impl Snapshot {
    fn new(id: u64, catalog: Arc<Catalog>, references: Arc<ReferenceDb>, editorial: Arc<Editorial>) -> Self {
        Self {
            id,
            catalog,
            references,
            editorial,
            search: OnceLock::new(),
            resolver: OnceLock::new(),
            reference_search: OnceLock::new(),
        }
    }

    pub fn search_index(&self) -> &SearchIndex {
        self.search.get_or_init(|| SearchIndex::build(&self.catalog))
    }

    pub fn resolver_index(&self) -> &ResolverIndex {
        self.resolver.get_or_init(|| ResolverIndex::build(&self.catalog))
    }

    pub fn reference_search_index(&self) -> &ReferenceSearchIndex {
        self.reference_search
            .get_or_init(|| ReferenceSearchIndex::build(&self.references))
    }
}

/// Mutable access inside a write. Sections are copied on first touch.
pub struct Transaction {
    base: Arc<Snapshot>,
    catalog: Arc<Catalog>,
    references: Arc<ReferenceDb>,
    editorial: Arc<Editorial>,
    dirty: [bool; 3],
}

impl Transaction {
    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn references(&self) -> &ReferenceDb {
        &self.references
    }

    pub fn editorial(&self) -> &Editorial {
        &self.editorial
    }

    pub fn catalog_mut(&mut self) -> &mut Catalog {
        self.dirty[0] = true;
        Arc::make_mut(&mut self.catalog)
    }

    pub fn references_mut(&mut self) -> &mut ReferenceDb {
        self.dirty[1] = true;
        Arc::make_mut(&mut self.references)
    }

    pub fn editorial_mut(&mut self) -> &mut Editorial {
        self.dirty[2] = true;
        Arc::make_mut(&mut self.editorial)
    }

    /// Catalog and reference database together, e.g. for ingestion.
    pub fn archive_mut(&mut self) -> (&mut Catalog, &mut ReferenceDb) {
        self.dirty[0] = true;
        self.dirty[1] = true;
        (Arc::make_mut(&mut self.catalog), Arc::make_mut(&mut self.references))
    }

    /// The catalog for reading next to a mutable reference database.
    pub fn references_with_catalog(&mut self) -> (&Catalog, &mut ReferenceDb) {
        self.dirty[1] = true;
        (&self.catalog, Arc::make_mut(&mut self.references))
    }

    /// The catalog for reading next to a mutable editorial office.
    pub fn editorial_with_catalog(&mut self) -> (&Catalog, &mut Editorial) {
        self.dirty[2] = true;
        (&self.catalog, Arc::make_mut(&mut self.editorial))
    }

    /// A resolver index over the transaction's catalog, shared with the
    /// base snapshot while the catalog is untouched.
    pub fn resolver_index(&self) -> std::borrow::Cow<'_, ResolverIndex> {
        if Arc::ptr_eq(&self.catalog, &self.base.catalog) {
            std::borrow::Cow::Borrowed(self.base.resolver_index())
        } else {
            std::borrow::Cow::Owned(ResolverIndex::build(&self.catalog))
        }
    }

    /// All three sections at once, for operations that span them.
    pub fn parts_mut(&mut self) -> (&mut Catalog, &mut ReferenceDb, &mut Editorial) {
        self.dirty = [true; 3];
        (
            Arc::make_mut(&mut self.catalog),
            Arc::make_mut(&mut self.references),
            Arc::make_mut(&mut self.editorial),
        )
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: u32,
    snapshot_id: u64,
    catalog: String,
    references: String,
    editorial: String,
}

pub struct Store {
    dir: Option<PathBuf>,
    current: RwLock<Arc<Snapshot>>,
    history: Mutex<VecDeque<Arc<Snapshot>>>,
    writer: Mutex<Option<Manifest>>,
}

fn section_name(kind: &str, id: u64) -> String {
    format!("{kind}-{id:08}.json")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_section<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<T, StoreError> {
    let bytes = fs::read(dir.join(name)).map_err(|e| StoreError::Corrupt(format!("{name}: {e}")))?;
    serde_json::from_slice(&bytes).map_err(|e| StoreError::Corrupt(format!("{name}: {e}")))
}

impl Store {
    /// A store that lives only in memory.
    pub fn in_memory() -> Self {
        Self::from_parts(None, 0, Catalog::new(), ReferenceDb::new(), Editorial::new(), None)
    }

    /// Wraps existing state, e.g. a fixture, in an in-memory store.
    pub fn from_state(catalog: Catalog, references: ReferenceDb, editorial: Editorial) -> Self {
        Self::from_parts(None, 0, catalog, references, editorial, None)
    }

    fn from_parts(
        dir: Option<PathBuf>,
        id: u64,
        mut catalog: Catalog,
        mut references: ReferenceDb,
        editorial: Editorial,
        manifest: Option<Manifest>,
    ) -> Self {
        catalog.reindex();
        references.reindex();
        let snap = Arc::new(Snapshot::new(id, Arc::new(catalog), Arc::new(references), Arc::new(editorial)));
        Self {
            dir,
            current: RwLock::new(snap.clone()),
            history: Mutex::new(VecDeque::from([snap])),
            writer: Mutex::new(manifest),
        }
    }

    /// Opens the store in `dir`, creating an empty one if absent.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(dir.join("blobs"))?;
        let manifest_path = dir.join(MANIFEST);
        if !manifest_path.exists() {
            let store = Self::from_parts(Some(dir), 0, Catalog::new(), ReferenceDb::new(), Editorial::new(), None);
            store.write(|tx| {
                tx.parts_mut();
                Ok::<_, StoreError>(())
            })?;
            return Ok(store);
        }
        let manifest: Manifest = serde_json::from_slice(&fs::read(&manifest_path)?)
            .map_err(|e| StoreError::Corrupt(format!("{MANIFEST}: {e}")))?;
        if manifest.format != FORMAT {
            return Err(StoreError::Corrupt(format!("unsupported format {}", manifest.format)));
        }
        let catalog: Catalog = read_section(&dir, &manifest.catalog)?;
        let references: ReferenceDb = read_section(&dir, &manifest.references)?;
        let mut editorial: Editorial = read_section(&dir, &manifest.editorial)?;
        for hash in editorial.referenced_hashes().into_iter().cloned().collect::<Vec<_>>() {
            let bytes = fs::read(dir.join("blobs").join(&hash))
                .map_err(|e| StoreError::Corrupt(format!("blob {hash}: {e}")))?;
            if content_hash(&bytes) != hash {
                return Err(StoreError::Corrupt(format!("blob {hash} does not match its hash")));
            }
            editorial.insert_blob(bytes);
        }
        Ok(Self::from_parts(Some(dir), manifest.snapshot_id, catalog, references, editorial, Some(manifest)))
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// The latest committed snapshot.
    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock").clone()
    }

    /// A recent snapshot by id, if it is still retained.
    pub fn snapshot_at(&self, id: u64) -> Option<Arc<Snapshot>> {
        self.history
            .lock()
            .expect("history lock")
            .iter()
            .find(|s| s.id == id)
            .cloned()
    }

    /// Sets the moving wall used for journals without their own policy.
    /// Runtime configuration, not persisted.
    pub fn set_default_moving_wall(&self, years: u32) {
        let _w = self.writer.lock().expect("writer lock");
        let mut cur = self.current.write().expect("snapshot lock");
        let mut catalog = (*cur.catalog).clone();
        catalog.set_default_moving_wall(years);
        *cur = Arc::new(Snapshot::new(cur.id, Arc::new(catalog), cur.references.clone(), cur.editorial.clone()));
    }

    /// Runs `f` as the only writer. On `Ok` the changes are persisted and
    /// published as a new snapshot; on `Err` they are discarded.
    pub fn write<T, E>(&self, f: impl FnOnce(&mut Transaction) -> Result<T, E>) -> Result<T, E>
    where
        E: From<StoreError>,
    {
        let mut guard = self.writer.lock().expect("writer lock");
        let base = self.snapshot();
        let mut tx = Transaction {
            base: base.clone(),
            catalog: base.catalog.clone(),
            references: base.references.clone(),
            editorial: base.editorial.clone(),
            dirty: [false; 3],
        };
        let out = f(&mut tx)?;
        if tx.dirty == [false; 3] {
            return Ok(out);
        }
        let id = base.id + 1;
        if let Some(dir) = &self.dir {
            self.persist(dir, &mut guard, &tx, id)?;
        }
        let snap = Arc::new(Snapshot::new(id, tx.catalog, tx.references, tx.editorial));
        *self.current.write().expect("snapshot lock") = snap.clone();
        let mut history = self.history.lock().expect("history lock");
        history.push_back(snap);
        while history.len() > HISTORY {
            history.pop_front();
        }
        Ok(out)
    }

    fn persist(&self, dir: &Path, manifest: &mut MutexGuard<'_, Option<Manifest>>, tx: &Transaction, id: u64) -> Result<(), StoreError> {
        let old = manifest.take();
        let pick = |dirty: bool, kind: &str, prev: Option<&String>| match (dirty, prev) {
            (false, Some(p)) => (p.clone(), false),
            _ => (section_name(kind, id), true),
        };
        let (catalog, wc) = pick(tx.dirty[0], "catalog", old.as_ref().map(|m| &m.catalog));
        let (references, wr) = pick(tx.dirty[1], "references", old.as_ref().map(|m| &m.references));
        let (editorial, we) = pick(tx.dirty[2], "editorial", old.as_ref().map(|m| &m.editorial));
        let json = |v: serde_json::Result<Vec<u8>>| v.map_err(|e| StoreError::Corrupt(e.to_string()));
        let result = (|| {
            if wc {
                write_atomic(&dir.join(&catalog), &json(serde_json::to_vec(&*tx.catalog))?)?;
            }
            if wr {
                write_atomic(&dir.join(&references), &json(serde_json::to_vec(&*tx.references))?)?;
            }
            if we {
                write_atomic(&dir.join(&editorial), &json(serde_json::to_vec(&*tx.editorial))?)?;
                for hash in tx.editorial.blob_hashes() {
                    let path = dir.join("blobs").join(hash);
                    if !path.exists() {
                        let bytes = tx.editorial.blob(hash).expect("listed");
                        write_atomic(&path, &bytes)?;
                    }
                }
            }
            let next = Manifest {
                format: FORMAT,
                snapshot_id: id,
                catalog,
                references,
                editorial,
            };
            write_atomic(&dir.join(MANIFEST), &json(serde_json::to_vec_pretty(&next))?)?;
            Ok(next)
        })();
        match result {
            Ok(next) => {
                if let Some(old) = &old {
                    for (a, b) in [
                        (&old.catalog, &next.catalog),
                        (&old.references, &next.references),
                        (&old.editorial, &next.editorial),
                    ] {
                        if a != b {
                            let _ = fs::remove_file(dir.join(a));
                        }
                    }
                }
                **manifest = Some(next);
                Ok(())
            }
            Err(e) => {
                **manifest = old;
                Err(e)
            }
        }
    }
}

impl Default for Store {
    fn default() -> Self {
        Self::in_memory()
    }
}
