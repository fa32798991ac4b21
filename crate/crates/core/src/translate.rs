//! Sentence-level translation behind a provider contract.
//!
//! The translation model itself lives out of process. A provider turns a
//! batch of [`TranslationUnit`]s into [`TranslationResult`]s matched by id;
//! [`translate_batch`] adds id checking, de-duplication, bounded concurrency
//! and a content-addressed cache in front of it.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, RwLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationUnit {
    pub id: String,
    pub source_text: String,
    pub source_lang: String,
    pub target_lang: String,
}

impl TranslationUnit {
    pub fn new(
        id: impl Into<String>,
        source_text: impl Into<String>,
        source_lang: impl Into<String>,
        target_lang: impl Into<String>,
    ) -> Self {
        TranslationUnit {
            id: id.into(),
            source_text: source_text.into(),
            source_lang: source_lang.into(),
            target_lang: target_lang.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationResult {
    pub id: String,
    pub target_text: String,
}

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("translation provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("provider returned no result for unit {0}")]
    MissingResult(String),
    #[error("duplicate unit id {0} in batch")]
    DuplicateId(String),
    #[error("no translation on file for source text {0:?}")]
    UnresolvedSource(String),
    #[error("invalid provider file at line {line}: {message}")]
    InvalidProviderFile { line: usize, message: String },
    #[error("invalid provider spec {0:?} (expected identity, file:<path> or http:<url>)")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl TranslateError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, TranslateError::ProviderUnavailable(_))
    }
}

pub trait TranslationProvider: Send + Sync {
    /// Stable identity used to namespace cached translations.
    fn id(&self) -> String;

    fn translate(
        &self,
        units: &[TranslationUnit],
    ) -> Result<Vec<TranslationResult>, TranslateError>;
}

/// Returns every source text unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityProvider;

pub fn identity_provider() -> IdentityProvider {
    IdentityProvider
}

impl TranslationProvider for IdentityProvider {
    fn id(&self) -> String {
        "identity".to_string()
    }

    fn translate(
        &self,
        units: &[TranslationUnit],
    ) -> Result<Vec<TranslationResult>, TranslateError> {
        Ok(units
            .iter()
            .map(|u| TranslationResult {
                id: u.id.clone(),
                target_text: u.source_text.clone(),
            })
            .collect())
    }
}

/// One line of a prepared translation file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreparedPair {
    pub src: String,
    pub tgt: String,
    pub src_lang: String,
    pub tgt_lang: String,
}

/// Looks translations up in a JSONL file of prepared pairs by exact source
/// text and language pair.
#[derive(Debug, Clone)]
pub struct FileProvider {
    content_hash: String,
    table: HashMap<(String, String, String), String>,
}

pub fn file_provider(path: impl AsRef<Path>) -> Result<FileProvider, TranslateError> {
    FileProvider::load(path)
}

impl FileProvider {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TranslateError> {
        let path = path.as_ref();
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, TranslateError> {
        let mut table = HashMap::new();
        let mut hasher = Sha256::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let pair: PreparedPair =
                serde_json::from_str(&line).map_err(|e| TranslateError::InvalidProviderFile {
                    line: n + 1,
                    message: e.to_string(),
                })?;
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
            table.insert((pair.src, pair.src_lang, pair.tgt_lang), pair.tgt);
        }
        Ok(FileProvider {
            content_hash: hex::encode(hasher.finalize()),
            table,
        })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl TranslationProvider for FileProvider {
    fn id(&self) -> String {
        format!("file:{}", self.content_hash)
    }

    fn translate(
        &self,
        units: &[TranslationUnit],
    ) -> Result<Vec<TranslationResult>, TranslateError> {
        units
            .iter()
            .map(|u| {
                let key = (
                    u.source_text.clone(),
                    u.source_lang.clone(),
                    u.target_lang.clone(),
                );
                match self.table.get(&key) {
                    Some(tgt) => Ok(TranslationResult {
                        id: u.id.clone(),
                        target_text: tgt.clone(),
                    }),
                    None => Err(TranslateError::UnresolvedSource(u.source_text.clone())),
                }
            })
            .collect()
    }
}

#[derive(Debug, Serialize)]
struct WireUnit<'a> {
    id: &'a str,
    text: &'a str,
    src_lang: &'a str,
    tgt_lang: &'a str,
}

#[derive(Debug, Serialize)]
struct WireRequest<'a> {
    units: Vec<WireUnit<'a>>,
}

#[derive(Debug, Deserialize)]
struct WireResult {
    id: String,
    text: String,
}

#[derive(Debug, Deserialize)]
struct WireResponse {
    results: Vec<WireResult>,
}

/// Client for a translation service speaking
/// `POST <endpoint>/translate {"units":[{"id","text","src_lang","tgt_lang"}]}`
/// → `{"results":[{"id","text"}]}`.
pub struct HttpProvider {
    endpoint: String,
    auth: Option<String>,
    agent: ureq::Agent,
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub batch_size: usize,
}

pub fn http_provider(endpoint: impl Into<String>, auth: Option<String>) -> HttpProvider {
    HttpProvider::new(endpoint, auth)
}

impl HttpProvider {
    pub fn new(endpoint: impl Into<String>, auth: Option<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(300)))
            .build()
            .into();
        HttpProvider {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            auth,
            agent,
            max_attempts: 5,
            base_delay: Duration::from_millis(500),
            batch_size: 64,
        }
    }

    fn post(&self, units: &[TranslationUnit]) -> Result<Vec<TranslationResult>, String> {
        let request = WireRequest {
            units: units
                .iter()
                .map(|u| WireUnit {
                    id: &u.id,
                    text: &u.source_text,
                    src_lang: &u.source_lang,
                    tgt_lang: &u.target_lang,
                })
                .collect(),
        };
        let mut req = self.agent.post(format!("{}/translate", self.endpoint));
        if let Some(auth) = &self.auth {
            req = req.header("Authorization", auth.as_str());
        }
        let mut response = req.send_json(&request).map_err(|e| e.to_string())?;
        if response.status().as_u16() != 200 {
            return Err(format!("status {}", response.status()));
        }
        let body: WireResponse = response.body_mut().read_json().map_err(|e| e.to_string())?;
        Ok(body
            .results
            .into_iter()
            .map(|r| TranslationResult {
                id: r.id,
                target_text: r.text,
            })
            .collect())
    }
}

impl TranslationProvider for HttpProvider {
    fn id(&self) -> String {
        format!("http:{}", self.endpoint)
    }

    fn translate(
        &self,
        units: &[TranslationUnit],
    ) -> Result<Vec<TranslationResult>, TranslateError> {
        let mut out = Vec::with_capacity(units.len());
        for chunk in units.chunks(self.batch_size.max(1)) {
            let mut attempt = 0;
            loop {
                match self.post(chunk) {
                    Ok(results) => {
                        out.extend(results);
                        break;
                    }
                    Err(message) => {
                        attempt += 1;
                        if attempt >= self.max_attempts {
                            return Err(TranslateError::ProviderUnavailable(format!(
                                "{} after {attempt} attempts: {message}",
                                self.endpoint
                            )));
                        }
                        std::thread::sleep(self.base_delay * 2u32.pow(attempt - 1));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Provider selection as written on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProviderSpec {
    Identity,
    File(PathBuf),
    Http(String),
}

impl ProviderSpec {
    pub fn parse(spec: &str) -> Result<Self, TranslateError> {
        if spec == "identity" {
            Ok(ProviderSpec::Identity)
        } else if spec.starts_with("http://") || spec.starts_with("https://") {
            Ok(ProviderSpec::Http(spec.to_string()))
        } else if let Some(url) = spec.strip_prefix("http:") {
            Ok(ProviderSpec::Http(url.to_string()))
        } else if let Some(path) = spec.strip_prefix("file:") {
            Ok(ProviderSpec::File(PathBuf::from(path)))
        } else {
            Err(TranslateError::InvalidSpec(spec.to_string()))
        }
    }

    pub fn build(
        &self,
        auth: Option<String>,
    ) -> Result<Box<dyn TranslationProvider>, TranslateError> {
        Ok(match self {
            ProviderSpec::Identity => Box::new(IdentityProvider),
            ProviderSpec::File(path) => Box::new(FileProvider::load(path)?),
            ProviderSpec::Http(url) => Box::new(HttpProvider::new(url.clone(), auth)),
        })
    }
}

impl std::fmt::Display for ProviderSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProviderSpec::Identity => write!(f, "identity"),
            ProviderSpec::File(p) => write!(f, "file:{}", p.display()),
            ProviderSpec::Http(u) => write!(f, "http:{u}"),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheLine {
    key: String,
    src: String,
    tgt: String,
}

/// Translation cache keyed by a hash of provider id, language pair and
/// source text. With a backing file, new entries are appended as JSONL and
/// reloaded on open; a torn last line from an interrupted run is skipped.
#[derive(Debug, Default)]
pub struct TranslationCache {
    entries: RwLock<HashMap<String, String>>,
    file: Option<Mutex<BufWriter<File>>>,
}

impl TranslationCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub const FILE_NAME: &'static str = "translations.jsonl";

    /// Opens (or creates) `dir/translations.jsonl`.
    pub fn open(dir: impl AsRef<Path>) -> io::Result<Self> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let path = dir.join(Self::FILE_NAME);
        let mut entries = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                let line = line?;
                if let Ok(entry) = serde_json::from_str::<CacheLine>(&line) {
                    entries.insert(entry.key, entry.tgt);
                }
            }
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
        if !ends_with_newline(&path)? {
            file.write_all(b"\n")?;
        }
        Ok(TranslationCache {
            entries: RwLock::new(entries),
            file: Some(Mutex::new(BufWriter::new(file))),
        })
    }

    pub fn key(provider_id: &str, unit: &TranslationUnit) -> String {
        let mut h = Sha256::new();
        for part in [
            provider_id,
            &unit.source_lang,
            &unit.target_lang,
            &unit.source_text,
        ] {
            h.update(part.as_bytes());
            h.update([0x1f]);
        }
        hex::encode(h.finalize())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.entries.read().expect("cache lock").get(key).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert_all(&self, items: Vec<(String, String, String)>) -> io::Result<()> {
        if items.is_empty() {
            return Ok(());
        }
        if let Some(file) = &self.file {
            let mut w = file.lock().expect("cache file lock");
            for (key, src, tgt) in &items {
                let line = CacheLine {
                    key: key.clone(),
                    src: src.clone(),
                    tgt: tgt.clone(),
                };
                serde_json::to_writer(&mut *w, &line)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
        let mut entries = self.entries.write().expect("cache lock");
        for (key, _, tgt) in items {
            entries.insert(key, tgt);
        }
        Ok(())
    }
}

fn ends_with_newline(path: &Path) -> io::Result<bool> {
    use std::io::{Read, Seek, SeekFrom};
    let mut f = File::open(path)?;
    if f.metadata()?.len() == 0 {
        return Ok(true);
    }
    f.seek(SeekFrom::End(-1))?;
    let mut last = [0u8; 1];
    f.read_exact(&mut last)?;
    Ok(last[0] == b'\n')
}

#[derive(Debug, Clone, Copy)]
pub struct BatchOptions {
    /// Units per provider call.
    pub chunk_size: usize,
    /// Provider calls in flight at once.
    pub concurrency: usize,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            chunk_size: 256,
            concurrency: 1,
        }
    }
}

/// Translates a batch, answering from `cache` where possible.
///
/// Returns exactly one result per unit, in input order. Units that share
/// a source text and language pair are sent to the provider once. Empty
/// translations are returned but never cached.
pub fn translate_batch(
    units: &[TranslationUnit],
    provider: &dyn TranslationProvider,
    cache: Option<&TranslationCache>,
    options: BatchOptions,
) -> Result<Vec<TranslationResult>, TranslateError> {
    let mut seen = HashSet::with_capacity(units.len());
    for u in units {
        if !seen.insert(u.id.as_str()) {
            return Err(TranslateError::DuplicateId(u.id.clone()));
        }
    }

    let provider_id = provider.id();
    let keys: Vec<String> = units
        .iter()
        .map(|u| TranslationCache::key(&provider_id, u))
        .collect();
    let mut resolved: HashMap<&str, String> = HashMap::new();
    let mut pending: Vec<(&TranslationUnit, &str)> = Vec::new();
    let mut pending_keys: HashSet<&str> = HashSet::new();
    for (u, key) in units.iter().zip(&keys) {
        if resolved.contains_key(key.as_str()) || pending_keys.contains(key.as_str()) {
            continue;
        }
        match cache.and_then(|c| c.get(key)) {
            Some(tgt) => {
                resolved.insert(key, tgt);
            }
            None => {
                pending_keys.insert(key);
                pending.push((u, key));
            }
        }
    }

    let requests: Vec<&TranslationUnit> = pending.iter().map(|(u, _)| *u).collect();
    let fresh = call_provider(&requests, provider, options)?;
    let mut to_cache = Vec::new();
    for (u, key) in pending {
        let tgt = fresh
            .get(u.id.as_str())
            .cloned()
            .ok_or_else(|| TranslateError::MissingResult(u.id.clone()))?;
        if !tgt.trim().is_empty() {
            to_cache.push((key.to_string(), u.source_text.clone(), tgt.clone()));
        }
        resolved.insert(key, tgt);
    }
    if let Some(cache) = cache {
        cache.insert_all(to_cache)?;
    }

    Ok(units
        .iter()
        .zip(&keys)
        .map(|(u, key)| TranslationResult {
            id: u.id.clone(),
            target_text: resolved[key.as_str()].clone(),
        })
        .collect())
}

fn call_provider(
    pending: &[&TranslationUnit],
    provider: &dyn TranslationProvider,
    options: BatchOptions,
) -> Result<HashMap<String, String>, TranslateError> {
    if pending.is_empty() {
        return Ok(HashMap::new());
    }
    let chunks: Vec<Vec<TranslationUnit>> = pending
        .chunks(options.chunk_size.max(1))
        .map(|c| c.iter().map(|u| (*u).clone()).collect())
        .collect();
    let workers = options.concurrency.clamp(1, chunks.len());
    let next = AtomicUsize::new(0);
    type Slot = Mutex<Option<Result<Vec<TranslationResult>, TranslateError>>>;
    let outputs: Vec<Slot> = chunks.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= chunks.len() {
                    break;
                }
                let r = provider.translate(&chunks[k]);
                *outputs[k].lock().expect("output slot") = Some(r);
            });
        }
    });
    let mut merged = HashMap::with_capacity(pending.len());
    for slot in outputs {
        let results = slot
            .into_inner()
            .expect("output slot")
            .expect("chunk processed")?;
        for r in results {
            merged.insert(r.id, r.target_text);
        }
    }
    Ok(merged)
}
