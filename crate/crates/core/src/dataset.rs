//! Versioned on-disk dataset: a JSON Lines record file plus a manifest with
//! counts and a content checksum. One directory per dataset, finalized
//! atomically.
//!
//! Floats are serialized with shortest round-trip decimal formatting, so
//! identical generation parameters produce byte-identical files and
//! checksums across runs and platforms.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const RECORDS_FILE: &str = "records.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Dataset-level metadata written next to the record file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DatasetManifest {
    pub format_version: u32,
    /// Snapshot of the effective scenario configuration (TOML text).
    pub config: String,
    pub master_seed: u64,
    pub episode_count: u64,
    pub record_count: u64,
    /// SHA-256 of the record file bytes, lowercase hex.
    pub records_sha256: String,
}

/// One observation/action-chunk pair in flat wire form. All reals are f64;
/// `pose` is 3 position components followed by 3 axis-angle components, and
/// each action row is `[dx, dy, dz, wx, wy, wz, gripper]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SerializedRecord {
    pub episode: u64,
    pub step: u32,
    pub pose: [f64; 6],
    pub gripper: u8,
    pub actions: Vec<[f64; 7]>,
    pub reward: Option<f64>,
    pub image: Option<String>,
}

/// Streaming writer enforcing (episode, step) order, hashing record bytes as
/// they are written, and finalizing atomically via a temp-file rename. An
/// unfinalized writer removes its partial file on drop.
pub struct DatasetWriter {
    dir: PathBuf,
    tmp_path: PathBuf,
    file: Option<BufWriter<File>>,
    hasher: Sha256,
    record_count: u64,
    episode_count: u64,
    last: Option<(u64, u32)>,
    finalized: bool,
}

impl DatasetWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let tmp_path = dir.join(format!("{RECORDS_FILE}.tmp"));
        let file = BufWriter::new(File::create(&tmp_path)?);
        Ok(Self {
            dir: dir.to_path_buf(),
            tmp_path,
            file: Some(file),
            hasher: Sha256::new(),
            record_count: 0,
            episode_count: 0,
            last: None,
            finalized: false,
        })
    }

    pub fn write(&mut self, record: &SerializedRecord) -> Result<()> {
        let key = (record.episode, record.step);
        if let Some(last) = self.last {
            if key <= last {
                return Err(Error::RecordOrder {
                    episode: record.episode,
                    step: record.step,
                    last_episode: last.0,
                    last_step: last.1,
                });
            }
            if record.episode != last.0 {
                self.episode_count += 1;
            }
        } else {
            self.episode_count = 1;
        }
        self.last = Some(key);

        let mut line = serde_json::to_vec(record).map_err(|e| Error::MalformedRecord {
            line: self.record_count as usize + 1,
            message: e.to_string(),
        })?;
        line.push(b'\n');
        self.hasher.update(&line);
        self.file
            .as_mut()
            .expect("writer not finalized")
            .write_all(&line)?;
        self.record_count += 1;
        Ok(())
    }

    /// Flushes, renames the record file into place, and writes the manifest.
    /// Partial files are removed if any step fails.
    pub fn finalize(mut self, config: &str, master_seed: u64) -> Result<DatasetManifest> {
        let mut writer = self.file.take().expect("writer not finalized");
        writer.flush()?;
        let file = writer.into_inner().map_err(|e| e.into_error())?;
        file.sync_all()?;
        drop(file);

        fs::rename(&self.tmp_path, self.dir.join(RECORDS_FILE))?;

        let manifest = DatasetManifest {
            format_version: FORMAT_VERSION,
            config: config.to_owned(),
            master_seed,
            episode_count: self.episode_count,
            record_count: self.record_count,
            records_sha256: hex(&self.hasher.clone().finalize()),
        };
        let manifest_tmp = self.dir.join(format!("{MANIFEST_FILE}.tmp"));
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::MalformedManifest(e.to_string()))?;
        text.push('\n');
        fs::write(&manifest_tmp, text)?;
        fs::rename(&manifest_tmp, self.dir.join(MANIFEST_FILE))?;
        self.finalized = true;
        Ok(manifest)
    }
}

impl Drop for DatasetWriter {
    fn drop(&mut self) {
        if !self.finalized {
            let _ = fs::remove_file(&self.tmp_path);
        }
    }
}

/// Reads and fully validates a dataset directory: manifest shape, format
/// version, per-line record schema and order, content checksum, and the
/// record/episode counts.
pub fn read_dataset(dir: &Path) -> Result<(DatasetManifest, Vec<SerializedRecord>)> {
    let manifest_text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let manifest: DatasetManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| Error::MalformedManifest(e.to_string()))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: manifest.format_version,
            expected: FORMAT_VERSION,
        });
    }

    let bytes = fs::read(dir.join(RECORDS_FILE))?;
    let mut records = Vec::new();
    let mut last: Option<(u64, u32)> = None;
    let mut episode_count: u64 = 0;
    for (i, line) in bytes.split(|b| *b == b'\n').enumerate() {
        if line.is_empty() {
            continue;
        }
        let record: SerializedRecord =
            serde_json::from_slice(line).map_err(|e| Error::MalformedRecord {
                line: i + 1,
                message: e.to_string(),
            })?;
        let key = (record.episode, record.step);
        match last {
            Some(prev) if key <= prev => {
                return Err(Error::RecordOrder {
                    episode: record.episode,
                    step: record.step,
                    last_episode: prev.0,
                    last_step: prev.1,
                });
            }
            Some(prev) if record.episode != prev.0 => episode_count += 1,
            None => episode_count = 1,
            _ => {}
        }
        last = Some(key);
        records.push(record);
    }

    let computed = hex(&Sha256::digest(&bytes));
    if computed != manifest.records_sha256 {
        return Err(Error::ChecksumMismatch {
            expected: manifest.records_sha256,
            computed,
        });
    }
    if records.len() as u64 != manifest.record_count {
        return Err(Error::RecordCountMismatch {
            expected: manifest.record_count,
            found: records.len() as u64,
        });
    }
    if episode_count != manifest.episode_count {
        return Err(Error::EpisodeCountMismatch {
            expected: manifest.episode_count,
            found: episode_count,
        });
    }
    Ok((manifest, records))
}

fn hex(digest: &[u8]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
