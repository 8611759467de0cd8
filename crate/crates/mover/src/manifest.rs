//! Dataset manifests: the index of every video in a corpus.
//!
//! On disk a manifest is JSON Lines: a `{"schema_version": 1}` header line
//! followed by one `VideoEntry` object per line.

use crate::error::{MoverError, Result};
use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Fake,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VideoEntry {
    pub video_id: String,
    pub path: PathBuf,
    pub label: Label,
    pub manipulation: Option<String>,
    pub split: Split,
    pub frame_indices: Option<Vec<usize>>,
}

impl VideoEntry {
    fn validate(&self) -> Result<()> {
        match self.label {
            Label::Fake => {
                if self.manipulation.as_deref().map_or(true, str::is_empty) {
                    return Err(MoverError::Schema {
                        path: self.path.clone(),
                        reason: format!("fake entry {} lacks a manipulation tag", self.video_id),
                    });
                }
            }
            Label::Real => {
                if self.manipulation.is_some() {
                    return Err(MoverError::Schema {
                        path: self.path.clone(),
                        reason: format!("real entry {} carries a manipulation tag", self.video_id),
                    });
                }
            }
        }
        if let Some(fi) = &self.frame_indices {
            if !fi.windows(2).all(|w| w[0] < w[1]) {
                return Err(MoverError::Schema {
                    path: self.path.clone(),
                    reason: format!("frame_indices of {} not strictly increasing", self.video_id),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub entries: Vec<VideoEntry>,
}

impl DatasetManifest {
    /// Builds a manifest, enforcing every invariant. `check_paths` controls
    /// whether referenced media must exist (on by default for validation at
    /// build time; parsing an archived manifest may skip it).
    pub fn new(entries: Vec<VideoEntry>, check_paths: bool) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            e.validate()?;
            if !seen.insert(e.video_id.clone()) {
                return Err(MoverError::Schema {
                    path: e.path.clone(),
                    reason: format!("duplicate video_id {}", e.video_id),
                });
            }
            if check_paths && !e.path.exists() {
                return Err(MoverError::Schema {
                    path: e.path.clone(),
                    reason: "referenced media path does not exist".into(),
                });
            }
        }
        Ok(DatasetManifest {
            schema_version: SCHEMA_VERSION,
            entries,
        })
    }

    pub fn manipulations(&self) -> BTreeSet<String> {
        self.entries
            .iter()
            .filter_map(|e| e.manipulation.clone())
            .collect()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &VideoEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    /// Entries of one split restricted by label.
    pub fn split_label(&self, split: Split, label: Label) -> Vec<&VideoEntry> {
        self.entries
            .iter()
            .filter(|e| e.split == split && e.label == label)
            .collect()
    }

    /// Manifest narrowed to entries accepted by `keep`. Useful for
    /// cross-manipulation protocols.
    pub fn filtered(&self, keep: impl Fn(&VideoEntry) -> bool) -> DatasetManifest {
        DatasetManifest {
            schema_version: self.schema_version,
            entries: self.entries.iter().filter(|e| keep(e)).cloned().collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| MoverError::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(w, "{{\"schema_version\": {}}}", self.schema_version)
            .map_err(|e| MoverError::io(path, e))?;
        for e in &self.entries {
            let line = serde_json::to_string(e).map_err(|e| MoverError::Schema {
                path: path.to_path_buf(),
                reason: e.to_string(),
            })?;
            writeln!(w, "{line}").map_err(|e| MoverError::io(path, e))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| MoverError::io(path, e))?;
        let reader = std::io::BufReader::new(file);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| MoverError::schema(path, "empty manifest file"))?
            .map_err(|e| MoverError::io(path, e))?;
        let header_val: serde_json::Value = serde_json::from_str(&header)
            .map_err(|e| MoverError::schema(path, format!("bad header: {e}")))?;
        let version = header_val
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| MoverError::schema(path, "missing schema_version header"))?;
        if version != SCHEMA_VERSION as u64 {
            return Err(MoverError::schema(
                path,
                format!("unsupported schema_version {version}"),
            ));
        }
        let mut entries = Vec::new();
        for line in lines {
            let line = line.map_err(|e| MoverError::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: VideoEntry = serde_json::from_str(&line)
                .map_err(|e| MoverError::schema(path, format!("bad entry: {e}")))?;
            entries.push(entry);
        }
        // Archived manifests may reference media that moved; path existence
        // is re-checked by consumers that actually read frames.
        DatasetManifest::new(entries, false)
    }
}
