//! `manifest.jsonl`: one JSON record per line.
//!
//! The first line is a `{"record": "dataset", ...}` header with the build
//! parameters; every following line is a `{"record": "entry", ...}` record,
//! one per source file, sorted by id. Paths of produced files are relative
//! to the manifest's directory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Layout;
use crate::error::{Error, Result};
use crate::raster::load_png;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub layout: Layout,
    /// Requested train fraction.
    pub split: f64,
    pub seed: u64,
    pub side: u32,
    pub quant_k: usize,
    pub hint_k: usize,
    pub radius: u32,
    pub blur_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub status: EntryStatus,
    /// Why the source was skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub source_path: String,
    pub lineart_path: Option<String>,
    pub hints_path: Option<String>,
    /// Line art with hints composed.
    pub input_path: Option<String>,
    pub target_path: Option<String>,
    /// Side-by-side input/target image (aligned layout only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_path: Option<String>,
    pub split: Option<Split>,
    pub seed: u64,
    pub attribution: String,
}

impl ManifestEntry {
    pub fn produced_paths(&self) -> impl Iterator<Item = (&'static str, &str)> {
        [
            ("lineart_path", &self.lineart_path),
            ("hints_path", &self.hints_path),
            ("input_path", &self.input_path),
            ("target_path", &self.target_path),
            ("pair_path", &self.pair_path),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record {
    Dataset(DatasetHeader),
    Entry(ManifestEntry),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub header: DatasetHeader,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn ok_entries(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.status == EntryStatus::Ok)
    }

    pub fn count(&self, split: Split) -> usize {
        self.ok_entries().filter(|e| e.split == Some(split)).count()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let line = |r: &Record| serde_json::to_string(r).expect("manifest records serialize");
        out.push_str(&line(&Record::Dataset(self.header.clone())));
        out.push('\n');
        for e in &self.entries {
            out.push_str(&line(&Record::Entry(e.clone())));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> std::result::Result<Self, String> {
        let mut header = None;
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            match serde_json::from_str::<Record>(line).map_err(|e| format!("line {}: {e}", n + 1))? {
                Record::Dataset(h) if header.is_none() => header = Some(h),
                Record::Dataset(_) => return Err(format!("line {}: second dataset header", n + 1)),
                Record::Entry(e) => entries.push(e),
            }
        }
        let header = header.ok_or("no dataset header record")?;
        Ok(Self { header, entries })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::Unwritable {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_jsonl(&text).map_err(|reason| Error::MalformedFile {
            what: "manifest",
            path: path.to_path_buf(),
            reason,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DuplicateId,
    MissingFile,
    MissingPath,
    SplitFraction,
    Dimensions,
    UnreadableImage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub detail: String,
}

/// Check a manifest on disk; an empty list means it is valid.
pub fn validate_manifest(manifest_path: impl AsRef<Path>) -> Result<Vec<Violation>> {
    let manifest_path = manifest_path.as_ref();
    let manifest = DatasetManifest::load(manifest_path)?;
    let root = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok(check(&manifest, &root))
}

fn violation(kind: ViolationKind, id: Option<&str>, detail: String) -> Violation {
    Violation {
        kind,
        id: id.map(str::to_owned),
        detail,
    }
}

pub(crate) fn check(manifest: &DatasetManifest, root: &Path) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for e in &manifest.entries {
        *seen.entry(e.id.as_str()).or_default() += 1;
    }
    let mut dups: Vec<_> = seen.into_iter().filter(|&(_, n)| n > 1).collect();
    dups.sort();
    for (id, n) in dups {
        out.push(violation(ViolationKind::DuplicateId, Some(id), format!("id appears {n} times")));
    }

    let side = manifest.header.side;
    for e in manifest.ok_entries() {
        let required: &[(&str, &Option<String>)] = match manifest.header.layout {
            Layout::Aligned => &[
                ("lineart_path", &e.lineart_path),
                ("input_path", &e.input_path),
                ("target_path", &e.target_path),
                ("pair_path", &e.pair_path),
            ],
            Layout::Unpaired => &[
                ("lineart_path", &e.lineart_path),
                ("input_path", &e.input_path),
                ("target_path", &e.target_path),
            ],
        };
        for (field, value) in required {
            if value.is_none() {
                out.push(violation(ViolationKind::MissingPath, Some(&e.id), format!("{field} is empty")));
            }
        }
        if e.split.is_none() {
            out.push(violation(ViolationKind::MissingPath, Some(&e.id), "split is empty".into()));
        }
        for (field, rel) in e.produced_paths() {
            let path = root.join(rel);
            if !path.is_file() {
                out.push(violation(
                    ViolationKind::MissingFile,
                    Some(&e.id),
                    format!("{field} {} does not exist", path.display()),
                ));
                continue;
            }
            if field == "hints_path" {
                continue;
            }
            let expected = if field == "pair_path" { (2 * side, side) } else { (side, side) };
            match load_png(&path) {
                Ok(img) if img.dimensions() != expected => out.push(violation(
                    ViolationKind::Dimensions,
                    Some(&e.id),
                    format!(
                        "{field} is {}x{}, expected {}x{}",
                        img.width(),
                        img.height(),
                        expected.0,
                        expected.1
                    ),
                )),
                Ok(_) => {}
                Err(err) => out.push(violation(ViolationKind::UnreadableImage, Some(&e.id), format!("{field}: {err}"))),
            }
        }
        if !PathBuf::from(&e.source_path).is_file() {
            out.push(violation(
                ViolationKind::MissingFile,
                Some(&e.id),
                format!("source_path {} does not exist", e.source_path),
            ));
        }
    }

    let total = manifest.ok_entries().count();
    let train = manifest.count(Split::Train);
    let expected = train_count(total, manifest.header.split);
    if train.abs_diff(expected) > 1 {
        out.push(violation(
            ViolationKind::SplitFraction,
            None,
            format!(
                "{train} of {total} entries are train, expected {expected} for fraction {}",
                manifest.header.split
            ),
        ));
    }
    out
}

/// Number of training entries for `total` sources at the given fraction.
pub fn train_count(total: usize, fraction: f64) -> usize {
    ((total as f64 * fraction).round() as usize).min(total)
}
