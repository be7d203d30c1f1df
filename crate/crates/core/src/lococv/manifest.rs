use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::{read_json, write_json_atomic};
use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseEntry {
    pub case_id: String,
    pub center_id: u32,
    pub label: Label,
    /// SCIN header paths, relative to the manifest directory unless absolute.
    pub image: PathBuf,
    pub physician_mask: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_mask: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub cases: Vec<CaseEntry>,
    /// Directory relative paths are resolved against; not serialized.
    #[serde(skip)]
    pub root: PathBuf,
}

impl DatasetManifest {
    pub fn new(cases: Vec<CaseEntry>, root: impl Into<PathBuf>) -> Self {
        Self { cases, root: root.into() }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    /// Reads and validates a manifest: unique case ids, positive center ids
    /// and every referenced header present on disk.
    pub fn load(path: &Path) -> Result<Self> {
        let mut m: DatasetManifest = read_json(path)?;
        m.root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        m.validate(path)?;
        Ok(m)
    }

    fn validate(&self, path: &Path) -> Result<()> {
        let mut ids = HashSet::new();
        for c in &self.cases {
            if !ids.insert(c.case_id.as_str()) {
                return Err(Error::schema(path, format!("duplicate case_id {}", c.case_id)));
            }
            if c.center_id == 0 {
                return Err(Error::schema(path, format!("case {} has center_id 0", c.case_id)));
            }
            let files = [Some(&c.image), Some(&c.physician_mask), c.predicted_mask.as_ref()];
            for f in files.into_iter().flatten() {
                let full = self.resolve(f);
                if !full.is_file() {
                    return Err(Error::io(
                        full,
                        std::io::Error::new(std::io::ErrorKind::NotFound, "referenced file missing"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json_atomic(path, self)
    }

    /// Distinct center ids in ascending order.
    pub fn centers(&self) -> Vec<u32> {
        let mut c: Vec<u32> = self.cases.iter().map(|c| c.center_id).collect();
        c.sort_unstable();
        c.dedup();
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub held_out_center: u32,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

/// One fold per center in ascending center order: the center's cases form
/// the test set and every other case the training set.
pub fn split_lococv(manifest: &DatasetManifest) -> Result<Vec<Fold>> {
    let centers = manifest.centers();
    if centers.len() < 2 {
        return Err(Error::Fold(format!(
            "leave-one-center-out needs at least 2 centers, found {}",
            centers.len()
        )));
    }
    Ok(centers
        .into_iter()
        .map(|c| {
            let (test, train): (Vec<&CaseEntry>, Vec<&CaseEntry>) =
                manifest.cases.iter().partition(|e| e.center_id == c);
            Fold {
                held_out_center: c,
                train: train.into_iter().map(|e| e.case_id.clone()).collect(),
                test: test.into_iter().map(|e| e.case_id.clone()).collect(),
            }
        })
        .collect())
}
