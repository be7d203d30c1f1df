//! Config-file overrides and run provenance.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use thyroidiomics::fsutil::write_json_atomic;
use thyroidiomics::Error;

/// Overlays the JSON object in `file` on `base`. Keys in the file replace the
/// values assembled from flags; nested objects merge key by key. A key the
/// config type does not have is a schema error.
pub fn apply_overrides<C: Serialize + DeserializeOwned>(base: C, file: Option<&Path>) -> Result<C, Error> {
    let Some(path) = file else {
        return Ok(base);
    };
    let overrides: Value = thyroidiomics::fsutil::read_json(path)?;
    let mut merged = serde_json::to_value(&base)?;
    merge(&mut merged, overrides, path, "")?;
    serde_json::from_value(merged).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

fn merge(dst: &mut Value, src: Value, path: &Path, at: &str) -> Result<(), Error> {
    match (dst, src) {
        (Value::Object(d), Value::Object(s)) => {
            for (k, v) in s {
                let here = if at.is_empty() { k.clone() } else { format!("{at}.{k}") };
                match d.get_mut(&k) {
                    Some(slot) => merge(slot, v, path, &here)?,
                    None => {
                        return Err(Error::Schema {
                            path: path.to_path_buf(),
                            reason: format!("unknown key {here}"),
                        })
                    }
                }
            }
            Ok(())
        }
        (slot, v) => {
            *slot = v;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RunRecord<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    config: &'a C,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    excluded_cases: Vec<String>,
}

/// Where the provenance record of an output goes: `run.json` inside an output
/// directory, `<file>.run.json` beside a single output file.
pub fn record_path(out: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        out.join("run.json")
    } else {
        let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".run.json");
        out.with_file_name(name)
    }
}

pub fn write_run_record<C: Serialize>(
    path: &Path,
    command: &str,
    seed: Option<u64>,
    config: &C,
    excluded_cases: Vec<String>,
) -> Result<(), Error> {
    let rec = RunRecord {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        config,
        excluded_cases,
    };
    write_json_atomic(path, &rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    struct Inner {
        a: f64,
        b: Vec<u32>,
    }

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    struct Outer {
        k: usize,
        inner: Inner,
    }

    fn base() -> Outer {
        Outer {
            k: 10,
            inner: Inner { a: 0.5, b: vec![1, 2] },
        }
    }

    #[test]
    fn file_keys_win_and_nest() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"inner": {"b": [7]}}"#).unwrap();
        let got = apply_overrides(base(), Some(&p)).unwrap();
        assert_eq!(got, Outer { k: 10, inner: Inner { a: 0.5, b: vec![7] } });
    }

    #[test]
    fn unknown_and_mistyped_keys_are_schema_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"inner": {"zz": 1}}"#).unwrap();
        let e = apply_overrides(base(), Some(&p)).unwrap_err();
        assert!(e.to_string().contains("inner.zz"), "{e}");
        std::fs::write(&p, r#"{"k": "ten"}"#).unwrap();
        assert!(matches!(apply_overrides(base(), Some(&p)), Err(Error::Schema { .. })));
    }

    #[test]
    fn record_paths() {
        assert_eq!(record_path(Path::new("out"), true), Path::new("out/run.json"));
        assert_eq!(record_path(Path::new("a/f.csv"), false), Path::new("a/f.csv.run.json"));
    }
}
