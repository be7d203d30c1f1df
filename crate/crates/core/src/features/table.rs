use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::grid::mean_and_sd;
use crate::label::Label;
use crate::radiomics::FeatureVector;

const FIXED_COLUMNS: [&str; 3] = ["case_id", "center_id", "label"];

/// Rows of feature values with their case metadata. Row `r` of `values`
/// belongs to `case_ids[r]`, `centers[r]` and `labels[r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub case_ids: Vec<String>,
    pub centers: Vec<u32>,
    pub labels: Vec<Label>,
    pub values: Vec<Vec<f64>>,
}

/// Serialization used for every real number in feature tables: 17
/// significant digits, round-trip exact.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl FeatureTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            case_ids: Vec::new(),
            centers: Vec::new(),
            labels: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn push(&mut self, case_id: &str, center: u32, label: Label, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row for {case_id} has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value {v} for {case_id}")));
        }
        self.case_ids.push(case_id.to_string());
        self.centers.push(center);
        self.labels.push(label);
        self.values.push(row);
        Ok(())
    }

    pub fn push_vector(&mut self, fv: &FeatureVector<f64>, center: u32, label: Label) -> Result<()> {
        self.push(&fv.case_id, center, label, fv.values.clone())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn label_indices(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.index()).collect()
    }

    /// Rows whose position satisfies `keep`, in original order.
    pub fn filter_rows(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut out = Self::new(self.columns.clone());
        for r in (0..self.len()).filter(|&r| keep(r)) {
            out.case_ids.push(self.case_ids[r].clone());
            out.centers.push(self.centers[r]);
            out.labels.push(self.labels[r]);
            out.values.push(self.values[r].clone());
        }
        out
    }

    /// Same rows restricted to `names`, in the order given.
    pub fn select_columns(&self, names: &[String]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown feature column {n}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            columns: names.to_vec(),
            case_ids: self.case_ids.clone(),
            centers: self.centers.clone(),
            labels: self.labels.clone(),
            values: self
                .values
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect(),
        })
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(FIXED_COLUMNS.iter().copied().chain(self.columns.iter().map(String::as_str)))?;
        for r in 0..self.len() {
            let mut rec = vec![
                self.case_ids[r].clone(),
                self.centers[r].to_string(),
                self.labels[r].to_string(),
            ];
            rec.extend(self.values[r].iter().map(|&v| format_real(v)));
            w.write_record(&rec)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("CSV buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv_string()?.as_bytes())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => Error::Csv(e),
        })?;
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.len() < 3 || header[..3] != FIXED_COLUMNS {
            return Err(Error::schema(path, "header must start with case_id,center_id,label"));
        }
        let mut table = Self::new(header[3..].to_vec());
        let mut seen = std::collections::HashSet::new();
        if !table.columns.iter().all(|c| seen.insert(c.clone())) {
            return Err(Error::schema(path, "duplicate feature column"));
        }
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row_err = |what: &str| Error::schema(path, format!("data row {}: {what}", line + 1));
            let center = rec[1].parse::<u32>().map_err(|_| row_err("bad center_id"))?;
            let label = rec[2].parse::<Label>().map_err(|_| row_err("bad label"))?;
            let vals = rec
                .iter()
                .skip(3)
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| row_err("unparsable value"))?;
            table
                .push(&rec[0], center, label, vals)
                .map_err(|e| row_err(&e.to_string()))?;
        }
        Ok(table)
    }
}

/// Per-column standardization fitted on a training table.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ZscoreParams {
    pub columns: Vec<String>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// Columns that were constant in training and pass through unscaled.
    pub constant: Vec<String>,
}

impl ZscoreParams {
    pub fn fit(train: &FeatureTable) -> Self {
        let mut means = Vec::with_capacity(train.columns.len());
        let mut sds = Vec::with_capacity(train.columns.len());
        let mut constant = Vec::new();
        for (j, name) in train.columns.iter().enumerate() {
            let (m, s) = if train.is_empty() {
                (0.0, 0.0)
            } else {
                mean_and_sd(&train.column(j))
            };
            if s == 0.0 {
                constant.push(name.clone());
            }
            means.push(m);
            sds.push(s);
        }
        Self {
            columns: train.columns.clone(),
            means,
            sds,
            constant,
        }
    }

    pub fn apply(&self, t: &FeatureTable) -> Result<FeatureTable> {
        if t.columns != self.columns {
            return Err(Error::InvalidArgument("z-score columns do not match the table".into()));
        }
        let mut out = t.clone();
        for row in &mut out.values {
            for (j, v) in row.iter_mut().enumerate() {
                if self.sds[j] > 0.0 {
                    *v = (*v - self.means[j]) / self.sds[j];
                }
            }
        }
        Ok(out)
    }
}

/// Standardizes both tables with statistics from `train` only.
pub fn table_zscore(
    train: &FeatureTable,
    apply_to: &FeatureTable,
) -> Result<(FeatureTable, FeatureTable, ZscoreParams)> {
    let p = ZscoreParams::fit(train);
    Ok((p.apply(train)?, p.apply(apply_to)?, p))
}
