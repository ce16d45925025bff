//! Labelled time-series datasets.
//!
//! Univariate files follow the UCR convention: one series per line, the
//! class label first, values separated by commas, tabs or spaces. Multivariate
//! datasets are described by a JSON manifest that either lists one such file
//! per variable or points at a block-layout file in which each line holds the
//! label followed by the variables' series one after another.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One labelled series of `len()` samples with `variables()` values each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    variables: usize,
    /// Row-major `T × V`.
    values: Vec<f64>,
    pub label: usize,
}

impl Series {
    pub fn new(variables: usize, values: Vec<f64>, label: usize) -> Result<Self> {
        if variables == 0 || values.is_empty() || !values.len().is_multiple_of(variables) {
            return Err(Error::InvalidDimension(format!(
                "{} values cannot form a series of {variables} variables",
                values.len()
            )));
        }
        Ok(Self { variables, values, label })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.variables
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    /// Values of all variables at time `t`.
    pub fn sample(&self, t: usize) -> &[f64] {
        &self.values[t * self.variables..(t + 1) * self.variables]
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.variables)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesDataset {
    pub name: String,
    variables: usize,
    classes: usize,
    pub train: Vec<Series>,
    pub test: Vec<Series>,
}

impl TimeSeriesDataset {
    /// Checks that every series has `variables` variables and a label in
    /// `0..classes`.
    pub fn new(name: impl Into<String>, classes: usize, train: Vec<Series>, test: Vec<Series>) -> Result<Self> {
        let first = train.first().or(test.first()).ok_or(Error::Empty("dataset"))?;
        let variables = first.variables();
        for s in train.iter().chain(&test) {
            if s.variables() != variables {
                return Err(Error::DimensionMismatch { expected: variables, got: s.variables() });
            }
            if s.label >= classes {
                return Err(Error::LabelRange { label: s.label as i64, classes });
            }
        }
        Ok(Self { name: name.into(), variables, classes, train, test })
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn classes(&self) -> usize {
        self.classes
    }
}

/// How to read a delimited file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelimitedSchema {
    /// Column holding the class label.
    pub label_column: usize,
    /// Field separator; `None` accepts commas, tabs and runs of spaces.
    pub delimiter: Option<char>,
    /// Variables per line. With more than one, the remaining fields are the
    /// variables' series concatenated (block layout).
    pub variable_count: usize,
    /// Declared number of classes; inferred as `max label + 1` when absent.
    pub classes: Option<usize>,
    /// Map the distinct labels found, in ascending order, onto `0, 1, ...`
    /// (for files that label classes `1..=C` or `-1/1`).
    pub remap_labels: bool,
    /// Require all series to have the same length.
    pub equal_length: bool,
}

impl Default for DelimitedSchema {
    fn default() -> Self {
        Self {
            label_column: 0,
            delimiter: None,
            variable_count: 1,
            classes: None,
            remap_labels: false,
            equal_length: false,
        }
    }
}

struct RawRow {
    line: usize,
    label: f64,
    fields: Vec<f64>,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_rows(path: &Path, text: &str, schema: &DelimitedSchema) -> Result<Vec<RawRow>> {
    let parse_err = |line: usize, reason: String| Error::Parse { path: path.display().to_string(), line, reason };
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = match schema.delimiter {
            Some(d) => trimmed.split(d).map(str::trim).collect(),
            None if trimmed.contains(',') => trimmed.split(',').map(str::trim).collect(),
            None => trimmed.split_whitespace().collect(),
        };
        if fields.len() <= schema.label_column + 1 {
            return Err(parse_err(
                line,
                format!("expected a label and at least one value, found {} fields", fields.len()),
            ));
        }
        let mut values = Vec::with_capacity(fields.len() - 1);
        let mut label = 0.0;
        for (col, field) in fields.iter().enumerate() {
            let v: f64 =
                field.parse().map_err(|_| parse_err(line, format!("column {}: {field:?} is not a number", col + 1)))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("column {}: non-finite value {field:?}", col + 1)));
            }
            if col == schema.label_column {
                label = v;
            } else {
                values.push(v);
            }
        }
        if label.fract() != 0.0 {
            return Err(parse_err(line, format!("label {label} is not an integer")));
        }
        rows.push(RawRow { line, label, fields: values });
    }
    Ok(rows)
}

/// Label map from raw label values to class indices.
fn label_map(rows: &[&RawRow], remap: bool) -> Vec<f64> {
    if remap {
        let set: BTreeSet<i64> = rows.iter().map(|r| r.label as i64).collect();
        set.into_iter().map(|v| v as f64).collect()
    } else {
        Vec::new()
    }
}

fn to_series(path: &Path, rows: Vec<RawRow>, map: &[f64], schema: &DelimitedSchema) -> Result<Vec<Series>> {
    let v = schema.variable_count.max(1);
    let mut out = Vec::with_capacity(rows.len());
    let mut expected_len = None;
    for row in rows {
        let label = if map.is_empty() {
            if row.label < 0.0 {
                return Err(Error::LabelRange { label: row.label as i64, classes: schema.classes.unwrap_or(0) });
            }
            row.label as usize
        } else {
            map.iter().position(|&m| m == row.label).ok_or(Error::Parse {
                path: path.display().to_string(),
                line: row.line,
                reason: format!("label {} does not occur in the training split", row.label),
            })?
        };
        if row.fields.len() % v != 0 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: row.line,
                reason: format!("{} values do not split into {v} equal blocks", row.fields.len()),
            });
        }
        let t = row.fields.len() / v;
        if schema.equal_length {
            match expected_len {
                None => expected_len = Some(t),
                Some(e) if e != t => {
                    return Err(Error::Parse {
                        path: path.display().to_string(),
                        line: row.line,
                        reason: format!("series has length {t}, expected {e}"),
                    });
                }
                _ => {}
            }
        }
        // Block layout -> row-major samples.
        let mut values = Vec::with_capacity(row.fields.len());
        for step in 0..t {
            for var in 0..v {
                values.push(row.fields[var * t + step]);
            }
        }
        out.push(Series::new(v, values, label)?);
    }
    Ok(out)
}

/// Reads one split from a delimited file (labels taken as class indices
/// unless `remap_labels` is set, in which case the split's own distinct
/// labels define the classes).
pub fn load_delimited(path: &Path, schema: &DelimitedSchema) -> Result<Vec<Series>> {
    let rows = parse_rows(path, &read_text(path)?, schema)?;
    let map = label_map(&rows.iter().collect::<Vec<_>>(), schema.remap_labels);
    to_series(path, rows, &map, schema)
}

fn infer_classes(schema: &DelimitedSchema, series: &[&Series]) -> Result<usize> {
    let max = series.iter().map(|s| s.label).max().ok_or(Error::Empty("dataset"))?;
    Ok(schema.classes.unwrap_or(max + 1))
}

/// Loads a dataset from a single delimited file, all of it as the training
/// split.
pub fn load_delimited_dataset(path: &Path, schema: &DelimitedSchema) -> Result<TimeSeriesDataset> {
    let train = load_delimited(path, schema)?;
    if train.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let classes = infer_classes(schema, &train.iter().collect::<Vec<_>>())?;
    TimeSeriesDataset::new(dataset_name(path), classes, train, Vec::new())
}

/// Loads a train/test pair of delimited files. With `remap_labels` the
/// training labels define the class indices of both splits.
pub fn load_split_files(train: &Path, test: &Path, schema: &DelimitedSchema) -> Result<TimeSeriesDataset> {
    let train_rows = parse_rows(train, &read_text(train)?, schema)?;
    let test_rows = parse_rows(test, &read_text(test)?, schema)?;
    let map = label_map(&train_rows.iter().collect::<Vec<_>>(), schema.remap_labels);
    let train_s = to_series(train, train_rows, &map, schema)?;
    let test_s = to_series(test, test_rows, &map, schema)?;
    if train_s.is_empty() {
        return Err(Error::Empty("training split"));
    }
    let all: Vec<&Series> = train_s.iter().chain(&test_s).collect();
    let classes = infer_classes(schema, &all)?;
    TimeSeriesDataset::new(dataset_name(train), classes, train_s, test_s)
}

fn dataset_name(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    stem.trim_end_matches("_TRAIN").trim_end_matches("_train").to_string()
}

/// Sidecar description of a dataset split over several files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    #[serde(default)]
    pub classes: Option<usize>,
    #[serde(default)]
    pub remap_labels: bool,
    #[serde(default)]
    pub delimiter: Option<char>,
    pub layout: ManifestLayout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ManifestLayout {
    /// One univariate file per variable and split; line `i` of every file
    /// belongs to series `i` and must carry the same label.
    PerVariable { train: Vec<PathBuf>, test: Vec<PathBuf> },
    /// One file per split with `variables` blocks per line.
    Block { variables: usize, train: PathBuf, test: PathBuf },
}

fn merge_variables(paths: &[PathBuf], schema: &DelimitedSchema, map: &[f64]) -> Result<Vec<Series>> {
    let mut per_var = Vec::with_capacity(paths.len());
    for p in paths {
        let rows = parse_rows(p, &read_text(p)?, schema)?;
        per_var.push((p, to_series(p, rows, map, schema)?));
    }
    let (first_path, first) = per_var.first().ok_or(Error::Empty("manifest variable list"))?;
    let v = per_var.len();
    let mut out = Vec::with_capacity(first.len());
    for (i, s0) in first.iter().enumerate() {
        let mut values = Vec::with_capacity(s0.len() * v);
        for t in 0..s0.len() {
            for (p, series) in &per_var {
                let s = series.get(i).ok_or_else(|| Error::Parse {
                    path: p.display().to_string(),
                    line: i + 1,
                    reason: format!("missing series (present in {})", first_path.display()),
                })?;
                if s.label != s0.label || s.len() != s0.len() {
                    return Err(Error::Parse {
                        path: p.display().to_string(),
                        line: i + 1,
                        reason: "label or length differs from the first variable's file".into(),
                    });
                }
                values.push(s.sample(t)[0]);
            }
        }
        out.push(Series::new(v, values, s0.label)?);
    }
    Ok(out)
}

/// Loads a multivariate dataset described by a JSON manifest; relative paths
/// are resolved against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<TimeSeriesDataset> {
    let manifest: Manifest = serde_json::from_str(&read_text(path)?)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &PathBuf| if p.is_absolute() { p.clone() } else { dir.join(p) };
    let mut schema = DelimitedSchema {
        delimiter: manifest.delimiter,
        classes: manifest.classes,
        remap_labels: manifest.remap_labels,
        ..Default::default()
    };
    let (train, test) = match &manifest.layout {
        ManifestLayout::Block { variables, train, test } => {
            schema.variable_count = *variables;
            let (train, test) = (resolve(train), resolve(test));
            let train_rows = parse_rows(&train, &read_text(&train)?, &schema)?;
            let test_rows = parse_rows(&test, &read_text(&test)?, &schema)?;
            let map = label_map(&train_rows.iter().collect::<Vec<_>>(), schema.remap_labels);
            (to_series(&train, train_rows, &map, &schema)?, to_series(&test, test_rows, &map, &schema)?)
        }
        ManifestLayout::PerVariable { train, test } => {
            if train.len() != test.len() {
                return Err(Error::config("manifest", "train and test list different numbers of variables"));
            }
            let train: Vec<PathBuf> = train.iter().map(resolve).collect();
            let test: Vec<PathBuf> = test.iter().map(resolve).collect();
            let first = train.first().ok_or(Error::Empty("manifest variable list"))?;
            let rows = parse_rows(first, &read_text(first)?, &schema)?;
            let map = label_map(&rows.iter().collect::<Vec<_>>(), schema.remap_labels);
            (merge_variables(&train, &schema, &map)?, merge_variables(&test, &schema, &map)?)
        }
    };
    if train.is_empty() {
        return Err(Error::Empty("training split"));
    }
    let all: Vec<&Series> = train.iter().chain(&test).collect();
    let classes = infer_classes(&schema, &all)?;
    TimeSeriesDataset::new(manifest.name, classes, train, test)
}
