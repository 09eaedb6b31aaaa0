//! Column-typed classification datasets: loading, validation, fold planning,
//! projection and supervised discretization.

mod arff;
mod csv;
mod discretize;
pub(crate) mod folds;

pub use self::arff::{load_arff, parse_arff};
pub use self::csv::{load_csv, parse_csv, ClassColumn};
pub use self::discretize::{mdl_cut_points, mdl_discretize};
pub use self::folds::{stratified_folds, FoldPlan};

use std::collections::BTreeSet;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate attribute name `{name}`")]
    DuplicateAttribute { line: usize, name: String },
    #[error("line {line}: cannot parse `{value}` as a number for attribute `{attribute}`")]
    NumericParse {
        line: usize,
        attribute: String,
        value: String,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: missing class label")]
    MissingClassLabel { line: usize },
    #[error("dataset has zero predictive features")]
    ZeroPredictiveFeatures,
    #[error("dataset has no instances")]
    NoInstances,
    #[error("class column `{0}` not found")]
    ClassColumnNotFound(String),
    #[error("column `{0}` is entirely missing")]
    AllMissingColumn(String),
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("projection requires at least one feature")]
    EmptyProjection,
    #[error("feature index {index} out of range for {count} features")]
    FeatureOutOfRange { index: usize, count: usize },
    #[error("cannot split {instances} instances into {folds} folds")]
    TooFewInstances { instances: usize, folds: usize },
    #[error("invalid fold configuration: {0}")]
    InvalidFolds(String),
    #[error("csv: {0}")]
    Csv(#[from] ::csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Nominal,
}

/// Values of one predictive column. Nominal codes index into `categories`.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Nominal {
        categories: Vec<String>,
        codes: Vec<Option<u32>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    pub name: String,
    pub data: ColumnData,
}

impl FeatureColumn {
    pub fn numeric(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        FeatureColumn {
            name: name.into(),
            data: ColumnData::Numeric(values),
        }
    }

    pub fn nominal(name: impl Into<String>, categories: Vec<String>, codes: Vec<Option<u32>>) -> Self {
        FeatureColumn {
            name: name.into(),
            data: ColumnData::Nominal { categories, codes },
        }
    }

    pub fn kind(&self) -> ColumnKind {
        match self.data {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Nominal { .. } => ColumnKind::Nominal,
        }
    }

    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Nominal { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Nominal { .. } => None,
        }
    }

    pub fn as_codes(&self) -> Option<&[Option<u32>]> {
        match &self.data {
            ColumnData::Nominal { codes, .. } => Some(codes),
            ColumnData::Numeric(_) => None,
        }
    }

    /// Declared category count; zero for numeric columns.
    pub fn cardinality(&self) -> usize {
        match &self.data {
            ColumnData::Nominal { categories, .. } => categories.len(),
            ColumnData::Numeric(_) => 0,
        }
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match &self.data {
            ColumnData::Numeric(v) => v[row].is_none(),
            ColumnData::Nominal { codes, .. } => codes[row].is_none(),
        }
    }

    fn missing_count(&self) -> usize {
        (0..self.len()).filter(|&r| self.is_missing(r)).count()
    }

    fn select_rows(&self, rows: &[usize]) -> FeatureColumn {
        let data = match &self.data {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Nominal { categories, codes } => ColumnData::Nominal {
                categories: categories.clone(),
                codes: rows.iter().map(|&r| codes[r]).collect(),
            },
        };
        FeatureColumn {
            name: self.name.clone(),
            data,
        }
    }
}

/// A classification dataset: predictive columns plus a nominal class.
///
/// Datasets are immutable once built. `Dataset::new` enforces the full set of
/// invariants; row subsets produced by [`Dataset::subset`] skip the
/// "no entirely missing column" check since a fold may legitimately lose every
/// observed value of a sparse column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    columns: Vec<FeatureColumn>,
    class_name: String,
    class_categories: Vec<String>,
    labels: Vec<u32>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        columns: Vec<FeatureColumn>,
        class_name: impl Into<String>,
        class_categories: Vec<String>,
        labels: Vec<u32>,
    ) -> Result<Self, DataError> {
        let ds = Dataset {
            name: name.into(),
            columns,
            class_name: class_name.into(),
            class_categories,
            labels,
        };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<(), DataError> {
        if self.columns.is_empty() {
            return Err(DataError::ZeroPredictiveFeatures);
        }
        if self.labels.is_empty() {
            return Err(DataError::NoInstances);
        }
        let n = self.labels.len();
        let mut seen = BTreeSet::new();
        for col in &self.columns {
            if !seen.insert(col.name.as_str()) {
                return Err(DataError::Invalid(format!("duplicate column name `{}`", col.name)));
            }
            if col.len() != n {
                return Err(DataError::Invalid(format!(
                    "column `{}` has {} values, expected {}",
                    col.name,
                    col.len(),
                    n
                )));
            }
            match &col.data {
                ColumnData::Numeric(v) => {
                    if v.iter().flatten().any(|x| !x.is_finite()) {
                        return Err(DataError::Invalid(format!(
                            "numeric column `{}` holds a non-finite value",
                            col.name
                        )));
                    }
                }
                ColumnData::Nominal { categories, codes } => {
                    if codes.iter().flatten().any(|&c| c as usize >= categories.len()) {
                        return Err(DataError::Invalid(format!(
                            "nominal column `{}` holds an undeclared category id",
                            col.name
                        )));
                    }
                }
            }
            if col.missing_count() == n {
                return Err(DataError::AllMissingColumn(col.name.clone()));
            }
        }
        if self.labels.iter().any(|&l| l as usize >= self.class_categories.len()) {
            return Err(DataError::Invalid("class label id out of range".into()));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> &FeatureColumn {
        &self.columns[index]
    }

    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    pub fn class_categories(&self) -> &[String] {
        &self.class_categories
    }

    pub fn class_labels(&self) -> &[u32] {
        &self.labels
    }

    /// I: number of instances.
    pub fn instance_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of predictive columns (the class is not counted).
    pub fn feature_count(&self) -> usize {
        self.columns.len()
    }

    /// Declared class count (ids range over `0..class_count()`).
    pub fn class_count(&self) -> usize {
        self.class_categories.len()
    }

    /// Per-class instance counts, indexed by class id.
    pub fn class_frequencies(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Number of distinct class labels actually present.
    pub fn classes_present(&self) -> usize {
        self.class_frequencies().iter().filter(|&&c| c > 0).count()
    }

    pub fn has_numeric(&self) -> bool {
        self.columns.iter().any(|c| c.kind() == ColumnKind::Numeric)
    }

    /// Rows `rows` (in the given order) as a new dataset sharing the schema.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            columns: self.columns.iter().map(|c| c.select_rows(rows)).collect(),
            class_name: self.class_name.clone(),
            class_categories: self.class_categories.clone(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
        }
    }

    /// Keep only the predictive columns in `keep`, in ascending index order.
    pub fn project(&self, keep: &[usize]) -> Result<Dataset, DataError> {
        if keep.is_empty() {
            return Err(DataError::EmptyProjection);
        }
        let count = self.feature_count();
        let keep: BTreeSet<usize> = keep.iter().copied().collect();
        if let Some(&index) = keep.iter().find(|&&i| i >= count) {
            return Err(DataError::FeatureOutOfRange { index, count });
        }
        Ok(Dataset {
            name: self.name.clone(),
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
            class_name: self.class_name.clone(),
            class_categories: self.class_categories.clone(),
            labels: self.labels.clone(),
        })
    }

    pub(crate) fn replace_columns(&self, columns: Vec<FeatureColumn>) -> Dataset {
        debug_assert_eq!(columns.len(), self.columns.len());
        Dataset {
            name: self.name.clone(),
            columns,
            class_name: self.class_name.clone(),
            class_categories: self.class_categories.clone(),
            labels: self.labels.clone(),
        }
    }
}

/// Shared by the loaders: drop class categories that never occur so that
/// every label id is below the distinct label count.
pub(crate) fn compact_classes(categories: Vec<String>, labels: Vec<u32>) -> (Vec<String>, Vec<u32>) {
    let mut used = vec![false; categories.len()];
    for &l in &labels {
        used[l as usize] = true;
    }
    let mut remap = vec![u32::MAX; categories.len()];
    let mut kept = Vec::new();
    for (i, cat) in categories.into_iter().enumerate() {
        if used[i] {
            remap[i] = kept.len() as u32;
            kept.push(cat);
        }
    }
    let labels = labels.into_iter().map(|l| remap[l as usize]).collect();
    (kept, labels)
}
