use std::path::Path;
use std::str::FromStr;

use super::{compact_classes, DataError, Dataset, FeatureColumn};

/// Which CSV column holds the class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassColumn {
    Last,
    Index(usize),
    Name(String),
}

impl FromStr for ClassColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            ClassColumn::Last
        } else if let Ok(i) = s.parse() {
            ClassColumn::Index(i)
        } else {
            ClassColumn::Name(s.to_string())
        })
    }
}

/// Load a CSV file; the dataset is named after the file stem.
pub fn load_csv(path: impl AsRef<Path>, header: bool, class_column: &ClassColumn) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv(&text, &name, header, class_column)
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

fn as_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parse CSV text. A column is numeric when every non-missing cell parses as
/// a finite number, nominal otherwise; nominal categories are numbered in
/// order of first appearance.
pub fn parse_csv(text: &str, name: &str, header: bool, class_column: &ClassColumn) -> Result<Dataset, DataError> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers: Option<Vec<String>> = if header {
        Some(reader.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut width = headers.as_ref().map(Vec::len);
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(DataError::RaggedRow {
                line,
                expected,
                found: record.len(),
            });
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    let width = match width {
        Some(w) => w,
        None => return Err(DataError::NoInstances),
    };
    if rows.is_empty() {
        return Err(DataError::NoInstances);
    }

    let names: Vec<String> = match &headers {
        Some(h) => h.clone(),
        None => (0..width).map(|i| format!("attr{i}")).collect(),
    };
    let class_idx = match class_column {
        ClassColumn::Last => width - 1,
        ClassColumn::Index(i) if *i < width => *i,
        ClassColumn::Index(i) => return Err(DataError::ClassColumnNotFound(i.to_string())),
        ClassColumn::Name(n) => names
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| DataError::ClassColumnNotFound(n.clone()))?,
    };
    if width < 2 {
        return Err(DataError::ZeroPredictiveFeatures);
    }
    // header-less files name the class column `class`
    let class_name = if header { names[class_idx].clone() } else { "class".to_string() };

    let mut class_categories: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let cell = &row[class_idx];
        if is_missing(cell) {
            return Err(DataError::MissingClassLabel {
                line: r + 1 + usize::from(header),
            });
        }
        labels.push(intern(&mut class_categories, cell));
    }
    let (class_categories, labels) = compact_classes(class_categories, labels);

    let mut columns = Vec::with_capacity(width - 1);
    for c in (0..width).filter(|&c| c != class_idx) {
        let cells: Vec<&str> = rows.iter().map(|r| r[c].as_str()).collect();
        let numeric = cells.iter().all(|s| is_missing(s) || as_number(s).is_some());
        let column = if numeric {
            FeatureColumn::numeric(
                names[c].clone(),
                cells.iter().map(|s| if is_missing(s) { None } else { as_number(s) }).collect(),
            )
        } else {
            let mut categories = Vec::new();
            let codes = cells
                .iter()
                .map(|s| if is_missing(s) { None } else { Some(intern(&mut categories, s)) })
                .collect();
            FeatureColumn::nominal(names[c].clone(), categories, codes)
        };
        columns.push(column);
    }
    Dataset::new(name, columns, class_name, class_categories, labels)
}

fn intern(categories: &mut Vec<String>, value: &str) -> u32 {
    match categories.iter().position(|c| c == value) {
        Some(i) => i as u32,
        None => {
            categories.push(value.to_string());
            (categories.len() - 1) as u32
        }
    }
}
