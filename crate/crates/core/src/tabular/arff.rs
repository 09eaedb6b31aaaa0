use std::collections::HashSet;
use std::path::Path;

use super::{compact_classes, ColumnData, DataError, Dataset, FeatureColumn};

enum AttrType {
    Numeric,
    Nominal(Vec<String>),
}

struct Attribute {
    name: String,
    kind: AttrType,
}

/// Load a dense ARFF file. The last declared attribute is the class and must
/// be nominal.
pub fn load_arff(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_arff(&text)
}

pub fn parse_arff(text: &str) -> Result<Dataset, DataError> {
    let mut relation: Option<String> = None;
    let mut attrs: Vec<Attribute> = Vec::new();
    let mut names = HashSet::new();
    let mut in_data = false;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(malformed(line_no, "sparse ARFF rows are not supported"));
            }
            let fields = split_fields(line).map_err(|m| malformed(line_no, &m))?;
            rows.push((line_no, fields));
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            let rest = line["@relation".len()..].trim();
            let (name, _) = take_token(rest).map_err(|m| malformed(line_no, &m))?;
            if name.is_empty() {
                return Err(malformed(line_no, "@relation without a name"));
            }
            relation = Some(name);
        } else if lower.starts_with("@attribute") {
            let rest = line["@attribute".len()..].trim();
            let (name, ty) = take_token(rest).map_err(|m| malformed(line_no, &m))?;
            if name.is_empty() {
                return Err(malformed(line_no, "@attribute without a name"));
            }
            let kind = parse_type(ty.trim()).map_err(|m| malformed(line_no, &m))?;
            if !names.insert(name.clone()) {
                return Err(DataError::DuplicateAttribute { line: line_no, name });
            }
            attrs.push(Attribute { name, kind });
        } else if lower.starts_with("@data") {
            if relation.is_none() {
                return Err(malformed(line_no, "@data before @relation"));
            }
            in_data = true;
        } else {
            return Err(malformed(line_no, &format!("unexpected header line `{line}`")));
        }
    }

    if !in_data {
        return Err(malformed(text.lines().count().max(1), "missing @data section"));
    }
    if attrs.is_empty() {
        return Err(malformed(1, "no attributes declared"));
    }
    if attrs.len() == 1 {
        return Err(DataError::ZeroPredictiveFeatures);
    }
    let class_attr = attrs.pop().expect("at least two attributes");
    let class_categories = match class_attr.kind {
        AttrType::Nominal(c) => c,
        AttrType::Numeric => {
            return Err(DataError::Invalid(format!(
                "class attribute `{}` must be nominal",
                class_attr.name
            )))
        }
    };

    let width = attrs.len() + 1;
    let mut columns: Vec<ColumnData> = attrs
        .iter()
        .map(|a| match &a.kind {
            AttrType::Numeric => ColumnData::Numeric(Vec::with_capacity(rows.len())),
            AttrType::Nominal(c) => ColumnData::Nominal {
                categories: c.clone(),
                codes: Vec::with_capacity(rows.len()),
            },
        })
        .collect();
    let mut labels = Vec::with_capacity(rows.len());

    for (line, fields) in &rows {
        if fields.len() != width {
            return Err(DataError::RaggedRow {
                line: *line,
                expected: width,
                found: fields.len(),
            });
        }
        for ((field, col), attr) in fields.iter().zip(columns.iter_mut()).zip(&attrs) {
            let missing = field == "?";
            match col {
                ColumnData::Numeric(v) => {
                    if missing {
                        v.push(None);
                    } else {
                        let x: f64 = field.parse().ok().filter(|x: &f64| x.is_finite()).ok_or_else(|| {
                            DataError::NumericParse {
                                line: *line,
                                attribute: attr.name.clone(),
                                value: field.clone(),
                            }
                        })?;
                        v.push(Some(x));
                    }
                }
                ColumnData::Nominal { categories, codes } => {
                    if missing {
                        codes.push(None);
                    } else {
                        let id = lookup(categories, field).ok_or_else(|| {
                            malformed(*line, &format!("undeclared value `{field}` for attribute `{}`", attr.name))
                        })?;
                        codes.push(Some(id));
                    }
                }
            }
        }
        let class_field = &fields[width - 1];
        if class_field == "?" {
            return Err(DataError::MissingClassLabel { line: *line });
        }
        let id = lookup(&class_categories, class_field).ok_or_else(|| {
            malformed(*line, &format!("undeclared class value `{class_field}`"))
        })?;
        labels.push(id);
    }

    let (class_categories, labels) = compact_classes(class_categories, labels);
    let columns = attrs
        .into_iter()
        .zip(columns)
        .map(|(a, data)| FeatureColumn { name: a.name, data })
        .collect();
    Dataset::new(
        relation.unwrap_or_default(),
        columns,
        class_attr.name,
        class_categories,
        labels,
    )
}

fn lookup(categories: &[String], value: &str) -> Option<u32> {
    categories.iter().position(|c| c == value).map(|i| i as u32)
}

fn malformed(line: usize, message: &str) -> DataError {
    DataError::Malformed {
        line,
        message: message.to_string(),
    }
}

fn parse_type(ty: &str) -> Result<AttrType, String> {
    if ty.starts_with('{') {
        let inner = ty
            .strip_prefix('{')
            .and_then(|s| s.trim_end().strip_suffix('}'))
            .ok_or_else(|| "unterminated nominal value list".to_string())?;
        let values = split_fields(inner)?;
        if values.is_empty() || values.iter().any(|v| v.is_empty()) {
            return Err("empty nominal value".into());
        }
        let mut seen = HashSet::new();
        if let Some(dup) = values.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(format!("duplicate nominal value `{dup}`"));
        }
        return Ok(AttrType::Nominal(values));
    }
    match ty.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(AttrType::Numeric),
        other => Err(format!("unsupported attribute type `{other}`")),
    }
}

/// Split off the first (possibly quoted) token; returns (token, remainder).
fn take_token(s: &str) -> Result<(String, &str), String> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        None => Ok((String::new(), "")),
        Some((_, q)) if q == '\'' || q == '"' => {
            let mut out = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    out.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((out, &s[i + 1..]));
                } else {
                    out.push(c);
                }
            }
            Err("unterminated quoted name".into())
        }
        Some(_) => {
            let end = s
                .find(|c: char| c.is_whitespace() || c == '{')
                .unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
    }
}

/// Comma-separated fields with optional single or double quoting.
fn split_fields(line: &str) -> Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut was_quoted = false;
    let mut close_len = 0;
    let mut escaped = false;
    for c in line.chars() {
        if let Some(q) = quote {
            if escaped {
                cur.push(c);
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == q {
                quote = None;
                close_len = cur.len();
            } else {
                cur.push(c);
            }
            continue;
        }
        match c {
            '\'' | '"' if cur.trim().is_empty() => {
                cur.clear();
                quote = Some(c);
                was_quoted = true;
            }
            ',' => {
                fields.push(finish(&cur, was_quoted, close_len));
                cur.clear();
                was_quoted = false;
            }
            _ => cur.push(c),
        }
    }
    if quote.is_some() {
        return Err("unterminated quoted value".into());
    }
    fields.push(finish(&cur, was_quoted, close_len));
    Ok(fields)
}

fn finish(s: &str, quoted: bool, close_len: usize) -> String {
    if quoted {
        let (body, tail) = s.split_at(close_len);
        format!("{body}{}", tail.trim())
    } else {
        s.trim().to_string()
    }
}
