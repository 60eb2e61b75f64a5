//! Attribute declarations, table ingestion and the numerical preprocessing
//! (min-max scaling and equal-width discretization) used by the rest of the crate.
//!
//! Categorical values are stored as zero-based indices into the attribute's
//! declared value list. Everything that leaves the process (files, reports)
//! uses one-based indices.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttributeKind {
    Numerical,
    Nominal,
    /// Declared value order is the rank order.
    Ordinal,
}

impl AttributeKind {
    pub fn is_categorical(self) -> bool {
        !matches!(self, AttributeKind::Numerical)
    }

    pub fn tag(self) -> &'static str {
        match self {
            AttributeKind::Numerical => "num",
            AttributeKind::Nominal => "nom",
            AttributeKind::Ordinal => "ord",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "num" => Some(AttributeKind::Numerical),
            "nom" => Some(AttributeKind::Nominal),
            "ord" => Some(AttributeKind::Ordinal),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
    /// Empty for numerical attributes.
    pub values: Vec<String>,
}

impl AttributeSchema {
    pub fn numerical(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Numerical,
            values: Vec::new(),
        }
    }

    pub fn nominal(name: impl Into<String>, values: &[&str]) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Nominal,
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn ordinal(name: impl Into<String>, values: &[&str]) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Ordinal,
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    /// Categorical attribute with generated labels `v1..vN`.
    pub fn categorical_with_count(name: impl Into<String>, kind: AttributeKind, count: usize) -> Self {
        Self {
            name: name.into(),
            kind,
            values: (1..=count).map(|i| format!("v{i}")).collect(),
        }
    }

    pub fn value_count(&self) -> usize {
        self.values.len()
    }

    fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }
}

/// Validated attribute list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSchema {
    attributes: Vec<AttributeSchema>,
}

impl DatasetSchema {
    pub fn new(attributes: Vec<AttributeSchema>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::EmptySchema);
        }
        let mut seen = HashSet::new();
        for (i, attr) in attributes.iter().enumerate() {
            let line = i + 1;
            if attr.name.is_empty() {
                return Err(Error::Schema {
                    line,
                    message: "attribute name is empty".into(),
                });
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(Error::Schema {
                    line,
                    message: format!("duplicate attribute name `{}`", attr.name),
                });
            }
            match attr.kind {
                AttributeKind::Numerical if !attr.values.is_empty() => {
                    return Err(Error::Schema {
                        line,
                        message: format!("numerical attribute `{}` must not list values", attr.name),
                    });
                }
                AttributeKind::Nominal | AttributeKind::Ordinal if attr.values.len() < 2 => {
                    return Err(Error::Schema {
                        line,
                        message: format!(
                            "{} attribute `{}` needs at least 2 values, got {}",
                            if attr.kind == AttributeKind::Ordinal { "ordinal" } else { "nominal" },
                            attr.name,
                            attr.values.len()
                        ),
                    });
                }
                _ => {}
            }
            let mut labels = HashSet::new();
            for v in &attr.values {
                if v.is_empty() || !labels.insert(v.as_str()) {
                    return Err(Error::Schema {
                        line,
                        message: format!("attribute `{}` has an empty or duplicate value label `{v}`", attr.name),
                    });
                }
            }
        }
        Ok(Self { attributes })
    }

    pub fn attributes(&self) -> &[AttributeSchema] {
        &self.attributes
    }

    pub fn attribute(&self, r: usize) -> &AttributeSchema {
        &self.attributes[r]
    }

    pub fn d(&self) -> usize {
        self.attributes.len()
    }

    fn count(&self, kind: AttributeKind) -> usize {
        self.attributes.iter().filter(|a| a.kind == kind).count()
    }

    pub fn d_u(&self) -> usize {
        self.count(AttributeKind::Numerical)
    }

    pub fn d_n(&self) -> usize {
        self.count(AttributeKind::Nominal)
    }

    pub fn d_o(&self) -> usize {
        self.count(AttributeKind::Ordinal)
    }

    pub fn d_c(&self) -> usize {
        self.d_n() + self.d_o()
    }

    pub fn numerical_indices(&self) -> Vec<usize> {
        self.indices_where(|k| k == AttributeKind::Numerical)
    }

    pub fn categorical_indices(&self) -> Vec<usize> {
        self.indices_where(AttributeKind::is_categorical)
    }

    fn indices_where(&self, pred: impl Fn(AttributeKind) -> bool) -> Vec<usize> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| pred(a.kind))
            .map(|(i, _)| i)
            .collect()
    }

    /// Renders the schema in the same line format accepted by [`parse_schema`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.attributes {
            if a.values.is_empty() {
                let _ = writeln!(out, "{},{}", a.name, a.kind.tag());
            } else {
                let _ = writeln!(out, "{},{},{}", a.name, a.kind.tag(), a.values.join("|"));
            }
        }
        out
    }
}

/// Parses `name,kind[,v1|v2|...]` lines; `#` starts a comment line.
pub fn parse_schema(text: &str) -> Result<DatasetSchema> {
    let mut attributes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let mut parts = line.splitn(3, ',');
        let name = parts.next().unwrap_or_default().trim();
        let tag = parts.next().map(str::trim).ok_or_else(|| Error::Schema {
            line: lineno,
            message: format!("missing kind for attribute `{name}`"),
        })?;
        let kind = AttributeKind::from_tag(tag).ok_or_else(|| Error::Schema {
            line: lineno,
            message: format!("unknown kind `{tag}` (expected num, nom or ord)"),
        })?;
        let values = parts
            .next()
            .map(|v| v.split('|').map(|s| s.trim().to_string()).collect())
            .unwrap_or_default();
        attributes.push(AttributeSchema {
            name: name.to_string(),
            kind,
            values,
        });
    }
    // Report schema errors against file line numbers rather than attribute positions.
    DatasetSchema::new(attributes).map_err(|e| match e {
        Error::Schema { line, message } => Error::Schema {
            line: nth_attribute_line(text, line),
            message,
        },
        other => other,
    })
}

fn nth_attribute_line(text: &str, nth: usize) -> usize {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .nth(nth.saturating_sub(1))
        .map(|(i, _)| i + 1)
        .unwrap_or(nth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Column {
    Numerical(Vec<f64>),
    /// Zero-based indices into the attribute's value list.
    Categorical(Vec<u32>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numerical(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// n objects described by the attributes of a [`DatasetSchema`], stored column-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    schema: DatasetSchema,
    columns: Vec<Column>,
    n: usize,
    /// Observed (min, max) per numerical attribute; `None` for categorical ones.
    ranges: Vec<Option<(f64, f64)>>,
}

impl Dataset {
    /// Builds a dataset from columns, validating shape, kinds and value indices.
    pub fn from_columns(schema: DatasetSchema, columns: Vec<Column>) -> Result<Self> {
        if columns.len() != schema.d() {
            return Err(Error::Arity {
                row: 0,
                expected: schema.d(),
                found: columns.len(),
            });
        }
        let n = columns.first().map(Column::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut ranges = Vec::with_capacity(columns.len());
        for (r, (col, attr)) in columns.iter().zip(schema.attributes()).enumerate() {
            if col.len() != n {
                return Err(Error::Data {
                    row: col.len().min(n) + 1,
                    column: r + 1,
                    message: format!("column length {} differs from {n}", col.len()),
                });
            }
            match (col, attr.kind) {
                (Column::Numerical(vals), AttributeKind::Numerical) => {
                    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
                        return Err(Error::Data {
                            row: i + 1,
                            column: r + 1,
                            message: "numerical value is not finite".into(),
                        });
                    }
                    ranges.push(Some(min_max(vals)));
                }
                (Column::Categorical(codes), k) if k.is_categorical() => {
                    let v = attr.value_count() as u32;
                    if let Some(i) = codes.iter().position(|&c| c >= v) {
                        return Err(Error::Data {
                            row: i + 1,
                            column: r + 1,
                            message: format!("value index {} outside 1..={v}", codes[i] + 1),
                        });
                    }
                    ranges.push(None);
                }
                _ => {
                    return Err(Error::Data {
                        row: 1,
                        column: r + 1,
                        message: format!("column storage does not match kind {}", attr.kind.tag()),
                    });
                }
            }
        }
        Ok(Self {
            schema,
            columns,
            n,
            ranges,
        })
    }

    pub fn schema(&self) -> &DatasetSchema {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.schema.d()
    }

    pub fn column(&self, r: usize) -> &Column {
        &self.columns[r]
    }

    pub fn kind(&self, r: usize) -> AttributeKind {
        self.schema.attribute(r).kind
    }

    /// Numerical column. Panics if `r` is categorical.
    pub fn numeric(&self, r: usize) -> &[f64] {
        match &self.columns[r] {
            Column::Numerical(v) => v,
            Column::Categorical(_) => panic!("attribute {r} is categorical"),
        }
    }

    /// Categorical column (zero-based codes). Panics if `r` is numerical.
    pub fn codes(&self, r: usize) -> &[u32] {
        match &self.columns[r] {
            Column::Categorical(v) => v,
            Column::Numerical(_) => panic!("attribute {r} is numerical"),
        }
    }

    /// v^r for categorical attributes, 0 for numerical ones.
    pub fn value_count(&self, r: usize) -> usize {
        self.schema.attribute(r).value_count()
    }

    pub fn range(&self, r: usize) -> Option<(f64, f64)> {
        self.ranges[r]
    }

    /// New dataset holding the given rows in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|c| match c {
                Column::Numerical(v) => Column::Numerical(rows.iter().map(|&i| v[i]).collect()),
                Column::Categorical(v) => Column::Categorical(rows.iter().map(|&i| v[i]).collect()),
            })
            .collect();
        Dataset::from_columns(self.schema.clone(), columns)
    }

    /// Serializes back to headerless comma-separated rows using value labels.
    /// Numbers use the shortest representation that parses back to the same f64.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            for (r, col) in self.columns.iter().enumerate() {
                if r > 0 {
                    out.push(',');
                }
                match col {
                    Column::Numerical(v) => {
                        let _ = write!(out, "{}", v[i]);
                    }
                    Column::Categorical(v) => {
                        out.push_str(&self.schema.attribute(r).values[v[i] as usize]);
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn min_max(vals: &[f64]) -> (f64, f64) {
    vals.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Parses headerless comma-separated rows against `schema`.
///
/// Blank lines are skipped. Empty cells are rejected, there is no imputation.
pub fn ingest_table(text: &str, schema: &DatasetSchema) -> Result<Dataset> {
    let d = schema.d();
    let mut columns: Vec<Column> = schema
        .attributes()
        .iter()
        .map(|a| match a.kind {
            AttributeKind::Numerical => Column::Numerical(Vec::new()),
            _ => Column::Categorical(Vec::new()),
        })
        .collect();
    let mut row = 0;
    for raw in text.lines() {
        if raw.trim().is_empty() {
            continue;
        }
        row += 1;
        let tokens: Vec<&str> = raw.split(',').map(str::trim).collect();
        if tokens.len() != d {
            return Err(Error::Arity {
                row,
                expected: d,
                found: tokens.len(),
            });
        }
        for (r, (tok, attr)) in tokens.iter().zip(schema.attributes()).enumerate() {
            if tok.is_empty() {
                return Err(Error::Data {
                    row,
                    column: r + 1,
                    message: format!("missing value for attribute `{}`", attr.name),
                });
            }
            match &mut columns[r] {
                Column::Numerical(v) => {
                    let x: f64 = tok.parse().ok().filter(|x: &f64| x.is_finite()).ok_or_else(|| Error::Data {
                        row,
                        column: r + 1,
                        message: format!("`{tok}` is not a finite number"),
                    })?;
                    v.push(x);
                }
                Column::Categorical(v) => {
                    let idx = attr.value_index(tok).ok_or_else(|| Error::Data {
                        row,
                        column: r + 1,
                        message: format!(
                            "unknown value `{tok}` for attribute `{}`; legal values: {}",
                            attr.name,
                            attr.values.join("|")
                        ),
                    })?;
                    v.push(idx as u32);
                }
            }
        }
    }
    Dataset::from_columns(schema.clone(), columns)
}

/// Min-max scales every numerical attribute into [0,1]. Constant attributes become all zeros.
pub fn normalize_numerical(dataset: &Dataset) -> Dataset {
    let mut out = dataset.clone();
    for r in 0..out.d() {
        if let Column::Numerical(vals) = &mut out.columns[r] {
            let (lo, hi) = min_max(vals);
            let span = hi - lo;
            for v in vals.iter_mut() {
                *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
            }
            out.ranges[r] = Some(min_max(vals));
        }
    }
    out
}

/// B = min(8, max(2, ceil(log2 n))).
pub fn default_bin_count(n: usize) -> usize {
    let log = (n.max(1) as f64).log2().ceil() as usize;
    log.clamp(2, 8)
}

/// One coded column of the [`OrdinalView`]: `levels` distinct codes in 0..levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedColumn {
    pub levels: usize,
    pub codes: Vec<u32>,
}

/// Every attribute seen as a categorical column: numerical attributes binned, categorical ones passed through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalView {
    columns: Vec<CodedColumn>,
}

impl OrdinalView {
    pub fn columns(&self) -> &[CodedColumn] {
        &self.columns
    }

    pub fn column(&self, r: usize) -> &CodedColumn {
        &self.columns[r]
    }

    pub fn d(&self) -> usize {
        self.columns.len()
    }
}

/// Equal-width bin of a value in [0,1]: half-open bins, last bin closed. Zero-based.
pub fn bin_index(value: f64, bins: usize) -> u32 {
    let b = (value.clamp(0.0, 1.0) * bins as f64).floor() as usize;
    b.min(bins - 1) as u32
}

/// Discretizes a normalized dataset with the default bin rule.
pub fn discretize_numerical(dataset: &Dataset) -> OrdinalView {
    discretize_with_bins(dataset, None)
}

/// Discretizes a normalized dataset; `bins` overrides the default bin count.
pub fn discretize_with_bins(dataset: &Dataset, bins: Option<usize>) -> OrdinalView {
    let b = bins.unwrap_or_else(|| default_bin_count(dataset.n())).max(1);
    let columns = (0..dataset.d())
        .map(|r| match dataset.column(r) {
            Column::Numerical(vals) => CodedColumn {
                levels: b,
                codes: vals.iter().map(|&v| bin_index(v, b)).collect(),
            },
            Column::Categorical(codes) => CodedColumn {
                levels: dataset.value_count(r),
                codes: codes.clone(),
            },
        })
        .collect();
    OrdinalView { columns }
}
