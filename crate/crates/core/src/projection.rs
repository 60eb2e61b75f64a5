//! Projection of categorical attributes onto one-dimensional sub-attributes.
//!
//! Each pair of possible values (g, h) of a nominal attribute spans a line; every
//! value t is placed on that line from its base distances to g and h using the
//! law of cosines. Ordinal attributes already lie on a line, so one sub-attribute
//! per ordinal attribute suffices.

use std::fmt::Write as _;

use crate::base_distance::{BaseDistanceTable, KappaMatrix};
use crate::error::{Error, Result};
use crate::schema::{AttributeKind, Dataset};

/// How the projected coordinate of a value is read off the spanning line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum ProjectionForm {
    /// Signed position along g→h. Values behind g get negative coordinates.
    #[default]
    Signed,
    /// Unsigned distance of the projected point from g. Folds values lying behind g onto the g→h side.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Span {
    /// Line through values g and h (zero-based, g < h).
    Pair(usize, usize),
    /// The ordinal rank line.
    OrdinalLine,
    /// 0/1 mismatch, used when every span of an attribute is degenerate.
    Hamming,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Span::Pair(g, h) => write!(f, "{}-{}", g + 1, h + 1),
            Span::OrdinalLine => f.write_str("ordinal"),
            Span::Hamming => f.write_str("hamming"),
        }
    }
}

/// One sub-attribute: a coordinate for every possible value of its source attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedAttribute {
    pub source: usize,
    pub span: Span,
    pub coords: Vec<f64>,
    /// Largest pairwise coordinate gap before normalization.
    pub max_span: f64,
}

impl ProjectedAttribute {
    fn new(source: usize, span: Span, coords: Vec<f64>) -> Self {
        let max_span = max_gap(&coords);
        Self {
            source,
            span,
            coords,
            max_span,
        }
    }

    fn hamming(source: usize, v: usize) -> Self {
        Self {
            source,
            span: Span::Hamming,
            coords: vec![0.0; v],
            max_span: 1.0,
        }
    }

    pub fn value_count(&self) -> usize {
        self.coords.len()
    }
}

fn max_gap(coords: &[f64]) -> f64 {
    let lo = coords.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if coords.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Coordinate of value t on the line spanned by (g, h), measured from g.
pub fn project_coordinate(kappa: &KappaMatrix, t: usize, g: usize, h: usize, form: ProjectionForm) -> f64 {
    let (tg, th, gh) = (kappa.get(t, g), kappa.get(t, h), kappa.get(g, h));
    let signed = (tg * tg - th * th + gh * gh) / (2.0 * gh);
    match form {
        ProjectionForm::Signed => signed,
        ProjectionForm::Absolute => signed.abs(),
    }
}

/// One sub-attribute per value pair with non-zero base distance, using the signed form.
pub fn project_nominal(source: usize, kappa: &KappaMatrix) -> Result<Vec<ProjectedAttribute>> {
    project_nominal_with(source, kappa, ProjectionForm::Signed)
}

pub fn project_nominal_with(source: usize, kappa: &KappaMatrix, form: ProjectionForm) -> Result<Vec<ProjectedAttribute>> {
    let v = kappa.size();
    let mut out = Vec::with_capacity(v * v.saturating_sub(1) / 2);
    let mut dropped = 0;
    for g in 0..v {
        for h in g + 1..v {
            if kappa.get(g, h).is_nan() || kappa.get(g, h) <= 0.0 {
                dropped += 1;
                continue;
            }
            let coords = (0..v).map(|t| project_coordinate(kappa, t, g, h, form)).collect();
            out.push(ProjectedAttribute::new(source, Span::Pair(g, h), coords));
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateAttribute(source));
    }
    if dropped > 0 {
        log::warn!("attribute {}: dropped {dropped} spans with zero base distance", source + 1);
    }
    Ok(out)
}

/// Single sub-attribute placing each value at its base distance from the lowest rank.
pub fn project_ordinal(source: usize, kappa: &KappaMatrix) -> Result<ProjectedAttribute> {
    let coords: Vec<f64> = (0..kappa.size()).map(|t| kappa.get(t, 0)).collect();
    let attr = ProjectedAttribute::new(source, Span::OrdinalLine, coords);
    if attr.max_span.is_nan() || attr.max_span <= 0.0 {
        return Err(Error::DegenerateAttribute(source));
    }
    Ok(attr)
}

/// Scales coordinates so the largest value-level distance of this sub-attribute is 1.
/// Returns `None` when every coordinate coincides.
pub fn normalize_projected(attr: ProjectedAttribute) -> Option<ProjectedAttribute> {
    if attr.span == Span::Hamming {
        return Some(attr);
    }
    let gap = max_gap(&attr.coords);
    if gap.is_nan() || gap <= 0.0 {
        log::warn!("attribute {}, span {}: all coordinates equal, dropped", attr.source + 1, attr.span);
        return None;
    }
    Some(ProjectedAttribute {
        coords: attr.coords.iter().map(|c| c / gap).collect(),
        max_span: gap,
        ..attr
    })
}

/// |coord(u) − coord(f)|, or the 0/1 mismatch for a Hamming fallback.
pub fn value_distance(attr: &ProjectedAttribute, u: usize, f: usize) -> f64 {
    match attr.span {
        Span::Hamming => f64::from(u8::from(u != f)),
        _ => (attr.coords[u] - attr.coords[f]).abs(),
    }
}

/// Numerical attributes plus every projected sub-attribute, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedSpace {
    numerical: Vec<usize>,
    sub_attributes: Vec<ProjectedAttribute>,
    gamma: Vec<(usize, usize)>,
}

impl ReconstructedSpace {
    pub fn numerical(&self) -> &[usize] {
        &self.numerical
    }

    pub fn sub_attributes(&self) -> &[ProjectedAttribute] {
        &self.sub_attributes
    }

    /// (source attribute, sub-attribute count) for each categorical attribute.
    pub fn gamma(&self) -> &[(usize, usize)] {
        &self.gamma
    }

    pub fn gamma_of(&self, source: usize) -> Option<usize> {
        self.gamma.iter().find(|(s, _)| *s == source).map(|(_, g)| *g)
    }

    /// d̂ = d_u + Σ γ.
    pub fn d_hat(&self) -> usize {
        self.numerical.len() + self.sub_attributes.len()
    }

    /// `source,span,c1,c2,...` per sub-attribute, one-based source index.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for a in &self.sub_attributes {
            let coords: Vec<String> = a.coords.iter().map(|c| format!("{:.11e}", c)).collect();
            let _ = writeln!(out, "{},{},{}", a.source + 1, a.span, coords.join(","));
        }
        out
    }
}

pub fn reconstruct(dataset: &Dataset, table: &BaseDistanceTable) -> Result<ReconstructedSpace> {
    reconstruct_with(dataset, table, ProjectionForm::Signed)
}

/// Builds the expanded attribute set: sub-attributes ordered by source attribute, then span.
pub fn reconstruct_with(dataset: &Dataset, table: &BaseDistanceTable, form: ProjectionForm) -> Result<ReconstructedSpace> {
    let mut numerical = Vec::new();
    let mut sub_attributes = Vec::new();
    let mut gamma = Vec::new();
    for r in 0..dataset.d() {
        let kind = dataset.kind(r);
        if kind == AttributeKind::Numerical {
            numerical.push(r);
            continue;
        }
        let kappa = table.get(r).ok_or_else(|| Error::config(format!("no base distances for attribute {}", r + 1)))?;
        let projected = match kind {
            AttributeKind::Ordinal => project_ordinal(r, kappa).map(|a| vec![a]),
            _ => project_nominal_with(r, kappa, form),
        };
        let mut attrs: Vec<ProjectedAttribute> = match projected {
            Ok(list) => list.into_iter().filter_map(normalize_projected).collect(),
            Err(Error::DegenerateAttribute(_)) => Vec::new(),
            Err(e) => return Err(e),
        };
        if attrs.is_empty() {
            log::warn!(
                "attribute `{}`: no usable projection, falling back to Hamming",
                dataset.schema().attribute(r).name
            );
            attrs.push(ProjectedAttribute::hamming(r, kappa.size()));
        }
        gamma.push((r, attrs.len()));
        sub_attributes.extend(attrs);
    }
    Ok(ReconstructedSpace {
        numerical,
        sub_attributes,
        gamma,
    })
}
