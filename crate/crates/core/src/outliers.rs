//! Outlier flagging and removal.
//!
//! Statistical flags (z-score, IQR fences) and rectangular brush selections
//! all produce a [`SelectionSet`] of row indices. A reviewer combines and
//! edits those sets, then [`apply_removal`] masks or drops the rows.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{mean, sample_std, sorted_present, WellDataset};
use crate::eda::{bin_index, check_edges, tukey_fences};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Brush,
    Zscore,
    Iqr,
    Manual,
}

/// Flagged rows of one well.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionSet {
    pub id: String,
    pub well: String,
    pub provenance: Provenance,
    pub rows: Vec<usize>,
    #[serde(default)]
    pub created_from: String,
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

impl SelectionSet {
    /// Builds a selection with a fresh id; rows are sorted and de-duplicated.
    pub fn new(
        well: impl Into<String>,
        rows: impl IntoIterator<Item = usize>,
        provenance: Provenance,
        created_from: impl Into<String>,
    ) -> Self {
        let rows: BTreeSet<usize> = rows.into_iter().collect();
        SelectionSet {
            id: new_id(),
            well: well.into(),
            provenance,
            rows: rows.into_iter().collect(),
            created_from: created_from.into(),
        }
    }

    /// Checks the rows are sorted, unique and below `len`.
    pub fn validate(&self, len: usize) -> Result<()> {
        if self.rows.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("selection rows must be sorted and unique".into()));
        }
        match self.rows.last() {
            Some(&index) if index >= len => Err(Error::IndexOutOfRange { index, len }),
            _ => Ok(()),
        }
    }
}

/// Closed rectangle on a cross-plot of `x_curve` against `y_curve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrushRect {
    pub x_curve: String,
    pub y_curve: String,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl BrushRect {
    pub fn validate(&self) -> Result<()> {
        let bounds = [self.x_lo, self.x_hi, self.y_lo, self.y_hi];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("brush bounds must be finite".into()));
        }
        if self.x_lo > self.x_hi {
            return Err(Error::InvalidRange {
                lo: self.x_lo,
                hi: self.x_hi,
            });
        }
        if self.y_lo > self.y_hi {
            return Err(Error::InvalidRange {
                lo: self.y_lo,
                hi: self.y_hi,
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi && y >= self.y_lo && y <= self.y_hi
    }
}

impl fmt::Display for BrushRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} in [{}, {}], {} in [{}, {}]",
            self.x_curve, self.x_lo, self.x_hi, self.y_curve, self.y_lo, self.y_hi
        )
    }
}

/// Rows whose absolute z-score (sample std) exceeds `threshold`.
pub fn zscore_flags(values: &[Option<f64>], threshold: f64) -> Result<Vec<usize>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be positive, got {threshold}")));
    }
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    match present.len() {
        0 => return Err(Error::AllMissing),
        1 => return Err(Error::TooFewValues { needed: 2, found: 1 }),
        _ => {}
    }
    if present.iter().all(|v| *v == present[0]) {
        return Ok(Vec::new());
    }
    let m = mean(&present);
    let sd = sample_std(&present, m).expect("two or more values");
    Ok(values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.filter(|v| ((v - m) / sd).abs() > threshold).map(|_| i))
        .collect())
}

/// Rows outside `[q1 - k*IQR, q3 + k*IQR]`.
pub fn iqr_flags(values: &[Option<f64>], k: f64) -> Result<Vec<usize>> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let sorted = sorted_present(values);
    if sorted.len() < 4 {
        return Err(Error::TooFewValues {
            needed: 4,
            found: sorted.len(),
        });
    }
    let (_, _, _, lo, hi) = tukey_fences(&sorted, k);
    Ok(values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.filter(|v| *v < lo || *v > hi).map(|_| i))
        .collect())
}

/// Rows whose cross-plot point lies inside the closed rectangle.
pub fn brush_select(ds: &WellDataset, rect: &BrushRect) -> Result<SelectionSet> {
    rect.validate()?;
    let xs = ds.curve(&rect.x_curve)?.values();
    let ys = ds.curve(&rect.y_curve)?.values();
    let rows = xs
        .iter()
        .zip(ys)
        .enumerate()
        .filter(|(_, (x, y))| matches!((x, y), (Some(x), Some(y)) if rect.contains(*x, *y)))
        .map(|(i, _)| i);
    Ok(SelectionSet::new(ds.well(), rows, Provenance::Brush, rect.to_string()))
}

/// Builds a z-score or IQR selection for one curve of a dataset.
pub fn flag_curve(ds: &WellDataset, curve: &str, provenance: Provenance, param: f64) -> Result<SelectionSet> {
    let values = ds.curve(curve)?.values();
    let (rows, label) = match provenance {
        Provenance::Zscore => (zscore_flags(values, param)?, "zscore"),
        Provenance::Iqr => (iqr_flags(values, param)?, "iqr"),
        other => {
            return Err(Error::InvalidParameter(format!("{other:?} is not a statistical method")));
        }
    };
    Ok(SelectionSet::new(ds.well(), rows, provenance, format!("{label}({curve}, {param})")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
}

pub fn combine(a: &SelectionSet, b: &SelectionSet, op: SetOp) -> Result<SelectionSet> {
    if a.well != b.well {
        return Err(Error::WellMismatch {
            selection: b.well.clone(),
            dataset: a.well.clone(),
        });
    }
    let left: BTreeSet<usize> = a.rows.iter().copied().collect();
    let right: BTreeSet<usize> = b.rows.iter().copied().collect();
    let rows: Vec<usize> = match op {
        SetOp::Union => left.union(&right).copied().collect(),
        SetOp::Intersect => left.intersection(&right).copied().collect(),
        SetOp::Difference => left.difference(&right).copied().collect(),
    };
    let label = match op {
        SetOp::Union => "union",
        SetOp::Intersect => "intersect",
        SetOp::Difference => "difference",
    };
    Ok(SelectionSet::new(
        a.well.clone(),
        rows,
        Provenance::Manual,
        format!("{label}({}, {})", a.id, b.id),
    ))
}

/// Counts of the selected, non-missing rows over existing histogram edges,
/// so a linked view overlays the base histogram bin for bin.
pub fn filtered_histogram(values: &[Option<f64>], selection: &[usize], edges: &[f64]) -> Result<Vec<u64>> {
    check_edges(edges)?;
    let mut counts = vec![0u64; edges.len() - 1];
    for &i in selection {
        let v = values.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: values.len(),
        })?;
        if let Some(b) = v.and_then(|v| bin_index(edges, v)) {
            counts[b] += 1;
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemovalMode {
    /// Selected cells become missing; the depth grid is kept.
    #[default]
    Mask,
    /// Selected rows are removed from depth and every curve.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalReport {
    pub mode: RemovalMode,
    pub rows: usize,
    pub cells: usize,
}

/// Curves touched by a mask removal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveScope {
    All,
    Named(Vec<String>),
}

pub fn apply_removal(
    ds: &WellDataset,
    selection: &SelectionSet,
    mode: RemovalMode,
    curves: &CurveScope,
) -> Result<(WellDataset, RemovalReport)> {
    if selection.well != ds.well() {
        return Err(Error::WellMismatch {
            selection: selection.well.clone(),
            dataset: ds.well().to_string(),
        });
    }
    let len = ds.row_count();
    if let Some(&index) = selection.rows.iter().find(|&&r| r >= len) {
        return Err(Error::IndexOutOfRange { index, len });
    }
    match mode {
        RemovalMode::Drop => {
            let mut keep = vec![true; len];
            for &r in &selection.rows {
                keep[r] = false;
            }
            let removed = keep.iter().filter(|k| !**k).count();
            Ok((
                ds.retain_rows(&keep),
                RemovalReport {
                    mode,
                    rows: removed,
                    cells: 0,
                },
            ))
        }
        RemovalMode::Mask => {
            let names: Vec<String> = match curves {
                CurveScope::All => ds.curve_names().map(str::to_string).collect(),
                CurveScope::Named(names) => {
                    for n in names {
                        ds.curve(n)?;
                    }
                    names.clone()
                }
            };
            let mut out = ds.clone();
            let mut touched = vec![false; len];
            let mut cells = 0;
            for name in &names {
                let values = out.curve_mut(name)?.values_mut();
                for &r in &selection.rows {
                    if values[r].take().is_some() {
                        cells += 1;
                        touched[r] = true;
                    }
                }
            }
            Ok((
                out,
                RemovalReport {
                    mode,
                    rows: touched.iter().filter(|t| **t).count(),
                    cells,
                },
            ))
        }
    }
}
