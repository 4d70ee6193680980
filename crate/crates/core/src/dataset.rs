//! Depth-indexed well-log tables.
//!
//! A [`WellDataset`] is the value every other module consumes: a strictly
//! increasing depth vector plus an ordered set of curves whose cells are
//! either a finite number or missing. Every editing operation returns a
//! fresh dataset and leaves its input untouched, so callers can keep the
//! previous value around as an undo step.

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};

/// One log curve: values aligned with the dataset depth vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveData {
    values: Vec<Option<f64>>,
    pub unit: String,
    pub description: String,
}

impl CurveData {
    pub fn new(values: Vec<Option<f64>>, unit: impl Into<String>) -> Result<Self> {
        if let Some(v) = values.iter().flatten().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!("non-finite curve value {v}")));
        }
        Ok(CurveData {
            values,
            unit: unit.into(),
            description: String::new(),
        })
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn present_count(&self) -> usize {
        self.values.len() - self.missing_count()
    }

    pub(crate) fn values_mut(&mut self) -> &mut Vec<Option<f64>> {
        &mut self.values
    }
}

/// A single well: depth index plus named curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WellDataset {
    well: String,
    depth_name: String,
    depth_unit: String,
    depth: Vec<f64>,
    curves: IndexMap<String, CurveData>,
}

/// True when `name` can be used as a LAS curve mnemonic.
pub fn is_valid_mnemonic(name: &str) -> bool {
    !name.is_empty() && !name.contains('.') && !name.contains(':') && !name.chars().any(char::is_whitespace)
}

impl WellDataset {
    /// Creates a dataset with no curves. Depth must be finite and strictly increasing.
    pub fn new(well: impl Into<String>, depth: Vec<f64>, depth_unit: impl Into<String>) -> Result<Self> {
        if let Some(d) = depth.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidDataset(format!("non-finite depth {d}")));
        }
        for (i, w) in depth.windows(2).enumerate() {
            if w[1] == w[0] {
                return Err(Error::DuplicateDepth { row: i + 1, depth: w[1] });
            }
            if w[1] < w[0] {
                return Err(Error::NonMonotoneDepth { row: i + 1 });
            }
        }
        Ok(WellDataset {
            well: well.into(),
            depth_name: "DEPT".to_string(),
            depth_unit: depth_unit.into(),
            depth,
            curves: IndexMap::new(),
        })
    }

    pub fn with_depth_name(mut self, name: impl Into<String>) -> Self {
        self.depth_name = name.into();
        self
    }

    /// Appends a curve. Fails on a length mismatch or a name already in use.
    pub fn with_curve(mut self, name: impl Into<String>, curve: CurveData) -> Result<Self> {
        self.insert_curve(name.into(), curve)?;
        Ok(self)
    }

    /// Adds or replaces a curve in place, keeping its position when replacing.
    pub fn set_curve(&mut self, name: impl Into<String>, curve: CurveData) -> Result<()> {
        let name = name.into();
        if !is_valid_mnemonic(&name) {
            return Err(Error::InvalidMnemonic(name));
        }
        if curve.len() != self.depth.len() {
            return Err(Error::LengthMismatch {
                left: curve.len(),
                right: self.depth.len(),
            });
        }
        self.curves.insert(name, curve);
        Ok(())
    }

    fn insert_curve(&mut self, name: String, curve: CurveData) -> Result<()> {
        if self.curves.contains_key(&name) || name == self.depth_name {
            return Err(Error::NameCollision(name));
        }
        self.set_curve(name, curve)
    }

    pub fn well(&self) -> &str {
        &self.well
    }

    pub fn set_well(&mut self, well: impl Into<String>) {
        self.well = well.into();
    }

    pub fn depth_name(&self) -> &str {
        &self.depth_name
    }

    pub fn depth_unit(&self) -> &str {
        &self.depth_unit
    }

    pub fn depth(&self) -> &[f64] {
        &self.depth
    }

    pub fn row_count(&self) -> usize {
        self.depth.len()
    }

    pub fn curve_names(&self) -> impl Iterator<Item = &str> {
        self.curves.keys().map(String::as_str)
    }

    pub fn curves(&self) -> impl Iterator<Item = (&str, &CurveData)> {
        self.curves.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn curve(&self, name: &str) -> Result<&CurveData> {
        self.curves
            .get(name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    pub fn has_curve(&self, name: &str) -> bool {
        self.curves.contains_key(name)
    }

    pub(crate) fn curve_mut(&mut self, name: &str) -> Result<&mut CurveData> {
        self.curves
            .get_mut(name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    /// Keeps only the rows whose flag in `keep` is set.
    pub(crate) fn retain_rows(&self, keep: &[bool]) -> WellDataset {
        let pick = |v: &[Option<f64>]| -> Vec<Option<f64>> {
            v.iter().zip(keep).filter(|(_, k)| **k).map(|(x, _)| *x).collect()
        };
        WellDataset {
            well: self.well.clone(),
            depth_name: self.depth_name.clone(),
            depth_unit: self.depth_unit.clone(),
            depth: self.depth.iter().zip(keep).filter(|(_, k)| **k).map(|(d, _)| *d).collect(),
            curves: self
                .curves
                .iter()
                .map(|(name, c)| {
                    (
                        name.clone(),
                        CurveData {
                            values: pick(&c.values),
                            unit: c.unit.clone(),
                            description: c.description.clone(),
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Renames a curve, keeping its position.
pub fn rename_curve(ds: &WellDataset, old: &str, new: &str) -> Result<WellDataset> {
    ds.curve(old)?;
    if old == new {
        return Ok(ds.clone());
    }
    if !is_valid_mnemonic(new) {
        return Err(Error::InvalidMnemonic(new.to_string()));
    }
    if ds.has_curve(new) || new == ds.depth_name {
        return Err(Error::NameCollision(new.to_string()));
    }
    let mut out = ds.clone();
    let idx = out.curves.get_index_of(old).expect("checked above");
    let (_, data) = out.curves.shift_remove_index(idx).expect("index valid");
    out.curves.shift_insert(idx, new.to_string(), data);
    Ok(out)
}

/// Masks every value of `curve` outside the inclusive range `[lo, hi]`.
///
/// Returns the new dataset and the number of cells that became missing.
pub fn apply_limits(ds: &WellDataset, curve: &str, lo: f64, hi: f64) -> Result<(WellDataset, usize)> {
    ds.curve(curve)?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    let mut out = ds.clone();
    let mut masked = 0;
    for cell in out.curve_mut(curve)?.values_mut() {
        if let Some(v) = *cell {
            if v < lo || v > hi {
                *cell = None;
                masked += 1;
            }
        }
    }
    Ok((out, masked))
}

/// Keeps depth plus the named curves, in the requested order.
pub fn select_curves<S: AsRef<str>>(ds: &WellDataset, names: &[S]) -> Result<WellDataset> {
    let mut curves = IndexMap::with_capacity(names.len());
    for name in names {
        let name = name.as_ref();
        let data = ds.curve(name)?;
        curves.insert(name.to_string(), data.clone());
    }
    Ok(WellDataset {
        well: ds.well.clone(),
        depth_name: ds.depth_name.clone(),
        depth_unit: ds.depth_unit.clone(),
        depth: ds.depth.clone(),
        curves,
    })
}

/// Descriptive statistics of one curve's non-missing values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatSummary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; absent for a single value.
    pub std: Option<f64>,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub max: f64,
}

/// Quantile of an ascending slice by linear interpolation at position `(n - 1) * q`.
///
/// Panics on an empty slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 >= sorted.len() || frac == 0.0 {
        return sorted[lo.min(sorted.len() - 1)];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Non-missing values in ascending order.
pub(crate) fn sorted_present(values: &[Option<f64>]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().flatten().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample (n - 1) standard deviation; `None` below two values.
pub(crate) fn sample_std(values: &[f64], mean: f64) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Summary of a masked vector.
pub fn summarize(values: &[Option<f64>]) -> Result<StatSummary> {
    let sorted = sorted_present(values);
    if sorted.is_empty() {
        return Err(Error::AllMissing);
    }
    let m = mean(&sorted);
    Ok(StatSummary {
        count: sorted.len(),
        mean: m,
        std: sample_std(&sorted, m),
        min: sorted[0],
        p25: quantile_sorted(&sorted, 0.25),
        p50: quantile_sorted(&sorted, 0.5),
        p75: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

pub fn summary_stats(ds: &WellDataset, curve: &str) -> Result<StatSummary> {
    summarize(ds.curve(curve)?.values())
}

/// One long-format sample: a (well, depth) row with the requested curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub well: String,
    /// Row position inside the source well.
    pub row_index: usize,
    pub depth: f64,
    pub values: Vec<Option<f64>>,
}

/// Pooled samples from several wells, columns `WELL, DEPT, curves...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiWellTable {
    pub curves: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl MultiWellTable {
    /// Column headers in output order.
    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["WELL".to_string(), "DEPT".to_string()];
        cols.extend(self.curves.iter().cloned());
        cols
    }

    /// Distinct well names in first-appearance order.
    pub fn wells(&self) -> Vec<String> {
        let mut seen: IndexMap<&str, ()> = IndexMap::new();
        for r in &self.rows {
            seen.insert(&r.well, ());
        }
        seen.keys().map(|s| s.to_string()).collect()
    }

    /// Values of a column by name. `DEPT` yields the depth of every row.
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        if name == "DEPT" {
            return Ok(self.rows.iter().map(|r| Some(r.depth)).collect());
        }
        let idx = self
            .curves
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r.values[idx]).collect())
    }
}

/// Every curve name across the datasets, in first-appearance order.
pub fn union_curve_names(datasets: &[WellDataset]) -> Vec<String> {
    let mut seen: IndexMap<String, ()> = IndexMap::new();
    for ds in datasets {
        for name in ds.curve_names() {
            seen.insert(name.to_string(), ());
        }
    }
    seen.into_keys().collect()
}

/// Stacks wells into one long table. Curves missing from a well become
/// missing cells; duplicate well names are tagged `NAME_2`, `NAME_3`, ...
pub fn concat_wells<S: AsRef<str>>(datasets: &[WellDataset], curves: &[S]) -> Result<MultiWellTable> {
    if datasets.is_empty() {
        return Err(Error::InvalidParameter("at least one dataset is required".into()));
    }
    if curves.is_empty() {
        return Err(Error::InvalidParameter("curve list is empty".into()));
    }
    for c in curves {
        let c = c.as_ref();
        if !datasets.iter().any(|ds| ds.has_curve(c)) {
            return Err(Error::UnknownCurve(c.to_string()));
        }
    }
    let mut used: IndexMap<String, usize> = IndexMap::new();
    let mut rows = Vec::with_capacity(datasets.iter().map(WellDataset::row_count).sum());
    for ds in datasets {
        let name = unique_well_name(&mut used, ds.well());
        let columns: Vec<Option<&CurveData>> = curves.iter().map(|c| ds.curves.get(c.as_ref())).collect();
        for (i, &d) in ds.depth.iter().enumerate() {
            rows.push(TableRow {
                well: name.clone(),
                row_index: i,
                depth: d,
                values: columns.iter().map(|c| c.and_then(|c| c.values[i])).collect(),
            });
        }
    }
    Ok(MultiWellTable {
        curves: curves.iter().map(|c| c.as_ref().to_string()).collect(),
        rows,
    })
}

fn unique_well_name(used: &mut IndexMap<String, usize>, base: &str) -> String {
    if !used.contains_key(base) {
        used.insert(base.to_string(), 1);
        return base.to_string();
    }
    let mut n = used[base];
    loop {
        n += 1;
        let candidate = format!("{base}_{n}");
        if !used.contains_key(&candidate) {
            used.insert(base.to_string(), n);
            used.insert(candidate.clone(), 1);
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> WellDataset {
        WellDataset::new("W1", vec![100.0, 100.5, 101.0], "M")
            .unwrap()
            .with_curve("GR", CurveData::new(vec![Some(10.0), Some(500.0), Some(-5.0)], "GAPI").unwrap())
            .unwrap()
            .with_curve("RHOB", CurveData::new(vec![Some(2.3), None, Some(2.5)], "G/C3").unwrap())
            .unwrap()
            .with_curve("DTC", CurveData::new(vec![Some(80.0), Some(81.0), Some(82.0)], "US/F").unwrap())
            .unwrap()
    }

    fn names(ds: &WellDataset) -> Vec<&str> {
        ds.curve_names().collect()
    }

    #[test]
    fn rename_keeps_position() {
        let ds = sample();
        let out = rename_curve(&ds, "GR", "GR_RAW").unwrap();
        assert_eq!(names(&out), ["GR_RAW", "RHOB", "DTC"]);
        assert_eq!(out.curve("GR_RAW").unwrap(), ds.curve("GR").unwrap());
        assert_eq!(rename_curve(&out, "GR_RAW", "GR").unwrap(), ds);
    }

    #[test]
    fn rename_self_and_collision() {
        let ds = sample();
        assert_eq!(rename_curve(&ds, "GR", "GR").unwrap(), ds);
        assert_eq!(rename_curve(&ds, "GR", "RHOB"), Err(Error::NameCollision("RHOB".into())));
        assert_eq!(rename_curve(&ds, "NOPE", "X"), Err(Error::UnknownCurve("NOPE".into())));
        assert!(matches!(rename_curve(&ds, "GR", "G R"), Err(Error::InvalidMnemonic(_))));
    }

    #[test]
    fn limits_mask_out_of_range() {
        let ds = sample();
        let (out, n) = apply_limits(&ds, "GR", 0.0, 300.0).unwrap();
        assert_eq!(n, 2);
        assert_eq!(out.curve("GR").unwrap().values(), &[Some(10.0), None, None]);
        // input untouched
        assert_eq!(ds.curve("GR").unwrap().missing_count(), 0);
        let (again, n2) = apply_limits(&out, "GR", 0.0, 300.0).unwrap();
        assert_eq!(n2, 0);
        assert_eq!(again, out);
    }

    #[test]
    fn limits_noop_and_vacuous() {
        let ds = sample();
        let (_, n) = apply_limits(&ds, "GR", -5.0, 500.0).unwrap();
        assert_eq!(n, 0);
        let empty = WellDataset::new("W", vec![1.0, 2.0], "M")
            .unwrap()
            .with_curve("GR", CurveData::new(vec![None, None], "").unwrap())
            .unwrap();
        assert_eq!(apply_limits(&empty, "GR", 0.0, 1.0).unwrap().1, 0);
        assert!(matches!(apply_limits(&ds, "GR", 2.0, 1.0), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn select_order_follows_request() {
        let ds = sample();
        assert_eq!(names(&select_curves(&ds, &["GR"]).unwrap()), ["GR"]);
        assert_eq!(select_curves(&ds, &["GR", "RHOB", "DTC"]).unwrap(), ds);
        assert_eq!(names(&select_curves(&ds, &["RHOB", "GR"]).unwrap()), ["RHOB", "GR"]);
        assert!(select_curves(&ds, &["XX"]).is_err());
    }

    #[test]
    fn summary_examples() {
        let s = summarize(&[Some(1.0), Some(2.0), Some(3.0), Some(4.0)]).unwrap();
        assert_eq!((s.mean, s.p50, s.min, s.max, s.p25, s.p75), (2.5, 2.5, 1.0, 4.0, 1.75, 3.25));
        let one = summarize(&[Some(5.0)]).unwrap();
        assert_eq!(one.count, 1);
        assert_eq!(one.std, None);
        assert_eq!((one.p25, one.p50, one.p75), (5.0, 5.0, 5.0));
        let m = summarize(&[Some(1.0), Some(2.0), Some(3.0), None]).unwrap();
        assert_eq!((m.count, m.mean), (3, 2.0));
        assert_eq!(summarize(&[None, None]), Err(Error::AllMissing));
    }

    #[test]
    fn concat_tags_duplicate_wells() {
        let a = sample();
        let b = sample();
        let t = concat_wells(&[a, b], &["GR"]).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.wells(), ["W1", "W1_2"]);
    }

    #[test]
    fn concat_absent_curve_is_missing() {
        let a = sample();
        let b = select_curves(&sample(), &["GR"]).unwrap();
        let t = concat_wells(&[a, b], &["GR", "RHOB"]).unwrap();
        assert!(t.rows[3..].iter().all(|r| r.values[1].is_none()));
        assert_eq!(concat_wells(&[sample()], &["ZZ"]), Err(Error::UnknownCurve("ZZ".into())));
    }

    #[test]
    fn depth_must_increase() {
        assert!(matches!(WellDataset::new("W", vec![1.0, 1.0], ""), Err(Error::DuplicateDepth { .. })));
        assert!(matches!(WellDataset::new("W", vec![2.0, 1.0], ""), Err(Error::NonMonotoneDepth { .. })));
    }
}
