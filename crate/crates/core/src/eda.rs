//! Chart payloads for exploratory analysis: histograms, cross-plots, box
//! plots, pair grids, correlation heatmaps and per-well bar counts.

use serde::Serialize;

use crate::dataset::{quantile_sorted, sorted_present, MultiWellTable, WellDataset};
use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 40;
pub const MAX_PAIR_CURVES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub excluded_missing: u64,
}

/// Bin of `v` under half-open bins with a closed last bin, or `None` when
/// `v` lies outside `[edges[0], edges[n]]`.
pub(crate) fn bin_index(edges: &[f64], v: f64) -> Option<usize> {
    let n = edges.len() - 1;
    if v < edges[0] || v > edges[n] {
        return None;
    }
    Some(edges[1..n].partition_point(|&e| e <= v))
}

pub(crate) fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::EdgeMismatch);
    }
    Ok(())
}

/// Uniform-width histogram over the range of the non-missing values.
pub fn histogram(values: &[Option<f64>], bin_count: usize) -> Result<Histogram> {
    if bin_count == 0 {
        return Err(Error::InvalidParameter("bin count must be at least 1".into()));
    }
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let excluded_missing = (values.len() - present.len()) as u64;
    let (min, max) = present
        .iter()
        .fold(None, |acc: Option<(f64, f64)>, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
        .ok_or(Error::AllMissing)?;

    let edges = if min == max {
        vec![min, min + 1.0]
    } else {
        let width = (max - min) / bin_count as f64;
        let mut e: Vec<f64> = (0..bin_count).map(|i| min + i as f64 * width).collect();
        e.push(max);
        e
    };
    let mut counts = vec![0u64; edges.len() - 1];
    for v in present {
        if let Some(b) = bin_index(&edges, v) {
            counts[b] += 1;
        }
    }
    Ok(Histogram {
        edges,
        counts,
        excluded_missing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub row: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterData {
    pub x_name: String,
    pub y_name: String,
    pub points: Vec<ScatterPoint>,
}

/// Pairwise-complete points of two curves, in depth order.
pub fn scatter_pairs(ds: &WellDataset, x: &str, y: &str) -> Result<ScatterData> {
    let xs = ds.curve(x)?.values();
    let ys = ds.curve(y)?.values();
    let points = xs
        .iter()
        .zip(ys)
        .enumerate()
        .filter_map(|(row, (x, y))| Some(ScatterPoint { row, x: (*x)?, y: (*y)? }))
        .collect();
    Ok(ScatterData {
        x_name: x.to_string(),
        y_name: y.to_string(),
        points,
    })
}

/// Pearson correlation over pairwise-complete rows, with the number of
/// rows used. `None` when fewer than two pairs remain or either side is constant.
pub fn pearson_with_count(x: &[Option<f64>], y: &[Option<f64>]) -> Result<(Option<f64>, usize)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .collect();
    let n = pairs.len();
    if n < 2 {
        return Ok((None, n));
    }
    let constant = |f: fn(&(f64, f64)) -> f64| pairs.iter().all(|p| f(p) == f(&pairs[0]));
    if constant(|p| p.0) || constant(|p| p.1) {
        return Ok((None, n));
    }
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(a, b) in &pairs {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let denom = (sxx * syy).sqrt();
    if denom == 0.0 {
        return Ok((None, n));
    }
    Ok((Some((sxy / denom).clamp(-1.0, 1.0)), n))
}

pub fn pearson(x: &[Option<f64>], y: &[Option<f64>]) -> Result<Option<f64>> {
    pearson_with_count(x, y).map(|(r, _)| r)
}

/// Symmetric pairwise-complete correlation matrix. Undefined cells are
/// `None` (serialized as `null`), never zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub r: Vec<Vec<Option<f64>>>,
    pub n_pairs: Vec<Vec<usize>>,
}

pub fn correlation_matrix<S: AsRef<str>>(ds: &WellDataset, names: &[S]) -> Result<CorrelationMatrix> {
    if names.len() < 2 {
        return Err(Error::MinimumTwo);
    }
    let columns = names
        .iter()
        .map(|n| ds.curve(n.as_ref()).map(|c| c.values()))
        .collect::<Result<Vec<_>>>()?;
    let k = columns.len();
    let mut r = vec![vec![None; k]; k];
    let mut n_pairs = vec![vec![0; k]; k];
    for i in 0..k {
        for j in i..k {
            let (rij, n) = pearson_with_count(columns[i], columns[j])?;
            r[i][j] = rij;
            r[j][i] = rij;
            n_pairs[i][j] = n;
            n_pairs[j][i] = n;
        }
    }
    Ok(CorrelationMatrix {
        names: names.iter().map(|n| n.as_ref().to_string()).collect(),
        r,
        n_pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outlier_indices: Vec<usize>,
}

/// Tukey fences `[q1 - k*IQR, q3 + k*IQR]` plus the quartiles.
pub(crate) fn tukey_fences(sorted: &[f64], k: f64) -> (f64, f64, f64, f64, f64) {
    let q1 = quantile_sorted(sorted, 0.25);
    let median = quantile_sorted(sorted, 0.5);
    let q3 = quantile_sorted(sorted, 0.75);
    let iqr = q3 - q1;
    (q1, median, q3, q1 - k * iqr, q3 + k * iqr)
}

/// Box-plot statistics with 1.5 IQR whiskers clamped to actual data points.
pub fn box_stats(values: &[Option<f64>]) -> Result<BoxStats> {
    let sorted = sorted_present(values);
    if sorted.is_empty() {
        return Err(Error::AllMissing);
    }
    let (q1, median, q3, lo_fence, hi_fence) = tukey_fences(&sorted, 1.5);
    let inside = || sorted.iter().copied().filter(|v| *v >= lo_fence && *v <= hi_fence);
    // the median is always inside the fences, so `inside` is never empty
    let whisker_lo = inside().fold(f64::INFINITY, f64::min);
    let whisker_hi = inside().fold(f64::NEG_INFINITY, f64::max);
    let outlier_indices = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.filter(|v| *v < whisker_lo || *v > whisker_hi).map(|_| i))
        .collect();
    Ok(BoxStats {
        q1,
        median,
        q3,
        whisker_lo,
        whisker_hi,
        outlier_indices,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PairCell {
    Histogram(Histogram),
    Scatter(ScatterData),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairGrid {
    pub names: Vec<String>,
    pub cells: Vec<Vec<PairCell>>,
}

/// Scatter-plot matrix: cell `(i, j)` plots `names[j]` against `names[i]`,
/// diagonal cells hold the histogram of `names[i]`.
pub fn pair_grid<S: AsRef<str>>(ds: &WellDataset, names: &[S], bin_count: usize) -> Result<PairGrid> {
    if names.len() < 2 {
        return Err(Error::MinimumTwo);
    }
    if names.len() > MAX_PAIR_CURVES {
        return Err(Error::TooManyCurves {
            max: MAX_PAIR_CURVES,
            got: names.len(),
        });
    }
    let names: Vec<&str> = names.iter().map(AsRef::as_ref).collect();
    for n in &names {
        ds.curve(n)?;
    }
    let cells = names
        .iter()
        .enumerate()
        .map(|(i, row)| {
            names
                .iter()
                .enumerate()
                .map(|(j, col)| {
                    if i == j {
                        histogram(ds.curve(row)?.values(), bin_count).map(PairCell::Histogram)
                    } else {
                        scatter_pairs(ds, col, row).map(PairCell::Scatter)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairGrid {
        names: names.iter().map(|s| s.to_string()).collect(),
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryCount {
    pub well: String,
    pub rows: usize,
}

/// Rows per well in insertion order, the canonical bar chart.
pub fn category_counts(table: &MultiWellTable) -> Vec<CategoryCount> {
    let mut out: Vec<CategoryCount> = Vec::new();
    for row in &table.rows {
        match out.iter_mut().find(|c| c.well == row.well) {
            Some(c) => c.rows += 1,
            None => out.push(CategoryCount {
                well: row.well.clone(),
                rows: 1,
            }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{concat_wells, CurveData};

    fn some(v: &[f64]) -> Vec<Option<f64>> {
        v.iter().copied().map(Some).collect()
    }

    fn ds(curves: &[(&str, Vec<Option<f64>>)]) -> WellDataset {
        let n = curves[0].1.len();
        let mut ds = WellDataset::new("W", (0..n).map(|i| i as f64).collect(), "M").unwrap();
        for (name, v) in curves {
            ds = ds.with_curve(*name, CurveData::new(v.clone(), "").unwrap()).unwrap();
        }
        ds
    }

    #[test]
    fn histogram_zero_to_nine() {
        let v = some(&[0., 1., 2., 3., 4., 5., 6., 7., 8., 9.]);
        let h = histogram(&v, 5).unwrap();
        let expected = [0.0, 1.8, 3.6, 5.4, 7.2, 9.0];
        for (e, x) in h.edges.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12);
        }
        assert_eq!(h.counts, [2, 2, 2, 2, 2]);
    }

    #[test]
    fn histogram_degenerate_and_missing() {
        let h = histogram(&some(&[7., 7., 7.]), 12).unwrap();
        assert_eq!(h.edges, [7.0, 8.0]);
        assert_eq!(h.counts, [3]);
        let mut v = some(&[0., 1., 2., 3., 4., 5., 6., 7., 8., 9.]);
        v[3] = None;
        v[4] = None;
        let h = histogram(&v, 5).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 8);
        assert_eq!(h.excluded_missing, 2);
        assert_eq!(histogram(&[None], 5), Err(Error::AllMissing));
    }

    #[test]
    fn scatter_examples() {
        let mut rhob = some(&[2.0, 2.1, 2.2, 2.3, 2.4, 2.5, 2.6, 2.7, 2.8, 2.9]);
        rhob[2] = None;
        rhob[7] = None;
        let d = ds(&[("DTC", some(&[1., 2., 3., 4., 5., 6., 7., 8., 9., 10.])), ("RHOB", rhob)]);
        assert_eq!(scatter_pairs(&d, "DTC", "RHOB").unwrap().points.len(), 8);
        let diag = scatter_pairs(&d, "DTC", "DTC").unwrap();
        assert!(diag.points.iter().all(|p| p.x == p.y));
        let d = ds(&[("A", vec![Some(1.0), None]), ("B", vec![None, Some(2.0)])]);
        assert!(scatter_pairs(&d, "A", "B").unwrap().points.is_empty());
        assert!(scatter_pairs(&d, "A", "Q").is_err());
    }

    #[test]
    fn pearson_examples() {
        assert_eq!(pearson(&some(&[1., 2., 3.]), &some(&[2., 4., 6.])).unwrap(), Some(1.0));
        assert_eq!(pearson(&some(&[1., 2., 3.]), &some(&[3., 2., 1.])).unwrap(), Some(-1.0));
        let r = pearson(&some(&[1., 2., 3., 4.]), &some(&[1., 3., 2., 4.])).unwrap().unwrap();
        assert!((r - 0.8).abs() < 1e-12);
        assert_eq!(pearson(&some(&[1., 1., 1.]), &some(&[1., 2., 3.])).unwrap(), None);
        assert_eq!(pearson(&some(&[1.]), &some(&[1.])).unwrap(), None);
        assert!(matches!(pearson(&some(&[1.]), &some(&[1., 2.])), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn correlation_flags_constant_curve() {
        let d = ds(&[
            ("A", some(&[1., 2., 3., 4.])),
            ("B", some(&[2., 4., 6., 8.])),
            ("C", some(&[5., 5., 5., 5.])),
        ]);
        let m = correlation_matrix(&d, &["A", "B", "C"]).unwrap();
        assert_eq!(m.r[0][1], Some(1.0));
        assert_eq!(m.r[0][0], Some(1.0));
        assert_eq!(m.r[2][0], None);
        assert_eq!(m.r[2][2], None);
        assert_eq!(m.n_pairs[0][2], 4);
    }

    #[test]
    fn box_examples() {
        let mut v = some(&[1., 2., 3., 4., 5., 6., 7., 8., 9.]);
        v.push(Some(100.0));
        let b = box_stats(&v).unwrap();
        assert_eq!((b.q1, b.median, b.q3, b.whisker_hi, b.whisker_lo), (3.25, 5.5, 7.75, 9.0, 1.0));
        assert_eq!(b.outlier_indices, [9]);
        let c = box_stats(&some(&[5., 5., 5., 5.])).unwrap();
        assert_eq!((c.q1, c.median, c.q3, c.whisker_lo, c.whisker_hi), (5., 5., 5., 5., 5.));
        assert!(c.outlier_indices.is_empty());
        // q1 = 1.5, q3 = 2.5, fences [0, 4]
        let s = box_stats(&some(&[1., 2., 3.])).unwrap();
        assert_eq!((s.q1, s.q3), (1.5, 2.5));
        assert!(s.outlier_indices.is_empty());
    }

    #[test]
    fn pair_grid_shape() {
        let d = ds(&[
            ("A", some(&[1., 2., 3.])),
            ("B", vec![Some(1.0), None, Some(2.0)]),
            ("C", some(&[3., 1., 2.])),
        ]);
        let g = pair_grid(&d, &["A", "B", "C"], 10).unwrap();
        let flat: Vec<&PairCell> = g.cells.iter().flatten().collect();
        assert_eq!(flat.len(), 9);
        assert_eq!(flat.iter().filter(|c| matches!(c, PairCell::Histogram(_))).count(), 3);
        match &g.cells[0][1] {
            PairCell::Scatter(s) => {
                assert_eq!(s.points.len(), scatter_pairs(&d, "B", "A").unwrap().points.len());
                assert_eq!((s.x_name.as_str(), s.y_name.as_str()), ("B", "A"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(pair_grid(&d, &["A"], 10), Err(Error::MinimumTwo));
        let nine = ["A"; 9];
        assert!(matches!(pair_grid(&d, &nine, 10), Err(Error::TooManyCurves { .. })));
    }

    #[test]
    fn bar_counts() {
        let mut a = ds(&[("GR", some(&[1., 2., 3.]))]);
        let mut b = ds(&[("GR", some(&[1., 2., 3., 4., 5.]))]);
        a.set_well("A");
        b.set_well("B");
        let t = concat_wells(&[a.clone(), b], &["GR"]).unwrap();
        let c = category_counts(&t);
        assert_eq!(
            c,
            [
                CategoryCount { well: "A".into(), rows: 3 },
                CategoryCount { well: "B".into(), rows: 5 }
            ]
        );
        let one = concat_wells(&[a], &["GR"]).unwrap();
        assert_eq!(category_counts(&one).len(), 1);
        assert!(category_counts(&MultiWellTable { curves: vec![], rows: vec![] }).is_empty());
    }
}
