//! Missing-log regression and fracture-zone classification.
//!
//! Features are standardized with statistics taken from the complete-case
//! training rows; a fitted model keeps those statistics so that new wells are
//! scaled exactly the same way before prediction. Two families are offered:
//! k-nearest neighbours (regression and 0/1 classification) and ordinary
//! least squares solved through the normal equations.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::dataset::{mean, sample_std, CurveData, MultiWellTable, WellDataset};
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 5;
/// Diagonal loading applied when the plain Gram matrix is not positive definite.
pub const RIDGE_EPSILON: f64 = 1e-8;
pub const PRED_SUFFIX: &str = "_PRED";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RowKey {
    pub well: String,
    pub row_index: usize,
}

/// Standardized complete-case feature rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub row_keys: Vec<RowKey>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn subset(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            row_keys: idx.iter().map(|&i| self.row_keys[i].clone()).collect(),
            means: self.means.clone(),
            stds: self.stds.clone(),
        }
    }
}

fn standardize(raw: &[f64], means: &[f64], stds: &[f64]) -> Vec<f64> {
    raw.iter()
        .zip(means.iter().zip(stds))
        .map(|(x, (m, s))| (x - m) / s)
        .collect()
}

/// Complete-case raw rows of `features` plus `target` from a pooled table.
fn complete_rows<S: AsRef<str>>(
    table: &MultiWellTable,
    features: &[S],
    target: &str,
) -> Result<(Vec<Vec<f64>>, Vec<f64>, Vec<RowKey>)> {
    if features.is_empty() {
        return Err(Error::InvalidParameter("feature list is empty".into()));
    }
    if let Some(f) = features.iter().find(|f| f.as_ref() == target) {
        return Err(Error::InvalidParameter(format!("target {:?} is also a feature", f.as_ref())));
    }
    let columns = features
        .iter()
        .map(|f| table.column(f.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let target_col = table.column(target)?;
    let mut raw = Vec::new();
    let mut y = Vec::new();
    let mut keys = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        let Some(t) = target_col[i] else { continue };
        let Some(values) = columns.iter().map(|c| c[i]).collect::<Option<Vec<f64>>>() else {
            continue;
        };
        raw.push(values);
        y.push(t);
        keys.push(RowKey {
            well: row.well.clone(),
            row_index: row.row_index,
        });
    }
    Ok((raw, y, keys))
}

/// Keeps rows where every feature and the target are present, then
/// standardizes each feature to zero mean and unit sample std.
pub fn build_matrix<S: AsRef<str>>(
    table: &MultiWellTable,
    features: &[S],
    target: &str,
) -> Result<(FeatureMatrix, Vec<f64>)> {
    let (raw, y, row_keys) = complete_rows(table, features, target)?;
    if raw.is_empty() {
        return Err(Error::NoCompleteRows);
    }
    let p = features.len();
    let mut means = Vec::with_capacity(p);
    let mut stds = Vec::with_capacity(p);
    for (j, name) in features.iter().enumerate() {
        let col: Vec<f64> = raw.iter().map(|r| r[j]).collect();
        if col.iter().all(|v| *v == col[0]) {
            return Err(Error::ConstantFeature(name.as_ref().to_string()));
        }
        let m = mean(&col);
        means.push(m);
        stds.push(sample_std(&col, m).expect("non-constant column has two or more rows"));
    }
    let rows = raw.iter().map(|r| standardize(r, &means, &stds)).collect();
    Ok((
        FeatureMatrix {
            feature_names: features.iter().map(|f| f.as_ref().to_string()).collect(),
            rows,
            row_keys,
            means,
            stds,
        },
        y,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    KnnRegress,
    LinearRegress,
    KnnClassify,
}

impl ModelKind {
    pub fn is_knn(self) -> bool {
        matches!(self, ModelKind::KnnRegress | ModelKind::KnnClassify)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knn_regress" | "knn" => Ok(ModelKind::KnnRegress),
            "linear_regress" | "linear" => Ok(ModelKind::LinearRegress),
            "knn_classify" => Ok(ModelKind::KnnClassify),
            other => Err(Error::InvalidParameter(format!("unknown model kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Hyperparams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

/// A fitted model. k-NN variants store their training rows (standardized)
/// and targets; the linear model stores one coefficient per feature
/// followed by the intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub hyperparams: Hyperparams,
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub training_rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub training_targets: Vec<f64>,
}

impl TrainedModel {
    pub fn validate(&self) -> Result<()> {
        let p = self.feature_names.len();
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if p == 0 {
            return bad("model has no features".into());
        }
        if self.means.len() != p || self.stds.len() != p {
            return bad("standardization stats do not match the feature list".into());
        }
        if self.stds.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return bad("standardization std must be positive".into());
        }
        match self.kind {
            ModelKind::LinearRegress => {
                if self.coefficients.len() != p + 1 {
                    return bad(format!("linear model needs {} coefficients", p + 1));
                }
            }
            ModelKind::KnnRegress | ModelKind::KnnClassify => {
                let k = self.k();
                if k == 0 || self.training_rows.len() < k {
                    return bad(format!("k-NN model needs at least k = {k} training rows"));
                }
                if self.training_rows.len() != self.training_targets.len()
                    || self.training_rows.iter().any(|r| r.len() != p)
                {
                    return bad("k-NN training rows are inconsistent".into());
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.hyperparams.k.unwrap_or(DEFAULT_K)
    }

    pub fn prediction_name(&self) -> String {
        format!("{}{PRED_SUFFIX}", self.target_name)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: TrainedModel =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("model JSON: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    /// Builds an evaluation matrix from a table using this model's
    /// standardization statistics rather than refitting them.
    pub fn prepare(&self, table: &MultiWellTable) -> Result<(FeatureMatrix, Vec<f64>)> {
        let (raw, y, row_keys) = complete_rows(table, &self.feature_names, &self.target_name)?;
        Ok((
            FeatureMatrix {
                feature_names: self.feature_names.clone(),
                rows: raw.iter().map(|r| standardize(r, &self.means, &self.stds)).collect(),
                row_keys,
                means: self.means.clone(),
                stds: self.stds.clone(),
            },
            y,
        ))
    }

    /// Predictions for already-standardized rows.
    pub fn predict_rows(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        match self.kind {
            ModelKind::LinearRegress => {
                let (weights, intercept) = self.coefficients.split_at(self.coefficients.len() - 1);
                rows.iter()
                    .map(|r| r.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() + intercept[0])
                    .collect()
            }
            ModelKind::KnnRegress => rows.iter().map(|r| self.knn_mean(r)).collect(),
            ModelKind::KnnClassify => rows
                .iter()
                .map(|r| if self.knn_mean(r) >= 0.5 { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    /// Uniform mean of the k nearest training targets; equal distances go to
    /// the lower training-row index.
    fn knn_mean(&self, query: &[f64]) -> f64 {
        let k = self.k();
        let mut dist: Vec<(f64, usize)> = self
            .training_rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let d: f64 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
                (d, i)
            })
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, cmp);
        }
        dist[..k].iter().map(|&(_, i)| self.training_targets[i]).sum::<f64>() / k as f64
    }
}

/// Fits a model on standardized rows.
pub fn train(matrix: &FeatureMatrix, target: &[f64], spec: ModelSpec) -> Result<TrainedModel> {
    if matrix.rows.len() != target.len() {
        return Err(Error::LengthMismatch {
            left: matrix.rows.len(),
            right: target.len(),
        });
    }
    let n = matrix.rows.len();
    let p = matrix.feature_names.len();
    let mut model = TrainedModel {
        kind: spec.kind,
        hyperparams: Hyperparams::default(),
        feature_names: matrix.feature_names.clone(),
        target_name: String::new(),
        means: matrix.means.clone(),
        stds: matrix.stds.clone(),
        coefficients: Vec::new(),
        training_rows: Vec::new(),
        training_targets: Vec::new(),
    };
    match spec.kind {
        ModelKind::KnnRegress | ModelKind::KnnClassify => {
            let k = spec.k.unwrap_or(DEFAULT_K);
            if k == 0 {
                return Err(Error::InvalidParameter("k must be at least 1".into()));
            }
            if n < k {
                return Err(Error::TooFewRows { needed: k, found: n });
            }
            if spec.kind == ModelKind::KnnClassify {
                if let Some(&bad) = target.iter().find(|t| **t != 0.0 && **t != 1.0) {
                    return Err(Error::NonBinaryTarget(bad));
                }
            }
            model.hyperparams.k = Some(k);
            model.training_rows = matrix.rows.clone();
            model.training_targets = target.to_vec();
        }
        ModelKind::LinearRegress => {
            if n < p + 1 {
                return Err(Error::TooFewRows { needed: p + 1, found: n });
            }
            model.coefficients = least_squares(&matrix.rows, target)?;
        }
    }
    Ok(model)
}

/// Attaches the target name, which `train` cannot see from the matrix.
pub fn train_named(matrix: &FeatureMatrix, target: &[f64], target_name: &str, spec: ModelSpec) -> Result<TrainedModel> {
    let mut model = train(matrix, target, spec)?;
    model.target_name = target_name.to_string();
    Ok(model)
}

/// Solves `min |X b - y|` with an intercept column appended to `X`, via the
/// normal equations and a Cholesky factorization. If the Gram matrix is not
/// numerically positive definite, `RIDGE_EPSILON` is added to its diagonal
/// and the factorization retried.
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let p = rows[0].len() + 1;
    let mut gram = vec![vec![0.0; p]; p];
    let mut rhs = vec![0.0; p];
    let mut x = vec![0.0; p];
    for (row, &t) in rows.iter().zip(y) {
        x[..p - 1].copy_from_slice(row);
        x[p - 1] = 1.0;
        for i in 0..p {
            rhs[i] += x[i] * t;
            for j in 0..=i {
                gram[i][j] += x[i] * x[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            gram[j][i] = gram[i][j];
        }
    }
    if let Some(l) = cholesky(&gram) {
        return Ok(cholesky_solve(&l, &rhs));
    }
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] += RIDGE_EPSILON;
    }
    cholesky(&gram)
        .map(|l| cholesky_solve(&l, &rhs))
        .ok_or(Error::SingularSystem)
}

/// Lower-triangular factor, or `None` when a pivot is not clearly positive.
fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    let tol = scale * 1e-12;
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > tol) {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut z = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * z[k]).sum();
        z[i] = (b[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (z[i] - s) / l[i][i];
    }
    x
}

/// Raw values of a feature in `ds`; the depth index is addressable by name too.
fn feature_column<'a>(ds: &'a WellDataset, name: &str) -> Result<std::borrow::Cow<'a, [Option<f64>]>> {
    if let Ok(c) = ds.curve(name) {
        return Ok(std::borrow::Cow::Borrowed(c.values()));
    }
    if name == ds.depth_name() || name == "DEPT" {
        return Ok(std::borrow::Cow::Owned(ds.depth().iter().copied().map(Some).collect()));
    }
    Err(Error::MissingFeatureCurve(name.to_string()))
}

/// Adds (or overwrites) `<TARGET>_PRED`. Rows with any missing feature get
/// a missing prediction.
pub fn predict(model: &TrainedModel, ds: &WellDataset) -> Result<WellDataset> {
    model.validate()?;
    let columns = model
        .feature_names
        .iter()
        .map(|f| feature_column(ds, f))
        .collect::<Result<Vec<_>>>()?;
    let mut complete_idx = Vec::new();
    let mut rows = Vec::new();
    for i in 0..ds.row_count() {
        if let Some(raw) = columns.iter().map(|c| c[i]).collect::<Option<Vec<f64>>>() {
            complete_idx.push(i);
            rows.push(standardize(&raw, &model.means, &model.stds));
        }
    }
    let preds = model.predict_rows(&rows);
    let mut values = vec![None; ds.row_count()];
    for (i, p) in complete_idx.into_iter().zip(preds) {
        values[i] = p.is_finite().then_some(p);
    }
    let unit = ds
        .curve(&model.target_name)
        .map(|c| c.unit.clone())
        .unwrap_or_default();
    let description = match model.kind {
        ModelKind::KnnClassify => "PREDICTED ZONE (0/1)".to_string(),
        _ => format!("PREDICTED {}", model.target_name),
    };
    let mut out = ds.clone();
    out.set_curve(
        model.prediction_name(),
        CurveData::new(values, unit)?.with_description(description),
    )?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Metrics {
    Regression {
        n: usize,
        rmse: f64,
        mae: f64,
        /// `None` when the targets have zero variance.
        r2: Option<f64>,
    },
    Classification {
        n: usize,
        accuracy: f64,
        precision: f64,
        recall: f64,
        f1: f64,
        true_positive: usize,
        false_positive: usize,
        true_negative: usize,
        false_negative: usize,
    },
}

/// Regression metrics of predictions against actual values.
pub fn regression_metrics(pred: &[f64], actual: &[f64]) -> Result<Metrics> {
    let n = actual.len();
    if n == 0 {
        return Err(Error::EmptyEvaluation);
    }
    let sse: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a) * (p - a)).sum();
    let sae: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a).abs()).sum();
    let m = mean(actual);
    let sst: f64 = actual.iter().map(|a| (a - m) * (a - m)).sum();
    let constant = actual.iter().all(|a| *a == actual[0]);
    Ok(Metrics::Regression {
        n,
        rmse: (sse / n as f64).sqrt(),
        mae: sae / n as f64,
        r2: (!constant && sst > 0.0).then(|| 1.0 - sse / sst),
    })
}

/// Confusion-matrix metrics for 0/1 labels. Precision, recall and F1 are 0
/// when their denominator is empty.
pub fn classification_metrics(pred: &[f64], actual: &[f64]) -> Result<Metrics> {
    let n = actual.len();
    if n == 0 {
        return Err(Error::EmptyEvaluation);
    }
    let (mut tp, mut fp, mut tn, mut fneg) = (0, 0, 0, 0);
    for (&p, &a) in pred.iter().zip(actual) {
        match (p >= 0.5, a >= 0.5) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fneg += 1,
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fneg);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Metrics::Classification {
        n,
        accuracy: ratio(tp + tn, n),
        precision,
        recall,
        f1,
        true_positive: tp,
        false_positive: fp,
        true_negative: tn,
        false_negative: fneg,
    })
}

/// Scores a model on a matrix standardized with the model's own statistics.
pub fn evaluate(model: &TrainedModel, matrix: &FeatureMatrix, target: &[f64]) -> Result<Metrics> {
    if matrix.rows.is_empty() || target.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    if matrix.rows.len() != target.len() {
        return Err(Error::LengthMismatch {
            left: matrix.rows.len(),
            right: target.len(),
        });
    }
    if matrix.means != model.means || matrix.stds != model.stds {
        return Err(Error::InvalidParameter(
            "matrix was not standardized with the model's statistics".into(),
        ));
    }
    let pred = model.predict_rows(&matrix.rows);
    match model.kind {
        ModelKind::KnnClassify => classification_metrics(&pred, target),
        _ => regression_metrics(&pred, target),
    }
}

pub type Split = (FeatureMatrix, Vec<f64>);

/// Per-well contiguous split: the first `ceil(fraction * n_well)` rows of each
/// well (in depth order) train, the rest test. Rows are never shuffled.
pub fn depth_block_split(matrix: &FeatureMatrix, target: &[f64], train_fraction: f64) -> Result<(Split, Split)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let n = matrix.rows.len();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, found: n });
    }
    let mut by_well: IndexMap<&str, Vec<usize>> = IndexMap::new();
    for (i, key) in matrix.row_keys.iter().enumerate() {
        by_well.entry(key.well.as_str()).or_default().push(i);
    }
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for idx in by_well.values_mut() {
        idx.sort_by_key(|&i| matrix.row_keys[i].row_index);
        // guard against products like 0.7 * 10 = 7.000000000000001
        let n_train = ((train_fraction * idx.len() as f64) - 1e-9).ceil() as usize;
        let n_train = n_train.min(idx.len());
        train_idx.extend_from_slice(&idx[..n_train]);
        test_idx.extend_from_slice(&idx[n_train..]);
    }
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(Error::TooFewRows { needed: 2, found: n });
    }
    let pick = |idx: &[usize]| -> Split { (matrix.subset(idx), idx.iter().map(|&i| target[i]).collect()) };
    Ok((pick(&train_idx), pick(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{concat_wells, TableRow};

    fn table(curves: &[&str], rows: Vec<Vec<Option<f64>>>) -> MultiWellTable {
        MultiWellTable {
            curves: curves.iter().map(|s| s.to_string()).collect(),
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, values)| TableRow {
                    well: "W".into(),
                    row_index: i,
                    depth: i as f64,
                    values,
                })
                .collect(),
        }
    }

    fn xy_table(pairs: &[(f64, f64)]) -> MultiWellTable {
        table(&["X", "Y"], pairs.iter().map(|&(x, y)| vec![Some(x), Some(y)]).collect())
    }

    #[test]
    fn build_matrix_complete_case_and_scaling() {
        let rows = (0..10)
            .map(|i| {
                let dts = if i == 3 || i == 7 { None } else { Some(100.0 + i as f64) };
                vec![Some(i as f64 * 2.5), Some((i * i) as f64), dts]
            })
            .collect();
        let t = table(&["GR", "RHOB", "DTS"], rows);
        let (m, y) = build_matrix(&t, &["GR", "RHOB"], "DTS").unwrap();
        assert_eq!(m.len(), 8);
        assert_eq!(y.len(), 8);
        for j in 0..2 {
            let col: Vec<f64> = m.rows.iter().map(|r| r[j]).collect();
            let mu = col.iter().sum::<f64>() / 8.0;
            let sd = (col.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / 7.0).sqrt();
            assert!(mu.abs() < 1e-12);
            assert!((sd - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn build_matrix_errors() {
        let t = table(&["A", "B"], (0..4).map(|i| vec![Some(5.0), Some(i as f64)]).collect());
        assert_eq!(build_matrix(&t, &["A"], "B").unwrap_err(), Error::ConstantFeature("A".into()));
        assert_eq!(build_matrix(&t, &["Q"], "B").unwrap_err(), Error::UnknownColumn("Q".into()));
        let empty = table(&["A", "B"], vec![vec![None, Some(1.0)]]);
        assert_eq!(build_matrix(&empty, &["A"], "B").unwrap_err(), Error::NoCompleteRows);
    }

    #[test]
    fn linear_exact_fit() {
        let pairs: Vec<(f64, f64)> = (0..20).map(|i| (i as f64 * 0.37, 2.0 * i as f64 * 0.37 + 1.0)).collect();
        let (m, y) = build_matrix(&xy_table(&pairs), &["X"], "Y").unwrap();
        let model = train_named(&m, &y, "Y", ModelSpec { kind: ModelKind::LinearRegress, k: None }).unwrap();
        assert_eq!(model.coefficients.len(), 2);
        let mean_y = y.iter().sum::<f64>() / y.len() as f64;
        assert!((model.coefficients[1] - mean_y).abs() < 1e-9);
        match evaluate(&model, &m, &y).unwrap() {
            Metrics::Regression { r2, rmse, .. } => {
                assert!((r2.unwrap() - 1.0).abs() < 1e-9);
                assert!(rmse < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn collinear_features_fall_back_to_ridge() {
        let t = table(
            &["A", "B", "Y"],
            (0..10)
                .map(|i| vec![Some(i as f64), Some(2.0 * i as f64), Some(3.0 * i as f64)])
                .collect(),
        );
        let (m, y) = build_matrix(&t, &["A", "B"], "Y").unwrap();
        let model = train(&m, &y, ModelSpec { kind: ModelKind::LinearRegress, k: None }).unwrap();
        let pred = model.predict_rows(&m.rows);
        for (p, a) in pred.iter().zip(&y) {
            assert!((p - a).abs() < 1e-6);
        }
    }

    #[test]
    fn knn_examples() {
        let pairs = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (10.0, 10.0)];
        let (m, y) = build_matrix(&xy_table(&pairs), &["X"], "Y").unwrap();
        let model = train_named(&m, &y, "Y", ModelSpec { kind: ModelKind::KnnRegress, k: Some(3) }).unwrap();
        let q = standardize(&[1.0], &model.means, &model.stds);
        assert_eq!(model.predict_rows(&[q]), [1.0]);

        let one = train(&m, &y, ModelSpec { kind: ModelKind::KnnRegress, k: Some(1) }).unwrap();
        assert_eq!(one.predict_rows(&m.rows), y);

        assert_eq!(
            train(&m, &y, ModelSpec { kind: ModelKind::KnnRegress, k: Some(5) }).unwrap_err(),
            Error::TooFewRows { needed: 5, found: 4 }
        );
        assert_eq!(
            train(&m, &y, ModelSpec { kind: ModelKind::KnnClassify, k: Some(1) }).unwrap_err(),
            Error::NonBinaryTarget(2.0)
        );
    }

    #[test]
    fn knn_ties_prefer_lower_index() {
        // query at 1.0 is equidistant from training rows at 0 and 2
        let pairs = [(0.0, 10.0), (2.0, 20.0), (5.0, 0.0)];
        let (m, y) = build_matrix(&xy_table(&pairs), &["X"], "Y").unwrap();
        let model = train(&m, &y, ModelSpec { kind: ModelKind::KnnRegress, k: Some(1) }).unwrap();
        let q = standardize(&[1.0], &model.means, &model.stds);
        assert_eq!(model.predict_rows(&[q]), [10.0]);
    }

    #[test]
    fn predict_propagates_missing_and_names_curve() {
        let ds = WellDataset::new("W", vec![1.0, 2.0, 3.0], "M")
            .unwrap()
            .with_curve("X", CurveData::new(vec![Some(0.0), None, Some(2.0)], "").unwrap())
            .unwrap()
            .with_curve("Y", CurveData::new(vec![Some(0.0), Some(1.0), Some(2.0)], "US/F").unwrap())
            .unwrap();
        let t = concat_wells(std::slice::from_ref(&ds), &["X", "Y"]).unwrap();
        let (m, y) = build_matrix(&t, &["X"], "Y").unwrap();
        let model = train_named(&m, &y, "Y", ModelSpec { kind: ModelKind::KnnRegress, k: Some(1) }).unwrap();
        let out = predict(&model, &ds).unwrap();
        let pred = out.curve("Y_PRED").unwrap();
        assert_eq!(pred.values(), &[Some(0.0), None, Some(2.0)]);
        assert_eq!(pred.unit, "US/F");
        let again = predict(&model, &out).unwrap();
        assert_eq!(again.curve_names().filter(|n| n.ends_with("_PRED")).count(), 1);

        let lacking = crate::dataset::select_curves(&ds, &["Y"]).unwrap();
        assert_eq!(predict(&model, &lacking).unwrap_err(), Error::MissingFeatureCurve("X".into()));
    }

    #[test]
    fn metric_examples() {
        match regression_metrics(&[0.0, 0.0], &[3.0, 4.0]).unwrap() {
            Metrics::Regression { rmse, mae, .. } => {
                assert!((rmse - 12.5f64.sqrt()).abs() < 1e-12);
                assert_eq!(mae, 3.5);
            }
            other => panic!("{other:?}"),
        }
        match regression_metrics(&[1.0, 2.0], &[1.0, 2.0]).unwrap() {
            Metrics::Regression { rmse, r2, .. } => assert_eq!((rmse, r2), (0.0, Some(1.0))),
            other => panic!("{other:?}"),
        }
        match classification_metrics(&[1.0, 1.0, 1.0], &[1.0, 1.0, 0.0]).unwrap() {
            Metrics::Classification {
                accuracy,
                recall,
                precision,
                f1,
                ..
            } => {
                assert!((accuracy - 2.0 / 3.0).abs() < 1e-15);
                assert_eq!(recall, 1.0);
                assert!((precision - 2.0 / 3.0).abs() < 1e-15);
                assert!((f1 - 0.8).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(regression_metrics(&[], &[]).unwrap_err(), Error::EmptyEvaluation);
        match regression_metrics(&[1.0, 2.0], &[3.0, 3.0]).unwrap() {
            Metrics::Regression { r2, .. } => assert_eq!(r2, None),
            other => panic!("{other:?}"),
        }
    }

    fn split_fixture(wells: &[(&str, usize)]) -> (FeatureMatrix, Vec<f64>) {
        let mut rows = Vec::new();
        for (w, n) in wells {
            for i in 0..*n {
                rows.push(TableRow {
                    well: w.to_string(),
                    row_index: i,
                    depth: i as f64,
                    values: vec![Some(i as f64 + rows.len() as f64 * 0.01), Some(i as f64)],
                });
            }
        }
        let t = MultiWellTable {
            curves: vec!["X".into(), "Y".into()],
            rows,
        };
        build_matrix(&t, &["X"], "Y").unwrap()
    }

    #[test]
    fn split_examples() {
        let (m, y) = split_fixture(&[("A", 100)]);
        let ((tr, try_), (te, _)) = depth_block_split(&m, &y, 0.8).unwrap();
        assert_eq!(tr.len(), 80);
        assert_eq!(try_.len(), 80);
        assert_eq!(tr.row_keys.last().unwrap().row_index, 79);
        assert_eq!(te.row_keys[0].row_index, 80);

        let (m, y) = split_fixture(&[("A", 10), ("B", 10)]);
        let ((tr, _), (te, _)) = depth_block_split(&m, &y, 0.8).unwrap();
        assert_eq!(tr.row_keys.iter().filter(|k| k.well == "A").count(), 8);
        assert_eq!(tr.row_keys.iter().filter(|k| k.well == "B").count(), 8);
        assert_eq!(te.len(), 4);

        let ((tr, _), _) = depth_block_split(&m, &y, 0.7).unwrap();
        assert_eq!(tr.len(), 14);

        let (m, y) = split_fixture(&[("A", 2)]);
        assert!(matches!(depth_block_split(&m, &y, 0.99), Err(Error::TooFewRows { .. })));
        assert!(matches!(depth_block_split(&m, &y, 1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn model_json_round_trip() {
        let pairs: Vec<(f64, f64)> = (0..6).map(|i| (i as f64 * 0.1, (i as f64).sin())).collect();
        let (m, y) = build_matrix(&xy_table(&pairs), &["X"], "Y").unwrap();
        for kind in [ModelKind::KnnRegress, ModelKind::LinearRegress] {
            let model = train_named(&m, &y, "Y", ModelSpec { kind, k: Some(2) }).unwrap();
            let back = TrainedModel::from_json(&model.to_json().unwrap()).unwrap();
            assert_eq!(back, model);
        }
        assert!(TrainedModel::from_json("{\"kind\":\"linear_regress\"}").is_err());
    }
}
