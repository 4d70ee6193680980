use mlogs_core::dataset::{concat_wells, union_curve_names};
use mlogs_core::eda::{
    box_stats, category_counts, correlation_matrix, histogram, pair_grid, scatter_pairs, DEFAULT_BINS,
};
use mlogs_core::outliers::filtered_histogram;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::ServiceError;
use crate::workbench::Project;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Histogram,
    FilteredHistogram,
    Scatter,
    Box,
    Pair,
    Corr,
    Bar,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ChartQuery {
    pub kind: ChartKind,
    pub well: Option<String>,
    /// Comma-separated; used by `bar`.
    pub wells: Option<String>,
    pub curve: Option<String>,
    pub x: Option<String>,
    pub y: Option<String>,
    /// Comma-separated; used by `pair` and `corr`.
    pub curves: Option<String>,
    pub bins: Option<usize>,
    pub selection: Option<String>,
}

fn split_list(text: Option<&str>) -> Vec<String> {
    text.unwrap_or("")
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn need<'a>(value: &'a Option<String>, what: &str) -> Result<&'a str, ServiceError> {
    value
        .as_deref()
        .ok_or_else(|| ServiceError::Validation(format!("chart needs the {what} parameter")))
}

/// Computes one chart payload against a single project revision.
pub fn chart(p: &Project, q: &ChartQuery) -> Result<Value, ServiceError> {
    let bins = q.bins.unwrap_or(DEFAULT_BINS);
    if q.kind == ChartKind::Bar {
        let keys = split_list(q.wells.as_deref());
        let (_, datasets) = p.datasets(&keys)?;
        let table = concat_wells(&datasets, &union_curve_names(&datasets))?;
        return Ok(json!({ "kind": "bar", "revision": p.revision, "bars": category_counts(&table) }));
    }
    let (well_id, ds) = p.well(need(&q.well, "well")?)?;
    let payload = match q.kind {
        ChartKind::Histogram | ChartKind::FilteredHistogram => {
            let curve = need(&q.curve, "curve")?;
            let values = ds.curve(curve)?.values();
            let h = histogram(values, bins)?;
            let mut out = json!({ "curve": curve, "histogram": h });
            let selection = match (q.kind, &q.selection) {
                (_, Some(s)) => Some(s.as_str()),
                (ChartKind::FilteredHistogram, None) => Some(need(&q.selection, "selection")?),
                _ => None,
            };
            if let Some(sid) = selection {
                let stored = p.selection(sid)?;
                if stored.well_id != well_id {
                    return Err(mlogs_core::Error::WellMismatch {
                        selection: stored.well_id.clone(),
                        dataset: well_id,
                    }
                    .into());
                }
                out["selection"] = json!(sid);
                out["filtered_counts"] = json!(filtered_histogram(values, &stored.selection.rows, &h.edges)?);
            }
            out
        }
        ChartKind::Scatter => {
            let s = scatter_pairs(ds, need(&q.x, "x")?, need(&q.y, "y")?)?;
            json!({ "scatter": s })
        }
        ChartKind::Box => {
            let curve = need(&q.curve, "curve")?;
            json!({ "curve": curve, "box": box_stats(ds.curve(curve)?.values())? })
        }
        ChartKind::Pair => {
            let names = split_list(q.curves.as_deref());
            json!({ "pair": pair_grid(ds, &names, bins)? })
        }
        ChartKind::Corr => {
            let names = split_list(q.curves.as_deref());
            json!({ "corr": correlation_matrix(ds, &names)? })
        }
        ChartKind::Bar => unreachable!("handled above"),
    };
    let mut out = payload;
    out["kind"] = serde_json::to_value(q.kind).unwrap_or(Value::Null);
    out["revision"] = json!(p.revision);
    out["well"] = json!(well_id);
    Ok(out)
}
