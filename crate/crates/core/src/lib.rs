//! Core of the well-log workbench: LAS input/output, depth-indexed
//! datasets, exploratory statistics, outlier review and prediction models.

pub mod dataset;
pub mod eda;
pub mod error;
pub mod las_io;
pub mod model;
pub mod outliers;

pub use dataset::{CurveData, MultiWellTable, StatSummary, TableRow, WellDataset};
pub use error::{Error, Result};
pub use las_io::{LasFile, LasVersion};
pub use model::{FeatureMatrix, Metrics, ModelKind, ModelSpec, TrainedModel};
pub use outliers::{BrushRect, Provenance, SelectionSet};
