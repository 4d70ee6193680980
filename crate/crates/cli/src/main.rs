use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mlogs_core::dataset::{summary_stats, union_curve_names};
use mlogs_core::las_io::{dataset_to_las, merge_to_csv, parse_las_bytes, read_table_csv, to_dataset, write_las};
use mlogs_core::model::{build_matrix, depth_block_split, evaluate, predict, train_named};
use mlogs_core::outliers::{apply_removal, combine, flag_curve, CurveScope, RemovalMode, SetOp};
use mlogs_core::{ModelKind, ModelSpec, Provenance, TrainedModel, WellDataset};
use mlogs_service::{config, ServiceConfig};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

#[derive(Parser)]
#[command(name = "mlogs", version, about = "Well-log workbench: LAS conversion, cleaning, models and the HTTP service")]
struct Cli {
    /// Suppress log output on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merge LAS files into one long-format CSV (WELL, DEPT, curves...).
    Convert {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Comma-separated curves; default is every curve in any input.
        #[arg(long, value_delimiter = ',')]
        curves: Vec<String>,
    },
    /// Print summary statistics as JSON.
    Stats {
        input: PathBuf,
        /// Curves to summarize; default is all of them.
        #[arg(long, short, value_delimiter = ',')]
        curve: Vec<String>,
    },
    /// Flag outliers with z-score or IQR and remove them.
    Clean(CleanArgs),
    /// Train a model from a merged CSV and write it as JSON.
    Train(TrainArgs),
    /// Add <TARGET>_PRED to a LAS file using a trained model.
    Predict {
        #[arg(long, short)]
        model: PathBuf,
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Zscore,
    Iqr,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Mask,
    Drop,
}

#[derive(Args)]
struct CleanArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Curves to screen (comma-separated or repeated).
    #[arg(long, short, required = true, value_delimiter = ',')]
    curve: Vec<String>,
    /// z threshold (default 3) or IQR multiplier (default 1.5).
    #[arg(long)]
    param: Option<f64>,
    #[arg(long, value_enum, default_value = "mask")]
    mode: Mode,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    input: PathBuf,
    #[arg(long, required = true, value_delimiter = ',')]
    features: Vec<String>,
    #[arg(long)]
    target: String,
    /// knn, linear or knn_classify.
    #[arg(long, default_value = "knn", value_parser = parse_kind)]
    kind: ModelKind,
    #[arg(long)]
    k: Option<usize>,
    /// Fraction of each well's rows (shallowest first) used for training.
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    /// host:port; overrides MLOGS_BIND.
    #[arg(long)]
    bind: Option<String>,
    /// Port on the configured host.
    #[arg(long)]
    port: Option<u16>,
    #[arg(long, env = "MLOGS_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Directory with the built web UI.
    #[arg(long)]
    static_dir: Option<PathBuf>,
    /// Upload limit, e.g. 100M.
    #[arg(long)]
    upload_cap: Option<String>,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: mlogs_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_max_level(if cli.quiet { tracing::Level::ERROR } else { tracing::Level::INFO })
        .with_target(false)
        .init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Convert { inputs, output, curves } => convert(&inputs, output.as_deref(), curves),
        Command::Stats { input, curve } => stats(&input, curve),
        Command::Clean(args) => clean(args),
        Command::Train(args) => train(args),
        Command::Predict { model, input, output } => run_predict(&model, &input, output.as_deref()),
        Command::Serve(args) => serve(args),
    }
}

fn load_las(path: &Path) -> Result<WellDataset> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let label = path.display().to_string();
    let file = parse_las_bytes(&bytes).with_context(|| label.clone())?;
    to_dataset(&file, Some(&label)).with_context(|| label.clone())
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            tracing::info!(path = %path.display(), bytes = text.len(), "wrote");
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn print_json(value: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn convert(inputs: &[PathBuf], output: Option<&Path>, curves: Vec<String>) -> Result<()> {
    let datasets = inputs.iter().map(|p| load_las(p)).collect::<Result<Vec<_>>>()?;
    let curves = if curves.is_empty() { union_curve_names(&datasets) } else { curves };
    let (table, csv) = merge_to_csv(&datasets, &curves)?;
    tracing::info!(wells = datasets.len(), rows = table.rows.len(), "merged");
    emit(output, &csv)
}

fn stats(input: &Path, curves: Vec<String>) -> Result<()> {
    let ds = load_las(input)?;
    let curves = if curves.is_empty() { ds.curve_names().map(str::to_string).collect() } else { curves };
    let mut out = serde_json::Map::new();
    for name in curves {
        let summary = summary_stats(&ds, &name).with_context(|| format!("curve {name}"))?;
        out.insert(name, serde_json::to_value(summary)?);
    }
    print_json(&json!({ "well": ds.well(), "rows": ds.row_count(), "curves": out }))
}

fn clean(args: CleanArgs) -> Result<()> {
    let ds = load_las(&args.input)?;
    let (provenance, param) = match args.method {
        Method::Zscore => (Provenance::Zscore, args.param.unwrap_or(3.0)),
        Method::Iqr => (Provenance::Iqr, args.param.unwrap_or(1.5)),
    };
    let mut flagged = serde_json::Map::new();
    let mut next = ds.clone();
    let mut cells = 0;
    let mut rows = std::collections::BTreeSet::new();
    let mut union: Option<mlogs_core::SelectionSet> = None;
    for curve in &args.curve {
        let sel = flag_curve(&ds, curve, provenance, param)?;
        flagged.insert(curve.clone(), json!(sel.rows.len()));
        match args.mode {
            Mode::Mask => {
                let (masked, report) =
                    apply_removal(&next, &sel, RemovalMode::Mask, &CurveScope::Named(vec![curve.clone()]))?;
                cells += report.cells;
                rows.extend(sel.rows.iter().copied());
                next = masked;
            }
            Mode::Drop => {
                union = Some(match union {
                    Some(u) => combine(&u, &sel, SetOp::Union)?,
                    None => sel,
                });
            }
        }
    }
    let (mode, rows) = match (args.mode, union) {
        (Mode::Drop, Some(sel)) => {
            let (dropped, report) = apply_removal(&ds, &sel, RemovalMode::Drop, &CurveScope::All)?;
            next = dropped;
            ("drop", report.rows)
        }
        (Mode::Drop, None) => ("drop", 0),
        (Mode::Mask, _) => ("mask", rows.len()),
    };
    let las = write_las(&dataset_to_las(&next)?)?;
    match &args.output {
        Some(path) => emit(Some(path), &las)?,
        None => bail!("clean needs --output"),
    }
    print_json(&json!({
        "mode": mode,
        "flagged": flagged,
        "rows": rows,
        "cells": cells,
        "rows_before": ds.row_count(),
        "rows_after": next.row_count(),
    }))
}

fn train(args: TrainArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let table = read_table_csv(&text).with_context(|| args.input.display().to_string())?;
    let (matrix, target) = build_matrix(&table, &args.features, &args.target)?;
    let ((tm, ty), (em, ey)) = depth_block_split(&matrix, &target, args.split)?;
    let model = train_named(&tm, &ty, &args.target, ModelSpec { kind: args.kind, k: args.k })?;
    let train_metrics = evaluate(&model, &tm, &ty)?;
    let test_metrics = evaluate(&model, &em, &ey)?;
    emit(Some(&args.output), &model.to_json()?)?;
    print_json(&json!({
        "model": args.output.display().to_string(),
        "kind": model.kind,
        "features": model.feature_names,
        "target": model.target_name,
        "rows": { "train": tm.len(), "test": em.len() },
        "train_metrics": train_metrics,
        "test_metrics": test_metrics,
    }))
}

fn run_predict(model_path: &Path, input: &Path, output: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let model = TrainedModel::from_json(&text).with_context(|| model_path.display().to_string())?;
    let ds = load_las(input)?;
    let out = predict(&model, &ds)?;
    let name = model.prediction_name();
    let curve = out.curve(&name)?;
    let las = write_las(&dataset_to_las(&out)?)?;
    match output {
        Some(path) => {
            emit(Some(path), &las)?;
            print_json(&json!({
                "well": out.well(),
                "curve": name,
                "rows": out.row_count(),
                "predicted": curve.present_count(),
            }))
        }
        None => emit(None, &las),
    }
}

fn serve(args: ServeArgs) -> Result<()> {
    let mut config = ServiceConfig::from_env()?;
    if let Some(bind) = &args.bind {
        config.bind = config::parse_bind(bind)?;
    }
    if let Some(port) = args.port {
        config.bind.set_port(port);
    }
    if let Some(dir) = args.data_dir {
        config.data_dir = dir;
    }
    if let Some(dir) = args.static_dir {
        config.static_dir = Some(dir);
    }
    if let Some(cap) = &args.upload_cap {
        config.upload_cap = config::parse_size(cap)?;
    }
    let app = mlogs_service::build(&config)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(config.bind)
            .await
            .with_context(|| format!("binding {}", config.bind))?;
        let addr = listener.local_addr()?;
        println!("{}", json!({ "listening": addr.to_string() }));
        tracing::info!(%addr, "serving");
        mlogs_service::serve(listener, app).await?;
        Ok(())
    })
}
