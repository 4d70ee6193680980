//! HTTP host for the well-log workbench.
//!
//! Projects live under one data directory. Each project is served from an
//! immutable snapshot; mutations are serialized per project and publish a
//! new revision atomically.

pub mod api;
pub mod chart;
pub mod config;
pub mod error;
pub mod storage;
pub mod workbench;

use std::sync::Arc;

pub use api::router;
pub use config::ServiceConfig;
pub use error::ServiceError;
pub use workbench::{Project, Workbench};

/// Opens the data directory and builds the router for `config`.
pub fn build(config: &ServiceConfig) -> Result<axum::Router, ServiceError> {
    if let Some(dir) = &config.static_dir {
        if !dir.is_dir() {
            return Err(ServiceError::Config(format!("static dir {} is not a directory", dir.display())));
        }
    }
    let bench = Workbench::open(&config.data_dir)?;
    tracing::info!(data_dir = %config.data_dir.display(), projects = bench.list().len(), "workbench loaded");
    Ok(router(Arc::new(bench), config.upload_cap, config.static_dir.as_deref()))
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, app: axum::Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
