//! JSON-over-HTTP service for a scholarscope catalog.
//!
//! Every response body is `{"version": N, "data": ...}` or, on failure,
//! `{"error_code": ..., "message": ...}`; both carry the snapshot version in
//! the `X-Snapshot-Version` header. A request reads exactly one catalog, and
//! re-ingestion replaces the active catalog in a single pointer swap.

pub mod config;
pub mod error;
pub mod routes;
pub mod state;

use std::sync::Arc;
use std::time::Duration;

use tokio::net::TcpListener;

pub use config::{config_path, ApiConfig, ConfigError, CONFIG_ENV};
pub use error::{ApiError, ErrorBody};
pub use routes::router;
pub use state::{AppState, IngestFailed, ReingestOutcome, Resources, StartupError};

pub const VERSION_HEADER: &str = "x-snapshot-version";

/// Starts the periodic re-ingest task when the config asks for one.
pub fn spawn_reingest_timer(state: &Arc<AppState>) -> Option<tokio::task::JoinHandle<()>> {
    let secs = state.config.reingest_interval_secs?;
    let state = Arc::clone(state);
    Some(tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(secs));
        tick.tick().await;
        loop {
            tick.tick().await;
            if let Err(e) = state.reingest().await {
                tracing::warn!(error = %e, "scheduled re-ingest failed");
            }
        }
    }))
}

/// Serves `state` on an already bound listener until `shutdown` resolves.
pub async fn serve_on(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let timer = spawn_reingest_timer(&state);
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await;
    if let Some(t) = timer {
        t.abort();
    }
    result
}

/// Builds or loads the catalog described by `config` and serves it until
/// Ctrl-C.
pub async fn serve(config: ApiConfig) -> Result<(), StartupError> {
    let addr = config.listen_addr()?;
    let state = tokio::task::spawn_blocking(move || AppState::start(config))
        .await
        .map_err(|e| StartupError::Resource(e.to_string()))??;
    let listener = TcpListener::bind(addr).await.map_err(|e| StartupError::Bind {
        addr: addr.to_string(),
        message: e.to_string(),
    })?;
    tracing::info!(%addr, version = state.current().version(), "listening");
    serve_on(listener, Arc::new(state), async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
    .map_err(|e| StartupError::Bind {
        addr: addr.to_string(),
        message: e.to_string(),
    })
}
