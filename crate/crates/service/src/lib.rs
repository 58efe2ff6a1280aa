//! HTTP facade over the upsell recommenders, persuasion profiling, ad-copy
//! generation and campaign store.

pub mod config;
pub mod error;
pub mod live;
pub mod routes;
pub mod state;

use std::future::Future;
use std::time::Duration;

use tokio::net::TcpListener;
use tokio::task::JoinHandle;

pub use config::{BackendKind, ServiceConfig};
pub use routes::router;
pub use state::{AppState, Clock, ManualClock, SystemClock};

/// One periodic rebuild task per accommodation. Nothing is spawned when
/// `rebuild.period_seconds` is 0.
pub fn spawn_rebuild_timers(state: &AppState) -> Vec<JoinHandle<()>> {
    let period = state.recommender.rebuild.period_seconds;
    if period == 0 {
        return Vec::new();
    }
    state
        .accommodations
        .values()
        .map(|acm| {
            let acm = acm.clone();
            let state = state.clone();
            tokio::spawn(async move {
                let mut ticks = tokio::time::interval(Duration::from_secs(period));
                ticks.tick().await;
                loop {
                    ticks.tick().await;
                    let snapshot = acm.rebuild(&state.recommender, state.clock.now()).await;
                    tracing::debug!(acm = %acm.id, built_at = %snapshot.built_at, "snapshot refreshed");
                }
            })
        })
        .collect()
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let timers = spawn_rebuild_timers(&state);
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await;
    for timer in timers {
        timer.abort();
    }
    result
}
