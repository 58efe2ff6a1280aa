#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, FixedOffset};
use serde_json::Value;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use upsell_service::{serve, AppState, ManualClock, ServiceConfig};

pub const ACM: &str = "smp";

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_json(name: &str) -> Value {
    let text = std::fs::read_to_string(fixtures().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// The fixture config with its data directory moved to `data_dir`.
pub fn fixture_config(data_dir: &Path) -> ServiceConfig {
    let mut config = ServiceConfig::load(fixtures().join("service.toml")).unwrap();
    config.data_dir = data_dir.to_path_buf();
    config
}

/// Instant of the recorded kbr response.
pub fn sample_instant() -> DateTime<FixedOffset> {
    DateTime::parse_from_rfc3339("2018-07-10T11:44:12.856229+03:00").unwrap()
}

pub struct Server {
    pub base: String,
    pub state: AppState,
    pub clock: Arc<ManualClock>,
    pub http: reqwest::Client,
    stop: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl Server {
    pub async fn start(config: &ServiceConfig) -> Self {
        let clock = Arc::new(ManualClock::new(sample_instant()));
        let state = AppState::with_clock(config, clock.clone()).unwrap();
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (stop, stopped) = oneshot::channel::<()>();
        let task = tokio::spawn(serve(listener, state.clone(), async {
            let _ = stopped.await;
        }));
        Self {
            base,
            state,
            clock,
            http: reqwest::Client::new(),
            stop: Some(stop),
            task,
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    pub async fn get(&self, path: &str) -> reqwest::Response {
        self.http.get(self.url(path)).send().await.unwrap()
    }

    pub async fn post(&self, path: &str, body: &Value) -> reqwest::Response {
        self.http.post(self.url(path)).json(body).send().await.unwrap()
    }

    pub async fn put(&self, path: &str, body: &Value) -> reqwest::Response {
        self.http.put(self.url(path)).json(body).send().await.unwrap()
    }

    pub async fn stop(mut self) {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        self.task.await.unwrap().unwrap();
    }
}

/// Status and JSON body.
pub async fn json(response: reqwest::Response) -> (u16, Value) {
    let status = response.status().as_u16();
    let text = response.text().await.unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (status, value)
}

pub fn items(doc: &Value) -> Vec<String> {
    let list = doc
        .get("recommendedWines")
        .or_else(|| doc.get("recommendedItems"))
        .and_then(Value::as_array)
        .unwrap_or_else(|| panic!("no item list in {doc}"));
    list.iter().map(|v| v.as_str().unwrap().to_string()).collect()
}
