use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use upsell_service::{serve, AppState, BackendKind, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "upsell-service", about = "Hotel upsell recommendation and campaign service")]
struct Args {
    /// TOML config file.
    #[arg(long, default_value = "service.toml")]
    config: PathBuf,
    #[arg(long)]
    port: Option<u16>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    /// Seed for the mock text generator.
    #[arg(long)]
    seed: Option<u64>,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let args = Args::parse();

    let mut config = match ServiceConfig::load(&args.config) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::FAILURE;
        }
    };
    if let Some(port) = args.port {
        config.port = port;
    }
    if let Some(dir) = args.data_dir {
        config.data_dir = dir;
    }
    if let Some(kind) = args.backend {
        config.backend.kind = kind;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }

    let state = match AppState::from_config(&config) {
        Ok(state) => state,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::FAILURE;
        }
    };
    let addr = SocketAddr::new(config.bind, config.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(listener) => listener,
        Err(err) => {
            eprintln!("error: cannot bind {addr}: {err}");
            return ExitCode::FAILURE;
        }
    };
    tracing::info!(%addr, backend = ?config.backend.kind, "listening");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match serve(listener, state, shutdown).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
