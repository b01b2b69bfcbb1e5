//! WebSocket host for the session protocol: one engine per connection.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use gazepinch::service::{ErrorCode, ServerMessage, Session};
use gazepinch::{FusionConfig, Scene};

use crate::commands::load_scene;
use crate::config::CliConfig;
use crate::Failure;

#[derive(Clone)]
struct Shared {
    scene: Arc<Scene>,
    config: FusionConfig,
}

pub fn serve(config: &CliConfig, scene: &Path, host: &str, port: u16) -> Result<(), Failure> {
    let scene = load_scene(config, scene)?;
    // fail early on a config the engine would refuse
    Session::new(scene.clone(), config.fusion).map_err(|e| Failure::Usage(anyhow!(e)))?;
    let shared = Shared {
        scene: Arc::new(scene),
        config: config.fusion,
    };
    let runtime = tokio::runtime::Runtime::new()
        .context("cannot start async runtime")
        .map_err(Failure::Usage)?;
    runtime.block_on(run(shared, host, port))
}

async fn run(shared: Shared, host: &str, port: u16) -> Result<(), Failure> {
    let listener = tokio::net::TcpListener::bind((host, port))
        .await
        .with_context(|| format!("cannot listen on {host}:{port}"))
        .map_err(Failure::Usage)?;
    let addr = listener.local_addr().map_err(|e| Failure::Usage(e.into()))?;
    // handlers go in before the address is announced so an early signal is not lost
    let shutdown = shutdown_signal().map_err(Failure::Usage)?;
    println!("listening on ws://{addr}/session");
    let _ = std::io::stdout().flush();

    let app = Router::new().route("/session", get(upgrade)).with_state(shared);
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
        .context("server failed")
        .map_err(Failure::Usage)?;
    println!("shut down");
    Ok(())
}

#[cfg(unix)]
fn shutdown_signal() -> anyhow::Result<impl std::future::Future<Output = ()>> {
    use tokio::signal::unix::{signal, SignalKind};
    let mut int = signal(SignalKind::interrupt()).context("cannot install SIGINT handler")?;
    let mut term = signal(SignalKind::terminate()).context("cannot install SIGTERM handler")?;
    Ok(async move {
        tokio::select! {
            _ = int.recv() => {}
            _ = term.recv() => {}
        }
    })
}

#[cfg(not(unix))]
fn shutdown_signal() -> anyhow::Result<impl std::future::Future<Output = ()>> {
    Ok(async {
        let _ = tokio::signal::ctrl_c().await;
    })
}

async fn upgrade(ws: WebSocketUpgrade, State(shared): State<Shared>) -> Response {
    ws.on_upgrade(move |socket| session(socket, shared))
}

async fn session(mut socket: WebSocket, shared: Shared) {
    let mut session = Session::new((*shared.scene).clone(), shared.config).expect("validated at startup");
    while let Some(Ok(msg)) = socket.recv().await {
        let replies = match msg {
            Message::Text(text) => session.handle_text(text.as_str()),
            Message::Binary(_) => vec![ServerMessage::Error {
                code: ErrorCode::Malformed,
                message: "binary frames are not supported; send JSON text".into(),
            }],
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        for reply in replies {
            if socket.send(Message::Text(reply.to_json().into())).await.is_err() {
                return;
            }
        }
    }
}
