//! Serve tutor sessions over HTTP.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use qtutor_core::TutorParams;
use qtutor_service::{load_content, router, AppState, SessionStore};

#[derive(Debug, Parser)]
#[command(name = "tutor-service", about = "Adaptive vocabulary tutor HTTP service")]
struct Args {
    #[arg(long, env = "QTUTOR_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Directory holding one JSON document per session
    #[arg(long, env = "QTUTOR_DATA_DIR", default_value = "tutor-data")]
    data_dir: PathBuf,
    /// Lexicon JSON; the bundled lexicon when omitted
    #[arg(long, env = "QTUTOR_LEXICON")]
    lexicon: Option<PathBuf>,
    /// word2vec text embeddings for synonym sets
    #[arg(long, env = "QTUTOR_EMBEDDINGS")]
    embeddings: Option<PathBuf>,
    /// Static web client bundle
    #[arg(long, env = "QTUTOR_STATIC_DIR")]
    static_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();

    let store = SessionStore::open(args.data_dir.join("sessions"))?;
    let lexicon = load_content(args.lexicon.as_deref(), args.embeddings.as_deref(), &args.data_dir.join("cache"))
        .context("loading content")?;
    log::info!("loaded {} words", lexicon.len());
    let app = router(Arc::new(AppState::new(store, lexicon, TutorParams::default())), args.static_dir);

    let listener = tokio::net::TcpListener::bind(args.listen).await.with_context(|| format!("binding {}", args.listen))?;
    log::info!("listening on {}", args.listen);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
