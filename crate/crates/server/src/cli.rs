//! `eyevis` command line.

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use eyevis_core::eval::{
    illumination_table, run_corpus_eval, AggregateStats, IlluminationRow, ParticipantTable,
};
use eyevis_core::imaging::{self, ImageFormat, RasterImage};
use eyevis_core::residue::visualize;
use eyevis_core::Config;
use serde::Serialize;

use crate::api::{serve, AppState};
use crate::settings::{ConfigFile, Overrides, ProviderKind, ProviderSettings, Settings};

#[derive(Debug, Parser)]
#[command(name = "eyevis", version, about = "Eye-makeup residue checks: service and batch tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Score an annotated corpus and write a JSON report.
    Evaluate(EvaluateArgs),
    /// Pairwise HSV distance between three captures per group directory.
    Illum(IllumArgs),
    /// Average and sample deviation of each participant-table column.
    Stats(StatsArgs),
    /// Write the visualization images for one capture.
    Visualize(VisualizeArgs),
}

#[derive(Debug, Args)]
pub struct ProviderArgs {
    #[arg(long, value_enum)]
    pub provider: Option<ProviderKind>,
    /// Directory of `*.landmarks.json` files (fixture provider).
    #[arg(long)]
    pub landmarks: Option<PathBuf>,
    /// Detector executable (external provider): reads PNG on stdin,
    /// prints landmark JSON.
    #[arg(long)]
    pub external_cmd: Option<PathBuf>,
    #[arg(long = "external-arg", allow_hyphen_values = true)]
    pub external_args: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub host: Option<IpAddr>,
    #[arg(long)]
    pub port: Option<u16>,
    /// Concurrent vision jobs.
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub provider: ProviderArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Exit 0 even when some items fail.
    #[arg(long)]
    pub allow_failures: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Landmark files default to the corpus directory.
    #[command(flatten)]
    pub provider: ProviderArgs,
}

#[derive(Debug, Args)]
pub struct IllumArgs {
    #[arg(required = true)]
    pub groups: Vec<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// CSV with the participant columns; the bundled table when omitted.
    pub fixture: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VisualizeArgs {
    pub image: PathBuf,
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Serve(args) => cmd_serve(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Illum(args) => cmd_illum(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Visualize(args) => cmd_visualize(args),
    }
}

fn vision_config(path: Option<&Path>) -> anyhow::Result<Config> {
    let cfg = match path {
        Some(p) => ConfigFile::load(p)?.vision,
        None => Config::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_serve(args: ServeArgs) -> anyhow::Result<ExitCode> {
    let flags = Overrides {
        config: args.config,
        data_dir: args.data_dir,
        host: args.host,
        port: args.port,
        workers: args.workers,
        provider: args.provider.provider,
        landmarks: args.provider.landmarks,
        external_cmd: args.provider.external_cmd,
        external_args: args.provider.external_args,
    };
    let settings = Settings::resolve(&flags, |k| std::env::var(k).ok())?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let app = AppState::from_settings(&settings)?;
        let addr = SocketAddr::new(settings.host, settings.port);
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot listen on {addr}"))?;
        let local = listener.local_addr()?;
        tracing::info!(data_dir = %settings.data_dir.display(), "serving");
        println!("listening on http://{local}");
        std::io::stdout().flush()?;
        serve(listener, app, shutdown_signal()).await
    })?;
    Ok(ExitCode::SUCCESS)
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    tracing::info!("shutting down");
}

fn cmd_evaluate(args: EvaluateArgs) -> anyhow::Result<ExitCode> {
    if !args.corpus.is_dir() {
        bail!("corpus {} is not a directory", args.corpus.display());
    }
    let cfg = vision_config(args.config.as_deref())?;
    let p = args.provider;
    let provider = match p.provider.unwrap_or(ProviderKind::Fixture) {
        ProviderKind::Fixture => ProviderSettings::Fixture {
            landmarks: Some(p.landmarks.unwrap_or_else(|| args.corpus.clone())),
        },
        ProviderKind::External => ProviderSettings::External {
            program: p
                .external_cmd
                .context("--provider external needs --external-cmd")?,
            args: p.external_args,
        },
    }
    .build()?;

    let report = run_corpus_eval(&args.corpus, provider.as_ref(), &cfg)?;
    report
        .write(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{:.2}%", v * 100.0));
    println!(
        "{} items, {} failed; r_eye {} r_pink {} r_black {} r_bin {}",
        report.items.len(),
        report.failed,
        fmt(report.averages.r_eye),
        fmt(report.averages.r_pink),
        fmt(report.averages.r_black),
        fmt(report.averages.r_bin),
    );
    Ok(if report.failed > 0 && !args.allow_failures {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn is_image(path: &Path) -> bool {
    path.is_file() && ImageFormat::from_path(path).is_some()
}

/// Loads the three captures of one group directory, in file-name order.
pub fn load_group(dir: &Path) -> anyhow::Result<(String, [RasterImage; 3])> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_image(p))
        .collect();
    files.sort();
    if files.len() != 3 {
        bail!("{} holds {} images, expected 3", dir.display(), files.len());
    }
    let load = |p: &PathBuf| imaging::load(p).with_context(|| format!("loading {}", p.display()));
    let name = dir
        .file_name()
        .map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
    Ok((name, [load(&files[0])?, load(&files[1])?, load(&files[2])?]))
}

pub fn format_illum(rows: &[IlluminationRow]) -> String {
    let mut out = format!("{:<16} {:>8} {:>8} {:>8}\n", "group", "d_ab", "d_ac", "d_bc");
    for r in rows {
        out += &format!("{:<16} {:>8.4} {:>8.4} {:>8.4}\n", r.group, r.d_ab, r.d_ac, r.d_bc);
    }
    out
}

fn cmd_illum(args: IllumArgs) -> anyhow::Result<ExitCode> {
    let groups = args
        .groups
        .iter()
        .map(|d| load_group(d))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let rows = illumination_table(&groups)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        print!("{}", format_illum(&rows));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
pub struct ColumnStats {
    pub column: &'static str,
    #[serde(flatten)]
    pub stats: AggregateStats,
}

pub fn table_stats(table: &ParticipantTable) -> anyhow::Result<Vec<ColumnStats>> {
    Ok(table
        .column_stats()?
        .into_iter()
        .map(|(col, stats)| ColumnStats {
            column: col.name(),
            stats,
        })
        .collect())
}

pub fn format_stats(stats: &[ColumnStats]) -> String {
    let mut out = format!("{:<18} {:>7} {:>7}\n", "column", "avg", "std");
    for s in stats {
        out += &format!("{:<18} {:>7.2} {:>7.2}\n", s.column, s.stats.avg, s.stats.std);
    }
    out
}

fn cmd_stats(args: StatsArgs) -> anyhow::Result<ExitCode> {
    let table = match &args.fixture {
        Some(p) => ParticipantTable::read(p).with_context(|| format!("reading {}", p.display()))?,
        None => ParticipantTable::shipped(),
    };
    let stats = table_stats(&table)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&stats)?);
    } else {
        print!("{}", format_stats(&stats));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct VisualizeSummary {
    black_ratio: f64,
    pink_ratio: f64,
    files: Vec<PathBuf>,
}

fn cmd_visualize(args: VisualizeArgs) -> anyhow::Result<ExitCode> {
    let cfg = vision_config(args.config.as_deref())?;
    let img = imaging::load(&args.image).with_context(|| format!("loading {}", args.image.display()))?;
    let vis = visualize(&img, &cfg)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let set = &vis.images;
    let mut files = Vec::new();
    for (name, image) in [
        ("original", &set.original),
        ("black_vis", &set.black_vis),
        ("pink_vis", &set.pink_vis),
        ("combined", &set.combined),
        ("contour_vis", &set.contour_vis),
    ] {
        let path = args.out_dir.join(format!("{name}.png"));
        imaging::save(image, &path).with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
    }
    let summary = VisualizeSummary {
        black_ratio: vis.black.ratio,
        pink_ratio: vis.pink.ratio,
        files,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn shipped_stats_print_two_decimals() {
        let text = format_stats(&table_stats(&ParticipantTable::shipped()).unwrap());
        let line = text.lines().find(|l| l.starts_with("r_p_baseline")).unwrap();
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cols, ["r_p_baseline", "19.84", "6.51"]);
    }

    #[test]
    fn groups_need_three_images() {
        let dir = tempfile::tempdir().unwrap();
        let img = RasterImage::filled(3, 3, [1, 2, 3]).unwrap();
        for n in ["a.png", "b.png"] {
            imaging::save(&img, dir.path().join(n)).unwrap();
        }
        assert!(load_group(dir.path()).is_err());
        imaging::save(&img, dir.path().join("c.png")).unwrap();
        std::fs::write(dir.path().join("notes.txt"), "x").unwrap();
        let (_, imgs) = load_group(dir.path()).unwrap();
        assert_eq!(imgs.len(), 3);
    }
}
