//! Server settings: defaults < config file < environment < flags.
//!
//! The config file is the vision `Config` TOML with an optional `[server]`
//! table on top.

use std::net::{IpAddr, Ipv4Addr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use eyevis_core::landmarks::{ExternalProvider, FixtureProvider, LandmarkProvider};
use eyevis_core::Config;
use serde::Deserialize;

pub const ENV_DATA_DIR: &str = "EYEVIS_DATA_DIR";
pub const ENV_PORT: &str = "EYEVIS_PORT";
pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_DATA_DIR: &str = "eyevis-data";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Fixture,
    External,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerSection {
    pub data_dir: Option<PathBuf>,
    pub host: Option<IpAddr>,
    pub port: Option<u16>,
    pub workers: Option<usize>,
    pub provider: Option<ProviderKind>,
    pub landmarks: Option<PathBuf>,
    pub external_cmd: Option<PathBuf>,
    pub external_args: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub server: ServerSection,
    pub vision: Config,
}

impl ConfigFile {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut table: toml::Table = toml::from_str(text)?;
        let server = match table.remove("server") {
            Some(v) => v.try_into().context("[server]")?,
            None => ServerSection::default(),
        };
        let vision = Config::default().merged(table)?;
        Ok(Self { server, vision })
    }

    /// Reads a config file; relative paths in `[server]` resolve against
    /// the file's directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut file = Self::parse(&text).with_context(|| format!("config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut file.server.data_dir, &mut file.server.landmarks] {
            if let Some(p) = p.as_mut().filter(|p| p.is_relative()) {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }
}

/// Command-line values; `None` leaves the lower layers in charge.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
    pub host: Option<IpAddr>,
    pub port: Option<u16>,
    pub workers: Option<usize>,
    pub provider: Option<ProviderKind>,
    pub landmarks: Option<PathBuf>,
    pub external_cmd: Option<PathBuf>,
    pub external_args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProviderSettings {
    Fixture { landmarks: Option<PathBuf> },
    External { program: PathBuf, args: Vec<String> },
}

impl ProviderSettings {
    pub fn build(&self) -> anyhow::Result<Arc<dyn LandmarkProvider>> {
        Ok(match self {
            ProviderSettings::Fixture { landmarks: Some(dir) } => Arc::new(
                FixtureProvider::from_dir(dir)
                    .with_context(|| format!("loading landmarks from {}", dir.display()))?,
            ),
            ProviderSettings::Fixture { landmarks: None } => {
                tracing::warn!("fixture provider without --landmarks: every detection will fail");
                Arc::new(FixtureProvider::new())
            }
            ProviderSettings::External { program, args } => {
                Arc::new(ExternalProvider::new(program.clone(), args.clone()))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub data_dir: PathBuf,
    pub host: IpAddr,
    pub port: u16,
    pub workers: usize,
    pub provider: ProviderSettings,
    pub vision: Config,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get())
}

impl Settings {
    /// Layers the config file, the environment (looked up through `env`)
    /// and the flags over the defaults.
    pub fn resolve(flags: &Overrides, env: impl Fn(&str) -> Option<String>) -> anyhow::Result<Self> {
        let file = match &flags.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let server = file.server;

        let env_port = env(ENV_PORT)
            .map(|v| v.parse::<u16>().with_context(|| format!("{ENV_PORT}={v}")))
            .transpose()?;
        let env_dir = env(ENV_DATA_DIR).filter(|v| !v.is_empty()).map(PathBuf::from);

        let data_dir = flags
            .data_dir
            .clone()
            .or(env_dir)
            .or(server.data_dir)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR));
        let port = flags.port.or(env_port).or(server.port).unwrap_or(DEFAULT_PORT);
        let host = flags
            .host
            .or(server.host)
            .unwrap_or(IpAddr::V4(Ipv4Addr::LOCALHOST));
        let workers = flags.workers.or(server.workers).unwrap_or_else(default_workers);
        if workers == 0 {
            bail!("workers must be at least 1");
        }

        let kind = flags
            .provider
            .or(server.provider)
            .unwrap_or(ProviderKind::Fixture);
        let provider = match kind {
            ProviderKind::Fixture => ProviderSettings::Fixture {
                landmarks: flags.landmarks.clone().or(server.landmarks),
            },
            ProviderKind::External => {
                let program = flags
                    .external_cmd
                    .clone()
                    .or(server.external_cmd)
                    .context("--provider external needs --external-cmd")?;
                let args = if flags.external_args.is_empty() {
                    server.external_args.unwrap_or_default()
                } else {
                    flags.external_args.clone()
                };
                ProviderSettings::External { program, args }
            }
        };

        Ok(Self {
            data_dir,
            host,
            port,
            workers,
            provider,
            vision: file.vision,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn defaults() {
        let s = Settings::resolve(&Overrides::default(), no_env).unwrap();
        assert_eq!(s.port, DEFAULT_PORT);
        assert_eq!(s.data_dir, PathBuf::from(DEFAULT_DATA_DIR));
        assert_eq!(s.provider, ProviderSettings::Fixture { landmarks: None });
        assert_eq!(s.vision, Config::default());
    }

    #[test]
    fn layering() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eyevis.toml");
        std::fs::write(
            &path,
            "blue_factor = 1.5\n[server]\nport = 9000\ndata_dir = \"store\"\nworkers = 3\n",
        )
        .unwrap();
        let mut flags = Overrides {
            config: Some(path),
            ..Default::default()
        };
        let s = Settings::resolve(&flags, no_env).unwrap();
        assert_eq!(s.port, 9000);
        assert_eq!(s.workers, 3);
        assert_eq!(s.data_dir, dir.path().join("store"));
        assert_eq!(s.vision.blue_factor, 1.5);

        let env = |k: &str| match k {
            ENV_PORT => Some("9100".to_string()),
            ENV_DATA_DIR => Some("/env/dir".to_string()),
            _ => None,
        };
        let s = Settings::resolve(&flags, env).unwrap();
        assert_eq!(s.port, 9100);
        assert_eq!(s.data_dir, PathBuf::from("/env/dir"));

        flags.port = Some(9200);
        flags.data_dir = Some("/flag/dir".into());
        let s = Settings::resolve(&flags, env).unwrap();
        assert_eq!(s.port, 9200);
        assert_eq!(s.data_dir, PathBuf::from("/flag/dir"));
    }

    #[test]
    fn bad_inputs() {
        let env = |k: &str| (k == ENV_PORT).then(|| "http".to_string());
        assert!(Settings::resolve(&Overrides::default(), env).is_err());
        let flags = Overrides {
            provider: Some(ProviderKind::External),
            ..Default::default()
        };
        assert!(Settings::resolve(&flags, no_env).is_err());
        assert!(ConfigFile::parse("[server]\nportt = 1").is_err());
        assert!(ConfigFile::parse("blue_factr = 1").is_err());
    }
}
