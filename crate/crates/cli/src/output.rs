use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Data(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration error: {e:#}"),
            CliError::Data(e) => write!(f, "data error: {e:#}"),
        }
    }
}

impl From<locnoise::Error> for CliError {
    fn from(e: locnoise::Error) -> Self {
        if e.is_config() {
            CliError::Config(e.into())
        } else {
            CliError::Data(e.into())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub trait ResultExt<T> {
    /// Attaches `what` as context, keeping the config/data classification.
    fn ctx(self, what: impl fmt::Display) -> CliResult<T>;
}

impl<T> ResultExt<T> for Result<T, locnoise::Error> {
    fn ctx(self, what: impl fmt::Display) -> CliResult<T> {
        self.map_err(|e| match CliError::from(e) {
            CliError::Config(e) => CliError::Config(e.context(what.to_string())),
            CliError::Data(e) => CliError::Data(e.context(what.to_string())),
        })
    }
}

pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Data)
}

pub fn read_config(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Config)
}

/// Output directory writer; every file is written to a temporary file in the
/// same directory and renamed into place.
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(CliError::Data)?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, contents: &[u8]) -> CliResult<()> {
        let target = self.dir.join(name);
        let result = (|| -> anyhow::Result<()> {
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
            tmp.write_all(contents)?;
            tmp.as_file().sync_all()?;
            tmp.persist(&target)?;
            Ok(())
        })();
        result
            .with_context(|| format!("writing {}", target.display()))
            .map_err(CliError::Data)?;
        log::info!("wrote {}", target.display());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}
