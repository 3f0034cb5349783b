//! Subcommand implementations.

pub mod detect;
pub mod ingest;
pub mod signals;
pub mod simulate;
pub mod slopes;

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use crate::config::RunConfig;
use crate::io::atomic_write;

/// Flags shared by the pipeline subcommands.
#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Run-configuration TOML file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config file and NID_OUT_DIR).
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Base RNG seed (overrides the config file).
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Resolved configuration plus the directory outputs go to.
pub struct Ctx {
    pub cfg: RunConfig,
    pub out_dir: PathBuf,
}

/// Loads the config file and applies the shared flag overrides. Each
/// command applies its own overrides on top, then calls [`Ctx::echo_config`]
/// before doing any work.
pub fn prepare(common: &CommonArgs) -> Result<Ctx> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let out_dir = cfg.resolve_out_dir(common.out_dir.as_deref());
    cfg.out_dir = Some(out_dir.clone());
    Ok(Ctx { cfg, out_dir })
}

impl Ctx {
    /// Echoes the fully resolved configuration next to the outputs so the
    /// run can be reproduced from the output directory alone.
    pub fn echo_config(&self) -> Result<()> {
        let text = toml::to_string_pretty(&self.cfg)?;
        atomic_write(&self.out_dir.join("resolved-config.toml"), text.as_bytes())
    }
}
