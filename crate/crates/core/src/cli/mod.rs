//! Configuration, run orchestration and manifests behind the `mcflab`
//! binary. Runs are deterministic in `(config, seed)`; every output is
//! inventoried with a SHA-256 digest.

mod config;
mod run;

pub use config::{MeshSource, RunConfig, KEYS};
pub use run::{
    exit_code, load_config, run, Command, OutputFile, RunManifest, StageTiming, EXIT_CONFIG, EXIT_GATING, EXIT_NUMERIC,
    EXIT_OK,
};

#[cfg(test)]
mod tests;
