use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::flow::{run_flow, SampleConfig};
use crate::functionals::{area_growth, entropy, equivalence_check, li_yau_check, LiYauSpec};
use crate::heat_kernel::{kernel_selftest, KernelConfig, SelftestSpec};
use crate::surface::write_off;
use crate::verify::suites::{all_pass, run_suite, to_json_lines, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATING: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Kernel self-test tolerances.
const SYMMETRY_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-8;
const SEMIGROUP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    MakeMesh,
    KernelSelftest,
    Entropy,
    AreaGrowth,
    CheckBounds,
    Flow,
    Verify,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::MakeMesh,
        Command::KernelSelftest,
        Command::Entropy,
        Command::AreaGrowth,
        Command::CheckBounds,
        Command::Flow,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::MakeMesh => "make-mesh",
            Command::KernelSelftest => "kernel-selftest",
            Command::Entropy => "entropy",
            Command::AreaGrowth => "area-growth",
            Command::CheckBounds => "check-bounds",
            Command::Flow => "flow",
            Command::Verify => "verify",
        }
    }

    fn default_output(self) -> &'static str {
        match self {
            Command::MakeMesh => "mesh.off",
            Command::KernelSelftest => "kernel-selftest.jsonl",
            Command::Entropy => "entropy.jsonl",
            Command::AreaGrowth => "area-growth.jsonl",
            Command::CheckBounds => "check-bounds.jsonl",
            Command::Flow => "series.csv",
            Command::Verify => "verify.jsonl",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown subcommand `{s}`")))
    }
}

/// Exit code for an error: configuration and input problems are 2,
/// numeric and runtime failures 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Mesh(_) => EXIT_CONFIG,
        Error::NumericOverflow(_) | Error::FlowStopped { .. } | Error::Io(_) => EXIT_NUMERIC,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
    /// False for outputs kept with a `.partial` suffix.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// The effective configuration as `key = value` lines.
    pub config: Vec<String>,
    pub stages: Vec<StageTiming>,
    pub outputs: Vec<OutputFile>,
    pub exit_code: i32,
    pub error: Option<String>,
}

impl RunManifest {
    pub const FILE: &'static str = "manifest.json";

    /// Digest of every output, in order; excludes timings.
    pub fn output_digests(&self) -> Vec<(String, String)> {
        self.outputs.iter().map(|o| (o.path.clone(), o.sha256.clone())).collect()
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Run<'a> {
    cfg: &'a RunConfig,
    dir: PathBuf,
    stages: Vec<StageTiming>,
    outputs: Vec<OutputFile>,
}

impl Run<'_> {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f();
        self.stages.push(StageTiming { stage: name.to_string(), seconds: start.elapsed().as_secs_f64() });
        out.map_err(|e| match e {
            Error::InvalidArgument(msg) => Error::InvalidArgument(format!("{name}: {msg}")),
            Error::NumericOverflow(msg) => Error::NumericOverflow(format!("{name}: {msg}")),
            other => other,
        })
    }

    /// Writes `name.partial`, then renames it to `name` when `complete`.
    fn write(&mut self, name: &str, content: &str, complete: bool) -> Result<()> {
        let partial = format!("{name}.partial");
        let target = self.dir.join(&partial);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&target, content)?;
        let path = if complete {
            fs::rename(&target, self.dir.join(name))?;
            name.to_string()
        } else {
            partial
        };
        self.outputs.push(OutputFile { path, bytes: content.len(), sha256: sha256_hex(content.as_bytes()), complete });
        Ok(())
    }

    fn report_name(&self, cmd: Command) -> String {
        self.cfg.out.clone().unwrap_or_else(|| cmd.default_output().to_string())
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data") + "\n"
}

/// Runs one subcommand, writes its outputs and `manifest.json` into
/// `out_dir`, and returns the manifest (whose `exit_code` is the process
/// exit code). Honors `cfg.threads` with a dedicated thread pool.
pub fn run(cmd: Command, cfg: &RunConfig) -> RunManifest {
    let pool = cfg.threads.map(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build());
    let mut run = Run { cfg, dir: cfg.out_dir.clone(), stages: Vec::new(), outputs: Vec::new() };
    let result = match pool {
        Some(Ok(pool)) => pool.install(|| execute(cmd, &mut run)),
        Some(Err(e)) => Err(Error::Config { key: "threads".into(), msg: e.to_string() }),
        None => execute(cmd, &mut run),
    };
    let (exit_code, error) = match result {
        Ok(true) => (EXIT_OK, None),
        Ok(false) => (EXIT_GATING, None),
        Err(e) => (exit_code(&e), Some(e.to_string())),
    };
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cmd.name(),
        config: cfg.render().lines().map(str::to_string).collect(),
        stages: run.stages,
        outputs: run.outputs,
        exit_code,
        error,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("plain data") + "\n";
    if fs::create_dir_all(&run.dir).and_then(|_| fs::write(run.dir.join(RunManifest::FILE), text)).is_err() && exit_code == 0 {
        return RunManifest { exit_code: EXIT_NUMERIC, error: Some("cannot write manifest".into()), ..manifest };
    }
    manifest
}

/// Returns whether every gating check passed.
fn execute(cmd: Command, run: &mut Run) -> Result<bool> {
    let cfg = run.cfg;
    let kernel = KernelConfig::default();
    let out = run.report_name(cmd);
    match cmd {
        Command::MakeMesh => {
            let meshes = run.stage("mesh", || cfg.meshes())?;
            if meshes.len() == 1 {
                run.write(&out, &write_off(&meshes[0]), true)?;
            } else {
                let stem = out.strip_suffix(".off").unwrap_or(&out).to_string();
                for (i, m) in meshes.iter().enumerate() {
                    run.write(&format!("{stem}-{i}.off"), &write_off(m), true)?;
                }
            }
            Ok(true)
        }
        Command::KernelSelftest => {
            let spec = SelftestSpec {
                sample_count: cfg.samples,
                t_min: cfg.t_min.unwrap_or(0.01),
                t_max: cfg.t_max.unwrap_or(10.0),
                seed: cfg.seed,
            };
            let report = run.stage("kernel-selftest", || kernel_selftest(&cfg.ambient, &kernel, &spec))?;
            let pass = report.max_symmetry_err < SYMMETRY_TOL
                && report.max_normalization_err < NORMALIZATION_TOL
                && report.max_semigroup_err < SEMIGROUP_TOL;
            let mut text: String = report.samples.iter().map(json_line).collect();
            text += &json_line(&serde_json::json!({
                "summary": true,
                "ambient": report.ambient,
                "max_symmetry_err": report.max_symmetry_err,
                "max_normalization_err": report.max_normalization_err,
                "max_semigroup_err": report.max_semigroup_err,
                "max_pde_residual": report.max_pde_residual,
                "pde_residual_scale": report.pde_residual_scale,
                "pass": pass,
            }));
            run.write(&out, &text, true)?;
            Ok(pass)
        }
        Command::Entropy | Command::AreaGrowth => {
            let meshes = run.stage("mesh", || cfg.meshes())?;
            let mut text = String::new();
            for (i, m) in meshes.iter().enumerate() {
                let search = cfg.search_for(m)?;
                let line = if cmd == Command::Entropy {
                    run.stage(&format!("entropy {i}"), || entropy(m, &search, &kernel)).map(|r| json_line(&r))
                } else {
                    run.stage(&format!("area-growth {i}"), || area_growth(m, &search)).map(|r| json_line(&r))
                };
                match line {
                    Ok(l) => text += &l,
                    Err(e) => {
                        run.write(&out, &text, false)?;
                        return Err(e);
                    }
                }
            }
            run.write(&out, &text, true)?;
            Ok(true)
        }
        Command::CheckBounds => {
            let meshes = run.stage("mesh", || cfg.meshes())?;
            let search = cfg.search_for(&meshes[0])?;
            let eq = run.stage("equivalence", || equivalence_check(&meshes, &search, &kernel))?;
            let spec = LiYauSpec { samples: cfg.li_yau_samples, seed: cfg.seed, ..Default::default() };
            let ly = run.stage("li-yau", || li_yau_check(&cfg.ambient, &spec, &kernel))?;
            let text = json_line(&serde_json::json!({ "check": "equivalence", "report": eq }))
                + &json_line(&serde_json::json!({ "check": "li-yau", "report": ly }));
            run.write(&out, &text, true)?;
            Ok(eq.pass && ly.pass)
        }
        Command::Flow => {
            let meshes = run.stage("mesh", || cfg.meshes())?;
            if meshes.len() != 1 {
                return Err(Error::Config { key: "mesh".into(), msg: "flow takes exactly one mesh".into() });
            }
            let flow_cfg = cfg.flow_config()?;
            let sample = if cfg.lambda_every > 0 {
                Some(SampleConfig { search: cfg.search_for(&meshes[0])?, kernel })
            } else {
                None
            };
            let series = run.stage("flow", || run_flow(&meshes[0], &flow_cfg, sample.as_ref()))?;
            let complete = series.failure.is_none();
            run.write(&out, &series.to_csv(), complete)?;
            if let Some(name) = &cfg.final_mesh {
                run.write(name, &write_off(&series.final_mesh), complete)?;
            }
            match series.failure {
                None => Ok(true),
                Some(reason) => {
                    let time = series.records.last().map_or(0.0, |r| r.time);
                    Err(Error::FlowStopped { time, reason })
                }
            }
        }
        Command::Verify => {
            let opts = SuiteOptions { seed: cfg.seed, kernel };
            let mut text = String::new();
            let mut pass = true;
            for name in &cfg.suite {
                match run.stage(name, || run_suite(name, &opts)) {
                    Ok(a) => {
                        pass &= all_pass(&a);
                        text += &to_json_lines(&a);
                    }
                    Err(e) => {
                        run.write(&out, &text, false)?;
                        return Err(e);
                    }
                }
            }
            run.write(&out, &text, true)?;
            Ok(pass)
        }
    }
}

/// Reads the optional config file and builds the effective config.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let text = match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Error::Config { key: "config".into(), msg: format!("cannot read {}: {e}", p.display()) })?,
        None => String::new(),
    };
    RunConfig::parse(&text, overrides)
}
