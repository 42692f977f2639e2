use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcflab::cli::{exit_code, load_config, run, Command};

/// Heat-kernel entropy, area growth and mean curvature flow experiments.
///
/// Settings come from an optional `key = value` file; flags override it.
#[derive(Parser)]
#[command(name = "mcflab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Generate a built-in mesh as OFF.
    MakeMesh,
    /// Check symmetry, normalization, semigroup and PDE residual of the kernel.
    KernelSelftest,
    /// Entropy λ of each mesh.
    Entropy,
    /// Area-growth bound κ of each mesh.
    AreaGrowth,
    /// λ/κ equivalence over the meshes plus the Li-Yau scan of the ambient.
    CheckBounds,
    /// Run mean curvature flow and write the series CSV.
    Flow,
    /// Run named verification suites.
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::MakeMesh => Command::MakeMesh,
            Cmd::KernelSelftest => Command::KernelSelftest,
            Cmd::Entropy => Command::Entropy,
            Cmd::AreaGrowth => Command::AreaGrowth,
            Cmd::CheckBounds => Command::CheckBounds,
            Cmd::Flow => Command::Flow,
            Cmd::Verify => Command::Verify,
        }
    }
}

/// Every option is a config key; values are validated by the config parser.
#[derive(Args)]
struct Opts {
    /// `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "MCFLAB_THREADS")]
    threads: Option<String>,
    #[arg(long, global = true)]
    out_dir: Option<String>,
    /// `euclidean3`, `torus:Lx,Ly,Lz` or `sphere3`.
    #[arg(long, global = true)]
    ambient: Option<String>,
    /// OFF path or generator spec; `;` separates several.
    #[arg(long, global = true)]
    mesh: Option<String>,
    /// Normal perturbation `amp,mode`.
    #[arg(long, global = true)]
    perturb: Option<String>,
    #[arg(long, global = true)]
    t_min: Option<String>,
    #[arg(long, global = true)]
    t_max: Option<String>,
    #[arg(long, global = true)]
    r_min: Option<String>,
    #[arg(long, global = true)]
    r_max: Option<String>,
    /// Background lattice size of the center scan.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    quad_order: Option<String>,
    #[arg(long, global = true)]
    t_end: Option<String>,
    #[arg(long, global = true)]
    dt_safety: Option<String>,
    #[arg(long, global = true)]
    record_every: Option<String>,
    #[arg(long, global = true)]
    record_interval: Option<String>,
    #[arg(long, global = true)]
    lambda_every: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    li_yau_samples: Option<String>,
    /// Comma-separated suite names, or `all`.
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Report file name inside the output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    final_mesh: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
}

impl Opts {
    fn overrides(&self) -> Vec<(String, String)> {
        [
            ("threads", &self.threads),
            ("out_dir", &self.out_dir),
            ("ambient", &self.ambient),
            ("mesh", &self.mesh),
            ("perturb", &self.perturb),
            ("t_min", &self.t_min),
            ("t_max", &self.t_max),
            ("r_min", &self.r_min),
            ("r_max", &self.r_max),
            ("grid", &self.grid),
            ("quad_order", &self.quad_order),
            ("t_end", &self.t_end),
            ("dt_safety", &self.dt_safety),
            ("record_every", &self.record_every),
            ("record_interval", &self.record_interval),
            ("lambda_every", &self.lambda_every),
            ("samples", &self.samples),
            ("li_yau_samples", &self.li_yau_samples),
            ("suite", &self.suite),
            ("out", &self.out),
            ("final_mesh", &self.final_mesh),
            ("seed", &self.seed),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(cli.opts.config.as_deref(), &cli.opts.overrides()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("mcflab: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let manifest = run(cli.command.into(), &cfg);
    for o in &manifest.outputs {
        eprintln!("wrote {} ({} bytes, sha256 {})", cfg.out_dir.join(&o.path).display(), o.bytes, &o.sha256[..16]);
    }
    if let Some(e) = &manifest.error {
        eprintln!("mcflab {}: {e}", manifest.command);
    }
    ExitCode::from(manifest.exit_code as u8)
}
