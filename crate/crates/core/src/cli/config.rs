use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::ambient::Ambient;
use crate::error::{Error, Result};
use crate::flow::FlowConfig;
use crate::functionals::{SearchConfig, MAX_LATTICE_POINTS};
use crate::surface::{load_mesh, perturb, Shape, SurfaceMesh};
use crate::verify::suites::SUITES;

/// A mesh given either as an OFF file or as a generator spec.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Generator(Shape),
    File(PathBuf),
}

impl MeshSource {
    fn parse(s: &str) -> Self {
        match s.parse::<Shape>() {
            Ok(shape) => MeshSource::Generator(shape),
            Err(_) => MeshSource::File(PathBuf::from(s)),
        }
    }

    fn render(&self) -> String {
        match self {
            MeshSource::Generator(shape) => shape.to_string(),
            MeshSource::File(p) => p.display().to_string(),
        }
    }
}

/// Everything a run needs. Every field has a default, so the empty config
/// is runnable; `seed` drives all sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub ambient: Ambient,
    /// Empty means the ambient's natural shape.
    pub mesh: Vec<MeshSource>,
    pub perturb: Option<(f64, u32)>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub grid: usize,
    pub quad_order: usize,
    pub t_end: f64,
    pub dt_safety: f64,
    pub record_every: usize,
    pub record_interval: Option<f64>,
    pub lambda_every: usize,
    /// Kernel self-test samples.
    pub samples: usize,
    pub li_yau_samples: usize,
    pub suite: Vec<String>,
    pub out_dir: PathBuf,
    /// Report file name inside `out_dir`; defaults per subcommand.
    pub out: Option<String>,
    pub final_mesh: Option<String>,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let flow = FlowConfig::default();
        Self {
            ambient: Ambient::euclidean(3).expect("valid dimension"),
            mesh: Vec::new(),
            perturb: None,
            t_min: None,
            t_max: None,
            r_min: None,
            r_max: None,
            grid: SearchConfig::default().lattice_points,
            quad_order: SearchConfig::default().quad_order,
            t_end: flow.t_end,
            dt_safety: flow.dt_safety,
            record_every: flow.record_every,
            record_interval: None,
            lambda_every: 0,
            samples: 25,
            li_yau_samples: 1000,
            suite: SUITES.iter().map(|s| s.to_string()).collect(),
            out_dir: PathBuf::from("."),
            out: None,
            final_mesh: None,
            seed: 0,
            threads: None,
        }
    }
}

pub const KEYS: [&str; 22] = [
    "ambient",
    "mesh",
    "perturb",
    "t_min",
    "t_max",
    "r_min",
    "r_max",
    "grid",
    "quad_order",
    "t_end",
    "dt_safety",
    "record_every",
    "record_interval",
    "lambda_every",
    "samples",
    "li_yau_samples",
    "suite",
    "out_dir",
    "out",
    "final_mesh",
    "seed",
    "threads",
];

fn config_err<T>(key: &str, msg: impl Into<String>) -> Result<T> {
    Err(Error::Config { key: key.to_string(), msg: msg.into() })
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse::<T>().or_else(|_| config_err(key, format!("cannot parse `{value}`")))
}

fn optional(value: &str) -> Option<&str> {
    (!value.is_empty() && value != "none").then_some(value)
}

impl RunConfig {
    /// Sets one key from its textual value. Keys accept `-` for `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let key = key.as_str();
        let value = value.trim();
        match key {
            "ambient" => {
                self.ambient = value.parse().or_else(|e: Error| config_err(key, e.to_string()))?;
            }
            "mesh" => {
                self.mesh = value.split(';').map(str::trim).filter(|s| !s.is_empty()).map(MeshSource::parse).collect();
            }
            "perturb" => {
                self.perturb = match optional(value) {
                    None => None,
                    Some(v) => {
                        let (a, m) = v.split_once(',').ok_or_else(|| Error::Config {
                            key: key.into(),
                            msg: format!("expected `amp,mode`, got `{v}`"),
                        })?;
                        Some((parse_value(key, a.trim())?, parse_value(key, m.trim())?))
                    }
                }
            }
            "t_min" | "t_max" | "r_min" | "r_max" | "record_interval" => {
                let v = optional(value).map(|v| parse_value::<f64>(key, v)).transpose()?;
                if v.is_some_and(|x| !(x.is_finite() && x > 0.0)) {
                    return config_err(key, "must be a positive number");
                }
                match key {
                    "t_min" => self.t_min = v,
                    "t_max" => self.t_max = v,
                    "r_min" => self.r_min = v,
                    "r_max" => self.r_max = v,
                    _ => self.record_interval = v,
                }
            }
            "grid" => self.grid = parse_value(key, value)?,
            "quad_order" => self.quad_order = parse_value(key, value)?,
            "t_end" => self.t_end = parse_value(key, value)?,
            "dt_safety" => self.dt_safety = parse_value(key, value)?,
            "record_every" => self.record_every = parse_value(key, value)?,
            "lambda_every" => self.lambda_every = parse_value(key, value)?,
            "samples" => self.samples = parse_value(key, value)?,
            "li_yau_samples" => self.li_yau_samples = parse_value(key, value)?,
            "suite" => {
                let names: Vec<String> = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                self.suite = if names.iter().any(|n| n == "all") { SUITES.iter().map(|s| s.to_string()).collect() } else { names };
            }
            "out_dir" => self.out_dir = PathBuf::from(value),
            "out" => self.out = optional(value).map(str::to_string),
            "final_mesh" => self.final_mesh = optional(value).map(str::to_string),
            "seed" => self.seed = parse_value(key, value)?,
            "threads" => self.threads = optional(value).map(|v| parse_value(key, v)).transpose()?,
            _ => return config_err(key, format!("unknown key; known keys: {}", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Parses `key = value` lines (`#` starts a comment), then applies the
    /// overrides in order, then validates.
    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return config_err(&format!("line {}", i + 1), format!("expected `key = value`, got `{line}`"));
            };
            cfg.set(key, value)?;
        }
        for (key, value) in overrides {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (key, lo, hi) in [("t_min/t_max", self.t_min, self.t_max), ("r_min/r_max", self.r_min, self.r_max)] {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo >= hi {
                    return config_err(key, format!("window is empty: {lo} ≥ {hi}"));
                }
            }
        }
        if !(1..=MAX_LATTICE_POINTS).contains(&self.grid) {
            return config_err("grid", format!("must lie in 1..={MAX_LATTICE_POINTS}"));
        }
        if ![1, 3, 6].contains(&self.quad_order) {
            return config_err("quad_order", "must be 1, 3 or 6");
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return config_err("t_end", "must be positive");
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return config_err("dt_safety", "must lie in (0, 1]");
        }
        if self.record_every == 0 {
            return config_err("record_every", "must be at least 1");
        }
        if self.samples == 0 || self.li_yau_samples == 0 {
            return config_err(if self.samples == 0 { "samples" } else { "li_yau_samples" }, "must be at least 1");
        }
        if let Some(bad) = self.suite.iter().find(|s| !SUITES.contains(&s.as_str())) {
            return config_err("suite", format!("unknown suite `{bad}`; known: {}", SUITES.join(", ")));
        }
        if self.threads == Some(0) {
            return config_err("threads", "must be at least 1");
        }
        if let Some((amp, _)) = self.perturb {
            if !amp.is_finite() {
                return config_err("perturb", "amplitude must be finite");
            }
        }
        Ok(())
    }

    /// Canonical `key = value` rendering; parsing it gives back `self`.
    pub fn render(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| x.to_string());
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("ambient", self.ambient.to_string());
        line("mesh", self.mesh.iter().map(MeshSource::render).collect::<Vec<_>>().join("; "));
        line("perturb", self.perturb.map_or("none".to_string(), |(a, m)| format!("{a},{m}")));
        line("t_min", opt(self.t_min));
        line("t_max", opt(self.t_max));
        line("r_min", opt(self.r_min));
        line("r_max", opt(self.r_max));
        line("grid", self.grid.to_string());
        line("quad_order", self.quad_order.to_string());
        line("t_end", self.t_end.to_string());
        line("dt_safety", self.dt_safety.to_string());
        line("record_every", self.record_every.to_string());
        line("record_interval", opt(self.record_interval));
        line("lambda_every", self.lambda_every.to_string());
        line("samples", self.samples.to_string());
        line("li_yau_samples", self.li_yau_samples.to_string());
        line("suite", self.suite.join(","));
        line("out_dir", self.out_dir.display().to_string());
        line("out", self.out.clone().unwrap_or_else(|| "none".into()));
        line("final_mesh", self.final_mesh.clone().unwrap_or_else(|| "none".into()));
        line("seed", self.seed.to_string());
        line("threads", self.threads.map_or("none".to_string(), |t| t.to_string()));
        out
    }

    /// Builds every configured mesh, applying the perturbation if any.
    /// Relative file paths resolve against `out_dir`.
    pub fn meshes(&self) -> Result<Vec<SurfaceMesh>> {
        let sources =
            if self.mesh.is_empty() { vec![MeshSource::Generator(Shape::default_for(&self.ambient))] } else { self.mesh.clone() };
        sources
            .iter()
            .map(|src| {
                let m = match src {
                    MeshSource::Generator(shape) => shape.build(&self.ambient)?,
                    MeshSource::File(p) => load_mesh(self.out_dir.join(p), &self.ambient)?,
                };
                match self.perturb {
                    Some((amp, mode)) => perturb(&m, amp, mode),
                    None => Ok(m),
                }
            })
            .collect()
    }

    /// Search settings for one mesh; a window given on one side only is
    /// completed from the mesh's default window.
    pub fn search_for(&self, mesh: &SurfaceMesh) -> Result<SearchConfig> {
        let base = SearchConfig { lattice_points: self.grid, quad_order: self.quad_order, ..Default::default() };
        let (t0, t1) = base.t_window_for(mesh);
        let (r0, r1) = base.r_window_for(mesh);
        let t = (self.t_min.unwrap_or(t0), self.t_max.unwrap_or(t1));
        let r = (self.r_min.unwrap_or(r0), self.r_max.unwrap_or(r1));
        if t.0 >= t.1 {
            return config_err("t_min/t_max", format!("window [{}, {}] is empty for this mesh", t.0, t.1));
        }
        if r.0 >= r.1 {
            return config_err("r_min/r_max", format!("window [{}, {}] is empty for this mesh", r.0, r.1));
        }
        let search = SearchConfig {
            t_window: (self.t_min.is_some() || self.t_max.is_some()).then_some(t),
            r_window: (self.r_min.is_some() || self.r_max.is_some()).then_some(r),
            ..base
        };
        search.validate()?;
        Ok(search)
    }

    pub fn flow_config(&self) -> Result<FlowConfig> {
        let cfg = FlowConfig {
            t_end: self.t_end,
            dt_safety: self.dt_safety,
            record_every: self.record_every,
            record_interval: self.record_interval,
            lambda_every: self.lambda_every,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
