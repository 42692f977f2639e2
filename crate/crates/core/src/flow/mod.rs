//! Explicit mean curvature flow `∂ₜx = H` of closed meshes, with the
//! recorded series (area, `∫|H|²`, `max|H|`, sampled `λ` and `κ`) used by
//! the verification harness.
//!
//! Each step is forward Euler with `dt = dt_safety·h_min²/2`, capped so the
//! run lands exactly on `t_end` and on every record time. Sphere vertices
//! are renormalized after the step; torus vertices are re-wrapped and their
//! triangle lifts recomputed.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::Ambient;
use crate::error::{invalid, Error, Result};
use crate::functionals::{area_growth, entropy, SearchConfig};
use crate::heat_kernel::KernelConfig;
use crate::linalg::{self, Vec4};
use crate::surface::{mean_curvature, CurvatureField, SurfaceMesh};

#[cfg(test)]
mod tests;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Fraction of the parabolic step bound `h_min²/2`, in (0, 1].
    pub dt_safety: f64,
    /// Record every this many steps (ignored when `record_interval` is set).
    pub record_every: usize,
    /// Record at every multiple of this time instead of counting steps.
    pub record_interval: Option<f64>,
    /// Sample `λ` and `κ` at every this-many-th record (0: never). The
    /// final record is always sampled when this is non-zero.
    pub lambda_every: usize,
    /// Keep the mesh at every this-many-th record (0: none). Kept meshes
    /// feed the pairwise monotonicity checks.
    pub snapshot_every: usize,
    pub t_end: f64,
    /// Stop once `max|H|` exceeds this.
    pub max_curvature: f64,
    pub min_area: f64,
    pub min_quality: f64,
    pub max_steps: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            dt_safety: 0.2,
            record_every: 10,
            record_interval: None,
            lambda_every: 0,
            snapshot_every: 0,
            t_end: 1.0,
            max_curvature: 1e3,
            min_area: 1e-8,
            min_quality: 0.05,
            max_steps: 10_000_000,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return invalid(format!("dt_safety must lie in (0, 1], got {}", self.dt_safety));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return invalid(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.record_every == 0 {
            return invalid("record_every must be ≥ 1");
        }
        if let Some(r) = self.record_interval {
            if !(r > 0.0) {
                return invalid(format!("record_interval must be positive, got {r}"));
            }
        }
        if !(self.min_quality >= 0.0 && self.min_quality < 1.0) {
            return invalid("min_quality must lie in [0, 1)");
        }
        Ok(())
    }
}

/// A mesh at a flow time.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub mesh: SurfaceMesh,
    pub time: f64,
}

impl FlowState {
    pub fn new(mesh: SurfaceMesh) -> Self {
        Self { mesh, time: 0.0 }
    }
}

/// Parabolic step bound `dt_safety·h_min²/2`.
pub fn stable_dt(mesh: &SurfaceMesh, dt_safety: f64) -> f64 {
    let (_, h_min) = mesh.edge_length_range();
    dt_safety * h_min * h_min / 2.0
}

/// Moves every vertex by `dt·H` and re-projects onto the ambient. The
/// input state is untouched, so on error the caller still holds the last
/// valid state.
pub fn advance(state: &FlowState, field: &CurvatureField, dt: f64, min_quality: f64) -> Result<FlowState> {
    let mesh = &state.mesh;
    let sphere = *mesh.ambient() == Ambient::RoundSphere3;
    let positions: Vec<Vec4> = mesh
        .vertices()
        .par_iter()
        .zip(&field.vectors)
        .map(|(v, h)| {
            let p = linalg::axpy(v.vec4(), dt, h);
            if sphere {
                linalg::normalized(&p)
            } else {
                p
            }
        })
        .collect();
    let time = state.time + dt;
    if positions.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::FlowStopped { time, reason: "non-finite vertex position".into() });
    }
    let next = mesh
        .with_positions(&positions)
        .map_err(|e| Error::FlowStopped { time, reason: format!("invalid mesh after step: {e}") })?;
    let q = next.min_quality();
    if q < min_quality {
        return Err(Error::FlowStopped { time, reason: format!("triangle quality collapsed to {q:.3e}") });
    }
    Ok(FlowState { mesh: next, time })
}

/// One step of size `min(stable_dt, t_end − time)`.
pub fn flow_step(state: &FlowState, cfg: &FlowConfig) -> Result<FlowState> {
    cfg.validate()?;
    let remaining = cfg.t_end - state.time;
    if !(remaining > 0.0) {
        return invalid(format!("flow already at t_end = {}", cfg.t_end));
    }
    let dt = stable_dt(&state.mesh, cfg.dt_safety).min(remaining);
    let field = mean_curvature(&state.mesh);
    advance(state, &field, dt, cfg.min_quality)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowRecord {
    pub step: usize,
    pub time: f64,
    pub area: f64,
    pub h2_integral: f64,
    pub h_max: f64,
    pub lambda: Option<f64>,
    pub kappa: Option<f64>,
    /// Size of the step that arrived here (0 for the initial record).
    pub dt: f64,
    pub min_quality: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopReason {
    ReachedEnd,
    CurvatureBlowUp,
    AreaCollapse,
    QualityCollapse,
    NonFinite,
    StepLimit,
}

#[derive(Clone, Debug)]
pub struct FlowSeries {
    pub records: Vec<FlowRecord>,
    /// `(record index, mesh)` for kept snapshots; the initial mesh is
    /// always kept when snapshots are on.
    pub snapshots: Vec<(usize, SurfaceMesh)>,
    pub final_mesh: SurfaceMesh,
    pub stop: StopReason,
    /// Message of the error that stopped the run, if any.
    pub failure: Option<String>,
    pub steps: usize,
}

/// Functionals sampled along a run.
#[derive(Clone, Debug, Default)]
pub struct SampleConfig {
    pub search: SearchConfig,
    pub kernel: KernelConfig,
}

impl FlowSeries {
    pub fn initial_area(&self) -> f64 {
        self.records[0].area
    }

    /// Times of the `k` records with the smallest `∫|H|²`, in time order:
    /// the discrete stand-in for a sequence `t_i` along which `∫|H|² → 0`.
    pub fn min_h2_times(&self, k: usize) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..self.records.len()).collect();
        idx.sort_by(|&a, &b| self.records[a].h2_integral.total_cmp(&self.records[b].h2_integral).then(a.cmp(&b)));
        idx.truncate(k);
        idx.sort_unstable();
        idx.into_iter().map(|i| self.records[i].time).collect()
    }

    /// Records carrying a `λ` sample.
    pub fn lambda_samples(&self) -> Vec<(f64, f64)> {
        self.records.iter().filter_map(|r| r.lambda.map(|l| (r.time, l))).collect()
    }

    /// `(time, mesh)` for every kept snapshot.
    pub fn snapshot_meshes(&self) -> Vec<(f64, &SurfaceMesh)> {
        self.snapshots.iter().map(|(i, m)| (self.records[*i].time, m)).collect()
    }

    /// CSV with columns `time,area,h2_integral,h_max,lambda,kappa,dt,min_quality`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,area,h2_integral,h_max,lambda,kappa,dt,min_quality\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:.12e},{:.12e},{:.12e},{:.12e},{},{},{:.12e},{:.12e}",
                r.time,
                r.area,
                r.h2_integral,
                r.h_max,
                opt(r.lambda),
                opt(r.kappa),
                r.dt,
                r.min_quality
            );
        }
        out
    }
}

fn stop_reason(e: &Error) -> StopReason {
    match e {
        Error::FlowStopped { reason, .. } if reason.contains("non-finite") => StopReason::NonFinite,
        _ => StopReason::QualityCollapse,
    }
}

struct Recorder<'a> {
    cfg: &'a FlowConfig,
    sample: Option<&'a SampleConfig>,
    records: Vec<FlowRecord>,
    snapshots: Vec<(usize, SurfaceMesh)>,
}

impl Recorder<'_> {
    fn push(&mut self, state: &FlowState, field: &CurvatureField, step: usize, dt: f64, last: bool) -> Result<()> {
        let index = self.records.len();
        let every = self.cfg.lambda_every;
        let (lambda, kappa) = match self.sample {
            Some(s) if every > 0 && (index.is_multiple_of(every) || last) => (
                Some(entropy(&state.mesh, &s.search, &s.kernel)?.lambda),
                Some(area_growth(&state.mesh, &s.search)?.kappa),
            ),
            _ => (None, None),
        };
        self.records.push(FlowRecord {
            step,
            time: state.time,
            area: state.mesh.total_area(),
            h2_integral: field.h2_integral(),
            h_max: field.max_norm(),
            lambda,
            kappa,
            dt,
            min_quality: state.mesh.min_quality(),
        });
        let keep = self.cfg.snapshot_every;
        if keep > 0 && (index.is_multiple_of(keep) || last) {
            self.snapshots.push((index, state.mesh.clone()));
        }
        Ok(())
    }
}

/// Integrates from `initial` until `t_end` or a stop condition. Errors only
/// on invalid configuration; a run cut short by a failing step returns the
/// series up to the last valid state with `failure` set.
pub fn run_flow(initial: &SurfaceMesh, cfg: &FlowConfig, sample: Option<&SampleConfig>) -> Result<FlowSeries> {
    cfg.validate()?;
    if cfg.lambda_every > 0 && sample.is_none() {
        return invalid("lambda_every > 0 needs a sample configuration");
    }
    let mut state = FlowState::new(initial.clone());
    let mut rec = Recorder { cfg, sample, records: Vec::new(), snapshots: Vec::new() };
    let mut field = mean_curvature(&state.mesh);
    let mut steps = 0usize;
    let mut last_dt = 0.0;
    let mut record_count = 1usize;
    let record_time = |k: usize| cfg.record_interval.map(|r| (k as f64 * r).min(cfg.t_end));
    let mut failure = None;

    let mut stop = None;
    let mut recorded_at = 0usize;
    rec.push(&state, &field, 0, 0.0, false)?;
    loop {
        if state.time >= cfg.t_end {
            stop = stop.or(Some(StopReason::ReachedEnd));
        } else if field.max_norm() > cfg.max_curvature {
            stop = Some(StopReason::CurvatureBlowUp);
        } else if state.mesh.total_area() < cfg.min_area {
            stop = Some(StopReason::AreaCollapse);
        } else if steps >= cfg.max_steps {
            stop = Some(StopReason::StepLimit);
        }
        if stop.is_some() {
            break;
        }
        let mut dt = stable_dt(&state.mesh, cfg.dt_safety).min(cfg.t_end - state.time);
        if let Some(tr) = record_time(record_count) {
            dt = dt.min(tr - state.time);
        }
        match advance(&state, &field, dt, cfg.min_quality) {
            Ok(next) => {
                state = next;
                steps += 1;
                last_dt = dt;
            }
            Err(e) => {
                stop = Some(stop_reason(&e));
                failure = Some(e.to_string());
                break;
            }
        }
        field = mean_curvature(&state.mesh);
        // snap to the target times so accumulated roundoff never leaves a
        // sliver step behind
        if (cfg.t_end - state.time).abs() <= 1e-12 * cfg.t_end {
            state.time = cfg.t_end;
        }
        let due = match record_time(record_count) {
            Some(tr) if state.time >= tr - 1e-12 * tr => {
                state.time = state.time.max(tr);
                record_count += 1;
                true
            }
            Some(_) => false,
            None => steps.is_multiple_of(cfg.record_every),
        };
        let at_end = state.time >= cfg.t_end;
        if due || at_end {
            rec.push(&state, &field, steps, last_dt, at_end)?;
            recorded_at = steps;
        }
    }
    if recorded_at != steps {
        rec.push(&state, &field, steps, last_dt, true)?;
    } else if cfg.lambda_every > 0 && rec.records.last().is_some_and(|r| r.lambda.is_none()) {
        // the last record was taken as a regular one; re-take it sampled
        rec.records.pop();
        if rec.snapshots.last().is_some_and(|s| s.0 == rec.records.len()) {
            rec.snapshots.pop();
        }
        rec.push(&state, &field, steps, last_dt, true)?;
    }
    let stop = stop.unwrap_or(StopReason::ReachedEnd);
    Ok(FlowSeries { records: rec.records, snapshots: rec.snapshots, final_mesh: state.mesh, stop, failure, steps })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstVariationEntry {
    pub time: f64,
    /// Three-point (non-uniform) difference of the recorded areas.
    pub area_rate: f64,
    pub minus_h2: f64,
    pub relative_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstVariationReport {
    pub max_relative_defect: f64,
    /// Largest `max(|d area/dt|, ∫|H|²)` seen; relative defects are only
    /// formed where this exceeds `floor`.
    pub max_magnitude: f64,
    pub floor: f64,
    pub entries: Vec<FirstVariationEntry>,
}

/// Compares `d(area)/dt` with `−∫|H|²` at interior records. Where both
/// sides are below `floor` (static runs) the defect counts as zero.
pub fn first_variation_check(series: &FlowSeries, floor: f64) -> Result<FirstVariationReport> {
    let r = &series.records;
    if r.len() < 3 {
        return invalid(format!("first-variation check needs ≥ 3 records, got {}", r.len()));
    }
    let mut entries = Vec::with_capacity(r.len() - 2);
    let mut max_rel: f64 = 0.0;
    let mut max_mag: f64 = 0.0;
    for k in 1..r.len() - 1 {
        let (h1, h2) = (r[k].time - r[k - 1].time, r[k + 1].time - r[k].time);
        if !(h1 > 0.0 && h2 > 0.0) {
            continue;
        }
        let rate = -h2 / (h1 * (h1 + h2)) * r[k - 1].area
            + (h2 - h1) / (h1 * h2) * r[k].area
            + h1 / (h2 * (h1 + h2)) * r[k + 1].area;
        let minus_h2 = -r[k].h2_integral;
        let mag = rate.abs().max(minus_h2.abs());
        let rel = if mag > floor { (rate - minus_h2).abs() / mag } else { 0.0 };
        max_rel = max_rel.max(rel);
        max_mag = max_mag.max(mag);
        entries.push(FirstVariationEntry { time: r[k].time, area_rate: rate, minus_h2, relative_defect: rel });
    }
    Ok(FirstVariationReport { max_relative_defect: max_rel, max_magnitude: max_mag, floor, entries })
}
