//! Named verification suites. Each runs a fixed set of experiments and
//! returns one [`Assertion`] per checked quantity, tagged with the
//! acceptance criterion it belongs to. Output is a pure function of the
//! options: no timings, no thread-dependent reductions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    almost_monotonicity_fit, entropy_monotonicity_check, f_monotonicity_check, harnack_diagnostic,
    harnack_euclidean_closed_form, minimal_limit_diagnostic, FSampleSpec, LimitVerdict, MonotonicityReport, TOL_MONO,
};
use crate::ambient::{Ambient, Point};
use crate::error::{invalid, Result};
use crate::flow::{first_variation_check, run_flow, FlowConfig, FlowSeries, SampleConfig};
use crate::functionals::{
    area_growth, entropy, equivalence_check, f_functional, li_yau_check, LiYauSpec, SearchConfig,
};
use crate::heat_kernel::{heat_kernel_with_form, kernel_selftest, KernelConfig, SelftestSpec, SeriesForm};
use crate::linalg;
use crate::surface::{
    clifford_torus, equator, flat_slice, geodesic_sphere, hausdorff_upper_bound, icosphere, perturb, SurfaceMesh,
};

pub const SUITES: [&str; 8] =
    ["kernels", "functionals", "flow-euclid", "flow-torus", "flow-sphere", "monotonicity", "equivalence", "harnack"];

/// Below this both sides of the first-variation identity count as zero.
const FIRST_VARIATION_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Lt,
    Le,
    Gt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub suite: &'static str,
    pub criterion: Option<u32>,
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
    /// Advisory assertions are reported but never fail a run.
    pub gating: bool,
}

#[derive(Clone, Debug)]
#[derive(Default)]
pub struct SuiteOptions {
    pub seed: u64,
    pub kernel: KernelConfig,
}


struct Collector {
    suite: &'static str,
    out: Vec<Assertion>,
}

impl Collector {
    fn check(&mut self, criterion: Option<u32>, name: impl Into<String>, value: f64, relation: Relation, bound: f64) {
        let pass = match relation {
            Relation::Lt => value < bound,
            Relation::Le => value <= bound,
            Relation::Gt => value > bound,
        };
        self.out.push(Assertion { suite: self.suite, criterion, name: name.into(), value, relation, bound, pass, gating: true });
    }

    fn lt(&mut self, criterion: u32, name: impl Into<String>, value: f64, bound: f64) {
        self.check(Some(criterion), name, value, Relation::Lt, bound);
    }

    fn advisory(&mut self, name: impl Into<String>, value: f64, relation: Relation, bound: f64) {
        self.check(None, name, value, relation, bound);
        self.out.last_mut().expect("just pushed").gating = false;
    }
}

/// Runs one named suite.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Vec<Assertion>> {
    let Some(&suite) = SUITES.iter().find(|s| **s == name) else {
        return invalid(format!("unknown suite `{name}`; known: {}", SUITES.join(", ")));
    };
    let mut c = Collector { suite, out: Vec::new() };
    match suite {
        "kernels" => kernels(&mut c, opts)?,
        "functionals" => functionals(&mut c, opts)?,
        "flow-euclid" => flow_euclid(&mut c)?,
        "flow-torus" => flow_torus(&mut c)?,
        "flow-sphere" => flow_sphere(&mut c)?,
        "monotonicity" => monotonicity(&mut c, opts)?,
        "equivalence" => equivalence(&mut c, opts)?,
        _ => harnack(&mut c, opts)?,
    }
    Ok(c.out)
}

/// One JSON object per line.
pub fn to_json_lines(assertions: &[Assertion]) -> String {
    assertions.iter().map(|a| serde_json::to_string(a).expect("plain data") + "\n").collect()
}

pub fn all_pass(assertions: &[Assertion]) -> bool {
    assertions.iter().all(|a| a.pass || !a.gating)
}

fn torus() -> Ambient {
    Ambient::flat_torus(&[1.0, 1.0, 1.0]).expect("valid periods")
}

fn euclid() -> Ambient {
    Ambient::euclidean(3).expect("valid dimension")
}

fn kernels(c: &mut Collector, opts: &SuiteOptions) -> Result<()> {
    let spec = SelftestSpec { sample_count: 25, t_min: 0.01, t_max: 10.0, seed: opts.seed };
    for ambient in [torus(), Ambient::sphere3()] {
        let r = kernel_selftest(&ambient, &opts.kernel, &spec)?;
        c.lt(1, format!("{ambient} symmetry"), r.max_symmetry_err, 1e-12);
        c.lt(1, format!("{ambient} normalization"), r.max_normalization_err, 1e-8);
        c.lt(1, format!("{ambient} semigroup"), r.max_semigroup_err, 1e-8);
        c.advisory(format!("{ambient} pde residual / expected scale"), r.max_pde_residual / r.pde_residual_scale, Relation::Lt, 10.0);
        c.lt(1, format!("{ambient} dual-series agreement"), dual_series_gap(&ambient, opts)?, 1e-8);
    }
    let e = kernel_selftest(&euclid(), &opts.kernel, &SelftestSpec { sample_count: 8, t_min: 0.01, t_max: 1.0, seed: opts.seed })?;
    c.check(None, "euclidean3 semigroup", e.max_semigroup_err, Relation::Lt, 1e-9);
    Ok(())
}

/// Largest |image − spectral| over a 25-point log grid in t ∈ [0.01, 10]
/// and seeded pairs, including coincident and (on S³) antipodal points.
fn dual_series_gap(ambient: &Ambient, opts: &SuiteOptions) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xd0a1);
    let mut pairs: Vec<(Point, Point)> = Vec::new();
    let base = match ambient {
        Ambient::RoundSphere3 => ambient.point(&[1.0, 0.0, 0.0, 0.0])?,
        _ => ambient.point(&[0.0, 0.0, 0.0])?,
    };
    pairs.push((base, base));
    if *ambient == Ambient::RoundSphere3 {
        pairs.push((base, ambient.point(&[-1.0, 0.0, 0.0, 0.0])?));
    }
    for _ in 0..6 {
        let y = match ambient {
            Ambient::RoundSphere3 => {
                let v = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
                ambient.project(&v)
            }
            _ => ambient.project(&[rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), 0.0]),
        };
        pairs.push((base, y));
    }
    let mut worst: f64 = 0.0;
    for t in crate::numerics::log_space(0.01, 10.0, 25) {
        for (x, y) in &pairs {
            let a = heat_kernel_with_form(ambient, x, y, t, &opts.kernel, SeriesForm::ImageSeries)?.value;
            let b = heat_kernel_with_form(ambient, x, y, t, &opts.kernel, SeriesForm::SpectralSeries)?.value;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn functionals(c: &mut Collector, opts: &SuiteOptions) -> Result<()> {
    let cfg = &opts.kernel;
    let sphere = icosphere(&euclid(), 1.0, 4, None)?;

    let exact = 4.0 / (1f64.exp() * (4.0 * PI).sqrt());
    let lam = entropy(&sphere, &SearchConfig::default(), cfg)?;
    c.lt(2, "icosphere λ relative error", (lam.lambda / exact - 1.0).abs(), 0.01);
    c.lt(2, "icosphere argmax_t relative error", (lam.argmax_t / 0.25 - 1.0).abs(), 0.1);
    c.check(None, "icosphere argmax_x distance to center", linalg::norm(lam.argmax_x.vec4()), Relation::Lt, 0.05);

    let limit = (4.0 * PI).powf(-0.5);
    for (label, mesh) in
        [("icosphere level 4", sphere.clone()), ("slice 64x64", flat_slice(&torus(), 64, 0.5)?), ("equator level 6", equator(6)?)]
    {
        let t = (4.0 * mesh.mesh_scale()).powi(2);
        let f = f_functional(&mesh, &mesh.vertices()[0], t, 6, cfg)?;
        c.lt(3, format!("{label} on-surface F at (4h)² relative to (4π)^(-1/2)"), (f.value / limit - 1.0).abs(), 0.02);
    }

    let search = SearchConfig::default();
    let k1 = area_growth(&sphere, &search)?.kappa;
    c.lt(4, "icosphere κ relative to 4π", (k1 / (4.0 * PI) - 1.0).abs(), 0.02);
    let k2 = area_growth(&icosphere(&euclid(), 2.0, 4, None)?, &search)?.kappa;
    c.lt(4, "κ change under dilation by 2", (k2 / k1 - 1.0).abs(), 0.02);
    let k3 = area_growth(&flat_slice(&torus(), 32, 0.5)?, &search)?.kappa;
    c.lt(4, "slice κ relative to π", (k3 / PI - 1.0).abs(), 0.02);

    let spec = LiYauSpec { samples: 1000, t_min: 0.01, t_max: 4.0, diagonal_every: 10, epsilon: 0.5, seed: opts.seed };
    for ambient in [torus(), Ambient::sphere3()] {
        let r = li_yau_check(&ambient, &spec, cfg)?;
        c.check(Some(11), format!("{ambient} Li-Yau c_low"), r.c_low, Relation::Gt, 0.01);
        c.lt(11, format!("{ambient} Li-Yau c_up"), r.c_up, 1e4);
        c.lt(11, format!("{ambient} Li-Yau violations"), r.violations as f64, 0.5);
        c.check(Some(11), format!("{ambient} on-diagonal H·V"), r.diagonal_low.unwrap_or(0.0), Relation::Gt, 0.0);
    }
    Ok(())
}

fn first_variation(c: &mut Collector, label: &str, series: &FlowSeries) -> Result<()> {
    let fv = first_variation_check(series, FIRST_VARIATION_FLOOR)?;
    c.lt(7, format!("{label} first-variation relative defect"), fv.max_relative_defect, 0.05);
    Ok(())
}

fn reached_end(c: &mut Collector, criterion: u32, label: &str, series: &FlowSeries) {
    c.lt(criterion, format!("{label} stopped early (1 = yes)"), series.failure.is_some() as u8 as f64, 0.5);
}

fn flow_euclid(c: &mut Collector) -> Result<()> {
    // R(t) = √(1 − 4t) reaches 0.3 at t = 0.91/4
    let t_end = (1.0 - 0.09) / 4.0;
    let m = icosphere(&euclid(), 1.0, 4, None)?;
    let cfg = FlowConfig { t_end, record_interval: Some(t_end / 40.0), snapshot_every: 1, ..Default::default() };
    let s = run_flow(&m, &cfg, None)?;
    reached_end(c, 5, "shrinking sphere", &s);
    let worst = s
        .snapshot_meshes()
        .iter()
        .map(|(t, mesh)| {
            let r = mesh.vertices().iter().map(|v| linalg::norm(v.vec4())).sum::<f64>() / mesh.vertex_count() as f64;
            (r / (1.0 - 4.0 * t).sqrt() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    c.lt(5, "shrinking sphere radius relative error", worst, 0.01);
    first_variation(c, "shrinking sphere", &s)?;
    let area_increase = s.records.windows(2).map(|w| (w[1].area - w[0].area) / w[0].area).fold(f64::NEG_INFINITY, f64::max);
    c.check(None, "shrinking sphere area increase per record", area_increase, Relation::Lt, 1e-6);
    Ok(())
}

fn static_run(c: &mut Collector, label: &str, mesh: &SurfaceMesh) -> Result<()> {
    let cfg = FlowConfig { t_end: 1.0, record_interval: Some(0.05), ..Default::default() };
    let s = run_flow(mesh, &cfg, None)?;
    reached_end(c, 6, label, &s);
    c.lt(6, format!("{label} Hausdorff drift over unit time"), hausdorff_upper_bound(mesh, &s.final_mesh)?, 1e-2);
    c.lt(6, format!("{label} max|H| over the run"), s.records.iter().map(|r| r.h_max).fold(0.0, f64::max), 0.05);
    first_variation(c, label, &s)
}

fn decay_run(c: &mut Collector, label: &str, mesh: &SurfaceMesh, record: f64) -> Result<()> {
    let cfg = FlowConfig { t_end: 2.0, record_interval: Some(record), ..Default::default() };
    let s = run_flow(mesh, &cfg, None)?;
    reached_end(c, 12, label, &s);
    let d = minimal_limit_diagnostic(&s, &s.final_mesh);
    c.lt(12, format!("{label} final max|H|"), d.h_max_final, 0.05);
    c.lt(12, format!("{label} final ∫|H|² / initial"), d.h2_final / d.h2_initial, 1e-3);
    c.lt(12, format!("{label} verdict inconclusive (1 = yes)"), (d.verdict != LimitVerdict::MinimalLimitConsistent) as u8 as f64, 0.5);
    first_variation(c, label, &s)
}

fn flow_torus(c: &mut Collector) -> Result<()> {
    let slice = flat_slice(&torus(), 32, 0.5)?;
    static_run(c, "torus slice", &slice)?;
    let bumpy = perturb(&flat_slice(&torus(), 32, 0.5)?, 0.05, 1)?;
    // the slowest mode decays like e^{−8π²t}; records are dense enough for
    // a three-point derivative of the area
    decay_run(c, "perturbed torus slice", &bumpy, 0.002)
}

fn flow_sphere(c: &mut Collector) -> Result<()> {
    let theta0 = PI / 3.0;
    // cos θ = cos θ₀ e^{2t} reaches θ = 0.3 at t = ½ ln(cos 0.3 / cos θ₀)
    let t_end = 0.5 * (0.3f64.cos() / theta0.cos()).ln();
    let m = geodesic_sphere(theta0, 4)?;
    let cfg = FlowConfig { t_end, record_interval: Some(t_end / 40.0), snapshot_every: 1, ..Default::default() };
    let s = run_flow(&m, &cfg, None)?;
    reached_end(c, 5, "geodesic sphere", &s);
    let worst = s
        .snapshot_meshes()
        .iter()
        .map(|(t, mesh)| {
            let theta = mesh.vertices().iter().map(|v| v[3].clamp(-1.0, 1.0).acos()).sum::<f64>() / mesh.vertex_count() as f64;
            (theta.cos() / (theta0.cos() * (2.0 * t).exp()) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    c.lt(5, "geodesic sphere cos θ relative error", worst, 0.02);
    first_variation(c, "geodesic sphere", &s)?;
    static_run(c, "equator", &equator(4)?)?;
    static_run(c, "Clifford torus", &clifford_torus(64)?)?;
    decay_run(c, "perturbed equator", &perturb(&equator(3)?, 0.05, 1)?, 0.002)
}

/// One flow run with sampled λ/κ and kept meshes for the pairwise checks.
fn sampled_run(mesh: &SurfaceMesh, t_end: f64, records: usize, search: &SearchConfig, kernel: &KernelConfig) -> Result<FlowSeries> {
    let cfg = FlowConfig {
        t_end,
        record_interval: Some(t_end / records as f64),
        lambda_every: 2,
        snapshot_every: 2,
        ..Default::default()
    };
    run_flow(mesh, &cfg, Some(&SampleConfig { search: search.clone(), kernel: *kernel }))
}

fn monotone_family(
    c: &mut Collector,
    label: &str,
    meshes: [SurfaceMesh; 2],
    t_end: f64,
    search: &SearchConfig,
    spec: &FSampleSpec,
    kernel: &KernelConfig,
) -> Result<()> {
    let mut f_reports: Vec<MonotonicityReport> = Vec::new();
    for (k, mesh) in meshes.iter().enumerate() {
        let res = if k == 0 { "coarse" } else { "fine" };
        let s = sampled_run(mesh, t_end, 10, search, kernel)?;
        reached_end(c, 8, &format!("{label} ({res})"), &s);
        let e = entropy_monotonicity_check(&s, TOL_MONO)?;
        c.check(Some(8), format!("{label} ({res}) worst relative λ increase"), e.worst_violation, Relation::Le, TOL_MONO);
        let f = f_monotonicity_check(&s.snapshot_meshes(), spec, kernel)?;
        c.check(Some(8), format!("{label} ({res}) worst relative F-inequality violation"), f.worst_violation, Relation::Le, TOL_MONO);
        c.check(Some(8), format!("{label} ({res}) distinct sampled (x, s)"), distinct_centers(&f) as f64, Relation::Gt, 19.5);
        let fit = almost_monotonicity_fit(&s)?;
        c.check(Some(9), format!("{label} ({res}) fitted almost-monotone C"), fit.c, Relation::Le, 1.0 + TOL_MONO);
        c.advisory(
            format!("{label} ({res}) max κ / initial λ"),
            e.kappa_over_initial_lambda.unwrap_or(f64::NAN),
            Relation::Lt,
            1e3,
        );
        f_reports.push(f);
    }
    c.check(
        Some(8),
        format!("{label} F-violation after refinement minus before"),
        f_reports[1].violation() - f_reports[0].violation(),
        Relation::Le,
        0.0,
    );
    Ok(())
}

fn distinct_centers(r: &MonotonicityReport) -> usize {
    let mut keys: Vec<[u64; 5]> = r
        .pairs
        .iter()
        .filter_map(|p| Some((p.x?, p.s?)))
        .map(|(x, s)| {
            let v = x.vec4();
            [v[0].to_bits(), v[1].to_bits(), v[2].to_bits(), v[3].to_bits(), s.to_bits()]
        })
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

fn monotonicity(c: &mut Collector, opts: &SuiteOptions) -> Result<()> {
    let kernel = &opts.kernel;
    let spec = FSampleSpec { samples: 20, seed: opts.seed, s_max: 0.5, quad_order: 3, tolerance: TOL_MONO };
    let t = torus();
    let slices = [perturb(&flat_slice(&t, 16, 0.5)?, 0.05, 1)?, perturb(&flat_slice(&t, 32, 0.5)?, 0.05, 1)?];
    let search = SearchConfig { t_window: Some((0.01, 1.0)), ..Default::default() };
    monotone_family(c, "perturbed torus slice", slices, 0.05, &search, &spec, kernel)?;
    let spheres = [geodesic_sphere(PI / 3.0, 3)?, geodesic_sphere(PI / 3.0, 4)?];
    let search = SearchConfig { t_window: Some((0.05, PI * PI)), ..Default::default() };
    monotone_family(c, "S³ geodesic sphere", spheres, 0.15, &search, &spec, kernel)
}

fn equivalence(c: &mut Collector, opts: &SuiteOptions) -> Result<()> {
    let t = torus();
    let slice = flat_slice(&t, 16, 0.5)?;
    let torus_family = [slice.clone(), perturb(&flat_slice(&t, 32, 0.5)?, 0.05, 1)?];
    let search = SearchConfig { t_window: Some(((2.0 * slice.mesh_scale()).powi(2), 1.0)), ..Default::default() };
    let r = equivalence_check(&torus_family, &search, &opts.kernel)?;
    c.lt(10, "torus family λ/κ spread", r.spread(), 50.0);
    c.lt(10, "torus family bracket violations", r.violations as f64, 0.5);
    c.lt(10, "flat slice λ/κ relative to 1/π", (r.entries[0].ratio * PI - 1.0).abs(), 0.05);

    let sphere_family = [
        geodesic_sphere(PI / 6.0, 3)?,
        geodesic_sphere(PI / 4.0, 3)?,
        geodesic_sphere(PI / 3.0, 3)?,
        equator(3)?,
        clifford_torus(32)?,
    ];
    let r = equivalence_check(&sphere_family, &SearchConfig::default(), &opts.kernel)?;
    c.lt(10, "S³ family λ/κ spread", r.spread(), 50.0);
    c.lt(10, "S³ family bracket violations", r.violations as f64, 0.5);
    Ok(())
}

fn harnack(c: &mut Collector, opts: &SuiteOptions) -> Result<()> {
    let cfg = &opts.kernel;
    let t = torus();
    let slice = flat_slice(&t, 16, 0.5)?;
    let y = t.point(&[0.5, 0.5, 0.5])?;
    let h = 1e-3;
    let r = harnack_diagnostic(&slice, &y, 1.0, 0.5, h, cfg)?;
    c.advisory("torus slice negative-Q fraction (T−t = 0.5)", r.negative_fraction, Relation::Lt, 0.05);

    let s3 = Ambient::sphere3();
    let y3 = s3.point(&[0.0, 0.0, 0.6, 0.8])?;
    let r = harnack_diagnostic(&equator(3)?, &y3, 1.0, 0.5, h, cfg)?;
    c.advisory("S³ equator negative-Q fraction (T−t = 0.5)", r.negative_fraction, Relation::Lt, 0.05);

    let long = harnack_diagnostic(&slice, &y, 50.0, 0.0, h, cfg)?;
    let worst = long
        .samples
        .iter()
        .map(|s| {
            let k = crate::heat_kernel::heat_kernel(&t, &s.point, &y, 50.0, cfg).map(|v| v.value).unwrap_or(f64::NAN);
            (s.q / (2.0 * k / 50.0) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    c.advisory("torus long-time Q relative to 2k/(T−t)", worst, Relation::Lt, 1e-3);

    let e = euclid();
    let disk = icosphere(&e, 4.0, 3, None)?;
    let y = e.point(&[0.0, 0.0, 4.0])?;
    let tau = 0.5;
    let r = harnack_diagnostic(&disk, &y, tau, 0.0, h, cfg)?;
    let worst = r
        .samples
        .iter()
        .filter(|s| linalg::norm(&linalg::sub(s.point.vec4(), y.vec4())) < 1.5)
        .map(|s| {
            let exact = harnack_euclidean_closed_form(&s.point, &y, tau);
            (s.q - exact).abs() / exact.max(1e-300)
        })
        .fold(0.0, f64::max);
    c.advisory("euclidean Q relative to closed form k/τ", worst, Relation::Lt, 1e-3);
    c.advisory("euclidean min Q", r.samples.iter().map(|s| s.q).fold(f64::INFINITY, f64::min), Relation::Gt, -1e-6);
    Ok(())
}
