use std::f64::consts::PI;
use std::fs;

use super::*;
use crate::ambient::Ambient;
use crate::error::Error;
use crate::surface::{load_mesh, Shape};

fn over(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn in_dir(dir: &tempfile::TempDir, extra: &[(&str, &str)]) -> RunConfig {
    let mut o = over(&[("out_dir", dir.path().to_str().unwrap())]);
    o.extend(over(extra));
    RunConfig::parse("", &o).unwrap()
}

#[test]
fn empty_config_is_the_default() {
    let cfg = RunConfig::parse("", &[]).unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.ambient, Ambient::euclidean(3).unwrap());
    let meshes = cfg.meshes().unwrap();
    assert_eq!(meshes.len(), 1);
    assert_eq!(meshes[0].vertex_count(), 642);
}

#[test]
fn flags_override_the_file() {
    let cfg = RunConfig::parse("ambient = torus:1,1,1\nt_max = 3 # comment\n", &over(&[("t-max", "1")])).unwrap();
    assert_eq!(cfg.ambient, Ambient::flat_torus(&[1.0, 1.0, 1.0]).unwrap());
    assert_eq!(cfg.t_max, Some(1.0));
    assert_eq!(cfg.meshes().unwrap()[0].triangle_count(), 2 * 32 * 32);
}

#[test]
fn config_errors_name_the_key() {
    let key_of = |text: &str| match RunConfig::parse(text, &[]) {
        Err(Error::Config { key, .. }) => key,
        other => panic!("expected a configuration error, got {other:?}"),
    };
    assert_eq!(key_of("t_min = 2\nt_max = 1"), "t_min/t_max");
    assert_eq!(key_of("r_min = 1\nr_max = 1"), "r_min/r_max");
    assert_eq!(key_of("colour = blue"), "colour");
    assert_eq!(key_of("grid = many"), "grid");
    assert_eq!(key_of("suite = kernels,everything"), "suite");
    assert_eq!(key_of("ambient = hyperbolic3"), "ambient");
    assert_eq!(key_of("t_min = -1"), "t_min");
    assert_eq!(key_of("quad_order = 2"), "quad_order");
    assert_eq!(key_of("just words"), "line 1");
}

#[test]
fn render_round_trips() {
    let text = "ambient = sphere3\nmesh = geodesic-sphere:0.5,2; equator:2\nperturb = 0.05,1\nt_min = 0.01\nsuite = kernels\nseed = 7\nthreads = 2\n";
    let cfg = RunConfig::parse(text, &[]).unwrap();
    assert_eq!(cfg.mesh[1], MeshSource::Generator(Shape::Equator { level: 2 }));
    assert_eq!(RunConfig::parse(&cfg.render(), &[]).unwrap(), cfg);
}

#[test]
fn one_sided_window_is_completed_per_mesh() {
    let cfg = RunConfig::parse("ambient = torus:1,1,1\nmesh = slice:16\nt_max = 1", &[]).unwrap();
    let mesh = &cfg.meshes().unwrap()[0];
    let s = cfg.search_for(mesh).unwrap();
    let (lo, hi) = s.t_window.unwrap();
    assert_eq!(hi, 1.0);
    assert!((lo - (2.0 * mesh.mesh_scale()).powi(2)).abs() < 1e-15);
    assert!(s.r_window.is_none());
}

#[test]
fn make_mesh_writes_a_loadable_off() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_dir(&dir, &[("ambient", "sphere3"), ("mesh", "clifford:8")]);
    let m = run(Command::MakeMesh, &cfg);
    assert_eq!(m.exit_code, EXIT_OK);
    let mesh = load_mesh(dir.path().join("mesh.off"), &cfg.ambient).unwrap();
    assert_eq!(mesh.triangle_count(), 128);
    assert_eq!(m.outputs.len(), 1);
    let manifest = fs::read_to_string(dir.path().join(RunManifest::FILE)).unwrap();
    assert!(manifest.contains(&m.outputs[0].sha256));
}

#[test]
fn flow_on_shrinking_sphere_matches_closed_form_area() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_dir(&dir, &[("mesh", "icosphere:1,3"), ("t_end", "0.2"), ("final_mesh", "final.off")]);
    let m = run(Command::Flow, &cfg);
    assert_eq!(m.exit_code, EXIT_OK, "{:?}", m.error);
    let csv = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').take(2).map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 0.2).abs() < 1e-12);
    assert!((last[1] / (4.0 * PI * 0.2) - 1.0).abs() < 0.02);
    assert!(dir.path().join("final.off").exists());
}

#[test]
fn failed_flow_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    // the sphere vanishes at t = 1/4
    let cfg = in_dir(&dir, &[("mesh", "icosphere:1,2"), ("t_end", "0.5")]);
    let m = run(Command::Flow, &cfg);
    assert_eq!(m.exit_code, EXIT_NUMERIC);
    assert!(m.error.is_some());
    assert!(dir.path().join("series.csv.partial").exists());
    assert!(!dir.path().join("series.csv").exists());
    assert!(!m.outputs[0].complete);
}

#[test]
fn entropy_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_dir(&dir, &[("mesh", "icosphere:1,2"), ("grid", "64")]);
    let a = run(Command::Entropy, &cfg);
    let b = run(Command::Entropy, &RunConfig { threads: Some(1), ..cfg.clone() });
    assert_eq!(a.exit_code, EXIT_OK);
    assert_eq!(a.output_digests(), b.output_digests());
}

#[test]
fn verify_reports_one_line_per_assertion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_dir(&dir, &[("suite", "harnack")]);
    let m = run(Command::Verify, &cfg);
    assert_eq!(m.exit_code, EXIT_OK);
    let text = fs::read_to_string(dir.path().join("verify.jsonl")).unwrap();
    assert!(text.lines().count() >= 4);
    assert!(text.lines().all(|l| serde_json::from_str::<serde_json::Value>(l).is_ok()));
}

#[test]
fn euclidean_check_bounds_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = run(Command::CheckBounds, &in_dir(&dir, &[("mesh", "icosphere:1,1")]));
    assert_eq!(m.exit_code, EXIT_CONFIG);
}

#[test]
fn command_names_round_trip() {
    for c in Command::ALL {
        assert_eq!(c.name().parse::<Command>().unwrap(), c);
    }
    assert!("mesh".parse::<Command>().is_err());
}
