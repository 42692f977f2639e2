use std::f64::consts::PI;

use super::*;
use crate::surface::{clifford_torus, equator, flat_slice, geodesic_sphere, hausdorff_upper_bound, icosphere, perturb};

fn e3() -> Ambient {
    Ambient::euclidean(3).unwrap()
}

fn t3() -> Ambient {
    Ambient::flat_torus(&[1.0, 1.0, 1.0]).unwrap()
}

fn max_displacement(a: &SurfaceMesh, b: &SurfaceMesh) -> f64 {
    hausdorff_upper_bound(a, b).unwrap()
}

#[test]
fn sphere_step_moves_inward_by_two_dt() {
    let m = icosphere(&e3(), 1.0, 3, None).unwrap();
    let s0 = FlowState::new(m.clone());
    let cfg = FlowConfig::default();
    let s1 = flow_step(&s0, &cfg).unwrap();
    let dt = s1.time;
    assert!((dt - stable_dt(&m, 0.2)).abs() < 1e-18);
    for (a, b) in m.vertices().iter().zip(s1.mesh.vertices()) {
        let inward = linalg::norm(a.vec4()) - linalg::norm(b.vec4());
        assert!((inward / (2.0 * dt) - 1.0).abs() < 0.02, "{}", inward / dt);
    }
}

#[test]
fn static_surfaces_do_not_move() {
    let cfg = FlowConfig::default();
    let slice = flat_slice(&t3(), 16, 0.25).unwrap();
    let s = flow_step(&FlowState::new(slice.clone()), &cfg).unwrap();
    assert!(max_displacement(&slice, &s.mesh) < 1e-14);
    for m in [equator(3).unwrap(), clifford_torus(24).unwrap()] {
        let s = flow_step(&FlowState::new(m.clone()), &cfg).unwrap();
        assert!(max_displacement(&m, &s.mesh) < 1e-3 * s.time);
        assert!(s.mesh.vertices().iter().all(|v| (linalg::norm(v.vec4()) - 1.0).abs() < 1e-12));
    }
}

#[test]
fn step_lands_on_t_end() {
    let m = icosphere(&e3(), 1.0, 2, None).unwrap();
    let cfg = FlowConfig { t_end: 1e-6, ..Default::default() };
    let s = flow_step(&FlowState::new(m), &cfg).unwrap();
    assert_eq!(s.time, 1e-6);
    assert!(flow_step(&s, &cfg).is_err());
}

#[test]
fn shrinking_sphere_follows_the_ode() {
    let m = icosphere(&e3(), 1.0, 3, None).unwrap();
    let cfg = FlowConfig { t_end: 0.15, record_interval: Some(0.01), ..Default::default() };
    let series = run_flow(&m, &cfg, None).unwrap();
    assert_eq!(series.stop, StopReason::ReachedEnd);
    let r_mesh = series.final_mesh.vertices().iter().map(|v| linalg::norm(v.vec4())).sum::<f64>()
        / series.final_mesh.vertex_count() as f64;
    let r_exact = (1.0 - 4.0 * 0.15f64).sqrt();
    assert!((r_mesh / r_exact - 1.0).abs() < 0.01, "{r_mesh} vs {r_exact}");
    assert_eq!(series.records.len(), 16);
    for w in series.records.windows(2) {
        assert!(w[1].time > w[0].time);
        assert!(w[1].area <= w[0].area * (1.0 + 1e-6));
    }
    let fv = first_variation_check(&series, 1e-9).unwrap();
    assert!(fv.max_relative_defect < 0.05, "{}", fv.max_relative_defect);
}

#[test]
fn geodesic_sphere_in_s3_shrinks() {
    let theta0 = PI / 3.0;
    let m = geodesic_sphere(theta0, 3).unwrap();
    let t_end = 0.15;
    let cfg = FlowConfig { t_end, record_interval: Some(0.025), ..Default::default() };
    let series = run_flow(&m, &cfg, None).unwrap();
    let mean_cos = series.final_mesh.vertices().iter().map(|v| v[3]).sum::<f64>() / m.vertex_count() as f64;
    let exact = theta0.cos() * (2.0 * t_end).exp();
    assert!((mean_cos / exact - 1.0).abs() < 0.02, "{mean_cos} vs {exact}");
    let fv = first_variation_check(&series, 1e-9).unwrap();
    assert!(fv.max_relative_defect < 0.05);
}

#[test]
fn perturbed_slice_flattens() {
    let a = t3();
    let m = perturb(&flat_slice(&a, 16, 0.5).unwrap(), 0.05, 1).unwrap();
    let cfg = FlowConfig { t_end: 0.2, record_interval: Some(0.02), ..Default::default() };
    let series = run_flow(&m, &cfg, None).unwrap();
    let (first, last) = (&series.records[0], series.records.last().unwrap());
    assert!(last.h2_integral < 1e-3 * first.h2_integral);
    assert!(last.h_max < 0.05);
    assert_eq!(series.min_h2_times(1), vec![last.time]);
}

#[test]
fn csv_has_the_documented_columns() {
    let m = icosphere(&e3(), 1.0, 1, None).unwrap();
    let cfg = FlowConfig { t_end: 0.01, record_every: 5, ..Default::default() };
    let series = run_flow(&m, &cfg, None).unwrap();
    let csv = series.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "time,area,h2_integral,h_max,lambda,kappa,dt,min_quality");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 8);
    assert!(row[4].is_empty() && row[5].is_empty());
    assert_eq!(csv.lines().count(), series.records.len() + 1);
}

#[test]
fn first_variation_needs_three_records() {
    let m = icosphere(&e3(), 1.0, 1, None).unwrap();
    let cfg = FlowConfig { t_end: 1e-4, record_every: 1_000_000, ..Default::default() };
    let series = run_flow(&m, &cfg, None).unwrap();
    assert!(first_variation_check(&series, 1e-9).is_err());
}

#[test]
fn rejects_bad_config() {
    let m = icosphere(&e3(), 1.0, 1, None).unwrap();
    for cfg in [
        FlowConfig { dt_safety: 0.0, ..Default::default() },
        FlowConfig { dt_safety: 1.5, ..Default::default() },
        FlowConfig { record_every: 0, ..Default::default() },
        FlowConfig { lambda_every: 1, ..Default::default() },
    ] {
        assert!(run_flow(&m, &cfg, None).is_err());
    }
}
