//! Flows in the round 3-sphere: a geodesic sphere shrinking by
//! cos θ(t) = cos θ₀ e^{2t}, and a perturbed equator relaxing back to a
//! minimal surface.

use std::f64::consts::PI;

use mcflab::flow::{run_flow, FlowConfig};
use mcflab::surface::{equator, geodesic_sphere, perturb};
use mcflab::verify::minimal_limit_diagnostic;

fn main() -> mcflab::Result<()> {
    let theta0 = PI / 3.0;
    let cfg = FlowConfig { t_end: 0.3, record_interval: Some(0.05), snapshot_every: 1, ..Default::default() };
    let series = run_flow(&geodesic_sphere(theta0, 3)?, &cfg, None)?;
    println!("{:>6} {:>10} {:>10}", "t", "cos θ", "exact");
    for (t, m) in series.snapshot_meshes() {
        let theta = m.vertices().iter().map(|v| v[3].acos()).sum::<f64>() / m.vertex_count() as f64;
        println!("{t:>6.3} {:>10.6} {:>10.6}", theta.cos(), theta0.cos() * (2.0 * t).exp());
    }

    let bumpy = perturb(&equator(3)?, 0.05, 1)?;
    let cfg = FlowConfig { t_end: 2.0, record_interval: Some(0.25), ..Default::default() };
    let series = run_flow(&bumpy, &cfg, None)?;
    println!("\n{:>6} {:>12} {:>12}", "t", "area", "∫|H|²");
    for r in &series.records {
        println!("{:>6.2} {:>12.8} {:>12.4e}", r.time, r.area, r.h2_integral);
    }
    let d = minimal_limit_diagnostic(&series, &series.final_mesh);
    println!("final max|H| {:.2e}; verdict {:?} (equator area 4π = {:.6})", d.h_max_final, d.verdict, 4.0 * PI);
    Ok(())
}
