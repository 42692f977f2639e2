//! Entropy λ = sup F over centers and scales for a round sphere, a flat
//! torus slice and a geodesic sphere in S³.

use mcflab::{entropy, Ambient, KernelConfig, SearchConfig, Shape};

fn main() -> mcflab::Result<()> {
    let cfg = KernelConfig::default();
    let exact = 4.0 / (1f64.exp() * (4.0 * std::f64::consts::PI).sqrt());
    let cases = [
        ("euclidean3", "icosphere:1,3", SearchConfig::default()),
        ("torus:1,1,1", "slice:32,0.5", SearchConfig { t_window: Some((0.005, 1.0)), ..Default::default() }),
        ("sphere3", "geodesic-sphere:1.0471975511965976,3", SearchConfig::default()),
    ];
    for (a, s, search) in cases {
        let ambient: Ambient = a.parse()?;
        let mesh = s.parse::<Shape>()?.build(&ambient)?;
        let r = entropy(&mesh, &search, &cfg)?;
        println!(
            "{a:<12} {s:<40} λ = {:.5}  at t = {:.4}  window {:.2e}..{:.2e}{}",
            r.lambda,
            r.argmax_t,
            r.t_window.0,
            r.t_window.1,
            if r.boundary_sup { "  (sup on the window edge)" } else { "" }
        );
    }
    println!("\nround sphere in R³: λ = 4/(e√(4π)) = {exact:.5} at t = R²/4");
    Ok(())
}
