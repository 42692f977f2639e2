//! Area-growth bound κ = sup area(Σ ∩ B_r(x)) / r² and its invariance
//! under dilation.

use mcflab::{area_growth, Ambient, SearchConfig, Shape};

fn main() -> mcflab::Result<()> {
    let search = SearchConfig::default();
    for (a, s) in [
        ("euclidean3", "icosphere:1,3"),
        ("euclidean3", "icosphere:2,3"),
        ("torus:1,1,1", "slice:32,0.5"),
        ("sphere3", "equator:3"),
        ("sphere3", "clifford:32"),
    ] {
        let ambient: Ambient = a.parse()?;
        let mesh = s.parse::<Shape>()?.build(&ambient)?;
        let r = area_growth(&mesh, &search)?;
        println!("{a:<12} {s:<16} κ = {:>8.4}  at r = {:.4}", r.kappa, r.argmax_radius);
    }
    println!("\nexpected: 4π = {:.4} for spheres in R³ (scale-free), π for the flat slice", 4.0 * std::f64::consts::PI);
    Ok(())
}
