//! λ/κ over a family of surfaces in S³, and the Li-Yau Gaussian bounds of
//! the S³ kernel.

use std::f64::consts::PI;

use mcflab::functionals::LiYauSpec;
use mcflab::surface::{clifford_torus, equator, geodesic_sphere};
use mcflab::{equivalence_check, li_yau_check, Ambient, KernelConfig, SearchConfig};

fn main() -> mcflab::Result<()> {
    let cfg = KernelConfig::default();
    let family = [geodesic_sphere(PI / 6.0, 3)?, geodesic_sphere(PI / 3.0, 3)?, equator(3)?, clifford_torus(32)?];
    let r = equivalence_check(&family, &SearchConfig::default(), &cfg)?;
    for (name, e) in ["geodesic π/6", "geodesic π/3", "equator", "Clifford"].iter().zip(&r.entries) {
        println!("{name:<14} λ = {:.4}  κ = {:>7.4}  λ/κ = {:.4}", e.lambda, e.kappa, e.ratio);
    }
    println!("spread {:.2}, violations {}, pass {}", r.spread(), r.violations, r.pass);

    let spec = LiYauSpec { samples: 200, ..Default::default() };
    let ly = li_yau_check(&Ambient::sphere3(), &spec, &cfg)?;
    println!("\nLi-Yau on S³ ({}): c_low = {:.4}, c_up = {:.4}", ly.samples, ly.c_low, ly.c_up);
    Ok(())
}
