//! Built-in surfaces, their discrete mean curvature, and OFF round trips.

use mcflab::surface::{parse_off, write_off};
use mcflab::{mean_curvature, Ambient, Shape};

fn main() -> mcflab::Result<()> {
    let cases = [
        ("euclidean3", "icosphere:1,3"),
        ("torus:1,1,1", "slice:32,0.5"),
        ("sphere3", "equator:3"),
        ("sphere3", "clifford:32"),
        ("sphere3", "geodesic-sphere:0.7853981633974483,3"),
    ];
    println!("{:<12} {:<24} {:>6} {:>6} {:>10} {:>10} {:>10}", "ambient", "shape", "verts", "tris", "area", "max|H|", "h");
    for (a, s) in cases {
        let ambient: Ambient = a.parse()?;
        let mesh = s.parse::<Shape>()?.build(&ambient)?;
        let h = mean_curvature(&mesh);
        println!(
            "{a:<12} {s:<24} {:>6} {:>6} {:>10.6} {:>10.3e} {:>10.4}",
            mesh.vertex_count(),
            mesh.triangle_count(),
            mesh.total_area(),
            h.max_norm(),
            mesh.mesh_scale()
        );
        assert_eq!(parse_off(&write_off(&mesh), &ambient)?, mesh);
    }
    println!("\nunit sphere: |H| = 2; geodesic sphere of radius θ in S³: |H| = 2 cot θ");
    Ok(())
}
