//! The Harnack quantity Q along a surface, with the potential taken to be
//! the kernel itself, against its Euclidean closed form k/τ.

use mcflab::surface::icosphere;
use mcflab::verify::{harnack_diagnostic, harnack_euclidean_closed_form};
use mcflab::{Ambient, KernelConfig};

fn main() -> mcflab::Result<()> {
    let r3 = Ambient::euclidean(3)?;
    let mesh = icosphere(&r3, 1.0, 2, None)?;
    let y = r3.point(&[0.0, 0.0, 1.2])?;
    let (big_t, t) = (1.0, 0.75);
    let r = harnack_diagnostic(&mesh, &y, big_t, t, 1e-3, &KernelConfig::default())?;
    for s in r.samples.iter().step_by(20) {
        let exact = harnack_euclidean_closed_form(&s.point, &y, big_t - t);
        println!("vertex {:>3}  Q = {:.6e}  k/τ = {:.6e}", s.vertex, s.q, exact);
    }
    println!("negative fraction {:.3} (tolerance {:.0e}, {})", r.negative_fraction, r.tol_q, r.substitution);
    Ok(())
}
