//! Heat kernels of the three model ambients: values, the two series forms
//! of the compact kernels, and the built-in self-test.

use mcflab::heat_kernel::{heat_kernel_with_form, kernel_selftest, SelftestSpec};
use mcflab::{heat_kernel, Ambient, KernelConfig, SeriesForm};

fn main() -> mcflab::Result<()> {
    let cfg = KernelConfig::default();
    let r3 = Ambient::euclidean(3)?;
    let torus = Ambient::flat_torus(&[1.0, 1.0, 1.0])?;
    let s3 = Ambient::sphere3();

    let o = r3.point(&[0.0, 0.0, 0.0])?;
    let k = heat_kernel(&r3, &o, &o, 1.0 / (4.0 * std::f64::consts::PI), &cfg)?;
    println!("euclidean3  H(0,0,1/4π) = {:.12} (exactly 1)", k.value);

    let (x, y) = (torus.point(&[0.1, 0.2, 0.3])?, torus.point(&[0.9, 0.5, 0.3])?);
    let (x3, y3) = (s3.point(&[1.0, 0.0, 0.0, 0.0])?, s3.point(&[0.0, 1.0, 0.0, 0.0])?);
    println!("\n{:>8} {:>20} {:>20} {:>20} {:>20}", "t", "torus image", "torus spectral", "S³ image", "S³ spectral");
    for t in [0.01, 0.1, 1.0, 10.0] {
        let f = |a, p, q, form| heat_kernel_with_form(a, p, q, t, &cfg, form).map(|v| v.value);
        println!(
            "{t:>8} {:>20.12e} {:>20.12e} {:>20.12e} {:>20.12e}",
            f(&torus, &x, &y, SeriesForm::ImageSeries)?,
            f(&torus, &x, &y, SeriesForm::SpectralSeries)?,
            f(&s3, &x3, &y3, SeriesForm::ImageSeries)?,
            f(&s3, &x3, &y3, SeriesForm::SpectralSeries)?,
        );
    }

    println!();
    for ambient in [torus, s3] {
        let r = kernel_selftest(&ambient, &cfg, &SelftestSpec { sample_count: 10, ..Default::default() })?;
        println!(
            "{ambient:<12} symmetry {:.1e}  normalization {:.1e}  semigroup {:.1e}  pde {:.1e} (scale {:.1e})",
            r.max_symmetry_err, r.max_normalization_err, r.max_semigroup_err, r.max_pde_residual, r.pde_residual_scale
        );
    }
    Ok(())
}
