//! Property tests for invariants that hold for every input, not just the
//! worked examples.

use std::f64::consts::PI;

use mcflab::ambient::Isometry;
use mcflab::cli::RunConfig;
use mcflab::heat_kernel::heat_kernel_with_form;
use mcflab::linalg::givens;
use mcflab::surface::{icosphere, parse_off, perturb, write_off};
use mcflab::{area_growth, f_functional, flow_step, heat_kernel, mean_curvature, Ambient, FlowConfig, FlowState};
use mcflab::{KernelConfig, SearchConfig, SeriesForm, Shape};
use proptest::prelude::*;

fn torus() -> Ambient {
    Ambient::flat_torus(&[1.0, 1.0, 1.0]).unwrap()
}

fn unit4() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter("away from the origin", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
}

fn cube() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(0.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_symmetric_and_positive_on_the_torus(x in cube(), y in cube(), lt in -4.6f64..2.3) {
        let (a, cfg) = (torus(), KernelConfig::default());
        let (px, py) = (a.point(&x).unwrap(), a.point(&y).unwrap());
        let t = lt.exp();
        let k1 = heat_kernel(&a, &px, &py, t, &cfg).unwrap().value;
        let k2 = heat_kernel(&a, &py, &px, t, &cfg).unwrap().value;
        prop_assert!(k1 > 0.0);
        prop_assert!((k1 - k2).abs() <= 1e-12 * k1.max(1.0));
    }

    #[test]
    fn sphere_kernel_forms_agree(x in unit4(), y in unit4(), lt in -4.6f64..2.3) {
        let (a, cfg) = (Ambient::sphere3(), KernelConfig::default());
        let (px, py) = (a.project(&x), a.project(&y));
        let t = lt.exp();
        let img = heat_kernel_with_form(&a, &px, &py, t, &cfg, SeriesForm::ImageSeries).unwrap().value;
        let spec = heat_kernel_with_form(&a, &px, &py, t, &cfg, SeriesForm::SpectralSeries).unwrap().value;
        prop_assert!((img - spec).abs() < 1e-8, "t = {t}: {img} vs {spec}");
        prop_assert!(img >= 0.0);
    }

    #[test]
    fn sphere_kernel_is_rotation_invariant(x in unit4(), y in unit4(), angle in 0.0f64..2.0 * PI, t in 0.05f64..3.0) {
        let (a, cfg) = (Ambient::sphere3(), KernelConfig::default());
        let (px, py) = (a.project(&x), a.project(&y));
        let rot = Isometry::rotation(givens(0, 2, angle)).unwrap();
        let (rx, ry) = (rot.apply(&a, &px).unwrap(), rot.apply(&a, &py).unwrap());
        let k1 = heat_kernel(&a, &px, &py, t, &cfg).unwrap().value;
        let k2 = heat_kernel(&a, &rx, &ry, t, &cfg).unwrap().value;
        prop_assert!((k1 - k2).abs() <= 1e-10 * k1.max(1e-3));
    }

    #[test]
    fn distances_obey_the_triangle_inequality(x in cube(), y in cube(), z in cube()) {
        let a = torus();
        let (px, py, pz) = (a.point(&x).unwrap(), a.point(&y).unwrap(), a.point(&z).unwrap());
        let d = |p, q| a.geodesic_distance(p, q).unwrap();
        prop_assert!(d(&px, &pz) <= d(&px, &py) + d(&py, &pz) + 1e-12);
        prop_assert!(d(&px, &py) <= 3f64.sqrt() / 2.0 + 1e-12);
    }

    #[test]
    fn shape_specs_round_trip(r in 0.1f64..10.0, level in 0u32..5, k in 3usize..100, theta in 0.05f64..3.0) {
        for shape in [
            Shape::Icosphere { radius: r, level },
            Shape::Slice { k, height: r / 10.0 },
            Shape::Equator { level },
            Shape::Clifford { k },
            Shape::GeodesicSphere { theta0: theta, level },
        ] {
            prop_assert_eq!(shape.to_string().parse::<Shape>().unwrap(), shape);
        }
    }

    #[test]
    fn configs_round_trip(t_min in 1e-3f64..1.0, width in 1e-3f64..10.0, seed in any::<u64>(), grid in 1usize..4096) {
        let text = format!("ambient = torus:1,2,3\nt_min = {t_min}\nt_max = {}\nseed = {seed}\ngrid = {grid}\n", t_min + width);
        let cfg = RunConfig::parse(&text, &[]).unwrap();
        prop_assert_eq!(RunConfig::parse(&cfg.render(), &[]).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn off_round_trip_is_exact(amp in -0.2f64..0.2, mode in 1u32..4) {
        let a = Ambient::euclidean(3).unwrap();
        let mesh = perturb(&icosphere(&a, 1.0, 2, None).unwrap(), amp, mode).unwrap();
        prop_assert_eq!(parse_off(&write_off(&mesh), &a).unwrap(), mesh);
    }

    #[test]
    fn curvature_scales_like_one_over_radius(r in 0.2f64..5.0) {
        let a = Ambient::euclidean(3).unwrap();
        let h = mean_curvature(&icosphere(&a, r, 2, None).unwrap()).max_norm();
        let h1 = mean_curvature(&icosphere(&a, 1.0, 2, None).unwrap()).max_norm();
        prop_assert!((h * r / h1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn a_flow_step_never_increases_area(amp in -0.1f64..0.1, mode in 1u32..4) {
        let t = torus();
        let mesh = perturb(&mcflab::surface::flat_slice(&t, 12, 0.5).unwrap(), amp, mode).unwrap();
        let a0 = mesh.total_area();
        let next = flow_step(&FlowState { mesh, time: 0.0 }, &FlowConfig::default()).unwrap();
        prop_assert!(next.mesh.total_area() <= a0 * (1.0 + 1e-12));
        prop_assert!(next.time > 0.0);
    }

    #[test]
    fn f_is_invariant_under_torus_translation(shift in cube(), x in cube(), t in 0.01f64..1.0) {
        let a = torus();
        let mesh = perturb(&mcflab::surface::flat_slice(&a, 8, 0.5).unwrap(), 0.05, 1).unwrap();
        let iso = Isometry::translation([shift[0], shift[1], shift[2], 0.0]);
        let moved = mesh.transformed(&iso).unwrap();
        let px = a.point(&x).unwrap();
        let cfg = KernelConfig::default();
        let f0 = f_functional(&mesh, &px, t, 3, &cfg).unwrap().value;
        let f1 = f_functional(&moved, &iso.apply(&a, &px).unwrap(), t, 3, &cfg).unwrap().value;
        prop_assert!((f0 - f1).abs() <= 1e-9 * f0.max(1.0), "{f0} vs {f1}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn kappa_is_dilation_invariant(r in 0.3f64..4.0) {
        let a = Ambient::euclidean(3).unwrap();
        let search = SearchConfig { lattice_points: 64, ..Default::default() };
        let k1 = area_growth(&icosphere(&a, 1.0, 2, None).unwrap(), &search).unwrap().kappa;
        let kr = area_growth(&icosphere(&a, r, 2, None).unwrap(), &search).unwrap().kappa;
        prop_assert!((kr / k1 - 1.0).abs() < 0.02, "{kr} vs {k1}");
    }
}
