//! Monotonicity along a flow in the flat torus: λ never increases, and
//! F_{x,s}(M_{t₂}) ≤ F_{x,s+t₂−t₁}(M_{t₁}) for sampled (x, s).

use mcflab::flow::{run_flow, FlowConfig, SampleConfig};
use mcflab::surface::{flat_slice, perturb};
use mcflab::verify::{almost_monotonicity_fit, entropy_monotonicity_check, f_monotonicity_check, FSampleSpec, TOL_MONO};
use mcflab::{Ambient, KernelConfig, SearchConfig};

fn main() -> mcflab::Result<()> {
    let torus = Ambient::flat_torus(&[1.0, 1.0, 1.0])?;
    let mesh = perturb(&flat_slice(&torus, 16, 0.5)?, 0.05, 1)?;
    let cfg = FlowConfig { t_end: 0.05, record_interval: Some(0.005), lambda_every: 2, snapshot_every: 2, ..Default::default() };
    let sample = SampleConfig { search: SearchConfig { t_window: Some((0.01, 1.0)), ..Default::default() }, kernel: KernelConfig::default() };
    let series = run_flow(&mesh, &cfg, Some(&sample))?;

    for (t, l) in series.lambda_samples() {
        println!("t = {t:.3}  λ = {l:.6}");
    }
    let e = entropy_monotonicity_check(&series, TOL_MONO)?;
    println!("λ pairs: {}  worst relative increase {:.2e}", e.pair_count, e.worst_violation);
    let f = f_monotonicity_check(&series.snapshot_meshes(), &FSampleSpec::default(), &KernelConfig::default())?;
    println!("F pairs: {}  worst relative violation {:.2e}  pass {}", f.pair_count, f.worst_violation, f.pass);
    println!("fitted almost-monotone C = {:.6}", almost_monotonicity_fit(&series)?.c);
    Ok(())
}
