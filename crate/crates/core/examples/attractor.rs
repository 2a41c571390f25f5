//! Deterministic iteration of the fractal operator from the data points,
//! then the distance between the resulting cloud and the graph of `f_*`.

use std::sync::Arc;

use fif::attractor::invariance_residual;
use fif::{
    build_system, graph_vs_attractor, iterate_attractor, picard_iterate, EvalGrid, FamilySpec,
    InitialSet, IterationConfig, MapSystem, Metric, Seed, SequenceSpec, YInterval,
};

pub fn main() -> fif::Result<()> {
    let sys = build_system(
        SequenceSpec::geometric(1.0, -1.0, 2.0),
        SequenceSpec::geometric(1.0, -1.0, 3.0),
        8,
        YInterval::new(0.0, 1.25)?,
    )?;
    let ms = MapSystem::new(sys, FamilySpec::a_default())?;
    let cfg = IterationConfig {
        initial: InitialSet::Nodes,
        tolerance: 1e-4,
        budget: 50_000,
        ..IterationConfig::default()
    };
    let a = iterate_attractor(&ms, &cfg)?;
    println!(
        "{} steps, {} points, thinning radius {:?}",
        a.iteration,
        a.cloud.len(),
        a.thinning_radius
    );
    for (k, d) in a.hausdorff_trace.iter().enumerate() {
        println!("  step {:2}: {d:.3e}", k + 1);
    }
    println!("invariance residual {:.3e}", invariance_residual(&ms, &a)?);

    let grid = Arc::new(EvalGrid::new(ms.system(), 4096)?);
    let f = picard_iterate(&ms, &Seed::Chord, grid, 1e-10, 1000)?;
    let rep = graph_vs_attractor(&ms, &f, &a, 4096, Metric::D1)?;
    println!(
        "graph vs attractor {:.3e} <= {:.3e}: {}",
        rep.distance, rep.bound, rep.within_bound
    );
    Ok(())
}
