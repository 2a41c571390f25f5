//! Data from explicit tables and closures instead of the built-in geometric
//! sequences, and the errors that invalid data produces.

use std::sync::Arc;

use fif::{
    build_system, picard_iterate, EvalGrid, FamilySpec, MapSystem, Seed, SequenceSpec, YInterval,
};

pub fn main() -> fif::Result<()> {
    let xs = SequenceSpec::harmonic(1.0, -1.0, 1.0);
    // oscillating values settling at 1/2
    let ys = SequenceSpec::function("oscillating", 0.5, |n| {
        0.5 + 0.4 * (-0.5f64).powi(n as i32)
    });
    let sys = build_system(xs, ys, 10, YInterval::new(0.0, 1.5)?)?;
    let ms = MapSystem::new(sys, FamilySpec::B)?;
    let grid = Arc::new(EvalGrid::new(ms.system(), 2048)?);
    let out = picard_iterate(&ms, &Seed::Chord, grid, 1e-10, 10_000)?;
    println!(
        "{} iterations, tail bound {:.3e}, max node error {:.1e}",
        out.report.iterations,
        out.report.tail_bound,
        out.report.node_errors.iter().copied().fold(0.0, f64::max)
    );

    let bad = build_system(
        SequenceSpec::table(vec![0.0, 0.5, 0.4, 0.9], 1.0),
        SequenceSpec::constant(0.0),
        3,
        YInterval::new(0.0, 1.0)?,
    );
    println!("non-monotone table: {}", bad.unwrap_err());
    let short = build_system(
        SequenceSpec::table(vec![0.0, 0.5], 1.0),
        SequenceSpec::constant(0.0),
        3,
        YInterval::new(0.0, 1.0)?,
    );
    println!("short table: {}", short.unwrap_err());
    Ok(())
}
