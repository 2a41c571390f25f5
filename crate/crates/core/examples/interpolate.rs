//! Picard iteration of `T` to the interpolant on a 4096-point grid, for both
//! families, with the residual history and a few sampled values.

use std::sync::Arc;
use std::time::Instant;

use fif::{
    build_system, picard_iterate, verify_interpolation, EvalGrid, FamilySpec, Interpolant,
    MapSystem, Seed, SequenceSpec, YInterval,
};

pub fn main() -> fif::Result<()> {
    let sys = build_system(
        SequenceSpec::geometric(1.0, -1.0, 2.0),
        SequenceSpec::geometric(1.0, -1.0, 3.0),
        8,
        YInterval::new(0.0, 1.25)?,
    )?;
    for family in [FamilySpec::a_default(), FamilySpec::B] {
        let ms = MapSystem::new(sys.clone(), family)?;
        let grid = Arc::new(EvalGrid::new(ms.system(), 4096)?);
        let start = Instant::now();
        let out = picard_iterate(&ms, &Seed::Chord, grid, 1e-10, 10_000)?;
        let r = &out.report;
        println!(
            "family {}: {} iterations in {:.1?}, converged = {}",
            ms.family().name(),
            r.iterations,
            start.elapsed(),
            r.converged
        );
        let hist: Vec<String> = r.history.iter().map(|h| format!("{h:.1e}")).collect();
        println!("  residuals: {}", hist.join(" "));

        let f = Interpolant::Grid(out.interpolant.clone());
        let check = verify_interpolation(&f, &ms, 1e-9)?;
        println!("  max node error {:.1e}, pass = {}", check.max_error, check.pass);
        for x in [0.1, 0.25, 0.6, 0.9, 0.99] {
            println!("  f({x}) = {:.6}", out.interpolant.eval(x));
        }
    }
    Ok(())
}
