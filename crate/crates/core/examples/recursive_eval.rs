//! Pointwise evaluation of `T^k s` by unrolling pullbacks, with no grid,
//! compared with the grid interpolant. Family B shows the slow Rakotch rate.

use std::sync::Arc;

use fif::{
    build_system, evaluate_recursive, picard_iterate, EvalGrid, FamilySpec, MapSystem, Seed,
    SequenceSpec, YInterval,
};

pub fn main() -> fif::Result<()> {
    let sys = build_system(
        SequenceSpec::geometric(1.0, -1.0, 2.0),
        SequenceSpec::geometric(1.0, -1.0, 3.0),
        8,
        YInterval::new(0.0, 1.25)?,
    )?;
    let ms = MapSystem::new(sys, FamilySpec::B)?;
    let grid = Arc::new(EvalGrid::new(ms.system(), 4096)?);
    let f = picard_iterate(&ms, &Seed::Chord, grid, 1e-12, 10_000)?.interpolant;

    let x = 0.3;
    println!("grid interpolant f({x}) = {:.12}", f.eval(x));
    for k in [1, 2, 4, 8, 16, 32] {
        let chord = evaluate_recursive(&ms, x, k, &Seed::Chord)?;
        let bump = evaluate_recursive(&ms, x, k, &Seed::bump(0.2))?;
        println!("k = {k:2}: T^k chord = {chord:.12}, T^k bump = {bump:.12}");
    }
    // a dyadic point reaches a node after a few pullbacks, so depth stops mattering
    println!("f(0.75) via 3 pullbacks = {}", evaluate_recursive(&ms, 0.75, 3, &Seed::Chord)?);
    Ok(())
}
