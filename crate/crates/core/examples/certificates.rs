//! Sampled certificates: φ is a Rakotch comparison function, every f_n is a
//! Rakotch contraction for d_θ, and T contracts the uniform distance.

use std::sync::Arc;

use fif::cli::contraction_sweep;
use fif::comparison::log_grid;
use fif::maps::random_pairs;
use fif::{
    build_system, certify_rakotch, rakotch_certificate, ComparisonFunction, EvalGrid, FamilySpec,
    MapSystem, SequenceSpec, YInterval,
};

pub fn main() -> fif::Result<()> {
    let grid = log_grid(1e-6, 1e3, 19);
    for phi in [
        ComparisonFunction::rakotch_hyperbolic(),
        ComparisonFunction::banach(0.9)?,
        ComparisonFunction::custom("identity", |t| t),
    ] {
        let r = certify_rakotch(&phi, &grid)?;
        println!("{:<22} pass = {:5}  worst margin {:.2e}", r.description, r.pass, r.worst_margin);
    }

    let sys = build_system(
        SequenceSpec::geometric(1.0, -1.0, 2.0),
        SequenceSpec::geometric(1.0, -1.0, 3.0),
        8,
        YInterval::new(0.0, 1.25)?,
    )?;
    for family in [FamilySpec::a_default(), FamilySpec::B] {
        let ms = MapSystem::new(sys.clone(), family)?;
        let cert = rakotch_certificate(&ms, &random_pairs(&ms, 1000, 42), 1e-10)?;
        println!(
            "family {}: {:?}, worst ratio {:.4}, alpha floor {:.4}",
            ms.family().name(),
            cert.status,
            cert.worst_ratio,
            cert.alpha_floor
        );
        let grid = Arc::new(EvalGrid::new(ms.system(), 1024)?);
        let t = contraction_sweep(&ms, grid, 50, 42, 1e-8)?;
        println!("  T contraction: {} pairs, {} violations", t.pairs, t.violations);
    }
    Ok(())
}
