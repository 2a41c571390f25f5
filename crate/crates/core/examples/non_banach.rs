//! W_1 of family B has y-Lipschitz ratio approaching 1 near y = 0, so no
//! Banach constant works, yet the maps still pass the Rakotch certificate.

use fif::maps::{non_banach_witness, random_pairs};
use fif::{build_system, rakotch_certificate, FamilySpec, MapSystem, SequenceSpec, YInterval};

pub fn main() -> fif::Result<()> {
    let sys = build_system(
        SequenceSpec::geometric(1.0, -1.0, 2.0),
        SequenceSpec::geometric(1.0, -1.0, 3.0),
        8,
        YInterval::new(0.0, 1.25)?,
    )?;
    for family in [FamilySpec::a_default(), FamilySpec::B] {
        let ms = MapSystem::new(sys.clone(), family)?;
        let w = non_banach_witness(&ms, 1)?;
        let cert = rakotch_certificate(&ms, &random_pairs(&ms, 1000, 7), 1e-10)?;
        println!(
            "family {}: |W_1(x,y) - W_1(x,y')| / |y - y'| = {:.9} at y = {:e}, y' = {:e}; Rakotch {:?}",
            ms.family().name(),
            w.ratio,
            w.y,
            w.y2,
            cert.status
        );
    }
    Ok(())
}
