//! Builds the canonical data system `x_n = 1 - 2^-n`, `y_n = 1 - 3^-n` and
//! prints the constants that drive every later step.

use fif::{build_system, FamilySpec, MapSystem, Segment, SequenceSpec, YInterval};

pub fn main() -> fif::Result<()> {
    let sys = build_system(
        SequenceSpec::geometric(1.0, -1.0, 2.0),
        SequenceSpec::geometric(1.0, -1.0, 3.0),
        8,
        YInterval::new(0.0, 1.25)?,
    )?;
    println!("a = {}, b = {}, m = {}, M = {}", sys.a(), sys.b(), sys.m(), sys.big_m());
    for (n, p) in sys.nodes().iter().enumerate().take(4) {
        println!("  (x_{n}, y_{n}) = ({}, {:.6})", p.x, p.y);
    }

    for x in [0.3, 0.5, 0.6, 0.999] {
        match sys.find_interval(x)? {
            Segment::Interval(n) => println!("x = {x} lies in [x_{}, x_{n}]", n - 1),
            Segment::Tail => println!("x = {x} lies in the tail (x_N, b]"),
        }
    }

    for family in [FamilySpec::a_default(), FamilySpec::B] {
        let ms = MapSystem::new(sys.clone(), family)?;
        let tail = ms.tail_bound()?;
        println!(
            "family {}: sup L_n = {}, L = {:.6}, theta = {:.6}, phi: {}",
            ms.family().name(),
            ms.sup_ln(),
            ms.lipschitz_x(),
            ms.theta(),
            ms.phi().description()
        );
        println!(
            "  tail bound {:.3e} (worst n = {}), W_n leave Y by {:.2e}",
            tail.value,
            tail.argmax_n,
            ms.self_map_excess()
        );
        let c1 = ms.coeffs(1)?;
        println!("  W_1: c = {:.6}, g = {:.6}", c1.c, c1.g);
    }
    Ok(())
}
