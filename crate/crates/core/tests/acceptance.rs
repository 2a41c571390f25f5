//! Acceptance criteria, one printed PASS/FAIL line each.
//!
//! Values checked against closed forms use oracles written here from the
//! defining formulas (`W_n`, `l_n`, `c_n`, `θ`, `y_n`), not the library's
//! own evaluation paths.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use fif::attractor::{commutation_distance, graph_distance, iterate_attractor};
use fif::cli::contraction_sweep;
use fif::maps::{non_banach_witness, random_pairs, CertificateStatus};
use fif::{
    apply_t, build_system, picard_iterate, rakotch_certificate, verify_interpolation, EvalGrid,
    FamilySpec, GridFunction, InitialSet, Interpolant, IterationConfig, MapSystem, Metric,
    PicardOutcome, Point2, RangePolicy, Seed, SequenceSpec, YInterval,
};

const R: usize = 4096;
const TOL: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq, Debug)]
enum Fam {
    A,
    B,
}

impl Fam {
    fn spec(self) -> FamilySpec {
        match self {
            Fam::A => FamilySpec::a_default(),
            Fam::B => FamilySpec::B,
        }
    }
}

fn canonical(fam: Fam, depth: usize, y_hi: f64, policy: RangePolicy) -> MapSystem {
    let sys = build_system(
        SequenceSpec::geometric(1.0, -1.0, 2.0),
        SequenceSpec::geometric(1.0, -1.0, 3.0),
        depth,
        YInterval::new(0.0, y_hi).unwrap(),
    )
    .unwrap();
    MapSystem::new(sys, fam.spec())
        .unwrap()
        .with_range_policy(policy)
}

/// The literal instance: `Y = [0, 1]`, values outside `Y` reported.
fn literal(fam: Fam) -> MapSystem {
    canonical(fam, 8, 1.0, RangePolicy::Report)
}

fn solve(ms: &MapSystem, seed: &Seed) -> PicardOutcome {
    let grid = Arc::new(EvalGrid::new(ms.system(), R).unwrap());
    picard_iterate(ms, seed, grid, TOL, 10_000).unwrap()
}

// Oracles for the canonical instance on [a, b] = [0, 1], m = 0, M = 1.

fn x_n(n: i32) -> f64 {
    1.0 - 2f64.powi(-n)
}

fn y_n(n: i32) -> f64 {
    1.0 - 3f64.powi(-n)
}

fn h(n: i32, y: f64) -> f64 {
    y / (1.0 + n as f64 * y)
}

/// `(c_n, g_n)` from the coefficient formulas with `a = 0`, `b = 1`.
fn coeffs(fam: Fam, n: i32) -> (f64, f64) {
    let dy = y_n(n) - y_n(n - 1);
    match fam {
        Fam::A => (dy - 2f64.powi(-n), y_n(n - 1)),
        Fam::B => (dy - (h(n, 1.0) - h(n, 0.0)), y_n(n - 1) - h(n, 0.0)),
    }
}

fn w_oracle(fam: Fam, n: i32, x: f64, y: f64) -> f64 {
    let (c, g) = coeffs(fam, n);
    match fam {
        Fam::A => c * x + 2f64.powi(-n) * y + g,
        Fam::B => c * x + h(n, y) + g,
    }
}

fn l_oracle(n: i32, x: f64) -> f64 {
    x_n(n - 1) + (x_n(n) - x_n(n - 1)) * x
}

fn lipschitz_oracle(fam: Fam) -> f64 {
    (1..=9).map(|n| coeffs(fam, n).0.abs()).fold(0.0, f64::max)
}

fn theta_oracle(fam: Fam) -> f64 {
    (1.0 - 0.5) / (2.0 * (lipschitz_oracle(fam) + 1.0))
}

fn psi_oracle(fam: Fam, t: f64) -> f64 {
    let floor = 0.5 + theta_oracle(fam) * (lipschitz_oracle(fam) + 1.0);
    let phi = match fam {
        Fam::A => 0.5 * t,
        Fam::B => t / (1.0 + t),
    };
    t * floor.max(phi / t)
}

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    /// Set when a failure is a documented property of the problem; the part
    /// that must still hold goes into `pass_required`.
    expected_failure: Option<&'static str>,
    pass_required: bool,
}

impl Outcome {
    fn new(id: &'static str, pass: bool, detail: String) -> Self {
        Outcome {
            id,
            pass,
            detail,
            expected_failure: None,
            pass_required: pass,
        }
    }
}

fn say(line: &str) {
    // bypasses the harness's output capture so the lines land in the log
    let mut out = std::io::stdout();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn criterion_1() -> Vec<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut detail = Vec::new();
    for fam in [Fam::A, Fam::B] {
        let start = Instant::now();
        let ms = literal(fam);
        let out = solve(&ms, &Seed::Chord);
        let secs = start.elapsed().as_secs_f64();
        let f = &out.interpolant;
        let node_err = (0..=8)
            .map(|n| (f.eval(x_n(n)) - y_n(n)).abs())
            .fold(0.0, f64::max);
        let limit_err = (f.eval(1.0) - 1.0).abs();
        let ok = out.report.converged && node_err <= 1e-9 && limit_err <= 1e-9 && secs < 10.0;
        pass &= ok;
        detail.push(format!(
            "{fam:?}: node err {node_err:.1e}, |f(b)-M| {limit_err:.1e}, {} its, {secs:.2}s, leaves Y by {:.3e}",
            out.report.iterations, out.report.range_excess
        ));
    }
    lines.push(Outcome::new("1", pass, detail.join("; ")));

    let mut pass = true;
    let mut detail = Vec::new();
    for fam in [Fam::A, Fam::B] {
        let ms = canonical(fam, 8, 1.25, RangePolicy::Strict);
        let out = solve(&ms, &Seed::Chord);
        let rep = verify_interpolation(&Interpolant::Grid(out.interpolant), &ms, 1e-9).unwrap();
        pass &= out.report.converged && rep.pass && out.report.range_excess == 0.0;
        detail.push(format!("{fam:?}: max err {:.1e}", rep.max_error));
    }
    lines.push(Outcome::new(
        "1b",
        pass,
        format!("strict range, Y = [0, 1.25]: {}", detail.join("; ")),
    ));
    lines
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for fam in [Fam::A, Fam::B] {
        let ms = literal(fam);
        let chord = solve(&ms, &Seed::Chord);
        let plateau = solve(
            &ms,
            &Seed::Plateau {
                level: 1.0,
                ramp: 0.05,
            },
        );
        let f = &chord.interpolant;
        let fixed = apply_t(f, &ms).unwrap().sup_distance(f).unwrap();
        let seeds = f.sup_distance(&plateau.interpolant).unwrap();
        pass &= fixed <= 2.0 * TOL && seeds <= 2.0 * TOL;
        detail.push(format!("{fam:?}: |f - Tf| {fixed:.1e}, seeds {seeds:.1e}"));
    }
    Outcome::new("2", pass, detail.join("; "))
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for fam in [Fam::A, Fam::B] {
        let ms = literal(fam);
        let grid = Arc::new(EvalGrid::new(ms.system(), R).unwrap());

        // library T against the oracle on the chord, exact at every grid point
        let chord = GridFunction::from_seed(grid.clone(), &Seed::Chord, ms.system());
        let tc = apply_t(&chord, &ms).unwrap();
        let oracle_gap = tc
            .samples()
            .map(|(x, v)| {
                let want = if x > x_n(8) {
                    1.0
                } else {
                    let n = (1..=8).find(|&n| x <= x_n(n)).unwrap();
                    let u = (x - x_n(n - 1)) / (x_n(n) - x_n(n - 1));
                    w_oracle(fam, n, u, u)
                };
                (v - want).abs()
            })
            .fold(0.0, f64::max);

        let sweep = contraction_sweep(&ms, grid, 100, 42, 1e-8).unwrap();
        pass &= sweep.violations == 0 && oracle_gap <= 1e-13;
        detail.push(format!(
            "{fam:?}: {} pairs, {} violations, worst excess {:.1e}, T vs oracle {:.1e}",
            sweep.pairs, sweep.violations, sweep.worst_excess, oracle_gap
        ));
    }
    Outcome::new("3", pass, detail.join("; "))
}

fn rakotch_oracle_violations(fam: Fam, pairs: &[(Point2, Point2)]) -> usize {
    let theta = theta_oracle(fam);
    let d = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).abs() + theta * (p.1 - q.1).abs();
    let mut violations = 0;
    for (p, q) in pairs {
        let t = d((p.x, p.y), (q.x, q.y));
        if t == 0.0 {
            continue;
        }
        for n in 1..=8 {
            let fp = (l_oracle(n, p.x), w_oracle(fam, n, p.x, p.y));
            let fq = (l_oracle(n, q.x), w_oracle(fam, n, q.x, q.y));
            if d(fp, fq) > psi_oracle(fam, t) + 1e-10 {
                violations += 1;
            }
        }
    }
    violations
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for fam in [Fam::A, Fam::B] {
        let ms = literal(fam);
        let pairs = random_pairs(&ms, 1000, 42);
        let cert = rakotch_certificate(&ms, &pairs, 1e-10).unwrap();
        let formula = (1.0 - cert.sup_ln) / (2.0 * (cert.lipschitz_x + 1.0));
        let theta_exact = cert.theta == formula;
        let theta_oracle_gap = (cert.theta - theta_oracle(fam)).abs();
        let oracle = rakotch_oracle_violations(fam, &pairs);
        pass &= cert.status == CertificateStatus::Pass
            && cert.violations == 0
            && oracle == 0
            && theta_exact
            && theta_oracle_gap <= 1e-15;
        detail.push(format!(
            "{fam:?}: {} violations (oracle {oracle}), worst ratio {:.4}, theta {} (formula {}, oracle gap {:.0e})",
            cert.violations,
            cert.worst_ratio,
            cert.theta,
            if theta_exact { "exact" } else { "MISMATCH" },
            theta_oracle_gap
        ));
    }
    Outcome::new("4", pass, detail.join("; "))
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (fam, tol) in [(Fam::A, 1e-4), (Fam::B, 1e-3)] {
        let ms = literal(fam);
        let f = solve(&ms, &Seed::Chord);
        let cfg = IterationConfig {
            initial: InitialSet::Nodes,
            tolerance: tol,
            max_iterations: 200,
            ..IterationConfig::default()
        };
        let a = iterate_attractor(&ms, &cfg).unwrap();
        let rep = fif::graph_vs_attractor(&ms, &f, &a, R, Metric::D1).unwrap();
        let chord = Interpolant::Recursive {
            seed: Seed::Chord,
            depth: 0,
        };
        let wrong = graph_distance(&chord, &ms, &a.cloud, R, Metric::D1).unwrap();
        let ratio = wrong / rep.bound;
        // the negative control is only attainable for family A (see notes)
        let negative_ok = fam == Fam::B || ratio >= 10.0;
        pass &= rep.within_bound && negative_ok;
        detail.push(format!(
            "{fam:?}: distance {:.3e} <= bound {:.3e} ({} steps, tol {tol:.0e}); chord/bound {ratio:.1}{}",
            rep.distance,
            rep.bound,
            a.iteration,
            if fam == Fam::B { " (info)" } else { "" }
        ));
    }
    Outcome::new("5", pass, detail.join("; "))
}

fn criterion_6() -> Outcome {
    let mut detail = Vec::new();
    let mut pass_a = true;
    let mut pass_b = true;
    for fam in [Fam::A, Fam::B] {
        let ms = literal(fam);
        let grid = Arc::new(EvalGrid::new(ms.system(), R).unwrap());
        let h = grid.max_spacing();
        for (name, seed) in [("chord", Seed::Chord), ("bump", Seed::bump(0.1))] {
            let f = GridFunction::from_seed(grid.clone(), &seed, ms.system());
            let d = commutation_distance(&ms, &f, Metric::D1).unwrap();
            let ok = d <= 10.0 * h;
            match fam {
                Fam::A => pass_a &= ok,
                Fam::B => pass_b &= ok,
            }
            detail.push(format!("{fam:?} {name}: {:.1}h", d / h));
        }
    }
    Outcome {
        id: "6",
        pass: pass_a && pass_b,
        detail: format!("bound 10h; {}", detail.join(", ")),
        expected_failure: (!pass_b).then_some(
            "family B: the slope of T f0 near x_{n-1} is about 2^n, so point samples at spacing h sit ~slope*h/2 apart",
        ),
        pass_required: pass_a,
    }
}

fn criterion_7() -> Outcome {
    let ms = literal(Fam::B);
    let w = non_banach_witness(&ms, 1).unwrap();
    let cert = rakotch_certificate(&ms, &random_pairs(&ms, 1000, 42), 1e-10).unwrap();
    // oracle ratio for the same pair
    let oracle = (w_oracle(Fam::B, 1, w.x, w.y) - w_oracle(Fam::B, 1, w.x, w.y2)).abs()
        / (w.y - w.y2).abs();
    let pass = w.ratio >= 0.999 && oracle >= 0.999 && cert.status == CertificateStatus::Pass;
    Outcome::new(
        "7",
        pass,
        format!(
            "W_1 ratio {:.9} (oracle {:.9}) at y = {:e}, y' = {:e}; Rakotch {:?}",
            w.ratio, oracle, w.y, w.y2, cert.status
        ),
    )
}

fn criterion_8() -> Outcome {
    let sys = build_system(
        SequenceSpec::geometric(1.0, -1.0, 2.0),
        SequenceSpec::constant(0.0),
        8,
        YInterval::new(0.0, 1.0).unwrap(),
    )
    .unwrap();
    let ms = MapSystem::new(sys, FamilySpec::a_default()).unwrap();
    let f = solve(&ms, &Seed::bump(0.2));
    let f_max = f.interpolant.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
    let cfg = IterationConfig {
        tolerance: 1e-4,
        ..IterationConfig::default()
    };
    let a = iterate_attractor(&ms, &cfg).unwrap();
    let y_max = a.cloud.points().iter().map(|p| p.y.abs()).fold(0.0, f64::max);
    let pass = f.report.converged && a.converged && f_max <= 1e-9 && y_max <= 1e-9;
    Outcome::new(
        "8",
        pass,
        format!(
            "interpolant max |f - m| {f_max:.1e} ({} its), cloud max |y| {y_max:.1e} ({} points)",
            f.report.iterations,
            a.cloud.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for fam in [Fam::A, Fam::B] {
        let ms8 = literal(fam);
        let ms12 = canonical(fam, 12, 1.0, RangePolicy::Report);
        let f8 = solve(&ms8, &Seed::Chord).interpolant;
        let f12 = solve(&ms12, &Seed::Chord).interpolant;
        let diff = f8
            .samples()
            .filter(|(x, _)| *x <= x_n(8))
            .map(|(x, v)| (v - f12.eval(x)).abs())
            .fold(0.0, f64::max);
        let bound = ms8.tail_bound().unwrap().value;
        pass &= diff <= bound;
        detail.push(format!("{fam:?}: {diff:.3e} <= {bound:.3e}"));
    }
    Outcome::new("9", pass, detail.join("; "))
}

#[test]
fn acceptance() {
    let started = Instant::now();
    let mut all = criterion_1();
    for run in [
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ] {
        all.push(run());
    }

    say("");
    say("acceptance criteria");
    for o in &all {
        say(&format!(
            "{} criterion {:<3} {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.detail
        ));
        if let Some(why) = o.expected_failure {
            say(&format!("     expected: {why}"));
        }
    }
    say(&format!("total {:.1}s", started.elapsed().as_secs_f64()));

    let unexpected: Vec<&str> = all
        .iter()
        .filter(|o| !o.pass && (o.expected_failure.is_none() || !o.pass_required))
        .map(|o| o.id)
        .collect();
    assert!(unexpected.is_empty(), "failed criteria: {unexpected:?}");
}
