//! The `fif` command line: `build`, `interpolate`, `attractor`, `verify`.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 malformed config or flags,
//! 3 invalid system, 4 no convergence (reports are still written),
//! 5 a certificate failed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::attractor::{
    graph_distance, graph_vs_attractor, invariance_residual, iterate_attractor, AttractorApprox,
    GraphAttractorReport, MetricChoice,
};
use crate::comparison::{certify_rakotch, log_grid, RakotchReport};
use crate::config::{FamilyConfig, InitialChoice, RunConfig};
use crate::error::{Error, Result};
use crate::maps::{
    non_banach_witness, random_pairs, rakotch_certificate, BanachWitness, CertificateStatus,
    MapSystem, RakotchCertificate,
};
use crate::metric::{hausdorff_sweep, Metric};
use crate::operator::{
    picard_iterate, t_contraction_check, verify_interpolation, EvalGrid, GridFunction,
    Interpolant, InterpolationReport, PicardOutcome, ResidualReport, Seed,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVALID_SYSTEM: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_CERTIFICATE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "fif", version, about = "Fractal interpolation of countable data systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Validate a system and print its constants.
    Build(CommonArgs),
    /// Iterate T to the interpolant and write it as CSV.
    Interpolate(CommonArgs),
    /// Iterate the fractal operator on point clouds.
    Attractor(CommonArgs),
    /// Run every certificate and report pass/fail.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// `A` or `B`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `d1` or `dtheta`.
    #[arg(long)]
    pub metric: Option<String>,
}

impl CommonArgs {
    pub fn new(config: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        CommonArgs {
            config: config.into(),
            out: out.into(),
            ..CommonArgs::default()
        }
    }

    /// Loads the config and applies flag overrides.
    pub fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(g) = self.grid {
            cfg.run.grid = g;
        }
        if let Some(d) = self.depth {
            cfg.depth = d;
        }
        if let Some(t) = self.tol {
            cfg.run.tol = t;
        }
        if let Some(k) = self.max_iter {
            cfg.run.max_iter = k;
        }
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(m) = &self.metric {
            cfg.run.metric = m.parse()?;
        }
        if let Some(f) = &self.family {
            cfg.family = match (f.to_ascii_uppercase().as_str(), &cfg.family) {
                ("A", FamilyConfig::A { d }) => FamilyConfig::A { d: d.clone() },
                ("A", _) => FamilyConfig::A { d: None },
                ("B", _) => FamilyConfig::B {},
                _ => return Err(Error::Config(format!("--family must be A or B, got '{f}'"))),
            };
        }
        cfg.validate_settings()?;
        Ok(cfg)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVALID_SYSTEM,
    }
}

/// Runs one command, writing human-readable output to `out` and errors to
/// `err`, and returns the process exit code.
pub fn run(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match command {
        Command::Build(a) => cmd_build(a, out),
        Command::Interpolate(a) => cmd_interpolate(a, out),
        Command::Attractor(a) => cmd_attractor(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io<T>(r: std::io::Result<T>) -> Result<T> {
    r.map_err(Error::from)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    io(fs::write(path, text))
}

/// `x,y` header, 17 significant digits, LF endings.
pub fn write_csv(path: &Path, rows: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut text = String::from("x,y\n");
    for (x, y) in rows {
        text.push_str(&format!("{x:.16e},{y:.16e}\n"));
    }
    io(fs::write(path, text))
}

fn prepare_out(dir: &Path) -> Result<()> {
    io(fs::create_dir_all(dir))
}

fn seed_label(seed: &Seed) -> &'static str {
    match seed {
        Seed::Chord => "chord",
        _ => "custom",
    }
}

#[derive(Debug, Serialize)]
struct BuildSummary {
    family: &'static str,
    depth: usize,
    a: f64,
    b: f64,
    m: f64,
    big_m: f64,
    sup_ln: f64,
    lipschitz_x: f64,
    theta: f64,
    phi: String,
    tail_bound: f64,
    self_map_excess: f64,
}

fn build_summary(ms: &MapSystem) -> Result<BuildSummary> {
    let sys = ms.system();
    Ok(BuildSummary {
        family: ms.family().name(),
        depth: ms.depth(),
        a: sys.a(),
        b: sys.b(),
        m: sys.m(),
        big_m: sys.big_m(),
        sup_ln: ms.sup_ln(),
        lipschitz_x: ms.lipschitz_x(),
        theta: ms.theta(),
        phi: ms.phi().description().to_string(),
        tail_bound: ms.tail_bound()?.value,
        self_map_excess: ms.self_map_excess(),
    })
}

pub fn cmd_build(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = args.load()?;
    let ms = cfg.build_map_system()?;
    let s = build_summary(&ms)?;
    io(writeln!(out, "family           {}", s.family))?;
    io(writeln!(out, "depth N          {}", s.depth))?;
    io(writeln!(out, "a, b             {}, {}", s.a, s.b))?;
    io(writeln!(out, "m, M             {}, {}", s.m, s.big_m))?;
    io(writeln!(out, "sup L_n          {}", s.sup_ln))?;
    io(writeln!(out, "L                {}", s.lipschitz_x))?;
    io(writeln!(out, "theta            {}", s.theta))?;
    io(writeln!(out, "phi              {}", s.phi))?;
    io(writeln!(out, "tail_bound       {:e}", s.tail_bound))?;
    if s.self_map_excess > 0.0 {
        io(writeln!(
            out,
            "warning          W_n leave Y by up to {:e}; range policy {:?}",
            s.self_map_excess,
            ms.range_policy()
        ))?;
    }
    Ok(EXIT_OK)
}

fn interpolate(cfg: &RunConfig, ms: &MapSystem, seed: &Seed) -> Result<PicardOutcome> {
    let grid = Arc::new(EvalGrid::new(ms.system(), cfg.run.grid)?);
    picard_iterate(ms, seed, grid, cfg.run.tol, cfg.run.max_iter)
}

#[derive(Debug, Serialize)]
struct InterpolateFile<'a> {
    family: &'static str,
    depth: usize,
    seed_function: &'static str,
    residual: &'a ResidualReport,
    interpolation: InterpolationReport,
}

pub fn cmd_interpolate(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = args.load()?;
    let ms = cfg.build_map_system()?;
    prepare_out(&args.out)?;
    let seed = Seed::Chord;
    let outcome = interpolate(&cfg, &ms, &seed)?;
    let interpolation = verify_interpolation(
        &Interpolant::Grid(outcome.interpolant.clone()),
        &ms,
        cfg.verify.interpolation_tol,
    )?;
    write_csv(&args.out.join("interpolant.csv"), outcome.interpolant.samples())?;
    write_json(
        &args.out.join("interpolate_report.json"),
        &InterpolateFile {
            family: ms.family().name(),
            depth: ms.depth(),
            seed_function: seed_label(&seed),
            residual: &outcome.report,
            interpolation,
        },
    )?;
    let r = &outcome.report;
    io(writeln!(
        out,
        "{} after {} iterations, residual {:e}, max node error {:e}",
        if r.converged { "converged" } else { "NOT converged" },
        r.iterations,
        r.sup_residual,
        r.node_errors.iter().copied().fold(r.limit_error, f64::max),
    ))?;
    Ok(if r.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

#[derive(Debug, Serialize)]
struct AttractorRun {
    initial: InitialChoice,
    iterations: usize,
    converged: bool,
    tolerance: f64,
    cloud_size: usize,
    thinning_radius: Option<f64>,
    hausdorff_trace: Vec<f64>,
}

impl AttractorRun {
    fn new(initial: InitialChoice, a: &AttractorApprox) -> Self {
        AttractorRun {
            initial,
            iterations: a.iteration,
            converged: a.converged,
            tolerance: a.tolerance,
            cloud_size: a.cloud.len(),
            thinning_radius: a.thinning_radius,
            hausdorff_trace: a.hausdorff_trace.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct GraphSummary {
    /// Present when both iterations converged.
    checked: Option<GraphAttractorReport>,
    raw_distance: f64,
}

#[derive(Debug, Serialize)]
struct AttractorFile {
    family: &'static str,
    depth: usize,
    metric: MetricChoice,
    main: AttractorRun,
    node_containment: f64,
    invariance_residual: f64,
    alternate: AttractorRun,
    cross_hausdorff: f64,
    graph: GraphSummary,
}

fn alternate_initial(initial: InitialChoice) -> InitialChoice {
    match initial {
        InitialChoice::Nodes => InitialChoice::Limit,
        _ => InitialChoice::Nodes,
    }
}

fn graph_summary(
    ms: &MapSystem,
    outcome: &PicardOutcome,
    a: &AttractorApprox,
    density: usize,
) -> Result<GraphSummary> {
    let f = Interpolant::Grid(outcome.interpolant.clone());
    let raw_distance = graph_distance(&f, ms, &a.cloud, density, Metric::D1)?;
    let checked = if outcome.report.converged && a.converged {
        Some(graph_vs_attractor(ms, outcome, a, density, Metric::D1)?)
    } else {
        None
    };
    Ok(GraphSummary {
        checked,
        raw_distance,
    })
}

pub fn cmd_attractor(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = args.load()?;
    let ms = cfg.build_map_system()?;
    prepare_out(&args.out)?;
    let metric = cfg.run.metric;
    let initial = cfg.attractor.initial;
    let main = iterate_attractor(&ms, &cfg.attractor.iteration_config(initial, metric))?;
    let alt_initial = alternate_initial(initial);
    let alt = iterate_attractor(&ms, &cfg.attractor.iteration_config(alt_initial, metric))?;
    let outcome = interpolate(&cfg, &ms, &Seed::Chord)?;

    let node_containment = ms
        .system()
        .nodes()
        .iter()
        .map(|p| main.cloud.distance_to(p, Metric::D1))
        .fold(0.0, f64::max);
    let file = AttractorFile {
        family: ms.family().name(),
        depth: ms.depth(),
        metric,
        node_containment,
        invariance_residual: invariance_residual(&ms, &main)?,
        cross_hausdorff: hausdorff_sweep(&main.cloud, &alt.cloud, main.metric)?,
        graph: graph_summary(&ms, &outcome, &main, cfg.run.grid)?,
        main: AttractorRun::new(initial, &main),
        alternate: AttractorRun::new(alt_initial, &alt),
    };
    write_csv(
        &args.out.join("attractor.csv"),
        main.cloud.points().iter().map(|p| (p.x, p.y)),
    )?;
    write_json(&args.out.join("attractor_trace.json"), &file)?;
    io(writeln!(
        out,
        "{} after {} iterations, {} points, last step {:e}",
        if main.converged { "converged" } else { "NOT converged" },
        main.iteration,
        main.cloud.len(),
        main.hausdorff_trace.last().copied().unwrap_or(f64::NAN),
    ))?;
    io(writeln!(out, "cross-Hausdorff vs {:?} start: {:e}", alt_initial, file.cross_hausdorff))?;
    match &file.graph.checked {
        Some(g) => io(writeln!(
            out,
            "graph vs attractor: {:e} (bound {:e})",
            g.distance, g.bound
        ))?,
        None => io(writeln!(
            out,
            "graph vs attractor: {:e} (unconverged, no bound)",
            file.graph.raw_distance
        ))?,
    }
    Ok(if main.converged && alt.converged && outcome.report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

#[derive(Debug, Serialize)]
pub struct ContractionSummary {
    pub pairs: usize,
    pub violations: usize,
    pub worst_excess: f64,
    pub slack: f64,
    pub pass: bool,
}

/// `d(Tg, Th) <= φ(d(g, h)) + slack` for seeded random in-range pairs.
pub fn contraction_sweep(
    ms: &MapSystem,
    grid: Arc<EvalGrid>,
    pairs: usize,
    seed: u64,
    slack: f64,
) -> Result<ContractionSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = ms.system();
    let mut violations = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let g = GridFunction::from_seed(grid.clone(), &Seed::random_in_range(&mut rng, 0.2), sys);
        let h = GridFunction::from_seed(grid.clone(), &Seed::random_in_range(&mut rng, 0.2), sys);
        let r = t_contraction_check(ms, &g, &h, slack)?;
        worst_excess = worst_excess.max(r.dist_tg_th - r.phi_bound);
        if !r.holds {
            violations += 1;
        }
    }
    Ok(ContractionSummary {
        pairs,
        violations,
        worst_excess,
        slack,
        pass: violations == 0,
    })
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct VerifyFile {
    family: &'static str,
    depth: usize,
    seed: u64,
    pass: bool,
    checks: Vec<Check>,
    phi: RakotchReport,
    rakotch: RakotchCertificate,
    contraction: ContractionSummary,
    residual: ResidualReport,
    interpolation: InterpolationReport,
    attractor: AttractorRun,
    graph: GraphSummary,
    non_banach: BanachWitness,
    self_map_excess: f64,
}

pub fn cmd_verify(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = args.load()?;
    let ms = cfg.build_map_system()?;
    prepare_out(&args.out)?;
    let seed = cfg.run.seed;
    let v = &cfg.verify;

    let phi = certify_rakotch(ms.phi(), &log_grid(1e-6, 1e3, 64))?;
    let rakotch = rakotch_certificate(&ms, &random_pairs(&ms, v.rakotch_pairs, seed), v.rakotch_tol)?;
    let grid = Arc::new(EvalGrid::new(ms.system(), cfg.run.grid)?);
    let contraction = contraction_sweep(&ms, grid, v.contraction_pairs, seed, v.contraction_slack)?;
    let outcome = interpolate(&cfg, &ms, &Seed::Chord)?;
    let interpolation = verify_interpolation(
        &Interpolant::Grid(outcome.interpolant.clone()),
        &ms,
        v.interpolation_tol,
    )?;
    let initial = cfg.attractor.initial;
    let a = iterate_attractor(&ms, &cfg.attractor.iteration_config(initial, cfg.run.metric))?;
    let graph = graph_summary(&ms, &outcome, &a, cfg.run.grid)?;
    let non_banach = non_banach_witness(&ms, 1)?;

    let checks = vec![
        Check {
            name: "phi_rakotch",
            pass: phi.pass,
            detail: format!("{}, worst margin {:e}", phi.description, phi.worst_margin),
        },
        Check {
            name: "f_n_rakotch",
            pass: rakotch.status == CertificateStatus::Pass,
            detail: format!(
                "{} pairs x {} maps, {} violations, theta {}",
                rakotch.pairs, rakotch.maps, rakotch.violations, rakotch.theta
            ),
        },
        Check {
            name: "t_contraction",
            pass: contraction.pass,
            detail: format!("{} pairs, {} violations", contraction.pairs, contraction.violations),
        },
        Check {
            name: "interpolation",
            pass: outcome.report.converged && interpolation.pass,
            detail: format!(
                "{} iterations, max node error {:e}",
                outcome.report.iterations, interpolation.max_error
            ),
        },
        Check {
            name: "graph_attractor",
            pass: graph.checked.as_ref().is_some_and(|g| g.within_bound),
            detail: match &graph.checked {
                Some(g) => format!("distance {:e}, bound {:e}", g.distance, g.bound),
                None => format!("unconverged, raw distance {:e}", graph.raw_distance),
            },
        },
    ];
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        io(writeln!(
            out,
            "{} {:<16} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ))?;
    }
    io(writeln!(
        out,
        "info non-Banach    W_1 y-ratio {} at y = {:e}",
        non_banach.ratio, non_banach.y
    ))?;

    write_json(
        &args.out.join("verify_report.json"),
        &VerifyFile {
            family: ms.family().name(),
            depth: ms.depth(),
            seed,
            pass,
            checks,
            phi,
            rakotch,
            contraction,
            residual: outcome.report,
            interpolation,
            attractor: AttractorRun::new(initial, &a),
            graph,
            non_banach,
            self_map_excess: ms.self_map_excess(),
        },
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_CERTIFICATE })
}
