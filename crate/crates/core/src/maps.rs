//! The map families `l_n`, `W_n` and `f_n = (l_n, W_n)` on `[a,b] × Y`,
//! their Lipschitz data, the metric weight `θ`, and sampled certificates.
//!
//! `l_n` is the affine map of `[a,b]` onto `[x_{n-1}, x_n]`. The vertical
//! maps come in two families that share the shape
//!
//! ```text
//! W_n(x, y) = lerp_t(y_{n-1}, y_n) + v_n(y) - lerp_t(v_n(m), v_n(M)),   t = (x-a)/(b-a)
//! ```
//!
//! with `v_n(y) = d_n·y` (family A, Banach in `y`) or `v_n(y) = y/(1+n·y)`
//! (family B, Rakotch but not Banach in `y`). Expanding the lerps gives the
//! usual `c_n·x + v_n(y) + g_n` coefficients, which are stored for reporting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::comparison::ComparisonFunction;
use crate::data::{CountableDataSystem, SequenceSpec};
use crate::error::{ensure_finite, Error, Result};
use crate::metric::{Metric, Point2, ThetaMetric};

/// Absolute slack for membership checks in `Y` and `[a,b]`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Affine `l_n : [a,b] → [x_{n-1}, x_n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubintervalMap {
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    pub lo: f64,
    pub hi: f64,
    a: f64,
    b: f64,
}

impl SubintervalMap {
    pub fn new(n: usize, lo: f64, hi: f64, a: f64, b: f64) -> Self {
        SubintervalMap {
            n,
            slope: (hi - lo) / (b - a),
            intercept: (b * lo - a * hi) / (b - a),
            lo,
            hi,
            a,
            b,
        }
    }

    /// Lipschitz constant `L_n`.
    pub fn lipschitz(&self) -> f64 {
        self.slope
    }

    #[inline]
    pub(crate) fn apply(&self, x: f64) -> f64 {
        let t = (x - self.a) / (self.b - self.a);
        (1.0 - t) * self.lo + t * self.hi
    }

    #[inline]
    pub(crate) fn pull_back(&self, x: f64) -> f64 {
        let t = (x - self.lo) / (self.hi - self.lo);
        (1.0 - t) * self.a + t * self.b
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                lo: self.a,
                hi: self.b,
            });
        }
        Ok(self.apply(x))
    }

    pub fn inverse(&self, x: f64) -> Result<f64> {
        if !(x >= self.lo && x <= self.hi) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(self.pull_back(x))
    }
}

pub fn l_eval(map: &SubintervalMap, x: f64) -> Result<f64> {
    map.eval(x)
}

pub fn l_inverse(map: &SubintervalMap, x: f64) -> Result<f64> {
    map.inverse(x)
}

#[derive(Debug, Clone)]
pub enum FamilySpec {
    /// `W_n(x,y) = c_n x + d_n y + g_n` with `d_n ∈ [0,1)`, `d_n → 0`.
    A { d: SequenceSpec },
    /// `W_n(x,y) = c_n x + y/(1+n y) + g_n`; needs `Y ⊆ [0, ∞)`.
    B,
}

impl FamilySpec {
    /// Family A with `d_n = 2^{-n}`.
    pub fn a_default() -> Self {
        FamilySpec::A {
            d: SequenceSpec::geometric(0.0, 1.0, 2.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::A { .. } => "A",
            FamilySpec::B => "B",
        }
    }
}

/// Per-index coefficients of `W_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WCoeffs {
    pub n: usize,
    pub c: f64,
    /// `d_n` for family A; `None` for family B.
    pub d: Option<f64>,
    pub g: f64,
    y_prev: f64,
    y_next: f64,
    v_m: f64,
    v_big_m: f64,
}

/// How kernel evaluations treat `W_n` values outside `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangePolicy {
    /// Any value outside `Y` (beyond [`MEMBERSHIP_TOL`]) is an error.
    #[default]
    Strict,
    /// Values are kept; reports carry the largest excursion outside `Y`.
    Report,
}

#[derive(Debug, Clone)]
pub struct MapSystem {
    sys: CountableDataSystem,
    family: FamilySpec,
    l: Vec<SubintervalMap>,
    coeffs: Vec<WCoeffs>,
    sup_ln: f64,
    lipschitz_x: f64,
    theta: f64,
    phi: ComparisonFunction,
    range_policy: RangePolicy,
    image_boxes: Vec<(f64, f64)>,
}

/// `θ = (1 - sup L_n) / (2 (L + 1))`.
pub fn compute_theta(sup_ln: f64, lipschitz_x: f64) -> Result<f64> {
    ensure_finite("sup L_n", sup_ln)?;
    ensure_finite("L", lipschitz_x)?;
    if !(0.0..1.0).contains(&sup_ln) {
        return Err(Error::InvalidSystem(format!(
            "sup L_n must lie in [0, 1), got {sup_ln}"
        )));
    }
    if lipschitz_x < 0.0 {
        return Err(Error::InvalidSystem(format!("L must be >= 0, got {lipschitz_x}")));
    }
    let theta = (1.0 - sup_ln) / (2.0 * (lipschitz_x + 1.0));
    debug_assert!(theta > 0.0 && theta < 1.0);
    Ok(theta)
}

impl MapSystem {
    pub fn new(sys: CountableDataSystem, family: FamilySpec) -> Result<Self> {
        let depth = sys.depth();
        let (a, b) = (sys.a(), sys.b());
        let y = sys.y_interval();

        if let FamilySpec::B = family {
            if y.lo < 0.0 {
                return Err(Error::InvalidSystem(format!(
                    "family B requires Y ⊆ [0, ∞), got Y = [{}, {}]",
                    y.lo, y.hi
                )));
            }
        }
        if let FamilySpec::A { d } = &family {
            d.validate()?;
            if d.limit() != 0.0 {
                return Err(Error::InvalidSystem(format!(
                    "family A needs d_n → 0, declared limit is {}",
                    d.limit()
                )));
            }
        }

        // Instantiated indices 1..=N+1 stand in for the sup over all n.
        let last = depth + 1;
        let mut l = Vec::with_capacity(last);
        let mut coeffs = Vec::with_capacity(last);
        let mut prev = sys.point_at(0)?;
        for n in 1..=last {
            let cur = sys.point_at(n)?;
            if n > depth && !(cur.x > prev.x && cur.x < b) {
                return Err(Error::InvalidSystem(format!(
                    "x_{n} = {} must lie strictly between x_{} and b",
                    cur.x,
                    n - 1
                )));
            }
            l.push(SubintervalMap::new(n, prev.x, cur.x, a, b));
            coeffs.push(family_coeffs(&family, &sys, n, prev.y, cur.y)?);
            prev = cur;
        }

        let sup_ln = l.iter().map(|m| m.slope).fold(0.0, f64::max);
        let lipschitz_x = coeffs.iter().map(|c| c.c.abs()).fold(0.0, f64::max);
        let theta = compute_theta(sup_ln, lipschitz_x)?;
        let phi = match &family {
            FamilySpec::A { .. } => {
                let sup_d = coeffs.iter().filter_map(|c| c.d).fold(0.0, f64::max);
                ComparisonFunction::banach(sup_d)?
            }
            FamilySpec::B => ComparisonFunction::rakotch_hyperbolic(),
        };

        let mut ms = MapSystem {
            sys,
            family,
            l,
            coeffs,
            sup_ln,
            lipschitz_x,
            theta,
            phi,
            range_policy: RangePolicy::Strict,
            image_boxes: Vec::new(),
        };
        ms.image_boxes = (1..=last).map(|n| ms.image_box(n)).collect();
        Ok(ms)
    }

    pub fn with_range_policy(mut self, policy: RangePolicy) -> Self {
        self.range_policy = policy;
        self
    }

    pub fn system(&self) -> &CountableDataSystem {
        &self.sys
    }
    pub fn family(&self) -> &FamilySpec {
        &self.family
    }
    pub fn depth(&self) -> usize {
        self.sys.depth()
    }
    pub fn sup_ln(&self) -> f64 {
        self.sup_ln
    }
    /// `L = max |c_n|` over the instantiated indices.
    pub fn lipschitz_x(&self) -> f64 {
        self.lipschitz_x
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn theta_metric(&self) -> ThetaMetric {
        ThetaMetric::new(self.theta).expect("theta validated at construction")
    }
    pub fn phi(&self) -> &ComparisonFunction {
        &self.phi
    }
    pub fn range_policy(&self) -> RangePolicy {
        self.range_policy
    }

    /// `l_n` for `1 <= n <= N + 1`.
    pub fn subinterval_map(&self, n: usize) -> Result<&SubintervalMap> {
        self.check_index(n)?;
        Ok(&self.l[n - 1])
    }

    pub fn coeffs(&self, n: usize) -> Result<&WCoeffs> {
        self.check_index(n)?;
        Ok(&self.coeffs[n - 1])
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.depth() + 1 {
            return Err(Error::InvalidInput(format!(
                "map index {n} outside 1..={}",
                self.depth() + 1
            )));
        }
        Ok(())
    }

    #[inline]
    fn v(&self, n: usize, c: &WCoeffs, y: f64) -> f64 {
        match c.d {
            Some(d) => d * y,
            None => y / (1.0 + n as f64 * y),
        }
    }

    /// Closed-form `W_n(x, y)` with no domain or range checks.
    #[inline]
    pub fn w_formula(&self, n: usize, x: f64, y: f64) -> f64 {
        let c = &self.coeffs[n - 1];
        let t = (x - self.sys.a()) / (self.sys.b() - self.sys.a());
        let base = (1.0 - t) * c.y_prev + t * c.y_next;
        let chord = (1.0 - t) * c.v_m + t * c.v_big_m;
        base + (self.v(n, c, y) - chord)
    }

    /// `W_n(x, y)` from the expanded coefficients `c_n x + v_n(y) + g_n`.
    pub fn w_expanded(&self, n: usize, x: f64, y: f64) -> f64 {
        let c = &self.coeffs[n - 1];
        c.c * x + self.v(n, c, y) + c.g
    }

    fn check_point(&self, x: f64, y: f64) -> Result<()> {
        ensure_finite("x", x)?;
        ensure_finite("y", y)?;
        self.sys.check_x(x)?;
        let yi = self.sys.y_interval();
        if !yi.contains(y, MEMBERSHIP_TOL) {
            return Err(Error::Domain {
                what: "y",
                value: y,
                lo: yi.lo,
                hi: yi.hi,
            });
        }
        Ok(())
    }

    /// Checked `W_n(x, y)`: inputs must lie in `[a,b] × Y` and the value in
    /// `Y`, independent of the range policy.
    pub fn w_eval(&self, n: usize, x: f64, y: f64) -> Result<f64> {
        self.check_index(n)?;
        self.check_point(x, y)?;
        let v = self.w_formula(n, x, y);
        self.check_range(n, x, y, v)?;
        Ok(v)
    }

    fn check_range(&self, n: usize, x: f64, y: f64, v: f64) -> Result<()> {
        let yi = self.sys.y_interval();
        if !v.is_finite() || !yi.contains(v, MEMBERSHIP_TOL) {
            return Err(Error::RangeViolation {
                n,
                x,
                y,
                value: v,
                lo: yi.lo,
                hi: yi.hi,
            });
        }
        Ok(())
    }

    /// Evaluation used inside the iteration kernels: applies the range
    /// policy but not the input-domain check on `y`.
    #[inline]
    pub(crate) fn w_kernel(&self, n: usize, x: f64, y: f64) -> Result<f64> {
        let v = self.w_formula(n, x, y);
        match self.range_policy {
            RangePolicy::Strict => self.check_range(n, x, y, v)?,
            RangePolicy::Report => {
                if !v.is_finite() {
                    return Err(Error::RangeViolation {
                        n,
                        x,
                        y,
                        value: v,
                        lo: self.sys.y_interval().lo,
                        hi: self.sys.y_interval().hi,
                    });
                }
            }
        }
        Ok(v)
    }

    /// Checked `f_n(p) = (l_n(p.x), W_n(p.x, p.y))`.
    pub fn f_eval(&self, n: usize, p: Point2) -> Result<Point2> {
        let l = self.subinterval_map(n)?;
        let x = l.eval(p.x)?;
        let y = self.w_eval(n, p.x, p.y)?;
        Ok(Point2::new(x, y))
    }

    #[inline]
    pub(crate) fn f_kernel(&self, n: usize, p: Point2) -> Result<Point2> {
        Ok(Point2::new(
            self.l[n - 1].apply(p.x),
            self.w_kernel(n, p.x, p.y)?,
        ))
    }

    #[inline]
    pub(crate) fn f_formula(&self, n: usize, p: Point2) -> Point2 {
        Point2::new(self.l[n - 1].apply(p.x), self.w_formula(n, p.x, p.y))
    }

    /// Exact image of `[a,b] × Y` under `W_n` (both families are affine in x
    /// and non-decreasing in y on `Y`).
    pub fn image_box(&self, n: usize) -> (f64, f64) {
        let (a, b) = (self.sys.a(), self.sys.b());
        let y = self.sys.y_interval();
        let vals = [
            self.w_formula(n, a, y.lo),
            self.w_formula(n, a, y.hi),
            self.w_formula(n, b, y.lo),
            self.w_formula(n, b, y.hi),
        ];
        (
            vals.iter().copied().fold(f64::INFINITY, f64::min),
            vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// Largest distance by which some `W_n`, `n <= N`, maps `[a,b] × Y`
    /// outside `Y`. Zero means the truncated system is a self-map.
    pub fn self_map_excess(&self) -> f64 {
        let y = self.sys.y_interval();
        self.image_boxes[..self.depth()]
            .iter()
            .map(|(lo, hi)| y.excess(*lo).max(y.excess(*hi)))
            .fold(0.0, f64::max)
    }

    /// Closed-form bound on `diam(Im W_n)` for any `n >= 1`.
    pub fn diam_bound(&self, n: usize) -> Result<f64> {
        let (a, b) = (self.sys.a(), self.sys.b());
        let yi = self.sys.y_interval();
        let c = if n <= self.depth() + 1 {
            self.coeffs[n - 1]
        } else {
            let prev = self.sys.point_at(n - 1)?;
            let cur = self.sys.point_at(n)?;
            family_coeffs(&self.family, &self.sys, n, prev.y, cur.y)?
        };
        let x_part = (b - a) * c.c.abs();
        let y_part = match c.d {
            Some(d) => yi.diam() * d,
            None => {
                let nf = n as f64;
                yi.diam() / ((1.0 + nf * yi.lo) * (1.0 + nf * yi.hi))
            }
        };
        Ok(x_part + y_part)
    }

    /// Upper bound on the uniform error of replacing the tail `(x_N, b]` by
    /// the single value `M`.
    pub fn tail_bound(&self) -> Result<TailBound> {
        self.tail_bound_scan(TAIL_SCAN)
    }

    pub fn tail_bound_scan(&self, window: usize) -> Result<TailBound> {
        let depth = self.depth();
        let big_m = self.sys.big_m();
        let mut end = depth + window;
        for s in [self.sys.xs(), self.sys.ys()] {
            if let Some(max) = s.max_index() {
                end = end.min(max);
            }
        }
        if let FamilySpec::A { d } = &self.family {
            if let Some(max) = d.max_index() {
                end = end.min(max);
            }
        }
        let mut terms = Vec::new();
        let mut prev = self.sys.point_at(depth)?;
        for n in (depth + 1)..=end {
            let cur = self.sys.point_at(n)?;
            let term = self.diam_bound(n)? + (big_m - cur.y).abs() + (cur.x - prev.x);
            terms.push((n, term));
            prev = cur;
        }
        if terms.is_empty() {
            return Err(Error::InvalidSystem(
                "no data beyond the truncation depth to bound the tail".into(),
            ));
        }
        let (argmax, value) = terms
            .iter()
            .copied()
            .fold((0, f64::NEG_INFINITY), |acc, t| if t.1 > acc.1 { t } else { acc });
        let non_increasing = terms.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12));
        Ok(TailBound {
            depth,
            value,
            argmax_n: argmax,
            scanned_to: end,
            non_increasing,
        })
    }
}

/// Scan window for the supremum in [`MapSystem::tail_bound`].
pub const TAIL_SCAN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub depth: usize,
    pub value: f64,
    pub argmax_n: usize,
    pub scanned_to: usize,
    /// Whether the bounded quantity decayed monotonically over the scan.
    pub non_increasing: bool,
}

pub fn tail_bound(ms: &MapSystem) -> Result<TailBound> {
    ms.tail_bound()
}

fn family_coeffs(
    family: &FamilySpec,
    sys: &CountableDataSystem,
    n: usize,
    y_prev: f64,
    y_next: f64,
) -> Result<WCoeffs> {
    let (a, b, m, big_m) = (sys.a(), sys.b(), sys.m(), sys.big_m());
    let w = b - a;
    match family {
        FamilySpec::A { d } => {
            let dn = d.value(n)?;
            if !(0.0..1.0).contains(&dn) {
                return Err(Error::InvalidSystem(format!(
                    "family A needs d_n ∈ [0, 1), got d_{n} = {dn}"
                )));
            }
            Ok(WCoeffs {
                n,
                c: (y_next - y_prev) / w - dn * (big_m - m) / w,
                d: Some(dn),
                g: (b * y_prev - a * y_next) / w - dn * (b * m - a * big_m) / w,
                y_prev,
                y_next,
                v_m: dn * m,
                v_big_m: dn * big_m,
            })
        }
        FamilySpec::B => {
            let nf = n as f64;
            let h = |y: f64| y / (1.0 + nf * y);
            Ok(WCoeffs {
                n,
                c: (y_next - y_prev) / w - (h(big_m) - h(m)) / w,
                d: None,
                g: y_prev - a * (y_next - y_prev) / w + a / w * h(big_m) - b / w * h(m),
                y_prev,
                y_next,
                v_m: h(m),
                v_big_m: h(big_m),
            })
        }
    }
}

/// Outcome of a sampled certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Pass,
    Fail,
    /// The comparison function failed its own sampled monotonicity checks,
    /// so the contraction argument does not apply.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RakotchCertificate {
    pub theta: f64,
    pub sup_ln: f64,
    pub lipschitz_x: f64,
    /// `sup L_n + θ (L + 1)`, the constant floor of `α`.
    pub alpha_floor: f64,
    pub pairs: usize,
    pub skipped: usize,
    pub maps: usize,
    /// Largest `d_θ(f_n p, f_n q) / d_θ(p, q)` observed.
    pub worst_ratio: f64,
    /// Largest `d_θ(f_n p, f_n q) - ψ(d_θ(p, q))` observed.
    pub worst_excess: f64,
    pub violations: usize,
    pub tolerance: f64,
    pub status: CertificateStatus,
    pub notes: Vec<String>,
}

/// `ψ(t) = t · max{sup L_n + θ(L+1), φ(t)/t}`.
pub fn psi(ms: &MapSystem, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let floor = ms.sup_ln + ms.theta * (ms.lipschitz_x + 1.0);
    t * floor.max(ms.phi.apply(t) / t)
}

/// Checks `d_θ(f_n p, f_n q) <= ψ(d_θ(p, q)) + tol` for every pair and every
/// `1 <= n <= N`. Pairs with `p = q` are skipped.
pub fn rakotch_certificate(
    ms: &MapSystem,
    pairs: &[(Point2, Point2)],
    tol: f64,
) -> Result<RakotchCertificate> {
    let metric = Metric::DTheta(ms.theta_metric());
    let mut notes = Vec::new();
    let mut skipped = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut ts = Vec::new();

    for (p, q) in pairs {
        ms.check_point(p.x, p.y)?;
        ms.check_point(q.x, q.y)?;
        let t = metric.eval(p, q);
        if t == 0.0 {
            skipped += 1;
            continue;
        }
        ts.push(t);
        let bound = psi(ms, t);
        for n in 1..=ms.depth() {
            let lhs = metric.eval(&ms.f_formula(n, *p), &ms.f_formula(n, *q));
            worst_ratio = worst_ratio.max(lhs / t);
            worst_excess = worst_excess.max(lhs - bound);
            if lhs > bound + tol {
                violations += 1;
            }
        }
    }
    if skipped > 0 {
        notes.push(format!("{skipped} zero-distance pair(s) skipped"));
    }

    let mut status = if violations == 0 {
        CertificateStatus::Pass
    } else {
        CertificateStatus::Fail
    };
    if ms.phi.is_custom() && ts.len() >= 2 {
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        if ts.len() >= 2 {
            let r = crate::comparison::certify_rakotch(&ms.phi, &ts)?;
            if !(r.ratio_non_increasing && r.phi_non_decreasing) {
                status = CertificateStatus::Inconclusive;
                notes.push("custom φ is not monotone on the sampled distances".into());
            }
        }
    }

    Ok(RakotchCertificate {
        theta: ms.theta,
        sup_ln: ms.sup_ln,
        lipschitz_x: ms.lipschitz_x,
        alpha_floor: ms.sup_ln + ms.theta * (ms.lipschitz_x + 1.0),
        pairs: pairs.len(),
        skipped,
        maps: ms.depth(),
        worst_ratio,
        worst_excess,
        violations,
        tolerance: tol,
        status,
        notes,
    })
}

/// `count` uniform random pairs in `[a,b] × Y` from a seeded ChaCha stream.
pub fn random_pairs(ms: &MapSystem, count: usize, seed: u64) -> Vec<(Point2, Point2)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (ms.sys.a(), ms.sys.b());
    let y = ms.sys.y_interval();
    let point = |rng: &mut ChaCha8Rng| {
        Point2::new(rng.gen_range(a..=b), rng.gen_range(y.lo..=y.hi))
    };
    (0..count)
        .map(|_| (point(&mut rng), point(&mut rng)))
        .collect()
}

/// A sampled pair showing how close `W_n` comes to being non-contractive
/// in `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BanachWitness {
    pub n: usize,
    pub x: f64,
    pub y: f64,
    pub y2: f64,
    pub ratio: f64,
}

/// Largest sampled `|W_n(x,y) - W_n(x,y')| / |y - y'|` for pairs crowding
/// the lower end of `Y`. Values approaching 1 mean no Banach constant `< 1`
/// works in the second variable.
pub fn non_banach_witness(ms: &MapSystem, n: usize) -> Result<BanachWitness> {
    ms.check_index(n)?;
    let yi = ms.sys.y_interval();
    let x = 0.5 * (ms.sys.a() + ms.sys.b());
    let mut best = BanachWitness {
        n,
        x,
        y: yi.lo,
        y2: yi.hi,
        ratio: 0.0,
    };
    for k in 1..=8 {
        let gap = yi.diam() * 10f64.powi(-k);
        let (y, y2) = (yi.lo, yi.lo + gap);
        let ratio = (ms.w_formula(n, x, y) - ms.w_formula(n, x, y2)).abs() / gap;
        if ratio > best.ratio {
            best = BanachWitness {
                n,
                x,
                y,
                y2,
                ratio,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_system, YInterval};

    fn canonical_sys(lo: f64, hi: f64) -> CountableDataSystem {
        build_system(
            SequenceSpec::geometric(1.0, -1.0, 2.0),
            SequenceSpec::geometric(1.0, -1.0, 3.0),
            8,
            YInterval::new(lo, hi).unwrap(),
        )
        .unwrap()
    }

    fn canon(family: FamilySpec) -> MapSystem {
        MapSystem::new(canonical_sys(0.0, 1.0), family).unwrap()
    }

    #[test]
    fn l_eval_examples() {
        let ms = canon(FamilySpec::B);
        let l1 = ms.subinterval_map(1).unwrap();
        assert_eq!(l_eval(l1, 0.0).unwrap(), 0.0);
        assert_eq!(l_eval(l1, 1.0).unwrap(), 0.5);
        let l2 = ms.subinterval_map(2).unwrap();
        assert_eq!(l_eval(l2, 0.5).unwrap(), 0.625);
        assert!(l_eval(l2, 1.5).is_err());
    }

    #[test]
    fn l_inverse_examples() {
        let ms = canon(FamilySpec::B);
        let l1 = ms.subinterval_map(1).unwrap();
        assert_eq!(l_inverse(l1, 0.25).unwrap(), 0.5);
        for n in 1..=8 {
            let l = ms.subinterval_map(n).unwrap();
            assert_eq!(l_inverse(l, l.lo).unwrap(), 0.0);
            assert_eq!(l_inverse(l, l.hi).unwrap(), 1.0);
            assert!(l_inverse(l, l.hi + 1e-9).is_err());
            for i in 0..=100 {
                let x = l.lo + (l.hi - l.lo) * i as f64 / 100.0;
                assert!((l.eval(l.inverse(x).unwrap()).unwrap() - x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn subinterval_coefficients_match_closed_form() {
        let ms = canon(FamilySpec::B);
        for n in 1..=8 {
            let l = ms.subinterval_map(n).unwrap();
            assert!((l.slope * 0.0 + l.intercept - l.lo).abs() < 1e-12);
            assert!((l.slope * 1.0 + l.intercept - l.hi).abs() < 1e-12);
            assert!(l.lipschitz() > 0.0 && l.lipschitz() < 1.0);
        }
        assert_eq!(ms.sup_ln(), 0.5);
    }

    #[test]
    fn w_endpoint_conditions() {
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let ms = canon(fam);
            let s = ms.system();
            for n in 1..=8 {
                let prev = s.node(n - 1).unwrap().y;
                let next = s.node(n).unwrap().y;
                assert!((ms.w_eval(n, 0.0, 0.0).unwrap() - prev).abs() < 1e-12);
                assert!((ms.w_eval(n, 1.0, 1.0).unwrap() - next).abs() < 1e-12);
                // expanded coefficients agree with the lerp form
                for (x, y) in [(0.0, 0.0), (1.0, 1.0), (0.3, 0.7), (0.9, 0.1)] {
                    assert!((ms.w_formula(n, x, y) - ms.w_expanded(n, x, y)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn join_conditions() {
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let ms = canon(fam);
            for n in 1..8 {
                let left = ms.w_formula(n, 1.0, 1.0);
                let right = ms.w_formula(n + 1, 0.0, 0.0);
                assert!((left - right).abs() < 1e-12);
                assert!((left - ms.system().node(n).unwrap().y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn family_b_interior_value() {
        // c_1 = y_1 - h_1(M) + h_1(m) = 2/3 - 1/2 = 1/6, g_1 = 0
        let ms = canon(FamilySpec::B);
        let c = ms.coeffs(1).unwrap();
        assert!((c.c - 1.0 / 6.0).abs() < 1e-15);
        assert!(c.g.abs() < 1e-15);
        let v = ms.w_eval(1, 0.5, 0.5).unwrap();
        assert!((v - 5.0 / 12.0).abs() < 1e-15, "{v}");
    }

    #[test]
    fn family_a_zero_d() {
        let ms = canon(FamilySpec::A {
            d: SequenceSpec::constant(0.0),
        });
        for y in [0.0, 0.3, 1.0] {
            let p = ms.f_eval(1, Point2::new(0.5, y)).unwrap();
            assert_eq!(p.x, 0.25);
            assert!((p.y - (0.0 + (2.0 / 3.0) * 0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn f_eval_endpoints() {
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let ms = canon(fam);
            let s = ms.system();
            for n in 1..=8 {
                let lo = ms.f_eval(n, Point2::new(0.0, 0.0)).unwrap();
                let hi = ms.f_eval(n, Point2::new(1.0, 1.0)).unwrap();
                let (p, q) = (s.node(n - 1).unwrap(), s.node(n).unwrap());
                assert!((lo.x - p.x).abs() < 1e-12 && (lo.y - p.y).abs() < 1e-12);
                assert!((hi.x - q.x).abs() < 1e-12 && (hi.y - q.y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn w_eval_rejects_bad_inputs() {
        let ms = canon(FamilySpec::a_default());
        assert!(matches!(ms.w_eval(1, 1.5, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(ms.w_eval(1, 0.5, 2.0), Err(Error::Domain { .. })));
        assert!(ms.w_eval(0, 0.5, 0.5).is_err());
        assert!(ms.w_eval(10, 0.5, 0.5).is_err());
        // W_3(a, 1) = d_3 + y_2 = 1/8 + 8/9 > 1
        assert!(matches!(
            ms.w_eval(3, 0.0, 1.0),
            Err(Error::RangeViolation { n: 3, .. })
        ));
    }

    #[test]
    fn compute_theta_examples() {
        assert_eq!(compute_theta(0.5, 1.0).unwrap(), 0.125);
        assert_eq!(compute_theta(0.5, 0.0).unwrap(), 0.25);
        assert!((compute_theta(0.9, 3.0).unwrap() - 0.0125).abs() < 1e-15);
        assert!(matches!(compute_theta(1.0, 0.0), Err(Error::InvalidSystem(_))));
        assert!(compute_theta(0.5, -1.0).is_err());
    }

    #[test]
    fn theta_matches_formula_on_instance() {
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let ms = canon(fam);
            let want = (1.0 - ms.sup_ln()) / (2.0 * (ms.lipschitz_x() + 1.0));
            assert_eq!(ms.theta(), want);
        }
    }

    #[test]
    fn family_b_rejects_negative_y() {
        let err = MapSystem::new(canonical_sys(-1.0, 1.0), FamilySpec::B).unwrap_err();
        assert!(matches!(err, Error::InvalidSystem(_)));
    }

    #[test]
    fn family_a_rejects_d_one() {
        let err = MapSystem::new(
            canonical_sys(0.0, 1.0),
            FamilySpec::A {
                d: SequenceSpec::constant(1.0),
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidSystem(_)));
    }

    #[test]
    fn lipschitz_in_x_and_rakotch_in_y() {
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let ms = canon(fam);
            let big_l = ms.lipschitz_x();
            let k = 25;
            let grid: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
            for n in 1..=8 {
                for &x in &grid {
                    for &x2 in &grid {
                        for &y in &grid {
                            let dx = (ms.w_formula(n, x, y) - ms.w_formula(n, x2, y)).abs();
                            assert!(dx <= big_l * (x - x2).abs() + 1e-12);
                            let y2 = x2;
                            if y != y2 {
                                let dy = (ms.w_formula(n, x, y) - ms.w_formula(n, x, y2)).abs();
                                assert!(dy <= ms.phi().apply((y - y2).abs()) + 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn self_map_excess_detects_canonical_overflow() {
        let a = canon(FamilySpec::a_default());
        assert!(a.self_map_excess() > 0.0);
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let ms = MapSystem::new(canonical_sys(0.0, 1.25), fam).unwrap();
            assert_eq!(ms.self_map_excess(), 0.0);
        }
    }

    #[test]
    fn diam_bound_dominates_image_box() {
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let ms = canon(fam);
            for n in 1..=9 {
                let (lo, hi) = ms.image_box(n);
                assert!(hi - lo <= ms.diam_bound(n).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn diam_bound_decays_below_epsilon() {
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let ms = canon(fam);
            let mut n = 1;
            while ms.diam_bound(n).unwrap() >= 1e-6 {
                n += 1;
                assert!(n < 10_000_000);
            }
        }
    }

    #[test]
    fn tail_bound_family_a_at_n9() {
        // Closed form at n = 9 for d_n = 2^-n, Y = [0,1]:
        // |c_9| + d_9 + |1 - y_9| + (x_9 - x_8)
        let ms = canon(FamilySpec::a_default());
        let y8 = 1.0 - 3f64.powi(-8);
        let y9 = 1.0 - 3f64.powi(-9);
        let d9 = 2f64.powi(-9);
        let c9 = (y9 - y8) - d9;
        let want = c9.abs() + d9 + (1.0 - y9) + 2f64.powi(-9);
        let tb = ms.tail_bound().unwrap();
        assert_eq!(tb.argmax_n, 9);
        assert!(tb.non_increasing);
        assert!((tb.value - want).abs() < 1e-15, "{} vs {want}", tb.value);
    }

    #[test]
    fn tail_bound_constant_system_zero_d() {
        let sys = build_system(
            SequenceSpec::geometric(1.0, -1.0, 2.0),
            SequenceSpec::constant(0.0),
            4,
            YInterval::new(0.0, 1.0).unwrap(),
        )
        .unwrap();
        let ms = MapSystem::new(
            sys,
            FamilySpec::A {
                d: SequenceSpec::constant(0.0),
            },
        )
        .unwrap();
        for n in 5..50 {
            assert_eq!(ms.diam_bound(n).unwrap(), 0.0);
        }
        // only the x-gap survives
        assert_eq!(ms.tail_bound().unwrap().value, 2f64.powi(-5));
    }

    #[test]
    fn tail_bound_non_increasing_in_depth() {
        for fam in [FamilySpec::a_default(), FamilySpec::B] {
            let mut last = f64::INFINITY;
            for depth in 2..=14 {
                let sys = build_system(
                    SequenceSpec::geometric(1.0, -1.0, 2.0),
                    SequenceSpec::geometric(1.0, -1.0, 3.0),
                    depth,
                    YInterval::new(0.0, 1.0).unwrap(),
                )
                .unwrap();
                let tb = MapSystem::new(sys, fam.clone()).unwrap().tail_bound().unwrap();
                assert!(tb.value <= last);
                last = tb.value;
            }
        }
    }

    #[test]
    fn depth_search_reaches_tiny_tail_bound() {
        let mut depth = 1;
        let tb = loop {
            let sys = build_system(
                SequenceSpec::geometric(1.0, -1.0, 2.0),
                SequenceSpec::geometric(1.0, -1.0, 3.0),
                depth,
                YInterval::new(0.0, 1.0).unwrap(),
            )
            .unwrap();
            let tb = MapSystem::new(sys, FamilySpec::a_default())
                .unwrap()
                .tail_bound()
                .unwrap();
            if tb.value < 1e-6 {
                break tb;
            }
            depth += 1;
        };
        assert!(tb.value < 1e-6);
        assert!(depth < 40);
    }

    #[test]
    fn rakotch_certificate_family_b() {
        let ms = canon(FamilySpec::B);
        let pairs = random_pairs(&ms, 1000, 42);
        let cert = rakotch_certificate(&ms, &pairs, 1e-10).unwrap();
        assert_eq!(cert.status, CertificateStatus::Pass);
        assert_eq!(cert.violations, 0);
        assert!(cert.worst_ratio < 1.0);
    }

    #[test]
    fn rakotch_certificate_constant_half_d() {
        let d = SequenceSpec::function("0.5 then halving", 0.0, |n| {
            if n <= 9 {
                0.5
            } else {
                0.5f64.powi(n as i32 - 8)
            }
        });
        let ms = MapSystem::new(canonical_sys(0.0, 1.0), FamilySpec::A { d }).unwrap();
        assert_eq!(ms.sup_ln(), 0.5);
        let cert = rakotch_certificate(&ms, &random_pairs(&ms, 500, 7), 1e-10).unwrap();
        let cap = (0.5 + ms.theta() * (ms.lipschitz_x() + 1.0)).max(0.5);
        assert_eq!(cert.status, CertificateStatus::Pass);
        assert!(cert.worst_ratio <= cap + 1e-12);
    }

    #[test]
    fn rakotch_certificate_skips_equal_points() {
        let ms = canon(FamilySpec::B);
        let p = Point2::new(0.3, 0.4);
        let cert = rakotch_certificate(&ms, &[(p, p)], 1e-10).unwrap();
        assert_eq!(cert.skipped, 1);
        assert_eq!(cert.status, CertificateStatus::Pass);
    }

    #[test]
    fn family_b_is_not_banach_in_y() {
        let ms = canon(FamilySpec::B);
        let w = non_banach_witness(&ms, 1).unwrap();
        assert!(w.ratio > 1.0 - 1e-3, "{w:?}");
        let a = canon(FamilySpec::a_default());
        assert!((non_banach_witness(&a, 1).unwrap().ratio - 0.5).abs() < 1e-6);
    }
}
