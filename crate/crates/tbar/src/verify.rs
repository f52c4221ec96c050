//! Deterministic property-test harness: seeded samplers over points, rays,
//! and extended points, plus the global invariant suites (metric axioms,
//! 0-hyperbolicity, boundary distances, total-boundedness nets, and the
//! root contraction).
//!
//! Every assertion is an exact dyadic comparison; there are no tolerances in
//! this module. Reports are deterministic byte-for-byte given the same
//! `SampleConfig`, which makes them usable as CI artifacts.
//!
//! Each suite has a private `run_*` variant parameterized over the formula it
//! checks; the unit tests feed deliberately corrupted formulas through these
//! hooks to prove the harness actually fails when its target is perturbed.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{self, ExtPoint, Ray};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::tree::{TreeAutomaton, TreeSpec, VertexAddress};

fn draw_below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    debug_assert!(n >= 1);
    rng.next_u64() % n
}

fn live_child(
    rng: &mut ChaCha8Rng,
    automaton: &TreeAutomaton,
    alive: &[bool],
    q: usize,
) -> Option<u32> {
    let options: Vec<u32> = (0..automaton.count(q))
        .filter(|&i| automaton.step(q, i).map(|r| alive[r]).unwrap_or(false))
        .collect();
    if options.is_empty() {
        None
    } else {
        Some(options[draw_below(rng, options.len() as u64) as usize])
    }
}

/// Deterministic sampling parameters: the same config always yields the same
/// sample sequence.
#[derive(Clone, Debug, Serialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    /// Address length cap for sampled points and ray prefixes.
    pub max_depth: u32,
    /// Probability of drawing a boundary ray instead of an interior point.
    pub boundary_fraction: Dyadic,
}

impl SampleConfig {
    pub fn new(seed: u64, count: usize, max_depth: u32, boundary_fraction: Dyadic) -> Result<Self> {
        if count == 0 {
            return Err(Error::OutOfRange {
                what: "sample count",
                value: "0".into(),
                bounds: "count >= 1",
            });
        }
        if max_depth == 0 {
            return Err(Error::OutOfRange {
                what: "max depth",
                value: "0".into(),
                bounds: "max_depth >= 1",
            });
        }
        if boundary_fraction.is_negative() || boundary_fraction > Dyadic::one() {
            return Err(Error::OutOfRange {
                what: "boundary fraction",
                value: boundary_fraction.to_string(),
                bounds: "0 <= fraction <= 1",
            });
        }
        Ok(SampleConfig {
            seed,
            count,
            max_depth,
            boundary_fraction,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 1,
            count: 1000,
            max_depth: 16,
            boundary_fraction: Dyadic::exp2(-2),
        }
    }
}

/// Seeded sampler over the compactified tree.
///
/// Addresses are drawn by uniform child choice with geometric depth
/// truncation at `max_depth`; rays get a prefix of at most `max_depth`
/// letters and a cycle of length at most 4.
pub struct Sampler<'a> {
    spec: &'a TreeSpec,
    cfg: SampleConfig,
    rng: ChaCha8Rng,
    infinite: bool,
    alive: Option<Vec<bool>>,
}

impl<'a> Sampler<'a> {
    pub fn new(spec: &'a TreeSpec, cfg: &SampleConfig) -> Sampler<'a> {
        let alive = match spec {
            TreeSpec::Programmatic(a) => Some(a.alive_states()),
            TreeSpec::Explicit(_) => None,
        };
        Sampler {
            spec,
            cfg: cfg.clone(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            infinite: spec.is_infinite(),
            alive,
        }
    }

    fn below(&mut self, n: u64) -> u64 {
        draw_below(&mut self.rng, n)
    }

    fn address(&mut self) -> VertexAddress {
        let mut word = Vec::new();
        loop {
            if word.len() as u32 >= self.cfg.max_depth {
                break;
            }
            let count = match self.spec.child_count(&VertexAddress::new(word.clone())) {
                Ok(c) => c,
                Err(_) => break,
            };
            if count == 0 || self.below(4) == 0 {
                break;
            }
            word.push(self.below(u64::from(count)) as u32);
        }
        VertexAddress::new(word)
    }

    /// One point: the root, a vertex, or an interior edge point.
    pub fn point(&mut self) -> Point {
        let addr = self.address();
        if addr.is_root() {
            return Point::root();
        }
        let offset = self.offset();
        Point::on_edge(addr, offset).expect("sampled offsets lie in (0, 1]")
    }

    fn offset(&mut self) -> Dyadic {
        let r = self.below(5) as u32;
        let j = 1 + self.below(1 << r);
        Dyadic::new(BigInt::from(j), r)
    }

    /// A dyadic in [0, 1] on a power-of-two grid (both endpoints included).
    pub fn unit(&mut self) -> Dyadic {
        let r = self.below(7) as u32;
        let j = self.below((1 << r) + 1);
        Dyadic::new(BigInt::from(j), r)
    }

    /// One boundary ray, or `None` when the tree is finite.
    pub fn ray(&mut self) -> Option<Ray> {
        if !self.infinite {
            return None;
        }
        let automaton = match self.spec {
            TreeSpec::Programmatic(a) => a,
            TreeSpec::Explicit(_) => return None,
        };
        let alive = self.alive.as_ref().expect("automaton sampler keeps liveness");
        let rng = &mut self.rng;

        // prefix: geometric-length walk over live children
        let mut prefix = Vec::new();
        let mut state = automaton.initial();
        while (prefix.len() as u32) < self.cfg.max_depth && draw_below(rng, 4) != 0 {
            let Some(i) = live_child(rng, automaton, alive, state) else {
                break;
            };
            prefix.push(i);
            state = automaton.step(state, i).expect("live child steps are valid");
        }

        // cycle: random live words, validated; give up after a few tries
        for _ in 0..8 {
            let len = 1 + draw_below(rng, 4) as usize;
            let mut q = state;
            let mut cycle = Vec::with_capacity(len);
            for _ in 0..len {
                let Some(i) = live_child(rng, automaton, alive, q) else {
                    break;
                };
                cycle.push(i);
                q = automaton.step(q, i).expect("live child steps are valid");
            }
            if cycle.len() < len {
                continue;
            }
            if let Ok(ray) = Ray::new(prefix.clone(), cycle) {
                if boundary::validate_ray(self.spec, &ray).is_ok() {
                    return Some(ray);
                }
            }
        }

        // fallback: extend by least live children until a state recurs, which
        // always yields a valid cycle
        let least_live = |q: usize| {
            (0..automaton.count(q))
                .find(|&i| automaton.step(q, i).map(|r| alive[r]).unwrap_or(false))
        };
        let mut letters = prefix;
        let mut states = vec![state];
        loop {
            let q = *states.last().expect("non-empty");
            let i = least_live(q).expect("live states have a live child");
            letters.push(i);
            let r = automaton.step(q, i).expect("live child steps are valid");
            if let Some(pos) = states.iter().position(|&s| s == r) {
                let cycle = letters.split_off(letters.len() - (states.len() - pos));
                return Ray::new(letters, cycle).ok();
            }
            states.push(r);
        }
    }

    /// One extended point, boundary with probability `boundary_fraction`.
    pub fn ext(&mut self) -> ExtPoint {
        if self.infinite {
            let u = Dyadic::new(BigInt::from(self.below(1 << 20)), 20);
            if u < self.cfg.boundary_fraction {
                if let Some(ray) = self.ray() {
                    return ExtPoint::Boundary(ray);
                }
            }
        }
        ExtPoint::Interior(self.point())
    }
}

/// Suite outcome.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One failed check, with the witnessing inputs and exact values.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub index: usize,
    pub case: String,
    pub detail: String,
}

/// Result of one invariant suite; the failure list is empty iff the verdict
/// is pass.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks_run: usize,
    pub failures: Vec<Failure>,
    pub verdict: Verdict,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            checks_run: 0,
            failures: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    fn fail(&mut self, index: usize, case: &str, detail: String) {
        self.failures.push(Failure {
            index,
            case: case.to_string(),
            detail,
        });
    }

    fn finish(mut self) -> Self {
        self.failures.sort_by_key(|f| f.index);
        self.verdict = if self.failures.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Deterministic JSON rendering (exact values in m/2^k form).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization is infallible");
        s.push('\n');
        s
    }
}

fn witness(x: &ExtPoint) -> String {
    serde_json::to_string(x).expect("points serialize infallibly")
}

fn spec_guard(report: &mut SuiteReport, spec: &TreeSpec) -> bool {
    let validation = spec.validate();
    if !validation.valid {
        report.fail(
            0,
            "invalid spec",
            format!("violations: {}", validation.violations.join("; ")),
        );
        return false;
    }
    true
}

/// A pairwise exact quantity on extended points (distance or product).
type PairFn<'f> = &'f dyn Fn(&TreeSpec, &ExtPoint, &ExtPoint) -> Result<Dyadic>;

/// Exact metric axioms for the compactified distance on sampled triples:
/// non-negativity, identity of indiscernibles, symmetry, triangle inequality.
pub fn check_metric_axioms(spec: &TreeSpec, cfg: &SampleConfig) -> SuiteReport {
    run_metric_axioms(spec, cfg, &boundary::dist_bar)
}

fn run_metric_axioms(spec: &TreeSpec, cfg: &SampleConfig, dist: PairFn) -> SuiteReport {
    let mut report = SuiteReport::new("metric_axioms");
    if !spec_guard(&mut report, spec) {
        return report.finish();
    }
    let mut sampler = Sampler::new(spec, cfg);
    for index in 0..cfg.count {
        let a = sampler.ext();
        // force occasional equal pairs so the zero-distance direction is hit
        let b = if index % 8 == 3 { a.clone() } else { sampler.ext() };
        let c = sampler.ext();
        report.checks_run += 1;
        let outcome = (|| -> Result<Vec<(&'static str, String)>> {
            let mut bad = Vec::new();
            let dab = dist(spec, &a, &b)?;
            let dba = dist(spec, &b, &a)?;
            let dac = dist(spec, &a, &c)?;
            let dbc = dist(spec, &b, &c)?;
            if dab.is_negative() {
                bad.push(("non-negativity", format!("d(a,b)={dab}")));
            }
            if dab > Dyadic::from(2) {
                bad.push(("diameter bound", format!("d(a,b)={dab} > 2")));
            }
            if dab.is_zero() != (a == b) {
                bad.push(("identity of indiscernibles", format!("d(a,b)={dab}")));
            }
            if dab != dba {
                bad.push(("symmetry", format!("d(a,b)={dab} d(b,a)={dba}")));
            }
            if dac > &dab + &dbc {
                bad.push((
                    "triangle inequality",
                    format!("d(a,c)={dac} > d(a,b)+d(b,c)={}", dab + dbc),
                ));
            }
            Ok(bad)
        })();
        match outcome {
            Ok(bad) => {
                for (case, values) in bad {
                    report.fail(
                        index,
                        case,
                        format!("a={} b={} c={} {values}", witness(&a), witness(&b), witness(&c)),
                    );
                }
            }
            Err(e) => report.fail(index, "evaluation error", e.to_string()),
        }
    }
    report.finish()
}

/// The 0-hyperbolic inequality (a|b) >= min{(a|c), (c|b)} on sampled triples
/// of extended points (interior, boundary, and mixed).
pub fn check_hyperbolicity(spec: &TreeSpec, cfg: &SampleConfig) -> SuiteReport {
    run_hyperbolicity(spec, cfg, &boundary::gromov_ext)
}

fn run_hyperbolicity(spec: &TreeSpec, cfg: &SampleConfig, product: PairFn) -> SuiteReport {
    let mut report = SuiteReport::new("hyperbolicity");
    if !spec_guard(&mut report, spec) {
        return report.finish();
    }
    let mut sampler = Sampler::new(spec, cfg);
    for index in 0..cfg.count {
        let a = sampler.ext();
        let b = if index % 8 == 3 { a.clone() } else { sampler.ext() };
        let c = if index % 16 == 10 { b.clone() } else { sampler.ext() };
        report.checks_run += 1;
        let outcome = (|| -> Result<Option<String>> {
            let gab = product(spec, &a, &b)?;
            let gac = product(spec, &a, &c)?;
            let gcb = product(spec, &c, &b)?;
            let lower = gac.clone().min(gcb.clone());
            if gab < lower {
                Ok(Some(format!(
                    "(a|b)={gab} < min((a|c)={gac}, (c|b)={gcb})"
                )))
            } else {
                Ok(None)
            }
        })();
        match outcome {
            Ok(Some(values)) => report.fail(
                index,
                "0-hyperbolicity",
                format!("a={} b={} c={} {values}", witness(&a), witness(&b), witness(&c)),
            ),
            Ok(None) => {}
            Err(e) => report.fail(index, "evaluation error", e.to_string()),
        }
    }
    report.finish()
}

/// Boundary distances: every ray sits at distance exactly 1 from the root,
/// and two rays are at distance exactly 2 iff they split at the root.
///
/// Errors with [`Error::NoBoundary`] on finite trees.
pub fn check_boundary_distances(spec: &TreeSpec, cfg: &SampleConfig) -> Result<SuiteReport> {
    run_boundary_distances(spec, cfg, &boundary::dist_bar)
}

fn run_boundary_distances(
    spec: &TreeSpec,
    cfg: &SampleConfig,
    dist: PairFn,
) -> Result<SuiteReport> {
    if !spec.is_infinite() {
        return Err(Error::NoBoundary);
    }
    let mut report = SuiteReport::new("boundary_distances");
    if !spec_guard(&mut report, spec) {
        return Ok(report.finish());
    }
    let mut sampler = Sampler::new(spec, cfg);
    let root = ExtPoint::root();
    for index in 0..cfg.count {
        let Some(chi) = sampler.ray() else { break };
        let a = ExtPoint::Boundary(chi);
        report.checks_run += 1;
        match dist(spec, &a, &root) {
            Ok(d) if d == Dyadic::one() => {}
            Ok(d) => report.fail(
                index,
                "distance to root",
                format!("chi={} d(chi,x0)={d}, expected 1/2^0", witness(&a)),
            ),
            Err(e) => report.fail(index, "evaluation error", e.to_string()),
        }
    }
    for index in 0..cfg.count {
        let (Some(chi), Some(chi2)) = (sampler.ray(), sampler.ray()) else {
            break;
        };
        report.checks_run += 1;
        let split_at_root = chi.first_letter() != chi2.first_letter();
        let a = ExtPoint::Boundary(chi);
        let b = ExtPoint::Boundary(chi2);
        match dist(spec, &a, &b) {
            Ok(d) => {
                let is_two = d == Dyadic::from(2);
                if is_two != split_at_root {
                    report.fail(
                        cfg.count + index,
                        "antipodal characterization",
                        format!(
                            "chi={} chi'={} d={d} split_at_root={split_at_root}",
                            witness(&a),
                            witness(&b)
                        ),
                    );
                }
            }
            Err(e) => report.fail(cfg.count + index, "evaluation error", e.to_string()),
        }
    }
    Ok(report.finish())
}

/// Least depth whose tail 2^-d fits under `eps`.
fn net_depth(eps: &Dyadic) -> u32 {
    let mut d = 0u32;
    while Dyadic::exp2(-(d as i32)) > *eps {
        d += 1;
    }
    d
}

/// Total-boundedness witness: builds the finite net of all vertices of depth
/// at most D (where 2^-D <= eps) plus points spaced at most eps along each
/// retained edge, then checks every sampled extended point lies within eps of
/// a net point. All comparisons are exact.
pub fn check_net(spec: &TreeSpec, eps: &Dyadic, cfg: &SampleConfig) -> Result<SuiteReport> {
    run_net(spec, eps, cfg, None)
}

fn run_net(
    spec: &TreeSpec,
    eps: &Dyadic,
    cfg: &SampleConfig,
    depth_override: Option<u32>,
) -> Result<SuiteReport> {
    if !eps.is_positive() || *eps > Dyadic::one() {
        return Err(Error::OutOfRange {
            what: "net epsilon",
            value: eps.to_string(),
            bounds: "0 < eps <= 1",
        });
    }
    let mut report = SuiteReport::new("net");
    if !spec_guard(&mut report, spec) {
        return Ok(report.finish());
    }
    let depth = depth_override.unwrap_or_else(|| net_depth(eps));

    // the net: vertices of depth <= D, plus 2^(D-k) evenly spaced points per
    // depth-k edge (spacing 2^-D <= eps)
    let mut net: BTreeSet<Point> = BTreeSet::new();
    net.insert(Point::root());
    let mut frontier = vec![VertexAddress::root()];
    for level in 1..=depth {
        let mut next = Vec::new();
        for parent in &frontier {
            let count = spec.child_count(parent)?;
            for i in 0..count {
                let vertex = parent.child(i);
                let subdiv = depth - level;
                for j in 1..=(1u64 << subdiv) {
                    let p = Point::on_edge(vertex.clone(), Dyadic::new(BigInt::from(j), subdiv))?;
                    net.insert(p);
                }
                next.push(vertex);
            }
        }
        frontier = next;
    }

    let mut sampler = Sampler::new(spec, cfg);
    for index in 0..cfg.count {
        let a = sampler.ext();
        report.checks_run += 1;
        let candidate = match &a {
            ExtPoint::Interior(p) => match p.carrying_vertex() {
                None => Point::root(),
                Some(v) if v.depth() <= depth => {
                    let t = p.offset().expect("edge point has an offset");
                    let subdiv = depth - v.depth();
                    let j = (t.mantissa() << subdiv).div_ceil(&(BigInt::from(1) << t.exponent()));
                    Point::on_edge(v.clone(), Dyadic::new(j, subdiv))?
                }
                Some(v) => Point::vertex(v.truncate(depth)),
            },
            ExtPoint::Boundary(r) => Point::vertex(r.vertex_at(depth)),
        };
        if !net.contains(&candidate) {
            report.fail(
                index,
                "net membership",
                format!("candidate {candidate} for a={} missing from net", witness(&a)),
            );
            continue;
        }
        let d = boundary::dist_bar(spec, &a, &ExtPoint::Interior(candidate.clone()))?;
        if d > *eps {
            report.fail(
                index,
                "coverage",
                format!(
                    "a={} nearest candidate {candidate} at d={d} > eps={eps}",
                    witness(&a)
                ),
            );
        }
    }
    Ok(report.finish())
}

/// The root contraction C(a, s) = point of [x0, a] at distance s * ext_norm(a):
/// endpoints, the exact continuity modulus |s - s'| * ext_norm(a), and
/// preservation of balls around the root.
pub fn check_contraction(spec: &TreeSpec, cfg: &SampleConfig) -> SuiteReport {
    run_contraction(spec, cfg, &|s| s.clone())
}

fn run_contraction(spec: &TreeSpec, cfg: &SampleConfig, speed: &dyn Fn(&Dyadic) -> Dyadic) -> SuiteReport {
    let mut report = SuiteReport::new("contraction");
    if !spec_guard(&mut report, spec) {
        return report.finish();
    }
    let mut sampler = Sampler::new(spec, cfg);
    for index in 0..cfg.count {
        let a = sampler.ext();
        let s = sampler.unit();
        let s2 = sampler.unit();
        let r = sampler.unit();
        report.checks_run += 1;
        let outcome = (|| -> Result<Vec<(&'static str, String)>> {
            let mut bad = Vec::new();
            let en = boundary::ext_norm(spec, &a)?;
            let contract = |u: &Dyadic| -> Result<ExtPoint> {
                boundary::geodesic_point_ext(spec, &a, &(speed(u) * &en))
            };
            let at_one = contract(&Dyadic::one())?;
            if at_one != a {
                bad.push(("endpoint s=1", format!("C(a,1)={}", witness(&at_one))));
            }
            let at_zero = contract(&Dyadic::zero())?;
            if at_zero != ExtPoint::root() {
                bad.push(("endpoint s=0", format!("C(a,0)={}", witness(&at_zero))));
            }
            let cs = contract(&s)?;
            let cs2 = contract(&s2)?;
            let d = boundary::dist_bar(spec, &cs, &cs2)?;
            let expected = (&s - &s2).abs() * &en;
            if d != expected {
                bad.push((
                    "continuity modulus",
                    format!("s={s} s'={s2} d={d} expected |s-s'|*ext_norm={expected}"),
                ));
            }
            if en <= r {
                let moved = boundary::ext_norm(spec, &cs)?;
                if moved > r {
                    bad.push((
                        "ball preservation",
                        format!("ext_norm(a)={en} <= r={r} but ext_norm(C(a,s))={moved}"),
                    ));
                }
            }
            Ok(bad)
        })();
        match outcome {
            Ok(bad) => {
                for (case, values) in bad {
                    report.fail(index, case, format!("a={} {values}", witness(&a)));
                }
            }
            Err(e) => report.fail(index, "evaluation error", e.to_string()),
        }
    }
    report.finish()
}
