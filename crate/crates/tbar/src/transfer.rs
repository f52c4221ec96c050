//! Retraction of the compactified tree onto a finite truncation ball, with
//! machine-checkable control certificates.
//!
//! For a control bound delta in (0, 1], pick the least N >= 1 with
//! 2^-N <= delta and set sigma_N = 1 - 2^-(N+1). The closed ball of radius
//! sigma_N around the root is exactly the finite subtree of depth N + 1
//! (its sphere passes through the depth-(N+1) vertices), and the constant
//! speed geodesic retraction onto that ball moves every point by at most
//! 1 - sigma_N = 2^-(N+1) <= delta / 2. The certificate records the complex,
//! the projected samples, and the exact worst track diameter.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::boundary::{self, ExtPoint, Ray};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::tree::{TreeAutomaton, TreeSpec, VertexAddress};
use crate::verify::{SampleConfig, Sampler, Verdict};

/// Exact positive rational control bound.
///
/// The arithmetic of this crate is dyadic, but the control bound is only ever
/// compared against dyadic track diameters, so it may carry an arbitrary
/// denominator (1/100, say) without giving up exactness. Bounds with a
/// power-of-two denominator render in the usual m/2^k form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Delta {
    num: BigInt,
    den: BigInt,
}

impl Delta {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Delta> {
        let mut num = num.into();
        let mut den = den.into();
        if den == BigInt::from(0) {
            return Err(Error::Parse("zero denominator".into()));
        }
        if den < BigInt::from(0) {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if g > BigInt::from(0) {
            num /= &g;
            den /= &g;
        }
        Ok(Delta { num, den })
    }

    pub fn from_dyadic(d: &Dyadic) -> Delta {
        Delta {
            num: d.mantissa().clone(),
            den: BigInt::from(1) << d.exponent(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.num > BigInt::from(0)
    }

    /// Exact comparison with a dyadic: num/den <=> m/2^k.
    pub fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        let lhs = &self.num << d.exponent();
        let rhs = d.mantissa() * &self.den;
        lhs.cmp(&rhs)
    }

    fn exceeds_one(&self) -> bool {
        self.num > self.den
    }
}

impl From<Dyadic> for Delta {
    fn from(d: Dyadic) -> Delta {
        Delta::from_dyadic(&d)
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // reduced fractions with a power-of-two denominator print as m/2^k
        if let Some(tz) = self.den.trailing_zeros() {
            if (&self.den >> tz) == BigInt::from(1) {
                return write!(f, "{}/2^{}", self.num, tz);
            }
        }
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Delta {
    type Err = Error;

    /// Accepts `"p/q"`, `"m/2^k"`, and bare integers.
    fn from_str(s: &str) -> Result<Delta> {
        let t = s.trim();
        if let Ok(d) = t.parse::<Dyadic>() {
            return Ok(Delta::from_dyadic(&d));
        }
        let (p, q) = t
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("invalid rational literal {t:?}")))?;
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid numerator in {t:?}")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid denominator in {t:?}")))?;
        Delta::new(num, den)
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Delta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Finite 1-dimensional complex: the truncated subtree as vertices and edges.
#[derive(Clone, Debug, Serialize)]
pub struct Complex1D {
    pub vertices: Vec<VertexAddress>,
    pub edges: Vec<(VertexAddress, VertexAddress)>,
}

impl Complex1D {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Checks connectivity, acyclicity, and the tree count |V| = |E| + 1.
    pub fn check_tree(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidSpec(format!("complex is not a tree: {reason}")));
        let vertex_set: std::collections::BTreeSet<_> = self.vertices.iter().collect();
        if vertex_set.len() != self.vertices.len() {
            return bad("duplicate vertices".into());
        }
        if !vertex_set.contains(&VertexAddress::root()) {
            return bad("root vertex missing".into());
        }
        let mut edge_set = std::collections::BTreeSet::new();
        for (parent, child) in &self.edges {
            if child.parent().as_ref() != Some(parent) {
                return bad(format!("edge ({parent}, {child}) is not a parent-child pair"));
            }
            if !vertex_set.contains(parent) || !vertex_set.contains(child) {
                return bad(format!("edge ({parent}, {child}) has an endpoint outside the vertex set"));
            }
            if !edge_set.insert((parent.clone(), child.clone())) {
                return bad(format!("duplicate edge ({parent}, {child})"));
            }
        }
        // each non-root vertex must hang off its parent; with |E| = |V| - 1
        // this forces connectivity and acyclicity
        for v in &self.vertices {
            if v.is_root() {
                continue;
            }
            let parent = v.parent().expect("non-root vertex has a parent");
            if !edge_set.contains(&(parent.clone(), v.clone())) {
                return bad(format!("vertex {v} is not attached to its parent"));
            }
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return bad(format!(
                "{} vertices but {} edges",
                self.vertices.len(),
                self.edges.len()
            ));
        }
        Ok(())
    }
}

/// Least N >= 1 with 2^-N <= delta, for delta in (0, 1].
pub fn compute_n(delta: &Delta) -> Result<u32> {
    if !delta.is_positive() || delta.exceeds_one() {
        return Err(Error::OutOfRange {
            what: "delta",
            value: delta.to_string(),
            bounds: "0 < delta <= 1",
        });
    }
    let mut n = 1u32;
    while delta.cmp_dyadic(&Dyadic::exp2(-(n as i32))) == Ordering::Less {
        n += 1;
    }
    Ok(n)
}

/// The retraction radius sigma_N = sum_{i=1..N+1} 2^-i = 1 - 2^-(N+1).
pub fn sigma(n: u32) -> Dyadic {
    Dyadic::one() - Dyadic::exp2(-(n as i32) - 1)
}

/// The closed ball of radius sigma_N as a finite complex: the subtree of
/// depth N + 1, whose outermost vertices sit at distance exactly sigma_N.
pub fn truncation(spec: &TreeSpec, n: u32) -> Result<Complex1D> {
    let cap = n + 1;
    let mut vertices = vec![VertexAddress::root()];
    let mut edges = Vec::new();
    let mut frontier = vec![VertexAddress::root()];
    for _ in 0..cap {
        let mut next = Vec::new();
        for parent in &frontier {
            let count = spec.child_count(parent)?;
            for i in 0..count {
                let child = parent.child(i);
                vertices.push(child.clone());
                edges.push((parent.clone(), child.clone()));
                next.push(child);
            }
        }
        frontier = next;
    }
    Ok(Complex1D { vertices, edges })
}

/// Projection onto the closed ball of radius `sigma`: the identity inside the
/// ball, otherwise the point of [x0, a] at distance exactly `sigma`.
pub fn project(spec: &TreeSpec, a: &ExtPoint, sigma: &Dyadic) -> Result<Point> {
    if sigma.is_negative() || *sigma >= Dyadic::one() {
        return Err(Error::OutOfRange {
            what: "projection radius",
            value: sigma.to_string(),
            bounds: "0 <= sigma < 1",
        });
    }
    let norm = boundary::ext_norm(spec, a)?;
    if norm <= *sigma {
        match a {
            ExtPoint::Interior(p) => return Ok(p.clone()),
            ExtPoint::Boundary(_) => unreachable!("boundary points have norm 1 > sigma"),
        }
    }
    match boundary::geodesic_point_ext(spec, a, sigma)? {
        ExtPoint::Interior(p) => Ok(p),
        ExtPoint::Boundary(_) => unreachable!("sigma < 1 lands in the interior"),
    }
}

/// The retraction homotopy H(a, t): the point of [x0, a] at distance
/// (1 - t) ext_norm(a) + t min(ext_norm(a), sigma). H(a, 0) = a and
/// H(a, 1) = project(a, sigma); points already inside the ball never move.
pub fn homotopy_eval(spec: &TreeSpec, a: &ExtPoint, t: &Dyadic, sigma: &Dyadic) -> Result<ExtPoint> {
    if t.is_negative() || *t > Dyadic::one() {
        return Err(Error::OutOfRange {
            what: "homotopy time",
            value: t.to_string(),
            bounds: "0 <= t <= 1",
        });
    }
    if sigma.is_negative() || *sigma >= Dyadic::one() {
        return Err(Error::OutOfRange {
            what: "projection radius",
            value: sigma.to_string(),
            bounds: "0 <= sigma < 1",
        });
    }
    let norm = boundary::ext_norm(spec, a)?;
    let target = &norm - t * (&norm - norm.clone().min(sigma.clone()));
    boundary::geodesic_point_ext(spec, a, &target)
}

/// Exact diameter of the track {H(a, t) : t in [0, 1]}: the track is a
/// geodesic segment, so its diameter is its length max(0, ext_norm(a) - sigma).
pub fn track_diameter(spec: &TreeSpec, a: &ExtPoint, sigma: &Dyadic) -> Result<Dyadic> {
    if sigma.is_negative() || *sigma >= Dyadic::one() {
        return Err(Error::OutOfRange {
            what: "projection radius",
            value: sigma.to_string(),
            bounds: "0 <= sigma < 1",
        });
    }
    let norm = boundary::ext_norm(spec, a)?;
    Ok((norm - sigma).max(Dyadic::zero()))
}

/// One certified sample: the point, its projection, and the exact diameter of
/// its homotopy track.
#[derive(Clone, Debug)]
pub struct CertificateSample {
    pub point: ExtPoint,
    pub projected: Point,
    pub diameter: Dyadic,
}

impl Serialize for CertificateSample {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CertificateSample", 3)?;
        s.serialize_field("point", &self.point)?;
        s.serialize_field("projected", &self.projected)?;
        s.serialize_field("diameter", &self.diameter)?;
        s.end()
    }
}

/// Machine-checkable record that the retraction through the finite complex
/// keeps every sampled homotopy track within `delta`.
#[derive(Clone, Debug)]
pub struct TransferCertificate {
    pub delta: Delta,
    pub n: u32,
    pub sigma: Dyadic,
    pub complex: Complex1D,
    pub samples: Vec<CertificateSample>,
    pub max_track_diameter: Dyadic,
    pub verdict: Verdict,
}

impl TransferCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Deterministic JSON rendering; the complex is summarized by its counts.
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("certificate serialization is infallible");
        s.push('\n');
        s
    }
}

impl Serialize for TransferCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct ComplexSummary {
            vertices: usize,
            edges: usize,
        }
        let mut s = serializer.serialize_struct("TransferCertificate", 7)?;
        s.serialize_field("delta", &self.delta)?;
        s.serialize_field("N", &self.n)?;
        s.serialize_field("sigma", &self.sigma)?;
        s.serialize_field(
            "complex",
            &ComplexSummary {
                vertices: self.complex.vertex_count(),
                edges: self.complex.edge_count(),
            },
        )?;
        s.serialize_field("max_track", &self.max_track_diameter)?;
        s.serialize_field("verdict", &self.verdict)?;
        s.serialize_field("samples", &self.samples)?;
        s.end()
    }
}

/// The leftmost boundary ray (least live child at every step), if any.
fn first_ray(spec: &TreeSpec) -> Option<Ray> {
    let automaton: &TreeAutomaton = match spec {
        TreeSpec::Programmatic(a) => a,
        TreeSpec::Explicit(_) => return None,
    };
    let alive = automaton.alive_states();
    if !alive[automaton.initial()] {
        return None;
    }
    let least_live = |q: usize| {
        (0..automaton.count(q)).find(|&i| automaton.step(q, i).map(|r| alive[r]).unwrap_or(false))
    };
    let mut letters = Vec::new();
    let mut states = vec![automaton.initial()];
    loop {
        let q = *states.last().expect("non-empty state stack");
        let i = least_live(q)?;
        letters.push(i);
        let r = automaton.step(q, i).ok()?;
        if let Some(pos) = states.iter().position(|&s| s == r) {
            let cycle = letters.split_off(pos);
            return Ray::new(letters, cycle).ok();
        }
        states.push(r);
    }
}

/// First vertex at the requested depth along leftmost children, if the tree
/// is deep enough.
fn deep_vertex(spec: &TreeSpec, depth: u32) -> Option<VertexAddress> {
    let mut v = VertexAddress::root();
    for _ in 0..depth {
        if spec.child_count(&v).ok()? == 0 {
            return None;
        }
        v = v.child(0);
    }
    Some(v)
}

/// Builds the full certificate for a control bound `delta`:
/// N, sigma_N, the truncation complex, and exact track diameters over the
/// sample set (always including the root, and — when they exist — a boundary
/// ray, an interior point inside the ball, and a point beyond it).
pub fn certify(spec: &TreeSpec, delta: &Delta, cfg: &SampleConfig) -> Result<TransferCertificate> {
    let validation = spec.validate();
    if !validation.valid {
        return Err(Error::InvalidSpec(validation.violations.join("; ")));
    }
    let n = compute_n(delta)?;
    let sig = sigma(n);
    let complex = truncation(spec, n)?;
    complex.check_tree()?;

    let mut points: Vec<ExtPoint> = vec![ExtPoint::root()];
    if let Some(ray) = first_ray(spec) {
        points.push(ExtPoint::Boundary(ray));
    }
    if spec.child_count(&VertexAddress::root())? > 0 {
        // inside the ball: half way along the first edge
        let p = Point::on_edge(VertexAddress::root().child(0), Dyadic::exp2(-1))?;
        points.push(ExtPoint::Interior(p));
    }
    if let Some(v) = deep_vertex(spec, n + 2) {
        // strictly outside the ball: norm 1 - 2^-(n+2) > sigma_N
        points.push(ExtPoint::Interior(Point::vertex(v)));
    }
    let mut sampler = Sampler::new(spec, cfg);
    for _ in 0..cfg.count {
        points.push(sampler.ext());
    }

    let mut samples = Vec::with_capacity(points.len());
    let mut max_track_diameter = Dyadic::zero();
    for point in points {
        let projected = project(spec, &point, &sig)?;
        let diameter = track_diameter(spec, &point, &sig)?;
        if diameter > max_track_diameter {
            max_track_diameter = diameter.clone();
        }
        samples.push(CertificateSample {
            point,
            projected,
            diameter,
        });
    }

    // pass iff the exact worst track fits under delta (the complex is a tree,
    // hence dimension <= 1, checked above)
    let verdict = if delta.cmp_dyadic(&max_track_diameter) != Ordering::Less {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(TransferCertificate {
        delta: delta.clone(),
        n,
        sigma: sig,
        complex,
        samples,
        max_track_diameter,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn delta(s: &str) -> Delta {
        s.parse().unwrap()
    }

    fn cfg(count: usize) -> SampleConfig {
        SampleConfig::new(7, count, 10, Dyadic::exp2(-2)).unwrap()
    }

    #[test]
    fn compute_n_examples() {
        assert_eq!(compute_n(&delta("1/2^1")).unwrap(), 1);
        assert_eq!(compute_n(&delta("1/100")).unwrap(), 7);
        // oracle: direct inequality scan over exact powers
        for k in 1..=20u32 {
            assert_eq!(compute_n(&Delta::from_dyadic(&Dyadic::exp2(-(k as i32)))).unwrap(), k);
        }
        // clamp: any truncation works at delta = 1, but the complex is 1-dimensional
        assert_eq!(compute_n(&delta("1")).unwrap(), 1);
    }

    #[test]
    fn compute_n_scan_oracle_for_non_dyadic_bounds() {
        for (num, den) in [(1i64, 3i64), (2, 7), (5, 9), (1, 1000), (99, 100)] {
            let dl = Delta::new(num, den).unwrap();
            let n = compute_n(&dl).unwrap();
            // least n >= 1 with 2^-n <= num/den, scanned independently
            let mut expected = 1u32;
            while (BigInt::from(den)) > (BigInt::from(num) << expected) {
                expected += 1;
            }
            assert_eq!(n, expected, "delta={num}/{den}");
        }
    }

    #[test]
    fn compute_n_rejects_out_of_range() {
        assert!(compute_n(&delta("0")).is_err());
        assert!(compute_n(&delta("-1/2^1")).is_err());
        assert!(compute_n(&delta("3/2^1")).is_err());
    }

    #[test]
    fn delta_display_forms() {
        assert_eq!(delta("1/100").to_string(), "1/100");
        assert_eq!(delta("1/2^7").to_string(), "1/2^7");
        assert_eq!(delta("2/4").to_string(), "1/2^1");
        assert_eq!(delta("1").to_string(), "1/2^0");
        assert_eq!(delta("7/14").to_string(), "1/2^1");
    }

    #[test]
    fn sigma_is_the_partial_geometric_sum() {
        // oracle: sigma_N = sum_{i=1..N+1} 2^-i
        for n in 1..=12u32 {
            let expected: Dyadic = (1..=(n as i32) + 1).map(|i| Dyadic::exp2(-i)).sum();
            assert_eq!(sigma(n), expected);
        }
        assert_eq!(sigma(1), d("3/2^2"));
        assert_eq!(sigma(7), d("255/2^8"));
    }

    #[test]
    fn truncation_sizes() {
        let binary = TreeSpec::binary();
        let k1 = truncation(&binary, 1).unwrap();
        assert_eq!((k1.vertex_count(), k1.edge_count()), (7, 6));
        let k7 = truncation(&binary, 7).unwrap();
        assert_eq!((k7.vertex_count(), k7.edge_count()), (511, 510));
        let unary = TreeSpec::unary();
        let k3 = truncation(&unary, 3).unwrap();
        assert_eq!((k3.vertex_count(), k3.edge_count()), (5, 4));
        for k in [k1, k7, k3] {
            k.check_tree().unwrap();
        }
    }

    #[test]
    fn truncation_of_shallow_finite_tree() {
        let spec = TreeSpec::Explicit(crate::tree::ExplicitTree::path(2));
        let k = truncation(&spec, 7).unwrap();
        assert_eq!((k.vertex_count(), k.edge_count()), (3, 2));
        k.check_tree().unwrap();
    }

    #[test]
    fn project_is_identity_on_the_ball() {
        let spec = TreeSpec::binary();
        let p = Point::on_edge(VertexAddress::new(vec![0]), d("1/2^1")).unwrap();
        let a = ExtPoint::Interior(p.clone());
        assert_eq!(project(&spec, &a, &d("3/2^2")).unwrap(), p);
        assert_eq!(
            project(&spec, &ExtPoint::root(), &d("1/2^3")).unwrap(),
            Point::root()
        );
    }

    #[test]
    fn project_sends_rays_to_the_sphere_vertex() {
        let spec = TreeSpec::binary();
        let ray = Ray::new(vec![0, 1], vec![1, 0]).unwrap();
        for n in [1u32, 3, 7] {
            let p = project(&spec, &ExtPoint::Boundary(ray.clone()), &sigma(n)).unwrap();
            // sigma_N lands exactly on the depth-(N+1) vertex of the ray
            assert_eq!(p, Point::vertex(ray.vertex_at(n + 1)));
            assert_eq!(geometry::norm(&spec, &p).unwrap(), sigma(n));
        }
    }

    #[test]
    fn project_rejects_radius_outside_unit_interval() {
        let spec = TreeSpec::binary();
        assert!(project(&spec, &ExtPoint::root(), &Dyadic::one()).is_err());
        assert!(project(&spec, &ExtPoint::root(), &d("-1/2^1")).is_err());
    }

    #[test]
    fn homotopy_endpoints() {
        let spec = TreeSpec::binary();
        let sig = sigma(2);
        let samples = [
            ExtPoint::root(),
            ExtPoint::Interior(Point::vertex(VertexAddress::new(vec![0, 1, 0, 0]))),
            ExtPoint::Boundary(Ray::new(vec![1], vec![0, 1]).unwrap()),
        ];
        for a in samples {
            assert_eq!(homotopy_eval(&spec, &a, &Dyadic::zero(), &sig).unwrap(), a);
            let end = homotopy_eval(&spec, &a, &Dyadic::one(), &sig).unwrap();
            assert_eq!(
                end,
                ExtPoint::Interior(project(&spec, &a, &sig).unwrap())
            );
        }
    }

    #[test]
    fn homotopy_is_constant_inside_the_ball() {
        let spec = TreeSpec::binary();
        let sig = sigma(3);
        let a = ExtPoint::Interior(Point::vertex(VertexAddress::new(vec![0, 1])));
        for t in ["0/2^0", "1/2^2", "1/2^1", "7/2^3", "1/2^0"] {
            assert_eq!(homotopy_eval(&spec, &a, &d(t), &sig).unwrap(), a);
        }
    }

    #[test]
    fn homotopy_track_norm_is_monotone_in_t() {
        let spec = TreeSpec::binary();
        let sig = sigma(1);
        let a = ExtPoint::Boundary(Ray::new(vec![], vec![0]).unwrap());
        let mut last = Dyadic::from(2);
        for t in ["0/2^0", "1/2^3", "1/2^2", "1/2^1", "3/2^2", "1/2^0"] {
            let h = homotopy_eval(&spec, &a, &d(t), &sig).unwrap();
            let n = boundary::ext_norm(&spec, &h).unwrap();
            assert!(n <= last);
            last = n;
        }
    }

    #[test]
    fn homotopy_rejects_time_outside_unit_interval() {
        let spec = TreeSpec::binary();
        assert!(homotopy_eval(&spec, &ExtPoint::root(), &d("3/2^1"), &sigma(1)).is_err());
        assert!(homotopy_eval(&spec, &ExtPoint::root(), &d("-1/2^1"), &sigma(1)).is_err());
    }

    #[test]
    fn track_diameter_examples() {
        let spec = TreeSpec::binary();
        // inside the ball the track is a single point
        let inside = ExtPoint::Interior(Point::vertex(VertexAddress::new(vec![0])));
        assert_eq!(
            track_diameter(&spec, &inside, &d("3/2^2")).unwrap(),
            Dyadic::zero()
        );
        // boundary rays move by exactly 1 - sigma
        let ray = ExtPoint::Boundary(Ray::new(vec![], vec![1]).unwrap());
        for n in [1u32, 4, 7] {
            assert_eq!(
                track_diameter(&spec, &ray, &sigma(n)).unwrap(),
                Dyadic::one() - sigma(n)
            );
            assert_eq!(
                track_diameter(&spec, &ray, &sigma(n)).unwrap(),
                Dyadic::exp2(-(n as i32) - 1)
            );
        }
        // interior point past the ball moves by norm - sigma
        let deep = ExtPoint::Interior(Point::vertex(VertexAddress::new(vec![0, 0, 0, 0])));
        assert_eq!(
            track_diameter(&spec, &deep, &d("3/2^2")).unwrap(),
            d("3/2^4")
        );
    }

    #[test]
    fn certificate_binary_tree_delta_half() {
        let spec = TreeSpec::binary();
        let cert = certify(&spec, &delta("1/2^1"), &cfg(200)).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.n, 1);
        assert_eq!(cert.sigma, d("3/2^2"));
        assert_eq!(cert.complex.vertex_count(), 7);
        assert_eq!(cert.max_track_diameter, d("1/2^2"));
    }

    #[test]
    fn certificate_binary_tree_delta_one_hundredth() {
        let spec = TreeSpec::binary();
        let cert = certify(&spec, &delta("1/100"), &cfg(200)).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.n, 7);
        assert_eq!(cert.sigma, d("255/2^8"));
        assert_eq!(cert.complex.vertex_count(), 511);
        assert_eq!(cert.complex.edge_count(), 510);
        assert_eq!(cert.max_track_diameter, d("1/2^8"));
    }

    #[test]
    fn certificate_unary_tree_delta_one() {
        let spec = TreeSpec::unary();
        let cert = certify(&spec, &delta("1"), &cfg(50)).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.n, 1);
    }

    #[test]
    fn certificate_on_finite_tree_has_zero_tracks_inside() {
        let spec = TreeSpec::Explicit(crate::tree::ExplicitTree::path(2));
        let cert = certify(&spec, &delta("1/2^1"), &cfg(50)).unwrap();
        assert!(cert.passed());
        // the whole tree sits inside the sigma_1 ball, so nothing moves
        assert_eq!(cert.max_track_diameter, Dyadic::zero());
    }

    #[test]
    fn certificate_samples_cover_required_kinds() {
        let spec = TreeSpec::binary();
        let cert = certify(&spec, &delta("1/2^2"), &cfg(100)).unwrap();
        let has_root = cert.samples.iter().any(|s| s.point == ExtPoint::root());
        let has_ray = cert.samples.iter().any(|s| s.point.is_boundary());
        let sig = cert.sigma.clone();
        let has_inside = cert.samples.iter().any(|s| match &s.point {
            ExtPoint::Interior(p) if !p.is_root() => {
                geometry::norm(&spec, p).unwrap() <= sig
            }
            _ => false,
        });
        let has_outside = cert.samples.iter().any(|s| match &s.point {
            ExtPoint::Interior(p) => geometry::norm(&spec, p).unwrap() > sig,
            _ => false,
        });
        assert!(has_root && has_ray && has_inside && has_outside);
    }

    #[test]
    fn projection_is_one_lipschitz_on_samples() {
        let spec = TreeSpec::binary();
        let sig = sigma(2);
        let mut sampler = Sampler::new(&spec, &cfg(150));
        let samples: Vec<ExtPoint> = (0..150).map(|_| sampler.ext()).collect();
        for pair in samples.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let pa = ExtPoint::Interior(project(&spec, a, &sig).unwrap());
            let pb = ExtPoint::Interior(project(&spec, b, &sig).unwrap());
            let before = boundary::dist_bar(&spec, a, b).unwrap();
            let after = boundary::dist_bar(&spec, &pa, &pb).unwrap();
            assert!(after <= before, "a={a} b={b} before={before} after={after}");
        }
    }

    #[test]
    fn projection_after_inclusion_is_identity_on_the_ball() {
        // the complex is the ball itself, so inclusion followed by projection
        // fixes every sample that already lives inside
        let spec = TreeSpec::binary();
        let sig = sigma(2);
        let mut sampler = Sampler::new(&spec, &cfg(200));
        let mut fixed = 0;
        for _ in 0..200 {
            let a = sampler.ext();
            if let ExtPoint::Interior(p) = &a {
                if geometry::norm(&spec, p).unwrap() <= sig {
                    assert_eq!(project(&spec, &a, &sig).unwrap(), *p);
                    fixed += 1;
                }
            }
        }
        assert!(fixed > 0, "no in-ball samples drawn");
    }

    #[test]
    fn certificate_json_shape() {
        let spec = TreeSpec::binary();
        let cert = certify(&spec, &delta("1/2^1"), &cfg(5)).unwrap();
        let json: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(json["N"], 1);
        assert_eq!(json["sigma"], "3/2^2");
        assert_eq!(json["complex"]["vertices"], 7);
        assert_eq!(json["complex"]["edges"], 6);
        assert_eq!(json["max_track"], "1/2^2");
        assert_eq!(json["verdict"], "pass");
        assert!(json["samples"].as_array().unwrap().len() >= 5);
        assert_eq!(json["delta"], "1/2^1");
    }
}
