//! The boundary at infinity and the compactified metric.
//!
//! Boundary points are eventually periodic rays from the root, written as
//! `prefix . cycle . cycle . ...` over child indices. These are exactly the
//! rays with decidable equality in an automaton-described tree, and they are
//! dense in the full boundary. Rays are kept canonical (primitive cycle,
//! shortest prefix), so two rays denote the same boundary point iff they are
//! structurally equal.
//!
//! The extended Gromov product of two rays is the norm of their branch
//! vertex, capped at 1 for equal rays; the compactified distance is
//! `ext_norm(a) + ext_norm(b) - 2 (a|b)` with `ext_norm = 1` on the boundary.
//! Restricted to interior points this is the geodesic metric, and a boundary
//! point sits at distance exactly 1 from the root.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{self, Point, PointRepr};
use crate::tree::{TreeSpec, VertexAddress};

/// An eventually periodic ray `prefix . cycle^ω`, kept in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Ray {
    prefix: Vec<u32>,
    cycle: Vec<u32>,
}

impl Ray {
    /// Builds a ray and canonicalizes it: the cycle is reduced to its
    /// primitive root and any trailing prefix letters matching the cycle end
    /// are absorbed by rotation.
    pub fn new(prefix: Vec<u32>, cycle: Vec<u32>) -> Result<Ray> {
        if cycle.is_empty() {
            return Err(Error::invalid_ray("(empty cycle)", "cycle must be non-empty"));
        }
        let (prefix, cycle) = canonicalize(prefix, cycle);
        Ok(Ray { prefix, cycle })
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[u32] {
        &self.cycle
    }

    /// Letter of the infinite word at position `i`.
    pub fn letter(&self, i: usize) -> u32 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn first_letter(&self) -> u32 {
        self.letter(0)
    }

    /// Address of the depth-`d` vertex the ray passes through.
    pub fn vertex_at(&self, depth: u32) -> VertexAddress {
        VertexAddress::new((0..depth as usize).map(|i| self.letter(i)).collect())
    }
}

impl std::fmt::Display for Ray {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let part = |w: &[u32]| {
            w.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(".")
        };
        write!(f, "{}({})^ω", part(&self.prefix), part(&self.cycle))
    }
}

/// Shortest word whose repetition gives `w`.
fn primitive_root(w: &[u32]) -> Vec<u32> {
    for p in 1..=w.len() / 2 {
        if w.len().is_multiple_of(p) && w.chunks(p).all(|c| c == &w[..p]) {
            return w[..p].to_vec();
        }
    }
    w.to_vec()
}

fn canonicalize(mut prefix: Vec<u32>, cycle: Vec<u32>) -> (Vec<u32>, Vec<u32>) {
    let mut cycle = primitive_root(&cycle);
    // absorb prefix letters that merely rotate the cycle
    while let Some(&last) = prefix.last() {
        if last != *cycle.last().expect("cycle non-empty") {
            break;
        }
        prefix.pop();
        cycle.rotate_right(1);
    }
    (prefix, cycle)
}

// Wire format: {"prefix":[0,1],"cycle":[0]}.
#[derive(Serialize, Deserialize)]
struct RayRepr {
    prefix: Vec<u32>,
    cycle: Vec<u32>,
}

impl Serialize for Ray {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RayRepr {
            prefix: self.prefix.clone(),
            cycle: self.cycle.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Ray {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RayRepr::deserialize(deserializer)?;
        Ray::new(repr.prefix, repr.cycle).map_err(serde::de::Error::custom)
    }
}

/// A point of the compactified tree: interior point or boundary ray.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExtPoint {
    Interior(Point),
    Boundary(Ray),
}

impl ExtPoint {
    pub fn root() -> ExtPoint {
        ExtPoint::Interior(Point::root())
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, ExtPoint::Boundary(_))
    }
}

impl From<Point> for ExtPoint {
    fn from(p: Point) -> ExtPoint {
        ExtPoint::Interior(p)
    }
}

impl From<Ray> for ExtPoint {
    fn from(r: Ray) -> ExtPoint {
        ExtPoint::Boundary(r)
    }
}

impl std::fmt::Display for ExtPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtPoint::Interior(p) => write!(f, "{p}"),
            ExtPoint::Boundary(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtRepr {
    Ray(RayRepr),
    Point(PointRepr),
}

impl Serialize for ExtPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtPoint::Interior(p) => p.serialize(serializer),
            ExtPoint::Boundary(r) => r.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for ExtPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match ExtRepr::deserialize(deserializer)? {
            ExtRepr::Ray(r) => Ray::new(r.prefix, r.cycle)
                .map(ExtPoint::Boundary)
                .map_err(serde::de::Error::custom),
            ExtRepr::Point(p) => Point::try_from(p)
                .map(ExtPoint::Interior)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// Checks that the ray stays inside the tree forever.
///
/// The prefix is walked directly. For an automaton tree the cycle is then
/// traversed from each state it reaches until a state recurs, which bounds
/// the check by the number of states; for an explicit finite tree the walk
/// provably dies, so any ray is rejected.
pub fn validate_ray(spec: &TreeSpec, r: &Ray) -> Result<()> {
    match spec {
        TreeSpec::Programmatic(a) => {
            let mut q = a.state_after(&r.prefix).map_err(|e| match e {
                Error::InvalidAddress { reason, .. } => Error::invalid_ray(r, reason),
                other => other,
            })?;
            let mut seen = std::collections::BTreeSet::new();
            seen.insert(q);
            loop {
                for &i in &r.cycle {
                    if i >= a.count(q) {
                        return Err(Error::invalid_ray(
                            r,
                            format!(
                                "cycle index {i} exceeds child count {} of state {}",
                                a.count(q),
                                a.state_names()[q]
                            ),
                        ));
                    }
                    q = a.step(q, i)?;
                }
                if !seen.insert(q) {
                    return Ok(());
                }
            }
        }
        TreeSpec::Explicit(t) => {
            // a finite tree hosts no rays; report where the walk dies
            let max_depth = t.max_depth() as usize;
            let mut depth = 0usize;
            while depth <= max_depth {
                let v = r.vertex_at(depth as u32 + 1);
                if spec.check_address(&v).is_err() {
                    return Err(Error::invalid_ray(
                        r,
                        format!("ray leaves the finite tree at depth {}", depth + 1),
                    ));
                }
                depth += 1;
            }
            Err(Error::invalid_ray(
                r,
                "finite trees have no boundary rays".to_string(),
            ))
        }
    }
}

/// Canonical form of a ray, after checking it is valid in the tree.
///
/// Construction already canonicalizes, so this is validation plus a clone;
/// two rays denote the same boundary point iff the results are equal.
pub fn ray_normalize(spec: &TreeSpec, r: &Ray) -> Result<Ray> {
    validate_ray(spec, r)?;
    Ok(r.clone())
}

/// Depth of the deepest common vertex of two rays; `Infinite` iff they are
/// the same boundary point.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LcpDepth {
    Finite(u32),
    Infinite,
}

/// Lockstep walk over the two infinite words. If no mismatch occurs within
/// `|prefix_r| + |prefix_s| + lcm(|cycle_r|, |cycle_s|)` letters the words are
/// equal.
pub fn lcp_depth(spec: &TreeSpec, r: &Ray, s: &Ray) -> Result<LcpDepth> {
    validate_ray(spec, r)?;
    validate_ray(spec, s)?;
    let bound = r.prefix.len()
        + s.prefix.len()
        + num_integer::lcm(r.cycle.len(), s.cycle.len());
    for i in 0..bound {
        if r.letter(i) != s.letter(i) {
            return Ok(LcpDepth::Finite(i as u32));
        }
    }
    debug_assert_eq!(r, s, "words agreeing past the periodicity bound are equal");
    Ok(LcpDepth::Infinite)
}

/// Norm extended to the compactification: boundary points sit at distance 1.
pub fn ext_norm(spec: &TreeSpec, a: &ExtPoint) -> Result<Dyadic> {
    match a {
        ExtPoint::Interior(p) => geometry::norm(spec, p),
        ExtPoint::Boundary(r) => {
            validate_ray(spec, r)?;
            Ok(Dyadic::one())
        }
    }
}

/// Extended Gromov product on the compactification.
///
/// For two rays this is the norm of the branch vertex (1 for equal rays);
/// for a ray against an interior point, the norm of the deepest point of
/// [x0, p] lying on the ray; on interior points it is the interior product.
pub fn gromov_ext(spec: &TreeSpec, a: &ExtPoint, b: &ExtPoint) -> Result<Dyadic> {
    match (a, b) {
        (ExtPoint::Interior(p), ExtPoint::Interior(q)) => geometry::gromov(spec, p, q),
        (ExtPoint::Boundary(r), ExtPoint::Boundary(s)) => match lcp_depth(spec, r, s)? {
            LcpDepth::Finite(m) => Ok(geometry::vertex_norm(m)),
            LcpDepth::Infinite => Ok(Dyadic::one()),
        },
        (ExtPoint::Interior(p), ExtPoint::Boundary(r))
        | (ExtPoint::Boundary(r), ExtPoint::Interior(p)) => {
            geometry::check_point(spec, p)?;
            validate_ray(spec, r)?;
            let word = match p.carrying_vertex() {
                None => return Ok(Dyadic::zero()),
                Some(v) => v.word(),
            };
            let lcp = word
                .iter()
                .enumerate()
                .take_while(|(i, &c)| r.letter(*i) == c)
                .count();
            if lcp == word.len() {
                // the ray runs through p's whole carrying edge
                geometry::norm(spec, p)
            } else {
                Ok(geometry::vertex_norm(lcp as u32))
            }
        }
    }
}

/// The compactified metric d̄(a, b) = ext_norm(a) + ext_norm(b) - 2 (a|b).
pub fn dist_bar(spec: &TreeSpec, a: &ExtPoint, b: &ExtPoint) -> Result<Dyadic> {
    let g = gromov_ext(spec, a, b)?;
    Ok(ext_norm(spec, a)? + ext_norm(spec, b)? - g.mul_exp2(1))
}

/// The point of the geodesic [x0, a] at distance `s` from the root; `a`
/// itself when `s = ext_norm(a)`.
pub fn geodesic_point_ext(spec: &TreeSpec, a: &ExtPoint, s: &Dyadic) -> Result<ExtPoint> {
    let total = ext_norm(spec, a)?;
    if s.is_negative() || *s > total {
        return Err(Error::OutOfRange {
            what: "geodesic parameter",
            value: s.to_string(),
            bounds: "0 <= s <= ext_norm(a)",
        });
    }
    if *s == total {
        return Ok(a.clone());
    }
    match a {
        ExtPoint::Interior(p) => Ok(ExtPoint::Interior(geometry::geodesic_point(spec, p, s)?)),
        ExtPoint::Boundary(r) => {
            if s.is_zero() {
                return Ok(ExtPoint::root());
            }
            // least depth whose vertex norm reaches s; bounded by s's exponent
            let mut depth = 1u32;
            while geometry::vertex_norm(depth) < *s {
                depth += 1;
            }
            let t = (s - geometry::vertex_norm(depth - 1)).mul_exp2(depth as i32);
            let p = Point::on_edge(r.vertex_at(depth), t)?;
            Ok(ExtPoint::Interior(p))
        }
    }
}

/// Validity check for either kind of extended point.
pub fn check_ext(spec: &TreeSpec, a: &ExtPoint) -> Result<()> {
    match a {
        ExtPoint::Interior(p) => geometry::check_point(spec, p),
        ExtPoint::Boundary(r) => validate_ray(spec, r),
    }
}
