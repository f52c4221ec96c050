//! The geometric realization (T, d): points on edges, the shrinking
//! edge-length metric, geodesics, and the Gromov product at the root.
//!
//! The edge into a depth-k vertex has length 2^-k, so the vertices at depth n
//! sit at distance 1 - 2^-n from the root and every interior point has norm
//! strictly below 1. All quantities are dyadic and exact.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::tree::{TreeSpec, VertexAddress};

/// Length of the edge into a vertex of the given depth (depth >= 1).
pub fn edge_length(depth: u32) -> Dyadic {
    debug_assert!(depth >= 1);
    Dyadic::exp2(-(depth as i32))
}

/// Distance from the root to a depth-`d` vertex: 1 - 2^-d.
pub fn vertex_norm(depth: u32) -> Dyadic {
    Dyadic::one() - Dyadic::exp2(-(depth as i32))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
enum PointKind {
    Root,
    /// A point on the edge into `vertex`, at offset in (0, 1] measured from
    /// the parent; offset 1 is the vertex itself.
    Edge(VertexAddress, Dyadic),
}

/// A location on the geometric realization of the tree.
///
/// The representation is canonical: a point located at a vertex always
/// carries that vertex with offset 1, never offset 0 on a child edge, so
/// equality of points is equality of representations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Point(PointKind);

impl Point {
    pub fn root() -> Point {
        Point(PointKind::Root)
    }

    /// The point located at a vertex (the root for the empty address).
    pub fn vertex(addr: VertexAddress) -> Point {
        if addr.is_root() {
            Point::root()
        } else {
            Point(PointKind::Edge(addr, Dyadic::one()))
        }
    }

    /// A point at `offset` in (0, 1] along the edge into `vertex`.
    pub fn on_edge(vertex: VertexAddress, offset: Dyadic) -> Result<Point> {
        if vertex.is_root() {
            return Err(Error::invalid_address(&vertex, "the root has no carrying edge"));
        }
        if !offset.is_positive() || offset > Dyadic::one() {
            return Err(Error::OutOfRange {
                what: "edge offset",
                value: offset.to_string(),
                bounds: "0 < t <= 1",
            });
        }
        Ok(Point(PointKind::Edge(vertex, offset)))
    }

    pub fn is_root(&self) -> bool {
        matches!(self.0, PointKind::Root)
    }

    /// The deeper endpoint of the carrying edge, if any.
    pub fn carrying_vertex(&self) -> Option<&VertexAddress> {
        match &self.0 {
            PointKind::Root => None,
            PointKind::Edge(v, _) => Some(v),
        }
    }

    pub fn offset(&self) -> Option<&Dyadic> {
        match &self.0 {
            PointKind::Root => None,
            PointKind::Edge(_, t) => Some(t),
        }
    }

    /// Depth of the carrying vertex (0 for the root).
    pub fn depth(&self) -> u32 {
        match &self.0 {
            PointKind::Root => 0,
            PointKind::Edge(v, _) => v.depth(),
        }
    }

    /// True iff the point sits exactly on a vertex.
    pub fn is_vertex(&self) -> bool {
        match &self.0 {
            PointKind::Root => true,
            PointKind::Edge(_, t) => *t == Dyadic::one(),
        }
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.0 {
            PointKind::Root => write!(f, "x0"),
            PointKind::Edge(v, t) => write!(f, "{v}@{t}"),
        }
    }
}

// Wire format: {"vertex":[0,1,0],"t":"1/2^1"} for edge points, {"root":true}
// for the root.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum PointRepr {
    Root { root: bool },
    Edge { vertex: VertexAddress, t: Dyadic },
}

impl TryFrom<PointRepr> for Point {
    type Error = Error;

    fn try_from(repr: PointRepr) -> Result<Point> {
        match repr {
            PointRepr::Root { root: true } => Ok(Point::root()),
            PointRepr::Root { root: false } => {
                Err(Error::Parse("point {\"root\":false} is meaningless".into()))
            }
            PointRepr::Edge { vertex, t } => Point::on_edge(vertex, t),
        }
    }
}

impl From<&Point> for PointRepr {
    fn from(p: &Point) -> PointRepr {
        match &p.0 {
            PointKind::Root => PointRepr::Root { root: true },
            PointKind::Edge(v, t) => PointRepr::Edge {
                vertex: v.clone(),
                t: t.clone(),
            },
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PointRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PointRepr::deserialize(deserializer)?;
        Point::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// Checks that the point's carrying vertex exists in the tree.
pub fn check_point(spec: &TreeSpec, p: &Point) -> Result<()> {
    match &p.0 {
        PointKind::Root => Ok(()),
        PointKind::Edge(v, _) => spec.check_address(v),
    }
}

/// d(p, x0): the sum of the full edges above the carrying edge plus the
/// offset fraction of the carrying edge.
pub fn norm(spec: &TreeSpec, p: &Point) -> Result<Dyadic> {
    check_point(spec, p)?;
    Ok(norm_unchecked(p))
}

fn norm_unchecked(p: &Point) -> Dyadic {
    match &p.0 {
        PointKind::Root => Dyadic::zero(),
        PointKind::Edge(v, t) => {
            let d = v.depth();
            vertex_norm(d - 1) + t * edge_length(d)
        }
    }
}

/// The deepest point lying on both root geodesics [x0,p] and [x0,q].
pub fn meet(spec: &TreeSpec, p: &Point, q: &Point) -> Result<Point> {
    check_point(spec, p)?;
    check_point(spec, q)?;
    Ok(meet_unchecked(p, q))
}

fn meet_unchecked(p: &Point, q: &Point) -> Point {
    match (&p.0, &q.0) {
        (PointKind::Root, _) | (_, PointKind::Root) => Point::root(),
        (PointKind::Edge(a, ta), PointKind::Edge(b, tb)) => {
            let l = a.lcp_len(b);
            let (na, nb) = (a.word().len(), b.word().len());
            if l == na && l == nb {
                // same carrying edge: the shallower offset wins
                Point(PointKind::Edge(a.clone(), ta.clone().min(tb.clone())))
            } else if l == na {
                // p's whole edge lies on the root geodesic of q
                p.clone()
            } else if l == nb {
                q.clone()
            } else {
                Point::vertex(a.truncate(l as u32))
            }
        }
    }
}

/// Exact geodesic distance d(p, q) = d(p) + d(q) - 2 d(meet(p, q)).
pub fn dist(spec: &TreeSpec, p: &Point, q: &Point) -> Result<Dyadic> {
    check_point(spec, p)?;
    check_point(spec, q)?;
    let m = meet_unchecked(p, q);
    Ok(norm_unchecked(p) + norm_unchecked(q) - norm_unchecked(&m).mul_exp2(1))
}

/// Gromov product (p|q) = (d(p) + d(q) - d(p,q)) / 2, which in a tree equals
/// the norm of the meet.
pub fn gromov(spec: &TreeSpec, p: &Point, q: &Point) -> Result<Dyadic> {
    let d = dist(spec, p, q)?;
    Ok((norm_unchecked(p) + norm_unchecked(q) - d).half())
}

/// The unique point on the geodesic [x0, p] at distance `s` from the root.
pub fn geodesic_point(spec: &TreeSpec, p: &Point, s: &Dyadic) -> Result<Point> {
    check_point(spec, p)?;
    let total = norm_unchecked(p);
    if s.is_negative() || *s > total {
        return Err(Error::OutOfRange {
            what: "geodesic parameter",
            value: s.to_string(),
            bounds: "0 <= s <= d(p, x0)",
        });
    }
    if s.is_zero() {
        return Ok(Point::root());
    }
    if *s == total {
        return Ok(p.clone());
    }
    let word = p
        .carrying_vertex()
        .expect("s < norm(p) and s > 0 imply p is not the root")
        .word();
    // find the edge (into depth i) containing the prefix of length s
    for i in 1..=word.len() as u32 {
        let reach = if i < word.len() as u32 {
            vertex_norm(i)
        } else {
            total.clone()
        };
        if *s <= reach {
            let t = (s - vertex_norm(i - 1)).mul_exp2(i as i32);
            let vertex = VertexAddress::new(word[..i as usize].to_vec());
            return Point::on_edge(vertex, t);
        }
    }
    unreachable!("s <= norm(p) always lands on some edge of the carrying path")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn vp(word: &[u32]) -> Point {
        Point::vertex(VertexAddress::new(word.to_vec()))
    }

    fn ep(word: &[u32], t: &str) -> Point {
        Point::on_edge(VertexAddress::new(word.to_vec()), d(t)).unwrap()
    }

    /// Brute-force oracle: walk the address summing one edge length at a time.
    fn path_sum_to_vertex(word: &[u32]) -> Dyadic {
        (1..=word.len() as u32).map(edge_length).sum()
    }

    #[test]
    fn norm_of_root_is_zero() {
        let spec = TreeSpec::binary();
        assert_eq!(norm(&spec, &Point::root()).unwrap(), Dyadic::zero());
    }

    #[test]
    fn norm_of_depth_three_vertex_is_seven_eighths() {
        let spec = TreeSpec::binary();
        let p = vp(&[0, 1, 0]);
        let expected = path_sum_to_vertex(&[0, 1, 0]); // 1/2 + 1/4 + 1/8
        assert_eq!(expected, d("7/2^3"));
        assert_eq!(norm(&spec, &p).unwrap(), expected);
    }

    #[test]
    fn norm_of_half_offset_on_first_edge() {
        let spec = TreeSpec::binary();
        assert_eq!(norm(&spec, &ep(&[0], "1/2^1")).unwrap(), d("1/2^2"));
    }

    #[test]
    fn norm_rejects_invalid_address() {
        let spec = TreeSpec::binary();
        let p = vp(&[0, 2]);
        assert!(matches!(
            norm(&spec, &p),
            Err(Error::InvalidAddress { .. })
        ));
    }

    #[test]
    fn meet_of_equal_points_is_the_point() {
        let spec = TreeSpec::binary();
        let p = ep(&[0, 1], "3/2^2");
        assert_eq!(meet(&spec, &p, &p).unwrap(), p);
    }

    #[test]
    fn meet_across_root_components_is_root() {
        let spec = TreeSpec::binary();
        let p = ep(&[0], "1/2^1");
        let q = ep(&[1], "1/2^1");
        assert_eq!(meet(&spec, &p, &q).unwrap(), Point::root());
    }

    #[test]
    fn meet_of_ancestor_vertex_and_descendant_edge() {
        let spec = TreeSpec::binary();
        let p = vp(&[0, 1]);
        let q = ep(&[0, 1, 0], "1/2^1");
        assert_eq!(meet(&spec, &p, &q).unwrap(), p);
    }

    #[test]
    fn meet_on_shared_edge_takes_smaller_offset() {
        let spec = TreeSpec::binary();
        let p = ep(&[0, 1], "1/2^2");
        let q = ep(&[0, 1], "3/2^2");
        assert_eq!(meet(&spec, &p, &q).unwrap(), p);
    }

    #[test]
    fn dist_is_zero_on_equal_points() {
        let spec = TreeSpec::binary();
        let p = ep(&[1, 0], "5/2^3");
        assert_eq!(dist(&spec, &p, &p).unwrap(), Dyadic::zero());
    }

    #[test]
    fn dist_root_to_vertex_matches_path_sum() {
        let spec = TreeSpec::binary();
        for word in [vec![0], vec![0, 1], vec![1, 0, 1], vec![0, 0, 0, 0, 0]] {
            let expected = path_sum_to_vertex(&word);
            let got = dist(&spec, &Point::root(), &vp(&word)).unwrap();
            assert_eq!(got, expected);
            assert_eq!(
                got,
                Dyadic::one() - Dyadic::exp2(-(word.len() as i32))
            );
        }
    }

    #[test]
    fn dist_of_two_truncated_rays_through_depth_two_branch() {
        // branch vertex z at depth 2; one endpoint two edges below z, the
        // other three edges below: 3/16 + 7/32 = 13/32
        let spec = TreeSpec::binary();
        let p = vp(&[0, 0, 0, 0]);
        let q = vp(&[0, 0, 1, 0, 0]);
        assert_eq!(dist(&spec, &p, &q).unwrap(), d("13/2^5"));
        // oracle: sum the edges on each side of the branch vertex
        let side_p: Dyadic = [3u32, 4].iter().map(|&k| edge_length(k)).sum();
        let side_q: Dyadic = [3u32, 4, 5].iter().map(|&k| edge_length(k)).sum();
        assert_eq!(side_p + side_q, d("13/2^5"));
    }

    #[test]
    fn gromov_of_point_with_itself_is_its_norm() {
        let spec = TreeSpec::binary();
        let p = ep(&[1, 1], "1/2^3");
        assert_eq!(gromov(&spec, &p, &p).unwrap(), norm(&spec, &p).unwrap());
    }

    #[test]
    fn gromov_with_root_is_zero() {
        let spec = TreeSpec::binary();
        let p = vp(&[0, 1, 1]);
        assert_eq!(gromov(&spec, &p, &Point::root()).unwrap(), Dyadic::zero());
    }

    #[test]
    fn gromov_across_components_is_zero() {
        let spec = TreeSpec::binary();
        let p = vp(&[0, 1]);
        let q = vp(&[1, 1]);
        assert_eq!(gromov(&spec, &p, &q).unwrap(), Dyadic::zero());
    }

    #[test]
    fn gromov_equals_norm_of_meet() {
        let spec = TreeSpec::binary();
        let points = [
            Point::root(),
            vp(&[0]),
            ep(&[0, 1], "1/2^1"),
            vp(&[0, 1, 0]),
            ep(&[1], "3/2^2"),
            ep(&[1, 1, 0], "1/2^3"),
        ];
        for p in &points {
            for q in &points {
                let m = meet(&spec, p, q).unwrap();
                assert_eq!(
                    gromov(&spec, p, q).unwrap(),
                    norm(&spec, &m).unwrap(),
                    "p={p} q={q}"
                );
            }
        }
    }

    #[test]
    fn geodesic_point_endpoints() {
        let spec = TreeSpec::binary();
        let p = ep(&[0, 1, 1], "5/2^3");
        let n = norm(&spec, &p).unwrap();
        assert_eq!(
            geodesic_point(&spec, &p, &Dyadic::zero()).unwrap(),
            Point::root()
        );
        assert_eq!(geodesic_point(&spec, &p, &n).unwrap(), p);
    }

    #[test]
    fn geodesic_point_lands_mid_edge() {
        // depth-2 vertex, s = 5/8: half way along the second edge
        let spec = TreeSpec::binary();
        let p = vp(&[0, 0]);
        let got = geodesic_point(&spec, &p, &d("5/2^3")).unwrap();
        assert_eq!(got, ep(&[0, 0], "1/2^1"));
        // oracle: cumulative edge-length walk 1/2 + (1/2)(1/4) = 5/8
        assert_eq!(norm(&spec, &got).unwrap(), d("5/2^3"));
    }

    #[test]
    fn geodesic_point_rejects_out_of_range() {
        let spec = TreeSpec::binary();
        let p = vp(&[0]);
        assert!(matches!(
            geodesic_point(&spec, &p, &d("3/2^2")),
            Err(Error::OutOfRange { .. })
        ));
        assert!(geodesic_point(&spec, &p, &d("-1/2^1")).is_err());
    }

    #[test]
    fn interior_norms_stay_below_one() {
        let spec = TreeSpec::binary();
        let deep = vp(&[0; 40]);
        let n = norm(&spec, &deep).unwrap();
        assert!(n < Dyadic::one());
        assert_eq!(n, vertex_norm(40));
    }
}
