//! Radial SVG embedding of the compactified tree.
//!
//! Depth-n vertices are drawn on the circle of radius 1 - 2^-n (their exact
//! norm) around the root, angular wedges are subdivided recursively among
//! children, and the boundary is the unit circle. Radii are computed from
//! exact dyadic norms and survive into the file as `data-radius` attributes;
//! trigonometry only enters at pixel emission.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::boundary::{self, ExtPoint};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::tree::{TreeSpec, VertexAddress};

/// Layout and highlighting options for [`render_svg`].
#[derive(Clone, Debug)]
pub struct RenderConfig {
    pub max_depth: u32,
    /// Width and height of the square image, in pixels.
    pub size: u32,
    /// Two points whose root geodesics and branch point are emphasized.
    pub highlight: Option<(ExtPoint, ExtPoint)>,
}

impl RenderConfig {
    pub fn new(max_depth: u32, size: u32, highlight: Option<(ExtPoint, ExtPoint)>) -> Result<Self> {
        if max_depth == 0 {
            return Err(Error::OutOfRange {
                what: "render depth",
                value: "0".into(),
                bounds: "max_depth >= 1",
            });
        }
        if size < 64 {
            return Err(Error::OutOfRange {
                what: "image size",
                value: size.to_string(),
                bounds: "size >= 64",
            });
        }
        Ok(RenderConfig {
            max_depth,
            size,
            highlight,
        })
    }
}

struct Node {
    addr: VertexAddress,
    parent: Option<usize>,
    /// Exact radius in pixels: norm(vertex) * scale.
    radius: Dyadic,
    angle: f64,
    x: f64,
    y: f64,
}

fn to_f64(d: &Dyadic) -> f64 {
    let m = d.mantissa().to_f64().unwrap_or(f64::MAX);
    m / 2f64.powi(d.exponent() as i32)
}

fn fmt_px(v: f64) -> String {
    format!("{v:.3}")
}

/// Renders the tree (truncated at `max_depth`) with its boundary circle.
pub fn render_svg(spec: &TreeSpec, cfg: &RenderConfig) -> Result<String> {
    let validation = spec.validate();
    if !validation.valid {
        return Err(Error::InvalidSpec(validation.violations.join("; ")));
    }
    if let Some((a, b)) = &cfg.highlight {
        boundary::check_ext(spec, a)?;
        boundary::check_ext(spec, b)?;
    }

    let size = cfg.size;
    let center = f64::from(size) / 2.0;
    // integer scale keeps vertex radii exactly representable
    let scale = (size * 7 / 16).max(1);

    // wedge-subdivision layout over the truncated tree
    let mut nodes: Vec<Node> = vec![Node {
        addr: VertexAddress::root(),
        parent: None,
        radius: Dyadic::zero(),
        angle: std::f64::consts::PI,
        x: center,
        y: center,
    }];
    let mut wedges: Vec<(f64, f64)> = vec![(0.0, std::f64::consts::TAU)];
    let mut frontier: Vec<usize> = vec![0];
    for depth in 1..=cfg.max_depth {
        let mut next = Vec::new();
        for &pi in &frontier {
            let count = spec.child_count(&nodes[pi].addr)?;
            if count == 0 {
                continue;
            }
            let (lo, hi) = wedges[pi];
            let span = (hi - lo) / f64::from(count);
            for i in 0..count {
                let addr = nodes[pi].addr.child(i);
                let (wlo, whi) = (lo + span * f64::from(i), lo + span * f64::from(i + 1));
                let angle = (wlo + whi) / 2.0;
                let radius = geometry::vertex_norm(depth) * Dyadic::from(scale);
                let r = to_f64(&radius);
                let node = Node {
                    addr,
                    parent: Some(pi),
                    radius,
                    angle,
                    x: center + r * angle.cos(),
                    y: center - r * angle.sin(),
                };
                nodes.push(node);
                wedges.push((wlo, whi));
                next.push(nodes.len() - 1);
            }
        }
        frontier = next;
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{size}" height="{size}" fill="white"/>"#);

    // depth shells (exact radii) and the boundary circle
    for depth in 1..=cfg.max_depth {
        let r = geometry::vertex_norm(depth) * Dyadic::from(scale);
        let _ = writeln!(
            svg,
            r##"<circle class="shell" cx="{center}" cy="{center}" r="{}" fill="none" stroke="#eeeeee" stroke-width="1" data-radius="{}"/>"##,
            r.to_decimal_string(),
            r.to_decimal_string()
        );
    }
    let _ = writeln!(
        svg,
        r##"<circle class="boundary" cx="{center}" cy="{center}" r="{scale}" fill="none" stroke="#888888" stroke-width="1.5"/>"##
    );

    for node in nodes.iter().skip(1) {
        let p = &nodes[node.parent.expect("non-root node has a parent")];
        let _ = writeln!(
            svg,
            r##"<line class="edge" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#555555" stroke-width="0.8"/>"##,
            fmt_px(p.x),
            fmt_px(p.y),
            fmt_px(node.x),
            fmt_px(node.y)
        );
    }
    for node in &nodes {
        let _ = writeln!(
            svg,
            r##"<circle class="vertex" cx="{}" cy="{}" r="1.6" fill="#222222" data-radius="{}" data-addr="{}"/>"##,
            fmt_px(node.x),
            fmt_px(node.y),
            node.radius.to_decimal_string(),
            node.addr
        );
    }

    if let Some((a, b)) = &cfg.highlight {
        let index_of = |addr: &VertexAddress| nodes.iter().position(|n| &n.addr == addr);
        let polyline = |target: &ExtPoint| -> String {
            let mut pts: Vec<(f64, f64)> = vec![(center, center)];
            let (word_depth, endpoint): (u32, Option<(f64, f64)>) = match target {
                ExtPoint::Interior(p) => match p.carrying_vertex() {
                    None => (0, None),
                    Some(v) => {
                        let depth = v.depth().min(cfg.max_depth);
                        // partial edge toward the carrying vertex when visible
                        let end = if v.depth() <= cfg.max_depth && !p.is_vertex() {
                            index_of(v).and_then(|vi| {
                                let parent = nodes[vi].parent?;
                                let t = to_f64(p.offset().expect("edge point"));
                                let (px, py) = (nodes[parent].x, nodes[parent].y);
                                Some((px + (nodes[vi].x - px) * t, py + (nodes[vi].y - py) * t))
                            })
                        } else {
                            None
                        };
                        (if p.is_vertex() { depth } else { depth.saturating_sub(1) }, end)
                    }
                },
                ExtPoint::Boundary(r) => {
                    // follow the ray to the drawn depth, then reach the circle
                    let deepest = r.vertex_at(cfg.max_depth);
                    let end = index_of(&deepest).map(|vi| {
                        let ang = nodes[vi].angle;
                        (
                            center + f64::from(scale) * ang.cos(),
                            center - f64::from(scale) * ang.sin(),
                        )
                    });
                    (cfg.max_depth, end)
                }
            };
            let word: Vec<u32> = match target {
                ExtPoint::Interior(p) => p
                    .carrying_vertex()
                    .map(|v| v.word().to_vec())
                    .unwrap_or_default(),
                ExtPoint::Boundary(r) => r.vertex_at(cfg.max_depth).word().to_vec(),
            };
            for d in 1..=word_depth {
                let addr = VertexAddress::new(word[..d as usize].to_vec());
                if let Some(i) = index_of(&addr) {
                    pts.push((nodes[i].x, nodes[i].y));
                }
            }
            if let Some(e) = endpoint {
                pts.push(e);
            }
            pts.iter()
                .map(|(x, y)| format!("{},{}", fmt_px(*x), fmt_px(*y)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            svg,
            r##"<polyline class="geodesic-a" points="{}" fill="none" stroke="#cc2222" stroke-width="1.8"/>"##,
            polyline(a)
        );
        let _ = writeln!(
            svg,
            r##"<polyline class="geodesic-b" points="{}" fill="none" stroke="#2255cc" stroke-width="1.8"/>"##,
            polyline(b)
        );
        // branch point: the deepest common point of the two geodesics
        let g = boundary::gromov_ext(spec, a, b)?;
        if g < Dyadic::one() {
            if let ExtPoint::Interior(z) = boundary::geodesic_point_ext(spec, a, &g)? {
                let (x, y) = point_position(&nodes, &z, center, scale);
                let _ = writeln!(
                    svg,
                    r##"<circle class="branch" cx="{}" cy="{}" r="4" fill="none" stroke="#118833" stroke-width="1.8"/>"##,
                    fmt_px(x),
                    fmt_px(y)
                );
            }
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn point_position(nodes: &[Node], p: &Point, center: f64, scale: u32) -> (f64, f64) {
    let Some(v) = p.carrying_vertex() else {
        return (center, center);
    };
    let vi = nodes.iter().position(|n| &n.addr == v);
    match vi {
        Some(vi) => {
            let t = to_f64(p.offset().expect("edge point has an offset"));
            let parent = nodes[vi].parent.expect("non-root vertex has a parent");
            let (px, py) = (nodes[parent].x, nodes[parent].y);
            (px + (nodes[vi].x - px) * t, py + (nodes[vi].y - py) * t)
        }
        // deeper than the drawn truncation: park it on its norm circle at
        // the nearest drawn ancestor's angle
        None => {
            let ancestor = nodes
                .iter()
                .filter(|n| v.word().starts_with(n.addr.word()))
                .max_by_key(|n| n.addr.depth());
            let angle = ancestor.map(|n| n.angle).unwrap_or(0.0);
            let r = to_f64(&(geometry::vertex_norm(v.depth()) * Dyadic::from(scale)));
            (center + r * angle.cos(), center - r * angle.sin())
        }
    }
}
