//! Standalone SVG 1.1 rendering of a problem with optional overlays.

use std::fmt::Write;

use crate::graph::{NodeKind, Problem, SteinerTree};
use crate::partition::Partition;

/// Cluster fill colors, cycled by cluster index.
pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Copy, Default)]
pub struct SvgOverlays<'a> {
    pub tree: Option<&'a SteinerTree>,
    pub partition: Option<&'a Partition>,
    /// A simplified graph whose coordinates share the problem's frame.
    pub simplified: Option<&'a Problem>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn export_svg(p: &Problem, overlays: &SvgOverlays<'_>) -> Vec<u8> {
    let positions = p
        .nodes()
        .iter()
        .chain(overlays.simplified.map(|s| s.nodes()).unwrap_or(&[]))
        .map(|n| n.position);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for q in positions {
        x0 = x0.min(q.x);
        y0 = y0.min(q.y);
        x1 = x1.max(q.x);
        y1 = y1.max(q.y);
    }
    if !x0.is_finite() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let extent = (x1 - x0).max(y1 - y0).max(1.0);
    let unit = extent / 100.0;
    let margin = 3.0 * unit;
    let (w, h) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let scale = 800.0 / w.max(h);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}" viewBox="{:.3} {:.3} {:.3} {:.3}">"#,
        w * scale,
        h * scale,
        x0 - margin,
        y0 - margin,
        w,
        h
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&p.meta().name));
    let _ = writeln!(s, r##"<rect x="{:.3}" y="{:.3}" width="{w:.3}" height="{h:.3}" fill="#ffffff"/>"##, x0 - margin, y0 - margin);

    let line = |s: &mut String, class: &str, a: crate::graph::Point, b: crate::graph::Point| {
        let _ = writeln!(
            s,
            r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            a.x, a.y, b.x, b.y
        );
    };

    let _ = writeln!(s, r##"<g id="edges" stroke="#c8c8c8" stroke-width="{:.3}">"##, 0.3 * unit);
    for e in p.edges() {
        line(&mut s, "edge", p.position(e.u), p.position(e.v));
    }
    s.push_str("</g>\n");

    if let Some(sp) = overlays.simplified {
        let _ = writeln!(
            s,
            r##"<g id="simplified" stroke="#1f3fbf" stroke-width="{:.3}" stroke-dasharray="{:.3}" fill="#1f3fbf">"##,
            0.4 * unit,
            1.5 * unit
        );
        for e in sp.edges() {
            line(&mut s, "simplified", sp.position(e.u), sp.position(e.v));
        }
        for n in sp.nodes() {
            let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#, n.position.x, n.position.y, 0.6 * unit);
        }
        s.push_str("</g>\n");
    }

    if let Some(t) = overlays.tree {
        let _ = writeln!(s, r##"<g id="tree" stroke="#d62728" stroke-width="{:.3}" stroke-linecap="round">"##, 1.2 * unit);
        for &e in t.edges() {
            let edge = p.edge(e);
            line(&mut s, "tree", p.position(edge.u), p.position(edge.v));
        }
        s.push_str("</g>\n");
    }

    let _ = writeln!(s, r##"<g id="nodes" stroke="#000000" stroke-width="{:.3}">"##, 0.1 * unit);
    for (v, n) in p.nodes().iter().enumerate() {
        let (x, y) = (n.position.x, n.position.y);
        match n.kind {
            NodeKind::Terminal => {
                let _ = writeln!(s, r##"<circle class="terminal" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="#00c800"/>"##, 1.2 * unit);
            }
            NodeKind::Distributor => {
                let r = 1.3 * unit;
                let _ = writeln!(
                    s,
                    r##"<rect class="distributor" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#f0d000"/>"##,
                    x - r,
                    y - r,
                    2.0 * r,
                    2.0 * r
                );
            }
            NodeKind::Waypoint => {
                let fill = match overlays.partition {
                    Some(part) => PALETTE[part.cluster_of(v) % PALETTE.len()].to_string(),
                    None => {
                        let g = (255.0 * (1.0 - n.weight.clamp(0.0, 1.0) * 0.8)).round() as u8;
                        format!("#{g:02x}{g:02x}{g:02x}")
                    }
                };
                let _ = writeln!(s, r#"<circle class="waypoint" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="{fill}"/>"#, 0.5 * unit);
            }
        }
    }
    s.push_str("</g>\n</svg>\n");
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, NodeRecord};

    fn sample() -> Problem {
        let nodes = vec![
            NodeRecord::terminal(0.0, 0.0),
            NodeRecord::waypoint(1.0, 0.0, 0.5),
            NodeRecord::waypoint(2.0, 0.0, 0.2),
            NodeRecord::new(3.0, 0.0, 0.0, NodeKind::Distributor),
            NodeRecord::waypoint(1.5, 1.0, 0.9),
        ];
        let edges = vec![
            Edge::new(0, 1, 1.0),
            Edge::new(1, 2, 1.0),
            Edge::new(2, 3, 1.0),
            Edge::new(1, 4, 1.0),
            Edge::new(2, 4, 1.0),
        ];
        Problem::new(nodes, edges).unwrap()
    }

    fn text(bytes: Vec<u8>) -> String {
        String::from_utf8(bytes).unwrap()
    }

    #[test]
    fn base_drawing_has_every_edge_and_node() {
        let p = sample();
        let svg = text(export_svg(&p, &SvgOverlays::default()));
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains(r#"version="1.1""#));
        assert_eq!(svg.matches(r#"class="edge""#).count(), 5);
        assert_eq!(svg.matches(r#"class="tree""#).count(), 0);
        assert_eq!(svg.matches(r#"class="terminal""#).count(), 1);
        assert_eq!(svg.matches(r#"class="distributor""#).count(), 1);
        assert_eq!(svg.matches(r#"class="waypoint""#).count(), 3);
    }

    #[test]
    fn tree_overlay_highlights_its_edges() {
        let p = sample();
        let tree = SteinerTree::from_edges(&p, &[0, 1, 2]).unwrap();
        let svg = text(export_svg(&p, &SvgOverlays { tree: Some(&tree), ..Default::default() }));
        assert_eq!(svg.matches(r#"class="tree""#).count(), 3);
    }

    #[test]
    fn partition_uses_one_color_per_cluster() {
        let p = sample();
        let part = Partition::from_labels(&[0, 0, 1, 1, 2]);
        let svg = text(export_svg(&p, &SvgOverlays { partition: Some(&part), ..Default::default() }));
        let fills: std::collections::BTreeSet<&str> = svg
            .lines()
            .filter(|l| l.contains(r#"class="waypoint""#))
            .map(|l| l.split("fill=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect();
        assert_eq!(fills.len(), 3);
        assert!(fills.iter().all(|f| PALETTE.contains(f)));
    }
}
