//! Incremental Bowyer–Watson triangulation and barycentric interpolation.

use std::collections::BTreeMap;

use crate::graph::{Point, UnionFind};

/// Relative size of the deterministic per-point perturbation.
pub const JITTER: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    /// Counter-clockwise vertex triples into the input point list.
    pub triangles: Vec<[usize; 3]>,
    /// Unique undirected edges `(a, b)` with `a < b`, ascending.
    pub edges: Vec<(usize, usize)>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit(z: u64) -> f64 {
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

fn extent(points: &[Point]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for q in points {
        b = (b.0.min(q.x), b.1.min(q.y), b.2.max(q.x), b.3.max(q.y));
    }
    b
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// True when fewer than three points are given or all lie on one line.
pub fn is_degenerate(points: &[Point]) -> bool {
    if points.len() < 3 {
        return true;
    }
    let (x0, y0, x1, y1) = extent(points);
    let scale = (x1 - x0).max(y1 - y0);
    if scale <= 0.0 {
        return true;
    }
    let a = points[0];
    let Some(&b) = points.iter().max_by(|p, q| a.distance(p).total_cmp(&a.distance(q))) else {
        return true;
    };
    let tol = 1e-9 * scale * scale;
    points.iter().all(|&c| cross(a, b, c).abs() <= tol)
}

struct Tri {
    v: [usize; 3],
    cx: f64,
    cy: f64,
    r2: f64,
}

impl Tri {
    fn new(pts: &[Point], mut v: [usize; 3]) -> Self {
        if cross(pts[v[0]], pts[v[1]], pts[v[2]]) < 0.0 {
            v.swap(1, 2);
        }
        let (a, b, c) = (pts[v[0]], pts[v[1]], pts[v[2]]);
        let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        let (a2, b2, c2) = (a.x * a.x + a.y * a.y, b.x * b.x + b.y * b.y, c.x * c.x + c.y * c.y);
        let cx = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
        let cy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
        let r2 = (a.x - cx).powi(2) + (a.y - cy).powi(2);
        Self { v, cx, cy, r2 }
    }

    fn contains_in_circle(&self, p: Point) -> bool {
        (p.x - self.cx).powi(2) + (p.y - self.cy).powi(2) < self.r2
    }
}

/// Delaunay triangulation of `points`. Every point is perturbed by a
/// deterministic offset of relative size [`JITTER`] so cocircular inputs
/// produce one well-defined answer. Returns `None` for degenerate input.
pub fn delaunay(points: &[Point]) -> Option<Triangulation> {
    if is_degenerate(points) {
        return None;
    }
    let n = points.len();
    let (x0, y0, x1, y1) = extent(points);
    let span = (x1 - x0).max(y1 - y0);
    let mut pts: Vec<Point> = points
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let h = splitmix(i as u64);
            Point::new(q.x + JITTER * span * unit(h), q.y + JITTER * span * unit(splitmix(h)))
        })
        .collect();
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let m = 20.0 * span;
    pts.push(Point::new(cx - m, cy - m));
    pts.push(Point::new(cx + m, cy - m));
    pts.push(Point::new(cx, cy + m));
    let mut tris = vec![Tri::new(&pts, [n, n + 1, n + 2])];
    for i in 0..n {
        let p = pts[i];
        let mut boundary: BTreeMap<(usize, usize), (usize, usize, usize)> = BTreeMap::new();
        let mut keep = Vec::with_capacity(tris.len());
        for t in tris.drain(..) {
            if t.contains_in_circle(p) {
                for k in 0..3 {
                    let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    boundary.entry(key).and_modify(|c| c.2 += 1).or_insert((a, b, 1));
                }
            } else {
                keep.push(t);
            }
        }
        tris = keep;
        for (a, b, count) in boundary.into_values() {
            if count == 1 {
                tris.push(Tri::new(&pts, [a, b, i]));
            }
        }
    }
    let triangles: Vec<[usize; 3]> = tris.into_iter().filter(|t| t.v.iter().all(|&v| v < n)).map(|t| t.v).collect();
    let mut edges: Vec<(usize, usize)> = triangles
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    bridge_components(points, &mut edges);
    Some(Triangulation { triangles, edges })
}

/// Adds nearest-pair edges between connected components until the edge set
/// spans every point (Kruskal over inter-component distances).
pub fn bridge_components(points: &[Point], edges: &mut Vec<(usize, usize)>) {
    let n = points.len();
    let mut uf = UnionFind::new(n);
    let mut parts = n;
    for &(a, b) in edges.iter() {
        if uf.union(a, b) {
            parts -= 1;
        }
    }
    while parts > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        let root = uf.find(0);
        for a in 0..n {
            if uf.find(a) != root {
                continue;
            }
            for b in 0..n {
                if uf.find(b) == root {
                    continue;
                }
                let d = points[a].distance(&points[b]);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("more than one component");
        uf.union(a, b);
        parts -= 1;
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    edges.dedup();
}

/// Consecutive pairs along the line through collinear points.
pub fn chain_edges(points: &[Point]) -> Vec<(usize, usize)> {
    if points.len() < 2 {
        return Vec::new();
    }
    let a = points[0];
    let b = *points
        .iter()
        .max_by(|p, q| a.distance(p).total_cmp(&a.distance(q)))
        .expect("non-empty");
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let ti = (points[i].x - a.x) * dx + (points[i].y - a.y) * dy;
        let tj = (points[j].x - a.x) * dx + (points[j].y - a.y) * dy;
        ti.total_cmp(&tj).then(i.cmp(&j))
    });
    let mut edges: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    edges.sort_unstable();
    edges
}

fn barycentric(a: Point, b: Point, c: Point, p: Point) -> Option<[f64; 3]> {
    let den = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
    if den.abs() < 1e-300 {
        return None;
    }
    let l1 = ((b.y - c.y) * (p.x - c.x) + (c.x - b.x) * (p.y - c.y)) / den;
    let l2 = ((c.y - a.y) * (p.x - c.x) + (a.x - c.x) * (p.y - c.y)) / den;
    Some([l1, l2, 1.0 - l1 - l2])
}

fn closest_on_segment(a: Point, b: Point, p: Point) -> (f64, f64) {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = Point::new(a.x + t * dx, a.y + t * dy);
    (p.distance(&q), t)
}

/// Interpolates vertex `weights` at `p`: barycentric inside the containing
/// triangle, otherwise at the closest point of the nearest triangle.
pub fn interpolate(points: &[Point], weights: &[f64], tri: &Triangulation, p: Point) -> f64 {
    let mut nearest: Option<(f64, [usize; 3], [f64; 3])> = None;
    for t in &tri.triangles {
        let (a, b, c) = (points[t[0]], points[t[1]], points[t[2]]);
        let Some(l) = barycentric(a, b, c, p) else {
            continue;
        };
        if l.iter().all(|&x| x >= -1e-12) {
            return l.iter().zip(t).map(|(w, &v)| w * weights[v]).sum();
        }
        for k in 0..3 {
            let (u, v) = (t[k], t[(k + 1) % 3]);
            let (d, s) = closest_on_segment(points[u], points[v], p);
            if nearest.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
                let mut lam = [0.0; 3];
                lam[k] = 1.0 - s;
                lam[(k + 1) % 3] = s;
                nearest = Some((d, *t, lam));
            }
        }
    }
    match nearest {
        Some((_, t, lam)) => lam.iter().zip(t).map(|(w, v)| w * weights[v]).sum(),
        None => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn pts(raw: &[(f64, f64)]) -> Vec<Point> {
        raw.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn square_gives_two_triangles() {
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let t = delaunay(&p).unwrap();
        assert_eq!(t.triangles.len(), 2);
        assert_eq!(t.edges.len(), 5);
    }

    #[test]
    fn collinear_input_is_degenerate() {
        let p = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (5.0, 5.0)]);
        assert!(delaunay(&p).is_none());
        assert_eq!(chain_edges(&p), vec![(0, 1), (1, 2), (2, 3)]);
        assert!(delaunay(&p[..2]).is_none());
    }

    #[test]
    fn vertices_interpolate_exactly() {
        let p = pts(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0), (1.0, 0.5)]);
        let w = [1.0, 2.0, 3.0, 4.0, 7.0];
        let t = delaunay(&p).unwrap();
        for (i, &q) in p.iter().enumerate() {
            assert!((interpolate(&p, &w, &t, q) - w[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn outside_points_clamp_to_the_hull() {
        let p = pts(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]);
        let t = delaunay(&p).unwrap();
        let w = [1.0, 3.0, 5.0];
        // Closest hull point of (1, -1) is (1, 0), halfway along the base.
        assert!((interpolate(&p, &w, &t, Point::new(1.0, -1.0)) - 2.0).abs() < 1e-12);
        assert!((interpolate(&p, &w, &t, Point::new(-3.0, -3.0)) - 1.0).abs() < 1e-12);
    }

    fn empty_circle_holds(p: &[Point], t: &Triangulation) -> bool {
        t.triangles.iter().all(|tri| {
            let c = Tri::new(p, *tri);
            (0..p.len()).filter(|i| !tri.contains(i)).all(|i| {
                let d2 = (p[i].x - c.cx).powi(2) + (p[i].y - c.cy).powi(2);
                d2 >= c.r2 * (1.0 - 1e-6)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn random_sets_are_delaunay_and_connected(seed in 0u64..10_000, n in 3usize..40) {
            let mut rng = rng_from_seed(seed);
            let p: Vec<Point> = (0..n).map(|_| Point::new(rng.random_range(0.0..10.0), rng.random_range(0.0..10.0))).collect();
            prop_assume!(!is_degenerate(&p));
            let t = delaunay(&p).unwrap();
            prop_assert!(empty_circle_holds(&p, &t));
            let mut uf = UnionFind::new(n);
            let mut parts = n;
            for &(a, b) in &t.edges {
                if uf.union(a, b) { parts -= 1; }
            }
            prop_assert_eq!(parts, 1);
            // Euler bound for planar triangulations.
            prop_assert!(t.edges.len() <= 3 * n - 3);
        }
    }
}
