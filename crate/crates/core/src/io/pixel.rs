//! Pixel-image import: every non-background pixel becomes a node.

use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::graph::{Edge, NodeKind, NodeRecord, Problem, ProblemMeta};

/// RGBA raster, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 4]>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 4]>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel count must match dimensions");
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn filled(width: usize, height: usize, rgba: [u8; 4]) -> Self {
        Self::new(width, height, vec![rgba; width * height])
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 4] {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, rgba: [u8; 4]) {
        self.pixels[y * self.width + x] = rgba;
    }
}

/// Decodes a raster. Binary PPM (P6) is the reference format; PNG is also
/// accepted through the same path.
pub fn decode_raster(bytes: &[u8]) -> Result<Raster, FormatError> {
    let img = image::load_from_memory(bytes).map_err(|e| FormatError::Raster(e.to_string()))?;
    let rgba = img.to_rgba8();
    let (w, h) = (rgba.width() as usize, rgba.height() as usize);
    let pixels = rgba.pixels().map(|p| p.0).collect();
    Ok(Raster::new(w, h, pixels))
}

/// Encodes a raster as binary PPM (alpha dropped).
pub fn encode_ppm(r: &Raster) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", r.width, r.height).into_bytes();
    for p in &r.pixels {
        out.extend_from_slice(&p[..3]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn from_degree(n: u8) -> Option<Self> {
        match n {
            4 => Some(Self::Four),
            8 => Some(Self::Eight),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelClass {
    Background,
    Terminal,
    Distributor,
    Waypoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PixelImportRules {
    pub connectivity: Connectivity,
    /// Green terminal: G > R, G > B and G >= this.
    pub green_min: u8,
    /// Yellow distributor: R, G >= this and B < `yellow_blue_max`.
    pub yellow_min: u8,
    pub yellow_blue_max: u8,
}

impl Default for PixelImportRules {
    fn default() -> Self {
        Self {
            connectivity: Connectivity::Four,
            green_min: 128,
            yellow_min: 128,
            yellow_blue_max: 96,
        }
    }
}

impl PixelImportRules {
    /// Total, mutually exclusive classification; checked in this order:
    /// background, green, yellow, waypoint.
    pub fn classify(&self, [r, g, b, a]: [u8; 4]) -> PixelClass {
        if a == 0 || (r == 255 && g == 255 && b == 255) {
            PixelClass::Background
        } else if g > r && g > b && g >= self.green_min {
            PixelClass::Terminal
        } else if r >= self.yellow_min && g >= self.yellow_min && b < self.yellow_blue_max {
            PixelClass::Distributor
        } else {
            PixelClass::Waypoint
        }
    }
}

/// Rec. 601 luma in `[0, 1]`.
pub fn brightness([r, g, b, _]: [u8; 4]) -> f64 {
    if r == g && g == b {
        return f64::from(r) / 255.0;
    }
    (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)) / 255.0
}

pub fn import_pixel_image(raster: &Raster, rules: &PixelImportRules) -> Result<Problem, FormatError> {
    if raster.width == 0 || raster.height == 0 {
        return Err(FormatError::Raster("empty raster".into()));
    }
    let mut index = vec![usize::MAX; raster.width * raster.height];
    let mut nodes = Vec::new();
    for y in 0..raster.height {
        for x in 0..raster.width {
            let px = raster.get(x, y);
            let kind = match rules.classify(px) {
                PixelClass::Background => continue,
                PixelClass::Terminal => NodeKind::Terminal,
                PixelClass::Distributor => NodeKind::Distributor,
                PixelClass::Waypoint => NodeKind::Waypoint,
            };
            let weight = if kind == NodeKind::Waypoint { brightness(px) } else { 0.0 };
            index[y * raster.width + x] = nodes.len();
            nodes.push(NodeRecord::new(x as f64, y as f64, weight, kind));
        }
    }
    if !nodes.iter().any(|n| n.kind.is_terminal()) {
        return Err(FormatError::NoTerminals);
    }
    let mut offsets: Vec<(isize, isize, f64)> = vec![(1, 0, 1.0), (0, 1, 1.0)];
    if rules.connectivity == Connectivity::Eight {
        offsets.push((1, 1, std::f64::consts::SQRT_2));
        offsets.push((-1, 1, std::f64::consts::SQRT_2));
    }
    let mut edges = Vec::new();
    for y in 0..raster.height {
        for x in 0..raster.width {
            let a = index[y * raster.width + x];
            if a == usize::MAX {
                continue;
            }
            for &(dx, dy, len) in &offsets {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx as usize >= raster.width || ny as usize >= raster.height {
                    continue;
                }
                let b = index[ny as usize * raster.width + nx as usize];
                if b == usize::MAX {
                    continue;
                }
                let cost = (nodes[a].weight + nodes[b].weight) / 2.0 * len;
                edges.push(Edge::new(a, b, cost));
            }
        }
    }
    let problem = Problem::from_parts(nodes, edges)?.with_meta(ProblemMeta {
        name: String::new(),
        source: "raster".into(),
    });
    let (_, components) = problem.component_labels();
    if components > 1 {
        return Err(FormatError::DisconnectedForeground { components });
    }
    Ok(problem)
}
