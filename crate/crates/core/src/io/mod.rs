//! Problem ingestion (pixel rasters, problem files) and export (SVG, CSV).

mod file;
mod pixel;
mod report;
mod svg;

use thiserror::Error;

use crate::graph::{GraphError, ValidationReport};

pub use file::{load_problem, save_problem, SCHEMA_VERSION};
pub use pixel::{
    brightness, decode_raster, encode_ppm, import_pixel_image, Connectivity, PixelClass,
    PixelImportRules, Raster,
};
pub use report::{export_report, export_rows, ReportRow, REPORT_HEADER};
pub use svg::{export_svg, SvgOverlays, PALETTE};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("invalid problem: {0}")]
    Invalid(ValidationReport),
    #[error("image has no terminal pixels")]
    NoTerminals,
    #[error("foreground is disconnected ({components} components)")]
    DisconnectedForeground { components: usize },
    #[error("unreadable raster: {0}")]
    Raster(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
