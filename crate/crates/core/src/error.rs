use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage an error originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    StyleFusing,
    FurnitureAlignment,
    Composite,
    Extras,
    Validation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::StyleFusing => "style-fusing",
            Stage::FurnitureAlignment => "furniture-alignment",
            Stage::Composite => "composite",
            Stage::Extras => "extras",
            Stage::Validation => "validation",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid sampling coordinate ({x}, {y})")]
    InvalidCoordinate { x: f64, y: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate layout: {0}")]
    DegenerateLayout(String),

    #[error("inconsistent layout: {0}")]
    InconsistentLayout(String),

    #[error("unsupported layout: {0}")]
    UnsupportedLayout(String),

    #[error("degenerate plan point: zero-length plan vector")]
    DegeneratePoint,

    #[error("degenerate wall: {0}")]
    DegenerateWall(String),

    #[error("invalid stretch factors kx={kx}, kz={kz}: both must be positive and finite")]
    InvalidFactor { kx: f64, kz: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("degenerate boundary: ceiling row {ceil} is not above floor row {floor}")]
    DegenerateBoundary { ceil: f64, floor: f64 },

    #[error("incompatible samples: {0}")]
    IncompatibleSamples(String),

    #[error("style region {0} has no background pixels")]
    EmptyStyleRegion(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("load error: {0}")]
    Load(String),

    #[error("corner adapter error: {0}")]
    Adapter(String),

    #[error("sink error: {0}")]
    Sink(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("image error on {path}: {source}")]
    Image {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for failures of the filesystem or image codec rather than of the
    /// data or configuration.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } | Error::Image { .. } | Error::Sink(_) => true,
            Error::Stage { source, .. } => source.is_io(),
            _ => false,
        }
    }

    /// Short machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidCoordinate { .. } => "invalid-coordinate",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::DegenerateLayout(_) => "degenerate-layout",
            Error::InconsistentLayout(_) => "inconsistent-layout",
            Error::UnsupportedLayout(_) => "unsupported-layout",
            Error::DegeneratePoint => "degenerate-point",
            Error::DegenerateWall(_) => "degenerate-wall",
            Error::InvalidFactor { .. } => "invalid-factor",
            Error::Geometry(_) => "geometry",
            Error::DegenerateBoundary { .. } => "degenerate-boundary",
            Error::IncompatibleSamples(_) => "incompatible-samples",
            Error::EmptyStyleRegion(_) => "empty-style-region",
            Error::Config(_) => "config",
            Error::InvalidSample(_) => "invalid-sample",
            Error::EmptyDataset => "empty-dataset",
            Error::Stage { source, .. } => source.kind(),
            Error::Manifest(_) => "manifest",
            Error::Load(_) => "load",
            Error::Adapter(_) => "adapter",
            Error::Sink(_) => "sink",
            Error::Io { .. } => "io",
            Error::Image { .. } => "image",
        }
    }
}
