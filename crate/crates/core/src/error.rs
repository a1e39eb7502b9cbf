use std::path::PathBuf;

/// Broad failure classes, used by the command line to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// A caller-supplied parameter is out of range.
    BadArgument,
    /// An input file is missing, unreadable, or malformed.
    Input,
    /// Something that should hold by construction did not.
    Internal,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("malformed image {}: {reason}", path.display())]
    MalformedImage { path: PathBuf, reason: String },

    #[error("cannot write {}: {reason}", path.display())]
    Unwritable { path: PathBuf, reason: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what} {}: {reason}", path.display())]
    MalformedFile {
        what: &'static str,
        path: PathBuf,
        reason: String,
    },

    #[error("image has no pixels")]
    EmptyImage,

    #[error("image is not grayscale: pixel ({x}, {y}) has r, g, b = {r}, {g}, {b}")]
    NotGrayscale { x: u32, y: u32, r: u8, g: u8, b: u8 },

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("image has no opaque pixels")]
    FullyTransparent,

    #[error("point set is empty")]
    NoPoints,

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: u32,
        left_h: u32,
        right_w: u32,
        right_h: u32,
    },

    #[error("hint {index} centered at ({x}, {y}) lies outside a {width}x{height} canvas")]
    HintOutOfBounds {
        index: usize,
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no readable source images in {}", .0.display())]
    EmptySourceDir(PathBuf),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Tag an error with the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Stage { source, .. } => source.class(),
            Error::InvalidParameter { .. } => ErrorClass::BadArgument,
            Error::MissingFile(_)
            | Error::MalformedImage { .. }
            | Error::MalformedFile { .. }
            | Error::Io { .. }
            | Error::Unwritable { .. }
            | Error::EmptyImage
            | Error::FullyTransparent
            | Error::EmptySourceDir(_)
            | Error::NotGrayscale { .. }
            | Error::DimensionMismatch { .. }
            | Error::HintOutOfBounds { .. } => ErrorClass::Input,
            Error::EmptyHistogram | Error::NoPoints | Error::Invariant(_) => ErrorClass::Internal,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
