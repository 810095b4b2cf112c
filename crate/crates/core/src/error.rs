use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("activation value {value} at ({row}, {col}) is outside [0, 1]")]
    OutOfRangeValue { row: usize, col: usize, value: f64 },

    #[error("activation value at ({row}, {col}) is not finite")]
    NonFiniteValue { row: usize, col: usize },

    #[error("activation map must have at least one row and one column")]
    EmptyMap,

    #[error("map has {actual} values but {height}x{width} requires {expected}")]
    ValueCountMismatch {
        height: usize,
        width: usize,
        expected: usize,
        actual: usize,
    },

    #[error("degenerate box [{y0}, {x0}, {y1}, {x1}]: requires y0 < y1 and x0 < x1")]
    DegenerateBox {
        y0: usize,
        x0: usize,
        y1: usize,
        x1: usize,
    },

    #[error("box [{y0}, {x0}, {y1}, {x1}] exceeds the {height}x{width} grid")]
    BoxOutOfBounds {
        y0: usize,
        x0: usize,
        y1: usize,
        x1: usize,
        height: usize,
        width: usize,
    },

    #[error("ground truth needs at least one box")]
    EmptyBoxList,

    #[error("shape mismatch: map is {map_height}x{map_width}, ground truth is {gt_height}x{gt_width}")]
    ShapeMismatch {
        map_height: usize,
        map_width: usize,
        gt_height: usize,
        gt_width: usize,
    },

    #[error("invalid metric config: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: missing field `{field}`")]
    MissingField { line: usize, field: String },

    #[error("line {line}: duplicate instance id `{id}`")]
    DuplicateId { line: usize, id: String },

    #[error("unsupported map format: {0}")]
    UnsupportedFormat(String),

    #[error("unsupported npy dtype `{0}` (expected little-endian float32 or float64)")]
    UnsupportedDtype(String),

    #[error("expected a 2-D array, found shape {0:?}")]
    NotTwoDimensional(Vec<usize>),

    #[error("cannot open {path}: {source}")]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to load map {path}: {source}")]
    MapLoad {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot aggregate an empty group")]
    EmptyGroup,

    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("invalid blob: {0}")]
    InvalidBlob(String),

    #[error("box leaves no outside pixel farther than {delta} from the inside peak")]
    BoxTooLarge { delta: f64 },

    #[error("invalid outside masses: {0}")]
    InvalidMasses(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance `{id}`: {source}")]
    Instance {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn in_instance(self, id: &str) -> Error {
        Error::Instance {
            id: id.to_owned(),
            source: Box::new(self),
        }
    }

    /// True when the root cause is an I/O failure rather than bad data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) | Error::Open { .. } => true,
            Error::Csv(e) => e.is_io_error(),
            Error::Json(e) => e.is_io(),
            Error::MapLoad { source, .. } | Error::Instance { source, .. } => source.is_io(),
            _ => false,
        }
    }

    /// Process exit code: 1 for data or validation failures, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_io() {
            2
        } else {
            1
        }
    }
}
