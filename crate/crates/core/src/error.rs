use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate tangent plane at ({x}, {y}): |a1 x a2| = {norm:e}")]
    DegenerateChart { x: f64, y: f64, norm: f64 },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("singular local system in {context}")]
    SingularLocal { context: String },

    #[error("factorization breakdown: {cause}")]
    Singular { cause: String },

    #[error("solver residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("problem has {dofs} unknowns, above the dense limit of {limit}; use a coarser mesh")]
    SizeGuard { dofs: usize, limit: usize },

    #[error("coercivity probe failed: {0}")]
    Coercivity(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Error {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}
