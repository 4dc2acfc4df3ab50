use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants fall into three groups that the command-line front end maps onto
/// distinct exit codes: invalid input, numerical guards, and IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid packet: {0}")]
    InvalidPacket(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field is not normalized (norm = {norm:.3e})")]
    Unnormalized { norm: f64 },

    #[error("{operation} requires a 3D grid")]
    UnsupportedDimension { operation: &'static str },

    #[error("localization guard: only {inside:.6} of the probability lies in the central half of the box; packet reached boundary, shorten horizon or enlarge box")]
    LocalizationGuard { inside: f64 },

    #[error("field vanishes after positive-energy projection (seed orthogonal to the positive branch)")]
    ZeroAfterProjection,

    #[error("potential is singular on the support of the field")]
    SingularPotential,

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("Mandelstam-Tamm time undefined: observable is stationary (d<A>/dt = {derivative:.3e})")]
    StationaryObservable { derivative: f64 },

    #[error("no tunneling barrier at this intensity (4 z_eff F / ip^2 = {ratio:.6} > 1)")]
    OverBarrier { ratio: f64 },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{module}: {source}")]
    Module {
        module: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }

    /// Wraps an error with the name of the module that raised it.
    pub fn in_module(self, module: &'static str) -> Self {
        match self {
            e @ Error::Module { .. } => e,
            e => Error::Module { module, source: Box::new(e) },
        }
    }

    /// True for errors raised by a numerical guard rather than by bad input.
    pub fn is_numerical_guard(&self) -> bool {
        match self {
            Error::LocalizationGuard { .. }
            | Error::ZeroAfterProjection
            | Error::SingularPotential
            | Error::StationaryObservable { .. }
            | Error::OverBarrier { .. }
            | Error::Unnormalized { .. } => true,
            Error::Module { source, .. } => source.is_numerical_guard(),
            _ => false,
        }
    }
}
