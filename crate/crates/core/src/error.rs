use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Bad shapes, out-of-range parameters, malformed inputs.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A map evaluated outside the set where it is defined (antipodal points,
    /// tangent vectors of norm >= pi).
    #[error("domain error: {0}")]
    Domain(String),

    /// An observation sits at the antipode of the pole used for the
    /// tangent-space embedding of its margin.
    #[error("observation {index} of the {side} sample is antipodal to the estimated pole")]
    PoleCollision { side: &'static str, index: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::Domain(_) | Error::PoleCollision { .. }
        )
    }
}
