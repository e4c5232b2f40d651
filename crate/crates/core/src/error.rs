use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Input outside the domain where a quantity is defined (e.g. u outside the WKB window).
    #[error("domain error: {0}")]
    Domain(String),
    /// The spectrum is not in the expected symmetry region (wrong ground multiplet).
    #[error("region error: {0}")]
    Region(String),
    #[error("no closed form for {0}")]
    UnsupportedClosedForm(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by the caller's inputs rather than by the numerics.
    pub fn is_user_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Domain(_)
                | Error::Region(_)
                | Error::UnsupportedClosedForm(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
