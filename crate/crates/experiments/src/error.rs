use thiserror::Error;

pub type Result<T> = std::result::Result<T, ExpError>;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("bad input: {0}")]
    BadInput(String),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: vheat_core::Error,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl ExpError {
    /// Process exit status: 1 invariant violation, 2 numerical failure, 3 bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Invariant(_) => 1,
            ExpError::Numerical { .. } | ExpError::Csv(_) => 2,
            ExpError::BadInput(_) | ExpError::Io { .. } => 3,
        }
    }
}

/// Wraps a core error, classifying parameter and degeneracy errors as bad input.
pub(crate) fn core_err(context: impl Into<String>) -> impl FnOnce(vheat_core::Error) -> ExpError {
    move |e| {
        let context = context.into();
        match e {
            vheat_core::Error::InvalidParams(_)
            | vheat_core::Error::Domain(_)
            | vheat_core::Error::DegenerateSecular { .. } => ExpError::BadInput(format!("{context}: {e}")),
            source => ExpError::Numerical { context, source },
        }
    }
}
