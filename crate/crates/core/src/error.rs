use thiserror::Error;

/// Errors produced by the numerical routines and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error(
        "ambiguous eigenvalue cluster: chain of {members} eigenvalues spans {span:.3e} rad \
         (cluster tolerance {cluster_tol:.3e})"
    )]
    ClusteringAmbiguous {
        members: usize,
        span: f64,
        cluster_tol: f64,
    },

    #[error("angle {0} is not an eigenvalue angle of the operator")]
    NotAnEigenvalue(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("budget exceeded for {guard}: requested {requested:.3e}, limit {limit:.3e}")]
    Budget {
        guard: &'static str,
        requested: f64,
        limit: f64,
    },

    #[error("QR iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_budget(guard: &'static str, requested: f64, limit: f64) -> Result<()> {
    if requested > limit {
        Err(Error::Budget {
            guard,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}
