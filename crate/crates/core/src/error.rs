use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An instance or job parameter is outside its legal domain.
    #[error("invalid {field} for job {job:?}: {reason}")]
    Domain {
        job: Option<String>,
        field: &'static str,
        reason: String,
    },

    #[error("job {0:?} has no assignment")]
    MissingAssignment(String),

    #[error("job index {job} assigned twice")]
    DuplicateAssignment { job: usize },

    #[error("unknown job {0:?}")]
    UnknownJob(String),

    #[error("machine {machine} out of range for {machines} machines")]
    MachineOutOfRange { machine: usize, machines: usize },

    #[error("algorithm requires at least 2 machines, got {0}")]
    InsufficientMachines(usize),

    #[error("algorithm requires exactly one machine, got {0}")]
    NotSingleMachine(usize),

    #[error("schedule carries no WSVF priority order")]
    NotWsvfSchedule,

    #[error("job with duration {duration} exceeds the strip limit {limit}")]
    PackPrecondition { duration: f64, limit: f64 },

    #[error("instance too large for exhaustive search: {reason}")]
    TooLarge { reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot render schedule: {0}")]
    Render(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(job: Option<&str>, field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            job: job.map(str::to_owned),
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
