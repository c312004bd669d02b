use lvlab_core::LabError;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Budget(String),
    Io(String),
    Lab(LabError),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Io(_) => 1,
            Failure::Lab(e) if e.is_budget() => 3,
            Failure::Lab(LabError::DomainError(_) | LabError::Parse(_)) => 2,
            Failure::Lab(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Budget(m) => write!(f, "budget exceeded: {m}"),
            Failure::Io(m) => write!(f, "io: {m}"),
            Failure::Lab(e) => write!(f, "{e}"),
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Lab(e)
    }
}
