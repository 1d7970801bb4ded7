use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("numerical error in {stage}: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: posmet_core::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Io(_) => 2,
            AppError::Numerical { .. } => 3,
        }
    }

    pub fn numerical(stage: impl Into<String>) -> impl FnOnce(posmet_core::Error) -> AppError {
        let stage = stage.into();
        move |source| AppError::Numerical { stage, source }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Io(e.to_string())
    }
}
