use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Codec(#[from] convk_core::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad input file: {0}")]
    Format(String),
    #[error("plan: {0}")]
    Plan(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn plan_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Plan(msg.into()))
}
