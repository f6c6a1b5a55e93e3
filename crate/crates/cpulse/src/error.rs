use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown sequence name `{0}`")]
    UnknownName(String),
    #[error("cannot evaluate `{value}`: {reason}")]
    Expression { value: String, reason: String },
    #[error("record `{name}`: {reason}")]
    Record { name: String, reason: String },
    #[error("malformed TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("cannot serialise TOML: {0}")]
    TomlWrite(#[from] toml::ser::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] cpulse_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
