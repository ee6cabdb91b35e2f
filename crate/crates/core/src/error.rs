use std::path::PathBuf;

/// Errors produced by the classifiers, synthesizer and experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown modulation tag `{0}`")]
    UnknownModulation(String),

    #[error("sample stream is empty")]
    EmptyStream,

    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },

    /// |ĉ63| fell below the configured floor, so the sixth-order feature is meaningless.
    #[error("degenerate feature: |c63| = {c63_abs:e} is below the floor {floor:e}")]
    DegenerateFeature { c63_abs: f64, floor: f64 },

    /// ĉ21 did not exceed the assumed noise variance.
    #[error("non-positive signal power: c21 = {c21} does not exceed noise variance {noise_variance}")]
    NonPositiveSignalPower { c21: f64, noise_variance: f64 },

    #[error("theoretical feature undefined for {0}: C63 is zero")]
    UndefinedFeature(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
