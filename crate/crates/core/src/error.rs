use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize a vanishing state (norm² = {norm2:e})")]
    ZeroState { norm2: f64 },

    #[error("intensity map is dark everywhere")]
    AllDark,

    #[error("correlation denominator vanishes (sum of four rates = {total:e})")]
    DarkDenominator { total: f64 },

    #[error("malformed grid: {0}")]
    MalformedGrid(String),

    #[error("unknown state kind `{0}`")]
    UnknownStateKind(String),

    #[error("beam splitter inputs share channel tag {0}")]
    ChannelClash(u8),

    #[error("{experiment} is not defined for state {state}")]
    UnsupportedState {
        experiment: &'static str,
        state: String,
    },

    #[error("channel {0} is not part of this setup")]
    UnknownChannel(u8),

    #[error("unknown angle `{name}` for {experiment}")]
    UnknownAngle {
        experiment: &'static str,
        name: String,
    },
}
