use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("1/epsilon must be a positive integer, got epsilon = {0}")]
    NonIntegerEpsilonInverse(f64),
    #[error("window {window} with epsilon {epsilon} gives a block size below 1")]
    BlockTooSmall { window: u64, epsilon: f64 },
    #[error("{blocks} blocks cannot be split into {levels} levels with arity >= 2")]
    BadAccArity { blocks: u64, levels: u32 },
    #[error("window must be positive")]
    EmptyWindow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("interval [{i}, {j}] does not fit a window of {window}")]
    IndexBeyondWindow { i: u64, j: u64, window: u64 },
    #[error("only {seen} of {window} window elements have arrived")]
    WindowNotFull { seen: u64, window: u64 },
    #[error("block interval [{i}, {j}] is outside the {blocks} tracked blocks")]
    BadBlockIndex { i: u64, j: u64, blocks: u64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModeError {
    #[error("block size mode can only change before the first update")]
    ModeChangeAfterStart,
    #[error(transparent)]
    Config(#[from] ConfigError),
}
