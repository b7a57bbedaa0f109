//! Frequency and heavy hitter estimates over any interval of a sliding window.
//!
//! Every sketch answers `f(x, i, j)`, the count of `x` among the `i+1`-th to
//! `j`-th most recent elements, with `f <= estimate <= f + W*eps`.
//!
//! * [`RawSketch`] keeps one fixed-window estimator per `W*eps/4` elements.
//! * [`ReductionSketch`] records Space Saving overflows in blocks and counts
//!   them with an exact block solver: [`AccSketch`] (cumulative tables on `k`
//!   levels) or [`HitSketch`] (dyadic tables).
//!
//! Counts are generic over an unsigned [`Count`] type; the aliases below fix
//! it to `u32`.

pub mod acc;
pub mod block;
pub mod error;
pub mod fixed_window;
pub mod hit;
pub mod num;
pub mod raw;
pub mod reduction;
pub mod space_saving;
pub mod stream;
pub mod table;

pub use acc::AccSketch;
pub use block::{BlockClock, BlockIntervalSolver, ShortIds};
pub use error::{ConfigError, ModeError, QueryError};
pub use fixed_window::FixedWindowEstimator;
pub use hit::HitSketch;
pub use num::{Count, Key};
pub use raw::RawSketch;
pub use reduction::{HeavyHitters, ReductionSketch};
pub use space_saving::SpaceSavingSummary;
pub use stream::{
    validate_config, BlockMode, ExactOracle, IntervalFrequency, IntervalQuery, ItemId, Params, SketchConfig,
    TokenInterner,
};
pub use table::LevelTable;

pub type Raw = RawSketch<u32>;
pub type AccSolver = AccSketch<u32, u32>;
pub type HitSolver = HitSketch<u32, u32>;
pub type Acc = ReductionSketch<AccSolver>;
pub type Hit = ReductionSketch<HitSolver>;
