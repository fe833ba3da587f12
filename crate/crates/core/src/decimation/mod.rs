//! Policy-driven decimation on top of the message-passing engine.
//!
//! A [`DecimationPolicy`] answers when to decimate (trigger), among which
//! variables (filter), which of those (perform), and to what value (assign).
//! [`run_decimaxsum`] interleaves engine rounds with decimations until every
//! variable is fixed.

mod policy;
mod run;
pub mod select;

pub use policy::{
    Assign, DecimationPolicy, EntropyOrder, Filter, FrequencySpec, Perform, Trigger,
    DEFAULT_FALLBACK,
};
pub use run::{apply_decimation, run_decimaxsum, trigger_fires};
