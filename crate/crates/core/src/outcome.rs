use crate::dcop::Assignment;
use crate::engine::TraceRecord;

/// What a solver run produced: the decoded assignment and its accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub assignment: Assignment,
    /// Total utility of `assignment` on the original problem.
    pub utility: f64,
    pub msgs_sent: u64,
    pub iterations: u64,
    pub decimations: usize,
    pub trace: Vec<TraceRecord>,
}

impl RunOutcome {
    /// Reporting cost (lower is better).
    pub fn cost(&self) -> f64 {
        -self.utility
    }
}
