//! Runtime verification of timed properties over partially synchronous
//! distributed traces.
//!
//! Each process reports events stamped by a local clock that is within a
//! known skew `ε` of true time. The monitor builds the lattice of consistent
//! global states, turns it into a timed automaton, and decides a timed CTL
//! property over every run compatible with the observation, answering
//! `TRUE`, `FALSE` or `INCONCLUSIVE`.
//!
//! ```
//! use skewmon::{Monitor, PropertySet, Quantum, TraceRecord};
//!
//! let props = PropertySet::parse("A<>[0,20] P1.ready").unwrap();
//! let mut m = Monitor::new(vec!["P1".into()], &props, 1, Quantum::default()).unwrap();
//! for (i, ts) in [0, 5, 10].into_iter().enumerate() {
//!     let rec = TraceRecord::new("P1", i, ts).with_atom("ready", i > 0);
//!     m.ingest(&rec).unwrap();
//! }
//! assert_eq!(m.verdicts()[0].to_string(), "TRUE");
//! ```

pub mod automaton;
pub mod checker;
pub mod cli;
pub mod dot;
pub mod lattice;
pub mod logic;
pub mod oracle;
pub mod sim;
pub mod trace;

pub use automaton::{build_ta, extend, unfold, AutomatonError, ExtendedTa, TimedAutomaton};
pub use checker::{check, check_with, CheckError, CheckOutcome, Discretisation, Monitor, StepReport};
pub use lattice::{LatticeError, LatticeStore, Predicates};
pub use logic::{parse_expr, parse_formula, to_ctl, Formula, LogicError, Polarity, PropertySet, Verdict3};
pub use oracle::{oracle_check, oracle_horizon, OracleError};
pub use sim::{generate_trace, Profile, SimConfig, SimError, SimTrace};
pub use trace::{Interval, LocalState, Quantum, Time, TraceError, TraceRecord};

/// Any error the library reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}
