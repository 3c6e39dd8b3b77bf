//! Function nets, views and scenarios for automotive logical architectures.
//!
//! A model is written in a small textual DSL ([`dsl`]). Function nets are
//! resolved into block occurrences ([`net`]), views are checked against the
//! net they show ([`consistency`]), scenarios are compiled into monitors
//! ([`scenario`]) and replayed against recorded or simulated traces
//! ([`sim`]). Mode machines and variant sets group views ([`modes`]).

pub mod cli;
pub mod consistency;
pub mod dsl;
pub mod model;
pub mod modes;
pub mod net;
pub mod pipeline;
pub mod report;
pub mod scenario;
pub mod sim;
pub mod value;

pub use consistency::{check_specialization, check_view, ConditionId, ConsistencyReport};
pub use dsl::{parse_condition, parse_model, render_model, Model};
pub use net::{containment_closure, resolve_reference, validate_net, ResolvedNet};
pub use scenario::{check_scenario, compile_monitor, eval_condition, Monitor};
pub use sim::{load_trace, run_monitor, run_simulation, Trace, Verdict};
