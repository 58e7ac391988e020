//! Multiterminal function computation: networks, cut-set linear programs,
//! rates of explicit schemes, and the concurrent-to-alternating schedule
//! transform.

mod cutset;
mod lp;
mod schedule;
mod schemes;
mod spec;

pub use cutset::{
    binary_cut_sum_bound, build_cutset_lp, cut_entropy_bounds, cutset_lp_optimum,
    one_message_cut_bound, rate_label, CutBounds, CutSelection, CutSumBound,
};
pub use lp::{solve_lp, LpConstraint, LpProblem, LpSolution, LpStatus, FEASIBILITY_TOL, PIVOT_TOL};
pub use schedule::{
    concurrent_to_alternating, replay_dependencies, AlternatingMessage, AlternatingSchedule,
    ConcurrentRound, ConcurrentSchedule, Direction, MessageId,
};
pub use schemes::{
    korner_marton_rates, relay_scheme_rates, star_interactive_rates, star_network,
    three_node_network, KornerMartonReport, LinkRate, RelayReport, SchemeReport, StarReport,
    STAR_RATE_CEILING,
};
pub use spec::{GroupedCut, NetworkSpec, ProtocolSchedule, MAX_CUT_NODES};
