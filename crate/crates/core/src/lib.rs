//! Knossos and The Hour-Glass: verifiers, solvers, gadget checking and the
//! two hardness reductions (SAT to Knossos, SUBSET-SUM to Hour-Glass).

pub mod gadgets;
pub mod hourglass;
pub mod knossos;
pub mod reduce;
pub mod solve;

pub use hourglass::{
    check_path, enumerate_paths_oracle, parse_hourglass, solve_dfs, solve_dp, successors,
    verify_path, HourglassError, HourglassInstance, HourglassPath, PathFault,
};
pub use knossos::{
    is_simply_connected, parse_instance, parse_solution, render_instance, render_solution,
    rooms_from_walls, verify_solution, Cell, Edge, KnossosError, KnossosInstance, Room,
    VerifyReport, Violation, ViolationKind, WallSet,
};
pub use solve::{
    all_fours_fastpath, brute_force_oracle, enumerate_placements, enumerate_solutions, solve,
    AllSolutions, Outcome, SolveError, SolveLimits, SolveResult, SolveStats,
};
