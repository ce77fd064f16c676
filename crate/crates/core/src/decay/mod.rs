//! Zig-zag decay profiles built from the per-move step bounds.
//!
//! The bounds are centered: `phi(a)` controls `|f(D(a)) - lim f|` and
//! `pair_bound(a, b)` controls `|f(D(a)) - f(D(b))|`, both in units of the
//! multiplier norm of `f`.

mod path;
mod profile;
mod setting;

pub use path::{check_direction, zigzag_path, zigzag_walk, CycleInfo, Direction, PathStep, ZigzagPath, MAX_PATH_STEPS};
pub use profile::{
    check_band_decay, check_tail, decay_profile, pair_bound, pair_bound_within, phi, phi_partial_sum, BandDecay,
    DecayProfile, PairBound, Phi, PhiEntry, PhiSource, TailCheck, TailFormula, TAIL_TOL, TRIVIAL_BOUND,
};
pub use setting::{
    admissible_p_range, check_admissible, constraints, minimal_slope_n, step_bound, Constraint, Move, PExponent, PRange,
    Setting, SettingKind, StepBound, StepFormula,
};
