//! The explicit matrix families alpha(a,b), beta(x,y) and the sweep that
//! certifies their two-fiber coset behaviour.

mod family;
mod verify;

pub use family::{
    build_lattice_move1, build_move1_char2, build_move1_charneq2, build_move2, build_move2_with, heisenberg,
    MoveFamily, MoveKind, OddCorrection,
};
pub use verify::{
    verify_family, FamilyDescriptor, Fiber, Mode, SectionChoice, StratumRecord, TupleParams, VerificationReport,
    VerifyOptions, Violation, DEFAULT_BUDGET, MAX_STORED_VIOLATIONS,
};
