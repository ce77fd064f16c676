//! Finite subgroups of the lattice, their group algebras, and spectral norms.

pub mod algebra;
pub mod checks;
pub mod group;
pub mod h1;
pub mod h2;
pub mod spectral;

pub use algebra::AlgebraElement;
pub use group::{
    siegel_unipotent, Code, ElementaryAbelian, EnumeratedGroup, FiniteGroup, GroupLaw, HeisenbergCoords,
    HeisenbergGroup, Poly, Realization,
};
pub use spectral::{
    abelian_spectrum, character_stats, character_stats_sampled, character_value, cstar_norm, dense_spectrum, heisenberg_spectrum,
    nc_lp_norm, power_iteration_norm, spectrum, sweep_characters, CharacterStats, PowerIteration,
    PowerIterationResult, Spectrum,
};
pub use h1::{build_h1_wide_pair, build_h1_pair, build_h1_pair_with_offsets, H1Pair};
pub use h2::{build_h2_pair, build_h2_pair_with, BLift, H2Pair, OrderCertificate, CLOSURE_ENUMERATION_LIMIT, DEFAULT_H2_BUDGET};
pub use checks::*;
