//! Composition factors of exterior squares and Lie cubes of minimal
//! modules for groups of Lie type, and the finite p-groups built from the
//! resulting submodule data.
//!
//! The crate is organised bottom-up:
//! * [`field`], [`subspace`]: exact linear algebra over F_p;
//! * [`rational`]: exact linear algebra over Q;
//! * [`roots`]: root systems, Weyl orbits, dominance, weight multiplicities;
//! * [`multiset`]: weight multisets of modules and their tensor calculus;
//! * [`factors`]: the peeling algorithm for composition factors;
//! * [`matmod`]: matrix modules, Lie-power constructions, MeatAxe-style
//!   structure analysis;
//! * [`pgroup`]: the p-groups Gamma_2(V), Gamma_3(V), their central
//!   quotients, and the exponent-p-square group E*.

#![forbid(unsafe_code)]

pub mod factors;
pub mod field;
pub mod g2gen;
pub mod matmod;
pub mod multiset;
pub mod pgroup;
pub mod rational;
pub mod roots;
pub mod subspace;

pub use factors::{
    irreducible_multiset, peel, peel_with, table_row, table_suite, CompositionFactors,
    FactorEntry, FactorError, ModularData, MultiplicityOracle, PowerKind, Regime, SuiteRow,
    TieBreak,
};
pub use field::{solve_linear, FMatrix, FieldError, LinearSolution, PrimeField};
pub use g2gen::{g2_data, g2_generator_file, g2_generators, validate_g2, G2Derivation};
pub use matmod::{
    a3_submodule, composition_factors_matrix, exterior_square, exterior_square_matrix,
    hom_space, induced_matrix, invariant_forms, is_irreducible, is_isomorphic, lie3_module,
    lie3_realization_map, load_generators, parse_generators, quotient_action,
    socle_and_lattice, spin, stabilizes, submodule_action, tensor_module, wedge_pairs,
    FormKind, InducedAction, InvariantForm, Irreducibility, LatticeNode, LatticeShape,
    Lie3Module, LiePowerBasis, MatFactor, MatModule, ModuleError, ProbeConfig, QuotientMap,
    SubmoduleLattice,
};
pub use multiset::{CharZeroSource, MultiplicitySource, MultisetError, WeightMultiset};
pub use pgroup::{
    build_optimal_g2, InducedMaps, OptimalG2, OptimalVariant, PElement, PGroup, PGroupError,
    PGroupKind, SampleConfig, StructureReport,
};
pub use roots::{build_root_system, RootError, RootSystem, TypeLabel, Weight};
pub use subspace::Subspace;
