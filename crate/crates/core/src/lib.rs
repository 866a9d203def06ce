//! Two-dimensional Skorokhod problems on the nonnegative quadrant.
//!
//! The crate provides exact (dyadic) and floating-point piecewise-linear path
//! arithmetic, classification of 2x2 reflection matrices, two solvers, an
//! exact construction of a driving path with two distinct solutions, and a
//! verifier that certifies candidate solutions.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod counterexample;
pub mod dyadic;
pub mod error;
pub mod io;
pub mod path;
pub mod scalar;
pub mod solver;
pub mod verifier;

pub use classify::{
    classify, classify_regime, critical_canonical_scale, diagonal_rescale, is_completely_s, normalize,
    spectral_radius_abs_q, Classification, GeneralMatrix2, ReflectionMatrix2, Regime, SpectralRadius,
};
pub use counterexample::{
    build_auto, build_counterexample, build_u, check_identities, verify_bundle, AnyBundle, CounterexampleBundle,
};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use path::{jordan_decompose, stieltjes, MonotoneDecomp, PLPath1, PLPath2, Vec2};
pub use scalar::{Mode, Real, Scalar, FLOAT_EPS};
pub use solver::{lcp_step, skorokhod_1d, solve_fixed_point, solve_grid, SolveConfig, SolveResult, Sweep};
pub use verifier::{
    check_e2_signs, compare_solutions, sector_of, verify, E2Check, Sector, SolutionTriple, UniquenessDiagnostics,
    VerificationReport, VerifyOptions,
};
