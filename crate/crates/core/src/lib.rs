//! Computational toolkit for second-order complex ODEs with a meromorphic
//! singularity at `w = 0` of the form
//!
//! ```text
//! z'' = (1/w^m) (A z + B) z' + (1/w^{2m}) (C z^3 + D z^2 + E z + F)
//! ```
//!
//! attached to nonminimal real hypersurfaces in C^2 through their Segre
//! varieties. The crate covers the full pipeline:
//!
//! * [`series`]: truncated Laurent arithmetic over complex doubles, the
//!   carrier for every coefficient function;
//! * [`hypersurface`]: prenormalized defining data and the closed-form
//!   association with the singular ODE (and its inverse);
//! * [`ode`]: structural relation checks, Fuchsian classification, the
//!   `Z = z w^l` reduction to Briot–Bouquet form, extension verdicts, and
//!   reconstruction of an ODE from a linear-fractional map;
//! * [`bbsolver`]: formal power-series solutions of the reduced equation
//!   with resonance classification and obstruction detection;
//! * [`numint`]: adaptive path integration in the punctured disc,
//!   monodromy matrices, branching probes, growth exponents, and residual
//!   checks on sampled solution graphs;
//! * [`linalg3`]: centralizer dimensions of 3x3 monodromy operators and the
//!   resulting automorphism-algebra dimension bounds;
//! * [`schema`]: the JSON interchange formats used by the CLI, with
//!   hardened parsers;
//! * [`fixtures`]: the built-in named example datasets.
//!
//! All values are immutable and all operations are pure; everything can be
//! shared freely across threads.

pub mod bbsolver;
pub mod fixtures;
pub mod hypersurface;
pub mod linalg3;
pub mod numint;
pub mod ode;
pub mod sampling;
pub mod schema;
pub mod series;

pub use num_complex::Complex64 as C64;

pub use bbsolver::{choose_base_root, formal_solve, linearize, BbError, BbSystem, FormalSolution, SolveStatus};
pub use hypersurface::{associate_ode, recover_hypersurface, validate_hypersurface, HypersurfaceError, P0Hypersurface, Sign};
pub use linalg3::{centralizer_dim, hol_dim_bound, LinalgError, MonodromyOperator};
pub use numint::{growth_exponent, integrate_path, monodromy_linear, monodromy_probe, segre_residual, GrowthReport, GrowthVerdict, MonodromyReport, NumintError, PathSpec, StepControl};
pub use ode::{check_relations, extension_verdict, fuchsian_test_hypersurface, fuchsian_test_ode, ode_from_map, reduce, FuchsianClass, MapTuple, NonminimalOde, OdeError, ReducedOde, Verdict};
pub use series::{SeriesError, TruncatedSeries};
