//! Executable checks of the weighted inequalities, the empirical-constant
//! protocol that judges them, and the suite runner.
//!
//! A check evaluates `LHS` and `RHS` of one inequality on many seeded instances,
//! each sampled at several grid sizes. Exact checks must hold with slack
//! `>= -1e-6 RHS` everywhere. Stable checks compute `Ĉ(N) = sup LHS/RHS` over the
//! instances at each grid size and pass when consecutive ratios `Ĉ(N)/Ĉ(2N)` stay
//! in `[1/1.5, 1.5]`. Instances whose hypothesis constant is infinite or grows by
//! more than 1.5x under refinement are set aside; a check with no admissible
//! instance is `SKIPPED`.

mod checks;
mod instance;
mod protocol;
mod suite;

pub use checks::{CheckId, ALL_CHECKS};
pub use instance::{instance_rng, InstanceDescriptor};
pub use protocol::{
    CheckKind, GridConstant, Sample, SubAssertion, SubSample, Verdict, VerificationReport, EXACT_REL_TOL,
    HYPOTHESIS_GROWTH, STABILITY_WINDOW,
};
pub use suite::{refinement_table, run_check, run_suite, SuiteConfig, SuiteReport};
